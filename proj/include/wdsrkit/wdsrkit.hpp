// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_WDSRKIT_HPP_
#define WDSRKIT_WDSRKIT_HPP_

#include "wdsrkit/adam.hpp"
#include "wdsrkit/bicubic.hpp"
#include "wdsrkit/blocks.hpp"
#include "wdsrkit/budget.hpp"
#include "wdsrkit/checkpoint.hpp"
#include "wdsrkit/common.hpp"
#include "wdsrkit/config.hpp"
#include "wdsrkit/conv.hpp"
#include "wdsrkit/dataset.hpp"
#include "wdsrkit/gradcheck.hpp"
#include "wdsrkit/image.hpp"
#include "wdsrkit/layers.hpp"
#include "wdsrkit/metrics.hpp"
#include "wdsrkit/network.hpp"
#include "wdsrkit/norm.hpp"
#include "wdsrkit/pixel_shuffle.hpp"
#include "wdsrkit/tensor.hpp"
#include "wdsrkit/train.hpp"

#endif  // WDSRKIT_WDSRKIT_HPP_
