// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CPBSP_CPBSP_HPP
#define CPBSP_CPBSP_HPP

#include "cpbsp/common.hpp"
#include "cpbsp/config.hpp"
#include "cpbsp/cpb.hpp"
#include "cpbsp/image.hpp"
#include "cpbsp/image_io.hpp"
#include "cpbsp/metrics.hpp"
#include "cpbsp/pipeline.hpp"
#include "cpbsp/slic.hpp"
#include "cpbsp/synth.hpp"

#endif  // CPBSP_CPBSP_HPP
