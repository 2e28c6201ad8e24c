// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "royalty/backtest.hpp"
#include "royalty/calendar.hpp"
#include "royalty/calibration.hpp"
#include "royalty/data_model.hpp"
#include "royalty/errors.hpp"
#include "royalty/pricing.hpp"
#include "royalty/synthgen.hpp"
