// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

namespace royalty {

/// Base class for every error this library raises.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: CSV rows, JSON files, bad argument values.
struct ParseError : Error {
    using Error::Error;
};

/// Not enough revenue history to compute a trailing window or cover a holding period.
struct HistoryError : Error {
    using Error::Error;
};

/// Pricing cannot produce a finite positive value (divergent perpetuity,
/// non-positive expected cashflow).
struct PricingError : Error {
    using Error::Error;
};

/// A backtest run produced no eligible holdings.
struct EmptyCohortError : Error {
    using Error::Error;
};

}  // namespace royalty
