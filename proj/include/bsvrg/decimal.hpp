// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace bsvrg {

// Exact non-negative decimal fraction num/den with den a power of ten.
// Used for the Byzantine fraction so that cardinality comparisons like
// |G_t| < (1-alpha)K are evaluated in integer arithmetic, never through
// a rounded double.
struct DecimalFraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    // count >= (1 - alpha) * K, exactly.
    bool quota_met(std::int64_t count, std::int64_t total) const;

    // floor(alpha * K), exactly.
    std::int64_t floor_times(std::int64_t total) const;

    // Parses a plain decimal literal ("0.2", "0", ".125", "2.5e-1").
    static std::optional<DecimalFraction> parse(const std::string& text);

    // Exact decimal interpretation of the shortest round-trip
    // representation of x (so 0.2 becomes 2/10, not the 53-bit binary value).
    static DecimalFraction from_double(double x);
};

}  // namespace bsvrg
