// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/decimal.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace bsvrg {

bool DecimalFraction::quota_met(std::int64_t count, std::int64_t total) const {
    // count >= (den - num)/den * total  <=>  count*den >= (den - num)*total
    const __int128 lhs = static_cast<__int128>(count) * den;
    const __int128 rhs = static_cast<__int128>(den - num) * total;
    return lhs >= rhs;
}

std::int64_t DecimalFraction::floor_times(std::int64_t total) const {
    const __int128 p = static_cast<__int128>(num) * total;
    return static_cast<std::int64_t>(p / den);
}

std::optional<DecimalFraction> DecimalFraction::parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    if (text[i] == '+') ++i;
    std::int64_t mantissa = 0;
    int frac_digits = 0;
    bool any_digit = false;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            if (mantissa > (INT64_MAX - 9) / 10) return std::nullopt;  // too many digits
            mantissa = mantissa * 10 + (c - '0');
            if (seen_dot) ++frac_digits;
            any_digit = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            return std::nullopt;
        }
    }
    int exponent = 0;
    if (i < text.size()) {  // at 'e'
        ++i;
        const char* begin = text.c_str() + i;
        const char* end = text.c_str() + text.size();
        auto [ptr, ec] = std::from_chars(begin, end, exponent);
        if (ec != std::errc() || ptr != end) return std::nullopt;
    }
    if (!any_digit) return std::nullopt;

    int shift = exponent - frac_digits;  // value = mantissa * 10^shift
    std::int64_t num = mantissa;
    std::int64_t den = 1;
    while (shift > 0) {
        if (num > INT64_MAX / 10) return std::nullopt;
        num *= 10;
        --shift;
    }
    while (shift < 0) {
        if (den > INT64_MAX / 10) return std::nullopt;
        den *= 10;
        ++shift;
    }
    return DecimalFraction{num, den};
}

DecimalFraction DecimalFraction::from_double(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) return DecimalFraction{0, 1};
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) return DecimalFraction{0, 1};
    if (auto f = parse(std::string(buf, ptr))) return *f;
    return DecimalFraction{0, 1};
}

}  // namespace bsvrg
