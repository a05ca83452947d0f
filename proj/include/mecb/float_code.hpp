#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mecb/errors.hpp"

namespace mecb {

/// Sign/exponent/significand decomposition of one nonzero attribute value:
/// value = (-1)^sign * 2^exponent * sum_j digits[j] * 2^-j, digits[0] == 1.
/// Stored width is 1 + me + s bits (digits[0] is implicit on the wire).
struct FloatCode {
    int sign = 0;  // 0: nonnegative, 1: negative
    int exponent = 0;
    std::vector<std::uint8_t> digits;  // a(0..s)

    int s() const { return static_cast<int>(digits.size()) - 1; }
    int bit_width(int me) const { return 1 + me + s(); }
};

/// Decompose a nonzero x in [-1, 1] into s significant digits after the
/// leading one. Returns nullopt (flush to zero) if the exponent does not fit
/// in me signed bits.
inline std::optional<FloatCode> decompose(double x, int me, int s) {
    if (!std::isfinite(x) || std::abs(x) > 1.0) throw ConfigError("decompose: x outside [-1,1]");
    if (x == 0.0) throw ConfigError("decompose: zero uses the dedicated all-zero code");
    if (s < 0) throw ConfigError("decompose: negative digit count");

    int e2;
    double m = std::frexp(std::abs(x), &e2);  // m in [0.5, 1)
    int exponent = e2 - 1;                    // x = +-(2m) * 2^exponent, 2m in [1, 2)
    if (exponent < -(1 << (me - 1))) return std::nullopt;

    FloatCode code;
    code.sign = x < 0.0 ? 1 : 0;
    code.exponent = exponent;
    code.digits.resize(static_cast<std::size_t>(s) + 1);
    double frac = 2.0 * m;  // in [1, 2)
    for (int j = 0; j <= s; ++j) {
        double bit = std::floor(frac);
        code.digits[static_cast<std::size_t>(j)] = bit >= 1.0 ? 1 : 0;
        frac = (frac - bit) * 2.0;
    }
    return code;
}

inline double reconstruct(const FloatCode& code) {
    double v = 0.0;
    for (int j = code.s(); j >= 0; --j)
        v = v / 2.0 + static_cast<double>(code.digits[static_cast<std::size_t>(j)]);
    v = std::ldexp(v, code.exponent);
    return code.sign ? -v : v;
}

}  // namespace mecb
