#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "mecb/dataset.hpp"
#include "mecb/errors.hpp"

namespace mecb {

/// Rounding quantizer configuration: b bits per attribute split as
/// 1 sign + me exponent + s = b - 1 - me significant digits.
struct QuantizerSpec {
    int b;
    int me;

    int s() const { return b - 1 - me; }
};

inline QuantizerSpec make_quantizer(int b, int me) {
    if (b < 1 + me) throw ConfigError("quantizer: b < 1 + me");
    return QuantizerSpec{b, me};
}

/// Round x to s significant binary digits (implicit leading one, ties up).
/// Keeps sign, renormalizes the exponent on carry. quantize(0) = 0.
template <typename Scalar>
Scalar quantize_scalar(Scalar x, int s) {
    if (x == Scalar(0)) return Scalar(0);
    if (s >= std::numeric_limits<Scalar>::digits - 1) return x;  // already exact
    int e2;
    Scalar m = std::frexp(std::abs(x), &e2);     // m in [0.5, 1)
    Scalar mantissa = std::ldexp(m, s + 1);      // 2m * 2^s
    Scalar rounded = std::floor(mantissa + Scalar(0.5));
    Scalar v = std::ldexp(rounded, e2 - 1 - s);
    return x < Scalar(0) ? -v : v;
}

template <typename Scalar>
Scalar quantize_scalar(Scalar x, const QuantizerSpec& spec) {
    return quantize_scalar(x, spec.s());
}

/// Entrywise quantization of a point block whose entries lie in [-1, 1].
template <typename Derived>
Matrix quantize_points(const Eigen::MatrixBase<Derived>& points, const QuantizerSpec& spec) {
    if ((points.array().abs() > 1.0 + 1e-9).any())
        throw ConfigError("quantize_points: entry outside [-1,1]");
    const int s = spec.s();
    return points.unaryExpr([s](double v) { return quantize_scalar(v, s); });
}

/// Eq.-style maximum quantization error: Delta(b) = 2^-(b-1-me) * max_norm.
inline double delta_bound(int b, const Dataset& ds) {
    if (b < 1 + ds.me || b > ds.b0) throw ConfigError("delta_bound: b out of [1+me, b0]");
    return std::ldexp(ds.max_norm, -(b - 1 - ds.me));
}

}  // namespace mecb
