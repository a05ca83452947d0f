#pragma once

#include <Eigen/Dense>

#include <algorithm>

#include "mecb/dataset.hpp"
#include "mecb/errors.hpp"

namespace mecb {

/// Descending eigenvalues of the data covariance Y^T Y (equivalently the
/// nonzero spectrum of Y Y^T), with prefix sums Lambda_j.
struct EigenSpectrum {
    Vector lambdas;         // sorted descending, clipped at zero
    Vector prefix;          // prefix(j) = sum of first j eigenvalues, prefix(0) = 0
    double total_variance;  // sum_i ||y_i||^2

    double prefix_at(Eigen::Index j) const {
        return prefix(std::min<Eigen::Index>(std::max<Eigen::Index>(j, 0), lambdas.size()));
    }
};

/// Eigenvalues via the smaller Gram form: d x d when d <= n, else n x n.
inline EigenSpectrum covariance_spectrum(const Dataset& ds) {
    const Matrix& y = ds.points;
    if (!y.allFinite()) throw NumericError("covariance_spectrum: non-finite entries");

    Matrix gram;
    if (ds.d() <= ds.n())
        gram.noalias() = y.transpose() * y;
    else
        gram.noalias() = y * y.transpose();

    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("covariance_spectrum: eigensolver failed");

    EigenSpectrum spec;
    spec.lambdas = solver.eigenvalues().reverse().cwiseMax(0.0);
    spec.prefix.resize(spec.lambdas.size() + 1);
    spec.prefix(0) = 0.0;
    for (Eigen::Index i = 0; i < spec.lambdas.size(); ++i)
        spec.prefix(i + 1) = spec.prefix(i) + spec.lambdas(i);
    spec.total_variance = y.squaredNorm();
    return spec;
}

/// f(k) ~= sum_{i=k}^{2k-1} lambda_i (1-based), zero beyond the spectrum.
inline double f_evd(const EigenSpectrum& spec, int k) {
    if (k < 1) throw ConfigError("f_evd: k < 1");
    return spec.prefix_at(2 * k - 1) - spec.prefix_at(k - 1);
}

}  // namespace mecb
