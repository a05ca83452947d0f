#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "mecb/dataset.hpp"
#include "mecb/errors.hpp"

namespace mecb {

struct KMeansResult {
    Matrix centers;               // k x d
    std::vector<int> assignment;  // size n
    double cost = 0.0;            // sum of weighted squared distances
    Vector weights;               // per-cluster total weight (cluster sizes for unit input)
};

struct KCenterSweep {
    std::vector<int> order;  // selected center indices, farthest-point order
    std::vector<double> g;   // g[k-1] = max-min Euclidean distance after k centers
};

namespace detail {

inline double uniform01(std::mt19937_64& gen) {
    return std::ldexp(static_cast<double>(gen() >> 11), -53);
}

// Sample an index proportionally to nonnegative weights; falls back to the
// first positive weight on degenerate input.
inline Eigen::Index sample_weighted(const Vector& w, std::mt19937_64& gen) {
    double total = w.sum();
    if (total <= 0.0) {
        for (Eigen::Index i = 0; i < w.size(); ++i)
            if (w(i) >= 0.0) return i;
        return 0;
    }
    double target = uniform01(gen) * total;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        acc += w(i);
        if (target < acc) return i;
    }
    return w.size() - 1;
}

// Squared Euclidean distances from every row of pts to a single point.
inline Vector sq_dist_to(const Matrix& pts, const Vector& sq_norms, const Eigen::RowVectorXd& c) {
    Vector d2 = sq_norms.array() + c.squaredNorm() - 2.0 * (pts * c.transpose()).array();
    return d2.cwiseMax(0.0);
}

}  // namespace detail

/// Weighted Lloyd with k-means++ seeding. Deterministic for a fixed seed.
/// Empty clusters are repaired by promoting the farthest point to a
/// singleton center.
inline KMeansResult kmeans_weighted(const Matrix& pts, const Vector& w, int k,
                                    std::uint64_t seed, int max_iters = 100,
                                    double tol = 1e-6) {
    const Eigen::Index n = pts.rows();
    const Eigen::Index d = pts.cols();
    if (k < 1 || k > n) throw ConfigError("kmeans: k out of [1, n]");

    std::mt19937_64 gen(seed);
    Vector sq_norms = pts.rowwise().squaredNorm();

    // k-means++ seeding
    Matrix centers(k, d);
    centers.row(0) = pts.row(detail::sample_weighted(w, gen));
    Vector d2 = detail::sq_dist_to(pts, sq_norms, centers.row(0));
    for (int j = 1; j < k; ++j) {
        Vector probs = w.cwiseProduct(d2);
        centers.row(j) = pts.row(detail::sample_weighted(probs, gen));
        d2 = d2.cwiseMin(detail::sq_dist_to(pts, sq_norms, centers.row(j)));
    }

    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    Vector best_d2(n);
    double prev_cost = std::numeric_limits<double>::infinity();
    double cost = prev_cost;
    Vector cluster_w(k);

    for (int iter = 0; iter < max_iters; ++iter) {
        // assignment step
        best_d2.setConstant(std::numeric_limits<double>::infinity());
        for (int j = 0; j < k; ++j) {
            Vector dj = detail::sq_dist_to(pts, sq_norms, centers.row(j));
            for (Eigen::Index i = 0; i < n; ++i) {
                if (dj(i) < best_d2(i)) {
                    best_d2(i) = dj(i);
                    assign[static_cast<std::size_t>(i)] = j;
                }
            }
        }
        cost = w.dot(best_d2);

        // update step
        Matrix sums = Matrix::Zero(k, d);
        cluster_w.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            int j = assign[static_cast<std::size_t>(i)];
            sums.row(j) += w(i) * pts.row(i);
            cluster_w(j) += w(i);
        }
        for (int j = 0; j < k; ++j) {
            if (cluster_w(j) > 0.0) {
                centers.row(j) = sums.row(j) / cluster_w(j);
            } else {
                // promote the point farthest from its center
                Eigen::Index far_i = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (w(i) > 0.0 && best_d2(i) > far_d) {
                        far_d = best_d2(i);
                        far_i = i;
                    }
                }
                centers.row(j) = pts.row(far_i);
            }
        }

        if (prev_cost - cost < tol * std::max(cost, 1e-300) && iter > 0) break;
        prev_cost = cost;
    }

    // final assignment against the converged centers
    best_d2.setConstant(std::numeric_limits<double>::infinity());
    for (int j = 0; j < k; ++j) {
        Vector dj = detail::sq_dist_to(pts, sq_norms, centers.row(j));
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dj(i) < best_d2(i)) {
                best_d2(i) = dj(i);
                assign[static_cast<std::size_t>(i)] = j;
            }
        }
    }
    cluster_w.setZero();
    for (Eigen::Index i = 0; i < n; ++i) cluster_w(assign[static_cast<std::size_t>(i)]) += w(i);

    KMeansResult res;
    res.centers = std::move(centers);
    res.assignment = std::move(assign);
    res.cost = w.dot(best_d2);
    res.weights = std::move(cluster_w);
    return res;
}

inline KMeansResult kmeans(const Dataset& ds, int k, std::uint64_t seed) {
    return kmeans_weighted(ds.points, Vector::Ones(ds.n()), k, seed);
}

/// f(k) = opt(k) - opt(2k), clamped at zero; opt(2k) := 0 when 2k > n.
inline double f_gap(const Dataset& ds, int k, std::uint64_t seed) {
    double cost_k = kmeans(ds, k, seed).cost;
    double cost_2k = (2 * k <= ds.n()) ? kmeans(ds, 2 * k, seed).cost : 0.0;
    return std::max(0.0, cost_k - cost_2k);
}

/// f2: maximum Euclidean distance from any point to its assigned center.
inline double max_center_distance(const Matrix& pts, const KMeansResult& km) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        double dist = (pts.row(i) - km.centers.row(km.assignment[static_cast<std::size_t>(i)])).norm();
        worst = std::max(worst, dist);
    }
    return worst;
}

/// One-pass greedy k-center: repeatedly add the farthest point, recording
/// g(k) after each addition. The initial all-infinite argmax ties break to
/// the lowest index.
inline KCenterSweep kcenter_sweep(const Matrix& pts, int K) {
    const Eigen::Index n = pts.rows();
    if (K < 1 || K > n) throw ConfigError("kcenter_sweep: K out of [1, n]");

    KCenterSweep sweep;
    sweep.order.reserve(static_cast<std::size_t>(K));
    sweep.g.reserve(static_cast<std::size_t>(K));

    Vector dist = Vector::Constant(n, std::numeric_limits<double>::infinity());
    for (int t = 0; t < K; ++t) {
        Eigen::Index pick = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dist(i) > best) {
                best = dist(i);
                pick = i;
            }
        }
        sweep.order.push_back(static_cast<int>(pick));
        Vector dd = (pts.rowwise() - pts.row(pick)).rowwise().norm();
        dist = dist.cwiseMin(dd);
        sweep.g.push_back(dist.maxCoeff());
    }
    return sweep;
}

inline KCenterSweep kcenter_sweep(const Dataset& ds, int K) {
    return kcenter_sweep(ds.points, K);
}

}  // namespace mecb
