#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "mecb/clustering.hpp"
#include "mecb/coreset.hpp"
#include "mecb/dataset.hpp"
#include "mecb/errors.hpp"

namespace mecb {

enum class Task { Meb, KMeans, Pca };

inline std::string task_name(Task t) {
    switch (t) {
        case Task::Meb: return "meb";
        case Task::KMeans: return "kmeans";
        case Task::Pca: return "pca";
    }
    return "?";
}

struct TaskSpec {
    Task task = Task::Meb;
    int k = 2;       // k-means task
    int r = 3;       // PCA components
    std::uint64_t seed = 1;
    double meb_tol = 1e-2;
};

struct MebResult {
    Vector center;
    double radius = 0.0;
};

/// Badoiu-Clarkson iteration: (1+tol)-approximate minimum enclosing ball.
inline MebResult solve_meb(const Matrix& pts, double tol = 1e-2) {
    if (pts.rows() < 1) throw ConfigError("solve_meb: empty point set");
    Vector center = pts.colwise().mean().transpose();
    const int iters = static_cast<int>(std::ceil(1.0 / (tol * tol)));
    for (int t = 1; t <= iters; ++t) {
        Eigen::Index far_i;
        (pts.rowwise() - center.transpose()).rowwise().squaredNorm().maxCoeff(&far_i);
        center += (pts.row(far_i).transpose() - center) / static_cast<double>(t + 1);
    }
    MebResult res;
    res.radius = (pts.rowwise() - center.transpose()).rowwise().norm().maxCoeff();
    res.center = std::move(center);
    return res;
}

/// A fitted model for any of the three tasks.
struct TaskModel {
    Task task = Task::Meb;
    Vector meb_center;
    Matrix km_centers;  // k x d
    Vector pca_mean;
    Matrix pca_basis;  // d x r, orthonormal columns
};

/// Fit a model on a weighted point set. `restarts > 1` keeps the best
/// k-means run (used to stabilize the full-data reference model).
inline TaskModel fit_model(const Matrix& pts, const Vector& weights, const TaskSpec& spec,
                           int restarts = 1) {
    TaskModel model;
    model.task = spec.task;
    switch (spec.task) {
        case Task::Meb:
            // max-form cost: weights are ignored
            model.meb_center = solve_meb(pts, spec.meb_tol).center;
            break;
        case Task::KMeans: {
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < restarts; ++r) {
                KMeansResult km = kmeans_weighted(pts, weights, spec.k,
                                                  spec.seed + static_cast<std::uint64_t>(r) * 7919);
                if (km.cost < best) {
                    best = km.cost;
                    model.km_centers = std::move(km.centers);
                }
            }
            break;
        }
        case Task::Pca: {
            double total_w = weights.sum();
            model.pca_mean = (pts.transpose() * weights) / total_w;
            Matrix centered = pts.rowwise() - model.pca_mean.transpose();
            Matrix cov = centered.transpose() * weights.asDiagonal() * centered;
            Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
            if (solver.info() != Eigen::Success) throw NumericError("pca: eigensolver failed");
            const Eigen::Index d = pts.cols();
            if (spec.r < 1 || spec.r > d) throw ConfigError("pca: r out of [1, d]");
            model.pca_basis = solver.eigenvectors().rightCols(spec.r).rowwise().reverse();
            break;
        }
    }
    return model;
}

/// Task cost of a model evaluated on the full dataset.
inline double model_cost(const Dataset& ds, const TaskModel& model) {
    switch (model.task) {
        case Task::Meb:
            return (ds.points.rowwise() - model.meb_center.transpose()).rowwise().norm().maxCoeff();
        case Task::KMeans: {
            Vector best = Vector::Constant(ds.n(), std::numeric_limits<double>::infinity());
            for (Eigen::Index j = 0; j < model.km_centers.rows(); ++j)
                best = best.cwiseMin(
                    (ds.points.rowwise() - model.km_centers.row(j)).rowwise().squaredNorm());
            return best.sum();
        }
        case Task::Pca: {
            Matrix centered = ds.points.rowwise() - model.pca_mean.transpose();
            Matrix proj = centered * model.pca_basis;
            return centered.squaredNorm() - proj.squaredNorm();
        }
    }
    return 0.0;
}

struct EvalReport {
    std::string model;
    double cost_on_full = 0.0;
    double normalized_cost = 0.0;
    double elapsed_ms = 0.0;
};

inline int reference_restarts(Task t) { return t == Task::KMeans ? 20 : 1; }

/// Learn a model on the summary and on the full dataset; report
/// cost(Y, x_S) / cost(Y, x*).
inline EvalReport eval_task(const Dataset& ds, const Matrix& summary_pts,
                            const Vector& summary_w, const TaskSpec& spec) {
    if (summary_pts.cols() != ds.d()) throw ConfigError("eval_task: dimension mismatch");
    auto t0 = std::chrono::steady_clock::now();
    TaskModel x_s = fit_model(summary_pts, summary_w, spec);
    TaskModel x_star = fit_model(ds.points, Vector::Ones(ds.n()), spec,
                                 reference_restarts(spec.task));
    double cost_s = model_cost(ds, x_s);
    double cost_star = model_cost(ds, x_star);
    auto t1 = std::chrono::steady_clock::now();

    EvalReport rep;
    rep.model = task_name(spec.task);
    rep.cost_on_full = cost_s;
    rep.normalized_cost = cost_s / cost_star;
    rep.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rep;
}

inline EvalReport eval_task(const Dataset& ds, const WeightedCoreset& cs, const TaskSpec& spec) {
    return eval_task(ds, cs.points, cs.weights, spec);
}

}  // namespace mecb
