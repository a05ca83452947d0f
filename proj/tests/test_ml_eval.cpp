#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mecb/ml_eval.hpp"

using namespace mecb;

namespace {

Matrix random_points(int n, int d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = unif(gen);
    return m;
}

// Exact planar minimum enclosing ball: the optimum is determined by two
// points (a diameter) or by three points (their circumcircle).
double exact_meb_radius_2d(const Matrix& pts) {
    const int n = static_cast<int>(pts.rows());
    auto covers = [&](const Eigen::Vector2d& c, double r) {
        for (int i = 0; i < n; ++i)
            if ((pts.row(i).transpose() - c).norm() > r + 1e-9) return false;
        return true;
    };
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Eigen::Vector2d c = (pts.row(i) + pts.row(j)).transpose() / 2.0;
            double r = (pts.row(i).transpose() - c).norm();
            if (r < best && covers(c, r)) best = r;
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                Eigen::Vector2d a = pts.row(i), b = pts.row(j), d = pts.row(l);
                Eigen::Matrix2d m;
                m << (b - a).transpose(), (d - a).transpose();
                if (std::abs(m.determinant()) < 1e-12) continue;
                Eigen::Vector2d rhs(0.5 * (b.squaredNorm() - a.squaredNorm()),
                                    0.5 * (d.squaredNorm() - a.squaredNorm()));
                Eigen::Vector2d c = m.colPivHouseholderQr().solve(rhs);
                double r = (a - c).norm();
                if (r < best && covers(c, r)) best = r;
            }
    return best;
}

}  // namespace

TEST_CASE("solve_meb examples") {
    Matrix single(1, 2);
    single << 0.3, -0.4;
    MebResult one = solve_meb(single);
    CHECK(one.radius == doctest::Approx(0.0));
    CHECK(one.center(0) == doctest::Approx(0.3));

    Matrix pair(2, 1);
    pair << -1, 1;
    MebResult two = solve_meb(pair, 1e-2);
    CHECK(two.radius == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(two.center(0)) < 0.02);

    Matrix square(4, 2);
    square << 1, 1, 1, -1, -1, 1, -1, -1;
    MebResult sq = solve_meb(square, 1e-2);
    CHECK(sq.radius == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
    CHECK(sq.center.norm() < 0.05);

    CHECK_THROWS_AS(solve_meb(Matrix(0, 2)), ConfigError);
}

TEST_CASE("solve_meb approximation factor against an exact planar oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Matrix pts = random_points(8, 2, 600 + seed);
        double opt = exact_meb_radius_2d(pts);
        double got = solve_meb(pts, 1e-2).radius;
        CHECK(got >= opt - 1e-9);
        CHECK(got <= (1.0 + 2e-2) * opt);
    }
}

TEST_CASE("self-evaluation gives normalized cost 1") {
    Dataset ds = normalize(random_points(40, 3, 8));
    for (Task t : {Task::Meb, Task::KMeans, Task::Pca}) {
        TaskSpec spec;
        spec.task = t;
        spec.k = 2;
        spec.r = 2;
        spec.seed = 5;
        EvalReport rep = eval_task(ds, ds.points, Vector::Ones(ds.n()), spec);
        // the summary is the dataset; k-means uses fewer restarts so allow
        // the reference to win slightly
        CHECK(rep.normalized_cost >= 1.0 - 1e-9);
        CHECK(rep.normalized_cost <= 1.05);
        if (t != Task::KMeans) CHECK(rep.normalized_cost == doctest::Approx(1.0));
        CHECK(rep.model == task_name(t));
        CHECK(rep.elapsed_ms >= 0.0);
    }
}

TEST_CASE("weighted PCA with unit weights equals the unweighted solver") {
    Matrix pts = random_points(25, 4, 3);
    TaskSpec spec;
    spec.task = Task::Pca;
    spec.r = 2;
    TaskModel m = fit_model(pts, Vector::Ones(25), spec);

    Eigen::RowVectorXd mean = pts.colwise().mean();
    Matrix centered = pts.rowwise() - mean;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(centered.transpose() * centered);
    Matrix expect = solver.eigenvectors().rightCols(2).rowwise().reverse();

    CHECK((m.pca_mean.transpose() - mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.pca_basis.cols() == 2);
    // columns agree up to sign
    for (int c = 0; c < 2; ++c) {
        double dot = std::abs(m.pca_basis.col(c).dot(expect.col(c)));
        CHECK(dot == doctest::Approx(1.0).epsilon(1e-9));
    }
    // orthonormal
    Matrix gram = m.pca_basis.transpose() * m.pca_basis;
    CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pca model cost equals the residual variance beyond r components") {
    Matrix pts = random_points(30, 4, 13);
    Dataset ds = normalize(pts);
    TaskSpec spec;
    spec.task = Task::Pca;
    spec.r = 2;
    TaskModel m = fit_model(ds.points, Vector::Ones(ds.n()), spec);

    Matrix centered = ds.points.rowwise() - m.pca_mean.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(centered.transpose() * centered);
    double residual = solver.eigenvalues().head(2).sum();  // ascending order
    CHECK(model_cost(ds, m) == doctest::Approx(residual).epsilon(1e-9));
    CHECK_THROWS_AS(([&] {
                        TaskSpec bad;
                        bad.task = Task::Pca;
                        bad.r = 5;
                        fit_model(ds.points, Vector::Ones(ds.n()), bad);
                    })(),
                    ConfigError);
}

TEST_CASE("weighted point replication matches integer weights") {
    // a weight-2 point behaves like two copies for k-means and PCA
    Matrix base(3, 2);
    base << 0, 0, 1, 0, 0, 1;
    Matrix rep(4, 2);
    rep << 0, 0, 0, 0, 1, 0, 0, 1;
    Vector w(3);
    w << 2, 1, 1;

    // best achievable weighted SSE equals the replicated one (2/3 here:
    // the doubled origin forms its own cluster's counterweight)
    double best_w = std::numeric_limits<double>::infinity();
    double best_r = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < 8; ++s) {
        best_w = std::min(best_w, kmeans_weighted(base, w, 2, s).cost);
        best_r = std::min(best_r, kmeans_weighted(rep, Vector::Ones(4), 2, s).cost);
    }
    CHECK(best_w == doctest::Approx(best_r).epsilon(1e-9));
    CHECK(best_w == doctest::Approx(2.0 / 3.0));

    Dataset target = make_dataset(random_points(10, 2, 99));

    TaskSpec pca;
    pca.task = Task::Pca;
    pca.r = 1;
    TaskModel pa = fit_model(base, w, pca);
    TaskModel pb = fit_model(rep, Vector::Ones(4), pca);
    CHECK(model_cost(target, pa) == doctest::Approx(model_cost(target, pb)).epsilon(1e-9));
}

TEST_CASE("coreset evaluation stays close on an easy mixture") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> noise(0.0, 0.05);
    Matrix pts(60, 2);
    for (int i = 0; i < 60; ++i) {
        double cx = (i % 2 == 0) ? 0.7 : -0.7;
        pts(i, 0) = cx + noise(gen);
        pts(i, 1) = noise(gen);
    }
    Dataset ds = normalize(pts);
    WeightedCoreset cs = apply_quantizer(build_rcc(ds, 6, 3), 20);
    for (Task t : {Task::Meb, Task::KMeans, Task::Pca}) {
        TaskSpec spec;
        spec.task = t;
        spec.k = 2;
        spec.r = 1;
        spec.seed = 2;
        EvalReport rep = eval_task(ds, cs, spec);
        CHECK(rep.normalized_cost >= 1.0 - 1e-6);
        CHECK(rep.normalized_cost <= 1.3);
    }
}
