#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>

#include "mecb/coreset.hpp"
#include "mecb/optimizer.hpp"

using namespace mecb;

namespace {

Dataset random_dataset(int n, int d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = unif(gen);
    return make_dataset(std::move(m));
}

// cost(y, x) = 1 + dist(y, x): rho = 1, cost >= 1.
double sum_cost(const Matrix& pts, const Vector& w, const Vector& x) {
    return w.sum() + w.dot((pts.rowwise() - x.transpose()).rowwise().norm().matrix());
}

double max_cost(const Matrix& pts, const Vector& x) {
    return 1.0 + (pts.rowwise() - x.transpose()).rowwise().norm().maxCoeff();
}

}  // namespace

TEST_CASE("build_rcc examples") {
    Matrix pair(2, 1);
    pair << -1, 1;
    WeightedCoreset one = build_rcc(make_dataset(pair), 1, 3);
    CHECK(one.points(0, 0) == doctest::Approx(0.0));
    CHECK(one.weights(0) == doctest::Approx(2.0));
    CHECK(one.b == 64);

    Dataset ds = random_dataset(12, 2, 44);
    WeightedCoreset full = build_rcc(ds, 12, 5);
    CHECK(full.weights.sum() == doctest::Approx(12.0));
    CHECK(full.weights.minCoeff() == doctest::Approx(1.0));

    Matrix triple(3, 1);
    triple << -1, -1, 1;
    WeightedCoreset two = build_rcc(make_dataset(triple), 2, 7);
    std::vector<std::pair<double, double>> pw;
    for (int i = 0; i < 2; ++i) pw.emplace_back(two.points(i, 0), two.weights(i));
    std::sort(pw.begin(), pw.end());
    CHECK(pw[0].first == doctest::Approx(-1.0));
    CHECK(pw[0].second == doctest::Approx(2.0));
    CHECK(pw[1].first == doctest::Approx(1.0));
    CHECK(pw[1].second == doctest::Approx(1.0));
}

TEST_CASE("apply_quantizer") {
    Dataset ds = random_dataset(20, 3, 8);
    WeightedCoreset cs = build_rcc(ds, 4, 1);

    WeightedCoreset identity = apply_quantizer(cs, 64);
    CHECK((identity.points - cs.points).cwiseAbs().maxCoeff() == 0.0);

    WeightedCoreset coarse = apply_quantizer(cs, 13);
    CHECK(coarse.b == 13);
    CHECK((coarse.weights - cs.weights).cwiseAbs().maxCoeff() == 0.0);
    WeightedCoreset again = apply_quantizer(coarse, 13);
    CHECK((again.points - coarse.points).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(apply_quantizer(cs, 11), ConfigError);
    CHECK_THROWS_AS(apply_quantizer(cs, 65), ConfigError);

    WeightedCoreset single;
    single.points.resize(1, 1);
    single.points << 0.875;
    single.weights = Vector::Ones(1);
    WeightedCoreset q = apply_quantizer(single, 13);  // s = 1
    CHECK(q.points(0, 0) == 1.0);
}

TEST_CASE("bit_size") {
    WeightedCoreset cs;
    cs.points.resize(5, 4);
    cs.points.setZero();
    cs.weights = Vector::Ones(5);
    cs.b = 48;
    CHECK(bit_size(cs) == 960);  // the Iris 2% budget exactly

    cs.points.resize(1, 1);
    cs.weights = Vector::Ones(1);
    cs.b = 12;
    CHECK(bit_size(cs) == 12);

    cs.points.resize(0, 1);
    cs.weights.resize(0);
    CHECK(bit_size(cs) == 0);
}

TEST_CASE("coreset JSON round-trip is exact") {
    Dataset ds = random_dataset(30, 3, 99);
    WeightedCoreset cs = apply_quantizer(build_rcc(ds, 5, 2), 23);
    const std::string path = "coreset_tmp.json";
    save_coreset(cs, path);
    WeightedCoreset back = load_coreset(path);
    std::remove(path.c_str());
    CHECK(back.k() == cs.k());
    CHECK(back.b == cs.b);
    CHECK(back.me == cs.me);
    CHECK(back.source_n == cs.source_n);
    CHECK((back.points - cs.points).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.weights - cs.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coreset error bound, sum and max cost forms") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Dataset ds = random_dataset(60, 3, 700 + seed);
        int k = 3 + static_cast<int>(seed);
        KMeansResult km = kmeans(ds, k, seed);
        double f2 = max_center_distance(ds.points, km);

        int b = 14 + 6 * static_cast<int>(seed);
        Matrix qpts = quantize_points(km.centers, make_quantizer(b, ds.me));
        double delta_emp = (km.centers - qpts).rowwise().norm().maxCoeff();
        double bound = combine_errors(f2, delta_emp);

        Vector unit_w = Vector::Ones(ds.n());
        for (int trial = 0; trial < 200; ++trial) {
            Vector x(3);
            for (int j = 0; j < 3; ++j) x(j) = unif(gen);
            double full_sum = sum_cost(ds.points, unit_w, x);
            double cs_sum = sum_cost(qpts, km.weights, x);
            CHECK(std::abs(cs_sum - full_sum) <= bound * full_sum + 1e-9);

            double full_max = max_cost(ds.points, x);
            double cs_max = max_cost(qpts, x);
            CHECK(std::abs(cs_max - full_max) <= bound * full_max + 1e-9);
        }
    }
}
