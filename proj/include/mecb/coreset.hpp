#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mecb/clustering.hpp"
#include "mecb/dataset.hpp"
#include "mecb/errors.hpp"
#include "mecb/quantizer.hpp"

namespace mecb {

/// k weighted points at b bits per attribute; the transmitted summary.
struct WeightedCoreset {
    Matrix points;   // k x d
    Vector weights;  // positive, sum to source_n for RCC
    int b = 64;      // bits per attribute
    int b0 = 64;     // source precision
    int me = 11;
    long long source_n = 0;

    int k() const { return static_cast<int>(points.rows()); }
    int d() const { return static_cast<int>(points.cols()); }
};

/// RCC: k-means centers weighted by cluster sizes, at full precision.
inline WeightedCoreset build_rcc(const Dataset& ds, int k, std::uint64_t seed) {
    KMeansResult km = kmeans(ds, k, seed);
    WeightedCoreset cs;
    cs.points = std::move(km.centers);
    cs.weights = std::move(km.weights);
    cs.b = ds.b0;
    cs.b0 = ds.b0;
    cs.me = ds.me;
    cs.source_n = ds.n();
    return cs;
}

/// Quantize the coreset points to b bits per attribute; weights unchanged.
inline WeightedCoreset apply_quantizer(const WeightedCoreset& cs, int b) {
    if (b < 1 + cs.me || b > cs.b0) throw ConfigError("apply_quantizer: b out of [1+me, b0]");
    WeightedCoreset out = cs;
    out.points = quantize_points(cs.points, make_quantizer(b, cs.me));
    out.b = b;
    return out;
}

/// Transmitted size per the budget constraint: k * d * b (weights excluded).
inline long long bit_size(const WeightedCoreset& cs) {
    return static_cast<long long>(cs.k()) * cs.d() * cs.b;
}

inline nlohmann::json coreset_to_json(const WeightedCoreset& cs) {
    nlohmann::json pts = nlohmann::json::array();
    for (int i = 0; i < cs.k(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < cs.d(); ++j) row.push_back(cs.points(i, j));
        pts.push_back(std::move(row));
    }
    nlohmann::json w = nlohmann::json::array();
    for (int i = 0; i < cs.k(); ++i) w.push_back(cs.weights(i));
    return nlohmann::json{{"k", cs.k()},         {"d", cs.d()},
                          {"b", cs.b},           {"me", cs.me},
                          {"points", std::move(pts)}, {"weights", std::move(w)},
                          {"source_n", cs.source_n}};
}

inline WeightedCoreset coreset_from_json(const nlohmann::json& j) {
    WeightedCoreset cs;
    const int k = j.at("k").get<int>();
    const int d = j.at("d").get<int>();
    cs.b = j.at("b").get<int>();
    cs.me = j.at("me").get<int>();
    cs.b0 = j.value("b0", 64);
    cs.source_n = j.at("source_n").get<long long>();
    cs.points.resize(k, d);
    cs.weights.resize(k);
    const auto& pts = j.at("points");
    const auto& w = j.at("weights");
    if (static_cast<int>(pts.size()) != k || static_cast<int>(w.size()) != k)
        throw ParseError("coreset json: size mismatch");
    for (int i = 0; i < k; ++i) {
        if (static_cast<int>(pts[i].size()) != d) throw ParseError("coreset json: ragged points");
        for (int jj = 0; jj < d; ++jj) cs.points(i, jj) = pts[i][jj].get<double>();
        cs.weights(i) = w[i].get<double>();
    }
    return cs;
}

inline void save_coreset(const WeightedCoreset& cs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    out << coreset_to_json(cs).dump(2) << '\n';
}

inline WeightedCoreset load_coreset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    nlohmann::json j;
    in >> j;
    return coreset_from_json(j);
}

}  // namespace mecb
