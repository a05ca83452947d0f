#pragma once

#include <Eigen/Dense>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mecb/errors.hpp"

namespace mecb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A normalized dataset: every attribute in [-1, 1], zero column means.
/// Rows of `points` are data points.
struct Dataset {
    Matrix points;
    double max_norm = 0.0;  // max_i ||y_i||, Euclidean
    int b0 = 64;            // bits per stored attribute
    int me = 11;            // exponent bits

    Eigen::Index n() const { return points.rows(); }
    Eigen::Index d() const { return points.cols(); }
};

inline double max_row_norm(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    return m.rowwise().norm().maxCoeff();
}

/// Parse a CSV file of finite reals into a row-per-line matrix.
inline Matrix load_csv(const std::string& path, bool has_header = false) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && has_header) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;

        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const char* b = cell.data();
            const char* e = b + cell.size();
            while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
            while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
            double v;
            auto res = std::from_chars(b, e, v);
            if (res.ec != std::errc{} || res.ptr != e || !std::isfinite(v))
                throw ParseError("non-numeric cell '" + cell + "' at line " +
                                 std::to_string(lineno) + " in " + path);
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged row at line " + std::to_string(lineno) + " in " + path +
                             ": expected " + std::to_string(rows.front().size()) +
                             " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty input: " + path);

    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

/// Center each column, then scale it by its max absolute value so every
/// attribute lands in [-1, 1] with zero mean. Constant columns become zero.
inline Dataset normalize(const Matrix& raw, int b0 = 64, int me = 11) {
    if (raw.rows() < 1 || raw.cols() < 1) throw ConfigError("normalize: empty matrix");
    if (!raw.allFinite()) throw NumericError("normalize: non-finite entries");

    Dataset ds;
    ds.b0 = b0;
    ds.me = me;
    ds.points = raw.rowwise() - raw.colwise().mean();
    for (Eigen::Index j = 0; j < ds.points.cols(); ++j) {
        double scale = ds.points.col(j).cwiseAbs().maxCoeff();
        if (scale > 0.0) ds.points.col(j) /= scale;
    }
    ds.max_norm = max_row_norm(ds.points);
    return ds;
}

/// Wrap an already-normalized point block (distributed partitions, tests).
inline Dataset make_dataset(Matrix pts, int b0 = 64, int me = 11) {
    Dataset ds;
    ds.points = std::move(pts);
    ds.b0 = b0;
    ds.me = me;
    ds.max_norm = max_row_norm(ds.points);
    return ds;
}

inline void write_csv(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

}  // namespace mecb
