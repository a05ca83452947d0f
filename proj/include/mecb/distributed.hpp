#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mecb/coreset.hpp"
#include "mecb/dataset.hpp"
#include "mecb/errors.hpp"
#include "mecb/optimizer.hpp"

namespace mecb {

/// One step of a node's error/budget staircase.
struct Breakpoint {
    long long bits;
    double eps;
};

/// Strictly increasing budgets with strictly decreasing error values;
/// what each node reports to the server.
struct Envelope {
    int node_id = 0;
    std::vector<Breakpoint> points;

    /// Smallest budget achieving error <= eps; infeasible when none does.
    static constexpr long long kInfeasible = std::numeric_limits<long long>::max();
    long long budget_for(double eps) const {
        for (const Breakpoint& bp : points)
            if (bp.eps <= eps) return bp.bits;
        return kInfeasible;
    }

    /// Envelope value at a budget: error of the last breakpoint with bits <= budget.
    double eps_at(long long budget) const {
        double eps = std::numeric_limits<double>::infinity();
        for (const Breakpoint& bp : points) {
            if (bp.bits > budget) break;
            eps = bp.eps;
        }
        return eps;
    }
};

struct NodeAllocation {
    int node = 0;
    long long bits = 0;
    double eps = 0.0;
};

struct Allocation {
    double epsilon = 0.0;  // max over nodes of the envelope value at its budget
    long long budget = 0;  // global budget B
    std::vector<NodeAllocation> nodes;

    long long total_bits() const {
        long long t = 0;
        for (const auto& na : nodes) t += na.bits;
        return t;
    }
};

/// Evaluate a node's error/budget staircase. With stride == 0 the candidate
/// budgets are the exact breakpoints {k*d*b}; with stride >= 1 the budget
/// axis is scanned in fixed steps (Algorithm-conformance mode).
inline Envelope compute_envelope(const Dataset& ds, Method method, double rho,
                                 long long budget_cap, long long stride = 0,
                                 int node_id = 0, std::uint64_t seed = 1) {
    if (method != Method::Md && method != Method::Evd && method != Method::Em)
        throw ConfigError("compute_envelope: method must be md, evd or em");
    const long long b0_budget = static_cast<long long>(1 + ds.me) * ds.d();
    if (budget_cap < b0_budget) throw BudgetError("envelope cap below (1+me)*d");

    BoundEvaluator eval(ds, method, rho, budget_cap, seed);

    std::vector<long long> candidates;
    if (stride > 0) {
        for (long long B = b0_budget; B <= budget_cap; B += stride) candidates.push_back(B);
    } else {
        std::set<long long> uniq;
        for (int b = 1 + ds.me; b <= ds.b0; ++b)
            for (long long k = 1; k <= ds.n(); ++k) {
                long long bits = k * ds.d() * b;
                if (bits > budget_cap) break;
                uniq.insert(bits);
            }
        candidates.assign(uniq.begin(), uniq.end());
    }

    Envelope env;
    env.node_id = node_id;
    double best = std::numeric_limits<double>::infinity();
    for (long long B : candidates) {
        double eps = eval.best_config(B).epsilon;
        if (eps < best) {
            best = eps;
            env.points.push_back(Breakpoint{B, eps});
        }
    }
    return env;
}

/// Server-side minimax budget split: the smallest achievable error value
/// among all envelope breakpoints whose per-node budgets fit in B.
inline Allocation allocate(const std::vector<Envelope>& envelopes, long long budget) {
    if (envelopes.empty()) throw ConfigError("allocate: no envelopes");

    long long min_feasible = 0;
    for (const Envelope& env : envelopes) {
        if (env.points.empty()) throw ConfigError("allocate: empty envelope");
        min_feasible += env.points.front().bits;
    }
    if (min_feasible > budget)
        throw BudgetError("infeasible budget " + std::to_string(budget) +
                          "; minimum feasible is " + std::to_string(min_feasible));

    // candidate error values, descending, deduplicated
    std::vector<double> errs;
    for (const Envelope& env : envelopes)
        for (const Breakpoint& bp : env.points) errs.push_back(bp.eps);
    std::sort(errs.begin(), errs.end(), std::greater<>());
    errs.erase(std::unique(errs.begin(), errs.end()), errs.end());

    auto feasible = [&](double eps) {
        long long total = 0;
        for (const Envelope& env : envelopes) {
            long long bi = env.budget_for(eps);
            if (bi == Envelope::kInfeasible) return false;
            total += bi;
            if (total > budget) return false;
        }
        return true;
    };

    // binary search the last feasible index in the descending list
    std::size_t lo = 0, hi = errs.size() - 1;  // errs[0] is feasible
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (feasible(errs[mid]))
            lo = mid;
        else
            hi = mid - 1;
    }
    double target = errs[lo];

    Allocation alloc;
    alloc.budget = budget;
    for (const Envelope& env : envelopes) {
        long long bi = env.budget_for(target);
        double eps_i = env.eps_at(bi);
        alloc.nodes.push_back(NodeAllocation{env.node_id, bi, eps_i});
        alloc.epsilon = std::max(alloc.epsilon, eps_i);
    }
    return alloc;
}

/// Uniform random disjoint partition into N near-equal parts.
inline std::vector<Dataset> partition_random(const Dataset& ds, int N, std::uint64_t seed) {
    if (N < 1 || N > ds.n()) throw ConfigError("partition_random: N out of [1, n]");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(ds.n()));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 gen(seed);
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[gen() % i]);

    std::vector<Dataset> parts;
    parts.reserve(static_cast<std::size_t>(N));
    Eigen::Index base = ds.n() / N, extra = ds.n() % N, pos = 0;
    for (int p = 0; p < N; ++p) {
        Eigen::Index sz = base + (p < extra ? 1 : 0);
        Matrix block(sz, ds.d());
        for (Eigen::Index r = 0; r < sz; ++r) block.row(r) = ds.points.row(idx[static_cast<std::size_t>(pos + r)]);
        pos += sz;
        parts.push_back(make_dataset(std::move(block), ds.b0, ds.me));
    }
    return parts;
}

struct NodeResult {
    Config config;
    WeightedCoreset coreset;
};

struct MecbdResult {
    Allocation allocation;
    std::vector<NodeResult> nodes;
    std::vector<nlohmann::json> trace;  // one record per simulated message
};

/// Full simulated protocol: envelopes up, budgets down, local build + quantize.
inline MecbdResult run_mecbd(const std::vector<Dataset>& partitions, long long budget,
                             Method method, double rho = 1.0, std::uint64_t seed = 1) {
    if (partitions.empty()) throw ConfigError("run_mecbd: no partitions");

    MecbdResult out;
    std::vector<Envelope> envelopes;
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        const Dataset& part = partitions[i];
        long long cap = std::min<long long>(
            static_cast<long long>(part.n()) * part.b0 * part.d(), budget);
        Envelope env = compute_envelope(part, method, rho, cap, 0, static_cast<int>(i),
                                        seed + i);
        out.trace.push_back(nlohmann::json{{"node", i},
                                           {"direction", "to_server"},
                                           {"payload", "envelope"},
                                           {"breakpoints", env.points.size()},
                                           {"bits", env.points.empty() ? 0LL : env.points.back().bits}});
        envelopes.push_back(std::move(env));
    }

    out.allocation = allocate(envelopes, budget);
    for (const NodeAllocation& na : out.allocation.nodes)
        out.trace.push_back(nlohmann::json{{"node", na.node},
                                           {"direction", "to_node"},
                                           {"payload", "budget"},
                                           {"bits", na.bits}});

    for (std::size_t i = 0; i < partitions.size(); ++i) {
        const Dataset& part = partitions[i];
        Config cfg = optimize(part, out.allocation.nodes[i].bits, method, rho, seed + i);
        WeightedCoreset cs = apply_quantizer(build_rcc(part, cfg.k, seed + i), cfg.b);
        out.trace.push_back(nlohmann::json{{"node", i},
                                           {"direction", "to_server"},
                                           {"payload", "coreset"},
                                           {"bits", bit_size(cs)}});
        out.nodes.push_back(NodeResult{cfg, std::move(cs)});
    }
    return out;
}

inline nlohmann::json allocation_to_json(const Allocation& alloc,
                                         const std::vector<NodeResult>* nodes = nullptr) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < alloc.nodes.size(); ++i) {
        const NodeAllocation& na = alloc.nodes[i];
        nlohmann::json rec{{"node", na.node}, {"B_i", na.bits}, {"epsilon_i", na.eps}};
        if (nodes && i < nodes->size()) {
            rec["k"] = (*nodes)[i].config.k;
            rec["b"] = (*nodes)[i].config.b;
        }
        arr.push_back(std::move(rec));
    }
    return nlohmann::json{{"epsilon", alloc.epsilon},
                          {"budget", alloc.budget},
                          {"allocations", std::move(arr)}};
}

}  // namespace mecb
