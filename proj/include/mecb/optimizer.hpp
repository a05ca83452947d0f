#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "mecb/clustering.hpp"
#include "mecb/dataset.hpp"
#include "mecb/errors.hpp"
#include "mecb/quantizer.hpp"
#include "mecb/spectral.hpp"

namespace mecb {

enum class Method { Em, Evd, Md, Mp, Mc };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::Em: return "em";
        case Method::Evd: return "evd";
        case Method::Md: return "md";
        case Method::Mp: return "mp";
        case Method::Mc: return "mc";
    }
    return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
    if (s == "em") return Method::Em;
    if (s == "evd") return Method::Evd;
    if (s == "md") return Method::Md;
    if (s == "mp") return Method::Mp;
    if (s == "mc") return Method::Mc;
    return std::nullopt;
}

/// A chosen (k, b) pair and its error-bound value under some budget.
struct Config {
    int k = 0;
    int b = 0;
    double epsilon = 0.0;
    Method method = Method::Md;
};

/// Error composition after quantizing an eps_cs-coreset:
/// eps_cs + rho*Delta + eps_cs * rho*Delta.
inline double combine_errors(double eps_cs, double rho_delta) {
    return eps_cs + rho_delta + eps_cs * rho_delta;
}

inline double objective_evd(int k, int b, const EigenSpectrum& spec, const Dataset& ds, double rho) {
    double root_f = std::sqrt(f_evd(spec, k));
    double delta = delta_bound(b, ds);
    return combine_errors(rho * root_f, rho * delta);
}

inline double objective_md(int k, int b, const KCenterSweep& sweep, const Dataset& ds, double rho) {
    if (k < 1 || k > static_cast<int>(sweep.g.size()))
        throw ConfigError("objective_md: k beyond sweep");
    double gk = sweep.g[static_cast<std::size_t>(k) - 1];
    double delta = delta_bound(b, ds);
    return combine_errors(rho * gk, rho * delta);
}

inline double objective_em(int k, int b, const Dataset& ds, double rho, std::uint64_t seed) {
    double root_f = std::sqrt(f_gap(ds, k, seed));
    double delta = delta_bound(b, ds);
    return combine_errors(rho * root_f, rho * delta);
}

/// Cached evaluator of the proxy objectives over budgets up to max_budget.
/// The proxy (k-center sweep or spectrum) is computed once; each budget
/// evaluation is then a scan over b in [1+me, b0].
class BoundEvaluator {
  public:
    BoundEvaluator(const Dataset& ds, Method method, double rho, long long max_budget,
                   std::uint64_t seed = 1)
        : ds_(ds), method_(method), rho_(rho), seed_(seed) {
        const long long bmin = 1 + ds.me;
        if (max_budget < bmin * ds.d()) throw BudgetError("budget below (1+me)*d");
        switch (method) {
            case Method::Evd:
                spectrum_ = covariance_spectrum(ds);
                break;
            case Method::Md:
            case Method::Mp:  // mp/mc report the md-style bound
            case Method::Mc: {
                int cap = static_cast<int>(
                    std::min<long long>(max_budget / (ds.d() * bmin), ds.n()));
                sweep_ = kcenter_sweep(ds, std::max(cap, 1));
                break;
            }
            case Method::Em:
                break;
        }
    }

    double objective(int k, int b) const {
        switch (method_) {
            case Method::Evd:
                return objective_evd(k, b, spectrum_, ds_, rho_);
            case Method::Em: {
                auto it = em_cost_.find(k);
                double root_f;
                if (it != em_cost_.end()) {
                    root_f = it->second;
                } else {
                    root_f = std::sqrt(f_gap(ds_, k, seed_));
                    em_cost_[k] = root_f;
                }
                return combine_errors(rho_ * root_f, rho_ * delta_bound(b, ds_));
            }
            default:
                return objective_md(k, b, sweep_, ds_, rho_);
        }
    }

    /// Scan b over [1+me, b0] with k = min(n, floor(B / (d b))); argmin with
    /// ties toward smaller b.
    Config best_config(long long budget) const {
        const int bmin = 1 + ds_.me;
        if (budget < static_cast<long long>(bmin) * ds_.d())
            throw BudgetError("budget below (1+me)*d = " + std::to_string(bmin * ds_.d()));
        Config best;
        bool found = false;
        for (int b = bmin; b <= ds_.b0; ++b) {
            long long k_ll = budget / (static_cast<long long>(ds_.d()) * b);
            int k = static_cast<int>(std::min<long long>(k_ll, ds_.n()));
            if (k < 1) continue;
            double eps = objective(k, b);
            if (!found || eps < best.epsilon) {
                best = Config{k, b, eps, method_};
                found = true;
            }
        }
        if (!found) throw BudgetError("no feasible (k, b) under budget " + std::to_string(budget));
        return best;
    }

    const Dataset& dataset() const { return ds_; }

  private:
    const Dataset& ds_;
    Method method_;
    double rho_;
    std::uint64_t seed_;
    EigenSpectrum spectrum_;
    KCenterSweep sweep_;
    mutable std::map<int, double> em_cost_;  // k -> sqrt(f_gap(k))
};

/// Solve MECB under budget B with the requested strategy.
inline Config optimize(const Dataset& ds, long long budget, Method method, double rho = 1.0,
                       std::uint64_t seed = 1) {
    const int bmin = 1 + ds.me;
    const long long dd = ds.d();
    if (budget < static_cast<long long>(bmin) * dd)
        throw BudgetError("budget " + std::to_string(budget) + " below minimum " +
                          std::to_string(bmin * dd));

    if (method == Method::Mp) {
        int k = static_cast<int>(std::min<long long>(budget / (dd * ds.b0), ds.n()));
        if (k < 1) throw BudgetError("mp: budget below d*b0 = " + std::to_string(dd * ds.b0));
        BoundEvaluator eval(ds, Method::Md, rho, budget, seed);
        return Config{k, ds.b0, eval.objective(k, ds.b0), Method::Mp};
    }
    if (method == Method::Mc) {
        int k = static_cast<int>(std::min<long long>(budget / (dd * bmin), ds.n()));
        int b = static_cast<int>(std::clamp<long long>(budget / (dd * ds.n()),
                                                       bmin, ds.b0));
        BoundEvaluator eval(ds, Method::Md, rho, budget, seed);
        return Config{k, b, eval.objective(k, b), Method::Mc};
    }

    BoundEvaluator eval(ds, method, rho, budget, seed);
    return eval.best_config(budget);
}

}  // namespace mecb
