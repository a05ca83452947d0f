// mecb: jointly pick coreset cardinality and quantizer precision under a
// communication budget, then build, evaluate, or distribute the summary.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mecb/mecb.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct BudgetFlags {
    long long budget = 0;
    double frac = 0.0;

    long long resolve(const mecb::Dataset& ds) const {
        if (budget > 0)
            return budget;
        return static_cast<long long>(frac * static_cast<double>(ds.n()) *
                                      static_cast<double>(ds.d()) * ds.b0);
    }
};

void add_budget_flags(CLI::App* cmd, BudgetFlags& bf) {
    auto* abs = cmd->add_option("--budget", bf.budget, "communication budget in bits");
    auto* frac = cmd->add_option("--budget-frac", bf.frac,
                                 "budget as a fraction of n*d*b0")
                     ->check(CLI::Range(0.0, 1.0));
    abs->excludes(frac);
    frac->excludes(abs);
    cmd->callback([abs, frac]() {
        if (abs->count() + frac->count() != 1)
            throw CLI::ValidationError("exactly one of --budget / --budget-frac is required");
    });
}

// Treat the first line as a header when any cell fails to parse as a number.
bool has_header_line(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mecb::ParseError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw mecb::ParseError("empty input: " + path);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            std::stod(cell, &used);
            while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                ++used;
            if (used != cell.size()) return true;
        } catch (const std::exception&) {
            return true;
        }
    }
    return false;
}

mecb::Dataset load_normalized(const std::string& path) {
    return mecb::normalize(mecb::load_csv(path, has_header_line(path)));
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw mecb::ParseError("cannot write file: " + path.string());
    out << text;
}

json config_record(const mecb::Config& cfg, const mecb::Dataset& ds, long long budget,
                   std::uint64_t seed, double elapsed_ms) {
    return json{{"method", mecb::method_name(cfg.method)},
                {"k", cfg.k},
                {"b", cfg.b},
                {"epsilon", cfg.epsilon},
                {"budget", budget},
                {"bits_used", static_cast<long long>(cfg.k) * ds.d() * cfg.b},
                {"elapsed_ms", elapsed_ms},
                {"seed", seed}};
}

std::vector<mecb::TaskSpec> default_tasks(int km_k, int pca_r, std::uint64_t seed) {
    std::vector<mecb::TaskSpec> tasks(3);
    tasks[0].task = mecb::Task::Meb;
    tasks[1].task = mecb::Task::KMeans;
    tasks[1].k = km_k;
    tasks[2].task = mecb::Task::Pca;
    tasks[2].r = pca_r;
    for (auto& t : tasks) t.seed = seed;
    return tasks;
}

mecb::Method parse_method_or_throw(const std::string& s) {
    auto m = mecb::parse_method(s);
    if (!m) throw CLI::ValidationError("unknown method '" + s + "'");
    return *m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint coreset cardinality / quantizer precision selection"};
    app.require_subcommand(1);

    std::string input, method_str = "md", methods_str = "md,evd,em,mp,mc";
    std::string coreset_path, output_dir, format = "json";
    BudgetFlags bf_opt, bf_cor, bf_dist, bf_sweep;
    double rho = 1.0;
    std::uint64_t seed = 1;
    int runs = 40, nodes = 10, km_k = 2, pca_r = 3;

    auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
        if (needs_input)
            cmd->add_option("--input", input, "CSV dataset path")
                ->required()
                ->check(CLI::ExistingFile);
        cmd->add_option("--rho", rho, "Lipschitz constant of the cost family");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--output-dir", output_dir, "directory for result files");
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* opt = app.add_subcommand("optimize", "select (k, b) minimizing the error bound");
    add_common(opt);
    opt->add_option("--method", method_str, "md|evd|em|mp|mc");
    add_budget_flags(opt, bf_opt);

    auto* cor = app.add_subcommand("coreset", "build and quantize a coreset to a file");
    add_common(cor);
    cor->add_option("--method", method_str, "md|evd|em|mp|mc");
    cor->add_option("--output", coreset_path, "coreset JSON output path");
    add_budget_flags(cor, bf_cor);

    auto* ev = app.add_subcommand("evaluate", "evaluate a stored coreset against a dataset");
    add_common(ev);
    ev->add_option("--coreset", coreset_path, "coreset JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    ev->add_option("--kmeans-k", km_k, "k for the k-means task");
    ev->add_option("--pca-r", pca_r, "components for the PCA task");

    auto* dist = app.add_subcommand("distributed", "simulate the budget-allocation protocol");
    add_common(dist);
    dist->add_option("--method", method_str, "md|evd|em");
    dist->add_option("--nodes", nodes, "number of nodes")->check(CLI::PositiveNumber);
    dist->add_option("--kmeans-k", km_k, "k for the k-means task");
    dist->add_option("--pca-r", pca_r, "components for the PCA task");
    add_budget_flags(dist, bf_dist);

    auto* sw = app.add_subcommand("sweep", "Monte Carlo sweep over seeds and methods");
    add_common(sw);
    sw->add_option("--methods", methods_str, "comma-separated method list");
    sw->add_option("--runs", runs, "Monte Carlo run count")->check(CLI::PositiveNumber);
    sw->add_option("--kmeans-k", km_k, "k for the k-means task");
    sw->add_option("--pca-r", pca_r, "components for the PCA task");
    add_budget_flags(sw, bf_sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (opt->parsed()) {
            mecb::Dataset ds = load_normalized(input);
            long long budget = bf_opt.resolve(ds);
            mecb::Method method = parse_method_or_throw(method_str);
            auto t0 = std::chrono::steady_clock::now();
            mecb::Config cfg = mecb::optimize(ds, budget, method, rho, seed);
            double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
            json rec = config_record(cfg, ds, budget, seed, ms);
            std::cout << rec.dump(2) << "\n";
            if (!output_dir.empty())
                write_text(fs::path(output_dir) / "optimize.json", rec.dump(2) + "\n");
        } else if (cor->parsed()) {
            mecb::Dataset ds = load_normalized(input);
            long long budget = bf_cor.resolve(ds);
            mecb::Method method = parse_method_or_throw(method_str);
            mecb::Config cfg = mecb::optimize(ds, budget, method, rho, seed);
            mecb::WeightedCoreset cs =
                mecb::apply_quantizer(mecb::build_rcc(ds, cfg.k, seed), cfg.b);
            fs::path out = coreset_path.empty()
                               ? fs::path(output_dir.empty() ? "." : output_dir) / "coreset.json"
                               : fs::path(coreset_path);
            if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
            mecb::save_coreset(cs, out.string());
            std::cout << json{{"method", mecb::method_name(method)},
                              {"k", cfg.k},
                              {"b", cfg.b},
                              {"epsilon", cfg.epsilon},
                              {"budget", budget},
                              {"bits_used", mecb::bit_size(cs)},
                              {"file", out.string()}}
                             .dump(2)
                      << "\n";
        } else if (ev->parsed()) {
            mecb::Dataset ds = load_normalized(input);
            mecb::WeightedCoreset cs = mecb::load_coreset(coreset_path);
            json reports = json::array();
            std::ostringstream csv;
            csv << "task,cost_on_full,normalized_cost,elapsed_ms\n";
            for (const mecb::TaskSpec& spec : default_tasks(km_k, pca_r, seed)) {
                mecb::EvalReport rep = mecb::eval_task(ds, cs, spec);
                reports.push_back(json{{"task", rep.model},
                                       {"cost_on_full", rep.cost_on_full},
                                       {"normalized_cost", rep.normalized_cost},
                                       {"elapsed_ms", rep.elapsed_ms}});
                csv << rep.model << "," << rep.cost_on_full << "," << rep.normalized_cost
                    << "," << rep.elapsed_ms << "\n";
            }
            std::cout << (format == "csv" ? csv.str() : reports.dump(2) + "\n");
            if (!output_dir.empty())
                write_text(fs::path(output_dir) / ("evaluate." + format),
                           format == "csv" ? csv.str() : reports.dump(2) + "\n");
        } else if (dist->parsed()) {
            mecb::Dataset ds = load_normalized(input);
            long long budget = bf_dist.resolve(ds);
            mecb::Method method = parse_method_or_throw(method_str);
            if (method != mecb::Method::Md && method != mecb::Method::Evd &&
                method != mecb::Method::Em)
                throw mecb::ConfigError("distributed: method must be md, evd or em");

            std::vector<mecb::Dataset> parts = mecb::partition_random(ds, nodes, seed);
            mecb::MecbdResult res = mecb::run_mecbd(parts, budget, method, rho, seed);

            // union coreset, evaluated against the union dataset
            Eigen::Index rows = 0;
            for (const auto& nr : res.nodes) rows += nr.coreset.k();
            mecb::Matrix pts(rows, ds.d());
            mecb::Vector w(rows);
            Eigen::Index at = 0;
            long long total_bits = 0;
            for (const auto& nr : res.nodes) {
                pts.middleRows(at, nr.coreset.k()) = nr.coreset.points;
                w.segment(at, nr.coreset.k()) = nr.coreset.weights;
                at += nr.coreset.k();
                total_bits += mecb::bit_size(nr.coreset);
            }

            json report = mecb::allocation_to_json(res.allocation, &res.nodes);
            report["method"] = mecb::method_name(method);
            report["nodes"] = nodes;
            report["seed"] = seed;
            report["total_bits"] = total_bits;

            json evals = json::array();
            for (const mecb::TaskSpec& spec : default_tasks(km_k, pca_r, seed)) {
                mecb::EvalReport rep = mecb::eval_task(ds, pts, w, spec);
                evals.push_back(json{{"task", rep.model},
                                     {"normalized_cost", rep.normalized_cost},
                                     {"cost_on_full", rep.cost_on_full}});
            }
            report["evaluation"] = evals;
            std::cout << report.dump(2) << "\n";

            if (!output_dir.empty()) {
                write_text(fs::path(output_dir) / "allocation.json", report.dump(2) + "\n");
                std::ostringstream trace;
                for (const json& rec : res.trace) trace << rec.dump() << "\n";
                write_text(fs::path(output_dir) / "trace.jsonl", trace.str());
            }
        } else if (sw->parsed()) {
            mecb::Dataset ds = load_normalized(input);
            long long budget = bf_sweep.resolve(ds);

            std::vector<mecb::Method> methods;
            std::stringstream ms(methods_str);
            std::string tok;
            while (std::getline(ms, tok, ','))
                if (!tok.empty()) methods.push_back(parse_method_or_throw(tok));
            if (methods.empty()) throw CLI::ValidationError("--methods is empty");

            // one reference model per task, shared across every run
            std::vector<mecb::TaskSpec> tasks = default_tasks(km_k, pca_r, 1);
            std::vector<double> ref_cost;
            for (const auto& spec : tasks) {
                mecb::TaskModel star =
                    mecb::fit_model(ds.points, mecb::Vector::Ones(ds.n()), spec,
                                    mecb::reference_restarts(spec.task));
                ref_cost.push_back(mecb::model_cost(ds, star));
            }

            // per-row wall clock is deliberately omitted so identical configs
            // give byte-identical CSV; timing lives in the per-method summary
            std::ostringstream csv;
            csv << "method,task,seed,budget,k,b,normalized_cost,status\n";
            std::ostringstream timing;
            timing << "method,mean_optimize_ms\n";
            for (mecb::Method method : methods) {
                double total_ms = 0.0;
                int timed = 0;
                for (int run = 1; run <= runs; ++run) {
                    std::uint64_t s = seed + static_cast<std::uint64_t>(run - 1);
                    try {
                        auto t0 = std::chrono::steady_clock::now();
                        mecb::Config cfg = mecb::optimize(ds, budget, method, rho, s);
                        double opt_ms = std::chrono::duration<double, std::milli>(
                                            std::chrono::steady_clock::now() - t0)
                                            .count();
                        total_ms += opt_ms;
                        ++timed;
                        mecb::WeightedCoreset cs =
                            mecb::apply_quantizer(mecb::build_rcc(ds, cfg.k, s), cfg.b);
                        for (std::size_t t = 0; t < tasks.size(); ++t) {
                            mecb::TaskSpec spec = tasks[t];
                            spec.seed = s;
                            mecb::TaskModel m = mecb::fit_model(cs.points, cs.weights, spec);
                            double norm = mecb::model_cost(ds, m) / ref_cost[t];
                            csv << mecb::method_name(method) << ","
                                << mecb::task_name(spec.task) << "," << s << "," << budget
                                << "," << cfg.k << "," << cfg.b << "," << norm << ",ok\n";
                        }
                    } catch (const std::exception& e) {
                        std::string msg = e.what();
                        for (char& c : msg)
                            if (c == ',' || c == '\n') c = ';';
                        csv << mecb::method_name(method) << ",-," << s << "," << budget
                            << ",-,-,-,failed: " << msg << "\n";
                    }
                }
                timing << mecb::method_name(method) << ","
                       << (timed ? total_ms / timed : 0.0) << "\n";
            }
            std::cout << csv.str();
            std::cerr << timing.str();
            if (!output_dir.empty()) {
                write_text(fs::path(output_dir) / "sweep.csv", csv.str());
                write_text(fs::path(output_dir) / "timing.csv", timing.str());
            }
        }
    } catch (const mecb::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mecb::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mecb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
