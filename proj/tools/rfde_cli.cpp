// Command-line front end: simulate cadlag drivers, build delayed lifts,
// solve rough functional differential equations, compare against the
// left-point stochastic scheme, and run solution-map stability sweeps.
//
// Exit codes: 0 ok, 2 I/O or parse failure, 3 invalid configuration,
// 4 solver non-contraction, 5 internal invariant violation.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rfde/config.hpp"
#include "rfde/parallel.hpp"
#include "rfde/rng.hpp"
#include "rfde/serialize.hpp"
#include "rfde/variation.hpp"

namespace {

using namespace rfde;

struct GlobalOptions {
    std::string out_dir = ".";
    int threads = 1;
    double p = 0.0;           // 0: keep config value
    std::uint64_t seed = 0;   // used when seed_set
    bool seed_set = false;
    bool validate_only = false;
};

std::string out_path(const GlobalOptions& g, const std::string& name) {
    std::filesystem::create_directories(g.out_dir);
    return (std::filesystem::path(g.out_dir) / name).string();
}

ExperimentConfig load_config(const std::string& file, const GlobalOptions& g) {
    ExperimentConfig cfg = read_config(file);
    if (g.seed_set) cfg.driver.spec.seed = g.seed;
    if (g.p > 0.0) {
        if (!(g.p > 2.0 && g.p < 3.0)) throw std::invalid_argument("--p must lie in (2, 3)");
        cfg.solver.p = g.p;
    }
    return cfg;
}

void write_text(const std::string& file, const std::string& text) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    out << text;
}

int cmd_pvar(const std::string& file, double p, long from, long to, const GlobalOptions& g) {
    const SampledPath path = read_path_csv(file);
    if (!(p >= 1.0)) throw std::invalid_argument("pvar: p must be >= 1");
    if (g.validate_only) return 0;
    const std::size_t s = from < 0 ? 0 : static_cast<std::size_t>(from);
    const std::size_t t = to < 0 ? path.size() - 1 : static_cast<std::size_t>(to);
    const auto t0 = std::chrono::steady_clock::now();
    const double value = pvar(path, p, s, t);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "p=" << p << "  pvar=" << format_double(value) << "  elapsed=" << elapsed << "s\n";
    write_text(out_path(g, "pvar.csv"), "p,value\n" + format_double(p) + "," + format_double(value) + "\n");
    Json meta;
    meta["elapsed_seconds"] = elapsed;
    write_json(meta, out_path(g, "pvar_meta.json"));
    return 0;
}

int cmd_lift(const std::string& file, const GlobalOptions& g) {
    const ExperimentConfig cfg = load_config(file, g);
    if (g.validate_only) return 0;
    const SampledPath z = cfg.driver.kind == "smooth_linear"
                              ? sample_smooth_driver(cfg.driver.spec, cfg.driver.slope)
                              : simulate_driver(cfg.driver.spec);
    const StackedDriver stacked = delayed_lift(z, cfg.driver.spec.delays);
    const RoughPath& rp = stacked.rough_path();
    const std::size_t last = rp.path().size() - 1;
    const int d = rp.dim();

    // quadratic-covariation prefix for the antisymmetry check
    std::vector<Mat> qv(rp.path().size(), Mat::Zero(d, d));
    for (std::size_t k = 1; k <= last; ++k) {
        const Vec dz = rp.path().increment(k - 1, k);
        qv[k] = qv[k - 1] + dz * dz.transpose();
    }

    std::mt19937_64 rng = seeded_engine(cfg.driver.spec.seed, 1);
    std::uniform_int_distribution<std::size_t> pick(0, last);
    double chen_resid = 0.0, anti_resid = 0.0, scale = 0.0;
    for (int n = 0; n < 500; ++n) {
        std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        if (i > j) std::swap(i, j);
        if (j > k) std::swap(j, k);
        if (i > j) std::swap(i, j);
        const Mat whole = rp.chen(i, k);
        const Mat glued = rp.chen(i, j) + rp.chen(j, k) +
                          rp.path().increment(i, j) * rp.path().increment(j, k).transpose();
        chen_resid = std::max(chen_resid, (whole - glued).norm());
        const Mat sym = rp.chen(i, k) + rp.chen(i, k).transpose();
        const Vec incr = rp.path().increment(i, k);
        anti_resid = std::max(anti_resid, (sym - incr * incr.transpose() + (qv[k] - qv[i])).norm());
        scale = std::max(scale, whole.norm());
    }

    write_rough_path(rp, out_path(g, "rough_path.json"));
    Json diag;
    diag["chen_residual_max"] = chen_resid;
    diag["antisymmetry_residual_max"] = anti_resid;
    diag["level2_scale"] = scale;
    Json brackets = Json::array();
    for (int i = 0; i < d; ++i) {
        Json row = Json::array();
        for (int j = 0; j < d; ++j) row.push_back(qv[last](i, j));
        brackets.push_back(std::move(row));
    }
    diag["bracket_at_horizon"] = std::move(brackets);
    write_json(diag, out_path(g, "lift_diagnostics.json"));
    std::cout << "lift: d=" << d << " points=" << rp.path().size() << "  chen residual " << chen_resid
              << "  antisymmetry residual " << anti_resid << "\n";
    return 0;
}

int cmd_solve(const std::string& file, const GlobalOptions& g) {
    const ExperimentConfig cfg = load_config(file, g);
    if (g.validate_only) return 0;
    const Problem prob = build_problem(cfg);
    const SolutionReport report = solve_rfde(*prob.rp, *prob.y, *prob.cf, cfg.solver);

    std::vector<Vec> values(report.solution.values().begin(), report.solution.values().end());
    const SampledPath solution_path(prob.rp->grid(), std::move(values));
    write_path_csv(solution_path, out_path(g, "solution.csv"));
    write_json(solution_report_to_json(report, "solution.csv"), out_path(g, "solution_report.json"));

    std::cout << "solve: points=" << solution_path.size() << " pieces=" << report.pieces.size()
              << " gamma=" << report.gamma << " residual=" << report.residual
              << " norm=" << report.apriori_norm << "\n";
    return 0;
}

int cmd_compare(const std::string& file, const GlobalOptions& g) {
    const ExperimentConfig cfg = load_config(file, g);
    if (cfg.driver.spec.delays.empty())
        throw std::invalid_argument("compare: the driver needs at least one delay");
    if (g.validate_only) return 0;
    const int k = static_cast<int>(cfg.y0.size());
    const int blocks = static_cast<int>(cfg.driver.spec.delays.size()) + 1;
    const VectorField base = make_field(cfg.coefficient.field.name, k * blocks, k,
                                        cfg.driver.spec.dimension, cfg.coefficient.field.amp,
                                        cfg.coefficient.field.scale);
    const Vec history = cfg.coefficient.history.size() > 0 ? cfg.coefficient.history : cfg.y0;
    const CompareResult result = rde_vs_sde_compare(
        cfg.driver.spec, base, cfg.y0, [&](double) { return history; }, cfg.solver.p, cfg.refinements,
        cfg.solver);

    std::string csv = "step,sup_gap,scale\n";
    std::cout << "compare: step  sup_gap  (scale)\n";
    for (const auto& lvl : result.levels) {
        csv += format_double(lvl.step) + "," + format_double(lvl.sup_gap) + "," + format_double(lvl.scale) + "\n";
        std::cout << "  " << lvl.step << "  " << lvl.sup_gap << "  (" << lvl.scale << ")\n";
    }
    write_text(out_path(g, "compare.csv"), csv);
    return 0;
}

int cmd_stability(const std::string& file, const GlobalOptions& g) {
    const ExperimentConfig cfg = load_config(file, g);
    if (g.validate_only) return 0;
    const auto& sweep = cfg.stability;
    std::vector<std::pair<double, std::uint64_t>> cases;
    for (std::uint64_t seed : sweep.seeds)
        for (double scale : sweep.scales) cases.emplace_back(scale, seed);

    std::vector<StabilityRow> rows(cases.size());
    parallel_for(cases.size(), g.threads, [&](std::size_t i) {
        rows[i] = run_stability_case(cfg, sweep.target, cases[i].first, cases[i].second);
    });

    std::string csv = "target,scale,seed,input_distance,output_distance,ratio,norm_a,norm_b,bound_exceeded\n";
    std::cout << "stability target=" << sweep.target << "\n  scale  seed  ratio  (in, out)\n";
    for (const auto& row : rows) {
        csv += row.target + "," + format_double(row.scale) + "," + std::to_string(row.seed) + "," +
               format_double(row.result.input_distance) + "," + format_double(row.result.output_distance) +
               "," + format_double(row.result.ratio) + "," + format_double(row.result.norm_a) + "," +
               format_double(row.result.norm_b) + "," + (row.result.norm_bound_exceeded ? "1" : "0") + "\n";
        std::cout << "  " << row.scale << "  " << row.seed << "  " << row.result.ratio << "  ("
                  << row.result.input_distance << ", " << row.result.output_distance << ")\n";
    }
    write_text(out_path(g, "stability.csv"), csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cadlag rough-path calculus: lifts, solvers and experiments"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--threads", g.threads, "worker threads for sweeps");
    app.add_option("--p", g.p, "variation exponent in (2, 3)");
    auto* seed_opt = app.add_option("--seed", g.seed, "override the driver seed");
    app.add_flag("--validate-only", g.validate_only, "check inputs and exit");

    std::string path_file, config_file;
    double pvar_p = 2.0;
    long from = -1, to = -1;

    auto* pvar_cmd = app.add_subcommand("pvar", "p-variation of a path file");
    pvar_cmd->add_option("path", path_file, "path CSV")->required();
    pvar_cmd->add_option("--p", pvar_p, "exponent (>= 1)");
    pvar_cmd->add_option("--from", from, "start index");
    pvar_cmd->add_option("--to", to, "end index");

    auto* lift_cmd = app.add_subcommand("lift", "simulate a driver and build its delayed lift");
    lift_cmd->add_option("config", config_file, "config JSON")->required();
    auto* solve_cmd = app.add_subcommand("solve", "solve the configured equation");
    solve_cmd->add_option("config", config_file, "config JSON")->required();
    auto* compare_cmd = app.add_subcommand("compare", "rough solve vs left-point scheme across meshes");
    compare_cmd->add_option("config", config_file, "config JSON")->required();
    auto* stability_cmd = app.add_subcommand("stability", "solution-map perturbation sweep");
    stability_cmd->add_option("config", config_file, "config JSON")->required();

    CLI11_PARSE(app, argc, argv);
    g.seed_set = seed_opt->count() > 0;

    try {
        if (pvar_cmd->parsed()) return cmd_pvar(path_file, pvar_p, from, to, g);
        if (lift_cmd->parsed()) return cmd_lift(config_file, g);
        if (solve_cmd->parsed()) return cmd_solve(config_file, g);
        if (compare_cmd->parsed()) return cmd_compare(config_file, g);
        if (stability_cmd->parsed()) return cmd_stability(config_file, g);
    } catch (const SolverNonContraction& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& piece : e.diagnostics)
            std::cerr << "  piece [" << piece.begin << ", " << piece.end << "] iterations "
                      << piece.iterations << "\n";
        return 4;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
