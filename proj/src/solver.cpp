#include "rfde/solver.hpp"

#include <cmath>

#include "rfde/detail/partition_dp.hpp"

namespace rfde {

namespace {

constexpr double kDeltaCap = 1e6;

void require_problem(const RoughPath& rp, const ControlledPath& y) {
    if (!y.grid().same(rp.grid())) throw std::invalid_argument("solver: initial condition must live on the driver grid");
    if (y.cols() != 1) throw std::invalid_argument("solver: initial condition must be vector-valued");
    if (y.driver_dim() != rp.dim()) throw std::invalid_argument("solver: driver dimension mismatch");
}

struct Workspace {
    std::vector<Vec> values;
    std::vector<Mat> gubs;
    std::shared_ptr<const SampledPath> driver;
    int k = 0, d = 0;

    ControlledPath freeze(std::size_t upto) const {
        std::vector<Vec> v = values;
        std::vector<Mat> g = gubs;
        for (std::size_t i = upto + 1; i < v.size(); ++i) {
            v[i] = values[upto];
            g[i] = gubs[upto];
        }
        return ControlledPath(driver, k, 1, std::move(v), std::move(g));
    }

    ControlledPath snapshot() const { return ControlledPath(driver, k, 1, values, gubs); }
};

Vec recursion_step(const ControlledPath& f, const RoughPath& rp, std::size_t m) {
    Vec step = apply_operator(f.value(m), f.rows(), f.cols(), rp.path().increment(m, m + 1));
    step += apply_second_order(f.gubinelli(m), f.rows(), f.cols(), rp.cell(m));
    return step;
}

/// delta-weighted distance between two candidate blocks over [a, e]:
/// |dY'_a| + ||dY'||_p + delta ||dR||_{p/2} with dR the remainder of the
/// difference against the shared driver.
double block_distance(const std::vector<Vec>& va, const std::vector<Mat>& ga,
                      const std::vector<Vec>& vb, const std::vector<Mat>& gb,
                      const SampledPath& x, double p, double delta, std::size_t a, std::size_t e) {
    const std::size_t n = e - a + 1;
    const double g0 = (ga[a] - gb[a]).norm();
    const double gub_sum = detail::max_partition_sum(n, [&](std::size_t i, std::size_t j) {
        return std::pow(((ga[a + j] - gb[a + j]) - (ga[a + i] - gb[a + i])).norm(), p);
    });
    const double half = p / 2.0;
    const double rem_sum = detail::max_partition_sum(n, [&](std::size_t i, std::size_t j) {
        const Vec dval = (va[a + j] - vb[a + j]) - (va[a + i] - vb[a + i]);
        const Vec dr = dval - (ga[a + i] - gb[a + i]) * x.increment(a + i, a + j);
        return std::pow(dr.norm(), half);
    });
    const double gv = gub_sum == 0.0 ? 0.0 : std::pow(gub_sum, 1.0 / p);
    const double rv = rem_sum == 0.0 ? 0.0 : std::pow(rem_sum, 2.0 / p);
    return g0 + gv + delta * rv;
}

struct PieceOutcome {
    bool converged = false;
    PieceDiagnostics diagnostics;
};

/// Picard iteration on the piece [a, e]; on success the workspace holds the
/// fixed point on [a, e] and f_latest the coefficient path of the last
/// iterate (valid through index e for the boundary step).
PieceOutcome solve_piece(Workspace& ws, const RoughPath& rp, const ControlledPath& y,
                         const CoefficientFunctional& cf, const SolverConfig& cfg, double delta,
                         std::size_t a, std::size_t e, ControlledPath& f_latest) {
    PieceOutcome out;
    out.diagnostics.begin = a;
    out.diagnostics.end = e;
    out.diagnostics.delta = delta;

    // initial guess: the initial condition shifted to match the incoming value
    for (std::size_t j = a + 1; j <= e; ++j) {
        ws.values[j] = ws.values[a] + (y.value(j) - y.value(a));
        ws.gubs[j] = y.gubinelli(j);
    }

    const double scale = 1.0 + ws.values[a].norm();
    const double tol = cfg.picard_tol * scale;
    const double ratio_floor = 1e-15 * scale;

    double prev_dist = -1.0;
    for (int iter = 1; iter <= cfg.max_picard_iters; ++iter) {
        const ControlledPath work = ws.freeze(e);
        ControlledPath f = cf.evaluate(work);

        std::vector<Vec> new_values(ws.values.begin(), ws.values.end());
        std::vector<Mat> new_gubs(ws.gubs.begin(), ws.gubs.end());
        Vec acc = Vec::Zero(ws.k);
        new_gubs[a] = y.gubinelli(a) + f.value_shaped(a);
        for (std::size_t m = a; m < e; ++m) {
            acc += recursion_step(f, rp, m);
            new_values[m + 1] = ws.values[a] + (y.value(m + 1) - y.value(a)) + acc;
            new_gubs[m + 1] = y.gubinelli(m + 1) + f.value_shaped(m + 1);
        }

        const double dist = block_distance(new_values, new_gubs, ws.values, ws.gubs,
                                           rp.path(), cfg.p, delta, a, e);
        std::copy(new_values.begin() + a, new_values.begin() + e + 1, ws.values.begin() + a);
        std::copy(new_gubs.begin() + a, new_gubs.begin() + e + 1, ws.gubs.begin() + a);
        out.diagnostics.iterations = iter;

        if (prev_dist > ratio_floor && dist > 0.0)
            out.diagnostics.contraction_ratios.push_back(dist / prev_dist);
        prev_dist = dist;

        if (dist <= tol) {
            f_latest = std::move(f);
            out.converged = true;
            return out;
        }
    }
    return out;
}

struct SolveAttempt {
    bool ok = false;
    std::vector<PieceDiagnostics> pieces;
    std::vector<std::size_t> partition;
    bool guard_ok = true;
};

SolveAttempt solve_with_gamma(Workspace& ws, const RoughPath& rp, const ControlledPath& y,
                              const CoefficientFunctional& cf, const SolverConfig& cfg, double gamma) {
    SolveAttempt attempt;
    attempt.partition = control_partition(rp, cfg.p, gamma);
    const auto& taus = attempt.partition;
    ws.values[0] = y.value(0);
    ws.gubs[0] = y.gubinelli(0);

    for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
        const std::size_t a = taus[i];
        const std::size_t b = taus[i + 1];
        const std::size_t e = b - 1;

        double delta = cfg.delta;
        if (!(delta > 0.0)) {
            const double piece_norm = e > a ? rough_norm(rp, cfg.p, a, e) : 0.0;
            delta = piece_norm > 0.0 ? std::min(kDeltaCap, std::max(1.0, 1.0 / std::sqrt(piece_norm))) : kDeltaCap;
        }

        ControlledPath f_latest = ControlledPath::constant(ws.driver, Vec::Zero(ws.k));
        if (e > a) {
            PieceOutcome piece = solve_piece(ws, rp, y, cf, cfg, delta, a, e, f_latest);
            attempt.pieces.push_back(piece.diagnostics);
            if (!piece.converged) return attempt;
            if (i == 0 && !piece.diagnostics.contraction_ratios.empty()) {
                double worst = 0.0;
                for (double r : piece.diagnostics.contraction_ratios) worst = std::max(worst, r);
                if (worst > cfg.contraction_guard) attempt.guard_ok = false;
            }
        } else {
            PieceDiagnostics trivial;
            trivial.begin = a;
            trivial.end = e;
            trivial.delta = delta;
            attempt.pieces.push_back(trivial);
            f_latest = cf.evaluate(ws.freeze(a));
        }

        // boundary step: the value at the right endpoint is forced by the
        // one-cell recursion from the left limit
        ws.values[b] = ws.values[e] + (y.value(b) - y.value(e)) + recursion_step(f_latest, rp, e);
        ws.gubs[b] = y.gubinelli(b);
        if (!attempt.guard_ok) return attempt;
    }
    attempt.ok = true;
    return attempt;
}

}  // namespace

SolutionReport solve_rfde(const RoughPath& rp, const ControlledPath& y, const CoefficientFunctional& cf,
                          const SolverConfig& config) {
    require_problem(rp, y);
    if (!(config.p > 2.0 && config.p < 3.0)) throw std::invalid_argument("solver: p must lie in (2, 3)");

    Workspace ws;
    ws.driver = rp.path_ptr();
    ws.k = y.rows();
    ws.d = rp.dim();
    ws.values.assign(y.size(), Vec::Zero(ws.k));
    ws.gubs.assign(y.size(), Mat::Zero(ws.k, ws.d));

    double gamma = config.gamma > 0.0 ? config.gamma : 1.0;
    SolveAttempt attempt;
    int halvings = 0;
    for (;; ++halvings) {
        attempt = solve_with_gamma(ws, rp, y, cf, config, gamma);
        if (attempt.ok) break;
        if (halvings >= config.max_gamma_halvings)
            throw SolverNonContraction("solver: Picard iteration failed to contract after gamma halvings",
                                       std::move(attempt.pieces));
        gamma /= 2.0;
    }

    // consistency passes: Y' = y' + F(Y) exactly, then F' from the final pair
    {
        ControlledPath f = cf.evaluate(ws.snapshot());
        for (std::size_t i = 0; i < ws.values.size(); ++i) ws.gubs[i] = y.gubinelli(i) + f.value_shaped(i);
    }
    ControlledPath solution = ws.snapshot();
    ControlledPath f_final = cf.evaluate(solution);

    SolutionReport report{std::move(solution), std::move(attempt.partition), std::move(attempt.pieces),
                          gamma, halvings, 0.0, 0.0};
    for (std::size_t m = 0; m + 1 < ws.values.size(); ++m) {
        const Vec defect = (ws.values[m + 1] - ws.values[m]) - (y.value(m + 1) - y.value(m)) -
                           recursion_step(f_final, rp, m);
        report.residual = std::max(report.residual, defect.norm());
    }
    report.apriori_norm = controlled_norm(report.solution, config.p, 0, ws.values.size() - 1);
    return report;
}

ControlledPath forward_recursion(const RoughPath& rp, const ControlledPath& y, const CoefficientFunctional& cf) {
    require_problem(rp, y);
    Workspace ws;
    ws.driver = rp.path_ptr();
    ws.k = y.rows();
    ws.d = rp.dim();
    const std::size_t n = y.size();
    ws.values.assign(n, Vec::Zero(ws.k));
    ws.gubs.assign(n, Mat::Zero(ws.k, ws.d));
    ws.values[0] = y.value(0);
    ws.gubs[0] = y.gubinelli(0);

    for (std::size_t m = 0; m < n; ++m) {
        // two passes: the coefficient value fixes Y'_m, then the derivative
        // is re-read with the consistent Y'_m in place
        ControlledPath f_value = cf.evaluate(ws.freeze(m));
        ws.gubs[m] = y.gubinelli(m) + f_value.value_shaped(m);
        if (m + 1 == n) break;
        ControlledPath f = cf.evaluate(ws.freeze(m));
        ws.values[m + 1] = ws.values[m] + (y.value(m + 1) - y.value(m)) + recursion_step(f, rp, m);
    }
    return ws.snapshot();
}

AprioriNorms apriori_norms(const SolutionReport& report, const ControlledPath& y,
                           const CoefficientFunctional& cf, const RoughPath& rp, double p) {
    AprioriNorms norms;
    norms.solution_norm = report.apriori_norm;
    norms.initial_norm = controlled_norm(y, p, 0, y.size() - 1);
    norms.growth_constant = cf.growth_constant();
    norms.driver_norm = rough_norm(rp, p, 0, rp.path().size() - 1);
    return norms;
}

StabilityResult stability_experiment(const StabilityInput& a, const StabilityInput& b,
                                     double difference_constant, double p, double norm_bound,
                                     const SolverConfig& config) {
    if (!a.rp || !a.y || !a.cf || !b.rp || !b.y || !b.cf)
        throw std::invalid_argument("stability experiment: missing inputs");
    if (!a.rp->grid().same(b.rp->grid())) throw std::invalid_argument("stability experiment: grids differ");

    SolverConfig cfg = config;
    cfg.p = p;
    const SolutionReport ra = solve_rfde(*a.rp, *a.y, *a.cf, cfg);
    const SolutionReport rb = solve_rfde(*b.rp, *b.y, *b.cf, cfg);

    StabilityResult res;
    res.norm_a = ra.apriori_norm;
    res.norm_b = rb.apriori_norm;
    res.norm_bound_exceeded = ra.apriori_norm > norm_bound || rb.apriori_norm > norm_bound;

    const std::size_t last = a.y->size() - 1;
    res.output_distance = (ra.solution.value(0) - rb.solution.value(0)).norm() +
                          controlled_distance(ra.solution, rb.solution, p, 0, last);

    const Vec f0a = a.cf->evaluate(*a.y).value(0);
    const Vec f0b = b.cf->evaluate(*b.y).value(0);
    res.input_distance = (a.y->value(0) - b.y->value(0)).norm() + (f0a - f0b).norm() +
                         controlled_distance(*a.y, *b.y, p, 0, last) + difference_constant +
                         rough_distance(*a.rp, *b.rp, p, 0, last);
    res.ratio = res.output_distance == 0.0 ? 0.0 : res.output_distance / res.input_distance;
    return res;
}

}  // namespace rfde
