#include "rfde/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace rfde {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

Vec parse_vec(const json& j, const std::string& where) {
    if (j.is_number()) return Vec::Constant(1, j.get<double>());
    if (!j.is_array() || j.empty()) throw std::invalid_argument("config: " + where + " must be a number or array");
    Vec v(j.size());
    int i = 0;
    for (const auto& x : j) v[i++] = x.get<double>();
    return v;
}

FieldSpec parse_field(const json& j) {
    reject_unknown(j, {"name", "amp", "scale"}, "coefficient.field");
    FieldSpec f;
    if (j.contains("name")) f.name = j.at("name").get<std::string>();
    if (j.contains("amp")) f.amp = j.at("amp").get<double>();
    if (j.contains("scale")) f.scale = j.at("scale").get<double>();
    static const std::set<std::string> names{"constant", "linear", "sin", "tanh-saturating"};
    if (!names.count(f.name)) throw std::invalid_argument("config: unknown field name '" + f.name + "'");
    return f;
}

DriverConfig parse_driver(const json& j) {
    reject_unknown(j,
                   {"kind", "dimension", "horizon", "step", "delays", "covariance", "jump_rate",
                    "jump_size", "jumps", "seed", "slope"},
                   "driver");
    DriverConfig d;
    if (j.contains("kind")) d.kind = j.at("kind").get<std::string>();
    static const std::set<std::string> kinds{"brownian", "compensated_poisson", "engineered_jumps",
                                             "smooth_linear"};
    if (!kinds.count(d.kind)) throw std::invalid_argument("config: unknown driver kind '" + d.kind + "'");
    auto& spec = d.spec;
    if (d.kind == "compensated_poisson") spec.kind = DriverKind::compensated_poisson;
    if (d.kind == "engineered_jumps") spec.kind = DriverKind::engineered_jumps;
    if (j.contains("dimension")) spec.dimension = j.at("dimension").get<int>();
    if (j.contains("horizon")) spec.horizon = j.at("horizon").get<double>();
    if (j.contains("step")) spec.step = j.at("step").get<double>();
    if (j.contains("delays")) spec.delays = j.at("delays").get<std::vector<double>>();
    if (j.contains("covariance")) {
        const auto& rows = j.at("covariance");
        spec.covariance = Mat(rows.size(), rows.size());
        int r = 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != spec.covariance.cols())
                throw std::invalid_argument("config: covariance must be square");
            int c = 0;
            for (const auto& x : row) spec.covariance(r, c++) = x.get<double>();
            ++r;
        }
    }
    if (j.contains("jump_rate")) spec.jump_rate = j.at("jump_rate").get<double>();
    if (j.contains("jump_size")) spec.jump_size = j.at("jump_size").get<double>();
    if (j.contains("jumps"))
        for (const auto& row : j.at("jumps")) {
            if (!row.is_array() || row.size() != 3)
                throw std::invalid_argument("config: jumps entries must be [time, component, size]");
            spec.jumps.push_back(Jump{row[0].get<double>(), row[1].get<int>(), row[2].get<double>()});
        }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("slope")) d.slope = parse_vec(j.at("slope"), "driver.slope");
    if (d.kind == "smooth_linear" && d.slope.size() == 0) d.slope = Vec::Ones(spec.dimension);
    spec.validate();
    if (d.kind == "smooth_linear" && d.slope.size() != spec.dimension)
        throw std::invalid_argument("config: slope dimension must match the driver dimension");
    return d;
}

CoefficientConfig parse_coefficient(const json& j) {
    reject_unknown(j, {"class", "field", "stop_times", "eta", "history", "alpha"}, "coefficient");
    CoefficientConfig c;
    if (j.contains("class")) c.klass = j.at("class").get<std::string>();
    static const std::set<std::string> classes{"vector_field", "controlled", "discrete_time",
                                               "constant_delay", "variable_delay"};
    if (!classes.count(c.klass)) throw std::invalid_argument("config: unknown coefficient class '" + c.klass + "'");
    if (j.contains("field")) c.field = parse_field(j.at("field"));
    if (j.contains("stop_times")) c.stop_times = j.at("stop_times").get<std::vector<double>>();
    if (j.contains("eta")) {
        reject_unknown(j.at("eta"), {"kind", "value", "slope", "floor_eps"}, "coefficient.eta");
        const auto& e = j.at("eta");
        if (e.contains("kind")) c.eta.kind = e.at("kind").get<std::string>();
        if (c.eta.kind != "constant" && c.eta.kind != "affine")
            throw std::invalid_argument("config: eta kind must be constant or affine");
        if (e.contains("value")) c.eta.value = e.at("value").get<double>();
        if (e.contains("slope")) c.eta.slope = e.at("slope").get<double>();
        if (e.contains("floor_eps")) c.eta.floor_eps = e.at("floor_eps").get<double>();
    }
    if (j.contains("history")) c.history = parse_vec(j.at("history"), "coefficient.history");
    if (j.contains("alpha")) c.alpha0 = parse_vec(j.at("alpha"), "coefficient.alpha");
    return c;
}

StabilityConfig parse_stability(const json& j) {
    reject_unknown(j, {"target", "scales", "norm_bound", "seeds"}, "stability");
    StabilityConfig s;
    if (j.contains("target")) s.target = j.at("target").get<std::string>();
    static const std::set<std::string> targets{"y0", "field", "driver"};
    if (!targets.count(s.target)) throw std::invalid_argument("config: unknown stability target '" + s.target + "'");
    if (j.contains("scales")) s.scales = j.at("scales").get<std::vector<double>>();
    if (j.contains("norm_bound")) s.norm_bound = j.at("norm_bound").get<double>();
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    return s;
}

SolverConfig parse_solver(const json& j) {
    reject_unknown(j, {"p", "gamma", "delta", "max_picard_iters", "picard_tol", "contraction_guard"},
                   "solver");
    SolverConfig s;
    if (j.contains("p")) s.p = j.at("p").get<double>();
    if (!(s.p > 2.0 && s.p < 3.0)) throw std::invalid_argument("config: p must lie in (2, 3)");
    if (j.contains("gamma")) s.gamma = j.at("gamma").get<double>();
    if (j.contains("delta")) s.delta = j.at("delta").get<double>();
    if (j.contains("max_picard_iters")) s.max_picard_iters = j.at("max_picard_iters").get<int>();
    if (j.contains("picard_tol")) s.picard_tol = j.at("picard_tol").get<double>();
    if (!(s.picard_tol > 0.0)) throw std::invalid_argument("config: picard_tol must be positive");
    if (j.contains("contraction_guard")) s.contraction_guard = j.at("contraction_guard").get<double>();
    if (!(s.contraction_guard > 0.0 && s.contraction_guard < 1.0))
        throw std::invalid_argument("config: contraction_guard must lie in (0, 1)");
    return s;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
    reject_unknown(j, {"driver", "coefficient", "initial", "solver", "refinements", "stability"}, "config");
    ExperimentConfig cfg;
    if (j.contains("driver")) cfg.driver = parse_driver(j.at("driver"));
    if (j.contains("coefficient")) cfg.coefficient = parse_coefficient(j.at("coefficient"));
    if (j.contains("initial")) {
        reject_unknown(j.at("initial"), {"y0"}, "initial");
        if (j.at("initial").contains("y0")) cfg.y0 = parse_vec(j.at("initial").at("y0"), "initial.y0");
    }
    if (j.contains("solver")) cfg.solver = parse_solver(j.at("solver"));
    if (j.contains("refinements")) {
        cfg.refinements = j.at("refinements").get<int>();
        if (cfg.refinements < 1) throw std::invalid_argument("config: refinements must be >= 1");
    }
    if (j.contains("stability")) cfg.stability = parse_stability(j.at("stability"));

    const bool needs_delays = cfg.coefficient.klass == "constant_delay";
    if (needs_delays && cfg.driver.spec.delays.empty())
        throw std::invalid_argument("config: constant_delay requires driver delays");
    if (cfg.coefficient.klass == "discrete_time" && cfg.coefficient.stop_times.empty())
        throw std::invalid_argument("config: discrete_time requires stop_times");
    return cfg;
}

ExperimentConfig read_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file);
    json j;
    in >> j;
    return parse_config(j);
}

namespace {

SampledPath sampled_driver(const ExperimentConfig& cfg) {
    if (cfg.driver.kind == "smooth_linear") return sample_smooth_driver(cfg.driver.spec, cfg.driver.slope);
    return simulate_driver(cfg.driver.spec);
}

}  // namespace

Problem build_problem(const ExperimentConfig& cfg, const SampledPath* z_override) {
    Problem prob;
    const int k = static_cast<int>(cfg.y0.size());
    const int e = cfg.driver.spec.dimension;
    const auto& klass = cfg.coefficient.klass;
    const auto& fs = cfg.coefficient.field;

    DriverSpec spec = cfg.driver.spec;
    if (klass == "variable_delay") {
        // make the history window cover the delay span, as a step multiple
        double max_eta = 0.0;
        const EtaSpec& eta = cfg.coefficient.eta;
        const std::size_t cells = static_cast<std::size_t>(std::lround(spec.horizon / spec.step));
        for (std::size_t i = 0; i <= cells; ++i)
            max_eta = std::max(max_eta, eta(spec.step * static_cast<double>(i)));
        spec.delays = {std::ceil(max_eta / spec.step - 1e-9) * spec.step};
        if (spec.delays[0] <= 0.0) spec.delays = {spec.step};
    }

    const bool exact_smooth = cfg.driver.kind == "smooth_linear" && spec.delays.empty();
    std::shared_ptr<const SampledPath> z;
    if (!exact_smooth) {
        ExperimentConfig sim_cfg = cfg;
        sim_cfg.driver.spec = spec;
        z = std::make_shared<const SampledPath>(z_override ? *z_override : sampled_driver(sim_cfg));
        prob.z = z;
    }

    if (klass == "constant_delay") {
        StackedDriver stacked = delayed_lift(*z, spec.delays);
        prob.rp = std::make_shared<const RoughPath>(stacked.rough_path());
        const int blocks = stacked.shape().blocks();
        Vec history = cfg.coefficient.history.size() > 0 ? cfg.coefficient.history : cfg.y0;
        if (history.size() != k) throw std::invalid_argument("config: history dimension must match y0");
        std::vector<DelaySegment> segments;
        for (std::size_t j = 0; j < spec.delays.size(); ++j)
            segments.push_back(DelaySegment::constant(prob.rp->grid().size(), history));
        VectorField base = make_field(fs.name, k * blocks, k, e, fs.amp, fs.scale);
        prob.cf = lift_constant_delay(extend_by_zero(std::move(base), 0, blocks), stacked.shape(),
                                      std::move(segments));
    } else if (klass == "variable_delay") {
        const EtaSpec eta = cfg.coefficient.eta;
        prob.rp = std::make_shared<const RoughPath>(
            variable_delay_stack(*z, [eta](double t) { return eta(t); }));
        Vec history = cfg.coefficient.history.size() > 0 ? cfg.coefficient.history : cfg.y0;
        if (history.size() != k) throw std::invalid_argument("config: history dimension must match y0");
        DelaySegment segment = DelaySegment::constant(prob.rp->grid().size(), history);
        VectorField base = make_field(fs.name, 2 * k, k, e, fs.amp, fs.scale);
        prob.cf = lift_variable_delay(extend_by_zero(std::move(base), 0, 2),
                                      [eta](double t) { return eta(t); }, eta.floor_eps,
                                      std::move(segment), e);
    } else {
        // plain driver over [0, T]
        if (exact_smooth) {
            const std::size_t cells = static_cast<std::size_t>(std::lround(spec.horizon / spec.step));
            prob.rp = std::make_shared<const RoughPath>(
                RoughPath::exact_linear(Grid::uniform(0.0, spec.horizon, cells), cfg.driver.slope));
        } else {
            const std::size_t start = z->grid().index_of(0.0);
            prob.rp = std::make_shared<const RoughPath>(
                RoughPath::zero_cells(z->restricted(start, z->size() - 1)));
        }
        const int d = prob.rp->dim();
        if (klass == "vector_field") {
            prob.cf = lift_vector_field(make_field(fs.name, k, k, d, fs.amp, fs.scale));
        } else if (klass == "controlled") {
            Vec alpha0 = cfg.coefficient.alpha0.size() > 0 ? cfg.coefficient.alpha0 : Vec::Zero(1);
            ControlledPath alpha = ControlledPath::constant(prob.rp->path_ptr(), alpha0);
            prob.cf = lift_controlled(
                make_field(fs.name, static_cast<int>(alpha0.size()) + k, k, d, fs.amp, fs.scale),
                std::move(alpha));
        } else if (klass == "discrete_time") {
            prob.cf = lift_discrete_time(
                make_field(fs.name, k * (static_cast<int>(cfg.coefficient.stop_times.size()) + 1), k, d,
                           fs.amp, fs.scale),
                cfg.coefficient.stop_times);
        } else {
            throw std::invalid_argument("config: unsupported coefficient class '" + klass + "'");
        }
    }

    prob.y = std::make_shared<const ControlledPath>(ControlledPath::constant(prob.rp->path_ptr(), cfg.y0));
    return prob;
}

double field_difference_constant(const FieldSpec& a, const FieldSpec& b, int m, int k, int d) {
    if (a.name != b.name || a.scale != b.scale)
        throw std::invalid_argument("difference constant: fields must differ only in amplitude");
    if (a.amp == b.amp) return 0.0;
    return make_field(a.name, m, k, d, a.amp - b.amp, a.scale).bounds().c2;
}

StabilityRow run_stability_case(const ExperimentConfig& base, const std::string& target, double scale,
                                std::uint64_t seed) {
    ExperimentConfig cfg_a = base;
    cfg_a.driver.spec.seed = seed;
    ExperimentConfig cfg_b = cfg_a;

    StabilityRow row;
    row.target = target;
    row.scale = scale;
    row.seed = seed;

    Problem a = build_problem(cfg_a);
    Problem b;
    if (target == "y0") {
        cfg_b.y0[0] += scale;
        if (cfg_b.coefficient.history.size() == 0) cfg_b.coefficient.history = cfg_a.y0;
        b = a.z ? build_problem(cfg_b, a.z.get()) : build_problem(cfg_b);
    } else if (target == "field") {
        cfg_b.coefficient.field.amp += scale;
        b = a.z ? build_problem(cfg_b, a.z.get()) : build_problem(cfg_b);
        const int k = static_cast<int>(base.y0.size());
        const int blocks = static_cast<int>(cfg_b.driver.spec.delays.size()) + 1;
        int m = k, cols = a.rp->dim();
        if (base.coefficient.klass == "constant_delay") {
            m = k * blocks;
            cols = base.driver.spec.dimension;
        } else if (base.coefficient.klass == "variable_delay") {
            m = 2 * k;
            cols = base.driver.spec.dimension;
        } else if (base.coefficient.klass == "controlled") {
            m = k + static_cast<int>(std::max<Eigen::Index>(1, base.coefficient.alpha0.size()));
        } else if (base.coefficient.klass == "discrete_time") {
            m = k * (static_cast<int>(base.coefficient.stop_times.size()) + 1);
        }
        row.difference_constant =
            field_difference_constant(cfg_a.coefficient.field, cfg_b.coefficient.field, m, k, cols);
    } else if (target == "driver") {
        if (a.z) {
            std::vector<Vec> scaled;
            scaled.reserve(a.z->size());
            for (std::size_t i = 0; i < a.z->size(); ++i) scaled.push_back(Vec(a.z->value(i) * (1.0 + scale)));
            SampledPath z_scaled(a.z->grid(), std::move(scaled));
            b = build_problem(cfg_b, &z_scaled);
        } else {
            cfg_b.driver.slope = base.driver.slope * (1.0 + scale);
            b = build_problem(cfg_b);
        }
    } else {
        throw std::invalid_argument("stability: unknown target '" + target + "'");
    }

    StabilityInput ia{a.rp.get(), a.y.get(), a.cf.get()};
    StabilityInput ib{b.rp.get(), b.y.get(), b.cf.get()};
    row.result = stability_experiment(ia, ib, row.difference_constant, base.solver.p,
                                      base.stability.norm_bound, base.solver);
    return row;
}

}  // namespace rfde
