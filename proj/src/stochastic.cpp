#include "rfde/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rfde/rng.hpp"

namespace rfde {

namespace {

bool is_step_multiple(double r, double h) {
    const double ratio = r / h;
    return std::abs(ratio - std::round(ratio)) < 1e-9;
}

/// Base mesh of step h on [-r_max, T], plus jump times and their delayed
/// images. Since every delay is a multiple of h, inserting the whole
/// h-lattice shifted by each event time keeps the positive part of the grid
/// closed under shifting by any delay, so delayed reads always land on grid
/// points. Event times within a small whisker of an existing point are
/// snapped onto it, which keeps distinct grid points separated by far more
/// than the floor-lookup tolerance.
Grid build_extended_grid(const DriverSpec& spec, const std::vector<double>& event_times) {
    const double h = spec.step;
    const long back = std::lround(spec.max_delay() / h);
    const long fwd = std::lround(std::ceil(spec.horizon / h - 1e-9));
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(back + fwd + 1) * (1 + event_times.size()));
    for (long i = -back; i <= fwd; ++i) times.push_back(static_cast<double>(i) * h);
    if (times.back() < spec.horizon - h * 1e-9) times.push_back(spec.horizon);

    const double merge_tol = h * 1e-6;
    std::vector<double> extra;
    auto push_snapped = [&](double t) {
        if (t <= 0.0 || t > spec.horizon + merge_tol) return;
        auto it = std::lower_bound(times.begin(), times.end(), t);
        if (it != times.end() && std::abs(*it - t) < merge_tol) return;
        if (it != times.begin() && std::abs(*(it - 1) - t) < merge_tol) return;
        extra.push_back(t);
    };
    for (double t : event_times) {
        const double offset = t - std::floor(t / h) * h;
        for (long m = 0; m <= fwd; ++m) push_snapped(offset + static_cast<double>(m) * h);
    }
    times.insert(times.end(), extra.begin(), extra.end());
    std::sort(times.begin(), times.end());
    // inserted lattices may collide with each other
    std::vector<double> unique_times;
    unique_times.reserve(times.size());
    for (double t : times)
        if (unique_times.empty() || t - unique_times.back() >= merge_tol) unique_times.push_back(t);
    return Grid(std::move(unique_times));
}

std::vector<double> sample_poisson_times(std::mt19937_64& rng, double rate, double horizon) {
    std::vector<double> times;
    if (rate <= 0.0) return times;
    std::exponential_distribution<double> gap(rate);
    double t = gap(rng);
    while (t <= horizon) {
        times.push_back(t);
        t += gap(rng);
    }
    return times;
}

}  // namespace

void DriverSpec::validate() const {
    if (dimension <= 0) throw std::invalid_argument("driver: dimension must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("driver: horizon must be positive");
    if (!(step > 0.0) || step > horizon) throw std::invalid_argument("driver: bad base step");
    for (std::size_t j = 0; j < delays.size(); ++j) {
        if (!(delays[j] > 0.0)) throw std::invalid_argument("driver: delays must be positive");
        if (j > 0 && !(delays[j] > delays[j - 1])) throw std::invalid_argument("driver: delays must increase");
        if (!is_step_multiple(delays[j], step))
            throw std::invalid_argument("driver: delays must be integer multiples of the base step");
    }
    if (kind == DriverKind::brownian && covariance.size() > 0) {
        if (covariance.rows() != dimension || covariance.cols() != dimension)
            throw std::invalid_argument("driver: covariance shape mismatch");
        if (!covariance.isApprox(covariance.transpose(), 1e-12))
            throw std::invalid_argument("driver: covariance must be symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> es(covariance);
        if (es.eigenvalues().minCoeff() < -1e-12)
            throw std::invalid_argument("driver: covariance must be positive semidefinite");
    }
    if (kind == DriverKind::compensated_poisson && jump_rate < 0.0)
        throw std::invalid_argument("driver: jump rate must be nonnegative");
    if (kind == DriverKind::engineered_jumps)
        for (const auto& j : jumps) {
            if (j.component < 0 || j.component >= dimension)
                throw std::invalid_argument("driver: jump component out of range");
            if (!(j.time > 0.0) || j.time > horizon)
                throw std::invalid_argument("driver: jump times must lie in (0, horizon]");
        }
}

SampledPath simulate_driver(const DriverSpec& spec) {
    spec.validate();
    const int e = spec.dimension;
    std::mt19937_64 rng = seeded_engine(spec.seed);

    if (spec.kind == DriverKind::brownian) {
        const Grid grid = build_extended_grid(spec, {});
        Mat cov = spec.covariance.size() > 0 ? spec.covariance : Mat::Identity(e, e);
        Eigen::LLT<Mat> llt(cov);
        Mat chol;
        if (llt.info() == Eigen::Success) {
            chol = llt.matrixL();
        } else {
            // semidefinite covariance: fall back to an eigendecomposition root
            Eigen::SelfAdjointEigenSolver<Mat> es(cov);
            chol = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        }
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<Vec> values(grid.size(), Vec::Zero(e));
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (grid.time(i) <= 0.0) continue;
            const double dt = grid.time(i) - grid.time(i - 1);
            Vec xi(e);
            for (int c = 0; c < e; ++c) xi[c] = normal(rng);
            values[i] = values[i - 1] + chol * xi * std::sqrt(dt);
        }
        return SampledPath(grid, std::move(values));
    }

    // jump-driven kinds: gather event times per component, build the grid
    // with events and their delayed images inserted, then evaluate exactly
    std::vector<std::vector<double>> comp_times(e);
    double drift_rate = 0.0;
    std::vector<std::vector<double>> comp_sizes(e);
    if (spec.kind == DriverKind::compensated_poisson) {
        for (int c = 0; c < e; ++c) {
            comp_times[c] = sample_poisson_times(rng, spec.jump_rate, spec.horizon);
            comp_sizes[c].assign(comp_times[c].size(), spec.jump_size);
        }
        drift_rate = spec.jump_rate * spec.jump_size;
    } else {
        for (const auto& j : spec.jumps) {
            comp_times[j.component].push_back(j.time);
            comp_sizes[j.component].push_back(j.size);
        }
    }
    std::vector<double> all_times;
    for (const auto& ts : comp_times) all_times.insert(all_times.end(), ts.begin(), ts.end());
    const Grid grid = build_extended_grid(spec, all_times);

    // snap event times onto the grid they were inserted into
    for (auto& ts : comp_times)
        for (auto& t : ts) t = grid.time(grid.floor_index(t + grid.min_spacing() * 0.5));

    std::vector<Vec> values(grid.size(), Vec::Zero(e));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.time(i);
        if (t <= 0.0) continue;
        Vec v = Vec::Zero(e);
        for (int c = 0; c < e; ++c) {
            double acc = 0.0;
            for (std::size_t m = 0; m < comp_times[c].size(); ++m)
                if (comp_times[c][m] <= t + grid.tolerance()) acc += comp_sizes[c][m];
            v[c] = acc - drift_rate * t;
        }
        values[i] = v;
    }
    return SampledPath(grid, std::move(values));
}

SampledPath sample_smooth_driver(const DriverSpec& spec, const Vec& slope) {
    spec.validate();
    if (slope.size() != spec.dimension) throw std::invalid_argument("smooth driver: slope dimension mismatch");
    const Grid grid = build_extended_grid(spec, {});
    std::vector<Vec> values;
    values.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values.push_back(Vec(slope * std::max(grid.time(i), 0.0)));
    return SampledPath(grid, std::move(values));
}

SampledPath bracket(const SampledPath& xi, const SampledPath& xj) {
    if (!xi.grid().same(xj.grid())) throw std::invalid_argument("bracket: grids differ");
    if (xi.dim() != 1 || xj.dim() != 1) throw std::invalid_argument("bracket: scalar paths required");
    std::vector<double> acc(xi.size(), 0.0);
    for (std::size_t k = 1; k < xi.size(); ++k)
        acc[k] = acc[k - 1] + (xi.value(k)[0] - xi.value(k - 1)[0]) * (xj.value(k)[0] - xj.value(k - 1)[0]);
    return SampledPath::scalar(xi.grid(), std::move(acc));
}

SampledPath bracket_partial_sum(const SampledPath& xi, const SampledPath& xj, std::size_t stride) {
    if (!xi.grid().same(xj.grid())) throw std::invalid_argument("bracket: grids differ");
    if (xi.dim() != 1 || xj.dim() != 1) throw std::invalid_argument("bracket: scalar paths required");
    if (stride == 0) throw std::invalid_argument("bracket: stride must be positive");
    const std::size_t n = xi.size();
    std::vector<double> acc(n, 0.0);
    std::size_t anchor = 0;
    for (std::size_t k = 1; k < n; ++k) {
        acc[k] = acc[anchor] + (xi.value(k)[0] - xi.value(anchor)[0]) * (xj.value(k)[0] - xj.value(anchor)[0]);
        if (k - anchor == stride) anchor = k;
    }
    return SampledPath::scalar(xi.grid(), std::move(acc));
}

StackedDriver::StackedDriver(RoughPath rp, StackedShape shape) : rp_(std::move(rp)), shape_(std::move(shape)) {
    if (rp_.dim() != shape_.stacked_dim())
        throw std::invalid_argument("stacked driver: dimension does not match the shape");
}

std::pair<int, int> StackedDriver::block_of(int component) const {
    if (component < 0 || component >= rp_.dim()) throw std::out_of_range("stacked driver: component");
    return {component % shape_.base_dim, component / shape_.base_dim};
}

SampledPath StackedDriver::component(int base_component, int delay_index) const {
    return rp_.path().component(delay_index * shape_.base_dim + base_component);
}

StackedDriver delayed_lift(const SampledPath& z, std::vector<double> delays) {
    for (std::size_t j = 1; j < delays.size(); ++j)
        if (!(delays[j] > delays[j - 1])) throw std::invalid_argument("delayed lift: delays must increase");
    const int e = z.dim();
    const int blocks = static_cast<int>(delays.size()) + 1;
    const Grid& zg = z.grid();
    const std::size_t start = zg.index_of(0.0);
    const std::size_t end = zg.size() - 1;

    std::vector<Vec> values;
    values.reserve(end - start + 1);
    for (std::size_t i = start; i <= end; ++i) {
        Vec v(e * blocks);
        v.head(e) = z.value(i);
        for (std::size_t j = 0; j < delays.size(); ++j) {
            const std::size_t src = zg.floor_index(zg.time(i) - delays[j]);
            v.segment(static_cast<int>(j + 1) * e, e) = z.value(src);
        }
        values.push_back(std::move(v));
    }
    SampledPath stacked(zg.restricted(start, end), std::move(values));
    StackedShape shape{e, std::move(delays)};
    return StackedDriver(RoughPath::zero_cells(std::move(stacked)), std::move(shape));
}

RoughPath variable_delay_stack(const SampledPath& z, const std::function<double(double)>& eta) {
    const int e = z.dim();
    const Grid& zg = z.grid();
    const std::size_t start = zg.index_of(0.0);
    const std::size_t end = zg.size() - 1;
    std::vector<Vec> values;
    values.reserve(end - start + 1);
    for (std::size_t i = start; i <= end; ++i) {
        const double t = zg.time(i);
        const double q = t - eta(t);
        Vec v(2 * e);
        v.head(e) = z.value(i);
        v.tail(e) = z.value(zg.floor_index(q));
        values.push_back(std::move(v));
    }
    return RoughPath::zero_cells(SampledPath(zg.restricted(start, end), std::move(values)));
}

SampledPath euler_maruyama_delay(const SampledPath& z, const VectorField& vf, const Vec& y0,
                                 const std::function<Vec(double)>& history, std::vector<double> delays) {
    const Grid& zg = z.grid();
    const std::size_t start = zg.index_of(0.0);
    const std::size_t end = zg.size() - 1;
    const Grid grid = zg.restricted(start, end);
    const int k = static_cast<int>(y0.size());
    const int copies = static_cast<int>(delays.size()) + 1;
    if (vf.input_dim() != k * copies || vf.rows() != k || vf.cols() != z.dim())
        throw std::invalid_argument("euler scheme: field dimensions mismatch");

    std::vector<Vec> values(grid.size(), Vec::Zero(k));
    values[0] = y0;
    Vec state(k * copies);
    for (std::size_t m = 0; m + 1 < grid.size(); ++m) {
        state.head(k) = values[m];
        for (std::size_t j = 0; j < delays.size(); ++j) {
            const auto src = grid.shift_index(m, delays[j]);
            state.segment(static_cast<int>(j + 1) * k, k) = src ? values[*src] : history(grid.time(m) - delays[j]);
        }
        values[m + 1] = values[m] + vf(state) * z.increment(start + m, start + m + 1);
    }
    return SampledPath(grid, std::move(values));
}

CompareResult rde_vs_sde_compare(const DriverSpec& spec, const VectorField& vf, const Vec& y0,
                                 const std::function<Vec(double)>& history, double p, int refinements,
                                 const SolverConfig& config) {
    if (refinements < 1) throw std::invalid_argument("compare: need at least one level");
    CompareResult result;
    const int blocks = static_cast<int>(spec.delays.size()) + 1;
    for (int level = 0; level < refinements; ++level) {
        DriverSpec level_spec = spec;
        level_spec.step = spec.step / std::pow(2.0, level);
        const SampledPath z = simulate_driver(level_spec);
        const StackedDriver stacked = delayed_lift(z, level_spec.delays);
        const RoughPath& rp = stacked.rough_path();

        std::vector<DelaySegment> segments;
        for (double r : level_spec.delays) {
            DelaySegment seg;
            seg.values.reserve(rp.grid().size());
            for (std::size_t i = 0; i < rp.grid().size(); ++i) {
                const double q = rp.grid().time(i) - r;
                seg.values.push_back(q + rp.grid().tolerance() < 0.0 ? history(q) : Vec::Zero(y0.size()));
            }
            segments.push_back(std::move(seg));
        }
        CoefficientPtr cf = lift_constant_delay(extend_by_zero(vf, 0, blocks), stacked.shape(), std::move(segments));
        const ControlledPath y = ControlledPath::constant(rp.path_ptr(), y0);

        SolverConfig cfg = config;
        cfg.p = p;
        const SolutionReport report = solve_rfde(rp, y, *cf, cfg);
        const SampledPath em = euler_maruyama_delay(z, vf, y0, history, level_spec.delays);

        CompareLevel lvl;
        lvl.step = level_spec.step;
        lvl.scale = 1.0;
        for (std::size_t i = 0; i < em.size(); ++i) {
            lvl.sup_gap = std::max(lvl.sup_gap, (report.solution.value(i) - em.value(i)).norm());
            lvl.scale = std::max(lvl.scale, 1.0 + em.value(i).norm());
        }
        result.levels.push_back(lvl);
    }
    return result;
}

}  // namespace rfde
