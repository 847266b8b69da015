#pragma once

#include <cstdint>
#include <functional>

#include "rfde/coefficients.hpp"
#include "rfde/rough_path.hpp"
#include "rfde/solver.hpp"

namespace rfde {

enum class DriverKind { brownian, compensated_poisson, engineered_jumps };

struct Jump {
    double time = 0.0;
    int component = 0;
    double size = 0.0;
};

/// Specification of a simulated cadlag martingale Z on [-r_ell, T], with
/// Z = 0 before time 0. Delays must be integer multiples of the base step;
/// jump times are inserted into the grid (together with their delayed
/// images) so jumps sit exactly on grid points.
struct DriverSpec {
    DriverKind kind = DriverKind::brownian;
    int dimension = 1;
    double horizon = 1.0;
    double step = 1.0 / 256.0;
    std::vector<double> delays;  // ascending, each a multiple of step
    Mat covariance;              // brownian; empty means identity
    double jump_rate = 0.0;      // compensated poisson
    double jump_size = 1.0;      // compensated poisson
    std::vector<Jump> jumps;     // engineered
    std::uint64_t seed = 0;

    double max_delay() const { return delays.empty() ? 0.0 : delays.back(); }
    void validate() const;  // throws std::invalid_argument
};

/// Sample Z on the extended grid covering [-r_ell, T] (base mesh plus jump
/// times and their delayed images), zero on [-r_ell, 0).
SampledPath simulate_driver(const DriverSpec& spec);

/// Deterministic driver slope * max(t, 0) on the extended grid of the spec.
SampledPath sample_smooth_driver(const DriverSpec& spec, const Vec& slope);

/// Jump-sum bracket of two scalar paths: [x, y]_t = sum of cell-increment
/// products up to t. Under the piecewise-constant embedding every cell
/// increment is a jump, so this is the full-grid increment-product sum.
SampledPath bracket(const SampledPath& xi, const SampledPath& xj);

/// Left-point partial sums of the bracket along the coarse partition taking
/// every `stride`-th grid point, evaluated at every grid time. Stride 1
/// reproduces bracket() exactly.
SampledPath bracket_partial_sum(const SampledPath& xi, const SampledPath& xj, std::size_t stride);

/// The stacked driver X = (Z, Z delayed by r_1, ..., Z delayed by r_ell) on
/// [0, T] together with its Ito-consistent level-2 lift. Per-cell level-2
/// increments vanish under the piecewise-constant embedding; all coarse-pair
/// structure arises through Chen reconstruction as left-point sums, which
/// matches the antisymmetry relation
///   XX^{ij} + XX^{ji} = X^i X^j - [X^i, X^j]
/// with the jump-sum bracket, in both index orders.
class StackedDriver {
public:
    StackedDriver(RoughPath rp, StackedShape shape);

    const RoughPath& rough_path() const { return rp_; }
    const StackedShape& shape() const { return shape_; }
    int base_dim() const { return shape_.base_dim; }

    /// Component index -> (base component, delay index).
    std::pair<int, int> block_of(int component) const;

    /// Scalar component path of the stacked level-1 path.
    SampledPath component(int base_component, int delay_index) const;

private:
    RoughPath rp_;
    StackedShape shape_;
};

StackedDriver delayed_lift(const SampledPath& z, std::vector<double> delays);

/// Stacked driver (Z, Z_{. - eta(.)}) for a variable delay, evaluation times
/// rounded down to the grid, zero cells.
RoughPath variable_delay_stack(const SampledPath& z, const std::function<double(double)>& eta);

/// Left-point Euler scheme for the delayed equation driven by Z:
///   Y_{k+1} = Y_k + f(Y_k, Y(t_k - r_1), ..., Y(t_k - r_ell)) Z_{k,k+1},
/// with Y read from `history` before time 0. Returns Y on the [0, T] grid.
SampledPath euler_maruyama_delay(const SampledPath& z, const VectorField& vf, const Vec& y0,
                                 const std::function<Vec(double)>& history, std::vector<double> delays);

struct CompareLevel {
    double step = 0.0;
    double sup_gap = 0.0;
    double scale = 0.0;  // 1 + sup |Y|
};

struct CompareResult {
    std::vector<CompareLevel> levels;  // coarsest first
};

/// Solve the delayed equation both ways on the same sample path: as a rough
/// equation against the delayed lift (field extended by zero to the stacked
/// driver) and with the left-point scheme, reporting the sup-norm gap per
/// mesh level. The base field maps the stacked state to L(R^e; R^k).
CompareResult rde_vs_sde_compare(const DriverSpec& spec, const VectorField& vf, const Vec& y0,
                                 const std::function<Vec(double)>& history, double p, int refinements,
                                 const SolverConfig& config = {});

}  // namespace rfde
