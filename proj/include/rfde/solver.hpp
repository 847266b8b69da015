#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rfde/coefficients.hpp"
#include "rfde/integrate.hpp"
#include "rfde/variation.hpp"

namespace rfde {

struct SolverConfig {
    double p = 2.5;
    /// Control threshold for the interval partition. Non-positive means
    /// adaptive: start at 1 and halve until the first piece's Picard
    /// iteration contracts with ratio <= contraction_guard.
    double gamma = 0.0;
    /// Weight of the remainder term in the iteration norm. Non-positive
    /// means auto: max(1, piece driver norm^{-1/2}), capped.
    double delta = 0.0;
    int max_picard_iters = 200;
    double picard_tol = 1e-13;
    double contraction_guard = 0.5;
    int max_gamma_halvings = 40;
};

struct PieceDiagnostics {
    std::size_t begin = 0;  ///< first grid index of the piece
    std::size_t end = 0;    ///< last grid index solved by Picard (right endpoint excluded)
    int iterations = 0;
    double delta = 1.0;
    std::vector<double> contraction_ratios;
};

struct SolutionReport {
    ControlledPath solution;
    std::vector<std::size_t> partition;  ///< tau indices, first 0, last N
    std::vector<PieceDiagnostics> pieces;
    double gamma = 0.0;
    int gamma_halvings = 0;
    double apriori_norm = 0.0;  ///< ||Y, Y'||_{X,p} of the solution
    double residual = 0.0;      ///< max discrete-recursion defect
};

class SolverNonContraction : public std::runtime_error {
public:
    SolverNonContraction(std::string what, std::vector<PieceDiagnostics> pieces)
        : std::runtime_error(std::move(what)), diagnostics(std::move(pieces)) {}
    std::vector<PieceDiagnostics> diagnostics;
};

/// Solve Y = y + int F(Y) dX on the grid: partition [0, T] where the control
/// function w(s,t) = ||X||^p + ||XX||^{p/2} stays below gamma, run a Picard
/// iteration of (Y, Y') -> (y + int F(Y) dX, y' + F(Y)) on each piece under
/// the delta-weighted norm, and push across each piece boundary with the
/// exact one-cell step (the jump adjustment). The returned path satisfies
/// Y' = y' + F(Y) exactly and the discrete recursion
///   Y_{k+1} = Y_k + y_{k,k+1} + F_k(Y) X_{k,k+1} + F'_k(Y,Y') XX_k
/// up to the reported residual.
SolutionReport solve_rfde(const RoughPath& rp, const ControlledPath& y, const CoefficientFunctional& cf,
                          const SolverConfig& config = {});

/// One-pass left-to-right evaluation of the same discrete recursion
/// (well-defined because F is non-anticipative). Cross-checks the Picard
/// solver; the two must agree at grid resolution.
ControlledPath forward_recursion(const RoughPath& rp, const ControlledPath& y, const CoefficientFunctional& cf);

struct AprioriNorms {
    double solution_norm = 0.0;  ///< ||Y, Y'||_{X,p}
    double initial_norm = 0.0;   ///< ||y, y'||_{X,p}
    double growth_constant = 0.0;
    double driver_norm = 0.0;  ///< ||X||_p + ||XX||_{p/2}
};

AprioriNorms apriori_norms(const SolutionReport& report, const ControlledPath& y,
                           const CoefficientFunctional& cf, const RoughPath& rp, double p);

struct StabilityInput {
    const RoughPath* rp = nullptr;
    const ControlledPath* y = nullptr;
    const CoefficientFunctional* cf = nullptr;
};

struct StabilityResult {
    double input_distance = 0.0;
    double output_distance = 0.0;
    double ratio = 0.0;  ///< output / input, 0/0 counts as 0
    double norm_a = 0.0;
    double norm_b = 0.0;
    bool norm_bound_exceeded = false;  ///< a solution norm exceeded the declared bound
};

/// Solve both problems (which must share a grid) and compare the
/// solution-map displacement with the input displacement:
///   output = |Y_0 - Yt_0| + ||Y,Y';Yt,Yt'||,
///   input  = |y_0 - yt_0| + |F_0(y) - Ft_0(yt)| + ||y,y';yt,yt'||
///            + difference_constant + ||X bundle; Xt bundle||.
StabilityResult stability_experiment(const StabilityInput& a, const StabilityInput& b,
                                     double difference_constant, double p, double norm_bound,
                                     const SolverConfig& config = {});

}  // namespace rfde
