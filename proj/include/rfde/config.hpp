#pragma once

#include <memory>
#include <string>

#include "json.hpp"
#include "rfde/stochastic.hpp"

namespace rfde {

struct FieldSpec {
    std::string name = "tanh-saturating";
    double amp = 1.0;
    double scale = 1.0;
};

struct EtaSpec {
    std::string kind = "constant";  // constant | affine (value + slope * t)
    double value = 0.25;
    double slope = 0.0;
    double floor_eps = 1e-6;

    double operator()(double t) const { return kind == "affine" ? value + slope * t : value; }
};

struct CoefficientConfig {
    std::string klass = "vector_field";  // vector_field | controlled | discrete_time |
                                         // constant_delay | variable_delay
    FieldSpec field;
    std::vector<double> stop_times;  // discrete_time
    EtaSpec eta;                     // variable_delay
    Vec history;                     // constant history for delay classes (defaults to y0)
    Vec alpha0;                      // constant control for the controlled class
};

struct StabilityConfig {
    std::string target = "y0";  // y0 | field | driver
    std::vector<double> scales{1e-1, 1e-2, 1e-3, 1e-4};
    double norm_bound = 100.0;
    std::vector<std::uint64_t> seeds{1};
};

struct DriverConfig {
    std::string kind = "brownian";  // brownian | compensated_poisson | engineered_jumps | smooth_linear
    DriverSpec spec;
    Vec slope;  // smooth_linear
};

struct ExperimentConfig {
    DriverConfig driver;
    CoefficientConfig coefficient;
    Vec y0 = Vec::Ones(1);
    SolverConfig solver;
    int refinements = 3;
    StabilityConfig stability;
};

/// Parse and validate; unknown keys or out-of-range values throw
/// std::invalid_argument.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig read_config(const std::string& file);

/// An assembled problem: driver lift, initial condition, coefficient
/// functional, and the underlying sampled driver (with history) when one
/// exists.
struct Problem {
    std::shared_ptr<const RoughPath> rp;
    std::shared_ptr<const ControlledPath> y;
    CoefficientPtr cf;
    std::shared_ptr<const SampledPath> z;
};

/// Build the problem named by the config. `z_override` substitutes the
/// sampled driver (used for driver perturbations); it must match the grid
/// the config would generate.
Problem build_problem(const ExperimentConfig& cfg, const SampledPath* z_override = nullptr);

/// ||f - g||_{C^2}-style difference constant for two registry fields that
/// differ only in amplitude.
double field_difference_constant(const FieldSpec& a, const FieldSpec& b, int m, int k, int d);

struct StabilityRow {
    std::string target;
    double scale = 0.0;
    std::uint64_t seed = 0;
    double difference_constant = 0.0;
    StabilityResult result;
};

/// One perturbation instance: solve the base problem and the perturbed one
/// and report the input/output distances of the solution map.
StabilityRow run_stability_case(const ExperimentConfig& base, const std::string& target, double scale,
                                std::uint64_t seed);

}  // namespace rfde
