#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "graphlasso/graph.hpp"
#include "graphlasso/solvers.hpp"
#include "graphlasso/spectral.hpp"

namespace graphlasso {

/// Random sparse spectral signal plus Gaussian coefficient noise.
struct SignalModel {
    double sparsity_fraction = 0.05;
    double amplitude_low = -1.0;
    double amplitude_high = 1.0;
    double noise_sigma = 0.1;
    std::uint64_t seed = 1;

    void validate() const;
    /// Copy with the seed of trial `trial` derived from this seed.
    SignalModel for_trial(int trial) const;
};

/// Exactly round(sparsity_fraction * n) nonzeros on a uniformly drawn support,
/// values uniform on [amplitude_low, amplitude_high]. Throws InvalidArgument
/// when that count is 0.
Eigen::VectorXd generate_sparse_signal(const SignalModel& model, Eigen::Index n);

/// f0 = U (x0 + eps), eps ~ N(0, sigma^2) i.i.d., drawn from a stream that is
/// independent of the one used by generate_sparse_signal.
Eigen::VectorXd synthesize_measurements(const Eigen::VectorXd& x0, const FourierBasis& basis,
                                        const SignalModel& model);

struct MaskedMeasurements {
    Eigen::VectorXd measurements;  // zero where unobserved
    Eigen::VectorXd mask;          // 1 = observed
};

/// Removes exactly round(fraction * n) uniformly chosen measurements.
MaskedMeasurements apply_mask(const Eigen::VectorXd& f0, double fraction, std::uint64_t seed);

struct RecoveryError {
    double primary = 0.0;     // ||x - x0|| / ||x||
    double reference = 0.0;  // ||x - x0|| / ||x0||
};

/// Throws InvalidArgument when ||x|| or ||x0|| is zero.
RecoveryError recovery_error(const Eigen::VectorXd& x, const Eigen::VectorXd& x0);

/// 15 log-spaced values over [1e-2, 1e3].
std::vector<double> default_lambda_grid();
std::vector<double> log_grid(double low, double high, int points);

using GraphSource = std::variant<CommunityGraphConfig, std::filesystem::path>;

WeightedGraph resolve_graph(const GraphSource& source);

struct ExperimentConfig {
    GraphSource graph = CommunityGraphConfig{};
    SignalModel signal;
    std::vector<double> lambda_grid = default_lambda_grid();
    /// Fraction of measurements removed; 0 runs the plain Lasso problems.
    double mask_fraction = 0.0;
    int trials = 10;
    std::vector<Model> models{Model::Standard, Model::Ratio};
    SolverConfig solver;
    /// Worker threads for the sweep; 0 = hardware concurrency.
    int threads = 0;

    void validate() const;
};

struct CellResult {
    Model model = Model::Standard;
    double lambda = 0.0;
    int trial = 0;
    RecoveryError error;
    bool failed = false;
    std::string failure;
    bool converged = false;
    std::string stop_reason;
    int outer_iterations = 0;
    long inner_iterations = 0;
    double wall_seconds = 0.0;
};

struct LambdaSummary {
    double lambda = 0.0;
    /// +inf when any trial failed.
    double mean_error = 0.0;
    double mean_error_reference = 0.0;
    int failures = 0;
    double mean_wall_seconds = 0.0;
};

struct ModelSummary {
    Model model = Model::Standard;
    std::vector<LambdaSummary> per_lambda;
    std::size_t best_index = 0;  // argmin of mean_error, first on ties
    double mean_wall_seconds = 0.0;

    const LambdaSummary& best() const { return per_lambda.at(best_index); }
};

/// Trial-0 solve at a model's best lambda, kept for plotting.
struct Exemplar {
    Model model = Model::Standard;
    double lambda = 0.0;
    Eigen::VectorXd truth;
    SolveResult result;
};

struct ExperimentReport {
    std::vector<CellResult> cells;  // model-major, then lambda, then trial
    std::vector<ModelSummary> summaries;
    /// Mean ratio-solver wall time over mean standard-solver wall time.
    std::optional<double> runtime_ratio;
    Eigen::VectorXd spectrum;
    std::vector<Exemplar> exemplars;
    double mask_fraction = 0.0;
    int trials = 0;

    const ModelSummary* summary(Model model) const;
};

/// Runs every (model, lambda, trial) cell. Solver failures are recorded in the
/// cell and never abort the sweep. Results do not depend on `threads`.
ExperimentReport run_benchmark(const ExperimentConfig& config);

/// Writes report.csv (cells), summary.csv (per-lambda means), report.json and
/// timing.csv into `directory`. Everything except timing.csv is a
/// deterministic function of the config.
void emit_report(const ExperimentReport& report, const std::filesystem::path& directory);

/// Writes spectrum.svg, recovery_<model>.svg and energy_<model>.svg (the last
/// only for a non-empty trace). Returns the written paths.
std::vector<std::filesystem::path> emit_plots(const ExperimentReport& report,
                                              const std::filesystem::path& directory);

}  // namespace graphlasso
