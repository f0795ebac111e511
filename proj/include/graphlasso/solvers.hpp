#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphlasso/spectral.hpp"

namespace graphlasso {

/// Sparse recovery problem in the graph Fourier domain:
///
///     min_x  S(x) + (lambda/2) ||R U x - f0||^2
///
/// where S is ||x||_1 (standard Lasso) or ||x||_1/||x||_2 (ratio model), U the
/// Fourier basis and R the diagonal 0/1 observation mask (identity when no mask
/// is given). Measurements at unobserved nodes are stored as zero, so R f0 = f0.
class RecoveryProblem {
public:
    RecoveryProblem(FourierBasisPtr basis, Eigen::VectorXd measurements, double fidelity_weight,
                    std::optional<Eigen::VectorXd> mask = std::nullopt);

    const FourierBasis& basis() const noexcept { return *basis_; }
    const FourierBasisPtr& basis_ptr() const noexcept { return basis_; }
    Eigen::Index size() const noexcept { return measurements_.size(); }

    bool has_mask() const noexcept { return mask_.has_value(); }
    const std::optional<Eigen::VectorXd>& mask() const noexcept { return mask_; }
    const Eigen::VectorXd& measurements() const noexcept { return measurements_; }
    double fidelity_weight() const noexcept { return fidelity_weight_; }

    /// U^T R f0, the back-projected measurements.
    const Eigen::VectorXd& spectral_measurements() const noexcept { return spectral_measurements_; }

    /// R U x - f0.
    Eigen::VectorXd residual(const Eigen::VectorXd& x) const;

    /// Same data and basis with another lambda.
    RecoveryProblem with_fidelity_weight(double fidelity_weight) const;

private:
    FourierBasisPtr basis_;
    Eigen::VectorXd measurements_;
    double fidelity_weight_;
    std::optional<Eigen::VectorXd> mask_;
    Eigen::VectorXd spectral_measurements_;
};

struct EnergyBreakdown {
    double l1 = 0.0;        // T(x) = ||x||_1
    double l2 = 0.0;        // B(x) = ||x||_2
    double ratio = 0.0;     // E(x) = T/B
    double fidelity = 0.0;  // F(x) = (lambda/2)||R U x - f0||^2
    double total = 0.0;     // E + F
};

/// Throws ZeroVectorError when x == 0.
EnergyBreakdown energy(const Eigen::VectorXd& x, const RecoveryProblem& problem);

/// ||x||_1 / ||x||_2. Throws ZeroVectorError when x == 0.
double l1_l2_ratio(const Eigen::VectorXd& x);

/// Outer-loop state of the ratio solver.
struct OuterIterate {
    Eigen::VectorXd x;
    EnergyBreakdown energy;
    double time_step = 1.0;   // tau^k
    Eigen::VectorXd target;   // y^k, filled by forward_step

    /// tau E / B, the length of the explicit step along x/||x||.
    double forward_coefficient() const { return time_step * energy.ratio / energy.l2; }
    /// tau / B, the weight of ||x||_1 in the implicit step.
    double prox_coefficient() const { return time_step / energy.l2; }
};

/// Evaluates the energy at x and sets target = x (forward_step not yet run).
OuterIterate make_outer_iterate(Eigen::VectorXd x, const RecoveryProblem& problem,
                                double time_step);

/// y = x + (tau E / B) x / ||x||_2.
Eigen::VectorXd forward_step(const OuterIterate& iterate);

/// Weight that multiplies the smooth terms of the ratio model's implicit step.
///
/// L2Norm solves x^{k+1} = prox_{(tau/B) T + tau F}(y^k), for which every exact
/// implicit step satisfies the quasi-monotonicity inequality. Ratio uses E^k in
/// place of B^k; the inequality then holds only when E^k is close to B^k.
enum class ProxWeighting { L2Norm, Ratio };

/// Smooth part G(x) = (data_weight/2)||R U x - f0||^2 + (anchor_weight/2)||x - anchor||^2
/// of the inner saddle-point problem.
struct SmoothTerm {
    double data_weight = 0.0;
    double anchor_weight = 0.0;
    Eigen::VectorXd anchor;

    /// Ratio model: data_weight = s lambda, anchor_weight = s / tau, anchor = y,
    /// with s = B^k (L2Norm) or E^k (Ratio).
    static SmoothTerm for_ratio(const OuterIterate& iterate, const RecoveryProblem& problem,
                                ProxWeighting weighting = ProxWeighting::L2Norm);
    /// Standard Lasso: data_weight = lambda, no anchor.
    static SmoothTerm for_standard(const RecoveryProblem& problem);
};

/// Entrywise z_i / max(1, |z_i|): projection onto the l-infinity unit ball,
/// i.e. the prox of the conjugate of ||.||_1.
Eigen::VectorXd prox_linf_ball(const Eigen::VectorXd& z);

/// argmin_x step * G(x) + 1/2 ||x - z||^2 without a mask (needs U^T U = I).
Eigen::VectorXd prox_quadratic_full(const Eigen::VectorXd& z, const SmoothTerm& term, double step,
                                    const RecoveryProblem& problem);
Eigen::VectorXd prox_quadratic_full(const Eigen::VectorXd& z, const OuterIterate& iterate,
                                    double step, const RecoveryProblem& problem,
                                    ProxWeighting weighting = ProxWeighting::L2Norm);

/// Masked variant, solved as a diagonal system in the node domain.
Eigen::VectorXd prox_quadratic_masked(const Eigen::VectorXd& z, const SmoothTerm& term,
                                      double step, const RecoveryProblem& problem);
Eigen::VectorXd prox_quadratic_masked(const Eigen::VectorXd& z, const OuterIterate& iterate,
                                      double step, const RecoveryProblem& problem,
                                      ProxWeighting weighting = ProxWeighting::L2Norm);

/// Dispatches on problem.has_mask().
Eigen::VectorXd prox_quadratic(const Eigen::VectorXd& z, const SmoothTerm& term, double step,
                               const RecoveryProblem& problem);

/// Round-off allowance for the monotonicity test.
inline constexpr double kMonotonicitySlack = 1e-12;

struct MonotonicityCheck {
    bool satisfied = false;
    double gap = 0.0;
};

/// Evaluates
///
///     (B_n/B_k)(E_k - E_n) + (F_k - F_n) - ||x_k - x_n||^2 / tau_k
///
/// for candidate x_n; satisfied when the gap is >= -kMonotonicitySlack.
MonotonicityCheck check_monotonicity(const OuterIterate& previous,
                                     const Eigen::VectorXd& candidate,
                                     const RecoveryProblem& problem);

struct SolverConfig;

/// Accelerated primal-dual state for min_x ||x||_1 + G(x).
struct InnerState {
    Eigen::VectorXd primal;        // x^n
    Eigen::VectorXd dual;          // p^n
    Eigen::VectorXd extrapolated;  // xbar^n
    double primal_step = 1.0;      // eta^n
    double dual_step = 1.0;        // sigma^n
    double acceleration = 1.0;     // theta^n
    double convexity_modulus = 1.0;  // gamma

    /// x = xbar = start, p = 0, steps from the config.
    static InnerState cold_start(const Eigen::VectorXd& start, const SolverConfig& config);
};

/// One iteration:
///   p    <- prox_linf_ball(p + sigma xbar)
///   x    <- prox_{eta G}(x - eta p)
///   theta = 1/sqrt(1 + 2 gamma eta), eta <- theta eta, sigma <- sigma / theta
///   xbar <- x + theta (x - x_old)
InnerState inner_primal_dual_step(const InnerState& state, const SmoothTerm& term,
                                  const RecoveryProblem& problem);
InnerState inner_primal_dual_step(const InnerState& state, const OuterIterate& iterate,
                                  const RecoveryProblem& problem,
                                  ProxWeighting weighting = ProxWeighting::L2Norm);

/// How tau^k is chosen at each outer step.
struct TimeStepRule {
    enum class Kind { L2Norm, Constant };
    Kind kind = Kind::L2Norm;  // tau^k = B^k
    double value = 1.0;        // used by Kind::Constant
};

struct SolverConfig {
    int max_outer = 100;
    int max_inner = 200;
    /// Inner iterations before the monotonicity test may accept a candidate.
    int min_inner = 5;
    /// Relative change of the total energy that ends the outer loop.
    double outer_tolerance = 1e-6;
    /// Standard Lasso: max-norm change of x that ends the primal-dual loop.
    double inner_tolerance = 1e-10;
    /// Iteration cap of the standard Lasso primal-dual loop.
    int max_standard_iterations = 20000;
    /// Convexity modulus of the ratio solver's accelerated inner loop. The
    /// standard Lasso loop runs with constant steps (gamma = 0).
    double gamma = 1.0;
    double initial_dual_step = 1.0;
    double initial_primal_step = 1.0;
    TimeStepRule time_step;
    ProxWeighting prox_weighting = ProxWeighting::L2Norm;
    /// Store the iterate behind every trace row in SolveResult::iterates.
    bool keep_iterates = false;

    void validate() const;
};

enum class StopReason {
    EnergyConverged,     // ratio: relative energy change below tolerance
    IterateConverged,    // standard: primal change below tolerance
    MaxOuter,
    MaxIterations,
    MonotonicityStalled, // ratio: no inner iterate passed the monotonicity test
};

std::string to_string(StopReason reason);

struct TraceRow {
    int outer = 0;
    double sparsity = 0.0;  // E for the ratio model, ||x||_1 for the standard one
    double fidelity = 0.0;
    double total = 0.0;
    int inner_iterations = 0;
    double gap = 0.0;       // monotonicity gap of the transition into this row
    double l2 = 0.0;        // ||x||_2 of the logged iterate
};

struct SolveResult {
    Eigen::VectorXd solution;
    std::vector<TraceRow> trace;
    std::vector<Eigen::VectorXd> iterates;  // parallel to trace when keep_iterates is set
    bool converged = false;
    StopReason stop_reason = StopReason::MaxOuter;
    int outer_iterations = 0;
    long total_inner_iterations = 0;
    std::chrono::duration<double> wall_time{0.0};
};

/// min ||x||_1 + (lambda/2)||U x - f0||^2. Requires no mask.
SolveResult solve_standard_lasso(const RecoveryProblem& problem, const SolverConfig& config);
/// min ||x||_1/||x||_2 + (lambda/2)||U x - f0||^2. Requires no mask.
SolveResult solve_ratio_lasso(const RecoveryProblem& problem, const SolverConfig& config);
/// Masked counterparts. Require a mask.
SolveResult solve_standard_inpainting(const RecoveryProblem& problem, const SolverConfig& config);
SolveResult solve_ratio_inpainting(const RecoveryProblem& problem, const SolverConfig& config);

enum class Model { Standard, Ratio };
std::string to_string(Model model);
Model parse_model(const std::string& name);

/// Picks the Lasso or inpainting solver from problem.has_mask().
SolveResult solve(Model model, const RecoveryProblem& problem, const SolverConfig& config);

/// "k,E,F,total,inner_iters,gap" rows.
void write_trace_csv(const SolveResult& result, std::ostream& out);
void save_trace_csv(const SolveResult& result, const std::filesystem::path& path);

}  // namespace graphlasso
