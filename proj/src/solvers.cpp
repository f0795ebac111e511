#include "graphlasso/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "graphlasso/error.hpp"

namespace graphlasso {

// ---------------------------------------------------------------------------
// Problem

RecoveryProblem::RecoveryProblem(FourierBasisPtr basis, Eigen::VectorXd measurements,
                                 double fidelity_weight, std::optional<Eigen::VectorXd> mask)
    : basis_(std::move(basis)),
      measurements_(std::move(measurements)),
      fidelity_weight_(fidelity_weight),
      mask_(std::move(mask)) {
    if (!basis_) throw InvalidArgument("recovery problem needs a Fourier basis");
    if (measurements_.size() != basis_->size()) {
        throw InvalidArgument("measurements and basis have different sizes");
    }
    if (!(fidelity_weight_ > 0.0) || !std::isfinite(fidelity_weight_)) {
        throw InvalidArgument("fidelity weight lambda must be positive and finite");
    }
    if (mask_) {
        if (mask_->size() != measurements_.size()) {
            throw InvalidArgument("mask and measurements have different sizes");
        }
        for (Eigen::Index i = 0; i < mask_->size(); ++i) {
            const double m = (*mask_)[i];
            if (m != 0.0 && m != 1.0) throw InvalidArgument("mask entries must be 0 or 1");
        }
        measurements_ = measurements_.cwiseProduct(*mask_);
    }
    spectral_measurements_ = basis_->forward(measurements_);
}

Eigen::VectorXd RecoveryProblem::residual(const Eigen::VectorXd& x) const {
    if (x.size() != size()) throw InvalidArgument("residual: dimension mismatch");
    Eigen::VectorXd node = basis_->inverse(x);
    if (mask_) node = node.cwiseProduct(*mask_);
    return node - measurements_;
}

RecoveryProblem RecoveryProblem::with_fidelity_weight(double fidelity_weight) const {
    RecoveryProblem copy = *this;
    if (!(fidelity_weight > 0.0) || !std::isfinite(fidelity_weight)) {
        throw InvalidArgument("fidelity weight lambda must be positive and finite");
    }
    copy.fidelity_weight_ = fidelity_weight;
    return copy;
}

// ---------------------------------------------------------------------------
// Energies

namespace {

double fidelity_of(const Eigen::VectorXd& x, const RecoveryProblem& problem) {
    return 0.5 * problem.fidelity_weight() * problem.residual(x).squaredNorm();
}

}  // namespace

double l1_l2_ratio(const Eigen::VectorXd& x) {
    const double l2 = x.norm();
    if (l2 == 0.0) throw ZeroVectorError("l1/l2 ratio is undefined at x = 0");
    return x.lpNorm<1>() / l2;
}

EnergyBreakdown energy(const Eigen::VectorXd& x, const RecoveryProblem& problem) {
    EnergyBreakdown e;
    e.l2 = x.norm();
    if (e.l2 == 0.0) throw ZeroVectorError("energy is undefined at x = 0");
    e.l1 = x.lpNorm<1>();
    e.ratio = e.l1 / e.l2;
    e.fidelity = fidelity_of(x, problem);
    e.total = e.ratio + e.fidelity;
    return e;
}

OuterIterate make_outer_iterate(Eigen::VectorXd x, const RecoveryProblem& problem,
                                double time_step) {
    if (!(time_step > 0.0)) throw InvalidArgument("time step must be positive");
    OuterIterate it;
    it.energy = energy(x, problem);
    it.time_step = time_step;
    it.target = x;
    it.x = std::move(x);
    return it;
}

Eigen::VectorXd forward_step(const OuterIterate& iterate) {
    const double norm = iterate.x.norm();
    if (norm == 0.0) throw ZeroVectorError("forward step needs a nonzero iterate");
    return iterate.x + iterate.forward_coefficient() * (iterate.x / norm);
}

// ---------------------------------------------------------------------------
// Proximal maps

SmoothTerm SmoothTerm::for_ratio(const OuterIterate& iterate, const RecoveryProblem& problem,
                                 ProxWeighting weighting) {
    // x^{k+1} = prox_{c1 T + tau F}(y) with c1 = tau/B, rescaled so that ||x||_1
    // has unit weight: data weight lambda tau/c1, anchor weight 1/c1.
    const double scale = weighting == ProxWeighting::L2Norm ? iterate.energy.l2
                                                            : iterate.energy.ratio;
    SmoothTerm term;
    term.data_weight = scale * problem.fidelity_weight();
    term.anchor_weight = scale / iterate.time_step;
    term.anchor = iterate.target;
    return term;
}

SmoothTerm SmoothTerm::for_standard(const RecoveryProblem& problem) {
    SmoothTerm term;
    term.data_weight = problem.fidelity_weight();
    return term;
}

Eigen::VectorXd prox_linf_ball(const Eigen::VectorXd& z) {
    return z.unaryExpr([](double v) { return v / std::max(1.0, std::abs(v)); });
}

namespace {

void check_prox_inputs(const Eigen::VectorXd& z, const SmoothTerm& term, double step,
                       const RecoveryProblem& problem) {
    if (!(step > 0.0)) throw InvalidArgument("prox step must be positive");
    if (z.size() != problem.size()) throw InvalidArgument("prox: dimension mismatch");
    if (term.anchor_weight != 0.0 && term.anchor.size() != problem.size()) {
        throw InvalidArgument("prox: anchor has the wrong dimension");
    }
}

// z + step (data_weight U^T R f0 + anchor_weight y)
Eigen::VectorXd prox_numerator(const Eigen::VectorXd& z, const SmoothTerm& term, double step,
                               const RecoveryProblem& problem) {
    Eigen::VectorXd b = z + (step * term.data_weight) * problem.spectral_measurements();
    if (term.anchor_weight != 0.0) b += (step * term.anchor_weight) * term.anchor;
    return b;
}

}  // namespace

Eigen::VectorXd prox_quadratic_full(const Eigen::VectorXd& z, const SmoothTerm& term, double step,
                                    const RecoveryProblem& problem) {
    if (problem.has_mask()) throw InvalidArgument("masked problem: use prox_quadratic_masked");
    check_prox_inputs(z, term, step, problem);
    const double denominator = 1.0 + step * term.data_weight + step * term.anchor_weight;
    return prox_numerator(z, term, step, problem) / denominator;
}

Eigen::VectorXd prox_quadratic_full(const Eigen::VectorXd& z, const OuterIterate& iterate,
                                    double step, const RecoveryProblem& problem,
                                    ProxWeighting weighting) {
    return prox_quadratic_full(z, SmoothTerm::for_ratio(iterate, problem, weighting), step,
                               problem);
}

Eigen::VectorXd prox_quadratic_masked(const Eigen::VectorXd& z, const SmoothTerm& term,
                                      double step, const RecoveryProblem& problem) {
    if (!problem.has_mask()) throw InvalidArgument("unmasked problem: use prox_quadratic_full");
    check_prox_inputs(z, term, step, problem);
    // (I + step*data*U^T R U + step*anchor*I) x = b is diagonal after x = U^T u.
    const Eigen::VectorXd& mask = *problem.mask();
    const Eigen::ArrayXd diagonal =
        (1.0 + step * term.anchor_weight) + (step * term.data_weight) * mask.array();
    const Eigen::VectorXd node = problem.basis().inverse(prox_numerator(z, term, step, problem));
    return problem.basis().forward((node.array() / diagonal).matrix());
}

Eigen::VectorXd prox_quadratic_masked(const Eigen::VectorXd& z, const OuterIterate& iterate,
                                      double step, const RecoveryProblem& problem,
                                      ProxWeighting weighting) {
    return prox_quadratic_masked(z, SmoothTerm::for_ratio(iterate, problem, weighting), step,
                                 problem);
}

Eigen::VectorXd prox_quadratic(const Eigen::VectorXd& z, const SmoothTerm& term, double step,
                               const RecoveryProblem& problem) {
    return problem.has_mask() ? prox_quadratic_masked(z, term, step, problem)
                              : prox_quadratic_full(z, term, step, problem);
}

// ---------------------------------------------------------------------------
// Monotonicity

MonotonicityCheck check_monotonicity(const OuterIterate& previous,
                                     const Eigen::VectorXd& candidate,
                                     const RecoveryProblem& problem) {
    const EnergyBreakdown next = energy(candidate, problem);
    const EnergyBreakdown& prev = previous.energy;
    const double lhs = (next.l2 / prev.l2) * (prev.ratio - next.ratio) +
                       (prev.fidelity - next.fidelity);
    const double rhs = (previous.x - candidate).squaredNorm() / previous.time_step;
    MonotonicityCheck check;
    check.gap = lhs - rhs;
    check.satisfied = check.gap >= -kMonotonicitySlack;
    return check;
}

// ---------------------------------------------------------------------------
// Primal-dual iteration

void SolverConfig::validate() const {
    if (max_outer < 1 || max_inner < 1 || max_standard_iterations < 1) {
        throw InvalidArgument("iteration limits must be positive");
    }
    if (min_inner < 1 || min_inner > max_inner) {
        throw InvalidArgument("min_inner must lie in [1, max_inner]");
    }
    if (!(outer_tolerance > 0.0) || !(inner_tolerance > 0.0)) {
        throw InvalidArgument("tolerances must be positive");
    }
    if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be non-negative");
    if (!(initial_dual_step > 0.0) || !(initial_primal_step > 0.0)) {
        throw InvalidArgument("initial steps must be positive");
    }
    if (initial_dual_step * initial_primal_step > 1.0) {
        throw InvalidArgument("initial steps must satisfy sigma * eta <= 1");
    }
    if (time_step.kind == TimeStepRule::Kind::Constant && !(time_step.value > 0.0)) {
        throw InvalidArgument("constant time step must be positive");
    }
}

InnerState InnerState::cold_start(const Eigen::VectorXd& start, const SolverConfig& config) {
    InnerState s;
    s.primal = start;
    s.dual = Eigen::VectorXd::Zero(start.size());
    s.extrapolated = start;
    s.primal_step = config.initial_primal_step;
    s.dual_step = config.initial_dual_step;
    s.acceleration = 1.0;
    s.convexity_modulus = config.gamma;
    return s;
}

InnerState inner_primal_dual_step(const InnerState& state, const SmoothTerm& term,
                                  const RecoveryProblem& problem) {
    InnerState next;
    next.convexity_modulus = state.convexity_modulus;
    next.dual = prox_linf_ball(state.dual + state.dual_step * state.extrapolated);
    next.primal = prox_quadratic(state.primal - state.primal_step * next.dual, term,
                                 state.primal_step, problem);
    next.acceleration = 1.0 / std::sqrt(1.0 + 2.0 * state.convexity_modulus * state.primal_step);
    next.primal_step = next.acceleration * state.primal_step;
    next.dual_step = state.dual_step / next.acceleration;
    next.extrapolated = next.primal + next.acceleration * (next.primal - state.primal);
    return next;
}

InnerState inner_primal_dual_step(const InnerState& state, const OuterIterate& iterate,
                                  const RecoveryProblem& problem, ProxWeighting weighting) {
    return inner_primal_dual_step(state, SmoothTerm::for_ratio(iterate, problem, weighting),
                                  problem);
}

// ---------------------------------------------------------------------------
// Solvers

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::EnergyConverged: return "energy_converged";
        case StopReason::IterateConverged: return "iterate_converged";
        case StopReason::MaxOuter: return "max_outer";
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::MonotonicityStalled: return "monotonicity_stalled";
    }
    return "unknown";
}

std::string to_string(Model model) { return model == Model::Standard ? "l1" : "l1l2"; }

Model parse_model(const std::string& name) {
    if (name == "l1" || name == "standard") return Model::Standard;
    if (name == "l1l2" || name == "ratio") return Model::Ratio;
    throw InvalidArgument("unknown model '" + name + "' (expected l1 or l1l2)");
}

namespace {

using Clock = std::chrono::steady_clock;

TraceRow standard_row(int index, const Eigen::VectorXd& x, const RecoveryProblem& problem,
                      int inner) {
    TraceRow row;
    row.outer = index;
    row.sparsity = x.lpNorm<1>();
    row.fidelity = fidelity_of(x, problem);
    row.total = row.sparsity + row.fidelity;
    row.inner_iterations = inner;
    row.l2 = x.norm();
    return row;
}

// Rows are logged every kStandardTraceStride iterations plus the final one.
constexpr int kStandardTraceStride = 100;

SolveResult run_standard(const RecoveryProblem& problem, const SolverConfig& config) {
    config.validate();
    const auto started = Clock::now();
    const SmoothTerm term = SmoothTerm::for_standard(problem);

    SolveResult result;
    InnerState state = InnerState::cold_start(problem.spectral_measurements(), config);
    // Constant steps: once the dual settles, shrinking eta would slow the
    // primal contraction to O(1/n).
    state.convexity_modulus = 0.0;
    result.trace.push_back(standard_row(0, state.primal, problem, 0));
    if (config.keep_iterates) result.iterates.push_back(state.primal);
    result.stop_reason = StopReason::MaxIterations;
    int since_logged = 0;
    for (int n = 1; n <= config.max_standard_iterations; ++n) {
        InnerState next = inner_primal_dual_step(state, term, problem);
        const double change = (next.primal - state.primal).lpNorm<Eigen::Infinity>();
        state = std::move(next);
        result.total_inner_iterations = n;
        ++since_logged;
        const bool done = change <= config.inner_tolerance;
        if (done || since_logged == kStandardTraceStride || n == config.max_standard_iterations) {
            result.trace.push_back(standard_row(n, state.primal, problem, since_logged));
            if (config.keep_iterates) result.iterates.push_back(state.primal);
            since_logged = 0;
        }
        if (done) {
            result.converged = true;
            result.stop_reason = StopReason::IterateConverged;
            break;
        }
    }
    result.outer_iterations = 1;
    result.solution = std::move(state.primal);
    result.wall_time = Clock::now() - started;
    return result;
}

double outer_time_step(const SolverConfig& config, const EnergyBreakdown& e) {
    return config.time_step.kind == TimeStepRule::Kind::L2Norm ? e.l2 : config.time_step.value;
}

SolveResult run_ratio(const RecoveryProblem& problem, const SolverConfig& config) {
    config.validate();
    const auto started = Clock::now();
    if (problem.spectral_measurements().norm() == 0.0) {
        throw ZeroVectorError("ratio solver needs a nonzero initializer U^T f0");
    }

    SolveResult result;
    Eigen::VectorXd x = problem.spectral_measurements();
    EnergyBreakdown current = energy(x, problem);
    result.trace.push_back({0, current.ratio, current.fidelity, current.total, 0, 0.0, current.l2});
    if (config.keep_iterates) result.iterates.push_back(x);
    result.stop_reason = StopReason::MaxOuter;

    for (int k = 1; k <= config.max_outer; ++k) {
        OuterIterate outer = make_outer_iterate(x, problem, outer_time_step(config, current));
        outer.target = forward_step(outer);
        const SmoothTerm term = SmoothTerm::for_ratio(outer, problem, config.prox_weighting);

        InnerState state = InnerState::cold_start(outer.x, config);
        std::optional<MonotonicityCheck> accepted;
        int used = 0;
        for (int n = 1; n <= config.max_inner; ++n) {
            state = inner_primal_dual_step(state, term, problem);
            used = n;
            if (n < config.min_inner) continue;
            const double moved = (state.primal - outer.x).norm();
            if (moved == 0.0 || state.primal.norm() == 0.0) continue;
            const MonotonicityCheck check = check_monotonicity(outer, state.primal, problem);
            if (check.satisfied) {
                accepted = check;
                break;
            }
        }
        result.total_inner_iterations += used;
        if (!accepted) {
            // Keep x^k: every logged transition satisfies the monotonicity test.
            result.stop_reason = StopReason::MonotonicityStalled;
            break;
        }

        x = std::move(state.primal);
        const EnergyBreakdown next = energy(x, problem);
        result.trace.push_back(
            {k, next.ratio, next.fidelity, next.total, used, accepted->gap, next.l2});
        if (config.keep_iterates) result.iterates.push_back(x);
        result.outer_iterations = k;
        const double change =
            std::abs(current.total - next.total) /
            std::max(std::abs(current.total), std::numeric_limits<double>::min());
        current = next;
        if (change < config.outer_tolerance) {
            result.converged = true;
            result.stop_reason = StopReason::EnergyConverged;
            break;
        }
    }
    result.solution = std::move(x);
    result.wall_time = Clock::now() - started;
    return result;
}

}  // namespace

SolveResult solve_standard_lasso(const RecoveryProblem& problem, const SolverConfig& config) {
    if (problem.has_mask()) throw InvalidArgument("masked problem: use solve_standard_inpainting");
    return run_standard(problem, config);
}

SolveResult solve_ratio_lasso(const RecoveryProblem& problem, const SolverConfig& config) {
    if (problem.has_mask()) throw InvalidArgument("masked problem: use solve_ratio_inpainting");
    return run_ratio(problem, config);
}

SolveResult solve_standard_inpainting(const RecoveryProblem& problem, const SolverConfig& config) {
    if (!problem.has_mask()) throw InvalidArgument("inpainting needs an observation mask");
    return run_standard(problem, config);
}

SolveResult solve_ratio_inpainting(const RecoveryProblem& problem, const SolverConfig& config) {
    if (!problem.has_mask()) throw InvalidArgument("inpainting needs an observation mask");
    return run_ratio(problem, config);
}

SolveResult solve(Model model, const RecoveryProblem& problem, const SolverConfig& config) {
    if (model == Model::Standard) {
        return problem.has_mask() ? solve_standard_inpainting(problem, config)
                                  : solve_standard_lasso(problem, config);
    }
    return problem.has_mask() ? solve_ratio_inpainting(problem, config)
                              : solve_ratio_lasso(problem, config);
}

void write_trace_csv(const SolveResult& result, std::ostream& out) {
    out << "k,E,F,total,inner_iters,gap\n"
        << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const TraceRow& r : result.trace) {
        out << r.outer << ',' << r.sparsity << ',' << r.fidelity << ',' << r.total << ','
            << r.inner_iterations << ',' << r.gap << '\n';
    }
}

void save_trace_csv(const SolveResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_trace_csv(result, out);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace graphlasso
