#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "graphlasso/error.hpp"
#include "graphlasso/solvers.hpp"
#include "test_support.hpp"

namespace graphlasso {
namespace {

using testing::community_basis;
using testing::numeric_gradient;
using testing::random_vector;
using testing::soft_threshold_oracle;

FourierBasisPtr scalar_basis() {
    return std::make_shared<const FourierBasis>(Eigen::MatrixXd::Ones(1, 1),
                                                Eigen::VectorXd::Zero(1));
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

Eigen::VectorXd unit(Eigen::Index n, Eigen::Index i, double scale = 1.0) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = scale;
    return e;
}

Eigen::VectorXd random_mask(Eigen::Index n, double zero_fraction, std::mt19937_64& rng) {
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(n);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto zeros = static_cast<std::size_t>(std::llround(zero_fraction * n));
    for (std::size_t i = 0; i < zeros; ++i) mask[idx[i]] = 0.0;
    return mask;
}

// ---------------------------------------------------------------------------

TEST(RecoveryProblemTest, Validation) {
    auto basis = community_basis(8, 1);
    const Eigen::VectorXd f0 = Eigen::VectorXd::Ones(8);
    EXPECT_THROW(RecoveryProblem(basis, f0, 0.0), InvalidArgument);
    EXPECT_THROW(RecoveryProblem(basis, Eigen::VectorXd::Ones(3), 1.0), InvalidArgument);
    Eigen::VectorXd bad = Eigen::VectorXd::Ones(8);
    bad[2] = 0.5;
    EXPECT_THROW(RecoveryProblem(basis, f0, 1.0, bad), InvalidArgument);
    EXPECT_THROW(RecoveryProblem(nullptr, f0, 1.0), InvalidArgument);
}

TEST(RecoveryProblemTest, UnobservedMeasurementsAreZeroed) {
    auto basis = community_basis(6, 2);
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(6);
    mask[1] = mask[4] = 0.0;
    const RecoveryProblem p(basis, Eigen::VectorXd::Constant(6, 2.0), 1.0, mask);
    EXPECT_EQ(p.measurements()[1], 0.0);
    EXPECT_EQ(p.measurements()[0], 2.0);
}

TEST(EnergyTest, Examples) {
    const auto basis = community_basis(5, 3);
    const Eigen::VectorXd x1 = unit(5, 0);
    const RecoveryProblem exact(basis, basis->inverse(x1), 2.0);
    const auto e1 = energy(x1, exact);
    EXPECT_DOUBLE_EQ(e1.l1, 1.0);
    EXPECT_DOUBLE_EQ(e1.l2, 1.0);
    EXPECT_DOUBLE_EQ(e1.ratio, 1.0);
    EXPECT_NEAR(e1.fidelity, 0.0, 1e-28);

    const auto e2 = energy(vec({3, 4, 0, 0, 0}), exact);
    EXPECT_DOUBLE_EQ(e2.l1, 7.0);
    EXPECT_DOUBLE_EQ(e2.l2, 5.0);
    EXPECT_DOUBLE_EQ(e2.ratio, 1.4);
    EXPECT_DOUBLE_EQ(e2.total, e2.ratio + e2.fidelity);

    EXPECT_THROW(energy(Eigen::VectorXd::Zero(5), exact), ZeroVectorError);
}

TEST(EnergyTest, MaskedFidelityIgnoresUnobservedNodes) {
    const auto basis = community_basis(6, 4);
    std::mt19937_64 rng(1);
    const Eigen::VectorXd x = random_vector(6, rng);
    Eigen::VectorXd f0 = basis->inverse(x);
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(6);
    mask[3] = 0.0;
    f0[3] += 10.0;  // unobserved, must not matter
    const RecoveryProblem p(basis, f0, 1.0, mask);
    EXPECT_NEAR(energy(x, p).fidelity, 0.0, 1e-24);
}

TEST(EnergyTest, ZeroHomogeneity) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::VectorXd x = random_vector(1 + trial % 40, rng);
        for (double alpha : {0.5, 2.0, 10.0}) {
            EXPECT_LE(std::abs(l1_l2_ratio(alpha * x) - l1_l2_ratio(x)), 1e-12);
        }
    }
}

TEST(EnergyTest, RatioBounds) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + trial % 30;
        const double r = l1_l2_ratio(random_vector(n, rng));
        EXPECT_GE(r, 1.0 - 1e-15);
        EXPECT_LE(r, std::sqrt(static_cast<double>(n)) + 1e-12);
    }
    // E == 1 exactly on 1-sparse vectors, and only there.
    for (Eigen::Index i = 0; i < 6; ++i) EXPECT_EQ(l1_l2_ratio(unit(6, i, -3.5)), 1.0);
    EXPECT_GT(l1_l2_ratio(vec({1, 1e-3, 0})), 1.0);
    EXPECT_DOUBLE_EQ(l1_l2_ratio(Eigen::VectorXd::Ones(9)), 3.0);
}

// ---------------------------------------------------------------------------

TEST(ProxLinfTest, Examples) {
    EXPECT_EQ(prox_linf_ball(vec({0.5})), vec({0.5}));
    EXPECT_EQ(prox_linf_ball(vec({2})), vec({1}));
    EXPECT_EQ(prox_linf_ball(vec({-3, 0.2})), vec({-1, 0.2}));
    std::mt19937_64 rng(2);
    const Eigen::VectorXd z = random_vector(50, rng, 3.0);
    EXPECT_LE(prox_linf_ball(z).lpNorm<Eigen::Infinity>(), 1.0);
}

OuterIterate scalar_iterate(double x, double time_step, double target,
                            const RecoveryProblem& p) {
    OuterIterate it = make_outer_iterate(vec({x}), p, time_step);
    it.target = vec({target});
    return it;
}

TEST(ProxQuadraticTest, ScalarClosedForm) {
    // (0 + 2 + 0) / (1 + 1 + 1) with E = B = lambda = eta = tau = 1, y = 0.
    const RecoveryProblem p(scalar_basis(), vec({2}), 1.0);
    const OuterIterate it = scalar_iterate(1.0, 1.0, 0.0, p);
    EXPECT_DOUBLE_EQ(prox_quadratic_full(vec({0}), it, 1.0, p)[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(prox_quadratic_full(vec({0}), it, 1.0, p, ProxWeighting::Ratio)[0],
                     2.0 / 3.0);
}

TEST(ProxQuadraticTest, NoDataTermAndAnchorAtZ) {
    const auto basis = community_basis(7, 8);
    std::mt19937_64 rng(8);
    const Eigen::VectorXd z = random_vector(7, rng);
    const RecoveryProblem p(basis, random_vector(7, rng), 1.0);
    const SmoothTerm term{0.0, 2.5, z};
    EXPECT_LE((prox_quadratic_full(z, term, 0.7, p) - z).norm(), 1e-14);
}

TEST(ProxQuadraticTest, DispatchErrors) {
    const auto basis = community_basis(5, 9);
    const Eigen::VectorXd f0 = Eigen::VectorXd::Ones(5);
    const RecoveryProblem full(basis, f0, 1.0);
    const RecoveryProblem masked(basis, f0, 1.0, Eigen::VectorXd::Ones(5));
    const SmoothTerm term{1.0, 0.0, {}};
    EXPECT_THROW(prox_quadratic_full(f0, term, 1.0, masked), InvalidArgument);
    EXPECT_THROW(prox_quadratic_masked(f0, term, 1.0, full), InvalidArgument);
    EXPECT_THROW(prox_quadratic_full(f0, term, 0.0, full), InvalidArgument);
    EXPECT_THROW(prox_quadratic_masked(f0, term, -1.0, masked), InvalidArgument);
}

// Objective  eta*G(x) + 1/2||x - z||^2  evaluated directly with U.
double prox_objective(const Eigen::VectorXd& x, const Eigen::VectorXd& z, const SmoothTerm& term,
                      double eta, const RecoveryProblem& p) {
    Eigen::VectorXd node = p.basis().modes() * x;
    if (p.has_mask()) node = node.cwiseProduct(*p.mask());
    const double data = 0.5 * term.data_weight * (node - p.measurements()).squaredNorm();
    const double anchor = 0.5 * term.anchor_weight * (x - term.anchor).squaredNorm();
    return eta * (data + anchor) + 0.5 * (x - z).squaredNorm();
}

TEST(ProxQuadraticTest, StationarityOracle) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> positive(0.1, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = 2 + trial % 15;
        const auto basis = community_basis(n, 100 + trial);
        const Eigen::VectorXd f0 = random_vector(n, rng);
        const Eigen::VectorXd z = random_vector(n, rng);
        const SmoothTerm term{positive(rng), positive(rng), random_vector(n, rng)};
        const double eta = positive(rng);
        for (bool masked : {false, true}) {
            const RecoveryProblem p =
                masked ? RecoveryProblem(basis, f0, 1.0, random_mask(n, 0.4, rng))
                       : RecoveryProblem(basis, f0, 1.0);
            const Eigen::VectorXd x = masked ? prox_quadratic_masked(z, term, eta, p)
                                             : prox_quadratic_full(z, term, eta, p);
            const auto objective = [&](const Eigen::VectorXd& v) {
                return prox_objective(v, z, term, eta, p);
            };
            EXPECT_LE(numeric_gradient(objective, x).lpNorm<Eigen::Infinity>(), 1e-7)
                << "n=" << n << " masked=" << masked;
        }
    }
}

TEST(ProxQuadraticTest, MaskReductions) {
    std::mt19937_64 rng(11);
    const Eigen::Index n = 12;
    const auto basis = community_basis(n, 12);
    const Eigen::VectorXd f0 = random_vector(n, rng);
    const Eigen::VectorXd z = random_vector(n, rng);
    const SmoothTerm term{1.7, 0.6, random_vector(n, rng)};
    const double eta = 0.8;

    const RecoveryProblem full(basis, f0, 1.0);
    const RecoveryProblem ones(basis, f0, 1.0, Eigen::VectorXd::Ones(n));
    EXPECT_LE((prox_quadratic_masked(z, term, eta, ones) - prox_quadratic_full(z, term, eta, full))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);

    const RecoveryProblem none(basis, f0, 1.0, Eigen::VectorXd::Zero(n));
    const Eigen::VectorXd expected =
        (z + eta * term.anchor_weight * term.anchor) / (1.0 + eta * term.anchor_weight);
    EXPECT_LE((prox_quadratic_masked(z, term, eta, none) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

// ---------------------------------------------------------------------------

TEST(ForwardStepTest, Examples) {
    const auto basis = community_basis(4, 13);
    const RecoveryProblem p(basis, Eigen::VectorXd::Ones(4), 1.0);

    const OuterIterate e1 = make_outer_iterate(unit(4, 0), p, 1.0);
    EXPECT_EQ(forward_step(e1), unit(4, 0, 2.0));

    for (double c : {0.3, 1.0, 7.0}) {
        const OuterIterate it = make_outer_iterate(unit(4, 2, c), p, c);  // tau = B
        EXPECT_LE((forward_step(it) - unit(4, 2, c + it.energy.ratio)).norm(), 1e-14);
    }

    std::mt19937_64 rng(14);
    const Eigen::VectorXd x = random_vector(4, rng);
    const OuterIterate it = make_outer_iterate(x, p, 0.37);
    const Eigen::VectorXd step = forward_step(it) - x;
    EXPECT_NEAR(step.norm(), 0.37 * it.energy.ratio / it.energy.l2, 1e-14);
    EXPECT_NEAR(step.normalized().dot(x.normalized()), 1.0, 1e-14);

    OuterIterate zero = it;
    zero.x.setZero();
    EXPECT_THROW(forward_step(zero), ZeroVectorError);
}

// ---------------------------------------------------------------------------

TEST(MonotonicityTest, StationaryCandidate) {
    const auto basis = community_basis(6, 15);
    std::mt19937_64 rng(15);
    const RecoveryProblem p(basis, random_vector(6, rng), 1.3);
    const OuterIterate it = make_outer_iterate(random_vector(6, rng), p, 0.9);
    const auto check = check_monotonicity(it, it.x, p);
    EXPECT_EQ(check.gap, 0.0);
    EXPECT_TRUE(check.satisfied);
}

TEST(MonotonicityTest, EnergyIncreaseFails) {
    const auto basis = community_basis(6, 16);
    const Eigen::VectorXd truth = unit(6, 1);
    const RecoveryProblem p(basis, basis->inverse(truth), 1.0);
    const OuterIterate it = make_outer_iterate(truth, p, 1.0);
    const Eigen::VectorXd worse = truth + vec({0.5, 0, 0.5, 0, 0.5, 0});
    ASSERT_GT(energy(worse, p).ratio, it.energy.ratio);
    ASSERT_GT(energy(worse, p).fidelity, it.energy.fidelity);
    EXPECT_FALSE(check_monotonicity(it, worse, p).satisfied);
    EXPECT_THROW(check_monotonicity(it, Eigen::VectorXd::Zero(6), p), ZeroVectorError);
}

TEST(MonotonicityTest, GapMatchesDirectEvaluation) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 3 + trial % 10;
        const auto basis = community_basis(n, 200 + trial);
        const Eigen::VectorXd f0 = random_vector(n, rng);
        const RecoveryProblem p(basis, f0, 0.5 + trial * 0.1);
        const Eigen::VectorXd xk = random_vector(n, rng);
        const Eigen::VectorXd xn = xk + random_vector(n, rng, 0.1);
        const double tau = 0.2 + 0.05 * trial;
        const auto check = check_monotonicity(make_outer_iterate(xk, p, tau), xn, p);

        const Eigen::MatrixXd& u = basis->modes();
        const auto e = [](const Eigen::VectorXd& v) { return v.lpNorm<1>() / v.norm(); };
        const auto f = [&](const Eigen::VectorXd& v) {
            return 0.5 * p.fidelity_weight() * (u * v - f0).squaredNorm();
        };
        const double expected = xn.norm() / xk.norm() * (e(xk) - e(xn)) + (f(xk) - f(xn)) -
                                (xk - xn).squaredNorm() / tau;
        EXPECT_NEAR(check.gap, expected, 1e-10);
    }
}

// ---------------------------------------------------------------------------

TEST(InnerStepTest, StepSizeRecursion) {
    const auto basis = community_basis(5, 18);
    std::mt19937_64 rng(18);
    const RecoveryProblem p(basis, random_vector(5, rng), 1.0);
    const SolverConfig cfg;
    InnerState s = InnerState::cold_start(random_vector(5, rng), cfg);
    const SmoothTerm term = SmoothTerm::for_standard(p);

    s = inner_primal_dual_step(s, term, p);
    EXPECT_DOUBLE_EQ(s.acceleration, 1.0 / std::sqrt(3.0));
    EXPECT_DOUBLE_EQ(s.primal_step, 1.0 / std::sqrt(3.0));
    EXPECT_DOUBLE_EQ(s.dual_step, std::sqrt(3.0));

    for (int n = 0; n < 200; ++n) {
        const double eta = s.primal_step;
        s = inner_primal_dual_step(s, term, p);
        EXPECT_DOUBLE_EQ(s.acceleration, 1.0 / std::sqrt(1.0 + 2.0 * eta));
        EXPECT_NEAR(s.primal_step * s.dual_step, 1.0, 1e-12);
        EXPECT_LE(s.dual.lpNorm<Eigen::Infinity>(), 1.0);
    }
}

TEST(InnerStepTest, ConvergesToSoftThreshold) {
    // No anchor: the saddle point is the orthogonal Lasso solution.
    const auto basis = community_basis(20, 19);
    std::mt19937_64 rng(19);
    const double lambda = 2.0;
    const RecoveryProblem p(basis, random_vector(20, rng), lambda);
    SolverConfig cfg;
    InnerState s = InnerState::cold_start(p.spectral_measurements(), cfg);
    const SmoothTerm term = SmoothTerm::for_standard(p);
    for (int n = 0; n < 3000; ++n) s = inner_primal_dual_step(s, term, p);
    EXPECT_LE((s.primal - soft_threshold_oracle(p.spectral_measurements(), 1.0 / lambda))
                  .lpNorm<Eigen::Infinity>(),
              1e-6);
}

// ---------------------------------------------------------------------------

TEST(StandardLassoTest, ScalarExamples) {
    const SolverConfig cfg;
    const auto r1 = solve_standard_lasso(RecoveryProblem(scalar_basis(), vec({3}), 1.0), cfg);
    EXPECT_TRUE(r1.converged);
    EXPECT_NEAR(r1.solution[0], 2.0, 1e-8);
    const auto r2 = solve_standard_lasso(RecoveryProblem(scalar_basis(), vec({3}), 0.1), cfg);
    EXPECT_NEAR(r2.solution[0], 0.0, 1e-8);
}

TEST(StandardLassoTest, MatchesSoftThreshold) {
    std::mt19937_64 rng(20);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Index n = 10 + 15 * trial;
        const auto basis = community_basis(n, 300 + trial);
        const double lambda = 0.5 + trial;
        const RecoveryProblem p(basis, random_vector(n, rng), lambda);
        const auto result = solve_standard_lasso(p, SolverConfig{});
        EXPECT_TRUE(result.converged);
        EXPECT_LE((result.solution - soft_threshold_oracle(p.spectral_measurements(), 1 / lambda))
                      .lpNorm<Eigen::Infinity>(),
                  1e-6);
        EXPECT_GE(result.trace.size(), 2u);
    }
}

TEST(StandardLassoTest, RejectsWrongVariant) {
    const auto basis = community_basis(5, 21);
    const RecoveryProblem masked(basis, Eigen::VectorXd::Ones(5), 1.0, Eigen::VectorXd::Ones(5));
    const RecoveryProblem full(basis, Eigen::VectorXd::Ones(5), 1.0);
    EXPECT_THROW(solve_standard_lasso(masked, {}), InvalidArgument);
    EXPECT_THROW(solve_ratio_lasso(masked, {}), InvalidArgument);
    EXPECT_THROW(solve_standard_inpainting(full, {}), InvalidArgument);
    EXPECT_THROW(solve_ratio_inpainting(full, {}), InvalidArgument);
}

TEST(StandardInpaintingTest, NoObservationsGivesZero) {
    const auto basis = community_basis(10, 22);
    std::mt19937_64 rng(22);
    const RecoveryProblem p(basis, random_vector(10, rng), 3.0, Eigen::VectorXd::Zero(10));
    const auto result = solve_standard_inpainting(p, {});
    EXPECT_EQ(result.solution, Eigen::VectorXd::Zero(10));
    EXPECT_THROW(solve_ratio_inpainting(p, {}), ZeroVectorError);
}

TEST(StandardInpaintingTest, FullMaskMatchesLasso) {
    const auto basis = community_basis(30, 23);
    std::mt19937_64 rng(23);
    const Eigen::VectorXd f0 = random_vector(30, rng);
    const SolverConfig cfg;
    const auto plain = solve_standard_lasso(RecoveryProblem(basis, f0, 1.5), cfg);
    const auto masked = solve_standard_inpainting(
        RecoveryProblem(basis, f0, 1.5, Eigen::VectorXd::Ones(30)), cfg);
    EXPECT_LE((plain.solution - masked.solution).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(StandardInpaintingTest, OptimalityConditions) {
    // 0 in sign(x) + lambda U^T R (R U x - f0): check the subgradient inclusion.
    const Eigen::Index n = 40;
    const auto basis = community_basis(n, 24);
    std::mt19937_64 rng(24);
    const double lambda = 4.0;
    const RecoveryProblem p(basis, random_vector(n, rng), lambda, random_mask(n, 0.4, rng));
    const auto result = solve_standard_inpainting(p, {});
    ASSERT_TRUE(result.converged);
    const Eigen::VectorXd g =
        -lambda * basis->forward(p.residual(result.solution).cwiseProduct(*p.mask()));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(result.solution[i]) > 1e-7) {
            EXPECT_NEAR(g[i], result.solution[i] > 0 ? 1.0 : -1.0, 1e-5);
        } else {
            EXPECT_LE(std::abs(g[i]), 1.0 + 1e-5);
        }
    }
}

// ---------------------------------------------------------------------------

TEST(RatioLassoTest, RejectsZeroInitializer) {
    const auto basis = community_basis(6, 25);
    const RecoveryProblem p(basis, Eigen::VectorXd::Zero(6), 1.0);
    EXPECT_THROW(solve_ratio_lasso(p, {}), ZeroVectorError);
}

TEST(RatioLassoTest, NoiselessOneSparse) {
    const Eigen::Index n = 50;
    const auto basis = community_basis(n, 26);
    const Eigen::VectorXd truth = unit(n, 17, -0.8);
    const RecoveryProblem p(basis, basis->inverse(truth), 1e3);
    const auto result = solve_ratio_lasso(p, {});
    EXPECT_LE(l1_l2_ratio(result.solution), 1.0 + 1e-3);
    Eigen::Index peak = 0;
    result.solution.cwiseAbs().maxCoeff(&peak);
    EXPECT_EQ(peak, 17);
}

TEST(RatioLassoTest, AcceptedTransitionsAreQuasiMonotone) {
    const Eigen::Index n = 60;
    const auto basis = community_basis(n, 27);
    std::mt19937_64 rng(27);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i : {3, 19, 44}) truth[i] = 1.0 - 0.3 * static_cast<double>(i % 5);
    const Eigen::VectorXd f0 = basis->inverse(truth + random_vector(n, rng, 0.05));
    SolverConfig cfg;
    cfg.keep_iterates = true;
    for (double lambda : {0.5, 2.0, 8.0}) {
        const RecoveryProblem p(basis, f0, lambda);
        const auto result = solve_ratio_lasso(p, cfg);
        ASSERT_EQ(result.iterates.size(), result.trace.size());
        for (std::size_t k = 1; k < result.trace.size(); ++k) {
            const TraceRow& prev = result.trace[k - 1];
            const TraceRow& row = result.trace[k];
            EXPECT_GE(row.gap, -kMonotonicitySlack);
            EXPECT_GE(row.inner_iterations, cfg.min_inner);
            // Total energy may only rise by the quasi-monotonicity slack.
            const double slack = std::abs(row.l2 / prev.l2 - 1.0) * std::abs(prev.sparsity - row.sparsity);
            EXPECT_LE(row.total - prev.total, slack + 1e-12);
            const double tau = prev.l2;
            const auto check = check_monotonicity(
                make_outer_iterate(result.iterates[k - 1], p, tau), result.iterates[k], p);
            EXPECT_NEAR(check.gap, row.gap, 1e-10);
        }
    }
}

TEST(RatioLassoTest, DebiasesRelativeToLasso) {
    // The ratio fixed point shrinks large coefficients less than soft thresholding.
    const Eigen::Index n = 80;
    const auto basis = community_basis(n, 28);
    std::mt19937_64 rng(28);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(n);
    truth[5] = 1.0;
    truth[30] = -0.7;
    truth[61] = 0.5;
    const RecoveryProblem p(basis, basis->inverse(truth + random_vector(n, rng, 0.05)), 3.0);
    const auto ratio = solve_ratio_lasso(p, {});
    const auto standard = solve_standard_lasso(p, {});
    EXPECT_LT(l1_l2_ratio(ratio.solution), l1_l2_ratio(p.spectral_measurements()));
    EXPECT_LT((ratio.solution - truth).norm(), (standard.solution - truth).norm());
}

TEST(RatioInpaintingTest, FullMaskMatchesLasso) {
    const Eigen::Index n = 40;
    const auto basis = community_basis(n, 29);
    std::mt19937_64 rng(29);
    const Eigen::VectorXd f0 = random_vector(n, rng);
    const SolverConfig cfg;
    const auto plain = solve_ratio_lasso(RecoveryProblem(basis, f0, 2.0), cfg);
    const auto masked =
        solve_ratio_inpainting(RecoveryProblem(basis, f0, 2.0, Eigen::VectorXd::Ones(n)), cfg);
    EXPECT_EQ(plain.outer_iterations, masked.outer_iterations);
    EXPECT_LE((plain.solution - masked.solution).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(RatioInpaintingTest, MonotoneWithMask) {
    const Eigen::Index n = 60;
    const auto basis = community_basis(n, 30);
    std::mt19937_64 rng(30);
    const RecoveryProblem p(basis, random_vector(n, rng), 4.0, random_mask(n, 0.4, rng));
    const auto result = solve_ratio_inpainting(p, {});
    for (std::size_t k = 1; k < result.trace.size(); ++k) {
        EXPECT_GE(result.trace[k].gap, -kMonotonicitySlack);
    }
}

TEST(SolverConfigTest, Validation) {
    SolverConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.min_inner = 0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.initial_dual_step = 2.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.time_step = {TimeStepRule::Kind::Constant, 0.0};
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(SolverConfigTest, ConstantTimeStep) {
    const Eigen::Index n = 30;
    const auto basis = community_basis(n, 31);
    std::mt19937_64 rng(31);
    const RecoveryProblem p(basis, random_vector(n, rng), 2.0);
    SolverConfig cfg;
    cfg.time_step = {TimeStepRule::Kind::Constant, 0.5};
    cfg.keep_iterates = true;
    const auto result = solve_ratio_lasso(p, cfg);
    for (std::size_t k = 1; k < result.trace.size(); ++k) {
        const auto check = check_monotonicity(make_outer_iterate(result.iterates[k - 1], p, 0.5),
                                              result.iterates[k], p);
        EXPECT_NEAR(check.gap, result.trace[k].gap, 1e-10);
    }
}

TEST(TraceCsvTest, Format) {
    SolveResult r;
    r.trace.push_back({0, 2.5, 0.25, 2.75, 0, 0.0, 1.0});
    r.trace.push_back({1, 2.0, 0.5, 2.5, 7, 0.125, 1.0});
    std::ostringstream out;
    write_trace_csv(r, out);
    EXPECT_EQ(out.str(), "k,E,F,total,inner_iters,gap\n0,2.5,0.25,2.75,0,0\n1,2,0.5,2.5,7,0.125\n");
}

TEST(ModelTest, Names) {
    EXPECT_EQ(parse_model("l1"), Model::Standard);
    EXPECT_EQ(parse_model("l1l2"), Model::Ratio);
    EXPECT_EQ(to_string(Model::Ratio), "l1l2");
    EXPECT_THROW(parse_model("l0"), InvalidArgument);
}

}  // namespace
}  // namespace graphlasso
