#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "lambda_decouple/errors.hpp"
#include "lambda_decouple/oracle.hpp"
#include "support/random_ops.hpp"

using namespace lambda_decouple;

namespace {

const SystemLevels kLevels = SystemLevels::make(0.0, 0.5, 2.0);

Operator3 superposition(int a, int b) {
    Operator3 rho = Operator3::Zero();
    rho(a, a) = rho(b, b) = rho(a, b) = rho(b, a) = 0.5;
    return rho;
}

Operator3 equal_superposition() {
    return Operator3::Constant(Complex(1.0 / 3.0));
}

// Dense Kronecker product, kept separate from the library's block assembly.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::MatrixXcd annihilation(int cutoff) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

double pulsed_final_magnitude(const std::vector<TruncatedMode>& modes, double temperature,
                              double dt, int n, PulseHandling handling) {
    OracleOptions opts;
    opts.pulses = handling;
    const auto r = run_oracle(kLevels, modes, temperature, build_schedule(dt, n, 0.0), equal_superposition(), opts);
    return r.rho02_magnitude.back();
}

} // namespace

TEST(thermal_mode_state, zero_temperature_is_vacuum) {
    const auto rho = thermal_mode_state({1.0, 0.1, Channel::k1, 6}, 0.0);
    EXPECT_EQ(rho(0, 0), Complex(1.0));
    EXPECT_EQ(rho.trace(), Complex(1.0));
    EXPECT_EQ(top_level_occupancy({1.0, 0.1, Channel::k1, 6}, 0.0), 0.0);
}

TEST(thermal_mode_state, infinite_temperature_on_two_levels) {
    const TruncatedMode mode{1.0, 0.1, Channel::k2, 2};
    const auto rho = thermal_mode_state(mode, 1e12, TruncationPolicy::warn);
    EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-12);
    EXPECT_NEAR(rho(1, 1).real(), 0.5, 1e-12);
    EXPECT_THROW(thermal_mode_state(mode, 1e12), TruncationError);
    try {
        thermal_mode_state(mode, 1e12);
    } catch (const TruncationError& e) {
        EXPECT_NEAR(e.top_occupancy(), 0.5, 1e-12);
    }
}

TEST(thermal_mode_state, frozen_populations) {
    // Geometric weights at w/T = 2, cutoff 30, 20 digits.
    const auto rho = thermal_mode_state({1.0, 0.0, Channel::k1, 30}, 0.5);
    EXPECT_NEAR(rho(0, 0).real(), 0.86466471676338730811, 1e-15);
    EXPECT_NEAR(rho(1, 1).real(), 0.11701964434787851160, 1e-15);
    EXPECT_NEAR(rho(2, 2).real(), 0.015836886712067821871, 1e-15);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-15);
    EXPECT_TRUE(rho.isDiagonal());
}

TEST(thermal_mode_state, rejects_bad_input) {
    EXPECT_THROW(thermal_mode_state({1.0, 0.1, Channel::k1, 1}, 0.0), InvalidInput);
    EXPECT_THROW(thermal_mode_state({0.0, 0.1, Channel::k1, 4}, 0.0), InvalidInput);
    EXPECT_THROW(thermal_mode_state({1.0, 0.1, Channel::k1, 4}, -1.0), InvalidInput);
}

TEST(build_total_hamiltonian, no_modes_is_bare_atom) {
    const auto h = build_total_hamiltonian(kLevels, {});
    ASSERT_EQ(h.rows(), 3);
    EXPECT_LT(max_abs(Eigen::MatrixXcd(h - build_h0(kLevels))), 1e-15);
}

TEST(build_total_hamiltonian, zero_coupling_is_block_diagonal) {
    const TruncatedMode m{1.3, 0.0, Channel::k1, 5};
    const auto h = build_total_hamiltonian(kLevels, {m});
    const Eigen::MatrixXcd a = annihilation(5);
    const Eigen::MatrixXcd expected = kron(build_h0(kLevels), Eigen::MatrixXcd::Identity(5, 5)) +
                                      kron(Eigen::MatrixXcd::Identity(3, 3), 1.3 * a.adjoint() * a);
    EXPECT_LT(max_abs(Eigen::MatrixXcd(h - expected)), 1e-15);
}

TEST(build_total_hamiltonian, matches_kronecker_ladder_construction) {
    for (Channel ch : {Channel::k1, Channel::k2}) {
        const TruncatedMode m{1.0, 0.1, ch, 8};
        const auto h = build_total_hamiltonian(kLevels, {m});
        const Eigen::MatrixXcd a = annihilation(8);
        const Operator3 sz = ch == Channel::k1 ? sigma_op(Axis::z, kPair20) : sigma_op(Axis::z, kPair21);
        const Eigen::MatrixXcd expected = kron(build_h0(kLevels), Eigen::MatrixXcd::Identity(8, 8)) +
                                          kron(Eigen::MatrixXcd::Identity(3, 3), a.adjoint() * a) +
                                          kron(sz, 0.1 * (a + a.adjoint()));
        EXPECT_LT(max_abs(Eigen::MatrixXcd(h - expected)), 1e-15);
        EXPECT_TRUE(h.isApprox(h.adjoint()));
    }
}

TEST(build_total_hamiltonian, two_modes_first_is_slowest) {
    const TruncatedMode m1{1.0, 0.2, Channel::k1, 3};
    const TruncatedMode m2{1.7, 0.1, Channel::k2, 4};
    const auto h = build_total_hamiltonian(kLevels, {m1, m2});
    const Eigen::MatrixXcd a1 = annihilation(3);
    const Eigen::MatrixXcd a2 = annihilation(4);
    const Eigen::MatrixXcd i1 = Eigen::MatrixXcd::Identity(3, 3);
    const Eigen::MatrixXcd i2 = Eigen::MatrixXcd::Identity(4, 4);
    const Eigen::MatrixXcd i3 = Eigen::MatrixXcd::Identity(3, 3);
    const Eigen::MatrixXcd expected =
        kron(build_h0(kLevels), kron(i1, i2)) + kron(i3, kron(1.0 * a1.adjoint() * a1, i2)) +
        kron(i3, kron(i1, 1.7 * a2.adjoint() * a2)) +
        kron(sigma_op(Axis::z, kPair20), kron(0.2 * (a1 + a1.adjoint()), i2)) +
        kron(sigma_op(Axis::z, kPair21), kron(i1, 0.1 * (a2 + a2.adjoint())));
    EXPECT_LT(max_abs(Eigen::MatrixXcd(h - expected)), 1e-15);
}

TEST(build_total_hamiltonian, enforces_limits) {
    const TruncatedMode m{1.0, 0.1, Channel::k1, 40};
    EXPECT_THROW(build_total_hamiltonian(kLevels, {m}, OracleLimits{3, 100}), InvalidInput);
    EXPECT_THROW(build_total_hamiltonian(kLevels, {m, m, m, m}), InvalidInput);
    EXPECT_THROW(build_total_hamiltonian(kLevels, {{1.0, 0.1, Channel::k1, 1}}), InvalidInput);
}

TEST(evolve_segment, zero_duration_is_identity) {
    const TruncatedMode m{1.0, 0.2, Channel::k2, 6};
    const auto state = product_state(equal_superposition(), {thermal_mode_state(m, 0.2)});
    const auto h = build_total_hamiltonian(kLevels, {m});
    const auto out = evolve_segment(state, h, 0.0);
    EXPECT_EQ(max_abs(Eigen::MatrixXcd(out.rho - state.rho)), 0.0);
    EXPECT_THROW(evolve_segment(state, FreePropagator(h), -1.0), InvalidInput);
}

TEST(evolve_segment, stationary_state_is_unchanged) {
    const TruncatedMode m{1.0, 0.0, Channel::k1, 6};
    Operator3 pops = Operator3::Zero();
    pops.diagonal() << 0.2, 0.3, 0.5;
    const auto state = product_state(pops, {thermal_mode_state(m, 0.3, TruncationPolicy::warn)});
    const auto out = evolve_segment(state, build_total_hamiltonian(kLevels, {m}), 3.1);
    EXPECT_LT(max_abs(Eigen::MatrixXcd(out.rho - state.rho)), 1e-13);
}

TEST(evolve_segment, halves_compose_and_match_matrix_exponential) {
    const TruncatedMode m{1.0, 0.2, Channel::k1, 6};
    const auto h = build_total_hamiltonian(kLevels, {m});
    const auto state = product_state(equal_superposition(), {thermal_mode_state(m, 0.2)});
    const FreePropagator prop(h);
    const auto whole = evolve_segment(state, prop, 1.3);
    const auto halves = evolve_segment(evolve_segment(state, prop, 0.65), prop, 0.65);
    EXPECT_LT(max_abs(Eigen::MatrixXcd(whole.rho - halves.rho)), 1e-10);

    const Eigen::MatrixXcd u = (Complex(0.0, -1.3) * h).exp();
    EXPECT_LT(max_abs(Eigen::MatrixXcd(whole.rho - u * state.rho * u.adjoint())), 1e-10);
}

TEST(apply_pulse, inverse_restores_and_factorizes) {
    std::mt19937_64 rng(17);
    const TruncatedMode m{1.0, 0.2, Channel::k2, 4};
    Operator3 a = test_support::random_operator(rng);
    Operator3 rho = a * a.adjoint();
    rho /= rho.trace();
    const auto env = thermal_mode_state(m, 0.7, TruncationPolicy::warn);
    const auto state = product_state(rho, {env});
    for (auto [g, g_dag] : {std::pair{PulseLabel::h1, PulseLabel::h1_dag}, std::pair{PulseLabel::h2, PulseLabel::h2_dag}}) {
        const auto back = apply_pulse(apply_pulse(state, g), g_dag);
        EXPECT_LT(max_abs(Eigen::MatrixXcd(back.rho - state.rho)), 1e-14);
        const Operator3 u = pulse_unitary(g);
        const auto direct = product_state(u * rho * u.adjoint(), {env});
        EXPECT_LT(max_abs(Eigen::MatrixXcd(apply_pulse(state, g).rho - direct.rho)), 1e-14);
    }
    EXPECT_LT(max_abs(Operator3(reduced_system(state) - rho)), 1e-14);
}

TEST(run_oracle, uncoupled_cycle_matches_system_propagation) {
    const TruncatedMode m{1.0, 0.0, Channel::k1, 3};
    const double dt = 0.37;
    const auto sched = build_schedule(dt, 2, 0.0);
    const auto r = run_oracle(kLevels, {m}, 0.0, sched, equal_superposition());

    const Operator3 h0 = build_h0(kLevels);
    Operator3 rho = equal_superposition();
    double now = 0.0;
    for (const auto& ev : sched.events) {
        const Operator3 u = (Complex(0.0, -(ev.time - now)) * h0).exp();
        const Operator3 g = pulse_unitary(ev.element);
        rho = g * u * rho * u.adjoint() * g.adjoint();
        now = ev.time;
    }
    EXPECT_LT(max_abs(Operator3(r.reduced.back() - rho)), 1e-12);
    EXPECT_NEAR(r.rho02_magnitude.back(), 1.0 / 3.0, 1e-13);
}

TEST(run_oracle, conserves_populations_and_trace) {
    const TruncatedMode m{1.0, 0.3, Channel::k2, 20};
    Eigen::Vector3cd psi(std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2));
    const Operator3 rho = psi * psi.adjoint();
    const auto r = run_oracle(kLevels, {m}, 0.2, build_schedule(0.5, 5, 0.0), rho);
    ASSERT_EQ(r.times.size(), 6u);
    EXPECT_LT(r.max_population_drift, 1e-12);
    EXPECT_LT(r.max_trace_drift, 1e-10);
    EXPECT_LT(r.max_hermiticity_error, 1e-12);
    EXPECT_GT(r.min_eigenvalue, -1e-10);
    EXPECT_TRUE(r.warnings.empty());
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        EXPECT_NEAR(r.times[i], 1.5 * static_cast<double>(i), 1e-12);
    }
}

TEST(run_oracle, unpulsed_k2_one_two_coherence_at_zero_temperature) {
    // s1 - s2 = -2 on the k2 coupling, the same weight the k1 channel puts on 0-2.
    const TruncatedMode m{1.0, 0.25, Channel::k2, 30};
    const double dt = 0.4;
    OracleOptions opts;
    opts.pulses = PulseHandling::suppress;
    const auto r = run_oracle(kLevels, {m}, 0.0, build_schedule(dt, 4, 0.0), superposition(1, 2), opts);
    for (int n = 1; n <= 4; ++n) {
        const double gamma =
            gamma_discrete(KernelKind::unpulsed, Channel::k1, 1.0, 0.25, 0.0, ControlParams::make(dt, n));
        EXPECT_NEAR(std::abs(r.reduced[static_cast<std::size_t>(n)](1, 2)), 0.5 * std::exp(-gamma), 1e-10);
    }
    EXPECT_LT(r.rho02_magnitude.back(), 1e-15);
}

TEST(run_oracle, rejects_invalid_inputs) {
    const TruncatedMode m{1.0, 0.1, Channel::k1, 4};
    auto bad = build_schedule(0.5, 1, 0.0);
    std::swap(bad.events[0].element, bad.events[1].element);
    EXPECT_THROW(run_oracle(kLevels, {m}, 0.0, bad, equal_superposition()), InvalidInput);
    EXPECT_THROW(run_oracle(kLevels, {m}, 0.0, build_schedule(0.5, 1, 0.0), 2.0 * equal_superposition()),
                 InvalidInput);
    EXPECT_THROW(run_oracle(kLevels, {{1.0, 0.1, Channel::k1, 2}}, 5.0, build_schedule(0.5, 1, 0.0),
                            equal_superposition()),
                 TruncationError);
}

TEST(run_oracle, pulses_beat_free_evolution_in_quiet_regime) {
    for (Channel ch : {Channel::k1, Channel::k2}) {
        const std::vector<TruncatedMode> modes{{1.0, 0.3, ch, 30}};
        const double on = pulsed_final_magnitude(modes, 0.0, 0.5, 3, PulseHandling::apply);
        const double off = pulsed_final_magnitude(modes, 0.0, 0.5, 3, PulseHandling::suppress);
        EXPECT_GT(on, off);
    }
}

TEST(compare_analytic, single_mode_cases_pass) {
    for (Channel ch : {Channel::k1, Channel::k2}) {
        for (double t : {0.0, 0.2}) {
            for (bool controlled : {true, false}) {
                const std::vector<TruncatedMode> modes{{1.0, 0.1, ch, 40}};
                OracleOptions opts;
                opts.pulses = controlled ? PulseHandling::apply : PulseHandling::suppress;
                const auto r = run_oracle(kLevels, modes, t, build_schedule(0.5, 3, 0.0), equal_superposition(), opts);
                const auto a = analytic_coherence_magnitudes(modes, t, 0.5, 3, controlled, 1.0 / 3.0);
                const auto report = compare_analytic(r, a);
                EXPECT_TRUE(report.pass) << report.max_deviation;
                EXPECT_LT(report.max_deviation, 1e-8);
                EXPECT_EQ(report.convention, std::string(kComparatorConvention));
            }
        }
    }
}

TEST(compare_analytic, two_mode_case_passes) {
    const std::vector<TruncatedMode> modes{{1.0, 0.15, Channel::k1, 10}, {1.7, 0.1, Channel::k2, 10}};
    const auto r = run_oracle(kLevels, modes, 0.1, build_schedule(0.3, 3, 0.0), equal_superposition());
    const auto a = analytic_coherence_magnitudes(modes, 0.1, 0.3, 3, true, 1.0 / 3.0);
    const auto report = compare_analytic(r, a);
    EXPECT_TRUE(report.pass) << report.max_deviation;
}

TEST(compare_analytic, undersized_cutoff_fails_with_warning) {
    const std::vector<TruncatedMode> modes{{1.0, 0.1, Channel::k1, 2}};
    OracleOptions opts;
    opts.truncation = TruncationPolicy::warn;
    const auto r = run_oracle(kLevels, modes, 5.0, build_schedule(0.5, 2, 0.0), equal_superposition(), opts);
    ASSERT_FALSE(r.warnings.empty());
    const auto report = compare_analytic(r, analytic_coherence_magnitudes(modes, 5.0, 0.5, 2, true, 1.0 / 3.0));
    EXPECT_FALSE(report.pass);
    EXPECT_FALSE(report.warnings.empty());
}

TEST(compare_analytic, length_mismatch_fails) {
    OracleResult r;
    r.rho02_magnitude = {1.0, 0.9};
    const auto report = compare_analytic(r, {1.0});
    EXPECT_FALSE(report.pass);
}

TEST(run_oracle, converged_in_fock_cutoff) {
    for (double t : {0.0, 0.2}) {
        const double a = pulsed_final_magnitude({{1.0, 0.2, Channel::k2, 20}}, t, 0.5, 3, PulseHandling::apply);
        const double b = pulsed_final_magnitude({{1.0, 0.2, Channel::k2, 30}}, t, 0.5, 3, PulseHandling::apply);
        EXPECT_NEAR(a, b, 1e-7);
    }
}
