#include "lambda_decouple/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lambda_decouple/errors.hpp"
#include "lambda_decouple/format.hpp"

namespace lambda_decouple {

namespace {

std::vector<double> boltzmann_weights(const TruncatedMode& mode, double temperature) {
    if (mode.fock_cutoff < 2) {
        throw InvalidInput("TruncatedMode: fock_cutoff must be >= 2");
    }
    if (!(mode.omega_k > 0.0)) {
        throw InvalidInput("TruncatedMode: omega_k must be > 0");
    }
    if (!(temperature >= 0.0)) {
        throw InvalidInput("thermal_mode_state: temperature must be >= 0");
    }
    std::vector<double> w(static_cast<std::size_t>(mode.fock_cutoff), 0.0);
    if (temperature == 0.0) {
        w[0] = 1.0;
        return w;
    }
    const double x = mode.omega_k / temperature;
    double norm = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) {
        w[m] = std::exp(-x * static_cast<double>(m));
        norm += w[m];
    }
    for (double& v : w) {
        v /= norm;
    }
    return w;
}

double system_coupling(Channel channel, int level) {
    // Diagonal of sz(2,0) = diag(-1,0,1) and sz(2,1) = diag(0,-1,1).
    static constexpr double k1[3] = {-1.0, 0.0, 1.0};
    static constexpr double k2[3] = {0.0, -1.0, 1.0};
    return channel == Channel::k1 ? k1[level] : k2[level];
}

} // namespace

double top_level_occupancy(const TruncatedMode& mode, double temperature) {
    return boltzmann_weights(mode, temperature).back();
}

Eigen::MatrixXcd thermal_mode_state(const TruncatedMode& mode, double temperature,
                                    TruncationPolicy policy) {
    const auto w = boltzmann_weights(mode, temperature);
    if (policy == TruncationPolicy::enforce && w.back() >= kOccupancyLimit) {
        throw TruncationError("thermal_mode_state: top Fock level holds " +
                                  format_significant(w.back(), 3) + " of the population (cutoff " +
                                  std::to_string(mode.fock_cutoff) + ")",
                              w.back());
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(mode.fock_cutoff, mode.fock_cutoff);
    for (int m = 0; m < mode.fock_cutoff; ++m) {
        rho(m, m) = w[static_cast<std::size_t>(m)];
    }
    return rho;
}

Eigen::MatrixXcd build_total_hamiltonian(const SystemLevels& levels,
                                         const std::vector<TruncatedMode>& modes,
                                         const OracleLimits& limits) {
    if (modes.size() > limits.max_modes) {
        throw InvalidInput("build_total_hamiltonian: at most " + std::to_string(limits.max_modes) +
                           " modes supported");
    }
    std::size_t env = 1;
    for (const auto& m : modes) {
        if (m.fock_cutoff < 2 || !(m.omega_k > 0.0)) {
            throw InvalidInput("build_total_hamiltonian: each mode needs omega_k > 0 and cutoff >= 2");
        }
        env *= static_cast<std::size_t>(m.fock_cutoff);
        if (3 * env > limits.max_dimension) {
            throw InvalidInput("build_total_hamiltonian: composite dimension exceeds the configured cap of " +
                               std::to_string(limits.max_dimension));
        }
    }
    const auto d_env = static_cast<Eigen::Index>(env);
    const Eigen::Index dim = 3 * d_env;

    // Strides of each mode inside the environment index (first mode slowest).
    std::vector<Eigen::Index> stride(modes.size(), 1);
    for (std::size_t k = modes.size(); k-- > 1;) {
        stride[k - 1] = stride[k] * modes[k].fock_cutoff;
    }

    const Operator3 h0 = build_h0(levels);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (int s = 0; s < 3; ++s) {
        for (Eigen::Index e = 0; e < d_env; ++e) {
            const Eigen::Index row = s * d_env + e;
            double diag = h0(s, s).real();
            for (std::size_t k = 0; k < modes.size(); ++k) {
                const Eigen::Index n = (e / stride[k]) % modes[k].fock_cutoff;
                diag += modes[k].omega_k * static_cast<double>(n);
                const double c = system_coupling(modes[k].channel, s) * modes[k].g_k;
                if (c != 0.0 && n + 1 < modes[k].fock_cutoff) {
                    // <n+1| a^dag |n> = sqrt(n+1)
                    const Eigen::Index up = row + stride[k];
                    const double amp = c * std::sqrt(static_cast<double>(n + 1));
                    h(up, row) += amp;
                    h(row, up) += amp;
                }
            }
            h(row, row) += diag;
        }
    }
    return h;
}

std::size_t CompositeState::env_dim() const {
    std::size_t d = 1;
    for (int m : mode_dims) {
        d *= static_cast<std::size_t>(m);
    }
    return d;
}

CompositeState product_state(const Operator3& rho_system, const std::vector<Eigen::MatrixXcd>& mode_states) {
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
    std::vector<int> dims;
    for (const auto& m : mode_states) {
        Eigen::MatrixXcd next(env.rows() * m.rows(), env.cols() * m.cols());
        for (Eigen::Index i = 0; i < env.rows(); ++i) {
            for (Eigen::Index j = 0; j < env.cols(); ++j) {
                next.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) = env(i, j) * m;
            }
        }
        env = std::move(next);
        dims.push_back(static_cast<int>(m.rows()));
    }
    const Eigen::Index d = env.rows();
    CompositeState state{Eigen::MatrixXcd(3 * d, 3 * d), dims};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            state.rho.block(i * d, j * d, d, d) = rho_system(i, j) * env;
        }
    }
    return state;
}

FreePropagator::FreePropagator(const Eigen::MatrixXcd& hamiltonian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("FreePropagator: eigendecomposition failed", 0.0);
    }
    vectors_ = solver.eigenvectors();
    values_ = solver.eigenvalues();
}

Eigen::MatrixXcd FreePropagator::unitary(double duration) const {
    Eigen::VectorXcd phases(values_.size());
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        phases(i) = std::polar(1.0, -values_(i) * duration);
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

CompositeState evolve_segment(const CompositeState& state, const FreePropagator& propagator,
                              double duration) {
    if (!(duration >= 0.0)) {
        throw InvalidInput("evolve_segment: duration must be >= 0");
    }
    if (duration == 0.0) {
        return state;
    }
    const Eigen::MatrixXcd u = propagator.unitary(duration);
    return {u * state.rho * u.adjoint(), state.mode_dims};
}

CompositeState evolve_segment(const CompositeState& state, const Eigen::MatrixXcd& hamiltonian,
                              double duration) {
    if (duration == 0.0) {
        return state;
    }
    return evolve_segment(state, FreePropagator(hamiltonian), duration);
}

CompositeState apply_pulse(const CompositeState& state, PulseLabel element) {
    const Operator3 g = pulse_unitary(element);
    const auto d = static_cast<Eigen::Index>(state.env_dim());
    // (G rho G^dag)_{ab} = sum_{ij} g_ai rho_ij conj(g_bj), block by block.
    Eigen::MatrixXcd left = Eigen::MatrixXcd::Zero(3 * d, 3 * d);
    for (int a = 0; a < 3; ++a) {
        for (int i = 0; i < 3; ++i) {
            if (g(a, i) != Complex(0.0)) {
                left.middleRows(a * d, d) += g(a, i) * state.rho.middleRows(i * d, d);
            }
        }
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(3 * d, 3 * d);
    for (int b = 0; b < 3; ++b) {
        for (int j = 0; j < 3; ++j) {
            if (g(b, j) != Complex(0.0)) {
                out.middleCols(b * d, d) += std::conj(g(b, j)) * left.middleCols(j * d, d);
            }
        }
    }
    return {std::move(out), state.mode_dims};
}

Operator3 reduced_system(const CompositeState& state) {
    const auto d = static_cast<Eigen::Index>(state.env_dim());
    Operator3 r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r(i, j) = state.rho.block(i * d, j * d, d, d).trace();
        }
    }
    return r;
}

OracleResult run_oracle(const SystemLevels& levels, const std::vector<TruncatedMode>& modes,
                        double temperature, const CycleSchedule& schedule,
                        const Operator3& rho_system_initial, const OracleOptions& options) {
    if (!is_hermitian(rho_system_initial, 1e-10) ||
        std::abs(rho_system_initial.trace() - Complex(1.0)) > 1e-10) {
        throw InvalidInput("run_oracle: initial system state must be Hermitian with unit trace");
    }
    if (auto v = validate_schedule(schedule); !v.empty()) {
        throw InvalidInput("run_oracle: invalid schedule (" + v.front().rule + ": " + v.front().detail + ")");
    }

    OracleResult result;
    std::vector<Eigen::MatrixXcd> mode_states;
    for (const auto& m : modes) {
        const double top = top_level_occupancy(m, temperature);
        if (top >= kOccupancyLimit) {
            const std::string msg = "truncation: mode w=" + format_significant(m.omega_k, 6) +
                                    " cutoff " + std::to_string(m.fock_cutoff) +
                                    " leaves top-level occupancy " + format_significant(top, 3);
            if (options.truncation == TruncationPolicy::enforce) {
                throw TruncationError(msg, top);
            }
            result.warnings.push_back(msg);
        }
        mode_states.push_back(thermal_mode_state(m, temperature, TruncationPolicy::warn));
    }

    const FreePropagator propagator(build_total_hamiltonian(levels, modes, options.limits));
    CompositeState state = product_state(rho_system_initial, mode_states);

    Eigen::Vector3d pop0;
    auto record = [&](double t) {
        const Operator3 rs = reduced_system(state);
        const Eigen::Vector3d pops = rs.diagonal().real();
        if (result.times.empty()) {
            pop0 = pops;
        }
        result.times.push_back(t);
        result.rho02_magnitude.push_back(std::abs(rs(0, 2)));
        result.rho02_phase.push_back(std::arg(rs(0, 2)));
        result.populations.push_back(pops);
        result.reduced.push_back(rs);
        result.max_trace_drift =
            std::max(result.max_trace_drift, std::abs(state.rho.trace() - Complex(1.0)));
        result.max_population_drift =
            std::max(result.max_population_drift, (pops - pop0).cwiseAbs().maxCoeff());
        result.max_hermiticity_error =
            std::max(result.max_hermiticity_error, max_abs(state.rho - state.rho.adjoint()));
        if (options.check_positivity) {
            const Eigen::MatrixXcd herm = 0.5 * (state.rho + state.rho.adjoint());
            const double lowest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(
                                      herm, Eigen::EigenvaluesOnly)
                                      .eigenvalues()
                                      .minCoeff();
            result.min_eigenvalue = result.times.size() == 1 ? lowest : std::min(result.min_eigenvalue, lowest);
        }
    };

    record(0.0);
    double now = 0.0;
    std::size_t in_cycle = 0;
    for (const auto& ev : schedule.events) {
        state = evolve_segment(state, propagator, ev.time - now);
        now = ev.time;
        if (options.pulses == PulseHandling::apply) {
            state = apply_pulse(state, ev.element);
        }
        if (++in_cycle == static_cast<std::size_t>(kEventsPerCycle)) {
            in_cycle = 0;
            record(now);
        }
    }
    return result;
}

std::vector<double> analytic_coherence_magnitudes(const std::vector<TruncatedMode>& modes,
                                                  double temperature, double delta_t,
                                                  int n_cycles, bool controlled,
                                                  double rho02_initial_magnitude) {
    const KernelKind kind = controlled ? KernelKind::controlled : KernelKind::unpulsed;
    std::vector<double> out{rho02_initial_magnitude};
    for (int n = 1; n <= n_cycles; ++n) {
        const auto ctrl = ControlParams::make(delta_t, n);
        double gamma = 0.0;
        for (const auto& m : modes) {
            gamma += gamma_discrete(kind, m.channel, m.omega_k, m.g_k, temperature, ctrl);
        }
        out.push_back(rho02_initial_magnitude * std::exp(-gamma));
    }
    return out;
}

ComparisonReport compare_analytic(const OracleResult& oracle, const std::vector<double>& analytic,
                                  double tolerance) {
    ComparisonReport report;
    report.tolerance = tolerance;
    report.warnings = oracle.warnings;
    if (analytic.size() != oracle.rho02_magnitude.size()) {
        report.pass = false;
        report.max_deviation = std::numeric_limits<double>::infinity();
        report.warnings.push_back("length mismatch: oracle has " +
                                  std::to_string(oracle.rho02_magnitude.size()) +
                                  " records, analytic " + std::to_string(analytic.size()));
        return report;
    }
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double dev = std::abs(oracle.rho02_magnitude[i] - analytic[i]);
        if (dev > report.max_deviation) {
            report.max_deviation = dev;
            report.worst_index = i;
        }
    }
    report.pass = report.max_deviation < tolerance && oracle.warnings.empty();
    return report;
}

} // namespace lambda_decouple
