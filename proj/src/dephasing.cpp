#include "lambda_decouple/dephasing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lambda_decouple/errors.hpp"
#include "lambda_decouple/format.hpp"
#include "parallel.hpp"

namespace lambda_decouple {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kResonance = 1e-9;
constexpr double kSmallTheta = 1e-4;

// 1 - e^{i phi} without cancellation for small phi.
Complex one_minus_expi(double phi) {
    const double s = std::sin(0.5 * phi);
    return {2.0 * s * s, -std::sin(phi)};
}

// x coth(x), finite at x = 0.
double x_coth(double x) {
    if (std::abs(x) < 1e-4) {
        return 1.0 + x * x / 3.0;
    }
    return x / std::tanh(x);
}

// sum_m d_m e^{i m theta}, m = 0, 1, 2, written through (1 - e^{i m theta})
// so the sum stays accurate when sum_m d_m = 0 and theta is small.
Complex segment_sum(const std::array<double, 3>& d, double theta) {
    return Complex(d[0] + d[1] + d[2], 0.0) - d[1] * one_minus_expi(theta) -
           d[2] * one_minus_expi(2.0 * theta);
}

// Level-0 minus level-2 coupling in each of the three toggling-frame segments
// of a cycle (I, h1^dag S h1, h2^dag S h2).
std::array<double, 3> controlled_weights(Channel channel) {
    return channel == Channel::k1 ? std::array<double, 3>{-2.0, 1.0, 1.0}
                                  : std::array<double, 3>{-1.0, -1.0, 2.0};
}

double unpulsed_weight(Channel channel) {
    return channel == Channel::k1 ? -2.0 : -1.0;
}

Complex kernel(KernelKind kind, Channel channel, double omega, double dt, int n) {
    switch (kind) {
    case KernelKind::controlled: return eta_kernel(channel, omega, dt, n);
    case KernelKind::reference: return free_kernel(omega, dt, n);
    case KernelKind::unpulsed: return unpulsed_kernel(channel, omega, dt, n);
    }
    return {};
}

double wrap_phase(double phi) {
    double r = std::remainder(phi, kTwoPi);
    if (r <= -std::numbers::pi) {
        r += kTwoPi;
    }
    return r;
}

void require_cycles(int n_cycles, const char* who) {
    if (n_cycles < 1) {
        throw InvalidInput(std::string(who) + ": n_cycles must be >= 1");
    }
}

} // namespace

std::string_view to_string(Channel channel) {
    return channel == Channel::k1 ? "k1" : "k2";
}

BathSpectrum BathSpectrum::make(double alpha, double n_index, double omega_c, double temperature) {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw InvalidInput("BathSpectrum: alpha must be finite and >= 0");
    }
    if (!std::isfinite(n_index) || n_index < 1.0) {
        throw InvalidInput("BathSpectrum: n_index must be >= 1; sub-Ohmic baths make the "
                           "finite-temperature dephasing integral diverge at w -> 0");
    }
    if (!std::isfinite(omega_c) || omega_c <= 0.0) {
        throw InvalidInput("BathSpectrum: omega_c must be finite and > 0");
    }
    if (!std::isfinite(temperature) || temperature < 0.0) {
        throw InvalidInput("BathSpectrum: temperature must be finite and >= 0");
    }
    return BathSpectrum(alpha, n_index, omega_c, temperature);
}

double BathSpectrum::density(double omega) const {
    return 0.25 * alpha_ * std::pow(omega, n_index_) * std::exp(-omega / omega_c_);
}

ControlParams ControlParams::make(double delta_t, int n_cycles) {
    if (!std::isfinite(delta_t) || delta_t <= 0.0) {
        throw InvalidInput("ControlParams: delta_t must be finite and > 0");
    }
    require_cycles(n_cycles, "ControlParams");
    return ControlParams(delta_t, n_cycles);
}

Complex f_sum(int n_cycles, double omega, double delta_t) {
    require_cycles(n_cycles, "f_sum");
    // Step phase reduced to (-pi, pi] before the closed form.
    const double step = std::remainder(3.0 * omega * delta_t, kTwoPi);
    const Complex denom = one_minus_expi(step);
    if (std::abs(denom) < kResonance) {
        Complex acc{0.0, 0.0};
        for (int k = 0; k < n_cycles; ++k) {
            acc += std::polar(1.0, std::remainder(k * step, kTwoPi));
        }
        return acc;
    }
    return one_minus_expi(std::remainder(n_cycles * step, kTwoPi)) / denom;
}

Complex xi_kernel(double omega, double delta_t) {
    if (!(omega >= 0.0)) {
        throw InvalidInput("xi_kernel: omega must be >= 0");
    }
    const double theta = omega * delta_t;
    if (std::abs(theta) < kSmallTheta) {
        // (2/w)(1 - e^{i theta}) = 2 dt (theta/2 - theta^3/24 - i (1 - theta^2/6)) + O(theta^4)
        const double t2 = theta * theta;
        return 2.0 * delta_t * Complex(0.5 * theta - theta * t2 / 24.0, -(1.0 - t2 / 6.0));
    }
    return (2.0 / omega) * one_minus_expi(theta);
}

Complex eta_kernel(Channel channel, double omega, double delta_t, int n_cycles) {
    const double theta = omega * delta_t;
    return 0.5 * f_sum(n_cycles, omega, delta_t) * xi_kernel(omega, delta_t) *
           segment_sum(controlled_weights(channel), theta);
}

Complex free_kernel(double omega, double delta_t, int n_cycles) {
    return f_sum(n_cycles, omega, delta_t) * xi_kernel(omega, delta_t);
}

Complex unpulsed_kernel(Channel channel, double omega, double delta_t, int n_cycles) {
    require_cycles(n_cycles, "unpulsed_kernel");
    return 0.5 * unpulsed_weight(channel) * xi_kernel(omega, 3.0 * n_cycles * delta_t);
}

double thermal_factor(double omega, double temperature) {
    if (temperature <= 0.0) {
        return 1.0;
    }
    return 1.0 / std::tanh(omega / (2.0 * temperature));
}

double gamma_integrand(KernelKind kind, Channel channel, const BathSpectrum& spectrum,
                       const ControlParams& ctrl, double omega) {
    if (omega <= 0.0) {
        omega = 0.0;
    }
    const double k2 = std::norm(kernel(kind, channel, omega, ctrl.delta_t(), ctrl.n_cycles()));
    const double decay = std::exp(-omega / spectrum.omega_c());
    const double temp = spectrum.temperature();
    // w^n coth(w/2T) = w^{n-1} * 2T * x coth(x), x = w/2T: finite as w -> 0.
    double weight = 0.0;
    if (temp > 0.0) {
        const double x = omega / (2.0 * temp);
        const double lower = spectrum.n_index() == 1.0 ? 1.0 : std::pow(omega, spectrum.n_index() - 1.0);
        weight = lower * 2.0 * temp * x_coth(x);
    } else {
        weight = std::pow(omega, spectrum.n_index());
    }
    return 0.25 * spectrum.alpha() * weight * decay * 0.5 * k2;
}

double gamma_integral(KernelKind kind, Channel channel, const BathSpectrum& spectrum,
                      const ControlParams& ctrl, const QuadratureOptions& opts) {
    if (spectrum.alpha() == 0.0) {
        return 0.0;
    }
    const double upper = opts.upper_cutoffs * spectrum.omega_c();
    // Panels no wider than a tenth of the |f|^2 period 2 pi / (3 dt), nor the
    // exponential scale omega_c. For the unpulsed kernel the relevant period is
    // that of xi at the full time 3 N dt.
    const double period = kind == KernelKind::unpulsed
                              ? kTwoPi / ctrl.total_time()
                              : kTwoPi / (3.0 * ctrl.delta_t());
    const double max_width = opts.panel_scale * std::min(spectrum.omega_c(), period / 10.0);
    const auto n_panels = static_cast<std::size_t>(std::ceil(upper / max_width));
    const double width = upper / static_cast<double>(n_panels);

    auto f = [&](double w) { return gamma_integrand(kind, channel, spectrum, ctrl, w); };
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t p = 0; p < n_panels; ++p) {
        const double a = width * static_cast<double>(p);
        const double b = p + 1 == n_panels ? upper : width * static_cast<double>(p + 1);
        double err = 0.0;
        total += Rule::integrate(f, a, b, opts.max_depth, opts.rel_tol * 1e-2, &err);
        total_err += err;
    }
    if (!std::isfinite(total) || total_err > opts.rel_tol * std::abs(total)) {
        throw NumericalFailure("gamma_integral: quadrature did not converge (value " +
                                   format_significant(total, 12) + ", error estimate " +
                                   format_significant(total_err, 3) + ")",
                               total_err);
    }
    return total;
}

double gamma_controlled(Channel channel, const BathSpectrum& spectrum, const ControlParams& ctrl,
                        const QuadratureOptions& opts) {
    return gamma_integral(KernelKind::controlled, channel, spectrum, ctrl, opts);
}

double gamma_free(Channel channel, const BathSpectrum& spectrum, const ControlParams& ctrl,
                  const QuadratureOptions& opts) {
    return gamma_integral(KernelKind::reference, channel, spectrum, ctrl, opts);
}

double gamma_discrete(KernelKind kind, Channel channel, double omega_k, double g_k,
                      double temperature, const ControlParams& ctrl) {
    if (!(omega_k > 0.0)) {
        throw InvalidInput("gamma_discrete: mode frequency must be > 0");
    }
    const double k2 = std::norm(kernel(kind, channel, omega_k, ctrl.delta_t(), ctrl.n_cycles()));
    return g_k * g_k * 0.5 * k2 * thermal_factor(omega_k, temperature);
}

DephasingResult coherence_trace(LevelPair pair, const BathSpectrum& spectrum_k1,
                                const BathSpectrum& spectrum_k2, const ControlParams& ctrl,
                                bool controlled, double omega20, const QuadratureOptions& opts) {
    if (!(pair == kPair20)) {
        throw InvalidInput("coherence_trace: only the (2,0) coherence is supported");
    }
    const KernelKind kind = controlled ? KernelKind::controlled : KernelKind::reference;
    DephasingResult r;
    r.gamma1 = gamma_integral(kind, Channel::k1, spectrum_k1, ctrl, opts);
    r.gamma2 = gamma_integral(kind, Channel::k2, spectrum_k2, ctrl, opts);
    r.coherence_magnitude = std::exp(-r.gamma1 - r.gamma2);
    r.phase = wrap_phase(-3.0 * ctrl.n_cycles() * omega20 * ctrl.delta_t());
    return r;
}

Complex evolve_coherence(Complex rho02_initial, const DephasingResult& result) {
    return rho02_initial * std::polar(result.coherence_magnitude, result.phase);
}

double quiet_threshold() {
    return std::acos(0.75);
}

QuietSweep quiet_regime_sweep(Channel channel, int points, double tol) {
    if (points < 2) {
        throw InvalidInput("quiet_regime_sweep: need at least 2 points");
    }
    // w = 1, dt = theta; N = 1 so f = 1 and the ratio is the bracket alone.
    auto excess = [channel](double theta) {
        return std::norm(eta_kernel(channel, 1.0, theta, 1)) - std::norm(free_kernel(1.0, theta, 1));
    };
    QuietSweep sweep{channel, {}, {}, 0.0};
    std::size_t first_bad = 0;
    for (int i = 1; i <= points; ++i) {
        const double theta = std::numbers::pi * i / points;
        sweep.theta.push_back(theta);
        sweep.ratio.push_back(std::norm(eta_kernel(channel, 1.0, theta, 1)) /
                              std::norm(free_kernel(1.0, theta, 1)));
        if (first_bad == 0 && excess(theta) > 0.0) {
            first_bad = static_cast<std::size_t>(i);
        }
    }
    if (first_bad == 0) {
        sweep.crossover = std::numbers::pi;
        return sweep;
    }
    double lo = first_bad == 1 ? 0.0 : sweep.theta[first_bad - 2];
    double hi = sweep.theta[first_bad - 1];
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    sweep.crossover = 0.5 * (lo + hi);
    return sweep;
}

namespace {

Figure3Cell evaluate_cell(const BathSpectrum& spectrum, double omega_c_t, int n, double dt,
                          const QuadratureOptions& opts) {
    Figure3Cell cell;
    cell.omega_c_t = omega_c_t;
    cell.n_cycles = n;
    cell.delta_t = dt;
    try {
        const auto ctrl = ControlParams::make(dt, n);
        cell.gamma2 = gamma_controlled(Channel::k2, spectrum, ctrl, opts);
        cell.gamma2_free = gamma_free(Channel::k2, spectrum, ctrl, opts);
        cell.decoherence_factor = std::exp(-cell.gamma2);
        cell.free_factor = std::exp(-cell.gamma2_free);
    } catch (const NumericalFailure& e) {
        cell.ok = false;
        cell.error = e.what();
    }
    return cell;
}

} // namespace

Figure3Grid figure3_grid(const BathSpectrum& spectrum, double t_max_over_tc,
                         std::vector<int> n_list, int t_points, unsigned threads,
                         const QuadratureOptions& opts) {
    if (!(t_max_over_tc > 0.0) || t_points < 1) {
        throw InvalidInput("figure3_grid: need t_max > 0 and at least one time point");
    }
    if (n_list.empty()) {
        throw InvalidInput("figure3_grid: empty cycle list");
    }
    std::sort(n_list.begin(), n_list.end());
    n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
    for (int n : n_list) {
        require_cycles(n, "figure3_grid");
    }

    const std::size_t nt = static_cast<std::size_t>(t_points);
    Figure3Grid grid;
    grid.cells.resize(n_list.size() * nt);
    detail::parallel_for(grid.cells.size(), threads, [&](std::size_t i) {
        const int n = n_list[i / nt];
        const double omega_c_t = t_max_over_tc * static_cast<double>(i % nt + 1) / t_points;
        const double t = omega_c_t / spectrum.omega_c();
        grid.cells[i] = evaluate_cell(spectrum, omega_c_t, n, t / (3.0 * n), opts);
    });

    for (const auto& c : grid.cells) {
        grid.failed_cells += c.ok ? 0 : 1;
    }
    for (std::size_t it = 0; it < nt; ++it) {
        for (std::size_t k = 1; k < n_list.size(); ++k) {
            const auto& prev = grid.cells[(k - 1) * nt + it];
            const auto& cur = grid.cells[k * nt + it];
            if (prev.ok && cur.ok && cur.decoherence_factor < prev.decoherence_factor) {
                grid.monotonicity_violations.push_back(
                    "omega_c_t=" + format_significant(cur.omega_c_t, 12) + ": N=" +
                    std::to_string(prev.n_cycles) + " -> N=" + std::to_string(cur.n_cycles) +
                    " factor drops " + format_significant(prev.decoherence_factor, 12) + " -> " +
                    format_significant(cur.decoherence_factor, 12));
            }
        }
    }
    return grid;
}

Figure3Grid figure3_fixed_dt(const BathSpectrum& spectrum, double t_max_over_tc, int n_max,
                             unsigned threads, const QuadratureOptions& opts) {
    if (!(t_max_over_tc > 0.0)) {
        throw InvalidInput("figure3_fixed_dt: need t_max > 0");
    }
    require_cycles(n_max, "figure3_fixed_dt");
    const double dt = t_max_over_tc / spectrum.omega_c() / (3.0 * n_max);
    Figure3Grid grid;
    grid.cells.resize(static_cast<std::size_t>(n_max));
    detail::parallel_for(grid.cells.size(), threads, [&](std::size_t i) {
        const int n = static_cast<int>(i) + 1;
        grid.cells[i] = evaluate_cell(spectrum, 3.0 * n * dt * spectrum.omega_c(), n, dt, opts);
    });
    for (const auto& c : grid.cells) {
        grid.failed_cells += c.ok ? 0 : 1;
    }
    return grid;
}

} // namespace lambda_decouple
