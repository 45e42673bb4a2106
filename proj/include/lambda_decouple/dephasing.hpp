// dephasing.hpp: filter kernels and dephasing exponents for the pulsed
// Lambda atom coupled to a bosonic bath through sigma_z(2,0) (channel k1)
// and sigma_z(2,1) (channel k2).
//
// Conventions. The mode coupling g_k is absorbed into the spectral density,
// so the kernels are dimensionless-coupling versions:
//
//   xi(w, dt)      = (2/w) (1 - e^{i w dt})
//   f(N, w, dt)    = sum_{n=1..N} e^{3i(n-1) w dt}
//   eta_k1         = -1/2 f xi (2 - e^{i w dt} - e^{2i w dt})
//   eta_k2         = -1/2 f xi (1 + e^{i w dt} - 2 e^{2i w dt})
//
// and an exponent is Gamma = int_0^inf I(w) |K(w)|^2 / 2 coth(w / 2T) dw with
// I(w) = (alpha/4) w^n e^{-w/w_c}. For a single discrete mode the same
// expression holds with I(w) dw replaced by g_k^2.

#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "lambda_decouple/qutrit.hpp"

namespace lambda_decouple {

enum class Channel { k1, k2 };

std::string_view to_string(Channel channel);

class BathSpectrum {
public:
    // Rejects alpha < 0, n_index < 1 (sub-Ohmic), omega_c <= 0, temperature < 0.
    static BathSpectrum make(double alpha, double n_index, double omega_c, double temperature);

    double alpha() const noexcept { return alpha_; }
    double n_index() const noexcept { return n_index_; }
    double omega_c() const noexcept { return omega_c_; }
    double temperature() const noexcept { return temperature_; }

    // (alpha/4) w^n e^{-w/w_c}
    double density(double omega) const;

    BathSpectrum with_alpha(double alpha) const { return make(alpha, n_index_, omega_c_, temperature_); }

private:
    BathSpectrum(double a, double n, double wc, double t)
        : alpha_(a), n_index_(n), omega_c_(wc), temperature_(t) {}
    double alpha_, n_index_, omega_c_, temperature_;
};

class ControlParams {
public:
    static ControlParams make(double delta_t, int n_cycles);

    double delta_t() const noexcept { return delta_t_; }
    int n_cycles() const noexcept { return n_cycles_; }
    double total_time() const noexcept { return 3.0 * delta_t_ * n_cycles_; }

private:
    ControlParams(double dt, int n) : delta_t_(dt), n_cycles_(n) {}
    double delta_t_;
    int n_cycles_;
};

struct DephasingResult {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double coherence_magnitude = 1.0;  // exp(-gamma1 - gamma2)
    double phase = 0.0;                // -3 N w20 dt wrapped to (-pi, pi]
};

Complex f_sum(int n_cycles, double omega, double delta_t);
Complex xi_kernel(double omega, double delta_t);
Complex eta_kernel(Channel channel, double omega, double delta_t, int n_cycles);

// f * xi, the kernel of the reference exponent Gamma'.
Complex free_kernel(double omega, double delta_t, int n_cycles);

// Displacement kernel of the 0-2 coherence for plain free evolution over
// 3 N dt with no pulses at all: -xi(w, 3 N dt) for k1, -xi(w, 3 N dt)/2 for k2.
Complex unpulsed_kernel(Channel channel, double omega, double delta_t, int n_cycles);

// coth(w / 2T), with the T = 0 limit taken as exactly 1.
double thermal_factor(double omega, double temperature);

struct QuadratureOptions {
    double upper_cutoffs = 50.0;  // integrate on [0, upper_cutoffs * omega_c]
    double rel_tol = 1e-8;
    unsigned max_depth = 20;
    double panel_scale = 1.0;     // multiplies the default maximum panel width
};

enum class KernelKind { controlled, reference, unpulsed };

// int_0^{upper} I(w) |K(w)|^2 / 2 * coth(w / 2T) dw for the chosen kernel.
// Throws NumericalFailure when the achieved error exceeds the tolerance.
double gamma_integral(KernelKind kind, Channel channel, const BathSpectrum& spectrum,
                      const ControlParams& ctrl, const QuadratureOptions& opts = {});

double gamma_controlled(Channel channel, const BathSpectrum& spectrum, const ControlParams& ctrl,
                        const QuadratureOptions& opts = {});
double gamma_free(Channel channel, const BathSpectrum& spectrum, const ControlParams& ctrl,
                  const QuadratureOptions& opts = {});

// Integrand of gamma_integral, exposed for diagnostics and tests.
double gamma_integrand(KernelKind kind, Channel channel, const BathSpectrum& spectrum,
                       const ControlParams& ctrl, double omega);

// Single-mode exponent g^2 |K(w_k)|^2 / 2 coth(w_k / 2T).
double gamma_discrete(KernelKind kind, Channel channel, double omega_k, double g_k,
                      double temperature, const ControlParams& ctrl);

// Only the (2,0) coherence is supported.
DephasingResult coherence_trace(LevelPair pair, const BathSpectrum& spectrum_k1,
                                const BathSpectrum& spectrum_k2, const ControlParams& ctrl,
                                bool controlled, double omega20,
                                const QuadratureOptions& opts = {});

Complex evolve_coherence(Complex rho02_initial, const DephasingResult& result);

// arccos(3/4): the largest w*dt for which |eta|^2 <= |f xi|^2 holds mode by mode.
double quiet_threshold();

struct QuietSweep {
    Channel channel;
    std::vector<double> theta;  // w*dt sample points on (0, pi]
    std::vector<double> ratio;  // |eta|^2 / |f xi|^2 at N = 1
    double crossover = 0.0;     // bisected first point where the ratio exceeds 1
};

// Ratio sweep on `points` equispaced samples, then bisection of the first
// sign change of |eta|^2 - |f xi|^2 down to `tol` in theta.
QuietSweep quiet_regime_sweep(Channel channel, int points = 100, double tol = 1e-13);

struct Figure3Cell {
    double omega_c_t = 0.0;
    int n_cycles = 0;
    double delta_t = 0.0;
    double gamma2 = 0.0;       // controlled, channel k2
    double gamma2_free = 0.0;  // reference exponent Gamma'_2 at the same (dt, N)
    double decoherence_factor = 1.0;
    double free_factor = 1.0;
    bool ok = true;
    std::string error;
};

struct Figure3Grid {
    std::vector<Figure3Cell> cells;  // outer loop N ascending, inner loop t ascending
    // Cells where exp(-Gamma_2) decreases as N grows at fixed t (fixed-t grid only).
    std::vector<std::string> monotonicity_violations;
    std::size_t failed_cells = 0;
};

// Fixed-total-time slicing: for every N in n_list and every t on
// t_max/t_points, 2 t_max/t_points, ..., t_max, dt = t / (3N). Times in 1/omega_c.
Figure3Grid figure3_grid(const BathSpectrum& spectrum, double t_max_over_tc,
                         std::vector<int> n_list, int t_points = 40, unsigned threads = 1,
                         const QuadratureOptions& opts = {});

// Fixed-dt slicing: dt = t_max / (3 n_max), N = 1..n_max, t = 3 N dt.
Figure3Grid figure3_fixed_dt(const BathSpectrum& spectrum, double t_max_over_tc, int n_max,
                             unsigned threads = 1, const QuadratureOptions& opts = {});

} // namespace lambda_decouple
