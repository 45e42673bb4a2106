// trapezoid_oracle.hpp: brute-force reference for the dephasing integrals.
// Kernels are rebuilt here from their defining sums, independent of the
// library's closed forms and quadrature.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

namespace lambda_decouple::test_support {

enum class OracleKernel { controlled_k1, controlled_k2, reference };

inline std::complex<double> naive_f(int n, double w, double dt) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n; ++k) {
        acc += std::exp(std::complex<double>(0.0, 3.0 * k * w * dt));
    }
    return acc;
}

inline double naive_kernel_norm(OracleKernel kind, double w, double dt, int n) {
    const std::complex<double> i(0.0, 1.0);
    const auto e1 = std::exp(i * w * dt);
    const auto e2 = std::exp(2.0 * i * w * dt);
    const auto xi = (2.0 / w) * (1.0 - e1);
    const auto f = naive_f(n, w, dt);
    switch (kind) {
    case OracleKernel::controlled_k1: return std::norm(-0.5 * f * xi * (2.0 - e1 - e2));
    case OracleKernel::controlled_k2: return std::norm(-0.5 * f * xi * (1.0 + e1 - 2.0 * e2));
    case OracleKernel::reference: return std::norm(f * xi);
    }
    return 0.0;
}

// Ohmic-family integrand (alpha/4) w^n e^{-w/wc} |K|^2/2 coth(w/2T); value at w = 0
// taken from the limit for n = 1.
inline double trapezoid_gamma(OracleKernel kind, double alpha, double n_index, double omega_c,
                              double temperature, double dt, int n_cycles, double upper,
                              std::size_t points) {
    auto integrand = [&](double w) {
        if (w == 0.0) {
            if (kind != OracleKernel::reference || n_index != 1.0) {
                return 0.0;
            }
            const double k0 = std::pow(2.0 * n_cycles * dt, 2);
            const double w_coth = temperature > 0.0 ? 2.0 * temperature : 0.0;
            return 0.25 * alpha * w_coth * 0.5 * k0;
        }
        const double coth = temperature > 0.0 ? 1.0 / std::tanh(w / (2.0 * temperature)) : 1.0;
        return 0.25 * alpha * std::pow(w, n_index) * std::exp(-w / omega_c) * 0.5 *
               naive_kernel_norm(kind, w, dt, n_cycles) * coth;
    };
    const double h = upper / static_cast<double>(points - 1);
    double acc = 0.5 * (integrand(0.0) + integrand(upper));
    for (std::size_t k = 1; k + 1 < points; ++k) {
        acc += integrand(h * static_cast<double>(k));
    }
    return acc * h;
}

} // namespace lambda_decouple::test_support
