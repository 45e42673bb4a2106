// oracle.hpp: brute-force evolution of the atom coupled to a few truncated
// bosonic modes, used to check the analytic dephasing exponents.
//
// Composite basis index = level * D_E + env, with the environment index
// running over the modes in the given order (first mode slowest).

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lambda_decouple/dephasing.hpp"
#include "lambda_decouple/qutrit.hpp"
#include "lambda_decouple/schedule.hpp"

namespace lambda_decouple {

inline constexpr double kOccupancyLimit = 1e-10;

struct TruncatedMode {
    double omega_k = 1.0;
    double g_k = 0.0;
    Channel channel = Channel::k1;
    int fock_cutoff = 2;
};

struct OracleLimits {
    std::size_t max_modes = 3;
    std::size_t max_dimension = 3 * 64 * 64 * 64;
};

enum class TruncationPolicy { enforce, warn };

// Population of the highest retained Fock level in the renormalized
// truncated thermal state.
double top_level_occupancy(const TruncatedMode& mode, double temperature);

// Boltzmann state on the truncated ladder, renormalized to unit trace; the
// vacuum at T = 0. Under TruncationPolicy::enforce a top-level occupancy of
// kOccupancyLimit or more throws TruncationError.
Eigen::MatrixXcd thermal_mode_state(const TruncatedMode& mode, double temperature,
                                    TruncationPolicy policy = TruncationPolicy::enforce);

// H0 (x) I + I (x) sum w_k a_k^dag a_k + sum_k sz(channel_k) (x) g_k (a_k^dag + a_k).
Eigen::MatrixXcd build_total_hamiltonian(const SystemLevels& levels,
                                         const std::vector<TruncatedMode>& modes,
                                         const OracleLimits& limits = {});

struct CompositeState {
    Eigen::MatrixXcd rho;
    std::vector<int> mode_dims;

    std::size_t env_dim() const;
};

CompositeState product_state(const Operator3& rho_system, const std::vector<Eigen::MatrixXcd>& mode_states);

// Eigendecomposition of a Hermitian generator, reused for every segment length.
class FreePropagator {
public:
    explicit FreePropagator(const Eigen::MatrixXcd& hamiltonian);

    Eigen::MatrixXcd unitary(double duration) const;
    Eigen::Index dim() const { return vectors_.rows(); }

private:
    Eigen::MatrixXcd vectors_;
    Eigen::VectorXd values_;
};

CompositeState evolve_segment(const CompositeState& state, const Eigen::MatrixXcd& hamiltonian,
                              double duration);
CompositeState evolve_segment(const CompositeState& state, const FreePropagator& propagator,
                              double duration);

// rho -> (g (x) I_E) rho (g (x) I_E)^dagger.
CompositeState apply_pulse(const CompositeState& state, PulseLabel element);

// Trace over the bath modes.
Operator3 reduced_system(const CompositeState& state);

enum class PulseHandling { apply, suppress };

struct OracleOptions {
    PulseHandling pulses = PulseHandling::apply;
    TruncationPolicy truncation = TruncationPolicy::enforce;
    OracleLimits limits{};
    bool check_positivity = true;
};

struct OracleResult {
    std::vector<double> times;  // t = 0 and every cycle boundary 3 n dt
    std::vector<double> rho02_magnitude;
    std::vector<double> rho02_phase;
    std::vector<Eigen::Vector3d> populations;
    std::vector<Operator3> reduced;  // full reduced system state at each time
    double max_trace_drift = 0.0;
    double max_population_drift = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    std::vector<std::string> warnings;
};

OracleResult run_oracle(const SystemLevels& levels, const std::vector<TruncatedMode>& modes,
                        double temperature, const CycleSchedule& schedule,
                        const Operator3& rho_system_initial, const OracleOptions& options = {});

// Discrete-mode analytic |rho02| at t = 0 and after each of n_cycles cycles.
// Modes are independent, so exponents add. `controlled` selects the pulsed
// kernel eta; otherwise the unpulsed displacement kernel over 3 n dt.
std::vector<double> analytic_coherence_magnitudes(const std::vector<TruncatedMode>& modes,
                                                  double temperature, double delta_t,
                                                  int n_cycles, bool controlled,
                                                  double rho02_initial_magnitude);

inline constexpr const char* kComparatorConvention =
    "Gamma = g^2 |K|^2 / 2 * coth(w/2T); xi = (2/w)(1 - exp(i w dt)); "
    "sigma_z coupling enters without a 1/2 factor";

struct ComparisonReport {
    double max_deviation = 0.0;
    std::size_t worst_index = 0;
    double tolerance = 1e-6;
    bool pass = true;
    std::vector<std::string> warnings;
    std::string convention = kComparatorConvention;
};

// PASS iff every recorded magnitude agrees to `tolerance` and the oracle ran
// without truncation warnings.
ComparisonReport compare_analytic(const OracleResult& oracle, const std::vector<double>& analytic,
                                  double tolerance = 1e-6);

} // namespace lambda_decouple
