// qutrit.hpp: 3x3 operator algebra for the Lambda-configuration atom
//
// Basis order is (|0>, |1>, |2>) everywhere; units hbar = k_B = 1.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lambda_decouple {

using Complex = std::complex<double>;
using Operator3 = Eigen::Matrix3cd;

inline constexpr double kOperatorTolerance = 1e-12;

// Largest entry magnitude; the norm used for every operator identity check.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

bool is_finite(const Operator3& a);
bool is_unitary(const Operator3& u, double tol = kOperatorTolerance);
bool is_hermitian(const Operator3& a, double tol = kOperatorTolerance);

// One of the three transitions (2,1), (2,0), (1,0). Construct with make().
class LevelPair {
public:
    static LevelPair make(int upper, int lower);

    int upper() const noexcept { return upper_; }
    int lower() const noexcept { return lower_; }

    friend bool operator==(const LevelPair&, const LevelPair&) = default;

private:
    LevelPair(int upper, int lower) : upper_(upper), lower_(lower) {}
    int upper_;
    int lower_;
};

inline const LevelPair kPair21 = LevelPair::make(2, 1);
inline const LevelPair kPair20 = LevelPair::make(2, 0);
inline const LevelPair kPair10 = LevelPair::make(1, 0);

enum class Axis { z, x, y, plus, minus };

// sigma_z = |u><u| - |l><l|, sigma_x = |u><l| + |l><u|, sigma_y = i(|u><l| - |l><u|),
// sigma_+ = |u><l|, sigma_- = |l><u|.
Operator3 sigma_op(Axis axis, LevelPair pair);

// Bare level energies. Frequencies are differences, all strictly positive.
class SystemLevels {
public:
    static SystemLevels make(double e0, double e1, double e2);

    double e0() const noexcept { return e0_; }
    double e1() const noexcept { return e1_; }
    double e2() const noexcept { return e2_; }
    double omega10() const noexcept { return e1_ - e0_; }
    double omega20() const noexcept { return e2_ - e0_; }
    double omega21() const noexcept { return e2_ - e1_; }

private:
    SystemLevels(double e0, double e1, double e2) : e0_(e0), e1_(e1), e2_(e2) {}
    double e0_, e1_, e2_;
};

Operator3 build_h0(const SystemLevels& levels);

// (w10/3) sz(1,0) + (w20/3) sz(2,0) + (w21/3) sz(2,1) + (E0+E1+E2)/3 * I.
Operator3 h0_from_transition_sum(const SystemLevels& levels);

enum class BangBang { h1, h2 };

// The tabulated bang-bang elements h1, h2.
Operator3 build_bb_element(BangBang which);

// exp(i*sign*pi/2 * sigma_x(pair)) in closed form: i*sign*sigma_x on the
// two-level block, identity on the spectator level.
Operator3 half_pi_pulse(LevelPair pair, int sign);

// h1 = exp(i pi/2 sx(2,1)) exp(i pi/2 sx(2,0)),
// h2 = exp(-i pi/2 sx(2,0)) exp(-i pi/2 sx(2,1)).
Operator3 bb_pulse_product(BangBang which);

class DecouplingGroup {
public:
    // Elements must be finite unitaries and the first must be the identity.
    static DecouplingGroup make(std::vector<Operator3> elements);

    // {I, h1, h2}.
    static DecouplingGroup lambda_group();

    const std::vector<Operator3>& elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }

private:
    explicit DecouplingGroup(std::vector<Operator3> elements) : elements_(std::move(elements)) {}
    std::vector<Operator3> elements_;
};

// (1/|G|) sum_k g_k^dagger A g_k.
Operator3 symmetrize(const Operator3& a, const DecouplingGroup& group);

// If a == phase * b, returns the phase. The reference entry is the first
// (row-major) entry of b with magnitude above 1e-8.
std::optional<Complex> phase_equivalent(const Operator3& a, const Operator3& b,
                                        double tol = 1e-10);

struct ClosureEntry {
    std::size_t left;
    std::size_t right;
    std::optional<std::size_t> product;  // index of the matching element, if any
    Complex phase{1.0, 0.0};             // g_left * g_right == phase * g_product
};

struct ClosureReport {
    std::vector<ClosureEntry> table;  // row-major over (left, right)
    bool closed = true;
};

ClosureReport verify_group_closure(const DecouplingGroup& group);

// Nine lines "row col re im", row-major, 17 significant digits.
std::string dump_operator(const Operator3& a);

} // namespace lambda_decouple
