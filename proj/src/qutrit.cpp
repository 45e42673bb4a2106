// qutrit.cpp: transition operators, bang-bang group and symmetrization

#include "lambda_decouple/qutrit.hpp"

#include <cmath>
#include <sstream>

#include "lambda_decouple/errors.hpp"
#include "lambda_decouple/format.hpp"

namespace lambda_decouple {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPhaseReference = 1e-8;

Operator3 ket_bra(int row, int col) {
    Operator3 m = Operator3::Zero();
    m(row, col) = 1.0;
    return m;
}

} // namespace

bool is_finite(const Operator3& a) {
    return a.allFinite();
}

bool is_unitary(const Operator3& u, double tol) {
    return is_finite(u) && max_abs(u.adjoint() * u - Operator3::Identity()) <= tol;
}

bool is_hermitian(const Operator3& a, double tol) {
    return is_finite(a) && max_abs(a - a.adjoint()) <= tol;
}

LevelPair LevelPair::make(int upper, int lower) {
    const bool valid = (upper == 2 && lower == 1) || (upper == 2 && lower == 0) ||
                       (upper == 1 && lower == 0);
    if (!valid) {
        throw InvalidInput("LevelPair: expected one of (2,1), (2,0), (1,0); got (" +
                           std::to_string(upper) + "," + std::to_string(lower) + ")");
    }
    return LevelPair(upper, lower);
}

Operator3 sigma_op(Axis axis, LevelPair pair) {
    const int u = pair.upper();
    const int l = pair.lower();
    switch (axis) {
    case Axis::z:
        return ket_bra(u, u) - ket_bra(l, l);
    case Axis::x:
        return ket_bra(u, l) + ket_bra(l, u);
    case Axis::y:
        return kI * (ket_bra(u, l) - ket_bra(l, u));
    case Axis::plus:
        return ket_bra(u, l);
    case Axis::minus:
        return ket_bra(l, u);
    }
    throw InvalidInput("sigma_op: unknown axis");
}

SystemLevels SystemLevels::make(double e0, double e1, double e2) {
    if (!std::isfinite(e0) || !std::isfinite(e1) || !std::isfinite(e2)) {
        throw InvalidInput("SystemLevels: energies must be finite");
    }
    if (!(e0 < e1 && e1 < e2)) {
        throw InvalidInput("SystemLevels: energies must satisfy E0 < E1 < E2");
    }
    return SystemLevels(e0, e1, e2);
}

Operator3 build_h0(const SystemLevels& levels) {
    Operator3 h = Operator3::Zero();
    h(0, 0) = levels.e0();
    h(1, 1) = levels.e1();
    h(2, 2) = levels.e2();
    return h;
}

Operator3 h0_from_transition_sum(const SystemLevels& levels) {
    const double trace_part = (levels.e0() + levels.e1() + levels.e2()) / 3.0;
    return (levels.omega10() / 3.0) * sigma_op(Axis::z, kPair10) +
           (levels.omega20() / 3.0) * sigma_op(Axis::z, kPair20) +
           (levels.omega21() / 3.0) * sigma_op(Axis::z, kPair21) +
           trace_part * Operator3::Identity();
}

Operator3 build_bb_element(BangBang which) {
    Operator3 h = Operator3::Zero();
    if (which == BangBang::h1) {
        h(0, 2) = kI;
        h(1, 0) = -1.0;
        h(2, 1) = kI;
    } else {
        h(0, 1) = -1.0;
        h(1, 2) = -kI;
        h(2, 0) = -kI;
    }
    return h;
}

Operator3 half_pi_pulse(LevelPair pair, int sign) {
    if (sign != 1 && sign != -1) {
        throw InvalidInput("half_pi_pulse: sign must be +1 or -1");
    }
    // cos(pi/2) P + i sin(+-pi/2) sigma_x, with P the block projector; the
    // spectator level carries the identity.
    const int spectator = 3 - pair.upper() - pair.lower();
    const Operator3 block = ket_bra(pair.upper(), pair.upper()) + ket_bra(pair.lower(), pair.lower());
    return std::cos(M_PI / 2.0) * block +
           kI * std::sin(sign * M_PI / 2.0) * sigma_op(Axis::x, pair) +
           ket_bra(spectator, spectator);
}

Operator3 bb_pulse_product(BangBang which) {
    if (which == BangBang::h1) {
        return half_pi_pulse(kPair21, +1) * half_pi_pulse(kPair20, +1);
    }
    return half_pi_pulse(kPair20, -1) * half_pi_pulse(kPair21, -1);
}

DecouplingGroup DecouplingGroup::make(std::vector<Operator3> elements) {
    if (elements.empty()) {
        throw InvalidInput("DecouplingGroup: no elements");
    }
    if (max_abs(elements.front() - Operator3::Identity()) > kOperatorTolerance) {
        throw InvalidInput("DecouplingGroup: first element must be the identity");
    }
    for (std::size_t k = 0; k < elements.size(); ++k) {
        if (!is_unitary(elements[k])) {
            throw InvalidInput("DecouplingGroup: element " + std::to_string(k) + " is not unitary");
        }
    }
    return DecouplingGroup(std::move(elements));
}

DecouplingGroup DecouplingGroup::lambda_group() {
    return make({Operator3::Identity(), build_bb_element(BangBang::h1),
                 build_bb_element(BangBang::h2)});
}

Operator3 symmetrize(const Operator3& a, const DecouplingGroup& group) {
    Operator3 acc = Operator3::Zero();
    for (const auto& g : group.elements()) {
        acc += g.adjoint() * a * g;
    }
    return acc / static_cast<double>(group.size());
}

std::optional<Complex> phase_equivalent(const Operator3& a, const Operator3& b, double tol) {
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            if (std::abs(b(r, c)) > kPhaseReference) {
                const Complex phase = a(r, c) / b(r, c);
                if (std::abs(std::abs(phase) - 1.0) > tol) {
                    return std::nullopt;
                }
                if (max_abs(a - phase * b) > tol) {
                    return std::nullopt;
                }
                return phase;
            }
        }
    }
    return std::nullopt;
}

ClosureReport verify_group_closure(const DecouplingGroup& group) {
    ClosureReport report;
    const auto& el = group.elements();
    for (std::size_t i = 0; i < el.size(); ++i) {
        for (std::size_t j = 0; j < el.size(); ++j) {
            ClosureEntry entry{i, j, std::nullopt, Complex{1.0, 0.0}};
            const Operator3 prod = el[i] * el[j];
            for (std::size_t m = 0; m < el.size(); ++m) {
                if (auto phase = phase_equivalent(prod, el[m])) {
                    entry.product = m;
                    entry.phase = *phase;
                    break;
                }
            }
            report.closed = report.closed && entry.product.has_value();
            report.table.push_back(entry);
        }
    }
    return report;
}

std::string dump_operator(const Operator3& a) {
    std::ostringstream os;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            os << r << ' ' << c << ' ' << format_significant(a(r, c).real(), 17) << ' '
               << format_significant(a(r, c).imag(), 17) << '\n';
        }
    }
    return os.str();
}

} // namespace lambda_decouple
