#include "ltcoin/lt_decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ltcoin/errors.hpp"

namespace ltcoin {

namespace {

constexpr double kDenominatorFloor = 1e-14;
constexpr double kResidualTol = 1e-10;

Eigen::Matrix2d projector(const Eigen::Vector2d& v) { return v * v.transpose(); }

Eigen::Vector4d kron(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    Eigen::Vector4d out;
    out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
    return out;
}

double checked_ratio(double num, double den) {
    if (std::abs(den) < kDenominatorFloor) throw DegenerateGeometry("vanishing LT coefficient denominator");
    return num / den;
}

}  // namespace

LtCoefficients lt_coeffs(const FlawModel& model) {
    LtCoefficients c;
    c.protocol = model.protocol;
    const double d = model.delta;
    if (model.protocol == Protocol::ThreeState) {
        const double s = sin_quarter(1, d);
        c.c1 = checked_ratio(1.0, 2.0 * s * s);
        c.c2 = 2.0 * c.c1 - 1.0;
        return c;
    }
    const double ch = cos_quarter(2, d);   // cos(kappa*pi/2)
    const double cf = -std::cos(d);        // cos(kappa*pi)
    c.c1 = checked_ratio(ch, cf - ch);
    c.c2 = checked_ratio(ch, ch - 1.0);
    c.c3 = checked_ratio(1.0 + ch, ch - cf);
    if (c.c1 < 0.0 || c.c2 < 0.0 || c.c3 < 0.0) {
        throw DegenerateGeometry("BB84 LT coefficients negative (delta >= pi/3)");
    }
    return c;
}

std::pair<QubitState, QubitState> virtual_states(const FlawModel& model) {
    const double q = q0(model);
    if (q <= 0.0 || q >= 1.0) throw DegenerateGeometry("q0 outside (0, 1)");
    const QubitState z0 = qubit_state(Setting::Z0, model);
    const QubitState z1 = qubit_state(Setting::Z1, model);
    QubitState v0 = (z0 + z1) / (2.0 * std::sqrt(1.0 - q));
    QubitState v1 = (z0 - z1) / (2.0 * std::sqrt(q));
    return {v0, v1};
}

double primed_basis_residual(const FlawModel& model, const LtCoefficients& c, const PrimedBasis& basis) {
    const auto [vir0, vir1] = virtual_states(model);
    const Eigen::Vector2d e0(1.0, 0.0);
    const Eigen::Vector2d e1(0.0, 1.0);
    Eigen::Vector4d lhs;
    Eigen::Vector4d rhs;
    if (model.protocol == Protocol::ThreeState) {
        lhs = std::sqrt(c.c2) * kron(basis.zero, qubit_state(Setting::X0, model)) + kron(basis.one, vir1);
        rhs = std::sqrt(c.c1) * (kron(e0, qubit_state(Setting::Z0, model)) + kron(e1, qubit_state(Setting::Z1, model)));
    } else {
        lhs = std::sqrt(c.c1) * kron(basis.zero, qubit_state(Setting::Z0, model)) + kron(basis.one, vir1);
        rhs = std::sqrt(c.c2) * kron(e0, qubit_state(Setting::Z1, model)) +
              std::sqrt(c.c3) * kron(e1, qubit_state(Setting::X1, model));
    }
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

PrimedBasis primed_basis(const FlawModel& model) {
    const LtCoefficients c = lt_coeffs(model);
    const double d = model.delta;
    PrimedBasis b;
    if (model.protocol == Protocol::ThreeState) {
        const double cq = cos_quarter(1, d);
        const double sq = sin_quarter(1, d);
        const double csc2 = 1.0 / (sq * sq);
        const double cot2 = (cq * cq) / (sq * sq);
        const double a = cq * std::sqrt(csc2 / (2.0 * cot2));
        const double bb = 0.5 * std::sqrt(csc2 * (1.0 - cos_quarter(2, d)));
        b.zero = Eigen::Vector2d(a, bb);
        b.one = Eigen::Vector2d(bb, -a);
    } else {
        const double ch = cos_quarter(2, d);
        const double cf = -std::cos(d);
        const double s = std::sqrt((cf - ch) / (ch - 1.0));
        const double t = std::sqrt(-2.0 * ch);
        b.zero = Eigen::Vector2d(s, -t);
        b.one = Eigen::Vector2d(-t, -s);
    }
    if (primed_basis_residual(model, c, b) > kResidualTol) {
        b.one = -b.one;
        if (primed_basis_residual(model, c, b) > kResidualTol) {
            throw InternalConsistency("primed basis fails its defining identity");
        }
    }
    return b;
}

double verify_lt_identity(const FlawModel& model) {
    const LtCoefficients c = lt_coeffs(model);
    const auto [vir0, vir1] = virtual_states(model);
    const Eigen::Matrix2d p0z = projector(qubit_state(Setting::Z0, model));
    const Eigen::Matrix2d p1z = projector(qubit_state(Setting::Z1, model));
    const Eigen::Matrix2d p0x = projector(qubit_state(Setting::X0, model));
    Eigen::Matrix2d first;
    if (model.protocol == Protocol::ThreeState) {
        first = c.c2 * p0x + projector(vir1) - c.c1 * p0z - c.c1 * p1z;
    } else {
        const Eigen::Matrix2d p1x = projector(qubit_state(Setting::X1, model));
        first = c.c1 * p0z + projector(vir1) - c.c2 * p1z - c.c3 * p1x;
    }
    const Eigen::Matrix2d second = projector(vir0) - p0x;
    return std::max(first.cwiseAbs().maxCoeff(), second.cwiseAbs().maxCoeff());
}

}  // namespace ltcoin
