#pragma once

#include <utility>

#include <Eigen/Dense>

#include "ltcoin/source_model.hpp"

namespace ltcoin {

struct LtCoefficients {
    Protocol protocol = Protocol::ThreeState;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;  // BB84 only
};

// |0'> and |1'> over {|0>_A, |1>_A}
struct PrimedBasis {
    Eigen::Vector2d zero;
    Eigen::Vector2d one;
};

LtCoefficients lt_coeffs(const FlawModel& model);
std::pair<QubitState, QubitState> virtual_states(const FlawModel& model);
PrimedBasis primed_basis(const FlawModel& model);

// Largest entrywise residual of the operator identities at epsilon = 0.
double verify_lt_identity(const FlawModel& model);

// Residual of the 4-component identity that defines the primed basis.
double primed_basis_residual(const FlawModel& model, const LtCoefficients& c, const PrimedBasis& basis);

}  // namespace ltcoin
