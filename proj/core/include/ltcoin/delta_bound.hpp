#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltcoin/coin.hpp"
#include "ltcoin/source_model.hpp"

namespace ltcoin {

struct FixedEntry {
    int row;
    int col;
    double value;
};

// Gram matrix over [psi-independent states 0..k-1, side-channel perps k..2k-1].
// objective(G) = base + <weights, G>, equal to the coin functional on feasible G.
struct GramProblem {
    int k = 0;
    int n = 0;
    double epsilon = 0.0;
    CoinKind kind = CoinKind::LtCoin;
    std::vector<FixedEntry> fixed;
    Eigen::MatrixXd weights;
    double base = 1.0;

    int free_count() const;
    bool is_fixed(int row, int col) const;
    double objective(const Eigen::MatrixXd& gram) const;
    // Re<psi_i|psi_j> for the states encoded by a Gram matrix
    Eigen::MatrixXd psi_overlaps(const Eigen::MatrixXd& gram) const;
};

enum class DeltaMethod { Sdp, Analytic, GllpSdp };

const char* to_string(DeltaMethod m);
DeltaMethod parse_delta_method(const std::string& text);

struct DeltaBound {
    double delta = 0.0;
    DeltaMethod method = DeltaMethod::Sdp;
    double certified_lower_objective = 1.0;
    double primal_objective = 1.0;
    double duality_gap = 0.0;
    Eigen::VectorXd certificate;
    double slack_min_eig = 0.0;       // before the diagonal shift
    double slack_min_eig_shifted = 0.0;
    double diagonal_shift = 0.0;
    bool slack_psd = true;
    int newton_steps = 0;
    Eigen::MatrixXd primal_gram;      // feasible Gram matrix attaining primal_objective
};

GramProblem build_gram_problem(const FlawModel& model, const SideChannelBudget& budget,
                               const CoinFunctional& functional);

DeltaBound solve_delta_sdp(const GramProblem& problem, double tol = 1e-9);

DeltaBound delta_analytic_three_state(const FlawModel& model, const SideChannelBudget& budget);

// Right-hand side of the analytic overlap bound, exposed for tests.
double analytic_overlap_lower_bound(const FlawModel& model, double epsilon);

double oracle_search(const GramProblem& problem, int budget_iters, std::uint64_t seed);

// Convenience: Delta for a model, budget and method.
DeltaBound compute_delta(const FlawModel& model, const SideChannelBudget& budget, DeltaMethod method,
                         double tol = 1e-9);

}  // namespace ltcoin
