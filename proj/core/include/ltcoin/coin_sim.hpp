#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltcoin/channel.hpp"
#include "ltcoin/coin.hpp"
#include "ltcoin/delta_bound.hpp"
#include "ltcoin/lt_decomposition.hpp"
#include "ltcoin/source_model.hpp"

namespace ltcoin {

// Stateless generator: every (seed, round, draw) triple maps to a fixed uniform in [0, 1).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
    std::uint64_t bits(std::uint64_t round, std::uint32_t draw) const;
    double uniform(std::uint64_t round, std::uint32_t draw) const;

private:
    std::uint64_t seed_;
};

// Detection probabilities of every event in the X basis (outcomes 0X, 1X).
struct EventYields {
    std::array<std::array<double, 2>, kEventCount> y{};

    double odd(Event l, int d) const { return y[index(l)][d == 0 ? 1 : 0]; }
    double det(Event l) const { return y[index(l)][0] + y[index(l)][1]; }
};

EventYields event_yields(const TagPlan& plan, const YieldTable& yields);

struct Tallies {
    std::uint64_t rounds = 0;
    std::uint64_t seed = 0;
    // N_l^{aX}, a in {0, 1}
    std::array<std::array<std::uint64_t, 2>, kEventCount> n_event{};
    // N_{l,t,Z_C}^{aX}
    std::array<std::array<std::array<std::uint64_t, 2>, kEventCount>, 2> n_tagged{};
    // counters filled round by round
    std::array<std::uint64_t, 2> odd_direct{};   // N_{Z_C=z}^odd
    std::array<std::uint64_t, 2> det_direct{};   // N_{Z_C=z}^det
    std::uint64_t coin_rounds = 0;
    std::uint64_t x_marked = 0;
    std::uint64_t x_flips = 0;                   // N_{X_C=1}

    std::uint64_t event_det(Event l) const { return n_event[index(l)][0] + n_event[index(l)][1]; }
    std::uint64_t tagged_det(Tag t, Event l) const {
        return n_tagged[index(t)][index(l)][0] + n_tagged[index(t)][index(l)][1];
    }
    // N_{Z_C=z}^odd and N_{Z_C=z}^det assembled from the tagged strata
    std::uint64_t odd_from_strata(const TagPlan& plan, Tag t) const;
    std::uint64_t det_from_strata(const TagPlan& plan, Tag t) const;

    Tallies& operator+=(const Tallies& other);
};

// x_flip_probability: chance of X_C = 1 in a coin round marked X_C.
Tallies simulate_tally(std::uint64_t rounds, const TagPlan& plan, const YieldTable& yields, std::uint64_t seed,
                       double x_flip_probability = 0.0, std::uint64_t first_round = 0);

struct Check {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double band = 0.0;
    bool pass = false;
};

struct Report {
    std::vector<Check> checks;
    bool all_pass() const;
    std::string to_text() const;
};

// Tag-thinning bands, conditional on the untagged counts and unconditional.
Report band_checks(const Tallies& tallies, const TagPlan& plan, const YieldTable& yields, double sigmas = 6.0);
Report accounting_checks(const Tallies& tallies, const TagPlan& plan);

struct CoinMargin {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double y = 0.0;
    double z = 0.0;
    bool violated = false;
};

CoinMargin check_coin_inequality(const Tallies& tallies, const DeltaBound& delta, const TagPlan& plan);

struct ExplicitStates {
    Eigen::MatrixXd vectors;  // column i realizes Gram index i
    Eigen::MatrixXd psi;      // column s is |psi_s>
    Eigen::VectorXd tar;      // D (x) A (x) B
    Eigen::VectorXd ref;
    Eigen::VectorXd coin;     // C (x) D (x) A (x) B
    double p_flip_states = 0.0;
    double p_flip_functional = 0.0;
};

ExplicitStates explicit_states_from_gram(const Eigen::MatrixXd& gram, const GramProblem& problem,
                                         const CoinFunctional& functional, const CoinBranches& branches);

}  // namespace ltcoin
