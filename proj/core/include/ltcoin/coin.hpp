#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ltcoin/lt_decomposition.hpp"
#include "ltcoin/source_model.hpp"

namespace ltcoin {

enum class CoinKind { LtCoin, Gllp };

struct FunctionalTerm {
    Setting i;
    Setting j;
    double coeff;
};

// value = constant + sum coeff * Re<psi_i|psi_j>, with i != j
struct CoinFunctional {
    CoinKind kind = CoinKind::LtCoin;
    Protocol protocol = Protocol::ThreeState;
    double constant = 0.0;
    std::vector<FunctionalTerm> terms;

    // table indexed by setting index; only the entries used by terms are read
    double evaluate(const Eigen::MatrixXd& re_overlaps) const;
    double coefficient(Setting i, Setting j) const;
};

// One summand w |d>_D |ancilla>_A |psi_s>_B of a target or reference state.
struct CoinBranch {
    int d;
    Eigen::Vector2d ancilla;
    Setting s;
    double w;
};

// |Tar> = sqrt(scale) sum(tar), |Ref> = sqrt(scale) sum(ref)
struct CoinBranches {
    CoinKind kind = CoinKind::LtCoin;
    std::vector<CoinBranch> tar;
    std::vector<CoinBranch> ref;
    double scale = 1.0;
};

CoinBranches coin_branches(const FlawModel& model, const LtCoefficients& coeffs, const PrimedBasis& basis);
CoinBranches gllp_branches(const FlawModel& model);

CoinFunctional coin_functional(const FlawModel& model, const LtCoefficients& coeffs, const PrimedBasis& basis);
CoinFunctional gllp_functional(const FlawModel& model);

enum class Event : int { Vir0 = 0, Vir1, Z0, Z1, X0, X1, X0Star, X1Star };
inline constexpr int kEventCount = 8;
inline constexpr std::array<Event, kEventCount> kAllEvents = {
    Event::Vir0, Event::Vir1, Event::Z0, Event::Z1, Event::X0, Event::X1, Event::X0Star, Event::X1Star};

enum class Tag : int { Tar = 0, Ref = 1 };

const char* to_string(Event e);
const char* to_string(Tag t);
inline int index(Event e) { return static_cast<int>(e); }
inline int index(Tag t) { return static_cast<int>(t); }
bool is_virtual(Event e);
// X-basis measured events whose yields come from the setting with the same label
std::optional<Setting> setting_of(Event e);

struct TagPlan {
    Protocol protocol = Protocol::ThreeState;
    LtCoefficients coeffs;
    double q0 = 0.5;
    double q_eps = 0.5;
    double p_za = 0.9, p_xa = 0.1, p_zb = 0.9, p_xb = 0.1;
    double p_zc = 0.5, p_xc = 0.5;
    double p_tar = 0.0;
    double p_ref = 0.0;
    double p_c = 0.0;
    double normalization = 1.0;  // 1 + c2 q0 (three-state) or 1 + c1 q0 (BB84)

    std::array<double, kEventCount> p_event{};
    std::array<std::array<double, kEventCount>, 2> p_tag_given_event{};
    std::array<std::array<double, kEventCount>, 2> p_event_given_tag{};
    // value of D for (tag, event) in the coin layout, -1 if the event never carries the tag
    std::array<std::array<int, kEventCount>, 2> branch{};

    double tag_given(Tag t, Event l) const { return p_tag_given_event[index(t)][index(l)]; }
    double event_given(Event l, Tag t) const { return p_event_given_tag[index(t)][index(l)]; }
    double event(Event l) const { return p_event[index(l)]; }
    int d_value(Tag t, Event l) const { return branch[index(t)][index(l)]; }
};

TagPlan tag_plan(const FlawModel& model, const LtCoefficients& coeffs, double p_za, double p_xa, double p_zb,
                 double p_xb, double p_zc, std::optional<double> q_eps = std::nullopt);

}  // namespace ltcoin
