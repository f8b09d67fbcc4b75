#include "ltcoin/coin.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>
#include <map>
#include <utility>

#include "ltcoin/errors.hpp"

namespace ltcoin {

namespace {

const Eigen::Vector2d kE0(1.0, 0.0);
const Eigen::Vector2d kE1(0.0, 1.0);

// Re<a|b> as a functional of Re<psi_i|psi_j>
CoinFunctional expand(const CoinBranches& br, Protocol p) {
    const auto& a = br.tar;
    const auto& b = br.ref;
    const double scale = br.scale;
    CoinFunctional f;
    f.kind = br.kind;
    f.protocol = p;
    std::map<std::pair<int, int>, double> acc;
    for (const auto& x : a) {
        for (const auto& y : b) {
            if (x.d != y.d) continue;
            const double w = scale * x.w * y.w * x.ancilla.dot(y.ancilla);
            if (w == 0.0) continue;
            if (x.s == y.s) {
                f.constant += w;
                continue;
            }
            const int i = std::min(index(x.s), index(y.s));
            const int j = std::max(index(x.s), index(y.s));
            acc[{i, j}] += w;
        }
    }
    for (const auto& [key, w] : acc) {
        f.terms.push_back({static_cast<Setting>(key.first), static_cast<Setting>(key.second), w});
    }
    return f;
}

void require_probability(double p, const char* name) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument(std::string(name) + " must lie in (0, 1)");
}

}  // namespace

double CoinFunctional::evaluate(const Eigen::MatrixXd& re_overlaps) const {
    double v = constant;
    for (const auto& t : terms) v += t.coeff * re_overlaps(index(t.i), index(t.j));
    return v;
}

double CoinFunctional::coefficient(Setting i, Setting j) const {
    double c = 0.0;
    for (const auto& t : terms) {
        if ((t.i == i && t.j == j) || (t.i == j && t.j == i)) c += t.coeff;
    }
    return c;
}

CoinBranches coin_branches(const FlawModel& model, const LtCoefficients& c, const PrimedBasis& basis) {
    const double q = q0(model);
    CoinBranches br;
    br.kind = CoinKind::LtCoin;
    if (model.protocol == Protocol::ThreeState) {
        br.scale = 1.0 / (1.0 + c.c2 * q);
        br.tar = {
            {0, kE0, Setting::Z0, 0.5},
            {0, kE0, Setting::Z1, 0.5},
            {1, basis.zero, Setting::X0, std::sqrt(c.c2 * q)},
            {1, basis.one, Setting::Z0, 0.5},
            {1, basis.one, Setting::Z1, -0.5},
        };
        br.ref = {
            {0, kE0, Setting::X0, std::sqrt(1.0 - q)},
            {1, kE0, Setting::Z0, std::sqrt(c.c1 * q)},
            {1, kE1, Setting::Z1, std::sqrt(c.c1 * q)},
        };
        return br;
    }
    br.scale = 1.0 / (1.0 + c.c1 * q);
    br.tar = {
        {0, kE0, Setting::Z0, 0.5},
        {0, kE0, Setting::Z1, 0.5},
        {1, basis.zero, Setting::Z0, std::sqrt(c.c1 * q)},
        {1, basis.one, Setting::Z0, 0.5},
        {1, basis.one, Setting::Z1, -0.5},
    };
    br.ref = {
        {0, kE0, Setting::X0, std::sqrt(1.0 - q)},
        {1, kE0, Setting::Z1, std::sqrt(c.c2 * q)},
        {1, kE1, Setting::X1, std::sqrt(c.c3 * q)},
    };
    return br;
}

CoinBranches gllp_branches(const FlawModel& model) {
    if (model.protocol != Protocol::BB84) {
        throw Unsupported("the GLLP coin is defined for BB84 only");
    }
    const double r = 1.0 / std::sqrt(2.0);
    const Eigen::Vector2d plus(r, r);
    const Eigen::Vector2d minus(r, -r);
    CoinBranches br;
    br.kind = CoinKind::Gllp;
    br.tar = {{0, kE0, Setting::Z0, r}, {0, kE1, Setting::Z1, r}};
    br.ref = {{0, plus, Setting::X0, r}, {0, minus, Setting::X1, -r}};
    return br;
}

CoinFunctional coin_functional(const FlawModel& model, const LtCoefficients& c, const PrimedBasis& basis) {
    return expand(coin_branches(model, c, basis), model.protocol);
}

CoinFunctional gllp_functional(const FlawModel& model) { return expand(gllp_branches(model), model.protocol); }

const char* to_string(Event e) {
    switch (e) {
        case Event::Vir0: return "vir0";
        case Event::Vir1: return "vir1";
        case Event::Z0: return "0Z";
        case Event::Z1: return "1Z";
        case Event::X0: return "0X";
        case Event::X1: return "1X";
        case Event::X0Star: return "0X*";
        case Event::X1Star: return "1X*";
    }
    return "?";
}

const char* to_string(Tag t) { return t == Tag::Tar ? "TAR" : "REF"; }

bool is_virtual(Event e) { return e == Event::Vir0 || e == Event::Vir1; }

std::optional<Setting> setting_of(Event e) {
    switch (e) {
        case Event::Z0: return Setting::Z0;
        case Event::Z1: return Setting::Z1;
        case Event::X0: return Setting::X0;
        case Event::X1: return Setting::X1;
        default: return std::nullopt;
    }
}

TagPlan tag_plan(const FlawModel& model, const LtCoefficients& coeffs, double p_za, double p_xa, double p_zb,
                 double p_xb, double p_zc, std::optional<double> q_eps) {
    require_probability(p_za, "p_ZA");
    require_probability(p_xa, "p_XA");
    require_probability(p_zb, "p_ZB");
    require_probability(p_xb, "p_XB");
    require_probability(p_zc, "p_ZC");
    if (std::abs(p_za + p_xa - 1.0) > 1e-12 || std::abs(p_zb + p_xb - 1.0) > 1e-12) {
        throw InvalidArgument("basis probabilities must sum to one");
    }

    TagPlan plan;
    plan.protocol = model.protocol;
    plan.coeffs = coeffs;
    plan.q0 = q0(model);
    plan.q_eps = q_eps.value_or(plan.q0);
    if (!(plan.q_eps >= 0.0 && plan.q_eps <= 1.0)) throw InvalidArgument("q_eps must lie in [0, 1]");
    plan.p_za = p_za;
    plan.p_xa = p_xa;
    plan.p_zb = p_zb;
    plan.p_xb = p_xb;
    plan.p_zc = p_zc;
    plan.p_xc = 1.0 - p_zc;
    for (auto& row : plan.branch) row.fill(-1);

    const double q = plan.q0;
    const double qe = plan.q_eps;
    auto& pe = plan.p_event;
    auto& tar = plan.p_event_given_tag[index(Tag::Tar)];
    auto& ref = plan.p_event_given_tag[index(Tag::Ref)];
    auto& btar = plan.branch[index(Tag::Tar)];
    auto& bref = plan.branch[index(Tag::Ref)];

    pe[index(Event::Vir0)] = (1.0 - qe) * p_za * p_zb;
    pe[index(Event::Vir1)] = qe * p_za * p_zb;
    pe[index(Event::Z0)] = p_za * p_xb / 2.0;
    pe[index(Event::Z1)] = p_za * p_xb / 2.0;
    btar[index(Event::Vir0)] = 0;
    btar[index(Event::Vir1)] = 1;

    double norm = 0.0;
    if (model.protocol == Protocol::ThreeState) {
        norm = 1.0 + coeffs.c2 * q;
        pe[index(Event::X0)] = p_xa * p_xb;
        pe[index(Event::X0Star)] = p_xa * p_zb;
        tar[index(Event::X0)] = coeffs.c2 * q / norm;
        ref[index(Event::X0)] = (1.0 - q) / norm;
        ref[index(Event::Z0)] = coeffs.c1 * q / norm;
        ref[index(Event::Z1)] = coeffs.c1 * q / norm;
        btar[index(Event::X0)] = 1;
        bref[index(Event::X0)] = 0;
        bref[index(Event::Z0)] = 1;
        bref[index(Event::Z1)] = 1;
    } else {
        norm = 1.0 + coeffs.c1 * q;
        pe[index(Event::X0)] = p_xa * p_xb / 2.0;
        pe[index(Event::X1)] = p_xa * p_xb / 2.0;
        pe[index(Event::X0Star)] = p_xa * p_zb / 2.0;
        pe[index(Event::X1Star)] = p_xa * p_zb / 2.0;
        tar[index(Event::Z0)] = coeffs.c1 * q / norm;
        ref[index(Event::X0)] = (1.0 - q) / norm;
        ref[index(Event::Z1)] = coeffs.c2 * q / norm;
        ref[index(Event::X1)] = coeffs.c3 * q / norm;
        btar[index(Event::Z0)] = 1;
        bref[index(Event::X0)] = 0;
        bref[index(Event::Z1)] = 1;
        bref[index(Event::X1)] = 1;
    }
    tar[index(Event::Vir0)] = (1.0 - qe) / norm;
    tar[index(Event::Vir1)] = qe / norm;
    plan.normalization = norm;

    // maximal p_TAR: both virtual events give p_ZA p_ZB norm
    double p_tar = p_za * p_zb * norm;
    for (Event l : kAllEvents) {
        if (is_virtual(l)) continue;
        const double share = tar[index(l)] + ref[index(l)];
        if (share > 0.0) p_tar = std::min(p_tar, pe[index(l)] / share);
    }
    plan.p_tar = p_tar;
    plan.p_ref = p_tar;
    plan.p_c = 2.0 * p_tar;

    for (int t = 0; t < 2; ++t) {
        for (Event l : kAllEvents) {
            double v = 0.0;
            if (is_virtual(l)) {
                v = t == index(Tag::Tar) ? p_tar / (p_za * p_zb * norm) : 0.0;
            } else if (plan.p_event_given_tag[t][index(l)] > 0.0) {
                v = p_tar * plan.p_event_given_tag[t][index(l)] / pe[index(l)];
            }
            plan.p_tag_given_event[t][index(l)] = v;
        }
    }
    for (Event l : kAllEvents) {
        double total = 0.0;
        for (int t = 0; t < 2; ++t) {
            double& v = plan.p_tag_given_event[t][index(l)];
            if (v > 1.0 && v < 1.0 + 1e-12) v = 1.0;
            if (!(v >= 0.0 && v <= 1.0)) throw InternalConsistency("tag probability outside [0, 1]");
            total += v;
        }
        if (total > 1.0 + 1e-12) throw InternalConsistency("tag probabilities exceed one for an event");
    }
    return plan;
}

}  // namespace ltcoin
