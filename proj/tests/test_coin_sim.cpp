#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ltcoin/channel.hpp"
#include "ltcoin/coin.hpp"
#include "ltcoin/coin_sim.hpp"
#include "ltcoin/delta_bound.hpp"
#include "ltcoin/errors.hpp"
#include "ltcoin/lt_decomposition.hpp"
#include "oracles.hpp"

using namespace ltcoin;

namespace {

struct Scenario {
    FlawModel model;
    TagPlan plan;
    YieldTable yields;
};

Scenario scenario(Protocol p, double delta, double km = 20.0, double pd = 1e-8) {
    const FlawModel m(delta, p);
    ChannelParams cp;
    cp.distance_km = km;
    cp.dark_count = pd;
    return {m, tag_plan(m, lt_coeffs(m), 0.9, 0.1, 0.9, 0.1, 0.5), channel_yields(p, m, cp)};
}

bool same(const Tallies& a, const Tallies& b) {
    return a.rounds == b.rounds && a.n_event == b.n_event && a.n_tagged == b.n_tagged &&
           a.odd_direct == b.odd_direct && a.det_direct == b.det_direct && a.coin_rounds == b.coin_rounds &&
           a.x_marked == b.x_marked && a.x_flips == b.x_flips;
}

}  // namespace

TEST(CounterRng, Deterministic) {
    const CounterRng a(7), b(7), c(8);
    EXPECT_EQ(a.bits(10, 2), b.bits(10, 2));
    EXPECT_NE(a.bits(10, 2), c.bits(10, 2));
    EXPECT_NE(a.bits(10, 2), a.bits(10, 3));
    EXPECT_NE(a.bits(10, 2), a.bits(11, 2));
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 100000; ++i) {
        const double u = a.uniform(i, 0);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 6 * std::sqrt(1.0 / 12 / 100000));
}

TEST(EventYields, VirtualRowsFollowLtIdentity) {
    for (Protocol p : {Protocol::ThreeState, Protocol::BB84}) {
        const Scenario s = scenario(p, 0.063);
        const EventYields ey = event_yields(s.plan, s.yields);
        const double q = s.plan.q0;
        for (int a = 0; a < 2; ++a) {
            const Outcome o = a == 0 ? Outcome::X0 : Outcome::X1;
            // (1 - q) P_vir0 + q P_vir1 equals the Z-basis mixture
            const double mix = (1 - q) * ey.y[index(Event::Vir0)][a] + q * ey.y[index(Event::Vir1)][a];
            EXPECT_NEAR(mix, (s.yields.at(Setting::Z0, o) + s.yields.at(Setting::Z1, o)) / 2, 1e-15);
            EXPECT_EQ(ey.y[index(Event::Z0)][a], s.yields.at(Setting::Z0, o));
            EXPECT_EQ(ey.y[index(Event::X0)][a], s.yields.at(Setting::X0, o));
        }
        EXPECT_NEAR(ey.y[index(Event::Vir0)][0], s.yields.at(Setting::X0, Outcome::X0), 1e-15);
    }
}

TEST(SimulateTally, DeterministicAndChunkable) {
    const Scenario s = scenario(Protocol::BB84, 0.063);
    const Tallies a = simulate_tally(200000, s.plan, s.yields, 42);
    const Tallies b = simulate_tally(200000, s.plan, s.yields, 42);
    EXPECT_TRUE(same(a, b));
    Tallies chunked = simulate_tally(70000, s.plan, s.yields, 42);
    chunked += simulate_tally(130000, s.plan, s.yields, 42, 0.0, 70000);
    EXPECT_TRUE(same(a, chunked));
    const Tallies c = simulate_tally(200000, s.plan, s.yields, 43);
    EXPECT_FALSE(same(a, c));
}

TEST(SimulateTally, RejectsBadArguments) {
    const Scenario s = scenario(Protocol::BB84, 0.063);
    EXPECT_THROW(simulate_tally(0, s.plan, s.yields, 1), InvalidArgument);
    EXPECT_THROW(simulate_tally(10, s.plan, s.yields, 1, 1.5), InvalidArgument);
}

TEST(SimulateTally, BandsAndAccounting) {
    for (Protocol p : {Protocol::ThreeState, Protocol::BB84}) {
        const Scenario s = scenario(p, 0.063);
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const Tallies t = simulate_tally(1000000, s.plan, s.yields, seed);
            const Report bands = band_checks(t, s.plan, s.yields);
            EXPECT_TRUE(bands.all_pass()) << bands.to_text();
            EXPECT_GT(bands.checks.size(), 20u);
            const Report acct = accounting_checks(t, s.plan);
            EXPECT_TRUE(acct.all_pass()) << acct.to_text();
        }
    }
}

TEST(SimulateTally, ForbiddenStrataStayEmpty) {
    const Scenario s = scenario(Protocol::ThreeState, 0.063);
    const Tallies t = simulate_tally(300000, s.plan, s.yields, 9);
    EXPECT_EQ(s.plan.tag_given(Tag::Tar, Event::Z0), 0.0);
    EXPECT_EQ(t.tagged_det(Tag::Tar, Event::Z0), 0u);
    EXPECT_EQ(t.tagged_det(Tag::Ref, Event::Vir0), 0u);
    EXPECT_EQ(t.tagged_det(Tag::Tar, Event::X0Star), 0u);
}

TEST(SimulateTally, CorruptedPlanIsDetected) {
    const Scenario s = scenario(Protocol::BB84, 0.063);
    TagPlan bad = s.plan;
    for (auto& v : bad.p_tag_given_event[index(Tag::Ref)]) v *= 0.5;
    const Tallies t = simulate_tally(1000000, bad, s.yields, 42);
    EXPECT_FALSE(band_checks(t, s.plan, s.yields).all_pass());
}

TEST(ReportText, OneLinePerCheck) {
    Report r;
    r.checks.push_back({"a", 1.0, 1.0, 0.0, true});
    r.checks.push_back({"b", 1.0, 3.0, 1.0, false});
    const std::string text = r.to_text();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_NE(text.find("PASS"), std::string::npos);
    EXPECT_NE(text.find("FAIL"), std::string::npos);
    EXPECT_FALSE(r.all_pass());
}

TEST(CoinInequality, HonestRunsHold) {
    for (Protocol p : {Protocol::ThreeState, Protocol::BB84}) {
        const Scenario s = scenario(p, 0.063);
        const DeltaBound d = compute_delta(s.model, SideChannelBudget(1e-3), DeltaMethod::Sdp);
        for (std::uint64_t seed : {11u, 12u, 13u}) {
            const CoinMargin m = check_coin_inequality(simulate_tally(1000000, s.plan, s.yields, seed), d, s.plan);
            EXPECT_FALSE(m.violated);
            EXPECT_GE(m.margin, 0.0);
        }
    }
}

TEST(CoinInequality, VacuousDelta) {
    const Scenario s = scenario(Protocol::BB84, 0.063);
    DeltaBound d;
    d.delta = 1.0;
    const Tallies t = simulate_tally(100000, s.plan, s.yields, 5);
    const CoinMargin m = check_coin_inequality(t, d, s.plan);
    EXPECT_EQ(m.rhs, static_cast<double>(t.det_direct[0]));
    EXPECT_GE(m.margin, 0.0);
}

TEST(CoinInequality, IdealSourceFractionsAgree) {
    const Scenario s = scenario(Protocol::BB84, 0.0, 20.0, 1e-5);
    const Tallies t = simulate_tally(1000000, s.plan, s.yields, 21);
    const double n0 = static_cast<double>(t.det_direct[0]), n1 = static_cast<double>(t.det_direct[1]);
    const double f0 = t.odd_direct[0] / n0, f1 = t.odd_direct[1] / n1;
    const double p = (t.odd_direct[0] + t.odd_direct[1]) / (n0 + n1);
    const double sd = std::sqrt(p * (1 - p) * (1 / n0 + 1 / n1));
    EXPECT_LE(std::abs(f0 - f1), 6 * sd + 1e-12);
}

TEST(CoinInequality, FlipCountBound) {
    const Scenario s = scenario(Protocol::BB84, 0.063);
    const auto f = coin_functional(s.model, s.plan.coeffs, primed_basis(s.model));
    const GramProblem prob = build_gram_problem(s.model, SideChannelBudget(1e-2), f);
    const DeltaBound d = solve_delta_sdp(prob);
    const ExplicitStates st = explicit_states_from_gram(d.primal_gram, prob, f,
                                                        coin_branches(s.model, s.plan.coeffs, primed_basis(s.model)));
    EXPECT_LE(st.p_flip_states, d.delta / 2 + 1e-9);
    const std::uint64_t n = 1000000;
    const Tallies t = simulate_tally(n, s.plan, s.yields, 4, st.p_flip_states);
    const double bound = n * s.plan.p_c * s.plan.p_xc * d.delta / 2;
    const double expected = n * s.plan.p_c * s.plan.p_xc * st.p_flip_states;
    EXPECT_NEAR(static_cast<double>(t.x_flips), expected, 6 * std::sqrt(expected) + 1);
    EXPECT_NEAR(static_cast<double>(t.coin_rounds), n * s.plan.p_c, 6 * std::sqrt(n * s.plan.p_c));
    EXPECT_LE(expected, bound + 1e-6);
}

TEST(ExplicitStates, ZeroEpsilon) {
    std::mt19937_64 rng(31);
    for (Protocol p : {Protocol::ThreeState, Protocol::BB84}) {
        const FlawModel m(0.063, p);
        const auto c = lt_coeffs(m);
        const auto f = coin_functional(m, c, primed_basis(m));
        const GramProblem prob = build_gram_problem(m, SideChannelBudget(0.0), f);
        const ExplicitStates st =
            explicit_states_from_gram(oracle::random_feasible_gram(m, rng), prob, f, coin_branches(m, c, primed_basis(m)));
        EXPECT_NEAR(st.p_flip_states, 0.0, 1e-12);
        EXPECT_NEAR(st.p_flip_functional, 0.0, 1e-12);
        EXPECT_NEAR(st.coin.norm(), 1.0, 1e-12);
    }
}

TEST(ExplicitStates, AgreesWithFunctional) {
    std::mt19937_64 rng(32);
    for (Protocol p : {Protocol::ThreeState, Protocol::BB84}) {
        const FlawModel m(0.063, p);
        const auto c = lt_coeffs(m);
        const auto b = primed_basis(m);
        const auto f = coin_functional(m, c, b);
        const GramProblem prob = build_gram_problem(m, SideChannelBudget(0.05), f);
        for (int i = 0; i < 10; ++i) {
            const Eigen::MatrixXd g = oracle::random_feasible_gram(m, rng);
            const ExplicitStates st = explicit_states_from_gram(g, prob, f, coin_branches(m, c, b));
            EXPECT_NEAR(st.p_flip_states, st.p_flip_functional, 1e-10);
            EXPECT_LE((st.vectors.transpose() * st.vectors - g).cwiseAbs().maxCoeff(), 1e-10);
            for (int j = 0; j < prob.k; ++j) {
                EXPECT_NEAR(st.vectors.col(j).norm(), 1.0, 1e-10);
                EXPECT_NEAR(st.vectors.col(j + prob.k).norm(), 1.0, 1e-10);
                EXPECT_NEAR(st.vectors.col(j).dot(st.vectors.col(j + prob.k)), 0.0, 1e-10);
                EXPECT_NEAR(st.psi.col(j).norm(), 1.0, 1e-10);
            }
        }
    }
}

TEST(ExplicitStates, GllpAgreesWithFunctional) {
    std::mt19937_64 rng(33);
    const FlawModel m(0.063, Protocol::BB84);
    const auto f = gllp_functional(m);
    const GramProblem prob = build_gram_problem(m, SideChannelBudget(0.05), f);
    for (int i = 0; i < 10; ++i) {
        const ExplicitStates st = explicit_states_from_gram(oracle::random_feasible_gram(m, rng), prob, f, gllp_branches(m));
        EXPECT_NEAR(st.p_flip_states, st.p_flip_functional, 1e-10);
    }
}

TEST(ExplicitStates, RejectsInvalidGram) {
    std::mt19937_64 rng(34);
    const FlawModel m(0.063, Protocol::ThreeState);
    const auto c = lt_coeffs(m);
    const auto f = coin_functional(m, c, primed_basis(m));
    const auto br = coin_branches(m, c, primed_basis(m));
    const GramProblem prob = build_gram_problem(m, SideChannelBudget(0.05), f);
    Eigen::MatrixXd g = oracle::random_feasible_gram(m, rng);
    Eigen::MatrixXd not_psd = g;
    not_psd(3, 4) = not_psd(4, 3) = 1.0;
    not_psd(3, 5) = not_psd(5, 3) = -1.0;
    not_psd(4, 5) = not_psd(5, 4) = 1.0;
    EXPECT_THROW(explicit_states_from_gram(not_psd, prob, f, br), InvalidArgument);
    Eigen::MatrixXd wrong_fixed = g;
    wrong_fixed(0, 3) = wrong_fixed(3, 0) = 0.1;
    EXPECT_THROW(explicit_states_from_gram(wrong_fixed, prob, f, br), InvalidArgument);
    EXPECT_THROW(explicit_states_from_gram(Eigen::MatrixXd::Identity(4, 4), prob, f, br), InvalidArgument);
}
