#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ltcoin/errors.hpp"
#include "ltcoin/source_model.hpp"
#include "oracles.hpp"

using namespace ltcoin;

TEST(SourceModel, KappaAndAngles) {
    const FlawModel m(0.063, Protocol::BB84);
    EXPECT_DOUBLE_EQ(m.kappa(), 1.0 + 0.063 / std::numbers::pi);
    EXPECT_EQ(theta_for(Setting::Z0, FlawModel(0.2, Protocol::BB84)), 0.0);
    EXPECT_NEAR(theta_for(Setting::Z1, FlawModel(0.0, Protocol::BB84)), 1.5707963267948966, 1e-15);
    EXPECT_NEAR(theta_for(Setting::X1, m), 3.0 * (std::numbers::pi + 0.063) / 4.0, 1e-15);
    EXPECT_NEAR(theta_for(Setting::X1, m), 2.403444, 1e-6);
}

TEST(SourceModel, RejectsOutOfRangeDelta) {
    EXPECT_THROW(FlawModel(-0.1, Protocol::BB84), InvalidArgument);
    EXPECT_THROW(FlawModel(std::numbers::pi, Protocol::ThreeState), InvalidArgument);
    EXPECT_THROW(FlawModel(std::nan(""), Protocol::ThreeState), InvalidArgument);
    EXPECT_THROW(theta_for(Setting::X1, FlawModel(0.1, Protocol::ThreeState)), InvalidArgument);
}

TEST(SourceModel, QubitStatesMatchOracle) {
    for (double d : {0.0, 0.063, 0.3, 1.0, 2.5}) {
        const FlawModel m(d, Protocol::BB84);
        for (Setting s : settings(Protocol::BB84)) {
            const QubitState v = qubit_state(s, m);
            EXPECT_NEAR(v.norm(), 1.0, 1e-12);
            EXPECT_LT((v - oracle::state(oracle::multiple(s), d)).cwiseAbs().maxCoeff(), 1e-15);
        }
    }
    const QubitState zx = qubit_state(Setting::X0, FlawModel(0.0, Protocol::ThreeState));
    EXPECT_NEAR(zx(0), 0.70711, 1e-5);
    EXPECT_NEAR(zx(1), 0.70711, 1e-5);
    const QubitState z0 = qubit_state(Setting::Z0, FlawModel(1.3, Protocol::ThreeState));
    EXPECT_EQ(z0(0), 1.0);
    EXPECT_EQ(z0(1), 0.0);
}

TEST(SourceModel, Q0Values) {
    EXPECT_EQ(q0(FlawModel(0.0, Protocol::ThreeState)), 0.5);
    EXPECT_NEAR(q0(FlawModel(0.063, Protocol::ThreeState)), 0.515747, 1e-6);
    EXPECT_NEAR(q0(FlawModel(std::numbers::pi / 2, Protocol::ThreeState)), 0.853553, 1e-6);
    double prev = 0.0;
    for (double d = 0.0; d < 3.1; d += 0.05) {
        const double q = q0(FlawModel(d, Protocol::BB84));
        // squared norm of half the Z-state difference
        const Eigen::Vector2d diff = (oracle::state(0, d) - oracle::state(2, d)) / 2.0;
        EXPECT_NEAR(q, diff.squaredNorm(), 1e-14);
        EXPECT_GT(q, prev);
        prev = q;
    }
}

TEST(SourceModel, Overlaps) {
    const FlawModel b0(0.0, Protocol::BB84);
    EXPECT_EQ(overlap(Setting::Z0, Setting::Z1, b0), 0.0);
    EXPECT_NEAR(overlap(Setting::Z0, Setting::X0, FlawModel(0.0, Protocol::ThreeState)), 0.707107, 1e-6);
    EXPECT_NEAR(overlap(Setting::Z0, Setting::Z1, FlawModel(0.063, Protocol::BB84)), -0.031495, 1e-6);
    for (double d : {0.0, 0.063, 0.7, 2.0}) {
        const FlawModel m(d, Protocol::BB84);
        const Eigen::MatrixXd t = pairwise_overlaps(m);
        for (Setting i : settings(Protocol::BB84)) {
            EXPECT_EQ(overlap(i, i, m), 1.0);
            for (Setting j : settings(Protocol::BB84)) {
                EXPECT_EQ(overlap(i, j, m), overlap(j, i, m));
                const double o = oracle::state(oracle::multiple(i), d).dot(oracle::state(oracle::multiple(j), d));
                EXPECT_NEAR(t(index(i), index(j)), o, 1e-15);
            }
        }
    }
}

TEST(SourceModel, EpsilonComposition) {
    EXPECT_EQ(combine_epsilons({}), 0.0);
    EXPECT_EQ(combine_epsilons({0.25}), 0.25);
    EXPECT_NEAR(combine_epsilons({1e-3, 1e-3}), 1.999e-3, 1e-15);
    EXPECT_EQ(combine_epsilons({0.1, 0.3, 0.05}), combine_epsilons({0.05, 0.1, 0.3}));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng);
        EXPECT_LE(combine_epsilons({a, b}), a + b);
    }
    EXPECT_THROW(combine_epsilons({1.5}), InvalidArgument);
    EXPECT_EQ(tha_epsilon(0.0, 100.0), 0.0);
    EXPECT_NEAR(tha_epsilon(1e-8, 100.0), 1e-6, 1e-20);
    EXPECT_EQ(tha_epsilon(1.0, 2.0), 1.0);
    const auto b = SideChannelBudget::from_components({{"tha", 1e-3}, {"mode", 1e-3}});
    EXPECT_NEAR(b.epsilon, 1.999e-3, 1e-15);
    EXPECT_EQ(b.components.size(), 2u);
}

TEST(SourceModel, Parsing) {
    EXPECT_EQ(parse_protocol("bb84"), Protocol::BB84);
    EXPECT_EQ(parse_protocol("three-state"), Protocol::ThreeState);
    EXPECT_THROW(parse_protocol("b92"), InvalidArgument);
    for (Setting s : settings(Protocol::BB84)) EXPECT_EQ(parse_setting(to_string(s)), s);
}
