#include <gtest/gtest.h>

#include <cmath>

#include "ltcoin/channel.hpp"
#include "ltcoin/errors.hpp"
#include "ltcoin/keyrate.hpp"

using namespace ltcoin;

namespace {
constexpr double kRegressionRate = 0.28832294781898521;
}

namespace {

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (int i = 0; lo + i * step <= hi + 1e-9; ++i) g.push_back(lo + i * step);
    return g;
}

ScanResult run(Protocol p, double delta, double eps, DeltaMethod m = DeltaMethod::Sdp, ScanOptions o = {}) {
    return scan(p, FlawModel(delta, p), SideChannelBudget(eps), RateInputs{}, grid(0, 200, 5), m, o);
}

}  // namespace

TEST(BinaryEntropy, Values) {
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_EQ(binary_entropy(0.5), 1.0);
    EXPECT_NEAR(binary_entropy(0.11), 0.499915958164528, 1e-14);
    EXPECT_NEAR(binary_entropy(0.3), binary_entropy(0.7), 1e-15);
    EXPECT_THROW(binary_entropy(-0.01), InvalidArgument);
    EXPECT_THROW(binary_entropy(1.01), InvalidArgument);
}

TEST(KeyRate, Formula) {
    YieldTable t;
    t.y_z = 0.01;
    const RateInputs r;
    const KeyRate k = key_rate(0.0, t, r);
    EXPECT_DOUBLE_EQ(k.r_per_pulse, 0.81 * 0.01);
    EXPECT_EQ(k.r_bps, k.r_per_pulse * r.rep_rate_hz);
    const KeyRate half = key_rate(0.5, t, r);
    EXPECT_EQ(half.r_per_pulse, 0.0);
    EXPECT_EQ(half.raw, 0.0);
    t.e_z = 0.05;
    const KeyRate neg = key_rate(0.6, t, r);
    EXPECT_LT(neg.raw, 0.0);
    EXPECT_EQ(neg.r_per_pulse, 0.0);
    const KeyRate mid = key_rate(0.02, t, r);
    EXPECT_NEAR(mid.raw, 0.81 * 0.01 * (1 - binary_entropy(0.02) - 1.16 * binary_entropy(0.05)), 1e-17);
    EXPECT_THROW(key_rate(1.2, t, r), InvalidArgument);
}

TEST(RateInputs, Validation) {
    RateInputs r;
    EXPECT_NO_THROW(r.validate());
    r.p_xa = 0.2;
    EXPECT_THROW(r.validate(), InvalidArgument);
    r = RateInputs{};
    r.f_ec = 0.9;
    EXPECT_THROW(r.validate(), InvalidArgument);
    r = RateInputs{};
    r.rep_rate_hz = 0.0;
    EXPECT_THROW(r.validate(), InvalidArgument);
}

TEST(SequentialLimit, ThreeTimesTenToTheEighth) {
    SequentialLimit s{100.0, 100.0, 1.5, 3e8};
    EXPECT_EQ(sequential_fmax(s), 2000.0);
    EXPECT_EQ(sequential_fmax_relativistic(s), 6000.0);
    s.l_act_km = 0.0;
    EXPECT_EQ(sequential_fmax_relativistic(s), sequential_fmax(s));
}

TEST(SequentialLimit, PhysicalSpeedOfLight) {
    const SequentialLimit s{100.0, 100.0};
    EXPECT_LE(std::abs(sequential_fmax(s) - 2000.0) / 2000.0, 7e-4);
    EXPECT_LE(std::abs(sequential_fmax_relativistic(s) - 6000.0) / 6000.0, 7e-4);
}

TEST(SequentialLimit, RatioAndErrors) {
    for (double act : {0.0, 10.0, 55.0, 100.0}) {
        const SequentialLimit s{100.0, act, 1.5};
        const double ratio = sequential_fmax_relativistic(s) / sequential_fmax(s);
        EXPECT_NEAR(ratio, 150.0 / (150.0 - act), 1e-12);
        EXPECT_GE(ratio, 1.0);
        EXPECT_LE(ratio, 3.0 + 1e-12);
    }
    EXPECT_THROW(sequential_fmax(SequentialLimit{0.0, 0.0}), InvalidArgument);
    EXPECT_THROW(sequential_fmax_relativistic(SequentialLimit{10.0, 20.0}), InvalidArgument);
    EXPECT_THROW(sequential_fmax_relativistic(SequentialLimit{10.0, 10.0, 1.0}), InvalidArgument);
}

TEST(Scan, DefaultsAtZeroKm) {
    const ScanResult s = run(Protocol::BB84, 0.063, 1e-6);
    EXPECT_GT(s.rows.front().r_bps, 1e7);
    EXPECT_NEAR(s.rows.front().r_per_pulse, kRegressionRate, 1e-9);
}

TEST(Scan, RowsAreConsistent) {
    const RateInputs r;
    const ScanResult s = run(Protocol::BB84, 0.063, 1e-4);
    ASSERT_EQ(s.rows.size(), 41u);
    for (const auto& row : s.rows) {
        EXPECT_GE(row.r_per_pulse, 0.0);
        EXPECT_EQ(row.r_bps, row.r_per_pulse * r.rep_rate_hz);
        EXPECT_EQ(row.delta_bound, s.delta.delta);
        const ScanRow p = evaluate_point(FlawModel(0.063, Protocol::BB84), s.delta, r, row.distance_km, {});
        EXPECT_EQ(p.r_raw, row.r_raw);
    }
}

TEST(Scan, SmallFlawBarelyMattersWithoutSideChannels) {
    for (Protocol p : {Protocol::ThreeState, Protocol::BB84}) {
        const ScanResult ideal = run(p, 0.0, 0.0);
        const ScanResult shared = run(p, 0.063, 0.0);
        ScanOptions matched_opt;
        matched_opt.receiver_delta = -0.063;
        const ScanResult matched = run(p, 0.063, 0.0, DeltaMethod::Sdp, matched_opt);
        for (std::size_t i = 0; i < ideal.rows.size(); ++i) {
            if (ideal.rows[i].r_per_pulse <= 0.0) continue;
            EXPECT_GE(shared.rows[i].r_per_pulse / ideal.rows[i].r_per_pulse, 0.98) << i;
            EXPECT_GE(matched.rows[i].r_per_pulse / ideal.rows[i].r_per_pulse, 0.99) << i;
        }
    }
}

TEST(Scan, NonincreasingInEpsilon) {
    for (Protocol p : {Protocol::ThreeState, Protocol::BB84}) {
        std::vector<ScanResult> runs;
        for (double eps : {0.0, 1e-6, 1e-4, 1e-3}) runs.push_back(run(p, 0.063, eps));
        for (std::size_t e = 1; e < runs.size(); ++e) {
            for (std::size_t i = 0; i < runs[e].rows.size(); ++i) {
                EXPECT_LE(runs[e].rows[i].r_per_pulse, runs[e - 1].rows[i].r_per_pulse + 1e-15);
            }
        }
    }
}

TEST(Scan, ProtocolOrdering) {
    const ScanResult b = run(Protocol::BB84, 0.063, 1e-6);
    const ScanResult t = run(Protocol::ThreeState, 0.063, 1e-6);
    for (std::size_t i = 0; i < b.rows.size(); ++i) EXPECT_GE(b.rows[i].r_per_pulse, t.rows[i].r_per_pulse);
    const ScanResult b0 = run(Protocol::BB84, 0.063, 0.0);
    const ScanResult t0 = run(Protocol::ThreeState, 0.063, 0.0);
    for (std::size_t i = 0; i < b0.rows.size(); ++i) {
        EXPECT_NEAR(b0.rows[i].r_per_pulse, t0.rows[i].r_per_pulse, 1e-9);
    }
}

TEST(Scan, GllpCoincidesWithoutFlaw) {
    const ScanResult lt = run(Protocol::BB84, 0.0, 1e-6);
    const ScanResult gl = run(Protocol::BB84, 0.0, 1e-6, DeltaMethod::GllpSdp);
    for (std::size_t i = 0; i < lt.rows.size(); ++i) {
        EXPECT_NEAR(lt.rows[i].e_ph_u, gl.rows[i].e_ph_u, 1e-9);
        EXPECT_LE(std::abs(lt.rows[i].r_per_pulse - gl.rows[i].r_per_pulse),
                  1e-9 * std::max(1e-300, lt.rows[i].r_per_pulse));
    }
}

TEST(Scan, GllpLosesKeyWithFlaw) {
    const ScanResult lt = run(Protocol::BB84, 0.063, 1e-6);
    const ScanResult gl = run(Protocol::BB84, 0.063, 1e-6, DeltaMethod::GllpSdp);
    double lt_cut = 0.0, gl_cut = 0.0;
    for (std::size_t i = 0; i < lt.rows.size(); ++i) {
        if (lt.rows[i].r_per_pulse > 0.0 || gl.rows[i].r_per_pulse > 0.0) {
            EXPECT_GT(lt.rows[i].r_per_pulse, gl.rows[i].r_per_pulse);
        }
        if (lt.rows[i].r_per_pulse > 0.0) lt_cut = lt.rows[i].distance_km;
        if (gl.rows[i].r_per_pulse > 0.0) gl_cut = gl.rows[i].distance_km;
    }
    EXPECT_LT(gl_cut, lt_cut);
}

TEST(Scan, AnalyticCloseToSdp) {
    const ScanResult s = run(Protocol::ThreeState, 0.063, 1e-3);
    const ScanResult a = run(Protocol::ThreeState, 0.063, 1e-3, DeltaMethod::Analytic);
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        if (s.rows[i].r_per_pulse > 0.0 && a.rows[i].r_per_pulse > 0.0) {
            EXPECT_LE(std::abs(s.rows[i].r_per_pulse - a.rows[i].r_per_pulse) / s.rows[i].r_per_pulse, 0.05);
        }
    }
}

TEST(Scan, ContinuousInDistance) {
    const auto g = grid(0, 200, 1);
    const ScanResult s = scan(Protocol::BB84, FlawModel(0.063, Protocol::BB84), SideChannelBudget(1e-6), RateInputs{}, g,
                              DeltaMethod::Sdp);
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
        const double a = s.rows[i - 1].r_per_pulse, b = s.rows[i].r_per_pulse;
        if (a > 0.0 && b > 0.0) {
            EXPECT_LE(std::max(a, b) / std::min(a, b), 10.0);
        }
    }
}

TEST(Scan, RejectsBadGrids) {
    const FlawModel m(0.063, Protocol::BB84);
    EXPECT_THROW(scan(Protocol::BB84, m, SideChannelBudget(0.0), RateInputs{}, {}, DeltaMethod::Sdp), InvalidArgument);
    EXPECT_THROW(scan(Protocol::BB84, m, SideChannelBudget(0.0), RateInputs{}, {5.0, 5.0}, DeltaMethod::Sdp),
                 InvalidArgument);
    EXPECT_THROW(scan(Protocol::BB84, m, SideChannelBudget(0.0), RateInputs{}, {0.0}, DeltaMethod::Analytic),
                 Unsupported);
}

TEST(Scan, UndefinedRateNamesDistance) {
    ScanOptions o;
    o.dark_count = 0.0;
    o.det_efficiency = 0.0;
    try {
        scan(Protocol::BB84, FlawModel(0.063, Protocol::BB84), SideChannelBudget(0.0), RateInputs{}, {0.0, 12.5},
             DeltaMethod::Sdp, o);
        FAIL() << "expected UndefinedRate";
    } catch (const UndefinedRate& e) {
        EXPECT_NE(std::string(e.what()).find("distance 0"), std::string::npos) << e.what();
    }
}
