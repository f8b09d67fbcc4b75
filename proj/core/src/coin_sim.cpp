#include "ltcoin/coin_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ltcoin/errors.hpp"
#include "ltcoin/phase_error.hpp"

namespace ltcoin {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum Draw : std::uint32_t { kEvent = 0, kOutcome = 1, kTag = 2, kMark = 3, kFlip = 4 };

double clamp_yield(double v) {
    if (v < -1e-12) throw InternalConsistency("negative virtual yield");
    return std::max(v, 0.0);
}

int odd_index(int d) { return d == 0 ? 1 : 0; }

void add_band(Report& r, std::string name, double expected, double observed, double variance, double sigmas) {
    Check c;
    c.name = std::move(name);
    c.expected = expected;
    c.observed = observed;
    // one count of lattice slack on top of the Gaussian band
    c.band = sigmas * std::sqrt(std::max(variance, 0.0)) + 1.0;
    c.pass = std::abs(observed - expected) <= c.band;
    r.checks.push_back(std::move(c));
}

void add_exact(Report& r, std::string name, double expected, double observed) {
    Check c;
    c.name = std::move(name);
    c.expected = expected;
    c.observed = observed;
    c.band = 0.0;
    c.pass = expected == observed;
    r.checks.push_back(std::move(c));
}

std::string stratum(Event l, Tag t, const char* what) {
    return std::string("N[") + to_string(l) + "," + to_string(t) + ",ZC]^" + what;
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t round, std::uint32_t draw) const {
    return splitmix(splitmix(seed_ ^ splitmix(round)) + draw);
}

double CounterRng::uniform(std::uint64_t round, std::uint32_t draw) const {
    return static_cast<double>(bits(round, draw) >> 11) * 0x1.0p-53;
}

EventYields event_yields(const TagPlan& plan, const YieldTable& yt) {
    EventYields ey;
    const LtCoefficients& c = plan.coeffs;
    for (Event l : kAllEvents) {
        if (const auto j = setting_of(l)) {
            if (plan.protocol == Protocol::ThreeState && *j == Setting::X1) continue;
            ey.y[index(l)] = {yt.at(*j, Outcome::X0), yt.at(*j, Outcome::X1)};
        }
    }
    for (int a = 0; a < 2; ++a) {
        const Outcome o = a == 0 ? Outcome::X0 : Outcome::X1;
        const double y0z = yt.at(Setting::Z0, o);
        const double y1z = yt.at(Setting::Z1, o);
        const double y0x = yt.at(Setting::X0, o);
        ey.y[index(Event::Vir0)][a] = y0x;
        if (plan.protocol == Protocol::ThreeState) {
            ey.y[index(Event::Vir1)][a] = clamp_yield(c.c1 * (y0z + y1z) - c.c2 * y0x);
        } else {
            ey.y[index(Event::Vir1)][a] = clamp_yield(c.c2 * y1z + c.c3 * yt.at(Setting::X1, o) - c.c1 * y0z);
        }
    }
    return ey;
}

std::uint64_t Tallies::odd_from_strata(const TagPlan& plan, Tag t) const {
    std::uint64_t n = 0;
    for (Event l : kAllEvents) {
        const int d = plan.d_value(t, l);
        if (d >= 0) n += n_tagged[index(t)][index(l)][odd_index(d)];
    }
    return n;
}

std::uint64_t Tallies::det_from_strata(const TagPlan& plan, Tag t) const {
    std::uint64_t n = 0;
    for (Event l : kAllEvents) {
        if (plan.d_value(t, l) >= 0) n += tagged_det(t, l);
    }
    return n;
}

Tallies& Tallies::operator+=(const Tallies& o) {
    rounds += o.rounds;
    for (int l = 0; l < kEventCount; ++l) {
        for (int a = 0; a < 2; ++a) {
            n_event[l][a] += o.n_event[l][a];
            for (int t = 0; t < 2; ++t) n_tagged[t][l][a] += o.n_tagged[t][l][a];
        }
    }
    for (int t = 0; t < 2; ++t) {
        odd_direct[t] += o.odd_direct[t];
        det_direct[t] += o.det_direct[t];
    }
    coin_rounds += o.coin_rounds;
    x_marked += o.x_marked;
    x_flips += o.x_flips;
    return *this;
}

Tallies simulate_tally(std::uint64_t rounds, const TagPlan& plan, const YieldTable& yields, std::uint64_t seed,
                       double x_flip_probability, std::uint64_t first_round) {
    if (rounds < 1) throw InvalidArgument("at least one round is required");
    if (!(x_flip_probability >= 0.0 && x_flip_probability <= 1.0)) {
        throw InvalidArgument("flip probability outside [0, 1]");
    }
    const EventYields ey = event_yields(plan, yields);
    std::array<double, kEventCount> cumulative{};
    double acc = 0.0;
    for (int l = 0; l < kEventCount; ++l) {
        acc += plan.p_event[l];
        cumulative[l] = acc;
    }

    const CounterRng rng(seed);
    Tallies t;
    t.rounds = rounds;
    t.seed = seed;
    for (std::uint64_t i = 0; i < rounds; ++i) {
        const std::uint64_t r = first_round + i;
        const double ue = rng.uniform(r, kEvent) * acc;
        int l = 0;
        while (l + 1 < kEventCount && ue >= cumulative[l]) ++l;

        int outcome = -1;
        const double uo = rng.uniform(r, kOutcome);
        if (uo < ey.y[l][0]) {
            outcome = 0;
        } else if (uo < ey.y[l][0] + ey.y[l][1]) {
            outcome = 1;
        }
        if (outcome >= 0) ++t.n_event[l][outcome];

        const double ut = rng.uniform(r, kTag);
        const double p_tar = plan.p_tag_given_event[0][l];
        const double p_ref = plan.p_tag_given_event[1][l];
        int tag = -1;
        if (ut < p_tar) {
            tag = 0;
        } else if (ut < p_tar + p_ref) {
            tag = 1;
        }
        if (tag < 0) continue;
        ++t.coin_rounds;

        if (rng.uniform(r, kMark) >= plan.p_zc) {
            ++t.x_marked;
            if (rng.uniform(r, kFlip) < x_flip_probability) ++t.x_flips;
            continue;
        }
        if (outcome < 0) continue;
        ++t.n_tagged[tag][l][outcome];
        ++t.det_direct[tag];
        const int d = plan.branch[tag][l];
        if (d >= 0 && outcome == odd_index(d)) ++t.odd_direct[tag];
    }
    return t;
}

bool Report::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string Report::to_text() const {
    std::ostringstream os;
    char buf[256];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "%-32s expected=%.17g observed=%.17g band=%.17g %s\n", c.name.c_str(),
                      c.expected, c.observed, c.band, c.pass ? "PASS" : "FAIL");
        os << buf;
    }
    return os.str();
}

Report band_checks(const Tallies& tl, const TagPlan& plan, const YieldTable& yields, double sigmas) {
    const EventYields ey = event_yields(plan, yields);
    const double n = static_cast<double>(tl.rounds);
    Report rep;
    for (Event l : kAllEvents) {
        if (l == Event::X0Star || l == Event::X1Star) continue;
        if (plan.event(l) == 0.0) continue;
        for (int a = 0; a < 2; ++a) {
            const double q = plan.event(l) * ey.y[index(l)][a];
            add_band(rep, std::string("N[") + to_string(l) + "]^" + (a == 0 ? "0X" : "1X"), n * q,
                     static_cast<double>(tl.n_event[index(l)][a]), n * q * (1 - q), sigmas);
        }
        for (Tag t : {Tag::Tar, Tag::Ref}) {
            const double p_sel = plan.p_zc * plan.tag_given(t, l);
            const auto& tagged = tl.n_tagged[index(t)][index(l)];
            if (plan.tag_given(t, l) == 0.0) {
                add_exact(rep, stratum(l, t, "det"), 0.0, static_cast<double>(tagged[0] + tagged[1]));
                continue;
            }
            for (int a = 0; a < 2; ++a) {
                const char* what = a == 0 ? "0X" : "1X";
                const double pop = static_cast<double>(tl.n_event[index(l)][a]);
                add_band(rep, stratum(l, t, what) + "|pop", p_sel * pop, static_cast<double>(tagged[a]),
                         pop * p_sel * (1 - p_sel), sigmas);
                const double q = plan.event(l) * ey.y[index(l)][a] * p_sel;
                add_band(rep, stratum(l, t, what), n * q, static_cast<double>(tagged[a]), n * q * (1 - q), sigmas);
            }
            const double pop = static_cast<double>(tl.event_det(l));
            add_band(rep, stratum(l, t, "det") + "|pop", p_sel * pop, static_cast<double>(tagged[0] + tagged[1]),
                     pop * p_sel * (1 - p_sel), sigmas);
        }
    }
    return rep;
}

Report accounting_checks(const Tallies& tl, const TagPlan& plan) {
    Report rep;
    for (Tag t : {Tag::Tar, Tag::Ref}) {
        const std::string z = t == Tag::Tar ? "0" : "1";
        add_exact(rep, "N[ZC=" + z + "]^odd", static_cast<double>(tl.odd_direct[index(t)]),
                  static_cast<double>(tl.odd_from_strata(plan, t)));
        add_exact(rep, "N[ZC=" + z + "]^det", static_cast<double>(tl.det_direct[index(t)]),
                  static_cast<double>(tl.det_from_strata(plan, t)));
    }
    bool bounded = true;
    for (Event l : kAllEvents) {
        for (int a = 0; a < 2; ++a) {
            const auto total = tl.n_tagged[0][index(l)][a] + tl.n_tagged[1][index(l)][a];
            if (total > tl.n_event[index(l)][a]) bounded = false;
        }
    }
    add_exact(rep, "tagged<=untagged", 1.0, bounded ? 1.0 : 0.0);
    return rep;
}

CoinMargin check_coin_inequality(const Tallies& tl, const DeltaBound& delta, const TagPlan& plan) {
    CoinMargin m;
    const double odd0 = static_cast<double>(tl.odd_direct[0]);
    const double det0 = static_cast<double>(tl.det_direct[0]);
    const double odd1 = static_cast<double>(tl.odd_direct[1]);
    const double det1 = static_cast<double>(tl.det_direct[1]);
    const double n = static_cast<double>(tl.rounds);
    m.lhs = odd0;
    if (det1 <= 0.0 || det0 + det1 <= 0.0) {
        m.rhs = det0;
    } else {
        m.y = odd1 / det1;
        m.z = 1.0 - 2.0 * plan.p_zc * plan.p_tar * n * delta.delta / (det0 + det1);
        m.rhs = det0 * g_plus(m.y, m.z);
    }
    m.margin = m.rhs - m.lhs;
    m.violated = m.margin < 0.0;
    return m;
}

ExplicitStates explicit_states_from_gram(const Eigen::MatrixXd& gram, const GramProblem& problem,
                                         const CoinFunctional& functional, const CoinBranches& branches) {
    const int n = problem.n;
    const int k = problem.k;
    if (gram.rows() != n || gram.cols() != n) throw InvalidArgument("Gram matrix has the wrong size");
    if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidArgument("Gram matrix not symmetric");
    for (const auto& f : problem.fixed) {
        if (std::abs(gram(f.row, f.col) - f.value) > 1e-9) throw InvalidArgument("Gram matrix violates a fixed entry");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gram + gram.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-12) throw InvalidArgument("Gram matrix is not PSD");
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();

    ExplicitStates st;
    st.vectors = root.asDiagonal() * es.eigenvectors().transpose();
    const double a = std::sqrt(1.0 - problem.epsilon);
    const double b = std::sqrt(problem.epsilon);
    st.psi = Eigen::MatrixXd::Zero(n, k);
    for (int j = 0; j < k; ++j) st.psi.col(j) = a * st.vectors.col(j) + b * st.vectors.col(j + k);

    auto assemble = [&](const std::vector<CoinBranch>& br) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(4 * n);
        for (const auto& x : br) {
            for (int anc = 0; anc < 2; ++anc) {
                v.segment((x.d * 2 + anc) * n, n) += x.w * x.ancilla(anc) * st.psi.col(index(x.s));
            }
        }
        return Eigen::VectorXd(std::sqrt(branches.scale) * v);
    };
    st.tar = assemble(branches.tar);
    st.ref = assemble(branches.ref);
    st.coin.resize(8 * n);
    st.coin << st.tar / std::sqrt(2.0), st.ref / std::sqrt(2.0);

    // weight of |->_C
    const Eigen::VectorXd minus = (st.coin.head(4 * n) - st.coin.tail(4 * n)) / std::sqrt(2.0);
    st.p_flip_states = minus.squaredNorm();
    st.p_flip_functional = (1.0 - functional.evaluate(problem.psi_overlaps(gram))) / 2.0;
    return st;
}

}  // namespace ltcoin
