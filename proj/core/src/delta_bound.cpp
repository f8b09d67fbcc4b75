#include "ltcoin/delta_bound.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ltcoin/errors.hpp"
#include "ltcoin/lt_decomposition.hpp"

namespace ltcoin {

namespace {

constexpr double kIdealSnap = 1e-12;
constexpr double kEigFloor = 1e-10;
constexpr double kRankTol = 1e-9;
constexpr int kMaxNewtonSteps = 5000;

void add_sym(Eigen::MatrixXd& w, int a, int b, double v) {
    if (a == b) {
        w(a, a) += v;
        return;
    }
    w(a, b) += 0.5 * v;
    w(b, a) += 0.5 * v;
}

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }

// Factor of the fixed state-state block: columns u_j with u_i . u_j = <phi_i|phi_j>.
Eigen::MatrixXd state_factor(const GramProblem& p) {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(p.k, p.k);
    for (const auto& f : p.fixed) {
        if (f.row < p.k && f.col < p.k) {
            phi(f.row, f.col) = f.value;
            phi(f.col, f.row) = f.value;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(phi);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double top = std::max(1.0, lam.maxCoeff());
    std::vector<int> keep;
    for (int i = 0; i < lam.size(); ++i) {
        if (lam(i) < -1e-9) throw InvalidArgument("fixed state overlaps are not positive semidefinite");
        if (lam(i) > kRankTol * top) keep.push_back(i);
    }
    Eigen::MatrixXd u(static_cast<int>(keep.size()), p.k);
    for (int a = 0; a < static_cast<int>(keep.size()); ++a) {
        u.row(a) = std::sqrt(lam(keep[a])) * es.eigenvectors().col(keep[a]).transpose();
    }
    return u;
}

Eigen::MatrixXd orthogonal_complement(const Eigen::VectorXd& u) {
    const int r = static_cast<int>(u.size());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(u.normalized());
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, r);
    return q.rightCols(r - 1);
}

bool log_det(const Eigen::MatrixXd& z, double& out) {
    Eigen::LLT<Eigen::MatrixXd> llt(z);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::VectorXd d = llt.matrixL().toDenseMatrix().diagonal();
    for (int i = 0; i < d.size(); ++i) {
        if (!(d(i) > 0.0)) return false;
    }
    out = 2.0 * d.array().log().sum();
    return true;
}

}  // namespace

int GramProblem::free_count() const {
    int fixed_off = 0;
    for (const auto& f : fixed) {
        if (f.row != f.col) ++fixed_off;
    }
    return n * (n - 1) / 2 - fixed_off;
}

bool GramProblem::is_fixed(int row, int col) const {
    for (const auto& f : fixed) {
        if ((f.row == row && f.col == col) || (f.row == col && f.col == row)) return true;
    }
    return false;
}

double GramProblem::objective(const Eigen::MatrixXd& gram) const { return base + inner(weights, gram); }

Eigen::MatrixXd GramProblem::psi_overlaps(const Eigen::MatrixXd& g) const {
    const double s = std::sqrt(epsilon * (1.0 - epsilon));
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            r(i, j) = (1.0 - epsilon) * g(i, j) + s * (g(i, j + k) + g(i + k, j)) + epsilon * g(i + k, j + k);
        }
    }
    return r;
}

const char* to_string(DeltaMethod m) {
    switch (m) {
        case DeltaMethod::Sdp: return "sdp";
        case DeltaMethod::Analytic: return "analytic";
        case DeltaMethod::GllpSdp: return "gllp-sdp";
    }
    return "?";
}

DeltaMethod parse_delta_method(const std::string& text) {
    if (text == "sdp") return DeltaMethod::Sdp;
    if (text == "analytic") return DeltaMethod::Analytic;
    if (text == "gllp-sdp") return DeltaMethod::GllpSdp;
    throw InvalidArgument("unknown delta method '" + text + "'");
}

GramProblem build_gram_problem(const FlawModel& model, const SideChannelBudget& budget,
                               const CoinFunctional& functional) {
    const double eps = budget.epsilon;
    if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("epsilon must lie in [0, 1]");
    GramProblem p;
    p.k = setting_count(model.protocol);
    p.n = 2 * p.k;
    p.epsilon = eps;
    p.kind = functional.kind;
    const int k = p.k;
    const Eigen::MatrixXd ideal = pairwise_overlaps(model);
    for (int j = 0; j < k; ++j) p.fixed.push_back({j, j, 1.0});
    for (int j = 0; j < k; ++j) p.fixed.push_back({j + k, j + k, 1.0});
    for (int j = 0; j < k; ++j) p.fixed.push_back({j, j + k, 0.0});
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) p.fixed.push_back({i, j, ideal(i, j)});

    // deviation form: the (1 - eps) share of each fixed overlap is folded into base
    const double s = std::sqrt(eps * (1.0 - eps));
    p.weights = Eigen::MatrixXd::Zero(p.n, p.n);
    for (const auto& t : functional.terms) {
        const int i = index(t.i);
        const int j = index(t.j);
        if (i >= k || j >= k) throw InvalidArgument("functional references a setting outside the protocol");
        add_sym(p.weights, i, j, -eps * t.coeff);
        add_sym(p.weights, i, j + k, s * t.coeff);
        add_sym(p.weights, i + k, j, s * t.coeff);
        add_sym(p.weights, i + k, j + k, eps * t.coeff);
    }
    p.base = functional.evaluate(ideal);
    if (std::abs(p.base - 1.0) <= kIdealSnap) p.base = 1.0;
    return p;
}

DeltaBound solve_delta_sdp(const GramProblem& p, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    const int k = p.k;
    const Eigen::MatrixXd u = state_factor(p);
    const int r = static_cast<int>(u.rows());
    const int m = r + k;

    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(p.n, m);
    v.block(0, 0, k, r) = u.transpose();
    v.block(k, r, k, k) = Eigen::MatrixXd::Identity(k, k);
    Eigen::MatrixXd c = v.transpose() * p.weights * v;
    c = 0.5 * (c + c.transpose());

    std::vector<Eigen::MatrixXd> dirs;
    for (int j = 0; j < k; ++j) {
        const Eigen::MatrixXd comp = orthogonal_complement(u.col(j));
        for (int col = 0; col < comp.cols(); ++col) {
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
            b.block(0, r + j, r, 1) = comp.col(col);
            b.block(r + j, 0, 1, r) = comp.col(col).transpose();
            dirs.push_back(b);
        }
    }
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
            b(r + i, r + j) = 1.0;
            b(r + j, r + i) = 1.0;
            dirs.push_back(b);
        }
    }

    std::vector<Eigen::MatrixXd> cons;
    std::vector<double> rhs;
    std::vector<int> diag_cons;
    for (int a = 0; a < r; ++a) {
        for (int b = a; b < r; ++b) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
            add_sym(e, a, b, 1.0);
            if (a == b) diag_cons.push_back(static_cast<int>(cons.size()));
            cons.push_back(e);
            rhs.push_back(a == b ? 1.0 : 0.0);
        }
    }
    for (int j = 0; j < k; ++j) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
        e(r + j, r + j) = 1.0;
        diag_cons.push_back(static_cast<int>(cons.size()));
        cons.push_back(e);
        rhs.push_back(1.0);
    }
    for (int j = 0; j < k; ++j) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
        e.block(0, r + j, r, 1) = 0.5 * u.col(j);
        e.block(r + j, 0, 1, r) = 0.5 * u.col(j).transpose();
        cons.push_back(e);
        rhs.push_back(0.0);
    }

    DeltaBound out;
    out.method = p.kind == CoinKind::Gllp ? DeltaMethod::GllpSdp : DeltaMethod::Sdp;
    const int nc = static_cast<int>(cons.size());
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(m, m);
    double primal = 0.0;
    double certified = 0.0;

    if (c.cwiseAbs().maxCoeff() == 0.0) {
        out.certificate = Eigen::VectorXd::Zero(nc);
    } else {
        const int np = static_cast<int>(dirs.size());
        Eigen::VectorXd cx(np);
        for (int q = 0; q < np; ++q) cx(q) = inner(c, dirs[q]);

        // Newton direction for t*<C,Z> - log det Z; returns the decrement
        auto newton = [&](double t, Eigen::MatrixXd& dz) {
            Eigen::LLT<Eigen::MatrixXd> llt(z);
            const Eigen::MatrixXd lmat = llt.matrixL();
            Eigen::VectorXd g(np);
            std::vector<Eigen::MatrixXd> scaled(np);
            for (int q = 0; q < np; ++q) {
                Eigen::MatrixXd tmp = lmat.triangularView<Eigen::Lower>().solve(dirs[q]);
                scaled[q] = lmat.triangularView<Eigen::Lower>().solve(tmp.transpose());
                g(q) = t * cx(q) - scaled[q].trace();
            }
            Eigen::MatrixXd h(np, np);
            for (int a = 0; a < np; ++a)
                for (int b = a; b < np; ++b) h(a, b) = h(b, a) = inner(scaled[a], scaled[b]);
            const Eigen::VectorXd dx = h.ldlt().solve(-g);
            dz = Eigen::MatrixXd::Zero(m, m);
            for (int q = 0; q < np; ++q) dz += dx(q) * dirs[q];
            return -g.dot(dx);
        };

        double t = 1.0 / c.norm();
        int steps = 0;
        Eigen::MatrixXd dz;
        for (;;) {
            for (int it = 0; it < 60; ++it) {
                const double dec = newton(t, dz);
                if (!std::isfinite(dec)) throw SolverFailure("non-finite Newton step in Delta solver");
                if (++steps > kMaxNewtonSteps) throw SolverFailure("Delta solver exceeded its Newton budget");
                if (dec <= 1e-13) break;
                const double lam = std::sqrt(dec);
                double alpha = lam >= 0.25 ? 1.0 / (1.0 + lam) : 1.0;
                double ld = 0.0;
                while (!log_det(z + alpha * dz, ld)) {
                    alpha *= 0.5;
                    if (alpha < 1e-16) throw SolverFailure("Delta solver lost feasibility");
                }
                z += alpha * dz;
            }
            if (m / t <= 0.25 * tol) break;
            t /= 0.25;
        }
        out.newton_steps = steps;

        // dual estimate at the Newton-corrected point: S = mu (Z^-1 - Z^-1 dZ Z^-1)
        const double dec = newton(t, dz);
        if (!(dec < 1.0)) throw SolverFailure("Delta solver ended off the central path");
        Eigen::LLT<Eigen::MatrixXd> llt(z);
        const Eigen::MatrixXd zinv = llt.solve(Eigen::MatrixXd::Identity(m, m));
        const Eigen::MatrixXd s_est = (zinv - zinv * dz * zinv) / t;
        const Eigen::MatrixXd target = c - s_est;
        Eigen::MatrixXd gm(nc, nc);
        Eigen::VectorXd rv(nc);
        for (int a = 0; a < nc; ++a) {
            rv(a) = inner(cons[a], target);
            for (int b = 0; b < nc; ++b) gm(a, b) = inner(cons[a], cons[b]);
        }
        out.certificate = gm.ldlt().solve(rv);
    }

    Eigen::MatrixXd slack = c;
    for (int a = 0; a < nc; ++a) slack -= out.certificate(a) * cons[a];
    slack = 0.5 * (slack + slack.transpose());
    out.slack_min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(slack, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff();
    if (c.cwiseAbs().maxCoeff() == 0.0) {
        out.diagonal_shift = 0.0;
    } else {
        out.diagonal_shift = std::min(0.0, out.slack_min_eig) - kEigFloor;
    }
    for (int idx : diag_cons) out.certificate(idx) += out.diagonal_shift;
    Eigen::MatrixXd shifted = c;
    for (int a = 0; a < nc; ++a) shifted -= out.certificate(a) * cons[a];
    shifted = 0.5 * (shifted + shifted.transpose());
    out.slack_min_eig_shifted = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(shifted, Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .minCoeff();
    out.slack_psd = out.slack_min_eig_shifted >= 0.0;
    if (!out.slack_psd) throw CertificationFailure("dual slack not PSD after diagonal shift");

    for (int a = 0; a < nc; ++a) certified += rhs[a] * out.certificate(a);
    primal = inner(c, z);
    out.primal_gram = v * z * v.transpose();
    out.primal_objective = p.base + primal;
    out.certified_lower_objective = p.base + certified;
    out.duality_gap = std::max(0.0, primal - certified);
    if (out.duality_gap > tol) throw SolverFailure("Delta duality gap above tolerance");
    out.delta = std::clamp(1.0 - out.certified_lower_objective, 0.0, 1.0);
    return out;
}

double analytic_overlap_lower_bound(const FlawModel& model, double eps) {
    if (model.protocol != Protocol::ThreeState) {
        throw Unsupported("the analytic Delta bound is derived for the three-state protocol only");
    }
    const LtCoefficients c = lt_coeffs(model);
    const PrimedBasis basis = primed_basis(model);
    const double q = q0(model);
    const double ab = basis.zero(0) + basis.zero(1);
    const double cq = cos_quarter(1, model.delta);
    const double ch = cos_quarter(2, model.delta);
    const double w1 = std::sqrt(1.0 - q) + ab * q * std::sqrt(c.c1 * c.c2);
    const double w2 = ab * std::sqrt(c.c1 * q) / 2.0;
    return (w1 * ((1.0 - eps) * cq - eps) + w2 * (1.0 - (1.0 - eps) * ch - eps)) / (1.0 + c.c2 * q);
}

DeltaBound delta_analytic_three_state(const FlawModel& model, const SideChannelBudget& budget) {
    const double eps = budget.epsilon;
    if (model.protocol != Protocol::ThreeState) {
        throw Unsupported("the analytic Delta bound is derived for the three-state protocol only");
    }
    const LtCoefficients c = lt_coeffs(model);
    const PrimedBasis basis = primed_basis(model);
    const double q = q0(model);
    const double ab = basis.zero(0) + basis.zero(1);
    const double cq = cos_quarter(1, model.delta);
    const double ch = cos_quarter(2, model.delta);
    const double w1 = std::sqrt(1.0 - q) + ab * q * std::sqrt(c.c1 * c.c2);
    const double w2 = ab * std::sqrt(c.c1 * q) / 2.0;
    const double norm = 1.0 + c.c2 * q;
    double ideal = analytic_overlap_lower_bound(model, 0.0);
    if (std::abs(ideal - 1.0) <= kIdealSnap) ideal = 1.0;
    const double shift = (w1 * (-eps * cq - eps) + w2 * (eps * ch - eps)) / norm;

    DeltaBound out;
    out.method = DeltaMethod::Analytic;
    out.certified_lower_objective = ideal + shift;
    out.primal_objective = out.certified_lower_objective;
    out.duality_gap = 0.0;
    out.delta = std::clamp(1.0 - out.certified_lower_objective, 0.0, 1.0);
    return out;
}

double oracle_search(const GramProblem& p, int budget_iters, std::uint64_t seed) {
    if (budget_iters < 1) throw InvalidArgument("oracle budget must be at least one iteration");
    const int k = p.k;
    const Eigen::MatrixXd u = state_factor(p);
    const int r = static_cast<int>(u.rows());
    const int dim = r + k;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, p.n);
    x.block(0, 0, r, k) = u;
    auto unit = [&](int j) { return Eigen::VectorXd(x.col(j)); };

    auto randomize = [&]() {
        for (int j = 0; j < k; ++j) {
            Eigen::VectorXd g(dim);
            for (int a = 0; a < dim; ++a) g(a) = normal(rng);
            const Eigen::VectorXd s = unit(j);
            g -= s.dot(g) * s;
            x.col(k + j) = g.normalized();
        }
    };
    auto value = [&]() { return p.objective(x.transpose() * x); };

    randomize();
    double best = value();
    double sweep_start = best;
    int sweeps = 0;
    for (int it = 0; it < budget_iters; ++it) {
        const int j = it % k;
        if (j == 0 && it > 0) {
            const double now = value();
            best = std::min(best, now);
            ++sweeps;
            if (sweep_start - now < 1e-14 || sweeps >= 200) {
                randomize();
                sweeps = 0;
                best = std::min(best, value());
            }
            sweep_start = value();
        }
        Eigen::VectorXd h = Eigen::VectorXd::Zero(dim);
        for (int b = 0; b < p.n; ++b) {
            if (b == k + j) continue;
            h += p.weights(k + j, b) * x.col(b);
        }
        const Eigen::VectorXd s = unit(j);
        h -= s.dot(h) * s;
        const double hn = h.norm();
        if (hn > 0.0) x.col(k + j) = -h / hn;
    }
    return std::min(best, value());
}

DeltaBound compute_delta(const FlawModel& model, const SideChannelBudget& budget, DeltaMethod method, double tol) {
    switch (method) {
        case DeltaMethod::Analytic: return delta_analytic_three_state(model, budget);
        case DeltaMethod::GllpSdp:
            return solve_delta_sdp(build_gram_problem(model, budget, gllp_functional(model)), tol);
        case DeltaMethod::Sdp:
        default: {
            const LtCoefficients c = lt_coeffs(model);
            const PrimedBasis b = primed_basis(model);
            return solve_delta_sdp(build_gram_problem(model, budget, coin_functional(model, c, b)), tol);
        }
    }
}

}  // namespace ltcoin
