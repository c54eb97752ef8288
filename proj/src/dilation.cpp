#include "spectrex/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectrex {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::arveson: return "arveson";
        case Verdict::matrix_not_arveson: return "matrix_not_arveson";
        case Verdict::failed: return "failed";
    }
    return "?";
}

SymTuple to_boundary(const SymTuple& A, const SymTuple& X) {
    double lambda = min_eigenvalue(eval_pencil(A, X));
    SymTuple Z = X;
    if (std::abs(1.0 - lambda) < 1e-9) {
        std::vector<Mat> dir(X.g(), Mat::Zero(X.n(), X.n()));
        dir[0] = Mat::Identity(X.n(), X.n());
        Z = add(X, scale(SymTuple(dir), 0.5));
        lambda = min_eigenvalue(eval_pencil(A, Z));
        if (std::abs(1.0 - lambda) < 1e-9)
            throw std::invalid_argument("to_boundary: ray does not meet the boundary (unbounded D_A?)");
    }
    if (lambda >= 1.0) throw std::invalid_argument("to_boundary: ray does not meet the boundary (unbounded D_A?)");
    return scale(Z, 1.0 / (1.0 - lambda));
}

ColTuple random_beta(const DilationSubspace& S, Rng& rng) {
    if (S.dim == 0) throw std::invalid_argument("random_beta: dilation subspace is trivial");
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Vec w(S.dim);
    for (int j = 0; j < S.dim; ++j) w(j) = U(rng);
    if (S.dim == 1) w(0) = 1.0;
    w /= w.sum();
    Vec v = S.flat * w;
    v.normalize();
    const int g = static_cast<int>(S.basis.front().size());
    const int n = static_cast<int>(S.basis.front().front().size());
    return unflatten_columns(v, g, n);
}

namespace {

// Smallest s-independent quantity: s = 1 / lambda_max(C^{-1} G C^{-T}) with C = chol(L(gamma)).
double polish_s(const SymTuple& A, const Vec& gamma, const Mat& G, double fallback) {
    const int d = A.n();
    Mat Lg = Mat::Identity(d, d);
    for (int c = 0; c < A.g(); ++c) Lg += gamma(c) * A[c];
    Eigen::LLT<Mat> llt(Lg);
    if (llt.info() != Eigen::Success) return fallback;
    Mat Ci = llt.matrixL().solve(Mat::Identity(d, d));
    Mat W = Ci * G * Ci.transpose();
    W = 0.5 * (W + W.transpose());
    const double top = Eigen::SelfAdjointEigenSolver<Mat>(W, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    return top > 0 ? 1.0 / top : fallback;
}

}  // namespace

OneDilation maximal_one_dilation(const SymTuple& A, const SymTuple& Y, const ColTuple& beta, DilationMode mode,
                                 const ToleranceConfig& cfg, Rng& rng, const SolverOptions& solver) {
    const int g = A.g(), d = A.n(), n = Y.n();
    OneDilation out;
    const Mat L = eval_pencil(A, Y);
    Eigen::SelfAdjointEigenSolver<Mat> es(L);
    const auto K = lmi_kernel(L, cfg.post_mag, cfg.post_gap);
    const int k = K ? K->k : 0;
    const Mat B = eval_linear_col(A, beta);  // dn x d
    if (k > 0 && (B.transpose() * K->basis).norm() > 1e-9)
        throw std::invalid_argument("maximal_one_dilation: beta does not solve the Arveson equations");

    // Pseudo-inverse of L_A(Y) with the k kernel directions removed.
    std::vector<int> order(d * n);
    for (int i = 0; i < d * n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(b));
    });
    Mat Lpinv = Mat::Zero(d * n, d * n);
    for (int r = k; r < d * n; ++r) {
        const Vec v = es.eigenvectors().col(order[r]);
        Lpinv += (v / es.eigenvalues()(order[r])) * v.transpose();
    }
    Mat G = B.transpose() * Lpinv * B;
    G = 0.5 * (G + G.transpose());

    // maximize s  s.t.  I + sum gamma_i A_i - s G >= 0
    LmiProgram prog;
    prog.F0 = Mat::Identity(d, d);
    prog.F.push_back(-G);
    for (int c = 0; c < g; ++c) prog.F.push_back(A[c]);
    prog.objective = Vec::Zero(g + 1);
    prog.objective(0) = 1.0;
    const LmiResult res = solve_lmi_max(prog, solver);
    out.status = res.status;
    if (res.status != SolveStatus::optimal) {
        out.reason = "solver " + to_string(res.status);
        return out;
    }
    Vec gamma = res.y.tail(g);
    double s = polish_s(A, gamma, G, res.y(0));

    if (mode == DilationMode::two_stage) {
        std::normal_distribution<double> N01(0.0, 1.0);
        Vec ell(g);
        for (int c = 0; c < g; ++c) ell(c) = N01(rng);
        ell.normalize();
        LmiProgram p2;
        p2.F0 = Mat::Identity(d, d) - s * (1.0 - 1e-9) * G;
        for (int c = 0; c < g; ++c) p2.F.push_back(A[c]);
        p2.objective = ell;
        const LmiResult r2 = solve_lmi_max(p2, solver);
        if (r2.status == SolveStatus::optimal) {
            gamma = r2.y;
            s = polish_s(A, gamma, G, s);
        }
    }
    out.c = std::sqrt(std::max(s, 0.0));
    out.gamma = gamma;
    if (!(out.c > 1e-10)) {
        out.reason = "degenerate step (c ~ 0)";
        return out;
    }
    ColTuple cb = beta;
    for (Vec& b : cb) b *= out.c;
    out.point = one_dilation(Y, cb, gamma);
    out.ok = true;
    return out;
}

namespace {

struct Var {
    int c, i, j;
};

// Linearization of the compressed pencil K^T L_A(X + sum y_v E_v) K in y,
// restricted to the upper-triangular pairs of the k x k compression.
void compressed_system(const SymTuple& A, const Mat& L, const Mat& K, const std::vector<Var>& vars, int n,
                       Mat& D, Vec& base) {
    const int k = static_cast<int>(K.cols());
    const int d = A.n();
    const int m = k * (k + 1) / 2;
    D.resize(m, static_cast<Eigen::Index>(vars.size()));
    base.resize(m);
    const Mat C0 = K.transpose() * L * K;
    int row = 0;
    for (int r = 0; r < k; ++r)
        for (int q = r; q < k; ++q) base(row++) = C0(r, q);
    for (size_t v = 0; v < vars.size(); ++v) {
        const auto [c, i, j] = vars[v];
        // (A_c (x) E_ij) K with E_ij the symmetric unit
        Mat AK = Mat::Zero(d * n, k);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const double s = A[c](a, b);
                if (s == 0.0) continue;
                AK.row(a * n + i) += s * K.row(b * n + j);
                if (i != j) AK.row(a * n + j) += s * K.row(b * n + i);
            }
        const Mat M = K.transpose() * AK;
        row = 0;
        for (int r = 0; r < k; ++r)
            for (int q = r; q < k; ++q) D(row++, v) = 0.5 * (M(r, q) + M(q, r));
    }
}

Mat smallest_eigvecs(const Mat& L, int k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(L);
    const int N = static_cast<int>(L.rows());
    std::vector<int> order(N);
    for (int i = 0; i < N; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(b));
    });
    Mat K(N, k);
    for (int j = 0; j < k; ++j) K.col(j) = es.eigenvectors().col(order[j]);
    return K;
}

}  // namespace

PurifyResult purify(const SymTuple& A, const SymTuple& X, int n_frozen, const ToleranceConfig& cfg) {
    const int g = A.g(), n = X.n();
    PurifyResult out;
    out.point = X;
    const auto K0 = lmi_kernel(A, X, cfg.lmi_mag, cfg.lmi_gap);
    if (!K0) return out;
    const int k = K0->k;
    out.k_before = k;
    out.accuracy_before = K0->accuracy;

    std::vector<Var> vars;
    for (int c = 0; c < g; ++c)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                if (!(i < n_frozen && j < n_frozen)) vars.push_back({c, i, j});
    const int nv = static_cast<int>(vars.size());
    const double eps = cfg.purify_eps;

    SymTuple Y = X;
    auto apply = [&](const Vec& delta) {
        for (int v = 0; v < nv; ++v) {
            const auto [c, i, j] = vars[v];
            const double x0 = X[c](i, j);
            const double dv = std::clamp(Y[c](i, j) + delta(v) - x0, -eps, eps);
            Y.set_entry(c, i, j, x0 + dv);
        }
    };
    // Newton refinement of the full compression, re-estimating K each round; a step
    // that does not shrink the residual is undone.
    auto polish = [&] {
        Mat D;
        Vec base;
        double res = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 8; ++it) {
            const Mat L = eval_pencil(A, Y);
            compressed_system(A, L, smallest_eigvecs(L, k), vars, n, D, base);
            const double now = base.cwiseAbs().maxCoeff();
            if (now >= res) break;
            res = now;
            if (res < 1e-16) break;
            Eigen::CompleteOrthogonalDecomposition<Mat> cod(D);
            cod.setThreshold(1e-10);
            const SymTuple prev = Y;
            apply(cod.solve(-base));
            const Mat L2 = eval_pencil(A, Y);
            Mat D2;
            Vec base2;
            compressed_system(A, L2, smallest_eigvecs(L2, k), vars, n, D2, base2);
            if (base2.cwiseAbs().maxCoeff() >= res) {
                Y = prev;
                break;
            }
        }
    };
    struct Candidate {
        SymTuple point;
        int k = 0;
        double accuracy = 0;
    };
    auto assess = [&](const SymTuple& P) {
        const auto K1 = lmi_kernel(A, P, cfg.post_mag, cfg.post_gap);
        return Candidate{P, K1 ? K1->k : 0, K1 ? K1->accuracy : 0.0};
    };
    auto better = [](const Candidate& a, const Candidate& b) {
        return a.k != b.k ? a.k > b.k : a.accuracy < b.accuracy;
    };

    Candidate best = assess(X);
    if (nv > 0) {
        Mat D;
        Vec base;
        compressed_system(A, eval_pencil(A, X), K0->basis, vars, n, D, base);
        const int m = static_cast<int>(base.size());
        const double sc = base.cwiseAbs().maxCoeff();
        if (sc > 1e-13) {  // below this the kernel is already exact to rounding
            // Stage 1: min eta  s.t. |base + eps D z| <= eta, z in [-1,1], all rows divided by nrm.
            const double nrm = std::max(sc, eps * D.cwiseAbs().maxCoeff());
            const Mat Dz = D * (eps / nrm);
            const Vec bz = base / nrm;
            LinearProgram lp;
            lp.c = Vec::Zero(nv + 1);
            lp.c(nv) = 1.0;
            lp.G = Mat::Zero(2 * m, nv + 1);
            lp.G.topLeftCorner(m, nv) = Dz;
            lp.G.bottomLeftCorner(m, nv) = -Dz;
            lp.G.col(nv).setConstant(-1.0);
            lp.h.resize(2 * m);
            lp.h << -bz, bz;
            lp.lo = Vec::Constant(nv + 1, -1.0);
            lp.hi = Vec::Constant(nv + 1, 1.0);
            lp.lo(nv) = 0.0;
            lp.hi(nv) = std::numeric_limits<double>::infinity();
            const LpResult r1 = solve_lp(lp);
            if (r1.status == SolveStatus::optimal) {
                const double eta = r1.x(nv);
                out.eta = eta * nrm;
                // Stage 2: smallest l1 perturbation attaining eta.
                LinearProgram l1;
                l1.c = Vec::Zero(2 * nv);
                l1.c.tail(nv).setOnes();
                l1.G = Mat::Zero(2 * m + 2 * nv, 2 * nv);
                l1.G.topLeftCorner(m, nv) = Dz;
                l1.G.block(m, 0, m, nv) = -Dz;
                const double cap = eta * (1.0 + 1e-9) + 1e-12;
                l1.h.resize(2 * m + 2 * nv);
                l1.h.head(m) = Vec::Constant(m, cap) - bz;
                l1.h.segment(m, m) = Vec::Constant(m, cap) + bz;
                for (int v = 0; v < nv; ++v) {
                    l1.G(2 * m + v, v) = 1.0;
                    l1.G(2 * m + v, nv + v) = -1.0;
                    l1.G(2 * m + nv + v, v) = -1.0;
                    l1.G(2 * m + nv + v, nv + v) = -1.0;
                }
                l1.h.tail(2 * nv).setZero();
                l1.lo = Vec::Constant(2 * nv, -1.0);
                l1.hi = Vec::Constant(2 * nv, 1.0);
                l1.lo.tail(nv).setZero();
                const LpResult r2 = solve_lp(l1);
                const Vec z = r2.status == SolveStatus::optimal ? Vec(r2.x.head(nv)) : Vec(r1.x.head(nv));
                apply(eps * z);
                polish();
                const Candidate c = assess(Y);
                if (better(c, best)) best = c;
            }
            if (best.k < k) {
                Y = X;
                polish();
                const Candidate c = assess(Y);
                if (better(c, best)) best = c;
            }
        }
    }
    out.point = best.point;
    for (int c = 0; c < g; ++c) out.max_change = std::max(out.max_change, (best.point[c] - X[c]).cwiseAbs().maxCoeff());
    out.k_after = best.k;
    out.accuracy_after = best.accuracy;
    return out;
}

DilationTrace dilate_to_extreme(const SymTuple& A, const SymTuple& X, const DilateOptions& opts,
                                const ToleranceConfig& cfg, Rng& rng) {
    const int g = A.g();
    DilationTrace tr;
    tr.n0 = X.n();
    tr.g = g;
    SymTuple Y = X;
    const int step_cap = 2 * g * X.n() + 10;
    int fails = 0;
    for (;;) {
        ExtremeReport rep;
        try {
            rep = classify(A, Y, cfg);
        } catch (const std::invalid_argument& e) {
            tr.verdict = Verdict::failed;
            tr.failure_reason = e.what();
            break;
        }
        tr.final_report = rep;
        if (rep.arveson == Flag::yes) {
            tr.verdict = Verdict::arveson;
            break;
        }
        if (opts.target == Target::matrix_or_arveson && rep.matrix == Flag::yes) {
            tr.verdict = Verdict::matrix_not_arveson;
            break;
        }
        if (static_cast<int>(tr.steps.size()) >= step_cap) {
            tr.verdict = Verdict::failed;
            tr.failure_reason = "step cap reached";
            break;
        }
        const auto K = lmi_kernel(A, Y, cfg.post_mag, cfg.post_gap);
        const DilationSubspace S = dilation_subspace(A, Y, K ? K->basis : Mat(A.n() * Y.n(), 0), cfg);
        if (S.dim == 0) {
            tr.verdict = Verdict::failed;
            tr.failure_reason = "no dilation direction but Arveson verdict not reached";
            break;
        }
        const int k_old = K ? K->k : 0;
        const ColTuple beta = random_beta(S, rng);
        const OneDilation one = maximal_one_dilation(A, Y, beta, opts.mode, cfg, rng, opts.solver);
        std::string why;
        SymTuple Ynew;
        DilationStep st;
        if (one.ok) {
            Ynew = one.point;
            st.beta = beta;
            st.c = one.c;
            st.gamma = one.gamma;
            st.retries = fails;
            if (opts.purify != PurifyMode::off) {
                const PurifyResult pr =
                    purify(A, Ynew, opts.purify == PurifyMode::frozen ? tr.n0 : 0, cfg);
                Ynew = pr.point;
                st.purified = true;
                st.accuracy_before = pr.accuracy_before;
            }
            const Mat Ln = eval_pencil(A, Ynew);
            const auto Kn = lmi_kernel(Ln, cfg.post_mag, cfg.post_gap);
            st.k_after = Kn ? Kn->k : 0;
            st.accuracy_after = Kn ? Kn->accuracy : 0.0;
            if (st.k_after <= k_old) why = "no kernel growth";
            else if (!psd_within_slack(Ln, cfg.psd_slack)) why = "positivity slack violated";
        } else {
            why = one.reason;
        }
        if (!why.empty()) {
            if (++fails >= opts.max_fails) {
                tr.verdict = Verdict::failed;
                tr.failure_reason = "retry budget exhausted: " + why;
                break;
            }
            continue;
        }
        tr.steps.push_back(std::move(st));
        Y = std::move(Ynew);
        fails = 0;
    }
    tr.final_point = Y;
    tr.mu = static_cast<double>(tr.steps.size()) / (static_cast<double>(g) * tr.n0);
    return tr;
}

nlohmann::json trace_to_json(const DilationTrace& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) {
        nlohmann::json beta = nlohmann::json::array();
        for (const Vec& b : s.beta) beta.push_back(std::vector<double>(b.data(), b.data() + b.size()));
        steps.push_back({{"beta", beta},
                         {"c", s.c},
                         {"gamma", std::vector<double>(s.gamma.data(), s.gamma.data() + s.gamma.size())},
                         {"retries", s.retries},
                         {"purified", s.purified},
                         {"accuracy_before", s.accuracy_before},
                         {"accuracy_after", s.accuracy_after},
                         {"k_after", s.k_after}});
    }
    nlohmann::json j = {{"n0", t.n0},
                        {"final_level", t.final_level()},
                        {"verdict", to_string(t.verdict)},
                        {"mu", t.mu},
                        {"steps", steps},
                        {"final_point", tuple_to_json(t.final_point)},
                        {"final_report", report_to_json(t.final_report)}};
    if (!t.failure_reason.empty()) j["failure_reason"] = t.failure_reason;
    return j;
}

}  // namespace spectrex
