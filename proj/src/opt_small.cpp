#include "spectrex/opt_small.hpp"

#include "spectrex/numeric_kernel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace spectrex {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::max_iter: return "max_iter";
    }
    return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat affine(const Mat& G0, const std::vector<Mat>& G, const Vec& x) {
    Mat out = G0;
    for (size_t i = 0; i < G.size(); ++i)
        if (x(i) != 0.0) out += x(i) * G[i];
    return out;
}

struct CoreResult {
    Vec x;
    bool unbounded = false;
    bool out_of_budget = false;
    bool stopped_early = false;
    double gap = 0;
};

// Path-following on  max b.x + (1/t) logdet G(x), starting strictly inside.
CoreResult barrier_core(const Mat& G0, const std::vector<Mat>& G, const Vec& b, Vec x,
                        const SolverOptions& opt, int& steps,
                        const std::function<bool(const Vec&)>& early_stop) {
    const int m = static_cast<int>(G.size());
    const int N = static_cast<int>(G0.rows());
    CoreResult res;
    double t = 1.0;
    std::vector<Mat> Gh(m);
    for (;;) {
        for (int inner = 0;; ++inner) {
            Eigen::LLT<Mat> llt(affine(G0, G, x));
            if (llt.info() != Eigen::Success) throw std::logic_error("barrier iterate left the interior");
            const auto L = llt.matrixL();
            Vec grad = t * b;
            Mat H(m, m);
            for (int i = 0; i < m; ++i) {
                Mat tmp = L.solve(G[i]);
                Gh[i] = L.solve(tmp.transpose()).transpose();
                grad(i) += Gh[i].trace();
            }
            for (int i = 0; i < m; ++i)
                for (int j = i; j < m; ++j) H(i, j) = H(j, i) = (Gh[i].cwiseProduct(Gh[j])).sum();
            Eigen::LDLT<Mat> ldlt(H);
            Vec dx = ldlt.solve(grad);
            if (!dx.allFinite()) dx = H.completeOrthogonalDecomposition().solve(grad);
            const double dec = std::max(0.0, grad.dot(dx));
            const double lam = std::sqrt(dec);
            if (opt.trace)
                *opt.trace << "  newton t=" << t << " step=" << steps << " lambda=" << lam << "\n";
            if (dec < 1e-18 || (inner > 0 && dec < 1e-12)) break;
            double alpha = lam < 0.25 ? 1.0 : 1.0 / (1.0 + lam);
            for (int tries = 0; tries < 60; ++tries) {
                Eigen::LLT<Mat> chk(affine(G0, G, x + alpha * dx));
                if (chk.info() == Eigen::Success) break;
                alpha *= 0.5;
            }
            const Vec step = alpha * dx;
            x += step;
            ++steps;
            if (!x.allFinite()) throw std::logic_error("barrier produced non-finite iterate");
            if (x.lpNorm<Eigen::Infinity>() > 1e10) {
                res.unbounded = true;
                res.x = x;
                return res;
            }
            if (early_stop && early_stop(x)) {
                res.stopped_early = true;
                res.x = x;
                return res;
            }
            if (steps >= opt.max_newton) {
                res.out_of_budget = true;
                res.x = x;
                res.gap = N / t;
                return res;
            }
            // Rounding floor: further centering cannot move the iterate.
            if (lam < 1e-5 || step.norm() <= 1e-15 * (1.0 + x.norm())) break;
        }
        res.gap = N / t;
        if (res.gap <= opt.tol || b.squaredNorm() == 0.0) {
            res.x = x;
            return res;
        }
        t *= 10.0;
    }
}

// Box constraints become 1x1 diagonal blocks of the LMI.
void embed_box(const LmiProgram& p, Mat& G0, std::vector<Mat>& G) {
    const int m = p.m();
    const int N = static_cast<int>(p.F0.rows());
    std::vector<std::pair<int, double>> rows;  // (variable, sign*bound) entries
    std::vector<int> sign;
    for (int i = 0; i < p.box_lo.size(); ++i)
        if (std::isfinite(p.box_lo(i))) {
            rows.push_back({i, p.box_lo(i)});
            sign.push_back(+1);
        }
    for (int i = 0; i < p.box_hi.size(); ++i)
        if (std::isfinite(p.box_hi(i))) {
            rows.push_back({i, p.box_hi(i)});
            sign.push_back(-1);
        }
    const int B = static_cast<int>(rows.size());
    G0 = Mat::Zero(N + B, N + B);
    G0.topLeftCorner(N, N) = p.F0;
    G.assign(m, Mat::Zero(N + B, N + B));
    for (int i = 0; i < m; ++i) G[i].topLeftCorner(N, N) = p.F[i];
    for (int r = 0; r < B; ++r) {
        const auto [var, bound] = rows[r];
        // +1: y - lo >= 0, -1: hi - y >= 0
        G0(N + r, N + r) = -sign[r] * bound;
        G[var](N + r, N + r) = sign[r];
    }
}

LmiResult solve_embedded(const Mat& G0, const std::vector<Mat>& G, const Vec& b, const SolverOptions& opt,
                         int& steps, int depth);

LmiResult finish(const Mat& G0, const std::vector<Mat>& G, const Vec& b, const Vec& y, SolveStatus st,
                 double gap, int steps) {
    LmiResult r;
    r.status = st;
    r.y = y;
    r.objective = b.size() ? b.dot(y) : 0.0;
    r.gap = gap;
    r.min_eig = min_eigenvalue(affine(G0, G, y));
    r.newton_steps = steps;
    return r;
}

LmiResult solve_embedded(const Mat& G0, const std::vector<Mat>& G, const Vec& b, const SolverOptions& opt,
                         int& steps, int depth) {
    const int m = static_cast<int>(G.size());
    const int N = static_cast<int>(G0.rows());
    Vec y = Vec::Zero(m);
    if (N == 0) return finish(G0, G, b, y, b.squaredNorm() > 0 ? SolveStatus::unbounded : SolveStatus::optimal, 0, steps);

    const double lam0 = min_eigenvalue(G0);
    if (!(lam0 > 1e-12)) {
        // Phase 1: maximize tau with G(y) - tau I >= 0.
        std::vector<Mat> G1 = G;
        G1.push_back(-Mat::Identity(N, N));
        Vec b1 = Vec::Zero(m + 1);
        b1(m) = 1.0;
        Vec x1 = Vec::Zero(m + 1);
        x1(m) = lam0 - 1.0;
        if (opt.trace) *opt.trace << "phase 1 (depth " << depth << ")\n";
        SolverOptions o1 = opt;
        o1.tol = std::min(opt.tol, 1e-10);
        CoreResult c1 = barrier_core(G0, G1, b1, x1, o1, steps, [m](const Vec& x) { return x(m) > 1e-8; });
        const double tau = c1.x(m);
        y = c1.x.head(m);
        if (c1.out_of_budget && !c1.stopped_early)
            return finish(G0, G, b, y, SolveStatus::max_iter, c1.gap, steps);
        if (!c1.stopped_early) {
            if (c1.unbounded) return finish(G0, G, b, y, SolveStatus::max_iter, c1.gap, steps);
            if (tau < -1e-9) return finish(G0, G, b, y, SolveStatus::infeasible, c1.gap, steps);
            // No strict interior: restrict to the face exposed by the near-kernel of G(y).
            if (depth > N) return finish(G0, G, b, y, SolveStatus::max_iter, c1.gap, steps);
            const Mat Gy = affine(G0, G, y);
            Eigen::SelfAdjointEigenSolver<Mat> es(Gy);
            const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
            int q = 0;
            while (q < N && es.eigenvalues()(q) < 1e-5 * scale) ++q;
            if (q == 0) q = 1;
            const Mat Q = es.eigenvectors().leftCols(q);
            const Mat P = es.eigenvectors().rightCols(N - q);
            // G(y) Q = 0 as a linear system in y.
            Mat C(N * q, m);
            for (int i = 0; i < m; ++i) {
                Mat GQ = G[i] * Q;
                C.col(i) = Eigen::Map<Vec>(GQ.data(), N * q);
            }
            Mat R0 = Gy * Q;
            Vec rhs = -Eigen::Map<Vec>(R0.data(), N * q);
            Vec dy = m ? Vec(C.completeOrthogonalDecomposition().solve(rhs)) : Vec::Zero(0);
            if (m && (C * dy - rhs).norm() > 1e-6 * scale)
                return finish(G0, G, b, y, SolveStatus::infeasible, c1.gap, steps);
            if (!m && rhs.norm() > 1e-6 * scale)
                return finish(G0, G, b, y, SolveStatus::infeasible, c1.gap, steps);
            const Vec yp = y + dy;
            NumericalNullspace ns = numerical_nullspace(C, 1e-10 * scale, 1e-8);
            const Mat& Nz = ns.basis;
            const int mz = static_cast<int>(Nz.cols());
            Mat H0 = P.transpose() * affine(G0, G, yp) * P;
            H0 = 0.5 * (H0 + H0.transpose());
            std::vector<Mat> H(mz);
            for (int j = 0; j < mz; ++j) {
                Mat S = Mat::Zero(N, N);
                for (int i = 0; i < m; ++i) S += Nz(i, j) * G[i];
                H[j] = P.transpose() * S * P;
            }
            Vec bz = Nz.transpose() * b;
            LmiResult sub = solve_embedded(H0, H, bz, opt, steps, depth + 1);
            Vec yfull = yp + (mz ? Vec(Nz * sub.y) : Vec::Zero(m));
            LmiResult r = finish(G0, G, b, yfull, sub.status, sub.gap, steps);
            r.faces_removed = sub.faces_removed + 1;
            return r;
        }
    }
    CoreResult c2 = barrier_core(G0, G, b, y, opt, steps, nullptr);
    SolveStatus st = SolveStatus::optimal;
    if (c2.unbounded) st = SolveStatus::unbounded;
    else if (c2.out_of_budget) st = SolveStatus::max_iter;
    return finish(G0, G, b, c2.x, st, c2.gap, steps);
}

}  // namespace

LmiResult solve_lmi_max(const LmiProgram& prog, const SolverOptions& opt) {
    const int m = prog.m();
    if (prog.objective.size() != m) throw std::invalid_argument("solve_lmi_max: objective size mismatch");
    for (const Mat& Fi : prog.F)
        if (Fi.rows() != prog.F0.rows() || Fi.cols() != prog.F0.cols())
            throw std::invalid_argument("solve_lmi_max: coefficient size mismatch");
    if ((prog.box_lo.size() && prog.box_lo.size() != m) || (prog.box_hi.size() && prog.box_hi.size() != m))
        throw std::invalid_argument("solve_lmi_max: box size mismatch");
    Mat G0;
    std::vector<Mat> G;
    embed_box(prog, G0, G);
    int steps = 0;
    LmiResult r;
    try {
        r = solve_embedded(G0, G, prog.objective, opt, steps, 0);
    } catch (const std::logic_error& e) {
        if (opt.trace) *opt.trace << "solver breakdown: " << e.what() << "\n";
        r.status = SolveStatus::max_iter;
        r.y = Vec::Zero(m);
        r.newton_steps = steps;
    }
    if (r.y.size() == m) r.min_eig = min_eigenvalue(affine(prog.F0, prog.F, r.y));
    return r;
}

bool lmi_feasible(const Mat& F0, const std::vector<Mat>& F, const Vec& box_lo, const Vec& box_hi,
                  const SolverOptions& opt) {
    LmiProgram p;
    p.F0 = F0;
    p.F = F;
    p.box_lo = box_lo;
    p.box_hi = box_hi;
    const int m = p.m();
    Mat G0;
    std::vector<Mat> G;
    embed_box(p, G0, G);
    const int N = static_cast<int>(G0.rows());
    if (N == 0) return true;
    // Start at the box center (or 0 for unbounded coordinates).
    Vec y0 = Vec::Zero(m);
    for (int i = 0; i < m; ++i) {
        const double lo = box_lo.size() ? box_lo(i) : -kInf, hi = box_hi.size() ? box_hi(i) : kInf;
        if (std::isfinite(lo) && std::isfinite(hi)) y0(i) = 0.5 * (lo + hi);
        else if (std::isfinite(lo)) y0(i) = lo + 1.0;
        else if (std::isfinite(hi)) y0(i) = hi - 1.0;
    }
    Mat H0 = affine(G0, G, y0);
    std::vector<Mat> G1 = G;
    G1.push_back(-Mat::Identity(N, N));
    Vec b1 = Vec::Zero(m + 1);
    b1(m) = 1.0;
    Vec x1 = Vec::Zero(m + 1);
    x1(m) = min_eigenvalue(H0) - 1.0;
    int steps = 0;
    SolverOptions o1 = opt;
    o1.tol = std::min(opt.tol, 1e-10);
    try {
        CoreResult c = barrier_core(H0, G1, b1, x1, o1, steps, [m](const Vec& x) { return x(m) > 1e-8; });
        return c.stopped_early || c.x(m) >= -1e-9;
    } catch (const std::logic_error&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// Dense two-phase simplex on a tableau, with the final vertex recomputed from
// the optimal basis against the original data.

namespace {

struct Tableau {
    Mat T;                   // (rows+1) x (cols+1); last column is the rhs, last row the objective
    std::vector<int> basis;  // basic variable of each row
};

bool pivot_loop(Tableau& tb, int ncols_allowed, int& pivots, int max_pivots, bool& unbounded) {
    const int rows = static_cast<int>(tb.T.rows()) - 1;
    const int rhs = static_cast<int>(tb.T.cols()) - 1;
    int degenerate_run = 0;
    unbounded = false;
    while (pivots < max_pivots) {
        const bool bland = degenerate_run > 20;
        int enter = -1;
        double best = -1e-11;
        for (int j = 0; j < ncols_allowed; ++j) {
            const double rc = tb.T(rows, j);
            if (rc < best) {
                enter = j;
                if (bland) break;
                best = rc;
            }
        }
        if (enter < 0) return true;
        int leave = -1;
        double ratio = kInf;
        for (int i = 0; i < rows; ++i) {
            const double a = tb.T(i, enter);
            if (a > 1e-11) {
                const double r = tb.T(i, rhs) / a;
                if (r < ratio - 1e-13 || (std::abs(r - ratio) <= 1e-13 && leave >= 0 && tb.basis[i] < tb.basis[leave])) {
                    ratio = r;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            unbounded = true;
            return false;
        }
        degenerate_run = ratio <= 1e-13 ? degenerate_run + 1 : 0;
        const double piv = tb.T(leave, enter);
        tb.T.row(leave) /= piv;
        for (int i = 0; i <= rows; ++i)
            if (i != leave && tb.T(i, enter) != 0.0) tb.T.row(i) -= tb.T(i, enter) * tb.T.row(leave);
        tb.basis[leave] = enter;
        ++pivots;
    }
    return false;
}

}  // namespace

LpResult solve_lp(const LinearProgram& p, const SolverOptions& opt) {
    const int n = p.n();
    const int mi = static_cast<int>(p.G.rows());
    const int me = static_cast<int>(p.E.rows());
    if ((mi && p.G.cols() != n) || p.h.size() != mi || (me && p.E.cols() != n) || p.f.size() != me)
        throw std::invalid_argument("solve_lp: inconsistent dimensions");
    const Vec lo = p.lo.size() ? p.lo : Vec::Constant(n, -kInf);
    const Vec hi = p.hi.size() ? p.hi : Vec::Constant(n, kInf);

    // x = shift + M u with u >= 0.
    std::vector<std::pair<int, double>> cols;  // (original variable, coefficient)
    Vec shift = Vec::Zero(n);
    std::vector<std::pair<int, double>> ub_rows;  // (u index, bound) for finite two-sided boxes
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(lo(j))) {
            shift(j) = lo(j);
            cols.push_back({j, 1.0});
            if (std::isfinite(hi(j))) ub_rows.push_back({static_cast<int>(cols.size()) - 1, hi(j) - lo(j)});
        } else if (std::isfinite(hi(j))) {
            shift(j) = hi(j);
            cols.push_back({j, -1.0});
        } else {
            cols.push_back({j, 1.0});
            cols.push_back({j, -1.0});
        }
    }
    const int nu = static_cast<int>(cols.size());
    const int nineq = mi + static_cast<int>(ub_rows.size());
    const int rows = nineq + me;
    Mat A = Mat::Zero(rows, nu);
    Vec bvec(rows);
    for (int r = 0; r < mi; ++r) {
        for (int k = 0; k < nu; ++k) A(r, k) = p.G(r, cols[k].first) * cols[k].second;
        bvec(r) = p.h(r) - p.G.row(r).dot(shift);
    }
    for (size_t r = 0; r < ub_rows.size(); ++r) {
        A(mi + r, ub_rows[r].first) = 1.0;
        bvec(mi + r) = ub_rows[r].second;
    }
    for (int r = 0; r < me; ++r) {
        for (int k = 0; k < nu; ++k) A(nineq + r, k) = p.E(r, cols[k].first) * cols[k].second;
        bvec(nineq + r) = p.f(r) - p.E.row(r).dot(shift);
    }
    Vec cu(nu);
    for (int k = 0; k < nu; ++k) cu(k) = p.c(cols[k].first) * cols[k].second;

    // Columns: u (nu), slacks (nineq), artificials (rows).
    const int ns = nineq, na = rows;
    const int total = nu + ns + na;
    Tableau tb;
    tb.T = Mat::Zero(rows + 1, total + 1);
    tb.basis.assign(rows, -1);
    for (int r = 0; r < rows; ++r) {
        const double sgn = bvec(r) < 0 ? -1.0 : 1.0;
        tb.T.row(r).head(nu) = sgn * A.row(r);
        if (r < nineq) tb.T(r, nu + r) = sgn;
        tb.T(r, nu + ns + r) = 1.0;
        tb.T(r, total) = sgn * bvec(r);
        tb.basis[r] = nu + ns + r;
    }
    // Phase 1 objective: sum of artificials, expressed in nonbasic terms.
    for (int r = 0; r < rows; ++r) tb.T.row(rows) -= tb.T.row(r);
    for (int r = 0; r < rows; ++r) tb.T(rows, nu + ns + r) = 0.0;

    LpResult res;
    const int max_pivots = 50 * (rows + total) + 1000;
    bool unbounded = false;
    if (!pivot_loop(tb, nu + ns, res.pivots, max_pivots, unbounded)) {
        res.status = SolveStatus::max_iter;
        return res;
    }
    const double scale = 1.0 + (rows ? bvec.cwiseAbs().maxCoeff() : 0.0);
    if (-tb.T(rows, total) > 1e-9 * scale) {
        res.status = SolveStatus::infeasible;
        return res;
    }
    // Drive artificials out of the basis; drop redundant rows.
    std::vector<bool> keep(rows, true);
    for (int r = 0; r < rows; ++r) {
        if (tb.basis[r] < nu + ns) continue;
        int j = -1;
        for (int k = 0; k < nu + ns; ++k)
            if (std::abs(tb.T(r, k)) > 1e-9) {
                j = k;
                break;
            }
        if (j < 0) {
            keep[r] = false;
            continue;
        }
        tb.T.row(r) /= tb.T(r, j);
        for (int i = 0; i <= rows; ++i)
            if (i != r && tb.T(i, j) != 0.0) tb.T.row(i) -= tb.T(i, j) * tb.T.row(r);
        tb.basis[r] = j;
    }
    // Phase 2 tableau without artificial columns.
    int kept = 0;
    for (bool k : keep) kept += k;
    Tableau t2;
    t2.T = Mat::Zero(kept + 1, nu + ns + 1);
    int rr = 0;
    for (int r = 0; r < rows; ++r)
        if (keep[r]) {
            t2.T.row(rr).head(nu + ns) = tb.T.row(r).head(nu + ns);
            t2.T(rr, nu + ns) = tb.T(r, total);
            t2.basis.push_back(tb.basis[r]);
            ++rr;
        }
    Vec cfull = Vec::Zero(nu + ns);
    cfull.head(nu) = cu;
    t2.T.row(kept).head(nu + ns) = cfull.transpose();
    for (int r = 0; r < kept; ++r) {
        const double cb = cfull(t2.basis[r]);
        if (cb != 0.0) t2.T.row(kept) -= cb * t2.T.row(r);
    }
    if (!pivot_loop(t2, nu + ns, res.pivots, max_pivots, unbounded)) {
        res.status = unbounded ? SolveStatus::unbounded : SolveStatus::max_iter;
        return res;
    }
    // Recompute the vertex from the optimal basis with the original rows.
    Mat Afull(rows, nu + ns);
    Afull << A, Mat::Identity(rows, ns);
    std::vector<int> keep_rows;
    for (int r = 0; r < rows; ++r)
        if (keep[r]) keep_rows.push_back(r);
    Mat B(kept, kept);
    Vec rhs(kept);
    for (int i = 0; i < kept; ++i) {
        rhs(i) = bvec(keep_rows[i]);
        for (int k = 0; k < kept; ++k) B(i, k) = Afull(keep_rows[i], t2.basis[k]);
    }
    Vec ub = Vec::Zero(nu + ns);
    Vec xb = B.fullPivLu().solve(rhs);
    if (!xb.allFinite() || (B * xb - rhs).norm() > 1e-8 * scale) {
        for (int r = 0; r < kept; ++r) ub(t2.basis[r]) = t2.T(r, nu + ns);
    } else {
        for (int r = 0; r < kept; ++r) ub(t2.basis[r]) = std::max(0.0, xb(r));
    }
    res.x = shift;
    for (int k = 0; k < nu; ++k) res.x(cols[k].first) += cols[k].second * ub(k);
    res.objective = p.c.dot(res.x);
    res.status = SolveStatus::optimal;
    if (opt.trace) *opt.trace << "lp: " << res.pivots << " pivots, objective " << res.objective << "\n";
    return res;
}

}  // namespace spectrex
