#pragma once

// Independent oracles shared by the unit and acceptance tests. Nothing here
// calls into the library's numerical routines beyond basic tuple types.

#include "spectrex/sym_tuple.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using spectrex::Mat;
using spectrex::SymTuple;
using spectrex::Vec;

inline Mat kron(const Mat& A, const Mat& B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int a = 0; a < A.rows(); ++a)
        for (int b = 0; b < A.cols(); ++b)
            for (int i = 0; i < B.rows(); ++i)
                for (int j = 0; j < B.cols(); ++j) K(a * B.rows() + i, b * B.cols() + j) = A(a, b) * B(i, j);
    return K;
}

// L_A(X) built entry by entry.
inline Mat pencil(const SymTuple& A, const SymTuple& X) {
    const int d = A.n(), n = X.n();
    Mat L = Mat::Identity(d * n, d * n);
    for (int c = 0; c < A.g(); ++c) L += kron(A[c], X[c]);
    return L;
}

inline Mat random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0, 1);
    Mat G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = N(rng);
    Mat Q = G.householderQr().householderQ();
    return Q;
}

inline Mat random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> N(0, scale);
    Mat M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) M(i, j) = M(j, i) = N(rng);
    return M;
}

inline SymTuple random_tuple(int g, int n, std::mt19937_64& rng, double scale = 1.0) {
    std::vector<Mat> m;
    for (int c = 0; c < g; ++c) m.push_back(random_symmetric(n, rng, scale));
    return SymTuple(m);
}

inline std::vector<double> sorted_eigenvalues(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end());
    return v;
}

inline double min_eig(const Mat& M) { return sorted_eigenvalues(M).front(); }

// Eigenvectors of L for eigenvalues below cut.
inline Mat small_eigenspace(const Mat& L, double cut) {
    Eigen::SelfAdjointEigenSolver<Mat> es(L);
    int k = 0;
    while (k < es.eigenvalues().size() && es.eigenvalues()(k) < cut) ++k;
    return es.eigenvectors().leftCols(k);
}

// Kernel-containment test for matrix extremality: X is matrix extreme iff the
// symmetric (b0, b) with ker L_A(X) in ker (I (x) b0 + sum A_i (x) b_i) are
// exactly the multiples of (I, X). Decided by an SVD rank count.
inline bool kriel_matrix_extreme(const SymTuple& A, const SymTuple& X, double kernel_cut = 1e-8,
                                 double rank_rel = 1e-9) {
    const int g = A.g(), d = A.n(), n = X.n();
    const Mat K = small_eigenspace(pencil(A, X), kernel_cut);
    if (K.cols() == 0) return false;
    std::vector<Mat> cols;
    const Mat Id = Mat::Identity(d, d);
    for (int c = 0; c <= g; ++c)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Mat E = Mat::Zero(n, n);
                E(i, j) = E(j, i) = 1;
                const Mat M = kron(c == 0 ? Id : A[c - 1], E) * K;
                cols.push_back(Eigen::Map<const Vec>(M.data(), M.size()));
            }
    Mat S(cols[0].size(), cols.size());
    for (size_t c = 0; c < cols.size(); ++c) S.col(c) = cols[c];
    Eigen::JacobiSVD<Mat> svd(S);
    const Vec& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rank_rel * s(0)) ++rank;
    const int nullity = static_cast<int>(S.cols()) - rank;
    return nullity == 1;
}

// Arveson extremality: no nonzero beta (g columns of length n) with
// (sum A_i (x) beta_i^T) K = 0 for K spanning ker L_A(X).
inline bool arveson_extreme(const SymTuple& A, const SymTuple& X, double kernel_cut = 1e-8,
                            double rank_rel = 1e-9) {
    const int g = A.g(), n = X.n();
    const Mat K = small_eigenspace(pencil(A, X), kernel_cut);
    if (K.cols() == 0) return false;
    Mat S(A.n() * K.cols(), g * n);
    for (int c = 0; c < g; ++c)
        for (int i = 0; i < n; ++i) {
            const Mat M = kron(A[c], Mat(Vec::Unit(n, i).transpose())) * K;
            S.col(c * n + i) = Eigen::Map<const Vec>(M.data(), M.size());
        }
    Eigen::JacobiSVD<Mat> svd(S);
    const Vec& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rank_rel * std::max(1.0, s(0))) ++rank;
    return rank == g * n;
}

// Dimension of the commutant {T : T X_i = X_i T for all i}.
inline int commutant_dim(const SymTuple& X, double rank_rel = 1e-9) {
    const int n = X.n();
    const Mat I = Mat::Identity(n, n);
    Mat S(X.g() * n * n, n * n);
    for (int c = 0; c < X.g(); ++c) S.middleRows(c * n * n, n * n) = kron(I, X[c]) - kron(X[c].transpose(), I);
    Eigen::JacobiSVD<Mat> svd(S);
    const Vec& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rank_rel * std::max(1.0, s(0))) ++rank;
    return n * n - rank;
}

// min c.x s.t. G x <= h, E x = f, lo <= x <= hi (finite box), by enumerating
// every vertex of the polytope.
struct VertexResult {
    bool feasible = false;
    double value = std::numeric_limits<double>::infinity();
    Vec x;
};

inline VertexResult vertex_enumeration(const Vec& c, const Mat& G, const Vec& h, const Mat& E, const Vec& f,
                                       const Vec& lo, const Vec& hi) {
    const int n = static_cast<int>(c.size());
    std::vector<Vec> rows;
    std::vector<double> rhs;
    for (int i = 0; i < G.rows(); ++i) {
        rows.push_back(G.row(i).transpose());
        rhs.push_back(h(i));
    }
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e(i) = 1;
        rows.push_back(e);
        rhs.push_back(hi(i));
        rows.push_back(-e);
        rhs.push_back(-lo(i));
    }
    const int ne = static_cast<int>(E.rows());
    const int need = n - ne;
    const int m = static_cast<int>(rows.size());
    VertexResult best;
    std::vector<int> pick(need);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == need) {
            Mat M(n, n);
            Vec b(n);
            for (int i = 0; i < ne; ++i) {
                M.row(i) = E.row(i);
                b(i) = f(i);
            }
            for (int i = 0; i < need; ++i) {
                M.row(ne + i) = rows[pick[i]].transpose();
                b(ne + i) = rhs[pick[i]];
            }
            Eigen::FullPivLU<Mat> lu(M);
            if (lu.rank() < n) return;
            const Vec x = lu.solve(b);
            for (int r = 0; r < m; ++r)
                if (rows[r].dot(x) > rhs[r] + 1e-9) return;
            for (int i = 0; i < ne; ++i)
                if (std::abs(E.row(i).dot(x) - f(i)) > 1e-9) return;
            const double v = c.dot(x);
            if (!best.feasible || v < best.value) {
                best.feasible = true;
                best.value = v;
                best.x = x;
            }
            return;
        }
        for (int r = start; r < m; ++r) {
            pick[depth] = r;
            rec(r + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace oracle
