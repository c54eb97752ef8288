#include "spectrex/extremality.hpp"

#include <cmath>
#include <stdexcept>

namespace spectrex {

namespace {

Mat sym_unit(int n, int i, int j) {
    Mat E = Mat::Zero(n, n);
    E(i, j) = 1.0;
    E(j, i) = 1.0;
    return E;
}

Mat kron(const Mat& P, const Mat& Q) {
    Mat out(P.rows() * Q.rows(), P.cols() * Q.cols());
    for (Eigen::Index a = 0; a < P.rows(); ++a)
        for (Eigen::Index b = 0; b < P.cols(); ++b)
            out.block(a * Q.rows(), b * Q.cols(), Q.rows(), Q.cols()) = P(a, b) * Q;
    return out;
}

Vec vec_of(const Mat& M) { return Eigen::Map<const Vec>(M.data(), M.size()); }

void check_kernel(const SymTuple& A, const SymTuple& X, const Mat& K) {
    check_same_g(A, X);
    if (K.cols() > 0 && K.rows() != A.n() * X.n())
        throw std::invalid_argument("kernel basis has wrong row count");
}

}  // namespace

EquationMatrix arveson_system(const SymTuple& A, const SymTuple& X, const Mat& K) {
    check_kernel(A, X, K);
    const int g = A.g(), d = A.n(), n = X.n(), k = static_cast<int>(K.cols());
    EquationMatrix M;
    M.kind = SystemKind::arveson;
    M.unknown_layout = "beta[c][i] at column c*n+i (c = 0..g-1, i = 0..n-1)";
    M.data = Mat::Zero(d * k, g * n);
    for (int c = 0; c < g; ++c)
        for (int i = 0; i < n; ++i) {
            // (A_c (x) e_i^T) K, a d x k matrix
            Mat R = Mat::Zero(d, k);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (A[c](a, b) != 0.0) R.row(a) += A[c](a, b) * K.row(b * n + i);
            M.data.col(c * n + i) = vec_of(R);
        }
    return M;
}

EquationMatrix euclidean_system(const SymTuple& A, const SymTuple& X, const Mat& K) {
    check_kernel(A, X, K);
    const int g = A.g(), d = A.n(), n = X.n(), k = static_cast<int>(K.cols());
    EquationMatrix M;
    M.kind = SystemKind::euclidean;
    M.unknown_layout = "beta[c](i,j), i<=j row-major upper triangle, coordinate-major";
    const int per = n * (n + 1) / 2;
    M.data = Mat::Zero(d * n * k, g * per);
    int col = 0;
    for (int c = 0; c < g; ++c)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) M.data.col(col++) = vec_of(kron(A[c], sym_unit(n, i, j)) * K);
    return M;
}

EquationMatrix matrix_extreme_system(const SymTuple& A, const SymTuple& X, const Mat& K) {
    check_kernel(A, X, K);
    const int g = A.g(), d = A.n(), n = X.n(), k = static_cast<int>(K.cols());
    EquationMatrix M;
    M.kind = SystemKind::matrix_extreme;
    M.unknown_layout =
        "beta0(i,j) then beta[c](i,j) for c = 1..g; i<=j row-major upper triangle within each";
    const int per = n * (n + 1) / 2;
    M.data = Mat::Zero(d * n * k + 1, (g + 1) * per);
    const Mat Id = Mat::Identity(d, d);
    int col = 0;
    for (int c = 0; c <= g; ++c)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const Mat E = sym_unit(n, i, j);
                const Mat& coeff = c == 0 ? Id : A[c - 1];
                M.data.col(col).head(d * n * k) = vec_of(kron(coeff, E) * K);
                const double tr = c == 0 ? E.trace() : (X[c - 1].transpose() * E).trace();
                M.data(d * n * k, col) = tr;
                ++col;
            }
    return M;
}

Counts rank_nullity_counts(int g, int d, int n) {
    if (g < 1 || d < 1 || n < 1) throw std::invalid_argument("rank_nullity_counts: positive sizes required");
    auto ceil_div = [](long long a, long long b) { return static_cast<int>((a + b - 1) / b); };
    Counts c;
    c.arv = ceil_div(1LL * g * n, d);
    c.euc = ceil_div(1LL * g * (n + 1), 2LL * d);
    // ceil((n+1)(g+1)/(2d) - 1/(nd)) = ceil((n(n+1)(g+1) - 2) / (2dn))
    c.mat = ceil_div(1LL * n * (n + 1) * (g + 1) - 2, 2LL * d * n);
    return c;
}

ColTuple unflatten_columns(const Vec& v, int g, int n) {
    ColTuple out;
    for (int c = 0; c < g; ++c) out.push_back(v.segment(c * n, n));
    return out;
}

Vec flatten_columns(const ColTuple& beta) {
    const int g = static_cast<int>(beta.size());
    const int n = g ? static_cast<int>(beta[0].size()) : 0;
    Vec v(g * n);
    for (int c = 0; c < g; ++c) v.segment(c * n, n) = beta[c];
    return v;
}

DilationSubspace dilation_subspace(const SymTuple& A, const SymTuple& X, const Mat& K,
                                   const ToleranceConfig& cfg) {
    const int g = A.g(), n = X.n();
    DilationSubspace S;
    if (K.cols() == 0) {
        S.flat = Mat::Identity(g * n, g * n);
    } else {
        const auto ns = numerical_nullspace(arveson_system(A, X, K).data, cfg.ee_mag, cfg.ee_gap);
        S.flat = ns.basis;
    }
    S.dim = static_cast<int>(S.flat.cols());
    for (int j = 0; j < S.dim; ++j) S.basis.push_back(unflatten_columns(S.flat.col(j), g, n));
    return S;
}

DilationSubspace dilation_subspace(const SymTuple& A, const SymTuple& X, const ToleranceConfig& cfg) {
    const auto K = lmi_kernel(A, X, cfg.post_mag, cfg.post_gap);
    return dilation_subspace(A, X, K ? K->basis : Mat(A.n() * X.n(), 0), cfg);
}

namespace {

Mat commutant_map(const SymTuple& X) {
    const int g = X.g(), n = X.n();
    const int per = n * (n + 1) / 2;
    Mat M(g * n * n, per);
    int col = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Mat E = sym_unit(n, i, j);
            for (int c = 0; c < g; ++c) {
                const Mat C = X[c] * E - E * X[c];
                M.col(col).segment(c * n * n, n * n) = vec_of(C);
            }
            ++col;
        }
    return M;
}

Mat svec_to_mat(const Vec& v, int n) {
    Mat S(n, n);
    int idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            S(i, j) = S(j, i) = v(idx);
            ++idx;
        }
    return S;
}

}  // namespace

int commutant_dimension(const SymTuple& X, double eps_mag, double eps_gap) {
    if (X.n() == 1) return 1;
    return numerical_nullspace(commutant_map(X), eps_mag, eps_gap).nullity;
}

std::vector<Mat> commutant_basis(const SymTuple& X, double eps_mag, double eps_gap) {
    const int n = X.n();
    if (n == 1) return {Mat::Identity(1, 1)};
    const auto ns = numerical_nullspace(commutant_map(X), eps_mag, eps_gap);
    std::vector<Mat> out;
    for (int j = 0; j < ns.nullity; ++j) {
        Mat S = svec_to_mat(ns.basis.col(j), n);
        out.push_back(S / S.norm());
    }
    return out;
}

bool is_irreducible(const SymTuple& X, double eps_mag, double eps_gap) {
    return commutant_dimension(X, eps_mag, eps_gap) == 1;
}

std::string to_string(Flag f) {
    switch (f) {
        case Flag::no: return "no";
        case Flag::yes: return "yes";
        case Flag::indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

// Trivial nullspace => yes, except when the smallest singular value sits in
// the band [ee_mag, 10 ee_mag) where verdicts are unstable.
Flag decide(const EquationMatrix& M, const ToleranceConfig& cfg, SystemEvidence& ev) {
    ev.rows = M.rows();
    ev.cols = M.cols();
    const auto ns = numerical_nullspace(M.data, cfg.ee_mag, cfg.ee_gap);
    ev.nullity = ns.nullity;
    if (ns.singular_values.size() > 0) {
        ev.sigma_max = ns.singular_values.maxCoeff();
        ev.sigma_min = ns.singular_values.minCoeff();
    }
    if (M.cols() > M.rows()) return Flag::no;
    if (ev.sigma_min >= cfg.ee_mag && ev.sigma_min < 10.0 * cfg.ee_mag) return Flag::indeterminate;
    return ns.nullity == 0 ? Flag::yes : Flag::no;
}

}  // namespace

ExtremeReport classify(const SymTuple& A, const SymTuple& X, const ToleranceConfig& cfg) {
    check_same_g(A, X);
    const int g = A.g(), d = A.n(), n = X.n();
    ExtremeReport r;
    r.counts = rank_nullity_counts(g, d, n);
    const Mat L = eval_pencil(A, X);
    r.min_eig = min_eigenvalue(L);
    if (r.min_eig < -cfg.psd_slack)
        throw std::invalid_argument("point outside the spectrahedron: min eigenvalue " + std::to_string(r.min_eig));
    const auto K = lmi_kernel(L, cfg.post_mag, cfg.post_gap);
    if (!K) {
        r.dil_dim = g * n;
        return r;
    }
    r.k = K->k;
    r.kernel_accuracy = K->accuracy;
    const auto arv = arveson_system(A, X, K->basis);
    r.arveson = decide(arv, cfg, r.arv_evidence);
    r.dil_dim = r.arv_evidence.nullity;
    r.euclidean = decide(euclidean_system(A, X, K->basis), cfg, r.euc_evidence);
    r.matrix = decide(matrix_extreme_system(A, X, K->basis), cfg, r.mat_evidence);
    r.irreducible = is_irreducible(X, cfg.irr_mag, cfg.irr_gap) ? Flag::yes : Flag::no;
    if (r.arveson == Flag::yes && r.irreducible == Flag::yes) r.free = Flag::yes;
    else if (r.arveson == Flag::no || r.irreducible == Flag::no) r.free = Flag::no;
    else r.free = Flag::indeterminate;
    return r;
}

nlohmann::json report_to_json(const ExtremeReport& r) {
    auto ev = [](const SystemEvidence& e) {
        return nlohmann::json{{"sigma_min", e.sigma_min}, {"sigma_max", e.sigma_max}, {"rows", e.rows},
                              {"cols", e.cols}, {"nullity", e.nullity}};
    };
    return {{"k", r.k},
            {"dil_dim", r.dil_dim},
            {"counts", {{"arv", r.counts.arv}, {"euc", r.counts.euc}, {"mat", r.counts.mat}}},
            {"euclidean", to_string(r.euclidean)},
            {"matrix", to_string(r.matrix)},
            {"arveson", to_string(r.arveson)},
            {"irreducible", to_string(r.irreducible)},
            {"free", to_string(r.free)},
            {"min_eig", r.min_eig},
            {"kernel_accuracy", r.kernel_accuracy},
            {"evidence", {{"euclidean", ev(r.euc_evidence)}, {"matrix", ev(r.mat_evidence)},
                          {"arveson", ev(r.arv_evidence)}}}};
}

}  // namespace spectrex
