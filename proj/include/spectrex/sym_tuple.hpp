#pragma once

#include <Eigen/Dense>
#include <gmpxx.h>
#include <json.hpp>

#include <string>
#include <vector>

namespace spectrex {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// A g-tuple of n x 1 columns, used for the off-diagonal part of a 1-dilation.
using ColTuple = std::vector<Vec>;

// g-tuple of real symmetric n x n matrices.
class SymTuple {
public:
    SymTuple() = default;

    // Symmetrizes when the asymmetry is at most sym_tol, otherwise throws
    // std::invalid_argument naming the offending coordinate and entry.
    explicit SymTuple(std::vector<Mat> mats, double sym_tol = 1e-12);

    static SymTuple zeros(int g, int n);

    int g() const { return static_cast<int>(mats_.size()); }
    int n() const { return mats_.empty() ? 0 : static_cast<int>(mats_[0].rows()); }

    const Mat& operator[](int i) const { return mats_[i]; }
    const std::vector<Mat>& mats() const { return mats_; }

    // Writes v at (i,j) and (j,i) of coordinate c.
    void set_entry(int c, int i, int j, double v);

    // Largest absolute entry over all coordinates.
    double max_abs() const;

private:
    std::vector<Mat> mats_;
};

// (X0, X): inhomogeneous component plus a SymTuple of the same level.
struct HomTuple {
    Mat inhomogeneous;
    SymTuple rest;

    int g() const { return rest.g(); }
    int n() const { return static_cast<int>(inhomogeneous.rows()); }
};

// I_{dn} + sum_i A_i (x) X_i
Mat eval_pencil(const SymTuple& A, const SymTuple& X);
// sum_i A_i (x) X_i
Mat eval_linear(const SymTuple& A, const SymTuple& X);
// Lambda_{(I,A)}(X0, X) = I_d (x) X0 + sum_i A_i (x) X_i
Mat eval_linear_hom(const SymTuple& A, const HomTuple& X);
// Lambda_A(beta) for a column tuple: the dn x d matrix sum_i A_i (x) beta_i
Mat eval_linear_col(const SymTuple& A, const ColTuple& beta);

// Index permutation p of size d(n+k): taking rows and columns p[0], p[1], ...
// of L_A(Y) for Y = [[X, b], [b^T, c]] (X n x n, c k x k) yields
// [[L_A(X), Lambda_A(b)], [Lambda_A(b^T), L_A(c)]].
std::vector<int> canonical_shuffle(int d, int n, int k);
Mat permute_sym(const Mat& M, const std::vector<int>& p);

SymTuple direct_sum(const SymTuple& X, const SymTuple& Z);
// V^T X_i V for each coordinate; V is n x m.
SymTuple conjugate(const Mat& V, const SymTuple& X);
SymTuple scale(const SymTuple& X, double s);
SymTuple add(const SymTuple& X, const SymTuple& Z);
// [[X_i, b_i], [b_i^T, gamma_i]] for each coordinate.
SymTuple one_dilation(const SymTuple& X, const ColTuple& beta, const Vec& gamma);
// Sub-block [lo, lo+len) x [lo, lo+len) of every coordinate.
SymTuple leading_block(const SymTuple& X, int len);

void check_same_g(const SymTuple& A, const SymTuple& X);

// ---- exact-valued tuples and JSON interchange ----

// Row-major n x n rational matrices, one per coordinate.
struct RatTuple {
    int g = 0;
    int n = 0;
    std::vector<std::vector<mpq_class>> mats;

    const mpq_class& at(int c, int i, int j) const { return mats[c][i * n + j]; }
    mpq_class& at(int c, int i, int j) { return mats[c][i * n + j]; }

    static RatTuple zeros(int g, int n);
    SymTuple to_double() const;
};

enum class NumericMode { floating, rational };

struct TupleDoc {
    NumericMode mode = NumericMode::floating;
    SymTuple numeric;
    RatTuple exact;  // populated only in rational mode
};

mpq_class parse_rational(const std::string& s);
std::string rational_string(const mpq_class& q);

// Throws std::invalid_argument on malformed documents, ragged rows, or
// asymmetry beyond 1e-12 (float) / any asymmetry (rational).
TupleDoc tuple_from_json(const nlohmann::json& j);
nlohmann::json tuple_to_json(const SymTuple& X);
nlohmann::json tuple_to_json(const RatTuple& X);

TupleDoc read_tuple_file(const std::string& path);

}  // namespace spectrex
