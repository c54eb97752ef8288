#pragma once

#include "spectrex/extremality.hpp"
#include "spectrex/sym_tuple.hpp"

#include <gmpxx.h>

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace spectrex {

// ---- univariate polynomials over Q; coefficient i multiplies x^i ----

using QPoly = std::vector<mpq_class>;

namespace poly {

void trim(QPoly& p);
int degree(const QPoly& p);  // -1 for the zero polynomial
bool is_zero(const QPoly& p);
QPoly constant(const mpq_class& c);
QPoly monomial(const mpq_class& c, int k);
QPoly add(const QPoly& a, const QPoly& b);
QPoly sub(const QPoly& a, const QPoly& b);
QPoly mul(const QPoly& a, const QPoly& b);
QPoly scale(const QPoly& a, const mpq_class& c);
QPoly neg(const QPoly& a);
// a = q b + r with deg r < deg b; throws on b = 0.
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
QPoly rem(const QPoly& a, const QPoly& b);
// Monic gcd; gcd(0, 0) = 0.
QPoly gcd(QPoly a, QPoly b);
QPoly derivative(const QPoly& p);
mpq_class eval(const QPoly& p, const mpq_class& x);
double eval_double(const QPoly& p, double x);
// Integer coefficients with content 1 and positive leading coefficient.
QPoly primitive(const QPoly& p);
QPoly squarefree(const QPoly& p);
// Coefficients of x^(2i) only; throws when an odd power is present.
QPoly even_part_in_square(const QPoly& p);
std::vector<std::string> to_strings(const QPoly& p);
QPoly from_strings(const std::vector<std::string>& s);

}  // namespace poly

// ---- real roots ----

std::vector<QPoly> sturm_sequence(const QPoly& p);
// Distinct real roots in the half-open interval (a, b].
int sturm_count(const std::vector<QPoly>& seq, const mpq_class& a, const mpq_class& b);
// Cauchy bound: every real root lies in (-B, B).
mpq_class root_bound(const QPoly& p);

struct RootInterval {
    mpq_class lo, hi;  // exactly one root in (lo, hi]; lo == hi for an exact rational root
};
// Isolating intervals for the distinct real roots in (lo, hi], sorted.
std::vector<RootInterval> sturm_isolate(const QPoly& p, const mpq_class& lo, const mpq_class& hi);
std::vector<RootInterval> sturm_isolate(const QPoly& p);

class AlgebraicNumber {
public:
    AlgebraicNumber() = default;
    // The defining polynomial is replaced by its primitive square-free part.
    // Throws std::invalid_argument unless (lo, hi] holds exactly one root.
    AlgebraicNumber(const QPoly& defining, mpq_class lo, mpq_class hi);

    const QPoly& defining() const { return p_; }
    const mpq_class& lo() const { return lo_; }
    const mpq_class& hi() const { return hi_; }
    mpq_class width() const { return hi_ - lo_; }
    bool is_rational() const { return lo_ == hi_; }

    // Halves the interval (exact sign evaluation at the midpoint).
    void refine();
    void refine_to(const mpq_class& width);
    double to_double();
    mpq_class midpoint() const { return (lo_ + hi_) / 2; }

    // Exact sign of q at this number.
    int sign_of(const QPoly& q);
    bool is_root_of(const QPoly& q);

private:
    QPoly p_;
    std::vector<QPoly> sturm_;
    mpq_class lo_, hi_;
};

// ---- rational linear algebra ----

using QMat = std::vector<std::vector<mpq_class>>;  // row-major

struct RationalSolution {
    bool consistent = false;
    std::vector<mpq_class> particular;
    std::vector<std::vector<mpq_class>> nullspace;  // basis vectors
};
// Exact Gauss-Jordan elimination; nullspace in reduced form.
RationalSolution rational_solve(const QMat& M, const std::vector<mpq_class>& b);
std::vector<std::vector<mpq_class>> rational_nullspace(const QMat& M);
int rational_rank(const QMat& M);

// ---- matrices over Q[alpha] ----

using PolyMat = std::vector<std::vector<QPoly>>;

// Coefficients (ascending in t) of det(t I - M), computed division-free.
std::vector<QPoly> char_poly_berkowitz(const PolyMat& M);

// Tuple whose entries are polynomials in alpha.
struct ParamTuple {
    int g = 0, n = 0;
    std::vector<std::vector<QPoly>> mats;  // row-major per coordinate
    const QPoly& at(int c, int i, int j) const { return mats[c][i * n + j]; }
    QPoly& at(int c, int i, int j) { return mats[c][i * n + j]; }
    static ParamTuple zeros(int g, int n);
    static ParamTuple constant(const RatTuple& X);
    SymTuple evaluate(double alpha) const;
};

PolyMat pencil_param(const RatTuple& A, const ParamTuple& Y);
// [[X, alpha beta], [alpha beta^T, 0]]
ParamTuple dilation_param(const RatTuple& X, const std::vector<std::vector<mpq_class>>& beta);
// Characteristic polynomial of L_A(Y(alpha)) for Y = dilation_param(X, beta).
// Throws std::logic_error if an odd power of alpha appears.
std::vector<QPoly> char_poly_param(const RatTuple& A, const RatTuple& X,
                                   const std::vector<std::vector<mpq_class>>& beta);

// ---- certificates ----

enum class CertificateKind { algebraic, radical_blocks };

struct Certificate {
    CertificateKind kind = CertificateKind::algebraic;
    RatTuple A;
    // algebraic: Y has entries in Q[alpha]
    ParamTuple Y;
    AlgebraicNumber alpha;
    int kernel_dim = 2;
    // radical_blocks: diagonal A, X entries as arithmetic expressions with sqrt
    std::vector<std::vector<std::string>> X_expr;  // per coordinate, row-major
    int level = 0;
    // numeric thresholds for the matrix-extreme evidence
    double sigma_min_floor = 1e-6;
    double sigma_max_ceiling = 5.0;
};

struct ClaimResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CertificateReport {
    bool passed = false;
    std::vector<ClaimResult> claims;
    int kernel_dim = 0;
    double sigma_min = 0, sigma_max = 0;
    Flag matrix = Flag::no, arveson = Flag::no;
    std::vector<QPoly> chi;  // algebraic kind only
    int singular_blocks = 0, positive_blocks = 0;  // radical_blocks kind only
};

CertificateReport verify_certificate(Certificate cert, const ToleranceConfig& cfg = {});
nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);
nlohmann::json certificate_report_to_json(const CertificateReport& r);

// Built-in certificates: a g=3, d=4 point at level 3 in Q[alpha] and a g=4,
// d=9 diagonal example at level 2 with nested radicals.
Certificate builtin_certificate_g3();
Certificate builtin_certificate_g4();

// Interval evaluation of an expression over integers, + - * / and sqrt,
// with outward rounding at the given precision (bits).
std::pair<std::string, std::string> interval_eval(const std::string& expr, int bits = 256);

struct ExactSearchOptions {
    int budget = 100;       // K resamples
    int psd_draws = 50;     // random rational combinations per K in step (3)
    bool require_matrix_extreme = true;  // run the full verifier before accepting
};

struct ExactSearchResult {
    std::optional<Certificate> cert;
    int attempts = 0;
    int no_solution = 0, not_psd = 0, no_beta = 0, no_root = 0, p2_vanishes = 0, not_extreme = 0;
};

// n is the level of the emitted Y; X is sought at level n - 1.
ExactSearchResult exact_search(const RatTuple& A, int n, std::mt19937_64& rng, const ExactSearchOptions& opt = {});

// Random boundary point of the wild disc with a 3-dimensional kernel.
struct WildDiscCandidate {
    SymTuple point;  // (X, Y) at level n
    SymTuple A;      // the g=2, d=3 defining pair
    int expected_kernel = 3;
};
SymTuple wild_disc_pencil();
WildDiscCandidate wild_disc_candidate(std::mt19937_64& rng, int n = 8);

}  // namespace spectrex
