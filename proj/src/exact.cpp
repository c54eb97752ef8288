#include "spectrex/exact.hpp"

#include "spectrex/numeric_kernel.hpp"
#include "spectrex/opt_small.hpp"

#include <mpfr.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace spectrex {

namespace poly {

void trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const QPoly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[i] != 0) return i;
    return -1;
}

bool is_zero(const QPoly& p) { return degree(p) < 0; }

QPoly constant(const mpq_class& c) {
    QPoly p{c};
    trim(p);
    return p;
}

QPoly monomial(const mpq_class& c, int k) {
    if (c == 0) return {};
    QPoly p(k + 1, mpq_class(0));
    p[k] = c;
    return p;
}

QPoly add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), mpq_class(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

QPoly sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), mpq_class(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

QPoly mul(const QPoly& a, const QPoly& b) {
    if (is_zero(a) || is_zero(b)) return {};
    QPoly r(a.size() + b.size() - 1, mpq_class(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j)
            if (b[j] != 0) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

QPoly scale(const QPoly& a, const mpq_class& c) {
    if (c == 0) return {};
    QPoly r = a;
    for (auto& x : r) x *= c;
    trim(r);
    return r;
}

QPoly neg(const QPoly& a) { return scale(a, -1); }

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    const int db = degree(b);
    if (db < 0) throw std::invalid_argument("polynomial division by zero");
    QPoly r = a;
    trim(r);
    QPoly q;
    const mpq_class lead = b[db];
    while (degree(r) >= db) {
        const int dr = degree(r);
        const mpq_class c = r[dr] / lead;
        if (static_cast<int>(q.size()) < dr - db + 1) q.resize(dr - db + 1, mpq_class(0));
        q[dr - db] = c;
        for (int i = 0; i <= db; ++i) r[dr - db + i] -= c * b[i];
        trim(r);
    }
    trim(q);
    return {q, r};
}

QPoly rem(const QPoly& a, const QPoly& b) { return divmod(a, b).second; }

QPoly gcd(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    while (!is_zero(b)) {
        QPoly r = rem(a, b);
        a = std::move(b);
        b = primitive(r);  // keeps coefficient growth in check
    }
    if (is_zero(a)) return {};
    return scale(a, mpq_class(1) / a[degree(a)]);
}

QPoly derivative(const QPoly& p) {
    if (p.size() <= 1) return {};
    QPoly d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<long>(i);
    trim(d);
    return d;
}

mpq_class eval(const QPoly& p, const mpq_class& x) {
    mpq_class r = 0;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) r = r * x + p[i];
    return r;
}

double eval_double(const QPoly& p, double x) {
    double r = 0;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) r = r * x + p[i].get_d();
    return r;
}

QPoly primitive(const QPoly& p) {
    QPoly r = p;
    trim(r);
    if (r.empty()) return r;
    mpz_class den = 1, num = 0;
    for (const auto& c : r)
        if (c != 0) den = lcm(den, mpz_class(c.get_den()));
    for (auto& c : r) c *= den;
    for (const auto& c : r)
        if (c != 0) num = gcd(num, mpz_class(c.get_num()));
    mpq_class f(1);
    f /= mpq_class(num);
    if (r.back() < 0) f = -f;
    for (auto& c : r) c *= f;
    return r;
}

QPoly squarefree(const QPoly& p) {
    if (degree(p) <= 0) return primitive(p);
    const QPoly g = gcd(p, derivative(p));
    return primitive(divmod(p, g).first);
}

QPoly even_part_in_square(const QPoly& p) {
    QPoly r;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0) continue;
        if (i % 2) throw std::logic_error("odd power of alpha in an even polynomial");
        if (r.size() < i / 2 + 1) r.resize(i / 2 + 1, mpq_class(0));
        r[i / 2] = p[i];
    }
    return r;
}

std::vector<std::string> to_strings(const QPoly& p) {
    std::vector<std::string> s;
    for (const auto& c : p) s.push_back(rational_string(c));
    return s;
}

QPoly from_strings(const std::vector<std::string>& s) {
    QPoly p;
    for (const auto& x : s) p.push_back(parse_rational(x));
    trim(p);
    return p;
}

}  // namespace poly

// ---------------------------------------------------------------------------

std::vector<QPoly> sturm_sequence(const QPoly& p) {
    std::vector<QPoly> seq;
    QPoly a = poly::primitive(p);
    if (poly::is_zero(a)) throw std::invalid_argument("sturm_sequence of the zero polynomial");
    seq.push_back(a);
    QPoly b = poly::primitive(poly::derivative(a));
    while (!poly::is_zero(b)) {
        seq.push_back(b);
        QPoly r = poly::rem(seq[seq.size() - 2], b);
        // positive rescaling keeps the sign pattern
        QPoly pr = poly::primitive(r);
        if (!pr.empty() && r.back() > 0) pr = poly::neg(pr);
        b = pr;
    }
    return seq;
}

namespace {

int sign_changes(const std::vector<QPoly>& seq, const mpq_class& x) {
    int changes = 0, last = 0;
    for (const auto& q : seq) {
        const int s = sgn(poly::eval(q, x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

}  // namespace

int sturm_count(const std::vector<QPoly>& seq, const mpq_class& a, const mpq_class& b) {
    if (b <= a) return 0;
    return sign_changes(seq, a) - sign_changes(seq, b);
}

mpq_class root_bound(const QPoly& p) {
    const int d = poly::degree(p);
    if (d <= 0) return 1;
    mpq_class m = 0;
    for (int i = 0; i < d; ++i) m = std::max(m, mpq_class(abs(p[i] / p[d])));
    return m + 1;
}

std::vector<RootInterval> sturm_isolate(const QPoly& p, const mpq_class& lo, const mpq_class& hi) {
    std::vector<RootInterval> out;
    if (poly::degree(p) <= 0) return out;
    const QPoly sf = poly::squarefree(p);
    const auto seq = sturm_sequence(sf);
    std::vector<std::pair<mpq_class, mpq_class>> stack{{lo, hi}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        const int c = sturm_count(seq, a, b);
        if (c == 0) continue;
        if (c == 1) {
            if (poly::eval(sf, b) == 0) out.push_back({b, b});
            else out.push_back({a, b});
            continue;
        }
        const mpq_class mid = (a + b) / 2;
        stack.push_back({mid, b});
        stack.push_back({a, mid});
    }
    std::sort(out.begin(), out.end(), [](const RootInterval& x, const RootInterval& y) { return x.hi < y.hi; });
    return out;
}

std::vector<RootInterval> sturm_isolate(const QPoly& p) {
    const mpq_class B = root_bound(p);
    return sturm_isolate(p, -B, B);
}

AlgebraicNumber::AlgebraicNumber(const QPoly& defining, mpq_class lo, mpq_class hi)
    : p_(poly::squarefree(defining)), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (poly::degree(p_) < 1) throw std::invalid_argument("AlgebraicNumber: defining polynomial is constant");
    sturm_ = sturm_sequence(p_);
    if (lo_ == hi_) {
        if (poly::eval(p_, lo_) != 0) throw std::invalid_argument("AlgebraicNumber: point interval is not a root");
        return;
    }
    if (sturm_count(sturm_, lo_, hi_) != 1)
        throw std::invalid_argument("AlgebraicNumber: interval does not isolate exactly one root");
    if (poly::eval(p_, hi_) == 0) lo_ = hi_;
}

void AlgebraicNumber::refine() {
    if (is_rational()) return;
    const mpq_class mid = midpoint();
    const int sm = sgn(poly::eval(p_, mid));
    if (sm == 0) {
        lo_ = hi_ = mid;
        return;
    }
    if (sm == sgn(poly::eval(p_, lo_))) lo_ = mid;
    else hi_ = mid;
}

void AlgebraicNumber::refine_to(const mpq_class& w) {
    while (!is_rational() && width() > w) refine();
}

double AlgebraicNumber::to_double() {
    refine_to(mpq_class(1, 1) / mpq_class(mpz_class(1) << 80));
    return mpq_class(midpoint()).get_d();
}

int AlgebraicNumber::sign_of(const QPoly& q) {
    if (poly::is_zero(q)) return 0;
    if (is_rational()) return sgn(poly::eval(q, lo_));
    const QPoly g = poly::gcd(p_, q);
    if (poly::degree(g) >= 1 && sturm_count(sturm_sequence(g), lo_, hi_) >= 1) return 0;
    if (poly::degree(q) == 0) return sgn(q[0]);
    const auto sq = sturm_sequence(q);
    while (sturm_count(sq, lo_, hi_) > 0) {
        refine();
        if (is_rational()) return sgn(poly::eval(q, lo_));
    }
    return sgn(poly::eval(q, hi_));
}

bool AlgebraicNumber::is_root_of(const QPoly& q) { return sign_of(q) == 0; }

// ---------------------------------------------------------------------------

namespace {

struct Rref {
    QMat R;
    std::vector<int> pivots;
};

Rref rref(QMat M) {
    const int rows = static_cast<int>(M.size());
    const int cols = rows ? static_cast<int>(M[0].size()) : 0;
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (M[i][c] != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(M[r], M[p]);
        const mpq_class inv = mpq_class(1) / M[r][c];
        for (int j = c; j < cols; ++j) M[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || M[i][c] == 0) continue;
            const mpq_class f = M[i][c];
            for (int j = c; j < cols; ++j) M[i][j] -= f * M[r][j];
        }
        piv.push_back(c);
        ++r;
    }
    return {std::move(M), std::move(piv)};
}

}  // namespace

RationalSolution rational_solve(const QMat& M, const std::vector<mpq_class>& b) {
    const int rows = static_cast<int>(M.size());
    const int cols = rows ? static_cast<int>(M[0].size()) : 0;
    if (static_cast<int>(b.size()) != rows) throw std::invalid_argument("rational_solve: size mismatch");
    QMat aug = M;
    for (int i = 0; i < rows; ++i) aug[i].push_back(b[i]);
    const Rref rr = rref(aug);
    RationalSolution sol;
    for (int p : rr.pivots)
        if (p == cols) return sol;  // 0 = nonzero
    sol.consistent = true;
    sol.particular.assign(cols, mpq_class(0));
    for (size_t k = 0; k < rr.pivots.size(); ++k) sol.particular[rr.pivots[k]] = rr.R[k][cols];
    std::vector<bool> is_pivot(cols, false);
    for (int p : rr.pivots) is_pivot[p] = true;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<mpq_class> v(cols, mpq_class(0));
        v[f] = 1;
        for (size_t k = 0; k < rr.pivots.size(); ++k) v[rr.pivots[k]] = -rr.R[k][f];
        sol.nullspace.push_back(std::move(v));
    }
    return sol;
}

std::vector<std::vector<mpq_class>> rational_nullspace(const QMat& M) {
    return rational_solve(M, std::vector<mpq_class>(M.size(), mpq_class(0))).nullspace;
}

int rational_rank(const QMat& M) { return static_cast<int>(rref(M).pivots.size()); }

// ---------------------------------------------------------------------------

std::vector<QPoly> char_poly_berkowitz(const PolyMat& M) {
    const int N = static_cast<int>(M.size());
    if (N == 0) return {poly::constant(1)};
    // C holds the coefficients of the leading r x r block, highest degree first.
    std::vector<QPoly> C{poly::constant(1), poly::neg(M[0][0])};
    for (int r = 1; r < N; ++r) {
        // Toeplitz column: 1, -a, -R S, -R A S, ..., -R A^{r-1} S
        std::vector<QPoly> col{poly::constant(1), poly::neg(M[r][r])};
        std::vector<QPoly> v(r);  // A^j S
        for (int i = 0; i < r; ++i) v[i] = M[i][r];
        for (int j = 0; j < r; ++j) {
            QPoly dot;
            for (int i = 0; i < r; ++i) dot = poly::add(dot, poly::mul(M[r][i], v[i]));
            col.push_back(poly::neg(dot));
            if (j + 1 < r) {
                std::vector<QPoly> w(r);
                for (int i = 0; i < r; ++i)
                    for (int k = 0; k < r; ++k) w[i] = poly::add(w[i], poly::mul(M[i][k], v[k]));
                v = std::move(w);
            }
        }
        std::vector<QPoly> next(r + 2);
        for (int i = 0; i < r + 2; ++i)
            for (int j = 0; j <= std::min(i, r); ++j) next[i] = poly::add(next[i], poly::mul(col[i - j], C[j]));
        C = std::move(next);
    }
    std::reverse(C.begin(), C.end());
    return C;
}

ParamTuple ParamTuple::zeros(int g, int n) {
    ParamTuple t;
    t.g = g;
    t.n = n;
    t.mats.assign(g, std::vector<QPoly>(n * n));
    return t;
}

ParamTuple ParamTuple::constant(const RatTuple& X) {
    ParamTuple t = zeros(X.g, X.n);
    for (int c = 0; c < X.g; ++c)
        for (int i = 0; i < X.n; ++i)
            for (int j = 0; j < X.n; ++j) t.at(c, i, j) = poly::constant(X.at(c, i, j));
    return t;
}

SymTuple ParamTuple::evaluate(double alpha) const {
    std::vector<Mat> out;
    for (int c = 0; c < g; ++c) {
        Mat M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = poly::eval_double(at(c, i, j), alpha);
        out.push_back(M);
    }
    return SymTuple(out, 1e-9);
}

PolyMat pencil_param(const RatTuple& A, const ParamTuple& Y) {
    if (A.g != Y.g) throw std::invalid_argument("pencil_param: g mismatch");
    const int d = A.n, n = Y.n, N = d * n;
    PolyMat L(N, std::vector<QPoly>(N));
    for (int i = 0; i < N; ++i) L[i][i] = poly::constant(1);
    for (int c = 0; c < A.g; ++c)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const mpq_class& s = A.at(c, a, b);
                if (s == 0) continue;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        L[a * n + i][b * n + j] = poly::add(L[a * n + i][b * n + j], poly::scale(Y.at(c, i, j), s));
            }
    return L;
}

ParamTuple dilation_param(const RatTuple& X, const std::vector<std::vector<mpq_class>>& beta) {
    const int g = X.g, m = X.n, n = m + 1;
    ParamTuple Y = ParamTuple::zeros(g, n);
    for (int c = 0; c < g; ++c) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Y.at(c, i, j) = poly::constant(X.at(c, i, j));
        for (int i = 0; i < m; ++i) {
            Y.at(c, i, m) = poly::monomial(beta[c][i], 1);
            Y.at(c, m, i) = poly::monomial(beta[c][i], 1);
        }
    }
    return Y;
}

std::vector<QPoly> char_poly_param(const RatTuple& A, const RatTuple& X,
                                   const std::vector<std::vector<mpq_class>>& beta) {
    auto chi = char_poly_berkowitz(pencil_param(A, dilation_param(X, beta)));
    for (const auto& c : chi) (void)poly::even_part_in_square(c);
    return chi;
}

// ---------------------------------------------------------------------------
// Outward-rounded intervals over MPFR.

namespace {

class Ival {
public:
    explicit Ival(int bits) {
        mpfr_init2(lo_, bits);
        mpfr_init2(hi_, bits);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }
    Ival(const Ival& o) : Ival(static_cast<int>(mpfr_get_prec(o.lo_))) {
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    Ival& operator=(const Ival& o) {
        if (this != &o) {
            mpfr_set(lo_, o.lo_, MPFR_RNDD);
            mpfr_set(hi_, o.hi_, MPFR_RNDU);
        }
        return *this;
    }
    ~Ival() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }
    int bits() const { return static_cast<int>(mpfr_get_prec(lo_)); }

    static Ival from_q(const mpq_class& q, int bits) {
        Ival r(bits);
        mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static Ival from_int_string(const std::string& s, int bits) {
        Ival r(bits);
        mpfr_set_str(r.lo_, s.c_str(), 10, MPFR_RNDD);
        mpfr_set_str(r.hi_, s.c_str(), 10, MPFR_RNDU);
        return r;
    }

    friend Ival operator+(const Ival& a, const Ival& b) {
        Ival r(a.bits());
        mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return r;
    }
    friend Ival operator-(const Ival& a, const Ival& b) {
        Ival r(a.bits());
        mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
        mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
        return r;
    }
    Ival operator-() const {
        Ival r(bits());
        mpfr_neg(r.lo_, hi_, MPFR_RNDD);
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
        return r;
    }
    friend Ival operator*(const Ival& a, const Ival& b) {
        Ival r(a.bits());
        mpfr_t t;
        mpfr_init2(t, a.bits());
        bool first = true;
        for (auto x : {a.lo_, a.hi_})
            for (auto y : {b.lo_, b.hi_}) {
                mpfr_mul(t, x, y, MPFR_RNDD);
                if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
                mpfr_mul(t, x, y, MPFR_RNDU);
                if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
                first = false;
            }
        mpfr_clear(t);
        return r;
    }
    friend Ival operator/(const Ival& a, const Ival& b) {
        if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0) throw std::domain_error("interval division by an interval containing 0");
        Ival inv(a.bits());
        mpfr_ui_div(inv.lo_, 1, b.hi_, MPFR_RNDD);
        mpfr_ui_div(inv.hi_, 1, b.lo_, MPFR_RNDU);
        return a * inv;
    }
    Ival sqrt() const {
        if (mpfr_sgn(hi_) < 0) throw std::domain_error("sqrt of a negative interval");
        Ival r(bits());
        if (mpfr_sgn(lo_) <= 0) mpfr_set_zero(r.lo_, 1);
        else mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
        mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
        return r;
    }
    bool certainly_positive() const { return mpfr_sgn(lo_) > 0; }
    bool at_least(double v) const { return mpfr_cmp_d(lo_, v) >= 0; }
    bool within(double eps) const { return mpfr_cmp_d(lo_, -eps) >= 0 && mpfr_cmp_d(hi_, eps) <= 0; }
    bool below(double v) const { return mpfr_cmp_d(hi_, v) < 0; }
    double mid() const {
        mpfr_t m;
        mpfr_init2(m, bits());
        mpfr_add(m, lo_, hi_, MPFR_RNDN);
        mpfr_div_ui(m, m, 2, MPFR_RNDN);
        const double d = mpfr_get_d(m, MPFR_RNDN);
        mpfr_clear(m);
        return d;
    }
    std::string str(bool upper) const {
        char* s = nullptr;
        mpfr_asprintf(&s, upper ? "%.60RUe" : "%.60RDe", upper ? hi_ : lo_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

private:
    mpfr_t lo_, hi_;
};

// Recursive-descent evaluation: expr = term {(+|-) term}, term = unary {(*|/) unary},
// unary = -unary | atom, atom = integer | sqrt(expr) | (expr).
class ExprEval {
public:
    ExprEval(const std::string& s, int bits) : s_(s), bits_(bits) {}
    Ival run() {
        Ival v = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing characters");
        return v;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("expression '" + s_ + "': " + why + " at offset " + std::to_string(pos_));
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    Ival expr() {
        Ival v = term();
        for (;;) {
            if (eat('+')) v = v + term();
            else if (eat('-')) v = v - term();
            else return v;
        }
    }
    Ival term() {
        Ival v = unary();
        for (;;) {
            if (eat('*')) v = v * unary();
            else if (eat('/')) v = v / unary();
            else return v;
        }
    }
    Ival unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return atom();
    }
    Ival atom() {
        skip();
        if (eat('(')) {
            Ival v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (s_.compare(pos_, 4, "sqrt") == 0) {
            pos_ += 4;
            if (!eat('(')) fail("expected '(' after sqrt");
            Ival v = expr();
            if (!eat(')')) fail("expected ')'");
            return v.sqrt();
        }
        const size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a number");
        return Ival::from_int_string(s_.substr(start, pos_ - start), bits_);
    }

    std::string s_;
    int bits_;
    size_t pos_ = 0;
};

}  // namespace

std::pair<std::string, std::string> interval_eval(const std::string& expr, int bits) {
    const Ival v = ExprEval(expr, bits).run();
    return {v.str(false), v.str(true)};
}

// ---------------------------------------------------------------------------

namespace {

RatTuple rat_tuple_from_ints(const std::vector<std::vector<std::vector<long>>>& m) {
    RatTuple t = RatTuple::zeros(static_cast<int>(m.size()), static_cast<int>(m[0].size()));
    for (int c = 0; c < t.g; ++c)
        for (int i = 0; i < t.n; ++i)
            for (int j = 0; j < t.n; ++j) t.at(c, i, j) = m[c][i][j];
    return t;
}

ClaimResult claim(const std::string& name, bool ok, const std::string& detail) { return {name, ok, detail}; }

CertificateReport verify_algebraic(Certificate& cert, const ToleranceConfig& cfg) {
    CertificateReport rep;
    const int g = cert.A.g, d = cert.A.n, n = cert.Y.n;
    const int N = d * n;
    AlgebraicNumber& alpha = cert.alpha;

    // symmetric and well-formed
    bool sym = cert.Y.g == g;
    for (int c = 0; c < cert.Y.g && sym; ++c)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (poly::sub(cert.Y.at(c, i, j), cert.Y.at(c, j, i)).size()) sym = false;
    rep.claims.push_back(claim("well_formed", sym, sym ? "Y symmetric over Q[alpha]" : "Y is not symmetric"));
    if (!sym) return rep;

    rep.chi = char_poly_berkowitz(pencil_param(cert.A, cert.Y));
    const auto& chi = rep.chi;

    // alpha is the smallest positive root of its defining polynomial
    {
        const auto seq = sturm_sequence(alpha.defining());
        const bool pos = alpha.lo() >= 0 && (alpha.lo() > 0 || poly::eval(alpha.defining(), 0) != 0);
        const int below = pos ? sturm_count(seq, 0, alpha.lo()) : -1;
        rep.claims.push_back(claim("alpha_smallest_positive", pos && below == 0,
                                   "roots of the defining polynomial in (0, lo]: " + std::to_string(below)));
    }

    // (a) kernel dimension: first coefficient of chi not vanishing at alpha
    {
        int k = 0;
        std::string witness;
        while (k <= N && alpha.is_root_of(chi[k])) ++k;
        rep.kernel_dim = k;
        witness = "chi coefficients c_0..c_" + std::to_string(k - 1) + " vanish at alpha, c_" + std::to_string(k) +
                  " does not; c_0 is " + (poly::is_zero(chi[0]) ? "identically zero" : "not identically zero");
        rep.claims.push_back(claim("kernel_dim", k == cert.kernel_dim, witness));
    }

    // (b) membership: chi / t^k has all roots positive iff its coefficients alternate strictly.
    {
        const int k = rep.kernel_dim;
        bool ok = k <= N;
        std::string detail = "coefficient signs alternate";
        for (int j = k; j <= N && ok; ++j) {
            const int want = ((N - j) % 2 == 0) ? 1 : -1;
            const int got = alpha.sign_of(chi[j]);
            if (got != want) {
                ok = false;
                detail = "coefficient c_" + std::to_string(j) + " has sign " + std::to_string(got) + ", expected " +
                         std::to_string(want);
            }
        }
        rep.claims.push_back(claim("in_DA", ok, detail));
    }

    // not Arveson: the Arveson system has more unknowns than equations
    const Counts counts = rank_nullity_counts(g, d, n);
    rep.claims.push_back(claim("not_arveson", rep.kernel_dim < counts.arv,
                               "k = " + std::to_string(rep.kernel_dim) + ", ArvCT = " + std::to_string(counts.arv)));

    // (c) numeric matrix-extreme evidence
    {
        AlgebraicNumber a = alpha;
        a.refine_to(mpq_class(1) / mpq_class(mpz_class(1) << 100));
        const SymTuple Y = cert.Y.evaluate(a.to_double());
        const SymTuple A = cert.A.to_double();
        const Mat L = eval_pencil(A, Y);
        Eigen::SelfAdjointEigenSolver<Mat> es(L);
        const int k = std::max(rep.kernel_dim, 1);
        const Mat K = es.eigenvectors().leftCols(k);
        Eigen::JacobiSVD<Mat> svd(matrix_extreme_system(A, Y, K).data);
        const Vec& s = svd.singularValues();
        rep.sigma_max = s(0);
        rep.sigma_min = s(s.size() - 1);
        std::string outside;
        try {
            const ExtremeReport er = classify(A, Y, cfg);
            rep.matrix = er.matrix;
            rep.arveson = er.arveson;
        } catch (const std::invalid_argument& e) {
            outside = e.what();
        }
        const bool ok =
            outside.empty() && rep.sigma_min >= cert.sigma_min_floor && rep.sigma_max < cert.sigma_max_ceiling;
        rep.claims.push_back(claim("matrix_extreme_numeric", ok,
                                   outside.empty() ? "sigma_min = " + std::to_string(rep.sigma_min) +
                                                         ", sigma_max = " + std::to_string(rep.sigma_max)
                                                   : outside));
    }
    return rep;
}

CertificateReport verify_radical(const Certificate& cert, const ToleranceConfig& cfg) {
    CertificateReport rep;
    const int g = cert.A.g, d = cert.A.n, n = cert.level;
    constexpr int bits = 256;
    bool diag = true;
    for (int c = 0; c < g; ++c)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j && cert.A.at(c, i, j) != 0) diag = false;
    const bool shape = diag && n == 2 && static_cast<int>(cert.X_expr.size()) == g;
    rep.claims.push_back(claim("well_formed", shape, shape ? "diagonal A, level-2 X" : "need diagonal A and 2x2 X"));
    if (!shape) return rep;

    std::vector<std::vector<Ival>> X;
    for (int c = 0; c < g; ++c) {
        std::vector<Ival> m;
        for (const auto& e : cert.X_expr[c]) m.push_back(ExprEval(e, bits).run());
        X.push_back(m);
    }
    // symmetric entries must coincide as expressions
    bool sym = true;
    for (int c = 0; c < g; ++c) sym = sym && cert.X_expr[c][1] == cert.X_expr[c][2];
    int singular = 0, positive = 0;
    std::string failing;
    for (int b = 0; b < d; ++b) {
        Ival b00 = Ival::from_q(1, bits), b01(bits), b11 = Ival::from_q(1, bits);
        for (int c = 0; c < g; ++c) {
            const mpq_class& a = cert.A.at(c, b, b);
            if (a == 0) continue;
            const Ival ai = Ival::from_q(a, bits);
            b00 = b00 + ai * X[c][0];
            b01 = b01 + ai * X[c][1];
            b11 = b11 + ai * X[c][3];
        }
        const Ival det = b00 * b11 - b01 * b01;
        const bool diag_pos = b00.certainly_positive() && b11.certainly_positive();
        const bool diag_nonneg = b00.at_least(-1e-50) && b11.at_least(-1e-50) && (b00 + b11).certainly_positive();
        if (diag_pos && det.certainly_positive()) ++positive;
        else if (diag_nonneg && det.within(1e-50)) ++singular;
        else if (failing.empty())
            failing = "block " + std::to_string(b) + ": det in [" + det.str(false) + ", " + det.str(true) + "]";
    }
    rep.singular_blocks = singular;
    rep.positive_blocks = positive;
    rep.kernel_dim = singular;
    const bool psd = sym && singular + positive == d;
    rep.claims.push_back(claim("in_DA", psd,
                               psd ? std::to_string(positive) + " positive and " + std::to_string(singular) +
                                         " singular blocks at " + std::to_string(bits) + " bits"
                                   : (sym ? failing : "X is not symmetric")));
    rep.claims.push_back(claim("kernel_dim", singular == cert.kernel_dim,
                               "singular 2x2 blocks: " + std::to_string(singular)));

    std::vector<Mat> Xd;
    for (int c = 0; c < g; ++c) {
        Mat M(2, 2);
        M << X[c][0].mid(), X[c][1].mid(), X[c][1].mid(), X[c][3].mid();
        Xd.push_back(M);
    }
    const SymTuple A = cert.A.to_double();
    const SymTuple Xs(Xd);
    ExtremeReport er;
    try {
        er = classify(A, Xs, cfg);
    } catch (const std::invalid_argument& e) {
        rep.claims.push_back(claim("matrix_extreme_numeric", false, e.what()));
        return rep;
    }
    rep.matrix = er.matrix;
    rep.arveson = er.arveson;
    rep.sigma_min = er.mat_evidence.sigma_min;
    rep.sigma_max = er.mat_evidence.sigma_max;
    rep.claims.push_back(claim("matrix_extreme_numeric", er.matrix == Flag::yes,
                               "matrix flag " + to_string(er.matrix) + ", sigma_min = " + std::to_string(rep.sigma_min)));
    rep.claims.push_back(claim("not_arveson", er.arveson == Flag::no, "arveson flag " + to_string(er.arveson)));
    return rep;
}

}  // namespace

CertificateReport verify_certificate(Certificate cert, const ToleranceConfig& cfg) {
    CertificateReport rep =
        cert.kind == CertificateKind::algebraic ? verify_algebraic(cert, cfg) : verify_radical(cert, cfg);
    rep.passed = !rep.claims.empty() &&
                 std::all_of(rep.claims.begin(), rep.claims.end(), [](const ClaimResult& c) { return c.passed; });
    return rep;
}

Certificate builtin_certificate_g3() {
    Certificate c;
    c.kind = CertificateKind::algebraic;
    c.A = rat_tuple_from_ints({{{0, 0, -1, 1}, {0, 0, 1, 0}, {-1, 1, 0, 1}, {1, 0, 1, 1}},
                               {{-1, -1, 1, 1}, {-1, 0, 0, 1}, {1, 0, -1, -1}, {1, 1, -1, 0}},
                               {{-1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}}});
    const mpq_class X[3][2][2] = {{{mpq_class(1, 4), mpq_class(27, 100)}, {mpq_class(27, 100), mpq_class(-13, 100)}},
                                  {{mpq_class(-27, 100), mpq_class(21, 100)}, {mpq_class(21, 100), mpq_class(7, 100)}},
                                  {{mpq_class(7, 50), mpq_class(-49, 100)}, {mpq_class(-49, 100), mpq_class(3, 10)}}};
    const long beta[3][2] = {{1, 1}, {3, 1}, {3, 0}};
    c.Y = ParamTuple::zeros(3, 3);
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) c.Y.at(k, i, j) = poly::constant(X[k][i][j]);
        for (int i = 0; i < 2; ++i) c.Y.at(k, i, 2) = c.Y.at(k, 2, i) = poly::monomial(beta[k][i], 1);
    }
    const QPoly p = poly::from_strings({"20828330523", "0", "-3649588559100", "0", "132250437590000", "0",
                                        "-651404153000000", "0", "748026200000000"});
    c.alpha = AlgebraicNumber(p, 0, mpq_class(1, 8));
    c.kernel_dim = 2;
    c.sigma_min_floor = 1e-2;
    c.sigma_max_ceiling = 5.0;
    return c;
}

Certificate builtin_certificate_g4() {
    Certificate c;
    c.kind = CertificateKind::radical_blocks;
    const char* diag[4][9] = {{"2", "0", "-4", "0", "0", "0", "-4", "0", "8/3"},
                              {"0", "4", "-4", "0", "0", "0", "0", "-8/3", "8/3"},
                              {"0", "0", "0", "4", "0", "-8/3", "-4", "0", "8/3"},
                              {"0", "0", "0", "0", "8/3", "-8/3", "0", "-8/3", "8/3"}};
    c.A = RatTuple::zeros(4, 9);
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 9; ++i) c.A.at(k, i, i) = parse_rational(diag[k][i]);
    c.level = 2;
    c.X_expr = {{"-1/2", "0", "0", "3/10"},
                {"1/2", "sqrt(3/5)/4", "sqrt(3/5)/4", "-1/5"},
                {"(1521520*sqrt(3)-619599*sqrt(182))/(1019200*sqrt(3)-1197204*sqrt(182))", "0", "0", "-1/4"},
                {"5*(1664*sqrt(546)-124455)/3143688", "-4*(1820*sqrt(15)+669*sqrt(910))/392961",
                 "-4*(1820*sqrt(15)+669*sqrt(910))/392961", "(11200*sqrt(546)-429603)/3143688"}};
    c.kernel_dim = 7;
    return c;
}

nlohmann::json certificate_to_json(const Certificate& c) {
    nlohmann::json j;
    j["A"] = tuple_to_json(c.A);
    j["kernel_dim"] = c.kernel_dim;
    if (c.kind == CertificateKind::algebraic) {
        j["kind"] = "algebraic";
        nlohmann::json mats = nlohmann::json::array();
        for (int k = 0; k < c.Y.g; ++k) {
            nlohmann::json rows = nlohmann::json::array();
            for (int i = 0; i < c.Y.n; ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (int l = 0; l < c.Y.n; ++l) row.push_back(poly::to_strings(c.Y.at(k, i, l)));
                rows.push_back(row);
            }
            mats.push_back(rows);
        }
        j["Y"] = {{"g", c.Y.g}, {"n", c.Y.n}, {"mats", mats}};
        j["alpha"] = {{"poly", poly::to_strings(c.alpha.defining())},
                      {"lo", rational_string(c.alpha.lo())},
                      {"hi", rational_string(c.alpha.hi())}};
        j["sigma_min_floor"] = c.sigma_min_floor;
        j["sigma_max_ceiling"] = c.sigma_max_ceiling;
    } else {
        j["kind"] = "radical_blocks";
        j["level"] = c.level;
        j["X"] = c.X_expr;
    }
    return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
    Certificate c;
    const TupleDoc A = tuple_from_json(j.at("A"));
    if (A.mode != NumericMode::rational) throw std::invalid_argument("certificate: A must be rational");
    c.A = A.exact;
    c.kernel_dim = j.value("kernel_dim", 2);
    const std::string kind = j.value("kind", "algebraic");
    if (kind == "algebraic") {
        c.kind = CertificateKind::algebraic;
        const auto& Y = j.at("Y");
        const int g = Y.at("g").get<int>(), n = Y.at("n").get<int>();
        c.Y = ParamTuple::zeros(g, n);
        for (int k = 0; k < g; ++k)
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l)
                    c.Y.at(k, i, l) = poly::from_strings(Y.at("mats").at(k).at(i).at(l).get<std::vector<std::string>>());
        const auto& a = j.at("alpha");
        c.alpha = AlgebraicNumber(poly::from_strings(a.at("poly").get<std::vector<std::string>>()),
                                  parse_rational(a.at("lo").get<std::string>()),
                                  parse_rational(a.at("hi").get<std::string>()));
        c.sigma_min_floor = j.value("sigma_min_floor", 1e-6);
        c.sigma_max_ceiling = j.value("sigma_max_ceiling", 5.0);
    } else if (kind == "radical_blocks") {
        c.kind = CertificateKind::radical_blocks;
        c.level = j.at("level").get<int>();
        c.X_expr = j.at("X").get<std::vector<std::vector<std::string>>>();
    } else {
        throw std::invalid_argument("certificate: unknown kind '" + kind + "'");
    }
    return c;
}

nlohmann::json certificate_report_to_json(const CertificateReport& r) {
    nlohmann::json claims = nlohmann::json::array();
    for (const auto& c : r.claims) claims.push_back({{"claim", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    nlohmann::json j = {{"passed", r.passed},
                        {"claims", claims},
                        {"kernel_dim", r.kernel_dim},
                        {"sigma_min", r.sigma_min},
                        {"sigma_max", r.sigma_max},
                        {"matrix", to_string(r.matrix)},
                        {"arveson", to_string(r.arveson)}};
    if (!r.chi.empty()) {
        nlohmann::json chi = nlohmann::json::array();
        for (const auto& c : r.chi) chi.push_back(poly::to_strings(c));
        j["chi"] = chi;
    }
    return j;
}

// ---------------------------------------------------------------------------

namespace {

mpq_class small_rational(std::mt19937_64& rng, int num_range, int den) {
    std::uniform_int_distribution<int> U(-num_range, num_range);
    return mpq_class(U(rng), den);
}


// Maximizes the smallest eigenvalue of L_A(X) on the complement of K over the
// affine solution family, then rounds the coefficients to nearby rationals.
template <class Build, class Psd>
std::optional<RatTuple> psd_in_affine_family(const SymTuple& A, const std::vector<mpq_class>& K,
                                             const RationalSolution& sx, Build build_X, Psd psd) {
    const int q = static_cast<int>(sx.nullspace.size());
    const int len = static_cast<int>(K.size());
    Vec k(len);
    for (int i = 0; i < len; ++i) k(i) = K[i].get_d();
    Mat basis = Mat::Identity(len, len) - k * k.transpose() / k.squaredNorm();
    Eigen::SelfAdjointEigenSolver<Mat> proj(basis);
    const Mat P = proj.eigenvectors().rightCols(len - 1);

    auto reduced = [&](const std::vector<mpq_class>& sol, bool affine) {
        const Mat L = eval_pencil(A, build_X(sol).to_double());
        Mat M = P.transpose() * L * P;
        if (!affine) M -= Mat::Identity(len - 1, len - 1);
        return M;
    };
    LmiProgram prog;
    prog.F0 = reduced(sx.particular, true);
    for (const auto& nv : sx.nullspace) prog.F.push_back(reduced(nv, false));
    prog.F.push_back(-Mat::Identity(len - 1, len - 1));
    prog.objective = Vec::Zero(q + 1);
    prog.objective(q) = 1;
    prog.box_lo = Vec::Constant(q + 1, -10.0);
    prog.box_hi = Vec::Constant(q + 1, 10.0);
    prog.box_lo(q) = -1e3;
    prog.box_hi(q) = 1.0;
    const LmiResult r = solve_lmi_max(prog);
    if (r.y.size() != q + 1 || r.y(q) <= 1e-9) return std::nullopt;
    for (long den : {1000L, 100000L, 10000000L}) {
        std::vector<mpq_class> sol = sx.particular;
        for (int j = 0; j < q; ++j) {
            const mpq_class c(std::lround(r.y(j) * den), den);
            for (size_t v = 0; v < sol.size(); ++v) sol[v] += c * sx.nullspace[j][v];
        }
        RatTuple cand = build_X(sol);
        if (psd(cand)) return cand;
    }
    return std::nullopt;
}

}  // namespace

ExactSearchResult exact_search(const RatTuple& A, int n, std::mt19937_64& rng, const ExactSearchOptions& opt) {
    if (n < 2) throw std::invalid_argument("exact_search: n must be at least 2");
    const int g = A.g, d = A.n, m = n - 1;
    const SymTuple Ad = A.to_double();
    ExactSearchResult res;
    std::uniform_int_distribution<int> tri(-1, 1);

    // unknown index of X_c(p,q), p <= q
    std::vector<std::array<int, 3>> xv;
    for (int c = 0; c < g; ++c)
        for (int p = 0; p < m; ++p)
            for (int q = p; q < m; ++q) xv.push_back({c, p, q});

    for (res.attempts = 1; res.attempts <= opt.budget; ++res.attempts) {
        std::vector<mpq_class> K(d * m);
        bool nonzero = false;
        for (auto& k : K) {
            k = tri(rng);
            nonzero = nonzero || k != 0;
        }
        if (!nonzero) {
            ++res.no_solution;
            continue;
        }
        // L_A(X) K = 0
        QMat MX(d * m, std::vector<mpq_class>(xv.size(), mpq_class(0)));
        std::vector<mpq_class> rhs(d * m);
        for (int a = 0; a < d; ++a)
            for (int i = 0; i < m; ++i) rhs[a * m + i] = -K[a * m + i];
        for (size_t v = 0; v < xv.size(); ++v) {
            const auto [c, p, q] = xv[v];
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    const mpq_class& s = A.at(c, a, b);
                    if (s == 0) continue;
                    MX[a * m + p][v] += s * K[b * m + q];
                    if (p != q) MX[a * m + q][v] += s * K[b * m + p];
                }
        }
        const RationalSolution sx = rational_solve(MX, rhs);
        if (!sx.consistent) {
            ++res.no_solution;
            continue;
        }
        // Lambda_A(beta^T) K = 0
        QMat MB(d, std::vector<mpq_class>(g * m, mpq_class(0)));
        for (int c = 0; c < g; ++c)
            for (int j = 0; j < m; ++j)
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) MB[a][c * m + j] += A.at(c, a, b) * K[b * m + j];
        const auto nb = rational_nullspace(MB);
        if (nb.empty()) {
            ++res.no_beta;
            continue;
        }

        auto build_X = [&](const std::vector<mpq_class>& sol) {
            RatTuple X = RatTuple::zeros(g, m);
            for (size_t v = 0; v < xv.size(); ++v) {
                const auto [c, p, q] = xv[v];
                X.at(c, p, q) = sol[v];
                X.at(c, q, p) = sol[v];
            }
            return X;
        };
        auto psd = [&](const RatTuple& X) { return min_eigenvalue(eval_pencil(Ad, X.to_double())) >= -1e-9; };

        std::optional<RatTuple> X;
        if (sx.nullspace.empty()) {
            RatTuple cand = build_X(sx.particular);
            if (psd(cand)) X = cand;
        } else {
            X = psd_in_affine_family(Ad, K, sx, build_X, psd);
            for (int draw = 0; draw < opt.psd_draws && !X; ++draw) {
                std::vector<mpq_class> sol = sx.particular;
                const int den = draw < opt.psd_draws / 2 ? 10 : 100;
                for (const auto& nv : sx.nullspace) {
                    const mpq_class r = small_rational(rng, 10, den);
                    for (size_t v = 0; v < sol.size(); ++v) sol[v] += r * nv[v];
                }
                RatTuple cand = build_X(sol);
                if (psd(cand)) X = cand;
            }
        }
        if (!X) {
            ++res.not_psd;
            continue;
        }

        std::vector<mpq_class> bflat(g * m, mpq_class(0));
        std::uniform_int_distribution<int> pos(1, 5);
        for (const auto& bv : nb) {
            const mpq_class r = pos(rng);
            for (int v = 0; v < g * m; ++v) bflat[v] += r * bv[v];
        }
        std::vector<std::vector<mpq_class>> beta(g, std::vector<mpq_class>(m));
        for (int c = 0; c < g; ++c)
            for (int j = 0; j < m; ++j) beta[c][j] = bflat[c * m + j];

        const std::vector<QPoly> chi = char_poly_param(A, *X, beta);
        const QPoly& p1 = chi[1];
        if (poly::degree(p1) < 1) {
            ++res.no_root;
            continue;
        }
        const auto roots = sturm_isolate(p1, 0, root_bound(p1));
        std::optional<AlgebraicNumber> alpha;
        for (const auto& r : roots) {
            if (r.hi <= 0) continue;
            alpha = AlgebraicNumber(p1, r.lo, r.hi);
            break;
        }
        if (!alpha) {
            ++res.no_root;
            continue;
        }
        if (alpha->is_root_of(chi[2])) {
            ++res.p2_vanishes;
            continue;
        }
        Certificate cert;
        cert.kind = CertificateKind::algebraic;
        cert.A = A;
        cert.Y = dilation_param(*X, beta);
        cert.alpha = *alpha;
        cert.kernel_dim = 2;
        if (opt.require_matrix_extreme && !verify_certificate(cert).passed) {
            ++res.not_extreme;
            continue;
        }
        res.cert = cert;
        return res;
    }
    res.attempts = opt.budget;
    return res;
}

SymTuple wild_disc_pencil() {
    Mat A1 = Mat::Zero(3, 3), A2 = Mat::Zero(3, 3);
    A1(0, 1) = A1(1, 0) = 1;
    A2(0, 2) = A2(2, 0) = 1;
    return SymTuple({A1, A2});
}

WildDiscCandidate wild_disc_candidate(std::mt19937_64& rng, int n) {
    if (n < 4) throw std::invalid_argument("wild_disc_candidate: n must be at least 4");
    std::normal_distribution<double> N01(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    const int rank = n - 3;
    for (int attempt = 0; attempt < 100; ++attempt) {
        Mat G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) G(i, j) = N01(rng);
        const Mat Q = G.householderQr().householderQ();
        Vec s = Vec::Zero(n);
        for (int i = 0; i < rank; ++i) s(i) = U(rng);
        const Mat S = Q * s.asDiagonal() * Q.transpose();
        Mat R(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) R(i, j) = N01(rng);
        R = (0.5 * (R + R.transpose())).eval();
        const Mat ImS = Mat::Identity(n, n) - S;
        const double room = Eigen::SelfAdjointEigenSolver<Mat>(ImS, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        const double r2 = Eigen::SelfAdjointEigenSolver<Mat>(R * R, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        const Mat X = std::sqrt(U(rng) * room / r2) * R;
        Mat Rem = ImS - X * X;
        Rem = (0.5 * (Rem + Rem.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<Mat> es(Rem);
        if (es.eigenvalues().minCoeff() < -1e-12) continue;
        const Vec w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        const Mat Y = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
        WildDiscCandidate c;
        c.point = SymTuple({X, Y}, 1e-9);
        c.A = wild_disc_pencil();
        c.expected_kernel = n - rank;
        return c;
    }
    throw std::runtime_error("wild_disc_candidate: could not form a square root");
}

}  // namespace spectrex
