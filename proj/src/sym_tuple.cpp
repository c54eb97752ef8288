#include "spectrex/sym_tuple.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spectrex {

SymTuple::SymTuple(std::vector<Mat> mats, double sym_tol) : mats_(std::move(mats)) {
    if (mats_.empty()) return;
    const Eigen::Index n = mats_[0].rows();
    for (size_t c = 0; c < mats_.size(); ++c) {
        Mat& M = mats_[c];
        if (M.rows() != n || M.cols() != n)
            throw std::invalid_argument("SymTuple: coordinate " + std::to_string(c) +
                                        " is not " + std::to_string(n) + "x" + std::to_string(n));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double diff = std::abs(M(i, j) - M(j, i));
                if (!(diff <= sym_tol)) {
                    std::ostringstream os;
                    os << "SymTuple: coordinate " << c << " asymmetric at (" << i << "," << j
                       << "): " << M(i, j) << " vs " << M(j, i);
                    throw std::invalid_argument(os.str());
                }
                const double avg = 0.5 * (M(i, j) + M(j, i));
                M(i, j) = avg;
                M(j, i) = avg;
            }
    }
}

SymTuple SymTuple::zeros(int g, int n) {
    return SymTuple(std::vector<Mat>(g, Mat::Zero(n, n)));
}

void SymTuple::set_entry(int c, int i, int j, double v) {
    mats_[c](i, j) = v;
    mats_[c](j, i) = v;
}

double SymTuple::max_abs() const {
    double m = 0.0;
    for (const Mat& M : mats_) m = std::max(m, M.cwiseAbs().maxCoeff());
    return m;
}

void check_same_g(const SymTuple& A, const SymTuple& X) {
    if (A.g() != X.g())
        throw std::invalid_argument("tuple size mismatch: " + std::to_string(A.g()) + " vs " +
                                    std::to_string(X.g()));
}

Mat eval_linear(const SymTuple& A, const SymTuple& X) {
    check_same_g(A, X);
    const int d = A.n(), n = X.n();
    Mat out = Mat::Zero(d * n, d * n);
    for (int c = 0; c < A.g(); ++c)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const double s = A[c](a, b);
                if (s != 0.0) out.block(a * n, b * n, n, n) += s * X[c];
            }
    return out;
}

Mat eval_pencil(const SymTuple& A, const SymTuple& X) {
    Mat out = eval_linear(A, X);
    out.diagonal().array() += 1.0;
    return out;
}

Mat eval_linear_hom(const SymTuple& A, const HomTuple& X) {
    check_same_g(A, X.rest);
    const int d = A.n(), n = X.n();
    Mat out = eval_linear(A, X.rest);
    for (int a = 0; a < d; ++a) out.block(a * n, a * n, n, n) += X.inhomogeneous;
    return out;
}

Mat eval_linear_col(const SymTuple& A, const ColTuple& beta) {
    if (static_cast<int>(beta.size()) != A.g())
        throw std::invalid_argument("eval_linear_col: tuple size mismatch");
    const int d = A.n();
    const int n = beta.empty() ? 0 : static_cast<int>(beta[0].size());
    Mat out = Mat::Zero(d * n, d);
    for (int c = 0; c < A.g(); ++c)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) out.block(a * n, b, n, 1) += A[c](a, b) * beta[c];
    return out;
}

std::vector<int> canonical_shuffle(int d, int n, int k) {
    if (d < 1 || n < 1 || k < 1) throw std::invalid_argument("canonical_shuffle: sizes must be >= 1");
    const int m = n + k;
    std::vector<int> p;
    p.reserve(d * m);
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < n; ++i) p.push_back(a * m + i);
    for (int a = 0; a < d; ++a)
        for (int j = 0; j < k; ++j) p.push_back(a * m + n + j);
    return p;
}

Mat permute_sym(const Mat& M, const std::vector<int>& p) {
    const int N = static_cast<int>(p.size());
    Mat out(N, N);
    for (int r = 0; r < N; ++r)
        for (int s = 0; s < N; ++s) out(r, s) = M(p[r], p[s]);
    return out;
}

SymTuple direct_sum(const SymTuple& X, const SymTuple& Z) {
    check_same_g(X, Z);
    const int n1 = X.n(), n2 = Z.n();
    std::vector<Mat> out;
    for (int c = 0; c < X.g(); ++c) {
        Mat M = Mat::Zero(n1 + n2, n1 + n2);
        M.topLeftCorner(n1, n1) = X[c];
        M.bottomRightCorner(n2, n2) = Z[c];
        out.push_back(std::move(M));
    }
    return SymTuple(std::move(out));
}

SymTuple conjugate(const Mat& V, const SymTuple& X) {
    if (V.rows() != X.n()) throw std::invalid_argument("conjugate: V has wrong row count");
    std::vector<Mat> out;
    for (const Mat& M : X.mats()) {
        Mat C = V.transpose() * M * V;
        out.push_back(0.5 * (C + C.transpose()));
    }
    return SymTuple(std::move(out));
}

SymTuple scale(const SymTuple& X, double s) {
    std::vector<Mat> out;
    for (const Mat& M : X.mats()) out.push_back(s * M);
    return SymTuple(std::move(out));
}

SymTuple add(const SymTuple& X, const SymTuple& Z) {
    check_same_g(X, Z);
    if (X.n() != Z.n()) throw std::invalid_argument("add: level mismatch");
    std::vector<Mat> out;
    for (int c = 0; c < X.g(); ++c) out.push_back(X[c] + Z[c]);
    return SymTuple(std::move(out));
}

SymTuple one_dilation(const SymTuple& X, const ColTuple& beta, const Vec& gamma) {
    const int n = X.n();
    if (static_cast<int>(beta.size()) != X.g() || gamma.size() != X.g())
        throw std::invalid_argument("one_dilation: tuple size mismatch");
    std::vector<Mat> out;
    for (int c = 0; c < X.g(); ++c) {
        Mat M(n + 1, n + 1);
        M.topLeftCorner(n, n) = X[c];
        M.block(0, n, n, 1) = beta[c];
        M.block(n, 0, 1, n) = beta[c].transpose();
        M(n, n) = gamma(c);
        out.push_back(std::move(M));
    }
    return SymTuple(std::move(out));
}

SymTuple leading_block(const SymTuple& X, int len) {
    std::vector<Mat> out;
    for (const Mat& M : X.mats()) out.push_back(M.topLeftCorner(len, len));
    return SymTuple(std::move(out));
}

RatTuple RatTuple::zeros(int g, int n) {
    RatTuple t;
    t.g = g;
    t.n = n;
    t.mats.assign(g, std::vector<mpq_class>(n * n, mpq_class(0)));
    return t;
}

SymTuple RatTuple::to_double() const {
    std::vector<Mat> out;
    for (int c = 0; c < g; ++c) {
        Mat M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = at(c, i, j).get_d();
        out.push_back(std::move(M));
    }
    return SymTuple(std::move(out), 0.0);
}

mpq_class parse_rational(const std::string& s) {
    std::string t;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
    if (t.empty()) throw std::invalid_argument("empty rational");
    mpq_class q;
    if (t.find('.') != std::string::npos || t.find('e') != std::string::npos ||
        t.find('E') != std::string::npos) {
        // Decimal literal: read exactly as digits / 10^k.
        std::string mant = t, expo = "0";
        const auto epos = t.find_first_of("eE");
        if (epos != std::string::npos) {
            mant = t.substr(0, epos);
            expo = t.substr(epos + 1);
        }
        const auto dot = mant.find('.');
        int frac = 0;
        std::string digits = mant;
        if (dot != std::string::npos) {
            frac = static_cast<int>(mant.size() - dot - 1);
            digits = mant.substr(0, dot) + mant.substr(dot + 1);
        }
        mpz_class num;
        if (num.set_str(digits, 10) != 0) throw std::invalid_argument("malformed number: " + s);
        const int e = std::stoi(expo) - frac;
        mpz_class p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(e)));
        q = e >= 0 ? mpq_class(num * p10) : mpq_class(num, p10);
        q.canonicalize();
        return q;
    }
    if (q.set_str(t, 10) != 0) throw std::invalid_argument("malformed rational: " + s);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

std::string rational_string(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    return c.get_str(10);
}

namespace {

mpq_class entry_rational(const nlohmann::json& e) {
    if (e.is_string()) return parse_rational(e.get<std::string>());
    if (e.is_number_integer()) return mpq_class(e.get<long>());
    if (e.is_number()) return mpq_class(e.get<double>());
    throw std::invalid_argument("matrix entry must be a number or \"p/q\" string");
}

double entry_double(const nlohmann::json& e) {
    if (e.is_number()) return e.get<double>();
    if (e.is_string()) return parse_rational(e.get<std::string>()).get_d();
    throw std::invalid_argument("matrix entry must be a number or \"p/q\" string");
}

}  // namespace

TupleDoc tuple_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("mats") || !j["mats"].is_array())
        throw std::invalid_argument("tuple document needs a \"mats\" array");
    TupleDoc doc;
    if (j.contains("mode")) {
        const std::string m = j["mode"].get<std::string>();
        if (m == "rational") doc.mode = NumericMode::rational;
        else if (m != "float") throw std::invalid_argument("mode must be \"float\" or \"rational\"");
    }
    const auto& mats = j["mats"];
    const int g = static_cast<int>(mats.size());
    int n = -1;
    for (int c = 0; c < g; ++c) {
        if (!mats[c].is_array()) throw std::invalid_argument("coordinate " + std::to_string(c) + " is not a matrix");
        const int rows = static_cast<int>(mats[c].size());
        if (n < 0) n = rows;
        if (rows != n) throw std::invalid_argument("coordinate " + std::to_string(c) + " has wrong row count");
        for (int i = 0; i < rows; ++i)
            if (!mats[c][i].is_array() || static_cast<int>(mats[c][i].size()) != n)
                throw std::invalid_argument("ragged row " + std::to_string(i) + " in coordinate " +
                                            std::to_string(c));
    }
    if (n < 0) n = 0;
    if (j.contains("g") && j["g"].get<int>() != g)
        throw std::invalid_argument("declared g does not match the number of matrices");
    if (j.contains("n") && g > 0 && j["n"].get<int>() != n)
        throw std::invalid_argument("declared n does not match the matrix size");

    if (doc.mode == NumericMode::rational) {
        doc.exact = RatTuple::zeros(g, n);
        for (int c = 0; c < g; ++c)
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) doc.exact.at(c, i, k) = entry_rational(mats[c][i][k]);
        for (int c = 0; c < g; ++c)
            for (int i = 0; i < n; ++i)
                for (int k = i + 1; k < n; ++k)
                    if (doc.exact.at(c, i, k) != doc.exact.at(c, k, i))
                        throw std::invalid_argument("coordinate " + std::to_string(c) + " asymmetric at (" +
                                                    std::to_string(i) + "," + std::to_string(k) + ")");
        doc.numeric = doc.exact.to_double();
    } else {
        std::vector<Mat> out;
        for (int c = 0; c < g; ++c) {
            Mat M(n, n);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) M(i, k) = entry_double(mats[c][i][k]);
            out.push_back(std::move(M));
        }
        doc.numeric = SymTuple(std::move(out));
    }
    return doc;
}

nlohmann::json tuple_to_json(const SymTuple& X) {
    nlohmann::json mats = nlohmann::json::array();
    for (const Mat& M : X.mats()) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
            rows.push_back(std::move(row));
        }
        mats.push_back(std::move(rows));
    }
    return {{"g", X.g()}, {"n", X.n()}, {"mode", "float"}, {"mats", mats}};
}

nlohmann::json tuple_to_json(const RatTuple& X) {
    nlohmann::json mats = nlohmann::json::array();
    for (int c = 0; c < X.g; ++c) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < X.n; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < X.n; ++k) row.push_back(rational_string(X.at(c, i, k)));
            rows.push_back(std::move(row));
        }
        mats.push_back(std::move(rows));
    }
    return {{"g", X.g}, {"n", X.n}, {"mode", "rational"}, {"mats", mats}};
}

TupleDoc read_tuple_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return tuple_from_json(j);
}

}  // namespace spectrex
