#include "spectrex/caratheodory.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace spectrex {

namespace {

// Eigenspaces of S grouped by clustering the sorted spectrum.
std::vector<Mat> eigen_clusters(const Mat& S, double gap) {
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const Vec& w = es.eigenvalues();
    const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    std::vector<Mat> out;
    int start = 0;
    for (int i = 1; i <= w.size(); ++i) {
        if (i == w.size() || w(i) - w(i - 1) > gap * scale) {
            out.push_back(es.eigenvectors().middleCols(start, i - start));
            start = i;
        }
    }
    return out;
}

}  // namespace

std::vector<Summand> irreducible_decomposition(const SymTuple& X, const ToleranceConfig& cfg, double cluster_gap) {
    const int n = X.n();
    std::vector<Summand> done;
    std::deque<Summand> work;
    work.push_back({X, Mat::Identity(n, n)});
    int splits = 0;
    while (!work.empty()) {
        Summand cur = std::move(work.front());
        work.pop_front();
        const auto basis = commutant_basis(cur.point, cfg.irr_mag, cfg.irr_gap);
        if (basis.size() <= 1) {
            done.push_back(std::move(cur));
            continue;
        }
        // A generic combination first, then the individual elements.
        std::vector<Mat> candidates;
        Mat S = Mat::Zero(cur.point.n(), cur.point.n());
        for (size_t j = 0; j < basis.size(); ++j) S += (1.0 + 0.6180339887498949 * static_cast<double>(j)) * basis[j];
        candidates.push_back(S);
        candidates.insert(candidates.end(), basis.begin(), basis.end());
        std::vector<Mat> parts;
        for (const Mat& C : candidates) {
            parts = eigen_clusters(C, cluster_gap);
            if (parts.size() >= 2) break;
        }
        if (parts.size() < 2) {
            done.push_back(std::move(cur));
            continue;
        }
        if (++splits > n) throw std::runtime_error("irreducible_decomposition: split cap exceeded");
        for (const Mat& P : parts) work.push_back({conjugate(P, cur.point), cur.U * P});
    }
    return done;
}

CarathExpansion carath_expand(const SymTuple& A, const SymTuple& X0, const CarathOptions& opts,
                              const ToleranceConfig& cfg, Rng& rng) {
    CarathExpansion out;
    const int n0 = X0.n();
    DilateOptions dopt;
    dopt.target = Target::arveson_only;
    dopt.max_fails = opts.max_fails;
    dopt.purify = PurifyMode::frozen;
    dopt.mode = opts.mode;
    out.trace = dilate_to_extreme(A, X0, dopt, cfg, rng);
    if (out.trace.verdict != Verdict::arveson) {
        out.failure = "dilation failed: " + out.trace.failure_reason;
        return out;
    }
    const SymTuple& Y = out.trace.final_point;
    std::vector<Summand> parts;
    try {
        parts = irreducible_decomposition(Y, cfg, opts.cluster_gap);
    } catch (const std::runtime_error& e) {
        out.failure = e.what();
        return out;
    }

    const int g = Y.g(), n = Y.n();
    std::vector<Mat> rebuilt(g, Mat::Zero(n, n));
    std::vector<Mat> recon(g, Mat::Zero(n0, n0));
    Mat iso = Mat::Zero(n0, n0);
    for (const Summand& s : parts) {
        for (int c = 0; c < g; ++c) rebuilt[c] += s.U * s.point[c] * s.U.transpose();
        const Mat V = s.U.topRows(n0).transpose();
        if (V.norm() <= opts.drop_tol) continue;
        CarathTerm t;
        t.point = s.point;
        t.V = V;
        t.irreducible = is_irreducible(s.point, cfg.irr_mag, cfg.irr_gap);
        try {
            t.arveson = classify(A, s.point, cfg).arveson == Flag::yes;
        } catch (const std::invalid_argument&) {
            t.arveson = false;
        }
        for (int c = 0; c < g; ++c) recon[c] += V.transpose() * s.point[c] * V;
        iso += V.transpose() * V;
        out.terms.push_back(std::move(t));
    }
    double rp = 0, ra = 0;
    for (int c = 0; c < g; ++c) {
        rp += (recon[c] - X0[c]).squaredNorm();
        ra += (rebuilt[c] - Y[c]).squaredNorm();
    }
    out.residual_point = std::sqrt(rp);
    out.reassembly = std::sqrt(ra);
    out.residual_isometry = (iso - Mat::Identity(n0, n0)).norm();
    out.ok = true;
    return out;
}

nlohmann::json expansion_to_json(const CarathExpansion& e) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : e.terms) {
        nlohmann::json V = nlohmann::json::array();
        for (int i = 0; i < t.V.rows(); ++i) {
            std::vector<double> row(t.V.cols());
            for (int j = 0; j < t.V.cols(); ++j) row[j] = t.V(i, j);
            V.push_back(row);
        }
        terms.push_back({{"level", t.point.n()},
                         {"point", tuple_to_json(t.point)},
                         {"V", V},
                         {"irreducible", t.irreducible},
                         {"arveson", t.arveson}});
    }
    nlohmann::json j = {{"ok", e.ok},
                        {"terms", terms},
                        {"residual_point", e.residual_point},
                        {"residual_isometry", e.residual_isometry},
                        {"reassembly", e.reassembly},
                        {"trace", trace_to_json(e.trace)}};
    if (!e.failure.empty()) j["failure"] = e.failure;
    return j;
}

double mu_estimate(int g, int d, int n0) {
    const int gn = g * n0;
    return static_cast<double>((gn + d - 1) / d) / gn;
}

double mu_upper_bound(int g, int d, int n0) {
    if (d <= g) throw std::invalid_argument("mu_upper_bound requires d > g");
    const int gn = g * n0;
    return static_cast<double>((gn + (d - g) - 1) / (d - g)) / gn;
}

MuStats mu_statistics(const std::vector<DilationTrace>& traces, int d) {
    MuStats s;
    s.d = d;
    for (const auto& t : traces) {
        if (t.verdict == Verdict::failed) {
            ++s.fails;
            continue;
        }
        if (t.verdict == Verdict::matrix_not_arveson) {
            ++s.mat_not_arv;
            continue;
        }
        if (s.mu.empty()) {
            s.n0 = t.n0;
            s.g = t.g;
        } else if (t.n0 != s.n0 || t.g != s.g) {
            throw std::invalid_argument("mu_statistics: traces mix different (g, n0)");
        }
        s.mu.push_back(t.mu);
        s.growth.push_back(static_cast<int>(t.steps.size()));
    }
    if (s.mu.empty()) throw std::invalid_argument("mu_statistics: no successful traces");
    const double cnt = static_cast<double>(s.growth.size()), gn = static_cast<double>(s.g * s.n0);
    long long sum = 0;
    for (int x : s.growth) sum += x;
    const double mg = static_cast<double>(sum) / cnt;
    s.mean = mg / gn;
    double var = 0;
    for (int x : s.growth) var += (x - mg) * (x - mg);
    s.stddev = std::sqrt(var / cnt) / gn;
    s.mu_est = mu_estimate(s.g, d, s.n0);
    return s;
}

}  // namespace spectrex
