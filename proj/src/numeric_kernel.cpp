#include "spectrex/numeric_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectrex {

void ToleranceConfig::validate() const {
    const double v[] = {lmi_mag, lmi_gap, post_mag, post_gap, ee_mag,  ee_gap,
                        purify_eps, psd_slack, irr_mag, irr_gap};
    for (double x : v)
        if (!(x > 0.0)) throw std::invalid_argument("tolerances must be strictly positive");
}

ToleranceConfig tolerances_from_json(const nlohmann::json& j, ToleranceConfig cfg) {
    auto take = [&](const char* key, double& field) {
        if (j.contains(key)) field = j[key].get<double>();
    };
    take("lmi_mag", cfg.lmi_mag);
    take("lmi_gap", cfg.lmi_gap);
    take("post_mag", cfg.post_mag);
    take("post_gap", cfg.post_gap);
    take("ee_mag", cfg.ee_mag);
    take("ee_gap", cfg.ee_gap);
    take("purify_eps", cfg.purify_eps);
    take("psd_slack", cfg.psd_slack);
    take("irr_mag", cfg.irr_mag);
    take("irr_gap", cfg.irr_gap);
    cfg.validate();
    return cfg;
}

nlohmann::json tolerances_to_json(const ToleranceConfig& c) {
    return {{"lmi_mag", c.lmi_mag},   {"lmi_gap", c.lmi_gap},       {"post_mag", c.post_mag},
            {"post_gap", c.post_gap}, {"ee_mag", c.ee_mag},         {"ee_gap", c.ee_gap},
            {"purify_eps", c.purify_eps}, {"psd_slack", c.psd_slack}, {"irr_mag", c.irr_mag},
            {"irr_gap", c.irr_gap}};
}

std::optional<int> delta(const std::vector<double>& sv, double eps_mag, double eps_gap) {
    if (sv.empty()) throw std::invalid_argument("delta: empty sequence");
    for (size_t i = 1; i < sv.size(); ++i) {
        if (sv[i] < eps_mag && sv[i - 1] > 0.0 && sv[i] / sv[i - 1] < eps_gap) return static_cast<int>(i) + 1;
    }
    return std::nullopt;
}

std::optional<NumericalKernel> lmi_kernel(const Mat& L, double eps_mag, double eps_gap) {
    Eigen::SelfAdjointEigenSolver<Mat> es(L);
    if (es.info() != Eigen::Success) throw std::runtime_error("lmi_kernel: eigensolver failed");
    const int N = static_cast<int>(L.rows());
    std::vector<int> order(N);
    for (int i = 0; i < N; ++i) order[i] = i;
    const Vec& ev = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(ev(a)) > std::abs(ev(b)); });
    std::vector<double> mags(N);
    for (int i = 0; i < N; ++i) mags[i] = std::abs(ev(order[i]));
    if (N == 0) return std::nullopt;
    const auto idx = delta(mags, eps_mag, eps_gap);
    if (!idx) return std::nullopt;
    NumericalKernel K;
    K.first_zero_index = *idx;
    K.k = N - *idx + 1;
    K.accuracy = mags[*idx - 1];
    K.basis.resize(N, K.k);
    for (int j = 0; j < K.k; ++j) K.basis.col(j) = es.eigenvectors().col(order[*idx - 1 + j]);
    return K;
}

std::optional<NumericalKernel> lmi_kernel(const SymTuple& A, const SymTuple& X, double eps_mag,
                                          double eps_gap) {
    return lmi_kernel(eval_pencil(A, X), eps_mag, eps_gap);
}

double min_eigenvalue(const Mat& M) {
    if (M.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool psd_within_slack(const Mat& M, double slack) { return min_eigenvalue(M) >= -slack; }

NumericalNullspace numerical_nullspace(const Mat& M, double eps_mag, double eps_gap) {
    NumericalNullspace out;
    const int cols = static_cast<int>(M.cols());
    if (M.rows() == 0 || cols == 0) {
        out.rank = 0;
        out.nullity = cols;
        out.basis = Mat::Identity(cols, cols);
        out.singular_values = Vec(0);
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    out.singular_values = svd.singularValues();
    const int m = static_cast<int>(out.singular_values.size());
    std::vector<double> sv(out.singular_values.data(), out.singular_values.data() + m);
    if (sv[0] < eps_mag) {
        out.rank = 0;
    } else {
        const auto idx = delta(sv, eps_mag, eps_gap);
        out.rank = idx ? *idx - 1 : m;
    }
    out.nullity = cols - out.rank;
    out.basis = svd.matrixV().rightCols(out.nullity);
    return out;
}

}  // namespace spectrex
