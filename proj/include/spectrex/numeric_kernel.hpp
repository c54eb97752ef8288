#pragma once

#include "spectrex/sym_tuple.hpp"

#include <optional>
#include <vector>

namespace spectrex {

struct ToleranceConfig {
    // Kernel detection on raw (not yet purified) points.
    double lmi_mag = 1e-7;
    double lmi_gap = 1e-2;
    // Kernel detection on purified points; used by classification.
    double post_mag = 1e-11;
    double post_gap = 1e-11;
    // Nullspace decisions for the extreme-point equation systems.
    double ee_mag = 1e-15;
    double ee_gap = 1e-15;
    double purify_eps = 1e-7;
    double psd_slack = 1e-11;
    // Commutant dimension for irreducibility.
    double irr_mag = 1e-10;
    double irr_gap = 1e-4;

    // Throws std::invalid_argument unless every field is strictly positive.
    void validate() const;
};

ToleranceConfig tolerances_from_json(const nlohmann::json& j, ToleranceConfig base = {});
nlohmann::json tolerances_to_json(const ToleranceConfig& cfg);

// First numerical zero: the smallest 1-based index i >= 2 with
// sv[i] < eps_mag and sv[i]/sv[i-1] < eps_gap. sv must be sorted descending.
// Throws std::invalid_argument on empty input.
std::optional<int> delta(const std::vector<double>& sv, double eps_mag, double eps_gap);

struct NumericalKernel {
    Mat basis;            // dn x k, orthonormal columns
    int k = 0;
    int first_zero_index = 0;
    double accuracy = 0;  // magnitude of the first numerical zero
};

// Eigen-decomposition of the symmetric matrix L; none when no numerical zero.
std::optional<NumericalKernel> lmi_kernel(const Mat& L, double eps_mag, double eps_gap);
std::optional<NumericalKernel> lmi_kernel(const SymTuple& A, const SymTuple& X, double eps_mag,
                                          double eps_gap);

bool psd_within_slack(const Mat& M, double slack);
double min_eigenvalue(const Mat& M);

// Rank decision for a general matrix: rank = delta - 1 when a numerical zero
// exists, otherwise min(rows, cols). A matrix whose largest singular value is
// already below eps_mag has rank 0.
struct NumericalNullspace {
    int rank = 0;
    int nullity = 0;
    Mat basis;  // cols x nullity, orthonormal
    Vec singular_values;
};

NumericalNullspace numerical_nullspace(const Mat& M, double eps_mag, double eps_gap);

}  // namespace spectrex
