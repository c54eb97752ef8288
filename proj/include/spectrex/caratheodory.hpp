#pragma once

#include "spectrex/dilation.hpp"

#include <string>
#include <vector>

namespace spectrex {

struct CarathTerm {
    SymTuple point;  // level n_i
    Mat V;           // n_i x n0
    bool irreducible = false;
    bool arveson = false;
};

struct CarathExpansion {
    bool ok = false;
    std::string failure;
    std::vector<CarathTerm> terms;
    double residual_point = 0;
    double residual_isometry = 0;
    double reassembly = 0;  // || U (oplus X^i) U^T - Y ||_F for the dilated Y
    DilationTrace trace;
};

struct CarathOptions {
    int max_fails = 10;
    DilationMode mode = DilationMode::keep_gamma;
    double cluster_gap = 1e-8;
    double drop_tol = 1e-12;
};

// Orthogonal splitting of X into irreducible summands: X_i = U_i^T X U_i with
// the U_i having orthonormal columns that together form an orthogonal matrix.
struct Summand {
    SymTuple point;
    Mat U;
};
std::vector<Summand> irreducible_decomposition(const SymTuple& X, const ToleranceConfig& cfg,
                                               double cluster_gap = 1e-8);

CarathExpansion carath_expand(const SymTuple& A, const SymTuple& X0, const CarathOptions& opts,
                              const ToleranceConfig& cfg, Rng& rng);
nlohmann::json expansion_to_json(const CarathExpansion& e);

struct MuStats {
    int n0 = 0, g = 0, d = 0;
    std::vector<double> mu;
    std::vector<int> growth;  // n - n0 per success
    double mean = 0;
    double stddev = 0;  // population
    double mu_est = 0;
    int fails = 0;
    int mat_not_arv = 0;
};

double mu_estimate(int g, int d, int n0);
// ceil(g n0 / (d - g)) / (g n0); only meaningful for d > g.
double mu_upper_bound(int g, int d, int n0);

// Only Arveson terminations enter the statistics. Throws when there are none.
MuStats mu_statistics(const std::vector<DilationTrace>& traces, int d);

}  // namespace spectrex
