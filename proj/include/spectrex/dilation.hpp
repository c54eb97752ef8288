#pragma once

#include "spectrex/extremality.hpp"
#include "spectrex/opt_small.hpp"

#include <random>
#include <string>
#include <vector>

namespace spectrex {

using Rng = std::mt19937_64;

enum class DilationMode { keep_gamma, two_stage };
enum class Target { matrix_or_arveson, arveson_only };
enum class PurifyMode { full, frozen, off };
enum class Verdict { arveson, matrix_not_arveson, failed };

std::string to_string(Verdict v);

// Y0 = X / (1 - lambda) with lambda the smallest eigenvalue of L_A(X). When
// lambda is within 1e-9 of 1 (only X = 0 for bounded D_A) the ray is first
// perturbed by half of (I, 0, ..., 0).
SymTuple to_boundary(const SymTuple& A, const SymTuple& X);

// Unit-norm element of the subspace with random positive convex weights.
// Throws std::invalid_argument when the subspace is trivial.
ColTuple random_beta(const DilationSubspace& S, Rng& rng);

struct OneDilation {
    bool ok = false;
    std::string reason;
    SymTuple point;
    double c = 0;
    Vec gamma;
    SolveStatus status = SolveStatus::max_iter;
};

// Maximizes c over [[Y, c beta], [c beta^T, gamma]] in D_A using the Schur
// complement with respect to L_A(Y). beta must solve the Arveson equations at Y.
OneDilation maximal_one_dilation(const SymTuple& A, const SymTuple& Y, const ColTuple& beta,
                                 DilationMode mode, const ToleranceConfig& cfg, Rng& rng,
                                 const SolverOptions& solver = {.tol = 1e-11});

struct PurifyResult {
    SymTuple point;
    double eta = 0;      // optimal value of the linear program
    int k_before = 0;    // kernel dimension at the raw tolerances
    int k_after = 0;     // kernel dimension at the post-purification tolerances
    double accuracy_before = 0;
    double accuracy_after = 0;
    double max_change = 0;
};

// Entrywise perturbation of at most purify_eps that zeroes the compression of
// L_A onto its numerical kernel. Entries (i,j) with i,j < n_frozen stay fixed.
PurifyResult purify(const SymTuple& A, const SymTuple& X, int n_frozen, const ToleranceConfig& cfg);
inline PurifyResult purify_full(const SymTuple& A, const SymTuple& X, const ToleranceConfig& cfg) {
    return purify(A, X, 0, cfg);
}
inline PurifyResult purify_frozen(const SymTuple& A, const SymTuple& X, int n0, const ToleranceConfig& cfg) {
    return purify(A, X, n0, cfg);
}

struct DilationStep {
    ColTuple beta;
    double c = 0;
    Vec gamma;
    int retries = 0;
    bool purified = false;
    double accuracy_before = 0;
    double accuracy_after = 0;
    int k_after = 0;
};

struct DilationTrace {
    int n0 = 0;
    int g = 0;
    std::vector<DilationStep> steps;
    SymTuple final_point;
    ExtremeReport final_report;
    Verdict verdict = Verdict::failed;
    std::string failure_reason;
    double mu = 0;

    int final_level() const { return n0 + static_cast<int>(steps.size()); }
};

struct DilateOptions {
    Target target = Target::matrix_or_arveson;
    int max_fails = 10;
    PurifyMode purify = PurifyMode::full;
    DilationMode mode = DilationMode::keep_gamma;
    SolverOptions solver{.tol = 1e-11};
};

DilationTrace dilate_to_extreme(const SymTuple& A, const SymTuple& X, const DilateOptions& opts,
                                const ToleranceConfig& cfg, Rng& rng);

nlohmann::json trace_to_json(const DilationTrace& t);

}  // namespace spectrex
