#pragma once

#include "spectrex/caratheodory.hpp"
#include "spectrex/dilation.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace spectrex {

// Standard normal entries, symmetrized; resampled until irreducible and bounded.
// Throws std::invalid_argument at once when g >= d(d+1)/2 (never bounded) and
// std::runtime_error after max_rejects failed draws.
SymTuple random_defining_tuple(int g, int d, Rng& rng, int max_rejects = 1000);

// D_A(1) is bounded iff no x with max |x_i| = 1 has Lambda_A(x) >= 0.
bool boundedness_check(const SymTuple& A, const SolverOptions& opt = {});

// Random symmetric direction scaled to half the distance to the boundary, so
// that L_A of the result has smallest eigenvalue 1/2.
SymTuple random_interior_point(const SymTuple& A, int n, Rng& rng);

// Seeded random symmetric tuple with N(0,1) entries.
SymTuple random_symmetric_tuple(int g, int n, Rng& rng);

enum class ExperimentMode { classify_sweep, carath_sweep, estimate_sweep, tolerance_sweep };
std::string to_string(ExperimentMode m);

struct ExperimentSpec {
    ExperimentMode mode = ExperimentMode::classify_sweep;
    int g = 2;
    std::vector<int> ds{2};
    std::vector<int> n0s{2};
    int tuples_per_d = 10;
    int points_per_tuple = 10;
    std::uint64_t seed = 1;
    ToleranceConfig tolerances;
    int max_fails = 10;
    PurifyMode purify = PurifyMode::full;
    // tolerance_sweep only: kernel and equation tolerances to try.
    std::vector<double> lmi_grid{1e-9, 1e-10, 1e-11, 1e-12};
    std::vector<double> ee_grid{1e-10, 1e-12, 1e-15};

    void validate() const;
};
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ExperimentSpec& s);

// Deterministic per-trial rng stream derived from the experiment seed.
Rng trial_rng(std::uint64_t seed, int g, int d, int n0, int tuple, int point);

struct TrialRecord {
    int g = 0, d = 0, n0 = 0, tuple = 0, point = 0;
    Verdict verdict = Verdict::failed;
    std::string failure;
    int n = 0;
    int steps = 0;
    double mu = 0;
    int dil_dim0 = 0;  // dilation subspace dimension at the starting point
    ExtremeReport report;
    double final_min_eig = 0;
    // carath modes
    double residual_point = 0;
    double residual_isometry = 0;
    bool terms_free = false;
    // kept for re-classification
    SymTuple A;
    SymTuple final_point;
};

struct KernelBin {
    int count = 0;
    std::set<int> dil_dims;
};

struct ClassifyRow {
    int g = 0, d = 0, n0 = 0, n = 0;
    int mat_not_arv = 0, euc = 0, arv = 0, fail = 0;
    Counts counts;
    std::map<int, KernelBin> kernel;  // key 6 collects k > 5
};

struct CarathRow {
    int g = 0, d = 0, n0 = 0;
    int min_growth = 0, max_growth = 0;
    double mean_growth = 0, mean_mu = 0, std_mu = 0;
    double mu_est = 0;
    int fails = 0, mat_not_arv = 0, successes = 0;
};

struct SweepRow {
    double lmi = 0, ee = 0;
    int mat_not_arv = 0, euc = 0, arv = 0, indeterminate = 0;
    int flips = 0;  // points whose (euclidean, matrix, arveson) flags differ from the operating point
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<TrialRecord> trials;
    std::vector<ClassifyRow> classify_rows;
    std::vector<CarathRow> carath_rows;
    std::vector<SweepRow> sweep_rows;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);
// Re-classifies the terminal points of a classify sweep under each grid pair.
std::vector<SweepRow> tolerance_sweep(const std::vector<TrialRecord>& trials, const ExperimentSpec& spec);

std::string rows_csv(const ExperimentResult& r);
std::string rows_markdown(const ExperimentResult& r);
nlohmann::json rows_json(const ExperimentResult& r);
std::string mu_csv(const ExperimentResult& r);
// Writes rows.csv, rows.json, rows.md (and mu.csv for the dilation-statistics modes).
void write_outputs(const ExperimentResult& r, const std::string& dir);

}  // namespace spectrex
