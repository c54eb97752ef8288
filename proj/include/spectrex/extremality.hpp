#pragma once

#include "spectrex/numeric_kernel.hpp"
#include "spectrex/sym_tuple.hpp"

#include <string>
#include <vector>

namespace spectrex {

enum class SystemKind { arveson, euclidean, matrix_extreme };

struct EquationMatrix {
    SystemKind kind = SystemKind::arveson;
    Mat data;
    std::string unknown_layout;

    int rows() const { return static_cast<int>(data.rows()); }
    int cols() const { return static_cast<int>(data.cols()); }
};

// K is dn x k (k may be 0). Unknowns are listed in unknown_layout.
EquationMatrix arveson_system(const SymTuple& A, const SymTuple& X, const Mat& K);
EquationMatrix euclidean_system(const SymTuple& A, const SymTuple& X, const Mat& K);
EquationMatrix matrix_extreme_system(const SymTuple& A, const SymTuple& X, const Mat& K);

struct Counts {
    int arv = 0;
    int euc = 0;
    int mat = 0;
};
Counts rank_nullity_counts(int g, int d, int n);

struct DilationSubspace {
    std::vector<ColTuple> basis;
    Mat flat;  // gn x dim; column c*n + i is coordinate c, entry i
    int dim = 0;
};

ColTuple unflatten_columns(const Vec& v, int g, int n);
Vec flatten_columns(const ColTuple& beta);

// Nullspace of the Arveson system at the kernel found with the post-purification
// tolerances; an interior point yields all of R^{gn}.
DilationSubspace dilation_subspace(const SymTuple& A, const SymTuple& X, const ToleranceConfig& cfg);
DilationSubspace dilation_subspace(const SymTuple& A, const SymTuple& X, const Mat& K,
                                   const ToleranceConfig& cfg);

// Dimension of the real symmetric commutant of the tuple.
int commutant_dimension(const SymTuple& X, double eps_mag, double eps_gap);
// Orthonormal basis of the symmetric commutant, each element as an n x n matrix.
std::vector<Mat> commutant_basis(const SymTuple& X, double eps_mag, double eps_gap);
bool is_irreducible(const SymTuple& X, double eps_mag = 1e-10, double eps_gap = 1e-4);

enum class Flag { no, yes, indeterminate };
std::string to_string(Flag f);

struct SystemEvidence {
    double sigma_min = 0;
    double sigma_max = 0;
    int rows = 0;
    int cols = 0;
    int nullity = 0;
};

struct ExtremeReport {
    int k = 0;
    int dil_dim = 0;
    Counts counts;
    Flag euclidean = Flag::no;
    Flag matrix = Flag::no;
    Flag arveson = Flag::no;
    Flag irreducible = Flag::no;
    Flag free = Flag::no;
    SystemEvidence euc_evidence, mat_evidence, arv_evidence;
    double min_eig = 0;
    double kernel_accuracy = 0;
};

// Throws std::invalid_argument when L_A(X) has an eigenvalue below -psd_slack.
ExtremeReport classify(const SymTuple& A, const SymTuple& X, const ToleranceConfig& cfg);
nlohmann::json report_to_json(const ExtremeReport& r);

}  // namespace spectrex
