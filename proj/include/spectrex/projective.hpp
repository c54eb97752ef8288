#pragma once

#include "spectrex/sym_tuple.hpp"

#include <stdexcept>

namespace spectrex {

HomTuple homogenize(const SymTuple& X);
// X0^{+/2} X_i X0^{+/2}; eigenvalues of X0 below 1e-12 * lambda_max are treated
// as zero. Throws std::invalid_argument when X0 has an eigenvalue below -1e-10.
SymTuple dehomogenize(const HomTuple& X);

struct ProjectiveMap {
    Mat W;  // (g+1) x (g+1)
    bool invertible = false;
    double condition = 0;
};
ProjectiveMap make_projective_map(const Mat& W);

// Output coordinate i is sum_j W(i,j) Z_j with Z_0 the inhomogeneous part.
HomTuple transform_T(const Mat& W, const HomTuple& Z);

// h^{-1}(T_W(I, X)).
SymTuple projective_P(const Mat& W, const SymTuple& X);

// The pencil B with (I, B) proportional to T_{W^{-T}}(I, A), normalized by the
// inhomogeneous part. Throws when that part is not positive definite.
// A must be a minimal defining tuple; minimality is the caller's assertion.
SymTuple image_pencil(const Mat& W, const SymTuple& A);

class UnboundedPencil : public std::invalid_argument {
public:
    UnboundedPencil(const std::string& what, Vec witness)
        : std::invalid_argument(what), witness_(std::move(witness)) {}
    // Nonzero x with Lambda_A(x) >= 0; the whole ray through x lies in D_A(1).
    const Vec& witness() const { return witness_; }

private:
    Vec witness_;
};

// Canonical map for a bounded g = d = 2 pencil onto the spin disk.
// Throws UnboundedPencil when det(W) vanishes to 1e-12 relative accuracy.
ProjectiveMap spin_disk_W(const SymTuple& A);
double spin_disk_det_closed_form(const SymTuple& A);
SymTuple spin_disk_pencil();

enum class Degeneracy { no_extreme_points, unique_extreme, nondegenerate };
std::string to_string(Degeneracy d);

struct DegenerateReport {
    Degeneracy kind = Degeneracy::nondegenerate;
    Vec alpha;  // null combination, or the solution of sum alpha_i A_i = -I
    int rank = 0;
};
DegenerateReport degenerate_classify(const SymTuple& A);

}  // namespace spectrex
