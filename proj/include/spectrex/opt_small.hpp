#pragma once

#include "spectrex/sym_tuple.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace spectrex {

enum class SolveStatus { optimal, infeasible, unbounded, max_iter };
std::string to_string(SolveStatus s);

struct SolverOptions {
    double tol = 1e-9;       // target duality gap
    int max_newton = 200;    // total Newton steps across all barrier stages
    std::ostream* trace = nullptr;
};

// maximize objective . y  s.t.  F0 + sum_i y_i F_i >= 0  and  box_lo <= y <= box_hi.
// Empty box vectors mean no bounds; entries may be +-infinity.
struct LmiProgram {
    Mat F0;
    std::vector<Mat> F;
    Vec objective;
    Vec box_lo;
    Vec box_hi;

    int m() const { return static_cast<int>(F.size()); }
};

struct LmiResult {
    SolveStatus status = SolveStatus::max_iter;
    Vec y;
    double objective = 0;
    double gap = 0;       // barrier duality-gap bound at exit
    double min_eig = 0;   // smallest eigenvalue of F(y)
    int newton_steps = 0;
    int faces_removed = 0;  // facial-reduction rounds used when no interior exists
};

LmiResult solve_lmi_max(const LmiProgram& prog, const SolverOptions& opt = {});

// Is there a y in the box with F0 + sum y_i F_i >= -1e-9 I?
bool lmi_feasible(const Mat& F0, const std::vector<Mat>& F, const Vec& box_lo, const Vec& box_hi,
                  const SolverOptions& opt = {});

// minimize c . x  s.t.  G x <= h,  E x = f,  lo <= x <= hi  (lo/hi may be infinite).
struct LinearProgram {
    Vec c;
    Mat G;
    Vec h;
    Mat E;
    Vec f;
    Vec lo;
    Vec hi;

    int n() const { return static_cast<int>(c.size()); }
};

struct LpResult {
    SolveStatus status = SolveStatus::max_iter;
    Vec x;
    double objective = 0;
    int pivots = 0;
};

LpResult solve_lp(const LinearProgram& prog, const SolverOptions& opt = {});

}  // namespace spectrex
