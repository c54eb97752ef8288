#include "spectrex/projective.hpp"

#include "spectrex/numeric_kernel.hpp"

#include <cmath>

namespace spectrex {

HomTuple homogenize(const SymTuple& X) { return {Mat::Identity(X.n(), X.n()), X}; }

SymTuple dehomogenize(const HomTuple& X) {
    Eigen::SelfAdjointEigenSolver<Mat> es(X.inhomogeneous);
    const Vec& w = es.eigenvalues();
    if (w.size() == 0) return X.rest;
    if (w.minCoeff() < -1e-10)
        throw std::invalid_argument("dehomogenize: inhomogeneous part has eigenvalue " + std::to_string(w.minCoeff()));
    const double cut = 1e-12 * std::max(w.maxCoeff(), 0.0);
    Vec r(w.size());
    for (int i = 0; i < w.size(); ++i) r(i) = w(i) > cut && w(i) > 0 ? 1.0 / std::sqrt(w(i)) : 0.0;
    const Mat R = es.eigenvectors() * r.asDiagonal() * es.eigenvectors().transpose();
    std::vector<Mat> out;
    for (const Mat& M : X.rest.mats()) out.push_back(R * M * R);
    return SymTuple(out, 1e-9);
}

ProjectiveMap make_projective_map(const Mat& W) {
    ProjectiveMap P;
    P.W = W;
    Eigen::JacobiSVD<Mat> svd(W);
    const Vec& s = svd.singularValues();
    P.condition = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
    const double nrm = s(0);
    P.invertible = std::abs(W.determinant()) > 1e-12 * std::pow(nrm, static_cast<double>(W.rows()));
    return P;
}

HomTuple transform_T(const Mat& W, const HomTuple& Z) {
    const int g = Z.g();
    if (W.rows() != g + 1 || W.cols() != g + 1)
        throw std::invalid_argument("transform_T: W must be (g+1) x (g+1)");
    const int n = Z.n();
    auto coord = [&](int j) -> const Mat& { return j == 0 ? Z.inhomogeneous : Z.rest[j - 1]; };
    std::vector<Mat> out(g + 1, Mat::Zero(n, n));
    for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= g; ++j)
            if (W(i, j) != 0.0) out[i] += W(i, j) * coord(j);
    HomTuple r;
    r.inhomogeneous = out[0];
    r.rest = SymTuple(std::vector<Mat>(out.begin() + 1, out.end()));
    return r;
}

SymTuple projective_P(const Mat& W, const SymTuple& X) { return dehomogenize(transform_T(W, homogenize(X))); }

SymTuple image_pencil(const Mat& W, const SymTuple& A) {
    const Mat Wit = W.inverse().transpose();
    const HomTuple T = transform_T(Wit, homogenize(A));
    if (min_eigenvalue(T.inhomogeneous) <= 1e-12)
        throw std::invalid_argument("image_pencil: inhomogeneous part is not positive definite");
    return dehomogenize(T);
}

SymTuple spin_disk_pencil() {
    Mat B1(2, 2), B2(2, 2);
    B1 << 1, 0, 0, -1;
    B2 << 0, 1, 1, 0;
    return SymTuple({B1, B2});
}

double spin_disk_det_closed_form(const SymTuple& A) {
    const double a111 = A[0](0, 0), a221 = A[0](1, 1), a121 = A[0](0, 1);
    const double a112 = A[1](0, 0), a222 = A[1](1, 1), a122 = A[1](0, 1);
    return (a111 * a122 - a121 * a112 + a121 * a222 - a221 * a122) / 2.0;
}

namespace {

Vec unbounded_witness(const SymTuple& A) {
    const double a111 = A[0](0, 0), a221 = A[0](1, 1), a121 = A[0](0, 1);
    const double a112 = A[1](0, 0), a222 = A[1](1, 1), a122 = A[1](0, 1);
    Vec w(2);
    if (a121 != 0.0 || a122 != 0.0) {
        const double v = a111 * a122 - a121 * a112;
        w << a122, -a121;
        return v < 0 ? Vec(-w) : w;
    }
    // Both coordinates diagonal: two half-plane constraints always share a ray.
    Vec p(2), q(2);
    p << a111, a112;
    q << a221, a222;
    std::vector<Vec> cand;
    for (const Vec& u : {p, q}) {
        Vec perp(2);
        perp << -u(1), u(0);
        cand.push_back(perp);
        cand.push_back(-perp);
        cand.push_back(u);
    }
    Vec e(2);
    e << 1, 0;
    cand.push_back(e);
    for (const Vec& c : cand)
        if (c.norm() > 0 && c.dot(p) >= -1e-15 && c.dot(q) >= -1e-15) return c / c.norm();
    return e;
}

}  // namespace

ProjectiveMap spin_disk_W(const SymTuple& A) {
    if (A.g() != 2 || A.n() != 2) throw std::invalid_argument("spin_disk_W: need g = d = 2");
    const double a111 = A[0](0, 0), a221 = A[0](1, 1), a121 = A[0](0, 1);
    const double a112 = A[1](0, 0), a222 = A[1](1, 1), a122 = A[1](0, 1);
    Mat W(3, 3);
    W << 1, (a111 + a221) / 2, (a112 + a222) / 2,
         0, (a111 - a221) / 2, (a112 - a222) / 2,
         0, a121, a122;
    ProjectiveMap P = make_projective_map(W);
    if (!P.invertible) throw UnboundedPencil("spin_disk_W: det(W) = 0, D_A is unbounded", unbounded_witness(A));
    return P;
}

std::string to_string(Degeneracy d) {
    switch (d) {
        case Degeneracy::no_extreme_points: return "no_extreme_points";
        case Degeneracy::unique_extreme: return "unique_extreme";
        case Degeneracy::nondegenerate: return "nondegenerate";
    }
    return "?";
}

DegenerateReport degenerate_classify(const SymTuple& A) {
    const int g = A.g(), d = A.n();
    const int per = d * (d + 1) / 2;
    Mat M(per, g);
    Vec id(per);
    for (int c = 0; c < g; ++c) {
        int r = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                M(r, c) = A[c](i, j);
                id(r) = i == j ? -1.0 : 0.0;
                ++r;
            }
    }
    DegenerateReport rep;
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
    for (int i = 0; i < s.size(); ++i) rep.rank += s(i) > tol ? 1 : 0;
    if (rep.rank < g) {
        rep.kind = Degeneracy::no_extreme_points;
        rep.alpha = svd.matrixV().col(g - 1);
    } else if (g == per) {
        rep.kind = Degeneracy::unique_extreme;
        rep.alpha = M.partialPivLu().solve(id);
    }
    return rep;
}

}  // namespace spectrex
