#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spectrex/dilation.hpp"
#include "spectrex/exact.hpp"
#include "spectrex/lab.hpp"
#include "support.hpp"

using namespace spectrex;

namespace {

SymTuple spin_disk() {
    Mat B1(2, 2), B2(2, 2);
    B1 << 1, 0, 0, -1;
    B2 << 0, 1, 1, 0;
    return SymTuple({B1, B2});
}

SymTuple scalar_point(std::initializer_list<double> v) {
    std::vector<Mat> m;
    for (double x : v) m.push_back(Mat::Constant(1, 1, x));
    return SymTuple(m);
}

int kernel_dim(const SymTuple& A, const SymTuple& X, double mag, double gap) {
    const auto K = lmi_kernel(A, X, mag, gap);
    return K ? K->k : 0;
}

double max_entry_diff(const SymTuple& X, const SymTuple& Y) {
    double m = 0;
    for (int c = 0; c < X.g(); ++c) m = std::max(m, (X[c] - Y[c]).cwiseAbs().maxCoeff());
    return m;
}

bool bitwise_equal_block(const SymTuple& X, const SymTuple& Y, int n0) {
    for (int c = 0; c < X.g(); ++c)
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n0; ++j)
                if (X[c](i, j) != Y[c](i, j)) return false;
    return true;
}

}  // namespace

TEST_CASE("to_boundary") {
    const ToleranceConfig cfg;
    SUBCASE("spin disk (1/2, 0) goes to (1, 0)") {
        const auto Y = to_boundary(spin_disk(), scalar_point({0.5, 0}));
        CHECK(Y[0](0, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(Y[1](0, 0)) <= 1e-14);
    }
    SUBCASE("origin takes the guarded path") {
        const auto Y = to_boundary(spin_disk(), SymTuple::zeros(2, 2));
        CHECK(std::abs(oracle::min_eig(oracle::pencil(spin_disk(), Y))) <= 1e-10);
    }
    SUBCASE("boundary points are fixed") {
        const auto X = scalar_point({0.6, 0.8});
        const auto Y = to_boundary(spin_disk(), X);
        CHECK(max_entry_diff(X, Y) <= 1e-15);
    }
    SUBCASE("random interior points land on the boundary") {
        Rng rng(41);
        for (int t = 0; t < 10; ++t) {
            const auto A = random_defining_tuple(2 + t % 2, 3, rng);
            const auto X = random_interior_point(A, 2, rng);
            const auto Y = to_boundary(A, X);
            CHECK(std::abs(oracle::min_eig(oracle::pencil(A, Y))) <= 1e-10);
        }
    }
}

TEST_CASE("random_beta") {
    Rng rng(42);
    const auto A = random_defining_tuple(2, 2, rng);
    const auto X = to_boundary(A, random_interior_point(A, 3, rng));
    const auto S = dilation_subspace(A, X, ToleranceConfig{});
    REQUIRE(S.dim == 4);
    SUBCASE("reproducible and in the span") {
        Rng r1(7), r2(7);
        const Vec b1 = flatten_columns(random_beta(S, r1));
        const Vec b2 = flatten_columns(random_beta(S, r2));
        CHECK(b1 == b2);
        CHECK(b1.norm() == doctest::Approx(1.0));
        CHECK((S.flat * (S.flat.transpose() * b1) - b1).norm() <= 1e-12);
    }
    SUBCASE("independent draws") {
        Mat D(S.flat.rows(), 100);
        for (int s = 0; s < 100; ++s) {
            Rng r(1000 + s);
            D.col(s) = flatten_columns(random_beta(S, r));
        }
        Eigen::JacobiSVD<Mat> svd(D);
        CHECK(svd.singularValues()(S.dim - 1) > 1e-3);
    }
    SUBCASE("one-dimensional subspace") {
        DilationSubspace one;
        one.dim = 1;
        one.flat = Vec::Unit(4, 2);
        one.basis = {unflatten_columns(one.flat.col(0), 2, 2)};
        Rng r(3);
        const Vec b = flatten_columns(random_beta(one, r));
        CHECK(std::abs(b(2)) == doctest::Approx(1.0));
    }
}

TEST_CASE("maximal 1-dilation grows the kernel and stays in D_A") {
    Rng rng(43);
    const ToleranceConfig cfg;
    for (int t = 0; t < 10; ++t) {
        const auto A = random_defining_tuple(3, 4, rng);
        const auto Y = to_boundary(A, random_interior_point(A, 2, rng));
        const int k0 = kernel_dim(A, Y, cfg.lmi_mag, cfg.lmi_gap);
        const auto S = dilation_subspace(A, Y, cfg);
        REQUIRE(S.dim >= 1);
        const auto one = maximal_one_dilation(A, Y, random_beta(S, rng), DilationMode::keep_gamma, cfg, rng);
        REQUIRE(one.ok);
        CHECK(one.c > 0);
        CHECK(one.point.n() == 3);
        CHECK(oracle::min_eig(oracle::pencil(A, one.point)) >= -1e-9);
        CHECK(kernel_dim(A, one.point, cfg.lmi_mag, cfg.lmi_gap) >= k0);
        CHECK(bitwise_equal_block(Y, one.point, 2));
    }
}

TEST_CASE("wild disc dilation respects the Schur bound") {
    const auto A = wild_disc_pencil();
    const ToleranceConfig cfg;
    Rng rng(44);
    // A level-2 boundary point: X^2 + Y^2 <= I with equality in one direction.
    const Mat Q = oracle::random_orthogonal(2, rng);
    Mat X = Q * Vec(Vec::Zero(2) + Vec::LinSpaced(2, 0.6, 0.2)).asDiagonal() * Q.transpose();
    const Mat R = Mat::Identity(2, 2) - X * X;
    Eigen::SelfAdjointEigenSolver<Mat> es(R);
    Vec w = es.eigenvalues();
    w(0) = 0;
    const Mat Y = es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    const SymTuple P({X, Y});
    REQUIRE(kernel_dim(A, P, cfg.lmi_mag, cfg.lmi_gap) >= 1);
    const auto S = dilation_subspace(A, P, cfg);
    REQUIRE(S.dim >= 1);
    const auto one = maximal_one_dilation(A, P, random_beta(S, rng), DilationMode::keep_gamma, cfg, rng);
    REQUIRE(one.ok);
    const Mat& X1 = one.point[0];
    const Mat& Y1 = one.point[1];
    const auto ev = oracle::sorted_eigenvalues(X1 * X1 + Y1 * Y1);
    CHECK(ev.back() <= 1 + 1e-8);
    CHECK(ev.back() >= 1 - 1e-8);
}

TEST_CASE("two-stage mode") {
    Rng rng(45);
    const ToleranceConfig cfg;
    const auto A = random_defining_tuple(2, 2, rng);
    const auto Y = to_boundary(A, random_interior_point(A, 2, rng));
    const auto S = dilation_subspace(A, Y, cfg);
    REQUIRE(S.dim >= 1);
    const auto beta = random_beta(S, rng);
    const auto a = maximal_one_dilation(A, Y, beta, DilationMode::keep_gamma, cfg, rng);
    const auto b = maximal_one_dilation(A, Y, beta, DilationMode::two_stage, cfg, rng);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    CHECK(b.c == doctest::Approx(a.c).epsilon(1e-6));
    CHECK(oracle::min_eig(oracle::pencil(A, b.point)) >= -1e-9);
}

TEST_CASE("purification") {
    const ToleranceConfig cfg;
    SUBCASE("an exact boundary point is left alone") {
        const auto X = scalar_point({0.6, 0.8});
        const auto r = purify_full(spin_disk(), X, cfg);
        CHECK(r.eta == 0.0);
        CHECK(max_entry_diff(r.point, X) == 0.0);
    }
    SUBCASE("noisy boundary points recover their kernel") {
        Rng rng(46);
        std::normal_distribution<double> N(0, 1);
        int recovered = 0, total = 0;
        for (int t = 0; t < 20; ++t) {
            const auto A = random_defining_tuple(2, 2, rng);
            DilateOptions opts;
            const auto tr = dilate_to_extreme(A, random_interior_point(A, 2, rng), opts, cfg, rng);
            if (tr.verdict == Verdict::failed) continue;
            const SymTuple& clean = tr.final_point;
            const int k = kernel_dim(A, clean, 1e-11, 1e-11);
            std::vector<Mat> noisy;
            for (int c = 0; c < clean.g(); ++c) {
                Mat E = oracle::random_symmetric(clean.n(), rng);
                E = E / E.cwiseAbs().maxCoeff() * 1e-8;
                noisy.push_back(clean[c] + E);
            }
            const SymTuple Xn(noisy);
            const auto r = purify_full(A, Xn, cfg);
            ++total;
            if (kernel_dim(A, r.point, 1e-11, 1e-11) == k) ++recovered;
            CHECK(max_entry_diff(r.point, Xn) <= 1e-7);
            CHECK(r.max_change <= 1e-7);
        }
        REQUIRE(total >= 15);
        CHECK(recovered >= 0.9 * total);
    }
    SUBCASE("frozen purification keeps the leading block and costs at least as much") {
        Rng rng(47);
        for (int t = 0; t < 8; ++t) {
            const auto A = random_defining_tuple(3, 4, rng);
            const auto Y = to_boundary(A, random_interior_point(A, 2, rng));
            const auto S = dilation_subspace(A, Y, cfg);
            const auto one = maximal_one_dilation(A, Y, random_beta(S, rng), DilationMode::keep_gamma, cfg, rng);
            REQUIRE(one.ok);
            const auto fr = purify_frozen(A, one.point, 2, cfg);
            const auto fu = purify_full(A, one.point, cfg);
            CHECK(bitwise_equal_block(fr.point, one.point, 2));
            CHECK(fr.eta >= fu.eta - 1e-15);
            const auto again = purify_frozen(A, fr.point, 2, cfg);
            CHECK(bitwise_equal_block(again.point, one.point, 2));
        }
    }
    SUBCASE("freezing everything is the identity") {
        Rng rng(48);
        const auto A = random_defining_tuple(2, 3, rng);
        const auto Y = to_boundary(A, random_interior_point(A, 2, rng));
        const auto r = purify_frozen(A, Y, 2, cfg);
        CHECK(max_entry_diff(r.point, Y) == 0.0);
    }
}

TEST_CASE("dilate_to_extreme") {
    const ToleranceConfig cfg;
    SUBCASE("a free extreme point needs no steps") {
        Rng rng(49);
        const auto tr = dilate_to_extreme(spin_disk(), scalar_point({0.6, 0.8}), DilateOptions{}, cfg, rng);
        CHECK(tr.verdict == Verdict::arveson);
        CHECK(tr.steps.empty());
    }
    SUBCASE("g = d = 3 from n0 = 2 takes exactly two steps") {
        Rng rng(50);
        int ok = 0;
        for (int t = 0; t < 10; ++t) {
            const auto A = random_defining_tuple(3, 3, rng);
            DilateOptions opts;
            opts.target = Target::arveson_only;
            opts.purify = PurifyMode::frozen;
            const auto tr = dilate_to_extreme(A, random_interior_point(A, 2, rng), opts, cfg, rng);
            if (tr.verdict == Verdict::failed) continue;
            ++ok;
            CHECK(tr.steps.size() == 2);
            CHECK(tr.mu == doctest::Approx(1.0 / 3.0));
        }
        CHECK(ok >= 9);
    }
    SUBCASE("trace invariants") {
        Rng rng(51);
        for (int t = 0; t < 12; ++t) {
            const int g = 2 + t % 2, d = 3 + t % 2, n0 = 1 + t % 2;
            const auto A = random_defining_tuple(g, d, rng);
            const auto X0 = to_boundary(A, random_interior_point(A, n0, rng));
            DilateOptions opts;
            opts.purify = t % 3 == 0 ? PurifyMode::frozen : PurifyMode::full;
            const auto tr = dilate_to_extreme(A, X0, opts, cfg, rng);
            CHECK(tr.final_level() == tr.final_point.n());
            CHECK(psd_within_slack(eval_pencil(A, tr.final_point), 1e-11));
            if (tr.verdict == Verdict::failed) continue;
            CHECK(static_cast<int>(tr.steps.size()) <= g * n0);
            int k = kernel_dim(A, X0, cfg.lmi_mag, cfg.lmi_gap);
            for (const auto& s : tr.steps) {
                CHECK(s.c >= 0);
                CHECK(s.retries <= opts.max_fails);
                CHECK(s.k_after >= k + 1);
                k = s.k_after;
            }
            if (opts.purify == PurifyMode::frozen) CHECK(bitwise_equal_block(tr.final_point, X0, n0));
            const auto j = trace_to_json(tr);
            CHECK(j["steps"].size() == tr.steps.size());
        }
    }
}
