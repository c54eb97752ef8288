#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spectrex/exact.hpp"
#include "spectrex/extremality.hpp"
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

// Pushes X (or -X when the ray through X never leaves D_A) to where L_A first
// becomes singular.
SymTuple ray_to_boundary(const SymTuple& A, const SymTuple& X) {
    const Mat I = Mat::Identity(A.n() * X.n(), A.n() * X.n());
    double lam = oracle::min_eig(oracle::pencil(A, X) - I);
    if (lam < 0) return scale(X, -1.0 / lam);
    lam = oracle::min_eig(oracle::pencil(A, scale(X, -1.0)) - I);
    return scale(X, 1.0 / lam);
}

int ceil_div(long a, long b) { return static_cast<int>((a + b - 1) / b); }

bool implies(Flag a, Flag b) { return a != Flag::yes || b == Flag::yes; }

void check_report_invariants(const ExtremeReport& r) {
    CHECK(implies(r.free, r.matrix));
    CHECK(implies(r.matrix, r.euclidean));
    CHECK(implies(r.arveson, r.euclidean));
    CHECK((r.free == Flag::yes) == (r.arveson == Flag::yes && r.irreducible == Flag::yes));
    if (r.k < r.counts.arv) CHECK(r.arveson == Flag::no);
    if (r.k < r.counts.mat) CHECK(r.matrix == Flag::no);
    if (r.k < r.counts.euc) CHECK(r.euclidean == Flag::no);
}

}  // namespace

TEST_CASE("rank-nullity counts") {
    auto check = [](int g, int d, int n, int arv, int mat) {
        const auto c = rank_nullity_counts(g, d, n);
        CHECK(c.arv == arv);
        CHECK(c.mat == mat);
    };
    check(3, 4, 3, 3, 2);
    check(2, 3, 8, 6, 5);
    check(4, 7, 2, 2, 1);
    check(2, 2, 5, 5, 5);
    // integer oracle: MatCT = ceil(((n+1)(g+1)n - 2) / (2nd))
    for (int g = 1; g <= 5; ++g)
        for (int d = 1; d <= 8; ++d)
            for (int n = 1; n <= 8; ++n) {
                const auto c = rank_nullity_counts(g, d, n);
                CHECK(c.arv == ceil_div(g * n, d));
                CHECK(c.euc == ceil_div(g * (n + 1), 2 * d));
                CHECK(c.mat == ceil_div(static_cast<long>(n + 1) * (g + 1) * n - 2, 2L * n * d));
            }
}

TEST_CASE("equation matrix shapes") {
    std::mt19937_64 rng(31);
    const auto A = oracle::random_tuple(3, 4, rng);
    const auto X = oracle::random_tuple(3, 3, rng);
    const Mat K = Mat::Random(12, 2);
    const auto M = matrix_extreme_system(A, X, K);
    CHECK(M.rows() == 25);
    CHECK(M.cols() == 24);
    CHECK(M.kind == SystemKind::matrix_extreme);
    CHECK_FALSE(M.unknown_layout.empty());
    const auto R = arveson_system(A, X, K);
    CHECK(R.cols() == 9);
    CHECK(R.rows() == 8);
    const auto E = euclidean_system(A, X, K);
    CHECK(E.cols() == 18);
    CHECK(E.rows() == 24);
    const auto M2 = matrix_extreme_system(oracle::random_tuple(2, 3, rng), oracle::random_tuple(2, 5, rng),
                                          Mat::Random(15, 3));
    CHECK(M2.rows() == 46);
    CHECK(M2.cols() == 45);
}

TEST_CASE("Arveson system agrees with the Kronecker definition") {
    std::mt19937_64 rng(32);
    const int g = 2, d = 3, n = 2, k = 2;
    const auto A = oracle::random_tuple(g, d, rng);
    const auto X = oracle::random_tuple(g, n, rng);
    const Mat K = Mat::Random(d * n, k);
    const auto R = arveson_system(A, X, K);
    for (int t = 0; t < 5; ++t) {
        const Vec b = Vec::Random(g * n);
        const ColTuple beta = unflatten_columns(b, g, n);
        Mat lam = Mat::Zero(d, d * n);
        for (int c = 0; c < g; ++c) lam += oracle::kron(A[c], Mat(beta[c].transpose()));
        const Mat want = lam * K;
        CHECK(std::abs((R.data * b).norm() - want.norm()) <= 1e-12);
    }
}

TEST_CASE("spin disk boundary point (1, 0)") {
    const auto B = spin_disk();
    const auto r = classify(B, scalar_point({1, 0}), ToleranceConfig{});
    CHECK(r.k == 1);
    CHECK(r.euclidean == Flag::yes);
    CHECK(r.matrix == Flag::yes);
    CHECK(r.arveson == Flag::yes);
    CHECK(r.irreducible == Flag::yes);
    CHECK(r.free == Flag::yes);
    CHECK(r.dil_dim == 0);
    check_report_invariants(r);
    const auto K = lmi_kernel(B, scalar_point({1, 0}), 1e-7, 1e-2);
    REQUIRE(K);
    CHECK(numerical_nullspace(arveson_system(B, scalar_point({1, 0}), K->basis).data, 1e-15, 1e-15).nullity == 0);
    CHECK(numerical_nullspace(euclidean_system(B, scalar_point({1, 0}), K->basis).data, 1e-15, 1e-15).nullity == 0);
}

TEST_CASE("points on the unit circle are free extreme") {
    for (double th = 0.1; th < 6.2; th += 0.7) {
        const auto r = classify(spin_disk(), scalar_point({std::cos(th), std::sin(th)}), ToleranceConfig{});
        CHECK(r.free == Flag::yes);
    }
}

TEST_CASE("interior points") {
    std::mt19937_64 rng(33);
    const auto A = oracle::random_tuple(2, 3, rng);
    const auto X = scale(oracle::random_tuple(2, 2, rng), 1e-3);
    const auto r = classify(A, X, ToleranceConfig{});
    CHECK(r.k == 0);
    CHECK(r.euclidean == Flag::no);
    CHECK(r.matrix == Flag::no);
    CHECK(r.arveson == Flag::no);
    CHECK(r.free == Flag::no);
    const auto S = dilation_subspace(A, X, ToleranceConfig{});
    CHECK(S.dim == 4);
    CHECK(numerical_nullspace(euclidean_system(A, X, Mat(6, 0)).data, 1e-15, 1e-15).nullity == 6);
}

TEST_CASE("points outside the spectrahedron are rejected") {
    CHECK_THROWS_AS(classify(spin_disk(), scalar_point({1.5, 0}), ToleranceConfig{}), std::invalid_argument);
}

TEST_CASE("dilation subspace of generic boundary points has dimension gn - d") {
    std::mt19937_64 rng(34);
    int agree = 0, total = 0;
    for (int t = 0; t < 40; ++t) {
        const int g = 2 + t % 2, d = 2 + t % 3, n = 1 + t % 3;
        if (g * n <= d) continue;
        const auto A = oracle::random_tuple(g, d, rng);
        const auto X = ray_to_boundary(A, oracle::random_tuple(g, n, rng));
        const auto S = dilation_subspace(A, X, ToleranceConfig{});
        ++total;
        if (S.dim == g * n - d) ++agree;
        for (int i = 0; i < S.dim; ++i) {
            for (int j = 0; j < S.dim; ++j)
                CHECK(std::abs(S.flat.col(i).dot(S.flat.col(j)) - (i == j ? 1.0 : 0.0)) <= 1e-10);
            const auto K = oracle::small_eigenspace(oracle::pencil(A, X), 1e-9);
            CHECK((arveson_system(A, X, K).data * S.flat.col(i)).norm() <= 1e-10);
        }
    }
    CHECK(agree == total);
}

TEST_CASE("spin disk level-1 boundary has trivial dilation subspace") {
    CHECK(dilation_subspace(spin_disk(), scalar_point({0.6, 0.8}), ToleranceConfig{}).dim == 0);
}

TEST_CASE("irreducibility") {
    std::mt19937_64 rng(35);
    const auto X = oracle::random_tuple(2, 2, rng), Z = oracle::random_tuple(2, 3, rng);
    CHECK_FALSE(is_irreducible(direct_sum(X, Z)));
    CHECK_FALSE(is_irreducible(SymTuple({oracle::random_symmetric(3, rng)})));
    CHECK(is_irreducible(spin_disk()));
    CHECK(commutant_dimension(spin_disk(), 1e-10, 1e-4) == 1);
    CHECK(is_irreducible(oracle::random_tuple(2, 4, rng)));
    const Mat Q = oracle::random_orthogonal(5, rng);
    CHECK_FALSE(is_irreducible(conjugate(Q, direct_sum(X, Z))));
    CHECK(commutant_dimension(direct_sum(X, Z), 1e-10, 1e-4) == 2);
}

TEST_CASE("the g=3 certified point is matrix extreme but not Arveson") {
    auto cert = builtin_certificate_g3();
    cert.alpha.refine_to(mpq_class(1, 1) / mpq_class(mpz_class(1) << 90));
    const auto Y = cert.Y.evaluate(cert.alpha.to_double());
    const auto r = classify(cert.A.to_double(), Y, ToleranceConfig{});
    CHECK(r.k == 2);
    CHECK(r.matrix == Flag::yes);
    CHECK(r.arveson == Flag::no);
    CHECK(r.free == Flag::no);
    CHECK(r.counts.arv == 3);
    CHECK(r.mat_evidence.sigma_min == doctest::Approx(0.0318244).epsilon(1e-4 / 0.0318244));
    CHECK(r.mat_evidence.sigma_max < 5);
    check_report_invariants(r);
    CHECK(oracle::kriel_matrix_extreme(cert.A.to_double(), Y));
}

TEST_CASE("report invariants and unitary invariance on random boundary points") {
    std::mt19937_64 rng(36);
    for (int t = 0; t < 30; ++t) {
        const int g = 2 + t % 2, d = 2 + t % 3, n = 1 + t % 3;
        const auto A = oracle::random_tuple(g, d, rng);
        const auto X = ray_to_boundary(A, oracle::random_tuple(g, n, rng));
        const auto r = classify(A, X, ToleranceConfig{});
        check_report_invariants(r);
        const Mat U = oracle::random_orthogonal(n, rng);
        const auto ru = classify(A, conjugate(U, X), ToleranceConfig{});
        CHECK(ru.k == r.k);
        CHECK(ru.euclidean == r.euclidean);
        CHECK(ru.matrix == r.matrix);
        CHECK(ru.arveson == r.arveson);
        CHECK(ru.irreducible == r.irreducible);
        if (r.matrix != Flag::indeterminate) CHECK((r.matrix == Flag::yes) == oracle::kriel_matrix_extreme(A, X));
    }
}

TEST_CASE("report JSON") {
    const auto r = classify(spin_disk(), scalar_point({1, 0}), ToleranceConfig{});
    const auto j = report_to_json(r);
    CHECK(j["matrix"] == "yes");
    CHECK(j["k"] == 1);
    CHECK(j.contains("counts"));
}
