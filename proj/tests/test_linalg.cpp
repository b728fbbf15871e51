#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "ginpol/fit.hpp"
#include "ginpol/linalg.hpp"
#include "ginpol/logcomplex.hpp"

using namespace ginpol;
using C = std::complex<double>;

namespace {

Matrix<C> random_matrix(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix<C> A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = C(u(rng), u(rng));
    return A;
}

}  // namespace

TEST_CASE("lu solve recovers a known solution") {
    const int n = 12;
    auto A = random_matrix(n, 101);
    std::vector<C> x(n);
    for (int i = 0; i < n; ++i) x[i] = C(std::cos(0.7 * i), std::sin(1.3 * i));
    std::vector<C> b(n, C(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b[i] += A(i, j) * x[j];
    auto got = solve_linear<DoubleCfg>(A, b, "test system");
    for (int i = 0; i < n; ++i) REQUIRE(std::abs(got[i] - x[i]) < 1e-11);
}

TEST_CASE("log_det agrees with cofactor expansion on small matrices") {
    Matrix<C> A(3, 3);
    A(0, 0) = C(1, 2);  A(0, 1) = C(0, -1); A(0, 2) = C(2, 0);
    A(1, 0) = C(-1, 1); A(1, 1) = C(3, 0);  A(1, 2) = C(0, 0.5);
    A(2, 0) = C(0, 0);  A(2, 1) = C(1, -1); A(2, 2) = C(-2, 1);
    C det = A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
            A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
            A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
    auto F = lu_decompose<DoubleCfg>(A, 1e-14, "3x3");
    auto ld = F.log_det();
    C got = ld.template value<C>();
    REQUIRE(std::abs(got - det) < 1e-13 * std::abs(det));
}

TEST_CASE("log_det tracks the permutation sign and complex phase") {
    // anti-diagonal matrix: det = -(d0*d1) for n=2 swap
    Matrix<C> A(2, 2);
    A(0, 1) = C(-3, 0);
    A(1, 0) = C(0, 2);
    auto F = lu_decompose<DoubleCfg>(A, 1e-14, "antidiag");
    C got = F.log_det().template value<C>();
    C want = -(C(-3, 0) * C(0, 2));  // det of [[0,a],[b,0]] = -ab
    REQUIRE(std::abs(got - want) < 1e-14 * std::abs(want));
}

TEST_CASE("singular systems raise a typed error with the pivot index") {
    Matrix<C> A(3, 3);
    for (int j = 0; j < 3; ++j) {
        A(0, j) = C(j + 1, 1);
        A(1, j) = C(2 * (j + 1), 2);  // row 1 = 2 * row 0
        A(2, j) = C(-j, 3);
    }
    bool threw = false;
    try {
        lu_decompose<DoubleCfg>(A, 1e-12, "dependent rows");
    } catch (const SingularityError& e) {
        threw = true;
        REQUIRE(e.pivot_index >= 0);
        REQUIRE(e.pivot_magnitude < 1e-12);
    }
    REQUIRE(threw);
}

TEST_CASE("pivot ratio grows on an ill-conditioned matrix") {
    const int n = 9;
    Matrix<C> H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) H(i, j) = C(1.0 / (i + j + 1), 0);
    auto F = lu_decompose<DoubleCfg>(H, 1e-300, "hilbert");
    REQUIRE(F.pivot_ratio() > 1e8);

    auto W = random_matrix(n, 7);
    auto FW = lu_decompose<DoubleCfg>(W, 1e-300, "random");
    REQUIRE(FW.pivot_ratio() < 1e4);
}

TEST_CASE("Mat2 inverse and products") {
    Mat2<C> M{C(1, 1), C(0.5, -0.2), C(-0.3, 0.1), C(2, -1)};
    auto P = M * M.inverse();
    REQUIRE(std::abs(P.a11 - C(1)) < 1e-14);
    REQUIRE(std::abs(P.a22 - C(1)) < 1e-14);
    REQUIRE(std::abs(P.a12) < 1e-14);
    REQUIRE(std::abs(P.a21) < 1e-14);
}

TEST_CASE("LogComplex arithmetic and normalization") {
    C z(-2.5, 1.2), w(0.3, -4.0);
    auto lz = LogComplex::from_value(z);
    auto lw = LogComplex::from_value(w);
    REQUIRE(std::abs(lz.value<C>() - z) < 1e-14 * std::abs(z));
    REQUIRE(std::abs((lz * lw).value<C>() - z * w) < 1e-13 * std::abs(z * w));
    REQUIRE(std::abs((lz / lw).value<C>() - z / w) < 1e-13 * std::abs(z / w));

    // principal square root: sqrt(-1) = +i
    auto m1 = LogComplex::from_value(C(-1, 0));
    REQUIRE(std::abs(m1.sqrt_principal().value<C>() - C(0, 1)) < 1e-14);

    // phase wraps into (-pi, pi]
    LogComplex big(0.0, 5 * 3.14159265358979323846);
    REQUIRE(big.phase <= 3.14159265358979323846 + 1e-12);
    REQUIRE(big.phase > -3.14159265358979323846);

    // materialization window is enforced
    LogComplex huge(250.0, 0.0);
    REQUIRE_THROWS_AS(huge.value<C>(), RangeError);
}

TEST_CASE("log_diff_unwrapped crosses the phase seam") {
    LogComplex a(1.0, 3.1), b(0.5, -3.1);
    auto d = log_diff_unwrapped(a, b);
    REQUIRE(d.real() == Catch::Approx(0.5));
    REQUIRE(std::abs(d.imag() - (6.2 - 2 * 3.14159265358979323846)) < 1e-12);
}

TEST_CASE("fit_line recovers slope, intercept, and r2") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 12; ++i) {
        xs.push_back(0.5 * i);
        ys.push_back(3.0 * 0.5 * i - 2.0);
    }
    auto f = fit_line(xs, ys);
    REQUIRE(f.slope == Catch::Approx(3.0));
    REQUIRE(f.intercept == Catch::Approx(-2.0));
    REQUIRE(f.r2 == Catch::Approx(1.0));

    REQUIRE_THROWS_AS(fit_line({1.0}, {2.0}), DomainError);
    REQUIRE_THROWS_AS(fit_line({1.0, 1.0}, {2.0, 3.0}), DomainError);
}
