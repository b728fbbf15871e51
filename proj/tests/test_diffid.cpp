#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "ginpol/diffid.hpp"
#include "test_util.hpp"

using namespace ginpol;
using testutil::rel_err;
using C = std::complex<double>;

namespace {

ModelParams<DoubleCfg> params(int N, double x, C gamma) {
    ModelParams<DoubleCfg> p;
    p.N = N;
    p.x = x;
    p.gamma = gamma;
    return p;
}

}  // namespace

TEST_CASE("differencing step outside its window is rejected") {
    auto p = params(4, 0.5, C(1, 0));
    CHECK_THROWS_AS(lhs_partial_gamma_logD<DoubleCfg>(p, 1e-1), DomainError);
    CHECK_THROWS_AS(lhs_partial_gamma_logD<DoubleCfg>(p, 1e-9), DomainError);
    CHECK_NOTHROW(lhs_partial_gamma_logD<DoubleCfg>(p, 1e-3));
}

TEST_CASE("determinant derivative is second-order accurate in the step") {
    auto p = params(5, 0.5, C(1, 0));
    C d1 = lhs_partial_gamma_logD<DoubleCfg>(p, 2e-3);
    C d2 = lhs_partial_gamma_logD<DoubleCfg>(p, 1e-3);
    C d3 = lhs_partial_gamma_logD<DoubleCfg>(p, 5e-4);
    double slope = std::log2(std::abs(d1 - d2) / std::abs(d2 - d3));
    CHECK(slope >= 1.8);
    CHECK(slope <= 2.3);
}

TEST_CASE("small-x derivative collapses to the weight-sum term") {
    auto p = params(2, 1e-3, C(1, 0));
    C lhs = lhs_partial_gamma_logD<DoubleCfg>(p);
    C t7 = gamma_weight_sum<DoubleCfg>(p);
    CHECK(std::abs(lhs - t7) < 1e-3 * std::max(1.0, std::abs(t7)));
}

TEST_CASE("weight-sum derivative matches differencing the log-Gamma sum") {
    auto p = params(6, 0.5, C(1.5, 0));
    C t7 = gamma_weight_sum<DoubleCfg>(p);
    double h = 1e-4;
    auto logsum = [&](C g) {
        C acc(0);
        for (int j = 0; j < p.N; ++j)
            acc += log_gamma<DoubleCfg>(g / 2.0 + C(j + 1)) -
                   g / 2.0 * std::log(double(p.N));
        return acc;
    };
    C fd = (logsum(p.gamma + h) - logsum(p.gamma - h)) / (2 * h);
    CHECK(std::abs(t7 - fd) < 1e-9 * std::max(1.0, std::abs(t7)));
}

TEST_CASE("seven-term assembly reproduces the direct derivative") {
    auto rep = rhs_differential_identity<DoubleCfg>(params(6, 0.5, C(1, 0)));
    INFO("lhs " << rep.lhs << " rhs " << rep.rhs);
    CHECK(rep.rel_residual < 1e-5);
    CHECK(rep.term_breakdown.size() == 7);

    auto repc = rhs_differential_identity<DoubleCfg>(params(6, 0.5, C(0, 0.5)));
    INFO("lhs " << repc.lhs << " rhs " << repc.rhs);
    CHECK(repc.rel_residual < 1e-5);
}

TEST_CASE("assembly holds across a parameter grid") {
    for (int N : {4, 8})
        for (double x : {0.3, 0.7})
            for (C g : {C(-1, 0), C(1, 1)}) {
                auto rep = rhs_differential_identity<DoubleCfg>(params(N, x, g));
                INFO("N " << N << " x " << x << " gamma " << g << " resid "
                          << rep.rel_residual);
                CHECK(rep.rel_residual < 1e-5);
            }
}

TEST_CASE("endpoint limit routes coincide when the weight vanishes at x") {
    // gamma = 2 makes the symbol vanish linearly at w = x, so both routes
    // see a continuous transform and the excision correction is O(eps)
    auto lim = cauchy_limit_terms<DoubleCfg>(params(6, 0.5, C(2, 0)));
    CHECK(lim.route_gap < 1e-7);
}

TEST_CASE("interior approach sequence contracts geometrically") {
    auto lim = cauchy_limit_terms<DoubleCfg>(params(6, 0.5, C(1, 0)));
    const auto& d = lim.approach_diffs_p;
    REQUIRE(d.size() >= 5);
    for (size_t k = 1; k + 1 < d.size(); ++k) CHECK(d[k + 1] <= d[k] / 1.5);
    CHECK(lim.route_gap < 1e-5);
}

TEST_CASE("p-side limit approaches chi_N e^{-N x^2} as N grows") {
    double x = 0.5;
    std::vector<double> dev;
    for (int N : {8, 12, 16, 24}) {
        auto p = params(N, x, C(1, 0));
        auto spec = choose_radius<DoubleCfg>(p, N);
        auto mom = laurent_coefficients<DoubleCfg>(p, N, spec);
        auto pn = solve_biorth<DoubleCfg>(p, mom, N);
        auto lim = cauchy_limit_terms<DoubleCfg>(p, mom, pn);
        C chiN = pn.chi.value<C>();
        C ratio = lim.p_limit / (chiN * std::exp(-N * x * x));
        dev.push_back(std::abs(ratio - 1.0));
    }
    for (size_t i = 0; i + 1 < dev.size(); ++i) CHECK(dev[i + 1] < dev[i]);
    CHECK(dev.back() < 0.05);
}

TEST_CASE("chi-product derivative agrees with the determinant derivative") {
    auto p = params(5, 0.5, C(1, 0.5));
    double h = 1e-5;
    auto spec = choose_radius<DoubleCfg>(p, p.N - 1);
    auto chis = [&](double sgn) {
        ModelParams<DoubleCfg> q = p;
        q.gamma += sgn * h;
        auto mom = laurent_coefficients<DoubleCfg>(q, p.N - 1, spec);
        std::vector<LogComplexT<double>> out;
        for (int j = 0; j < p.N; ++j) out.push_back(solve_biorth<DoubleCfg>(q, mom, j).chi);
        return out;
    };
    auto up = chis(1), dn = chis(-1);
    C acc(0);
    for (int j = 0; j < p.N; ++j) {
        auto d = log_diff_unwrapped(up[size_t(j)], dn[size_t(j)]);
        acc += -2.0 * C(d.real(), d.imag()) / (2 * h);
    }
    C lhs = lhs_partial_gamma_logD<DoubleCfg>(p, h);
    CHECK(rel_err(acc, lhs) < 1e-6);
}

TEST_CASE("residual against the large-N shape shrinks with N") {
    double x = 0.5;
    auto r = [&](int N) {
        auto rep = rhs_differential_identity<DoubleCfg>(params(N, x, C(1, 0)));
        return std::abs(rep.rhs - rep.rhs_asymptotic);
    };
    double r8 = r(8), r16 = r(16);
    INFO("r(8) " << r8 << " r(16) " << r16);
    CHECK(r16 < r8);
}
