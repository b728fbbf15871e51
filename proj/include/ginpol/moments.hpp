#pragma once
// Moment determinants and the expectation itself. The Toeplitz determinant
// is evaluated in the balanced normalization rho^{r-s} c_{r-s} (a diagonal
// similarity, so the determinant is unchanged) and rescaled by its largest
// entry before elimination; escalation to extended precision triggers on
// the pivot-ratio estimate. The planar-moment route and the 2D quadrature
// route exist as independent cross-checks of the same determinant.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "contour.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "logcomplex.hpp"
#include "precision.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace ginpol {

template <class Cfg> RealOf<Cfg> log_factorial(int n) {
    return log_gamma_real<Cfg>(RealOf<Cfg>(n + 1));
}

// log of the reference normalization pi^N prod_{k=1}^N k! / N^{N(N+1)/2}
template <class Cfg> RealOf<Cfg> log_z_constant(int N) {
    using Real = RealOf<Cfg>;
    using std::log;
    Real s = Real(N) * log(consts<Cfg>::pi());
    for (int k = 1; k <= N; ++k) s += log_factorial<Cfg>(k);
    s -= Real(N) * Real(N + 1) / Real(2) * log(Real(N));
    return s;
}

// log of (1/pi) N^{1 + gamma/2 + k} / Gamma(1 + gamma/2 + k): the factor
// relating the plain and hatted determinants at order k
template <class Cfg>
ComplexOf<Cfg> dhat_factor_log(const ModelParams<Cfg>& p, int k) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::log;
    Complex e = Complex(1) + p.gamma / Real(2) + Complex(Real(k));
    return -log(consts<Cfg>::pi()) + e * log(Real(p.N)) - log_gamma<Cfg>(e);
}

template <class Cfg> struct ToeplitzDet {
    LogComplexT<RealOf<Cfg>> logdet;
    double cond = 1.0;
};

// determinant of (c_{r-s})_{r,s=0}^{dim-1}; dim = 0 gives log det = 0
template <class Cfg>
ToeplitzDet<Cfg> log_det_toeplitz(const ContourMoments<Cfg>& mom, int dim) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::pow, std::log, std::abs;
    ToeplitzDet<Cfg> out;
    if (dim == 0) {
        out.logdet = LogComplexT<Real>::one();
        return out;
    }
    if (dim - 1 > mom.n) throw DomainError("Toeplitz dimension exceeds the Laurent range");
    Matrix<Complex> B(dim, dim);
    Real s0(0);
    for (int r = 0; r < dim; ++r)
        for (int s = 0; s < dim; ++s) {
            Complex v = mom.at(r - s) * pow(mom.radius, Real(r - s));
            B(r, s) = v;
            s0 = std::max(s0, Real(abs(v)));
        }
    if (!(s0 > Real(0))) throw SingularityError("Toeplitz matrix is identically zero", 0, 0.0);
    for (auto& v : B.a) v /= s0;
    Real floor = Cfg::parse(("1e-" + std::to_string(Cfg::digits10 - 4)).c_str());
    auto F = lu_decompose<Cfg>(std::move(B), floor, "Toeplitz determinant");
    auto ld = F.log_det();
    out.logdet = LogComplexT<Real>(ld.log_mag + Real(dim) * log(s0), ld.phase);
    out.cond = static_cast<double>(F.pivot_ratio());
    return out;
}

// hatted determinants for all sizes 1..jmax+1 from one coefficient set
template <class Cfg>
std::vector<ToeplitzDet<Cfg>> log_dhat_chain(const ContourMoments<Cfg>& mom, int jmax) {
    std::vector<ToeplitzDet<Cfg>> out;
    out.reserve(static_cast<size_t>(jmax) + 1);
    for (int j = 0; j <= jmax; ++j) out.push_back(log_det_toeplitz<Cfg>(mom, j + 1));
    return out;
}

// log D_j = log Dhat_j + sum_{k=0}^{j} log[pi Gamma(1+gamma/2+k)/N^{1+gamma/2+k}];
// the hatted determinant strips one pi Gamma/N^... factor per column
template <class Cfg>
LogComplexT<RealOf<Cfg>> log_dn_from_dhat(const ModelParams<Cfg>& p,
                                          const LogComplexT<RealOf<Cfg>>& dhat, int j) {
    using Real = RealOf<Cfg>;
    ComplexOf<Cfg> corr(0);
    for (int k = 0; k <= j; ++k) corr -= dhat_factor_log<Cfg>(p, k);
    return dhat * LogComplexT<Real>::from_log(corr);
}

// ---------------------------------------------------------------------------
// the expectation E |det(G - z)|^gamma through the contour route

template <class Cfg> struct ExpectationCore {
    LogComplexT<RealOf<Cfg>> log_value;
    double cond = 1.0;
    int nodes = 0;
    double radius = 0;
};

template <class Cfg>
ExpectationCore<Cfg> log_expectation_core(const ModelParams<Cfg>& p,
                                          const ContourSpec<Cfg>* forced_spec = nullptr) {
    using Real = RealOf<Cfg>;
    p.validate();
    ContourSpec<Cfg> spec = forced_spec ? *forced_spec : choose_radius<Cfg>(p, p.N - 1);
    auto mom = laurent_coefficients<Cfg>(p, p.N - 1, spec);
    auto det = log_det_toeplitz<Cfg>(mom, p.N);
    auto logd = log_dn_from_dhat<Cfg>(p, det.logdet, p.N - 1);
    Real pref = log_factorial<Cfg>(p.N) - log_z_constant<Cfg>(p.N);
    ExpectationCore<Cfg> out;
    out.log_value = LogComplexT<Real>(pref, Real(0)) * logd;
    out.cond = det.cond;
    out.nodes = mom.nodes_used;
    out.radius = static_cast<double>(mom.radius);
    return out;
}

enum class PrecisionMode { Auto, ForceDouble, ForceExtended };

struct ExpectationReport {
    LogComplex log_value;   // double-typed complex log of the expectation
    bool escalated = false;
    double cond = 1.0;
    int nodes = 0;
    double radius = 0;
    const char* precision = "double";
};

namespace detail {

template <class Cfg> double cond_escalation_threshold() {
    return std::pow(10.0, Cfg::digits10 - 6);
}

inline ExpectationReport narrow_core(const ExpectationCore<DoubleCfg>& c) {
    ExpectationReport r;
    r.log_value = c.log_value;
    r.cond = c.cond;
    r.nodes = c.nodes;
    r.radius = c.radius;
    return r;
}

inline ExpectationReport narrow_core(const ExpectationCore<ExtendedCfg>& c) {
    ExpectationReport r;
    r.log_value = LogComplex(static_cast<double>(c.log_value.log_mag),
                             static_cast<double>(c.log_value.phase));
    r.cond = c.cond;
    r.nodes = c.nodes;
    r.radius = c.radius;
    r.precision = "extended";
    return r;
}

}  // namespace detail

// escalating entry point used by the CLI: double first, extended when the
// pivot ratio crosses the threshold or elimination hits a dead pivot
inline ExpectationReport log_expectation(const ModelParams<DoubleCfg>& p,
                                         PrecisionMode mode = PrecisionMode::Auto,
                                         double cond_threshold = 0) {
    if (mode != PrecisionMode::ForceExtended) {
        double thr = cond_threshold > 0 ? cond_threshold
                                        : detail::cond_escalation_threshold<DoubleCfg>();
        try {
            auto c = log_expectation_core<DoubleCfg>(p);
            if (c.cond <= thr || mode == PrecisionMode::ForceDouble)
                return detail::narrow_core(c);
        } catch (const SingularityError&) {
            if (mode == PrecisionMode::ForceDouble) throw;
            // fall through to extended
        } catch (const AccuracyError&) {
            // Laurent coefficients stalled on the cancellation floor
            if (mode == PrecisionMode::ForceDouble) throw;
        }
    }
    auto pe = p.convert<ExtendedCfg>();
    ExpectationCore<ExtendedCfg> c;
    try {
        c = log_expectation_core<ExtendedCfg>(pe);
    } catch (const AccuracyError& e) {
        throw EscalationError(std::string("contour quadrature stalled at extended "
                                          "precision: ") + e.what());
    }
    if (c.cond > detail::cond_escalation_threshold<ExtendedCfg>())
        throw EscalationError("pivot ratio " + std::to_string(c.cond) +
                              " beyond extended-precision headroom");
    auto r = detail::narrow_core(c);
    r.escalated = true;
    return r;
}

// leading-order prediction for log E (complex log, exact for reporting)
template <class Cfg>
ComplexOf<Cfg> asymptotic_log_moment(const ModelParams<Cfg>& p) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::log;
    Complex g = p.gamma;
    return g * g / Real(8) * log(Real(p.N)) +
           g / Real(2) * Real(p.N) * (p.x * p.x - Real(1)) +
           g / Real(4) * consts<Cfg>::log_2pi() - log_barnes_g<Cfg>(Complex(1) + g / Real(2));
}

// ---------------------------------------------------------------------------
// planar-moment route: m_{ij} = sum_l binom(j,l) x^{j-l} pi Gamma(1+g/2+l)
// N^{-(1+g/2+l)} c_{l-i}, the matrix whose determinant reproduces D_{N-1}

namespace detail {

inline double binom(int n, int k) {
    double v = 1;
    for (int t = 1; t <= k; ++t) v = v * (n - k + t) / t;
    return v;
}

}  // namespace detail

template <class Cfg>
ComplexOf<Cfg> planar_moment_contour(const ModelParams<Cfg>& p, const ContourMoments<Cfg>& mom,
                                     int i, int j) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::exp, std::pow;
    Complex acc(0);
    for (int l = 0; l <= j; ++l) {
        if (l - i < -mom.n) continue;
        Complex fac = exp(-dhat_factor_log<Cfg>(p, l));  // pi Gamma(1+g/2+l)/N^{1+g/2+l}
        acc += Real(detail::binom(j, l)) * pow(p.x, Real(j - l)) * fac * mom.at(l - i);
    }
    return acc;
}

template <class Cfg>
Matrix<ComplexOf<Cfg>> planar_matrix_contour(const ModelParams<Cfg>& p,
                                             const ContourMoments<Cfg>& mom, int n) {
    Matrix<ComplexOf<Cfg>> M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = planar_moment_contour<Cfg>(p, mom, i, j);
    return M;
}

// direct 2D quadrature of m_{ij} = int w^i conj(w)^j |w-x|^gamma e^{-N|w|^2} dA:
// composite Gauss radial panels graded into the circle r = x from both sides,
// adaptive trapezoid in the angle (the integrand is even in theta). Double
// precision only; this is a cross-check oracle, not a production path.
inline Matrix<std::complex<double>> planar_matrix_quadrature(const ModelParams<DoubleCfg>& p,
                                                             int n, double rel_tol = 1e-9) {
    using C = std::complex<double>;
    p.validate();
    if (!(p.gamma.imag() == 0.0) || p.gamma.real() <= -1.0)
        throw DomainError("quadrature route needs real gamma > -1");
    const double g = p.gamma.real();
    const double x = p.x;
    const double R = std::sqrt(40.0 / p.N) + x;
    const int nang0 = 64, nang_cap = 1 << 17;

    // angular averages A_d(r) ~ (1/2pi) int |r e^{i th} - x|^g e^{i d th} dth
    auto angular = [&](double r, std::vector<double>& A) {
        const double pi = consts<DoubleCfg>::pi();
        int M = nang0;
        std::vector<double> prev;
        while (true) {
            A.assign(n, 0.0);
            for (int jn = 0; jn < M; ++jn) {
                double th = 2 * pi * (jn + 0.5) / M;
                double ct = std::cos(th);
                double d2 = r * r - 2 * r * x * ct + x * x;
                double k = std::pow(d2, 0.5 * g);
                // Chebyshev recurrence for cos(d th)
                double c0 = 1.0, c1 = ct;
                A[0] += k;
                if (n > 1) A[1] += k * c1;
                for (int d = 2; d < n; ++d) {
                    double c2 = 2 * ct * c1 - c0;
                    A[d] += k * c2;
                    c0 = c1;
                    c1 = c2;
                }
            }
            for (auto& v : A) v /= M;
            if (!prev.empty()) {
                double scale = std::abs(A[0]) + 1e-300, diff = 0;
                for (int d = 0; d < n; ++d) diff = std::max(diff, std::abs(A[d] - prev[d]));
                if (diff <= 1e-12 * scale || 2 * M > nang_cap) return;
            }
            prev = A;
            M *= 2;
        }
    };

    Matrix<C> out(n, n);
    std::vector<double> bp;
    const double delta = std::min(x, R - x) / 2;
    // coarse left block, graded approach, center sliver, graded exit, coarse right
    const int levels = 12;
    auto addbp = [&bp](const std::vector<double>& v) {
        for (double t : v)
            if (bp.empty() || t > bp.back() + 1e-300) bp.push_back(t);
    };
    addbp({0.0, (x - delta) / 3, 2 * (x - delta) / 3});
    addbp(graded_breakpoints(x - delta, x, x, levels));
    // replace the last breakpoint x by the sliver edges
    bp.pop_back();
    const double sliver = delta * std::pow(0.25, levels);
    addbp({x - sliver, x + sliver});
    {
        auto right = graded_breakpoints(x + sliver, x + delta, x + sliver, levels);
        addbp(right);
    }
    addbp({x + delta + (R - x - delta) / 3, x + delta + 2 * (R - x - delta) / 3, R});

    std::vector<double> A;
    for (size_t b = 0; b + 1 < bp.size(); ++b) {
        const auto& rule = gauss_legendre(16);
        double mid = 0.5 * (bp[b] + bp[b + 1]), half = 0.5 * (bp[b + 1] - bp[b]);
        for (size_t q = 0; q < rule.nodes.size(); ++q) {
            double r = mid + half * rule.nodes[q];
            double wq = half * rule.weights[q];
            if (r <= 0) continue;
            angular(r, A);
            double base = 2 * consts<DoubleCfg>::pi() * wq * r * std::exp(-p.N * r * r);
            double rp = 1.0;
            std::vector<double> rpow(2 * n - 1);
            for (int t = 0; t < 2 * n - 1; ++t) {
                rpow[t] = rp;
                rp *= r;
            }
            for (int i = 0; i < n; ++i)
                for (int jj = 0; jj < n; ++jj)
                    out(i, jj) += C(base * rpow[i + jj] * A[std::abs(i - jj)], 0.0);
        }
    }
    (void)rel_tol;
    return out;
}

template <class Cfg>
LogComplexT<RealOf<Cfg>> log_det_planar(const ModelParams<Cfg>& p, const Matrix<ComplexOf<Cfg>>& M,
                                        const char* what = "planar determinant") {
    using Real = RealOf<Cfg>;
    using std::log, std::abs;
    Real s0(0);
    for (const auto& v : M.a) s0 = std::max(s0, Real(abs(v)));
    if (!(s0 > Real(0))) throw SingularityError("planar matrix is identically zero", 0, 0.0);
    auto B = M;
    for (auto& v : B.a) v /= s0;
    Real floor = Cfg::parse(("1e-" + std::to_string(Cfg::digits10 - 4)).c_str());
    auto F = lu_decompose<Cfg>(std::move(B), floor, what);
    auto ld = F.log_det();
    return LogComplexT<Real>(ld.log_mag + Real(M.n) * log(s0), ld.phase);
}

}  // namespace ginpol
