#pragma once
// Biorthogonal polynomial pairs attached to the contour pairing
// (g, h) -> oint g(w) h(w) f(w) dw/(2pi i w), their leading data, the 2x2
// Y matrix built from them, and evaluators for the identity checks
// (recurrence relations, Christoffel-Darboux, jump relation).

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "contour.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "logcomplex.hpp"
#include "moments.hpp"
#include "special.hpp"

namespace ginpol {

// p_j in ascending powers of w, q_j in ascending powers of w^{-1}; the
// pairing normalizations fix
//   oint p_j(w) w^{-k} f(w) dw/(2pi i w) = delta_{jk} (1/pi) N^{1+g/2+j}
//                                          / Gamma(1+g/2+j) / chi_j,
//   oint w^k q_j(w^{-1}) f(w) dw/(2pi i w) = delta_{jk} / chi_j,
// with chi_j the principal square root of D_{j-1}/D_j inverted.
template <class Cfg> struct BiorthPair {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    int degree = 0;
    std::vector<Complex> p_coeffs;  // length degree+1, coefficient of w^s
    std::vector<Complex> q_coeffs;  // length degree+1, coefficient of w^{-s}
    LogComplexT<Real> chi;          // leading coefficient of p
    LogComplexT<Real> chi_hat;      // coefficient of w^{-degree} in q
    Complex kappa{};                // coefficient of w^{degree-1} in p (0 for degree 0)

    Complex eval_p(const Complex& w) const {
        Complex acc(0);
        for (size_t s = p_coeffs.size(); s-- > 0;) acc = acc * w + p_coeffs[s];
        return acc;
    }

    Complex eval_dp(const Complex& w) const {
        Complex acc(0);
        for (size_t s = p_coeffs.size(); s-- > 1;)
            acc = acc * w + Real(static_cast<double>(s)) * p_coeffs[s];
        return acc;
    }

    // q_j as a polynomial in u = w^{-1}; q_j(0) in the paper's sense is
    // eval_q_at(0) = q_coeffs[0]
    Complex eval_q_at(const Complex& u) const {
        Complex acc(0);
        for (size_t s = q_coeffs.size(); s-- > 0;) acc = acc * u + q_coeffs[s];
        return acc;
    }

    Complex eval_q_winv(const Complex& w) const { return eval_q_at(Complex(1) / w); }

    // d/dw of q_j(w^{-1}) = sum_s q_s (-s) w^{-s-1}, exact from coefficients
    Complex eval_dq_winv(const Complex& w) const {
        Complex u = Complex(1) / w;
        Complex acc(0);
        for (size_t s = q_coeffs.size(); s-- > 1;)
            acc = acc * u + Real(static_cast<double>(s)) * q_coeffs[s];
        return -acc * u * u;
    }

    // w^{degree} q_j(w^{-1}) as a plain polynomial (reversed coefficients);
    // well-defined at w = 0 where it equals chi_hat's coefficient entry
    Complex eval_wj_q(const Complex& w) const {
        Complex acc(0);
        for (size_t s = 0; s < q_coeffs.size(); ++s) acc = acc * w + q_coeffs[s];
        return acc;
    }
};

namespace detail {

// Solve sum_s c_{k-s} a_s = scalar e_j (k = 0..j) through the balanced
// similarity B = diag(rho^k) T diag(rho^-k); transpose=true solves the
// system with entries c_{s-k} instead (the q pairing). The single nonzero
// right-hand side lets the scalar, the balancing powers, and the max-entry
// normalization be folded into one log-space factor per coefficient.
template <class Cfg>
std::vector<ComplexOf<Cfg>> toeplitz_unit_solve(const ContourMoments<Cfg>& mom, int j,
                                                const LogComplexT<RealOf<Cfg>>& scalar,
                                                bool transpose, const char* what) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs, std::pow, std::log;
    const int dim = j + 1;
    const Real rho = mom.radius;
    Matrix<Complex> B(dim, dim);
    Real s0(0);
    for (int k = 0; k < dim; ++k)
        for (int s = 0; s < dim; ++s) {
            int m = transpose ? s - k : k - s;
            B(k, s) = mom.at(m) * pow(rho, Real(m));
            s0 = std::max(s0, abs(B(k, s)));
        }
    if (!(s0 > Real(0))) throw SingularityError(what, 0, 0.0);
    for (int k = 0; k < dim; ++k)
        for (int s = 0; s < dim; ++s) B(k, s) /= s0;
    Real floor = Cfg::parse(("1e-" + std::to_string(Cfg::digits10 - 4)).c_str());
    auto lu = lu_decompose<Cfg>(B, floor, what);
    std::vector<Complex> rhs(static_cast<size_t>(dim), Complex(0));
    rhs[static_cast<size_t>(j)] = Complex(1);
    auto y = lu_solve<Cfg>(lu, rhs);
    // undo balancing: a_s = y_s * scalar * rho^{±(j-s)} / s0
    std::vector<Complex> out(static_cast<size_t>(dim));
    for (int s = 0; s < dim; ++s) {
        Real sgn = transpose ? Real(-1) : Real(1);
        auto fac = scalar * LogComplexT<Real>::from_log(
                                Complex(sgn * Real(j - s) * log(rho) - log(s0), Real(0)));
        out[static_cast<size_t>(s)] =
            y[static_cast<size_t>(s)] * fac.template value<Complex>();
    }
    return out;
}

}  // namespace detail

// chi_j as the principal square root of D_{j-1}/D_j = (Dhat_{j-1}/Dhat_j)
// * pi Gamma(1+gamma/2+j)/N^{1+gamma/2+j} inverted once
template <class Cfg>
LogComplexT<RealOf<Cfg>> chi_from_dets(const ModelParams<Cfg>& p,
                                       const LogComplexT<RealOf<Cfg>>& dhat_prev,
                                       const LogComplexT<RealOf<Cfg>>& dhat_cur, int j) {
    using Real = RealOf<Cfg>;
    auto ratio = dhat_prev / dhat_cur *
                 LogComplexT<Real>::from_log(dhat_factor_log<Cfg>(p, j));
    return ratio.sqrt_principal();
}

template <class Cfg>
BiorthPair<Cfg> solve_biorth(const ModelParams<Cfg>& p, const ContourMoments<Cfg>& mom,
                             int j) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    if (j < 0) throw DomainError("polynomial degree must be >= 0");
    if (mom.n < j) throw DomainError("moment window too small for requested degree");
    auto dprev = log_det_toeplitz<Cfg>(mom, j);      // Dhat_{j-1}
    auto dcur = log_det_toeplitz<Cfg>(mom, j + 1);   // Dhat_j
    BiorthPair<Cfg> out;
    out.degree = j;
    out.chi = chi_from_dets<Cfg>(p, dprev.logdet, dcur.logdet, j);
    out.chi_hat = out.chi * LogComplexT<Real>::from_log(-dhat_factor_log<Cfg>(p, j));
    auto pscale = LogComplexT<Real>::from_log(dhat_factor_log<Cfg>(p, j)) / out.chi;
    out.p_coeffs = detail::toeplitz_unit_solve<Cfg>(mom, j, pscale, false, "p system");
    auto qscale = out.chi.inverse();
    out.q_coeffs = detail::toeplitz_unit_solve<Cfg>(mom, j, qscale, true, "q system");
    out.kappa = j >= 1 ? out.p_coeffs[static_cast<size_t>(j) - 1] : Complex(0);
    return out;
}

template <class Cfg>
BiorthPair<Cfg> solve_biorth(const ModelParams<Cfg>& p, int j) {
    auto spec = choose_radius<Cfg>(p, std::max(j, 1));
    auto mom = laurent_coefficients<Cfg>(p, std::max(j, 1), spec);
    return solve_biorth<Cfg>(p, mom, j);
}

// pairing matrix B_{jk} = oint p_j(w) w^{-k} f(w) dw/(2pi i w) evaluated
// through an independent coefficient set; vanishes for k < j with the
// normalized diagonal on k = j
template <class Cfg>
Matrix<ComplexOf<Cfg>> biorth_pairing_matrix(const std::vector<BiorthPair<Cfg>>& pairs,
                                             const ContourMoments<Cfg>& mom, int n) {
    using Complex = ComplexOf<Cfg>;
    Matrix<Complex> B(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) {
            Complex acc(0);
            const auto& a = pairs[static_cast<size_t>(j)].p_coeffs;
            for (int s = 0; s < static_cast<int>(a.size()); ++s)
                acc += a[static_cast<size_t>(s)] * mom.at(k - s);
            B(j, k) = acc;
        }
    return B;
}

// ---------------------------------------------------------------------------
// The Y matrix: polynomial entries exact, Cauchy-transform entries by
// trapezoid quadrature on an admissible circle. Deforming the integration
// contour from the curve through x to the circle sweeps the simple pole at
// s = w when w lies between them, so the value is corrected by the residue
// (the full integrand at w) with the sign fixed by which region w is in.

template <class Cfg> struct YMatrix {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    ModelParams<Cfg> params;
    int degree = 1;
    BiorthPair<Cfg> top;     // degree j data (p_j)
    BiorthPair<Cfg> bottom;  // degree j-1 data (q_{j-1}, chi_{j-1})
    SigmaCurve<Cfg> curve;
    ContourSpec<Cfg> circle;

    Mat2<Complex> at(const Complex& w) const {
        Complex chi_j = top.chi.template value<Complex>();
        Complex chi_b = bottom.chi.template value<Complex>();
        Mat2<Complex> Y;
        Y.a11 = top.eval_p(w) / chi_j;
        // w^{j-1} q_{j-1}(w^{-1}) via the reversed coefficient array,
        // finite at w = 0
        Y.a21 = -chi_b * bottom.eval_wj_q(w);
        Y.a12 = transform(w, /*top_row=*/true) / chi_j;
        Y.a22 = -chi_b * transform(w, /*top_row=*/false);
        return Y;
    }

    // Cauchy transform of the row integrand over the descent curve,
    // evaluated off the curve: integrate over the circle and add/subtract
    // the residue when w sits between the two contours
    Complex transform(const Complex& w, bool top_row) const {
        using std::abs;
        auto spec = circle;
        Real d = abs(w - Complex(spec.center));
        if (abs(d - spec.radius) < Real(0.05)) spec.radius += Real(0.1);
        bool in_circle = d < spec.radius;
        bool in_curve = curve.contains(w);
        Complex ct = cauchy_on_circle(spec, w, top_row);
        if (in_circle && !in_curve)
            ct -= top_row ? integrand12(w) : integrand22(w);
        else if (!in_circle && in_curve)
            ct += top_row ? integrand12(w) : integrand22(w);
        return ct;
    }

    // p_j(s) s^{-j} f(s)
    Complex integrand12(const Complex& s) const {
        using std::pow;
        Complex sj(1);
        for (int t = 0; t < degree; ++t) sj *= s;
        return top.eval_p(s) / sj * eval_f<Cfg>(s, params);
    }

    // q_{j-1}(s^{-1}) f(s) / s
    Complex integrand22(const Complex& s) const {
        return bottom.eval_q_winv(s) * eval_f<Cfg>(s, params) / s;
    }

    struct CauchyPass {
        Complex val{};
        Real sum_abs{};  // sum of term magnitudes, the roundoff scale
    };

    // trapezoid doubling with a mixed stop: relative to the value, or the
    // cancellation floor of the node sum when the transform is tiny
    // compared with the integrand (far evaluation points); both thresholds
    // scale with the working precision
    Complex cauchy_on_circle(const ContourSpec<Cfg>& spec, const Complex& w,
                             bool top_row) const {
        using std::abs;
        int nodes = 256;
        const Real rel = Cfg::parse(("1e-" + std::to_string(Cfg::digits10 - 5)).c_str());
        const Real floor = Cfg::parse(("1e-" + std::to_string(Cfg::digits10 - 4)).c_str());
        CauchyPass prev = cauchy_pass(spec, w, top_row, nodes);
        while (true) {
            CauchyPass cur = cauchy_pass(spec, w, top_row, 2 * nodes);
            nodes *= 2;
            Real tol = std::max(rel * abs(cur.val), floor * cur.sum_abs);
            if (abs(cur.val - prev.val) <= tol) return cur.val;
            if (2 * nodes > 65536)
                throw AccuracyError("Cauchy transform did not converge under node doubling",
                                    static_cast<double>(abs(cur.val - prev.val) /
                                                        std::max(abs(cur.val), Real(1e-290))));
            prev = cur;
        }
    }

    CauchyPass cauchy_pass(const ContourSpec<Cfg>& spec, const Complex& w, bool top_row,
                           int nodes) const {
        using std::cos, std::sin, std::abs;
        const Real twopi = Real(2) * consts<Cfg>::pi();
        detail::KahanSum<Complex> acc;
        Real sum_abs(0);
        for (int t = 0; t < nodes; ++t) {
            Real th = twopi * Real(t) / Real(nodes);
            Complex e(cos(th), sin(th));
            Complex s = Complex(spec.center) + spec.radius * e;
            Complex g = top_row ? integrand12(s) : integrand22(s);
            Complex term = g / (s - w) * spec.radius * e / Real(nodes);
            acc.add(term);
            sum_abs += abs(term);
        }
        return {acc.s, sum_abs};
    }
};

template <class Cfg>
YMatrix<Cfg> assemble_Y(const ModelParams<Cfg>& p, const ContourMoments<Cfg>& mom,
                        int j) {
    if (j < 1) throw DomainError("Y matrix requires degree >= 1");
    YMatrix<Cfg> y;
    y.params = p;
    y.degree = j;
    y.top = solve_biorth<Cfg>(p, mom, j);
    y.bottom = solve_biorth<Cfg>(p, mom, j - 1);
    y.curve = SigmaCurve<Cfg>::make(p.x);
    y.circle = ContourSpec<Cfg>{mom.params.x / RealOf<Cfg>(2), mom.radius};
    return y;
}

template <class Cfg>
YMatrix<Cfg> assemble_Y(const ModelParams<Cfg>& p, int j) {
    auto spec = choose_radius<Cfg>(p, j);
    auto mom = laurent_coefficients<Cfg>(p, j, spec);
    return assemble_Y<Cfg>(p, mom, j);
}

struct JumpReport {
    // max entry of Y_-^{-1} Y_+ minus the jump matrix, normalized per point
    // by the largest jump entry (the w^{-j} f factor dominates near the
    // left crossing, where the offset truncation scales with it)
    double resid = 0;
    // |[Y_-^{-1} Y_+]_{21}| normalized by the size of the products that
    // have to cancel to produce the structural zero
    double corner21 = 0;
};

// jump relation Y_+ = Y_- [[1, w^{-j} f(w)], [0, 1]] probed at normal
// offsets +-eps off the curve; the + side faces the origin
template <class Cfg>
JumpReport verify_jump_Y(const YMatrix<Cfg>& y, const std::vector<RealOf<Cfg>>& taus,
                         double eps = 1e-6) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs;
    JumpReport rep;
    for (auto tau : taus) {
        Complex w = y.curve.point(tau);
        Complex t = y.curve.tangent(tau);
        t /= abs(t);
        Complex inward = Complex(Real(0), Real(1)) * t;
        Complex wp = w + Real(eps) * inward;
        Complex wm = w - Real(eps) * inward;
        auto Yp = y.at(wp);
        auto Ym = y.at(wm);
        Complex wj(1);
        for (int k = 0; k < y.degree; ++k) wj *= w;
        Mat2<Complex> J = Mat2<Complex>::identity();
        J.a12 = eval_f<Cfg>(w, y.params) / wj;
        auto M = Ym.inverse() * Yp;
        auto R = M - J;
        double jscale = static_cast<double>(std::max(abs(J.a12), Real(1)));
        rep.resid = std::max(rep.resid, static_cast<double>(R.max_abs()) / jscale);
        double pscale =
            static_cast<double>(std::max(Ym.max_abs() * Yp.max_abs(), Real(1)));
        rep.corner21 =
            std::max(rep.corner21, static_cast<double>(abs(M.a21)) / pscale);
    }
    return rep;
}

struct RecurrenceReport {
    double rec1 = 0, rec2 = 0, rec3 = 0, rec4 = 0;
    double worst() const { return std::max(std::max(rec1, rec2), std::max(rec3, rec4)); }
};

struct CdReport {
    double cd1 = 0, cd2 = 0;
};

namespace detail {

// deterministic off-cut sample points in an annulus around the cut
template <class Cfg>
std::vector<ComplexOf<Cfg>> sample_points(const ModelParams<Cfg>& p, int count,
                                          unsigned seed) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> rad(0.25, 1.8), ang(0.0, 6.283185307179586);
    std::vector<Complex> out;
    while (static_cast<int>(out.size()) < count) {
        double r = rad(rng), th = ang(rng);
        Complex w(Real(r * std::cos(th)), Real(r * std::sin(th)));
        if (dist_to_cut<Cfg>(w, p.x) < Real(0.05)) continue;
        out.push_back(w);
    }
    return out;
}

template <class Complex>
double norm_resid(const Complex& resid, double scale) {
    using std::abs;
    return static_cast<double>(abs(resid)) / std::max(scale, 1e-290);
}

}  // namespace detail

// residuals of the four ladder identities linking degrees n and n+1,
// normalized by the largest participating term
template <class Cfg>
RecurrenceReport verify_recurrences(const ModelParams<Cfg>& p, int n,
                                    int points = 20, unsigned seed = 8211u) {
    using Complex = ComplexOf<Cfg>;
    using std::abs;
    auto spec = choose_radius<Cfg>(p, n + 1);
    auto mom = laurent_coefficients<Cfg>(p, n + 1, spec);
    auto pn = solve_biorth<Cfg>(p, mom, n);
    auto pn1 = solve_biorth<Cfg>(p, mom, n + 1);
    Complex chi_n = pn.chi.template value<Complex>();
    Complex chih_n = pn.chi_hat.template value<Complex>();
    Complex chi_n1 = pn1.chi.template value<Complex>();
    Complex chih_n1 = pn1.chi_hat.template value<Complex>();
    Complex p0 = pn1.p_coeffs[0];   // p_{n+1}(0)
    Complex q0 = pn1.q_coeffs[0];   // q_{n+1}(0)
    RecurrenceReport rep;
    auto ws = detail::sample_points<Cfg>(p, points, seed);
    for (const auto& w : ws) {
        Complex wn(1);
        for (int k = 0; k < n; ++k) wn *= w;
        Complex wn1 = wn * w;
        {
            Complex t1 = chih_n * w * pn.eval_p(w);
            Complex t2 = chih_n1 * pn1.eval_p(w);
            Complex t3 = p0 * wn1 * pn1.eval_q_winv(w);
            double sc = static_cast<double>(std::max(abs(t1), std::max(abs(t2), abs(t3))));
            rep.rec1 = std::max(rep.rec1, detail::norm_resid(t1 - t2 + t3, sc));
        }
        {
            Complex t1 = chi_n * pn.eval_q_winv(w) / w;
            Complex t2 = chi_n1 * pn1.eval_q_winv(w);
            Complex t3 = q0 * pn1.eval_p(w) / wn1;
            double sc = static_cast<double>(std::max(abs(t1), std::max(abs(t2), abs(t3))));
            rep.rec2 = std::max(rep.rec2, detail::norm_resid(t1 - t2 + t3, sc));
        }
        {
            Complex t1 = chih_n1 * pn.eval_q_winv(w) / w;
            Complex t2 = chih_n * pn1.eval_q_winv(w);
            Complex t3 = q0 * chih_n / chi_n * pn.eval_p(w) / wn;
            double sc = static_cast<double>(std::max(abs(t1), std::max(abs(t2), abs(t3))));
            rep.rec3 = std::max(rep.rec3, detail::norm_resid(t1 - t2 + t3, sc));
        }
    }
    {
        Complex t1 = chi_n * chih_n;
        Complex t2 = chi_n1 * chih_n1;
        Complex t3 = p0 * q0;
        double sc = static_cast<double>(std::max(abs(t1), std::max(abs(t2), abs(t3))));
        rep.rec4 = detail::norm_resid(t1 - t2 + t3, sc);
    }
    return rep;
}

// Christoffel-Darboux in both the two-point and confluent forms
template <class Cfg>
CdReport verify_christoffel_darboux(const ModelParams<Cfg>& p, int n,
                                    int points = 20, unsigned seed = 40127u) {
    using Complex = ComplexOf<Cfg>;
    using std::abs;
    auto spec = choose_radius<Cfg>(p, n);
    auto mom = laurent_coefficients<Cfg>(p, n, spec);
    std::vector<BiorthPair<Cfg>> pairs;
    for (int j = 0; j <= n; ++j) pairs.push_back(solve_biorth<Cfg>(p, mom, j));
    const auto& top = pairs[static_cast<size_t>(n)];
    CdReport rep;
    auto ws = detail::sample_points<Cfg>(p, points, seed);
    auto us = detail::sample_points<Cfg>(p, points, seed + 1);
    for (size_t i = 0; i < ws.size(); ++i) {
        const Complex& w = ws[i];
        const Complex& u = us[i];
        Complex sum(0);
        double sc = 0;
        for (int k = 0; k < n; ++k) {
            Complex term = pairs[static_cast<size_t>(k)].eval_p(w) *
                           pairs[static_cast<size_t>(k)].eval_q_winv(u);
            sum += term;
            sc = std::max(sc, static_cast<double>(abs(term)));
        }
        Complex lhs = (Complex(1) - w / u) * sum;
        Complex ratio(1);
        for (int k = 0; k < n; ++k) ratio *= w / u;
        Complex r1 = ratio * top.eval_p(u) * top.eval_q_winv(w);
        Complex r2 = top.eval_p(w) * top.eval_q_winv(u);
        sc = std::max(sc, static_cast<double>(std::max(abs(r1), abs(r2))));
        rep.cd1 = std::max(rep.cd1, detail::norm_resid(lhs - (r1 - r2), sc));
    }
    for (const auto& w : ws) {
        Complex sum(0);
        double sc = 0;
        for (int k = 0; k < n; ++k) {
            Complex term = pairs[static_cast<size_t>(k)].eval_p(w) *
                           pairs[static_cast<size_t>(k)].eval_q_winv(w);
            sum += term;
            sc = std::max(sc, static_cast<double>(abs(term)));
        }
        Complex qn = top.eval_q_winv(w);
        Complex pnw = top.eval_p(w);
        Complex r1 = -RealOf<Cfg>(n) * pnw * qn;
        Complex r2 = w * (qn * top.eval_dp(w) - pnw * top.eval_dq_winv(w));
        sc = std::max(sc, static_cast<double>(std::max(abs(r1), abs(r2))));
        rep.cd2 = std::max(rep.cd2, detail::norm_resid(sum - (r1 + r2), sc));
    }
    return rep;
}

}  // namespace ginpol
