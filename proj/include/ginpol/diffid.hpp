#pragma once
// Differential identity in gamma for the log Toeplitz determinant at exact
// finite N: d/dgamma log D_{N-1} equals a seven-term expression built from
// the degree-N and degree-(N+1) biorthogonal data plus two regularized
// Cauchy-transform limits at the endpoint w = x of the branch interval.
// The limits are computed along two independent routes and cross-checked:
//   (a) evaluate the transform at z_k = x + d_k e^{3 i pi / 4} inside the
//       descent curve and extrapolate the geometric tail, and
//   (b) integrate over the descent curve with a disk |w - x| < eps excised,
//       add the closed-form endpoint-arc term, and extrapolate in eps.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "contour.hpp"
#include "errors.hpp"
#include "logcomplex.hpp"
#include "moments.hpp"
#include "orthopoly.hpp"
#include "special.hpp"

namespace ginpol {

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1] (positive abscissas; the rule is
// symmetric)
inline constexpr double gl16_x[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline constexpr double gl16_w[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

template <class Cfg, class F>
ComplexOf<Cfg> gl16_panel(const RealOf<Cfg>& a, const RealOf<Cfg>& b, F&& g,
                          RealOf<Cfg>& sum_abs) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs;
    Real mid = (a + b) / Real(2), half = (b - a) / Real(2);
    Complex acc(0);
    for (int i = 0; i < 8; ++i) {
        Real xs = half * Real(gl16_x[i]);
        Complex u = g(mid + xs), v = g(mid - xs);
        acc += Real(gl16_w[i]) * (u + v);
        sum_abs += Real(gl16_w[i]) * (abs(u) + abs(v)) * half;
    }
    return acc * half;
}

// parameter tau in (0, pi/2) at which the descent curve leaves the disk
// |w - x| = eps
template <class Cfg>
RealOf<Cfg> tau_at_distance(const SigmaCurve<Cfg>& curve, const RealOf<Cfg>& eps) {
    using Real = RealOf<Cfg>;
    using std::abs;
    ComplexOf<Cfg> cx(curve.x);
    Real lo(1e-12), hi = consts<Cfg>::pi() / Real(2);
    if (!(abs(curve.point(lo) - cx) < eps && abs(curve.point(hi) - cx) > eps))
        throw DomainError("excision radius cannot be bracketed on the descent curve");
    for (int it = 0; it < 90; ++it) {
        Real mid = (lo + hi) / Real(2);
        (abs(curve.point(mid) - cx) < eps ? lo : hi) = mid;
    }
    return (lo + hi) / Real(2);
}

// two sweeps of Aitken's delta-squared over a geometric-tail sequence; the
// guard returns the plain tail value once differences sit at roundoff
template <class Cfg>
ComplexOf<Cfg> iterated_aitken(std::vector<ComplexOf<Cfg>> s) {
    using Real = RealOf<Cfg>;
    using std::abs;
    for (int sweep = 0; sweep < 2 && s.size() >= 3; ++sweep) {
        std::vector<ComplexOf<Cfg>> t;
        for (size_t i = 0; i + 2 < s.size(); ++i) {
            auto d1 = s[i + 1] - s[i];
            auto d2 = s[i + 2] - s[i + 1];
            auto den = d2 - d1;
            if (abs(den) < Real(1e-13) * abs(s[i + 2])) return s.back();
            t.push_back(s[i + 2] - d2 * d2 / den);
        }
        s = std::move(t);
    }
    return s.back();
}

}  // namespace detail

template <class Cfg> struct CauchyLimits {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    // excised-curve route, the reported values
    Complex p_limit{};
    Complex q_limit{};
    // interior approach-sequence route, kept for diagnostics
    Complex p_approach{};
    Complex q_approach{};
    Real route_gap{};                 // worst relative disagreement of the routes
    std::vector<Real> approach_diffs_p;  // |L_{k+1} - L_k| along z_k -> x
};

namespace detail {

// route (b): integral over the curve with |w - x| < eps excised, plus the
// small-arc term f~(x) (eps^{g/2} / (g/2)) 2i sin(theta g/2) that restores
// the excised piece to leading order
template <class Cfg, class G>
ComplexOf<Cfg> excised_curve_integral(const SigmaCurve<Cfg>& curve,
                                      const RealOf<Cfg>& tau_eps, G&& g) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs, std::max;
    const Real pi = consts<Cfg>::pi();
    // dyadic panels graded toward the excision, mirrored onto [pi, 2pi - tau_eps]
    std::vector<Real> bs{tau_eps};
    Real t = tau_eps;
    while (Real(2) * t < pi) {
        t *= Real(2);
        bs.push_back(t);
    }
    bs.push_back(pi);
    {
        std::vector<Real> mirrored;
        for (size_t i = bs.size(); i-- > 1;) mirrored.push_back(Real(2) * pi - bs[i - 1]);
        bs.insert(bs.end(), mirrored.begin(), mirrored.end());
    }
    auto total = [&](const std::vector<Real>& b, Real& sum_abs) {
        Complex acc(0);
        for (size_t i = 0; i + 1 < b.size(); ++i)
            acc += gl16_panel<Cfg>(b[i], b[i + 1], g, sum_abs);
        return acc;
    };
    // halve every panel until the value settles; the integrand can dwarf the
    // integral when the polynomial degree is large, so the stop also carries
    // a node-magnitude floor
    Real dummy(0);
    Complex prev = total(bs, dummy);
    Real prev_diff(0);
    for (int level = 0; level < 7; ++level) {
        std::vector<Real> fine;
        fine.reserve(2 * bs.size());
        for (size_t i = 0; i + 1 < bs.size(); ++i) {
            fine.push_back(bs[i]);
            fine.push_back((bs[i] + bs[i + 1]) / Real(2));
        }
        fine.push_back(bs.back());
        bs = std::move(fine);
        Real cur_abs(0);
        Complex cur = total(bs, cur_abs);
        Real diff = abs(cur - prev);
        if (diff <= max(Real(1e-10) * abs(cur), Real(1e-12) * cur_abs)) return cur;
        // roundoff plateau: refinement stopped helping while the change is
        // already at the node-sum noise scale
        if (level > 0 && diff >= prev_diff &&
            diff <= max(Real(1e-8) * abs(cur), Real(1e-10) * cur_abs))
            return cur;
        prev = cur;
        prev_diff = diff;
    }
    throw AccuracyError("excised curve integral did not settle under refinement",
                        static_cast<double>(static_cast<double>(prev_diff)));
}

// integral of (w - x)^{a - 1} over the arc |w - x| = eps between angles
// -theta and theta, from the exact primitive
template <class Cfg>
ComplexOf<Cfg> arc_factor(const ComplexOf<Cfg>& a, const RealOf<Cfg>& eps,
                          const RealOf<Cfg>& theta) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs, std::exp, std::log, std::sin;
    if (abs(a) < Real(1e-8)) return Complex(Real(0), Real(2) * theta);
    return exp(a * log(Complex(eps))) / a * Complex(0, 2) * sin(Complex(theta) * a);
}

// value and first two derivatives at w = x of the smooth cofactor of
// (w - x)^{g/2} in the row integrand (including the 1/(2 pi i) and the
// Jacobian 1/w of the pairing measure)
template <class Cfg>
std::array<ComplexOf<Cfg>, 3> smooth_factor_jet(const ModelParams<Cfg>& p,
                                                const BiorthPair<Cfg>& pn,
                                                bool top_row) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::exp, std::log;
    const Complex cx(p.x);
    Complex nu = p.gamma / Real(2) + (top_row ? Complex(Real(p.N)) : Complex(Real(1)));
    Complex u, du, ddu;
    if (top_row) {
        u = pn.eval_p(cx);
        du = pn.eval_dp(cx);
        Complex acc(0);
        for (size_t s = pn.p_coeffs.size(); s-- > 2;)
            acc = acc * cx + Real(static_cast<double>(s * (s - 1))) * pn.p_coeffs[s];
        ddu = acc;
    } else {
        Complex uv = Complex(1) / cx;
        u = pn.eval_q_at(uv);
        du = pn.eval_dq_winv(cx);
        Complex acc(0);
        for (size_t s = pn.q_coeffs.size(); s-- > 1;)
            acc = acc * uv + Real(static_cast<double>(s * (s + 1))) * pn.q_coeffs[s];
        ddu = acc * uv * uv * uv;
    }
    Complex mu = -nu / cx - Real(p.N) * p.x;  // log-derivative of the power factor
    Complex dmu = nu / (cx * cx);
    Complex m = exp(-nu * log(cx) - Complex(Real(p.N) * p.x * p.x)) /
                (Complex(0, 2) * consts<Cfg>::pi());
    return {u * m, (du + u * mu) * m, (ddu + Real(2) * du * mu + u * (mu * mu + dmu)) * m};
}

}  // namespace detail

// The two endpoint limits entering the differential identity:
//   p-side: lim_{z->x} of the transform of p_N(w) w^{-N} f(w), and
//   q-side: lim_{z->x} of the transform of q_N(w^{-1}) f(w) / w,
// both along sequences approaching x from the interior of the descent curve.
template <class Cfg>
CauchyLimits<Cfg> cauchy_limit_terms(const ModelParams<Cfg>& p,
                                     const ContourMoments<Cfg>& mom,
                                     const BiorthPair<Cfg>& pn) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs, std::exp, std::log, std::pow, std::arg, std::min, std::max;
    const Real pi = consts<Cfg>::pi();

    YMatrix<Cfg> ym;
    ym.params = p;
    ym.degree = p.N;
    ym.top = pn;
    ym.bottom = pn;
    ym.curve = SigmaCurve<Cfg>::make(p.x);
    ym.circle = ContourSpec<Cfg>{p.x / Real(2), mom.radius};

    const Real x = p.x;
    const Complex cx(x);
    const Complex g2 = p.gamma / Real(2);
    const Complex two_pi_i(Real(0), Real(2) * pi);

    // Taylor jets of the smooth cofactors at x; the excision corrections
    // subtract the k = 0, 1, 2 arc terms, whose coefficients grow like
    // (N/x)^k and would otherwise dominate the eps ladder
    auto jet_p = detail::smooth_factor_jet<Cfg>(p, pn, true);
    auto jet_q = detail::smooth_factor_jet<Cfg>(p, pn, false);

    // route (b): eps ladder with one Richardson step at the analytic rate
    // Re g/2 + 3 left by the subtracted jet, then measured-ratio sweeps for
    // the higher orders and complex-g phases
    Real rbeta = pow(Real(4), g2.real() + Real(3));
    std::vector<Complex> ep, eq;
    Real eps(1e-2);
    for (int i = 0; i < 5; ++i, eps /= Real(4)) {
        Real tau_eps = detail::tau_at_distance<Cfg>(ym.curve, eps);
        Real theta = arg(ym.curve.point(tau_eps) - cx);
        auto quad = [&](bool top_row) {
            return detail::excised_curve_integral<Cfg>(
                ym.curve, tau_eps, [&](Real tau) {
                    Complex w = ym.curve.point(tau);
                    Complex g = top_row ? ym.integrand12(w) : ym.integrand22(w);
                    return g / (w - cx) * ym.curve.tangent(tau) / two_pi_i;
                });
        };
        Complex corr_p(0), corr_q(0);
        Real kfact(1);
        for (int k = 0; k < 3; ++k) {
            if (k > 1) kfact *= Real(k);
            Complex ak = detail::arc_factor<Cfg>(g2 + Real(k), eps, theta);
            corr_p += jet_p[static_cast<size_t>(k)] / kfact * ak;
            corr_q += jet_q[static_cast<size_t>(k)] / kfact * ak;
        }
        ep.push_back(quad(true) + corr_p);
        eq.push_back(quad(false) + corr_q);
    }
    auto richardson = [&](const std::vector<Complex>& e) {
        std::vector<Complex> r;
        for (size_t i = 0; i + 1 < e.size(); ++i)
            r.push_back(e[i + 1] + (e[i + 1] - e[i]) / (rbeta - Real(1)));
        return detail::iterated_aitken<Cfg>(std::move(r));
    };
    CauchyLimits<Cfg> out;
    out.p_limit = richardson(ep);
    out.q_limit = richardson(eq);

    // route (a): interior approach sequence z_k = x + d0 2^{-k} e^{3 i pi/4}
    Real clearance = mom.radius - x / Real(2);
    Real d0 = min(Real(0.1), clearance) / Real(2);
    Complex dir = exp(Complex(Real(0), Real(3) * pi / Real(4)));
    std::vector<Complex> lp, lq;
    for (int k = 3; k <= 10; ++k) {
        Complex z = cx + d0 * pow(Real(2), Real(-k)) * dir;
        lp.push_back(ym.transform(z, true));
        lq.push_back(ym.transform(z, false));
    }
    for (size_t k = 0; k + 1 < lp.size(); ++k)
        out.approach_diffs_p.push_back(abs(lp[k + 1] - lp[k]));
    out.p_approach = detail::iterated_aitken<Cfg>(std::move(lp));
    out.q_approach = detail::iterated_aitken<Cfg>(std::move(lq));

    Real gap_p = abs(out.p_approach - out.p_limit) / max(Real(1), abs(out.p_limit));
    Real gap_q = abs(out.q_approach - out.q_limit) / max(Real(1), abs(out.q_limit));
    out.route_gap = max(gap_p, gap_q);
    if (out.route_gap > Real(1e-4)) {
        std::ostringstream os;
        os << "endpoint-limit routes disagree: approach (" << out.p_approach << ", "
           << out.q_approach << ") vs excised (" << out.p_limit << ", " << out.q_limit
           << ")";
        throw ConsistencyError(os.str(), static_cast<double>(out.route_gap));
    }
    return out;
}

template <class Cfg>
CauchyLimits<Cfg> cauchy_limit_terms(const ModelParams<Cfg>& p) {
    auto spec = choose_radius<Cfg>(p, p.N);
    auto mom = laurent_coefficients<Cfg>(p, p.N, spec);
    auto pn = solve_biorth<Cfg>(p, mom, p.N);
    return cauchy_limit_terms<Cfg>(p, mom, pn);
}

// centered difference (log D(g+h) - log D(g-h)) / 2h with both evaluations
// on the same contour, so quadrature error cancels in the difference
template <class Cfg>
ComplexOf<Cfg> lhs_partial_gamma_logD(const ModelParams<Cfg>& p,
                                      RealOf<Cfg> h = RealOf<Cfg>(1e-5)) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    p.validate();
    if (!(h >= Real(1e-8) && h <= Real(1e-2)))
        throw DomainError("differencing step outside [1e-8, 1e-2]");
    auto spec = choose_radius<Cfg>(p, p.N - 1);
    auto logd = [&](Real sgn) {
        ModelParams<Cfg> q = p;
        q.gamma += Complex(sgn * h);
        auto mom = laurent_coefficients<Cfg>(q, p.N - 1, spec);
        auto det = log_det_toeplitz<Cfg>(mom, p.N);
        return log_dn_from_dhat<Cfg>(q, det.logdet, p.N - 1);
    };
    auto d = log_diff_unwrapped(logd(Real(1)), logd(Real(-1)));
    return Complex(Real(d.real()), Real(d.imag())) / (Real(2) * h);
}

template <class Cfg> struct DiffIdentityReport {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    ModelParams<Cfg> params;
    Complex lhs{};
    Complex rhs{};
    Complex rhs_asymptotic{};  // N x^2 / 2 + gamma_weight_sum, the large-N shape
    std::map<std::string, Complex> term_breakdown;
    CauchyLimits<Cfg> limits;
    Real abs_residual{};
    Real rel_residual{};
};

// d/dgamma of sum_{j<N} log[Gamma(gamma/2 + j + 1) / N^{gamma/2}] in closed
// form through the digamma function
template <class Cfg>
ComplexOf<Cfg> gamma_weight_sum(const ModelParams<Cfg>& p) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::log;
    Complex acc(0);
    for (int j = 0; j < p.N; ++j)
        acc += digamma<Cfg>(p.gamma / Real(2) + Real(j + 1)) / Real(2) -
               Complex(log(Real(p.N))) / Real(2);
    return acc;
}

template <class Cfg>
DiffIdentityReport<Cfg> rhs_differential_identity(const ModelParams<Cfg>& p,
                                                  RealOf<Cfg> h = RealOf<Cfg>(1e-5)) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs, std::exp, std::log, std::max;
    p.validate();
    if (!(h >= Real(1e-8) && h <= Real(1e-2)))
        throw DomainError("differencing step outside [1e-8, 1e-2]");

    const int N = p.N;
    const Real x = p.x;
    const Complex cx(x);
    auto spec = choose_radius<Cfg>(p, N + 1);
    auto mom = laurent_coefficients<Cfg>(p, N + 1, spec);
    auto pn = solve_biorth<Cfg>(p, mom, N);
    auto pn1 = solve_biorth<Cfg>(p, mom, N + 1);

    ModelParams<Cfg> pp = p, pm = p;
    pp.gamma += Complex(h);
    pm.gamma -= Complex(h);
    auto momp = laurent_coefficients<Cfg>(pp, N + 1, spec);
    auto momm = laurent_coefficients<Cfg>(pm, N + 1, spec);
    auto pnp = solve_biorth<Cfg>(pp, momp, N);
    auto pnm = solve_biorth<Cfg>(pm, momm, N);

    const Real two_h = Real(2) * h;
    auto cdiff = [&](const Complex& a, const Complex& b) { return (a - b) / two_h; };
    auto logderiv = [&](const LogComplexT<Real>& a, const LogComplexT<Real>& b) {
        auto d = log_diff_unwrapped(a, b);
        return Complex(Real(d.real()), Real(d.imag())) / two_h;
    };

    Complex dchi = logderiv(pnp.chi, pnm.chi);           // d/dg chi_N / chi_N
    Complex dchihat = logderiv(pnp.chi_hat, pnm.chi_hat);
    Complex xinv = Complex(1) / cx;
    Complex dq_xinv = cdiff(pnp.eval_q_at(xinv), pnm.eval_q_at(xinv));
    Complex dq0 = cdiff(pnp.q_coeffs[0], pnm.q_coeffs[0]);
    Complex dpx = cdiff(pnp.eval_p(cx), pnm.eval_p(cx));
    Complex dkappa = cdiff(pnp.kappa, pnm.kappa);

    auto lim = cauchy_limit_terms<Cfg>(p, mom, pn);

    Complex chiN = pn.chi.template value<Complex>();
    Complex chihatN = pn.chi_hat.template value<Complex>();
    Complex chiN1 = pn1.chi.template value<Complex>();
    Complex g2 = p.gamma / Real(2);
    Real xN = exp(Real(N) * log(x));

    DiffIdentityReport<Cfg> rep;
    rep.params = p;
    rep.limits = lim;
    auto& tb = rep.term_breakdown;
    tb["chihat_derivative"] = -(Real(N) + g2) * dchihat;
    tb["q_boundary_pairing"] = g2 * xN * dq_xinv * lim.p_limit;
    tb["origin_pairing"] = Real(N) * x * (pn1.p_coeffs[0] / chiN1) * (dq0 / chihatN);
    tb["chi_derivative"] = -Real(N) * dchi;
    tb["p_boundary_pairing"] = -g2 * dpx * cx * lim.q_limit;
    tb["kappa_coupling"] = Real(N) * x * (dkappa / chiN - dchi * (pn1.kappa / chiN1));
    tb["gamma_weight_sum"] = gamma_weight_sum<Cfg>(p);

    Complex rhs(0);
    for (const auto& [name, val] : tb) {
        if (!std::isfinite(static_cast<double>(val.real())) ||
            !std::isfinite(static_cast<double>(val.imag())))
            throw AssemblyError("differential-identity term not finite: " + name);
        rhs += val;
    }
    rep.rhs = rhs;
    rep.rhs_asymptotic = Complex(Real(N) * x * x / Real(2)) + tb["gamma_weight_sum"];

    // the left side reuses the matched-contour moment sets at gamma +- h
    auto logd = [&](const ModelParams<Cfg>& q, const ContourMoments<Cfg>& m) {
        auto det = log_det_toeplitz<Cfg>(m, N);
        return log_dn_from_dhat<Cfg>(q, det.logdet, N - 1);
    };
    rep.lhs = logderiv(logd(pp, momp), logd(pm, momm));
    rep.abs_residual = abs(rep.lhs - rep.rhs);
    rep.rel_residual = rep.abs_residual / max(Real(1), abs(rep.lhs));
    return rep;
}

}  // namespace ginpol
