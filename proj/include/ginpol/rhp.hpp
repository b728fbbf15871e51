#pragma once
// Steepest-descent side of the degree-(N+k) pair data: the conformal
// coordinate zeta at x, the Laurent corrector h_r extracted from a ring
// around x, global and local parametrices (the local one built on the
// scaled incomplete-gamma ratio), and the transformation chain
// Y -> T -> S -> R with probe-point residuals measuring how far R sits
// from the identity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "contour.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "logcomplex.hpp"
#include "moments.hpp"
#include "orthopoly.hpp"
#include "precision.hpp"
#include "special.hpp"

namespace ginpol {

// zeta(w) = -(N+k)(x w + l - log w): simple zero at x with
// zeta'(x) = (N+k)(1-x^2)/x, maps the descent curve into the imaginary
// axis and the segment (0, x) onto the negative reals
template <class Cfg>
ComplexOf<Cfg> zeta_coord(const ComplexOf<Cfg>& w, const ModelParams<Cfg>& p, int k) {
    using Real = RealOf<Cfg>;
    return -Real(p.N + k) * phase_fn<Cfg>(w, p.x);
}

template <class Cfg> struct ParametrixBundle {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    ModelParams<Cfg> params;
    int r = 0;  // correction order: the asymptotic tail keeps r+1 terms
    int k = 0;  // degree shift: everything runs at degree N+k
    std::vector<Complex> h_coeffs;  // h_j, coefficient of (w-x)^{-j-1}
    Real u_center{}, u_rad{};       // local disk around x
    SigmaCurve<Cfg> curve;

    Complex h_eval(const Complex& w) const {
        Complex d = Complex(1) / (w - Complex(u_center));
        Complex pw = d, acc(0);
        for (const auto& c : h_coeffs) {
            acc += c * pw;
            pw *= d;
        }
        return acc;
    }

    // h evaluated at the origin, the quantity whose N-scaling is tracked
    Complex h_at_zero() const {
        Complex d = Complex(1) / Complex(-u_center);
        Complex pw = d, acc(0);
        for (const auto& c : h_coeffs) {
            acc += c * pw;
            pw *= d;
        }
        return acc;
    }
};

namespace detail {

// e^{kxw} w^{g/2} (w-x)^{-g/2} zeta^{g/2}: analytic and nonvanishing near x.
// The last two factors are combined as exp((g/2) Log(zeta/(w-x))) -- the
// ratio stays near the positive real axis throughout the local disk, so one
// principal log is branch-safe where the separate factors both cut (0, x).
template <class Cfg>
ComplexOf<Cfg> local_prefactor(const ComplexOf<Cfg>& w, const ModelParams<Cfg>& p,
                               int k, const ComplexOf<Cfg>& zeta) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::exp, std::log;
    Complex g2 = p.gamma / Real(2);
    return exp(Real(k) * p.x * w + g2 * (log(w) + log(zeta / (w - Complex(p.x)))));
}

// truncated tail sum_{i=0}^{r} zeta^{-i-1} / Gamma(g/2 - i), reciprocals
// through the entire function so nonpositive-integer g/2 - i contribute 0
template <class Cfg>
ComplexOf<Cfg> gamma_tail_sum(const ComplexOf<Cfg>& zeta, const ComplexOf<Cfg>& g2,
                              int r) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    Complex zinv = Complex(1) / zeta;
    Complex pw = zinv, acc(0);
    for (int i = 0; i <= r; ++i) {
        acc += reciprocal_gamma<Cfg>(g2 - Complex(Real(i))) * pw;
        pw *= zinv;
    }
    return acc;
}

// the combination whose principal part at x defines h_r
template <class Cfg>
ComplexOf<Cfg> h_source(const ComplexOf<Cfg>& w, const ModelParams<Cfg>& p, int r,
                        int k) {
    using Real = RealOf<Cfg>;
    auto zeta = zeta_coord<Cfg>(w, p, k);
    return local_prefactor<Cfg>(w, p, k, zeta) *
           gamma_tail_sum<Cfg>(zeta, p.gamma / Real(2), r);
}

// coefficients of (w-x)^{-j-1} for j = jmin..jmax of a callable analytic on
// the ring: c_j = oint F(w) (w-x)^j dw / (2 pi i), trapezoid with a doubling
// check. The integrand is meromorphic well past the ring (nearest other
// singularity sits at the origin), so convergence is spectral and the first
// doubling normally confirms the answer. The stop rule mixes a relative test
// with a floor tied to the accumulated term mass, so integrands that are
// numerically zero (residuals of an exact subtraction) settle at the
// summation noise instead of chasing a relative target that noise can't meet.
template <class Cfg, class F>
std::vector<ComplexOf<Cfg>> ring_coefficients(F&& f, const RealOf<Cfg>& x,
                                              const RealOf<Cfg>& rho, int jmin, int jmax,
                                              int nodes = 512, double rel_tol = 0) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::cos, std::sin, std::abs, std::pow;
    const Real twopi = Real(2) * consts<Cfg>::pi();
    const int count = jmax - jmin + 1;
    const Real tol = rel_tol > 0
                         ? Real(rel_tol)
                         : Cfg::parse(("1e-" + std::to_string(Cfg::digits10 - 4)).c_str());
    const Real floor = Cfg::parse(("1e-" + std::to_string(Cfg::digits10 - 2)).c_str());
    struct Pass {
        std::vector<Complex> c;
        Real mass{};  // max over orders of the balanced sum of term magnitudes
    };
    auto pass = [&](int M) {
        std::vector<KahanSum<Complex>> acc(static_cast<size_t>(count));
        std::vector<Real> mag(static_cast<size_t>(count), Real(0));
        for (int t = 0; t < M; ++t) {
            Real th = twopi * (Real(t) + Real(0.5)) / Real(M);
            Complex e(cos(th), sin(th));
            Complex d = rho * e;
            Complex base = f(Complex(x) + d) * d / Real(M);
            Complex pw(1);
            for (int j = 0; j < jmin; ++j) pw *= d;
            for (int j = jmin; j < 0; ++j) pw /= d;
            for (int j = jmin; j <= jmax; ++j) {
                size_t i = static_cast<size_t>(j - jmin);
                Complex term = base * pw;
                acc[i].add(term);
                mag[i] += abs(term);
                pw *= d;
            }
        }
        Pass out;
        out.c.resize(static_cast<size_t>(count));
        for (int j = jmin; j <= jmax; ++j) {
            size_t i = static_cast<size_t>(j - jmin);
            out.c[i] = acc[i].s;
            out.mass = std::max(out.mass, mag[i] * pow(rho, Real(-j - 1)));
        }
        return out;
    };
    auto cur = pass(nodes);
    while (true) {
        auto nxt = pass(2 * nodes);
        nodes *= 2;
        Real scale(0), diff(0);
        for (int j = jmin; j <= jmax; ++j) {
            Real b = pow(rho, Real(-j - 1));
            size_t i = static_cast<size_t>(j - jmin);
            scale = std::max(scale, Real(abs(nxt.c[i])) * b);
            diff = std::max(diff, Real(abs(nxt.c[i] - cur.c[i])) * b);
        }
        Real cutoff = tol * scale + floor * nxt.mass;
        cur = std::move(nxt);
        if (!(scale > Real(0)) || diff <= cutoff) return cur.c;
        if (2 * nodes > 16384)
            throw AccuracyError("ring coefficients did not converge under node doubling",
                                static_cast<double>(diff / scale));
    }
}

}  // namespace detail

// radius keeping 0 and 1 outside the disk and the coordinate change
// injective on it, for every x in the working range
template <class Cfg> RealOf<Cfg> local_disk_radius(const RealOf<Cfg>& x) {
    return std::min(x, RealOf<Cfg>(1) - x) / RealOf<Cfg>(3);
}

template <class Cfg>
ParametrixBundle<Cfg> make_parametrix(const ModelParams<Cfg>& p, int r, int k) {
    using Real = RealOf<Cfg>;
    p.validate();
    if (r < 0) throw DomainError("correction order must be >= 0");
    ParametrixBundle<Cfg> b;
    b.params = p;
    b.r = r;
    b.k = k;
    b.u_center = p.x;
    b.u_rad = local_disk_radius<Cfg>(p.x);
    b.curve = SigmaCurve<Cfg>::make(p.x);
    auto f = [&](const typename Cfg::Complex& w) {
        return detail::h_source<Cfg>(w, p, r, k);
    };
    b.h_coeffs = detail::ring_coefficients<Cfg>(f, p.x, b.u_rad / Real(2), 0, r);
    return b;
}

// order-0 coefficient of the same combination; its negative is the value of
// h_r minus the combination at x, tracked by the bound suite alongside h(0)
template <class Cfg>
ComplexOf<Cfg> h_order_zero(const ModelParams<Cfg>& p, int r, int k) {
    using Real = RealOf<Cfg>;
    auto f = [&](const typename Cfg::Complex& w) {
        return detail::h_source<Cfg>(w, p, r, k);
    };
    Real rho = local_disk_radius<Cfg>(p.x) / Real(2);
    return detail::ring_coefficients<Cfg>(f, p.x, rho, -1, -1)[0];
}

// residual principal-part coefficients of (source - h_r), re-extracted on a
// ring of a different radius; identically zero in exact arithmetic
template <class Cfg>
std::vector<ComplexOf<Cfg>> h_subtraction_residual(const ParametrixBundle<Cfg>& b) {
    using Real = RealOf<Cfg>;
    auto f = [&](const typename Cfg::Complex& w) {
        return detail::h_source<Cfg>(w, b.params, b.r, b.k) - b.h_eval(w);
    };
    Real rho = b.u_rad * Real(0.7);
    return detail::ring_coefficients<Cfg>(f, b.params.x, rho, 0, b.r);
}

// P_hat(w) = [[1, h_r],[0,1]] P(w): diagonal powers outside the descent
// curve, constant off-diagonal rotation inside. The outside entry
// w^{g/2}(w-x)^{-g/2} is evaluated as exp((g/2) Log(w/(w-x))): the ratio
// only crosses the negative reals for w in (0, x), which lies inside the
// curve, so the exterior expression is single-valued there.
template <class Cfg>
Mat2<ComplexOf<Cfg>> global_parametrix(const ComplexOf<Cfg>& w,
                                       const ParametrixBundle<Cfg>& b) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::exp, std::log, std::abs;
    const ModelParams<Cfg>& p = b.params;
    if (!(abs(w - Complex(p.x)) > Real(0)))
        throw DomainError("parametrix evaluated at the singular point x");
    Complex h = b.h_eval(w);
    Mat2<Complex> P;
    if (b.curve.contains(w)) {
        Complex e = exp(Real(b.k) * p.x * w);
        P.a11 = -h / e;
        P.a12 = e;
        P.a21 = -Complex(1) / e;
        P.a22 = Complex(0);
    } else {
        Complex a = exp(p.gamma / Real(2) * log(w / (w - Complex(p.x))));
        P.a11 = a;
        P.a12 = h / a;
        P.a21 = Complex(0);
        P.a22 = Complex(1) / a;
    }
    return P;
}

// upper-right correction of the local parametrix:
//   Q_r = e^{kxw} w^{g/2}(w-x)^{-g/2} [ e^zeta Gamma(g/2,zeta)/Gamma(g/2)
//         - zeta^{g/2} sum_{j=0}^{r} zeta^{-j-1}/Gamma(g/2-j) ],
// the remainder of the incomplete-gamma asymptotic series after r+1 terms.
// The scaled ratio keeps e^zeta inside the special function, so nothing
// overflows on the half of the disk where Re zeta is large.
template <class Cfg>
ComplexOf<Cfg> local_correction(const ComplexOf<Cfg>& w, const ParametrixBundle<Cfg>& b) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::exp, std::log;
    const ModelParams<Cfg>& p = b.params;
    Complex g2 = p.gamma / Real(2);
    Complex zeta = zeta_coord<Cfg>(w, p, b.k);
    Complex head = exp(Real(b.k) * p.x * w + g2 * log(w / (w - Complex(p.x)))) *
                   upper_ratio<Cfg>(g2, zeta).scaled;
    return head - detail::local_prefactor<Cfg>(w, p, b.k, zeta) *
                      detail::gamma_tail_sum<Cfg>(zeta, g2, b.r);
}

template <class Cfg>
Mat2<ComplexOf<Cfg>> local_parametrix(const ComplexOf<Cfg>& w,
                                      const ParametrixBundle<Cfg>& b) {
    using Real = RealOf<Cfg>;
    using std::abs;
    if (!(abs(w - ComplexOf<Cfg>(b.u_center)) < b.u_rad * Real(1.5)))
        throw DomainError("local parametrix evaluated outside its disk");
    auto Q = local_correction<Cfg>(w, b);
    auto P = global_parametrix<Cfg>(w, b);
    P.a11 += Q * P.a21;
    P.a12 += Q * P.a22;
    return P;
}

// ---------------------------------------------------------------------------
// transformation chain. T re-normalizes Y at infinity, S opens the lens
// against the unit circle, R divides out the parametrix. All three live on
// the same region decomposition: inside/outside the descent curve, inside/
// outside the unit circle, inside/outside the local disk.

template <class Cfg> struct DescentChain {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    ParametrixBundle<Cfg> bundle;
    YMatrix<Cfg> Y;
    int n = 0;    // N + k
    Real ell{};   // log x - x^2

    static DescentChain assemble(const ModelParams<Cfg>& p, const ParametrixBundle<Cfg>& b) {
        using std::log;
        DescentChain c;
        c.bundle = b;
        c.n = p.N + b.k;
        c.ell = log(p.x) - p.x * p.x;
        auto spec = choose_radius<Cfg>(p, c.n);
        double tol = std::pow(10.0, -(Cfg::digits10 - 4));
        auto mom = laurent_coefficients<Cfg>(p, c.n, spec, tol);
        c.Y = assemble_Y<Cfg>(p, mom, c.n);
        return c;
    }

    // conjugation by e^{n g sigma3} with the two-piece g, then by the
    // constant e^{-n l/2 sigma3}; written out entrywise so each entry
    // carries exactly one exponential factor
    Mat2<Complex> T_at(const Complex& w) const {
        using std::exp, std::log;
        const ModelParams<Cfg>& p = bundle.params;
        Complex g = bundle.curve.contains(w) ? Complex(ell) + p.x * w : log(w);
        auto M = Y.at(w);
        Mat2<Complex> T;
        T.a11 = M.a11 * exp(-Real(n) * g);
        T.a12 = M.a12 * exp(Real(n) * (g - Complex(ell)));
        T.a21 = M.a21 * exp(Real(n) * (Complex(ell) - g));
        T.a22 = M.a22 * exp(Real(n) * g);
        return T;
    }

    // lens factor D(w) e^{+-n phase}, D = w^{g/2}(w-x)^{-g/2} e^{-kxw};
    // exponentially small away from the curve on both sides
    Complex lens_entry(const Complex& w, bool interior) const {
        using std::exp, std::log;
        const ModelParams<Cfg>& p = bundle.params;
        Complex phase = phase_fn<Cfg>(w, p.x);
        Complex d = p.gamma / Real(2) * log(w / (w - Complex(p.x))) -
                    Real(bundle.k) * p.x * w;
        return interior ? -exp(d - Real(n) * phase) : exp(d + Real(n) * phase);
    }

    Mat2<Complex> S_at(const Complex& w) const {
        using std::abs;
        auto S = T_at(w);
        if (abs(w) > Real(1)) return S;
        bool interior = bundle.curve.contains(w);
        Complex e = lens_entry(w, interior);
        S.a11 += S.a12 * e;
        S.a21 += S.a22 * e;
        return S;
    }

    // R = S times the adjugate of the parametrix (both parametrices are
    // unimodular, so the adjugate is the exact inverse)
    Mat2<Complex> R_at(const Complex& w) const {
        using std::abs;
        auto P = abs(w - Complex(bundle.u_center)) < bundle.u_rad
                     ? local_parametrix<Cfg>(w, bundle)
                     : global_parametrix<Cfg>(w, bundle);
        Mat2<Complex> Pinv{P.a22, -P.a12, -P.a21, P.a11};
        return S_at(w) * Pinv;
    }
};

struct ProbePoint {
    std::complex<double> w;
    double r_dev = 0;  // |R(w) - I|, max entry
    const char* region = "";
};

struct ChainReport {
    int n = 0;
    double sup_r_dev = 0;       // max |R - I| over the probe set
    double matching_sup = 0;    // sup_{|w-x|=u_rad} |Q_r|, the exact matching residual
    double circle_jump_sup = 0; // sup_{|w|=1} of the lens entry magnitude
    double region_gap = 0;      // R mismatch across the disk boundary
    double origin_drift = 0;    // last successive difference of S along w -> 0
    bool origin_decreasing = false;
    std::vector<ProbePoint> probes;
};

namespace detail {

// probe set: disk-boundary rings (angles keep clear of the cut direction
// pi and of the near-vertical curve crossings), the annulus between the
// curve and the circle, interior points straddling the cut, and both sides
// of the unit circle. Everything stays within |w| <= 1.05: the conjugation
// factors grow like |w|^n e^{-n ell} outside the circle, so distant probes
// only amplify quadrature noise in quantities that are exponentially close
// to identity anyway.
template <class Cfg>
std::vector<std::pair<ComplexOf<Cfg>, const char*>> chain_probes(
    const ParametrixBundle<Cfg>& b) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::cos, std::sin, std::sqrt;
    const Real x = b.params.x;
    std::vector<std::pair<Complex, const char*>> out;
    const double ring_angles[7] = {0.0, 0.8, -0.8, 2.2, -2.2, 2.9, -2.9};
    for (double th : ring_angles)
        for (double s : {0.93, 1.07})
            out.push_back({Complex(x) + b.u_rad * Real(s) *
                                            Complex(Real(cos(th)), Real(sin(th))),
                           s < 1 ? "ring-in" : "ring-out"});
    const double mid_angles[8] = {0.785, -0.785, 1.571, -1.571, 2.356, -2.356,
                                  2.985, -2.985};
    for (double th : mid_angles)
        out.push_back({Real(0.9) * Complex(Real(cos(th)), Real(sin(th))), "annulus"});
    for (double f : {0.2, 0.5}) {
        Real u = Real(f) * x;
        Real v = sqrt(b.curve.vsq(u)) / Real(2);
        out.push_back({Complex(u, v), "interior"});
        out.push_back({Complex(u, -v), "interior"});
    }
    const double circ_angles[5] = {0.3, 1.6, 2.9, -1.2, -2.5};
    for (double th : circ_angles)
        for (double s : {0.999, 1.001})
            out.push_back({Real(s) * Complex(Real(cos(th)), Real(sin(th))),
                           s < 1 ? "circle-in" : "circle-out"});
    for (double th : {0.7, -2.1})
        out.push_back({Real(0.75) * Complex(Real(cos(th)), Real(sin(th))), "annulus"});
    for (double th : {0.7, -2.1})
        out.push_back({Real(1.05) * Complex(Real(cos(th)), Real(sin(th))), "circle-out"});
    return out;
}

}  // namespace detail

// matching residual on the disk boundary: the local/global parametrix ratio
// is exactly [[1, Q_r],[0,1]], so its distance from the identity is |Q_r|
template <class Cfg>
double matching_residual(const ParametrixBundle<Cfg>& b, int samples = 80) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::cos, std::sin, std::abs;
    const Real twopi = Real(2) * consts<Cfg>::pi();
    double sup = 0;
    for (int j = 0; j < samples; ++j) {
        Real th = twopi * (Real(j) + Real(0.5071)) / Real(samples);
        Complex w = Complex(b.params.x) + b.u_rad * Complex(cos(th), sin(th));
        sup = std::max(sup, static_cast<double>(abs(local_correction<Cfg>(w, b))));
    }
    return sup;
}

template <class Cfg>
ChainReport transform_chain(const ModelParams<Cfg>& p, const ParametrixBundle<Cfg>& b) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::cos, std::sin, std::abs;
    auto chain = DescentChain<Cfg>::assemble(p, b);
    ChainReport rep;
    rep.n = chain.n;

    auto dev_from_identity = [](const Mat2<Complex>& M) {
        Mat2<Complex> D = M - Mat2<Complex>::identity();
        return static_cast<double>(D.max_abs());
    };

    for (const auto& [w, tag] : detail::chain_probes<Cfg>(b)) {
        ProbePoint pt;
        pt.w = to_std_complex(w);
        pt.region = tag;
        pt.r_dev = dev_from_identity(chain.R_at(w));
        rep.sup_r_dev = std::max(rep.sup_r_dev, pt.r_dev);
        rep.probes.push_back(pt);
    }

    rep.matching_sup = matching_residual<Cfg>(b);

    // disk-boundary consistency: R through the local parametrix just inside
    // against R through the global one just outside; the true jump there is
    // I + [[0, Q_r],[0,0]], so the gap should sit at the matching residual
    const double gap_angles[7] = {0.0, 0.8, -0.8, 2.2, -2.2, 2.9, -2.9};
    for (double th : gap_angles) {
        Complex e(Real(cos(th)), Real(sin(th)));
        Complex wi = Complex(p.x) + b.u_rad * Real(0.998) * e;
        Complex wo = Complex(p.x) + b.u_rad * Real(1.002) * e;
        Mat2<Complex> D = chain.R_at(wi) - chain.R_at(wo);
        rep.region_gap = std::max(rep.region_gap, static_cast<double>(D.max_abs()));
    }

    // unit-circle lens entry: sup over the circle of the jump deviation,
    // which decays like e^{-cn} since the phase has negative real part there
    {
        const Real twopi = Real(2) * consts<Cfg>::pi();
        for (int j = 0; j < 64; ++j) {
            Real th = twopi * (Real(j) + Real(0.413)) / Real(64);
            Complex w(cos(th), sin(th));
            rep.circle_jump_sup =
                std::max(rep.circle_jump_sup,
                         static_cast<double>(abs(chain.lens_entry(w, false))));
        }
    }

    // S along a ray into the origin: interior of the curve, so the lens
    // entry dies like |w|^{n}; successive differences should shrink
    {
        Complex dir(Real(cos(2.3)), Real(sin(2.3)));
        std::vector<double> diffs;
        Mat2<Complex> prev = chain.S_at(Real(0.04) * dir);
        Real rr = Real(0.04);
        for (int j = 1; j <= 6; ++j) {
            rr /= Real(2);
            Mat2<Complex> cur = chain.S_at(rr * dir);
            diffs.push_back(static_cast<double>((cur - prev).max_abs()));
            prev = cur;
        }
        rep.origin_drift = diffs.back();
        rep.origin_decreasing = true;
        for (size_t j = 1; j < diffs.size(); ++j)
            if (diffs[j] > diffs[j - 1] + 1e-12) rep.origin_decreasing = false;
    }
    return rep;
}

// relative gap of the identity linking the corner entry of the degree-m
// chain matrix at the origin to the determinant ratio one degree down:
// the left side goes through the solved coefficient vector, the right side
// through two Toeplitz determinants
template <class Cfg>
double origin_corner_gap(const ModelParams<Cfg>& p, int m) {
    using Complex = ComplexOf<Cfg>;
    using std::abs;
    if (m < 1) throw DomainError("corner identity needs degree >= 1");
    auto spec = choose_radius<Cfg>(p, m);
    auto mom = laurent_coefficients<Cfg>(p, m, spec);
    auto Y = assemble_Y<Cfg>(p, mom, m);
    Complex left = -Y.at(Complex(0)).a21;
    auto dprev = log_det_toeplitz<Cfg>(mom, m - 1);
    auto dcur = log_det_toeplitz<Cfg>(mom, m);
    Complex right = (dprev.logdet / dcur.logdet).template value<Complex>();
    return static_cast<double>(abs(left - right) / abs(right));
}

// deviation of the leading coefficient from the reciprocal square root of
// pi Gamma(1+g/2+m) / N^{1+g/2+m}; shrinks as the degree grows
template <class Cfg>
double leading_coeff_deviation(const ModelParams<Cfg>& p, int m) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs;
    auto pair = solve_biorth<Cfg>(p, m);
    auto t = pair.chi *
             LogComplexT<Real>::from_log(-dhat_factor_log<Cfg>(p, m) / Real(2));
    return static_cast<double>(abs(t.template value<Complex>() - Complex(1)));
}

// least-squares line through (u, v); r2 = 1 when the points are collinear
struct LineFit {
    double slope = 0, intercept = 0, r2 = 1;
};

inline LineFit fit_line(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size() || u.size() < 2)
        throw DomainError("line fit needs matching samples, at least two");
    const double n = static_cast<double>(u.size());
    double su = 0, sv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        su += u[i];
        sv += v[i];
    }
    double ub = su / n, vb = sv / n;
    double suu = 0, suv = 0, svv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        suu += (u[i] - ub) * (u[i] - ub);
        suv += (u[i] - ub) * (v[i] - vb);
        svv += (v[i] - vb) * (v[i] - vb);
    }
    if (!(suu > 0)) throw DomainError("line fit abscissae are degenerate");
    LineFit f;
    f.slope = suv / suu;
    f.intercept = vb - f.slope * ub;
    if (svv > 0) {
        double ssres = 0;
        for (size_t i = 0; i < u.size(); ++i) {
            double e = v[i] - (f.intercept + f.slope * u[i]);
            ssres += e * e;
        }
        f.r2 = 1.0 - ssres / svv;
    }
    return f;
}

}  // namespace ginpol
