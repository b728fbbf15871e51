#pragma once
// The contour side of the moment computation: model parameters, the symbol
// f(w) = w^{-gamma/2} (w-x)^{gamma/2} e^{-N x w} with principal branches
// (the two cuts cancel on (-inf, 0), leaving [0, x]), Laurent coefficients
// on circles enclosing the cut, the steepest-descent curve through x, and
// the radius heuristic that balances the coefficient dynamic range.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "precision.hpp"

namespace ginpol {

template <class Cfg> struct ModelParams {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    int N = 1;
    Real x{};
    Complex gamma{};

    void validate() const {
        if (N < 1) throw DomainError("matrix dimension must be >= 1");
        if (!(x > Real(0) && x < Real(1))) throw DomainError("|z| must lie in (0, 1)");
        if (!(gamma.real() > Real(-2))) throw DomainError("Re gamma must exceed -2");
    }

    template <class CfgTo> ModelParams<CfgTo> convert() const {
        ModelParams<CfgTo> q;
        q.N = N;
        q.x = RealOf<CfgTo>(static_cast<double>(x));
        q.gamma = ComplexOf<CfgTo>(RealOf<CfgTo>(static_cast<double>(gamma.real())),
                                   RealOf<CfgTo>(static_cast<double>(gamma.imag())));
        return q;
    }
};

template <class Cfg>
RealOf<Cfg> dist_to_cut(const ComplexOf<Cfg>& w, const RealOf<Cfg>& x) {
    using Real = RealOf<Cfg>;
    using std::sqrt, std::abs;
    Real u = w.real();
    if (u < Real(0)) u = Real(0);
    if (u > x) u = x;
    Real du = w.real() - u, dv = w.imag();
    return sqrt(du * du + dv * dv);
}

// Log of the symbol; throws when w is numerically on the cut [0, x].
// The branch factor is evaluated as log((w-x)/w), not log(w-x) - log(w):
// the ratio map sends the cut complement onto the plane minus (-inf, 0],
// so a single principal log is branch-safe even when a quadrature node
// lands exactly on the negative real axis, where the difference form is
// at the mercy of signed zeros.
template <class Cfg>
ComplexOf<Cfg> log_f(const ComplexOf<Cfg>& w, const ModelParams<Cfg>& p) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::log;
    if (dist_to_cut<Cfg>(w, p.x) < Real(1e-14))
        throw DomainError("symbol evaluated on the cut [0, x]");
    return p.gamma / Real(2) * log((w - Complex(p.x)) / w) -
           Real(p.N) * p.x * w;
}

template <class Cfg>
ComplexOf<Cfg> eval_f(const ComplexOf<Cfg>& w, const ModelParams<Cfg>& p) {
    using std::exp;
    return exp(log_f<Cfg>(w, p));
}

// phase function x w + l - log w, l = log x - x^2; Re > 0 strictly inside
// the descent curve, < 0 outside it (within the unit disk region)
template <class Cfg>
ComplexOf<Cfg> phase_fn(const ComplexOf<Cfg>& w, const RealOf<Cfg>& x) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::log;
    if (w.imag() == Real(0) && w.real() <= Real(0))
        throw DomainError("phase function on the log cut (-inf, 0]");
    Real ell = log(x) - x * x;
    return x * w + Complex(ell) - log(w);
}

// ---------------------------------------------------------------------------
// steepest-descent curve through x: |w| = x e^{x(u-x)}, u in [u0, x],
// parameterized by u(tau) = u0 + (x-u0)(1+cos tau)/2 so that the square
// root vanishes linearly at the endpoints

template <class Cfg> struct SigmaCurve {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    Real x{}, u0{};

    static SigmaCurve make(const Real& x) {
        using std::log;
        SigmaCurve s;
        s.x = x;
        // root of x(u-x) + log x - log(-u) on (-1, 0)
        Real lo(-1), hi(-1e-15);
        auto r = [&](Real u) { return x * (u - x) + log(x) - log(-u); };
        if (!(r(lo) < Real(0)))
            throw DomainError("descent-curve endpoint bracket failed at u = -1");
        for (int it = 0; it < 200; ++it) {
            Real mid = (lo + hi) / Real(2);
            (r(mid) < Real(0) ? lo : hi) = mid;
        }
        s.u0 = (lo + hi) / Real(2);
        return s;
    }

    Real u_of(const Real& tau) const {
        using std::cos;
        return u0 + (x - u0) * (Real(1) + cos(tau)) / Real(2);
    }

    // v^2 as a function of u
    Real vsq(const Real& u) const {
        using std::exp;
        Real m = x * exp(x * (u - x));
        return m * m - u * u;
    }

    Complex point(const Real& tau) const {
        using std::sqrt, std::sin;
        Real u = u_of(tau);
        Real q = vsq(u);
        if (q < Real(0)) q = Real(0);  // clamp roundoff at the endpoints
        Real v = sqrt(q);
        if (sin(tau) < Real(0)) v = -v;
        return Complex(u, v);
    }

    // dw/dtau, with the analytic endpoint limits where sin(tau) ~ 0
    Complex tangent(const Real& tau) const {
        using std::sqrt, std::sin, std::cos, std::exp, std::abs;
        Real st = sin(tau);
        Real du = -(x - u0) * st / Real(2);
        Real u = u_of(tau);
        if (abs(st) < Real(1e-6)) {
            // v ~ +- slope * (tau distance); u' ~ 0
            if (cos(tau) > Real(0)) {
                // tau near 0 or 2pi: v' = +sqrt(x (1-x^2) (x-u0) / 2) on both sides
                Real slope = sqrt(x * (Real(1) - x * x) * (x - u0) / Real(2));
                return Complex(du, slope);
            }
            // tau near pi: v' = -sqrt(q'(u0) (x-u0)) / 2
            Real qp = Real(2) * u0 * (x * u0 - Real(1));
            Real slope = -sqrt(qp * (x - u0)) / Real(2);
            return Complex(du, slope);
        }
        Real m = x * exp(x * (u - x));
        Real qp = Real(2) * (m * m * x - u);  // d/du of m^2 - u^2
        Real q = vsq(u);
        Real v = sqrt(q);
        Real dv = qp * du / (Real(2) * v);
        if (st < Real(0)) dv = -dv;
        return Complex(du, dv);
    }

    // strict interior test; valid for |w| <= 1.5 (the level set acquires an
    // outer branch far outside the unit disk)
    bool contains(const Complex& w) const {
        using std::abs;
        if (abs(w) > Real(1.5)) return false;
        if (w.imag() == Real(0)) return w.real() > u0 && w.real() < x;
        return phase_fn<Cfg>(w, x).real() > Real(0);
    }
};

// ---------------------------------------------------------------------------
// Laurent coefficients of the symbol on |w - center| = radius

template <class Cfg> struct ContourMoments {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    ModelParams<Cfg> params;
    Real center{}, radius{};
    int n = 0;          // coefficients for m in [-n, n]
    int nodes_used = 0;
    std::vector<Complex> coef;  // index m + n

    const Complex& at(int m) const {
        if (m < -n || m > n) throw DomainError("Laurent index out of the computed range");
        return coef[static_cast<size_t>(m + n)];
    }
};

template <class Cfg> struct ContourSpec {
    RealOf<Cfg> center{}, radius{};

    void require_admissible(const ModelParams<Cfg>& p) const {
        using Real = RealOf<Cfg>;
        using std::abs;
        Real clear = radius - std::max(abs(center), abs(p.x - center));
        if (!(clear > Real(1e-3)))
            throw DomainError("integration circle does not strictly enclose the cut");
    }
};

namespace detail {

// compensated accumulator: keeps the summation error at a few ulps of the
// largest term regardless of the node count, which matters for the
// node-doubling convergence test at 1e-12
template <class Complex> struct KahanSum {
    Complex s{}, c{};
    void add(const Complex& v) {
        Complex y = v - c;
        Complex t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

template <class Cfg>
std::vector<ComplexOf<Cfg>> laurent_pass(const ModelParams<Cfg>& p, int n,
                                         const ContourSpec<Cfg>& spec, int nodes) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::cos, std::sin;
    const Real twopi = Real(2) * consts<Cfg>::pi();
    std::vector<KahanSum<Complex>> acc(2 * n + 1);
    for (int j = 0; j < nodes; ++j) {
        Real th = twopi * Real(j) / Real(nodes);
        Complex e(cos(th), sin(th));
        Complex w = Complex(spec.center) + spec.radius * e;
        Complex base = eval_f<Cfg>(w, p) * spec.radius * e / Real(nodes);
        Complex winv = Complex(1) / w;
        // powers w^{-m-1} starting at m = -n; pw = w^{n-1}, valid also at n = 0
        Complex pw = winv;
        for (int t = 0; t < n; ++t) pw *= w;
        for (int m = -n; m <= n; ++m) {
            acc[static_cast<size_t>(m + n)].add(base * pw);
            pw *= winv;
        }
    }
    std::vector<Complex> out(2 * n + 1);
    for (size_t i = 0; i < out.size(); ++i) out[i] = acc[i].s;
    return out;
}

}  // namespace detail

template <class Cfg>
ContourMoments<Cfg> laurent_coefficients(const ModelParams<Cfg>& p, int n,
                                         const ContourSpec<Cfg>& spec,
                                         double rel_tol = 1e-12, int max_nodes = 65536) {
    using Real = RealOf<Cfg>;
    using std::abs, std::pow;
    p.validate();
    spec.require_admissible(p);
    if (n < 0) throw DomainError("Laurent order must be >= 0");

    int nodes = 256;
    auto cur = detail::laurent_pass<Cfg>(p, n, spec, nodes);
    double drift = 0;
    while (true) {
        auto nxt = detail::laurent_pass<Cfg>(p, n, spec, 2 * nodes);
        // compare in the balanced normalization rho^m c_m
        Real scale(0), diff(0);
        for (int m = -n; m <= n; ++m) {
            Real b = pow(spec.radius, Real(m));
            Real vn = abs(nxt[static_cast<size_t>(m + n)]) * b;
            Real vd = abs(nxt[static_cast<size_t>(m + n)] - cur[static_cast<size_t>(m + n)]) * b;
            scale = std::max(scale, vn);
            diff = std::max(diff, vd);
        }
        drift = static_cast<double>(diff / scale);
        cur = std::move(nxt);
        nodes *= 2;
        if (drift <= rel_tol) break;
        if (2 * nodes > max_nodes)
            throw AccuracyError("Laurent coefficients did not converge under node doubling",
                                drift);
    }
    ContourMoments<Cfg> out;
    out.params = p;
    out.center = spec.center;
    out.radius = spec.radius;
    out.n = n;
    out.nodes_used = nodes;
    out.coef = std::move(cur);
    return out;
}

// Scan candidate radii and pick the one minimizing the dynamic range of the
// balanced coefficients; falls back to x/2 + 0.25 when degenerate.
//
// The integrand behind the balanced coefficient rho^m c_m sweeps a factor
// (rho/|w|)^m around the circle, so on a circle hugging the cut the outer
// coefficients are differences of terms ~(rho/(rho-x/2))^n times larger than
// the result. That cancellation floor, eps * max|f| * amplification, is
// estimated per candidate; radii whose floor would stall the node-doubling
// test above 1e-12 are set aside, and the spread is measured only over
// coefficients that sit above the floor. When no candidate clears the floor
// (large N at working precision) the least-noisy one is returned and the
// caller's precision escalation takes over.
template <class Cfg>
ContourSpec<Cfg> choose_radius(const ModelParams<Cfg>& p, int n) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::abs, std::pow, std::log, std::cos, std::sin, std::exp;
    p.validate();
    const Real c = p.x / Real(2);
    const double log_eps = -Cfg::digits10 * std::log(10.0);
    const double log_floor_tol = std::log(3e-13);
    ContourSpec<Cfg> best{c, c + Real(0.25)};
    double best_spread = std::numeric_limits<double>::infinity();
    double best_noise = std::numeric_limits<double>::infinity();
    bool have_clean = false;
    for (int k = 0; k < 24; ++k) {
        ContourSpec<Cfg> cand{c, c + Real(0.05) * Real(k + 1)};
        const Real rho = cand.radius;
        double amp = n * std::max(static_cast<double>(log(rho / (rho - c))),
                                  static_cast<double>(log((rho + c) / rho)));
        double logfmax = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < 256; ++j) {
            Real th = Real(2) * consts<Cfg>::pi() * Real(j) / Real(256);
            Complex w = Complex(c) + rho * Complex(cos(th), sin(th));
            logfmax = std::max(logfmax,
                               static_cast<double>(log_f<Cfg>(w, p).real()));
        }
        int probe_nodes = 512;
        double waves = static_cast<double>(Real(p.N) * p.x * rho) + n;
        while (probe_nodes < 8 * waves && probe_nodes < 4096) probe_nodes *= 2;
        auto cf = detail::laurent_pass<Cfg>(p, n, cand, probe_nodes);
        Real hi(0);
        for (int m = -n; m <= n; ++m)
            hi = std::max(hi, abs(cf[static_cast<size_t>(m + n)]) * pow(rho, Real(m)));
        if (!(hi > Real(0))) continue;
        double log_noise = log_eps + logfmax + amp - static_cast<double>(log(hi));
        Real noise_floor = hi * Real(std::exp(std::min(log_noise + std::log(10.0), 0.0)));
        Real lo = hi;
        for (int m = -n; m <= n; ++m) {
            Real v = abs(cf[static_cast<size_t>(m + n)]) * pow(rho, Real(m));
            if (v > noise_floor && v > hi * Real(1e-280)) lo = std::min(lo, v);
        }
        double spread = static_cast<double>(log(hi / lo));
        if (log_noise <= log_floor_tol) {
            if (!have_clean || spread < best_spread) {
                best = cand;
                best_spread = spread;
            }
            have_clean = true;
        } else if (!have_clean && log_noise < best_noise) {
            best = cand;
            best_noise = log_noise;
            best_spread = spread;
        }
    }
    return best;
}

}  // namespace ginpol
