#pragma once
// Complex log-gamma, digamma, reciprocal gamma, log Barnes G, and the
// regularized upper incomplete gamma ratio. Everything is templated on the
// precision config; the incomplete-gamma series branches accumulate in
// 113-bit arithmetic internally regardless of the working precision,
// because the scaled ratio near the imaginary axis at |zeta| ~ 30 loses
// ~13 digits to cancellation otherwise.

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "errors.hpp"
#include "precision.hpp"

namespace ginpol {

namespace detail {

// B_{2n}, n = 1..30
inline constexpr const char* bernoulli_2n_str[30] = {
    "0.16666666666666666666666666666666666666666666666667",
    "-0.033333333333333333333333333333333333333333333333333",
    "0.023809523809523809523809523809523809523809523809524",
    "-0.033333333333333333333333333333333333333333333333333",
    "0.075757575757575757575757575757575757575757575757576",
    "-0.25311355311355311355311355311355311355311355311355",
    "1.1666666666666666666666666666666666666666666666667",
    "-7.0921568627450980392156862745098039215686274509804",
    "54.971177944862155388471177944862155388471177944862",
    "-529.12424242424242424242424242424242424242424242424",
    "6192.1231884057971014492753623188405797101449275362",
    "-86580.253113553113553113553113553113553113553113553",
    "1425517.1666666666666666666666666666666666666666667",
    "-27298231.067816091954022988505747126436781609195402",
    "601580873.90064236838430386817483591677140064236838",
    "-15116315767.092156862745098039215686274509803921569",
    "429614643061.16666666666666666666666666666666666667",
    "-13711655205088.332772159087948561632772159087948562",
    "488332318973593.16666666666666666666666666666666667",
    "-19296579341940068.148632668144863266814486326681449",
    "841693047573682615.00055370985603543743078626799557",
    "-40338071854059455413.076811594202898550724637681159",
    "2115074863808199160560.1453900709219858156028368794",
    "-120866265222965259346027.31193708252531781943546649",
    "7500866746076964366855720.0757575757575757575757576",
    "-503877810148106891413789303.05220125786163522012579",
    "36528776484818123335110430842.971177944862155388471",
    "-2849876930245088222626914643291.0678160919540229885",
    "238654274996836276446459819192192.14971751412429379",
    "-21399949257225333665810744765191097.392674151161724",
};

template <class Cfg> const std::vector<RealOf<Cfg>>& bernoulli_2n() {
    static const std::vector<RealOf<Cfg>> tab = [] {
        std::vector<RealOf<Cfg>> v;
        v.reserve(30);
        for (const char* s : bernoulli_2n_str) v.push_back(Cfg::parse(s));
        return v;
    }();
    return tab;
}

template <class Cfg> RealOf<Cfg> round_nearest(RealOf<Cfg> x) {
    using std::floor;
    return floor(x + RealOf<Cfg>(0.5));
}

template <class Cfg> bool near_nonpos_int(const ComplexOf<Cfg>& z, double tol) {
    using std::abs;
    RealOf<Cfg> re = z.real(), im = z.imag();
    if (!(abs(im) <= RealOf<Cfg>(tol))) return false;
    RealOf<Cfg> r = round_nearest<Cfg>(re);
    return r <= RealOf<Cfg>(0) && abs(re - r) <= RealOf<Cfg>(tol);
}

template <class Cfg> bool is_exact_nonpos_int(const ComplexOf<Cfg>& z) {
    RealOf<Cfg> re = z.real();
    return z.imag() == RealOf<Cfg>(0) && re <= RealOf<Cfg>(0) &&
           re == round_nearest<Cfg>(re);
}

// log(sin(pi z)) on the principal strip, stable for large |Im z|
template <class Cfg> ComplexOf<Cfg> log_sin_pi(const ComplexOf<Cfg>& z) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::exp, std::log;
    const Real pi = consts<Cfg>::pi();
    if (z.imag() < Real(0)) return conj(log_sin_pi<Cfg>(conj(z)));
    // sin(pi z) = e^{-i pi z} (1 - e^{2 i pi z}) * (i/2)
    Complex q = exp(Complex(Real(0), Real(2) * pi) * z);  // |q| <= 1 for Im z >= 0
    Complex one_minus = Complex(1) - q;
    Complex lg;
    if (abs(q) < Real(1e-4)) {
        // log(1-q) to full relative accuracy for tiny q
        lg = -q - q * q / Real(2) - q * q * q / Real(3);
    } else {
        lg = log(one_minus);
    }
    return Complex(Real(0), -pi) * z + lg + Complex(-log(Real(2)), pi / Real(2));
}

// Stirling tail sum_{n>=1} B_{2n} / ((2n)(2n-1) zs^{2n-1})
template <class Cfg> ComplexOf<Cfg> stirling_tail(const ComplexOf<Cfg>& zs, int nterms) {
    using Complex = ComplexOf<Cfg>;
    const auto& B = bernoulli_2n<Cfg>();
    Complex inv = Complex(1) / zs;
    Complex inv2 = inv * inv;
    Complex p = inv;
    Complex acc(0);
    for (int n = 1; n <= nterms; ++n) {
        acc += p * B[n - 1] / RealOf<Cfg>((2 * n) * (2 * n - 1));
        p *= inv2;
    }
    return acc;
}

template <class Cfg> constexpr int stirling_terms() { return Cfg::digits10 <= 16 ? 15 : 25; }
template <class Cfg> constexpr int stirling_shift() { return Cfg::digits10 <= 16 ? 12 : 25; }

}  // namespace detail

// principal branch of log Gamma (the analytic continuation along paths
// avoiding the poles, matching conj-symmetry); poles are domain errors
template <class Cfg> ComplexOf<Cfg> log_gamma(const ComplexOf<Cfg>& z) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::log;
    if (detail::is_exact_nonpos_int<Cfg>(z))
        throw DomainError("log_gamma at a nonpositive integer");
    if (z.real() < Real(0)) {
        // reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        return log(consts<Cfg>::pi()) - detail::log_sin_pi<Cfg>(z) -
               log_gamma<Cfg>(Complex(1) - z);
    }
    const int shift = detail::stirling_shift<Cfg>();
    Complex zs = z;
    Complex shift_sum(0);
    while (zs.real() < Real(shift)) {
        shift_sum += log(zs);
        zs += Complex(1);
    }
    Complex lg = (zs - Complex(Real(0.5))) * log(zs) - zs +
                 consts<Cfg>::log_2pi() / Real(2) +
                 detail::stirling_tail<Cfg>(zs, detail::stirling_terms<Cfg>());
    return lg - shift_sum;
}

template <class Cfg> RealOf<Cfg> log_gamma_real(const RealOf<Cfg>& x) {
    if (!(x > RealOf<Cfg>(0))) throw DomainError("log_gamma_real requires x > 0");
    return log_gamma<Cfg>(ComplexOf<Cfg>(x)).real();
}

template <class Cfg> ComplexOf<Cfg> digamma(const ComplexOf<Cfg>& z) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::log, std::exp, std::cos, std::sin, std::abs;
    if (detail::is_exact_nonpos_int<Cfg>(z))
        throw DomainError("digamma at a nonpositive integer");
    if (z.real() < Real(0)) {
        // psi(z) = psi(1-z) - pi cot(pi z)
        const Real pi = consts<Cfg>::pi();
        Complex cot;
        if (abs(z.imag()) <= Real(1)) {
            Complex s = sin(pi * z), c = cos(pi * z);
            cot = c / s;
        } else if (z.imag() > Real(0)) {
            Complex q = exp(Complex(Real(0), Real(2) * pi) * z);
            cot = Complex(Real(0), Real(1)) * (q + Complex(1)) / (q - Complex(1));
        } else {
            Complex q = exp(Complex(Real(0), Real(-2) * pi) * conj(z));
            cot = conj(Complex(Real(0), Real(1)) * (q + Complex(1)) / (q - Complex(1)));
        }
        return digamma<Cfg>(Complex(1) - z) - pi * cot;
    }
    const int shift = detail::stirling_shift<Cfg>();
    Complex zs = z;
    Complex shift_sum(0);
    while (zs.real() < Real(shift)) {
        shift_sum += Complex(1) / zs;
        zs += Complex(1);
    }
    const auto& B = detail::bernoulli_2n<Cfg>();
    Complex inv = Complex(1) / zs;
    Complex inv2 = inv * inv;
    Complex p = inv2;
    Complex tail(0);
    for (int n = 1; n <= detail::stirling_terms<Cfg>(); ++n) {
        tail += p * B[n - 1] / Real(2 * n);
        p *= inv2;
    }
    return log(zs) - inv / Real(2) - tail - shift_sum;
}

// entire function 1/Gamma; exactly zero at the poles of Gamma
template <class Cfg> ComplexOf<Cfg> reciprocal_gamma(const ComplexOf<Cfg>& z) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::exp, std::sin;
    if (detail::is_exact_nonpos_int<Cfg>(z)) return Complex(0);
    if (detail::near_nonpos_int<Cfg>(z, 0.25)) {
        // 1/Gamma(z) = sin(pi z)/pi * Gamma(1-z); 1-z is far from the poles
        const Real pi = consts<Cfg>::pi();
        return sin(pi * z) / pi * exp(log_gamma<Cfg>(Complex(1) - z));
    }
    return exp(-log_gamma<Cfg>(z));
}

// log of the Barnes G-function, principal branch, Re z > 0
template <class Cfg> ComplexOf<Cfg> log_barnes_g(const ComplexOf<Cfg>& z) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::log;
    if (!(z.real() > Real(0))) throw DomainError("log_barnes_g requires Re z > 0");
    const int shift = Cfg::digits10 <= 16 ? 19 : 37;
    int m = 0;
    while (z.real() + Real(m) < Real(shift)) ++m;
    // G(z+1) = Gamma(z) G(z) telescoped m times
    Complex corr(0);
    for (int l = 0; l < m; ++l) corr += log_gamma<Cfg>(z + Complex(Real(l)));
    Complex u = z + Complex(Real(m)) - Complex(1);
    // asymptotic series for log G(1+u)
    const auto& B = detail::bernoulli_2n<Cfg>();
    Complex inv2 = Complex(1) / (u * u);
    Complex p = inv2;
    Complex tail(0);
    for (int n = 1; n <= detail::stirling_terms<Cfg>(); ++n) {
        // B_{2n+2} / (2n (2n+2) u^{2n})
        tail += p * B[n] / Real(2 * n * (2 * n + 2));
        p *= inv2;
    }
    // constant term is zeta'(-1) = 1/12 - log A
    Complex lg = u * u / Real(2) * log(u) - Real(3) * u * u / Real(4) +
                 u / Real(2) * consts<Cfg>::log_2pi() - log(u) / Real(12) +
                 (Real(1) / Real(12) - consts<Cfg>::log_glaisher()) + tail;
    return lg - corr;
}

// ---------------------------------------------------------------------------
// regularized upper incomplete gamma: ratio = Gamma(nu, zeta)/Gamma(nu) and
// scaled = e^{zeta} * ratio. zeta on the cut (-inf, 0] is a domain error.

template <class Cfg> struct UpperRatio {
    ComplexOf<Cfg> ratio;
    ComplexOf<Cfg> scaled;
};

namespace detail {

inline std::complex<double> narrow_complex(const WideComplex& z, DoubleCfg) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}
inline WideComplex narrow_complex(const WideComplex& z, ExtendedCfg) { return z; }

// series regime, |zeta| <= 30: everything accumulates in 113-bit arithmetic
template <class Cfg>
UpperRatio<Cfg> upper_ratio_series(const ComplexOf<Cfg>& nu, const ComplexOf<Cfg>& zeta) {
    using std::exp, std::log, std::abs;
    const WideComplex nw(WideReal(nu.real()), WideReal(nu.imag()));
    const WideComplex zw(WideReal(zeta.real()), WideReal(zeta.imag()));
    const WideReal tol("1e-33");
    const int cap = 700;

    WideComplex gstar;  // gamma^*(nu, zeta) = zeta^{-nu} P(nu, zeta) / Gamma(nu)-normalized
    bool alt_ok = zeta.real() < RealOf<Cfg>(0) && !near_nonpos_int<Cfg>(nu, 1e-6);
    if (!alt_ok) {
        // e^{-zeta} sum_j zeta^j / Gamma(nu+j+1)
        WideComplex a = reciprocal_gamma<ExtendedCfg>(nw + WideComplex(1));
        WideComplex s = a;
        int quiet = 0;
        int j = 1;
        for (; j <= cap; ++j) {
            a *= zw / (nw + WideComplex(WideReal(j)));
            s += a;
            if (abs(a) <= tol * abs(s) && WideReal(j) > abs(zw)) {
                if (++quiet >= 2) break;
            } else {
                quiet = 0;
            }
        }
        if (j > cap)
            throw AccuracyError("incomplete gamma series did not converge",
                                static_cast<double>(abs(a) / abs(s)));
        gstar = exp(-zw) * s;
    } else {
        // 1/Gamma(nu) sum_j (-zeta)^j / (j! (nu+j)), alternating-sign form
        WideComplex b(1);
        WideComplex s = b / nw;
        int quiet = 0;
        int j = 1;
        for (; j <= cap; ++j) {
            b *= -zw / WideReal(j);
            WideComplex t = b / (nw + WideComplex(WideReal(j)));
            s += t;
            if (abs(t) <= tol * abs(s) && WideReal(j) > abs(zw)) {
                if (++quiet >= 2) break;
            } else {
                quiet = 0;
            }
        }
        if (j > cap)
            throw AccuracyError("incomplete gamma alternating series did not converge",
                                static_cast<double>(abs(b) / abs(s)));
        gstar = reciprocal_gamma<ExtendedCfg>(nw) * s;
    }
    WideComplex ratio_w = WideComplex(1) - exp(nw * log(zw)) * gstar;
    WideComplex scaled_w = exp(zw) * ratio_w;
    return {narrow_complex(ratio_w, Cfg{}), narrow_complex(scaled_w, Cfg{})};
}

// asymptotic regime, |zeta| > 30: scaled = zeta^{nu-1} sum_k zeta^{-k}/Gamma(nu-k),
// truncated at the smallest term; native precision suffices (no cancellation)
template <class Cfg>
UpperRatio<Cfg> upper_ratio_asymptotic(const ComplexOf<Cfg>& nu, const ComplexOf<Cfg>& zeta) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    using std::exp, std::log, std::abs;
    Complex t = reciprocal_gamma<Cfg>(nu);
    Complex sum = t;
    Real prev = abs(t);
    // 1/Gamma(nu-k) = (nu-k) / Gamma(nu-k+1)
    for (int k = 1; k <= 60; ++k) {
        t *= (nu - Complex(Real(k))) / zeta;
        Real cur = abs(t);
        if (k > 2 && cur >= prev) break;  // smallest term reached
        sum += t;
        prev = cur;
        if (cur <= Real(Cfg::series_tail_tol()) * abs(sum)) break;
    }
    Complex scaled = exp((nu - Complex(1)) * log(zeta)) * sum;
    Complex ratio = exp(-zeta + (nu - Complex(1)) * log(zeta)) * sum;
    return {ratio, scaled};
}

}  // namespace detail

template <class Cfg>
UpperRatio<Cfg> upper_ratio(const ComplexOf<Cfg>& nu, const ComplexOf<Cfg>& zeta) {
    using Real = RealOf<Cfg>;
    using std::abs;
    if (zeta.imag() == Real(0) && zeta.real() <= Real(0))
        throw DomainError("upper incomplete gamma on the branch cut (-inf, 0]");
    if (abs(zeta) <= Real(30)) return detail::upper_ratio_series<Cfg>(nu, zeta);
    return detail::upper_ratio_asymptotic<Cfg>(nu, zeta);
}

template <class Cfg>
ComplexOf<Cfg> upper_incomplete_gamma(const ComplexOf<Cfg>& nu, const ComplexOf<Cfg>& zeta) {
    using std::exp;
    if (detail::is_exact_nonpos_int<Cfg>(nu))
        throw DomainError("upper_incomplete_gamma normalization at a Gamma pole");
    return exp(log_gamma<Cfg>(nu)) * upper_ratio<Cfg>(nu, zeta).ratio;
}

}  // namespace ginpol
