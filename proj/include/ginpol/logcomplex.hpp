#pragma once
// Nonzero complex numbers stored as (log magnitude, phase). Determinant
// values and normalization constants routinely exceed 1e308, so products
// and ratios are formed here and only materialized when provably in range.

#include <cmath>
#include <complex>

#include "errors.hpp"
#include "precision.hpp"

namespace ginpol {

template <class Real> Real wrap_phase(Real phi) {
    using std::atan2, std::sin, std::cos;
    // atan2 of the unit vector is immune to large arguments; atan2 returns
    // in [-pi, pi], and the -pi boundary is folded onto +pi for the
    // half-open convention
    Real w = atan2(sin(phi), cos(phi));
    if (w <= -Real(3.14159265358979323846264338327950288419717L)) w = -w;
    return w;
}

template <class Real> struct LogComplexT {
    Real log_mag{};  // log |z|
    Real phase{};    // arg z, kept in (-pi, pi]

    LogComplexT() = default;
    LogComplexT(Real lm, Real ph) : log_mag(lm), phase(wrap_phase(ph)) {}

    template <class Complex> static LogComplexT from_value(const Complex& z) {
        using std::log, std::atan2;
        Real m = log(abs(z));
        Real p = atan2(Real(z.imag()), Real(z.real()));
        return LogComplexT(m, p);
    }

    // construct from a complex logarithm (real part = log|z|, imag = arg)
    template <class Complex> static LogComplexT from_log(const Complex& lg) {
        return LogComplexT(Real(lg.real()), Real(lg.imag()));
    }

    static LogComplexT one() { return LogComplexT(Real(0), Real(0)); }

    // the complex logarithm with phase normalized into (-pi, pi]
    template <class Complex> Complex log() const { return Complex(log_mag, phase); }

    // materialize; refuse when the magnitude is out of the trusted window
    template <class Complex> Complex value() const {
        using std::exp, std::cos, std::sin;
        if (log_mag > Real(200) || log_mag < Real(-200))
            throw RangeError("log-magnitude " + std::to_string(to_double_(log_mag)) +
                             " outside materialization window");
        Real m = exp(log_mag);
        return Complex(m * cos(phase), m * sin(phase));
    }

    LogComplexT operator*(const LogComplexT& o) const {
        return LogComplexT(log_mag + o.log_mag, phase + o.phase);
    }
    LogComplexT operator/(const LogComplexT& o) const {
        return LogComplexT(log_mag - o.log_mag, phase - o.phase);
    }
    LogComplexT pow_real(Real a) const { return LogComplexT(a * log_mag, a * phase); }
    // principal square root: halved phase lands in (-pi/2, pi/2]
    LogComplexT sqrt_principal() const { return LogComplexT(log_mag / Real(2), phase / Real(2)); }
    LogComplexT inverse() const { return LogComplexT(-log_mag, -phase); }
    LogComplexT negate() const {
        return LogComplexT(log_mag, phase + Real(3.14159265358979323846264338327950288419717L));
    }

  private:
    static double to_double_(double x) { return x; }
    static double to_double_(const WideReal& x) { return static_cast<double>(x); }
};

using LogComplex = LogComplexT<double>;

// difference of complex logarithms with the phase jump unwrapped to the
// nearest branch; used for numerical d/dgamma of log-quantities
template <class Real>
std::complex<double> log_diff_unwrapped(const LogComplexT<Real>& a, const LogComplexT<Real>& b) {
    double dm = static_cast<double>(a.log_mag - b.log_mag);
    double dp = static_cast<double>(a.phase - b.phase);
    const double pi = 3.14159265358979323846;
    while (dp > pi) dp -= 2 * pi;
    while (dp <= -pi) dp += 2 * pi;
    return {dm, dp};
}

}  // namespace ginpol
