#pragma once
// Precision configuration. All numeric code is templated on one of the two
// configs below; "double" is the default, "extended" is a 113-bit binary
// float used for escalation and for the large-N runs.

#include <complex>
#include <cstdlib>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace ginpol {

struct DoubleCfg {
    using Real = double;
    using Complex = std::complex<double>;
    static constexpr int digits10 = 16;
    static constexpr const char* name = "double";
    // tail tolerance for entire-series summation
    static double series_tail_tol() { return 1e-17; }
    static Real parse(const char* s) { return std::strtod(s, nullptr); }
};

struct ExtendedCfg {
    using Real = boost::multiprecision::cpp_bin_float_quad;
    using Complex = boost::multiprecision::cpp_complex_quad;
    static constexpr int digits10 = 33;
    static constexpr const char* name = "extended";
    static Real series_tail_tol() { return Real("1e-32"); }
    static Real parse(const char* s) { return Real(s); }
};

// Wide accumulator used inside cancellation-prone series regardless of the
// working precision (inputs and outputs stay at the working precision).
using WideReal = boost::multiprecision::cpp_bin_float_quad;
using WideComplex = boost::multiprecision::cpp_complex_quad;

template <class Cfg> using RealOf = typename Cfg::Real;
template <class Cfg> using ComplexOf = typename Cfg::Complex;

inline double to_double(double x) { return x; }
inline double to_double(const WideReal& x) { return static_cast<double>(x); }

inline std::complex<double> to_std_complex(const std::complex<double>& z) { return z; }
inline std::complex<double> to_std_complex(const WideComplex& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// double -> Cfg conversions (exact: double embeds in quad)
template <class Cfg> RealOf<Cfg> real_from_double(double x) { return RealOf<Cfg>(x); }
template <class Cfg> ComplexOf<Cfg> complex_from_double(std::complex<double> z) {
    return ComplexOf<Cfg>(RealOf<Cfg>(z.real()), RealOf<Cfg>(z.imag()));
}

template <class Cfg> struct consts {
    using R = RealOf<Cfg>;
    static R pi() {
        static const R v = Cfg::parse("3.14159265358979323846264338327950288419717");
        return v;
    }
    static R log_2pi() {
        static const R v = Cfg::parse("1.83787706640934548356065947281123527972767");
        return v;
    }
    static R euler_gamma() {
        static const R v = Cfg::parse("0.577215664901532860606512090082402431042159");
        return v;
    }
    // log of the Glaisher-Kinkelin constant (40 digits)
    static R log_glaisher() {
        static const R v = Cfg::parse("0.2487544770337842625429906441849164480898366");
        return v;
    }
};

}  // namespace ginpol
