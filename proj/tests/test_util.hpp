#pragma once
// shared helpers for the test suites

#include <complex>
#include <cstdlib>
#include <string>

namespace ginpol::testutil {

inline double pd(const char* s) { return std::strtod(s, nullptr); }

inline std::complex<double> pc(const char* re, const char* im) {
    return {pd(re), pd(im)};
}

inline double rel_err(std::complex<double> got, std::complex<double> want) {
    double scale = std::abs(want);
    if (scale == 0) return std::abs(got);
    return std::abs(got - want) / scale;
}

inline double rel_err(double got, double want) {
    return rel_err(std::complex<double>(got), std::complex<double>(want));
}

}  // namespace ginpol::testutil
