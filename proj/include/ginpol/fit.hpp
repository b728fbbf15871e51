#pragma once
// Least-squares line fit for decay-rate measurements. Reporting-level
// code, so plain doubles throughout.

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace ginpol {

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;  // coefficient of determination
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    if (n != ys.size() || n < 2) throw DomainError("fit_line: need >= 2 matched points");
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { sx += xs[i]; sy += ys[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0) throw DomainError("fit_line: degenerate abscissa");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy == 0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

}  // namespace ginpol
