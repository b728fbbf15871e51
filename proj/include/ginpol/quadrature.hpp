#pragma once
// Gauss-Legendre nodes/weights (cached per order) and composite-panel
// integration helpers. Node computation is double precision; panel layout
// choices dominate the error budget everywhere these are used.

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "errors.hpp"

namespace ginpol {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

inline const GaussRule& gauss_legendre(int k) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    if (k < 1 || k > 256) throw DomainError("gauss_legendre order out of range");
    GaussRule r;
    r.nodes.resize(k);
    r.weights.resize(k);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (k + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (k + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_k(t) and P'_k(t)
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= k; ++j) {
                double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = k * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        r.nodes[k - 1 - i] = t;
        r.nodes[i] = -t;
        double w = 2.0 / ((1.0 - t * t) * dp * dp);
        r.weights[i] = w;
        r.weights[k - 1 - i] = w;
    }
    return cache.emplace(k, std::move(r)).first->second;
}

// integrate f over [a, b] with one Gauss panel
template <class F> auto gauss_panel(F&& f, double a, double b, int order) {
    const auto& r = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto acc = f(mid + half * r.nodes[0]) * (half * r.weights[0]);
    for (size_t i = 1; i < r.nodes.size(); ++i)
        acc += f(mid + half * r.nodes[i]) * (half * r.weights[i]);
    return acc;
}

// geometric grading of [a, b] toward the endpoint `toward` (must be a or b):
// returns panel breakpoints; the panel adjacent to `toward` has width
// about |b-a| * ratio^levels
inline std::vector<double> graded_breakpoints(double a, double b, double toward, int levels,
                                              double ratio = 0.25) {
    std::vector<double> bp;
    bp.push_back(a);
    if (toward == b) {
        double len = b - a;
        for (int l = 1; l <= levels; ++l) bp.push_back(b - len * std::pow(ratio, l));
        bp.push_back(b);
    } else if (toward == a) {
        double len = b - a;
        for (int l = levels; l >= 1; --l) bp.push_back(a + len * std::pow(ratio, l));
        bp.push_back(b);
    } else {
        throw DomainError("graded_breakpoints: grade target must be an endpoint");
    }
    return bp;
}

}  // namespace ginpol
