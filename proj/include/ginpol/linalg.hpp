#pragma once
// Dense complex linear algebra: column-pivoted LU with log-determinant,
// solve, and a pivot-ratio conditioning estimate. Matrices here are small
// (at most ~130x130), so an O(n^3) textbook elimination is appropriate;
// we need the pivot trail and exact control of the determinant phase,
// which rules out delegating to an external solver.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "logcomplex.hpp"
#include "precision.hpp"

namespace ginpol {

template <class Complex> struct Matrix {
    int n = 0, m = 0;
    std::vector<Complex> a;

    Matrix() = default;
    Matrix(int rows, int cols) : n(rows), m(cols), a(static_cast<size_t>(rows) * cols) {}

    Complex& operator()(int i, int j) { return a[static_cast<size_t>(i) * m + j]; }
    const Complex& operator()(int i, int j) const { return a[static_cast<size_t>(i) * m + j]; }

    static Matrix identity(int k) {
        Matrix I(k, k);
        for (int i = 0; i < k; ++i) I(i, i) = Complex(1);
        return I;
    }
};

template <class Cfg> struct LuFactors {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;

    Matrix<Complex> lu;        // packed L (unit diagonal) and U
    std::vector<int> perm;     // row permutation trail
    int swaps = 0;
    Real min_pivot{};          // |pivot| extremes over the elimination
    Real max_pivot{};

    Real pivot_ratio() const { return max_pivot / min_pivot; }

    LogComplexT<Real> log_det() const {
        using std::log, std::atan2;
        Real lm(0), ph(0);
        for (int i = 0; i < lu.n; ++i) {
            const Complex& p = lu(i, i);
            lm += log(abs(p));
            ph += atan2(Real(p.imag()), Real(p.real()));
        }
        if (swaps % 2 != 0) ph += consts<Cfg>::pi();
        return LogComplexT<Real>(lm, ph);
    }
};

// partial-pivoted elimination; throws SingularityError when a pivot falls
// below pivot_floor (an absolute threshold in the caller's scaling)
template <class Cfg>
LuFactors<Cfg> lu_decompose(Matrix<ComplexOf<Cfg>> A, RealOf<Cfg> pivot_floor,
                            const std::string& what) {
    using Real = RealOf<Cfg>;
    using Complex = ComplexOf<Cfg>;
    const int n = A.n;
    LuFactors<Cfg> F;
    F.perm.resize(n);
    for (int i = 0; i < n; ++i) F.perm[i] = i;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        Real best = abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            Real v = abs(A(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(F.perm[k], F.perm[piv]);
            ++F.swaps;
        }
        if (!(best > pivot_floor))
            throw SingularityError(what, k, to_double(best));
        if (k == 0) {
            F.min_pivot = best;
            F.max_pivot = best;
        } else {
            F.min_pivot = std::min(F.min_pivot, best);
            F.max_pivot = std::max(F.max_pivot, best);
        }
        const Complex inv_p = Complex(1) / A(k, k);
        for (int i = k + 1; i < n; ++i) {
            Complex lik = A(i, k) * inv_p;
            A(i, k) = lik;
            for (int j = k + 1; j < n; ++j) A(i, j) -= lik * A(k, j);
        }
    }
    F.lu = std::move(A);
    return F;
}

template <class Cfg>
std::vector<ComplexOf<Cfg>> lu_solve(const LuFactors<Cfg>& F,
                                     const std::vector<ComplexOf<Cfg>>& b) {
    using Complex = ComplexOf<Cfg>;
    const int n = F.lu.n;
    std::vector<Complex> y(n);
    for (int i = 0; i < n; ++i) {
        Complex s = b[static_cast<size_t>(F.perm[i])];
        for (int j = 0; j < i; ++j) s -= F.lu(i, j) * y[j];
        y[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        Complex s = y[i];
        for (int j = i + 1; j < n; ++j) s -= F.lu(i, j) * y[j];
        y[i] = s / F.lu(i, i);
    }
    return y;
}

template <class Cfg>
std::vector<ComplexOf<Cfg>> solve_linear(const Matrix<ComplexOf<Cfg>>& A,
                                         const std::vector<ComplexOf<Cfg>>& b,
                                         const std::string& what) {
    using Real = RealOf<Cfg>;
    Real floor = Cfg::parse(("1e-" + std::to_string(Cfg::digits10 - 4)).c_str());
    // scale the pivot floor by the matrix magnitude
    Real amax(0);
    for (const auto& z : A.a) amax = std::max(amax, Real(abs(z)));
    if (!(amax > Real(0))) throw SingularityError(what + ": zero matrix", 0, 0.0);
    auto F = lu_decompose<Cfg>(A, amax * floor, what);
    return lu_solve<Cfg>(F, b);
}

// 2x2 helpers used by the matrix-valued transforms
template <class Complex> struct Mat2 {
    Complex a11{}, a12{}, a21{}, a22{};

    static Mat2 identity() { return {Complex(1), Complex(0), Complex(0), Complex(1)}; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Complex det() const { return a11 * a22 - a12 * a21; }
    Mat2 inverse() const {
        Complex d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    auto max_abs() const {
        using std::max;
        auto m = max(max(abs(a11), abs(a12)), max(abs(a21), abs(a22)));
        return m;
    }
};

}  // namespace ginpol
