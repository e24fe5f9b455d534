#include "recur/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace recur {

mat mat::identity(int k) {
    mat I(k, k);
    for (int i = 0; i < k; ++i) I(i, i) = 1.0;
    return I;
}

double norm_inf(const vec& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

double norm2(const vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dist_inf(const vec& a, const vec& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

double dot(const vec& a, const vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

vec add_scaled(const vec& a, double s, const vec& b) {
    vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
}

bool lu_factor(mat& A, std::vector<int>& piv) {
    const int n = A.n;
    piv.resize(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(A(i, k));
            if (v > best) { best = v; p = i; }
        }
        piv[k] = p;
        if (best == 0.0 || !std::isfinite(best)) return false;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
        const double inv = 1.0 / A(k, k);
        for (int i = k + 1; i < n; ++i) {
            A(i, k) *= inv;
            const double f = A(i, k);
            if (f != 0.0)
                for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
        }
    }
    return true;
}

void lu_solve(const mat& lu, const std::vector<int>& piv, vec& b) {
    const int n = lu.n;
    // multipliers are stored in fully pivoted row order, so the permutation
    // must be applied to b in full before the forward sweep
    for (int k = 0; k < n; ++k)
        if (piv[k] != k) std::swap(b[k], b[piv[k]]);
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) b[i] -= lu(i, k) * b[k];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) b[i] -= lu(i, j) * b[j];
        b[i] /= lu(i, i);
    }
}

bool solve_linear(mat A, vec b, vec& x) {
    std::vector<int> piv;
    if (!lu_factor(A, piv)) return false;
    lu_solve(A, piv, b);
    for (double v : b)
        if (!std::isfinite(v)) return false;
    x = std::move(b);
    return true;
}

double determinant(mat A) {
    std::vector<int> piv;
    const int n = A.n;
    if (!lu_factor(A, piv)) return 0.0;
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        d *= A(k, k);
        if (piv[k] != k) d = -d;
    }
    return d;
}

double pivot_condition(const mat& A) {
    mat lu = A;
    std::vector<int> piv;
    if (!lu_factor(lu, piv)) return std::numeric_limits<double>::infinity();
    double lo = std::abs(lu(0, 0)), hi = lo;
    for (int k = 1; k < lu.n; ++k) {
        double v = std::abs(lu(k, k));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace recur
