#pragma once

#include <complex>
#include <vector>

namespace recur {

using vec = std::vector<double>;

// small dense row-major matrix; sized for Jacobians (dim <= 8) and bordered
// continuation systems (dim+1)
struct mat {
    int n = 0, m = 0;
    std::vector<double> a;

    mat() = default;
    mat(int rows, int cols)
        : n(rows), m(cols), a(static_cast<std::size_t>(rows) * cols, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * m + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }

    static mat identity(int k);
};

double norm_inf(const vec& v);
double norm2(const vec& v);
double dist_inf(const vec& a, const vec& b);
double dot(const vec& a, const vec& b);
vec add_scaled(const vec& a, double s, const vec& b);  // a + s*b

// LU with partial pivoting, in place. Returns false on a vanishing pivot.
bool lu_factor(mat& A, std::vector<int>& piv);
void lu_solve(const mat& lu, const std::vector<int>& piv, vec& b);
bool solve_linear(mat A, vec b, vec& x);

// determinant sign/value from LU (0.0 when factorization fails)
double determinant(mat A);

// cheap conditioning proxy: ratio of extreme |U| pivots; used for failure
// reports, not for error bounds
double pivot_condition(const mat& A);

}  // namespace recur
