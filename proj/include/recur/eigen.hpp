#pragma once

#include <complex>
#include <vector>

#include "recur/linalg.hpp"

namespace recur {

struct eigen_spectrum {
    // sorted by descending real part (ties: descending imaginary part)
    std::vector<std::complex<double>> values;
    double max_real = 0.0;
    bool has_complex_pair = false;
    // real part of the complex-conjugate pair with the largest real part
    double complex_pair_real = 0.0;
    double complex_pair_imag = 0.0;  // positive member of that pair
};

// dense real eigenvalues: closed form for n<=3, Hessenberg + double-shift QR
// for n>=4; conjugate pairs are exact by construction
eigen_spectrum eigenvalues(const mat& A);

// |det(A - lambda I)| via complex LU; independent check on computed values
double char_poly_residual(const mat& A, std::complex<double> lambda);

}  // namespace recur
