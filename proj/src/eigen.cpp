#include "recur/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace recur {

namespace {

using cplx = std::complex<double>;

void push_quadratic(double tr, double det, std::vector<cplx>& out) {
    // roots of lambda^2 - tr*lambda + det
    const double half = 0.5 * tr;
    const double disc = half * half - det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // stable form: avoid cancellation on the smaller root
        const double r1 = half >= 0.0 ? half + s : half - s;
        out.emplace_back(r1, 0.0);
        out.emplace_back(r1 != 0.0 ? det / r1 : half - s, 0.0);
    } else {
        const double s = std::sqrt(-disc);
        out.emplace_back(half, s);
        out.emplace_back(half, -s);
    }
}

void cubic_roots(double c2, double c1, double c0, std::vector<cplx>& out) {
    // monic cubic lambda^3 + c2 l^2 + c1 l + c0
    const double shift = c2 / 3.0;
    const double p = c1 - c2 * c2 / 3.0;
    const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    const double scale = std::max({std::abs(4.0 * p * p * p), 27.0 * q * q, 1e-300});
    if (disc > -1e-12 * scale) {
        // three real roots (trig form); clamp handles the near-multiple tie
        const double m = std::sqrt(std::max(-p / 3.0, 0.0));
        if (m == 0.0) {
            const double r = std::cbrt(-q);
            for (int k = 0; k < 3; ++k) out.emplace_back(r - shift, 0.0);
            return;
        }
        double arg = 3.0 * q / (2.0 * p * m);
        arg = std::clamp(arg, -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            const double t = 2.0 * m * std::cos(theta - 2.0 * M_PI * k / 3.0);
            out.emplace_back(t - shift, 0.0);
        }
    } else {
        // one real root + conjugate pair (Cardano)
        const double rad = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        const double u = std::cbrt(-q / 2.0 + rad);
        const double v = std::cbrt(-q / 2.0 - rad);
        const double t1 = u + v;
        out.emplace_back(t1 - shift, 0.0);
        // deflate: t^2 + t1 t + (t1^2 + p)
        const double half = -t1 / 2.0;
        const double disc2 = half * half - (t1 * t1 + p);
        const double s = std::sqrt(std::max(-disc2, 0.0));
        out.emplace_back(half - shift, s);
        out.emplace_back(half - shift, -s);
    }
}

void balance(mat& A) {
    const int n = A.n;
    const double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(A(j, i));
                    r += std::abs(A(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix, f = 1.0;
                const double s = c + r;
                while (c < g) { f *= radix; c *= radix * radix; }
                g = r * radix;
                while (c > g) { f /= radix; c /= radix * radix; }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    const double ginv = 1.0 / f;
                    for (int j = 0; j < n; ++j) A(i, j) *= ginv;
                    for (int j = 0; j < n; ++j) A(j, i) *= f;
                }
            }
        }
    }
}

void hessenberg(mat& A) {
    const int n = A.n;
    vec v(n);
    for (int k = 0; k < n - 2; ++k) {
        double norm = 0.0;
        for (int i = k + 1; i < n; ++i) norm += A(i, k) * A(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        double alpha = A(k + 1, k) > 0.0 ? -norm : norm;
        std::fill(v.begin(), v.end(), 0.0);
        v[k + 1] = A(k + 1, k) - alpha;
        for (int i = k + 2; i < n; ++i) v[i] = A(i, k);
        double vtv = 0.0;
        for (int i = k + 1; i < n; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        const double beta = 2.0 / vtv;
        for (int j = 0; j < n; ++j) {  // left multiply
            double s = 0.0;
            for (int i = k + 1; i < n; ++i) s += v[i] * A(i, j);
            s *= beta;
            for (int i = k + 1; i < n; ++i) A(i, j) -= s * v[i];
        }
        for (int i = 0; i < n; ++i) {  // right multiply
            double s = 0.0;
            for (int j = k + 1; j < n; ++j) s += A(i, j) * v[j];
            s *= beta;
            for (int j = k + 1; j < n; ++j) A(i, j) -= s * v[j];
        }
        A(k + 1, k) = alpha;
        for (int i = k + 2; i < n; ++i) A(i, k) = 0.0;
    }
}

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr lineage)
bool hqr(mat& a, std::vector<cplx>& wri) {
    const int n = a.n;
    const double eps = std::numeric_limits<double>::epsilon();
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l > 0; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                wri.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        double r1 = x + z;
                        double r2 = (z != 0.0) ? x - w / z : x + z;
                        wri.emplace_back(r1, 0.0);
                        wri.emplace_back(r2, 0.0);
                    } else {
                        wri.emplace_back(x + p, z);
                        wri.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (its == 30) return false;
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 0; i < nn + 1; ++i) a(i, i) -= x;
                        double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rr - ss;
                        r = a(m + 2, m + 1);
                        double sc = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= sc;
                        q /= sc;
                        r /= sc;
                        if (m == l) break;
                        double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) *
                                   (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m; i < nn - 1; ++i) {
                        a(i + 2, i) = 0.0;
                        if (i != m) a(i + 2, i - 1) = 0.0;
                    }
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        double yy = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j < nn + 1; ++j) {
                            double pp = a(k, j) + q * a(k + 1, j);
                            if (k + 1 != nn) {
                                pp += r * a(k + 2, j);
                                a(k + 2, j) -= pp * z;
                            }
                            a(k + 1, j) -= pp * yy;
                            a(k, j) -= pp * x;
                        }
                        int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i < mmin + 1; ++i) {
                            double pp = x * a(i, k) + yy * a(i, k + 1);
                            if (k + 1 != nn) {
                                pp += z * a(i, k + 2);
                                a(i, k + 2) -= pp * r;
                            }
                            a(i, k + 1) -= pp * q;
                            a(i, k) -= pp;
                        }
                    }
                }
            }
        } while (l + 1 < nn);
    }
    return true;
}

}  // namespace

eigen_spectrum eigenvalues(const mat& A) {
    if (A.n != A.m) throw std::invalid_argument("eigenvalues: square matrix required");
    const int n = A.n;
    std::vector<cplx> vals;
    vals.reserve(n);
    if (n == 0) {
        return {};
    } else if (n == 1) {
        vals.emplace_back(A(0, 0), 0.0);
    } else if (n == 2) {
        push_quadratic(A(0, 0) + A(1, 1), A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0), vals);
    } else if (n == 3) {
        const double tr = A(0, 0) + A(1, 1) + A(2, 2);
        const double m01 = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        const double m02 = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
        const double m12 = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
        mat B = A;
        const double det = determinant(B);
        cubic_roots(-tr, m01 + m02 + m12, -det, vals);
    } else {
        mat H = A;
        balance(H);
        hessenberg(H);
        if (!hqr(H, vals)) throw std::runtime_error("eigenvalues: QR iteration failed to converge");
    }

    std::sort(vals.begin(), vals.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });

    eigen_spectrum sp;
    sp.values = std::move(vals);
    sp.max_real = sp.values.front().real();
    for (const auto& v : sp.values) sp.max_real = std::max(sp.max_real, v.real());
    const double imag_tol = 0.0;  // pairs are structurally exact; any nonzero imag counts
    for (const auto& v : sp.values) {
        if (v.imag() > imag_tol) {
            sp.has_complex_pair = true;
            sp.complex_pair_real = v.real();
            sp.complex_pair_imag = v.imag();
            break;  // sorted by Re desc, so first hit is the leading pair
        }
    }
    return sp;
}

double char_poly_residual(const mat& A, cplx lambda) {
    const int n = A.n;
    std::vector<cplx> M(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M[static_cast<std::size_t>(i) * n + j] = A(i, j);
    for (int i = 0; i < n; ++i) M[static_cast<std::size_t>(i) * n + i] -= lambda;

    // complex LU with partial pivoting; residual is |det|
    cplx det = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(M[static_cast<std::size_t>(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(M[static_cast<std::size_t>(i) * n + k]);
            if (v > best) { best = v; p = i; }
        }
        if (best == 0.0) return 0.0;
        if (p != k) {
            for (int j = 0; j < n; ++j)
                std::swap(M[static_cast<std::size_t>(k) * n + j], M[static_cast<std::size_t>(p) * n + j]);
            det = -det;
        }
        const cplx pivot = M[static_cast<std::size_t>(k) * n + k];
        det *= pivot;
        for (int i = k + 1; i < n; ++i) {
            const cplx f = M[static_cast<std::size_t>(i) * n + k] / pivot;
            for (int j = k + 1; j < n; ++j)
                M[static_cast<std::size_t>(i) * n + j] -= f * M[static_cast<std::size_t>(k) * n + j];
        }
    }
    return std::abs(det);
}

}  // namespace recur
