#include "recur/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace recur {

namespace {

double residual(const model& m, const vec& x, const vec& p, vec& f) {
    m.rhs(0.0, x, p, f);
    return norm_inf(f);
}

bool state_less(const vec& a, const vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

}  // namespace

const char* to_string(stability_kind k) {
    switch (k) {
        case stability_kind::stable: return "stable";
        case stability_kind::saddle: return "saddle";
        default: return "unstable";
    }
}

stability_kind classify_stability(const eigen_spectrum& sp) {
    bool any_pos = false, any_neg = false, all_neg = true;
    for (const auto& z : sp.values) {
        if (z.real() > 0.0) any_pos = true;
        if (z.real() < 0.0) any_neg = true;
        if (!(z.real() < 0.0)) all_neg = false;
    }
    if (all_neg) return stability_kind::stable;
    if (any_pos && any_neg) return stability_kind::saddle;
    return stability_kind::unstable;
}

equilibrium find_equilibrium(const model& m, const vec& p, const vec& seed, double tol) {
    if (static_cast<int>(seed.size()) != m.dim) throw solver_error(m.id + ": bad seed size");
    if (!(tol > 0.0)) throw solver_error("find_equilibrium: tol must be positive");
    for (double v : seed)
        if (!std::isfinite(v)) throw solver_error(m.id + ": non-finite seed");

    vec x = seed, f(m.dim), ftrial(m.dim), dx(m.dim), xtrial(m.dim);
    double fnorm = residual(m, x, p, f);

    for (int iter = 0; iter < 200 && fnorm >= tol; ++iter) {
        mat J = jacobian(m, x, p);
        std::vector<int> piv;
        mat lu = J;
        if (!lu_factor(lu, piv)) {
            std::ostringstream os;
            os << m.id << ": singular jacobian at Newton iterate (|f|=" << fnorm
               << ", pivot ratio=" << pivot_condition(J) << ")";
            throw solver_error(os.str());
        }
        for (int i = 0; i < m.dim; ++i) dx[i] = -f[i];
        lu_solve(lu, piv, dx);

        double s = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= 60; ++halving) {
            for (int i = 0; i < m.dim; ++i) xtrial[i] = x[i] + s * dx[i];
            const double tnorm = residual(m, xtrial, p, ftrial);
            if (std::isfinite(tnorm) && (tnorm < fnorm || tnorm < tol)) {
                x = xtrial;
                f = ftrial;
                fnorm = tnorm;
                improved = true;
                break;
            }
            s *= 0.5;
        }
        if (!improved) {
            std::ostringstream os;
            os << m.id << ": Newton stalled after 60 halvings (|f|=" << fnorm << ")";
            throw solver_error(os.str());
        }
    }
    if (!(fnorm < tol)) {
        std::ostringstream os;
        os << m.id << ": Newton failed to converge in 200 iterations (|f|=" << fnorm << ")";
        throw solver_error(os.str());
    }

    equilibrium eq;
    eq.state = x;
    eq.params = p;
    eq.residual_norm = fnorm;
    eq.spectrum = eigenvalues(jacobian(m, x, p));
    eq.stability = classify_stability(eq.spectrum);
    return eq;
}

equilibria_scan find_equilibria_scan(const model& m, const vec& p, const std::vector<vec>& seeds,
                                     double tol) {
    if (seeds.empty()) throw solver_error(m.id + ": empty seed grid");
    equilibria_scan out;
    for (const auto& s : seeds) {
        try {
            out.equilibria.push_back(find_equilibrium(m, p, s, tol));
        } catch (const solver_error&) {
            ++out.failed_seeds;
        }
    }
    std::sort(out.equilibria.begin(), out.equilibria.end(),
              [](const equilibrium& a, const equilibrium& b) { return state_less(a.state, b.state); });
    std::vector<equilibrium> unique;
    for (auto& eq : out.equilibria) {
        bool dup = false;
        for (const auto& u : unique)
            if (dist_inf(eq.state, u.state) <= 1e-6) {
                dup = true;
                break;
            }
        if (!dup) unique.push_back(std::move(eq));
    }
    out.equilibria = std::move(unique);
    return out;
}

}  // namespace recur
