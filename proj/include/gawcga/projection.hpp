#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gawcga/space.hpp"

namespace gawcga {

// Ordered list of selected atoms; duplicates allowed.
struct Span {
    std::vector<Element> atoms;

    std::size_t size() const { return atoms.size(); }
    void push(Element atom) { atoms.push_back(std::move(atom)); }

    Element combine(const std::vector<double>& c) const {
        Element g;
        for (std::size_t j = 0; j < atoms.size(); ++j)
            if (c[j] != 0.0) g.add_scaled(atoms[j], c[j]);
        return g;
    }
};

struct ProjectionOptions {
    double tol = 1e-10;        // objective decrease scale for stalling detection
    double cert_tol = 1e-9;    // first-order certificate: max_j |F_{f-G}(phi_j)|
    std::size_t max_iterations = 100000;
    double zero_residual_tol = 1e-13;
    const std::vector<double>* warm_start = nullptr;  // initial coefficients (else 0)
    bool use_fast_paths = true;  // off: force the descent path (validation runs)
};

struct Projection {
    Element approximant;              // G with ||f - G|| <= E* + tol
    double error = 0.0;               // ||f - G||
    std::vector<double> coefficients; // c with G = sum c_j phi_j
    double certificate = 0.0;         // achieved max_j |F_{f-G}(phi_j)|
    std::size_t iterations = 0;
    bool zero_residual = false;
    std::string method;               // "empty" | "coordinate" | "gram" | "descent"
};

namespace detail {

inline double dot(const Element& a, const Element& b) {
    const auto& x = a.coords();
    const auto& y = b.coords();
    const auto& small = x.size() <= y.size() ? x : y;
    const auto& large = x.size() <= y.size() ? y : x;
    double s = 0.0;
    for (auto& [idx, v] : small) {
        auto it = large.find(idx);
        if (it != large.end()) s += v * it->second;
    }
    return s;
}

// max_j |F_r(phi_j)| for the norming functional of the residual.
inline double certificate_at(const Space& space, const Element& residual,
                             const Span& span) {
    if (residual.is_zero()) return 0.0;
    const Functional f = norming_functional(space, residual);
    double c = 0.0;
    for (const auto& atom : span.atoms) c = std::max(c, std::fabs(apply(f, atom)));
    return c;
}

// A span of distinct signed unit coordinate vectors admits the exact
// coordinate-copy projection: zeroing a residual coordinate can only shrink
// any coordinate-monotone norm (both l_q and the nested theta norms are),
// and the leftover coordinates are untouched by the span.
inline bool is_canonical_span(const Span& span) {
    for (const auto& a : span.atoms) {
        if (a.support_size() != 1) return false;
        const double v = a.coords().begin()->second;
        if (v != 1.0 && v != -1.0) return false;
    }
    return true;
}

inline Projection project_coordinate(const Space& space, const Element& f,
                                     const Span& span) {
    Projection out;
    out.method = "coordinate";
    out.coefficients.assign(span.size(), 0.0);
    Element g;
    std::vector<std::size_t> owned;
    for (std::size_t j = 0; j < span.size(); ++j) {
        const auto& [idx, sign] = *span.atoms[j].coords().begin();
        if (std::find(owned.begin(), owned.end(), idx) != owned.end()) continue;
        owned.push_back(idx);
        const double fj = f[idx];
        if (fj == 0.0) continue;
        out.coefficients[j] = sign > 0 ? fj : -fj;
        g.set(idx, fj);
    }
    out.approximant = std::move(g);
    const Element residual = f - out.approximant;
    out.error = norm(space, residual);
    out.zero_residual = residual.is_zero();
    out.certificate = 0.0;  // residual vanishes on every span coordinate
    return out;
}

// Gram-system solve for the l2 fast path.  Cholesky with dependent-pivot
// skipping: a duplicate or linearly dependent atom gets coefficient 0.
inline bool solve_gram(const std::vector<std::vector<double>>& gram,
                       const std::vector<double>& rhs, std::vector<double>& c) {
    const std::size_t n = rhs.size();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, gram[i][i]);
    if (max_diag == 0.0) return false;

    std::vector<std::vector<double>> lower(n, std::vector<double>(n, 0.0));
    std::vector<bool> active(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        double d = gram[k][k];
        for (std::size_t j = 0; j < k; ++j)
            if (active[j]) d -= lower[k][j] * lower[k][j];
        if (d <= 1e-12 * max_diag) continue;
        active[k] = true;
        lower[k][k] = std::sqrt(d);
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = gram[i][k];
            for (std::size_t j = 0; j < k; ++j)
                if (active[j]) s -= lower[i][j] * lower[k][j];
            lower[i][k] = s / lower[k][k];
        }
    }
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) continue;
        double s = rhs[i];
        for (std::size_t j = 0; j < i; ++j)
            if (active[j]) s -= lower[i][j] * y[j];
        y[i] = s / lower[i][i];
    }
    c.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        if (!active[ii]) continue;
        double s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j)
            if (active[j]) s -= lower[j][ii] * c[j];
        c[ii] = s / lower[ii][ii];
    }
    return true;
}

// Dense solve with partial pivoting for the Newton polish steps.
inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
        if (std::fabs(a[piv][k]) < 1e-300) return false;
        std::swap(a[piv], a[k]);
        std::swap(b[piv], b[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            if (m == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x[j];
        x[ii] = s / a[ii][ii];
    }
    return true;
}

}  // namespace detail

// Best approximation of f from the span: minimizes c -> ||f - sum c_j phi_j||.
//
// Fast paths: a span of distinct signed coordinate atoms copies the matching
// coordinates of f; in l2 the Gram normal equations are solved directly.
// Otherwise (and as a polish whenever a fast path leaves certificate
// residue) a descent iteration runs on the convex objective, using the
// norming functional of the residual as the gradient: an L-BFGS direction
// with Armijo backtracking (halving, constant 1e-4, minimum step 1e-16),
// plus a damped-Newton finishing stage on the first-order system
// F_{f-G}(phi_j) = 0, whose local quadratic convergence is what actually
// reaches tight certificates when the exponent sequence sits close to 1 and
// first-order steps alone stall.
//
// Throws NonConvergence (with the achieved state) if the certificate target
// is not met within the iteration budget.
inline Projection best_approximation(const Space& space, const Element& f,
                                     const Span& span,
                                     const ProjectionOptions& opts = {}) {
    Projection out;
    if (span.size() == 0) {
        out.method = "empty";
        out.error = norm(space, f);
        out.zero_residual = f.is_zero();
        return out;
    }

    if (opts.use_fast_paths && detail::is_canonical_span(span))
        return detail::project_coordinate(space, f, span);

    const std::size_t n = span.size();
    std::vector<double> c(n, 0.0);
    if (opts.warm_start) {
        if (opts.warm_start->size() != n)
            throw std::invalid_argument("best_approximation: warm start size mismatch");
        c = *opts.warm_start;
    }

    if (auto* lq = std::get_if<LqSpace>(&space);
        opts.use_fast_paths && lq && lq->q == 2.0) {
        std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
        std::vector<double> rhs(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = detail::dot(span.atoms[i], f);
            for (std::size_t j = 0; j <= i; ++j)
                gram[i][j] = gram[j][i] = detail::dot(span.atoms[i], span.atoms[j]);
        }
        std::vector<double> solved;
        if (detail::solve_gram(gram, rhs, solved)) {
            Element g = span.combine(solved);
            Element r = f - g;
            const double rn = lq_norm(*lq, r);
            out.method = "gram";
            out.coefficients = std::move(solved);
            out.approximant = std::move(g);
            out.error = rn;
            if (rn < opts.zero_residual_tol) {
                out.zero_residual = true;
                return out;
            }
            out.certificate = detail::certificate_at(space, r, span);
            if (out.certificate <= opts.cert_tol) return out;
            c = out.coefficients;  // fall through to the descent polish
        }
    }

    // Descent state.
    auto residual_of = [&](const std::vector<double>& coef) {
        Element g = span.combine(coef);
        return f - g;
    };
    auto gradient_of = [&](const Element& r, std::vector<double>& grad) {
        const Functional fr = norming_functional(space, r);
        double cert = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = apply(fr, span.atoms[j]);
            grad[j] = -v;
            cert = std::max(cert, std::fabs(v));
        }
        return cert;
    };

    Element r = residual_of(c);
    double value = norm(space, r);
    std::vector<double> grad(n, 0.0);
    double cert = value < opts.zero_residual_tol ? 0.0 : gradient_of(r, grad);

    // L-BFGS memory.
    constexpr std::size_t kMemory = 8;
    std::vector<std::vector<double>> mem_s, mem_y;
    std::vector<double> mem_rho;

    auto lbfgs_direction = [&](std::vector<double>& dir) {
        dir = grad;
        for (double& d : dir) d = -d;
        if (mem_s.empty()) return;
        const std::size_t m = mem_s.size();
        std::vector<double> alpha(m, 0.0);
        for (std::size_t k = m; k-- > 0;) {
            double sd = 0.0;
            for (std::size_t j = 0; j < n; ++j) sd += mem_s[k][j] * dir[j];
            alpha[k] = mem_rho[k] * sd;
            for (std::size_t j = 0; j < n; ++j) dir[j] -= alpha[k] * mem_y[k][j];
        }
        double yy = 0.0, sy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            yy += mem_y.back()[j] * mem_y.back()[j];
            sy += mem_s.back()[j] * mem_y.back()[j];
        }
        if (yy > 0.0) {
            const double scale = sy / yy;
            for (double& d : dir) d *= scale;
        }
        for (std::size_t k = 0; k < m; ++k) {
            double yd = 0.0;
            for (std::size_t j = 0; j < n; ++j) yd += mem_y[k][j] * dir[j];
            const double beta = mem_rho[k] * yd;
            for (std::size_t j = 0; j < n; ++j)
                dir[j] += (alpha[k] - beta) * mem_s[k][j];
        }
    };

    // Newton finishing stage on Psi(c) = (F_{f-G}(phi_j))_j.
    auto newton_polish = [&]() {
        std::vector<double> psi(n, 0.0);
        auto eval_psi = [&](const std::vector<double>& coef, std::vector<double>& out_psi) {
            Element rr = residual_of(coef);
            const double rn = norm(space, rr);
            if (rn < opts.zero_residual_tol) {
                std::fill(out_psi.begin(), out_psi.end(), 0.0);
                return 0.0;
            }
            const Functional fr = norming_functional(space, rr);
            double m = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                out_psi[j] = apply(fr, span.atoms[j]);
                m = std::max(m, std::fabs(out_psi[j]));
            }
            return m;
        };
        double merit = eval_psi(c, psi);
        for (int it = 0; it < 60 && merit > opts.cert_tol; ++it) {
            std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
            std::vector<double> psi_h(n, 0.0);
            for (std::size_t l = 0; l < n; ++l) {
                const double h = 1e-7 * std::max(1.0, std::fabs(c[l]));
                std::vector<double> ch = c;
                ch[l] += h;
                eval_psi(ch, psi_h);
                for (std::size_t j = 0; j < n; ++j) jac[j][l] = (psi_h[j] - psi[j]) / h;
                ++out.iterations;
            }
            std::vector<double> neg = psi, delta;
            for (double& v : neg) v = -v;
            if (!detail::solve_dense(jac, neg, delta)) return merit;
            double step = 1.0;
            bool accepted = false;
            while (step >= 1e-10) {
                std::vector<double> cand = c;
                for (std::size_t j = 0; j < n; ++j) cand[j] += step * delta[j];
                std::vector<double> psi_cand(n, 0.0);
                const double merit_cand = eval_psi(cand, psi_cand);
                ++out.iterations;
                if (merit_cand < merit * (1.0 - 1e-4 * step) || merit_cand <= opts.cert_tol) {
                    c = std::move(cand);
                    psi = std::move(psi_cand);
                    merit = merit_cand;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) return merit;
        }
        return merit;
    };

    std::vector<double> dir(n, 0.0);
    bool tried_polish_at_cert = false;
    while (cert > opts.cert_tol && out.iterations < opts.max_iterations) {
        if (value < opts.zero_residual_tol) break;

        // Quadratically convergent finishing once the first-order loop gets close.
        if (cert < 1e-3 && !tried_polish_at_cert) {
            tried_polish_at_cert = true;
            const double merit = newton_polish();
            r = residual_of(c);
            value = norm(space, r);
            cert = value < opts.zero_residual_tol ? 0.0 : gradient_of(r, grad);
            if (merit <= opts.cert_tol || cert <= opts.cert_tol) break;
            mem_s.clear();
            mem_y.clear();
            mem_rho.clear();
        }

        lbfgs_direction(dir);
        double slope = 0.0;
        for (std::size_t j = 0; j < n; ++j) slope += grad[j] * dir[j];
        if (slope >= 0.0) {  // not a descent direction: drop the memory
            mem_s.clear();
            mem_y.clear();
            mem_rho.clear();
            for (std::size_t j = 0; j < n; ++j) dir[j] = -grad[j];
            slope = 0.0;
            for (std::size_t j = 0; j < n; ++j) slope += grad[j] * dir[j];
            if (slope >= 0.0) break;  // gradient numerically zero
        }

        double step = 1.0;
        double new_value = value;
        std::vector<double> cand(n, 0.0);
        Element cand_r;
        bool accepted = false;
        while (step >= 1e-16) {
            cand = c;
            for (std::size_t j = 0; j < n; ++j) cand[j] += step * dir[j];
            cand_r = residual_of(cand);
            new_value = norm(space, cand_r);
            ++out.iterations;
            if (new_value <= value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!mem_s.empty()) {  // retry once from steepest descent
                mem_s.clear();
                mem_y.clear();
                mem_rho.clear();
                continue;
            }
            const double merit = newton_polish();
            r = residual_of(c);
            value = norm(space, r);
            cert = value < opts.zero_residual_tol ? 0.0 : gradient_of(r, grad);
            if (merit <= opts.cert_tol || cert <= opts.cert_tol) break;
            break;  // fully stalled; report what was achieved
        }

        std::vector<double> new_grad(n, 0.0);
        const double new_cert =
            new_value < opts.zero_residual_tol ? 0.0 : gradient_of(cand_r, new_grad);

        std::vector<double> s(n, 0.0), y(n, 0.0);
        double sy = 0.0, snorm = 0.0, ynorm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s[j] = cand[j] - c[j];
            y[j] = new_grad[j] - grad[j];
            sy += s[j] * y[j];
            snorm += s[j] * s[j];
            ynorm += y[j] * y[j];
        }
        if (sy > 1e-12 * std::sqrt(snorm * ynorm)) {  // curvature guard
            mem_s.push_back(std::move(s));
            mem_y.push_back(std::move(y));
            mem_rho.push_back(1.0 / sy);
            if (mem_s.size() > kMemory) {
                mem_s.erase(mem_s.begin());
                mem_y.erase(mem_y.begin());
                mem_rho.erase(mem_rho.begin());
            }
        }
        c = std::move(cand);
        r = std::move(cand_r);
        value = new_value;
        grad = std::move(new_grad);
        cert = new_cert;
    }

    out.method = out.method.empty() ? "descent" : out.method + "+descent";
    out.coefficients = c;
    out.approximant = span.combine(c);
    {
        const Element final_r = f - out.approximant;
        out.error = norm(space, final_r);
        out.zero_residual = out.error < opts.zero_residual_tol;
        out.certificate =
            out.zero_residual ? 0.0 : detail::certificate_at(space, final_r, span);
    }
    if (!out.zero_residual && out.certificate > opts.cert_tol)
        throw NonConvergence(
            "best_approximation: certificate " + std::to_string(out.certificate) +
                " above target " + std::to_string(opts.cert_tol) + " after " +
                std::to_string(out.iterations) + " iterations",
            out.error, out.certificate);
    return out;
}

// Step-3 approximant with the permitted (eta, eta') slack.  The spike, when
// given, must point inside the span (caller's contract) and keep
//   ||f - G|| <= (1 + eta) E + eta'
// which is re-verified numerically at the audit tolerance.
inline Element perturbed_approximant(const Space& space, const Element& f,
                                     const Element& g_exact, double error,
                                     double eta, double eta_prime,
                                     const Element* spike_direction = nullptr,
                                     double spike_magnitude = 0.0) {
    Element g = g_exact;
    if (spike_direction) g.add_scaled(*spike_direction, spike_magnitude);
    const double achieved = norm(space, f - g);
    const double allowance = (1.0 + eta) * error + eta_prime;
    const double margin = allowance - achieved;
    if (margin < -1e-9)
        throw SlackViolated("perturbed_approximant: ||f-G|| = " +
                                std::to_string(achieved) + " exceeds (1+eta)E+eta' = " +
                                std::to_string(allowance),
                            margin);
    return g;
}

}  // namespace gawcga
