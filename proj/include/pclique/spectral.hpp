#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pclique/graph.hpp"

namespace pclique {

/// Raised when an iterative solve breaks down or fails to converge where a
/// converged result is required. Carries the matvec count at failure.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, int iterations)
        : std::runtime_error(what), iterations_(iterations) {}
    int iterations() const { return iterations_; }

private:
    int iterations_;
};

/// A symmetric linear map given only by its action on vectors.
/// `norm_bound`, when positive, is an upper bound on the spectral radius.
struct SymmetricOperator {
    NodeId dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;
    double norm_bound = 0.0;
};

struct EigenResult {
    double lambda = 0.0;
    std::vector<double> vector;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;  // matvec count
    bool converged = false;
};

struct SolverConfig {
    double tol = 1e-8;          // residual tolerance, relative to a norm estimate
    int max_iter = 0;           // 0 -> 10*dim + 1000
    std::uint64_t seed = 1;
    int restart_dim = 0;        // 0 -> min(dim, 20); must be >= 2 otherwise
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void axpy(double c, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scal(double c, std::span<double> x) {
    for (double& v : x) v *= c;
}

inline bool has_nan(std::span<const double> x) {
    for (double v : x)
        if (std::isnan(v)) return true;
    return false;
}

/// Uniform double in [0,1) from the top 53 bits of a 64-bit draw.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

inline void fill_random_unit(std::mt19937_64& rng, std::span<double> v) {
    for (double& x : v) x = uniform01(rng) - 0.5;
    const double nrm = nrm2(v);
    if (nrm == 0.0) {
        v[0] = 1.0;
    } else {
        scal(1.0 / nrm, v);
    }
}

/// Cyclic Jacobi eigendecomposition of a small dense symmetric matrix,
/// stored row-major. Eigenvectors come back as columns of `vecs`.
inline void jacobi_eig(std::vector<double>& a, int k, std::vector<double>& values,
                       std::vector<double>& vecs) {
    vecs.assign(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) vecs[static_cast<std::size_t>(i) * k + i] = 1.0;
    auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * k + c]; };
    auto vt = [&](int r, int c) -> double& { return vecs[static_cast<std::size_t>(r) * k + c]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < k; ++p)
            for (int q = p + 1; q < k; ++q) off += at(p, q) * at(p, q);
        double diag = 0.0;
        for (int p = 0; p < k; ++p) diag += at(p, p) * at(p, p);
        if (off <= 1e-30 * (diag + off) + 1e-300) break;

        for (int p = 0; p < k; ++p) {
            for (int q = p + 1; q < k; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int r = 0; r < k; ++r) {
                    const double arp = at(r, p);
                    const double arq = at(r, q);
                    at(r, p) = c * arp - s * arq;
                    at(r, q) = s * arp + c * arq;
                }
                for (int r = 0; r < k; ++r) {
                    const double apr = at(p, r);
                    const double aqr = at(q, r);
                    at(p, r) = c * apr - s * aqr;
                    at(q, r) = s * apr + c * aqr;
                }
                for (int r = 0; r < k; ++r) {
                    const double vrp = vt(r, p);
                    const double vrq = vt(r, q);
                    vt(r, p) = c * vrp - s * vrq;
                    vt(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }
    values.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) values[static_cast<std::size_t>(i)] = at(i, i);
}

}  // namespace detail

/// Leading-eigenpair solve: targets the largest eigenvalue in SIGNED order.
///
/// A positive spectral shift (the operator-norm bound, estimated by power
/// iteration when the operator does not carry one) makes the signed-largest
/// eigenvalue also the extreme one, and a restarted Lanczos iteration with
/// full reorthogonalization tracks it. Dimensions up to 3 are solved densely.
inline EigenResult leading_eigenpair(const SymmetricOperator& op, const SolverConfig& cfg = {}) {
    const int n = op.dim;
    if (n <= 0) throw std::invalid_argument("leading_eigenpair: operator dimension must be >= 1");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("leading_eigenpair: tol must be positive");
    if (cfg.restart_dim != 0 && cfg.restart_dim < 2)
        throw std::invalid_argument("leading_eigenpair: restart_dim must be >= 2");

    const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10 * n + 1000;
    int matvecs = 0;

    auto apply_checked = [&](std::span<const double> in, std::span<double> out) {
        op.apply(in, out);
        ++matvecs;
        if (detail::has_nan(out))
            throw numerical_error("leading_eigenpair: NaN in matvec output", matvecs);
    };

    std::mt19937_64 rng(cfg.seed);

    // Tiny problems: materialize and solve densely.
    if (n <= 3) {
        std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
        std::vector<double> e(static_cast<std::size_t>(n), 0.0), col(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            e[static_cast<std::size_t>(j)] = 1.0;
            apply_checked(e, col);
            e[static_cast<std::size_t>(j)] = 0.0;
            for (int i = 0; i < n; ++i) dense[static_cast<std::size_t>(i) * n + j] = col[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double sym = 0.5 * (dense[static_cast<std::size_t>(i) * n + j] +
                                          dense[static_cast<std::size_t>(j) * n + i]);
                dense[static_cast<std::size_t>(i) * n + j] = sym;
                dense[static_cast<std::size_t>(j) * n + i] = sym;
            }
        std::vector<double> values, vecs;
        detail::jacobi_eig(dense, n, values, vecs);
        int best = 0;
        for (int i = 1; i < n; ++i)
            if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)]) best = i;
        EigenResult res;
        res.lambda = values[static_cast<std::size_t>(best)];
        res.vector.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) res.vector[static_cast<std::size_t>(i)] = vecs[static_cast<std::size_t>(i) * n + best];
        const double nrm = detail::nrm2(res.vector);
        detail::scal(1.0 / nrm, res.vector);
        std::vector<double> mv(static_cast<std::size_t>(n));
        apply_checked(res.vector, mv);
        detail::axpy(-res.lambda, res.vector, mv);
        res.residual = detail::nrm2(mv);
        res.iterations = matvecs;
        double scale = 0.0;
        for (double v : values) scale = std::max(scale, std::abs(v));
        res.converged = res.residual <= cfg.tol * std::max(scale, 1e-30);
        return res;
    }

    // Spectral-radius estimate -> shift and tolerance scale.
    double norm_est = op.norm_bound;
    std::vector<double> work(static_cast<std::size_t>(n)), work2(static_cast<std::size_t>(n));
    if (norm_est <= 0.0) {
        detail::fill_random_unit(rng, work);
        double est = 0.0;
        for (int it = 0; it < 8 && matvecs < max_iter; ++it) {
            apply_checked(work, work2);
            const double nrm = detail::nrm2(work2);
            est = std::max(est, nrm);
            if (nrm <= 1e-300) break;
            detail::scal(1.0 / nrm, work2);
            std::swap(work, work2);
        }
        norm_est = 1.5 * est;
    }
    const double sigma = norm_est;
    const double scale = std::max(norm_est, 1e-30);

    auto apply_shifted = [&](std::span<const double> in, std::span<double> out) {
        apply_checked(in, out);
        detail::axpy(sigma, in, out);
    };

    const int k_max = std::min<int>(n, cfg.restart_dim > 0 ? cfg.restart_dim : 20);
    const int k_keep = std::min(3, k_max - 1);

    // Orthonormal basis plus its dense projection basis' * (M + sigma I) * basis.
    // Invariant between steps: `filled` projection columns are complete and
    // basis.size() == filled + 1 (the last vector's column comes next).
    std::vector<std::vector<double>> basis;
    std::vector<double> proj(static_cast<std::size_t>(k_max) * k_max, 0.0);
    auto pr = [&](int r, int c) -> double& { return proj[static_cast<std::size_t>(r) * k_max + c]; };
    int filled = 0;

    basis.emplace_back(static_cast<std::size_t>(n));
    detail::fill_random_unit(rng, basis.back());

    EigenResult best;
    best.vector = basis[0];

    std::vector<double> small, values, vecs;
    std::vector<double> ritz(static_cast<std::size_t>(n)), mv(static_cast<std::size_t>(n));

    while (true) {
        // Grow the subspace. Each step projects M times the newest vector
        // (the Gram-Schmidt coefficients are exactly the new column) and
        // appends the orthogonalized remainder.
        bool out_of_budget = false;
        while (filled < static_cast<int>(basis.size())) {
            if (matvecs >= max_iter) {
                out_of_budget = true;
                break;
            }
            const int j = filled;
            apply_shifted(basis[static_cast<std::size_t>(j)], work);
            for (int i = 0; i <= j; ++i) {
                const double c = detail::dot(basis[static_cast<std::size_t>(i)], work);
                pr(i, j) = c;
                pr(j, i) = c;
                detail::axpy(-c, basis[static_cast<std::size_t>(i)], work);
            }
            for (int i = 0; i <= j; ++i) {  // second pass for orthogonality
                detail::axpy(-detail::dot(basis[static_cast<std::size_t>(i)], work),
                             basis[static_cast<std::size_t>(i)], work);
            }
            filled = j + 1;
            if (filled == k_max || filled == n) break;

            const double beta = detail::nrm2(work);
            if (beta > 1e-12 * std::max(scale, 1.0)) {
                detail::scal(1.0 / beta, work);
                basis.emplace_back(work.begin(), work.end());
                continue;
            }
            // Krylov space closed early; continue in a fresh direction.
            detail::fill_random_unit(rng, work);
            for (auto& b : basis) detail::axpy(-detail::dot(b, work), b, work);
            const double nrm = detail::nrm2(work);
            if (nrm <= 1e-8) break;  // span exhausted
            detail::scal(1.0 / nrm, work);
            basis.emplace_back(work.begin(), work.end());
        }

        if (filled == 0) {  // budget gone before any projection
            best.converged = false;
            best.iterations = matvecs;
            return best;
        }

        // Rayleigh-Ritz on the filled part of the subspace.
        const int k = filled;
        small.assign(static_cast<std::size_t>(k) * k, 0.0);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) small[static_cast<std::size_t>(r) * k + c] = pr(r, c);
        detail::jacobi_eig(small, k, values, vecs);
        int lead = 0;
        for (int i = 1; i < k; ++i)
            if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(lead)]) lead = i;

        std::fill(ritz.begin(), ritz.end(), 0.0);
        for (int i = 0; i < k; ++i)
            detail::axpy(vecs[static_cast<std::size_t>(i) * k + lead], basis[static_cast<std::size_t>(i)], ritz);
        const double nrm = detail::nrm2(ritz);
        if (nrm > 0.0) detail::scal(1.0 / nrm, ritz);

        const double lambda = values[static_cast<std::size_t>(lead)] - sigma;

        double residual = std::numeric_limits<double>::infinity();
        if (matvecs < max_iter || !out_of_budget) {
            apply_checked(ritz, mv);  // true residual on the unshifted operator
            detail::axpy(-lambda, ritz, mv);
            residual = detail::nrm2(mv);
        }

        if (residual < best.residual) {
            best.lambda = lambda;
            best.vector = ritz;
            best.residual = residual;
        }
        best.iterations = matvecs;

        if (residual <= cfg.tol * scale) {
            best.converged = true;
            return best;
        }
        if (out_of_budget || matvecs >= max_iter) {
            best.converged = false;
            return best;
        }

        // Thick restart: keep the leading Ritz vectors and continue from the
        // residual direction of the best pair.
        std::vector<int> order(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
        });
        const int keep = std::min(k_keep, k);
        std::vector<std::vector<double>> kept;
        std::vector<double> kept_values;
        kept.reserve(static_cast<std::size_t>(keep) + 1);
        for (int t = 0; t < keep; ++t) {
            std::vector<double> y(static_cast<std::size_t>(n), 0.0);
            const int col = order[static_cast<std::size_t>(t)];
            for (int i = 0; i < k; ++i)
                detail::axpy(vecs[static_cast<std::size_t>(i) * k + col], basis[static_cast<std::size_t>(i)], y);
            const double ynrm = detail::nrm2(y);
            if (ynrm > 1e-12) {
                detail::scal(1.0 / ynrm, y);
                kept.push_back(std::move(y));
                kept_values.push_back(values[static_cast<std::size_t>(col)]);
            }
        }
        proj.assign(static_cast<std::size_t>(k_max) * k_max, 0.0);
        for (int t = 0; t < static_cast<int>(kept.size()); ++t) pr(t, t) = kept_values[static_cast<std::size_t>(t)];

        // mv holds M x - lambda x, which equals the shifted residual.
        for (auto& b : kept) detail::axpy(-detail::dot(b, mv), b, mv);
        double rnrm = detail::nrm2(mv);
        if (rnrm <= 1e-12 * std::max(scale, 1.0)) {
            detail::fill_random_unit(rng, mv);
            for (auto& b : kept) detail::axpy(-detail::dot(b, mv), b, mv);
            rnrm = detail::nrm2(mv);
            if (rnrm <= 1e-8) {
                best.converged = best.residual <= cfg.tol * scale;
                return best;
            }
        }
        detail::scal(1.0 / rnrm, mv);
        basis = std::move(kept);
        basis.emplace_back(mv.begin(), mv.end());
        filled = static_cast<int>(basis.size()) - 1;
    }
}

/// Operator for the adjacency-minus-threshold matrix A - p(J - I), applied
/// without materializing the dense part: w = A v - p (sum(v) 1 - v).
/// Holds a reference to the graph; keep the graph alive while in use.
inline SymmetricOperator pclique_operator(const Graph& g, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("pclique_operator: p must lie in [0,1]");
    const NodeId n = g.node_count();
    SymmetricOperator op;
    op.dim = n;
    double bound = 0.0;
    for (NodeId i = 0; i < n; ++i) {
        const double d = static_cast<double>(g.degree(i));
        bound = std::max(bound, d * (1.0 - p) + (static_cast<double>(n - 1) - d) * p);
    }
    op.norm_bound = bound;
    op.apply = [&g, p, n](std::span<const double> v, std::span<double> w) {
        double total = 0.0;
        for (NodeId i = 0; i < n; ++i) total += v[static_cast<std::size_t>(i)];
        for (NodeId i = 0; i < n; ++i) {
            double acc = 0.0;
            for (NodeId j : g.neighbors(i)) acc += v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = acc - p * (total - v[static_cast<std::size_t>(i)]);
        }
    };
    return op;
}

/// Whole-graph modularity operator: w = A v - d (d.v)/Vol with d the degree
/// vector. Row sums vanish, so the all-ones vector is in the null space.
/// Holds a reference to the graph; keep the graph alive while in use.
inline SymmetricOperator modularity_operator(const Graph& g) {
    const NodeId n = g.node_count();
    const double vol = static_cast<double>(volume(g));
    if (vol <= 0.0) throw std::domain_error("modularity_operator: graph has zero volume");
    std::vector<double> deg(static_cast<std::size_t>(n));
    double max_deg = 0.0;
    for (NodeId i = 0; i < n; ++i) {
        deg[static_cast<std::size_t>(i)] = static_cast<double>(g.degree(i));
        max_deg = std::max(max_deg, deg[static_cast<std::size_t>(i)]);
    }
    SymmetricOperator op;
    op.dim = n;
    op.norm_bound = 2.0 * max_deg;
    op.apply = [&g, n, vol, deg = std::move(deg)](std::span<const double> v, std::span<double> w) {
        double dv = 0.0;
        for (NodeId i = 0; i < n; ++i) dv += deg[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        const double coeff = dv / vol;
        for (NodeId i = 0; i < n; ++i) {
            double acc = 0.0;
            for (NodeId j : g.neighbors(i)) acc += v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = acc - deg[static_cast<std::size_t>(i)] * coeff;
        }
    };
    return op;
}

/// Generalized modularity operator for a subset: the submatrix of B plus the
/// diagonal correction -diag(sum of B rows over the subset). Self-contained:
/// copies what it needs from the parent graph.
inline SymmetricOperator modularity_operator(const Graph& g, const NodeSet& subset) {
    if (subset.empty()) throw std::invalid_argument("modularity_operator: empty subset");
    const double vol = static_cast<double>(volume(g));
    if (vol <= 0.0) throw std::domain_error("modularity_operator: graph has zero volume");
    Subgraph sub = subgraph(g, subset);
    const NodeId q = sub.graph.node_count();

    std::vector<double> deg_full(static_cast<std::size_t>(q));
    double vol_sub = 0.0;
    for (NodeId i = 0; i < q; ++i) {
        deg_full[static_cast<std::size_t>(i)] = static_cast<double>(g.degree(subset[static_cast<std::size_t>(i)]));
        vol_sub += deg_full[static_cast<std::size_t>(i)];
    }
    std::vector<double> rowsum(static_cast<std::size_t>(q));
    for (NodeId i = 0; i < q; ++i)
        rowsum[static_cast<std::size_t>(i)] =
            static_cast<double>(sub.graph.degree(i)) - deg_full[static_cast<std::size_t>(i)] * (vol_sub / vol);

    double bound = 0.0;
    for (NodeId i = 0; i < q; ++i) {
        const double row = static_cast<double>(sub.graph.degree(i)) +
                           deg_full[static_cast<std::size_t>(i)] * (vol_sub / vol) +
                           std::abs(rowsum[static_cast<std::size_t>(i)]);
        bound = std::max(bound, row);
    }

    SymmetricOperator op;
    op.dim = q;
    op.norm_bound = bound;
    op.apply = [q, vol, sub = std::move(sub), deg_full = std::move(deg_full),
                rowsum = std::move(rowsum)](std::span<const double> v, std::span<double> w) {
        double dv = 0.0;
        for (NodeId i = 0; i < q; ++i) dv += deg_full[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        const double coeff = dv / vol;
        for (NodeId i = 0; i < q; ++i) {
            double acc = 0.0;
            for (NodeId j : sub.graph.neighbors(i)) acc += v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = acc - deg_full[static_cast<std::size_t>(i)] * coeff -
                                             rowsum[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        }
    };
    return op;
}

}  // namespace pclique
