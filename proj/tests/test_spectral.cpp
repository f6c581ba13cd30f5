#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pclique/spectral.hpp"
#include "support/oracles.hpp"

using namespace pclique;

namespace {

SymmetricOperator wrap_dense(const oracles::DenseMatrix& m) {
    SymmetricOperator op;
    op.dim = m.n;
    op.apply = [m](std::span<const double> v, std::span<double> w) {
        const std::vector<double> in(v.begin(), v.end());
        const std::vector<double> out = m.multiply(in);
        std::copy(out.begin(), out.end(), w.begin());
    };
    return op;
}

oracles::DenseMatrix random_symmetric(std::mt19937_64& rng, int n) {
    oracles::DenseMatrix m(n);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = dist(rng);
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    return m;
}

double residual_norm(const SymmetricOperator& op, const EigenResult& r) {
    std::vector<double> w(static_cast<std::size_t>(op.dim));
    op.apply(r.vector, w);
    double s = 0.0;
    for (int i = 0; i < op.dim; ++i) {
        const double d = w[static_cast<std::size_t>(i)] - r.lambda * r.vector[static_cast<std::size_t>(i)];
        s += d * d;
    }
    return std::sqrt(s);
}

void check_self_adjoint(const SymmetricOperator& op, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> u(static_cast<std::size_t>(op.dim)), v(static_cast<std::size_t>(op.dim));
    std::vector<double> mu(static_cast<std::size_t>(op.dim)), mv(static_cast<std::size_t>(op.dim));
    for (int probe = 0; probe < 4; ++probe) {
        for (auto& x : u) x = dist(rng);
        for (auto& x : v) x = dist(rng);
        op.apply(u, mu);
        op.apply(v, mv);
        double umv = 0.0, muv = 0.0, nu = 0.0, nv = 0.0;
        for (int i = 0; i < op.dim; ++i) {
            umv += u[static_cast<std::size_t>(i)] * mv[static_cast<std::size_t>(i)];
            muv += mu[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
            nu += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
            nv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        }
        const double scale = std::max(op.norm_bound, 1.0) * std::sqrt(nu) * std::sqrt(nv);
        CHECK(std::abs(umv - muv) <= 1e-10 * scale);
    }
}

}  // namespace

TEST_CASE("leading eigenpair on a diagonal operator", "[spectral]") {
    SymmetricOperator op;
    op.dim = 2;
    op.apply = [](std::span<const double> v, std::span<double> w) {
        w[0] = 3.0 * v[0];
        w[1] = 1.0 * v[1];
    };
    const EigenResult r = leading_eigenpair(op);
    REQUIRE(r.converged);
    CHECK_THAT(r.lambda, Catch::Matchers::WithinAbs(3.0, 1e-10));
    CHECK_THAT(std::abs(r.vector[0]), Catch::Matchers::WithinAbs(1.0, 1e-8));
    CHECK_THAT(r.vector[1], Catch::Matchers::WithinAbs(0.0, 1e-8));
}

TEST_CASE("leading eigenpair of the all-ones operator", "[spectral]") {
    for (const int n : {5, 23}) {
        SymmetricOperator op;
        op.dim = n;
        op.apply = [n](std::span<const double> v, std::span<double> w) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) total += v[static_cast<std::size_t>(i)];
            for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = total;
        };
        op.norm_bound = n;
        const EigenResult r = leading_eigenpair(op);
        REQUIRE(r.converged);
        CHECK_THAT(r.lambda, Catch::Matchers::WithinAbs(static_cast<double>(n), 1e-7 * n));
        const double expect = 1.0 / std::sqrt(static_cast<double>(n));
        for (int i = 0; i < n; ++i)
            CHECK_THAT(std::abs(r.vector[static_cast<std::size_t>(i)]),
                       Catch::Matchers::WithinAbs(expect, 1e-7));
    }
}

TEST_CASE("leading eigenpair matches dense oracle", "[spectral]") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 31);
        const oracles::DenseMatrix m = random_symmetric(rng, n);
        SymmetricOperator op = wrap_dense(m);

        std::vector<double> values;
        oracles::DenseMatrix vectors(n);
        oracles::dense_eigen(m, values, vectors);
        const double expected = values.back();  // ascending order
        double scale = 0.0;
        for (double v : values) scale = std::max(scale, std::abs(v));

        SolverConfig cfg;
        cfg.seed = 7 + trial;
        const EigenResult r = leading_eigenpair(op, cfg);
        REQUIRE(r.converged);
        CHECK_THAT(r.lambda, Catch::Matchers::WithinAbs(expected, 1e-8 * std::max(scale, 1.0)));
        CHECK(residual_norm(op, r) <= 1e-7 * std::max(scale, 1.0));

        // Eigenvector agreement up to sign (leading eigenvalue is simple for
        // generic random matrices).
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += r.vector[static_cast<std::size_t>(i)] * vectors.at(i, n - 1);
        const double gap = values.size() > 1 ? expected - values[values.size() - 2] : 1.0;
        if (gap > 1e-4) CHECK_THAT(std::abs(dot), Catch::Matchers::WithinAbs(1.0, 1e-5));
    }
}

TEST_CASE("solver fallback for tiny dimensions", "[spectral]") {
    std::mt19937_64 rng(555);
    for (int n = 1; n <= 3; ++n) {
        const oracles::DenseMatrix m = random_symmetric(rng, n);
        std::vector<double> values;
        oracles::DenseMatrix vectors(n);
        oracles::dense_eigen(m, values, vectors);
        const EigenResult r = leading_eigenpair(wrap_dense(m));
        REQUIRE(r.converged);
        CHECK_THAT(r.lambda, Catch::Matchers::WithinAbs(values.back(), 1e-10));
    }
}

TEST_CASE("solver error paths", "[spectral]") {
    SymmetricOperator empty;
    empty.dim = 0;
    CHECK_THROWS_AS(leading_eigenpair(empty), std::invalid_argument);

    SymmetricOperator nan_op;
    nan_op.dim = 5;
    nan_op.apply = [](std::span<const double>, std::span<double> w) {
        w[0] = std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(leading_eigenpair(nan_op), numerical_error);

    SolverConfig bad;
    bad.tol = 0.0;
    SymmetricOperator op;
    op.dim = 4;
    op.apply = [](std::span<const double> v, std::span<double> w) {
        std::copy(v.begin(), v.end(), w.begin());
    };
    CHECK_THROWS_AS(leading_eigenpair(op, bad), std::invalid_argument);

    SolverConfig skimpy;
    skimpy.max_iter = 2;
    skimpy.tol = 1e-14;
    std::mt19937_64 rng(31);
    const oracles::DenseMatrix m = random_symmetric(rng, 24);
    const EigenResult r = leading_eigenpair(wrap_dense(m), skimpy);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations <= 4);
}

TEST_CASE("solver is deterministic per seed", "[spectral]") {
    std::mt19937_64 rng(404);
    const oracles::DenseMatrix m = random_symmetric(rng, 17);
    SolverConfig cfg;
    cfg.seed = 99;
    const EigenResult a = leading_eigenpair(wrap_dense(m), cfg);
    const EigenResult b = leading_eigenpair(wrap_dense(m), cfg);
    CHECK(a.lambda == b.lambda);
    CHECK(a.vector == b.vector);
    CHECK(a.iterations == b.iterations);
    CHECK(a.residual == b.residual);
}

TEST_CASE("threshold-matrix operator", "[spectral]") {
    const Graph k3 = oracles::complete_graph(3);
    const SymmetricOperator op = pclique_operator(k3, 0.5);
    std::vector<double> v{1.0, 1.0, 1.0}, w(3);
    op.apply(v, w);
    for (double x : w) CHECK_THAT(x, Catch::Matchers::WithinAbs(1.0, 1e-14));

    CHECK_THROWS_AS(pclique_operator(k3, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(pclique_operator(k3, 1.1), std::invalid_argument);

    std::mt19937_64 rng(808);
    const Graph g = oracles::random_graph(rng, 10, 0.4);

    // p = 0 coincides with the adjacency matvec.
    const SymmetricOperator adj = pclique_operator(g, 0.0);
    const oracles::DenseMatrix a = oracles::dense_adjacency(g);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> in(10), out(10);
    for (auto& x : in) x = dist(rng);
    adj.apply(in, out);
    const std::vector<double> expect_adj = a.multiply(in);
    for (int i = 0; i < 10; ++i)
        CHECK_THAT(out[static_cast<std::size_t>(i)],
                   Catch::Matchers::WithinAbs(expect_adj[static_cast<std::size_t>(i)], 1e-12));

    // General p against the dense construction.
    const SymmetricOperator cp = pclique_operator(g, 0.3);
    const oracles::DenseMatrix dense = oracles::dense_pclique_matrix(g, 0.3);
    for (int probe = 0; probe < 5; ++probe) {
        for (auto& x : in) x = dist(rng);
        cp.apply(in, out);
        const std::vector<double> expect = dense.multiply(in);
        for (int i = 0; i < 10; ++i)
            CHECK_THAT(out[static_cast<std::size_t>(i)],
                       Catch::Matchers::WithinAbs(expect[static_cast<std::size_t>(i)], 1e-12));
    }
    check_self_adjoint(cp, 11);
}

TEST_CASE("modularity operators", "[spectral]") {
    // Whole graph: row sums of B vanish, so B * ones = 0.
    std::mt19937_64 rng(909);
    const Graph g = oracles::random_graph(rng, 9, 0.5);
    const SymmetricOperator whole = modularity_operator(g);
    std::vector<double> ones(9, 1.0), out(9);
    whole.apply(ones, out);
    for (double x : out) CHECK_THAT(x, Catch::Matchers::WithinAbs(0.0, 1e-12));
    check_self_adjoint(whole, 21);

    // K2 dense check: B = [[-1/2, 1/2], [1/2, -1/2]].
    const Graph k2 = oracles::complete_graph(2);
    const SymmetricOperator bk2 = modularity_operator(k2);
    std::vector<double> v{1.0, -1.0}, w(2);
    bk2.apply(v, w);
    CHECK_THAT(w[0], Catch::Matchers::WithinAbs(-1.0, 1e-14));
    CHECK_THAT(w[1], Catch::Matchers::WithinAbs(1.0, 1e-14));

    // Subset operator against the dense generalized matrix.
    const NodeSet subset{0, 2, 4, 6, 8};
    const SymmetricOperator sub = modularity_operator(g, subset);
    const oracles::DenseMatrix dense = oracles::dense_modularity_matrix(g, subset);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> in(5), got(5);
    for (int probe = 0; probe < 5; ++probe) {
        for (auto& x : in) x = dist(rng);
        sub.apply(in, got);
        const std::vector<double> expect = dense.multiply(in);
        for (int i = 0; i < 5; ++i)
            CHECK_THAT(got[static_cast<std::size_t>(i)],
                       Catch::Matchers::WithinAbs(expect[static_cast<std::size_t>(i)], 1e-12));
    }
    check_self_adjoint(sub, 31);

    CHECK_THROWS_AS(modularity_operator(Graph::from_edges(4, {})), std::domain_error);
    CHECK_THROWS_AS(modularity_operator(g, NodeSet{}), std::invalid_argument);
}

TEST_CASE("shift invariance of the leading eigenvector", "[spectral]") {
    std::mt19937_64 rng(313);
    const Graph g = oracles::random_graph(rng, 12, 0.45);
    const double p = 0.35;
    const SymmetricOperator cp = pclique_operator(g, p);

    // Subtracting (sum_ij C_ij / n) I shifts eigenvalues and keeps vectors.
    const oracles::DenseMatrix dense = oracles::dense_pclique_matrix(g, p);
    double total = 0.0;
    for (int i = 0; i < dense.n; ++i)
        for (int j = 0; j < dense.n; ++j) total += dense.at(i, j);
    const double shift = total / dense.n;

    SymmetricOperator shifted;
    shifted.dim = cp.dim;
    shifted.norm_bound = cp.norm_bound + std::abs(shift);
    shifted.apply = [&cp, shift](std::span<const double> v, std::span<double> w) {
        cp.apply(v, w);
        for (std::size_t i = 0; i < v.size(); ++i) w[i] -= shift * v[i];
    };

    SolverConfig cfg;
    cfg.seed = 5;
    const EigenResult a = leading_eigenpair(cp, cfg);
    const EigenResult b = leading_eigenpair(shifted, cfg);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK_THAT(a.lambda - b.lambda, Catch::Matchers::WithinAbs(shift, 1e-6));
    double dot = 0.0;
    for (std::size_t i = 0; i < a.vector.size(); ++i) dot += a.vector[i] * b.vector[i];
    CHECK_THAT(std::abs(dot), Catch::Matchers::WithinAbs(1.0, 1e-6));
}

TEST_CASE("Rayleigh quotients never exceed the leading eigenvalue", "[spectral]") {
    std::mt19937_64 rng(616);
    for (int trial = 0; trial < 10; ++trial) {
        const oracles::DenseMatrix m = random_symmetric(rng, 14);
        SymmetricOperator op = wrap_dense(m);
        SolverConfig cfg;
        cfg.seed = trial;
        const EigenResult r = leading_eigenpair(op, cfg);
        REQUIRE(r.converged);

        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> u(14), mu(14);
        for (int probe = 0; probe < 8; ++probe) {
            for (auto& x : u) x = dist(rng);
            double nrm = 0.0;
            for (double x : u) nrm += x * x;
            nrm = std::sqrt(nrm);
            for (auto& x : u) x /= nrm;
            op.apply(u, mu);
            double quad = 0.0;
            for (int i = 0; i < 14; ++i) quad += u[static_cast<std::size_t>(i)] * mu[static_cast<std::size_t>(i)];
            CHECK(r.lambda >= quad - 1e-8 * std::max(1.0, std::abs(r.lambda)));
        }
    }
}
