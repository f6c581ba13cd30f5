#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pclique/graph.hpp"

namespace pclique {

struct ConfusionMatrix {
    std::vector<std::vector<std::int64_t>> counts;  // truth x predicted
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t total = 0;
};

inline ConfusionMatrix confusion(const Partition& truth, const Partition& pred) {
    if (truth.membership.size() != pred.membership.size())
        throw std::invalid_argument("confusion: partitions cover different node counts");
    ConfusionMatrix cm;
    cm.counts.assign(static_cast<std::size_t>(truth.count),
                     std::vector<std::int64_t>(static_cast<std::size_t>(pred.count), 0));
    for (std::size_t i = 0; i < truth.membership.size(); ++i)
        ++cm.counts[static_cast<std::size_t>(truth.membership[i])]
                   [static_cast<std::size_t>(pred.membership[i])];
    cm.row_sums.assign(static_cast<std::size_t>(truth.count), 0);
    cm.col_sums.assign(static_cast<std::size_t>(pred.count), 0);
    for (std::size_t k = 0; k < cm.counts.size(); ++k)
        for (std::size_t l = 0; l < cm.counts[k].size(); ++l) {
            cm.row_sums[k] += cm.counts[k][l];
            cm.col_sums[l] += cm.counts[k][l];
            cm.total += cm.counts[k][l];
        }
    return cm;
}

/// Normalized mutual information, 2 I(T,S) / (H(T) + H(S)), with 0 log 0 = 0.
/// Single-community degenerate cases: 1 if both partitions are the trivial
/// one-community partition, else 0.
inline double nmi(const Partition& truth, const Partition& pred) {
    if (truth.membership.size() != pred.membership.size())
        throw std::invalid_argument("nmi: partitions cover different node counts");
    if (truth.membership.empty()) throw std::invalid_argument("nmi: empty partitions");
    if (truth.count == 1 || pred.count == 1) return truth.count == 1 && pred.count == 1 ? 1.0 : 0.0;

    const ConfusionMatrix cm = confusion(truth, pred);
    const double total = static_cast<double>(cm.total);
    double mutual = 0.0;
    for (std::size_t k = 0; k < cm.counts.size(); ++k)
        for (std::size_t l = 0; l < cm.counts[k].size(); ++l) {
            const double nkl = static_cast<double>(cm.counts[k][l]);
            if (nkl == 0.0) continue;
            mutual += nkl * std::log(nkl * total /
                                     (static_cast<double>(cm.row_sums[k]) *
                                      static_cast<double>(cm.col_sums[l])));
        }
    double h_truth = 0.0, h_pred = 0.0;
    for (std::int64_t r : cm.row_sums)
        if (r > 0) h_truth -= static_cast<double>(r) * std::log(static_cast<double>(r) / total);
    for (std::int64_t c : cm.col_sums)
        if (c > 0) h_pred -= static_cast<double>(c) * std::log(static_cast<double>(c) / total);
    const double denom = h_truth + h_pred;
    if (denom <= 0.0) return 1.0;  // both entropies zero: identical trivial structure
    return 2.0 * mutual / denom;
}

/// Adjusted Rand index in the Hubert-Arabie form (pair counting against the
/// permutation null). Returns 1 when the correction denominator vanishes,
/// which only happens when the partitions agree trivially.
inline double ari(const Partition& truth, const Partition& pred) {
    if (truth.membership.size() != pred.membership.size())
        throw std::invalid_argument("ari: partitions cover different node counts");
    if (truth.membership.size() < 2) throw std::invalid_argument("ari: need at least 2 nodes");

    const ConfusionMatrix cm = confusion(truth, pred);
    auto pairs2 = [](std::int64_t x) { return static_cast<double>(x) * (static_cast<double>(x) - 1.0) / 2.0; };
    double joint = 0.0;
    for (const auto& row : cm.counts)
        for (std::int64_t c : row) joint += pairs2(c);
    double sum_rows = 0.0, sum_cols = 0.0;
    for (std::int64_t r : cm.row_sums) sum_rows += pairs2(r);
    for (std::int64_t c : cm.col_sums) sum_cols += pairs2(c);
    const double expected = sum_rows * sum_cols / pairs2(cm.total);
    const double maximum = 0.5 * (sum_rows + sum_cols);
    if (maximum - expected == 0.0) return 1.0;
    return (joint - expected) / (maximum - expected);
}

/// Block-wise co-membership disagreement rates between a reference partition
/// and a clustering result, one entry per ordered pair of truth communities.
struct ErrorMatrix {
    std::vector<std::vector<double>> eps;  // h x h, symmetric
    std::vector<NodeId> truth_sizes;
    std::vector<bool> diagonal_undefined;  // singleton truth communities
};

inline ErrorMatrix error_matrix(const Partition& truth, const Partition& pred) {
    if (truth.membership.size() != pred.membership.size())
        throw std::invalid_argument("error_matrix: partitions cover different node counts");
    const ConfusionMatrix cm = confusion(truth, pred);
    const auto h = static_cast<std::size_t>(truth.count);

    ErrorMatrix em;
    em.eps.assign(h, std::vector<double>(h, 0.0));
    em.truth_sizes = truth.sizes;
    em.diagonal_undefined.assign(h, false);

    // Off-diagonal: truth says "apart", so every co-predicted pair is a miss.
    // The co-predicted ordered pair count is sum_s N_ks N_ls.
    for (std::size_t k = 0; k < h; ++k) {
        for (std::size_t l = 0; l < h; ++l) {
            if (k == l) continue;
            double agree = 0.0;
            for (std::size_t s = 0; s < cm.counts[k].size(); ++s)
                agree += static_cast<double>(cm.counts[k][s]) * static_cast<double>(cm.counts[l][s]);
            em.eps[k][l] = agree / (static_cast<double>(truth.sizes[k]) *
                                    static_cast<double>(truth.sizes[l]));
        }
        // Diagonal: truth says "together"; misses are the ordered pairs the
        // prediction separates.
        const double nk = static_cast<double>(truth.sizes[k]);
        if (truth.sizes[k] < 2) {
            em.diagonal_undefined[k] = true;
            em.eps[k][k] = 0.0;
            continue;
        }
        double together = 0.0;
        for (std::size_t s = 0; s < cm.counts[k].size(); ++s) {
            const double nks = static_cast<double>(cm.counts[k][s]);
            together += nks * (nks - 1.0);
        }
        em.eps[k][k] = (nk * (nk - 1.0) - together) / (nk * (nk - 1.0));
    }
    return em;
}

struct Aggregate {
    double mean = 0.0;
    double se = 0.0;
};

/// Sample mean and standard error across replications.
inline Aggregate aggregate(std::span<const double> values) {
    if (values.size() < 2)
        throw std::domain_error("aggregate: standard error needs at least 2 replications");
    Aggregate out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double sd = std::sqrt(ss / (static_cast<double>(values.size()) - 1.0));
    out.se = sd / std::sqrt(static_cast<double>(values.size()));
    return out;
}

}  // namespace pclique
