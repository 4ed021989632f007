#include "pcs/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace pcs {

LevelPartition::LevelPartition(Index n, std::vector<std::vector<Index>> levels)
    : n_(n), levels_(std::move(levels)), owner_(static_cast<std::size_t>(std::max<Index>(n, 0)), -1) {
    if (n_ < 1) throw ConfigError("partition: N must be at least 1");
    if (levels_.empty()) throw ConfigError("partition: at least one level required");
    for (std::size_t d = 0; d < levels_.size(); ++d) {
        auto& level = levels_[d];
        if (level.empty()) throw ConfigError("partition: level " + std::to_string(d) + " is empty");
        std::sort(level.begin(), level.end());
        for (Index i : level) {
            if (i < 0 || i >= n_) throw ConfigError("partition: index " + std::to_string(i) + " out of range");
            auto& owner = owner_[static_cast<std::size_t>(i)];
            if (owner != -1) throw ConfigError("partition: index " + std::to_string(i) + " appears in two levels");
            owner = static_cast<Index>(d);
        }
    }
    if (std::find(owner_.begin(), owner_.end(), Index{-1}) != owner_.end())
        throw ConfigError("partition: levels do not cover all coordinates");
}

LevelPartition LevelPartition::equal(Index n, Index d) {
    if (d < 1 || d > n) throw ConfigError("partition: need 1 <= D <= N");
    std::vector<std::vector<Index>> levels(static_cast<std::size_t>(d));
    const Index base = n / d;
    const Index extra = n % d;
    Index next = 0;
    for (Index k = 0; k < d; ++k) {
        const Index width = base + (k < extra ? 1 : 0);
        auto& level = levels[static_cast<std::size_t>(k)];
        level.resize(static_cast<std::size_t>(width));
        std::iota(level.begin(), level.end(), next);
        next += width;
    }
    return LevelPartition(n, std::move(levels));
}

ValueLaw value_law_from_string(std::string_view name) {
    if (name == "unit_complex_phase") return ValueLaw::unit_complex_phase;
    if (name == "gaussian") return ValueLaw::gaussian;
    throw ConfigError("unknown value law '" + std::string(name) + "'");
}

namespace {

Complex draw_value(Rng& rng, ValueLaw law) {
    if (law == ValueLaw::unit_complex_phase) {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        return std::polar(1.0, phase(rng));
    }
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

// Uniform size-k subset of `pool` (partial Fisher-Yates); pool is consumed.
std::vector<Index> sample_subset(std::vector<Index> pool, Index k, Rng& rng) {
    const auto n = pool.size();
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

double log_binomial(Index n, Index k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Indices ordered by decreasing magnitude, lower index first on ties.
std::vector<Index> by_magnitude(const CVector& x, std::vector<Index> idx) {
    std::stable_sort(idx.begin(), idx.end(), [&x](Index a, Index b) {
        const double ma = std::abs(x(a));
        const double mb = std::abs(x(b));
        if (ma != mb) return ma > mb;
        return a < b;
    });
    return idx;
}

void check_feasible(const LevelPartition& partition, Index s, Index cap) {
    Index room = 0;
    for (const auto& level : partition.all()) room += std::min<Index>(static_cast<Index>(level.size()), cap);
    if (room < s)
        throw ConfigError("sparse-distributed caps infeasible: only " + std::to_string(room) +
                          " coordinates admissible for s = " + std::to_string(s));
}

} // namespace

SparseSignal draw_sparse(Index n, Index s, std::uint64_t seed, ValueLaw law) {
    if (n < 1) throw ConfigError("draw_sparse: N must be at least 1");
    if (s < 0 || s > n) throw ConfigError("draw_sparse: sparsity " + std::to_string(s) + " outside [0, N]");
    Rng rng = substream(seed, {0x5167});
    std::vector<Index> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), Index{0});
    SparseSignal out;
    out.support = sample_subset(std::move(pool), s, rng);
    out.x = CVector::Zero(n);
    for (Index i : out.support) out.x(i) = draw_value(rng, law);
    out.sparsity = s;
    return out;
}

Index distributed_cap(Index s, double lambda, Index d) {
    if (d < 1) throw ConfigError("distributed model: D must be at least 1");
    if (!(lambda >= 1.0) || lambda > static_cast<double>(d))
        throw ConfigError("distributed model: lambda must lie in [1, D]");
    // Small slack so that e.g. lambda*s/D = 2 computed as 1.9999999 rounds to 2.
    const auto cap = static_cast<Index>(std::floor(lambda * static_cast<double>(s) / static_cast<double>(d) + 1e-9));
    if (cap < 1) throw ConfigError("distributed model: per-level cap floor(lambda*s/D) is zero");
    return cap;
}

SparseSignal draw_sparse_distributed(const LevelPartition& partition, Index s, double lambda, std::uint64_t seed,
                                     ValueLaw law) {
    const Index n = partition.size();
    const Index d = partition.levels();
    if (s < 1 || s > n) throw ConfigError("draw_sparse_distributed: sparsity outside [1, N]");
    const Index cap = distributed_cap(s, lambda, d);
    check_feasible(partition, s, cap);

    // ways[k][t]: log of the number of admissible placements of t nonzeros in
    // levels k..D-1. Level counts are then drawn forward in proportion to
    // C(|I_k|, j) * ways[k+1][t-j], which makes the support uniform.
    const double neg_inf = -std::numeric_limits<double>::infinity();
    const auto levels = static_cast<std::size_t>(d);
    const auto width = static_cast<std::size_t>(s) + 1;
    std::vector<std::vector<double>> ways(levels + 1, std::vector<double>(width, neg_inf));
    ways[levels][0] = 0.0;
    for (std::size_t k = levels; k-- > 0;) {
        const Index size = static_cast<Index>(partition.level(static_cast<Index>(k)).size());
        const Index limit = std::min(cap, size);
        for (Index t = 0; t <= s; ++t) {
            double acc = neg_inf;
            for (Index j = 0; j <= std::min(limit, t); ++j) {
                const double rest = ways[k + 1][static_cast<std::size_t>(t - j)];
                if (rest == neg_inf) continue;
                acc = log_add(acc, log_binomial(size, j) + rest);
            }
            ways[k][static_cast<std::size_t>(t)] = acc;
        }
    }

    Rng rng = substream(seed, {0xD157});
    SparseSignal out;
    out.x = CVector::Zero(n);
    out.level_counts.assign(levels, 0);
    Index remaining = s;
    for (std::size_t k = 0; k < levels; ++k) {
        const auto& level = partition.level(static_cast<Index>(k));
        const Index size = static_cast<Index>(level.size());
        const Index limit = std::min({cap, size, remaining});
        std::vector<double> weights(static_cast<std::size_t>(limit) + 1, 0.0);
        const double total = ways[k][static_cast<std::size_t>(remaining)];
        for (Index j = 0; j <= limit; ++j) {
            const double rest = ways[k + 1][static_cast<std::size_t>(remaining - j)];
            if (rest != neg_inf) weights[static_cast<std::size_t>(j)] = std::exp(log_binomial(size, j) + rest - total);
        }
        std::discrete_distribution<Index> count_law(weights.begin(), weights.end());
        const Index j = count_law(rng);
        auto chosen = sample_subset(level, j, rng);
        out.support.insert(out.support.end(), chosen.begin(), chosen.end());
        out.level_counts[k] = j;
        remaining -= j;
    }
    std::sort(out.support.begin(), out.support.end());
    for (Index i : out.support) out.x(i) = draw_value(rng, law);
    out.sparsity = s;
    out.model = SignalModel::distributed;
    out.lambda = lambda;
    return out;
}

double best_s_term_error(const CVector& x, Index s) {
    const Index n = x.size();
    if (s < 0 || s > n) throw ConfigError("best_s_term_error: s outside [0, N]");
    std::vector<double> mags(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::abs(x(i));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    return std::accumulate(mags.begin() + s, mags.end(), 0.0);
}

std::vector<Index> best_distributed_support(const CVector& x, Index s, double lambda,
                                            const LevelPartition& partition) {
    if (x.size() != partition.size()) throw DimensionError("best_distributed_support: length differs from partition");
    if (s < 0 || s > x.size()) throw ConfigError("best_distributed_support: s outside [0, N]");
    if (s == 0) return {};
    const Index cap = distributed_cap(s, lambda, partition.levels());
    check_feasible(partition, s, cap);
    std::vector<Index> candidates;
    for (const auto& level : partition.all()) {
        auto ranked = by_magnitude(x, level);
        ranked.resize(std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(cap)));
        candidates.insert(candidates.end(), ranked.begin(), ranked.end());
    }
    auto ranked = by_magnitude(x, std::move(candidates));
    ranked.resize(static_cast<std::size_t>(s));
    // zero entries carry no mass; they are not part of the approximant's support
    std::erase_if(ranked, [&](Index i) { return x(i) == Complex{}; });
    std::sort(ranked.begin(), ranked.end());
    return ranked;
}

double best_distributed_error(const CVector& x, Index s, double lambda, const LevelPartition& partition) {
    const auto kept = best_distributed_support(x, s, lambda, partition);
    double err = x.cwiseAbs().sum();
    for (Index i : kept) err -= std::abs(x(i));
    return std::max(err, 0.0);
}

bool is_sparse_distributed(const CVector& x, Index s, double lambda, const LevelPartition& partition) {
    if (x.size() != partition.size()) throw DimensionError("is_sparse_distributed: length differs from partition");
    const Index cap = distributed_cap(s, lambda, partition.levels());
    std::vector<Index> counts(static_cast<std::size_t>(partition.levels()), 0);
    Index total = 0;
    for (Index i = 0; i < x.size(); ++i) {
        if (x(i) == Complex{}) continue;
        ++total;
        ++counts[static_cast<std::size_t>(partition.level_of(i))];
    }
    if (total > s) return false;
    return std::all_of(counts.begin(), counts.end(), [cap](Index c) { return c <= cap; });
}

std::vector<Index> support_of(const CVector& x) {
    std::vector<Index> out;
    for (Index i = 0; i < x.size(); ++i)
        if (x(i) != Complex{}) out.push_back(i);
    return out;
}

} // namespace pcs
