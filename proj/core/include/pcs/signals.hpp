#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pcs/common.hpp"

namespace pcs {

/// A partition {I_1, ..., I_D} of the coordinates {0, ..., N-1} into levels.
/// Levels are disjoint, cover every coordinate and are nonempty; indices inside
/// a level are kept sorted.
class LevelPartition {
public:
    LevelPartition(Index n, std::vector<std::vector<Index>> levels);

    /// D contiguous levels whose sizes differ by at most one (larger ones first).
    static LevelPartition equal(Index n, Index d);

    Index size() const { return n_; }
    Index levels() const { return static_cast<Index>(levels_.size()); }
    const std::vector<Index>& level(Index d) const { return levels_[static_cast<std::size_t>(d)]; }
    const std::vector<std::vector<Index>>& all() const { return levels_; }
    /// Level containing coordinate i.
    Index level_of(Index i) const { return owner_[static_cast<std::size_t>(i)]; }

    bool operator==(const LevelPartition& other) const { return n_ == other.n_ && levels_ == other.levels_; }

private:
    Index n_;
    std::vector<std::vector<Index>> levels_;
    std::vector<Index> owner_;
};

enum class ValueLaw { unit_complex_phase, gaussian };

ValueLaw value_law_from_string(std::string_view name);

enum class SignalModel { plain, in_levels, distributed };

struct SparseSignal {
    CVector x;
    std::vector<Index> support;       // sorted
    std::vector<Index> level_counts;  // empty for the plain model
    Index sparsity = 0;               // declared s
    SignalModel model = SignalModel::plain;
    double lambda = 0.0;              // distributed model only
};

/// s-sparse signal with support uniform over size-s subsets. s = 0 yields the
/// zero signal.
SparseSignal draw_sparse(Index n, Index s, std::uint64_t seed, ValueLaw law = ValueLaw::unit_complex_phase);

/// Per-level cap floor(lambda * s / D) of the sparse and lambda-distributed
/// model. Throws ConfigError when lambda is outside [1, D] or the cap is zero.
Index distributed_cap(Index s, double lambda, Index d);

/// Sparse and lambda-distributed signal: support uniform over all size-s sets
/// whose count in every level is at most distributed_cap(s, lambda, D).
SparseSignal draw_sparse_distributed(const LevelPartition& partition, Index s, double lambda, std::uint64_t seed,
                                     ValueLaw law = ValueLaw::unit_complex_phase);

/// sigma_s(x)_1: l1 mass outside the s largest-magnitude entries.
double best_s_term_error(const CVector& x, Index s);

/// sigma_{s,lambda,I}(x)_1: l1 error of the best approximation by a sparse and
/// lambda-distributed vector. Greedy by magnitude under the level caps, then
/// the total cap; ties go to the lower index.
double best_distributed_error(const CVector& x, Index s, double lambda, const LevelPartition& partition);

/// Nonzero entries kept by best_distributed_error, sorted.
std::vector<Index> best_distributed_support(const CVector& x, Index s, double lambda, const LevelPartition& partition);

/// Membership in Sigma_{s,lambda,I}.
bool is_sparse_distributed(const CVector& x, Index s, double lambda, const LevelPartition& partition);

std::vector<Index> support_of(const CVector& x);

} // namespace pcs
