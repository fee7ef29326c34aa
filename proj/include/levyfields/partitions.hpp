#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

// Set partitions of {1, ..., n} and the moment/cumulant transforms built on
// them.  Everything here is exact integer combinatorics; the transforms turn
// a per-block evaluator into a partition sum.
//
// Canonical form: blocks are listed in increasing order of their smallest
// element and each block lists its elements in increasing order.  The
// internal representation is a restricted-growth string (block label per
// element), which is compact enough to materialize all partitions at the
// hard cap n = 12 (Bell(12) = 4,213,597).

namespace levyfields::partitions {

inline constexpr int kMaxGroundSet = 12;

class SetPartition {
public:
    // Builds from a restricted-growth string: label[i] is the block index of
    // element i+1, labels start at 0 and each new label is exactly one more
    // than the maximum seen so far.
    SetPartition(int n, const std::array<std::uint8_t, kMaxGroundSet>& labels,
                 int block_count);

    // The empty partition of the empty set (used as the n = 0 pairing).
    SetPartition() = default;

    int ground_set_size() const { return n_; }
    int block_count() const { return block_count_; }

    // Block index (0-based, canonical order) of element e in [1, n].
    int block_of(int e) const { return labels_[static_cast<std::size_t>(e - 1)]; }

    // Blocks in canonical form.
    std::vector<std::vector<int>> blocks() const;
    std::vector<int> block(int b) const;
    std::vector<int> block_sizes() const;

    bool operator==(const SetPartition& other) const;

private:
    std::uint8_t n_ = 0;
    std::uint8_t block_count_ = 0;
    std::array<std::uint8_t, kMaxGroundSet> labels_{};
};

// All partitions of {1..n}.  Requires 1 <= n <= 12 (SizeError otherwise).
std::vector<SetPartition> all_partitions(int n);

// Partitions of {1..n} with exactly k blocks.  Requires 1 <= k <= n <= 12.
std::vector<SetPartition> partitions_into_k(int n, int k);

// Perfect matchings of {1..n}: all blocks of size 2.  Requires 0 <= n <= 12.
// Odd n yields an empty list; n = 0 yields the single empty partition.
std::vector<SetPartition> pairings(int n);

// Partitions of {1..m+n} with at least one block meeting both {1..m} and
// {m+1..m+n}.  Requires m, n >= 1 and m + n <= 12.
std::vector<SetPartition> crossing_partitions(int m, int n);

// Streaming enumeration (same order as all_partitions) without materializing
// the list; used by the transforms below.
void for_each_partition(int n, const std::function<void(const SetPartition&)>& visit);

// Evaluator of a single block; the block is in canonical (ascending) form.
using BlockEvaluator = std::function<double(const std::vector<int>&)>;

// Memoizing wrapper around a BlockEvaluator, keyed by the element set.
// Worth using whenever block evaluation is expensive (lattice sums): across
// the Bell(n) partitions only 2^n - 1 distinct blocks can occur.  Blocks are
// subsets of {1..12}, so the cache is a flat table indexed by bitmask.
class BlockCache {
public:
    explicit BlockCache(BlockEvaluator f);
    double operator()(const std::vector<int>& block);
    double eval_mask(std::uint16_t mask); // same cache, mask-addressed
    std::size_t evaluations() const { return evaluations_; }

private:
    BlockEvaluator f_;
    std::size_t evaluations_ = 0;
    std::vector<double> value_;
    std::vector<unsigned char> known_;
};

// Sum over all partitions of {1..n} of the product of per-block values:
// reconstructs a full n-point quantity from its connected parts.
// Requires 1 <= n <= 12.
double moments_from_truncated(const BlockEvaluator& truncated_part, int n);

// Inverse of moments_from_truncated: extracts the connected n-point part
// from an evaluator of full parts on subsets of {1..n}.  The two transforms
// are mutual inverses.  Requires 1 <= n <= 12.
double truncated_from_moments(const BlockEvaluator& full_part, int n);

} // namespace levyfields::partitions
