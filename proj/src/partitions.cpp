#include "levyfields/partitions.hpp"

#include <algorithm>
#include <bit>

#include "levyfields/errors.hpp"

namespace levyfields::partitions {

namespace {

void require_ground_set(int n, int lo, const char* what) {
    if (n < lo || n > kMaxGroundSet) {
        throw SizeError(std::string(what) + ": ground set size " + std::to_string(n) +
                        " outside [" + std::to_string(lo) + ", " +
                        std::to_string(kMaxGroundSet) + "]");
    }
}

std::vector<int> mask_to_block(std::uint16_t mask) {
    std::vector<int> block;
    for (int e = 1; e <= kMaxGroundSet; ++e)
        if (mask & (1u << (e - 1))) block.push_back(e);
    return block;
}

} // namespace

SetPartition::SetPartition(int n, const std::array<std::uint8_t, kMaxGroundSet>& labels,
                           int block_count)
    : n_(static_cast<std::uint8_t>(n)),
      block_count_(static_cast<std::uint8_t>(block_count)),
      labels_(labels) {
    require_ground_set(n, 1, "SetPartition");
    int max_seen = -1;
    for (int i = 0; i < n; ++i) {
        const int l = labels[static_cast<std::size_t>(i)];
        if (l > max_seen + 1)
            throw Error("SetPartition: labels are not a restricted-growth string");
        max_seen = std::max(max_seen, l);
    }
    if (max_seen + 1 != block_count)
        throw Error("SetPartition: block count does not match labels");
}

std::vector<std::vector<int>> SetPartition::blocks() const {
    // Restricted growth guarantees canonical order: label b first occurs at
    // the minimum of block b, and first occurrences are increasing in b.
    std::vector<std::vector<int>> out(block_count_);
    for (int e = 1; e <= n_; ++e) out[static_cast<std::size_t>(block_of(e))].push_back(e);
    return out;
}

std::vector<int> SetPartition::block(int b) const {
    std::vector<int> out;
    for (int e = 1; e <= n_; ++e)
        if (block_of(e) == b) out.push_back(e);
    return out;
}

std::vector<int> SetPartition::block_sizes() const {
    std::vector<int> sizes(static_cast<std::size_t>(block_count_), 0);
    for (int e = 1; e <= n_; ++e) ++sizes[static_cast<std::size_t>(block_of(e))];
    return sizes;
}

bool SetPartition::operator==(const SetPartition& other) const {
    return n_ == other.n_ && block_count_ == other.block_count_ && labels_ == other.labels_;
}

void for_each_partition(int n, const std::function<void(const SetPartition&)>& visit) {
    require_ground_set(n, 1, "for_each_partition");
    std::array<std::uint8_t, kMaxGroundSet> labels{};
    // Iterate restricted-growth strings in lexicographic order.
    auto walk = [&](auto&& self, int pos, int max_label) -> void {
        if (pos == n) {
            visit(SetPartition(n, labels, max_label + 1));
            return;
        }
        for (int l = 0; l <= max_label + 1; ++l) {
            labels[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(l);
            self(self, pos + 1, std::max(max_label, l));
        }
    };
    walk(walk, 0, -1);
}

std::vector<SetPartition> all_partitions(int n) {
    require_ground_set(n, 1, "all_partitions");
    std::vector<SetPartition> out;
    for_each_partition(n, [&](const SetPartition& p) { out.push_back(p); });
    return out;
}

std::vector<SetPartition> partitions_into_k(int n, int k) {
    require_ground_set(n, 1, "partitions_into_k");
    if (k < 1 || k > n)
        throw SizeError("partitions_into_k: block count " + std::to_string(k) +
                        " outside [1, " + std::to_string(n) + "]");
    std::vector<SetPartition> out;
    std::array<std::uint8_t, kMaxGroundSet> labels{};
    // Prune: with `used` labels so far and `rest` elements left, the final
    // label count lies in [used, used + rest].
    auto walk = [&](auto&& self, int pos, int used) -> void {
        if (pos == n) {
            if (used == k) out.push_back(SetPartition(n, labels, used));
            return;
        }
        const int rest = n - pos;
        for (int l = 0; l <= used; ++l) {
            const int next_used = (l == used) ? used + 1 : used;
            if (next_used > k || next_used + rest - 1 < k) continue;
            labels[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(l);
            self(self, pos + 1, next_used);
        }
    };
    walk(walk, 0, 0);
    return out;
}

std::vector<SetPartition> pairings(int n) {
    if (n < 0 || n > kMaxGroundSet)
        throw SizeError("pairings: ground set size " + std::to_string(n) +
                        " outside [0, " + std::to_string(kMaxGroundSet) + "]");
    if (n == 0) return {SetPartition()};
    if (n % 2 != 0) return {};
    std::vector<SetPartition> out;
    std::array<std::uint8_t, kMaxGroundSet> labels{};
    std::array<bool, kMaxGroundSet + 1> paired{};
    // Match the smallest unpaired element with every later unpaired one.
    auto walk = [&](auto&& self, int next_label) -> void {
        int first = 0;
        for (int e = 1; e <= n; ++e)
            if (!paired[static_cast<std::size_t>(e)]) { first = e; break; }
        if (first == 0) {
            out.push_back(SetPartition(n, labels, next_label));
            return;
        }
        paired[static_cast<std::size_t>(first)] = true;
        labels[static_cast<std::size_t>(first - 1)] = static_cast<std::uint8_t>(next_label);
        for (int partner = first + 1; partner <= n; ++partner) {
            if (paired[static_cast<std::size_t>(partner)]) continue;
            paired[static_cast<std::size_t>(partner)] = true;
            labels[static_cast<std::size_t>(partner - 1)] = static_cast<std::uint8_t>(next_label);
            self(self, next_label + 1);
            paired[static_cast<std::size_t>(partner)] = false;
        }
        paired[static_cast<std::size_t>(first)] = false;
    };
    walk(walk, 0);
    return out;
}

std::vector<SetPartition> crossing_partitions(int m, int n) {
    if (m < 1 || n < 1)
        throw SizeError("crossing_partitions: both group sizes must be >= 1");
    require_ground_set(m + n, 2, "crossing_partitions");
    std::vector<SetPartition> out;
    for_each_partition(m + n, [&](const SetPartition& p) {
        for (const auto& block : p.blocks()) {
            // Canonical blocks are ascending: front/back are min/max.
            if (block.front() <= m && block.back() > m) {
                out.push_back(p);
                return;
            }
        }
    });
    return out;
}

BlockCache::BlockCache(BlockEvaluator f)
    : f_(std::move(f)),
      value_(std::size_t{1} << kMaxGroundSet, 0.0),
      known_(std::size_t{1} << kMaxGroundSet, 0) {}

double BlockCache::eval_mask(std::uint16_t mask) {
    if (!known_[mask]) {
        value_[mask] = f_(mask_to_block(mask));
        known_[mask] = 1;
        ++evaluations_;
    }
    return value_[mask];
}

double BlockCache::operator()(const std::vector<int>& block) {
    std::uint16_t mask = 0;
    for (int e : block) {
        if (e < 1 || e > kMaxGroundSet) throw SizeError("BlockCache: element outside {1..12}");
        mask |= static_cast<std::uint16_t>(1u << (e - 1));
    }
    return eval_mask(mask);
}

double moments_from_truncated(const BlockEvaluator& truncated_part, int n) {
    require_ground_set(n, 1, "moments_from_truncated");
    BlockCache cache(truncated_part);
    double total = 0.0;
    // Accumulate the per-partition block product during the restricted-growth
    // walk itself; converting labels to block masks on the fly avoids
    // materializing Bell(n) partition objects.
    std::array<std::uint16_t, kMaxGroundSet> block_mask{};
    auto walk = [&](auto&& self, int pos, int used, double product) -> void {
        if (pos == n) {
            total += product;
            return;
        }
        const std::uint16_t bit = static_cast<std::uint16_t>(1u << pos);
        for (int l = 0; l <= used; ++l) {
            const bool fresh = (l == used);
            const std::uint16_t prev = fresh ? 0 : block_mask[static_cast<std::size_t>(l)];
            const std::uint16_t next = static_cast<std::uint16_t>(prev | bit);
            block_mask[static_cast<std::size_t>(l)] = next;
            // A block's factor enters only once the block is final, i.e. when
            // the element is placed we divide out the old value and multiply
            // the new one; start from factor 1 for a fresh block.
            const double old_factor = fresh ? 1.0 : cache.eval_mask(prev);
            double next_product;
            if (old_factor != 0.0) {
                next_product = product / old_factor * cache.eval_mask(next);
            } else {
                // Rebuild the product from scratch when a zero factor blocks
                // the incremental update.
                next_product = 1.0;
                for (int b = 0; b < used + (fresh ? 1 : 0); ++b)
                    next_product *= cache.eval_mask(block_mask[static_cast<std::size_t>(b)]);
            }
            self(self, pos + 1, used + (fresh ? 1 : 0), next_product);
            block_mask[static_cast<std::size_t>(l)] = prev;
        }
    };
    walk(walk, 0, 0, 1.0);
    return total;
}

double truncated_from_moments(const BlockEvaluator& full_part, int n) {
    require_ground_set(n, 1, "truncated_from_moments");
    BlockCache full(full_part);
    // Connected part on each subset S, via the recursion obtained by singling
    // out the component containing min(S):
    //   full(S) = sum over B with min(S) in B subset S of conn(B) * full(S \ B)
    // where full(empty) = 1.  Solving for conn(S) needs conn on smaller
    // subsets only, so one pass in order of increasing mask suffices.
    const std::uint32_t full_mask = (std::uint32_t{1} << n) - 1;
    std::vector<double> conn(full_mask + 1, 0.0);
    for (std::uint32_t s = 1; s <= full_mask; ++s) {
        const std::uint32_t low = s & (~s + 1); // bit of min(S)
        const std::uint32_t rest = s & ~low;
        double subtracted = 0.0;
        // Proper sub-blocks B = low | t with t a proper subset of rest.
        for (std::uint32_t t = rest; ; t = (t - 1) & rest) {
            const std::uint32_t b = low | t;
            if (b != s) {
                const std::uint32_t complement = s & ~b;
                subtracted += conn[b] * full.eval_mask(static_cast<std::uint16_t>(complement));
            }
            if (t == 0) break;
        }
        conn[s] = full.eval_mask(static_cast<std::uint16_t>(s)) - subtracted;
    }
    return conn[full_mask];
}

} // namespace levyfields::partitions
