#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace treespace {

// Largest supported leaf set {0..63}.
inline constexpr int kMaxLeaves = 64;

// Bipartition of {0..leaf_count-1}; stores the side that contains leaf 0.
class Split {
public:
    Split() = default;
    Split(std::uint64_t zero_side_mask, int leaf_count);

    static Split from_labels(const std::vector<int>& zero_side, int leaf_count);
    // Pendant split isolating `leaf`.
    static Split pendant(int leaf, int leaf_count);

    std::uint64_t mask() const { return mask_; }
    std::uint64_t other_mask() const { return all_mask() & ~mask_; }
    std::uint64_t all_mask() const;
    int leaf_count() const { return leaf_count_; }

    int zero_side_size() const;
    int other_side_size() const { return leaf_count_ - zero_side_size(); }
    bool is_pendant() const { return zero_side_size() == 1 || other_side_size() == 1; }
    bool is_interior() const { return !is_pendant(); }
    // Leaf isolated by a pendant split; -1 for interior splits.
    int pendant_leaf() const;

    std::vector<int> zero_side() const;
    std::vector<int> other_side() const;
    std::string to_string() const;

    friend bool operator==(const Split& a, const Split& b) {
        return a.mask_ == b.mask_ && a.leaf_count_ == b.leaf_count_;
    }
    friend std::strong_ordering operator<=>(const Split& a, const Split& b) {
        if (auto c = a.leaf_count_ <=> b.leaf_count_; c != 0) return c;
        return a.mask_ <=> b.mask_;
    }

private:
    std::uint64_t mask_ = 1;
    int leaf_count_ = 0;
};

struct SplitHash {
    std::size_t operator()(const Split& s) const noexcept {
        return std::hash<std::uint64_t>{}(s.mask() * 0x9E3779B97F4A7C15ULL) ^
               static_cast<std::size_t>(s.leaf_count());
    }
};

// Compatibility on raw zero-side masks of a common leaf set.
inline bool masks_compatible(std::uint64_t a, std::uint64_t b, std::uint64_t all) {
    return (a & b) == a || (a & b) == b || (a | b) == all;
}

bool splits_compatible(const Split& a, const Split& b);
bool is_compatible_set(const std::vector<Split>& splits);

// All splits of {0..r} with at least two leaves on each side, ordered by mask.
std::vector<Split> enumerate_interior_splits(int r);

// All maximal pairwise-compatible subsets of `splits` (each sorted).
std::vector<std::vector<Split>> maximal_compatible_sets(const std::vector<Split>& splits);

}  // namespace treespace
