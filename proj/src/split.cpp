#include "treespace/split.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <stdexcept>

namespace treespace {

namespace {

std::uint64_t full_mask(int leaf_count) {
    return leaf_count >= 64 ? ~0ULL : ((1ULL << leaf_count) - 1);
}

}  // namespace

Split::Split(std::uint64_t zero_side_mask, int leaf_count) : mask_(zero_side_mask), leaf_count_(leaf_count) {
    if (leaf_count < 2 || leaf_count > kMaxLeaves)
        throw std::invalid_argument("split: leaf count out of range");
    if (!(zero_side_mask & 1ULL))
        throw std::invalid_argument("split: zero side must contain leaf 0");
    if (zero_side_mask & ~full_mask(leaf_count))
        throw std::invalid_argument("split: label outside leaf set");
    if (zero_side_mask == full_mask(leaf_count))
        throw std::invalid_argument("split: zero side must be a proper subset");
}

Split Split::from_labels(const std::vector<int>& zero_side, int leaf_count) {
    std::uint64_t m = 0;
    for (int v : zero_side) {
        if (v < 0 || v >= leaf_count || v >= kMaxLeaves)
            throw std::invalid_argument("split: label outside leaf set");
        m |= 1ULL << v;
    }
    return Split(m, leaf_count);
}

Split Split::pendant(int leaf, int leaf_count) {
    if (leaf < 0 || leaf >= leaf_count) throw std::invalid_argument("split: leaf outside leaf set");
    if (leaf == 0) return Split(1ULL, leaf_count);
    return Split(full_mask(leaf_count) & ~(1ULL << leaf), leaf_count);
}

std::uint64_t Split::all_mask() const { return full_mask(leaf_count_); }

int Split::zero_side_size() const { return std::popcount(mask_); }

int Split::pendant_leaf() const {
    if (zero_side_size() == 1) return 0;
    if (other_side_size() == 1) return std::countr_zero(other_mask());
    return -1;
}

std::vector<int> Split::zero_side() const {
    std::vector<int> out;
    for (int i = 0; i < leaf_count_; ++i)
        if (mask_ >> i & 1ULL) out.push_back(i);
    return out;
}

std::vector<int> Split::other_side() const {
    std::vector<int> out;
    for (int i = 0; i < leaf_count_; ++i)
        if (!(mask_ >> i & 1ULL)) out.push_back(i);
    return out;
}

std::string Split::to_string() const {
    auto side = [](const std::vector<int>& v) {
        std::string s = "{";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v[i]);
        }
        return s + "}";
    };
    return side(zero_side()) + "|" + side(other_side());
}

bool splits_compatible(const Split& a, const Split& b) {
    if (a.leaf_count() != b.leaf_count())
        throw std::invalid_argument("splits_compatible: leaf counts differ");
    return masks_compatible(a.mask(), b.mask(), a.all_mask());
}

bool is_compatible_set(const std::vector<Split>& splits) {
    for (std::size_t i = 0; i < splits.size(); ++i)
        for (std::size_t j = i + 1; j < splits.size(); ++j)
            if (!splits_compatible(splits[i], splits[j])) return false;
    return true;
}

std::vector<Split> enumerate_interior_splits(int r) {
    if (r < 3) throw std::invalid_argument("enumerate_interior_splits: r must be at least 3");
    if (r + 1 > kMaxLeaves) throw std::invalid_argument("enumerate_interior_splits: too many leaves");
    if (r > 24) throw std::invalid_argument("enumerate_interior_splits: r too large to enumerate");
    const int n = r + 1;
    std::vector<Split> out;
    for (std::uint64_t rest = 1; rest < (1ULL << r); ++rest) {
        const int k = std::popcount(rest);
        if (k < 1 || k > r - 2) continue;
        out.emplace_back((rest << 1) | 1ULL, n);
    }
    return out;
}

std::vector<std::vector<Split>> maximal_compatible_sets(const std::vector<Split>& splits) {
    const std::size_t m = splits.size();
    std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            adj[i][j] = (i != j) && splits_compatible(splits[i], splits[j]);

    std::vector<std::vector<Split>> out;
    std::vector<std::size_t> current;
    std::function<void(std::vector<std::size_t>, std::vector<std::size_t>)> bron_kerbosch =
        [&](std::vector<std::size_t> p, std::vector<std::size_t> x) {
            if (p.empty() && x.empty()) {
                std::vector<Split> clique;
                for (auto i : current) clique.push_back(splits[i]);
                std::sort(clique.begin(), clique.end());
                out.push_back(std::move(clique));
                return;
            }
            while (!p.empty()) {
                const std::size_t v = p.back();
                p.pop_back();
                std::vector<std::size_t> np, nx;
                for (auto u : p) if (adj[v][u]) np.push_back(u);
                for (auto u : x) if (adj[v][u]) nx.push_back(u);
                current.push_back(v);
                bron_kerbosch(np, nx);
                current.pop_back();
                x.push_back(v);
            }
        };
    std::vector<std::size_t> all(m);
    for (std::size_t i = 0; i < m; ++i) all[i] = i;
    bron_kerbosch(all, {});
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace treespace
