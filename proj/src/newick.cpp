#include "treespace/newick.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>

namespace treespace {

namespace {

struct Node {
    std::vector<int> children;
    int leaf = -1;
    std::optional<double> length;
    std::uint64_t below = 0;
};

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    std::vector<Node> nodes;

    int parse_tree() {
        skip_ws();
        const int root = parse_subtree();
        skip_ws();
        if (!eat(';')) fail("expected ';'");
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters after ';'");
        return root;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw NewickError("newick: " + msg + " at offset " + std::to_string(pos_));
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    std::string_view token() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || std::isspace(static_cast<unsigned char>(c)))
                break;
            ++pos_;
        }
        return s_.substr(start, pos_ - start);
    }

    int parse_subtree() {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (eat('(')) {
            do {
                const int child = parse_subtree();
                nodes[id].children.push_back(child);
            } while (eat(','));
            if (!eat(')')) fail("expected ')' or ','");
            token();  // internal node labels are ignored
        } else {
            const auto label = token();
            if (label.empty()) fail("missing leaf label");
            int v = 0;
            auto [p, ec] = std::from_chars(label.data(), label.data() + label.size(), v);
            if (ec != std::errc() || p != label.data() + label.size() || v < 0)
                fail("leaf label '" + std::string(label) + "' is not a nonnegative integer");
            if (v >= kMaxLeaves) fail("leaf label too large");
            nodes[id].leaf = v;
        }
        if (eat(':')) {
            const auto num = token();
            double len = 0.0;
            auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), len);
            if (num.empty() || ec != std::errc() || p != num.data() + num.size())
                fail("branch length '" + std::string(num) + "' is not a number");
            if (!(len >= 0.0) || !std::isfinite(len)) fail("negative or non-finite branch length");
            nodes[id].length = len;
        }
        return id;
    }
};

}  // namespace

Tree parse_newick(std::string_view text, std::vector<std::string>* warnings) {
    Parser parser(text);
    const int root = parser.parse_tree();
    auto& nodes = parser.nodes;

    std::uint64_t seen = 0;
    int max_label = -1;
    for (const auto& nd : nodes) {
        if (nd.leaf < 0) continue;
        if (seen >> nd.leaf & 1ULL) throw NewickError("newick: duplicate leaf label " + std::to_string(nd.leaf));
        seen |= 1ULL << nd.leaf;
        max_label = std::max(max_label, nd.leaf);
    }
    const int n = max_label + 1;
    if (n < 3) throw NewickError("newick: need at least 3 leaves");
    const std::uint64_t all = n >= 64 ? ~0ULL : (1ULL << n) - 1;
    if (seen != all) {
        for (int i = 0; i < n; ++i)
            if (!(seen >> i & 1ULL)) throw NewickError("newick: missing leaf label " + std::to_string(i));
    }

    // Children always have larger ids than parents.
    for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
        auto& nd = nodes[i];
        if (nd.leaf >= 0) nd.below = 1ULL << nd.leaf;
        for (int c : nd.children) nd.below |= nodes[c].below;
    }

    std::vector<double> pendants(n, 0.0);
    std::map<std::uint64_t, double> interior;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        if (i == root) continue;
        const auto& nd = nodes[i];
        if (!nd.length) throw NewickError("newick: missing branch length");
        std::uint64_t zero = (nd.below & 1ULL) ? nd.below : (all & ~nd.below);
        if (zero == all) continue;
        const Split s(zero, n);
        if (s.is_pendant())
            pendants[s.pendant_leaf()] += *nd.length;
        else
            interior[zero] += *nd.length;
    }

    std::vector<Edge> edges;
    for (const auto& [mask, len] : interior) {
        Split s(mask, n);
        if (len == 0.0) {
            if (warnings) warnings->push_back("contracted zero-length edge " + s.to_string());
            continue;
        }
        edges.push_back({s, len});
    }
    try {
        return Tree(n, std::move(edges), std::move(pendants));
    } catch (const std::invalid_argument& e) {
        throw NewickError(std::string("newick: ") + e.what());
    }
}

std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string write_newick(const Tree& t) {
    const int n = t.leaf_count();
    struct Clade {
        std::uint64_t mask;
        double length;
        int leaf;
    };
    std::vector<Clade> clades;
    for (int j = 1; j < n; ++j) clades.push_back({1ULL << j, t.pendants()[j], j});
    for (const auto& e : t.interior()) clades.push_back({e.split.other_mask(), e.length, -1});
    // Larger clades first so every clade's parent precedes it.
    std::sort(clades.begin(), clades.end(), [](const Clade& a, const Clade& b) {
        const int pa = std::popcount(a.mask), pb = std::popcount(b.mask);
        if (pa != pb) return pa > pb;
        return a.mask < b.mask;
    });
    const int m = static_cast<int>(clades.size());
    std::vector<int> parent(m, -1);
    for (int i = 0; i < m; ++i)
        for (int j = i - 1; j >= 0; --j)
            if ((clades[i].mask & clades[j].mask) == clades[i].mask && clades[i].mask != clades[j].mask) {
                // Nearest enclosing clade is the smallest one containing it.
                if (parent[i] < 0 || std::popcount(clades[j].mask) < std::popcount(clades[parent[i]].mask))
                    parent[i] = j;
            }
    std::vector<std::vector<int>> kids(m);
    std::vector<int> top;
    for (int i = 0; i < m; ++i) (parent[i] < 0 ? top : kids[parent[i]]).push_back(i);
    auto by_min_leaf = [&](int a, int b) { return std::countr_zero(clades[a].mask) < std::countr_zero(clades[b].mask); };

    std::string out;
    auto emit = [&](auto&& self, int i) -> void {
        const auto& c = clades[i];
        if (c.leaf >= 0) {
            out += std::to_string(c.leaf);
        } else {
            auto& ks = kids[i];
            std::sort(ks.begin(), ks.end(), by_min_leaf);
            out += '(';
            for (std::size_t k = 0; k < ks.size(); ++k) {
                if (k) out += ',';
                self(self, ks[k]);
            }
            out += ')';
        }
        out += ':';
        out += format_number(c.length);
    };
    std::sort(top.begin(), top.end(), by_min_leaf);
    out += "(0:" + format_number(t.pendants()[0]);
    for (int i : top) {
        out += ',';
        emit(emit, i);
    }
    out += ");";
    return out;
}

}  // namespace treespace
