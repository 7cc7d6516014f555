#include "treespace/geodesic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>

namespace treespace {

namespace {

constexpr double kInf = 1e300;

struct CoverResult {
    std::uint64_t left = 0;   // members of the cover among the A side
    std::uint64_t right = 0;  // members of the cover among the B side
    double weight = 0.0;
};

// Minimum-weight vertex cover of a bipartite graph by max-flow / min-cut.
// inc[i] has bit j set when left i and right j are adjacent. A forced left
// vertex is kept in the cover by an unbounded edge to the sink; a forced
// right vertex by an unbounded edge from the source.
CoverResult min_vertex_cover(const std::vector<double>& wa, const std::vector<double>& wb,
                             const std::vector<std::uint64_t>& inc, int force_a = -1, int force_b = -1,
                             int exclude_a = -1) {
    const int p = static_cast<int>(wa.size()), q = static_cast<int>(wb.size());
    const int n = p + q + 2, src = 0, snk = n - 1;
    std::vector<double> cap(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [n](int u, int v) { return static_cast<std::size_t>(u) * n + v; };
    for (int i = 0; i < p; ++i) {
        cap[at(src, 1 + i)] = wa[i];
        for (int j = 0; j < q; ++j)
            if (inc[i] >> j & 1ULL) cap[at(1 + i, 1 + p + j)] = kInf;
    }
    for (int j = 0; j < q; ++j) cap[at(1 + p + j, snk)] = wb[j];
    if (force_a >= 0) cap[at(1 + force_a, snk)] = kInf;
    if (force_b >= 0) cap[at(src, 1 + p + force_b)] = kInf;
    if (exclude_a >= 0) cap[at(src, 1 + exclude_a)] = kInf;

    std::vector<double> res = cap;
    std::vector<int> prev(n);
    auto bfs = [&]() {
        std::fill(prev.begin(), prev.end(), -1);
        prev[src] = src;
        std::deque<int> queue{src};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v = 0; v < n; ++v)
                if (prev[v] < 0 && res[at(u, v)] > 0.0) {
                    prev[v] = u;
                    queue.push_back(v);
                }
        }
        return prev[snk] >= 0;
    };
    while (bfs()) {
        double f = kInf;
        for (int v = snk; v != src; v = prev[v]) f = std::min(f, res[at(prev[v], v)]);
        if (f >= kInf) break;  // unbounded path: both forced vertices adjacent through infinite edges
        for (int v = snk; v != src; v = prev[v]) {
            const int u = prev[v];
            res[at(u, v)] -= f;
            res[at(v, u)] += f;
            if (res[at(u, v)] <= 1e-13 * cap[at(u, v)]) res[at(u, v)] = 0.0;
        }
    }
    bfs();  // prev marks the source side of the minimum cut
    CoverResult out;
    for (int i = 0; i < p; ++i)
        if (prev[1 + i] < 0) {
            out.left |= 1ULL << i;
            out.weight += wa[i];
        }
    for (int j = 0; j < q; ++j)
        if (prev[1 + p + j] >= 0) {
            out.right |= 1ULL << j;
            out.weight += wb[j];
        }
    return out;
}

// Local pair representation: indices into x.interior() and t.interior().
struct IdxPair {
    std::vector<int> a, b;
};

struct Prepared {
    std::vector<std::uint64_t> inc;  // per x edge: incompatible t edges
    std::vector<int> a_all, b_all;
    std::vector<Split> common;
    double common_sq = 0.0;
};

Prepared prepare(const Tree& x, const Tree& t) {
    if (x.leaf_count() != t.leaf_count()) throw std::invalid_argument("geodesic: leaf counts differ");
    const auto& xe = x.interior();
    const auto& te = t.interior();
    if (te.size() > 63 || xe.size() > 63) throw std::invalid_argument("geodesic: tree too large");
    const std::uint64_t all = xe.empty() ? 0 : xe[0].split.all_mask();
    Prepared pr;
    pr.inc.assign(xe.size(), 0);
    std::uint64_t t_bad = 0;
    for (std::size_t i = 0; i < xe.size(); ++i)
        for (std::size_t j = 0; j < te.size(); ++j)
            if (!masks_compatible(xe[i].split.mask(), te[j].split.mask(), all)) {
                pr.inc[i] |= 1ULL << j;
                t_bad |= 1ULL << j;
            }
    // Merge the two sorted edge lists to find common splits.
    std::size_t i = 0, j = 0;
    while (i < xe.size() || j < te.size()) {
        const bool take_x = j >= te.size() || (i < xe.size() && xe[i].split < te[j].split);
        const bool take_t = i >= xe.size() || (j < te.size() && te[j].split < xe[i].split);
        if (take_x) {
            if (pr.inc[i] == 0) {
                pr.common.push_back(xe[i].split);
                pr.common_sq += xe[i].length * xe[i].length;
            } else {
                pr.a_all.push_back(static_cast<int>(i));
            }
            ++i;
        } else if (take_t) {
            if (!(t_bad >> j & 1ULL)) {
                pr.common.push_back(te[j].split);
                pr.common_sq += te[j].length * te[j].length;
            } else {
                pr.b_all.push_back(static_cast<int>(j));
            }
            ++j;
        } else {  // shared split
            pr.common.push_back(xe[i].split);
            const double d = xe[i].length - te[j].length;
            pr.common_sq += d * d;
            ++i;
            ++j;
        }
    }
    for (int k = 0; k < x.leaf_count(); ++k) {
        const double d = x.pendants()[k] - t.pendants()[k];
        pr.common_sq += d * d;
    }
    return pr;
}

double sq_norm(const std::vector<Edge>& edges, const std::vector<int>& idx) {
    double s = 0.0;
    for (int k : idx) s += edges[k].length * edges[k].length;
    return s;
}

// Splits (A,B) when a nontrivial vertex cover of weight below one exists.
bool try_split(const Tree& x, const Tree& t, const Prepared& pr, const IdxPair& pair, IdxPair& first, IdxPair& second) {
    const int p = static_cast<int>(pair.a.size()), q = static_cast<int>(pair.b.size());
    if (p < 2 || q < 2) return false;
    const auto& xe = x.interior();
    const auto& te = t.interior();
    const double na = sq_norm(xe, pair.a), nb = sq_norm(te, pair.b);
    std::vector<double> wa(p), wb(q);
    for (int i = 0; i < p; ++i) wa[i] = xe[pair.a[i]].length * xe[pair.a[i]].length / na;
    for (int j = 0; j < q; ++j) wb[j] = te[pair.b[j]].length * te[pair.b[j]].length / nb;
    std::vector<std::uint64_t> inc(p, 0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j)
            if (pr.inc[pair.a[i]] >> pair.b[j] & 1ULL) inc[i] |= 1ULL << j;

    CoverResult best = min_vertex_cover(wa, wb, inc);
    if (best.weight >= 1.0 - kRatioTol) return false;
    if (best.left == 0 || best.right == 0) {
        best.weight = kInf;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < q; ++j) {
                auto c = min_vertex_cover(wa, wb, inc, i, j);
                if (c.weight < best.weight) best = c;
            }
        if (best.weight >= 1.0 - kRatioTol) return false;
    }
    first = {};
    second = {};
    for (int i = 0; i < p; ++i) (best.left >> i & 1ULL ? first.a : second.a).push_back(pair.a[i]);
    for (int j = 0; j < q; ++j) (best.right >> j & 1ULL ? second.b : first.b).push_back(pair.b[j]);
    return !first.a.empty() && !first.b.empty() && !second.a.empty() && !second.b.empty();
}

Geodesic assemble(const Tree& x, const Tree& t, const Prepared& pr, const std::vector<IdxPair>& pairs) {
    Geodesic g;
    g.x = x;
    g.t = t;
    g.common = pr.common;
    double sq = pr.common_sq;
    for (const auto& pp : pairs) {
        SupportPair sp;
        for (int k : pp.a) sp.a.push_back(x.interior()[k].split);
        for (int k : pp.b) sp.b.push_back(t.interior()[k].split);
        const double na = std::sqrt(sq_norm(x.interior(), pp.a));
        const double nb = std::sqrt(sq_norm(t.interior(), pp.b));
        g.a_norms.push_back(na);
        g.b_norms.push_back(nb);
        sq += (na + nb) * (na + nb);
        g.support.pairs.push_back(std::move(sp));
    }
    g.length = std::sqrt(sq);
    return g;
}

// Maps a split-based support onto edge indices; throws unless it partitions
// the incompatible edge sets.
std::vector<IdxPair> index_support(const Tree& x, const Tree& t, const Prepared& pr, const SupportSequence& s) {
    std::vector<IdxPair> out;
    std::vector<int> used_a(x.num_interior(), 0), used_b(t.num_interior(), 0);
    for (const auto& sp : s.pairs) {
        if (sp.a.empty() || sp.b.empty()) throw std::invalid_argument("support: empty support set");
        IdxPair ip;
        for (const auto& e : sp.a) {
            auto k = x.index_of(e);
            if (!k || pr.inc[*k] == 0) throw std::invalid_argument("support: A edge not an incompatible edge of x");
            if (used_a[*k]++) throw std::invalid_argument("support: A edge used twice");
            ip.a.push_back(static_cast<int>(*k));
        }
        for (const auto& e : sp.b) {
            auto k = t.index_of(e);
            if (!k || std::find(pr.b_all.begin(), pr.b_all.end(), static_cast<int>(*k)) == pr.b_all.end())
                throw std::invalid_argument("support: B edge not an incompatible edge of t");
            if (used_b[*k]++) throw std::invalid_argument("support: B edge used twice");
            ip.b.push_back(static_cast<int>(*k));
        }
        out.push_back(std::move(ip));
    }
    for (int k : pr.a_all)
        if (!used_a[k]) throw std::invalid_argument("support: A sets do not cover the incompatible edges of x");
    for (int k : pr.b_all)
        if (!used_b[k]) throw std::invalid_argument("support: B sets do not cover the incompatible edges of t");
    return out;
}

bool cross_compatible(const Prepared& pr, const IdxPair& later, const IdxPair& earlier) {
    for (int a : later.a)
        for (int b : earlier.b)
            if (pr.inc[a] >> b & 1ULL) return false;
    return true;
}

// Minimum weight over nontrivial partitions with C2 u D1 compatible.
// Smallest cover weight over splits of A into nonempty C1 (in the cover) and
// C2 (outside it). The B side may be split trivially: D2 empty means C2 is
// compatible with all of B, which always beats the pair. D1 empty never does.
double min_nontrivial_cover(const Tree& x, const Tree& t, const Prepared& pr, const IdxPair& pair, int exhaustive_limit) {
    const int p = static_cast<int>(pair.a.size()), q = static_cast<int>(pair.b.size());
    if (p < 2) return kInf;
    const auto& xe = x.interior();
    const auto& te = t.interior();
    const double na = sq_norm(xe, pair.a), nb = sq_norm(te, pair.b);
    std::vector<double> wa(p), wb(q);
    for (int i = 0; i < p; ++i) wa[i] = xe[pair.a[i]].length * xe[pair.a[i]].length / na;
    for (int j = 0; j < q; ++j) wb[j] = te[pair.b[j]].length * te[pair.b[j]].length / nb;
    std::vector<std::uint64_t> inc(p, 0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j)
            if (pr.inc[pair.a[i]] >> pair.b[j] & 1ULL) inc[i] |= 1ULL << j;
    const std::uint64_t fa = (1ULL << p) - 1, fb = (1ULL << q) - 1;

    double best = kInf;
    if (p + q <= exhaustive_limit) {
        // c2: independent part of A; d1: independent part of B.
        for (std::uint64_t c2 = 1; c2 < fa; ++c2) {
            std::uint64_t forbidden = 0;
            double wc1 = 0.0;
            for (int i = 0; i < p; ++i) {
                if (c2 >> i & 1ULL) forbidden |= inc[i];
                else wc1 += wa[i];
            }
            const std::uint64_t allowed = fb & ~forbidden;
            for (std::uint64_t d1 = allowed; d1; d1 = (d1 - 1) & allowed) {
                double wd2 = 0.0;
                for (int j = 0; j < q; ++j)
                    if (!(d1 >> j & 1ULL)) wd2 += wb[j];
                best = std::min(best, wc1 + wd2);
            }
        }
        return best;
    }
    for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) {
            if (k == i) continue;
            auto c = min_vertex_cover(wa, wb, inc, i, -1, k);
            if (c.left != 0 && c.left != fa && c.right != fb) best = std::min(best, c.weight);
        }
    return best;
}

}  // namespace

const char* to_string(SupportClassification c) {
    switch (c) {
        case SupportClassification::FacetInterior: return "facet_interior";
        case SupportClassification::CellBoundary: return "cell_boundary";
        case SupportClassification::Invalid: return "invalid";
    }
    return "?";
}

double split_norm(const Tree& tree, const std::vector<Split>& splits) {
    double s = 0.0;
    for (const auto& e : splits) {
        const double v = tree.length(e);
        s += v * v;
    }
    return std::sqrt(s);
}

Geodesic compute_geodesic(const Tree& x, const Tree& t) {
    const Prepared pr = prepare(x, t);
    std::vector<IdxPair> pairs;
    if (!pr.a_all.empty()) {
        pairs.push_back({pr.a_all, pr.b_all});
        std::size_t i = 0;
        IdxPair first, second;
        while (i < pairs.size()) {
            if (try_split(x, t, pr, pairs[i], first, second)) {
                pairs[i] = std::move(first);
                pairs.insert(pairs.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(second));
            } else {
                ++i;
            }
        }
    }
    return assemble(x, t, pr, pairs);
}

double distance(const Tree& x, const Tree& t) { return compute_geodesic(x, t).length; }

Geodesic make_geodesic(const Tree& x, const Tree& t, const SupportSequence& s) {
    const Prepared pr = prepare(x, t);
    return assemble(x, t, pr, index_support(x, t, pr, s));
}

double path_length(const Tree& x, const Tree& t, const SupportSequence& s) { return make_geodesic(x, t, s).length; }

int leg_index(const Geodesic& g, double lambda) {
    int l = 0;
    for (std::size_t j = 0; j < g.support.size(); ++j)
        if (lambda * g.b_norms[j] > (1.0 - lambda) * g.a_norms[j]) ++l;
    return l;
}

Tree point_at(const Geodesic& g, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("point_at: lambda outside [0,1]");
    if (lambda == 0.0) return g.x;
    if (lambda == 1.0) return g.t;
    const double mu = 1.0 - lambda;
    std::vector<Edge> edges;
    edges.reserve(g.x.num_interior() + g.t.num_interior());
    for (const auto& s : g.common) {
        const double v = mu * g.x.length(s) + lambda * g.t.length(s);
        if (v > 0.0) edges.push_back({s, v});
    }
    const int l = leg_index(g, lambda);
    for (std::size_t j = 0; j < g.support.size(); ++j) {
        const auto& sp = g.support.pairs[j];
        const double na = g.a_norms[j], nb = g.b_norms[j];
        if (static_cast<int>(j) < l) {
            const double f = (lambda * nb - mu * na) / nb;
            if (f > 0.0)
                for (const auto& s : sp.b) {
                    const double v = f * g.t.length(s);
                    if (v > 0.0) edges.push_back({s, v});
                }
        } else {
            const double f = (mu * na - lambda * nb) / na;
            if (f > 0.0)
                for (const auto& s : sp.a) {
                    const double v = f * g.x.length(s);
                    if (v > 0.0) edges.push_back({s, v});
                }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.split < b.split; });
    std::vector<double> pend(g.x.leaf_count());
    for (int k = 0; k < g.x.leaf_count(); ++k) pend[k] = mu * g.x.pendants()[k] + lambda * g.t.pendants()[k];
    return Tree::trusted(g.x.leaf_count(), std::move(edges), std::move(pend));
}

SupportClassification validate_support(const Tree& x, const Tree& t, const SupportSequence& s, int exhaustive_limit) {
    const Prepared pr = prepare(x, t);
    const auto pairs = index_support(x, t, pr, s);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (!cross_compatible(pr, pairs[i], pairs[j])) return SupportClassification::Invalid;
    bool boundary = false;
    for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
        const double lhs = std::sqrt(sq_norm(x.interior(), pairs[i].a) * sq_norm(t.interior(), pairs[i + 1].b));
        const double rhs = std::sqrt(sq_norm(x.interior(), pairs[i + 1].a) * sq_norm(t.interior(), pairs[i].b));
        const double scale = std::max(lhs, rhs);
        if (lhs - rhs > kRatioTol * scale) return SupportClassification::Invalid;
        if (std::abs(lhs - rhs) <= kRatioTol * scale) boundary = true;
    }
    for (const auto& pp : pairs) {
        const double w = min_nontrivial_cover(x, t, pr, pp, exhaustive_limit);
        if (w < 1.0 - kRatioTol) return SupportClassification::Invalid;
        if (w <= 1.0 + kRatioTol) boundary = true;
    }
    return boundary ? SupportClassification::CellBoundary : SupportClassification::FacetInterior;
}

namespace {

// Every ordered partition of `items` into exactly k nonempty blocks.
void ordered_partitions(const std::vector<int>& items, int k, std::vector<std::vector<std::vector<int>>>& out) {
    std::vector<int> label(items.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == items.size()) {
            std::vector<std::vector<int>> blocks(k);
            for (std::size_t i = 0; i < items.size(); ++i) blocks[label[i]].push_back(items[i]);
            for (const auto& b : blocks)
                if (b.empty()) return;
            out.push_back(std::move(blocks));
            return;
        }
        for (int c = 0; c < k; ++c) {
            label[pos] = c;
            rec(pos + 1);
        }
    };
    rec(0);
}

}  // namespace

BruteForceReport brute_force_report(const Tree& x, const Tree& t, int max_edges) {
    const Prepared pr = prepare(x, t);
    if (static_cast<int>(pr.a_all.size()) > max_edges || static_cast<int>(pr.b_all.size()) > max_edges)
        throw std::invalid_argument("brute_force_geodesic: too many incompatible edges");
    BruteForceReport rep;
    const auto to_support = [&](const std::vector<IdxPair>& pairs) {
        SupportSequence s;
        for (const auto& pp : pairs) {
            SupportPair sp;
            for (int k : pp.a) sp.a.push_back(x.interior()[k].split);
            for (int k : pp.b) sp.b.push_back(t.interior()[k].split);
            s.pairs.push_back(std::move(sp));
        }
        return s;
    };
    if (pr.a_all.empty()) {
        rep.best = assemble(x, t, pr, {});
        rep.min_path_length = rep.best.length;
        rep.valid.push_back({});
        rep.examined = 1;
        return rep;
    }
    double best_len = kInf;
    rep.min_path_length = kInf;
    const int kmax = static_cast<int>(std::min(pr.a_all.size(), pr.b_all.size()));
    for (int k = 1; k <= kmax; ++k) {
        std::vector<std::vector<std::vector<int>>> pa, pb;
        ordered_partitions(pr.a_all, k, pa);
        ordered_partitions(pr.b_all, k, pb);
        for (const auto& ablocks : pa)
            for (const auto& bblocks : pb) {
                ++rep.examined;
                std::vector<IdxPair> pairs(k);
                for (int i = 0; i < k; ++i) pairs[i] = {ablocks[i], bblocks[i]};
                bool p1 = true;
                for (int i = 0; i < k && p1; ++i)
                    for (int j = 0; j < i && p1; ++j) p1 = cross_compatible(pr, pairs[i], pairs[j]);
                if (!p1) continue;

                // Merge adjacent pairs out of ratio order to obtain a genuine path.
                std::vector<IdxPair> merged = pairs;
                bool changed = true;
                while (changed) {
                    changed = false;
                    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
                        const double lhs = std::sqrt(sq_norm(x.interior(), merged[i].a) * sq_norm(t.interior(), merged[i + 1].b));
                        const double rhs = std::sqrt(sq_norm(x.interior(), merged[i + 1].a) * sq_norm(t.interior(), merged[i].b));
                        if (lhs > rhs) {
                            merged[i].a.insert(merged[i].a.end(), merged[i + 1].a.begin(), merged[i + 1].a.end());
                            merged[i].b.insert(merged[i].b.end(), merged[i + 1].b.begin(), merged[i + 1].b.end());
                            merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                            changed = true;
                            break;
                        }
                    }
                }
                rep.min_path_length = std::min(rep.min_path_length, assemble(x, t, pr, merged).length);

                const auto support = to_support(pairs);
                if (validate_support(x, t, support, 64) == SupportClassification::Invalid) continue;
                const Geodesic g = assemble(x, t, pr, pairs);
                rep.valid.push_back(support);
                if (g.length < best_len) {
                    best_len = g.length;
                    rep.best = g;
                }
            }
    }
    if (rep.valid.empty()) throw std::logic_error("brute_force_geodesic: no valid support found");
    return rep;
}

Geodesic brute_force_geodesic(const Tree& x, const Tree& t, int max_edges) {
    return brute_force_report(x, t, max_edges).best;
}

nlohmann::json support_to_json(const SupportSequence& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& sp : s.pairs) {
        nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
        for (const auto& e : sp.a) a.push_back(split_to_json(e));
        for (const auto& e : sp.b) b.push_back(split_to_json(e));
        arr.push_back({{"A", a}, {"B", b}});
    }
    return arr;
}

nlohmann::json geodesic_to_json(const Geodesic& g) {
    nlohmann::json common = nlohmann::json::array();
    for (const auto& s : g.common) common.push_back(split_to_json(s));
    return {{"distance", g.length}, {"support", support_to_json(g.support)}, {"common", common}};
}

}  // namespace treespace
