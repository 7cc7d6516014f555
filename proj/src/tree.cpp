#include "treespace/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treespace {

namespace {

void sort_edges(std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.split < b.split; });
}

}  // namespace

Tree::Tree(int leaf_count, std::vector<Edge> interior, std::vector<double> pendants)
    : leaf_count_(leaf_count), pendants_(std::move(pendants)) {
    if (leaf_count < 3 || leaf_count > kMaxLeaves) throw std::invalid_argument("tree: leaf count out of range");
    if (static_cast<int>(pendants_.size()) != leaf_count)
        throw std::invalid_argument("tree: need one pendant length per leaf");
    for (double p : pendants_)
        if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("tree: pendant lengths must be finite and >= 0");
    for (auto& e : interior) {
        if (e.split.leaf_count() != leaf_count) throw std::invalid_argument("tree: split over a different leaf set");
        if (!e.split.is_interior()) throw std::invalid_argument("tree: pendant split given as interior edge");
        if (!std::isfinite(e.length) || e.length < 0.0) throw std::invalid_argument("tree: interior lengths must be finite and >= 0");
        if (e.length > 0.0) interior_.push_back(e);
    }
    sort_edges(interior_);
    for (std::size_t i = 1; i < interior_.size(); ++i)
        if (interior_[i].split == interior_[i - 1].split) throw std::invalid_argument("tree: duplicate split");
    for (std::size_t i = 0; i < interior_.size(); ++i)
        for (std::size_t j = i + 1; j < interior_.size(); ++j)
            if (!splits_compatible(interior_[i].split, interior_[j].split))
                throw std::invalid_argument("tree: incompatible splits " + interior_[i].split.to_string() + " and " +
                                            interior_[j].split.to_string());
    if (static_cast<int>(interior_.size()) > leaf_count - 3)
        throw std::invalid_argument("tree: too many interior edges");
}

Tree Tree::star(int leaf_count, std::vector<double> pendants) { return Tree(leaf_count, {}, std::move(pendants)); }

Tree Tree::trusted(int leaf_count, std::vector<Edge> interior, std::vector<double> pendants) {
    Tree t;
    t.leaf_count_ = leaf_count;
    t.interior_ = std::move(interior);
    t.pendants_ = std::move(pendants);
    return t;
}

std::optional<std::size_t> Tree::index_of(const Split& s) const {
    auto it = std::lower_bound(interior_.begin(), interior_.end(), s,
                               [](const Edge& e, const Split& v) { return e.split < v; });
    if (it != interior_.end() && it->split == s) return static_cast<std::size_t>(it - interior_.begin());
    return std::nullopt;
}

double Tree::length(const Split& s) const {
    if (s.leaf_count() != leaf_count_) throw std::invalid_argument("tree: split over a different leaf set");
    if (s.is_pendant()) return pendants_[s.pendant_leaf()];
    auto i = index_of(s);
    return i ? interior_[*i].length : 0.0;
}

bool Tree::has(const Split& s) const { return s.is_pendant() || index_of(s).has_value(); }

std::vector<Split> Tree::splits() const {
    std::vector<Split> out;
    out.reserve(interior_.size());
    for (const auto& e : interior_) out.push_back(e.split);
    return out;
}

bool operator==(const Tree& a, const Tree& b) {
    if (a.leaf_count_ != b.leaf_count_ || a.pendants_ != b.pendants_ || a.interior_.size() != b.interior_.size())
        return false;
    for (std::size_t i = 0; i < a.interior_.size(); ++i)
        if (a.interior_[i].split != b.interior_[i].split || a.interior_[i].length != b.interior_[i].length) return false;
    return true;
}

double coordinate_distance(const Tree& a, const Tree& b) {
    if (a.leaf_count() != b.leaf_count()) throw std::invalid_argument("coordinate_distance: leaf counts differ");
    double m = 0.0;
    for (int i = 0; i < a.leaf_count(); ++i) m = std::max(m, std::abs(a.pendants()[i] - b.pendants()[i]));
    for (const auto& e : a.interior()) m = std::max(m, std::abs(e.length - b.length(e.split)));
    for (const auto& e : b.interior())
        if (!a.has(e.split)) m = std::max(m, e.length);
    return m;
}

bool approx_equal(const Tree& a, const Tree& b, double tol) {
    if (a.leaf_count() != b.leaf_count()) return false;
    return coordinate_distance(a, b) <= tol;
}

Orthant::Orthant(int leaf_count_in, std::vector<Split> edges_in) : leaf_count(leaf_count_in), edges(std::move(edges_in)) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& s : edges) {
        if (s.leaf_count() != leaf_count) throw std::invalid_argument("orthant: split over a different leaf set");
        if (!s.is_interior()) throw std::invalid_argument("orthant: pendant split");
    }
    if (!is_compatible_set(edges)) throw std::invalid_argument("orthant: incompatible splits");
}

Orthant Orthant::of(const Tree& t) { return Orthant(t.leaf_count(), t.splits()); }

bool Orthant::contains(const Split& s) const { return std::binary_search(edges.begin(), edges.end(), s); }

bool Orthant::contains(const Tree& t) const {
    if (t.leaf_count() != leaf_count) return false;
    for (const auto& e : t.interior())
        if (!contains(e.split)) return false;
    return true;
}

bool Orthant::contains(const Orthant& o) const {
    if (o.leaf_count != leaf_count) return false;
    return std::includes(edges.begin(), edges.end(), o.edges.begin(), o.edges.end());
}

std::vector<Orthant> maximal_orthants_containing(const Tree& t) {
    const auto fixed = t.splits();
    if (static_cast<int>(fixed.size()) == t.leaf_count() - 3) return {Orthant(t.leaf_count(), fixed)};
    std::vector<Split> candidates;
    for (const auto& s : enumerate_interior_splits(t.r())) {
        if (t.has(s)) continue;
        bool ok = true;
        for (const auto& f : fixed)
            if (!splits_compatible(s, f)) { ok = false; break; }
        if (ok) candidates.push_back(s);
    }
    std::vector<Orthant> out;
    for (auto& clique : maximal_compatible_sets(candidates)) {
        clique.insert(clique.end(), fixed.begin(), fixed.end());
        out.emplace_back(t.leaf_count(), std::move(clique));
    }
    return out;
}

SquaredPoint squaring_map(const Tree& t) {
    SquaredPoint p;
    p.leaf_count = t.leaf_count();
    for (const auto& e : t.interior()) p.interior.push_back({e.split, e.length * e.length});
    for (double v : t.pendants()) p.pendants.push_back(v * v);
    return p;
}

Tree unsquare(const SquaredPoint& p) {
    std::vector<Edge> edges;
    for (const auto& e : p.interior) {
        if (e.length < 0.0) throw std::invalid_argument("unsquare: negative coordinate");
        edges.push_back({e.split, std::sqrt(e.length)});
    }
    std::vector<double> pend;
    for (double v : p.pendants) {
        if (v < 0.0) throw std::invalid_argument("unsquare: negative coordinate");
        pend.push_back(std::sqrt(v));
    }
    return Tree(p.leaf_count, std::move(edges), std::move(pend));
}

std::vector<Split> common_edges(const Tree& x, const Tree& t) {
    if (x.leaf_count() != t.leaf_count()) throw std::invalid_argument("common_edges: leaf counts differ");
    std::vector<Split> out;
    auto add_compatible = [&out](const Tree& a, const Tree& b) {
        for (const auto& e : a.interior()) {
            bool ok = true;
            for (const auto& f : b.interior())
                if (!splits_compatible(e.split, f.split)) { ok = false; break; }
            if (ok) out.push_back(e.split);
        }
    };
    add_compatible(x, t);
    add_compatible(t, x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (int i = 0; i < x.leaf_count(); ++i) out.push_back(Split::pendant(i, x.leaf_count()));
    return out;
}

nlohmann::json split_to_json(const Split& s) { return s.zero_side(); }

Split split_from_json(const nlohmann::json& j, int leaf_count) {
    return Split::from_labels(j.get<std::vector<int>>(), leaf_count);
}

nlohmann::json tree_to_json(const Tree& t) {
    nlohmann::json interior = nlohmann::json::array();
    for (const auto& e : t.interior()) interior.push_back({{"zero_side", split_to_json(e.split)}, {"length", e.length}});
    return {{"leaf_count", t.leaf_count()}, {"interior", interior}, {"pendants", t.pendants()}};
}

Tree tree_from_json(const nlohmann::json& j) {
    const int n = j.at("leaf_count").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("interior"))
        edges.push_back({split_from_json(e.at("zero_side"), n), e.at("length").get<double>()});
    return Tree(n, std::move(edges), j.at("pendants").get<std::vector<double>>());
}

}  // namespace treespace
