#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

#include "treespace/split.hpp"

namespace treespace {

// Default tolerance for approximate length comparisons.
inline constexpr double kLengthTol = 1e-12;

struct Edge {
    Split split;
    double length = 0.0;
};

// Point of treespace on leaves {0..leaf_count-1}: compatible interior splits
// with positive lengths plus one nonnegative pendant length per leaf.
class Tree {
public:
    Tree() = default;
    // Validates; interior edges of length exactly zero are dropped.
    Tree(int leaf_count, std::vector<Edge> interior, std::vector<double> pendants);

    static Tree star(int leaf_count, std::vector<double> pendants);
    static Tree star(int leaf_count) { return star(leaf_count, std::vector<double>(leaf_count, 0.0)); }
    // Skips validation; caller guarantees sorted, compatible, positive edges.
    static Tree trusted(int leaf_count, std::vector<Edge> interior, std::vector<double> pendants);

    int leaf_count() const { return leaf_count_; }
    int r() const { return leaf_count_ - 1; }
    const std::vector<Edge>& interior() const { return interior_; }
    const std::vector<double>& pendants() const { return pendants_; }
    std::size_t num_interior() const { return interior_.size(); }

    // Length of split (pendant splits map to pendant lengths); 0 when absent.
    double length(const Split& s) const;
    bool has(const Split& s) const;
    std::optional<std::size_t> index_of(const Split& s) const;
    std::vector<Split> splits() const;

    friend bool operator==(const Tree& a, const Tree& b);

private:
    int leaf_count_ = 0;
    std::vector<Edge> interior_;
    std::vector<double> pendants_;
};

bool approx_equal(const Tree& a, const Tree& b, double tol = kLengthTol);
// Max absolute coordinate difference over the union of both edge sets.
double coordinate_distance(const Tree& a, const Tree& b);

struct Orthant {
    int leaf_count = 0;
    std::vector<Split> edges;  // sorted, pairwise compatible interior splits

    Orthant() = default;
    Orthant(int leaf_count, std::vector<Split> edges);
    static Orthant of(const Tree& t);

    std::size_t dimension() const { return edges.size(); }
    bool contains(const Split& s) const;
    // True when every interior split of `t` belongs to this orthant.
    bool contains(const Tree& t) const;
    bool contains(const Orthant& o) const;
};

// Maximal orthants whose closure contains `t`.
std::vector<Orthant> maximal_orthants_containing(const Tree& t);

struct SquaredPoint {
    int leaf_count = 0;
    std::vector<Edge> interior;   // squared lengths
    std::vector<double> pendants; // squared lengths
};

SquaredPoint squaring_map(const Tree& t);
Tree unsquare(const SquaredPoint& p);

// Interior splits common to both trees (compatible with every split of the
// other tree), followed by the pendant splits.
std::vector<Split> common_edges(const Tree& x, const Tree& t);

nlohmann::json split_to_json(const Split& s);
Split split_from_json(const nlohmann::json& j, int leaf_count);
nlohmann::json tree_to_json(const Tree& t);
Tree tree_from_json(const nlohmann::json& j);

}  // namespace treespace
