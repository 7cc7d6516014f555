#pragma once

#include <nlohmann/json.hpp>

#include <vector>

#include "treespace/tree.hpp"

namespace treespace {

struct SupportPair {
    std::vector<Split> a;  // edges of the source tree
    std::vector<Split> b;  // edges of the target tree
};

struct SupportSequence {
    std::vector<SupportPair> pairs;
    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

struct Geodesic {
    Tree x;
    Tree t;
    SupportSequence support;
    std::vector<Split> common;  // interior splits compatible with both trees
    double length = 0.0;
    std::vector<double> a_norms;  // ||A_i|| measured in x
    std::vector<double> b_norms;  // ||B_i|| measured in t
};

enum class SupportClassification { FacetInterior, CellBoundary, Invalid };

const char* to_string(SupportClassification c);

// Relative tolerance for ratio equalities and vertex-cover weights.
inline constexpr double kRatioTol = 1e-10;

// Euclidean norm of the lengths of `splits` in `tree`.
double split_norm(const Tree& tree, const std::vector<Split>& splits);

Geodesic compute_geodesic(const Tree& x, const Tree& t);
double distance(const Tree& x, const Tree& t);
Tree point_at(const Geodesic& g, double lambda);
int leg_index(const Geodesic& g, double lambda);

// Length of the path encoded by `s` (meaningful when (P1) holds).
double path_length(const Tree& x, const Tree& t, const SupportSequence& s);

// `exhaustive_limit` bounds |A_i|+|B_i| for subset enumeration of (P3);
// larger pairs use the max-flow certificate.
SupportClassification validate_support(const Tree& x, const Tree& t, const SupportSequence& s,
                                       int exhaustive_limit = 16);

// Geodesic through `s` without any validity check.
Geodesic make_geodesic(const Tree& x, const Tree& t, const SupportSequence& s);

struct BruteForceReport {
    Geodesic best;                              // shortest fully valid support
    double min_path_length = 0.0;               // over every (P1) path support
    std::vector<SupportSequence> valid;         // all supports satisfying (P1)(P2)(P3)
    std::size_t examined = 0;
};

BruteForceReport brute_force_report(const Tree& x, const Tree& t, int max_edges = 4);
Geodesic brute_force_geodesic(const Tree& x, const Tree& t, int max_edges = 4);

nlohmann::json support_to_json(const SupportSequence& s);
nlohmann::json geodesic_to_json(const Geodesic& g);

}  // namespace treespace
