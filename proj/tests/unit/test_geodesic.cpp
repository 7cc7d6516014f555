#include "doctest.h"

#include <cmath>

#include "oracle.hpp"
#include "treespace/geodesic.hpp"
#include "treespace/newick.hpp"

using namespace treespace;

namespace {

Split S(std::vector<int> zero, int n = 5) { return Split::from_labels(zero, n); }

const std::vector<double> kOnes(5, 1.0);

Tree single(const Split& s, double len) { return Tree(5, {{s, len}}, kOnes); }

}  // namespace

TEST_CASE("identical trees") {
    oracle::Rng rng(1);
    const Tree x = oracle::random_tree(rng, 7);
    const Geodesic g = compute_geodesic(x, x);
    CHECK(g.support.empty());
    CHECK(g.common.size() == x.num_interior());
    CHECK(g.length == 0.0);
    CHECK(distance(x, x) == 0.0);
}

TEST_CASE("single crossing pair") {
    const Tree x = single(S({0, 1}), 3.0), t = single(S({0, 2}), 4.0);
    const Geodesic g = compute_geodesic(x, t);
    REQUIRE(g.support.size() == 1);
    CHECK(g.support.pairs[0].a == std::vector<Split>{S({0, 1})});
    CHECK(g.support.pairs[0].b == std::vector<Split>{S({0, 2})});
    CHECK(g.length == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(validate_support(x, t, g.support) == SupportClassification::FacetInterior);

    const Tree mid = point_at(g, 3.0 / 7.0);
    CHECK(mid.num_interior() == 0);
    CHECK(leg_index(g, 0.0) == 0);
    CHECK(leg_index(g, 0.4) == 0);
    CHECK(leg_index(g, 3.0 / 7.0) == 0);
    CHECK(leg_index(g, 0.5) == 1);
    CHECK(leg_index(g, 1.0) == 1);
    CHECK(point_at(g, 0.0) == x);
    CHECK(point_at(g, 1.0) == t);
    CHECK_THROWS_AS(point_at(g, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(point_at(g, -0.1), std::invalid_argument);
    const Tree q = point_at(g, 0.25);
    CHECK(q.length(S({0, 1})) == doctest::Approx(3.0 - 0.25 * 7.0));
}

TEST_CASE("same topology gives Euclidean distance") {
    const Tree x(5, {{S({0, 1}), 1.0}, {S({0, 1, 2}), 2.0}}, kOnes);
    const Tree t(5, {{S({0, 1}), 4.0}, {S({0, 1, 2}), 6.0}}, {1, 1, 1, 1, 2});
    const Geodesic g = compute_geodesic(x, t);
    CHECK(g.support.empty());
    CHECK(g.length == doctest::Approx(std::sqrt(9.0 + 16.0 + 1.0)));
}

TEST_CASE("validate_support classifications") {
    const Tree x(5, {{S({0, 1}), 1.0}, {S({0, 1, 2}), 2.0}}, kOnes);
    // Target edges crossing both of x's edges individually.
    const Tree t(5, {{S({0, 3}), 1.0}, {S({0, 3, 4}), 2.0}}, kOnes);
    const Geodesic g = compute_geodesic(x, t);
    CHECK(validate_support(x, t, g.support) != SupportClassification::Invalid);

    // Partition mismatch.
    SupportSequence bad;
    bad.pairs.push_back({{S({0, 1})}, {S({0, 3})}});
    CHECK_THROWS_AS(validate_support(x, t, bad), std::invalid_argument);
}

TEST_CASE("ratio equality is a cell boundary, reversed order is invalid") {
    // Two independent crossing pairs on separate parts of an 8-leaf tree.
    const int n = 8;
    const std::vector<double> p(n, 1.0);
    const Split a1 = S({0, 1, 2, 3, 4, 5}, n), b1 = S({0, 1, 2, 3, 4, 6}, n);  // cherries {6,7} vs {5,7}
    const Split a2 = S({0, 1}, n), b2 = S({0, 2}, n);
    const Tree x(n, {{a1, 1.0}, {a2, 2.0}}, p);
    const Tree t(n, {{b1, 3.0}, {b2, 6.0}}, p);
    REQUIRE(splits_compatible(a1, b2));
    REQUIRE(splits_compatible(a2, b1));
    SupportSequence eq{{{{a1}, {b1}}, {{a2}, {b2}}}};
    CHECK(validate_support(x, t, eq) == SupportClassification::CellBoundary);
    const Tree t3(n, {{b1, 3.0}, {b2, 1.0}}, p);
    // ratios: a1/b1 = 1/3, a2/b2 = 2 -> in order
    SupportSequence ordered{{{{a1}, {b1}}, {{a2}, {b2}}}};
    CHECK(validate_support(x, t3, ordered) == SupportClassification::FacetInterior);
    SupportSequence reversed{{{{a2}, {b2}}, {{a1}, {b1}}}};
    CHECK(validate_support(x, t3, reversed) == SupportClassification::Invalid);
    // Merged pair violates the vertex-cover condition.
    SupportSequence merged{{{{a1, a2}, {b1, b2}}}};
    CHECK(validate_support(x, t3, merged) == SupportClassification::Invalid);
    const Geodesic g = compute_geodesic(x, t3);
    CHECK(g.support.size() == 2);
    CHECK(g.length == doctest::Approx(std::sqrt(16.0 + 9.0)));
}

TEST_CASE("cone path fallback and brute force agree on random pairs") {
    oracle::Rng rng(2024);
    for (int i = 0; i < 300; ++i) {
        const int n = 5 + static_cast<int>(rng() % 3);
        const Tree x = oracle::random_tree(rng, n, 0.9), t = oracle::random_tree(rng, n, 0.9);
        const Geodesic g = compute_geodesic(x, t);
        const auto rep = brute_force_report(x, t, 4);
        CHECK(std::abs(g.length - rep.best.length) < 1e-10);
        CHECK(std::abs(rep.min_path_length - rep.best.length) < 1e-10);
        CHECK(validate_support(x, t, g.support) != SupportClassification::Invalid);
        CHECK(validate_support(x, t, g.support, 0) == validate_support(x, t, g.support, 64));
    }
}

TEST_CASE("larger trees: metric properties and valid supports") {
    oracle::Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        const int n = 8 + static_cast<int>(rng() % 8);
        const Tree x = oracle::random_tree(rng, n, 0.8), t = oracle::random_tree(rng, n, 0.8),
                   z = oracle::random_tree(rng, n, 0.8);
        const Geodesic g = compute_geodesic(x, t);
        CHECK(validate_support(x, t, g.support) != SupportClassification::Invalid);
        CHECK(std::abs(distance(x, t) - distance(t, x)) < 1e-10);
        CHECK(distance(x, z) <= distance(x, t) + distance(t, z) + 1e-10);
        for (std::size_t k = 0; k + 1 < g.support.size(); ++k)
            CHECK(g.a_norms[k] * g.b_norms[k + 1] <= g.a_norms[k + 1] * g.b_norms[k] * (1 + 1e-10));
    }
}

TEST_CASE("points along the geodesic are at proportional distance") {
    oracle::Rng rng(8);
    for (int i = 0; i < 60; ++i) {
        const int n = 6 + static_cast<int>(rng() % 4);
        const Tree x = oracle::random_tree(rng, n, 0.9), t = oracle::random_tree(rng, n, 0.9);
        const Geodesic g = compute_geodesic(x, t);
        for (double lam : {0.1, 0.3, 0.5, 0.77, 0.95}) {
            const Tree p = point_at(g, lam);
            CHECK(is_compatible_set(p.splits()));
            CHECK(std::abs(distance(x, p) - lam * g.length) < 1e-9 * (1 + g.length));
            CHECK(std::abs(distance(p, t) - (1 - lam) * g.length) < 1e-9 * (1 + g.length));
        }
    }
}

TEST_CASE("distance zero iff equal") {
    oracle::Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        const Tree x = oracle::random_tree(rng, 7, 0.8);
        CHECK(distance(x, x) == 0.0);
        const Tree y = oracle::random_tree(rng, 7, 0.8);
        if (!(x == y)) CHECK(distance(x, y) > 0.0);
    }
}

TEST_CASE("squared distance to a point is convex along geodesics") {
    oracle::Rng rng(31);
    for (int i = 0; i < 40; ++i) {
        const int n = 6 + static_cast<int>(rng() % 2);
        const Tree x = oracle::random_tree(rng, n, 0.8), t1 = oracle::random_tree(rng, n, 0.8),
                   t2 = oracle::random_tree(rng, n, 0.8);
        const Geodesic g = compute_geodesic(t1, t2);
        std::vector<double> f;
        for (int k = 0; k <= 32; ++k) {
            const double d = distance(point_at(g, k / 32.0), x);
            f.push_back(d * d);
        }
        for (int k = 1; k < 32; ++k) CHECK(f[k - 1] - 2 * f[k] + f[k + 1] >= -1e-9);
    }
}

TEST_CASE("proportional points of nested geodesics") {
    // Gamma(X, Y^t; a) = Gamma(Gamma(X,Y0;a), Gamma(X,Y1;a); t) when O(X) lies in O(Y0) and O(Y1).
    oracle::Rng rng(55);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 60; ++i) {
        const int n = 6 + static_cast<int>(rng() % 2);
        const Tree y0 = oracle::random_tree(rng, n, 0.9);
        const Tree x = oracle::random_contraction(rng, y0, 0.6);
        // y1 shares x's splits plus its own compatible extras.
        std::vector<Split> extra;
        for (const auto& s : enumerate_interior_splits(n - 1)) {
            bool ok = !x.has(s);
            for (const auto& e : x.interior()) ok = ok && splits_compatible(s, e.split);
            if (ok) extra.push_back(s);
        }
        std::vector<Split> s1 = x.splits();
        for (const auto& s : extra) {
            if (static_cast<int>(s1.size()) >= n - 3) break;
            if (rng() % 2 == 0) continue;
            bool ok = true;
            for (const auto& e : s1) ok = ok && splits_compatible(s, e);
            if (ok) s1.push_back(s);
        }
        const Tree y1 = oracle::random_tree_on(rng, n, s1);
        for (double a : {0.2, 0.6}) {
            for (double tt : {0.3, 0.7}) {
                const Tree yt = point_at(compute_geodesic(y0, y1), tt);
                if (!Orthant::of(yt).contains(Orthant::of(x))) continue;
                const Tree lhs = point_at(compute_geodesic(x, yt), a);
                const Tree rhs = point_at(compute_geodesic(point_at(compute_geodesic(x, y0), a),
                                                           point_at(compute_geodesic(x, y1), a)),
                                          tt);
                CHECK(coordinate_distance(lhs, rhs) < 1e-9);
                ++checked;
            }
        }
    }
    CHECK(checked >= 40);
}

TEST_CASE("brute force error and trivial cases") {
    const Tree x = single(S({0, 1}), 3.0), t = single(S({0, 2}), 4.0);
    const Geodesic g = brute_force_geodesic(x, t);
    CHECK(g.support.size() == 1);
    CHECK(g.length == doctest::Approx(7.0));
    CHECK(brute_force_geodesic(x, x).support.empty());
    oracle::Rng rng(6);
    const Tree u = oracle::random_tree(rng, 12), v = oracle::random_tree(rng, 12);
    if (compute_geodesic(u, v).support.size() > 0 && u.num_interior() > 1) CHECK_THROWS_AS(brute_force_geodesic(u, v, 1), std::invalid_argument);
}

TEST_CASE("geodesic json shape") {
    const Tree x = single(S({0, 1}), 3.0), t = single(S({0, 2}), 4.0);
    const auto j = geodesic_to_json(compute_geodesic(x, t));
    CHECK(j.at("distance").get<double>() == doctest::Approx(7.0));
    CHECK(j.at("support").size() == 1);
    CHECK(j.at("support")[0].at("A")[0] == std::vector<int>{0, 1});
    CHECK(j.at("common").empty());
}
