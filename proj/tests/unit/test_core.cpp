#include "doctest.h"

#include <algorithm>
#include <set>

#include "oracle.hpp"
#include "treespace/tree.hpp"

using namespace treespace;

namespace {

Split S(std::vector<int> zero, int n = 5) { return Split::from_labels(zero, n); }

// Independent compatibility rule: some side of one nests in a side of the other.
bool nests(const Split& a, const Split& b) {
    auto side = [](std::vector<int> v) { return std::set<int>(v.begin(), v.end()); };
    const auto a0 = side(a.zero_side()), a1 = side(a.other_side());
    const auto b0 = side(b.zero_side()), b1 = side(b.other_side());
    auto disjoint = [](const std::set<int>& x, const std::set<int>& y) {
        for (int v : x)
            if (y.count(v)) return false;
        return true;
    };
    return disjoint(a0, b0) || disjoint(a0, b1) || disjoint(a1, b0) || disjoint(a1, b1);
}

}  // namespace

TEST_CASE("split construction and accessors") {
    const Split s = S({0, 1});
    CHECK(s.zero_side() == std::vector<int>{0, 1});
    CHECK(s.other_side() == std::vector<int>{2, 3, 4});
    CHECK(s.is_interior());
    CHECK(s.to_string() == "{0,1}|{2,3,4}");
    CHECK(Split::pendant(0, 5).is_pendant());
    CHECK(Split::pendant(3, 5).pendant_leaf() == 3);
    CHECK(Split::pendant(0, 5).pendant_leaf() == 0);
    CHECK_THROWS_AS(Split(0b10, 5), std::invalid_argument);      // misses leaf 0
    CHECK_THROWS_AS(Split(0b11111, 5), std::invalid_argument);   // not proper
    CHECK_THROWS_AS(Split(0b100001, 5), std::invalid_argument);  // label 5 outside
    CHECK(S({0, 1}) == Split(0b11, 5));
}

TEST_CASE("splits_compatible examples") {
    CHECK(splits_compatible(S({0, 1}), S({0, 1, 2})));
    CHECK_FALSE(splits_compatible(S({0, 1}), S({0, 2})));
    CHECK(splits_compatible(S({0, 1}), S({0, 1})));
    CHECK_THROWS_AS(splits_compatible(S({0, 1}), S({0, 1}, 6)), std::invalid_argument);
}

TEST_CASE("compatibility is symmetric and matches the nesting rule") {
    for (int r = 3; r <= 6; ++r) {
        const auto all = enumerate_interior_splits(r);
        for (const auto& a : all)
            for (const auto& b : all) {
                CHECK(splits_compatible(a, b) == splits_compatible(b, a));
                CHECK(splits_compatible(a, b) == nests(a, b));
            }
    }
}

TEST_CASE("pendant splits are compatible with every split") {
    for (int r = 3; r <= 6; ++r)
        for (const auto& s : enumerate_interior_splits(r))
            for (int leaf = 0; leaf <= r; ++leaf) CHECK(splits_compatible(Split::pendant(leaf, r + 1), s));
}

TEST_CASE("is_compatible_set") {
    CHECK(is_compatible_set({}));
    CHECK(is_compatible_set({S({0, 1}), S({0, 1, 2})}));
    CHECK_FALSE(is_compatible_set({S({0, 1}), S({0, 1, 2}), S({0, 2})}));
}

TEST_CASE("enumerate_interior_splits counts and rejects small r") {
    CHECK(enumerate_interior_splits(3).size() == 3);
    for (int r = 3; r <= 10; ++r) CHECK(enumerate_interior_splits(r).size() == (1u << r) - r - 2);
    CHECK_THROWS_AS(enumerate_interior_splits(2), std::invalid_argument);
}

TEST_CASE("five-leaf combinatorics: ten splits, fifteen topologies, three per split") {
    const auto splits = enumerate_interior_splits(4);
    std::set<std::vector<int>> got;
    for (const auto& s : splits) got.insert(s.zero_side());
    const std::set<std::vector<int>> expected = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 1, 2},
                                                 {0, 1, 3}, {0, 1, 4}, {0, 2, 3}, {0, 2, 4}, {0, 3, 4}};
    CHECK(got == expected);
    const auto tops = maximal_compatible_sets(splits);
    CHECK(tops.size() == 15);
    for (const auto& t : tops) CHECK(t.size() == 2);
    for (const auto& s : splits) {
        int count = 0;
        for (const auto& t : tops) count += std::count(t.begin(), t.end(), s) > 0;
        CHECK(count == 3);
    }
}

TEST_CASE("maximal topologies for six and seven leaves") {
    CHECK(maximal_compatible_sets(enumerate_interior_splits(5)).size() == 105);
    CHECK(maximal_compatible_sets(enumerate_interior_splits(6)).size() == 945);
}

TEST_CASE("tree validation") {
    const std::vector<double> p(5, 1.0);
    CHECK_NOTHROW(Tree(5, {{S({0, 1}), 2.0}, {S({0, 1, 2}), 3.0}}, p));
    CHECK_THROWS_AS(Tree(5, {{S({0, 1}), 2.0}, {S({0, 2}), 3.0}}, p), std::invalid_argument);
    CHECK_THROWS_AS(Tree(5, {{S({0, 1}), -1.0}}, p), std::invalid_argument);
    CHECK_THROWS_AS(Tree(5, {}, std::vector<double>(4, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(Tree(5, {{Split::pendant(2, 5), 1.0}}, p), std::invalid_argument);
    const Tree z(5, {{S({0, 1}), 0.0}, {S({0, 1, 2}), 3.0}}, p);
    CHECK(z.num_interior() == 1);
    CHECK(z.length(S({0, 1})) == 0.0);
    CHECK(z.length(S({0, 1, 2})) == 3.0);
    CHECK(z.length(Split::pendant(4, 5)) == 1.0);
}

TEST_CASE("orthants") {
    const Tree t(5, {{S({0, 1}), 2.0}}, std::vector<double>(5, 1.0));
    const auto orthants = maximal_orthants_containing(t);
    CHECK(orthants.size() == 3);
    for (const auto& o : orthants) {
        CHECK(o.contains(t));
        CHECK(o.dimension() == 2);
    }
    CHECK(maximal_orthants_containing(Tree::star(5)).size() == 15);
    CHECK_THROWS_AS(Orthant(5, {S({0, 1}), S({0, 2})}), std::invalid_argument);
}

TEST_CASE("squaring map") {
    const Tree t(5, {{S({0, 1}), 3.0}, {S({0, 1, 2}), 4.0}}, std::vector<double>(5, 0.0));
    const auto sq = squaring_map(t);
    CHECK(sq.interior[0].length == 9.0);
    CHECK(sq.interior[1].length == 16.0);
    const auto star = squaring_map(Tree::star(5));
    CHECK(star.interior.empty());
    for (double v : star.pendants) CHECK(v == 0.0);
    SquaredPoint bad = sq;
    bad.interior[0].length = -1.0;
    CHECK_THROWS_AS(unsquare(bad), std::invalid_argument);

    oracle::Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const Tree x = oracle::random_tree(rng, 7);
        const Tree back = unsquare(squaring_map(x));
        REQUIRE(back.num_interior() == x.num_interior());
        for (std::size_t k = 0; k < x.num_interior(); ++k)
            CHECK(std::abs(back.interior()[k].length - x.interior()[k].length) <= 1e-12 * x.interior()[k].length);
    }
}

TEST_CASE("common edges") {
    oracle::Rng rng(11);
    const Tree x = oracle::random_tree(rng, 6);
    auto ce = common_edges(x, x);
    CHECK(ce.size() == x.num_interior() + 6);

    // Single crossing edge on each side: pendants only.
    const std::vector<double> p(5, 1.0);
    const Tree a(5, {{S({0, 1}), 1.0}}, p), b(5, {{S({0, 2}), 1.0}}, p);
    ce = common_edges(a, b);
    CHECK(ce.size() == 5);
    for (const auto& s : ce) CHECK(s.is_pendant());

    // Against a quadratic scan.
    for (int i = 0; i < 100; ++i) {
        const Tree u = oracle::random_tree(rng, 7, 0.7), v = oracle::random_tree(rng, 7, 0.7);
        std::set<Split> expect;
        for (const auto& e : u.interior()) {
            bool ok = true;
            for (const auto& f : v.interior()) ok = ok && nests(e.split, f.split);
            if (ok) expect.insert(e.split);
        }
        for (const auto& e : v.interior()) {
            bool ok = true;
            for (const auto& f : u.interior()) ok = ok && nests(e.split, f.split);
            if (ok) expect.insert(e.split);
        }
        std::set<Split> got;
        for (const auto& s : common_edges(u, v))
            if (s.is_interior()) got.insert(s);
        CHECK(got == expect);
    }
}

TEST_CASE("tree json round trip") {
    oracle::Rng rng(3);
    const Tree x = oracle::random_tree(rng, 8, 0.6);
    const auto j = tree_to_json(x);
    CHECK(j.at("leaf_count") == 8);
    CHECK(tree_from_json(j) == x);
}

TEST_CASE("random topology generator yields maximal compatible sets") {
    oracle::Rng rng(5);
    for (int n = 3; n <= 12; ++n) {
        const auto s = oracle::random_topology(rng, n);
        CHECK(static_cast<int>(s.size()) == n - 3);
        CHECK(is_compatible_set(s));
    }
}
