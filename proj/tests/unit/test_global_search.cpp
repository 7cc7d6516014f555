#include "doctest.h"

#include <sstream>

#include "oracle.hpp"
#include "treespace/global_search.hpp"

using namespace treespace;

namespace {

Split S(std::vector<int> zero, int n) { return Split::from_labels(zero, n); }

}  // namespace

TEST_CASE("proximal step") {
    const std::vector<double> p(5, 0.0);
    const Tree x(5, {{S({0, 1}, 5), 1.0}}, p), t(5, {{S({0, 1}, 5), 3.0}}, p);
    CHECK(proximal_step(x, t, 1e300) == x);
    CHECK(proximal_step(x, t, 1.0).length(S({0, 1}, 5)) == doctest::Approx(2.0));
    // d = 2, alpha = 3: step fraction 1/4, remaining distance 1.5.
    const Tree y = proximal_step(x, t, 3.0);
    CHECK(distance(x, y) == doctest::Approx(0.5));
    CHECK(distance(y, t) == doctest::Approx(1.5));
    CHECK(proximal_step(x, t, 0.0) == t);
    CHECK_THROWS_AS(proximal_step(x, t, -1.0), std::invalid_argument);
}

TEST_CASE("global mean simple cases") {
    oracle::Rng rng(1);
    const Tree a = oracle::random_tree(rng, 6);
    ProximalSchedule sched;
    const auto one = global_mean(FrechetProblem({a}), sched);
    CHECK(one.x == a);
    CHECK(one.converged);

    const auto top = oracle::random_topology(rng, 6);
    const Tree u = oracle::random_tree_on(rng, 6, top), v = oracle::random_tree_on(rng, 6, top);
    const auto two = global_mean(FrechetProblem({u, v}), sched);
    for (const auto& s : top) CHECK(std::abs(two.x.length(s) - 0.5 * (u.length(s) + v.length(s))) < 1e-4);

    ProximalSchedule ten_k;
    ten_k.max_steps = 10000;
    const auto rays = global_mean(FrechetProblem(oracle::three_ray_sample()), ten_k);
    for (const auto& e : rays.x.interior()) CHECK(e.length < 1e-3);
}

TEST_CASE("iterates stay valid; schedules are deterministic") {
    oracle::Rng rng(2);
    FrechetProblem prob(oracle::random_sample(rng, 6, 7, 0.8));
    ProximalSchedule sched;
    sched.order = ProximalSchedule::Order::UniformRandom;
    sched.seed = 42;
    sched.max_steps = 500;
    sched.trace_every = 1;
    const auto a = global_mean(prob, sched), b = global_mean(prob, sched);
    CHECK(a.x == b.x);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) CHECK(a.trace[k].value == b.trace[k].value);
    sched.seed = 43;
    CHECK_FALSE(global_mean(prob, sched).x == a.x);

    // Replay the cyclic schedule step by step and check every iterate.
    ProximalSchedule cyc;
    cyc.max_steps = 200;
    Tree x = prob.data().front();
    for (std::size_t k = 1; k <= cyc.max_steps; ++k) {
        x = proximal_step(x, prob.data()[k % prob.n()], static_cast<double>(k));
        CHECK(is_compatible_set(x.splits()));
        for (const auto& e : x.interior()) CHECK(e.length > 0.0);
    }
    CHECK(global_mean(prob, cyc).x == x);
}

TEST_CASE("custom alpha sequence and stopping rule") {
    oracle::Rng rng(3);
    FrechetProblem prob(oracle::random_sample(rng, 4, 6));
    ProximalSchedule huge;
    huge.alpha = [](std::size_t) { return 1e300; };
    const auto r = global_mean(prob, huge);
    CHECK(r.converged);
    CHECK(r.steps == 2 * prob.n());
    CHECK(r.x == prob.data().front());
}

TEST_CASE("trace csv") {
    oracle::Rng rng(4);
    FrechetProblem prob(oracle::random_sample(rng, 3, 5));
    ProximalSchedule sched;
    sched.max_steps = 10;
    sched.trace_every = 5;
    const auto r = global_mean(prob, sched);
    REQUIRE(r.trace.size() == 3);
    CHECK(r.trace[0].step == 0);
    CHECK(r.trace[2].step == 10);
    std::ostringstream out;
    write_trace_csv(out, r.trace);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "step,F,step_length");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("global search value approaches the orthant optimizer value") {
    oracle::Rng rng(5);
    NewtonConfig cfg;
    for (int i = 0; i < 6; ++i) {
        const int leaves = 5 + static_cast<int>(rng() % 3);
        FrechetProblem prob(i % 2 ? oracle::random_sample(rng, 6, leaves) : oracle::clustered_sample(rng, 6, leaves, 0.5, 0.6));
        ProximalSchedule sched;
        sched.max_steps = 100000;
        const auto g = global_mean(prob, sched);
        const auto h = hybrid_mean(prob, ProximalSchedule{.max_steps = 2000}, cfg);
        CHECK(h.certificate.optimal());
        CHECK(std::abs(frechet_value(prob, g.x) - h.value) < 1e-3);
        CHECK(h.value <= frechet_value(prob, g.x) + 1e-9);
    }
}

TEST_CASE("hybrid search recovers from a poor warm start") {
    oracle::Rng rng(6);
    NewtonConfig cfg;
    int moved = 0;
    for (int i = 0; i < 8; ++i) {
        FrechetProblem prob(i % 2 ? oracle::random_sample(rng, 7, 6) : oracle::clustered_sample(rng, 7, 7, 0.5, 0.8));
        ProximalSchedule tiny;
        tiny.max_steps = 1;
        ProximalSchedule longer;
        longer.max_steps = 3000;
        const auto a = hybrid_mean(prob, tiny, cfg);
        const auto b = hybrid_mean(prob, longer, cfg);
        CHECK(a.certificate.optimal());
        CHECK(b.certificate.optimal());
        CHECK(coordinate_distance(a.x, b.x) < 1e-6);
        CHECK(std::abs(a.value - b.value) < 1e-9 * (1 + b.value));
        moved += a.rounds > 1;
    }
    CHECK(moved > 0);
}
