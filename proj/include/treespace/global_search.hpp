#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "treespace/frechet.hpp"
#include "treespace/orthant_optimizer.hpp"

namespace treespace {

struct ProximalSchedule {
    enum class Order { Cyclic, UniformRandom };

    Order order = Order::Cyclic;
    std::uint64_t seed = 0;
    // alpha_k for step k >= 1; empty means alpha_k = k.
    std::function<double(std::size_t)> alpha;
    std::size_t max_steps = 1000000;
    double tolerance = 1e-10;  // on successive-iterate distance
    // Record F every this many steps in the trace (0 disables F sampling).
    std::size_t trace_every = 0;
};

// Minimizer over the geodesic from x_prev to t of (1-s)^2 d^2 + alpha s^2 d^2.
Tree proximal_step(const Tree& x_prev, const Tree& t, double alpha);

struct TraceRow {
    std::size_t step = 0;
    double value = 0.0;
    double step_length = 0.0;
};

struct GlobalResult {
    Tree x;
    std::size_t steps = 0;
    bool converged = false;
    std::vector<TraceRow> trace;  // only rows where F was sampled
};

GlobalResult global_mean(const FrechetProblem& prob, const ProximalSchedule& sched);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

struct HybridResult {
    Tree x;
    double value = 0.0;
    Tree sturm;
    double sturm_value = 0.0;
    std::size_t sturm_steps = 0;
    std::vector<TraceRow> sturm_trace;
    OptimalityCertificate certificate;  // over all maximal orthants at x
    int rounds = 0;
    int newton_iters = 0;
};

// Proximal point warm start, then closed-orthant minimization moved between
// orthants until no orthant around the point offers descent.
HybridResult hybrid_mean(const FrechetProblem& prob, const ProximalSchedule& sched, const NewtonConfig& cfg);

}  // namespace treespace
