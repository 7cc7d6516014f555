#include "treespace/global_search.hpp"

#include <algorithm>
#include <random>

namespace treespace {

Tree proximal_step(const Tree& x_prev, const Tree& t, double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("proximal_step: alpha must be nonnegative");
    const double s = std::clamp(1.0 / (1.0 + alpha), 0.0, 1.0);
    return point_at(compute_geodesic(x_prev, t), s);
}

GlobalResult global_mean(const FrechetProblem& prob, const ProximalSchedule& sched) {
    const auto& data = prob.data();
    const std::size_t n = data.size();
    std::mt19937_64 rng(sched.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    GlobalResult res;
    res.x = data.front();
    if (sched.trace_every) res.trace.push_back({0, frechet_value(prob, res.x), 0.0});
    std::size_t quiet = 0;
    for (std::size_t k = 1; k <= sched.max_steps; ++k) {
        const std::size_t i = sched.order == ProximalSchedule::Order::Cyclic ? k % n : pick(rng);
        const double alpha = sched.alpha ? sched.alpha(k) : static_cast<double>(k);
        const double s = std::clamp(1.0 / (1.0 + alpha), 0.0, 1.0);
        const Geodesic g = compute_geodesic(res.x, data[i]);
        const double moved = s * g.length;
        if (moved > 0.0) res.x = point_at(g, s);
        res.steps = k;
        if (sched.trace_every && k % sched.trace_every == 0) res.trace.push_back({k, frechet_value(prob, res.x), moved});
        quiet = moved < sched.tolerance ? quiet + 1 : 0;
        if (quiet >= 2 * n) {
            res.converged = true;
            break;
        }
    }
    if (sched.trace_every && (res.trace.empty() || res.trace.back().step != res.steps))
        res.trace.push_back({res.steps, frechet_value(prob, res.x), 0.0});
    return res;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
    out << "step,F,step_length\n";
    out.precision(17);
    for (const auto& r : trace) out << r.step << ',' << r.value << ',' << r.step_length << '\n';
}

HybridResult hybrid_mean(const FrechetProblem& prob, const ProximalSchedule& sched, const NewtonConfig& cfg) {
    HybridResult res;
    GlobalResult warm = global_mean(prob, sched);
    res.sturm_trace = std::move(warm.trace);
    res.sturm = warm.x;
    res.sturm_steps = warm.steps;
    res.sturm_value = frechet_value(prob, warm.x);

    OrthantResult cur = minimize_in_closed_orthant(prob, Orthant::of(warm.x), cfg);
    res.newton_iters = cur.iters;
    Tree x = cur.x;
    double fx = cur.value;
    for (res.rounds = 1; res.rounds <= 50; ++res.rounds) {
        OptimalityCertificate cert = certify_all_orthants(prob, x, cfg);
        if (cert.optimal() || cert.step <= 0.0) {
            res.certificate = std::move(cert);
            break;
        }
        const Tree start = step_along(x, cert.direction, cert.step);
        const Orthant target = Orthant::of(start).dimension() <= cert.orthant.dimension() ? cert.orthant : Orthant::of(start);
        cur = minimize_in_closed_orthant(prob, target, cfg, start);
        res.newton_iters += cur.iters;
        res.certificate = std::move(cert);
        if (!(cur.value < fx)) break;
        x = cur.x;
        fx = cur.value;
    }
    res.x = x;
    res.value = fx;
    return res;
}

}  // namespace treespace
