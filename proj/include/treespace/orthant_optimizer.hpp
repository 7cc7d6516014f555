#pragma once

#include <nlohmann/json.hpp>

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "treespace/frechet.hpp"

namespace treespace {

struct NewtonConfig {
    double epsilon = 1e-9;  // edges shorter than this are removed
    double delta = 1e-8;    // gradient tolerance
    double c0 = 0.99;       // boundary damping
    double c1 = 1e-4;       // sufficient decrease
    double c2 = 0.9;        // curvature
    int max_iters = 200;

    void validate() const;  // throws std::invalid_argument
};

// No step above 1e-16 gives sufficient decrease.
class StallError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadraticInit {
    Tree x;
    std::vector<Split> edges;          // orthant edges
    std::vector<double> upper;         // box bound per orthant edge
    std::vector<double> pendant_upper;
};

// Coordinate-wise mean of data edge lengths over the orthant's edges.
QuadraticInit init_quadratic_minimizer(const FrechetProblem& prob, const Orthant& orthant);

// Newton step on x's positive coordinates and pendants; steepest descent when
// the Hessian is not safely positive definite.
DirectionVector newton_direction(const FrechetProblem& prob, const Tree& x, bool* used_fallback = nullptr);

struct LineSearchResult {
    double alpha = 0.0;
    double alpha_max = 0.0;  // largest step keeping all coordinates nonnegative
    double value = 0.0;      // F at the accepted point
    bool curvature_satisfied = false;
};

LineSearchResult line_search(const FrechetProblem& prob, const Tree& x, const DirectionVector& p,
                             const NewtonConfig& cfg);

struct OptimalityReport {
    bool ok = false;
    double grad_norm = 0.0;
    std::vector<Split> violators;  // pendant violators appear as pendant splits
};

OptimalityReport check_delta_eps_optimality(const FrechetProblem& prob, const Tree& x, const NewtonConfig& cfg);

struct NewtonResult {
    Tree x;
    double grad_norm = 0.0;
    int iters = 0;
    bool converged = false;
    bool stalled = false;
    std::vector<Tree> iterates;         // x0 then one entry per iteration
    std::vector<double> start_values;   // F at the start of each iteration
    std::vector<double> accepted_values;  // F right after each accepted step
    std::vector<double> start_grad_norms;
};

NewtonResult damped_newton(const FrechetProblem& prob, const Orthant& orthant, const Tree& x0,
                           const NewtonConfig& cfg);

struct SimplexResult {
    Tree y_star;
    double f_star = 0.0;
    std::vector<Split> edges;     // support of the minimizer
    std::vector<double> weights;  // matching weights, summing to 1
};

// Per-face results of F'(y_prev, .) minimization, keyed by the face's sorted
// splits. `lower` is a convexity lower bound; it equals `value` up to the
// solver tolerance once the face has been solved to completion.
struct FaceEntry {
    double value = 0.0;
    double lower = 0.0;
    std::vector<double> weights;
};
using FaceCache = std::map<std::vector<Split>, FaceEntry>;

// Faces proven to stay above min(best so far, prune_at) are not solved to
// completion, so with a finite prune_at the returned f_star is only exact
// when it lies below prune_at.
SimplexResult minimize_dir_deriv_on_simplex(const FrechetProblem& prob, const Tree& y_prev,
                                            const std::vector<Split>& new_edges, FaceCache* cache = nullptr,
                                            double prune_at = std::numeric_limits<double>::infinity());

struct ChainLink {
    Tree y;
    std::vector<Split> face;  // edges added at this level
    double f_star = 0.0;
    double gradient_spread = 0.0;  // spread of the F' partials over `face`
    bool consistent = true;        // f_star >= previous f_star (KKT of previous level)
};

struct OptimalityCertificate {
    enum class Verdict { Optimal, DescentFound };

    Verdict verdict = Verdict::Optimal;
    Tree point;
    Orthant orthant;
    std::vector<ChainLink> chain;
    DirectionVector direction;  // set when a descent was found
    double step = 0.0;
    double grad_norm = 0.0;
    int iters = 0;

    bool optimal() const { return verdict == Verdict::Optimal; }
    nlohmann::json to_json() const;
};

// Checks x (in the closure of `orthant`) for relative optimality. On failure
// the certificate carries a descent direction and an accepted step.
// With `chain_depth_check` false only the first chain level is computed and
// only a descent below -delta is searched for.
OptimalityCertificate certify_in_orthant(const FrechetProblem& prob, const Tree& x, const Orthant& orthant,
                                         const NewtonConfig& cfg, FaceCache* cache = nullptr,
                                         bool chain_depth_check = true);

// Same check over every maximal orthant whose closure contains x.
OptimalityCertificate certify_all_orthants(const FrechetProblem& prob, const Tree& x, const NewtonConfig& cfg);

struct OrthantResult {
    Tree x;
    double value = 0.0;
    OptimalityCertificate certificate;
    int iters = 0;
    bool converged = false;
};

OrthantResult minimize_in_closed_orthant(const FrechetProblem& prob, const Orthant& orthant, const NewtonConfig& cfg,
                                         const std::optional<Tree>& start = std::nullopt);

}  // namespace treespace
