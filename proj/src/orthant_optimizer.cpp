#include "treespace/orthant_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace treespace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinStep = 1e-16;
// Lower clamp on face weights so every face edge stays present in Y.
constexpr double kFaceFloor = 1e-10;

double dot(const GradientView& g, const DirectionVector& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.splits.size(); ++i) s += g.at(p.splits[i]) * p.interior[i];
    for (std::size_t k = 0; k < p.pendants.size(); ++k) s += g.pendants[k] * p.pendants[k];
    return s;
}

DirectionVector from_vector(const Tree& x, const Eigen::VectorXd& v) {
    DirectionVector p;
    p.splits = x.splits();
    const std::size_t m = x.num_interior();
    for (std::size_t i = 0; i < m; ++i) p.interior.push_back(v[static_cast<Eigen::Index>(i)]);
    for (int k = 0; k < x.leaf_count(); ++k) p.pendants.push_back(v[static_cast<Eigen::Index>(m + k)]);
    return p;
}

DirectionVector newton_from(const Tree& x, const GradientView& g, const HessianView& h, bool* used_fallback) {
    const Eigen::VectorXd gv = g.vector();
    if (used_fallback) *used_fallback = false;
    if (gv.lpNorm<Eigen::Infinity>() == 0.0) return from_vector(x, Eigen::VectorXd::Zero(gv.size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.matrix);
    const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    if (eig.info() != Eigen::Success || lo <= 0.0 || hi / lo > 1e12) {
        if (used_fallback) *used_fallback = true;
        return from_vector(x, -gv);
    }
    Eigen::VectorXd p = eig.eigenvectors() * (eig.eigenvectors().transpose() * (-gv)).cwiseQuotient(eig.eigenvalues());
    if (p.dot(gv) >= 0.0) {
        if (used_fallback) *used_fallback = true;
        p = -gv;
    }
    return from_vector(x, p);
}

// x with every interior edge below eps removed.
Tree prune(const Tree& x, double eps) {
    std::vector<Edge> keep;
    for (const auto& e : x.interior())
        if (e.length >= eps) keep.push_back(e);
    if (keep.size() == x.num_interior()) return x;
    return Tree::trusted(x.leaf_count(), std::move(keep), x.pendants());
}

Tree add_edges(const Tree& y, const std::vector<Split>& edges, const std::vector<double>& w) {
    std::vector<Edge> all = y.interior();
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (w[i] > 0.0) all.push_back({edges[i], y.length(edges[i]) + w[i]});
    return Tree(y.leaf_count(), std::move(all), y.pendants());
}

// Euclidean projection onto {w >= floor, sum w = 1}.
std::vector<double> project_simplex(std::vector<double> v, double floor) {
    const std::size_t k = v.size();
    const double mass = 1.0 - floor * static_cast<double>(k);
    std::vector<double> u(k);
    for (std::size_t i = 0; i < k; ++i) u[i] = v[i] - floor;
    std::vector<double> s = u;
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        cum += s[i];
        const double t = (cum - mass) / static_cast<double>(i + 1);
        if (s[i] - t > 0.0) theta = t;
    }
    for (std::size_t i = 0; i < k; ++i) v[i] = floor + std::max(0.0, u[i] - theta);
    return v;
}

struct FaceMin {
    double value = kInf;
    double lower = -kInf;
    std::vector<double> w;
};

// Convexity bound over the whole face from one gradient: f + min_i g_i - g.w.
double linear_lower_bound(double f, const std::vector<double>& g, const std::vector<double>& w) {
    double gw = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gw += g[i] * w[i];
    return f + *std::min_element(g.begin(), g.end()) - gw;
}

// Minimum of F'(y, y + sum w_e e) over the relative interior of one face,
// by projected gradient with Barzilai-Borwein steps and Armijo backtracking.
// Stops early once the face provably cannot go below `cutoff`.
FaceMin minimize_on_face(const FrechetProblem& prob, const Tree& y, const std::vector<Split>& face, double cutoff) {
    const std::size_t k = face.size();
    auto value = [&](const std::vector<double>& w) { return directional_derivative(prob, y, add_edges(y, face, w)); };
    auto grad = [&](const std::vector<double>& w) {
        const GradientView g = dir_deriv_gradient(prob, y, add_edges(y, face, w));
        std::vector<double> out(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = g.at(face[i]);
        return out;
    };
    FaceMin best;
    if (k == 1) {
        best.w = {1.0};
        best.value = value(best.w);
        best.lower = best.value;
        return best;
    }
    std::vector<double> w(k, 1.0 / static_cast<double>(k));
    double f = value(w);
    std::vector<double> g = grad(w);
    double lower = linear_lower_bound(f, g, w);
    double step = 1.0 / (1.0 + std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0)));
    for (int it = 0; it < 200; ++it) {
        if (lower >= cutoff || f - lower <= 1e-11 * (1.0 + std::abs(f))) break;
        std::vector<double> trial, wn;
        double fn = kInf;
        double s = step;
        for (int bt = 0; bt < 40; ++bt) {
            trial.resize(k);
            for (std::size_t i = 0; i < k; ++i) trial[i] = w[i] - s * g[i];
            wn = project_simplex(trial, kFaceFloor);
            double decrease = 0.0;
            for (std::size_t i = 0; i < k; ++i) decrease += g[i] * (wn[i] - w[i]);
            fn = value(wn);
            if (fn <= f + 1e-4 * decrease) break;
            s *= 0.5;
        }
        double move = 0.0;
        for (std::size_t i = 0; i < k; ++i) move = std::max(move, std::abs(wn[i] - w[i]));
        if (!(fn <= f)) break;
        const std::vector<double> gn = grad(wn);
        double sy = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double di = wn[i] - w[i], yi = gn[i] - g[i];
            sy += di * yi;
            ss += di * di;
        }
        w = std::move(wn);
        f = fn;
        g = gn;
        lower = std::max(lower, linear_lower_bound(f, g, w));
        if (move < 1e-12) break;
        step = sy > 0.0 ? ss / sy : 2.0 * s;
        // A weight pinned at the floor means the minimum lies on a subface.
        if (std::any_of(w.begin(), w.end(), [](double v) { return v <= 2.0 * kFaceFloor; }) && move < 1e-9) break;
    }
    best.value = f;
    best.lower = std::min(lower, f);
    best.w = std::move(w);
    return best;
}

std::vector<std::vector<Split>> faces_of(const std::vector<Split>& edges) {
    const std::size_t k = edges.size();
    std::vector<std::vector<Split>> faces;
    if (k <= 5) {
        for (std::uint64_t m = 1; m < (1ULL << k); ++m) {
            std::vector<Split> f;
            for (std::size_t i = 0; i < k; ++i)
                if (m >> i & 1ULL) f.push_back(edges[i]);
            faces.push_back(std::move(f));
        }
    } else {
        for (std::size_t i = 0; i < k; ++i) faces.push_back({edges[i]});
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) faces.push_back({edges[i], edges[j]});
        faces.push_back(edges);
    }
    std::stable_sort(faces.begin(), faces.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return faces;
}

double tree_scale(const FrechetProblem& prob) {
    double s = 0.0;
    for (const auto& t : prob.data()) {
        for (const auto& e : t.interior()) s = std::max(s, e.length);
        for (double p : t.pendants()) s = std::max(s, p);
    }
    return s > 0.0 ? s : 1.0;
}

// Armijo backtracking along x + alpha*p from alpha_max, slope f_star < 0.
double descent_step(const FrechetProblem& prob, const Tree& x, const DirectionVector& p, double slope,
                    double alpha_max, const NewtonConfig& cfg) {
    const double f0 = frechet_value(prob, x);
    for (double a = alpha_max; a > kMinStep; a *= 0.5)
        if (frechet_value(prob, step_along(x, p, a)) <= f0 + cfg.c1 * a * slope) return a;
    return 0.0;
}

// Direction adding only the given edges with the given weights.
DirectionVector perpendicular(const Tree& x, const std::vector<Split>& edges, const std::vector<double>& w) {
    DirectionVector p;
    std::vector<std::pair<Split, double>> items;
    for (std::size_t i = 0; i < edges.size(); ++i) items.push_back({edges[i], w[i]});
    for (const auto& e : x.interior()) items.push_back({e.split, 0.0});
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [s, v] : items) {
        p.splits.push_back(s);
        p.interior.push_back(v);
    }
    p.pendants.assign(x.leaf_count(), 0.0);
    return p;
}

double box_step(const QuadraticInit& box, const std::vector<Split>& edges, const std::vector<double>& w,
                double scale) {
    double a = kInf;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (w[i] <= 0.0) continue;
        double u = 0.0;
        for (std::size_t k = 0; k < box.edges.size(); ++k)
            if (box.edges[k] == edges[i]) u = box.upper[k];
        if (u <= 0.0) u = scale;
        a = std::min(a, u / w[i]);
    }
    return std::isfinite(a) ? a : scale;
}

}  // namespace

void NewtonConfig::validate() const {
    if (!(epsilon > 0.0) || !(delta > 0.0)) throw std::invalid_argument("NewtonConfig: epsilon and delta must be positive");
    if (!(c0 > 0.0 && c0 < 1.0)) throw std::invalid_argument("NewtonConfig: c0 must lie in (0,1)");
    if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) throw std::invalid_argument("NewtonConfig: need 0 < c1 < c2 < 1");
    if (max_iters < 1) throw std::invalid_argument("NewtonConfig: max_iters must be positive");
}

QuadraticInit init_quadratic_minimizer(const FrechetProblem& prob, const Orthant& orthant) {
    const double n = static_cast<double>(prob.n());
    QuadraticInit q;
    q.edges = orthant.edges;
    std::vector<Edge> edges;
    for (const auto& s : orthant.edges) {
        double m = 0.0;
        for (const auto& t : prob.data()) m += t.length(s);
        m /= n;
        q.upper.push_back(m);
        if (m > 0.0) edges.push_back({s, m});
    }
    q.pendant_upper.assign(prob.leaf_count(), 0.0);
    for (const auto& t : prob.data())
        for (int k = 0; k < prob.leaf_count(); ++k) q.pendant_upper[k] += t.pendants()[k] / n;
    q.x = Tree(prob.leaf_count(), std::move(edges), q.pendant_upper);
    return q;
}

DirectionVector newton_direction(const FrechetProblem& prob, const Tree& x, bool* used_fallback) {
    const auto geos = prob.geodesics_from(x);
    return newton_from(x, restricted_gradient(x, geos), restricted_hessian(x, geos), used_fallback);
}

LineSearchResult line_search(const FrechetProblem& prob, const Tree& x, const DirectionVector& p,
                             const NewtonConfig& cfg) {
    const auto geos = prob.geodesics_from(x);
    const double f0 = frechet_value(geos);
    const double slope = dot(restricted_gradient(x, geos), p);
    LineSearchResult r;
    r.value = f0;
    if (slope >= 0.0) {
        if (slope == 0.0) return r;
        throw std::invalid_argument("line_search: not a descent direction");
    }
    double a0 = kInf;
    for (std::size_t i = 0; i < p.splits.size(); ++i)
        if (p.interior[i] < 0.0) a0 = std::min(a0, x.length(p.splits[i]) / -p.interior[i]);
    for (std::size_t k = 0; k < p.pendants.size(); ++k)
        if (p.pendants[k] < 0.0) a0 = std::min(a0, x.pendants()[k] / -p.pendants[k]);
    r.alpha_max = a0;
    const double cap = std::isfinite(a0) ? cfg.c0 * a0 : kInf;

    auto armijo = [&](double a, double& fa) {
        fa = frechet_value(prob, step_along(x, p, a));
        return fa <= f0 + cfg.c1 * a * slope;
    };
    auto curvature = [&](double a) {
        return dot(restricted_gradient(prob, step_along(x, p, a)), p) >= cfg.c2 * slope;
    };

    double a = std::min(1.0, cap), fa = 0.0;
    while (!armijo(a, fa)) {
        a *= 0.5;
        if (a < kMinStep) throw StallError("line_search: no step satisfies sufficient decrease");
    }
    r.alpha = a;
    r.value = fa;
    r.curvature_satisfied = curvature(a);
    // Steps that are too short for the curvature condition are lengthened up to the cap.
    for (int grow = 0; !r.curvature_satisfied && r.alpha < cap && grow < 30; ++grow) {
        const double b = std::min(2.0 * r.alpha, cap);
        double fb = 0.0;
        if (!armijo(b, fb) || fb > r.value) break;
        r.alpha = b;
        r.value = fb;
        r.curvature_satisfied = curvature(b);
    }
    return r;
}

OptimalityReport check_delta_eps_optimality(const FrechetProblem& prob, const Tree& x, const NewtonConfig& cfg) {
    const GradientView g = restricted_gradient(prob, x);
    OptimalityReport rep;
    rep.grad_norm = g.norm_inf();
    auto ok = [&](double len, double partial) {
        if (len > cfg.epsilon) return std::abs(partial) < cfg.delta;
        return partial >= 0.0 || std::abs(partial) < cfg.delta;
    };
    for (std::size_t i = 0; i < x.num_interior(); ++i)
        if (!ok(x.interior()[i].length, g.interior[i])) rep.violators.push_back(x.interior()[i].split);
    for (int k = 0; k < x.leaf_count(); ++k)
        if (!ok(x.pendants()[k], g.pendants[k])) rep.violators.push_back(Split::pendant(k, x.leaf_count()));
    rep.ok = rep.violators.empty();
    return rep;
}

NewtonResult damped_newton(const FrechetProblem& prob, const Orthant& orthant, const Tree& x0,
                           const NewtonConfig& cfg) {
    cfg.validate();
    if (!orthant.contains(x0)) throw std::invalid_argument("damped_newton: start point outside the orthant");
    NewtonResult res;
    res.x = prune(x0, cfg.epsilon);
    res.iterates.push_back(res.x);
    for (;;) {
        const OptimalityReport rep = check_delta_eps_optimality(prob, res.x, cfg);
        res.grad_norm = rep.grad_norm;
        if (rep.ok) {
            res.converged = true;
            return res;
        }
        if (res.iters >= cfg.max_iters) return res;
        const auto geos = prob.geodesics_from(res.x);
        const DirectionVector p = newton_from(res.x, restricted_gradient(res.x, geos), restricted_hessian(res.x, geos), nullptr);
        LineSearchResult ls;
        try {
            ls = line_search(prob, res.x, p, cfg);
        } catch (const StallError&) {
            res.stalled = true;
            return res;
        }
        if (ls.alpha == 0.0) {
            res.stalled = true;
            return res;
        }
        res.start_values.push_back(frechet_value(geos));
        res.start_grad_norms.push_back(rep.grad_norm);
        res.accepted_values.push_back(ls.value);
        res.x = prune(step_along(res.x, p, ls.alpha), cfg.epsilon);
        res.iterates.push_back(res.x);
        ++res.iters;
    }
}

SimplexResult minimize_dir_deriv_on_simplex(const FrechetProblem& prob, const Tree& y_prev,
                                            const std::vector<Split>& new_edges, FaceCache* cache,
                                            double prune_at) {
    if (new_edges.empty()) throw std::invalid_argument("minimize_dir_deriv_on_simplex: no new edges");
    std::vector<Split> edges = new_edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& e : edges) {
        if (y_prev.has(e)) throw std::invalid_argument("minimize_dir_deriv_on_simplex: edge already positive");
        for (const auto& f : y_prev.interior())
            if (!splits_compatible(e, f.split)) throw std::invalid_argument("minimize_dir_deriv_on_simplex: incompatible edge");
    }
    if (!is_compatible_set(edges)) throw std::invalid_argument("minimize_dir_deriv_on_simplex: new edges not compatible");

    SimplexResult best;
    best.f_star = kInf;
    for (const auto& face : faces_of(edges)) {
        const double cutoff = std::min(prune_at, best.edges.empty() ? kInf : best.f_star);
        FaceMin fm;
        bool have = false;
        if (cache) {
            auto it = cache->find(face);
            // A cached partial solve is reusable when its bound already rules the face out.
            if (it != cache->end() &&
                (it->second.value - it->second.lower <= 1e-10 * (1.0 + std::abs(it->second.value)) ||
                 it->second.lower >= cutoff)) {
                fm.value = it->second.value;
                fm.lower = it->second.lower;
                fm.w = it->second.weights;
                have = true;
            }
        }
        if (!have) {
            fm = minimize_on_face(prob, y_prev, face, cutoff);
            if (cache) (*cache)[face] = {fm.value, fm.lower, fm.w};
        }
        // Faces come smallest first; a larger face must win by a clear margin.
        if (best.edges.empty() || fm.value < best.f_star - 1e-12 * (1.0 + std::abs(best.f_star))) {
            best.f_star = fm.value;
            best.edges = face;
            best.weights = fm.w;
        }
    }
    if (!std::isfinite(best.f_star)) throw std::runtime_error("minimize_dir_deriv_on_simplex: non-finite directional derivative");
    best.y_star = add_edges(y_prev, best.edges, best.weights);
    return best;
}

nlohmann::json OptimalityCertificate::to_json() const {
    nlohmann::json j;
    j["verdict"] = optimal() ? "optimal" : "descent";
    j["chain"] = nlohmann::json::array();
    for (const auto& link : chain) {
        nlohmann::json face = nlohmann::json::array();
        for (const auto& s : link.face) face.push_back(split_to_json(s));
        j["chain"].push_back({{"face", face}, {"f_star", link.f_star}});
    }
    j["grad_norm"] = grad_norm;
    j["iters"] = iters;
    if (!optimal()) {
        nlohmann::json dir = nlohmann::json::array();
        for (std::size_t i = 0; i < direction.splits.size(); ++i)
            if (direction.interior[i] != 0.0)
                dir.push_back({{"split", split_to_json(direction.splits[i])}, {"p", direction.interior[i]}});
        j["direction"] = dir;
        j["pendant_direction"] = direction.pendants;
        j["step"] = step;
    }
    return j;
}

OptimalityCertificate certify_in_orthant(const FrechetProblem& prob, const Tree& x, const Orthant& orthant,
                                         const NewtonConfig& cfg, FaceCache* cache, bool chain_depth_check) {
    if (!orthant.contains(x)) throw std::invalid_argument("certify_in_orthant: point outside the orthant");
    OptimalityCertificate cert;
    cert.point = x;
    cert.orthant = orthant;
    const OptimalityReport rep = check_delta_eps_optimality(prob, x, cfg);
    cert.grad_norm = rep.grad_norm;
    if (!rep.ok) {
        cert.verdict = OptimalityCertificate::Verdict::DescentFound;
        cert.direction = newton_direction(prob, x);
        try {
            cert.step = line_search(prob, x, cert.direction, cfg).alpha;
        } catch (const StallError&) {
            cert.step = 0.0;
        }
        return cert;
    }

    std::vector<Split> remaining;
    for (const auto& s : orthant.edges)
        if (!x.has(s)) remaining.push_back(s);
    if (remaining.empty()) return cert;

    const QuadraticInit box = init_quadratic_minimizer(prob, orthant);
    const double scale = tree_scale(prob);

    // Level one: steepest perpendicular direction out of x's face.
    SimplexResult s1 = minimize_dir_deriv_on_simplex(prob, x, remaining, cache, chain_depth_check ? kInf : -cfg.delta);
    auto spread_of = [&](const Tree& base, const SimplexResult& s) {
        if (s.edges.size() < 2) return 0.0;
        const GradientView g = dir_deriv_gradient(prob, base, s.y_star);
        double lo = kInf, hi = -kInf;
        for (const auto& e : s.edges) {
            lo = std::min(lo, g.at(e));
            hi = std::max(hi, g.at(e));
        }
        return hi - lo;
    };
    cert.chain.push_back({s1.y_star, s1.edges, s1.f_star, spread_of(x, s1), true});

    // Deeper levels check that no unused edge improves the level above.
    Tree base = x, y = s1.y_star;
    SimplexResult prev = s1;
    for (auto e : s1.edges) remaining.erase(std::find(remaining.begin(), remaining.end(), e));
    while (chain_depth_check && !remaining.empty() && cert.chain.back().f_star >= -cfg.delta) {
        const Tree base_next = probe_point(base, add_edges(base, prev.edges, prev.weights), 1e-5);
        SimplexResult si = minimize_dir_deriv_on_simplex(prob, base_next, remaining);
        ChainLink link{add_edges(y, si.edges, si.weights), si.edges, si.f_star, spread_of(base_next, si), true};
        const double fprev = cert.chain.back().f_star;
        link.consistent = si.f_star >= fprev - 1e-7 * (1.0 + std::abs(fprev));
        if (!link.consistent && cert.chain.size() == 1) {
            // Mix the unused edges into the level-one minimizer and look for a lower value.
            std::vector<Split> mixed = s1.edges;
            mixed.insert(mixed.end(), si.edges.begin(), si.edges.end());
            for (double t = 0.5; t > 1e-6; t *= 0.5) {
                std::vector<double> w;
                for (double v : s1.weights) w.push_back((1 - t) * v);
                for (double v : si.weights) w.push_back(t * v);
                const double f = directional_derivative(prob, x, add_edges(x, mixed, w));
                if (f < cert.chain.front().f_star) {
                    std::vector<std::size_t> ord(mixed.size());
                    std::iota(ord.begin(), ord.end(), 0);
                    std::sort(ord.begin(), ord.end(), [&](auto a, auto b) { return mixed[a] < mixed[b]; });
                    s1.edges.clear();
                    s1.weights.clear();
                    for (auto k : ord) {
                        s1.edges.push_back(mixed[k]);
                        s1.weights.push_back(w[k]);
                    }
                    s1.f_star = f;
                    s1.y_star = add_edges(x, s1.edges, s1.weights);
                    cert.chain.front() = {s1.y_star, s1.edges, f, spread_of(x, s1), true};
                }
            }
            if (cert.chain.front().f_star < -cfg.delta) break;
        }
        cert.chain.push_back(link);
        for (auto e : si.edges) remaining.erase(std::find(remaining.begin(), remaining.end(), e));
        base = base_next;
        y = link.y;
        prev = si;
    }

    if (cert.chain.front().f_star < -cfg.delta) {
        cert.verdict = OptimalityCertificate::Verdict::DescentFound;
        cert.direction = perpendicular(x, s1.edges, s1.weights);
        cert.step = descent_step(prob, x, cert.direction, s1.f_star, box_step(box, s1.edges, s1.weights, scale), cfg);
    }
    return cert;
}

OptimalityCertificate certify_all_orthants(const FrechetProblem& prob, const Tree& x, const NewtonConfig& cfg) {
    const auto orthants = maximal_orthants_containing(x);
    if (orthants.empty()) return certify_in_orthant(prob, x, Orthant::of(x), cfg);
    FaceCache cache;
    std::size_t worst = 0;
    double worst_f = kInf;
    for (std::size_t k = 0; k < orthants.size(); ++k) {
        OptimalityCertificate c = certify_in_orthant(prob, x, orthants[k], cfg, &cache, false);
        if (!c.optimal()) return certify_in_orthant(prob, x, orthants[k], cfg);
        const double f = c.chain.empty() ? kInf : c.chain.front().f_star;
        if (f < worst_f) {
            worst_f = f;
            worst = k;
        }
    }
    return certify_in_orthant(prob, x, orthants[worst], cfg, &cache);
}

OrthantResult minimize_in_closed_orthant(const FrechetProblem& prob, const Orthant& orthant, const NewtonConfig& cfg,
                                         const std::optional<Tree>& start) {
    cfg.validate();
    for (const auto& t : prob.data())
        if (t.leaf_count() != orthant.leaf_count) throw std::invalid_argument("minimize_in_closed_orthant: leaf count mismatch");
    OrthantResult res;
    Tree x = start ? *start : init_quadratic_minimizer(prob, orthant).x;
    if (!orthant.contains(x)) throw std::invalid_argument("minimize_in_closed_orthant: start point outside the orthant");
    NewtonConfig face_cfg = cfg;
    const int max_rounds = 4 * static_cast<int>(orthant.dimension()) + 20;
    for (int round = 0; round < max_rounds && res.iters <= cfg.max_iters; ++round) {
        NewtonConfig run_cfg = face_cfg;
        run_cfg.max_iters = std::max(1, cfg.max_iters - res.iters);
        const NewtonResult nr = damped_newton(prob, orthant, x, run_cfg);
        res.iters += nr.iters;
        x = nr.x;
        OptimalityCertificate cert = certify_in_orthant(prob, x, orthant, cfg);
        cert.iters = res.iters;
        if (cert.optimal()) {
            res.certificate = std::move(cert);
            res.converged = true;
            break;
        }
        if (cert.step <= 0.0) {
            res.certificate = std::move(cert);
            break;
        }
        const DirectionVector& p = cert.direction;
        x = step_along(x, p, cert.step);
        // New edges must survive the next Newton run.
        double min_p = kInf;
        for (std::size_t i = 0; i < p.splits.size(); ++i)
            if (p.interior[i] > 0.0) min_p = std::min(min_p, p.interior[i]);
        face_cfg.epsilon = std::isfinite(min_p) ? std::min(cfg.epsilon, 0.5 * cert.step * min_p) : cfg.epsilon;
        res.certificate = std::move(cert);
    }
    res.x = x;
    res.value = frechet_value(prob, x);
    return res;
}

}  // namespace treespace
