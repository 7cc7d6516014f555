#include "treespace/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace treespace {

namespace {

// Samples below this size are evaluated on the calling thread.
constexpr std::size_t kParallelThreshold = 64;

unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TREESPACE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

void require_nested(const Tree& x, const Tree& y, const char* what) {
    if (x.leaf_count() != y.leaf_count()) throw std::invalid_argument(std::string(what) + ": leaf counts differ");
    for (const auto& e : x.interior())
        if (!y.index_of(e.split)) throw std::invalid_argument(std::string(what) + ": orthant of x is not contained in orthant of y");
}

double lookup(const std::vector<Split>& splits, const std::vector<double>& vals, const Split& s) {
    auto it = std::lower_bound(splits.begin(), splits.end(), s);
    if (it != splits.end() && *it == s) return vals[static_cast<std::size_t>(it - splits.begin())];
    return 0.0;
}

// Value of F'(X, X+P) given supports computed just past X along P.
double dir_deriv_from(const Tree& x, const DirectionVector& p, const std::vector<Geodesic>& geos) {
    double total = 0.0;
    for (const auto& g : geos) {
        double s = 0.0;
        for (int k = 0; k < x.leaf_count(); ++k) s += 2.0 * p.pendants[k] * (x.pendants()[k] - g.t.pendants()[k]);
        for (const auto& c : g.common) {
            const double pc = lookup(p.splits, p.interior, c);
            if (pc == 0.0) continue;
            const double xc = x.length(c);
            s += 2.0 * pc * (xc - g.t.length(c));
        }
        for (std::size_t l = 0; l < g.support.size(); ++l) {
            const auto& a = g.support.pairs[l].a;
            const double na_x = split_norm(x, a);
            const double nb = g.b_norms[l];
            if (na_x > 0.0) {
                double dot = 0.0;
                for (const auto& e : a) dot += lookup(p.splits, p.interior, e) * x.length(e);
                s += 2.0 * dot * (1.0 + nb / na_x);
            } else {
                double np = 0.0;
                for (const auto& e : a) {
                    const double v = lookup(p.splits, p.interior, e);
                    np += v * v;
                }
                s += 2.0 * std::sqrt(np) * nb;
            }
        }
        total += s;
    }
    return total;
}

}  // namespace

Eigen::VectorXd GradientView::vector() const {
    Eigen::VectorXd v(interior.size() + pendants.size());
    for (std::size_t i = 0; i < interior.size(); ++i) v[static_cast<Eigen::Index>(i)] = interior[i];
    for (std::size_t i = 0; i < pendants.size(); ++i) v[static_cast<Eigen::Index>(interior.size() + i)] = pendants[i];
    return v;
}

double GradientView::at(const Split& s) const {
    if (s.is_pendant()) return pendants.at(static_cast<std::size_t>(s.pendant_leaf()));
    return lookup(splits, interior, s);
}

double GradientView::norm_inf() const {
    double m = 0.0;
    for (double v : interior) m = std::max(m, std::abs(v));
    for (double v : pendants) m = std::max(m, std::abs(v));
    return m;
}

double HessianView::entry(const Split& e, const Split& f) const {
    auto index = [&](const Split& s) -> long {
        if (s.is_pendant()) return static_cast<long>(splits.size()) + s.pendant_leaf();
        auto it = std::lower_bound(splits.begin(), splits.end(), s);
        if (it != splits.end() && *it == s) return it - splits.begin();
        return -1;
    };
    const long i = index(e), j = index(f);
    if (i < 0 || j < 0) return 0.0;
    return matrix(i, j);
}

double DirectionVector::max_abs_interior() const {
    double m = 0.0;
    for (double v : interior) m = std::max(m, std::abs(v));
    return m;
}

FrechetProblem::FrechetProblem(std::vector<Tree> data) : data_(std::move(data)) {
    if (data_.empty()) throw std::invalid_argument("frechet: need at least one data tree");
    for (const auto& t : data_)
        if (t.leaf_count() != data_.front().leaf_count()) throw std::invalid_argument("frechet: data trees have different leaf counts");
}

std::vector<Geodesic> FrechetProblem::geodesics_from(const Tree& x) const {
    if (x.leaf_count() != leaf_count()) throw std::invalid_argument("frechet: leaf count mismatch");
    std::vector<Geodesic> out(data_.size());
    const unsigned threads = data_.size() >= kParallelThreshold ? thread_cap() : 1u;
    if (threads <= 1) {
        for (std::size_t i = 0; i < data_.size(); ++i) out[i] = compute_geodesic(x, data_[i]);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (data_.size() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(data_.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) out[i] = compute_geodesic(x, data_[i]);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

double frechet_value(const std::vector<Geodesic>& geos) {
    double s = 0.0;
    for (const auto& g : geos) s += g.length * g.length;
    return s;
}

double frechet_value(const FrechetProblem& prob, const Tree& x) { return frechet_value(prob.geodesics_from(x)); }

GradientView restricted_gradient(const Tree& x, const std::vector<Geodesic>& geos) {
    GradientView gv;
    gv.splits = x.splits();
    gv.interior.assign(x.num_interior(), 0.0);
    gv.pendants.assign(x.leaf_count(), 0.0);
    for (const auto& g : geos) {
        for (int k = 0; k < x.leaf_count(); ++k) gv.pendants[k] += 2.0 * (x.pendants()[k] - g.t.pendants()[k]);
        for (const auto& c : g.common)
            if (auto k = x.index_of(c)) gv.interior[*k] += 2.0 * (x.interior()[*k].length - g.t.length(c));
        for (std::size_t l = 0; l < g.support.size(); ++l) {
            const double na = g.a_norms[l], nb = g.b_norms[l];
            if (na <= 0.0) throw std::logic_error("restricted_gradient: empty A set on a positive edge");
            for (const auto& e : g.support.pairs[l].a) {
                const auto k = *x.index_of(e);
                gv.interior[k] += 2.0 * x.interior()[k].length * (1.0 + nb / na);
            }
        }
    }
    return gv;
}

GradientView restricted_gradient(const FrechetProblem& prob, const Tree& x) {
    return restricted_gradient(x, prob.geodesics_from(x));
}

HessianView restricted_hessian(const Tree& x, const std::vector<Geodesic>& geos) {
    HessianView hv;
    hv.splits = x.splits();
    hv.leaf_count = x.leaf_count();
    const Eigen::Index m = static_cast<Eigen::Index>(x.num_interior());
    hv.matrix = Eigen::MatrixXd::Zero(m + x.leaf_count(), m + x.leaf_count());
    for (const auto& g : geos) {
        for (int k = 0; k < x.leaf_count(); ++k) hv.matrix(m + k, m + k) += 2.0;
        for (const auto& c : g.common)
            if (auto k = x.index_of(c)) hv.matrix(*k, *k) += 2.0;
        for (std::size_t l = 0; l < g.support.size(); ++l) {
            const double na = g.a_norms[l], nb = g.b_norms[l];
            const double na3 = na * na * na;
            const auto& a = g.support.pairs[l].a;
            std::vector<Eigen::Index> idx;
            for (const auto& e : a) idx.push_back(static_cast<Eigen::Index>(*x.index_of(e)));
            for (std::size_t u = 0; u < idx.size(); ++u) {
                const double xu = x.interior()[idx[u]].length;
                for (std::size_t v = 0; v < idx.size(); ++v) {
                    const double xv = x.interior()[idx[v]].length;
                    if (u == v)
                        hv.matrix(idx[u], idx[u]) += 2.0 * (1.0 + nb / na - nb * xu * xu / na3);
                    else
                        hv.matrix(idx[u], idx[v]) += -2.0 * nb * xu * xv / na3;
                }
            }
        }
    }
    return hv;
}

HessianView restricted_hessian(const FrechetProblem& prob, const Tree& x) {
    return restricted_hessian(x, prob.geodesics_from(x));
}

DirectionVector direction_between(const Tree& x, const Tree& y) {
    require_nested(x, y, "direction_between");
    DirectionVector p;
    p.splits = y.splits();
    for (const auto& e : y.interior()) p.interior.push_back(e.length - x.length(e.split));
    for (int k = 0; k < x.leaf_count(); ++k) p.pendants.push_back(y.pendants()[k] - x.pendants()[k]);
    return p;
}

Tree step_along(const Tree& x, const DirectionVector& p, double alpha) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < p.splits.size(); ++i) {
        const double v = x.length(p.splits[i]) + alpha * p.interior[i];
        if (v > 0.0) edges.push_back({p.splits[i], v});
    }
    for (const auto& e : x.interior())
        if (!std::binary_search(p.splits.begin(), p.splits.end(), e.split)) edges.push_back(e);
    std::vector<double> pend(x.leaf_count());
    for (int k = 0; k < x.leaf_count(); ++k) pend[k] = std::max(0.0, x.pendants()[k] + alpha * p.pendants[k]);
    return Tree(x.leaf_count(), std::move(edges), std::move(pend));
}

Tree probe_point(const Tree& x, const Tree& y, double rel_scale) {
    const DirectionVector p = direction_between(x, y);
    const double maxp = p.max_abs_interior();
    if (maxp == 0.0) return x;
    double min_edge = 1.0;
    if (x.num_interior() > 0) {
        min_edge = x.interior().front().length;
        for (const auto& e : x.interior()) min_edge = std::min(min_edge, e.length);
    }
    const double alpha = std::min(1.0, rel_scale * min_edge / maxp);
    return step_along(x, p, alpha);
}

double directional_derivative(const FrechetProblem& prob, const Tree& x, const Tree& y) {
    require_nested(x, y, "directional_derivative");
    const DirectionVector p = direction_between(x, y);
    const Tree z = probe_point(x, y);
    return dir_deriv_from(x, p, prob.geodesics_from(z));
}

GradientView dir_deriv_gradient(const FrechetProblem& prob, const Tree& x, const Tree& y) {
    require_nested(x, y, "dir_deriv_gradient");
    const DirectionVector p = direction_between(x, y);
    const auto geos = prob.geodesics_from(probe_point(x, y));
    GradientView gv;
    gv.splits = y.splits();
    gv.interior.assign(gv.splits.size(), 0.0);
    gv.pendants.assign(x.leaf_count(), 0.0);
    auto slot = [&](const Split& s) -> double& {
        auto it = std::lower_bound(gv.splits.begin(), gv.splits.end(), s);
        return gv.interior[static_cast<std::size_t>(it - gv.splits.begin())];
    };
    for (const auto& g : geos) {
        for (int k = 0; k < x.leaf_count(); ++k) gv.pendants[k] += 2.0 * (x.pendants()[k] - g.t.pendants()[k]);
        for (const auto& c : g.common) {
            if (!y.index_of(c)) continue;
            slot(c) += 2.0 * (x.length(c) - g.t.length(c));
        }
        for (std::size_t l = 0; l < g.support.size(); ++l) {
            const auto& a = g.support.pairs[l].a;
            const double na_x = split_norm(x, a);
            const double nb = g.b_norms[l];
            if (na_x > 0.0) {
                for (const auto& e : a) slot(e) += 2.0 * x.length(e) * (1.0 + nb / na_x);
            } else {
                double np = 0.0;
                for (const auto& e : a) {
                    const double v = lookup(p.splits, p.interior, e);
                    np += v * v;
                }
                np = std::sqrt(np);
                for (const auto& e : a) slot(e) += 2.0 * lookup(p.splits, p.interior, e) * nb / np;
            }
        }
    }
    return gv;
}

std::pair<Tree, Tree> decompose_direction(const Tree& x, const Tree& y) {
    require_nested(x, y, "decompose_direction");
    std::vector<Edge> par, perp;
    for (const auto& e : y.interior()) {
        if (x.index_of(e.split)) {
            par.push_back(e);
            perp.push_back({e.split, x.length(e.split)});
        } else {
            perp.push_back(e);
        }
    }
    return {Tree(x.leaf_count(), std::move(par), y.pendants()), Tree(x.leaf_count(), std::move(perp), x.pendants())};
}

double dir_deriv_of_dir_deriv(const FrechetProblem& prob, const Tree& x, const Tree& y, const Tree& y_prime) {
    require_nested(x, y, "dir_deriv_of_dir_deriv");
    require_nested(y, y_prime, "dir_deriv_of_dir_deriv");
    const GradientView gp = dir_deriv_gradient(prob, x, y);
    double total = 0.0;
    for (std::size_t i = 0; i < gp.splits.size(); ++i)
        total += (y_prime.length(gp.splits[i]) - y.interior()[i].length) * gp.interior[i];
    for (int k = 0; k < x.leaf_count(); ++k) total += (y_prime.pendants()[k] - y.pendants()[k]) * gp.pendants[k];

    std::vector<Edge> fresh;
    for (const auto& e : y_prime.interior())
        if (!y.index_of(e.split)) fresh.push_back(e);
    if (fresh.empty()) return total;
    // The perpendicular term is evaluated just past x toward y, where the
    // supports of F'(X, .) near Y are realised.
    const Tree y_hat = probe_point(x, y, 1e-5);
    std::vector<Edge> edges = y_hat.interior();
    edges.insert(edges.end(), fresh.begin(), fresh.end());
    const Tree target(x.leaf_count(), std::move(edges), y_hat.pendants());
    return total + directional_derivative(prob, y_hat, target);
}

std::vector<SupportPair> local_support_pairs(const Tree& x, const Tree& y, const Tree& t) {
    require_nested(x, y, "local_support_pairs");
    const Geodesic g = compute_geodesic(probe_point(x, y), t);
    std::vector<SupportPair> out;
    for (const auto& sp : g.support.pairs)
        if (split_norm(x, sp.a) == 0.0) out.push_back(sp);
    return out;
}

}  // namespace treespace
