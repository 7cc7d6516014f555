#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "treespace/geodesic.hpp"

namespace treespace {

// Coordinates are the listed interior splits followed by one pendant per leaf.
struct GradientView {
    std::vector<Split> splits;
    std::vector<double> interior;
    std::vector<double> pendants;

    Eigen::VectorXd vector() const;
    double at(const Split& s) const;  // 0 for splits not listed
    double norm_inf() const;
};

struct HessianView {
    std::vector<Split> splits;
    int leaf_count = 0;
    Eigen::MatrixXd matrix;  // (|splits| + leaf_count) square

    double entry(const Split& e, const Split& f) const;
};

// p_e = |e|_Y - |e|_X over the interior splits of Y plus one entry per pendant.
struct DirectionVector {
    std::vector<Split> splits;
    std::vector<double> interior;
    std::vector<double> pendants;

    double max_abs_interior() const;
};

class FrechetProblem {
public:
    explicit FrechetProblem(std::vector<Tree> data);

    const std::vector<Tree>& data() const { return data_; }
    std::size_t n() const { return data_.size(); }
    int leaf_count() const { return data_.front().leaf_count(); }

    // Geodesics from x to every data tree, in data order. Large samples are
    // split across up to TREESPACE_THREADS threads.
    std::vector<Geodesic> geodesics_from(const Tree& x) const;

private:
    std::vector<Tree> data_;
};

double frechet_value(const FrechetProblem& prob, const Tree& x);
double frechet_value(const std::vector<Geodesic>& geos);

GradientView restricted_gradient(const FrechetProblem& prob, const Tree& x);
GradientView restricted_gradient(const Tree& x, const std::vector<Geodesic>& geos);

HessianView restricted_hessian(const FrechetProblem& prob, const Tree& x);
HessianView restricted_hessian(const Tree& x, const std::vector<Geodesic>& geos);

// y - x, defined when every interior split of x is a split of y.
DirectionVector direction_between(const Tree& x, const Tree& y);
// x + alpha * p; coordinates that reach zero or below are dropped.
Tree step_along(const Tree& x, const DirectionVector& p, double alpha);
// Point a tiny fraction of the way from x toward y, used to fix supports.
Tree probe_point(const Tree& x, const Tree& y, double rel_scale = 1e-7);

double directional_derivative(const FrechetProblem& prob, const Tree& x, const Tree& y);

// Partials of F'(X, .) at Y over Y's interior splits and pendants.
GradientView dir_deriv_gradient(const FrechetProblem& prob, const Tree& x, const Tree& y);

// (y_parallel, y_perp)
std::pair<Tree, Tree> decompose_direction(const Tree& x, const Tree& y);

double dir_deriv_of_dir_deriv(const FrechetProblem& prob, const Tree& x, const Tree& y, const Tree& y_prime);

// Leading pairs of the support from (just past) x toward y, to t, whose A sets
// vanish at x.
std::vector<SupportPair> local_support_pairs(const Tree& x, const Tree& y, const Tree& t);

}  // namespace treespace
