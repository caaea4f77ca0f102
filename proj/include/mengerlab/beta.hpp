#pragma once

#include "mengerlab/measure.hpp"

namespace mengerlab {

enum class BetaExactness { ExactL2, UpperBoundL1 };

struct BetaResult {
    double value = 0.0;
    AffineSubspace plane;
    BetaExactness exactness = BetaExactness::ExactL2;
};

struct ScaleGrid {
    double t_min = 0.0;
    double t_max = 0.0;
    int count = 0;

    // Geometric levels t_min .. t_max inclusive.
    std::vector<double> levels() const;
    double log_step() const;
};

// ((1/t^n) sum_{y in B(x,kt)} w (d(y,P)/t)^p)^{1/p} over the closed ball.
double beta_fixed_plane(const DiscreteMeasure& mu, const Vector& x, double t, double k,
                        double p, const AffineSubspace& plane);

// Exact minimizer of the weighted squared distance over affine n-planes:
// the weighted centroid plus the top-n principal directions of the in-ball
// scatter. A single atom (or fully collapsed scatter) picks the axis-aligned
// plane through the centroid. Throws EmptyBall.
AffineSubspace best_plane_l2(const DiscreteMeasure& mu, const Ball& b, int n);

// beta_2 with its optimal plane.
BetaResult beta2(const DiscreteMeasure& mu, const Vector& x, double t, double k);

// beta_1 upper bound: iteratively reweighted fits seeded at the L2 plane,
// keeping the best plane seen. tol*t regularizes the 1/distance weights.
BetaResult beta1(const DiscreteMeasure& mu, const Vector& x, double t, double k,
                 int max_iters = 25, double tol = 1e-6);

// beta_{p;k} against the best plane this module can produce: exact for p=2,
// the L1 iteration for p=1, and the L2 plane evaluated at p otherwise.
BetaResult beta_best(const DiscreteMeasure& mu, const Vector& x, double t, double k, double p);

// Discretized multiscale integral: sum over grid levels of
// beta_{p;k}(x,t)^p * [delta_tilde_{k0}(B(x,t)) >= lambda] * dlog t.
double multiscale_beta(const DiscreteMeasure& mu, const Vector& x, const ScaleGrid& grid,
                       double k, double p, double lambda, double k0);

// Mass-weighted sum of multiscale_beta over all support points, parallel
// over points with a fixed reduction order.
double multiscale_beta_total(const DiscreteMeasure& mu, const ScaleGrid& grid, double k,
                             double p, double lambda, double k0);
// Serial reference for the total, kept for comparison in tests/benchmarks.
double multiscale_beta_total_serial(const DiscreteMeasure& mu, const ScaleGrid& grid, double k,
                                    double p, double lambda, double k0);

}  // namespace mengerlab
