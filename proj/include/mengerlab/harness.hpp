#pragma once

#include <map>
#include <string>

#include "mengerlab/beta.hpp"
#include "mengerlab/curvature.hpp"

namespace mengerlab {

// Outcome of comparing the two sides of one of the curvature-vs-flatness
// inequalities. empirical_C = lhs/rhs; infinite when rhs vanishes under a
// positive lhs, zero when both vanish.
struct InequalityReport {
    std::string experiment;
    bool hypothesis_met = true;
    double lhs = 0.0;
    double rhs = 0.0;
    double empirical_C = 0.0;
    std::map<std::string, double> config;
    // Optional per-(x,t) rows: {point, t, lhs, rhs}.
    std::vector<std::array<double, 4>> table;
};

double empirical_ratio(double lhs, double rhs);

// Pointwise bound at one ball: beta_{p;k}(x,t)^p against the t/kappa-
// separated local curvature over B(x, k1 t), divided by t^n. Requires
// delta(B(x,t)) >= lambda; a failed hypothesis is reported, not thrown.
InequalityReport verify_pointwise_bound(const DiscreteMeasure& mu, IntegrandKind kind,
                                        double p, int x_index, double t, double k,
                                        double k1, double lambda);

// Global bound: mass-weighted multiscale beta integral against the full
// curvature (exact tuple sum).
InequalityReport verify_global_bound(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                                     double k, double k0, double lambda,
                                     const ScaleGrid& grid);

struct ContrastConfig {
    GenerateParams flat;
    GenerateParams fractal;
    std::uint64_t seed = 1;
    IntegrandKind kind = IntegrandKind::K1;
    double p = 2.0;
    double k = 4.0;
    double k0 = 1.0;
    double lambda = 0.01;
    int grid_count = 12;
    std::uint64_t mc_samples = 0;  // 0: exact when within cap, else MC fallback
};

struct ContrastReport {
    CurvatureEstimate flat_curvature;
    CurvatureEstimate fractal_curvature;
    double flat_multiscale_beta = 0.0;
    double fractal_multiscale_beta = 0.0;
};

// Flat-vs-fractal comparison of curvature and the multiscale beta total.
ContrastReport contrast_experiment(const ContrastConfig& config);

struct SimplexSearchReport {
    bool found = false;
    double sigma = 0.0;           // achieved minimal height
    double c1_empirical = 0.0;    // 10 n t / sigma
    double c2_empirical = 0.0;    // max_i t^n / vertex ball mass
    std::vector<double> vertex_ball_masses;
    std::vector<int> vertex_indices;
};

// Greedy search for a well-spread n-simplex with massive vertex balls in a
// dense ball; the constants are reported, never asserted.
SimplexSearchReport simplex_search_check(const DiscreteMeasure& mu, const Ball& ball,
                                         double lambda);

}  // namespace mengerlab
