#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "mengerlab/beta.hpp"

namespace mengerlab {

// Parameters of the stopping-time construction. The density threshold
// follows min{1e-10/(600^n N0), 2/50^n} with N0 a configured covering
// constant; every constant here is an exposed knob.
struct StoppingParams {
    double epsilon = 0.1;
    double alpha = 0.25;  // in (0, 1/4]
    double k = 4.0;       // ball inflation in beta, > 2
    double lambda_delta = -1.0;  // <= 0: use the default formula
    double besicovitch_n0 = -1.0;  // <= 0: use 5^N
    int levels = 24;
    double top_scale = 48.0;       // largest grid scale, inside (0,50)
    int substeps_per_octave = 3;   // grid ratio 2^{-1/substeps}
    std::optional<AffineSubspace> reference_plane;  // through origin; fitted if absent
    int beta_max_iters = 25;
    double beta_tol = 1e-6;

    double effective_delta(int n, int ambient_dim) const;
};

enum class PointLabel { Z, F1, F2, F3 };
std::string label_name(PointLabel label);

struct MemberInfo {
    bool member = false;
    double delta_value = 0.0;
    double beta_value = 0.0;   // best upper bound found for beta_1
    double witness_angle = 0.0;
    int witness = -1;  // index into StoppingState::witness_planes, -1 if none
};

// Everything the graph assembly needs: per-(point, scale) membership with
// witness planes, the stopping height h, the distances d and D, and the
// partition labels.
class StoppingState {
public:
    const DiscreteMeasure& measure() const { return *mu_; }
    const StoppingParams& params() const { return params_; }
    const AffineSubspace& reference_plane() const { return p0_; }
    const std::vector<double>& scales() const { return scales_; }

    const MemberInfo& info(int point, int level) const {
        return table_[static_cast<size_t>(point)][static_cast<size_t>(level)];
    }
    const AffineSubspace& witness_plane(int id) const {
        return witness_planes_[static_cast<size_t>(id)];
    }

    bool in_s_total(int point, int level) const { return info(point, level).member; }
    // S = members at scales >= h(point).
    bool in_s(int point, int level) const {
        return in_s_total(point, level) &&
               scales_[static_cast<size_t>(level)] >= h_[static_cast<size_t>(point)];
    }

    double h(int point) const { return h_[static_cast<size_t>(point)]; }
    double d(int point) const { return d_[static_cast<size_t>(point)]; }
    PointLabel label(int point) const { return labels_[static_cast<size_t>(point)]; }

    // Pairs (point, level) forming the good set S.
    const std::vector<std::pair<int, int>>& s_pairs() const { return s_pairs_; }

    // Coordinates on the reference plane (orthonormal basis of P0).
    Vector project_coords(const Vector& x) const;
    Vector embed_coords(const Vector& u) const;       // P0 point from coordinates
    Vector normal_part(const Vector& x) const;        // x minus its P0 component

    // D(y) = inf over S of (|pi(X) - y| + t) with Z contributing at scale
    // zero, so D vanishes exactly on pi(Z); y in P0 coordinates.
    double big_d(const Vector& u) const;
    // Exact infimum of D over an axis box [lo, hi] in P0 coordinates.
    double big_d_box(const Vector& lo, const Vector& hi) const;
    // The pair attaining big_d at u; level -1 marks a zero-scale Z pair.
    std::pair<int, int> argmin_big_d(const Vector& u) const;

    double scale_factor() const { return scale_factor_; }
    const Vector& recenter_shift() const { return shift_; }

private:
    friend StoppingState build_stopping_state(const DiscreteMeasure& mu,
                                              const StoppingParams& params);
    std::shared_ptr<const DiscreteMeasure> mu_;
    StoppingParams params_;
    AffineSubspace p0_ = AffineSubspace::point(Vector::Zero(2));
    std::vector<double> scales_;  // descending
    std::vector<std::vector<MemberInfo>> table_;
    std::vector<AffineSubspace> witness_planes_;
    std::vector<double> h_;
    std::vector<double> d_;
    std::vector<PointLabel> labels_;
    std::vector<std::pair<int, int>> s_pairs_;
    std::vector<Vector> s_proj_coords_;  // projected centres of S pairs
    std::vector<double> s_scales_;
    std::vector<Vector> z_proj_coords_;  // Z enters d and D at scale zero
    std::vector<int> z_points_;          // measure indices of the Z points
    double scale_factor_ = 1.0;
    Vector shift_;
};

// Recenters and rescales the measure into B(0,4), computes membership for
// every (sample point, grid scale), then h, d and the partition labels.
// Throws EmptyMeasure.
StoppingState build_stopping_state(const DiscreteMeasure& mu, const StoppingParams& params);

// Dyadic cell on the reference plane: side 2^level, corner at idx * side.
struct WhitneyCube {
    int level = 0;
    Eigen::VectorXi idx;

    double side() const { return std::ldexp(1.0, level); }
    double diam(int n) const { return side() * std::sqrt(static_cast<double>(n)); }
    Vector corner(int n) const;
    Vector center(int n) const;
    // Bounds of r * cube (same centre, r times the size).
    void bounds(int n, double r, Vector& lo, Vector& hi) const;
    bool contains(const Vector& u) const;

    bool operator<(const WhitneyCube& other) const;
};

// Maximal dyadic cells Q with diam Q <= inf_Q D / 20, restricted to cells
// that carry at least one projected non-Z sample. Empty when S is empty or
// every point lies in Z.
std::vector<WhitneyCube> whitney_decompose(const StoppingState& state);

struct SelectedBall {
    Ball ball;
    int witness_plane_point = -1;
    int witness_plane_level = -1;
    AffineSubspace plane;
};

// A good ball for the cube: the S pair attaining D at the cube centre,
// inflated to at least half the cube diameter, with its witness plane.
// Verifies the size and distance comparability bounds; throws NoGoodBall.
SelectedBall select_ball(const StoppingState& state, const WhitneyCube& cube);

// C^2 bump (1-s^2)^3 of the scaled sup-norm distance to the cube centre,
// supported exactly in 3R. The per-cube partition of unity normalizes these.
double whitney_bump(const WhitneyCube& cube, const Vector& u);

// The assembled map A: exact heights over projected Z points, partition-of-
// unity blend of the per-cube affine maps elsewhere on the covered cells.
class GraphFunction {
public:
    struct Patch {
        WhitneyCube cube;
        AffineMap map;           // reference plane -> its complement
        AffineSubspace plane;    // the witness plane behind the map
        Ball ball;
    };

    const AffineSubspace& reference_plane() const { return p0_; }
    int intrinsic_dim() const { return n_; }

    // Value of A at P0-coordinates u, as an ambient vector in P0-perp;
    // nullopt outside the domain.
    std::optional<Vector> evaluate(const Vector& u) const;

    // Ambient graph point at u (embed + value); nullopt outside the domain.
    std::optional<Vector> graph_point(const Vector& u) const;

    const std::vector<Patch>& patches() const { return patches_; }
    const std::vector<std::pair<Vector, Vector>>& z_values() const { return z_values_; }

    // Domain sample positions (z-projections and patch cell centres/corners),
    // used for Lipschitz measurements.
    std::vector<Vector> domain_samples() const;

    // Adapter for the gamma quadratures.
    std::function<std::optional<Vector>(const Vector&)> evaluator() const {
        return [this](const Vector& u) { return evaluate(u); };
    }

private:
    friend GraphFunction build_graph(const StoppingState& state,
                                     const std::vector<WhitneyCube>& cubes);
    AffineSubspace p0_ = AffineSubspace::point(Vector::Zero(2));
    int n_ = 1;
    double u12_radius_ = 12.0;
    double z_match_tol_ = 0.0;
    std::vector<std::pair<Vector, Vector>> z_values_;  // (u coords, value in P0-perp)
    std::vector<Patch> patches_;
};

// Builds A from the state and its Whitney cubes. Throws
// ProjectionNotInjective when two Z points share a projection but differ
// in height.
GraphFunction build_graph(const StoppingState& state, const std::vector<WhitneyCube>& cubes);

// Scale-normalized L1 error of the best affine approximation on the ball
// B(q,t) within the reference plane; quadrature on a fixed grid, affine fit
// by least squares refined with reweighted iterations (an upper bound).
// g maps P0 coordinates to an ambient normal vector; nullopt marks points
// outside its domain (raises OutOfDomain).
double gamma_affine_deviation(const std::function<std::optional<Vector>(const Vector&)>& g,
                              int n, const Vector& q, double t, int grid_per_axis = 17);

// Same quantity measured against the best fitting n-plane through the
// lifted graph points (the beta-style variant).
double gamma_plane_deviation(const std::function<std::optional<Vector>(const Vector&)>& g,
                             const AffineSubspace& p0, const Vector& q, double t,
                             int grid_per_axis = 17);

struct CoverageReport {
    double coverage = 0.0;  // mass fraction within tol of the graph
    double tol = 0.0;
    double mass_z = 0.0, mass_f1 = 0.0, mass_f2 = 0.0, mass_f3 = 0.0;
    double mass_g = 0.0;       // escapee set from the far-ball criterion
    double mass_f_tilde = 0.0; // near-graph part of F minus G
    double big_k = 0.0;        // the far-ball factor used for G
    int points_without_value = 0;
};

CoverageReport coverage_report(const StoppingState& state, const GraphFunction& graph,
                               double tol);

}  // namespace mengerlab
