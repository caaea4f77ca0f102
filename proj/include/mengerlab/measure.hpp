#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mengerlab/geometry.hpp"

namespace mengerlab {

// Closed ball: membership is |p - center| <= radius.
struct Ball {
    Vector center;
    double radius = 0.0;
};

// Weighted point cloud standing in for a compactly supported measure,
// with an exact closed-ball range index. Immutable after construction.
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<Vector> points, std::vector<double> weights, int intrinsic_dim);

    // Uniform weights normalized to total mass 1.
    static DiscreteMeasure uniform(std::vector<Vector> points, int intrinsic_dim);

    int size() const { return static_cast<int>(points_.size()); }
    int ambient_dim() const { return static_cast<int>(points_.front().size()); }
    int intrinsic_dim() const { return intrinsic_dim_; }
    const Vector& point(int i) const { return points_[static_cast<size_t>(i)]; }
    double weight(int i) const { return weights_[static_cast<size_t>(i)]; }
    const std::vector<Vector>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    double total_mass() const { return total_mass_; }
    double diameter() const;

    // Smallest positive nearest-neighbour distance; the natural resolution
    // floor for scale-dependent quantities.
    double resolution() const;

    // Indices (ascending) of points inside the closed ball, via the index.
    std::vector<int> ball_points(const Ball& b) const;
    // Linear-scan reference used to validate the index.
    std::vector<int> ball_points_bruteforce(const Ball& b) const;

    // Spatially scaled by s with weights scaled by s^intrinsic_dim, the
    // combination that keeps measure quotients invariant.
    DiscreteMeasure scaled(double s) const;
    DiscreteMeasure translated(const Vector& shift) const;

    void save_csv(const std::string& path) const;
    static DiscreteMeasure load_csv(const std::string& path, int intrinsic_dim);

private:
    struct KdNode {
        int axis = -1;  // -1 marks a leaf
        double split = 0.0;
        int left = -1, right = -1;
        int begin = 0, end = 0;  // range into order_
    };

    void build_index();
    int build_range(int begin, int end, int depth);

    std::vector<Vector> points_;
    std::vector<double> weights_;
    int intrinsic_dim_;
    double total_mass_ = 0.0;
    std::vector<KdNode> nodes_;
    std::vector<int> order_;
    int root_ = -1;
};

double ball_mass(const DiscreteMeasure& mu, const Ball& b);

// Measure quotient: mass of the ball (optionally restricted by a point
// predicate) divided by radius^n.
double delta(const DiscreteMeasure& mu, const Ball& b,
             const std::function<bool(const Vector&)>* subset = nullptr);

// sup over candidate centres within B(x, k0 t) of delta(B(y,t)); candidates
// are the query centre plus all sample points in that ball (a lower bound
// for the continuum supremum, concentrated where the mass is).
double delta_tilde(const DiscreteMeasure& mu, const Ball& b, double k0);

// Max of mass(B)/(diam B)^n over balls centred at sample points with dyadic
// radii from the interpoint resolution up to the diameter.
double upper_regularity_constant(const DiscreteMeasure& mu);

struct GenerateParams {
    std::string kind;        // segment | plane_patch | lipschitz_graph | sphere |
                             // four_corner_cantor | cantor_product
    int ambient_dim = 2;     // N
    int intrinsic_dim = 1;   // n
    int n_points = 100;
    int depth = 4;           // cantor kinds
    double lipschitz = 0.0;  // lipschitz_graph slope bound
    std::vector<double> coefficients;  // lipschitz_graph shape (optional)
    double domain_halfwidth = 1.0;     // lipschitz_graph / plane_patch box
    double noise = 0.0;      // gaussian jitter applied after generation
};

// Deterministic per seed; total mass 1. Throws BadParams.
DiscreteMeasure generate(const GenerateParams& params, std::uint64_t seed);

DiscreteMeasure add_noise(const DiscreteMeasure& mu, double sigma, std::uint64_t seed);

}  // namespace mengerlab
