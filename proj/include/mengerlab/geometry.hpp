#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mengerlab/errors.hpp"

namespace mengerlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// n-dimensional volume of the n-dimensional unit ball.
double unit_ball_volume(int n);

// Affine subspace of R^N given by a base point and an orthonormal basis of
// its direction. dim 0 (empty basis) is a single point. Immutable.
class AffineSubspace {
public:
    // basis: N x m with orthonormal columns (checked to 1e-10).
    AffineSubspace(Vector base, Matrix basis);

    // A single point, dim 0.
    static AffineSubspace point(Vector base);

    // Linear span through the origin of the given (already orthonormal) columns.
    static AffineSubspace through_origin(Matrix basis);

    // Coordinate subspace spanned by axes 0..m-1, through `base`.
    static AffineSubspace axis_aligned(const Vector& base, int m);

    int ambient_dim() const { return static_cast<int>(base_.size()); }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Vector& base() const { return base_; }
    const Matrix& basis() const { return basis_; }

    // Direction space as a subspace through the origin.
    AffineSubspace parallel_through_origin() const;

    // Orthonormal basis of the orthogonal complement of the direction.
    Matrix orthogonal_complement() const;

    bool full_space() const { return dim() == ambient_dim(); }

private:
    Vector base_;
    Matrix basis_;
};

Vector project(const AffineSubspace& p, const Vector& x);
double dist_to_subspace(const Vector& x, const AffineSubspace& p);

// Default rank tolerance for affine_hull: 1e-8 * (max point norm), so
// degeneracy detection follows the data scale.
double default_rank_tol(const std::vector<Vector>& points);

// Smallest affine subspace containing all points, at numerical rank
// threshold rank_tol (<= 0 means the scale-aware default).
AffineSubspace affine_hull(const std::vector<Vector>& points, double rank_tol = -1.0);

struct GramSchmidtResult {
    std::vector<Vector> basis;
    // coeffs[l][r], r <= l: basis[l] = sum_r coeffs[l][r] * input[r].
    std::vector<std::vector<double>> coeffs;
};

// Orthonormalises linearly independent vectors, tracking the lower-triangular
// coefficients that express each output in terms of the inputs.
// Throws DegenerateInput if the numerical rank is below the count.
GramSchmidtResult gram_schmidt_tracked(const std::vector<Vector>& vectors);

// Angle between equal-dimensional subspaces: the spectral norm of the
// difference of the orthogonal projections onto their direction spaces.
// Translation invariant; a metric on subspace directions; in [0,1].
double angle(const AffineSubspace& p1, const AffineSubspace& p2);

// Affine map G -> G^perp written on orthonormal bases of the direction of G
// and its complement. value_at expects a point of G.
class AffineMap {
public:
    AffineMap(AffineSubspace domain, Matrix normal_basis, Matrix linear, Vector offset);

    const AffineSubspace& domain() const { return domain_; }
    const Matrix& normal_basis() const { return normal_basis_; }
    const Matrix& linear() const { return linear_; }
    const Vector& offset() const { return offset_; }

    // Value in R^N (a vector of G^perp) at a point g of G.
    Vector value_at(const Vector& g) const;

    // Value from coordinates of the domain point in the domain basis.
    Vector value_at_coords(const Vector& u) const;

    // g + value_at(g): the point of the graph above g.
    Vector graph_point(const Vector& g) const;

    // Spectral norm of the linear block.
    double lipschitz() const;

private:
    AffineSubspace domain_;
    Matrix normal_basis_;  // N x (N-m), orthonormal columns spanning G^perp
    Matrix linear_;        // (N-m) x m
    Vector offset_;        // (N-m)
};

// Writes the plane P as the graph of an affine map over G, which requires
// angle(P,G) < 1. Throws TooSteep at angle >= 1 - 1e-9.
AffineMap plane_as_graph(const AffineSubspace& p, const AffineSubspace& g);

}  // namespace mengerlab
