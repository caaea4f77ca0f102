#pragma once

#include <optional>
#include <vector>

#include "mengerlab/geometry.hpp"

namespace mengerlab {

// m-simplex as an ordered vertex list (m+1 vertices, 1 <= m <= N).
// Degeneracy is a queryable state, never a constructor error.
class Simplex {
public:
    explicit Simplex(std::vector<Vector> vertices);

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int order() const { return vertex_count() - 1; }  // the m in m-simplex
    int ambient_dim() const { return static_cast<int>(vertices_.front().size()); }
    const Vector& vertex(int i) const { return vertices_[static_cast<size_t>(i)]; }
    const std::vector<Vector>& vertices() const { return vertices_; }

    double diameter() const;

private:
    std::vector<Vector> vertices_;
};

// Gram determinant of the edge vectors x_i - x_0; >= 0 up to roundoff.
double gram_determinant(const Simplex& t);

// Scale-aware degeneracy: Gram determinant below 1e-12 * diam^(2m).
bool is_degenerate(const Simplex& t);

// sqrt(Gram) = m! * hausdorff_volume: the parallelotope volume.
double normalized_volume(const Simplex& t);

// m-dimensional volume of the simplex itself.
double hausdorff_volume(const Simplex& t);

// The face with vertex i removed (order preserved). Requires m >= 1.
Simplex face(const Simplex& t, int i);

// Distance from vertex i to the affine hull of the opposite face.
// Throws DegenerateFace when that face spans less than an (m-1)-flat.
double height(const Simplex& t, int i);

// True iff every vertex height is >= sigma. A simplex with any degenerate
// face fails regardless of sigma.
bool is_sigma_simplex(const Simplex& t, double sigma);

enum class SearchMode { Exact, Greedy };

// Maximum-normalized-volume m-simplex over the points. Exact mode enumerates
// all (m+1)-subsets while C(#points, m+1) <= 2e6 and falls back to greedy
// beyond that; ties break on the lexicographically smallest sorted index
// tuple. Greedy seeds with farthest points, grows by maximal height, then
// hill-climbs single-vertex swaps. Throws TooFewPoints.
Simplex max_volume_simplex(const std::vector<Vector>& points, int m,
                           SearchMode mode = SearchMode::Exact);

struct SlabCover {
    AffineSubspace flat;
    int l = 0;
};

// If the points contain no (m,H)-simplex, returns a flat of dimension
// l <= m-1 spanned by points such that every point is within H of it.
// Returns nullopt (no cover statement possible) when an (m,H)-simplex exists.
std::optional<SlabCover> slab_cover(const std::vector<Vector>& points, int m, double H);

}  // namespace mengerlab
