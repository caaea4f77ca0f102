#include "mengerlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mengerlab {

namespace {

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

// Number of (m+1)-subsets, saturating to avoid overflow.
double subset_count(int n, int k) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (c > 1e18) return c;
    }
    return c;
}

}  // namespace

Simplex::Simplex(std::vector<Vector> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw DegenerateInput("Simplex: needs at least 2 vertices");
    const int n = static_cast<int>(vertices_.front().size());
    if (static_cast<int>(vertices_.size()) > n + 1)
        throw DimMismatch("Simplex: more than N+1 vertices");
    for (const auto& v : vertices_)
        if (static_cast<int>(v.size()) != n) throw DimMismatch("Simplex: inconsistent vertex dims");
}

double Simplex::diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < vertices_.size(); ++i)
        for (size_t j = i + 1; j < vertices_.size(); ++j)
            d = std::max(d, (vertices_[i] - vertices_[j]).norm());
    return d;
}

double gram_determinant(const Simplex& t) {
    const int m = t.order();
    Matrix edges(t.ambient_dim(), m);
    for (int i = 0; i < m; ++i) edges.col(i) = t.vertex(i + 1) - t.vertex(0);
    const Matrix gram = edges.transpose() * edges;
    return std::max(0.0, gram.determinant());
}

bool is_degenerate(const Simplex& t) {
    const double diam = t.diameter();
    const double threshold = 1e-12 * std::pow(diam, 2 * t.order());
    return gram_determinant(t) <= threshold;
}

double normalized_volume(const Simplex& t) { return std::sqrt(gram_determinant(t)); }

double hausdorff_volume(const Simplex& t) {
    return normalized_volume(t) / factorial(t.order());
}

Simplex face(const Simplex& t, int i) {
    if (i < 0 || i > t.order()) throw IndexOutOfRange("face: vertex index out of range");
    if (t.order() < 1 || t.vertex_count() <= 2)
        throw IndexOutOfRange("face: simplex has no proper faces");
    std::vector<Vector> verts;
    verts.reserve(static_cast<size_t>(t.order()));
    for (int j = 0; j <= t.order(); ++j)
        if (j != i) verts.push_back(t.vertex(j));
    return Simplex(std::move(verts));
}

double height(const Simplex& t, int i) {
    if (i < 0 || i > t.order()) throw IndexOutOfRange("height: vertex index out of range");
    std::vector<Vector> others;
    others.reserve(static_cast<size_t>(t.order()));
    for (int j = 0; j <= t.order(); ++j)
        if (j != i) others.push_back(t.vertex(j));
    if (others.size() >= 2 && is_degenerate(Simplex(others)))
        throw DegenerateFace("height: opposite face is degenerate");
    return dist_to_subspace(t.vertex(i), affine_hull(others));
}

bool is_sigma_simplex(const Simplex& t, double sigma) {
    for (int i = 0; i <= t.order(); ++i) {
        try {
            if (height(t, i) < sigma) return false;
        } catch (const DegenerateFace&) {
            return false;
        }
    }
    return true;
}

namespace {

Simplex greedy_max_volume(const std::vector<Vector>& points, int m) {
    const int count = static_cast<int>(points.size());
    Vector centroid = Vector::Zero(points.front().size());
    for (const auto& p : points) centroid += p;
    centroid /= static_cast<double>(count);

    std::vector<int> chosen;
    int best = 0;
    double best_d = -1.0;
    for (int i = 0; i < count; ++i) {
        const double d = (points[static_cast<size_t>(i)] - centroid).norm();
        if (d > best_d) { best_d = d; best = i; }
    }
    chosen.push_back(best);
    while (static_cast<int>(chosen.size()) < m + 1) {
        std::vector<Vector> sel;
        for (int idx : chosen) sel.push_back(points[static_cast<size_t>(idx)]);
        const AffineSubspace hull = affine_hull(sel);
        int far = -1;
        double far_d = -1.0;
        for (int i = 0; i < count; ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            const double d = dist_to_subspace(points[static_cast<size_t>(i)], hull);
            if (d > far_d) { far_d = d; far = i; }
        }
        chosen.push_back(far);
    }
    std::sort(chosen.begin(), chosen.end());

    auto volume_of = [&](const std::vector<int>& idx) {
        std::vector<Vector> verts;
        for (int i : idx) verts.push_back(points[static_cast<size_t>(i)]);
        return normalized_volume(Simplex(std::move(verts)));
    };

    // Single-vertex swaps until a local maximum.
    double vol = volume_of(chosen);
    bool improved = true;
    while (improved) {
        improved = false;
        for (size_t slot = 0; slot < chosen.size() && !improved; ++slot) {
            for (int cand = 0; cand < count && !improved; ++cand) {
                if (std::find(chosen.begin(), chosen.end(), cand) != chosen.end()) continue;
                std::vector<int> trial = chosen;
                trial[slot] = cand;
                std::sort(trial.begin(), trial.end());
                const double v = volume_of(trial);
                if (v > vol * (1.0 + 1e-12)) {
                    chosen = trial;
                    vol = v;
                    improved = true;
                }
            }
        }
    }
    std::vector<Vector> verts;
    for (int i : chosen) verts.push_back(points[static_cast<size_t>(i)]);
    return Simplex(std::move(verts));
}

}  // namespace

Simplex max_volume_simplex(const std::vector<Vector>& points, int m, SearchMode mode) {
    const int count = static_cast<int>(points.size());
    if (count < m + 1) throw TooFewPoints("max_volume_simplex: fewer than m+1 points");

    if (mode == SearchMode::Exact && subset_count(count, m + 1) > 2e6)
        mode = SearchMode::Greedy;
    if (mode == SearchMode::Greedy) return greedy_max_volume(points, m);

    // Lexicographic enumeration of sorted index tuples; first maximum wins.
    std::vector<int> idx(static_cast<size_t>(m + 1));
    for (int i = 0; i <= m; ++i) idx[static_cast<size_t>(i)] = i;
    std::vector<int> best_idx = idx;
    double best_vol = -1.0;
    while (true) {
        std::vector<Vector> verts;
        for (int i : idx) verts.push_back(points[static_cast<size_t>(i)]);
        const double vol = normalized_volume(Simplex(std::move(verts)));
        if (vol > best_vol) {
            best_vol = vol;
            best_idx = idx;
        }
        int pos = m;
        while (pos >= 0 && idx[static_cast<size_t>(pos)] == count - 1 - (m - pos)) --pos;
        if (pos < 0) break;
        ++idx[static_cast<size_t>(pos)];
        for (int j = pos + 1; j <= m; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    std::vector<Vector> verts;
    for (int i : best_idx) verts.push_back(points[static_cast<size_t>(i)]);
    return Simplex(std::move(verts));
}

namespace {

// Whether some (l,H)-simplex can be formed from the points. Exhaustive for
// small subset counts, greedy max-volume probe otherwise.
bool exists_sigma_simplex(const std::vector<Vector>& points, int l, double H) {
    const int count = static_cast<int>(points.size());
    if (count < l + 1) return false;
    if (subset_count(count, l + 1) <= 2e5) {
        std::vector<int> idx(static_cast<size_t>(l + 1));
        for (int i = 0; i <= l; ++i) idx[static_cast<size_t>(i)] = i;
        while (true) {
            std::vector<Vector> verts;
            for (int i : idx) verts.push_back(points[static_cast<size_t>(i)]);
            if (is_sigma_simplex(Simplex(std::move(verts)), H)) return true;
            int pos = l;
            while (pos >= 0 && idx[static_cast<size_t>(pos)] == count - 1 - (l - pos)) --pos;
            if (pos < 0) return false;
            ++idx[static_cast<size_t>(pos)];
            for (int j = pos + 1; j <= l; ++j)
                idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
        }
    }
    return is_sigma_simplex(max_volume_simplex(points, l, SearchMode::Greedy), H);
}

}  // namespace

std::optional<SlabCover> slab_cover(const std::vector<Vector>& points, int m, double H) {
    if (points.empty()) throw TooFewPoints("slab_cover: no points");
    if (points.size() == 1) return SlabCover{AffineSubspace::point(points.front()), 0};

    // Smallest l such that no (l+1,H)-simplex exists; the max-volume
    // l-simplex then spans a flat whose H-slab absorbs every point.
    // Sigma-simplex existence is monotone down in l (faces inherit heights),
    // so the first hit is the right level. An (m,H)-simplex rules a cover out.
    for (int l = 0; l <= m - 1; ++l) {
        if (exists_sigma_simplex(points, l + 1, H)) continue;
        const AffineSubspace flat =
            l == 0 ? AffineSubspace::point(points.front())
                   : affine_hull(max_volume_simplex(points, l).vertices());
        bool covered = true;
        for (const auto& p : points)
            if (dist_to_subspace(p, flat) > H) { covered = false; break; }
        if (covered) return SlabCover{flat, l};
        return std::nullopt;  // greedy probe was too optimistic; stay honest
    }
    return std::nullopt;
}

}  // namespace mengerlab
