#include "mengerlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mengerlab/rng.hpp"

namespace mengerlab {

DiscreteMeasure::DiscreteMeasure(std::vector<Vector> points, std::vector<double> weights,
                                 int intrinsic_dim)
    : points_(std::move(points)), weights_(std::move(weights)), intrinsic_dim_(intrinsic_dim) {
    if (points_.empty()) throw EmptyMeasure("DiscreteMeasure: no points");
    if (points_.size() != weights_.size())
        throw BadParams("DiscreteMeasure: points/weights size mismatch");
    if (intrinsic_dim_ < 1 || intrinsic_dim_ >= ambient_dim())
        throw BadParams("DiscreteMeasure: need 1 <= n < N");
    for (double w : weights_)
        if (!(w > 0.0)) throw BadParams("DiscreteMeasure: weights must be positive");
    for (double w : weights_) total_mass_ += w;
    build_index();
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Vector> points, int intrinsic_dim) {
    std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
    return DiscreteMeasure(std::move(points), std::move(w), intrinsic_dim);
}

double DiscreteMeasure::diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < points_.size(); ++i)
        for (size_t j = i + 1; j < points_.size(); ++j)
            d = std::max(d, (points_[i] - points_[j]).norm());
    return d;
}

double DiscreteMeasure::resolution() const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < points_.size(); ++i) {
        for (size_t j = 0; j < points_.size(); ++j) {
            if (i == j) continue;
            const double d = (points_[i] - points_[j]).norm();
            if (d > 0.0) best = std::min(best, d);
        }
    }
    if (!std::isfinite(best)) best = 1.0;  // all points coincide
    return best;
}

void DiscreteMeasure::build_index() {
    order_.resize(points_.size());
    for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    nodes_.clear();
    root_ = build_range(0, static_cast<int>(points_.size()), 0);
}

int DiscreteMeasure::build_range(int begin, int end, int depth) {
    KdNode node;
    node.begin = begin;
    node.end = end;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= 8) return id;

    const int axis = depth % ambient_dim();
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         return points_[static_cast<size_t>(a)](axis) <
                                points_[static_cast<size_t>(b)](axis);
                     });
    const double split = points_[static_cast<size_t>(order_[static_cast<size_t>(mid)])](axis);
    nodes_[static_cast<size_t>(id)].axis = axis;
    nodes_[static_cast<size_t>(id)].split = split;
    const int left = build_range(begin, mid, depth + 1);
    nodes_[static_cast<size_t>(id)].left = left;
    const int right = build_range(mid, end, depth + 1);
    nodes_[static_cast<size_t>(id)].right = right;
    return id;
}

std::vector<int> DiscreteMeasure::ball_points(const Ball& b) const {
    std::vector<int> hits;
    const double r2 = b.radius * b.radius;
    // Pruning by coordinate distance along the split axis; a subtree is
    // dropped only when it lies strictly outside the closed ball, so the
    // result matches the linear scan exactly.
    std::vector<int> todo{root_};
    while (!todo.empty()) {
        const int id = todo.back();
        todo.pop_back();
        const KdNode& node = nodes_[static_cast<size_t>(id)];
        if (node.axis < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int idx = order_[static_cast<size_t>(i)];
                if ((points_[static_cast<size_t>(idx)] - b.center).squaredNorm() <= r2)
                    hits.push_back(idx);
            }
            continue;
        }
        const double diff = b.center(node.axis) - node.split;
        if (diff <= b.radius) todo.push_back(node.left);
        if (-diff <= b.radius) todo.push_back(node.right);
    }
    std::sort(hits.begin(), hits.end());
    return hits;
}

std::vector<int> DiscreteMeasure::ball_points_bruteforce(const Ball& b) const {
    std::vector<int> hits;
    const double r2 = b.radius * b.radius;
    for (int i = 0; i < size(); ++i)
        if ((points_[static_cast<size_t>(i)] - b.center).squaredNorm() <= r2) hits.push_back(i);
    return hits;
}

DiscreteMeasure DiscreteMeasure::scaled(double s) const {
    std::vector<Vector> pts;
    pts.reserve(points_.size());
    for (const auto& p : points_) pts.push_back(s * p);
    std::vector<double> w;
    w.reserve(weights_.size());
    const double mass_scale = std::pow(s, intrinsic_dim_);
    for (double wi : weights_) w.push_back(mass_scale * wi);
    return DiscreteMeasure(std::move(pts), std::move(w), intrinsic_dim_);
}

DiscreteMeasure DiscreteMeasure::translated(const Vector& shift) const {
    std::vector<Vector> pts;
    pts.reserve(points_.size());
    for (const auto& p : points_) pts.push_back(p + shift);
    return DiscreteMeasure(std::move(pts), weights_, intrinsic_dim_);
}

void DiscreteMeasure::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw BadParams("save_csv: cannot open " + path);
    const int dim = ambient_dim();
    for (int d = 0; d < dim; ++d) out << "x" << d << ",";
    out << "w\n";
    char buf[64];
    for (int i = 0; i < size(); ++i) {
        for (int d = 0; d < dim; ++d) {
            std::snprintf(buf, sizeof buf, "%.17g", points_[static_cast<size_t>(i)](d));
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", weights_[static_cast<size_t>(i)]);
        out << buf << "\n";
    }
}

DiscreteMeasure DiscreteMeasure::load_csv(const std::string& path, int intrinsic_dim) {
    std::ifstream in(path);
    if (!in) throw BadParams("load_csv: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw BadParams("load_csv: empty file " + path);
    int columns = 1;
    for (char c : header)
        if (c == ',') ++columns;
    const bool has_weight = header.size() >= 2 && header.substr(header.find_last_of(',') + 1)
                                                      .starts_with("w");
    const int dim = has_weight ? columns - 1 : columns;
    if (dim < 2) throw BadParams("load_csv: ambient dimension below 2");

    std::vector<Vector> pts;
    std::vector<double> ws;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Vector p(dim);
        for (int d = 0; d < dim; ++d) {
            if (!std::getline(ss, cell, ',')) throw BadParams("load_csv: short row");
            p(d) = std::stod(cell);
        }
        double w = 1.0;
        if (has_weight && std::getline(ss, cell, ',')) w = std::stod(cell);
        pts.push_back(std::move(p));
        ws.push_back(w);
    }
    if (!has_weight) {
        const double uniform = 1.0 / static_cast<double>(pts.size());
        std::fill(ws.begin(), ws.end(), uniform);
    }
    return DiscreteMeasure(std::move(pts), std::move(ws), intrinsic_dim);
}

double ball_mass(const DiscreteMeasure& mu, const Ball& b) {
    double mass = 0.0;
    for (int i : mu.ball_points(b)) mass += mu.weight(i);
    return mass;
}

double delta(const DiscreteMeasure& mu, const Ball& b,
             const std::function<bool(const Vector&)>* subset) {
    double mass = 0.0;
    for (int i : mu.ball_points(b)) {
        if (subset && !(*subset)(mu.point(i))) continue;
        mass += mu.weight(i);
    }
    return mass / std::pow(b.radius, mu.intrinsic_dim());
}

double delta_tilde(const DiscreteMeasure& mu, const Ball& b, double k0) {
    if (k0 < 1.0) throw BadParams("delta_tilde: k0 must be >= 1");
    double best = delta(mu, b);
    for (int i : mu.ball_points({b.center, k0 * b.radius}))
        best = std::max(best, delta(mu, {mu.point(i), b.radius}));
    return best;
}

double upper_regularity_constant(const DiscreteMeasure& mu) {
    const double res = mu.resolution();
    const double diam = std::max(mu.diameter(), res);
    double best = 0.0;
    for (int i = 0; i < mu.size(); ++i) {
        for (double r = diam; r >= res; r *= 0.5) {
            const double mass = ball_mass(mu, {mu.point(i), r});
            best = std::max(best, mass / std::pow(2.0 * r, mu.intrinsic_dim()));
        }
    }
    return best;
}

namespace {

DiscreteMeasure generate_segment(const GenerateParams& p, std::uint64_t seed) {
    RngStream rng(seed, 1);
    std::vector<Vector> pts;
    for (int i = 0; i < p.n_points; ++i) {
        Vector v = Vector::Zero(p.ambient_dim);
        v(0) = rng.uniform();
        pts.push_back(std::move(v));
    }
    return DiscreteMeasure::uniform(std::move(pts), p.intrinsic_dim);
}

DiscreteMeasure generate_plane_patch(const GenerateParams& p, std::uint64_t seed) {
    RngStream rng(seed, 2);
    std::vector<Vector> pts;
    for (int i = 0; i < p.n_points; ++i) {
        Vector v = Vector::Zero(p.ambient_dim);
        for (int d = 0; d < p.intrinsic_dim; ++d)
            v(d) = rng.uniform(-p.domain_halfwidth, p.domain_halfwidth);
        pts.push_back(std::move(v));
    }
    return DiscreteMeasure::uniform(std::move(pts), p.intrinsic_dim);
}

// Graph of a smooth function over the first n coordinates whose analytic
// slope bound equals `lipschitz`. The shape comes from a small sine basis
// with caller-supplied or seeded coefficients.
DiscreteMeasure generate_lipschitz_graph(const GenerateParams& p, std::uint64_t seed) {
    RngStream rng(seed, 3);
    const int n = p.intrinsic_dim;
    const int codim = p.ambient_dim - n;
    const int harmonics = 3;
    std::vector<double> coeff = p.coefficients;
    const size_t want = static_cast<size_t>(codim * n * harmonics);
    while (coeff.size() < want) coeff.push_back(rng.uniform(-1.0, 1.0));

    // f_j(u) = sum_{i,h} c_{j,i,h} sin(w_h u_i + phase) / w_h, so
    // |grad f_j| <= sum |c|; rescale so the total slope bound is exact.
    double bound = 0.0;
    for (size_t i = 0; i < want; ++i) bound += std::abs(coeff[i]);
    const double scale = bound > 0.0 ? p.lipschitz / bound : 0.0;

    auto f = [&](const Vector& u, int j) {
        double val = 0.0;
        for (int i = 0; i < n; ++i)
            for (int h = 0; h < harmonics; ++h) {
                const double w = 0.4 * (h + 1);
                const double c = coeff[static_cast<size_t>((j * n + i) * harmonics + h)];
                val += scale * c * std::sin(w * u(i) + 0.7 * (h + 1)) / w;
            }
        return val;
    };

    std::vector<Vector> pts;
    for (int s = 0; s < p.n_points; ++s) {
        Vector u(n);
        for (int d = 0; d < n; ++d) u(d) = rng.uniform(-p.domain_halfwidth, p.domain_halfwidth);
        Vector v = Vector::Zero(p.ambient_dim);
        v.head(n) = u;
        for (int j = 0; j < codim; ++j) v(n + j) = f(u, j);
        pts.push_back(std::move(v));
    }
    return DiscreteMeasure::uniform(std::move(pts), n);
}

DiscreteMeasure generate_sphere(const GenerateParams& p, std::uint64_t seed) {
    RngStream rng(seed, 4);
    const int n = p.intrinsic_dim;
    std::vector<Vector> pts;
    for (int s = 0; s < p.n_points; ++s) {
        Vector g(n + 1);
        for (int d = 0; d <= n; ++d) g(d) = rng.gaussian();
        if (g.norm() < 1e-12) g(0) = 1.0;
        Vector v = Vector::Zero(p.ambient_dim);
        v.head(n + 1) = g / g.norm();
        pts.push_back(std::move(v));
    }
    return DiscreteMeasure::uniform(std::move(pts), n);
}

// Product of (n+1) one-dimensional Cantor sets with contraction ratio
// 2^{-(n+1)/n}, the self-similar set of Hausdorff dimension exactly n.
// n = 1 gives the four-corner construction in the unit square.
DiscreteMeasure generate_cantor_product(const GenerateParams& p) {
    const int n = p.intrinsic_dim;
    const int axes = n + 1;
    if (p.ambient_dim < axes) throw BadParams("cantor_product: needs N >= n+1");
    if (p.depth < 1 || p.depth > 12) throw BadParams("cantor_product: depth out of range");
    const double ratio = std::pow(2.0, -static_cast<double>(axes) / n);

    // 1-D interval midpoints at the given depth: offsets 0 and 1-ratio.
    std::vector<double> centers{0.5};
    double side = 1.0;
    for (int d = 0; d < p.depth; ++d) {
        std::vector<double> next;
        next.reserve(centers.size() * 2);
        for (double c : centers) {
            const double left = c - side / 2.0;
            next.push_back(left + ratio * side / 2.0);
            next.push_back(left + side - ratio * side / 2.0);
        }
        centers = std::move(next);
        side *= ratio;
    }

    std::vector<Vector> pts;
    std::vector<int> idx(static_cast<size_t>(axes), 0);
    const int per_axis = static_cast<int>(centers.size());
    while (true) {
        Vector v = Vector::Zero(p.ambient_dim);
        for (int a = 0; a < axes; ++a) v(a) = centers[static_cast<size_t>(idx[static_cast<size_t>(a)])];
        pts.push_back(std::move(v));
        int a = axes - 1;
        while (a >= 0 && idx[static_cast<size_t>(a)] == per_axis - 1) idx[static_cast<size_t>(a--)] = 0;
        if (a < 0) break;
        ++idx[static_cast<size_t>(a)];
    }
    return DiscreteMeasure::uniform(std::move(pts), n);
}

}  // namespace

DiscreteMeasure generate(const GenerateParams& p, std::uint64_t seed) {
    if (p.n_points < 1 && p.kind != "four_corner_cantor" && p.kind != "cantor_product")
        throw BadParams("generate: n_points must be positive");
    if (p.intrinsic_dim < 1 || p.intrinsic_dim >= p.ambient_dim)
        throw BadParams("generate: need 1 <= n < N");

    DiscreteMeasure mu = [&] {
        if (p.kind == "segment") return generate_segment(p, seed);
        if (p.kind == "plane_patch") return generate_plane_patch(p, seed);
        if (p.kind == "lipschitz_graph") return generate_lipschitz_graph(p, seed);
        if (p.kind == "sphere") return generate_sphere(p, seed);
        if (p.kind == "four_corner_cantor") {
            GenerateParams q = p;
            q.intrinsic_dim = 1;
            if (q.ambient_dim < 2) q.ambient_dim = 2;
            return generate_cantor_product(q);
        }
        if (p.kind == "cantor_product") return generate_cantor_product(p);
        throw BadParams("generate: unknown kind " + p.kind);
    }();
    if (p.noise > 0.0) return add_noise(mu, p.noise, seed + 0x9e37ULL);
    return mu;
}

DiscreteMeasure add_noise(const DiscreteMeasure& mu, double sigma, std::uint64_t seed) {
    if (!(sigma > 0.0)) throw BadParams("add_noise: sigma must be positive");
    RngStream rng(seed, 5);
    std::vector<Vector> pts;
    pts.reserve(static_cast<size_t>(mu.size()));
    for (int i = 0; i < mu.size(); ++i) {
        Vector v = mu.point(i);
        for (int d = 0; d < mu.ambient_dim(); ++d) v(d) += sigma * rng.gaussian();
        pts.push_back(std::move(v));
    }
    return DiscreteMeasure(std::move(pts), mu.weights(), mu.intrinsic_dim());
}

}  // namespace mengerlab
