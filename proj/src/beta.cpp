#include "mengerlab/beta.hpp"

#include <algorithm>
#include <cmath>

namespace mengerlab {

std::vector<double> ScaleGrid::levels() const {
    if (!(t_min > 0.0) || !(t_max > t_min) || count < 2)
        throw BadParams("ScaleGrid: need 0 < t_min < t_max and count >= 2");
    std::vector<double> ts;
    ts.reserve(static_cast<size_t>(count));
    const double ratio = std::pow(t_max / t_min, 1.0 / (count - 1));
    double t = t_min;
    for (int i = 0; i < count; ++i) {
        ts.push_back(t);
        t *= ratio;
    }
    return ts;
}

double ScaleGrid::log_step() const {
    return std::log(t_max / t_min) / (count - 1);
}

double beta_fixed_plane(const DiscreteMeasure& mu, const Vector& x, double t, double k,
                        double p, const AffineSubspace& plane) {
    if (!(t > 0.0) || !(k > 1.0) || !(p >= 1.0))
        throw BadParams("beta_fixed_plane: need t > 0, k > 1, p >= 1");
    if (plane.dim() != mu.intrinsic_dim())
        throw DimMismatch("beta_fixed_plane: plane dim != intrinsic dim");
    double acc = 0.0;
    for (int i : mu.ball_points({x, k * t}))
        acc += mu.weight(i) * std::pow(dist_to_subspace(mu.point(i), plane) / t, p);
    return std::pow(acc / std::pow(t, mu.intrinsic_dim()), 1.0 / p);
}

namespace {

// Weighted least-squares plane through the centroid of the given points.
AffineSubspace weighted_pca_plane(const DiscreteMeasure& mu, const std::vector<int>& idx,
                                  const std::vector<double>& weights, int n) {
    const int dim = mu.ambient_dim();
    double total = 0.0;
    Vector centroid = Vector::Zero(dim);
    for (size_t j = 0; j < idx.size(); ++j) {
        centroid += weights[j] * mu.point(idx[j]);
        total += weights[j];
    }
    centroid /= total;

    Matrix scatter = Matrix::Zero(dim, dim);
    for (size_t j = 0; j < idx.size(); ++j) {
        const Vector rel = mu.point(idx[j]) - centroid;
        scatter += weights[j] * (rel * rel.transpose());
    }
    const double trace = scatter.trace();
    if (trace <= 1e-300 * std::max(1.0, centroid.squaredNorm()))
        return AffineSubspace::axis_aligned(centroid, n);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter);
    Matrix basis(dim, n);
    for (int c = 0; c < n; ++c) basis.col(c) = eig.eigenvectors().col(dim - 1 - c);
    return AffineSubspace(centroid, basis);
}

}  // namespace

AffineSubspace best_plane_l2(const DiscreteMeasure& mu, const Ball& b, int n) {
    const std::vector<int> idx = mu.ball_points(b);
    if (idx.empty()) throw EmptyBall("best_plane_l2: no atoms in ball");
    std::vector<double> w;
    w.reserve(idx.size());
    for (int i : idx) w.push_back(mu.weight(i));
    return weighted_pca_plane(mu, idx, w, n);
}

BetaResult beta2(const DiscreteMeasure& mu, const Vector& x, double t, double k) {
    const AffineSubspace plane = best_plane_l2(mu, {x, k * t}, mu.intrinsic_dim());
    return {beta_fixed_plane(mu, x, t, k, 2.0, plane), plane, BetaExactness::ExactL2};
}

BetaResult beta1(const DiscreteMeasure& mu, const Vector& x, double t, double k,
                 int max_iters, double tol) {
    const Ball ball{x, k * t};
    const std::vector<int> idx = mu.ball_points(ball);
    if (idx.empty()) throw EmptyBall("beta1: no atoms in ball");

    AffineSubspace plane = best_plane_l2(mu, ball, mu.intrinsic_dim());
    AffineSubspace best = plane;
    double best_value = beta_fixed_plane(mu, x, t, k, 1.0, plane);

    std::vector<double> w(idx.size());
    for (int iter = 0; iter < max_iters; ++iter) {
        for (size_t j = 0; j < idx.size(); ++j) {
            const double d = dist_to_subspace(mu.point(idx[j]), plane);
            w[j] = mu.weight(idx[j]) / (d + tol * t);
        }
        plane = weighted_pca_plane(mu, idx, w, mu.intrinsic_dim());
        const double value = beta_fixed_plane(mu, x, t, k, 1.0, plane);
        if (value < best_value) {
            best_value = value;
            best = plane;
        } else if (value > best_value * (1.0 + 1e-12)) {
            break;  // iteration stopped improving
        }
    }
    return {best_value, best, BetaExactness::UpperBoundL1};
}

BetaResult beta_best(const DiscreteMeasure& mu, const Vector& x, double t, double k, double p) {
    if (p == 2.0) return beta2(mu, x, t, k);
    if (p == 1.0) return beta1(mu, x, t, k);
    const AffineSubspace plane = best_plane_l2(mu, {x, k * t}, mu.intrinsic_dim());
    return {beta_fixed_plane(mu, x, t, k, p, plane), plane, BetaExactness::UpperBoundL1};
}

double multiscale_beta(const DiscreteMeasure& mu, const Vector& x, const ScaleGrid& grid,
                       double k, double p, double lambda, double k0) {
    const double dlog = grid.log_step();
    double acc = 0.0;
    for (double t : grid.levels()) {
        if (delta_tilde(mu, {x, t}, k0) < lambda) continue;
        if (mu.ball_points({x, k * t}).empty()) continue;
        const double b = beta_best(mu, x, t, k, p).value;
        acc += std::pow(b, p) * dlog;
    }
    return acc;
}

double multiscale_beta_total(const DiscreteMeasure& mu, const ScaleGrid& grid, double k,
                             double p, double lambda, double k0) {
    std::vector<double> per_point(static_cast<size_t>(mu.size()), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < mu.size(); ++i)
        per_point[static_cast<size_t>(i)] =
            mu.weight(i) * multiscale_beta(mu, mu.point(i), grid, k, p, lambda, k0);
    double acc = 0.0;
    for (double v : per_point) acc += v;  // fixed ascending order
    return acc;
}

double multiscale_beta_total_serial(const DiscreteMeasure& mu, const ScaleGrid& grid, double k,
                                    double p, double lambda, double k0) {
    std::vector<double> per_point(static_cast<size_t>(mu.size()), 0.0);
    for (int i = 0; i < mu.size(); ++i)
        per_point[static_cast<size_t>(i)] =
            mu.weight(i) * multiscale_beta(mu, mu.point(i), grid, k, p, lambda, k0);
    double acc = 0.0;
    for (double v : per_point) acc += v;
    return acc;
}

}  // namespace mengerlab
