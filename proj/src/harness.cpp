#include "mengerlab/harness.hpp"

#include <cmath>

#include "mengerlab/simplex.hpp"

namespace mengerlab {

double empirical_ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

InequalityReport verify_pointwise_bound(const DiscreteMeasure& mu, IntegrandKind kind,
                                        double p, int x_index, double t, double k,
                                        double k1, double lambda) {
    InequalityReport rep;
    rep.experiment = "pointwise";
    rep.config = {{"p", p}, {"t", t}, {"k", k}, {"k1", k1}, {"lambda", lambda},
                  {"x_index", static_cast<double>(x_index)}};
    const Vector& x = mu.point(x_index);
    if (delta(mu, {x, t}) < lambda) {
        rep.hypothesis_met = false;
        return rep;
    }
    rep.lhs = std::pow(beta_best(mu, x, t, k, p).value, p);
    rep.rhs = curvature_local(mu, kind, p, {x, t, k1}) / std::pow(t, mu.intrinsic_dim());
    rep.empirical_C = empirical_ratio(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport verify_global_bound(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                                     double k, double k0, double lambda,
                                     const ScaleGrid& grid) {
    InequalityReport rep;
    rep.experiment = "global";
    rep.config = {{"p", p}, {"k", k}, {"k0", k0}, {"lambda", lambda},
                  {"t_min", grid.t_min}, {"t_max", grid.t_max},
                  {"grid_count", static_cast<double>(grid.count)}};
    for (int i = 0; i < mu.size(); ++i) {
        const double contribution =
            mu.weight(i) * multiscale_beta(mu, mu.point(i), grid, k, p, lambda, k0);
        rep.lhs += contribution;
        rep.table.push_back({static_cast<double>(i), 0.0, contribution, 0.0});
    }
    rep.rhs = curvature_exact(mu, kind, p).value;
    rep.empirical_C = empirical_ratio(rep.lhs, rep.rhs);
    return rep;
}

ContrastReport contrast_experiment(const ContrastConfig& config) {
    ContrastReport rep;
    const DiscreteMeasure flat = generate(config.flat, config.seed);
    const DiscreteMeasure fractal = generate(config.fractal, config.seed);

    auto curvature_of = [&](const DiscreteMeasure& mu) {
        const int arity = mu.intrinsic_dim() + 2;
        const double tuples = std::pow(static_cast<double>(mu.size()), arity);
        if (config.mc_samples == 0 && tuples <= static_cast<double>(kDefaultTupleCap))
            return curvature_exact(mu, config.kind, config.p);
        const std::uint64_t samples = config.mc_samples > 0 ? config.mc_samples : 1000000;
        return curvature_mc(mu, config.kind, config.p, samples, config.seed);
    };
    rep.flat_curvature = curvature_of(flat);
    rep.fractal_curvature = curvature_of(fractal);

    auto beta_total = [&](const DiscreteMeasure& mu) {
        const double res = mu.resolution();
        const double diam = std::max(mu.diameter(), 4.0 * res);
        const ScaleGrid grid{2.0 * res, 2.0 * diam, config.grid_count};
        return multiscale_beta_total(mu, grid, config.k, config.p, config.lambda, config.k0);
    };
    rep.flat_multiscale_beta = beta_total(flat);
    rep.fractal_multiscale_beta = beta_total(fractal);
    return rep;
}

SimplexSearchReport simplex_search_check(const DiscreteMeasure& mu, const Ball& ball,
                                         double lambda) {
    SimplexSearchReport rep;
    if (delta(mu, ball) < lambda) return rep;  // hypothesis missed; nothing found
    const std::vector<int> inside = mu.ball_points(ball);
    const int n = mu.intrinsic_dim();
    if (static_cast<int>(inside.size()) < n + 1) return rep;

    std::vector<Vector> pts;
    pts.reserve(inside.size());
    for (int i : inside) pts.push_back(mu.point(i));
    const Simplex best = max_volume_simplex(pts, n, SearchMode::Greedy);
    double sigma = std::numeric_limits<double>::infinity();
    try {
        for (int i = 0; i <= n; ++i) sigma = std::min(sigma, height(best, i));
    } catch (const DegenerateFace&) {
        return rep;  // everything collapsed; no usable simplex
    }
    if (!(sigma > 0.0)) return rep;

    rep.found = true;
    rep.sigma = sigma;
    rep.c1_empirical = 10.0 * n * ball.radius / sigma;
    const double vertex_radius = ball.radius / rep.c1_empirical;
    for (int v = 0; v <= n; ++v) {
        // locate the vertex back in the measure for reporting
        int vid = -1;
        for (int i : inside)
            if ((mu.point(i) - best.vertex(v)).norm() == 0.0) { vid = i; break; }
        rep.vertex_indices.push_back(vid);
        double mass = 0.0;
        for (int i : mu.ball_points({best.vertex(v), vertex_radius})) {
            if ((mu.point(i) - ball.center).norm() <= ball.radius) mass += mu.weight(i);
        }
        rep.vertex_ball_masses.push_back(mass);
        if (mass > 0.0)
            rep.c2_empirical = std::max(rep.c2_empirical,
                                        std::pow(ball.radius, n) / mass);
    }
    return rep;
}

}  // namespace mengerlab
