#include "mengerlab/construction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mengerlab {

double StoppingParams::effective_delta(int n, int ambient_dim) const {
    if (lambda_delta > 0.0) return lambda_delta;
    const double n0 = besicovitch_n0 > 0.0 ? besicovitch_n0
                                           : std::pow(5.0, ambient_dim);
    return std::min(1e-10 / (std::pow(600.0, n) * n0), 2.0 / std::pow(50.0, n));
}

std::string label_name(PointLabel label) {
    switch (label) {
        case PointLabel::Z: return "Z";
        case PointLabel::F1: return "F1";
        case PointLabel::F2: return "F2";
        case PointLabel::F3: return "F3";
    }
    return "Z";
}

Vector StoppingState::project_coords(const Vector& x) const {
    return p0_.basis().transpose() * x;
}

Vector StoppingState::embed_coords(const Vector& u) const { return p0_.basis() * u; }

Vector StoppingState::normal_part(const Vector& x) const {
    return x - embed_coords(project_coords(x));
}

double StoppingState::big_d(const Vector& u) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < s_pairs_.size(); ++s)
        best = std::min(best, (s_proj_coords_[s] - u).norm() + s_scales_[s]);
    // Z points carry good balls at every scale below the grid floor; they
    // enter the infimum at scale zero so that D vanishes exactly on pi(Z).
    for (const auto& zu : z_proj_coords_) best = std::min(best, (zu - u).norm());
    return best;
}

std::pair<int, int> StoppingState::argmin_big_d(const Vector& u) const {
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> arg{-1, -1};
    for (size_t s = 0; s < s_pairs_.size(); ++s) {
        const double v = (s_proj_coords_[s] - u).norm() + s_scales_[s];
        if (v < best) {
            best = v;
            arg = s_pairs_[s];
        }
    }
    for (size_t z = 0; z < z_proj_coords_.size(); ++z) {
        const double v = (z_proj_coords_[z] - u).norm();
        if (v < best) {
            best = v;
            arg = {z_points_[z], -1};
        }
    }
    return arg;
}

double StoppingState::big_d_box(const Vector& lo, const Vector& hi) const {
    const int n = static_cast<int>(lo.size());
    auto box_gap = [&](const Vector& v) {
        double d2 = 0.0;
        for (int c = 0; c < n; ++c) {
            const double gap = std::max({lo(c) - v(c), v(c) - hi(c), 0.0});
            d2 += gap * gap;
        }
        return std::sqrt(d2);
    };
    double best = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < s_pairs_.size(); ++s)
        best = std::min(best, box_gap(s_proj_coords_[s]) + s_scales_[s]);
    for (const auto& zu : z_proj_coords_) best = std::min(best, box_gap(zu));
    return best;
}

namespace {

struct CellResult {
    MemberInfo info;
    std::optional<AffineSubspace> plane;
};

CellResult evaluate_cell(const DiscreteMeasure& mu, const AffineSubspace& p0,
                         const StoppingParams& params, double delta_threshold,
                         const Vector& x, double t) {
    CellResult cell;
    cell.info.delta_value = delta(mu, {x, t});
    if (cell.info.delta_value < 0.5 * delta_threshold) {
        cell.info.beta_value = std::numeric_limits<double>::infinity();
        return cell;
    }
    const BetaResult fit = beta1(mu, x, t, params.k, params.beta_max_iters, params.beta_tol);
    const double fit_angle = angle(fit.plane, p0);
    // The reference plane itself is always an admissible witness; keep the
    // better of the two upper bounds.
    const double beta_p0 = beta_fixed_plane(mu, x, t, params.k, 1.0, p0);
    if (beta_p0 < fit.value) {
        cell.info.beta_value = beta_p0;
        cell.info.witness_angle = 0.0;
    } else {
        cell.info.beta_value = fit.value;
        cell.info.witness_angle = fit_angle;
    }
    if (fit.value < 2.0 * params.epsilon && fit_angle <= params.alpha) {
        cell.info.member = true;
        cell.plane = fit.plane;
    } else if (beta_p0 < 2.0 * params.epsilon) {
        cell.info.member = true;
        cell.plane = p0;
    }
    return cell;
}

}  // namespace

StoppingState build_stopping_state(const DiscreteMeasure& mu, const StoppingParams& params) {
    if (mu.size() == 0) throw EmptyMeasure("build_stopping_state: empty measure");
    if (!(params.alpha > 0.0) || params.alpha > 0.25)
        throw BadParams("build_stopping_state: alpha must lie in (0, 1/4]");
    if (!(params.k > 2.0)) throw BadParams("build_stopping_state: k must exceed 2");
    if (!(params.epsilon >= 0.0)) throw BadParams("build_stopping_state: epsilon < 0");

    StoppingState state;
    state.params_ = params;

    // Recenter the bounding box and rescale the support into B(0,4).
    const int dim = mu.ambient_dim();
    Vector lo = mu.point(0), hi = mu.point(0);
    for (int i = 1; i < mu.size(); ++i) {
        lo = lo.cwiseMin(mu.point(i));
        hi = hi.cwiseMax(mu.point(i));
    }
    const Vector center = 0.5 * (lo + hi);
    double radius = 0.0;
    for (int i = 0; i < mu.size(); ++i)
        radius = std::max(radius, (mu.point(i) - center).norm());
    const double s = radius > 0.0 ? 4.0 / radius : 1.0;
    state.scale_factor_ = s;
    state.shift_ = center;
    std::vector<Vector> pts;
    pts.reserve(static_cast<size_t>(mu.size()));
    for (int i = 0; i < mu.size(); ++i) pts.push_back(s * (mu.point(i) - center));
    state.mu_ = std::make_shared<DiscreteMeasure>(std::move(pts), mu.weights(),
                                                  mu.intrinsic_dim());
    const DiscreteMeasure& m = *state.mu_;
    const int n = m.intrinsic_dim();

    if (params.reference_plane) {
        if (params.reference_plane->dim() != n)
            throw BadParams("build_stopping_state: reference plane has wrong dimension");
        state.p0_ = AffineSubspace::through_origin(params.reference_plane->basis());
    } else {
        const AffineSubspace fit = best_plane_l2(m, {Vector::Zero(dim), 1e9}, n);
        state.p0_ = AffineSubspace::through_origin(fit.basis());
    }

    // Dyadic scale grid, 2^{-1/substeps} steps from top_scale down to the
    // interpoint resolution floor.
    const double floor_scale = 4.0 * m.resolution();
    const double ratio = std::pow(2.0, -1.0 / params.substeps_per_octave);
    double t = params.top_scale;
    for (int j = 0; j < params.levels && t >= floor_scale; ++j) {
        state.scales_.push_back(t);
        t *= ratio;
    }
    if (state.scales_.empty()) state.scales_.push_back(params.top_scale);
    const int levels = static_cast<int>(state.scales_.size());
    const double delta_threshold = params.effective_delta(n, dim);

    // Stage 1: membership for every (point, level).
    std::vector<std::vector<CellResult>> cells(static_cast<size_t>(m.size()));
    for (auto& row : cells) row.resize(static_cast<size_t>(levels));
#pragma omp parallel for schedule(dynamic)
    for (int flat = 0; flat < m.size() * levels; ++flat) {
        const int i = flat / levels;
        const int j = flat % levels;
        cells[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            evaluate_cell(m, state.p0_, params, delta_threshold, m.point(i),
                          state.scales_[static_cast<size_t>(j)]);
    }
    state.table_.assign(static_cast<size_t>(m.size()), {});
    for (int i = 0; i < m.size(); ++i) {
        state.table_[static_cast<size_t>(i)].resize(static_cast<size_t>(levels));
        for (int j = 0; j < levels; ++j) {
            CellResult& cell = cells[static_cast<size_t>(i)][static_cast<size_t>(j)];
            state.table_[static_cast<size_t>(i)][static_cast<size_t>(j)] = cell.info;
            if (cell.plane) {
                state.table_[static_cast<size_t>(i)][static_cast<size_t>(j)].witness =
                    static_cast<int>(state.witness_planes_.size());
                state.witness_planes_.push_back(*cell.plane);
            }
        }
    }

    // Stage 2: h(x) = largest grid scale whose window sees a non-member.
    std::vector<std::vector<int>> nonmembers(static_cast<size_t>(levels));
    for (int j = 0; j < levels; ++j)
        for (int i = 0; i < m.size(); ++i)
            if (!state.table_[static_cast<size_t>(i)][static_cast<size_t>(j)].member)
                nonmembers[static_cast<size_t>(j)].push_back(i);

    state.h_.assign(static_cast<size_t>(m.size()), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < m.size(); ++i) {
        for (int j = 0; j < levels; ++j) {
            const double tj = state.scales_[static_cast<size_t>(j)];
            bool found = false;
            for (int l = j; l < levels && !found; ++l) {
                const double tau = state.scales_[static_cast<size_t>(l)];
                if (tau > tj / 3.0) continue;
                if (tau < tj / 4.0) break;
                for (int y : nonmembers[static_cast<size_t>(l)]) {
                    if ((m.point(i) - m.point(y)).norm() < tau / 3.0) {
                        found = true;
                        break;
                    }
                }
            }
            if (found) {
                state.h_[static_cast<size_t>(i)] = tj;  // scales descend: first hit is largest
                break;
            }
        }
    }

    // Stage 3: the good set S and the distance d.
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < levels; ++j)
            if (state.in_s(i, j)) {
                state.s_pairs_.emplace_back(i, j);
                state.s_scales_.push_back(state.scales_[static_cast<size_t>(j)]);
            }
    state.s_proj_coords_.reserve(state.s_pairs_.size());
    for (const auto& [pi, pj] : state.s_pairs_)
        state.s_proj_coords_.push_back(state.project_coords(m.point(pi)));

    std::vector<int>& z_points = state.z_points_;
    for (int i = 0; i < m.size(); ++i)
        if (state.h_[static_cast<size_t>(i)] <= 0.0) z_points.push_back(i);
    for (int z : z_points) state.z_proj_coords_.push_back(state.project_coords(m.point(z)));

    state.d_.assign(static_cast<size_t>(m.size()),
                    std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t sidx = 0; sidx < state.s_pairs_.size(); ++sidx) {
            const auto& [pi, pj] = state.s_pairs_[sidx];
            best = std::min(best, (m.point(pi) - m.point(i)).norm() +
                                      state.s_scales_[sidx]);
        }
        // Zero-scale contribution of the Z set, matching d = 0 exactly on Z.
        for (int z : z_points)
            best = std::min(best, (m.point(z) - m.point(i)).norm());
        state.d_[static_cast<size_t>(i)] = best;
    }

    // Stage 4: partition labels by first matching clause over the
    // tau in [h/5, h/2], d(x,y) <= tau/2 windows.
    state.labels_.assign(static_cast<size_t>(m.size()), PointLabel::Z);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < m.size(); ++i) {
        const double hx = state.h_[static_cast<size_t>(i)];
        if (hx <= 0.0) continue;  // stays Z
        PointLabel label = PointLabel::F3;
        bool f1 = false, f2 = false, f3 = false;
        for (int l = 0; l < levels; ++l) {
            const double tau = state.scales_[static_cast<size_t>(l)];
            if (tau > hx / 2.0 || tau < hx / 5.0) continue;
            for (int y = 0; y < m.size(); ++y) {
                if ((m.point(i) - m.point(y)).norm() > tau / 2.0) continue;
                const MemberInfo& info = state.table_[static_cast<size_t>(y)][static_cast<size_t>(l)];
                if (info.delta_value <= delta_threshold) f1 = true;
                else if (info.beta_value >= params.epsilon) f2 = true;
                else if (info.witness_angle >= 0.75 * params.alpha) f3 = true;
            }
        }
        if (f1) label = PointLabel::F1;
        else if (f2) label = PointLabel::F2;
        else if (f3) label = PointLabel::F3;
        state.labels_[static_cast<size_t>(i)] = label;
    }
    return state;
}

Vector WhitneyCube::corner(int n) const {
    Vector c(n);
    for (int i = 0; i < n; ++i) c(i) = idx(i) * side();
    return c;
}

Vector WhitneyCube::center(int n) const {
    Vector c = corner(n);
    for (int i = 0; i < n; ++i) c(i) += 0.5 * side();
    return c;
}

void WhitneyCube::bounds(int n, double r, Vector& lo, Vector& hi) const {
    const Vector c = center(n);
    lo = Vector(n);
    hi = Vector(n);
    for (int i = 0; i < n; ++i) {
        lo(i) = c(i) - 0.5 * r * side();
        hi(i) = c(i) + 0.5 * r * side();
    }
}

bool WhitneyCube::contains(const Vector& u) const {
    for (int i = 0; i < u.size(); ++i) {
        const double lo = idx(i) * side();
        if (u(i) < lo || u(i) >= lo + side()) return false;
    }
    return true;
}

bool WhitneyCube::operator<(const WhitneyCube& other) const {
    if (level != other.level) return level < other.level;
    for (int i = 0; i < idx.size(); ++i)
        if (idx(i) != other.idx(i)) return idx(i) < other.idx(i);
    return false;
}

namespace {

void whitney_recurse(const StoppingState& state, int n, int level, const Eigen::VectorXi& idx,
                     const std::vector<Vector>& proj, std::vector<int> carried,
                     std::vector<WhitneyCube>& out) {
    WhitneyCube cube{level, idx};
    // Points of the projected non-Z cloud inside this cell.
    std::vector<int> inside;
    for (int pi : carried)
        if (cube.contains(proj[static_cast<size_t>(pi)])) inside.push_back(pi);
    if (inside.empty()) return;

    Vector lo, hi;
    cube.bounds(n, 1.0, lo, hi);
    const double inf_d = state.big_d_box(lo, hi);
    if (cube.diam(n) <= inf_d / 20.0) {
        out.push_back(cube);
        return;
    }
    if (level < -60) return;  // unreachable for positive scales; recursion guard

    const int children = 1 << n;
    for (int child = 0; child < children; ++child) {
        Eigen::VectorXi cidx(n);
        for (int c = 0; c < n; ++c) cidx(c) = 2 * idx(c) + ((child >> c) & 1);
        whitney_recurse(state, n, level - 1, cidx, proj, inside, out);
    }
}

}  // namespace

std::vector<WhitneyCube> whitney_decompose(const StoppingState& state) {
    const DiscreteMeasure& m = state.measure();
    const int n = m.intrinsic_dim();
    if (state.s_pairs().empty()) return {};  // no good balls anywhere

    std::vector<Vector> proj;
    std::vector<int> all;
    for (int i = 0; i < m.size(); ++i) {
        if (state.label(i) == PointLabel::Z) continue;
        all.push_back(static_cast<int>(proj.size()));
        proj.push_back(state.project_coords(m.point(i)));
    }
    if (proj.empty()) return {};

    // Root cells at side 128 cover everything the rescaled support reaches.
    std::set<WhitneyCube> roots;
    const int root_level = 7;
    for (const auto& u : proj) {
        Eigen::VectorXi idx(n);
        for (int c = 0; c < n; ++c)
            idx(c) = static_cast<int>(std::floor(u(c) / std::ldexp(1.0, root_level)));
        roots.insert(WhitneyCube{root_level, idx});
    }
    std::vector<WhitneyCube> out;
    for (const auto& root : roots)
        whitney_recurse(state, n, root.level, root.idx, proj, all, out);
    std::sort(out.begin(), out.end());
    return out;
}

SelectedBall select_ball(const StoppingState& state, const WhitneyCube& cube) {
    if (state.s_pairs().empty()) throw NoGoodBall("select_ball: the good set is empty");
    const DiscreteMeasure& m = state.measure();
    const int n = m.intrinsic_dim();
    const Vector uc = cube.center(n);
    const auto [pi, pj] = state.argmin_big_d(uc);
    if (pi < 0) throw NoGoodBall("select_ball: no candidate pair");
    // pj == -1: a Z point, a good ball at every scale below the grid floor.
    const double t = pj >= 0 ? state.scales()[static_cast<size_t>(pj)] : 0.0;
    const double diam = cube.diam(n);
    const double r = std::max(t, diam / 2.0);

    // Witness plane of (X, r): the smallest grid scale >= r that is still in
    // S for the same centre, falling back to the located pair.
    int level = pj;
    for (int l = static_cast<int>(state.scales().size()) - 1; l >= 0; --l) {
        if (state.scales()[static_cast<size_t>(l)] < r) continue;
        if (state.in_s(pi, l)) { level = l; break; }
    }
    if (level < 0) throw NoGoodBall("select_ball: no member scale covers the radius");
    const int witness = state.info(pi, level).witness >= 0
                            ? state.info(pi, level).witness
                            : (pj >= 0 ? state.info(pi, pj).witness : -1);
    if (witness < 0) throw NoGoodBall("select_ball: located pair carries no witness plane");

    SelectedBall sel{{m.point(pi), r}, pi, level, state.witness_plane(witness)};

    // Size and projected-distance comparability against the cube.
    if (!(2.0 * r >= diam && 2.0 * r <= 200.0 * diam))
        throw NoGoodBall("select_ball: ball size incomparable to the cube");
    Vector lo, hi;
    cube.bounds(n, 1.0, lo, hi);
    const Vector up = state.project_coords(m.point(pi));
    double gap2 = 0.0;
    for (int c = 0; c < n; ++c) {
        const double g = std::max({lo(c) - up(c), up(c) - hi(c), 0.0});
        gap2 += g * g;
    }
    const double proj_gap = std::max(0.0, std::sqrt(gap2) - r);
    if (proj_gap > 100.0 * diam)
        throw NoGoodBall("select_ball: projected ball too far from the cube");
    return sel;
}

double whitney_bump(const WhitneyCube& cube, const Vector& u) {
    const int n = static_cast<int>(u.size());
    const Vector c = cube.center(n);
    double sup = 0.0;
    for (int i = 0; i < n; ++i) sup = std::max(sup, std::abs(u(i) - c(i)));
    // s reaches 1 at 1.5 cell sides, so the support is exactly 3R
    const double s = sup / (1.5 * cube.side());
    if (s >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return q * q * q;
}

GraphFunction build_graph(const StoppingState& state, const std::vector<WhitneyCube>& cubes) {
    const DiscreteMeasure& m = state.measure();
    const int n = m.intrinsic_dim();
    GraphFunction g;
    g.p0_ = state.reference_plane();
    g.n_ = n;
    g.z_match_tol_ = 1e-8;

    for (int i = 0; i < m.size(); ++i) {
        if (state.label(i) != PointLabel::Z) continue;
        g.z_values_.emplace_back(state.project_coords(m.point(i)),
                                 state.normal_part(m.point(i)));
    }
    // Injectivity of the projection restricted to Z.
    for (size_t a = 0; a < g.z_values_.size(); ++a)
        for (size_t b = a + 1; b < g.z_values_.size(); ++b) {
            if ((g.z_values_[a].first - g.z_values_[b].first).norm() > g.z_match_tol_) continue;
            if ((g.z_values_[a].second - g.z_values_[b].second).norm() > 10.0 * g.z_match_tol_)
                throw ProjectionNotInjective(
                    "build_graph: two Z points share a projection with different heights");
        }

    for (const auto& cube : cubes) {
        // Only cells meeting U_12 carry a patch.
        Vector lo, hi;
        cube.bounds(n, 1.0, lo, hi);
        double closest2 = 0.0;
        for (int c = 0; c < n; ++c) {
            const double gap = std::max({lo(c), -hi(c), 0.0});
            closest2 += gap * gap;
        }
        if (std::sqrt(closest2) > g.u12_radius_) continue;
        SelectedBall sel = select_ball(state, cube);
        AffineMap map = plane_as_graph(sel.plane, state.reference_plane());
        g.patches_.push_back({cube, std::move(map), sel.plane, sel.ball});
    }
    return g;
}

std::optional<Vector> GraphFunction::evaluate(const Vector& u) const {
    // Exact values over projected Z points win.
    double best = z_match_tol_;
    const Vector* hit = nullptr;
    for (const auto& [zu, zv] : z_values_) {
        const double d = (zu - u).norm();
        if (d <= best) {
            best = d;
            hit = &zv;
        }
    }
    if (hit) return *hit;

    if (u.norm() > u12_radius_) return std::nullopt;
    bool in_double_cell = false;
    double weight_sum = 0.0;
    Vector acc = Vector::Zero(p0_.ambient_dim());
    for (const auto& patch : patches_) {
        const Vector c = patch.cube.center(n_);
        double sup = 0.0;
        for (int i = 0; i < n_; ++i) sup = std::max(sup, std::abs(u(i) - c(i)));
        if (sup <= patch.cube.side()) in_double_cell = true;  // u in 2R
        const double w = whitney_bump(patch.cube, u);
        if (w <= 0.0) continue;
        weight_sum += w;
        acc += w * patch.map.value_at_coords(u);
    }
    if (!in_double_cell || weight_sum <= 0.0) return std::nullopt;
    return acc / weight_sum;
}

std::optional<Vector> GraphFunction::graph_point(const Vector& u) const {
    const auto v = evaluate(u);
    if (!v) return std::nullopt;
    return p0_.basis() * u + *v;
}

std::vector<Vector> GraphFunction::domain_samples() const {
    std::vector<Vector> out;
    for (const auto& [zu, zv] : z_values_) out.push_back(zu);
    for (const auto& patch : patches_) {
        const Vector c = patch.cube.center(n_);
        if (c.norm() <= u12_radius_) out.push_back(c);
    }
    return out;
}

double gamma_affine_deviation(const std::function<std::optional<Vector>(const Vector&)>& g,
                              int n, const Vector& q, double t, int grid_per_axis) {
    if (!(t > 0.0)) throw BadParams("gamma: t must be positive");
    std::vector<Vector> us;
    std::vector<Vector> vals;
    const double step = 2.0 * t / (grid_per_axis - 1);
    std::vector<int> idx(static_cast<size_t>(n), 0);
    while (true) {
        Vector u = q;
        for (int c = 0; c < n; ++c) u(c) += -t + step * idx[static_cast<size_t>(c)];
        if ((u - q).norm() <= t) {
            const auto v = g(u);
            if (!v) throw OutOfDomain("gamma: quadrature point outside the function domain");
            us.push_back(u);
            vals.push_back(*v);
        }
        int c = n - 1;
        while (c >= 0 && idx[static_cast<size_t>(c)] == grid_per_axis - 1)
            idx[static_cast<size_t>(c--)] = 0;
        if (c < 0) break;
        ++idx[static_cast<size_t>(c)];
    }
    if (us.size() < static_cast<size_t>(n + 2))
        throw BadParams("gamma: quadrature grid too coarse");
    const double du = std::pow(step, n);
    const int dim_out = static_cast<int>(vals.front().size());
    const int cols = n + 1;

    // Weighted least-squares affine fit, then reweighted L1 refinements.
    auto fit_value = [&](const std::vector<double>& w, Matrix& coef) {
        Matrix ata = Matrix::Zero(cols, cols);
        Matrix atb = Matrix::Zero(cols, dim_out);
        for (size_t i = 0; i < us.size(); ++i) {
            Vector row(cols);
            row(0) = 1.0;
            row.tail(n) = us[i] - q;
            ata += w[i] * (row * row.transpose());
            atb += w[i] * (row * vals[i].transpose());
        }
        coef = ata.ldlt().solve(atb);
        double acc = 0.0;
        for (size_t i = 0; i < us.size(); ++i) {
            Vector row(cols);
            row(0) = 1.0;
            row.tail(n) = us[i] - q;
            acc += (vals[i] - coef.transpose() * row).norm();
        }
        return acc * du / std::pow(t, n + 1);
    };

    std::vector<double> w(us.size(), 1.0);
    Matrix coef;
    double best = fit_value(w, coef);
    for (int iter = 0; iter < 12; ++iter) {
        for (size_t i = 0; i < us.size(); ++i) {
            Vector row(cols);
            row(0) = 1.0;
            row.tail(n) = us[i] - q;
            const double r = (vals[i] - coef.transpose() * row).norm();
            w[i] = 1.0 / (r + 1e-6 * t);
        }
        const double v = fit_value(w, coef);
        best = std::min(best, v);
    }
    return best;
}

double gamma_plane_deviation(const std::function<std::optional<Vector>(const Vector&)>& g,
                             const AffineSubspace& p0, const Vector& q, double t,
                             int grid_per_axis) {
    const int n = p0.dim();
    if (!(t > 0.0)) throw BadParams("gamma: t must be positive");
    std::vector<Vector> lifted;
    const double step = 2.0 * t / (grid_per_axis - 1);
    std::vector<int> idx(static_cast<size_t>(n), 0);
    while (true) {
        Vector u = q;
        for (int c = 0; c < n; ++c) u(c) += -t + step * idx[static_cast<size_t>(c)];
        if ((u - q).norm() <= t) {
            const auto v = g(u);
            if (!v) throw OutOfDomain("gamma: quadrature point outside the function domain");
            lifted.push_back(p0.basis() * u + *v);
        }
        int c = n - 1;
        while (c >= 0 && idx[static_cast<size_t>(c)] == grid_per_axis - 1)
            idx[static_cast<size_t>(c--)] = 0;
        if (c < 0) break;
        ++idx[static_cast<size_t>(c)];
    }
    const double du = std::pow(step, n);
    DiscreteMeasure cloud(lifted, std::vector<double>(lifted.size(), du), n);
    const Vector center = p0.basis() * q;
    const double radius = 2.0 * t + 1.0;
    AffineSubspace plane = best_plane_l2(cloud, {center, radius}, n);
    auto value_for = [&](const AffineSubspace& p) {
        double acc = 0.0;
        for (const auto& x : lifted) acc += dist_to_subspace(x, p) * du;
        return acc / std::pow(t, n + 1);
    };
    double best = value_for(plane);
    // A few reweighted refinements toward the L1 plane.
    std::vector<int> all(lifted.size());
    for (size_t i = 0; i < lifted.size(); ++i) all[i] = static_cast<int>(i);
    for (int iter = 0; iter < 12; ++iter) {
        std::vector<double> w(lifted.size());
        for (size_t i = 0; i < lifted.size(); ++i)
            w[i] = du / (dist_to_subspace(lifted[i], plane) + 1e-6 * t);
        DiscreteMeasure weighted(lifted, w, n);
        plane = best_plane_l2(weighted, {center, radius}, n);
        best = std::min(best, value_for(plane));
    }
    return best;
}

CoverageReport coverage_report(const StoppingState& state, const GraphFunction& graph,
                               double tol) {
    const DiscreteMeasure& m = state.measure();
    CoverageReport rep;
    rep.tol = tol;
    rep.big_k = 2.0 * (104.0 * 10.0 * 6.0 + 214.0);
    const double sqrt_eps = std::sqrt(state.params().epsilon);

    for (int i = 0; i < m.size(); ++i) {
        const double w = m.weight(i);
        switch (state.label(i)) {
            case PointLabel::Z: rep.mass_z += w; break;
            case PointLabel::F1: rep.mass_f1 += w; break;
            case PointLabel::F2: rep.mass_f2 += w; break;
            case PointLabel::F3: rep.mass_f3 += w; break;
        }
        const Vector u = state.project_coords(m.point(i));
        const auto gp = graph.graph_point(u);
        double dist = std::numeric_limits<double>::infinity();
        if (gp) dist = (m.point(i) - *gp).norm();
        else ++rep.points_without_value;
        if (dist <= tol) rep.coverage += w;

        bool in_g = false;
        if (state.label(i) != PointLabel::Z) {
            // Escapee criterion: projection lands on pi(Z), or the point sits
            // outside K B_j for every patch whose 3R cell holds it.
            bool proj_on_z = false;
            for (const auto& [zu, zv] : graph.z_values())
                if ((zu - u).norm() <= 1e-8) { proj_on_z = true; break; }
            bool escapes_all = true;
            for (const auto& patch : graph.patches()) {
                Vector lo, hi;
                patch.cube.bounds(m.intrinsic_dim(), 3.0, lo, hi);
                bool in3r = true;
                for (int c = 0; c < m.intrinsic_dim(); ++c)
                    if (u(c) < lo(c) || u(c) > hi(c)) { in3r = false; break; }
                if (!in3r) continue;
                if ((m.point(i) - patch.ball.center).norm() <= rep.big_k * patch.ball.radius) {
                    escapes_all = false;
                    break;
                }
            }
            in_g = proj_on_z || escapes_all;
        }
        if (in_g) rep.mass_g += w;
        else if (dist <= sqrt_eps * state.d(i) || (state.label(i) == PointLabel::Z && dist <= tol))
            rep.mass_f_tilde += w;
    }
    return rep;
}

}  // namespace mengerlab
