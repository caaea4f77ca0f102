#include "mengerlab/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mengerlab/rng.hpp"

namespace mengerlab {

IntegrandKind integrand_from_string(const std::string& name) {
    if (name == "k1" || name == "K1") return IntegrandKind::K1;
    if (name == "k2" || name == "K2") return IntegrandKind::K2;
    if (name == "k3" || name == "K3") return IntegrandKind::K3;
    if (name == "k4" || name == "K4") return IntegrandKind::K4;
    if (name == "k5" || name == "K5") return IntegrandKind::K5;
    if (name == "k6" || name == "K6") return IntegrandKind::K6;
    throw BadParams("unknown integrand: " + name);
}

std::string integrand_name(IntegrandKind kind) {
    switch (kind) {
        case IntegrandKind::K1: return "k1";
        case IntegrandKind::K2: return "k2";
        case IntegrandKind::K3: return "k3";
        case IntegrandKind::K4: return "k4";
        case IntegrandKind::K5: return "k5";
        case IntegrandKind::K6: return "k6";
    }
    return "k1";
}

double default_exponent(IntegrandKind kind, int n) {
    switch (kind) {
        case IntegrandKind::K1:
        case IntegrandKind::K2:
        case IntegrandKind::K3: return 2.0;
        case IntegrandKind::K4:
        case IntegrandKind::K5: return static_cast<double>(n) * (n + 1);
        case IntegrandKind::K6: return static_cast<double>(n) + 1.0;
    }
    return 2.0;
}

bool is_degenerate_tuple(const std::vector<Vector>& tuple) {
    return is_degenerate(Simplex(tuple));
}

namespace {

double pairwise_distance_product(const std::vector<Vector>& t) {
    double prod = 1.0;
    for (size_t i = 0; i < t.size(); ++i)
        for (size_t j = i + 1; j < t.size(); ++j) prod *= (t[i] - t[j]).norm();
    return prod;
}

double surface_area(const Simplex& s) {
    double area = 0.0;
    for (int i = 0; i <= s.order(); ++i) area += hausdorff_volume(face(s, i));
    return area;
}

}  // namespace

namespace {

bool lex_less(const Vector& a, const Vector& b) {
    for (int c = 0; c < a.size(); ++c) {
        if (a(c) < b(c)) return true;
        if (a(c) > b(c)) return false;
    }
    return false;
}

}  // namespace

double evaluate(IntegrandKind kind, const std::vector<Vector>& tuple) {
    // The symmetric kinds are evaluated on a canonical vertex order so the
    // result is bit-stable under input permutation.
    if (kind != IntegrandKind::K6 && !std::is_sorted(tuple.begin(), tuple.end(), lex_less)) {
        std::vector<Vector> sorted = tuple;
        std::sort(sorted.begin(), sorted.end(), lex_less);
        return evaluate(kind, sorted);
    }
    const Simplex s(tuple);
    if (is_degenerate(s)) return 0.0;
    const int n = s.order() - 1;  // tuple has n+2 points
    const double vol = hausdorff_volume(s);
    const double diam = s.diameter();

    switch (kind) {
        case IntegrandKind::K1:
            return vol / pairwise_distance_product(tuple);
        case IntegrandKind::K2: {
            const double nv = normalized_volume(s);
            double inv_sum = 0.0;
            for (size_t i = 0; i < tuple.size(); ++i) {
                double prod = 1.0;
                for (size_t j = 0; j < tuple.size(); ++j)
                    if (j != i) prod *= (tuple[j] - tuple[i]).squaredNorm();
                inv_sum += 1.0 / prod;
            }
            const double k2_squared = nv * nv * inv_sum /
                                      ((n + 2) * std::pow(diam, static_cast<double>(n) * (n + 1)));
            return std::sqrt(k2_squared);
        }
        case IntegrandKind::K3:
            return vol / std::pow(diam, 0.5 * (n + 1) * (n + 2));
        case IntegrandKind::K4:
            return vol / (surface_area(s) * diam * diam);
        case IntegrandKind::K5:
            return vol / std::pow(diam, static_cast<double>(n) + 2.0);
        case IntegrandKind::K6: {
            std::vector<Vector> base(tuple.begin(), tuple.end() - 1);
            const Vector& w = tuple.back();
            double prod = 1.0;
            for (const auto& x : base) prod *= (w - x).norm();
            return dist_to_subspace(w, affine_hull(base)) / prod;
        }
    }
    return 0.0;
}

SymmetrizedIntegrand::SymmetrizedIntegrand(IntegrandKind kind, int n, double p)
    : kind_(kind), p_(p) {
    double perms = 1.0;
    for (int i = 2; i <= n + 2; ++i) perms *= i;
    if (perms > 40320.0) throw TooLargeN("symmetrize: (n+2)! over 8! is not supported");
}

double SymmetrizedIntegrand::operator()(const std::vector<Vector>& tuple) const {
    std::vector<int> order(tuple.size());
    std::iota(order.begin(), order.end(), 0);
    double sum = 0.0;
    int count = 0;
    std::vector<Vector> permuted(tuple.size());
    do {
        for (size_t i = 0; i < order.size(); ++i)
            permuted[i] = tuple[static_cast<size_t>(order[i])];
        sum += std::pow(evaluate(kind_, permuted), p_);
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    return std::pow(sum / count, 1.0 / p_);
}

SymmetrizedIntegrand symmetrize(IntegrandKind kind, int n, double p) {
    return SymmetrizedIntegrand(kind, n, p);
}

namespace {

std::vector<Vector> random_tuple(RngStream& rng, int count, int dim, double spread) {
    std::vector<Vector> tuple;
    tuple.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vector v(dim);
        for (int d = 0; d < dim; ++d) v(d) = rng.uniform(-spread, spread);
        tuple.push_back(std::move(v));
    }
    return tuple;
}

double relative_gap(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

}  // namespace

ProprietyReport check_propriety(IntegrandKind kind, double p, int n, int ambient_dim,
                                int sample_count, std::uint64_t seed) {
    ProprietyReport report;
    report.kind = kind;
    report.p = p;
    report.n = n;
    RngStream rng(seed, 0);

    const double homogeneity = static_cast<double>(n) * (n + 1);
    for (int s = 0; s < sample_count; ++s) {
        auto tuple = random_tuple(rng, n + 2, ambient_dim, 1.0);
        const double kp = std::pow(evaluate(kind, tuple), p);
        if (kp <= 0.0) continue;

        const double t = std::exp(rng.uniform(-2.0, 2.0));
        std::vector<Vector> scaled = tuple;
        for (auto& v : scaled) v *= t;
        const double kp_scaled = std::pow(evaluate(kind, scaled), p);
        report.scaling_violation = std::max(
            report.scaling_violation, relative_gap(std::pow(t, homogeneity) * kp_scaled, kp));

        Vector shift(ambient_dim);
        for (int d = 0; d < ambient_dim; ++d) shift(d) = rng.uniform(-5.0, 5.0);
        std::vector<Vector> moved = tuple;
        for (auto& v : moved) v += shift;
        const double k_moved = evaluate(kind, moved);
        report.translation_violation = std::max(
            report.translation_violation, relative_gap(k_moved, evaluate(kind, tuple)));
    }
    report.scaling_ok = report.scaling_violation <= 1e-9;
    report.translation_ok = report.translation_violation <= 1e-9;

    // Simplex lower bound: sample (n,t/C)-simplices inside B(x,Ct) plus a
    // witness point; record the worst ratio per C and fit ratio <= c C^l.
    const std::vector<double> cs = {1.0, 2.0, 4.0, 8.0};
    for (double C : cs) {
        double worst = 0.0;
        int accepted = 0;
        for (int trial = 0; trial < 40 * sample_count && accepted < sample_count; ++trial) {
            const double t = std::exp(rng.uniform(-1.0, 1.0));
            Vector center(ambient_dim);
            for (int d = 0; d < ambient_dim; ++d) center(d) = rng.uniform(-2.0, 2.0);
            auto tuple = random_tuple(rng, n + 2, ambient_dim, 1.0);
            for (auto& v : tuple) v = center + (C * t) * v / std::sqrt(static_cast<double>(ambient_dim));
            for (auto& v : tuple)
                if ((v - center).norm() > C * t) goto rejected;
            {
                std::vector<Vector> base(tuple.begin(), tuple.end() - 1);
                const Simplex s(base);
                if (!is_sigma_simplex(s, t / C)) goto rejected;
                const Vector& w = tuple.back();
                const double kp = std::pow(evaluate(kind, tuple), p);
                if (kp <= 0.0) goto rejected;
                const double lhs = std::pow(dist_to_subspace(w, affine_hull(base)) / t, p);
                worst = std::max(worst, lhs / (std::pow(t, homogeneity) * kp));
                ++accepted;
            }
        rejected:;
        }
        if (accepted > 0) {
            report.tested_C.push_back(C);
            report.max_ratio_per_C.push_back(worst);
        }
    }
    if (report.tested_C.size() >= 2) {
        // Least squares for log worst = log c + l log C.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int m = static_cast<int>(report.tested_C.size());
        for (int i = 0; i < m; ++i) {
            const double x = std::log(report.tested_C[static_cast<size_t>(i)]);
            const double y = std::log(std::max(report.max_ratio_per_C[static_cast<size_t>(i)], 1e-300));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double denom = m * sxx - sx * sx;
        report.fitted_l = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
        report.fitted_c = std::exp((sy - report.fitted_l * sx) / m);
    }
    return report;
}

}  // namespace mengerlab
