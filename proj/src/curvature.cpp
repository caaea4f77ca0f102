#include "mengerlab/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "mengerlab/kernel_eval.hpp"
#include "mengerlab/rng.hpp"

namespace mengerlab {

TupleKernel plain_kernel(IntegrandKind kind, double p) {
    return [kind, p](const std::vector<Vector>& tuple) {
        return std::pow(evaluate(kind, tuple), p);
    };
}

TupleKernel symmetrized_kernel(IntegrandKind kind, int n, double p) {
    SymmetrizedIntegrand sym = symmetrize(kind, n, p);
    return [sym, p](const std::vector<Vector>& tuple) {
        return std::pow(sym(tuple), p);
    };
}

namespace {

constexpr std::uint64_t kBlockSize = 4096;

std::uint64_t ipow(std::uint64_t base, int exp) {
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

// Sum of kernel * weight-product over ordered distinct-index tuples with
// flat index in [begin, end).
double sum_tuple_range(const DiscreteMeasure& mu, const TupleKernel& kernel, int arity,
                       std::uint64_t begin, std::uint64_t end, std::uint64_t& evaluated) {
    const std::uint64_t m = static_cast<std::uint64_t>(mu.size());
    std::vector<int> idx(static_cast<size_t>(arity), 0);
    std::vector<Vector> tuple(static_cast<size_t>(arity));
    double acc = 0.0;
    for (std::uint64_t flat = begin; flat < end; ++flat) {
        std::uint64_t rem = flat;
        bool repeated = false;
        for (int c = arity - 1; c >= 0; --c) {
            idx[static_cast<size_t>(c)] = static_cast<int>(rem % m);
            rem /= m;
        }
        for (int a = 0; a < arity && !repeated; ++a)
            for (int b = a + 1; b < arity; ++b)
                if (idx[static_cast<size_t>(a)] == idx[static_cast<size_t>(b)]) {
                    repeated = true;
                    break;
                }
        if (repeated) continue;  // repeated point: degenerate, contributes zero
        double wprod = 1.0;
        for (int c = 0; c < arity; ++c) {
            tuple[static_cast<size_t>(c)] = mu.point(idx[static_cast<size_t>(c)]);
            wprod *= mu.weight(idx[static_cast<size_t>(c)]);
        }
        acc += kernel(tuple) * wprod;
        ++evaluated;
    }
    return acc;
}

}  // namespace

CurvatureEstimate curvature_exact(const DiscreteMeasure& mu, const TupleKernel& kernel,
                                  std::uint64_t tuple_cap) {
    const int arity = mu.intrinsic_dim() + 2;
    const double total_d = std::pow(static_cast<double>(mu.size()), arity);
    if (total_d > static_cast<double>(tuple_cap))
        throw TooLarge("curvature_exact: tuple count exceeds the cap");
    const std::uint64_t total = ipow(static_cast<std::uint64_t>(mu.size()), arity);

    const std::uint64_t blocks = (total + kBlockSize - 1) / kBlockSize;
    std::vector<double> partial(static_cast<size_t>(blocks), 0.0);
    std::vector<std::uint64_t> counts(static_cast<size_t>(blocks), 0);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        const std::uint64_t begin = static_cast<std::uint64_t>(b) * kBlockSize;
        const std::uint64_t end = std::min(begin + kBlockSize, total);
        partial[static_cast<size_t>(b)] =
            sum_tuple_range(mu, kernel, arity, begin, end, counts[static_cast<size_t>(b)]);
    }
    CurvatureEstimate est;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        est.value += partial[static_cast<size_t>(b)];
        est.tuples_evaluated += counts[static_cast<size_t>(b)];
    }
    est.method = CurvatureMethod::Exact;
    return est;
}

CurvatureEstimate curvature_exact(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                                  std::uint64_t tuple_cap) {
    const int arity = mu.intrinsic_dim() + 2;
    const int dim = mu.ambient_dim();
    if (dim > KernelWorkspace::kMaxDim || arity > KernelWorkspace::kMaxArity)
        return curvature_exact(mu, plain_kernel(kind, p), tuple_cap);

    const double total_d = std::pow(static_cast<double>(mu.size()), arity);
    if (total_d > static_cast<double>(tuple_cap))
        throw TooLarge("curvature_exact: tuple count exceeds the cap");
    const std::uint64_t m = static_cast<std::uint64_t>(mu.size());
    const std::uint64_t total = ipow(m, arity);
    const KernelWorkspace kernel(kind, mu.intrinsic_dim(), dim, p);

    // flat coordinate array for allocation-free point access
    std::vector<double> coords(static_cast<size_t>(mu.size()) * dim);
    for (int i = 0; i < mu.size(); ++i)
        for (int c = 0; c < dim; ++c) coords[static_cast<size_t>(i) * dim + c] = mu.point(i)(c);

    const std::uint64_t blocks = (total + kBlockSize - 1) / kBlockSize;
    std::vector<double> partial(static_cast<size_t>(blocks), 0.0);
    std::vector<std::uint64_t> counts(static_cast<size_t>(blocks), 0);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        const std::uint64_t begin = static_cast<std::uint64_t>(b) * kBlockSize;
        const std::uint64_t end = std::min(begin + kBlockSize, total);
        int idx[KernelWorkspace::kMaxArity];
        const double* pts[KernelWorkspace::kMaxArity];
        double acc = 0.0;
        std::uint64_t evaluated = 0;
        for (std::uint64_t flat = begin; flat < end; ++flat) {
            std::uint64_t rem = flat;
            bool repeated = false;
            for (int c = arity - 1; c >= 0; --c) {
                idx[c] = static_cast<int>(rem % m);
                rem /= m;
            }
            for (int a = 0; a < arity && !repeated; ++a)
                for (int c = a + 1; c < arity; ++c)
                    if (idx[a] == idx[c]) { repeated = true; break; }
            if (repeated) continue;
            double wprod = 1.0;
            for (int c = 0; c < arity; ++c) {
                pts[c] = &coords[static_cast<size_t>(idx[c]) * dim];
                wprod *= mu.weight(idx[c]);
            }
            acc += kernel.kp(pts) * wprod;
            ++evaluated;
        }
        partial[static_cast<size_t>(b)] = acc;
        counts[static_cast<size_t>(b)] = evaluated;
    }
    CurvatureEstimate est;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        est.value += partial[static_cast<size_t>(b)];
        est.tuples_evaluated += counts[static_cast<size_t>(b)];
    }
    est.method = CurvatureMethod::Exact;
    return est;
}

CurvatureEstimate curvature_exact_serial(const DiscreteMeasure& mu, const TupleKernel& kernel,
                                         std::uint64_t tuple_cap) {
    const int arity = mu.intrinsic_dim() + 2;
    const double total_d = std::pow(static_cast<double>(mu.size()), arity);
    if (total_d > static_cast<double>(tuple_cap))
        throw TooLarge("curvature_exact_serial: tuple count exceeds the cap");
    const std::uint64_t total = ipow(static_cast<std::uint64_t>(mu.size()), arity);
    CurvatureEstimate est;
    est.value = sum_tuple_range(mu, kernel, arity, 0, total, est.tuples_evaluated);
    est.method = CurvatureMethod::Exact;
    return est;
}

namespace {

// Draws one index with probability proportional to weight via the inverse
// CDF over cumulative weights.
int draw_index(const std::vector<double>& cumulative, double u) {
    const double target = u * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const size_t pos = std::min(static_cast<size_t>(it - cumulative.begin()),
                                cumulative.size() - 1);
    return static_cast<int>(pos);
}

CurvatureEstimate mc_impl(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                          std::uint64_t samples, std::uint64_t seed, bool parallel) {
    if (samples < 100) throw BadParams("curvature_mc: need at least 100 samples");
    const int arity = mu.intrinsic_dim() + 2;
    const int dim = mu.ambient_dim();
    std::vector<double> cumulative(static_cast<size_t>(mu.size()));
    double acc = 0.0;
    for (int i = 0; i < mu.size(); ++i) {
        acc += mu.weight(i);
        cumulative[static_cast<size_t>(i)] = acc;
    }
    const double mass_pow = std::pow(mu.total_mass(), arity);
    const CounterRng rng(seed);
    const KernelWorkspace kernel(kind, mu.intrinsic_dim(), dim, p);
    std::vector<double> coords(static_cast<size_t>(mu.size()) * dim);
    for (int i = 0; i < mu.size(); ++i)
        for (int c = 0; c < dim; ++c) coords[static_cast<size_t>(i) * dim + c] = mu.point(i)(c);

    const std::uint64_t blocks = (samples + kBlockSize - 1) / kBlockSize;
    std::vector<double> sum_block(static_cast<size_t>(blocks), 0.0);
    std::vector<double> sumsq_block(static_cast<size_t>(blocks), 0.0);

    auto run_block = [&](std::uint64_t b) {
        const std::uint64_t begin = b * kBlockSize;
        const std::uint64_t end = std::min(begin + kBlockSize, samples);
        const double* pts[KernelWorkspace::kMaxArity];
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t j = begin; j < end; ++j) {
            for (int c = 0; c < arity; ++c) {
                const double u = rng.uniform(j, static_cast<std::uint64_t>(c));
                pts[c] = &coords[static_cast<size_t>(draw_index(cumulative, u)) * dim];
            }
            const double v = mass_pow * kernel.kp(pts);
            s += v;
            s2 += v * v;
        }
        sum_block[static_cast<size_t>(b)] = s;
        sumsq_block[static_cast<size_t>(b)] = s2;
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic, 2)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b)
            run_block(static_cast<std::uint64_t>(b));
    } else {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    }

    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        sum += sum_block[static_cast<size_t>(b)];
        sumsq += sumsq_block[static_cast<size_t>(b)];
    }
    CurvatureEstimate est;
    est.method = CurvatureMethod::MonteCarlo;
    est.tuples_evaluated = samples;
    const double mean = sum / static_cast<double>(samples);
    est.value = mean;
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(samples) * mean * mean)) /
        (static_cast<double>(samples) - 1.0);
    est.stderr_ = std::sqrt(var / static_cast<double>(samples));
    return est;
}

}  // namespace

CurvatureEstimate curvature_mc(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                               std::uint64_t samples, std::uint64_t seed) {
    return mc_impl(mu, kind, p, samples, seed, true);
}

CurvatureEstimate curvature_mc_serial(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                                      std::uint64_t samples, std::uint64_t seed) {
    return mc_impl(mu, kind, p, samples, seed, false);
}

double curvature_local(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                       const LocalRegion& region, std::uint64_t tuple_cap) {
    if (!(region.t > 0.0) || !(region.kappa > 1.0))
        throw BadParams("curvature_local: need t > 0 and kappa > 1");
    const std::vector<int> inside = mu.ball_points({region.x, region.kappa * region.t});
    const int arity = mu.intrinsic_dim() + 2;
    const double total_d = std::pow(static_cast<double>(inside.size()), arity);
    if (total_d > static_cast<double>(tuple_cap))
        throw TooLarge("curvature_local: tuple count exceeds the cap");
    if (inside.empty()) return 0.0;
    const std::uint64_t m = inside.size();
    const std::uint64_t total = ipow(m, arity);
    const double min_sep = region.t / region.kappa;

    const int dim = mu.ambient_dim();
    const KernelWorkspace kernel(kind, mu.intrinsic_dim(), dim, p);
    std::vector<double> coords(inside.size() * static_cast<size_t>(dim));
    std::vector<double> weights(inside.size());
    for (size_t i = 0; i < inside.size(); ++i) {
        weights[i] = mu.weight(inside[i]);
        for (int c = 0; c < dim; ++c)
            coords[i * static_cast<size_t>(dim) + c] = mu.point(inside[i])(c);
    }
    const double min_sep2 = min_sep * min_sep;

    const std::uint64_t blocks = (total + kBlockSize - 1) / kBlockSize;
    std::vector<double> partial(static_cast<size_t>(blocks), 0.0);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        const std::uint64_t begin = static_cast<std::uint64_t>(b) * kBlockSize;
        const std::uint64_t end = std::min(begin + kBlockSize, total);
        int idx[KernelWorkspace::kMaxArity];
        const double* pts[KernelWorkspace::kMaxArity];
        double acc = 0.0;
        for (std::uint64_t flat = begin; flat < end; ++flat) {
            std::uint64_t rem = flat;
            for (int c = arity - 1; c >= 0; --c) {
                idx[c] = static_cast<int>(rem % m);
                rem /= m;
            }
            bool admissible = true;
            for (int a = 0; a < arity && admissible; ++a) {
                const double* pa = &coords[static_cast<size_t>(idx[a]) * dim];
                for (int c = a + 1; c < arity; ++c) {
                    const double* pc = &coords[static_cast<size_t>(idx[c]) * dim];
                    double d2 = 0.0;
                    for (int e = 0; e < dim; ++e) {
                        const double d = pa[e] - pc[e];
                        d2 += d * d;
                    }
                    if (d2 < min_sep2) {
                        admissible = false;
                        break;
                    }
                }
            }
            if (!admissible) continue;
            double wprod = 1.0;
            for (int c = 0; c < arity; ++c) {
                pts[c] = &coords[static_cast<size_t>(idx[c]) * dim];
                wprod *= weights[static_cast<size_t>(idx[c])];
            }
            acc += kernel.kp(pts) * wprod;
        }
        partial[static_cast<size_t>(b)] = acc;
    }
    double value = 0.0;
    for (double v : partial) value += v;
    return value;
}

}  // namespace mengerlab
