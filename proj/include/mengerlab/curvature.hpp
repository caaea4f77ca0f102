#pragma once

#include <cstdint>
#include <functional>

#include "mengerlab/integrand.hpp"
#include "mengerlab/measure.hpp"

namespace mengerlab {

enum class CurvatureMethod { Exact, MonteCarlo };

struct CurvatureEstimate {
    double value = 0.0;
    double stderr_ = 0.0;  // 0 for exact sums
    std::uint64_t tuples_evaluated = 0;
    CurvatureMethod method = CurvatureMethod::Exact;
};

struct LocalRegion {
    Vector x;
    double t = 0.0;
    double kappa = 2.0;
};

// K^p evaluated on a tuple of measure points; either the plain kernel or a
// permutation-symmetrized one.
using TupleKernel = std::function<double(const std::vector<Vector>&)>;

TupleKernel plain_kernel(IntegrandKind kind, double p);
TupleKernel symmetrized_kernel(IntegrandKind kind, int n, double p);

inline constexpr std::uint64_t kDefaultTupleCap = 100'000'000ULL;

// Exact ordered-tuple sum of K^p over the measure (tuples with a repeated
// index lie in the degenerate set and contribute zero, so they are skipped).
// Parallelized over contiguous index blocks whose partial sums are reduced
// in ascending block order: results are bit-identical for any thread count.
// Throws TooLarge above the tuple cap.
CurvatureEstimate curvature_exact(const DiscreteMeasure& mu, const TupleKernel& kernel,
                                  std::uint64_t tuple_cap = kDefaultTupleCap);
CurvatureEstimate curvature_exact(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                                  std::uint64_t tuple_cap = kDefaultTupleCap);

// Plain nested-loop reference implementation, kept for validating the
// parallel kernel.
CurvatureEstimate curvature_exact_serial(const DiscreteMeasure& mu, const TupleKernel& kernel,
                                         std::uint64_t tuple_cap = kDefaultTupleCap);

// Unbiased Monte-Carlo estimate: indices drawn i.i.d. per coordinate with
// probability proportional to weight; estimate = mass^{n+2} * mean K^p.
// Counter-based substreams per sample block make the result a pure function
// of the seed, independent of thread count.
CurvatureEstimate curvature_mc(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                               std::uint64_t samples, std::uint64_t seed);
CurvatureEstimate curvature_mc_serial(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                                      std::uint64_t samples, std::uint64_t seed);

// Exact sum restricted to tuples inside B(x, kappa t) with all pairwise
// distances >= t/kappa.
double curvature_local(const DiscreteMeasure& mu, IntegrandKind kind, double p,
                       const LocalRegion& region,
                       std::uint64_t tuple_cap = kDefaultTupleCap);

}  // namespace mengerlab
