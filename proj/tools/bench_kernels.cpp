// Timing comparison of the OpenMP kernels against their serial references,
// with an agreement check on the results.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <cmath>

#include "mengerlab/beta.hpp"
#include "mengerlab/curvature.hpp"

using namespace mengerlab;

namespace {

double now() { return omp_get_wtime(); }

void report(const char* name, double serial, double parallel, double err) {
    std::printf("%-28s reference %8.3fs  openmp %8.3fs  speedup %5.2fx  |err| %.2e\n",
                name, serial, parallel, serial / parallel, err);
}

}  // namespace

int main(int argc, char** argv) {
    int cantor_depth = 3;
    std::uint64_t mc_samples = 2000000;
    if (argc > 1) cantor_depth = std::atoi(argv[1]);
    if (argc > 2) mc_samples = std::strtoull(argv[2], nullptr, 10);

    GenerateParams params;
    params.kind = "four_corner_cantor";
    params.depth = cantor_depth;
    const DiscreteMeasure mu = generate(params, 1);
    std::printf("measure: four-corner cantor depth %d, %d points, %d threads\n",
                cantor_depth, mu.size(), omp_get_max_threads());

    {
        double t0 = now();
        const CurvatureEstimate ref = curvature_exact_serial(mu, plain_kernel(IntegrandKind::K1, 2.0));
        double t1 = now();
        const CurvatureEstimate par = curvature_exact(mu, IntegrandKind::K1, 2.0);
        double t2 = now();
        const double err = std::abs(par.value - ref.value) / std::max(ref.value, 1e-300);
        report("curvature_exact", t1 - t0, t2 - t1, err);
        if (err > 1e-12) return 1;
    }
    {
        double t0 = now();
        const CurvatureEstimate ref = curvature_mc_serial(mu, IntegrandKind::K1, 2.0, mc_samples, 7);
        double t1 = now();
        const CurvatureEstimate par = curvature_mc(mu, IntegrandKind::K1, 2.0, mc_samples, 7);
        double t2 = now();
        const double err = std::abs(par.value - ref.value);
        report("curvature_mc", t1 - t0, t2 - t1, err);
        if (err != 0.0) return 1;  // identical blocks, identical sum
    }
    {
        const ScaleGrid grid{0.02, 2.0, 10};
        double t0 = now();
        const double ref = multiscale_beta_total_serial(mu, grid, 4.0, 2.0, 0.01, 1.0);
        double t1 = now();
        const double par = multiscale_beta_total(mu, grid, 4.0, 2.0, 0.01, 1.0);
        double t2 = now();
        const double err = std::abs(par - ref) / std::max(std::abs(ref), 1e-300);
        report("multiscale_beta_total", t1 - t0, t2 - t1, err);
        if (err != 0.0) return 1;
    }
    std::puts("all kernels agree with their serial references");
    return 0;
}
