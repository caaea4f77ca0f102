#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mengerlab/simplex.hpp"

namespace mengerlab {

// The six (n+2)-point curvature kernels. All vanish on degenerate tuples
// (those spanning at most an n-flat); K1..K5 are permutation symmetric,
// K6 is not.
enum class IntegrandKind { K1, K2, K3, K4, K5, K6 };

IntegrandKind integrand_from_string(const std::string& name);
std::string integrand_name(IntegrandKind kind);

// The exponent that makes kind^p scale-invariant in the t^{n(n+1)} sense:
// 2 for K1..K3, n(n+1) for K4/K5, n+1 for K6.
double default_exponent(IntegrandKind kind, int n);

// A tuple is degenerate when the edge Gram determinant vanishes at the
// shared scale-aware threshold (same as the simplex module).
bool is_degenerate_tuple(const std::vector<Vector>& tuple);

// K value (not raised to p) of an (n+2)-point tuple; 0 on degenerate tuples.
double evaluate(IntegrandKind kind, const std::vector<Vector>& tuple);

// Permutation average of K^p, reported as a K-like value (p-th root).
// Equals the plain kernel for the symmetric kinds. Throws TooLargeN when
// (n+2)! exceeds 8! = 40320.
class SymmetrizedIntegrand {
public:
    SymmetrizedIntegrand(IntegrandKind kind, int n, double p);
    double operator()(const std::vector<Vector>& tuple) const;
    double p() const { return p_; }

private:
    IntegrandKind kind_;
    double p_;
};

SymmetrizedIntegrand symmetrize(IntegrandKind kind, int n, double p);

struct ProprietyReport {
    IntegrandKind kind;
    double p = 0.0;
    int n = 0;
    // Max relative violation of t^{n(n+1)} K^p(t x) = K^p(x) over the sample.
    double scaling_violation = 0.0;
    // Max relative violation of translation invariance.
    double translation_violation = 0.0;
    // Empirical fit of the simplex lower-bound constants: for sampled
    // (n,t/C)-simplices in B(x,Ct) and w in B(x,Ct), the observed maxima of
    // (d(w,aff)/t)^p / (t^{n(n+1)} K^p) per tested C, and a log-log fit
    // ratio <= c * C^l through those maxima.
    std::vector<double> tested_C;
    std::vector<double> max_ratio_per_C;
    double fitted_c = 0.0;
    double fitted_l = 0.0;
    bool scaling_ok = false;      // violation <= 1e-9
    bool translation_ok = false;  // violation <= 1e-9
};

// Samples random tuples and simplex/witness configurations and measures how
// far the kernel is from the proper-integrand laws at exponent p.
ProprietyReport check_propriety(IntegrandKind kind, double p, int n, int ambient_dim,
                                int sample_count, std::uint64_t seed);

}  // namespace mengerlab
