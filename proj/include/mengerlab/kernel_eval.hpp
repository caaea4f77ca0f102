#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "mengerlab/integrand.hpp"

namespace mengerlab {

// Allocation-free kernel evaluation for the hot tuple-sum loops. Works on
// raw coordinate pointers with stack buffers; the Eigen-based evaluate()
// stays as the readable reference the tests compare against.
class KernelWorkspace {
public:
    static constexpr int kMaxDim = 16;
    static constexpr int kMaxArity = 8;

    KernelWorkspace(IntegrandKind kind, int n, int dim, double p)
        : kind_(kind), n_(n), dim_(dim), p_(p) {
        if (dim > kMaxDim || n + 2 > kMaxArity)
            throw TooLargeN("KernelWorkspace: dimension or arity beyond the fast path");
        fact_n_ = 1.0;
        for (int i = 2; i <= n_; ++i) fact_n_ *= i;
        fact_n1_ = fact_n_ * (n_ + 1);
    }

    double p() const { return p_; }

    // K^p for the tuple of n+2 points given as coordinate pointers.
    double kp(const double* const* pts) const {
        const double k = value(pts);
        return k <= 0.0 ? 0.0 : std::pow(k, p_);
    }

    // K itself (unexponentiated).
    double value(const double* const* input) const {
        const int arity = n_ + 2;
        // canonical vertex order for the symmetric kinds, matching evaluate()
        const double* pts[kMaxArity];
        for (int a = 0; a < arity; ++a) pts[a] = input[a];
        if (kind_ != IntegrandKind::K6) {
            auto lex_less = [this](const double* a, const double* b) {
                for (int c = 0; c < dim_; ++c) {
                    if (a[c] < b[c]) return true;
                    if (a[c] > b[c]) return false;
                }
                return false;
            };
            std::sort(pts, pts + arity, lex_less);
        }
        // pairwise squared distances
        double dist2[kMaxArity][kMaxArity];
        double diam2 = 0.0;
        for (int a = 0; a < arity; ++a) {
            dist2[a][a] = 0.0;
            for (int b = a + 1; b < arity; ++b) {
                double acc = 0.0;
                for (int c = 0; c < dim_; ++c) {
                    const double d = pts[a][c] - pts[b][c];
                    acc += d * d;
                }
                dist2[a][b] = dist2[b][a] = acc;
                if (acc > diam2) diam2 = acc;
            }
        }
        const double diam = std::sqrt(diam2);

        // Gram matrix of the edges from pts[0]; entries from the polarization
        // identity so only distances are needed.
        double gram[kMaxArity][kMaxArity];
        const int m = arity - 1;
        for (int a = 1; a < arity; ++a)
            for (int b = a; b < arity; ++b) {
                const double dot = 0.5 * (dist2[0][a] + dist2[0][b] - dist2[a][b]);
                gram[a - 1][b - 1] = dot;
                gram[b - 1][a - 1] = dot;
            }
        const double full_gram = det(gram, m);
        const double degenerate_at = 1e-12 * std::pow(diam2, m);  // diam^{2m}
        if (!(full_gram > degenerate_at)) return 0.0;

        const double vol_parallelotope = std::sqrt(full_gram);
        const double hausdorff = vol_parallelotope / fact_n1_;  // H^{n+1}

        switch (kind_) {
            case IntegrandKind::K1: {
                double prod = 1.0;
                for (int a = 0; a < arity; ++a)
                    for (int b = a + 1; b < arity; ++b) prod *= std::sqrt(dist2[a][b]);
                return hausdorff / prod;
            }
            case IntegrandKind::K2: {
                double inv_sum = 0.0;
                for (int a = 0; a < arity; ++a) {
                    double prod = 1.0;
                    for (int b = 0; b < arity; ++b)
                        if (b != a) prod *= dist2[a][b];
                    inv_sum += 1.0 / prod;
                }
                const double k2sq = vol_parallelotope * vol_parallelotope * inv_sum /
                                    (arity * std::pow(diam, static_cast<double>(n_) * (n_ + 1)));
                return std::sqrt(k2sq);
            }
            case IntegrandKind::K3:
                return hausdorff / std::pow(diam, 0.5 * (n_ + 1) * (n_ + 2));
            case IntegrandKind::K4: {
                double area = 0.0;
                for (int drop = 0; drop < arity; ++drop)
                    area += facet_volume(dist2, arity, drop) / fact_n_;
                return hausdorff / (area * diam2);
            }
            case IntegrandKind::K5:
                return hausdorff / std::pow(diam, static_cast<double>(n_) + 2.0);
            case IntegrandKind::K6: {
                // height of the last point over the leading n+1 points via the
                // normalized-volume quotient
                const double base_gram = facet_gram(dist2, arity, arity - 1);
                if (!(base_gram > 0.0)) return 0.0;
                const double h = vol_parallelotope / std::sqrt(base_gram);
                double prod = 1.0;
                for (int a = 0; a + 1 < arity; ++a) prod *= std::sqrt(dist2[arity - 1][a]);
                return h / prod;
            }
        }
        return 0.0;
    }

private:
    // determinant of an m x m buffer by gaussian elimination with partial
    // pivoting (m <= 7)
    static double det(double a[kMaxArity][kMaxArity], int m) {
        double sign = 1.0;
        for (int col = 0; col < m; ++col) {
            int pivot = col;
            for (int r = col + 1; r < m; ++r)
                if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
            if (a[pivot][col] == 0.0) return 0.0;
            if (pivot != col) {
                for (int c = 0; c < m; ++c) std::swap(a[pivot][c], a[col][c]);
                sign = -sign;
            }
            for (int r = col + 1; r < m; ++r) {
                const double f = a[r][col] / a[col][col];
                for (int c = col; c < m; ++c) a[r][c] -= f * a[col][c];
            }
        }
        double out = sign;
        for (int i = 0; i < m; ++i) out *= a[i][i];
        return out;
    }

    // Gram determinant of the facet omitting vertex `drop`.
    static double facet_gram(const double dist2[kMaxArity][kMaxArity], int arity, int drop) {
        int keep[kMaxArity];
        int count = 0;
        for (int a = 0; a < arity; ++a)
            if (a != drop) keep[count++] = a;
        const int base = keep[0];
        double gram[kMaxArity][kMaxArity];
        for (int a = 1; a < count; ++a)
            for (int b = a; b < count; ++b) {
                const double dot = 0.5 * (dist2[base][keep[a]] + dist2[base][keep[b]] -
                                          dist2[keep[a]][keep[b]]);
                gram[a - 1][b - 1] = dot;
                gram[b - 1][a - 1] = dot;
            }
        return det(gram, count - 1);
    }

    static double facet_volume(const double dist2[kMaxArity][kMaxArity], int arity, int drop) {
        const double g = facet_gram(dist2, arity, drop);
        return g > 0.0 ? std::sqrt(g) : 0.0;
    }

    IntegrandKind kind_;
    int n_;
    int dim_;
    double p_;
    double fact_n_ = 1.0;
    double fact_n1_ = 1.0;
};

}  // namespace mengerlab
