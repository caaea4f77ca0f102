#include "mengerlab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mengerlab {

namespace {
constexpr double kOrthonormalTol = 1e-10;
}

double unit_ball_volume(int n) {
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

AffineSubspace::AffineSubspace(Vector base, Matrix basis)
    : base_(std::move(base)), basis_(std::move(basis)) {
    const int n = static_cast<int>(base_.size());
    if (n < 1) throw DegenerateInput("AffineSubspace: empty base point");
    if (basis_.size() > 0 && basis_.rows() != n)
        throw DimMismatch("AffineSubspace: basis rows != ambient dimension");
    if (basis_.size() == 0) basis_ = Matrix(n, 0);
    const Matrix gram = basis_.transpose() * basis_;
    const Matrix err = gram - Matrix::Identity(basis_.cols(), basis_.cols());
    if (basis_.cols() > 0 && err.cwiseAbs().maxCoeff() > kOrthonormalTol)
        throw DegenerateInput("AffineSubspace: basis not orthonormal");
}

AffineSubspace AffineSubspace::point(Vector base) {
    const int n = static_cast<int>(base.size());
    return AffineSubspace(std::move(base), Matrix(n, 0));
}

AffineSubspace AffineSubspace::through_origin(Matrix basis) {
    Vector zero = Vector::Zero(basis.rows());
    return AffineSubspace(std::move(zero), std::move(basis));
}

AffineSubspace AffineSubspace::axis_aligned(const Vector& base, int m) {
    const int n = static_cast<int>(base.size());
    Matrix basis = Matrix::Zero(n, m);
    for (int i = 0; i < m; ++i) basis(i, i) = 1.0;
    return AffineSubspace(base, std::move(basis));
}

AffineSubspace AffineSubspace::parallel_through_origin() const {
    return AffineSubspace(Vector::Zero(ambient_dim()), basis_);
}

Matrix AffineSubspace::orthogonal_complement() const {
    const int n = ambient_dim();
    const int m = dim();
    if (m == 0) return Matrix::Identity(n, n);
    // Full QR of the basis; trailing columns of Q span the complement.
    Eigen::HouseholderQR<Matrix> qr(basis_);
    Matrix q = qr.householderQ();
    return q.rightCols(n - m);
}

Vector project(const AffineSubspace& p, const Vector& x) {
    if (x.size() != p.ambient_dim()) throw DimMismatch("project: dimension mismatch");
    if (p.dim() == 0) return p.base();
    const Vector rel = x - p.base();
    return p.base() + p.basis() * (p.basis().transpose() * rel);
}

double dist_to_subspace(const Vector& x, const AffineSubspace& p) {
    return (x - project(p, x)).norm();
}

double default_rank_tol(const std::vector<Vector>& points) {
    double scale = 0.0;
    for (const auto& pt : points) scale = std::max(scale, pt.norm());
    return 1e-8 * std::max(scale, 1.0);
}

AffineSubspace affine_hull(const std::vector<Vector>& points, double rank_tol) {
    if (points.empty()) throw DegenerateInput("affine_hull: no points");
    if (rank_tol <= 0.0) rank_tol = default_rank_tol(points);
    const int n = static_cast<int>(points.front().size());
    const int m = static_cast<int>(points.size());
    Vector mean = Vector::Zero(n);
    for (const auto& pt : points) mean += pt;
    mean /= static_cast<double>(m);
    Matrix centered(n, m);
    for (int j = 0; j < m; ++j) centered.col(j) = points[j] - mean;
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > rank_tol) ++rank;
    rank = std::min(rank, n);
    return AffineSubspace(mean, svd.matrixU().leftCols(rank));
}

GramSchmidtResult gram_schmidt_tracked(const std::vector<Vector>& vectors) {
    if (vectors.empty()) throw DegenerateInput("gram_schmidt_tracked: no vectors");
    double scale = 0.0;
    for (const auto& v : vectors) scale = std::max(scale, v.norm());
    const double tol = 1e-10 * std::max(scale, 1.0);

    GramSchmidtResult out;
    const int count = static_cast<int>(vectors.size());
    for (int l = 0; l < count; ++l) {
        Vector residual = vectors[l];
        std::vector<double> dots(l);
        for (int i = 0; i < l; ++i) {
            dots[i] = vectors[l].dot(out.basis[i]);
            residual -= dots[i] * out.basis[i];
        }
        const double len = residual.norm();
        if (len <= tol)
            throw DegenerateInput("gram_schmidt_tracked: numerically dependent input");
        const double gll = 1.0 / len;
        std::vector<double> row(l + 1, 0.0);
        row[l] = gll;
        for (int r = 0; r < l; ++r) {
            double acc = 0.0;
            for (int i = r; i < l; ++i) acc -= gll * dots[i] * out.coeffs[i][r];
            row[r] = acc;
        }
        out.basis.push_back(residual / len);
        out.coeffs.push_back(std::move(row));
    }
    return out;
}

double angle(const AffineSubspace& p1, const AffineSubspace& p2) {
    if (p1.dim() != p2.dim()) throw DimMismatch("angle: subspace dimensions differ");
    if (p1.ambient_dim() != p2.ambient_dim()) throw DimMismatch("angle: ambient dimensions differ");
    const Matrix proj1 = p1.basis() * p1.basis().transpose();
    const Matrix proj2 = p2.basis() * p2.basis().transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(proj1 - proj2, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

AffineMap::AffineMap(AffineSubspace domain, Matrix normal_basis, Matrix linear, Vector offset)
    : domain_(std::move(domain)),
      normal_basis_(std::move(normal_basis)),
      linear_(std::move(linear)),
      offset_(std::move(offset)) {}

Vector AffineMap::value_at(const Vector& g) const {
    const Vector u = domain_.basis().transpose() * (g - domain_.base());
    return value_at_coords(u);
}

Vector AffineMap::value_at_coords(const Vector& u) const {
    return normal_basis_ * (linear_ * u + offset_);
}

Vector AffineMap::graph_point(const Vector& g) const { return g + value_at(g); }

double AffineMap::lipschitz() const {
    if (linear_.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(linear_);
    return svd.singularValues()(0);
}

AffineMap plane_as_graph(const AffineSubspace& p, const AffineSubspace& g) {
    if (p.dim() != g.dim()) throw DimMismatch("plane_as_graph: dimensions differ");
    const double ang = angle(p, g);
    if (ang >= 1.0 - 1e-9) throw TooSteep("plane_as_graph: angle(P,G) too close to 1");

    const Matrix bg = g.basis();               // N x m
    const Matrix bp = g.orthogonal_complement();  // N x (N-m)
    const Matrix bq = p.basis();               // N x m
    const Vector q = p.base();

    // x = q + Bq w on P; its G-coordinates are u = Bg^T(x - g0). The map
    // u -> complement coordinates is affine with matrix L = (Bp^T Bq) M^-1.
    const Matrix m_block = bg.transpose() * bq;  // m x m, invertible when angle < 1
    const Matrix m_inv = m_block.inverse();
    const Matrix linear = (bp.transpose() * bq) * m_inv;
    const Vector q_rel = q - g.base();
    const Vector offset = bp.transpose() * q_rel - linear * (bg.transpose() * q_rel);
    return AffineMap(g, bp, linear, offset);
}

}  // namespace mengerlab
