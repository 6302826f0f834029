#pragma once

// Shared helpers for the test suite: the one-dimensional toy instance used
// throughout (denominator statistics {-1, 0, 1, 2}), and random summary
// generators driven by the library's own deterministic streams.

#include <Eigen/Dense>
#include <vector>

#include "kliepkit/rng.hpp"
#include "kliepkit/statmodel.hpp"

namespace testutil {

// Toy hull {-1, 0, 1, 2} with a configurable numerator mean.
inline kliepkit::SufficientSummary toy_summary(double tbar) {
    Eigen::VectorXd t(1);
    t << tbar;
    Eigen::MatrixXd ty(4, 1);
    ty << -1, 0, 1, 2;
    return kliepkit::make_summary(t, ty);
}

inline Eigen::MatrixXd random_matrix(kliepkit::RngStream& rng, int rows, int cols,
                                     double scale = 1.0) {
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = scale * rng.normal();
    return M;
}

inline Eigen::VectorXd random_vector(kliepkit::RngStream& rng, int n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * rng.normal();
    return v;
}

inline kliepkit::SufficientSummary random_summary(kliepkit::RngStream& rng, int n_y, int k,
                                                  double tbar_scale = 1.0) {
    return kliepkit::make_summary(random_vector(rng, k, tbar_scale),
                                  random_matrix(rng, n_y, k));
}

// Exact membership test for 2-D hulls: tbar is in the hull iff some triangle
// of hull points contains it (Caratheodory), decided by barycentric solves.
// interior_margin receives the best min-barycentric-coordinate over all
// triangles containing the point (positive => relative interior for
// full-dimensional hulls).
inline bool hull_contains_2d(const Eigen::MatrixXd& ty, const Eigen::VectorXd& p, double tol,
                             double* interior_margin = nullptr) {
    const int n = static_cast<int>(ty.rows());
    bool inside = false;
    double best = -1e300;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) {
                Eigen::Matrix3d A;
                A << ty(a, 0), ty(b, 0), ty(c, 0), ty(a, 1), ty(b, 1), ty(c, 1), 1, 1, 1;
                if (std::abs(A.determinant()) < 1e-12) continue;  // degenerate triangle
                Eigen::Vector3d rhs(p[0], p[1], 1.0);
                Eigen::Vector3d w = A.fullPivLu().solve(rhs);
                const double wm = w.minCoeff();
                best = std::max(best, wm);
                if (wm >= -tol) inside = true;
            }
    // Fall back to segments / points for rank-deficient clouds.
    if (!inside) {
        for (int a = 0; a < n && !inside; ++a)
            for (int b = a + 1; b < n && !inside; ++b) {
                Eigen::Vector2d u = ty.row(b) - ty.row(a);
                const double uu = u.squaredNorm();
                if (uu < 1e-24) continue;
                const double t = (p.head(2) - ty.row(a).transpose()).dot(u) / uu;
                if (t < -tol || t > 1 + tol) continue;
                Eigen::Vector2d proj = ty.row(a).transpose() + t * u;
                if ((proj - p.head(2)).norm() <= tol) inside = true;
            }
        for (int a = 0; a < n && !inside; ++a)
            if ((ty.row(a).transpose() - p).norm() <= tol) inside = true;
    }
    if (interior_margin) *interior_margin = best;
    return inside;
}

}  // namespace testutil
