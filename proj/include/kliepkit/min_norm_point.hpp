#pragma once

// Wolfe's min-norm-point algorithm over the convex hull of a finite point
// set: given rows y_j of Y and a target p, find the Euclidean projection of
// p onto conv{y_j}.  Works on the shifted points z_j = y_j - p, maintaining
// a corral S whose affine min-norm point has strictly positive weights; each
// major iteration adds the vertex most aligned with -x and minor iterations
// restore feasibility by line search toward the affine minimizer, dropping
// vertices that hit zero.  Terminates finitely (corral sets never repeat in
// exact arithmetic); in floating point the stop test allows roundoff slack.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "kliepkit/errors.hpp"

namespace kliepkit {

struct MinNormPoint {
    Eigen::VectorXd weights;  // simplex weights over all n points
    Eigen::VectorXd point;    // projection of p onto the hull
    double distance = 0.0;    // |p - point|_2
    int iterations = 0;
};

inline MinNormPoint min_norm_point(const Eigen::MatrixXd& Y, const Eigen::VectorXd& p,
                                   double tol = 1e-12, int max_iters = 0) {
    const int n = static_cast<int>(Y.rows());
    const int k = static_cast<int>(Y.cols());
    if (n == 0) throw EmptySampleError("min_norm_point: no points");
    if (p.size() != k) throw DimensionError("min_norm_point: target has wrong length");
    if (max_iters <= 0) max_iters = 100 * n;

    Eigen::MatrixXd Z = Y.rowwise() - p.transpose();
    const double scale = 1.0 + Z.rowwise().squaredNorm().maxCoeff();

    // Start from the single closest point.
    int j0 = 0;
    Z.rowwise().squaredNorm().minCoeff(&j0);
    std::vector<int> S{j0};
    Eigen::VectorXd alpha_S = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd x = Z.row(j0).transpose();

    int iters = 0;
    while (iters++ < max_iters) {
        // Vertex most opposed to the current point.
        Eigen::VectorXd dots = Z * x;
        int jstar = 0;
        const double dmin = dots.minCoeff(&jstar);
        if (dmin >= x.squaredNorm() - 1e-12 * scale) break;  // optimal within roundoff

        bool in_S = false;
        for (int j : S)
            if (j == jstar) { in_S = true; break; }
        if (in_S) break;  // no progress possible
        S.push_back(jstar);
        alpha_S.conservativeResize(S.size());
        alpha_S[S.size() - 1] = 0.0;

        // Minor cycle: affine min-norm point over S, stepping back to the
        // boundary and dropping vertices whenever weights go negative.
        while (true) {
            const int s = static_cast<int>(S.size());
            Eigen::MatrixXd K(s + 1, s + 1);
            for (int a = 0; a < s; ++a)
                for (int b = a; b < s; ++b) K(a, b) = K(b, a) = Z.row(S[a]).dot(Z.row(S[b]));
            K.block(s, 0, 1, s).setOnes();
            K.block(0, s, s, 1).setOnes();
            K(s, s) = 0.0;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
            rhs[s] = 1.0;
            Eigen::VectorXd beta = Eigen::FullPivLU<Eigen::MatrixXd>(K).solve(rhs).head(s);

            if (beta.minCoeff() > -1e-12) {
                alpha_S = beta.cwiseMax(0.0);
                alpha_S /= alpha_S.sum();
                break;
            }
            double theta = 1.0;
            for (int a = 0; a < s; ++a)
                if (beta[a] < 0.0) theta = std::min(theta, alpha_S[a] / (alpha_S[a] - beta[a]));
            alpha_S = alpha_S + theta * (beta - alpha_S);
            std::vector<int> keep;
            for (int a = 0; a < s; ++a)
                if (alpha_S[a] > 1e-12) keep.push_back(a);
            if (keep.empty()) keep.push_back(0);  // roundoff guard
            Eigen::VectorXd na(keep.size());
            std::vector<int> nS(keep.size());
            for (size_t a = 0; a < keep.size(); ++a) {
                na[a] = alpha_S[keep[a]];
                nS[a] = S[keep[a]];
            }
            S = std::move(nS);
            alpha_S = na / na.sum();
        }

        x.setZero();
        for (size_t a = 0; a < S.size(); ++a) x += alpha_S[a] * Z.row(S[a]).transpose();
    }
    if (iters > max_iters)
        throw SolverError("min_norm_point: iteration cap exceeded",
                          "cap=" + std::to_string(max_iters));

    MinNormPoint out;
    out.weights = Eigen::VectorXd::Zero(n);
    for (size_t a = 0; a < S.size(); ++a) out.weights[S[a]] += alpha_S[a];
    out.point = Y.transpose() * out.weights;
    out.distance = (p - out.point).norm();
    out.iterations = iters;
    return out;
}

}  // namespace kliepkit
