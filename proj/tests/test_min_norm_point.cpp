#include <gtest/gtest.h>

#include "kliepkit/min_norm_point.hpp"
#include "test_util.hpp"

using namespace kliepkit;

TEST(MinNormPoint, ProjectionOntoSegment) {
    Eigen::MatrixXd Y(2, 2);
    Y << 0, 0, 2, 0;
    Eigen::VectorXd p(2);
    p << 1, 1;  // projects to (1, 0)
    auto r = min_norm_point(Y, p);
    EXPECT_NEAR(r.distance, 1.0, 1e-12);
    EXPECT_NEAR(r.point[0], 1.0, 1e-12);
    EXPECT_NEAR(r.point[1], 0.0, 1e-12);
    EXPECT_NEAR(r.weights.sum(), 1.0, 1e-12);
    EXPECT_TRUE((Y.transpose() * r.weights).isApprox(r.point, 1e-12));
}

TEST(MinNormPoint, VertexAndInteriorCases) {
    Eigen::MatrixXd Y(3, 2);
    Y << 0, 0, 1, 0, 0, 1;
    Eigen::VectorXd p(2);
    p << -1, -1;  // nearest vertex (0,0)
    auto r = min_norm_point(Y, p);
    EXPECT_NEAR(r.distance, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.weights[0], 1.0, 1e-12);

    p << 0.2, 0.3;  // interior point: distance 0, exact representation
    r = min_norm_point(Y, p);
    EXPECT_LE(r.distance, 1e-10);
    EXPECT_NEAR(r.weights.sum(), 1.0, 1e-12);
    EXPECT_GE(r.weights.minCoeff(), -1e-15);
}

TEST(MinNormPoint, DuplicatePointsHarmless) {
    Eigen::MatrixXd Y(4, 2);
    Y << 1, 0, 1, 0, 0, 1, 1, 0;
    Eigen::VectorXd p(2);
    p << 2, 2;
    auto r = min_norm_point(Y, p);
    // nearest point of the segment (1,0)-(0,1) to (2,2) is (0.5, 0.5)
    EXPECT_NEAR(r.distance, (Eigen::Vector2d(1.5, 1.5)).norm(), 1e-10);
}

// Agreement with a dense grid over the hull on random 2-D instances.
TEST(MinNormPoint, MatchesGridSearch) {
    RngStream rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 3 + static_cast<int>(rng.uniform_int(5));
        Eigen::MatrixXd Y = testutil::random_matrix(rng, n, 2);
        Eigen::VectorXd p = testutil::random_vector(rng, 2, 2.0);
        auto r = min_norm_point(Y, p);
        // grid over weights of random triples covers the hull densely enough
        double grid_best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int steps = 0; steps <= 60; ++steps)
                    for (int steps2 = 0; steps2 + steps <= 60; ++steps2) {
                        const double wa = steps / 60.0, wb = steps2 / 60.0;
                        for (int c = 0; c < n; ++c) {
                            Eigen::VectorXd pt = wa * Y.row(a).transpose() +
                                                 wb * Y.row(b).transpose() +
                                                 (1 - wa - wb) * Y.row(c).transpose();
                            grid_best = std::min(grid_best, (pt - p).norm());
                        }
                    }
        EXPECT_LE(r.distance, grid_best + 1e-9);
        EXPECT_GE(r.distance, grid_best - 0.05);  // grid resolution slack
        EXPECT_NEAR((Y.transpose() * r.weights - r.point).norm(), 0.0, 1e-12);
    }
}

TEST(MinNormPoint, InputValidation) {
    Eigen::MatrixXd Y(0, 2);
    Eigen::VectorXd p(2);
    p.setZero();
    EXPECT_THROW(min_norm_point(Y, p), EmptySampleError);
    Eigen::MatrixXd Y2(2, 2);
    Y2.setZero();
    Eigen::VectorXd bad(3);
    bad.setZero();
    EXPECT_THROW(min_norm_point(Y2, bad), DimensionError);
}
