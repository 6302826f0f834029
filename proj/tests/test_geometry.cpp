#include <gtest/gtest.h>

#include "kliepkit/geometry.hpp"
#include "test_util.hpp"

using namespace kliepkit;
using Kind = HullClassification::Kind;

namespace {

SufficientSummary square_hull(double px, double py) {
    Eigen::VectorXd tbar(2);
    tbar << px, py;
    Eigen::MatrixXd ty(4, 2);
    ty << 0, 0, 1, 0, 0, 1, 1, 1;
    return make_summary(tbar, ty);
}

}  // namespace

TEST(ClassifyHull, ToyTrichotomy) {
    auto inside = classify_hull(testutil::toy_summary(1.0));
    EXPECT_EQ(inside.kind, Kind::RelInterior);
    EXPECT_GT(inside.lp_value, 1e-8);
    ASSERT_EQ(inside.weights.size(), 4);
    EXPECT_NEAR(inside.weights.sum(), 1.0, 1e-12);
    EXPECT_GT(inside.weights.minCoeff(), 0.0);
    Eigen::MatrixXd ty(4, 1);
    ty << -1, 0, 1, 2;
    EXPECT_NEAR((ty.transpose() * inside.weights)(0), 1.0, 1e-9);

    auto boundary = classify_hull(testutil::toy_summary(2.0));
    EXPECT_EQ(boundary.kind, Kind::RelBoundary);
    EXPECT_LE(std::abs(boundary.lp_value), 1e-8);

    auto outside = classify_hull(testutil::toy_summary(3.0));
    EXPECT_EQ(outside.kind, Kind::Outside);
    // max-min weight over affine representations of 3: beta = (0,0,0,5/3)
    // with s = -1/6 (6s <= -1 binds against the vertex at 2)
    EXPECT_NEAR(outside.lp_value, -1.0 / 6.0, 1e-9);
    ASSERT_EQ(outside.separator.size(), 1);
    EXPECT_GT(outside.separator[0], 0.0);  // escape direction points past the vertex 2
    EXPECT_NEAR(outside.margin, 1.0, 1e-9);
}

TEST(LambdaSharp, ToyValues) {
    for (auto norm : {DualNorm::Linf, DualNorm::L2}) {
        auto r = lambda_sharp(testutil::toy_summary(3.0), norm);
        EXPECT_NEAR(r.value, 1.0, 1e-9);
        ASSERT_EQ(r.nearest_point.size(), 1);
        EXPECT_NEAR(r.nearest_point[0], 2.0, 1e-9);
        EXPECT_NEAR(r.hull_weights.sum(), 1.0, 1e-12);
        EXPECT_NEAR(r.hull_weights[3], 1.0, 1e-9);
        EXPECT_EQ(r.dual_norm, norm);

        EXPECT_LE(lambda_sharp(testutil::toy_summary(1.0), norm).value, 1e-8);
        EXPECT_LE(lambda_sharp(testutil::toy_summary(2.0), norm).value, 1e-8);
    }
}

// The stored value must be the distance to the stored nearest point in the
// stored norm, computed from the stored weights, bit-for-bit.
TEST(LambdaSharp, InternalConsistency) {
    RngStream rng(2024);
    for (int rep = 0; rep < 40; ++rep) {
        const int k = 1 + static_cast<int>(rng.uniform_int(3));
        const int n = 2 + static_cast<int>(rng.uniform_int(10));
        auto s = testutil::random_summary(rng, n, k, 1.5);
        for (auto norm : {DualNorm::Linf, DualNorm::L2}) {
            auto r = lambda_sharp(s, norm);
            Eigen::VectorXd recon = s.ty.transpose() * r.hull_weights;
            EXPECT_EQ((recon - r.nearest_point).norm(), 0.0);
            Eigen::VectorXd diff = s.tbar_x - r.nearest_point;
            const double dist =
                norm == DualNorm::Linf ? diff.lpNorm<Eigen::Infinity>() : diff.norm();
            EXPECT_EQ(r.value, dist);
            EXPECT_GE(r.hull_weights.minCoeff(), 0.0);
            EXPECT_NEAR(r.hull_weights.sum(), 1.0, 1e-12);
        }
    }
}

TEST(LambdaSharp, UnitSquareExamples) {
    // Linf distance from (2, 0.5): every (1, b), b in [0,1], attains 1.
    auto r = lambda_sharp(square_hull(2.0, 0.5), DualNorm::Linf);
    EXPECT_NEAR(r.value, 1.0, 1e-9);
    EXPECT_NEAR(r.nearest_point[0], 1.0, 1e-9);
    EXPECT_GE(r.nearest_point[1], -1e-9);
    EXPECT_LE(r.nearest_point[1], 1.0 + 1e-9);

    // Euclidean projection is unique: (1, 0.5).
    auto r2 = lambda_sharp(square_hull(2.0, 0.5), DualNorm::L2);
    EXPECT_NEAR(r2.value, 1.0, 1e-9);
    EXPECT_NEAR(r2.nearest_point[0], 1.0, 1e-9);
    EXPECT_NEAR(r2.nearest_point[1], 0.5, 1e-9);

    auto cls = classify_hull(square_hull(2.0, 0.0));
    EXPECT_EQ(cls.kind, Kind::Outside);
    ASSERT_EQ(cls.separator.size(), 2);
    EXPECT_NEAR(cls.separator[0], 1.0, 1e-8);
    EXPECT_NEAR(std::abs(cls.separator[1]), 0.0, 1e-8);
    EXPECT_NEAR(cls.margin, 1.0, 1e-8);
}

TEST(ClassifyHull, BoundaryAndInterior2d) {
    auto mid = classify_hull(square_hull(0.5, 0.0));  // bottom edge midpoint
    EXPECT_EQ(mid.kind, Kind::RelBoundary);
    EXPECT_LE(std::abs(mid.lp_value), 1e-8);
    auto center = classify_hull(square_hull(0.5, 0.5));
    EXPECT_EQ(center.kind, Kind::RelInterior);
    EXPECT_NEAR(center.lp_value, 0.25, 1e-8);  // uniform weights are optimal
}

TEST(ClassifyHull, SinglePointHull) {
    Eigen::VectorXd tbar(2);
    tbar << 3, -1;
    Eigen::MatrixXd ty(1, 2);
    ty << 3, -1;
    EXPECT_EQ(classify_hull(make_summary(tbar, ty)).kind, Kind::RelInterior);
    ty << 3, -2;
    auto s = make_summary(tbar, ty);
    EXPECT_EQ(classify_hull(s).kind, Kind::Outside);
    EXPECT_NEAR(lambda_sharp(s, DualNorm::L2).value, 1.0, 1e-9);
}

TEST(LambdaSharp, TranslationAndScaleBehavior) {
    RngStream rng(55);
    auto s = testutil::random_summary(rng, 8, 2, 2.0);
    Eigen::VectorXd shift = testutil::random_vector(rng, 2, 5.0);
    auto shifted = make_summary(s.tbar_x + shift, s.ty.rowwise() + shift.transpose());
    const double c = 3.5;
    auto scaled = make_summary(c * s.tbar_x, c * s.ty);
    for (auto norm : {DualNorm::Linf, DualNorm::L2}) {
        const double base = lambda_sharp(s, norm).value;
        EXPECT_NEAR(lambda_sharp(shifted, norm).value, base, 1e-9 * (1 + base));
        EXPECT_NEAR(lambda_sharp(scaled, norm).value, c * base, 1e-9 * (1 + c * base));
    }
    EXPECT_EQ(classify_hull(s).kind, classify_hull(shifted).kind);
    EXPECT_EQ(classify_hull(s).kind, classify_hull(scaled).kind);
}

// Exhaustive-oracle agreement on random 2-D instances (the acceptance gate
// runs a larger sweep; this is the fast regression version).
TEST(Geometry, Random2dAgainstOracles) {
    RngStream rng(99);
    int outside_seen = 0, inside_seen = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 3 + static_cast<int>(rng.uniform_int(10));
        auto s = testutil::random_summary(rng, n, 2, 1.2);
        const auto cls = classify_hull(s);
        const bool contains = testutil::hull_contains_2d(s.ty, s.tbar_x, 1e-9);
        EXPECT_EQ(cls.kind != Kind::Outside, contains) << "rep " << rep;
        (cls.kind == Kind::Outside ? outside_seen : inside_seen)++;
        for (auto norm : {DualNorm::Linf, DualNorm::L2}) {
            const double exact = lambda_sharp(s, norm).value;
            const double grid = minimax_bruteforce(s, norm, 2000);
            // kinked minimizers limit a 2000-point grid to ~|u| * pi/2000
            EXPECT_NEAR(exact, grid, 2e-2) << "rep " << rep;
            // the grid only sees a subset of directions, so it lower-bounds
            EXPECT_GE(exact, grid - 1e-9) << "rep " << rep;
        }
    }
    EXPECT_GT(outside_seen, 5);
    EXPECT_GT(inside_seen, 5);
}

// Interior classification implies every direction increases toward some
// hull point: min over the unit circle of max_j d.u_j stays positive.
TEST(Geometry, InteriorHasNoEscapeDirection) {
    RngStream rng(11);
    int checked = 0;
    while (checked < 8) {
        auto s = testutil::random_summary(rng, 12, 2, 0.3);
        if (classify_hull(s).kind != Kind::RelInterior) continue;
        ++checked;
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 720; ++i) {
            const double th = 2 * M_PI * i / 720;
            Eigen::VectorXd d(2);
            d << std::cos(th), std::sin(th);
            worst = std::min(worst, (s.u * d).maxCoeff());
        }
        EXPECT_GT(worst, 0.0);
    }
}

// k above the direct-solve threshold exercises constraint generation; the
// result must stay consistent with the Euclidean distance from both sides.
TEST(LambdaSharp, ConstraintGenerationConsistent) {
    RngStream rng(1337);
    for (int rep = 0; rep < 10; ++rep) {
        const int k = 30, n = 10;
        auto s = testutil::random_summary(rng, n, k, 1.0);
        auto linf = lambda_sharp(s, DualNorm::Linf);
        auto l2 = lambda_sharp(s, DualNorm::L2);
        EXPECT_LE(linf.value, l2.value + 1e-9);
        EXPECT_LE(l2.value, std::sqrt(double(k)) * linf.value + 1e-9);
        Eigen::VectorXd diff = s.tbar_x - linf.nearest_point;
        EXPECT_EQ(linf.value, diff.lpNorm<Eigen::Infinity>());

        auto sep = separating_direction(s, DualNorm::Linf);
        ASSERT_TRUE(sep.has_value());
        EXPECT_NEAR(sep->direction.lpNorm<1>(), 1.0, 1e-9);
        // the optimal dual direction's margin equals the distance
        EXPECT_NEAR(sep->margin, linf.value, 1e-7 * (1 + linf.value));
    }
}

// An interior target in high dimension: generation must settle at zero.
TEST(LambdaSharp, ConstraintGenerationInsideCase) {
    RngStream rng(4242);
    const int k = 30, n = 40;
    Eigen::MatrixXd ty = testutil::random_matrix(rng, n, k);
    Eigen::VectorXd tbar = ty.colwise().mean();
    auto s = make_summary(tbar, ty);
    EXPECT_LE(lambda_sharp(s, DualNorm::Linf).value, 1e-8);
    EXPECT_LE(lambda_sharp(s, DualNorm::L2).value, 1e-8);
    EXPECT_EQ(classify_hull(s).kind, Kind::RelInterior);
    EXPECT_FALSE(separating_direction(s, DualNorm::Linf).has_value());
}

// Many more statistic coordinates than points: the affine-hull prefilter
// must classify Outside with a valid margin without running the LP.
TEST(ClassifyHull, AffinePrefilterPath) {
    RngStream rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        auto s = testutil::random_summary(rng, 4, 12, 1.0);
        auto cls = classify_hull(s);
        EXPECT_EQ(cls.kind, Kind::Outside);
        ASSERT_EQ(cls.separator.size(), 12);
        EXPECT_GT(cls.margin, 0.0);
        // margin really is the worst-case separation over hull points
        EXPECT_NEAR(cls.margin, -(s.u * cls.separator).maxCoeff(), 1e-12);
    }
}

TEST(SeparatingDirection, MatchesClassification) {
    RngStream rng(60);
    for (int rep = 0; rep < 30; ++rep) {
        auto s = testutil::random_summary(rng, 8, 2, 1.2);
        const bool outside = classify_hull(s).kind == Kind::Outside;
        for (auto norm : {DualNorm::Linf, DualNorm::L2}) {
            auto sep = separating_direction(s, norm);
            EXPECT_EQ(sep.has_value(), outside);
            if (sep) {
                EXPECT_GT(sep->margin, 0.0);
                const double len = norm == DualNorm::Linf ? sep->direction.lpNorm<1>()
                                                          : sep->direction.norm();
                EXPECT_NEAR(len, 1.0, 1e-9);
            }
        }
    }
}

TEST(MinimaxBruteforce, ValidatesInput) {
    auto s = testutil::toy_summary(3.0);
    EXPECT_NEAR(minimax_bruteforce(s, DualNorm::Linf, 100), 1.0, 1e-12);
    EXPECT_NEAR(minimax_bruteforce(s, DualNorm::L2, 100), 1.0, 1e-12);
    EXPECT_EQ(minimax_bruteforce(testutil::toy_summary(1.0), DualNorm::Linf, 100), 0.0);
    EXPECT_THROW(minimax_bruteforce(s, DualNorm::Linf, 50), std::invalid_argument);
    RngStream rng(3);
    auto s4 = testutil::random_summary(rng, 5, 4);
    EXPECT_THROW(minimax_bruteforce(s4, DualNorm::Linf, 200), UnsupportedDimensionError);
}

TEST(ClassifyHull, RejectsBadTolerance) {
    EXPECT_THROW(classify_hull(testutil::toy_summary(1.0), 0.0), std::invalid_argument);
    EXPECT_THROW(classify_hull(testutil::toy_summary(1.0), -1.0), std::invalid_argument);
}
