#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "kliepkit/simgen.hpp"

using namespace kliepkit;

TEST(BuildGraph, LatticeShape) {
    for (int s : {2, 3, 4, 7}) {
        auto edges = build_graph(GraphSpec::lattice(s));
        EXPECT_EQ(static_cast<int>(edges.size()), 2 * s * (s - 1));
        std::set<std::pair<int, int>> uniq(edges.begin(), edges.end());
        EXPECT_EQ(uniq.size(), edges.size());
        for (auto [u, v] : edges) {
            ASSERT_LT(u, v);
            ASSERT_GE(u, 0);
            ASSERT_LT(v, s * s);
            // 4-neighbor adjacency: partners differ by one column or one row
            EXPECT_TRUE(v - u == 1 || v - u == s);
        }
        EXPECT_TRUE(std::is_sorted(edges.begin(), edges.end()));
    }
    // spot-check the 2x2 square
    auto sq = build_graph(GraphSpec::lattice(2));
    std::vector<std::pair<int, int>> expect = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    EXPECT_EQ(sq, expect);
}

TEST(BuildGraph, ErdosRenyiDeterministicPerSeed) {
    auto spec = GraphSpec::erdos_renyi(30, 0.2, 77);
    auto a = build_graph(spec);
    auto b = build_graph(spec);
    EXPECT_EQ(a, b);
    auto c = build_graph(GraphSpec::erdos_renyi(30, 0.2, 78));
    EXPECT_NE(a, c);
    // 435 candidate pairs at p = 0.2: the count should land near 87
    EXPECT_GT(a.size(), 40u);
    EXPECT_LT(a.size(), 140u);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
}

TEST(BuildGraph, Validation) {
    EXPECT_THROW(GraphSpec::lattice(1), std::invalid_argument);
    EXPECT_THROW(GraphSpec::erdos_renyi(1, 0.5, 0), std::invalid_argument);
    EXPECT_THROW(GraphSpec::erdos_renyi(5, 0.0, 0), std::invalid_argument);
    EXPECT_THROW(GraphSpec::erdos_renyi(5, 1.0, 0), std::invalid_argument);
}

TEST(BuildPrecisionPair, LatticeEntries) {
    auto edges = build_graph(GraphSpec::lattice(4));
    RngStream rng(11);
    auto pair = build_precision_pair(16, edges, 3, 2.0, 0.4, -0.4, PdPolicy::Strict, rng);

    ASSERT_EQ(pair.theta_q.rows(), 16);
    EXPECT_EQ(static_cast<int>(pair.changed_edges.size()), 3);
    EXPECT_DOUBLE_EQ(pair.pd_shift, 0.0);
    std::set<std::pair<int, int>> edge_set(edges.begin(), edges.end());
    std::set<std::pair<int, int>> changed(pair.changed_edges.begin(), pair.changed_edges.end());
    ASSERT_EQ(changed.size(), 3u);
    for (auto e : changed) EXPECT_TRUE(edge_set.count(e));
    EXPECT_TRUE(std::is_sorted(pair.changed_edges.begin(), pair.changed_edges.end()));

    for (int u = 0; u < 16; ++u)
        for (int v = 0; v < 16; ++v) {
            const bool edge = edge_set.count({std::min(u, v), std::max(u, v)}) > 0;
            const bool flip = changed.count({std::min(u, v), std::max(u, v)}) > 0;
            double want_q = (u == v) ? 2.0 : (edge ? 0.2 : 0.0);  // half of theta1
            double want_p = flip ? -0.2 : want_q;
            EXPECT_DOUBLE_EQ(pair.theta_q(u, v), want_q);
            EXPECT_DOUBLE_EQ(pair.theta_p(u, v), want_p);
        }
}

TEST(BuildPrecisionPair, FullModeAndZeroChanges) {
    auto edges = build_graph(GraphSpec::lattice(3));
    RngStream rng(5);
    auto pair = build_precision_pair(9, edges, 0, 2.0, 0.3, -0.9, PdPolicy::Strict, rng,
                                     EdgeCoeffMode::Full);
    EXPECT_TRUE(pair.changed_edges.empty());
    EXPECT_EQ(pair.theta_p, pair.theta_q);
    EXPECT_DOUBLE_EQ(pair.theta_q(0, 1), 0.3);  // Full writes theta1 unhalved
}

TEST(BuildPrecisionPair, ChangedEdgePickIsSeedDeterministic) {
    auto edges = build_graph(GraphSpec::lattice(5));
    RngStream a(123), b(123), c(124);
    auto pa = build_precision_pair(25, edges, 6, 2.0, 0.4, -0.4, PdPolicy::Strict, a);
    auto pb = build_precision_pair(25, edges, 6, 2.0, 0.4, -0.4, PdPolicy::Strict, b);
    auto pc = build_precision_pair(25, edges, 6, 2.0, 0.4, -0.4, PdPolicy::Strict, c);
    EXPECT_EQ(pa.changed_edges, pb.changed_edges);
    EXPECT_NE(pa.changed_edges, pc.changed_edges);
}

TEST(BuildPrecisionPair, StrictRejectsIndefinite) {
    // theta1 = 4 puts 2 on every lattice edge: min eigenvalue of the 4x4
    // grid matrix is 2 - 4 cos(pi/5) * 2 ~ -4.47, clearly indefinite.
    auto edges = build_graph(GraphSpec::lattice(4));
    RngStream rng(1);
    try {
        build_precision_pair(16, edges, 0, 2.0, 4.0, -4.0, PdPolicy::Strict, rng);
        FAIL() << "expected NotPositiveDefinite";
    } catch (const NotPositiveDefinite& e) {
        EXPECT_LT(e.min_eigenvalue_estimate, 0.0);
    }
}

TEST(BuildPrecisionPair, DiagonalRepairLoadsMinimally) {
    auto edges = build_graph(GraphSpec::lattice(4));
    RngStream rng(1);
    auto pair = build_precision_pair(16, edges, 2, 2.0, 4.0, -4.0, PdPolicy::DiagonalRepair, rng);
    EXPECT_GT(pair.pd_shift, 1.0);
    const double evq = detail::min_eigenvalue(pair.theta_q);
    const double evp = detail::min_eigenvalue(pair.theta_p);
    // floor reached for the binding matrix, and not overshot beyond the
    // bisection resolution
    EXPECT_GE(std::min(evp, evq), 0.1 - 1e-4);
    EXPECT_LE(std::min(evp, evq), 0.1 + 1e-4);
    // same loading applied to both diagonals
    EXPECT_DOUBLE_EQ(pair.theta_q(0, 0), 2.0 + pair.pd_shift);
    EXPECT_DOUBLE_EQ(pair.theta_p(0, 0), 2.0 + pair.pd_shift);
    // off-diagonals untouched by the repair
    EXPECT_DOUBLE_EQ(pair.theta_q(0, 1), 2.0);
}

TEST(BuildPrecisionPair, DiagonalRepairNoOpWhenComfortable) {
    auto edges = build_graph(GraphSpec::lattice(3));
    RngStream rng(9);
    auto pair = build_precision_pair(9, edges, 1, 2.0, 0.4, -0.4, PdPolicy::DiagonalRepair, rng);
    EXPECT_DOUBLE_EQ(pair.pd_shift, 0.0);
    EXPECT_DOUBLE_EQ(pair.theta_q(0, 0), 2.0);
}

TEST(BuildPrecisionPair, Validation) {
    auto edges = build_graph(GraphSpec::lattice(2));
    RngStream rng(0);
    EXPECT_THROW(build_precision_pair(4, edges, 5, 2, .4, -.4, PdPolicy::Strict, rng),
                 std::invalid_argument);
    EXPECT_THROW(build_precision_pair(4, edges, -1, 2, .4, -.4, PdPolicy::Strict, rng),
                 std::invalid_argument);
    EXPECT_THROW(build_precision_pair(3, edges, 0, 2, .4, -.4, PdPolicy::Strict, rng),
                 DimensionError);  // vertex 3 out of range
}

TEST(SampleGaussian, MatchesTargetCovariance) {
    auto edges = build_graph(GraphSpec::lattice(2));
    RngStream rng(2024);
    auto pair = build_precision_pair(4, edges, 0, 2.0, 0.4, -0.4, PdPolicy::Strict, rng);
    const int n = 50000;
    Eigen::MatrixXd X = sample_gaussian(pair.theta_q, n, rng);
    ASSERT_EQ(X.rows(), n);
    ASSERT_EQ(X.cols(), 4);
    Eigen::MatrixXd emp = X.transpose() * X / static_cast<double>(n);
    Eigen::MatrixXd target = pair.theta_q.inverse();
    EXPECT_LE((emp - target).lpNorm<Eigen::Infinity>(), 0.03);
    EXPECT_LE(X.colwise().mean().lpNorm<Eigen::Infinity>(), 0.02);
}

TEST(SampleGaussian, DeterministicPerStream) {
    Eigen::MatrixXd prec = Eigen::MatrixXd::Identity(3, 3) * 2.0;
    RngStream a(42), b(42);
    Eigen::MatrixXd xa = sample_gaussian(prec, 10, a);
    Eigen::MatrixXd xb = sample_gaussian(prec, 10, b);
    EXPECT_EQ(xa, xb);
    // the stream advances: a second draw differs
    Eigen::MatrixXd xc = sample_gaussian(prec, 10, a);
    EXPECT_NE(xa, xc);
}

TEST(SampleGaussian, Validation) {
    RngStream rng(0);
    Eigen::MatrixXd rect(2, 3);
    rect.setZero();
    EXPECT_THROW(sample_gaussian(rect, 5, rng), DimensionError);
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    EXPECT_THROW(sample_gaussian(id, 0, rng), EmptySampleError);
    Eigen::MatrixXd indef(2, 2);
    indef << 1, 3, 3, 1;
    EXPECT_THROW(sample_gaussian(indef, 5, rng), NotPositiveDefinite);
}

TEST(LambdaLiu, FrozenValues) {
    EXPECT_NEAR(lambda_liu(144, 248), 0.35390296830800637, 1e-14);
    EXPECT_NEAR(lambda_liu(400, 1198), 0.17679830481038872, 1e-14);
    EXPECT_NEAR(lambda_liu(36, 100), 0.47325461820621135, 1e-14);
    // decreasing in the sample size, increasing in the dimension
    EXPECT_GT(lambda_liu(144, 100), lambda_liu(144, 200));
    EXPECT_GT(lambda_liu(400, 100), lambda_liu(144, 100));
    EXPECT_THROW(lambda_liu(1, 10), std::invalid_argument);
    EXPECT_THROW(lambda_liu(10, 0), std::invalid_argument);
}
