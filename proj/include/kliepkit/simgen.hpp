#pragma once

// Gaussian graphical-model instance generation for the differential-network
// experiments: graph layouts, paired precision matrices differing on a few
// perturbed edges, exact multivariate-normal sampling, and the reference
// tuning level used as the comparison line in the experiment plots.
//
// Precision matrices put theta0 on the diagonal and an edge coefficient on
// each adjacent pair.  In the Half convention (the default) an edge carries
// theta1 / 2, matching densities whose exponent sums each unordered pair
// once with coefficient theta1; Full writes theta1 as is.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kliepkit/errors.hpp"
#include "kliepkit/rng.hpp"

namespace kliepkit {

struct GraphSpec {
    enum class Kind { Lattice, ErdosRenyi };

    Kind kind = Kind::Lattice;
    int side = 0;            // lattice only
    int m = 0;               // vertex count
    double edge_prob = 0.0;  // Erdos-Renyi only
    std::uint64_t seed = 0;  // Erdos-Renyi only

    // side x side grid with the 2*side*(side-1) nearest-neighbor edges.
    static GraphSpec lattice(int side) {
        if (side < 2) throw std::invalid_argument("GraphSpec: lattice side must be >= 2");
        GraphSpec g;
        g.kind = Kind::Lattice;
        g.side = side;
        g.m = side * side;
        return g;
    }

    static GraphSpec erdos_renyi(int m, double edge_prob, std::uint64_t seed) {
        if (m < 2) throw std::invalid_argument("GraphSpec: need at least two vertices");
        if (!(edge_prob > 0.0) || !(edge_prob < 1.0))
            throw std::invalid_argument("GraphSpec: edge probability must lie in (0, 1)");
        GraphSpec g;
        g.kind = Kind::ErdosRenyi;
        g.m = m;
        g.edge_prob = edge_prob;
        g.seed = seed;
        return g;
    }
};

// Edge list, lexicographically sorted pairs (u, v) with u < v.
inline std::vector<std::pair<int, int>> build_graph(const GraphSpec& spec) {
    std::vector<std::pair<int, int>> edges;
    if (spec.kind == GraphSpec::Kind::Lattice) {
        const int s = spec.side;
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) {
                const int id = i * s + j;
                if (j + 1 < s) edges.emplace_back(id, id + 1);
                if (i + 1 < s) edges.emplace_back(id, id + s);
            }
    } else {
        RngStream rng(splitmix64(spec.seed));
        for (int u = 0; u < spec.m; ++u)
            for (int v = u + 1; v < spec.m; ++v)
                if (rng.uniform01() < spec.edge_prob) edges.emplace_back(u, v);
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

enum class PdPolicy { Strict, DiagonalRepair };
enum class EdgeCoeffMode { Half, Full };

struct PrecisionPair {
    Eigen::MatrixXd theta_p;  // numerator-sample precision (perturbed edges)
    Eigen::MatrixXd theta_q;  // denominator-sample precision
    std::vector<std::pair<int, int>> edges;
    std::vector<std::pair<int, int>> changed_edges;
    double theta0 = 0.0, theta1 = 0.0, theta1_star = 0.0;
    double pd_shift = 0.0;  // diagonal loading added under DiagonalRepair
};

namespace detail {

inline double min_eigenvalue(const Eigen::MatrixXd& A) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().minCoeff();
}

inline bool definite_with_floor(const Eigen::MatrixXd& A, double shift, double floor) {
    Eigen::MatrixXd B = A;
    B.diagonal().array() += shift - floor;
    return Eigen::LLT<Eigen::MatrixXd>(B).info() == Eigen::Success;
}

}  // namespace detail

// Paired precision matrices on a common graph; the numerator matrix swaps
// the coefficient of `d` randomly chosen edges to theta1_star.  Strict
// demands both matrices positive definite as constructed; DiagonalRepair
// finds (binary search, 1e-6 resolution) the smallest common diagonal
// loading delta with min-eigenvalue >= 0.1 for both and applies it.
inline PrecisionPair build_precision_pair(int m, const std::vector<std::pair<int, int>>& edges,
                                          int d, double theta0, double theta1, double theta1_star,
                                          PdPolicy policy, RngStream& rng,
                                          EdgeCoeffMode mode = EdgeCoeffMode::Half) {
    if (m < 1) throw std::invalid_argument("build_precision_pair: m must be >= 1");
    if (d < 0 || d > static_cast<int>(edges.size()))
        throw std::invalid_argument("build_precision_pair: d must lie in [0, |edges|]");
    for (auto [u, v] : edges)
        if (u < 0 || v <= u || v >= m)
            throw DimensionError("build_precision_pair: edge endpoint out of range");

    PrecisionPair pair;
    pair.edges = edges;
    pair.theta0 = theta0;
    pair.theta1 = theta1;
    pair.theta1_star = theta1_star;

    // Partial Fisher-Yates pick of d distinct edges, then sorted for a
    // stable record of what changed.
    std::vector<int> idx(edges.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    for (int i = 0; i < d; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_int(idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<int> chosen(idx.begin(), idx.begin() + d);
    std::sort(chosen.begin(), chosen.end());
    for (int c : chosen) pair.changed_edges.push_back(edges[c]);

    const double half = (mode == EdgeCoeffMode::Half) ? 0.5 : 1.0;
    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(m, m);
    base.diagonal().setConstant(theta0);
    for (auto [u, v] : edges) base(u, v) = base(v, u) = half * theta1;
    pair.theta_q = base;
    pair.theta_p = base;
    for (auto [u, v] : pair.changed_edges)
        pair.theta_p(u, v) = pair.theta_p(v, u) = half * theta1_star;

    if (policy == PdPolicy::Strict) {
        for (const auto* M : {&pair.theta_p, &pair.theta_q}) {
            if (Eigen::LLT<Eigen::MatrixXd>(*M).info() != Eigen::Success) {
                const double ev = detail::min_eigenvalue(*M);
                throw NotPositiveDefinite(
                    "build_precision_pair: matrix not positive definite under Strict policy "
                    "(min eigenvalue ~ " + std::to_string(ev) + ")", ev);
            }
        }
        return pair;
    }

    constexpr double kFloor = 0.1;
    auto ok = [&](double delta) {
        return detail::definite_with_floor(pair.theta_p, delta, kFloor) &&
               detail::definite_with_floor(pair.theta_q, delta, kFloor);
    };
    double shift = 0.0;
    if (!ok(0.0)) {
        double lo = 0.0, hi = kFloor;
        while (!ok(hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e9) throw NumericalError("build_precision_pair: repair shift diverged");
        }
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? hi : lo) = mid;
        }
        shift = hi;
        pair.theta_p.diagonal().array() += shift;
        pair.theta_q.diagonal().array() += shift;
    }
    pair.pd_shift = shift;
    return pair;
}

// Exact sampling from N(0, precision^{-1}): with precision = L L', solving
// L' x = z maps iid standard normals z to the target covariance.  Rows of
// the result are observations; consumes n * m normal draws in row order.
inline Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& precision, int n, RngStream& rng) {
    const int m = static_cast<int>(precision.rows());
    if (precision.cols() != m) throw DimensionError("sample_gaussian: precision must be square");
    if (n < 1) throw EmptySampleError("sample_gaussian: need n >= 1");
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) {
        const double ev = detail::min_eigenvalue(precision);
        throw NotPositiveDefinite("sample_gaussian: precision not positive definite "
                                  "(min eigenvalue ~ " + std::to_string(ev) + ")", ev);
    }
    Eigen::MatrixXd X(n, m);
    Eigen::VectorXd z(m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) z[j] = rng.normal();
        X.row(i) = llt.matrixU().solve(z).transpose();
    }
    return X;
}

// Reference tuning level 2.5 sqrt(log(m) / n_p) used as the comparison line
// in the experiment summaries (natural log).
inline double lambda_liu(int m, int n_p) {
    if (m < 2) throw std::invalid_argument("lambda_liu: m must be >= 2");
    if (n_p < 1) throw std::invalid_argument("lambda_liu: n_p must be >= 1");
    return 2.5 * std::sqrt(std::log(static_cast<double>(m)) / static_cast<double>(n_p));
}

}  // namespace kliepkit
