#pragma once

// Sufficient-statistic maps and the two-sample summary they induce.
//
// A StatisticMap sends an observation x in R^m to its statistic vector
// t(x) in R^k.  Two maps are provided:
//
//   Identity          t(x) = x,                          k = m
//   GaussianPairwise  t_uu(x) = -x_u^2 / 2  (u = v)
//                     t_uv(x) = -x_u x_v    (u < v),     k = m(m+1)/2
//
// GaussianPairwise coordinates are ordered lexicographically by the pair
// (u, v) with u <= v: for m = 2 the order is (0,0), (0,1), (1,1).  With
// theta the same-ordered coefficient vector of a symmetric matrix Theta
// (theta_uu = Theta_uu on the diagonal, theta_uv = Theta_uv for each
// unordered off-diagonal pair, counted once), the pairing satisfies
//
//   theta . t(x) = -(1/2) x' Theta x,
//
// since the off-diagonal pair {u,v} appears twice in x'Theta x and once in
// theta . t(x) with the doubled product baked into t_uv.

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "kliepkit/errors.hpp"

namespace kliepkit {

using ObservationMatrix = Eigen::MatrixXd;  // rows: observations, cols: coordinates

// Flat index of the pair (u, v), 0-based, u <= v < m, in the lexicographic
// ordering used by GaussianPairwise.
inline int pair_index(int u, int v, int m) {
    if (u < 0 || v < u || v >= m)
        throw DimensionError("pair_index: need 0 <= u <= v < m");
    return u * m - u * (u - 1) / 2 + (v - u);
}

class StatisticMap {
  public:
    enum class Kind { Identity, GaussianPairwise };

    static StatisticMap identity(int m) { return StatisticMap(Kind::Identity, m); }

    static StatisticMap gaussian_pairwise(int m) {
        return StatisticMap(Kind::GaussianPairwise, m);
    }

    Kind kind() const { return kind_; }
    int input_dim() const { return m_; }
    int output_dim() const { return k_; }

    // Statistic vector of a single observation, written into `out` (size k).
    template <typename Derived>
    void apply_row(const Eigen::MatrixBase<Derived>& x, Eigen::Ref<Eigen::VectorXd> out) const {
        if (x.size() != m_) throw DimensionError("StatisticMap: observation has wrong length");
        if (kind_ == Kind::Identity) {
            out = x.template cast<double>();
            return;
        }
        int idx = 0;
        for (int u = 0; u < m_; ++u) {
            out[idx++] = -0.5 * x[u] * x[u];
            for (int v = u + 1; v < m_; ++v) out[idx++] = -x[u] * x[v];
        }
    }

  private:
    StatisticMap(Kind kind, int m) : kind_(kind), m_(m) {
        if (m < 1) throw UnsupportedDimensionError("StatisticMap: dimension must be >= 1");
        k_ = (kind == Kind::Identity) ? m : m * (m + 1) / 2;
    }

    Kind kind_;
    int m_;
    int k_;
};

inline void validate_observations(const ObservationMatrix& X, const std::string& who) {
    if (X.rows() == 0) throw EmptySampleError(who + ": empty sample");
    if (X.cols() == 0) throw DimensionError(who + ": observations need at least one coordinate");
    if (!X.allFinite()) throw NumericalError(who + ": non-finite entry in observations");
}

// Row-wise statistic evaluation: row i of the result is t(X.row(i)).
inline Eigen::MatrixXd apply_statistic(const StatisticMap& map, const ObservationMatrix& X) {
    validate_observations(X, "apply_statistic");
    if (X.cols() != map.input_dim())
        throw DimensionError("apply_statistic: observation dimension does not match the map");
    Eigen::MatrixXd T(X.rows(), map.output_dim());
    Eigen::VectorXd row(map.output_dim());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        map.apply_row(X.row(i), row);
        T.row(i) = row;
    }
    return T;
}

// Everything the loss, its geometry, and the solvers consume: the mean
// statistic of the numerator sample, the per-observation statistics of the
// denominator sample, and the centered rows u_j = t_j^y - tbar_x.
struct SufficientSummary {
    Eigen::VectorXd tbar_x;  // mean numerator statistic, length k
    Eigen::MatrixXd ty;      // denominator statistics, n_y x k
    Eigen::MatrixXd u;       // ty with tbar_x subtracted from every row
    Eigen::Index n_y = 0;

    Eigen::Index dim() const { return tbar_x.size(); }
};

// Build a summary straight from moment inputs (handy for the toy profiles
// and for geometry tests that construct hulls directly).
inline SufficientSummary make_summary(const Eigen::VectorXd& tbar_x, const Eigen::MatrixXd& ty) {
    if (ty.rows() == 0) throw EmptySampleError("make_summary: empty denominator statistics");
    if (ty.cols() != tbar_x.size())
        throw DimensionError("make_summary: tbar_x length does not match ty columns");
    if (!tbar_x.allFinite() || !ty.allFinite())
        throw NumericalError("make_summary: non-finite statistic");
    SufficientSummary s;
    s.tbar_x = tbar_x;
    s.ty = ty;
    s.u = ty.rowwise() - tbar_x.transpose();
    s.n_y = ty.rows();
    return s;
}

inline SufficientSummary summarize(const StatisticMap& map, const ObservationMatrix& X,
                                   const ObservationMatrix& Y) {
    validate_observations(X, "summarize(X)");
    validate_observations(Y, "summarize(Y)");
    if (X.cols() != Y.cols())
        throw DimensionError("summarize: samples have different column counts");
    Eigen::MatrixXd tx = apply_statistic(map, X);
    Eigen::MatrixXd ty = apply_statistic(map, Y);
    return make_summary(tx.colwise().mean(), ty);
}

// Same-ordered coefficient vector of a symmetric matrix: theta_uu = Theta_uu,
// theta_uv = Theta_uv (u < v, each unordered pair once).  The counterpart of
// GaussianPairwise under the pairing documented at the top of this header.
inline Eigen::VectorXd pairwise_coefficients(const Eigen::MatrixXd& Theta) {
    const int m = static_cast<int>(Theta.rows());
    if (Theta.cols() != m) throw DimensionError("pairwise_coefficients: matrix must be square");
    Eigen::VectorXd theta(m * (m + 1) / 2);
    int idx = 0;
    for (int u = 0; u < m; ++u) {
        theta[idx++] = Theta(u, u);
        for (int v = u + 1; v < m; ++v) theta[idx++] = Theta(u, v);
    }
    return theta;
}

}  // namespace kliepkit
