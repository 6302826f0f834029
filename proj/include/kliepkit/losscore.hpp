#pragma once

// The KLIEP log-ratio loss, its softmax weights and gradient, and the
// penalty menu used by the regularized fits.
//
// For a summary with centered rows u_j = t_j^y - tbar_x the loss is
//
//   loss(delta) = -delta . tbar_x + log( (1/n_y) sum_j exp(delta . t_j^y) )
//               = log( (1/n_y) sum_j exp(delta . u_j) ),
//
// evaluated in the centered form with max-subtraction so that huge deltas
// stay finite and directions orthogonal to every u_j leave the value
// bit-for-bit unchanged.

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "kliepkit/errors.hpp"
#include "kliepkit/statmodel.hpp"

namespace kliepkit {

using DeltaVector = Eigen::VectorXd;

// Penalty added to the loss.  Note the L2 variant is the plain Euclidean
// norm lambda * |delta|_2 (not squared); the squared form only appears as
// the second term of ElasticNet, lambda1 * |delta|_1 + lambda2 * |delta|_2^2,
// which requires lambda2 > 0.
struct PenaltySpec {
    enum class Kind { None, L1, L2, ElasticNet };

    Kind kind = Kind::None;
    double lambda = 0.0;   // L1 / L2 weight
    double lambda1 = 0.0;  // ElasticNet l1 weight
    double lambda2 = 0.0;  // ElasticNet squared-l2 weight

    static PenaltySpec none() { return {}; }

    static PenaltySpec l1(double lambda) {
        if (!(lambda >= 0)) throw std::invalid_argument("PenaltySpec: lambda must be >= 0");
        PenaltySpec p;
        p.kind = Kind::L1;
        p.lambda = lambda;
        return p;
    }

    static PenaltySpec l2(double lambda) {
        if (!(lambda >= 0)) throw std::invalid_argument("PenaltySpec: lambda must be >= 0");
        PenaltySpec p;
        p.kind = Kind::L2;
        p.lambda = lambda;
        return p;
    }

    static PenaltySpec elastic_net(double lambda1, double lambda2) {
        if (!(lambda1 >= 0)) throw std::invalid_argument("PenaltySpec: lambda1 must be >= 0");
        if (!(lambda2 > 0)) throw std::invalid_argument("PenaltySpec: lambda2 must be > 0");
        PenaltySpec p;
        p.kind = Kind::ElasticNet;
        p.lambda1 = lambda1;
        p.lambda2 = lambda2;
        return p;
    }
};

inline double penalty_value(const PenaltySpec& pen, const DeltaVector& delta) {
    switch (pen.kind) {
        case PenaltySpec::Kind::None: return 0.0;
        case PenaltySpec::Kind::L1: return pen.lambda * delta.lpNorm<1>();
        case PenaltySpec::Kind::L2: return pen.lambda * delta.norm();
        case PenaltySpec::Kind::ElasticNet:
            return pen.lambda1 * delta.lpNorm<1>() + pen.lambda2 * delta.squaredNorm();
    }
    return 0.0;
}

namespace detail {

inline void check_delta(const SufficientSummary& s, const DeltaVector& delta) {
    if (delta.size() != s.dim())
        throw DimensionError("delta length does not match the statistic dimension");
    if (!delta.allFinite()) throw NumericalError("non-finite delta");
}

// log of the mean of exp(z_j), max-subtracted.
inline double log_mean_exp(const Eigen::VectorXd& z) {
    const double zmax = z.maxCoeff();
    const double mean = (z.array() - zmax).exp().mean();
    return zmax + std::log(mean);
}

}  // namespace detail

inline double kliep_loss(const SufficientSummary& s, const DeltaVector& delta) {
    detail::check_delta(s, delta);
    return detail::log_mean_exp(s.u * delta);
}

// Softmax weights alpha_j proportional to exp(delta . t_j^y); strictly
// positive and summing to one.  Entries that underflow after max-subtraction
// are floored at the smallest positive normal double before normalizing, so
// the positivity contract survives extreme deltas.
inline Eigen::VectorXd softmax_weights(const SufficientSummary& s, const DeltaVector& delta) {
    detail::check_delta(s, delta);
    Eigen::VectorXd z = s.u * delta;
    Eigen::VectorXd w = (z.array() - z.maxCoeff()).exp();
    for (Eigen::Index j = 0; j < w.size(); ++j)
        w[j] = std::max(w[j], std::numeric_limits<double>::min());
    return w / w.sum();
}

// Gradient of the loss: sum_j alpha_j t_j^y - tbar_x = U' alpha.
inline Eigen::VectorXd kliep_gradient(const SufficientSummary& s, const DeltaVector& delta) {
    return s.u.transpose() * softmax_weights(s, delta);
}

inline double penalized_objective(const SufficientSummary& s, const DeltaVector& delta,
                                  const PenaltySpec& pen) {
    return kliep_loss(s, delta) + penalty_value(pen, delta);
}

}  // namespace kliepkit
