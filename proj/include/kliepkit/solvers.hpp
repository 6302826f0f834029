#pragma once

// Fitting routines for the (optionally penalized) KLIEP loss, plus the
// existence report that ties the fits back to the hull geometry.
//
// fit_kliep      unpenalized special case of fit_penalized.
// fit_penalized  accelerated proximal gradient with function-value restart:
//                the smooth part is linearized at the extrapolated point and
//                the penalty handled by its prox map (soft-threshold for l1,
//                block shrinkage for the l2 norm, shrink-then-scale for
//                elastic net).  Steps backtrack until the quadratic upper
//                bound holds; a candidate that fails to improve the best
//                objective resets the momentum and the following pass is a
//                plain descent step, so the accepted iterates decrease
//                monotonically.  Each reset also holds the momentum off for
//                a few passes: near a minimum the objective comparison sits
//                at the rounding floor and keeps tripping the reset, while
//                plain prox steps still contract the iterate (the quadratic
//                and norm penalties shrink in the prox regardless of any
//                objective comparison), so the hold lets the residual fall
//                cleanly through the tolerance instead of jittering at the
//                noise level.  Accepted steps may grow again after clean
//                passes, which turns the flat tails of divergent instances
//                into an exponential march.
//
// Divergence is detected, not proven, during iteration: once the objective
// falls below -log(n_y) - divergence_loss_margin (a level no attainable
// minimum can reach under the none / l1 / l2 penalties) or the iterate norm
// passes divergence_norm_cap under monotone descent, the run stops with
// UnboundedDetected and a certified separating direction fetched from the
// hull geometry, normalized in the norm matching the penalty (l1 for L1
// penalties, l2 otherwise) so that its margin witnesses the unboundedness
// rate.  The floor rule does not apply to the elastic net: its squared term
// makes the objective coercive, so a minimum always exists yet may lie far
// below -log(n_y); only the norm cap remains as a safety net there.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>

#include "kliepkit/errors.hpp"
#include "kliepkit/geometry.hpp"
#include "kliepkit/losscore.hpp"
#include "kliepkit/statmodel.hpp"

namespace kliepkit {

struct SolveOptions {
    int max_iters = 10000;
    double grad_tol = 1e-8;
    double step_init = 1.0;
    double backtrack_factor = 0.5;
    double divergence_norm_cap = 1e6;
    double divergence_loss_margin = 10.0;
};

enum class FitStatus { Converged, UnboundedDetected, IterLimit };

inline const char* to_string(FitStatus s) {
    switch (s) {
        case FitStatus::Converged: return "Converged";
        case FitStatus::UnboundedDetected: return "UnboundedDetected";
        case FitStatus::IterLimit: return "IterLimit";
    }
    return "?";
}

struct FitResult {
    DeltaVector delta_hat;
    double objective = 0.0;
    FitStatus status = FitStatus::IterLimit;
    int iterations = 0;
    double residual = 0.0;  // gradient / prox-step residual at exit
    std::optional<Eigen::VectorXd> certificate;  // separating direction when unbounded
};

namespace detail {

inline void check_options(const SolveOptions& o) {
    if (o.max_iters < 1 || !(o.grad_tol > 0) || !(o.step_init > 0) ||
        !(o.backtrack_factor > 0) || !(o.backtrack_factor < 1))
        throw std::invalid_argument("SolveOptions: invalid field");
}

inline DualNorm certificate_norm(const PenaltySpec& pen) {
    return pen.kind == PenaltySpec::Kind::L1 ? DualNorm::Linf : DualNorm::L2;
}

// Prox map of step * penalty.
inline DeltaVector prox(const PenaltySpec& pen, const DeltaVector& v, double step) {
    switch (pen.kind) {
        case PenaltySpec::Kind::None: return v;
        case PenaltySpec::Kind::L1: {
            const double t = step * pen.lambda;
            return v.unaryExpr([t](double x) { return std::copysign(std::max(std::abs(x) - t, 0.0), x); });
        }
        case PenaltySpec::Kind::L2: {
            const double nv = v.norm();
            const double t = step * pen.lambda;
            if (nv <= t) return DeltaVector::Zero(v.size());
            return v * (1.0 - t / nv);
        }
        case PenaltySpec::Kind::ElasticNet: {
            const double t = step * pen.lambda1;
            DeltaVector y = v.unaryExpr([t](double x) { return std::copysign(std::max(std::abs(x) - t, 0.0), x); });
            return y / (1.0 + 2.0 * step * pen.lambda2);
        }
    }
    return v;
}

inline bool diverged(const SolveOptions& opts, const PenaltySpec& pen, double objective,
                     const DeltaVector& delta, Eigen::Index n_y) {
    // A minimum of the none / l1 / l2 objectives, when one exists, never
    // lies below -log(n_y); the coercive elastic net has no such floor.
    const bool floor_applies = pen.kind != PenaltySpec::Kind::ElasticNet;
    if (floor_applies &&
        objective < -std::log(static_cast<double>(n_y)) - opts.divergence_loss_margin)
        return true;
    return delta.lpNorm<Eigen::Infinity>() > opts.divergence_norm_cap;
}

inline std::optional<Eigen::VectorXd> fetch_certificate(const SufficientSummary& s,
                                                        const PenaltySpec& pen) {
    auto sep = separating_direction(s, certificate_norm(pen));
    if (!sep) return std::nullopt;
    return sep->direction;
}

}  // namespace detail

inline FitResult fit_penalized(const SufficientSummary& s, const PenaltySpec& pen,
                               const SolveOptions& opts = {}) {
    detail::check_options(opts);
    FitResult out;
    DeltaVector x = DeltaVector::Zero(s.dim());  // incumbent iterate, objective monotone
    double fx = kliep_loss(s, x);
    double best = fx + penalty_value(pen, x);
    DeltaVector y = x;  // extrapolated probe point
    double fy = fx;
    double t = 1.0;  // momentum coefficient; 1 means the pass runs without momentum
    int hold = 0;    // momentum-free passes left after a restart
    constexpr int kRestartHold = 8;
    constexpr double kRampResidualFloor = 1e-5;  // no step growth below this residual
    double step = opts.step_init;

    for (int it = 1; it <= opts.max_iters; ++it) {
        const Eigen::VectorXd g = kliep_gradient(s, y);
        if (!g.allFinite()) throw NumericalError("fit: non-finite gradient");

        // Backtrack until the quadratic upper bound of the smooth part holds
        // at the prox step from y.
        DeltaVector next;
        double f_next = 0;
        int bt = 0;
        for (;; ++bt) {
            if (bt > 80)
                throw SolverError("fit: line search failed",
                                  "iteration=" + std::to_string(it) + " step=" + std::to_string(step));
            next = detail::prox(pen, y - step * g, step);
            f_next = kliep_loss(s, next);
            const Eigen::VectorXd d = next - y;
            const double bound = fy + g.dot(d) + d.squaredNorm() / (2.0 * step);
            if (f_next <= bound + 1e-15 * (1.0 + std::abs(fy))) break;
            step *= opts.backtrack_factor;
        }

        out.iterations = it;
        out.residual = (next - y).lpNorm<Eigen::Infinity>() / step;
        const double objective = f_next + penalty_value(pen, next);

        if (out.residual <= opts.grad_tol) {
            out.status = FitStatus::Converged;
            out.delta_hat = next;
            out.objective = objective;
            return out;
        }

        if (t != 1.0 && objective > best) {
            // The extrapolation overshot.  Drop the momentum and redo the pass
            // from the incumbent, whose backtracked prox step is a guaranteed
            // descent, so two restarts can never occur in a row.
            y = x;
            fy = fx;
            t = 1.0;
            hold = kRestartHold;
            continue;
        }

        if (hold > 0) {
            --hold;  // plain prox-gradient pass while the momentum is held off
            y = next;
            fy = f_next;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double beta = (t - 1.0) / t_next;
            if (beta > 0.0) {
                y = next + beta * (next - x);
                fy = kliep_loss(s, y);
            } else {
                y = next;
                fy = f_next;
            }
            t = t_next;
        }
        x = next;
        fx = f_next;
        best = objective;

        if (detail::diverged(opts, pen, best, x, s.n_y)) {
            out.status = FitStatus::UnboundedDetected;
            out.delta_hat = x;
            out.objective = best;
            out.certificate = detail::fetch_certificate(s, pen);
            return out;
        }
        // Ramp the step after clean passes so flat divergent tails are walked
        // exponentially fast, but freeze the growth once the residual is
        // small: the backtracking test only sees curvature along the step
        // direction, and near a minimum a re-doubled step amplifies error
        // components along stiffer directions, pinning the residual just
        // above tolerance.  Backtracking may still shrink a frozen step.
        if (bt == 0 && out.residual > kRampResidualFloor)
            step = std::min(step * 2.0, 1e12);
    }

    out.status = FitStatus::IterLimit;
    out.delta_hat = x;
    out.objective = best;
    return out;
}

inline FitResult fit_kliep(const SufficientSummary& s, const SolveOptions& opts = {}) {
    return fit_penalized(s, PenaltySpec::none(), opts);
}

struct ExistenceReport {
    enum class Verdict { MinimumExists, BoundedNoMinimum, BoundedBelowBoundaryCase, Unbounded };

    HullClassification classification;
    std::optional<LambdaSharpResult> lambda_sharp;  // set for positive L1 / L2 penalties
    PenaltySpec penalty;
    Verdict verdict = Verdict::Unbounded;
    std::string explanation;
};

inline const char* to_string(ExistenceReport::Verdict v) {
    switch (v) {
        case ExistenceReport::Verdict::MinimumExists: return "MinimumExists";
        case ExistenceReport::Verdict::BoundedNoMinimum: return "BoundedNoMinimum";
        case ExistenceReport::Verdict::BoundedBelowBoundaryCase: return "BoundedBelowBoundaryCase";
        case ExistenceReport::Verdict::Unbounded: return "Unbounded";
    }
    return "?";
}

// Decide attainment before any iteration is spent: the unpenalized loss has
// a minimum iff tbar_x sits in the relative interior of the hull, is bounded
// without attainment on the relative boundary, and is unbounded outside.
// With an l1 or l2 penalty the comparison of the level against lambda# in
// the matched norm settles the same question; exact ties are reported as
// the boundary case rather than resolved.  An elastic net (lambda2 > 0)
// always attains its minimum.
inline ExistenceReport existence_report(const SufficientSummary& s, const PenaltySpec& pen,
                                        double tol = 1e-8) {
    ExistenceReport rep;
    rep.penalty = pen;
    rep.classification = classify_hull(s, tol);
    const char* place = to_string(rep.classification.kind);

    const bool degenerate_l1l2 =
        (pen.kind == PenaltySpec::Kind::L1 || pen.kind == PenaltySpec::Kind::L2) &&
        pen.lambda == 0.0;

    if (pen.kind == PenaltySpec::Kind::None || degenerate_l1l2) {
        switch (rep.classification.kind) {
            case HullClassification::Kind::RelInterior:
                rep.verdict = ExistenceReport::Verdict::MinimumExists;
                rep.explanation = "mean statistic lies in the relative interior of the hull; "
                                  "the unpenalized loss attains its minimum";
                break;
            case HullClassification::Kind::RelBoundary:
                rep.verdict = ExistenceReport::Verdict::BoundedNoMinimum;
                rep.explanation = "mean statistic lies on the relative boundary of the hull; "
                                  "the loss is bounded below but the infimum is not attained";
                break;
            case HullClassification::Kind::Outside:
                rep.verdict = ExistenceReport::Verdict::Unbounded;
                rep.explanation = "mean statistic lies outside the hull; the loss is unbounded "
                                  "below along the separating direction";
                break;
        }
        return rep;
    }

    if (pen.kind == PenaltySpec::Kind::ElasticNet) {
        rep.verdict = ExistenceReport::Verdict::MinimumExists;
        rep.explanation = std::string("elastic net with positive quadratic weight is coercive; "
                                      "a global minimum exists (classification: ") + place + ")";
        return rep;
    }

    const DualNorm norm = detail::certificate_norm(pen);
    rep.lambda_sharp = lambda_sharp(s, norm);
    const double ls = rep.lambda_sharp->value;
    const double band = tol * (1.0 + ls);
    const std::string lvl = "penalty level " + std::to_string(pen.lambda) + " vs critical level " +
                            std::to_string(ls) + " (" + to_string(norm) + " distance, classification: " +
                            place + ")";
    if (pen.lambda > ls + band) {
        rep.verdict = ExistenceReport::Verdict::MinimumExists;
        rep.explanation = "penalty dominates the hull distance; minimum exists. " + lvl;
    } else if (pen.lambda < ls - band) {
        rep.verdict = ExistenceReport::Verdict::Unbounded;
        rep.explanation = "penalty level below the hull distance; objective unbounded below. " + lvl;
    } else {
        rep.verdict = ExistenceReport::Verdict::BoundedBelowBoundaryCase;
        rep.explanation = "penalty level ties the hull distance within tolerance; bounded below, "
                          "attainment undetermined at this precision. " + lvl;
    }
    return rep;
}

}  // namespace kliepkit
