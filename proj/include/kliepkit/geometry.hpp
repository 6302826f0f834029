#pragma once

// Convex-hull diagnostics for the mean numerator statistic against the
// denominator statistic cloud: exact membership classification (relative
// interior / relative boundary / outside), the critical tuning level
// lambda# (the dual-norm distance from tbar_x to the hull), separating
// directions with certified margins, and a small brute-force minimax
// evaluator used as a test oracle.
//
// Membership is decided by the linear program
//
//   maximize s   s.t.   sum_j alpha_j t_j = tbar_x,  sum_j alpha_j = 1,
//                       alpha_j >= s,
//
// (substituting alpha = beta + s*1 with beta >= 0 keeps the row count at
// k+1).  Infeasible <=> Outside; optimal s <= tol <=> relative boundary;
// s > tol <=> relative interior.  A least-squares projection onto the
// affine hull runs first: when tbar_x is decisively off the affine hull
// (residual > 1e-6 * scale) the LP cannot be feasible and the normalized
// residual is already a separator with margin equal to the residual norm.
//
// lambda# under the Linf distance is the LP
//
//   minimize r   s.t.   |tbar_x - T'alpha|_v <= r per coordinate v,
//                       alpha in the simplex,
//
// solved directly when k is small and by coordinate constraint generation
// otherwise: only rows violated at the current iterate are materialized,
// and the loop stops when the true residual matches the sub-LP optimum,
// which certifies global optimality (the sub-LP value is a lower bound,
// the recomputed residual an upper bound).  The sub-LP duals assemble the
// optimal separating direction on the l1 sphere.  The Euclidean case uses
// Wolfe's min-norm-point algorithm.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kliepkit/errors.hpp"
#include "kliepkit/lp.hpp"
#include "kliepkit/min_norm_point.hpp"
#include "kliepkit/statmodel.hpp"

namespace kliepkit {

// Distance norm used for lambda#.  Linf pairs with an l1 penalty on delta,
// L2 with the Euclidean penalty (each is the dual norm of the other side).
enum class DualNorm { Linf, L2 };

inline const char* to_string(DualNorm n) { return n == DualNorm::Linf ? "linf" : "l2"; }

struct HullClassification {
    enum class Kind { RelInterior, RelBoundary, Outside };

    Kind kind = Kind::Outside;
    Eigen::VectorXd weights;    // hull representation of tbar_x (empty when Outside)
    Eigen::VectorXd separator;  // Outside only: direction with positive margin
    double margin = 0.0;        // Outside only: min_j separator.(tbar_x - t_j)
    // Optimal s of the membership LP (max-min weight over affine
    // representations, negative when tbar_x is outside the hull); -inf when
    // the LP is infeasible, i.e. tbar_x is off the affine hull entirely.
    double lp_value = -std::numeric_limits<double>::infinity();
};

inline const char* to_string(HullClassification::Kind k) {
    switch (k) {
        case HullClassification::Kind::RelInterior: return "RelInterior";
        case HullClassification::Kind::RelBoundary: return "RelBoundary";
        case HullClassification::Kind::Outside: return "Outside";
    }
    return "?";
}

struct LambdaSharpResult {
    double value = 0.0;
    Eigen::VectorXd nearest_point;  // hull point attaining the distance
    Eigen::VectorXd hull_weights;   // simplex weights with ty' w == nearest_point
    DualNorm dual_norm = DualNorm::Linf;
};

namespace detail {

inline double data_scale(const SufficientSummary& s) {
    return 1.0 + s.tbar_x.cwiseAbs().maxCoeff() + s.ty.cwiseAbs().maxCoeff();
}

// Least-squares projection of tbar_x onto the affine hull of the ty rows.
// Returns the residual (zero vector iff tbar_x lies in the affine hull).
inline Eigen::VectorXd affine_hull_residual(const SufficientSummary& s) {
    const Eigen::Index n = s.n_y;
    Eigen::VectorXd rhs = s.tbar_x - s.ty.row(0).transpose();
    if (n == 1) return rhs;
    Eigen::MatrixXd D = (s.ty.bottomRows(n - 1).rowwise() - s.ty.row(0)).transpose();  // k x (n-1)
    Eigen::VectorXd coef = D.colPivHouseholderQr().solve(rhs);
    return rhs - D * coef;
}

struct SeparatorInfo {
    Eigen::VectorXd direction;
    double margin = 0.0;
};

// min_j direction.(tbar_x - t_j), the certified separation margin.
inline double separation_margin(const SufficientSummary& s, const Eigen::VectorXd& dir) {
    return -(s.u * dir).maxCoeff();
}

struct LambdaSharpInternal {
    LambdaSharpResult result;
    std::optional<SeparatorInfo> separator;  // present when strictly outside
};

// Finalize weights into the exact contract: clamp stray negatives,
// renormalize, and recompute nearest/value from the stored weights so that
// value == |tbar_x - nearest|_# holds bit-for-bit.
inline void finalize_weights(const SufficientSummary& s, Eigen::VectorXd w, DualNorm norm,
                             LambdaSharpResult& out) {
    w = w.cwiseMax(0.0);
    const double total = w.sum();
    if (!(total > 0)) throw NumericalError("lambda_sharp: degenerate hull weights");
    w /= total;
    out.hull_weights = w;
    out.nearest_point = s.ty.transpose() * w;
    Eigen::VectorXd diff = s.tbar_x - out.nearest_point;
    out.value = (norm == DualNorm::Linf) ? diff.lpNorm<Eigen::Infinity>() : diff.norm();
    out.dual_norm = norm;
}

// Build and solve the Linf-distance LP restricted to the coordinate rows in
// `work` (pairs of coordinate index and sign).  Variables are [alpha, r].
inline lp::Solution solve_linf_sublp(const SufficientSummary& s,
                                     const std::vector<std::pair<int, int>>& work) {
    const int n = static_cast<int>(s.n_y);
    const int rows = static_cast<int>(work.size()) + 1;
    lp::Problem p;
    p.A.setZero(rows, n + 1);
    p.b.setZero(rows);
    p.c.setZero(n + 1);
    p.c[n] = 1.0;
    p.rows.assign(rows, lp::RowType::GE);
    for (int i = 0; i < rows - 1; ++i) {
        const auto [v, sign] = work[i];
        p.A.row(i).head(n) = sign * s.ty.col(v).transpose();
        p.A(i, n) = 1.0;
        p.b[i] = sign * s.tbar_x[v];
    }
    p.A.row(rows - 1).head(n).setOnes();
    p.b[rows - 1] = 1.0;
    p.rows[rows - 1] = lp::RowType::EQ;
    lp::Solution sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal)
        throw SolverError("lambda_sharp: distance LP did not reach optimality",
                          "status=" + std::to_string(static_cast<int>(sol.status)) +
                              " iterations=" + std::to_string(sol.iterations));
    return sol;
}

inline LambdaSharpInternal lambda_sharp_linf(const SufficientSummary& s) {
    const int n = static_cast<int>(s.n_y);
    const int k = static_cast<int>(s.dim());
    const double eps = 1e-10 * data_scale(s);

    std::vector<std::pair<int, int>> work;
    const bool direct = (k <= 24);
    if (direct) {
        for (int v = 0; v < k; ++v) {
            work.emplace_back(v, +1);
            work.emplace_back(v, -1);
        }
    } else {
        // Seed with the coordinates worst-violated at the uniform weights.
        Eigen::VectorXd res = s.tbar_x - s.ty.colwise().mean().transpose();
        int v0 = 0, v1 = 0;
        res.cwiseAbs().maxCoeff(&v0);
        work.emplace_back(v0, res[v0] >= 0 ? 1 : -1);
        Eigen::VectorXd masked = res.cwiseAbs();
        masked[v0] = -1;
        masked.maxCoeff(&v1);
        if (v1 != v0) work.emplace_back(v1, res[v1] >= 0 ? 1 : -1);
    }

    lp::Solution sol;
    Eigen::VectorXd alpha, residual;
    double rho = 0;
    bool full = direct;
    for (int round = 0;; ++round) {
        if (round > 500)
            throw SolverError("lambda_sharp: constraint generation did not settle",
                              "rows=" + std::to_string(work.size()));
        sol = solve_linf_sublp(s, work);
        alpha = sol.x.head(n);
        residual = s.tbar_x - s.ty.transpose() * alpha;
        rho = residual.lpNorm<Eigen::Infinity>();
        if (full || rho <= sol.objective + eps) break;

        // Admit the most violated coordinate rows (at most 4 per round).
        std::vector<int> order(k);
        for (int v = 0; v < k; ++v) order[v] = v;
        std::partial_sort(order.begin(), order.begin() + std::min(k, 4), order.end(),
                          [&](int a, int b) { return std::abs(residual[a]) > std::abs(residual[b]); });
        int added = 0;
        for (int t = 0; t < std::min(k, 4) && added < 4; ++t) {
            const int v = order[t];
            if (std::abs(residual[v]) <= sol.objective + eps) break;
            std::pair<int, int> row{v, residual[v] >= 0 ? 1 : -1};
            if (std::find(work.begin(), work.end(), row) == work.end()) {
                work.push_back(row);
                ++added;
            }
        }
        if (added == 0) {
            // A violated row the sub-LP believes satisfied: numerical corner.
            // Retire the generation loop and solve with every row once.
            work.clear();
            for (int v = 0; v < k; ++v) {
                work.emplace_back(v, +1);
                work.emplace_back(v, -1);
            }
            full = true;
        }
    }

    LambdaSharpInternal out;
    finalize_weights(s, alpha, DualNorm::Linf, out.result);

    // Assemble the l1-sphere separating direction from the coordinate-row
    // duals; valid (and only reported) when the distance is positive.
    if (out.result.value > eps) {
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(k);
        for (size_t i = 0; i < work.size(); ++i) dir[work[i].first] += work[i].second * sol.y[i];
        const double l1 = dir.lpNorm<1>();
        if (l1 > 0.5) {  // at a positive optimum the duals carry total mass 1
            dir /= l1;
            SeparatorInfo sep{dir, separation_margin(s, dir)};
            if (sep.margin > 0) out.separator = sep;
        }
    }
    return out;
}

inline LambdaSharpInternal lambda_sharp_l2(const SufficientSummary& s) {
    MinNormPoint mnp = min_norm_point(s.ty, s.tbar_x);
    LambdaSharpInternal out;
    finalize_weights(s, mnp.weights, DualNorm::L2, out.result);
    const double eps = 1e-10 * data_scale(s);
    if (out.result.value > eps) {
        Eigen::VectorXd dir = (s.tbar_x - out.result.nearest_point) / out.result.value;
        SeparatorInfo sep{dir, separation_margin(s, dir)};
        if (sep.margin > 0) out.separator = sep;
    }
    return out;
}

inline LambdaSharpInternal lambda_sharp_internal(const SufficientSummary& s, DualNorm norm) {
    return norm == DualNorm::Linf ? lambda_sharp_linf(s) : lambda_sharp_l2(s);
}

}  // namespace detail

inline HullClassification classify_hull(const SufficientSummary& s, double tol = 1e-8) {
    if (!(tol > 0)) throw std::invalid_argument("classify_hull: tol must be positive");
    const int n = static_cast<int>(s.n_y);
    const int k = static_cast<int>(s.dim());
    const double scale = detail::data_scale(s);

    HullClassification out;

    // Decisively off the affine hull: no LP needed, the normalized residual
    // separates with margin equal to its norm.
    Eigen::VectorXd res = detail::affine_hull_residual(s);
    const double rnorm = res.norm();
    if (rnorm > 1e-6 * scale) {
        out.kind = HullClassification::Kind::Outside;
        out.separator = res / rnorm;
        out.margin = detail::separation_margin(s, out.separator);
        return out;
    }

    lp::Problem p;  // variables [beta (n), s+, s-]
    p.A.setZero(k + 1, n + 2);
    p.b.setZero(k + 1);
    p.c.setZero(n + 2);
    p.rows.assign(k + 1, lp::RowType::EQ);
    Eigen::VectorXd colsum = s.ty.colwise().sum();
    p.A.block(0, 0, k, n) = s.ty.transpose();
    p.A.block(0, n, k, 1) = colsum;
    p.A.block(0, n + 1, k, 1) = -colsum;
    p.b.head(k) = s.tbar_x;
    p.A.row(k).head(n).setOnes();
    p.A(k, n) = n;
    p.A(k, n + 1) = -n;
    p.b[k] = 1.0;
    p.c[n] = -1.0;  // maximize s
    p.c[n + 1] = 1.0;

    lp::Solution sol = lp::solve(p);
    if (sol.status == lp::Status::Infeasible) {
        out.kind = HullClassification::Kind::Outside;
        auto sep = detail::lambda_sharp_l2(s).separator;
        if (sep) {
            out.separator = sep->direction;
            out.margin = sep->margin;
        }
        return out;
    }
    if (sol.status != lp::Status::Optimal)
        throw SolverError("classify_hull: membership LP did not reach optimality",
                          "iterations=" + std::to_string(sol.iterations));

    const double sval = sol.x[n] - sol.x[n + 1];
    out.lp_value = sval;
    // The substituted LP stays feasible for any tbar_x in the affine hull
    // (s may go negative), so membership failure shows up as sval < -tol,
    // not as infeasibility.
    if (sval < -tol) {
        auto sep = detail::lambda_sharp_l2(s).separator;
        if (sep) {
            out.kind = HullClassification::Kind::Outside;
            out.separator = sep->direction;
            out.margin = sep->margin;
            return out;
        }
        // Distance below solver precision despite a negative max-min weight:
        // numerically the point sits on the hull, so report the boundary.
        out.kind = HullClassification::Kind::RelBoundary;
    } else {
        out.kind = (sval > tol) ? HullClassification::Kind::RelInterior
                                : HullClassification::Kind::RelBoundary;
    }
    Eigen::VectorXd alpha = sol.x.head(n).array() + sval;
    alpha = alpha.cwiseMax(0.0);
    out.weights = alpha / alpha.sum();
    return out;
}

inline LambdaSharpResult lambda_sharp(const SufficientSummary& s, DualNorm norm) {
    return detail::lambda_sharp_internal(s, norm).result;
}

struct SeparatingDirection {
    Eigen::VectorXd direction;  // unit vector in the penalty norm (l1 / l2)
    double margin = 0.0;        // min_j direction.(tbar_x - t_j), positive
};

// Certified separating direction, present iff tbar_x is strictly outside
// the hull at working precision.  The direction is normalized in the dual
// pairing's penalty norm (l1 for Linf distances, l2 for Euclidean), so its
// margin equals lambda# up to solver tolerance.
inline std::optional<SeparatingDirection> separating_direction(const SufficientSummary& s,
                                                               DualNorm norm) {
    auto internal = detail::lambda_sharp_internal(s, norm);
    if (!internal.separator) return std::nullopt;
    return SeparatingDirection{internal.separator->direction, internal.separator->margin};
}

// Grid-search evaluation of lambda# via its minimax form
//   lambda# = max(0, -min_{|d|=1} max_j d.u_j)
// with d ranging over a dense grid on the unit sphere of the penalty norm.
// Test oracle only; supports k <= 3.
inline double minimax_bruteforce(const SufficientSummary& s, DualNorm norm, int grid_n) {
    const int k = static_cast<int>(s.dim());
    if (k > 3) throw UnsupportedDimensionError("minimax_bruteforce: supports k <= 3");
    if (grid_n < 100) throw std::invalid_argument("minimax_bruteforce: grid_n must be >= 100");

    auto norm_of = [&](const Eigen::VectorXd& d) {
        return norm == DualNorm::Linf ? d.lpNorm<1>() : d.norm();
    };
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](Eigen::VectorXd d) {
        const double nd = norm_of(d);
        if (nd < 1e-12) return;
        d /= nd;
        best = std::min(best, (s.u * d).maxCoeff());
    };

    if (k == 1) {
        consider(Eigen::VectorXd::Constant(1, 1.0));
        consider(Eigen::VectorXd::Constant(1, -1.0));
    } else if (k == 2) {
        for (int i = 0; i < grid_n; ++i) {
            const double th = 2.0 * M_PI * i / grid_n;
            Eigen::VectorXd d(2);
            d << std::cos(th), std::sin(th);
            consider(d);
        }
    } else {
        const int n_el = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(grid_n))));
        const int n_az = 2 * n_el;
        for (int a = 0; a <= n_el; ++a) {
            const double ph = M_PI * a / n_el;
            for (int b = 0; b < n_az; ++b) {
                const double th = 2.0 * M_PI * b / n_az;
                Eigen::VectorXd d(3);
                d << std::cos(th) * std::sin(ph), std::sin(th) * std::sin(ph), std::cos(ph);
                consider(d);
            }
        }
    }
    return std::max(0.0, -best);
}

}  // namespace kliepkit
