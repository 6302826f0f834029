#pragma once

// Dense two-phase tableau simplex for small and mid-sized linear programs.
//
//   minimize c . x   subject to   A x {<=,>=,==} b,   x >= 0.
//
// Rows with negative right-hand sides are sign-flipped up front.  Phase 1
// drives artificial variables (one per >= / == row) out of the basis;
// feasibility is declared when the phase-1 objective falls below
// 1e-10 * (1 + max|b|).  Entering columns follow Dantzig (most negative
// reduced cost) with an automatic switch to Bland's rule after a streak of
// degenerate pivots, which restores the anti-cycling guarantee.
//
// Duals returned are the simplex multipliers y = c_B B^{-1} expressed for
// the ORIGINAL row orientation: they satisfy b . y == c . x* at optimality
// and reduced costs c - A'y >= 0 over structural columns.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "kliepkit/errors.hpp"

namespace kliepkit::lp {

enum class RowType { LE, GE, EQ };
enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

struct Problem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    std::vector<RowType> rows;
};

struct Solution {
    Status status = Status::IterLimit;
    Eigen::VectorXd x;  // structural variables
    Eigen::VectorXd y;  // row duals, original orientation
    double objective = std::numeric_limits<double>::quiet_NaN();
    double infeasibility = 0.0;  // phase-1 optimum when Status::Infeasible
    int iterations = 0;
};

namespace detail {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Simplex {
    static constexpr double kCostTol = 1e-9;
    static constexpr double kPivotTol = 1e-9;
    static constexpr int kDegenerateStreakLimit = 64;

    Tableau M;                    // m x (ncols + 1), last column is the rhs
    Eigen::RowVectorXd r1, r2;    // phase-1 / phase-2 reduced-cost rows
    std::vector<int> basis;       // basic column of each row
    std::vector<char> artificial; // per-column flag
    std::vector<char> flipped;    // per-row: sign changed relative to input
    std::vector<int> init_col;    // per-row initial identity column (for duals)
    int n = 0, m = 0, ncols = 0;
    int iterations = 0;
    int degenerate_streak = 0;

    explicit Simplex(const Problem& p) {
        m = static_cast<int>(p.A.rows());
        n = static_cast<int>(p.A.cols());
        if (m == 0 || n == 0) throw DimensionError("lp::solve: empty problem");
        if (p.b.size() != m || p.c.size() != n || static_cast<int>(p.rows.size()) != m)
            throw DimensionError("lp::solve: inconsistent problem shapes");
        if (!p.A.allFinite() || !p.b.allFinite() || !p.c.allFinite())
            throw NumericalError("lp::solve: non-finite problem data");

        std::vector<RowType> types(p.rows);
        flipped.assign(m, 0);
        Eigen::MatrixXd A = p.A;
        Eigen::VectorXd b = p.b;
        for (int i = 0; i < m; ++i) {
            if (b[i] < 0) {
                A.row(i) = -A.row(i);
                b[i] = -b[i];
                flipped[i] = 1;
                if (types[i] == RowType::LE) types[i] = RowType::GE;
                else if (types[i] == RowType::GE) types[i] = RowType::LE;
            }
        }

        int extra = 0;
        for (RowType t : types) extra += (t == RowType::GE) ? 2 : 1;
        ncols = n + extra;
        M.setZero(m, ncols + 1);
        M.leftCols(n) = A;
        M.col(ncols) = b;
        artificial.assign(ncols, 0);
        basis.assign(m, -1);
        init_col.assign(m, -1);

        int next = n;
        for (int i = 0; i < m; ++i) {
            switch (types[i]) {
                case RowType::LE:
                    M(i, next) = 1.0;
                    basis[i] = next;
                    init_col[i] = next;
                    ++next;
                    break;
                case RowType::GE:
                    M(i, next) = -1.0;  // surplus
                    ++next;
                    M(i, next) = 1.0;  // artificial
                    artificial[next] = 1;
                    basis[i] = next;
                    init_col[i] = next;
                    ++next;
                    break;
                case RowType::EQ:
                    M(i, next) = 1.0;  // artificial
                    artificial[next] = 1;
                    basis[i] = next;
                    init_col[i] = next;
                    ++next;
                    break;
            }
        }

        // Price out the initial basis in both cost rows.
        r1.setZero(ncols + 1);
        for (int i = 0; i < m; ++i)
            if (artificial[basis[i]]) r1 -= M.row(i);
        r2.setZero(ncols + 1);
        r2.head(n) = p.c;
    }

    void pivot(int row, int col) {
        M.row(row) /= M(row, col);
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = M(i, col);
            if (f != 0.0) M.row(i) -= f * M.row(row);
        }
        if (r1[col] != 0.0) r1 -= r1[col] * M.row(row);
        if (r2[col] != 0.0) r2 -= r2[col] * M.row(row);
        basis[row] = col;
        ++iterations;
    }

    // One simplex phase on reduced-cost row r.  Artificial columns never
    // enter.  Returns Optimal when no improving column remains.
    Status run_phase(Eigen::RowVectorXd& r, int max_iters) {
        std::vector<char> in_basis(ncols, 0);
        for (int b : basis) in_basis[b] = 1;
        while (iterations < max_iters) {
            const bool bland = degenerate_streak >= kDegenerateStreakLimit;
            int enter = -1;
            double best = -kCostTol;
            for (int j = 0; j < ncols; ++j) {
                if (artificial[j] || in_basis[j]) continue;
                const double rj = r[j];
                if (rj < best) {
                    enter = j;
                    if (bland) break;  // first eligible index
                    best = rj;
                }
            }
            if (enter < 0) return Status::Optimal;

            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                const double a = M(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = M(i, ncols) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return Status::Unbounded;

            degenerate_streak = (best_ratio <= 1e-12) ? degenerate_streak + 1 : 0;
            in_basis[basis[leave]] = 0;
            in_basis[enter] = 1;
            pivot(leave, enter);
        }
        return Status::IterLimit;
    }

    double artificial_mass() const {
        double s = 0;
        for (int i = 0; i < m; ++i)
            if (artificial[basis[i]]) s += std::max(0.0, M(i, ncols));
        return s;
    }

    // After phase 1, pivot zero-valued artificials out of the basis where a
    // usable column exists; rows that admit none are redundant and keep a
    // zero artificial harmlessly.
    void expel_artificials() {
        for (int i = 0; i < m; ++i) {
            if (!artificial[basis[i]]) continue;
            for (int j = 0; j < ncols; ++j) {
                if (artificial[j]) continue;
                bool basic = false;
                for (int t = 0; t < m; ++t)
                    if (basis[t] == j) { basic = true; break; }
                if (basic) continue;
                if (std::abs(M(i, j)) > 1e-7) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }
};

}  // namespace detail

inline Solution solve(const Problem& p, int max_iters = 0) {
    detail::Simplex s(p);
    if (max_iters <= 0) max_iters = 200 * (s.m + s.ncols + 10);

    Solution out;
    const double feas_tol = 1e-10 * (1.0 + p.b.cwiseAbs().maxCoeff());

    bool need_phase1 = false;
    for (int b : s.basis)
        if (s.artificial[b]) { need_phase1 = true; break; }

    if (need_phase1) {
        Status st = s.run_phase(s.r1, max_iters);
        out.iterations = s.iterations;
        if (st == Status::IterLimit) {
            out.status = Status::IterLimit;
            return out;
        }
        const double infeas = s.artificial_mass();
        if (infeas > feas_tol) {
            out.status = Status::Infeasible;
            out.infeasibility = infeas;
            return out;
        }
        s.expel_artificials();
    }

    Status st = s.run_phase(s.r2, max_iters);
    out.iterations = s.iterations;
    out.status = st;
    if (st != Status::Optimal && st != Status::IterLimit) return out;

    out.x.setZero(s.n);
    for (int i = 0; i < s.m; ++i)
        if (s.basis[i] < s.n) out.x[s.basis[i]] = std::max(0.0, s.M(i, s.ncols));
    out.objective = p.c.dot(out.x);

    out.y.setZero(s.m);
    for (int i = 0; i < s.m; ++i) {
        double yi = -s.r2[s.init_col[i]];
        out.y[i] = s.flipped[i] ? -yi : yi;
    }
    return out;
}

}  // namespace kliepkit::lp
