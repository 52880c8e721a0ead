#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nctest/fragment.hpp"
#include "nctest/matrix.hpp"
#include "nctest/scalar.hpp"

namespace nctest {

/// Equality-form linear program: minimize c·x subject to A·x = b, x >= 0,
/// with optional per-variable upper bounds.
template <class S>
struct LinearProgram {
    std::size_t num_vars = 0;
    Matrix<S> a;
    std::vector<S> b;
    std::vector<S> c;
    std::vector<std::optional<S>> upper;  // empty or per-variable
};

enum class LpStatus { optimal, infeasible };

template <class S>
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<S> x;      // basic feasible optimal assignment
    S objective = S(0);
    bool basic = true;
    /// Farkas-type certificate over the rows of the (bound-expanded) system:
    /// y^T A <= 0 on every variable column and y^T b > 0. Exact mode only.
    std::vector<S> farkas;
    S phase1_residual = S(0);
};

namespace detail {

// Dense two-phase tableau simplex with Bland's rule. The same code runs over
// exact rationals and over doubles with eps-thresholded pivoting.
template <class S>
class SimplexTableau {
public:
    SimplexTableau(const Matrix<S>& a, const std::vector<S>& b, const std::vector<S>& c,
                   const Tol& tol)
        : tol_(tol), m_(a.rows()), n_(a.cols())
    {
        // Columns: structural vars, artificials, rhs. Rows: constraints,
        // phase-2 cost, phase-1 cost.
        cols_ = n_ + m_ + 1;
        t_.assign(m_ + 2, std::vector<S>(cols_, S(0)));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            int flip = sign_of(b[i], tol_) < 0 ? -1 : 1;
            row_sign_.push_back(flip);
            for (std::size_t j = 0; j < n_; ++j) t_[i][j] = S(flip) * a(i, j);
            t_[i][n_ + i] = S(1);
            t_[i][cols_ - 1] = S(flip) * b[i];
            basis_[i] = n_ + i;
        }
        for (std::size_t j = 0; j < n_; ++j) t_[m_][j] = c[j];
        // Phase-1 objective: sum of artificials, expressed over non-basic columns.
        for (std::size_t j = 0; j < cols_; ++j) {
            S acc(0);
            for (std::size_t i = 0; i < m_; ++i) acc += t_[i][j];
            t_[m_ + 1][j] = -acc;
        }
        for (std::size_t i = 0; i < m_; ++i) t_[m_ + 1][n_ + i] = S(0);
    }

    // Returns phase-1 optimum (sum of artificials at the end).
    S run_phase1()
    {
        iterate(m_ + 1, n_ + m_);
        return -t_[m_ + 1][cols_ - 1];
    }

    // Simplex multipliers of the phase-1 optimum, in the sign convention of
    // the original (sign-flipped) rows.
    std::vector<S> phase1_multipliers() const
    {
        std::vector<S> y(m_);
        for (std::size_t i = 0; i < m_; ++i)
            y[i] = S(row_sign_[i]) * (S(1) - t_[m_ + 1][n_ + i]);
        return y;
    }

    // Pivot basic artificials out (or drop their rows when redundant), then
    // optimize the phase-2 objective over structural columns only.
    void run_phase2()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            std::size_t enter = n_;
            for (std::size_t j = 0; j < n_; ++j)
                if (sign_of(t_[i][j], tol_) != 0) { enter = j; break; }
            if (enter < n_) {
                pivot(i, enter);
            } else {
                // Redundant row; neutralize it so it can never be selected.
                for (std::size_t j = 0; j < cols_; ++j) t_[i][j] = S(0);
                dead_rows_.push_back(i);
            }
        }
        iterate(m_, n_);
    }

    std::vector<S> extract(std::size_t num_vars) const
    {
        std::vector<S> x(num_vars, S(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < num_vars) x[basis_[i]] = t_[i][cols_ - 1];
        return x;
    }

    S objective() const { return -t_[m_][cols_ - 1]; }

private:
    void iterate(std::size_t cost_row, std::size_t max_col)
    {
        for (;;) {
            // Bland: entering = lowest-index column with negative reduced cost.
            std::size_t enter = max_col;
            for (std::size_t j = 0; j < max_col; ++j) {
                if (sign_of(t_[cost_row][j], tol_) < 0) { enter = j; break; }
            }
            if (enter == max_col) return;
            // Leaving: min ratio, ties by lowest basis index.
            std::size_t leave = m_;
            for (std::size_t i = 0; i < m_; ++i) {
                if (is_dead(i)) continue;
                if (sign_of(t_[i][enter], tol_) <= 0) continue;
                if (leave == m_) { leave = i; continue; }
                S lhs = t_[i][cols_ - 1] * t_[leave][enter];
                S rhs = t_[leave][cols_ - 1] * t_[i][enter];
                int cmp = sign_of(lhs - rhs, tol_);
                if (cmp < 0 || (cmp == 0 && basis_[i] < basis_[leave])) leave = i;
            }
            if (leave == m_) throw std::runtime_error("linear program is unbounded");
            pivot(leave, enter);
        }
    }

    bool is_dead(std::size_t i) const
    {
        for (std::size_t d : dead_rows_)
            if (d == i) return true;
        return false;
    }

    void pivot(std::size_t r, std::size_t c)
    {
        S inv = S(1) / t_[r][c];
        for (std::size_t j = 0; j < cols_; ++j) t_[r][j] = t_[r][j] * inv;
        t_[r][c] = S(1);
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i == r) continue;
            S f = t_[i][c];
            if (f == S(0)) continue;
            for (std::size_t j = 0; j < cols_; ++j) t_[i][j] -= f * t_[r][j];
            t_[i][c] = S(0);
        }
        basis_[r] = c;
    }

    Tol tol_;
    std::size_t m_, n_, cols_;
    std::vector<std::vector<S>> t_;
    std::vector<std::size_t> basis_;
    std::vector<int> row_sign_;
    std::vector<std::size_t> dead_rows_;
};

// Row-reduces [A | b], dropping redundant rows and recording the row
// transform so Farkas certificates can be mapped back to the input rows.
template <class S>
struct ReducedSystem {
    Matrix<S> a;
    std::vector<S> b;
    Matrix<S> transform;            // kept_rows x original_rows, a_red = E·a
    std::optional<std::vector<S>> direct_farkas;  // set when 0 = nonzero appears
};

template <class S>
ReducedSystem<S> reduce_rows(const Matrix<S>& a, const std::vector<S>& b, const Tol& tol)
{
    std::size_t m = a.rows(), n = a.cols();
    Matrix<S> aug(m, n + 1 + m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n) = b[i];
        aug(i, n + 1 + i) = S(1);
    }
    std::vector<std::size_t> pivots = detail::rref_in_place(aug, n + 1, tol);

    ReducedSystem<S> out;
    std::size_t kept = 0;
    for (std::size_t p : pivots)
        if (p < n) ++kept;

    for (std::size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] >= n) {
            // Row reduced to 0 = 1: its transform row is a Farkas certificate.
            std::vector<S> y(m);
            for (std::size_t i = 0; i < m; ++i) y[i] = aug(r, n + 1 + i);
            out.direct_farkas = std::move(y);
            return out;
        }
    }

    out.a = Matrix<S>(kept, n);
    out.b.resize(kept);
    out.transform = Matrix<S>(kept, m);
    for (std::size_t r = 0; r < kept; ++r) {
        for (std::size_t j = 0; j < n; ++j) out.a(r, j) = aug(r, j);
        out.b[r] = aug(r, n);
        for (std::size_t i = 0; i < m; ++i) out.transform(r, i) = aug(r, n + 1 + i);
    }
    return out;
}

}  // namespace detail

/// Two-phase primal simplex with Bland's rule. Returns a basic feasible
/// optimal assignment, or an infeasibility certificate.
template <class S>
LpSolution<S> solve_lp(const LinearProgram<S>& lp, const Tol& tol = Tol{})
{
    if (lp.a.rows() != lp.b.size() || lp.a.cols() != lp.num_vars ||
        lp.c.size() != lp.num_vars)
        throw std::invalid_argument("malformed linear program");
    if (!lp.upper.empty() && lp.upper.size() != lp.num_vars)
        throw std::invalid_argument("upper bound list length mismatch");

    // Expand upper bounds x_i <= u_i into rows x_i + slack = u_i.
    std::size_t n_ext = lp.num_vars;
    std::vector<std::pair<std::size_t, S>> bounds;
    for (std::size_t i = 0; i < lp.upper.size(); ++i)
        if (lp.upper[i]) bounds.emplace_back(i, *lp.upper[i]);
    std::size_t m_ext = lp.a.rows() + bounds.size();
    Matrix<S> a_ext(m_ext, n_ext + bounds.size());
    std::vector<S> b_ext(m_ext);
    std::vector<S> c_ext(n_ext + bounds.size(), S(0));
    for (std::size_t i = 0; i < lp.a.rows(); ++i) {
        for (std::size_t j = 0; j < n_ext; ++j) a_ext(i, j) = lp.a(i, j);
        b_ext[i] = lp.b[i];
    }
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        a_ext(lp.a.rows() + k, bounds[k].first) = S(1);
        a_ext(lp.a.rows() + k, n_ext + k) = S(1);
        b_ext[lp.a.rows() + k] = bounds[k].second;
    }
    for (std::size_t j = 0; j < n_ext; ++j) c_ext[j] = lp.c[j];

    // Exact row reduction removes redundant equality rows before phase 1.
    detail::ReducedSystem<S> red = detail::reduce_rows(a_ext, b_ext, tol);
    LpSolution<S> sol;
    if (red.direct_farkas) {
        sol.status = LpStatus::infeasible;
        std::vector<S> y = *red.direct_farkas;
        S yb(0);
        for (std::size_t i = 0; i < y.size(); ++i) yb += y[i] * b_ext[i];
        if (sign_of(yb, tol) < 0)
            for (S& v : y) v = -v;
        sol.farkas = std::move(y);
        sol.phase1_residual = S(1);
        return sol;
    }

    detail::SimplexTableau<S> tab(red.a, red.b, c_ext, tol);
    S p1 = tab.run_phase1();
    sol.phase1_residual = p1;
    if (sign_of(p1, tol) > 0) {
        sol.status = LpStatus::infeasible;
        std::vector<S> y_red = tab.phase1_multipliers();
        sol.farkas = vec_mat(y_red, red.transform);
        return sol;
    }

    tab.run_phase2();
    sol.status = LpStatus::optimal;
    sol.x = tab.extract(lp.num_vars);
    sol.objective = S(0);
    for (std::size_t j = 0; j < lp.num_vars; ++j) sol.objective += lp.c[j] * sol.x[j];
    sol.basic = true;
    return sol;
}

/// Nonnegative matrix certificate of classical explainability together with
/// the noise weight it was found at.
template <class S>
struct EmbeddingCertificate {
    Matrix<S> sigma;    // effect_facets x state_facets
    S r = S(0);
    S residual = S(0);  // max-abs violation of the defining equality
    bool basic = true;
};

template <class S>
struct ClassicalityResult {
    bool classical = false;
    EmbeddingCertificate<S> certificate;  // valid when classical
    std::vector<S> farkas;                // certificate of infeasibility otherwise
};

template <class S>
struct RobustnessResult {
    bool feasible = false;  // false: not embeddable even at full noise weight
    EmbeddingCertificate<S> certificate;
    std::vector<S> farkas;
};

namespace detail {

// sigma variables in row-major order; equality rows indexed by (p, q) entry
// of the d_E x d_Omega rule matrix.
template <class S>
void fill_sigma_columns(const Matrix<S>& h_eff, const Matrix<S>& h_states, Matrix<S>& a)
{
    std::size_t m = h_eff.rows(), n = h_states.rows();
    std::size_t d_e = h_eff.cols(), d_o = h_states.cols();
    for (std::size_t p = 0; p < d_e; ++p)
        for (std::size_t q = 0; q < d_o; ++q) {
            std::size_t row = p * d_o + q;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    a(row, i * n + j) = h_eff(i, p) * h_states(j, q);
        }
}

template <class S>
Matrix<S> sigma_from_assignment(const std::vector<S>& x, std::size_t m, std::size_t n)
{
    Matrix<S> sigma(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) sigma(i, j) = x[i * n + j];
    return sigma;
}

template <class S>
S certificate_residual(const Matrix<S>& h_eff, const Matrix<S>& sigma, const Matrix<S>& h_states,
                       const Matrix<S>& target)
{
    Matrix<S> lhs = h_eff.transpose() * sigma * h_states;
    S worst(0);
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t j = 0; j < lhs.cols(); ++j) {
            S diff = abs_of(lhs(i, j) - target(i, j));
            if (diff > worst) worst = diff;
        }
    return worst;
}

}  // namespace detail

/// Feasibility test for H_E^T · sigma · H_Omega = B with sigma >= 0.
/// The returned sigma is re-verified by direct multiplication.
template <class S>
ClassicalityResult<S> check_classicality(const AccessibleFragment<S>& acc)
{
    const Tol& tol = acc.tol;
    const Matrix<S>& h_states = acc.state_facets().h;
    const Matrix<S>& h_eff = acc.effect_facets().h;
    std::size_t m = h_eff.rows(), n = h_states.rows();

    LinearProgram<S> lp;
    lp.num_vars = m * n;
    lp.a = Matrix<S>(acc.effect_dim * acc.state_dim, lp.num_vars);
    detail::fill_sigma_columns(h_eff, h_states, lp.a);
    lp.b.resize(acc.effect_dim * acc.state_dim);
    for (std::size_t p = 0; p < acc.effect_dim; ++p)
        for (std::size_t q = 0; q < acc.state_dim; ++q)
            lp.b[p * acc.state_dim + q] = acc.rule(p, q);
    lp.c.assign(lp.num_vars, S(0));

    LpSolution<S> sol = solve_lp(lp, tol);
    ClassicalityResult<S> out;
    if (sol.status != LpStatus::optimal) {
        out.classical = false;
        out.farkas = std::move(sol.farkas);
        return out;
    }
    out.classical = true;
    out.certificate.sigma = detail::sigma_from_assignment(sol.x, m, n);
    out.certificate.r = S(0);
    out.certificate.basic = sol.basic;
    out.certificate.residual =
        detail::certificate_residual(h_eff, out.certificate.sigma, h_states, acc.rule);
    if constexpr (scalar_traits<S>::exact) {
        if (out.certificate.residual != S(0))
            throw std::logic_error("exact certificate fails verification");
    } else {
        if (scalar_traits<S>::to_double(out.certificate.residual) > 10 * tol.eps)
            throw std::logic_error("certificate residual exceeds tolerance");
    }
    return out;
}

/// Minimizes r in [0, 1] subject to r·B_D + (1-r)·B = H_E^T · sigma · H_Omega,
/// sigma >= 0. Rearranged so every constraint is linear:
/// H_E^T·sigma·H_Omega - r·(B_D - B) = B.
template <class S>
RobustnessResult<S> robustness(const AccessibleFragment<S>& acc, const Matrix<S>& b_noise)
{
    const Tol& tol = acc.tol;
    if (b_noise.rows() != acc.effect_dim || b_noise.cols() != acc.state_dim)
        throw std::invalid_argument("noise rule shape mismatch");
    const Matrix<S>& h_states = acc.state_facets().h;
    const Matrix<S>& h_eff = acc.effect_facets().h;
    std::size_t m = h_eff.rows(), n = h_states.rows();

    LinearProgram<S> lp;
    lp.num_vars = m * n + 1;
    std::size_t r_var = m * n;
    std::size_t rows = acc.effect_dim * acc.state_dim;
    lp.a = Matrix<S>(rows, lp.num_vars);
    detail::fill_sigma_columns(h_eff, h_states, lp.a);
    lp.b.resize(rows);
    for (std::size_t p = 0; p < acc.effect_dim; ++p)
        for (std::size_t q = 0; q < acc.state_dim; ++q) {
            std::size_t row = p * acc.state_dim + q;
            lp.a(row, r_var) = acc.rule(p, q) - b_noise(p, q);
            lp.b[row] = acc.rule(p, q);
        }
    lp.c.assign(lp.num_vars, S(0));
    lp.c[r_var] = S(1);
    lp.upper.assign(lp.num_vars, std::nullopt);
    lp.upper[r_var] = S(1);

    LpSolution<S> sol = solve_lp(lp, tol);
    RobustnessResult<S> out;
    if (sol.status != LpStatus::optimal) {
        out.feasible = false;
        out.farkas = std::move(sol.farkas);
        return out;
    }
    out.feasible = true;
    out.certificate.sigma = detail::sigma_from_assignment(sol.x, m, n);
    out.certificate.r = sol.x[r_var];
    if constexpr (!scalar_traits<S>::exact) {
        // Rounding can push a basic value microscopically outside [0, 1].
        if (out.certificate.r < 0) out.certificate.r = 0;
        if (out.certificate.r > 1) out.certificate.r = 1;
    }
    out.certificate.basic = sol.basic;
    Matrix<S> target = noisy_rule(acc.rule, b_noise, out.certificate.r);
    out.certificate.residual =
        detail::certificate_residual(h_eff, out.certificate.sigma, h_states, target);
    if constexpr (scalar_traits<S>::exact) {
        if (out.certificate.residual != S(0))
            throw std::logic_error("exact certificate fails verification");
    } else {
        if (scalar_traits<S>::to_double(out.certificate.residual) > 10 * tol.eps)
            throw std::logic_error("certificate residual exceeds tolerance");
    }
    return out;
}

}  // namespace nctest
