#include <catch2/catch_amalgamated.hpp>

#include "nctest/lp.hpp"
#include "nctest/fragment.hpp"
#include "testers.hpp"

using namespace nctest;

TEST_CASE("minimal feasible program: x = 1")
{
    LinearProgram<Rational> lp;
    lp.num_vars = 1;
    lp.a = Matrix<Rational>{{Rational(1)}};
    lp.b = {Rational(1)};
    lp.c = {Rational(0)};
    LpSolution<Rational> sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE(sol.x[0] == Rational(1));
}

TEST_CASE("infeasible program yields the expected certificate")
{
    LinearProgram<Rational> lp;
    lp.num_vars = 2;
    lp.a = Matrix<Rational>{{Rational(1), Rational(1)}};
    lp.b = {Rational(-1)};
    lp.c = {Rational(0), Rational(0)};
    LpSolution<Rational> sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::infeasible);
    REQUIRE(sol.farkas.size() == 1);
    // y^T A <= 0 on the variable columns and y^T b > 0.
    REQUIRE(sol.farkas[0] * Rational(1) <= 0);
    REQUIRE(sol.farkas[0] * Rational(-1) > 0);
    REQUIRE(sol.farkas[0] == Rational(-1));
}

TEST_CASE("redundant rows are tolerated")
{
    LinearProgram<Rational> lp;
    lp.num_vars = 2;
    lp.a = Matrix<Rational>{{Rational(1), Rational(1)},
                            {Rational(2), Rational(2)},
                            {Rational(1), Rational(0)}};
    lp.b = {Rational(3), Rational(6), Rational(1)};
    lp.c = {Rational(1), Rational(1)};
    LpSolution<Rational> sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE(sol.x[0] == Rational(1));
    REQUIRE(sol.x[1] == Rational(2));
}

TEST_CASE("upper bounds are honored")
{
    LinearProgram<Rational> lp;
    lp.num_vars = 2;
    lp.a = Matrix<Rational>{{Rational(1), Rational(-1)}};
    lp.b = {Rational(0)};
    lp.c = {Rational(-1), Rational(0)};  // maximize x subject to x = y, y <= 1/2
    lp.upper = {std::nullopt, Rational(1, 2)};
    LpSolution<Rational> sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE(sol.x[0] == Rational(1, 2));
}

TEST_CASE("degenerate vertices do not cycle under Bland's rule")
{
    // Several ties at zero-valued basic variables.
    LinearProgram<Rational> lp;
    lp.num_vars = 4;
    lp.a = Matrix<Rational>{{Rational(1), Rational(1), Rational(1), Rational(0)},
                            {Rational(1), Rational(-1), Rational(0), Rational(1)},
                            {Rational(2), Rational(0), Rational(1), Rational(1)}};
    lp.b = {Rational(0), Rational(0), Rational(0)};
    lp.c = {Rational(-1), Rational(0), Rational(0), Rational(0)};
    LpSolution<Rational> sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE(sol.objective == Rational(0));
    for (const Rational& x : sol.x) REQUIRE(x == Rational(0));
}

TEST_CASE("unbounded objective throws")
{
    LinearProgram<Rational> lp;
    lp.num_vars = 2;
    lp.a = Matrix<Rational>{{Rational(1), Rational(-1)}};
    lp.b = {Rational(0)};
    lp.c = {Rational(-1), Rational(0)};
    REQUIRE_THROWS_AS(solve_lp(lp), std::runtime_error);
}

TEST_CASE("a single state-effect pair with probability in (0, 1] is classical")
{
    for (Rational p : {Rational(3, 5), Rational(1), Rational(1, 7)}) {
        GptFragment<Rational> frag;
        frag.ambient_dim = 2;
        frag.states = Matrix<Rational>{{Rational(1), Rational(1)}};
        frag.effects = Matrix<Rational>{{p, Rational(0)}};
        frag.unit_effect = {Rational(1), Rational(0)};
        AccessibleFragment<Rational> acc = accessible(frag);
        ClassicalityResult<Rational> verdict = check_classicality(acc);
        REQUIRE(verdict.classical);
        // One ontic state suffices: sigma is a single scalar.
        REQUIRE(verdict.certificate.sigma.rows() == 1);
        REQUIRE(verdict.certificate.sigma.cols() == 1);
        REQUIRE(verdict.certificate.sigma(0, 0) >= 0);
    }
}

TEST_CASE("boxworld classicality test returns an infeasibility certificate")
{
    AccessibleFragment<Rational> acc = accessible(testers::boxworld());
    ClassicalityResult<Rational> verdict = check_classicality(acc);
    REQUIRE_FALSE(verdict.classical);
    REQUIRE_FALSE(verdict.farkas.empty());
}

TEST_CASE("random small programs agree with the brute-force vertex oracle")
{
    testers::Rng rng(4242);
    int optimal_seen = 0, infeasible_seen = 0;
    for (int trial = 0; trial < 250; ++trial) {
        std::uniform_int_distribution<std::size_t> n_dist(1, 6), m_dist(1, 4);
        std::uniform_int_distribution<int> c_dist(0, 5);
        LinearProgram<Rational> lp;
        lp.num_vars = n_dist(rng);
        std::size_t m = m_dist(rng);
        lp.a = testers::random_matrix(rng, m, lp.num_vars);
        lp.b.clear();
        for (std::size_t i = 0; i < m; ++i) lp.b.push_back(testers::random_rational(rng));
        lp.c.clear();
        for (std::size_t j = 0; j < lp.num_vars; ++j) lp.c.push_back(Rational(c_dist(rng)));

        LpSolution<Rational> sol = solve_lp(lp);
        testers::BruteLpResult oracle = testers::brute_force_lp(lp);
        if (oracle.feasible) {
            ++optimal_seen;
            REQUIRE(sol.status == LpStatus::optimal);
            REQUIRE(sol.objective == oracle.objective);
            // The returned assignment is feasible and nonnegative.
            for (const Rational& x : sol.x) REQUIRE(x >= 0);
            std::vector<Rational> ax = mat_vec(lp.a, sol.x);
            REQUIRE(ax == lp.b);
        } else {
            ++infeasible_seen;
            REQUIRE(sol.status == LpStatus::infeasible);
            // Verify the certificate.
            REQUIRE(sol.farkas.size() == m);
            std::vector<Rational> ya = vec_mat(sol.farkas, lp.a);
            for (const Rational& v : ya) REQUIRE(v <= 0);
            Rational yb(0);
            for (std::size_t i = 0; i < m; ++i) yb += sol.farkas[i] * lp.b[i];
            REQUIRE(yb > 0);
        }
    }
    REQUIRE(optimal_seen > 20);
    REQUIRE(infeasible_seen > 20);
}

TEST_CASE("float mode agrees with exact mode on random programs")
{
    testers::Rng rng(888);
    Tol tol;
    for (int trial = 0; trial < 120; ++trial) {
        std::uniform_int_distribution<std::size_t> n_dist(1, 6), m_dist(1, 4);
        std::uniform_int_distribution<int> c_dist(0, 5);
        LinearProgram<Rational> lp;
        lp.num_vars = n_dist(rng);
        std::size_t m = m_dist(rng);
        lp.a = testers::random_matrix(rng, m, lp.num_vars);
        lp.b.clear();
        for (std::size_t i = 0; i < m; ++i) lp.b.push_back(testers::random_rational(rng));
        lp.c.clear();
        for (std::size_t j = 0; j < lp.num_vars; ++j) lp.c.push_back(Rational(c_dist(rng)));

        LinearProgram<double> lpd;
        lpd.num_vars = lp.num_vars;
        lpd.a = Matrix<double>(m, lp.num_vars);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < lp.num_vars; ++j) lpd.a(i, j) = lp.a(i, j).get_d();
        for (const Rational& v : lp.b) lpd.b.push_back(v.get_d());
        for (const Rational& v : lp.c) lpd.c.push_back(v.get_d());

        LpSolution<Rational> exact = solve_lp(lp);
        LpSolution<double> approx = solve_lp(lpd, tol);
        REQUIRE((exact.status == LpStatus::optimal) == (approx.status == LpStatus::optimal));
        if (exact.status == LpStatus::optimal)
            REQUIRE(std::fabs(exact.objective.get_d() - approx.objective) < 1e-6);
    }
}
