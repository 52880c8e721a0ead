#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "nctest/cone.hpp"
#include "nctest/lp.hpp"
#include "testers.hpp"

using namespace nctest;

namespace {

bool same_rows_any_order(const Matrix<Rational>& a, const Matrix<Rational>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    std::vector<std::vector<Rational>> ra, rb;
    for (std::size_t i = 0; i < a.rows(); ++i) ra.push_back(a.row(i));
    for (std::size_t i = 0; i < b.rows(); ++i) rb.push_back(b.row(i));
    std::sort(ra.begin(), ra.end(), lex_less<Rational>);
    std::sort(rb.begin(), rb.end(), lex_less<Rational>);
    return ra == rb;
}

}  // namespace

TEST_CASE("dual rays of the standard simplicial cone are the standard basis")
{
    ConeGenerators<Rational> cg = make_cone_generators(Matrix<Rational>::identity(3));
    FacetMatrix<Rational> fm = dual_rays(cg);
    REQUIRE(same_rows_any_order(fm.h, Matrix<Rational>::identity(3)));
}

TEST_CASE("dual rays of the qubit X/Z state cone are the four square facets")
{
    FacetMatrix<Rational> fm = dual_rays(make_cone_generators(testers::qubit_xz().states));
    Matrix<Rational> expected{{Rational(1), Rational(1), Rational(1)},
                              {Rational(1), Rational(1), Rational(-1)},
                              {Rational(1), Rational(-1), Rational(1)},
                              {Rational(1), Rational(-1), Rational(-1)}};
    REQUIRE(same_rows_any_order(fm.h, expected));
}

TEST_CASE("dual rays of the boxworld effect cone")
{
    FacetMatrix<Rational> fm = dual_rays(make_cone_generators(testers::boxworld().effects));
    Matrix<Rational> expected{{Rational(1), Rational(0), Rational(1)},
                              {Rational(1), Rational(0), Rational(-1)},
                              {Rational(1), Rational(1), Rational(0)},
                              {Rational(1), Rational(-1), Rational(0)}};
    REQUIRE(same_rows_any_order(fm.h, expected));
}

TEST_CASE("cone of the whole space has an empty facet matrix")
{
    Matrix<Rational> gens{{Rational(1), Rational(0)},
                          {Rational(-1), Rational(0)},
                          {Rational(0), Rational(1)},
                          {Rational(0), Rational(-1)}};
    FacetMatrix<Rational> fm = dual_rays(make_cone_generators(gens));
    REQUIRE(fm.h.rows() == 0);
    // Every vector is then a member.
    REQUIRE(cone_contains(fm, {Rational(-5), Rational(3)}));
}

TEST_CASE("non-spanning generators are rejected")
{
    Matrix<Rational> gens{{Rational(1), Rational(0), Rational(0)},
                          {Rational(0), Rational(1), Rational(0)}};
    REQUIRE_THROWS_AS(dual_rays(make_cone_generators(gens)), std::invalid_argument);
    REQUIRE_THROWS_AS(dual_rays(make_cone_generators(Matrix<Rational>(0, 3))),
                      std::invalid_argument);
}

TEST_CASE("generators and their negated sum classify as expected")
{
    ConeGenerators<Rational> cg = make_cone_generators(testers::boxworld().states);
    FacetMatrix<Rational> fm = dual_rays(cg);
    std::vector<Rational> sum(3, Rational(0));
    for (std::size_t i = 0; i < cg.generators.rows(); ++i)
        for (std::size_t j = 0; j < 3; ++j) sum[j] += cg.generators(i, j);
    REQUIRE(cone_contains(fm, cg.generators.row(0)));
    REQUIRE(cone_contains(fm, sum));
    for (Rational& x : sum) x = -x;
    REQUIRE_FALSE(cone_contains(fm, sum));
}

TEST_CASE("non-pointed primal cones are handled")
{
    // Contains the line through [0, 1]; dual rays collapse onto the x axis.
    Matrix<Rational> gens{{Rational(0), Rational(1)},
                          {Rational(0), Rational(-1)},
                          {Rational(1), Rational(0)}};
    FacetMatrix<Rational> fm = dual_rays(make_cone_generators(gens));
    REQUIRE(fm.h.rows() == 1);
    REQUIRE(fm.h(0, 0) == Rational(1));
    REQUIRE(fm.h(0, 1) == Rational(0));
}

TEST_CASE("facet extremality: dropping any row strictly enlarges the cone")
{
    testers::Rng rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<std::size_t> dim_dist(2, 4);
        std::size_t dim = dim_dist(rng);
        std::uniform_int_distribution<std::size_t> count_dist(dim, 7);
        Matrix<Rational> gens = testers::random_spanning_generators(rng, dim, count_dist(rng));
        FacetMatrix<Rational> fm = dual_rays(make_cone_generators(gens));
        if (fm.h.rows() < 2) continue;
        for (std::size_t drop = 0; drop < fm.h.rows(); ++drop) {
            // The dropped facet's own ray direction comes from the dual-of-dual:
            // a witness passing all other facets but failing the dropped one
            // exists iff the row was extreme. Search among dual rays of the
            // remaining facet normals' polar... simpler: LP witness.
            LinearProgram<Rational> lp;
            // Find v with h_i·v >= 0 for i != drop and h_drop·v <= -1.
            // Variables: v split into positive and negative parts.
            std::size_t n = 2 * dim + 1;  // v+ , v-, slack for the strict row
            lp.num_vars = n;
            std::size_t rows = fm.h.rows();
            lp.a = Matrix<Rational>(1, n);
            lp.b = {Rational(-1)};
            for (std::size_t j = 0; j < dim; ++j) {
                lp.a(0, j) = fm.h(drop, j);
                lp.a(0, dim + j) = -fm.h(drop, j);
            }
            lp.a(0, 2 * dim) = Rational(1);
            // Remaining facets as inequalities need slack variables; rebuild
            // as equalities h_i·v - s_i = 0.
            Matrix<Rational> a2(rows, n + rows - 1);
            std::vector<Rational> b2(rows, Rational(0));
            for (std::size_t j = 0; j < n; ++j) a2(0, j) = lp.a(0, j);
            b2[0] = Rational(-1);
            std::size_t slack = n;
            std::size_t r = 1;
            for (std::size_t i = 0; i < rows; ++i) {
                if (i == drop) continue;
                for (std::size_t j = 0; j < dim; ++j) {
                    a2(r, j) = fm.h(i, j);
                    a2(r, dim + j) = -fm.h(i, j);
                }
                a2(r, slack++) = Rational(-1);
                ++r;
            }
            LinearProgram<Rational> lp2;
            lp2.num_vars = a2.cols();
            lp2.a = a2;
            lp2.b = b2;
            lp2.c.assign(lp2.num_vars, Rational(0));
            REQUIRE(solve_lp(lp2).status == LpStatus::optimal);
        }
    }
}

TEST_CASE("membership agrees with the LP oracle on random cones")
{
    testers::Rng rng(77);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        std::uniform_int_distribution<std::size_t> dim_dist(1, 4);
        std::size_t dim = dim_dist(rng);
        std::uniform_int_distribution<std::size_t> count_dist(dim, 8);
        Matrix<Rational> gens = testers::random_spanning_generators(rng, dim, count_dist(rng));
        FacetMatrix<Rational> fm = dual_rays(make_cone_generators(gens));
        for (int v = 0; v < 8; ++v) {
            std::vector<Rational> probe(dim);
            if (v % 2 == 0) {
                // Random nonnegative combination: inside by construction.
                std::uniform_int_distribution<int> coeff(0, 3);
                for (std::size_t j = 0; j < dim; ++j) probe[j] = Rational(0);
                for (std::size_t i = 0; i < gens.rows(); ++i) {
                    Rational c(coeff(rng));
                    for (std::size_t j = 0; j < dim; ++j) probe[j] += c * gens(i, j);
                }
            } else {
                for (std::size_t j = 0; j < dim; ++j) probe[j] = testers::random_rational(rng);
            }
            bool via_facets = cone_contains(fm, probe);
            bool via_lp = testers::lp_cone_member(gens, probe);
            REQUIRE(via_facets == via_lp);
            ++checked;
        }
    }
    REQUIRE(checked >= 400);
}

TEST_CASE("double description matches the brute-force ray enumeration oracle")
{
    testers::Rng rng(1848);
    for (int trial = 0; trial < 120; ++trial) {
        std::uniform_int_distribution<std::size_t> dim_dist(1, 4);
        std::size_t dim = dim_dist(rng);
        std::uniform_int_distribution<std::size_t> count_dist(dim, 8);
        ConeGenerators<Rational> cg = make_cone_generators(
            testers::random_spanning_generators(rng, dim, count_dist(rng)));
        FacetMatrix<Rational> fm = dual_rays(cg);
        std::vector<std::vector<Rational>> oracle =
            testers::brute_force_dual_rays(cg.generators);
        std::vector<std::vector<Rational>> got;
        for (std::size_t i = 0; i < fm.h.rows(); ++i) got.push_back(fm.h.row(i));
        std::sort(got.begin(), got.end(), lex_less<Rational>);
        REQUIRE(got == oracle);
    }
}

TEST_CASE("rescaling a generator leaves the rays unchanged")
{
    testers::Rng rng(300);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix<Rational> gens = testers::random_spanning_generators(rng, 3, 5);
        FacetMatrix<Rational> before = dual_rays(make_cone_generators(gens));
        Matrix<Rational> scaled = gens;
        std::uniform_int_distribution<int> pick(0, 4);
        std::uniform_int_distribution<int> factor(1, 5);
        int row = pick(rng);
        Rational f(factor(rng), factor(rng));
        f.canonicalize();
        for (std::size_t j = 0; j < 3; ++j) scaled(row, j) = f * scaled(row, j);
        FacetMatrix<Rational> after = dual_rays(make_cone_generators(scaled));
        REQUIRE(same_rows_any_order(before.h, after.h));
    }
}

TEST_CASE("float-mode dual rays track exact-mode rays on random cones")
{
    testers::Rng rng(6174);
    Tol tol;
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> dim_dist(2, 4);
        std::size_t dim = dim_dist(rng);
        std::uniform_int_distribution<std::size_t> count_dist(dim, 7);
        Matrix<Rational> gens = testers::random_spanning_generators(rng, dim, count_dist(rng));
        FacetMatrix<Rational> exact = dual_rays(make_cone_generators(gens));

        Matrix<double> gd(gens.rows(), dim);
        for (std::size_t i = 0; i < gens.rows(); ++i)
            for (std::size_t j = 0; j < dim; ++j) gd(i, j) = gens(i, j).get_d();
        FacetMatrix<double> approx = dual_rays(make_cone_generators(gd, tol), tol);

        REQUIRE(approx.h.rows() == exact.h.rows());
        for (std::size_t i = 0; i < exact.h.rows(); ++i) {
            std::vector<double> want(dim);
            double norm = 0;
            for (std::size_t j = 0; j < dim; ++j) {
                want[j] = exact.h(i, j).get_d();
                norm += want[j] * want[j];
            }
            norm = std::sqrt(norm);
            bool found = false;
            for (std::size_t k = 0; k < approx.h.rows() && !found; ++k) {
                double diff = 0;
                for (std::size_t j = 0; j < dim; ++j)
                    diff = std::max(diff, std::fabs(approx.h(k, j) - want[j] / norm));
                found = diff < 1e-7;
            }
            REQUIRE(found);
        }
    }
}

TEST_CASE("float-mode dual rays match exact-mode rays on the square cone")
{
    GptFragment<double> frag = testers::to_double_fragment(testers::boxworld());
    Tol tol;
    FacetMatrix<double> fm = dual_rays(make_cone_generators(frag.effects, tol), tol);
    REQUIRE(fm.h.rows() == 4);
    FacetMatrix<Rational> exact = dual_rays(make_cone_generators(testers::boxworld().effects));
    for (std::size_t i = 0; i < 4; ++i) {
        // Compare after unit-normalizing the exact rays.
        std::vector<double> want;
        double norm = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            double x = exact.h(i, j).get_d();
            norm += x * x;
            want.push_back(x);
        }
        norm = std::sqrt(norm);
        bool found = false;
        for (std::size_t k = 0; k < 4 && !found; ++k) {
            double diff = 0;
            for (std::size_t j = 0; j < 3; ++j)
                diff = std::max(diff, std::fabs(fm.h(k, j) - want[j] / norm));
            found = diff < 1e-7;
        }
        REQUIRE(found);
    }
}
