#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nctest/matrix.hpp"
#include "nctest/scalar.hpp"

namespace nctest {

/// Canonical representative of a ray, by positive rescaling only (a sign flip
/// would change the ray). Exact mode: primitive integer vector — clear the
/// denominators, divide by the gcd of the numerators. Approximate mode: unit
/// Euclidean norm with sub-eps entries snapped to zero.
template <class S>
void normalize_ray(std::vector<S>& v, const Tol& tol)
{
    if constexpr (scalar_traits<S>::exact) {
        mpz_class lcm_den(1);
        for (const Rational& x : v) {
            mpz_class den = x.get_den();
            mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), den.get_mpz_t());
        }
        mpz_class gcd_num(0);
        for (Rational& x : v) {
            x = x * Rational(lcm_den);
            x.canonicalize();
            mpz_class num = x.get_num();
            mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), num.get_mpz_t());
        }
        if (gcd_num == 0) return;
        for (Rational& x : v) {
            x = x / Rational(gcd_num);
            x.canonicalize();
        }
    } else {
        double norm2 = 0;
        for (double x : v) norm2 += x * x;
        double norm = std::sqrt(norm2);
        if (norm <= tol.eps) {
            std::fill(v.begin(), v.end(), 0.0);
            return;
        }
        for (double& x : v) {
            x /= norm;
            if (std::fabs(x) <= tol.eps) x = 0.0;
        }
    }
}

template <class S>
bool lex_less(const std::vector<S>& a, const std::vector<S>& b)
{
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
    }
    return a.size() < b.size();
}

/// Finite generator set of a full-dimensional convex cone, held in its span
/// coordinates. Rows are canonically normalized, deduplicated, and sorted;
/// zero generators are dropped.
template <class S>
struct ConeGenerators {
    std::size_t dim = 0;
    Matrix<S> generators;  // one generator per row
};

template <class S>
ConeGenerators<S> make_cone_generators(const Matrix<S>& rows, const Tol& tol = Tol{})
{
    std::vector<std::vector<S>> kept;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        std::vector<S> r = rows.row(i);
        normalize_ray(r, tol);
        bool zero = true;
        for (const S& x : r)
            if (sign_of(x, tol) != 0) { zero = false; break; }
        if (zero) continue;
        bool dup = false;
        for (const auto& k : kept) {
            if constexpr (scalar_traits<S>::exact) {
                if (r == k) { dup = true; break; }
            } else {
                double diff = 0;
                for (std::size_t j = 0; j < r.size(); ++j)
                    diff = std::max(diff, std::fabs(scalar_traits<S>::to_double(r[j] - k[j])));
                if (diff <= 10 * tol.eps) { dup = true; break; }
            }
        }
        if (!dup) kept.push_back(std::move(r));
    }
    std::sort(kept.begin(), kept.end(), lex_less<S>);
    ConeGenerators<S> cg;
    cg.dim = rows.cols();
    cg.generators = Matrix<S>::from_rows(std::move(kept));
    return cg;
}

/// Facet description of the cone: each row is one extreme ray of the dual
/// cone, so H·v >= 0 entrywise characterizes membership. A 0-row matrix is
/// the trivial map (cone equal to the whole space).
template <class S>
struct FacetMatrix {
    std::size_t dim = 0;
    Matrix<S> h;  // facet_count x dim
};

template <class S>
bool cone_contains(const FacetMatrix<S>& fm, const std::vector<S>& v, const Tol& tol = Tol{})
{
    if (v.size() != fm.dim) throw std::invalid_argument("cone_contains dimension mismatch");
    for (std::size_t i = 0; i < fm.h.rows(); ++i) {
        S acc(0);
        for (std::size_t j = 0; j < fm.dim; ++j) acc += fm.h(i, j) * v[j];
        if (sign_of(acc, tol) < 0) return false;
    }
    return true;
}

namespace detail {

template <class S>
struct DdRay {
    std::vector<S> v;
    std::vector<std::size_t> zero;  // indices (into processed order) of tight generators
};

template <class S>
bool subset_of(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

template <class S>
std::vector<std::size_t> zero_set(const std::vector<S>& ray, const Matrix<S>& gens,
                                  const std::vector<std::size_t>& processed, const Tol& tol)
{
    std::vector<std::size_t> z;
    for (std::size_t p = 0; p < processed.size(); ++p) {
        S acc(0);
        for (std::size_t j = 0; j < ray.size(); ++j) acc += gens(processed[p], j) * ray[j];
        if (sign_of(acc, tol) == 0) z.push_back(p);
    }
    return z;
}

// Combinatorial adjacency: no third extreme ray's zero set contains the
// intersection. Exact mode cross-checks with the algebraic rank condition.
template <class S>
bool dd_adjacent(const DdRay<S>& a, const DdRay<S>& b, const std::vector<DdRay<S>>& rays,
                 std::size_t ia, std::size_t ib, const Matrix<S>& gens,
                 const std::vector<std::size_t>& processed, std::size_t dim, const Tol& tol)
{
    std::vector<std::size_t> common;
    std::set_intersection(a.zero.begin(), a.zero.end(), b.zero.begin(), b.zero.end(),
                          std::back_inserter(common));
    bool combinatorial = true;
    for (std::size_t k = 0; k < rays.size(); ++k) {
        if (k == ia || k == ib) continue;
        if (subset_of<S>(common, rays[k].zero)) { combinatorial = false; break; }
    }
    if constexpr (scalar_traits<S>::exact) {
        Matrix<S> tight(common.size(), dim);
        for (std::size_t r = 0; r < common.size(); ++r)
            for (std::size_t j = 0; j < dim; ++j) tight(r, j) = gens(processed[common[r]], j);
        bool algebraic = rank(tight, tol) + 2 == dim;
        if (algebraic != combinatorial)
            throw std::logic_error("double description adjacency tests disagree");
    }
    return combinatorial;
}

}  // namespace detail

/// Extreme rays of the dual cone {h : h·g >= 0 for every generator g},
/// enumerated by the double description method (incremental intersection of
/// the half-spaces dual to the generators, lexicographic insertion order).
template <class S>
FacetMatrix<S> dual_rays(const ConeGenerators<S>& cg, const Tol& tol = Tol{})
{
    using detail::DdRay;
    const Matrix<S>& gens = cg.generators;
    const std::size_t dim = cg.dim;
    if (gens.rows() == 0) throw std::invalid_argument("empty generator set");
    if (rank(gens, tol) != dim)
        throw std::invalid_argument("generators do not span the ambient space");

    // Start from a simplicial cone cut out by a maximal independent subset.
    std::vector<std::size_t> basis_idx;
    {
        Matrix<S> acc(0, dim);
        for (std::size_t i = 0; i < gens.rows() && basis_idx.size() < dim; ++i) {
            Matrix<S> trial(acc.rows() + 1, dim);
            for (std::size_t r = 0; r < acc.rows(); ++r)
                for (std::size_t j = 0; j < dim; ++j) trial(r, j) = acc(r, j);
            for (std::size_t j = 0; j < dim; ++j) trial(acc.rows(), j) = gens(i, j);
            if (rank(trial, tol) == trial.rows()) {
                acc = trial;
                basis_idx.push_back(i);
            }
        }
    }

    std::vector<std::size_t> processed = basis_idx;
    Matrix<S> basis_rows(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t j = 0; j < dim; ++j) basis_rows(r, j) = gens(basis_idx[r], j);
    Matrix<S> inv = inverse(basis_rows, tol);

    std::vector<DdRay<S>> rays;
    for (std::size_t j = 0; j < dim; ++j) {
        DdRay<S> ray;
        ray.v = inv.col(j);
        normalize_ray(ray.v, tol);
        ray.zero = detail::zero_set(ray.v, gens, processed, tol);
        rays.push_back(std::move(ray));
    }

    for (std::size_t g = 0; g < gens.rows(); ++g) {
        if (std::find(basis_idx.begin(), basis_idx.end(), g) != basis_idx.end()) continue;
        std::vector<S> normal = gens.row(g);
        std::vector<int> side(rays.size());
        bool any_neg = false;
        for (std::size_t k = 0; k < rays.size(); ++k) {
            side[k] = sign_of(dot(normal, rays[k].v), tol);
            if (side[k] < 0) any_neg = true;
        }
        processed.push_back(g);
        if (!any_neg) {
            for (auto& ray : rays) ray.zero = detail::zero_set(ray.v, gens, processed, tol);
            continue;
        }
        std::vector<DdRay<S>> next;
        for (std::size_t k = 0; k < rays.size(); ++k)
            if (side[k] >= 0) next.push_back(rays[k]);
        for (std::size_t p = 0; p < rays.size(); ++p) {
            if (side[p] <= 0) continue;
            for (std::size_t n = 0; n < rays.size(); ++n) {
                if (side[n] >= 0) continue;
                if (!detail::dd_adjacent(rays[p], rays[n], rays, p, n, gens,
                                         std::vector<std::size_t>(processed.begin(),
                                                                  processed.end() - 1),
                                         dim, tol))
                    continue;
                S wp = dot(normal, rays[p].v);
                S wn = dot(normal, rays[n].v);
                DdRay<S> fresh;
                fresh.v.resize(dim);
                for (std::size_t j = 0; j < dim; ++j)
                    fresh.v[j] = wp * rays[n].v[j] - wn * rays[p].v[j];
                normalize_ray(fresh.v, tol);
                next.push_back(std::move(fresh));
            }
        }
        for (auto& ray : next) ray.zero = detail::zero_set(ray.v, gens, processed, tol);
        rays = std::move(next);
        if (rays.empty()) break;
    }

    std::vector<std::vector<S>> out;
    for (auto& ray : rays) {
        bool dup = false;
        for (const auto& seen : out) {
            if constexpr (scalar_traits<S>::exact) {
                if (seen == ray.v) { dup = true; break; }
            } else {
                double diff = 0;
                for (std::size_t j = 0; j < dim; ++j)
                    diff = std::max(diff, std::fabs(seen[j] - ray.v[j]));
                if (diff <= 10 * tol.eps) { dup = true; break; }
            }
        }
        if (!dup) out.push_back(ray.v);
    }
    std::sort(out.begin(), out.end(), lex_less<S>);

    FacetMatrix<S> fm;
    fm.dim = dim;
    fm.h = Matrix<S>::from_rows(std::move(out));

    // Duality soundness: every ray must be nonnegative on every generator,
    // and in exact mode each ray beyond a simplicial count must be tight
    // somewhere.
    for (std::size_t i = 0; i < fm.h.rows(); ++i) {
        bool tight = false;
        for (std::size_t r = 0; r < gens.rows(); ++r) {
            S acc(0);
            for (std::size_t j = 0; j < dim; ++j) acc += fm.h(i, j) * gens(r, j);
            int s = sign_of(acc, tol);
            if (s < 0) throw std::logic_error("dual ray violates a generator");
            if (s == 0) tight = true;
        }
        if constexpr (scalar_traits<S>::exact) {
            if (fm.h.rows() > dim && !tight)
                throw std::logic_error("dual ray lacks a facet witness");
        }
    }
    return fm;
}

}  // namespace nctest
