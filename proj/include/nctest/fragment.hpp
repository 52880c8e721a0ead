#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nctest/cone.hpp"
#include "nctest/matrix.hpp"
#include "nctest/scalar.hpp"

namespace nctest {

/// Raw prepare-measure data: state and effect vectors in a common ambient
/// space, the unit effect, and an optional maximally mixed state.
template <class S>
struct GptFragment {
    std::size_t ambient_dim = 0;
    Matrix<S> states;   // one state per row
    Matrix<S> effects;  // one effect per row
    std::vector<S> unit_effect;
    std::optional<std::vector<S>> max_mixed;
};

template <class S>
void validate_fragment(const GptFragment<S>& frag, const Tol& tol, bool check_normalization = true)
{
    if (frag.states.rows() == 0 || frag.effects.rows() == 0)
        throw std::invalid_argument("fragment needs at least one state and one effect");
    if (frag.states.cols() != frag.ambient_dim || frag.effects.cols() != frag.ambient_dim ||
        frag.unit_effect.size() != frag.ambient_dim)
        throw std::invalid_argument("fragment rows must all have the ambient dimension");
    if (frag.max_mixed && frag.max_mixed->size() != frag.ambient_dim)
        throw std::invalid_argument("max_mixed_state must have the ambient dimension");
    if (!check_normalization) return;
    for (std::size_t i = 0; i < frag.states.rows(); ++i) {
        S p = dot(frag.unit_effect, frag.states.row(i));
        if (sign_of(p, tol) < 0 || sign_of(p - S(1), tol) > 0)
            throw std::invalid_argument("state " + std::to_string(i) +
                                        " has unit-effect pairing outside [0, 1]");
    }
}

namespace detail {

template <class T>
class Lazy {
public:
    template <class F>
    const T& get(F&& make) const
    {
        std::call_once(flag_, [&] { value_ = std::make_unique<T>(make()); });
        return *value_;
    }

private:
    mutable std::once_flag flag_;
    mutable std::unique_ptr<T> value_;
};

}  // namespace detail

/// The fragment re-expressed in the vector spaces its states and effects span:
/// inclusion/projection pairs, projected vectors, the probability rule
/// B = I_E^T · I_Omega, and (lazily) the facet matrices of the two cones.
template <class S>
class AccessibleFragment {
public:
    std::size_t ambient_dim = 0;
    std::size_t state_dim = 0;   // d_Omega
    std::size_t effect_dim = 0;  // d_E
    Matrix<S> incl_states;       // ambient_dim x d_Omega
    Matrix<S> incl_effects;      // ambient_dim x d_E
    Matrix<S> proj_states;       // d_Omega x ambient_dim
    Matrix<S> proj_effects;      // d_E x ambient_dim
    Matrix<S> acc_states;        // projected state rows
    Matrix<S> acc_effects;       // projected effect rows
    std::vector<S> acc_unit;     // u^A
    Matrix<S> rule;              // B, d_E x d_Omega
    bool unit_in_effect_span = true;
    Tol tol;

    const FacetMatrix<S>& state_facets() const
    {
        return state_facets_->get([this] {
            return dual_rays(make_cone_generators(acc_states, tol), tol);
        });
    }

    const FacetMatrix<S>& effect_facets() const
    {
        return effect_facets_->get([this] {
            return dual_rays(make_cone_generators(acc_effects, tol), tol);
        });
    }

private:
    std::shared_ptr<detail::Lazy<FacetMatrix<S>>> state_facets_ =
        std::make_shared<detail::Lazy<FacetMatrix<S>>>();
    std::shared_ptr<detail::Lazy<FacetMatrix<S>>> effect_facets_ =
        std::make_shared<detail::Lazy<FacetMatrix<S>>>();
};

/// Optional warning sink for non-fatal conditions (unit effect outside the
/// effect span, defaulted maximally mixed state).
using Warnings = std::vector<std::string>;

template <class S>
AccessibleFragment<S> accessible(const GptFragment<S>& frag, const Tol& tol = Tol{},
                                 Warnings* warnings = nullptr)
{
    AccessibleFragment<S> acc;
    acc.ambient_dim = frag.ambient_dim;
    acc.tol = tol;

    IdempotentSplit<S> s = split_idempotent(frag.states, frag.ambient_dim, tol);
    IdempotentSplit<S> e = split_idempotent(frag.effects, frag.ambient_dim, tol);
    acc.incl_states = std::move(s.inclusion);
    acc.proj_states = std::move(s.projection);
    acc.incl_effects = std::move(e.inclusion);
    acc.proj_effects = std::move(e.projection);
    acc.state_dim = acc.incl_states.cols();
    acc.effect_dim = acc.incl_effects.cols();
    if (acc.state_dim == 0) throw std::invalid_argument("state span is zero-dimensional");
    if (acc.effect_dim == 0) throw std::invalid_argument("effect span is zero-dimensional");

    acc.acc_states = frag.states * acc.proj_states.transpose();
    acc.acc_effects = frag.effects * acc.proj_effects.transpose();
    acc.acc_unit = mat_vec(acc.proj_effects, frag.unit_effect);
    acc.rule = acc.incl_effects.transpose() * acc.incl_states;

    std::vector<S> u_back = mat_vec(acc.incl_effects, acc.acc_unit);
    for (std::size_t j = 0; j < frag.ambient_dim; ++j) {
        if (sign_of(u_back[j] - frag.unit_effect[j], tol) != 0) {
            acc.unit_in_effect_span = false;
            if (warnings)
                warnings->push_back(
                    "unit effect lies outside the span of the effects; "
                    "simplex normalization may be unavailable");
            break;
        }
    }
    return acc;
}

/// The maximally mixed state used by the depolarizing rule: the explicit one
/// when given, otherwise the uniform mixture of the fragment's states.
template <class S>
std::vector<S> effective_max_mixed(const GptFragment<S>& frag, Warnings* warnings = nullptr)
{
    if (frag.max_mixed) return *frag.max_mixed;
    std::vector<S> m(frag.ambient_dim, S(0));
    for (std::size_t i = 0; i < frag.states.rows(); ++i)
        for (std::size_t j = 0; j < frag.ambient_dim; ++j) m[j] += frag.states(i, j);
    S inv = S(1) / S(static_cast<long>(frag.states.rows()));
    for (S& x : m) x = x * inv;
    if (warnings)
        warnings->push_back("maximally mixed state defaulted to the uniform mixture of the states");
    return m;
}

/// Depolarizing noise rule B_D = (I_E^T · m^T) · (u · I_Omega): the rank-one
/// rule that sends every state to the maximally mixed state weighted by its
/// normalization.
template <class S>
Matrix<S> depolarizing_rule(const AccessibleFragment<S>& acc, const GptFragment<S>& frag,
                            Warnings* warnings = nullptr)
{
    const Tol& tol = acc.tol;
    std::vector<S> m = effective_max_mixed(frag, warnings);

    std::vector<S> m_span = mat_vec(acc.proj_states, m);
    std::vector<S> m_back = mat_vec(acc.incl_states, m_span);
    for (std::size_t j = 0; j < frag.ambient_dim; ++j)
        if (sign_of(m_back[j] - m[j], tol) != 0)
            throw std::invalid_argument("maximally mixed state lies outside the span of the states");

    std::vector<S> col = mat_vec(acc.incl_effects.transpose(), m);   // d_E
    std::vector<S> row = vec_mat(frag.unit_effect, acc.incl_states);  // d_Omega
    Matrix<S> bd(acc.effect_dim, acc.state_dim);
    for (std::size_t i = 0; i < acc.effect_dim; ++i)
        for (std::size_t j = 0; j < acc.state_dim; ++j) bd(i, j) = col[i] * row[j];
    return bd;
}

/// r·B_D + (1-r)·B for a noise weight r in [0, 1].
template <class S>
Matrix<S> noisy_rule(const Matrix<S>& b, const Matrix<S>& b_noise, const S& r)
{
    if (b.rows() != b_noise.rows() || b.cols() != b_noise.cols())
        throw std::invalid_argument("noise rule shape mismatch");
    if (r < S(0) || r > S(1)) throw std::invalid_argument("noise weight outside [0, 1]");
    Matrix<S> out(b.rows(), b.cols());
    S one_minus = S(1) - r;
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            out(i, j) = r * b_noise(i, j) + one_minus * b(i, j);
    return out;
}

/// Noise rule I_E^T · N · I_Omega for an arbitrary ambient channel matrix N.
template <class S>
Matrix<S> custom_noise_rule(const AccessibleFragment<S>& acc, const Matrix<S>& channel)
{
    if (channel.rows() != acc.ambient_dim || channel.cols() != acc.ambient_dim)
        throw std::invalid_argument("noise channel must be ambient_dim x ambient_dim");
    return acc.incl_effects.transpose() * channel * acc.incl_states;
}

}  // namespace nctest
