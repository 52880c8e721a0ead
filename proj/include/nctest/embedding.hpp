#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nctest/fragment.hpp"
#include "nctest/lp.hpp"
#include "nctest/matrix.hpp"

namespace nctest {

/// Linear maps tau sending states and effects to entrywise-nonnegative
/// vectors over a provisional ontic index set, with
/// tau_effects^T · tau_states equal to the target probability rule.
template <class S>
struct SimplicialConeEmbedding {
    Matrix<S> tau_states;   // ontic_count x d_Omega
    Matrix<S> tau_effects;  // ontic_count x d_E
    Matrix<S> target_rule;  // d_E x d_Omega
};

/// A simplicial-cone embedding whose effect map sends the unit effect to
/// the all-ones vector.
template <class S>
struct SimplexEmbedding {
    Matrix<S> tau_states;
    Matrix<S> tau_effects;
    Matrix<S> target_rule;
    std::vector<std::size_t> kept;  // surviving ontic indices of the source embedding
};

/// Noncontextual ontological model: epistemic-state rows (one per state) and
/// response-function rows (one per effect) over a common ontic set, valid at
/// noise weight r.
template <class S>
struct OntologicalModel {
    std::size_t ontic_count = 0;
    Matrix<S> epistemic;  // states x ontic_count
    Matrix<S> response;   // effects x ontic_count
    S noise_weight = S(0);
};

/// Fixed split of a verified certificate into a simplicial-cone embedding:
/// tau_states = H_Omega and tau_effects = sigma^T · H_E, so the ontic count
/// is the state-cone facet count.
template <class S>
SimplicialConeEmbedding<S> embedding_from_certificate(const AccessibleFragment<S>& acc,
                                                      const EmbeddingCertificate<S>& cert,
                                                      const Matrix<S>& target_rule)
{
    const Tol& tol = acc.tol;
    const Matrix<S>& h_states = acc.state_facets().h;
    const Matrix<S>& h_eff = acc.effect_facets().h;
    Matrix<S> check = h_eff.transpose() * cert.sigma * h_states;
    for (std::size_t i = 0; i < check.rows(); ++i)
        for (std::size_t j = 0; j < check.cols(); ++j)
            if (sign_of(check(i, j) - target_rule(i, j), tol) != 0)
                throw std::invalid_argument("certificate does not reproduce the target rule");
    for (std::size_t i = 0; i < cert.sigma.rows(); ++i)
        for (std::size_t j = 0; j < cert.sigma.cols(); ++j)
            if (sign_of(cert.sigma(i, j), tol) < 0)
                throw std::invalid_argument("certificate has a negative entry");

    SimplicialConeEmbedding<S> sce;
    sce.tau_states = h_states;
    sce.tau_effects = cert.sigma.transpose() * h_eff;
    sce.target_rule = target_rule;
    return sce;
}

/// Removes ontic states outside the support of the embedded unit effect and
/// rescales so the unit effect maps to the all-ones vector. Preserves
/// tau_effects^T · tau_states.
template <class S>
SimplexEmbedding<S> to_simplex(const SimplicialConeEmbedding<S>& sce,
                               const std::vector<S>& acc_unit, const Tol& tol = Tol{})
{
    std::vector<S> u_tilde = mat_vec(sce.tau_effects, acc_unit);
    for (std::size_t k = 0; k < u_tilde.size(); ++k)
        if (sign_of(u_tilde[k], tol) < 0)
            throw std::invalid_argument("unit effect lies outside the effect cone");

    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < u_tilde.size(); ++k)
        if (sign_of(u_tilde[k], tol) > 0) kept.push_back(k);

    bool rule_zero = true;
    for (std::size_t i = 0; i < sce.target_rule.rows() && rule_zero; ++i)
        for (std::size_t j = 0; j < sce.target_rule.cols(); ++j)
            if (sign_of(sce.target_rule(i, j), tol) != 0) { rule_zero = false; break; }
    if (kept.empty() && !rule_zero)
        throw std::invalid_argument("embedded unit effect vanishes but the rule is nonzero");

    SimplexEmbedding<S> se;
    se.target_rule = sce.target_rule;
    se.kept = kept;
    se.tau_states = Matrix<S>(kept.size(), sce.tau_states.cols());
    se.tau_effects = Matrix<S>(kept.size(), sce.tau_effects.cols());
    for (std::size_t r = 0; r < kept.size(); ++r) {
        std::size_t k = kept[r];
        const S& w = u_tilde[k];
        for (std::size_t j = 0; j < sce.tau_states.cols(); ++j)
            se.tau_states(r, j) = w * sce.tau_states(k, j);
        S inv = S(1) / w;
        for (std::size_t j = 0; j < sce.tau_effects.cols(); ++j)
            se.tau_effects(r, j) = inv * sce.tau_effects(k, j);
    }

    // Truncation must not change tau_effects^T · tau_states. It cannot when
    // every effect has a complement; fragments without complements are
    // checked rather than assumed.
    if (kept.size() != u_tilde.size()) {
        Matrix<S> before = sce.tau_effects.transpose() * sce.tau_states;
        Matrix<S> after = se.tau_effects.transpose() * se.tau_states;
        for (std::size_t i = 0; i < before.rows(); ++i)
            for (std::size_t j = 0; j < before.cols(); ++j)
                if (sign_of(before(i, j) - after(i, j), tol) != 0)
                    throw std::invalid_argument(
                        "removing unsupported ontic states changes the probability rule");
    }
    return se;
}

/// Reads the model off the simplex embedding: epistemic row i is
/// tau_states · (accessible state i), response row j is
/// tau_effects · (accessible effect j). Invariant violations indicate a
/// solver or geometry bug and are surfaced as logic errors.
template <class S>
OntologicalModel<S> ontological_model(const SimplexEmbedding<S>& se,
                                      const AccessibleFragment<S>& acc, const S& r)
{
    const Tol& tol = acc.tol;
    OntologicalModel<S> model;
    model.ontic_count = se.tau_states.rows();
    model.noise_weight = r;
    model.epistemic = acc.acc_states * se.tau_states.transpose();
    model.response = acc.acc_effects * se.tau_effects.transpose();

    for (std::size_t i = 0; i < model.epistemic.rows(); ++i)
        for (std::size_t k = 0; k < model.ontic_count; ++k)
            if (sign_of(model.epistemic(i, k), tol) < 0)
                throw std::logic_error("negative epistemic entry");
    for (std::size_t j = 0; j < model.response.rows(); ++j)
        for (std::size_t k = 0; k < model.ontic_count; ++k) {
            if (sign_of(model.response(j, k), tol) < 0)
                throw std::logic_error("negative response entry");
            if (sign_of(model.response(j, k) - S(1), tol) > 0)
                throw std::logic_error("response entry exceeds one");
        }

    Matrix<S> pairing = model.response * model.epistemic.transpose();  // effects x states
    Matrix<S> expected = acc.acc_effects * se.target_rule * acc.acc_states.transpose();
    for (std::size_t j = 0; j < pairing.rows(); ++j)
        for (std::size_t i = 0; i < pairing.cols(); ++i)
            if (sign_of(pairing(j, i) - expected(j, i), tol) != 0)
                throw std::logic_error("model does not reproduce the target statistics");

    // Row sums equal the unit effect evaluated through the target rule; for a
    // normalized state at r = 0 this is the probability-distribution condition.
    std::vector<S> u_rule = vec_mat(acc.acc_unit, se.target_rule);  // length d_Omega
    for (std::size_t i = 0; i < model.epistemic.rows(); ++i) {
        S sum(0);
        for (std::size_t k = 0; k < model.ontic_count; ++k) sum += model.epistemic(i, k);
        S want = dot(u_rule, acc.acc_states.row(i));
        if (sign_of(sum - want, tol) != 0)
            throw std::logic_error("epistemic row sum deviates from the state normalization");
    }
    return model;
}

/// Verification report for a model against the raw fragment data.
template <class S>
struct ModelReport {
    bool ok = true;
    S max_residual = S(0);
    std::vector<std::string> violations;
};

/// Pairwise targets for a fragment subjected to depolarizing noise at weight
/// r toward the given maximally mixed state:
/// (1-r)·(e·s) + r·(e·m)(u·s), one entry per (effect, state) pair.
template <class S>
Matrix<S> noisy_pairwise_targets(const GptFragment<S>& frag, const std::vector<S>& max_mixed,
                                 const S& r)
{
    Matrix<S> t(frag.effects.rows(), frag.states.rows());
    S one_minus = S(1) - r;
    for (std::size_t j = 0; j < frag.effects.rows(); ++j) {
        std::vector<S> e = frag.effects.row(j);
        S em = dot(e, max_mixed);
        for (std::size_t i = 0; i < frag.states.rows(); ++i) {
            std::vector<S> s = frag.states.row(i);
            t(j, i) = one_minus * dot(e, s) + r * em * dot(frag.unit_effect, s);
        }
    }
    return t;
}

/// Checks positivity, the all-ones unit row, row-sum normalization for
/// normalized states, and every pairwise probability against the targets
/// (raw fragment pairings when no target matrix is supplied).
template <class S>
ModelReport<S> verify_model(const OntologicalModel<S>& model, const GptFragment<S>& frag,
                            const std::optional<Matrix<S>>& targets = std::nullopt,
                            const Tol& tol = Tol{})
{
    ModelReport<S> report;
    if (model.epistemic.rows() != frag.states.rows() ||
        model.response.rows() != frag.effects.rows())
        throw std::invalid_argument("model and fragment state/effect counts differ");

    auto note = [&](const std::string& what, const S& resid) {
        report.ok = false;
        report.violations.push_back(what);
        S a = abs_of(resid);
        if (a > report.max_residual) report.max_residual = a;
    };
    auto track = [&](const S& resid) {
        S a = abs_of(resid);
        if (a > report.max_residual) report.max_residual = a;
    };

    for (std::size_t i = 0; i < model.epistemic.rows(); ++i)
        for (std::size_t k = 0; k < model.ontic_count; ++k)
            if (sign_of(model.epistemic(i, k), tol) < 0)
                note("epistemic state " + std::to_string(i) + " has a negative entry",
                     model.epistemic(i, k));
    for (std::size_t j = 0; j < model.response.rows(); ++j)
        for (std::size_t k = 0; k < model.ontic_count; ++k) {
            if (sign_of(model.response(j, k), tol) < 0)
                note("response function " + std::to_string(j) + " has a negative entry",
                     model.response(j, k));
            if (sign_of(model.response(j, k) - S(1), tol) > 0)
                note("response function " + std::to_string(j) + " exceeds one",
                     model.response(j, k) - S(1));
        }

    // Unit effect appearing among the effects must map to the all-ones row.
    for (std::size_t j = 0; j < frag.effects.rows(); ++j) {
        bool is_unit = true;
        for (std::size_t c = 0; c < frag.ambient_dim; ++c)
            if (sign_of(frag.effects(j, c) - frag.unit_effect[c], tol) != 0) {
                is_unit = false;
                break;
            }
        if (!is_unit) continue;
        for (std::size_t k = 0; k < model.ontic_count; ++k) {
            S resid = model.response(j, k) - S(1);
            track(resid);
            if (sign_of(resid, tol) != 0)
                note("unit-effect response " + std::to_string(j) + " is not all-ones", resid);
        }
    }

    const Matrix<S> expected =
        targets ? *targets : frag.effects * frag.states.transpose();

    // Normalized states carry probability-distribution rows. Under a noisy
    // target the expected row sum is the unit effect's own target value.
    std::optional<std::size_t> unit_row;
    for (std::size_t j = 0; j < frag.effects.rows() && !unit_row; ++j) {
        bool is_unit = true;
        for (std::size_t c = 0; c < frag.ambient_dim; ++c)
            if (sign_of(frag.effects(j, c) - frag.unit_effect[c], tol) != 0) {
                is_unit = false;
                break;
            }
        if (is_unit) unit_row = j;
    }
    for (std::size_t i = 0; i < frag.states.rows(); ++i) {
        std::optional<S> want;
        if (!targets) {
            want = dot(frag.unit_effect, frag.states.row(i));
        } else if (unit_row) {
            want = expected(*unit_row, i);
        }
        if (!want) continue;
        S sum(0);
        for (std::size_t k = 0; k < model.ontic_count; ++k) sum += model.epistemic(i, k);
        S resid = sum - *want;
        track(resid);
        if (sign_of(resid, tol) != 0)
            note("epistemic state " + std::to_string(i) + " does not sum to its normalization",
                 resid);
    }
    for (std::size_t j = 0; j < model.response.rows(); ++j)
        for (std::size_t i = 0; i < model.epistemic.rows(); ++i) {
            S got(0);
            for (std::size_t k = 0; k < model.ontic_count; ++k)
                got += model.response(j, k) * model.epistemic(i, k);
            S resid = got - expected(j, i);
            track(resid);
            if (sign_of(resid, tol) != 0)
                note("pair (state " + std::to_string(i) + ", effect " + std::to_string(j) +
                         ") deviates from its target",
                     resid);
        }
    return report;
}

template <class S>
ModelReport<S> verify_model(const OntologicalModel<S>& model, const GptFragment<S>& frag,
                            const Matrix<S>& targets, const Tol& tol = Tol{})
{
    return verify_model(model, frag, std::optional<Matrix<S>>(targets), tol);
}

}  // namespace nctest
