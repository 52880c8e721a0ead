#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nctest/embedding.hpp"
#include "nctest/fragment.hpp"
#include "nctest/lp.hpp"
#include "nctest/matrix.hpp"

namespace nctest {

enum class NoiseKind { depolarizing, custom };

template <class S>
struct PipelineOptions {
    Tol tol;
    bool validate = true;
    bool want_robustness = true;  // solve for r and build the model
    NoiseKind noise = NoiseKind::depolarizing;
    std::optional<Matrix<S>> noise_channel;  // ambient channel for custom noise
};

template <class S>
struct PipelineResult {
    bool classical = false;
    bool robustness_computed = false;
    bool robustness_feasible = true;  // false: not embeddable even at full noise
    S r = S(0);
    Matrix<S> sigma;
    S residual = S(0);
    bool basic = true;

    // Stage 1-2 artifacts.
    Matrix<S> incl_states, incl_effects, proj_states, proj_effects;
    Matrix<S> h_states, h_effects;
    Matrix<S> rule;

    std::optional<Matrix<S>> effective_rule;  // noisy rule when r > 0
    std::optional<std::vector<S>> max_mixed_used;

    // Stage 4 artifacts.
    std::optional<SimplicialConeEmbedding<S>> cone_embedding;
    bool simplex_normalized = false;
    std::optional<OntologicalModel<S>> model;
    std::optional<ModelReport<S>> model_report;

    Warnings warnings;
};

/// Runs the full pipeline: accessible fragment, facet matrices, the
/// classicality test, optionally the robustness minimization, and the
/// embedding/model extraction at the achieved noise weight.
template <class S>
PipelineResult<S> run_pipeline(const GptFragment<S>& frag, const PipelineOptions<S>& opts)
{
    validate_fragment(frag, opts.tol, opts.validate);
    PipelineResult<S> result;
    AccessibleFragment<S> acc = accessible(frag, opts.tol, &result.warnings);

    result.incl_states = acc.incl_states;
    result.incl_effects = acc.incl_effects;
    result.proj_states = acc.proj_states;
    result.proj_effects = acc.proj_effects;
    result.h_states = acc.state_facets().h;
    result.h_effects = acc.effect_facets().h;
    result.rule = acc.rule;

    ClassicalityResult<S> verdict = check_classicality(acc);
    result.classical = verdict.classical;

    Matrix<S> b_noise;
    if (opts.want_robustness) {
        if (opts.noise == NoiseKind::custom) {
            if (!opts.noise_channel)
                throw std::invalid_argument("custom noise requires a channel matrix");
            b_noise = custom_noise_rule(acc, *opts.noise_channel);
        } else {
            std::vector<S> mm = effective_max_mixed(frag, &result.warnings);
            result.max_mixed_used = mm;
            GptFragment<S> with_mm = frag;
            with_mm.max_mixed = mm;
            b_noise = depolarizing_rule(acc, with_mm);
        }
    }

    EmbeddingCertificate<S> cert;
    bool have_cert = false;
    if (verdict.classical) {
        cert = verdict.certificate;
        have_cert = true;
        result.robustness_computed = opts.want_robustness;
    } else if (opts.want_robustness) {
        RobustnessResult<S> rob = robustness(acc, b_noise);
        result.robustness_computed = true;
        result.robustness_feasible = rob.feasible;
        if (rob.feasible) {
            cert = rob.certificate;
            have_cert = true;
        } else {
            result.warnings.push_back(
                "no embedding exists even at full noise weight; the noise rule itself "
                "is not classically reproducible");
        }
    }

    if (!have_cert) return result;

    result.r = cert.r;
    result.sigma = cert.sigma;
    result.residual = cert.residual;
    result.basic = cert.basic;

    Matrix<S> target = acc.rule;
    if (sign_of(cert.r, opts.tol) > 0) {
        target = noisy_rule(acc.rule, b_noise, cert.r);
        result.effective_rule = target;
    }

    SimplicialConeEmbedding<S> sce = embedding_from_certificate(acc, cert, target);
    result.cone_embedding = sce;
    if (!acc.unit_in_effect_span) {
        result.warnings.push_back("no simplex normalization: unit effect outside the effect span");
        return result;
    }
    SimplexEmbedding<S> se;
    try {
        se = to_simplex(sce, acc.acc_unit, opts.tol);
    } catch (const std::invalid_argument& err) {
        result.warnings.push_back(std::string("no simplex normalization: ") + err.what());
        return result;
    }
    result.simplex_normalized = true;
    result.model = ontological_model(se, acc, cert.r);

    std::optional<Matrix<S>> targets;
    if (sign_of(cert.r, opts.tol) > 0) {
        if (opts.noise == NoiseKind::depolarizing) {
            targets = noisy_pairwise_targets(frag, *result.max_mixed_used, cert.r);
        } else {
            // Pairwise targets of the custom noisy rule, through the projections.
            Matrix<S> t = acc.acc_effects * target * acc.acc_states.transpose();
            targets = t;
        }
    }
    result.model_report = verify_model(*result.model, frag, targets, opts.tol);
    return result;
}

}  // namespace nctest
