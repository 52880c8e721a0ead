#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nctest/pipeline.hpp"
#include "nctest/quantum.hpp"
#include "nctest/scalar.hpp"

namespace nctest {

using nlohmann::json;

/// Malformed input (schema or semantic); mapped to exit code 2 by the CLI.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// One parsed input document. GPT numeric entries are kept as literal tokens
/// so they can be converted exactly or approximately once the arithmetic mode
/// is known.
struct InputDocument {
    std::string format;  // "quantum" | "gpt"

    // quantum payload
    std::size_t dimension = 0;
    std::vector<CMatrix> q_states, q_effects;

    // gpt payload
    std::vector<std::vector<std::string>> g_states, g_effects;
    std::vector<std::string> g_unit;
    std::optional<std::vector<std::string>> g_max_mixed;

    // options
    std::optional<std::string> arithmetic;  // "exact" | "float"
    std::optional<double> tolerance;
    std::optional<std::string> noise;  // "depolarizing" | "custom"
    std::optional<std::vector<std::vector<std::string>>> noise_matrix;
};

namespace iodetail {

inline std::string number_token(const json& v, const std::string& where)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw InputError(where + ": expected a number or a \"p/q\" string");
}

inline std::vector<std::string> token_row(const json& v, const std::string& where)
{
    if (!v.is_array()) throw InputError(where + ": expected an array of numbers");
    std::vector<std::string> row;
    for (std::size_t i = 0; i < v.size(); ++i)
        row.push_back(number_token(v[i], where + "[" + std::to_string(i) + "]"));
    return row;
}

inline std::vector<std::vector<std::string>> token_matrix(const json& v, const std::string& where,
                                                          bool allow_empty = false)
{
    if (!v.is_array()) throw InputError(where + ": expected an array of rows");
    if (v.empty() && !allow_empty) throw InputError(where + ": must not be empty");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < v.size(); ++i)
        rows.push_back(token_row(v[i], where + "[" + std::to_string(i) + "]"));
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != rows[0].size())
            throw InputError(where + "[" + std::to_string(i) + "]: row length " +
                             std::to_string(rows[i].size()) + " differs from row 0 length " +
                             std::to_string(rows[0].size()));
    return rows;
}

inline CMatrix complex_matrix(const json& v, std::size_t d, const std::string& where)
{
    if (!v.is_array() || v.size() != d)
        throw InputError(where + ": expected a " + std::to_string(d) + "x" + std::to_string(d) +
                         " matrix");
    CMatrix m(d);
    for (std::size_t i = 0; i < d; ++i) {
        const json& row = v[i];
        if (!row.is_array() || row.size() != d)
            throw InputError(where + "[" + std::to_string(i) + "]: expected " +
                             std::to_string(d) + " entries");
        for (std::size_t j = 0; j < d; ++j) {
            const json& e = row[j];
            std::string at =
                where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw InputError(at + ": expected an [re, im] pair");
            m(i, j) = Cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

}  // namespace iodetail

inline InputDocument parse_document(const json& doc)
{
    if (!doc.is_object()) throw InputError("document: expected an object");
    InputDocument in;
    if (!doc.contains("format") || !doc["format"].is_string())
        throw InputError("format: required, \"quantum\" or \"gpt\"");
    in.format = doc["format"].get<std::string>();
    if (in.format != "quantum" && in.format != "gpt")
        throw InputError("format: must be \"quantum\" or \"gpt\"");

    if (in.format == "quantum") {
        if (!doc.contains("quantum") || !doc["quantum"].is_object())
            throw InputError("quantum: required payload object");
        const json& q = doc["quantum"];
        if (!q.contains("dimension") || !q["dimension"].is_number_unsigned() ||
            q["dimension"].get<std::size_t>() == 0)
            throw InputError("quantum.dimension: required positive integer");
        in.dimension = q["dimension"].get<std::size_t>();
        if (!q.contains("states") || !q["states"].is_array() || q["states"].empty())
            throw InputError("quantum.states: required nonempty array");
        if (!q.contains("effects") || !q["effects"].is_array() || q["effects"].empty())
            throw InputError("quantum.effects: required nonempty array");
        for (std::size_t i = 0; i < q["states"].size(); ++i)
            in.q_states.push_back(iodetail::complex_matrix(
                q["states"][i], in.dimension, "quantum.states[" + std::to_string(i) + "]"));
        for (std::size_t i = 0; i < q["effects"].size(); ++i)
            in.q_effects.push_back(iodetail::complex_matrix(
                q["effects"][i], in.dimension, "quantum.effects[" + std::to_string(i) + "]"));
    } else {
        if (!doc.contains("gpt") || !doc["gpt"].is_object())
            throw InputError("gpt: required payload object");
        const json& g = doc["gpt"];
        if (!g.contains("states")) throw InputError("gpt.states: required");
        if (!g.contains("effects")) throw InputError("gpt.effects: required");
        if (!g.contains("unit_effect")) throw InputError("gpt.unit_effect: required");
        in.g_states = iodetail::token_matrix(g["states"], "gpt.states");
        in.g_effects = iodetail::token_matrix(g["effects"], "gpt.effects");
        in.g_unit = iodetail::token_row(g["unit_effect"], "gpt.unit_effect");
        std::size_t dim = in.g_unit.size();
        if (in.g_states[0].size() != dim)
            throw InputError("gpt.states: row length " + std::to_string(in.g_states[0].size()) +
                             " differs from unit_effect length " + std::to_string(dim));
        if (in.g_effects[0].size() != dim)
            throw InputError("gpt.effects: row length " + std::to_string(in.g_effects[0].size()) +
                             " differs from unit_effect length " + std::to_string(dim));
        if (g.contains("max_mixed_state")) {
            in.g_max_mixed = iodetail::token_row(g["max_mixed_state"], "gpt.max_mixed_state");
            if (in.g_max_mixed->size() != dim)
                throw InputError("gpt.max_mixed_state: length differs from unit_effect length");
        }
    }

    if (doc.contains("options")) {
        const json& o = doc["options"];
        if (!o.is_object()) throw InputError("options: expected an object");
        if (o.contains("arithmetic")) {
            if (!o["arithmetic"].is_string()) throw InputError("options.arithmetic: string");
            in.arithmetic = o["arithmetic"].get<std::string>();
            if (*in.arithmetic != "exact" && *in.arithmetic != "float")
                throw InputError("options.arithmetic: must be \"exact\" or \"float\"");
        }
        if (o.contains("tolerance")) {
            if (!o["tolerance"].is_number() || o["tolerance"].get<double>() <= 0)
                throw InputError("options.tolerance: positive number");
            in.tolerance = o["tolerance"].get<double>();
        }
        if (o.contains("noise")) {
            if (!o["noise"].is_string()) throw InputError("options.noise: string");
            in.noise = o["noise"].get<std::string>();
            if (*in.noise != "depolarizing" && *in.noise != "custom")
                throw InputError("options.noise: must be \"depolarizing\" or \"custom\"");
        }
        if (o.contains("noise_matrix"))
            in.noise_matrix = iodetail::token_matrix(o["noise_matrix"], "options.noise_matrix");
    }
    return in;
}

/// Parses a top-level input: either one document or an array of documents.
inline std::vector<InputDocument> parse_input(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw InputError(std::string("not valid JSON: ") + err.what());
    }
    std::vector<InputDocument> docs;
    if (root.is_array()) {
        if (root.empty()) throw InputError("document array must not be empty");
        for (std::size_t i = 0; i < root.size(); ++i) {
            try {
                docs.push_back(parse_document(root[i]));
            } catch (const InputError& err) {
                throw InputError("document " + std::to_string(i) + ": " + err.what());
            }
        }
    } else {
        docs.push_back(parse_document(root));
    }
    return docs;
}

template <class S>
GptFragment<S> fragment_from_tokens(const InputDocument& in)
{
    GptFragment<S> frag;
    frag.ambient_dim = in.g_unit.size();
    auto conv_rows = [&](const std::vector<std::vector<std::string>>& rows, const char* where) {
        std::vector<std::vector<S>> out;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::vector<S> r;
            for (std::size_t j = 0; j < rows[i].size(); ++j) {
                try {
                    r.push_back(parse_scalar<S>(rows[i][j]));
                } catch (const std::invalid_argument& err) {
                    throw InputError(std::string(where) + "[" + std::to_string(i) + "][" +
                                     std::to_string(j) + "]: " + err.what());
                }
            }
            out.push_back(std::move(r));
        }
        return out;
    };
    frag.states = Matrix<S>::from_rows(conv_rows(in.g_states, "gpt.states"));
    frag.effects = Matrix<S>::from_rows(conv_rows(in.g_effects, "gpt.effects"));
    for (std::size_t j = 0; j < in.g_unit.size(); ++j)
        frag.unit_effect.push_back(parse_scalar<S>(in.g_unit[j]));
    if (in.g_max_mixed) {
        std::vector<S> m;
        for (const std::string& t : *in.g_max_mixed) m.push_back(parse_scalar<S>(t));
        frag.max_mixed = std::move(m);
    }
    return frag;
}

template <class S>
Matrix<S> matrix_from_tokens(const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::vector<S>> out;
    for (const auto& row : rows) {
        std::vector<S> r;
        for (const std::string& t : row) r.push_back(parse_scalar<S>(t));
        out.push_back(std::move(r));
    }
    return Matrix<S>::from_rows(std::move(out));
}

// ---- report serialization ----

template <class S>
json scalar_to_json(const S& x)
{
    if constexpr (scalar_traits<S>::exact)
        return json(x.get_str());
    else
        return json(x);
}

template <class S>
json matrix_to_json(const Matrix<S>& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class S>
json vector_to_json(const std::vector<S>& v)
{
    json row = json::array();
    for (const S& x : v) row.push_back(scalar_to_json(x));
    return row;
}

enum class ReportDetail { verdict_only, with_model, full };

template <class S>
json report_to_json(const PipelineResult<S>& res, ReportDetail detail, double eps, bool quiet)
{
    json out;
    out["verdict"] = res.classical ? "classical" : "nonclassical";
    if (res.robustness_computed) {
        if (res.robustness_feasible)
            out["robustness"] = scalar_to_json(res.r);
        else
            out["robustness"] = nullptr;
    } else if (res.classical) {
        out["robustness"] = scalar_to_json(S(0));
    }
    if (quiet) return out;

    json diag;
    diag["arithmetic"] = scalar_traits<S>::exact ? "exact" : "float";
    diag["tolerance"] = eps;
    diag["certificate_residual"] = scalar_to_json(res.residual);
    if (res.model_report)
        diag["model_residual"] = scalar_to_json(res.model_report->max_residual);
    diag["warnings"] = res.warnings;
    out["diagnostics"] = std::move(diag);

    if (res.classical || (res.robustness_computed && res.robustness_feasible)) {
        out["sigma"] = matrix_to_json(res.sigma);
        out["basic_solution"] = res.basic;
    }
    if (res.effective_rule) out["effective_rule"] = matrix_to_json(*res.effective_rule);
    if (res.max_mixed_used) out["max_mixed_state"] = vector_to_json(*res.max_mixed_used);

    if (detail != ReportDetail::verdict_only && res.model) {
        json model;
        model["ontic_count"] = res.model->ontic_count;
        model["noise_weight"] = scalar_to_json(res.model->noise_weight);
        model["epistemic_states"] = matrix_to_json(res.model->epistemic);
        model["response_functions"] = matrix_to_json(res.model->response);
        out["model"] = std::move(model);
    }
    if (detail == ReportDetail::full) {
        out["inclusion_states"] = matrix_to_json(res.incl_states);
        out["inclusion_effects"] = matrix_to_json(res.incl_effects);
        out["projection_states"] = matrix_to_json(res.proj_states);
        out["projection_effects"] = matrix_to_json(res.proj_effects);
        out["H_states"] = matrix_to_json(res.h_states);
        out["H_effects"] = matrix_to_json(res.h_effects);
        out["probability_rule"] = matrix_to_json(res.rule);
    }
    return out;
}

}  // namespace nctest
