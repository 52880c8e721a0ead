#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nctest/fixtures.hpp"
#include "nctest/io.hpp"
#include "nctest/pipeline.hpp"
#include "nctest/quantum.hpp"

namespace {

using namespace nctest;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNonclassical = 3;

struct CliOptions {
    std::string input_path;
    std::string arithmetic;
    double tolerance = -1;
    std::string noise;
    std::string noise_matrix_path;
    std::string max_mixed_inline;
    std::string output_path;
    bool quiet = false;
    bool skip_validation = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opts)
{
    cmd->add_option("input", opts.input_path, "input JSON file")->required();
    cmd->add_option("--arithmetic", opts.arithmetic, "exact or float")
        ->check(CLI::IsMember({"exact", "float"}));
    cmd->add_option("--tolerance", opts.tolerance, "comparison tolerance (float mode)");
    cmd->add_option("--noise", opts.noise, "depolarizing or custom")
        ->check(CLI::IsMember({"depolarizing", "custom"}));
    cmd->add_option("--noise-matrix", opts.noise_matrix_path,
                    "JSON file with the ambient channel matrix for custom noise");
    cmd->add_option("--max-mixed", opts.max_mixed_inline,
                    "inline JSON row overriding the maximally mixed state");
    cmd->add_option("--output", opts.output_path, "write the report here instead of stdout");
    cmd->add_flag("--quiet", opts.quiet, "emit the verdict and robustness only");
    cmd->add_flag("--skip-validation", opts.skip_validation,
                  "skip positivity/normalization validation of the input data");
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot read input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double resolve_tolerance(const CliOptions& cli, const InputDocument& doc)
{
    if (cli.tolerance > 0) return cli.tolerance;
    if (doc.tolerance) return *doc.tolerance;
    if (const char* env = std::getenv("NCTEST_TOLERANCE")) {
        try {
            double v = std::stod(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
        throw InputError("NCTEST_TOLERANCE is not a positive number");
    }
    return 1e-9;
}

std::string resolve_arithmetic(const CliOptions& cli, const InputDocument& doc)
{
    std::string mode;
    if (!cli.arithmetic.empty())
        mode = cli.arithmetic;
    else if (doc.arithmetic)
        mode = *doc.arithmetic;
    else
        mode = doc.format == "quantum" ? "float" : "exact";
    if (mode == "exact" && doc.format == "quantum")
        throw InputError(
            "quantum input requires float arithmetic: the orthonormal operator basis has "
            "irrational coordinates");
    return mode;
}

std::optional<std::vector<std::vector<std::string>>> load_noise_matrix(const CliOptions& cli,
                                                                       const InputDocument& doc)
{
    if (!cli.noise_matrix_path.empty()) {
        json root;
        try {
            root = json::parse(read_file(cli.noise_matrix_path));
        } catch (const json::parse_error& err) {
            throw InputError(std::string("noise matrix file is not valid JSON: ") + err.what());
        }
        return iodetail::token_matrix(root, "noise matrix");
    }
    return doc.noise_matrix;
}

std::optional<std::vector<std::string>> parse_inline_row(const std::string& text)
{
    if (text.empty()) return std::nullopt;
    json row;
    try {
        row = json::parse(text);
    } catch (const json::parse_error& err) {
        throw InputError(std::string("--max-mixed is not valid JSON: ") + err.what());
    }
    return iodetail::token_row(row, "--max-mixed");
}

struct DocResult {
    json report;
    bool classical = false;
};

template <class S>
DocResult run_typed(const InputDocument& doc, const CliOptions& cli, ReportDetail detail,
                    bool want_robustness)
{
    double eps = resolve_tolerance(cli, doc);
    PipelineOptions<S> opts;
    opts.tol = Tol{eps};
    opts.validate = !cli.skip_validation;
    opts.want_robustness = want_robustness;

    std::string noise = !cli.noise.empty() ? cli.noise : doc.noise.value_or("depolarizing");
    opts.noise = noise == "custom" ? NoiseKind::custom : NoiseKind::depolarizing;

    GptFragment<S> frag;
    if (doc.format == "quantum") {
        if constexpr (scalar_traits<S>::exact) {
            throw InputError("quantum input requires float arithmetic");
        } else {
            HermitianBasis basis = hermitian_basis(doc.dimension);
            try {
                frag = quantum_to_gpt(doc.q_states, doc.q_effects, basis, eps, opts.validate);
            } catch (const std::invalid_argument& err) {
                throw InputError(std::string("quantum payload: ") + err.what());
            }
        }
    } else {
        frag = fragment_from_tokens<S>(doc);
    }

    std::optional<std::vector<std::string>> mm = parse_inline_row(cli.max_mixed_inline);
    if (mm) {
        if (mm->size() != frag.ambient_dim)
            throw InputError("--max-mixed: length differs from the ambient dimension");
        std::vector<S> row;
        for (const std::string& t : *mm) row.push_back(parse_scalar<S>(t));
        frag.max_mixed = std::move(row);
    }

    if (opts.noise == NoiseKind::custom && want_robustness) {
        std::optional<std::vector<std::vector<std::string>>> nm = load_noise_matrix(cli, doc);
        if (!nm)
            throw InputError("custom noise requires a channel matrix "
                             "(--noise-matrix or options.noise_matrix)");
        Matrix<S> channel = matrix_from_tokens<S>(*nm);
        if (channel.rows() != frag.ambient_dim || channel.cols() != frag.ambient_dim)
            throw InputError("noise matrix must be ambient_dim x ambient_dim");
        opts.noise_channel = std::move(channel);
    }

    PipelineResult<S> res;
    try {
        res = run_pipeline(frag, opts);
    } catch (const std::invalid_argument& err) {
        throw InputError(err.what());
    }
    DocResult out;
    out.classical = res.classical;
    out.report = report_to_json(res, detail, eps, cli.quiet);
    return out;
}

DocResult run_document(const InputDocument& doc, const CliOptions& cli, ReportDetail detail,
                       bool want_robustness)
{
    std::string mode = resolve_arithmetic(cli, doc);
    if (mode == "exact")
        return run_typed<Rational>(doc, cli, detail, want_robustness);
    return run_typed<double>(doc, cli, detail, want_robustness);
}

void emit(const CliOptions& cli, const json& output)
{
    std::string text = output.dump(2);
    text += "\n";
    if (cli.output_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cli.output_path);
        if (!out) throw std::runtime_error("cannot write output file: " + cli.output_path);
        out << text;
    }
}

int run_command(const CliOptions& cli, ReportDetail detail, bool want_robustness,
                bool nonclassical_exit)
{
    std::vector<InputDocument> docs = parse_input(read_file(cli.input_path));

    std::vector<DocResult> results(docs.size());
    if (docs.size() == 1) {
        results[0] = run_document(docs[0], cli, detail, want_robustness);
    } else {
        std::vector<std::future<DocResult>> futures;
        futures.reserve(docs.size());
        for (const InputDocument& doc : docs)
            futures.push_back(std::async(std::launch::async, [&doc, &cli, detail,
                                                              want_robustness] {
                return run_document(doc, cli, detail, want_robustness);
            }));
        for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
    }

    json output;
    bool all_classical = true;
    if (results.size() == 1) {
        output = results[0].report;
        all_classical = results[0].classical;
    } else {
        output = json::array();
        for (const DocResult& r : results) {
            output.push_back(r.report);
            all_classical = all_classical && r.classical;
        }
    }
    emit(cli, output);
    if (nonclassical_exit && !all_classical) return kExitNonclassical;
    return kExitOk;
}

int run_fixtures(const std::string& name, const std::string& output_path)
{
    const auto& table = nctest::fixtures::all();
    if (name.empty()) {
        for (const auto& [key, text] : table) std::cout << key << "\n";
        return kExitOk;
    }
    auto it = table.find(name);
    if (it == table.end()) {
        std::cerr << "unknown fixture: " << name << "\n";
        return kExitBadInput;
    }
    if (output_path.empty()) {
        std::cout << it->second;
    } else {
        std::ofstream out(output_path);
        if (!out) {
            std::cerr << "cannot write output file: " << output_path << "\n";
            return kExitInternal;
        }
        out << it->second;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"classicality (simplex-embeddability) testing for prepare-measure scenarios"};
    app.require_subcommand(1);

    CliOptions check_opts, robustness_opts, report_opts;
    CLI::App* check = app.add_subcommand(
        "check", "decide classical explainability; exit 0 when classical, 3 when not");
    add_common_options(check, check_opts);
    CLI::App* rob = app.add_subcommand(
        "robustness", "minimize the noise weight r at which a classical model exists");
    add_common_options(rob, robustness_opts);
    CLI::App* report = app.add_subcommand("report", "full report with all pipeline artifacts");
    add_common_options(report, report_opts);

    std::string fixture_name, fixture_output;
    CLI::App* fixtures = app.add_subcommand("fixtures", "list or print the embedded demo inputs");
    fixtures->add_option("name", fixture_name, "fixture to print (omit to list)");
    fixtures->add_option("--output", fixture_output, "write the fixture here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed())
            return run_command(check_opts, ReportDetail::verdict_only, false, true);
        if (rob->parsed())
            return run_command(robustness_opts, ReportDetail::with_model, true, false);
        if (report->parsed())
            return run_command(report_opts, ReportDetail::full, true, false);
        if (fixtures->parsed()) return run_fixtures(fixture_name, fixture_output);
    } catch (const nctest::InputError& err) {
        std::cerr << "invalid input: " << err.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
