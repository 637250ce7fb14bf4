#include "numgame/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "numgame/dataset.hpp"
#include "numgame/error.hpp"
#include "numgame/fitting.hpp"
#include "numgame/hypothesis_space.hpp"
#include "numgame/llm_harness.hpp"
#include "numgame/text.hpp"

namespace numgame::cli {

namespace {

/// Reads a JSON object as CLI11 config. Nested objects address subcommands,
/// e.g. {"domain-max": 100, "fit": {"grid": "0,0.5,1"}}. Top-level keys that
/// are not global flags go to the invoked subcommand.
class JsonConfig : public CLI::Config {
  public:
    JsonConfig(std::set<std::string> globals, std::vector<std::string> section)
        : globals_(std::move(globals)), section_(std::move(section)) {}

    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        return dump(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(input);
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError("config", std::string("invalid JSON config: ") + e.what());
        }
        if (!doc.is_object()) {
            throw CLI::ConversionError("config", "JSON config must be an object");
        }
        std::vector<CLI::ConfigItem> items;
        collect(doc, {}, items);
        for (auto& item : items) {
            if (item.parents.empty() && !globals_.count(item.name)) {
                item.parents = section_;
            }
        }
        return items;
    }

  private:
    std::set<std::string> globals_;
    std::vector<std::string> section_;

    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_boolean()) {
            return v.get<bool>() ? "true" : "false";
        }
        return v.dump();
    }

    static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : obj.items()) {
            if (value.is_null()) {
                continue;
            }
            if (value.is_object()) {
                auto next = parents;
                next.push_back(key);
                collect(value, next, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            std::replace(item.name.begin(), item.name.end(), '_', '-');
            if (value.is_array()) {
                for (const auto& v : value) {
                    item.inputs.push_back(scalar(v));
                }
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }

    static nlohmann::json dump(const CLI::App* app, bool default_also) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) {
                continue;
            }
            const auto& name = opt->get_lnames().front();
            const auto results = opt->results();
            if (!results.empty()) {
                out[name] = results.size() == 1 ? nlohmann::json(results.front())
                                                : nlohmann::json(results);
            } else if (default_also && !opt->get_default_str().empty()) {
                out[name] = opt->get_default_str();
            }
        }
        for (const auto* sub : app->get_subcommands({})) {
            auto nested = dump(sub, default_also);
            if (!nested.empty()) {
                out[sub->get_name()] = std::move(nested);
            }
        }
        return out;
    }
};

struct Globals {
    int domain_max = 100;
    std::string registry;
    std::uint64_t seed = 7;
    std::string jsd_convention = "normalized";
    bool verbose = false;
};

struct ModelFlags {
    std::optional<std::string> preset;
    std::optional<double> lambda;
    std::optional<double> alpha;
    std::optional<std::string> likelihood;
    std::optional<std::string> mode;

    void add(CLI::App* app) {
        app->add_option("--preset", preset,
                        "baseline, human-fit, gpt-fit, full, binl, map or maxl");
        app->add_option("--lambda", lambda, "prior mass on rule hypotheses");
        app->add_option("--alpha", alpha, "concept-driven probability (lapse is 1 - alpha)");
        app->add_option("--likelihood", likelihood, "size or binary");
        app->add_option("--mode", mode, "avg, map or maxl");
    }

    [[nodiscard]] ModelConfig resolve(int domain_max) const {
        return resolve_model(preset, lambda, alpha, likelihood, mode, domain_max);
    }
};

struct Context {
    Globals globals;
    std::ostream& out;
    std::ostream& err;

    [[nodiscard]] JsdConvention convention() const {
        return parse_jsd_convention(globals.jsd_convention);
    }

    void info(const std::string& message) const {
        if (globals.verbose) {
            err << message << '\n';
        }
    }

    void warn(const std::vector<std::string>& warnings) const {
        for (const auto& w : warnings) {
            err << "warning: " << w << '\n';
        }
    }

    [[nodiscard]] HypothesisSpace space() const {
        const auto registry =
            globals.registry.empty() ? default_rule_registry() : load_rule_registry(globals.registry);
        auto s = HypothesisSpace::build(globals.domain_max, registry);
        info("hypothesis space: " + std::to_string(s.rule_count()) + " rules, " +
             std::to_string(s.interval_count()) + " intervals");
        return s;
    }

    [[nodiscard]] std::vector<ExampleSet> sets(const std::string& path) const {
        auto file = load_example_sets(path, globals.domain_max);
        warn(file.warnings);
        info("loaded " + std::to_string(file.sets.size()) + " example sets from " + path);
        return std::move(file.sets);
    }

    [[nodiscard]] ResponseMatrix matrix(const std::string& path, const std::string& agent,
                                        MissingCellPolicy policy) const {
        std::vector<std::string> warnings;
        auto m = load_response_matrix(path, agent, {globals.domain_max, policy}, &warnings);
        warn(warnings);
        return m;
    }

    /// Writes to `path`, or to the output stream when the path is empty or "-".
    void emit(const std::string& path, const std::string& text) const {
        if (path.empty() || path == "-") {
            out << text;
        } else {
            write_text_file(path, text);
            info("wrote " + path);
        }
    }
};

std::string matrix_csv(const ResponseMatrix& m) {
    std::ostringstream s;
    write_response_matrix(s, m);
    return s.str();
}

ResponseMatrix resolve_source(const Context& ctx, const SourceSpec& source,
                              const HypothesisSpace* space, std::span<const ExampleSet> sets,
                              MissingCellPolicy policy) {
    if (source.path) {
        try {
            return ctx.matrix(*source.path, source.name, policy);
        } catch (const Error& e) {
            throw Error(e.code(), "source '" + source.name + "': " + e.what());
        }
    }
    auto m = predict_matrix(*space, sets, *source.model);
    m.agent = source.name;
    return m;
}

std::string stats_cell(const GroupStats& g) {
    return format_double(g.mean) + "," + format_double(g.sem) + "," + std::to_string(g.count);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct SpaceCmd {
    std::string out;

    void run(const Context& ctx) const {
        const auto space = ctx.space();
        ctx.emit(out, space.to_json().dump(2) + "\n");
    }
};

struct PredictCmd {
    std::string sets;
    std::string out;
    ModelFlags model;

    void run(const Context& ctx) const {
        const auto config = model.resolve(ctx.globals.domain_max);
        const auto xs = ctx.sets(sets);
        const auto space = ctx.space();
        ctx.emit(out, matrix_csv(predict_matrix(space, xs, config)));
    }
};

struct EvaluateCmd {
    std::string sets;
    std::string observed;
    std::string agent = "observed";
    std::string missing = "set-mean";
    std::string out;
    std::string per_set_csv;
    ModelFlags model;

    void run(const Context& ctx) const {
        const auto config = model.resolve(ctx.globals.domain_max);
        const auto policy = parse_missing_cell_policy(missing);
        const auto conv = ctx.convention();
        const auto xs = ctx.sets(sets);
        const auto obs = ctx.matrix(observed, agent, policy);
        const auto space = ctx.space();
        const auto report = evaluate_model(space, xs, config, obs, conv);
        if (report.zero_sum_vectors > 0) {
            ctx.err << "warning: " << report.zero_sum_vectors
                    << " all-zero vectors replaced by uniform\n";
        }
        ctx.emit(out, report.to_json().dump(2) + "\n");
        if (!per_set_csv.empty()) {
            ctx.emit(per_set_csv, report.per_set_csv());
        }
    }
};

struct CompareCmd {
    std::string sets;
    std::vector<std::string> sources;
    std::string missing = "set-mean";
    std::string out;
    std::string table;
    std::string by_length;
    std::string figure3b;
    std::size_t max_length = 4;

    void run(const Context& ctx) const {
        if (sources.size() < 2) {
            throw Error(ErrorCode::Usage, "compare needs at least two --source values");
        }
        std::vector<SourceSpec> specs;
        std::set<std::string> names;
        for (const auto& s : sources) {
            specs.push_back(parse_source(s, ctx.globals.domain_max));
            if (!names.insert(specs.back().name).second) {
                throw Error(ErrorCode::Usage, "duplicate source name '" + specs.back().name + "'");
            }
        }
        const auto policy = parse_missing_cell_policy(missing);
        const auto conv = ctx.convention();
        const auto xs = ctx.sets(sets);
        const auto lengths = set_lengths(xs);
        std::optional<HypothesisSpace> space;
        if (std::any_of(specs.begin(), specs.end(), [](const auto& s) { return s.model.has_value(); })) {
            space = ctx.space();
        }

        std::vector<ResponseMatrix> matrices;
        for (const auto& spec : specs) {
            matrices.push_back(resolve_source(ctx, spec, space ? &*space : nullptr, xs, policy));
        }

        std::vector<DivergenceReport> reports;
        for (std::size_t i = 0; i < matrices.size(); ++i) {
            for (std::size_t j = i + 1; j < matrices.size(); ++j) {
                reports.push_back(evaluate_pair(matrices[i], matrices[j], lengths, conv));
            }
        }

        std::ostringstream summary;
        summary << "agent_a,agent_b,mean,sem,count,zero_sum_vectors\n";
        std::ostringstream by_len;
        by_len << "agent_a,agent_b,set_length,mean,sem,count\n";
        for (const auto& r : reports) {
            summary << r.agent_a << ',' << r.agent_b << ',' << format_double(r.mean) << ','
                    << format_double(r.sem) << ',' << r.per_set.size() << ','
                    << r.zero_sum_vectors << '\n';
            for (const auto& row : report_by_set_length(r, max_length)) {
                by_len << r.agent_a << ',' << r.agent_b << ',' << row.length << ','
                       << stats_cell(row.stats) << '\n';
            }
        }

        for (const auto& r : reports) {
            ctx.err << r.agent_a << " vs " << r.agent_b << ": " << format_double(r.mean) << " +/- "
                    << format_double(r.sem) << " (n=" << r.per_set.size() << ")\n";
        }

        auto all = nlohmann::json::array();
        for (const auto& r : reports) {
            all.push_back(r.to_json());
        }
        if (!out.empty()) {
            ctx.emit(out, all.dump(2) + "\n");
        }
        ctx.emit(table, summary.str());
        if (!by_length.empty()) {
            ctx.emit(by_length, by_len.str());
        }
        if (!figure3b.empty()) {
            ctx.emit(figure3b, paired_per_set_csv(reports));
        }
    }
};

struct FitCmd {
    std::string sets;
    std::string observed;
    std::string agent = "observed";
    std::string missing = "set-mean";
    std::string grid = "0,0.01,0.3,0.5,0.7,0.9,0.99,1";
    bool no_refine = false;
    double refine_step = 0.01;
    std::string out;
    std::string surface;
    std::string per_set_csv;

    void run(const Context& ctx) const {
        FitOptions options;
        options.grid_values = parse_grid(grid);
        options.refine = !no_refine;
        options.refine_step = refine_step;
        options.convention = ctx.convention();
        const auto policy = parse_missing_cell_policy(missing);
        const auto xs = ctx.sets(sets);
        const auto obs = ctx.matrix(observed, agent, policy);
        const auto space = ctx.space();
        const auto result = fit_grid(space, xs, obs, options);
        ctx.err << "best lambda=" << format_double(result.best_lambda)
                << " alpha=" << format_double(result.best_alpha)
                << " mean_jsd=" << format_double(result.best_mean_jsd) << '\n';
        ctx.emit(out, result.to_json().dump(2) + "\n");
        if (!surface.empty() || !per_set_csv.empty()) {
            const auto exported = fit_surface_export(result);
            if (!surface.empty()) {
                ctx.emit(surface, exported.surface_csv);
            }
            if (!per_set_csv.empty()) {
                ctx.emit(per_set_csv, exported.per_set_csv);
            }
        }
    }
};

struct GenDataCmd {
    std::size_t concepts = 79;
    std::size_t set_count = 255;
    std::size_t max_length = 4;
    std::string transforms;
    std::string out;
    std::string sets_out;

    void run(const Context& ctx) const {
        GenerationOptions options;
        options.concept_count = concepts;
        options.set_count = set_count;
        options.max_set_length = max_length;
        options.domain_max = ctx.globals.domain_max;
        options.seed = ctx.globals.seed;
        if (!transforms.empty()) {
            std::ifstream in(transforms);
            if (!in) {
                throw Error(ErrorCode::Io, "cannot open transform file " + transforms);
            }
            try {
                options.transforms = transforms_from_json(nlohmann::json::parse(in));
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::Parse, transforms + ": " + e.what());
            }
        }
        const auto manifest = generate_dataset(options);
        std::ostringstream counts;
        for (const auto& [len, n] : manifest.counts_by_length()) {
            counts << " L" << len << '=' << n;
        }
        ctx.info("generated " + std::to_string(manifest.concepts.size()) + " concepts, " +
                 std::to_string(manifest.example_sets.size()) + " sets;" + counts.str());
        ctx.emit(out, manifest.to_json().dump(2) + "\n");
        if (!sets_out.empty()) {
            save_example_sets(sets_out, manifest.example_sets);
        }
    }
};

struct LlmRunCmd {
    std::string sets;
    std::string endpoint;
    std::string model;
    int trials = 10;
    std::optional<double> temperature;
    int max_parallel = 4;
    std::string out;
    std::string log;
    std::string targets;
    std::string prompt_file;
    std::string agent = "llm";
    std::string api_key_env = llm::kDefaultApiKeyEnv;
    std::string auth = "bearer";
    std::string auth_header = "api-key";
    std::optional<std::size_t> max_requests;
    std::optional<double> rate;
    int max_attempts = 4;
    int backoff_ms = 500;
    int timeout_s = 60;
    bool dry_run = false;

    void run(const Context& ctx) const {
        llm::QueryJob job;
        job.trials = trials;
        job.max_parallel = max_parallel;
        job.agent = agent;
        job.domain_max = ctx.globals.domain_max;
        job.max_requests = max_requests;
        job.requests_per_second = rate;
        job.retry.max_attempts = max_attempts;
        job.retry.base_backoff = std::chrono::milliseconds(backoff_ms);
        if (!targets.empty()) {
            job.targets = parse_targets(targets, job.domain_max);
        }
        if (!prompt_file.empty()) {
            std::ifstream in(prompt_file);
            if (!in) {
                throw Error(ErrorCode::Io, "cannot open prompt file " + prompt_file);
            }
            std::ostringstream s;
            s << in.rdbuf();
            job.prompt_template = std::string(trim(s.str()));
        }
        llm::AuthScheme scheme;
        if (auth == "bearer") {
            scheme = llm::AuthScheme::Bearer;
        } else if (auth == "header") {
            scheme = llm::AuthScheme::Header;
        } else if (auth == "none") {
            scheme = llm::AuthScheme::None;
        } else {
            throw Error(ErrorCode::Usage, "--auth must be bearer, header or none");
        }
        if (!dry_run) {
            if (endpoint.empty() || model.empty()) {
                throw Error(ErrorCode::Usage, "llm-run needs --endpoint and --model");
            }
            if (out.empty()) {
                throw Error(ErrorCode::Usage, "llm-run needs --out");
            }
            llm::HttpChatClient::split_endpoint(endpoint);
        }
        job.sets = ctx.sets(sets);
        job.validate();

        if (dry_run) {
            ctx.out << "planned_queries=" << job.planned_queries() << '\n';
            if (!job.sets.empty()) {
                ctx.out << llm::build_prompt(job.prompt_template, job.sets.front(),
                                             job.resolved_targets().front())
                        << '\n';
            }
            return;
        }

        llm::HttpClientOptions options;
        options.endpoint = endpoint;
        options.model = model;
        options.temperature = temperature;
        options.auth = scheme;
        options.auth_header = auth_header;
        options.timeout = std::chrono::seconds(timeout_s);
        if (scheme != llm::AuthScheme::None) {
            options.api_key = llm::api_key_from_env(api_key_env);
        }
        llm::HttpChatClient client(options);
        ctx.info("planned queries: " + std::to_string(job.planned_queries()));

        std::optional<std::filesystem::path> log_path;
        if (!log.empty()) {
            log_path = log;
        }
        const auto result = llm::run_job(job, client, log_path);
        save_response_matrix(out, result.matrix);
        std::size_t invalid = 0;
        for (const auto& r : result.records) {
            invalid += r.parsed == llm::Answer::Invalid ? 1 : 0;
        }
        ctx.err << "records=" << result.records.size() << " resumed=" << result.resumed_records
                << " requests=" << result.requests_sent << " invalid=" << invalid
                << " filled_cells=" << result.matrix.filled_cells
                << (result.partial ? " PARTIAL (request budget reached)" : "") << '\n';
    }
};

struct ByLengthCmd {
    std::string report;
    std::size_t max_length = 4;
    std::string out;

    void run(const Context& ctx) const {
        std::ifstream in(report);
        if (!in) {
            throw Error(ErrorCode::Io, "cannot open report " + report);
        }
        DivergenceReport r;
        try {
            const auto doc = nlohmann::json::parse(in);
            r = DivergenceReport::from_json(doc.is_array() ? doc.at(0) : doc);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, report + ": " + e.what());
        }
        std::ostringstream s;
        s << "set_length,mean,sem,count\n";
        for (const auto& row : report_by_set_length(r, max_length)) {
            s << row.length << ',' << stats_cell(row.stats) << '\n';
        }
        ctx.emit(out, s.str());
    }
};

struct Figure2Cmd {
    std::string sets;
    std::string set_id;
    std::vector<std::string> sources;
    std::string missing = "set-mean";
    std::string out;

    void run(const Context& ctx) const {
        if (sources.empty()) {
            throw Error(ErrorCode::Usage, "figure2 needs at least one --source");
        }
        std::vector<SourceSpec> specs;
        for (const auto& s : sources) {
            specs.push_back(parse_source(s, ctx.globals.domain_max));
        }
        const auto policy = parse_missing_cell_policy(missing);
        const auto all = ctx.sets(sets);
        const auto it = std::find_if(all.begin(), all.end(),
                                     [this](const ExampleSet& s) { return s.id == set_id; });
        if (it == all.end()) {
            throw Error(ErrorCode::Validation, "set '" + set_id + "' is not in " + sets);
        }
        const std::vector<ExampleSet> chosen{*it};
        std::optional<HypothesisSpace> space;
        if (std::any_of(specs.begin(), specs.end(), [](const auto& s) { return s.model.has_value(); })) {
            space = ctx.space();
        }
        std::vector<std::vector<double>> columns;
        for (const auto& spec : specs) {
            const auto m = resolve_source(ctx, spec, space ? &*space : nullptr, chosen, policy);
            const auto row = m.rows.find(set_id);
            if (row == m.rows.end()) {
                throw Error(ErrorCode::NoOverlap,
                            "source '" + spec.name + "' has no row for set '" + set_id + "'");
            }
            columns.push_back(row->second);
        }
        std::ostringstream s;
        s << "target";
        for (const auto& spec : specs) {
            s << ',' << spec.name;
        }
        s << '\n';
        for (int y = 1; y <= ctx.globals.domain_max; ++y) {
            s << y;
            for (const auto& c : columns) {
                s << ',' << format_double(c[static_cast<std::size_t>(y - 1)]);
            }
            s << '\n';
        }
        ctx.emit(out, s.str());
    }
};

int exit_code_for(const Error& e) {
    switch (e.category()) {
    case ErrorCategory::Validation: return kValidation;
    case ErrorCategory::Computation: return kComputation;
    case ErrorCategory::Io: return kIo;
    }
    return kUnexpected;
}

} // namespace

ModelConfig resolve_model(const std::optional<std::string>& preset,
                          const std::optional<double>& lambda,
                          const std::optional<double>& alpha,
                          const std::optional<std::string>& likelihood,
                          const std::optional<std::string>& mode, int domain_max) {
    const auto name = preset.value_or("full");
    const bool fixed = name == "baseline" || name == "human-fit" || name == "gpt-fit";
    if (fixed && (lambda || alpha || likelihood || mode)) {
        throw Error(ErrorCode::Usage, "preset '" + name +
                                          "' fixes every parameter; drop lambda/alpha/likelihood/mode "
                                          "or use a variant preset (full, binl, map, maxl)");
    }
    auto config = ModelConfig::preset(name, lambda.value_or(0.5), alpha.value_or(1.0), domain_max);
    if (likelihood || mode) {
        config = ModelConfig::make(
            config.lambda, config.alpha,
            likelihood ? parse_likelihood_mode(*likelihood) : config.likelihood_mode,
            mode ? parse_inference_mode(*mode) : config.inference_mode, domain_max);
    }
    config.validate();
    return config;
}

SourceSpec parse_source(const std::string& text, int domain_max) {
    SourceSpec spec;
    std::string body = text;
    const auto eq = text.find('=');
    const auto colon = text.find(':');
    if (eq != std::string::npos && (colon == std::string::npos || eq < colon)) {
        spec.name = text.substr(0, eq);
        body = text.substr(eq + 1);
        if (spec.name.empty()) {
            throw Error(ErrorCode::Usage, "source '" + text + "' has an empty name");
        }
    }
    if (body.rfind("model:", 0) == 0) {
        std::optional<std::string> preset;
        std::optional<double> lambda;
        std::optional<double> alpha;
        std::optional<std::string> likelihood;
        std::optional<std::string> mode;
        for (const auto& raw : split(body.substr(6), ',')) {
            const auto token = std::string(trim(raw));
            if (token.empty()) {
                continue;
            }
            const auto k = token.find('=');
            if (k == std::string::npos) {
                if (preset) {
                    throw Error(ErrorCode::Usage, "source '" + text + "' names two presets");
                }
                preset = token;
                continue;
            }
            const auto key = token.substr(0, k);
            const auto value = token.substr(k + 1);
            if (key == "lambda") {
                lambda = parse_double(value, "lambda");
            } else if (key == "alpha") {
                alpha = parse_double(value, "alpha");
            } else if (key == "likelihood") {
                likelihood = value;
            } else if (key == "mode") {
                mode = value;
            } else {
                throw Error(ErrorCode::Usage, "source '" + text + "': unknown model key '" + key + "'");
            }
        }
        try {
            spec.model = resolve_model(preset, lambda, alpha, likelihood, mode, domain_max);
        } catch (const Error& e) {
            throw Error(e.code(), "source '" + text + "': " + e.what());
        }
        if (spec.name.empty()) {
            spec.name = spec.model->label();
        }
    } else {
        if (body.empty()) {
            throw Error(ErrorCode::Usage, "source '" + text + "' is empty");
        }
        spec.path = body;
        if (spec.name.empty()) {
            spec.name = std::filesystem::path(body).stem().string();
        }
    }
    return spec;
}

std::vector<int> parse_targets(const std::string& text, int domain_max) {
    std::set<int> out;
    for (const auto& raw : split(text, ',')) {
        const auto field = trim(raw);
        const auto dash = field.find('-');
        int lo = 0;
        int hi = 0;
        if (dash == std::string_view::npos) {
            lo = hi = parse_int(field, "target");
        } else {
            lo = parse_int(field.substr(0, dash), "target range start");
            hi = parse_int(field.substr(dash + 1), "target range end");
        }
        if (lo < 1 || hi > domain_max || lo > hi) {
            throw Error(ErrorCode::InvalidTarget, "target range '" + std::string(field) +
                                                      "' outside 1.." + std::to_string(domain_max));
        }
        for (int y = lo; y <= hi; ++y) {
            out.insert(y);
        }
    }
    return {out.begin(), out.end()};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian number-game toolkit", "numgame"};
    app.set_config("--config", "", "JSON file supplying any flags");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();

    Context ctx{{}, out, err};
    auto& g = ctx.globals;
    app.add_option("--domain-max", g.domain_max, "largest number in the domain")
        ->check(CLI::Range(1, 100000));
    app.add_option("--registry", g.registry, "rule registry JSON")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "seed for dataset sampling");
    app.add_option("--jsd-convention", g.jsd_convention, "normalized or per-target-mean")
        ->check(CLI::IsMember({"normalized", "per-target-mean"}));
    app.add_flag("-v,--verbose", g.verbose, "progress messages on stderr");

    SpaceCmd space_cmd;
    auto* space = app.add_subcommand("space", "dump the hypothesis space as JSON");
    space->add_option("--out", space_cmd.out, "output file (default stdout)");

    PredictCmd predict_cmd;
    auto* predict = app.add_subcommand("predict", "model p(yes) for every example set");
    predict->add_option("--sets", predict_cmd.sets, "example sets JSON")->required();
    predict->add_option("--out", predict_cmd.out, "output CSV (default stdout)");
    predict_cmd.model.add(predict);

    EvaluateCmd eval_cmd;
    auto* evaluate = app.add_subcommand("evaluate", "JSD between a model and an observed matrix");
    evaluate->add_option("--sets", eval_cmd.sets, "example sets JSON")->required();
    evaluate->add_option("--observed", eval_cmd.observed, "observed response CSV")->required();
    evaluate->add_option("--agent", eval_cmd.agent, "name for the observed agent");
    evaluate->add_option("--missing", eval_cmd.missing, "set-mean, zero or drop-set");
    evaluate->add_option("--out", eval_cmd.out, "report JSON (default stdout)");
    evaluate->add_option("--per-set-csv", eval_cmd.per_set_csv, "per-set JSD CSV");
    eval_cmd.model.add(evaluate);

    CompareCmd compare_cmd;
    auto* compare = app.add_subcommand("compare", "pairwise JSD between two or more agents");
    compare->add_option("--sets", compare_cmd.sets, "example sets JSON")->required();
    compare->add_option("--source", compare_cmd.sources,
                        "[name=]file.csv or [name=]model:spec; repeat for each agent");
    compare->add_option("--missing", compare_cmd.missing, "set-mean, zero or drop-set");
    compare->add_option("--out", compare_cmd.out, "all pairwise reports as JSON");
    compare->add_option("--table", compare_cmd.table, "summary CSV (default stdout)");
    compare->add_option("--by-length", compare_cmd.by_length, "means by set length CSV");
    compare->add_option("--figure3b", compare_cmd.figure3b, "paired per-set JSD CSV");
    compare->add_option("--max-length", compare_cmd.max_length, "longest set length row");

    FitCmd fit_cmd;
    auto* fit = app.add_subcommand("fit", "grid search lambda and alpha against observed data");
    fit->add_option("--sets", fit_cmd.sets, "example sets JSON")->required();
    fit->add_option("--observed", fit_cmd.observed, "observed response CSV")->required();
    fit->add_option("--agent", fit_cmd.agent, "name for the observed agent");
    fit->add_option("--missing", fit_cmd.missing, "set-mean, zero or drop-set");
    fit->add_option("--grid", fit_cmd.grid, "comma-separated lattice for both axes");
    fit->add_flag("--no-refine", fit_cmd.no_refine, "skip the local refinement pass");
    fit->add_option("--refine-step", fit_cmd.refine_step, "refinement step");
    fit->add_option("--out", fit_cmd.out, "fit result JSON (default stdout)");
    fit->add_option("--surface", fit_cmd.surface, "every scored cell as CSV");
    fit->add_option("--per-set-csv", fit_cmd.per_set_csv, "per-set JSD at the best cell");

    GenDataCmd gen_cmd;
    auto* gen = app.add_subcommand("gen-data", "sample concepts and example sets");
    gen->add_option("--concepts", gen_cmd.concepts, "number of concepts");
    gen->add_option("--sets", gen_cmd.set_count, "number of example sets");
    gen->add_option("--max-length", gen_cmd.max_length, "longest example set");
    gen->add_option("--transforms", gen_cmd.transforms, "transform registry JSON")
        ->check(CLI::ExistingFile);
    gen->add_option("--out", gen_cmd.out, "manifest JSON (default stdout)");
    gen->add_option("--sets-out", gen_cmd.sets_out, "example sets JSON");

    LlmRunCmd llm_cmd;
    auto* llm_run = app.add_subcommand("llm-run", "query a chat endpoint for every set and target");
    llm_run->add_option("--sets", llm_cmd.sets, "example sets JSON")->required();
    llm_run->add_option("--endpoint", llm_cmd.endpoint, "chat-completion URL");
    llm_run->add_option("--model", llm_cmd.model, "model name sent to the endpoint");
    llm_run->add_option("--trials", llm_cmd.trials, "trials per (set, target)");
    llm_run->add_option("--temperature", llm_cmd.temperature, "sampling temperature");
    llm_run->add_option("--max-parallel", llm_cmd.max_parallel, "requests in flight");
    llm_run->add_option("--out", llm_cmd.out, "response matrix CSV");
    llm_run->add_option("--log", llm_cmd.log, "JSON-lines trial log, also used to resume");
    llm_run->add_option("--targets", llm_cmd.targets, "e.g. 1-100 or 2,4,8");
    llm_run->add_option("--prompt-file", llm_cmd.prompt_file,
                        "template with {examples} and {target}");
    llm_run->add_option("--agent", llm_cmd.agent, "agent name for the matrix");
    llm_run->add_option("--api-key-env", llm_cmd.api_key_env, "variable holding the API key");
    llm_run->add_option("--auth", llm_cmd.auth, "bearer, header or none");
    llm_run->add_option("--auth-header", llm_cmd.auth_header, "header name for --auth header");
    llm_run->add_option("--max-requests", llm_cmd.max_requests, "request budget");
    llm_run->add_option("--rate", llm_cmd.rate, "max requests per second");
    llm_run->add_option("--max-attempts", llm_cmd.max_attempts, "attempts per query");
    llm_run->add_option("--backoff-ms", llm_cmd.backoff_ms, "first retry delay");
    llm_run->add_option("--timeout", llm_cmd.timeout_s, "HTTP timeout in seconds");
    llm_run->add_flag("--dry-run", llm_cmd.dry_run, "print the plan and first prompt only");

    auto* report = app.add_subcommand("report", "plot data from reports and matrices");
    report->require_subcommand(1);
    ByLengthCmd by_length_cmd;
    auto* by_length = report->add_subcommand("by-length", "mean, SEM and count per set length");
    by_length->add_option("--report", by_length_cmd.report, "report JSON")->required();
    by_length->add_option("--max-length", by_length_cmd.max_length, "longest set length row");
    by_length->add_option("--out", by_length_cmd.out, "CSV (default stdout)");
    Figure2Cmd fig2_cmd;
    auto* figure2 = report->add_subcommand("figure2", "per-target p(yes) per agent for one set");
    figure2->add_option("--sets", fig2_cmd.sets, "example sets JSON")->required();
    figure2->add_option("--set-id", fig2_cmd.set_id, "example set id")->required();
    figure2->add_option("--source", fig2_cmd.sources, "[name=]file.csv or [name=]model:spec");
    figure2->add_option("--missing", fig2_cmd.missing, "set-mean, zero or drop-set");
    figure2->add_option("--out", fig2_cmd.out, "CSV (default stdout)");

    std::set<std::string> global_names;
    for (const auto* opt : app.get_options()) {
        for (const auto& name : opt->get_lnames()) {
            global_names.insert(name);
        }
    }
    std::vector<std::string> section;
    const CLI::App* level = &app;
    for (int i = 1; i < argc; ++i) {
        const auto subs = level->get_subcommands([&](const CLI::App* s) { return s->check_name(argv[i]); });
        if (!subs.empty()) {
            section.push_back(subs.front()->get_name());
            level = subs.front();
        }
    }
    app.config_formatter(std::make_shared<JsonConfig>(global_names, section));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (space->parsed()) {
            space_cmd.run(ctx);
        } else if (predict->parsed()) {
            predict_cmd.run(ctx);
        } else if (evaluate->parsed()) {
            eval_cmd.run(ctx);
        } else if (compare->parsed()) {
            compare_cmd.run(ctx);
        } else if (fit->parsed()) {
            fit_cmd.run(ctx);
        } else if (gen->parsed()) {
            gen_cmd.run(ctx);
        } else if (llm_run->parsed()) {
            llm_cmd.run(ctx);
        } else if (by_length->parsed()) {
            by_length_cmd.run(ctx);
        } else if (figure2->parsed()) {
            fig2_cmd.run(ctx);
        }
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUnexpected;
    }
    return kOk;
}

} // namespace numgame::cli
