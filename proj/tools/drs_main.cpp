#include "drs/bench.hpp"
#include "drs/config.hpp"
#include "drs/errors.hpp"
#include "drs/layout_xml.hpp"
#include "drs/retrieval.hpp"
#include "drs/review.hpp"
#include "drs/sdd.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitProvider = 3;

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw drs::ValidationError("cannot write output file " + out_path);
    out << text << "\n";
}

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;

    drs::EngineConfig load() const {
        auto cfg = config_path.empty() ? drs::EngineConfig::defaults()
                                       : drs::load_config(config_path);
        if (seed) cfg.embedding.seed = *seed;
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_seed = true) {
    cmd->add_option("--config", opts.config_path, "Engine config JSON file");
    cmd->add_option("-o,--out", opts.out_path, "Write the result here instead of stdout");
    if (with_seed) {
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&opts](std::uint64_t v) { opts.seed = v; },
            "Override the embedding seed");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"drs - a design review engine"};
    app.require_subcommand(1);

    // review
    auto* review_cmd = app.add_subcommand("review", "Run the full review pipeline");
    std::string review_design, review_library;
    CommonOpts review_opts;
    review_cmd->add_option("--design", review_design, "Design descriptor JSON")
        ->required();
    review_cmd->add_option("--library", review_library, "Reference library JSON");
    add_common(review_cmd, review_opts);

    // retrieve
    auto* retrieve_cmd =
        app.add_subcommand("retrieve", "Rank reference designs against a query");
    std::string retrieve_design, retrieve_library, retrieve_format = "json";
    std::optional<int> retrieve_k;
    std::optional<double> retrieve_alpha;
    CommonOpts retrieve_opts;
    retrieve_cmd->add_option("--design", retrieve_design, "Design descriptor JSON")
        ->required();
    retrieve_cmd->add_option("--library", retrieve_library, "Reference library JSON")
        ->required();
    retrieve_cmd->add_option("-k,--k", retrieve_k, "References to keep");
    retrieve_cmd->add_option("--alpha", retrieve_alpha,
                             "Feature-vs-structure mix in [0, 1]");
    retrieve_cmd->add_option("--format", retrieve_format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));
    add_common(retrieve_cmd, retrieve_opts);

    // describe
    auto* describe_cmd =
        app.add_subcommand("describe", "Generate the structured design description");
    std::string describe_design;
    CommonOpts describe_opts;
    describe_cmd->add_option("--design", describe_design, "Design descriptor JSON")
        ->required();
    add_common(describe_cmd, describe_opts);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Score the engine on a labeled dataset");
    std::string bench_dataset, bench_library;
    std::optional<int> bench_repeats;
    CommonOpts bench_opts;
    bench_cmd->add_option("--dataset", bench_dataset, "JSON-lines dataset")->required();
    bench_cmd->add_option("--library", bench_library, "Reference library JSON");
    bench_cmd->add_option("--repeats", bench_repeats, "Pipeline runs per design");
    add_common(bench_cmd, bench_opts);

    // convert-layout
    auto* convert_cmd =
        app.add_subcommand("convert-layout", "Convert layout XML to a JSON descriptor");
    std::string convert_xml;
    CommonOpts convert_opts;
    convert_cmd->add_option("--xml", convert_xml, "Layout XML file")->required();
    add_common(convert_cmd, convert_opts, false);

    // config
    auto* config_cmd = app.add_subcommand("config", "Configuration helpers");
    auto* config_init = config_cmd->add_subcommand("init", "Print the default config");
    CommonOpts config_opts;
    add_common(config_init, config_opts, false);
    config_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (review_cmd->parsed()) {
            auto cfg = review_opts.load();
            auto providers = drs::make_providers(cfg);
            const auto design = drs::load_design(review_design);
            const auto library = review_library.empty() ? drs::DesignLibrary{}
                                                        : drs::load_library(review_library);
            const auto report = drs::run_review_pipeline(
                design, library, cfg.review, *providers.embedder, *providers.chat);
            write_output(report.to_json().dump(2), review_opts.out_path);
        } else if (retrieve_cmd->parsed()) {
            auto cfg = retrieve_opts.load();
            if (retrieve_k) cfg.review.retrieval.k = *retrieve_k;
            if (retrieve_alpha) cfg.review.retrieval.alpha = *retrieve_alpha;
            auto providers = drs::make_providers(cfg);
            const auto design = drs::load_design(retrieve_design);
            const auto library = drs::load_library(retrieve_library);
            const auto result =
                drs::select_top_k(design, library, *providers.embedder,
                                  cfg.review.retrieval);
            if (retrieve_format == "json") {
                nlohmann::json doc;
                doc["k"] = result.k;
                doc["alpha"] = result.alpha;
                doc["results"] = nlohmann::json::array();
                for (const auto& s : result.ranked)
                    doc["results"].push_back({{"design_id", s.design_id},
                                              {"library_index", s.library_index},
                                              {"local", s.local},
                                              {"global", s.global},
                                              {"total", s.total}});
                doc["skipped"] = nlohmann::json::array();
                for (const auto& s : result.skipped)
                    doc["skipped"].push_back(
                        {{"design_id", s.design_id}, {"reason", s.reason}});
                write_output(doc.dump(2), retrieve_opts.out_path);
            } else {
                std::ostringstream out;
                out << "k=" << result.k << " alpha=" << result.alpha << "\n";
                for (std::size_t i = 0; i < result.ranked.size(); ++i) {
                    const auto& s = result.ranked[i];
                    out << (i + 1) << ". " << s.design_id << " total=" << s.total
                        << " (local=" << s.local << ", global=" << s.global << ")\n";
                }
                for (const auto& s : result.skipped)
                    out << "skipped " << s.design_id << ": " << s.reason << "\n";
                std::string text = out.str();
                text.pop_back(); // write_output appends the final newline
                write_output(text, retrieve_opts.out_path);
            }
        } else if (describe_cmd->parsed()) {
            auto cfg = describe_opts.load();
            auto providers = drs::make_providers(cfg);
            const auto design = drs::load_design(describe_design);
            std::vector<std::string> warnings;
            const auto description = drs::generate_description(
                design, *providers.chat, cfg.review.sdd, &warnings);
            nlohmann::json doc = description.to_json();
            doc["warnings"] = warnings;
            write_output(doc.dump(2), describe_opts.out_path);
        } else if (bench_cmd->parsed()) {
            auto cfg = bench_opts.load();
            if (bench_repeats) cfg.bench.repeats = *bench_repeats;
            auto providers = drs::make_providers(cfg);
            const auto dataset = drs::load_dataset(bench_dataset, cfg.review.profile);
            const auto library = bench_library.empty() ? drs::DesignLibrary{}
                                                       : drs::load_library(bench_library);
            const auto metrics =
                drs::run_benchmark(dataset, library, cfg.review, cfg.bench,
                                   *providers.embedder, *providers.chat);
            write_output(metrics.to_json().dump(2), bench_opts.out_path);
        } else if (convert_cmd->parsed()) {
            write_output(drs::layout_xml_to_descriptor(convert_xml).dump(2),
                         convert_opts.out_path);
        } else if (config_init->parsed()) {
            write_output(drs::EngineConfig::defaults().to_json().dump(2),
                         config_opts.out_path);
        }
    } catch (const drs::PipelineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.cause) {
        case drs::FailureKind::validation: return kExitValidation;
        case drs::FailureKind::provider: return kExitProvider;
        default: return kExitInternal;
        }
    } catch (const drs::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const drs::ProviderError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
