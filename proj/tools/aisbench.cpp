#include "aisbench/error.hpp"
#include "aisbench/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit : int {
    kOk = 0,
    kUnexpected = 1,
    kConfig = 2,
    kData = 3,
    kTransport = 4,
    kBackend = 5,
    kGaps = 6,
};

struct Overrides {
    std::string config;
    std::string sizes;
    std::string methods;
    std::string transport;
    std::string out;
    std::optional<std::uint64_t> seed;
};

aisbench::RunConfig effective_config(const Overrides& o) {
    if (o.config.empty()) {
        throw aisbench::ConfigError("--config is required");
    }
    auto cfg = aisbench::RunConfig::load(o.config);
    if (!o.sizes.empty()) {
        cfg.sizes = aisbench::parse_size_list(o.sizes);
    }
    if (!o.methods.empty()) {
        cfg.methods = aisbench::parse_method_list(o.methods);
    }
    if (!o.transport.empty()) {
        cfg.transport_mode = o.transport;
    }
    if (!o.out.empty()) {
        cfg.out = std::filesystem::absolute(o.out);
    }
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark harness for LLM question answering over AIS vessel data"};
    app.require_subcommand(1);
    Overrides o;
    bool dry_run = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--sizes", o.sizes, "comma-separated dataset sizes, e.g. 5,10,25,50,75,100");
        sub->add_option("--methods", o.methods, "comma-separated methods: zsa1,zsa2,zsa3,nlidb");
        sub->add_option("--transport", o.transport, "replay or live")->check(CLI::IsMember({"replay", "live"}));
        sub->add_option("--seed", o.seed, "subset and probe seed");
        sub->add_option("--out", o.out, "output directory");
    };
    auto* ingest = app.add_subcommand("ingest", "normalize raw AIS, build subsets, variants and the probe plan");
    auto* truth = app.add_subcommand("ground-truth", "compute oracle answers for every planned query");
    auto* run = app.add_subcommand("run", "query the model with every method");
    auto* score = app.add_subcommand("score", "match answers against ground truth");
    auto* report = app.add_subcommand("report", "write the report CSVs");
    for (auto* sub : {ingest, truth, run, score, report}) {
        common(sub);
    }
    run->add_flag("--dry-run", dry_run, "print the prompts without calling the model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // help and version requests exit 0; every other usage error is a config error
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        aisbench::Pipeline pipeline(effective_config(o));
        if (ingest->parsed()) {
            pipeline.ingest();
        } else if (truth->parsed()) {
            pipeline.ground_truth();
        } else if (run->parsed()) {
            const auto s = pipeline.run(nullptr, dry_run, &std::cout);
            if (!dry_run) {
                std::cerr << "run: " << s.instances << " instances, " << s.requests << " requests, " << s.flagged
                          << " flagged\n";
            }
        } else if (score->parsed()) {
            pipeline.score();
        } else if (report->parsed()) {
            if (const auto gaps = pipeline.report(); gaps > 0) {
                std::cerr << "report: " << gaps << " incomplete method/size cells, see "
                          << (pipeline.layout().report() / "gaps.txt").string() << '\n';
                return kGaps;
            }
        }
    } catch (const aisbench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const aisbench::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const aisbench::TransportError& e) {
        std::cerr << "transport error: " << e.what() << '\n';
        return kTransport;
    } catch (const aisbench::BackendError& e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return kBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUnexpected;
    }
    return kOk;
}
