#include "fixture/fixture.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/error.hpp"
#include "aisbench/text.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace aisbench;

namespace {

int generate_cmd(const fs::path& data, const fs::path& out) {
    const auto g = fixture::generate(data / "fixture" / "ports.csv", out);
    text::write_file(out / "config.json", fixture::fixture_config(fs::absolute(data), fs::absolute(out)));
    std::cout << "wrote " << g.fleet.size() << " vessels (" << g.invalid_rows << " invalid rows) to " << out.string()
              << "\n";
    return 0;
}

// Mean score per (method, size) from scores.csv.
std::map<std::string, std::map<std::size_t, double>> method_means(const Layout& layout) {
    const auto table = csv::Table::read(layout.scores());
    const auto c_m = table.require("method");
    const auto c_n = table.require("dataset_size");
    const auto c_s = table.require("score");
    std::map<std::string, std::map<std::size_t, std::pair<double, int>>> acc;
    for (const auto& row : table.rows()) {
        auto& cell = acc[row.at(c_m)][static_cast<std::size_t>(text::parse_int(row.at(c_n)).value_or(0))];
        cell.first += text::parse_double(row.at(c_s)).value_or(0.0);
        ++cell.second;
    }
    std::map<std::string, std::map<std::size_t, double>> out;
    for (const auto& [m, sizes] : acc) {
        for (const auto& [n, c] : sizes) {
            out[m][n] = c.first / c.second;
        }
    }
    return out;
}

int record_cmd(const fs::path& config, const fs::path& golden) {
    Pipeline p(RunConfig::load(config));
    const auto& cfg = p.config();
    p.ingest();

    auto sizes = cfg.sizes;
    const auto manifest = fixture::load_manifest(cfg.raw_ais.parent_path() / "fleet.csv");
    const auto total = csv::Table::read(p.layout().subsets()).size();
    sizes.push_back(total);
    const auto labels = fixture::expert_labels(manifest, fixture::read_subsets(p.layout().subsets(), sizes));
    text::write_file(cfg.expert_labels, labels.to_csv());
    p.ground_truth();

    fs::remove(cfg.archive);
    ReplayArchive archive(cfg.archive);
    const auto catalog = Catalog::load(cfg.queries);
    const fixture::ScriptedModel model(catalog, p.layout(), cfg.sizes);
    ScriptedTransport scripted([&](const ChatRequest& r) { return model.respond(r); },
                               std::string{fixture::kScriptedModelId});
    RecordingTransport recording(scripted, archive);
    const auto summary = p.run(&recording);
    p.score();
    if (p.report() != 0) {
        std::cerr << "report has gaps\n";
        return 1;
    }
    std::cout << summary.instances << " instances, " << summary.requests << " requests, archive of "
              << archive.size() << " entries\n";

    int failures = 0;
    for (const auto& m : fixture::intent_mismatches(p.layout())) {
        std::cerr << "mismatch: " << m << "\n";
        ++failures;
    }
    for (const auto& [method, by_size] : method_means(p.layout())) {
        std::cout << method << ":";
        std::optional<double> prev;
        for (const auto& [n, mean] : by_size) {
            std::cout << " " << n << "=" << text::fixed(mean, 4);
            const bool bad = method == "nlidb" ? prev && std::abs(*prev - mean) > 1e-12 : prev && mean > *prev + 1e-12;
            if (bad) {
                std::cerr << "\n" << method << " trend broken at size " << n << "\n";
                ++failures;
            }
            prev = mean;
        }
        std::cout << "\n";
    }
    if (failures > 0) {
        return 1;
    }

    fs::create_directories(golden);
    for (const auto& entry : fs::directory_iterator(p.layout().report())) {
        if (entry.path().extension() == ".csv") {
            fs::copy_file(entry.path(), golden / entry.path().filename(), fs::copy_options::overwrite_existing);
        }
    }
    std::cout << "golden report copied to " << golden.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic AIS fixture: generate the day of traffic, or record the scripted replay archive"};
    app.require_subcommand(1);
    std::string data;
    std::string out;
    std::string config;
    std::string golden;
    auto* gen = app.add_subcommand("generate", "write the raw AIS export, emissions, fleet manifest and config");
    gen->add_option("--data", data, "source data directory (ports, zones, queries)")->required();
    gen->add_option("--out", out, "fixture directory")->required();
    auto* rec = app.add_subcommand("record", "run the pipeline against the scripted model and record the archive");
    rec->add_option("--config", config, "fixture config.json")->required()->check(CLI::ExistingFile);
    rec->add_option("--golden", golden, "directory receiving the golden report CSVs")->required();
    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen) {
            return generate_cmd(data, out);
        }
        return record_cmd(config, golden);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
