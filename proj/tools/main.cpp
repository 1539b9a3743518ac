#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghostsim/config.hpp"
#include "ghostsim/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gsim::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ',')) {
        // trim
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

void print_metrics(const gsim::RunResult& run) {
    const gsim::MetricReport& m = run.metrics;
    std::ostringstream line;
    line << "metrics:";
    bool any = false;
    if (m.fidelity) { line << " fidelity=" << *m.fidelity; any = true; }
    if (m.visibility) { line << " visibility=" << *m.visibility; any = true; }
    if (m.speckle_fwhm) { line << " speckle_fwhm=" << *m.speckle_fwhm << "m"; any = true; }
    if (run.g2_matched) { line << " g2_matched=" << *run.g2_matched; any = true; }
    if (any) std::cout << line.str() << "\n";
    if (!m.notes.empty()) std::cout << "notes: " << m.notes << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ghostsim: two-arm pseudothermal correlation imaging simulator.\n"
        "Lengths in config files default to millimeters; nm/um/mm/cm/m suffixes\n"
        "are accepted. GHOSTSIM_OUT sets the default output root."};
    app.require_subcommand(1);

    std::string config_path, out_dir, param, values_csv;
    std::int64_t frames = -1;
    std::uint64_t seed = 0;
    bool seed_set = false, list_presets = false;
    int shards = -1;

    CLI::App* run_cmd = app.add_subcommand("run", "Run one configured experiment");
    run_cmd->add_option("--config", config_path, "Config file path")->required();
    run_cmd->add_option("--frames", frames, "Override frame count");
    run_cmd->add_option("--seed", seed, "Override master seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run_cmd->add_option("--shards", shards, "Override shard count");
    run_cmd->add_option("--out", out_dir, "Override output directory");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per parameter value");
    sweep_cmd->add_option("--config", config_path, "Config file path")->required();
    sweep_cmd->add_option("--param", param, "Config key to vary, as section.key")->required();
    sweep_cmd->add_option("--values", values_csv, "Comma-separated values")->required();
    sweep_cmd->add_option("--out", out_dir, "Override output directory");

    CLI::App* presets_cmd = app.add_subcommand("presets", "Inspect embedded presets");
    presets_cmd->add_flag("--list", list_presets, "List preset names with summaries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) {
            gsim::RawConfig raw = gsim::parse_raw(read_file(config_path), config_path);
            gsim::ExperimentConfig cfg = gsim::finalize_config(raw);
            if (frames >= 0) {
                if (frames < 2) throw gsim::ConfigError("--frames must be at least 2");
                cfg.frames = frames;
            }
            if (seed_set) cfg.master_seed = seed;
            if (shards >= 0) {
                if (shards < 1) throw gsim::ConfigError("--shards must be at least 1");
                cfg.shards = shards;
            }
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            const gsim::RunResult run = gsim::run_experiment(cfg);
            std::cout << "run '" << cfg.name << "': " << cfg.frames << " frames, "
                      << cfg.shards << " shard(s), " << run.wall_seconds << " s\n";
            print_metrics(run);
            std::cout << "manifest: " << run.manifest_path << "\n";
            return kExitOk;
        }
        if (sweep_cmd->parsed()) {
            gsim::RawConfig raw = gsim::parse_raw(read_file(config_path), config_path);
            const std::vector<std::string> values = split_csv(values_csv);
            const gsim::SweepResult result = gsim::sweep(raw, param, values, out_dir);
            int failed = 0;
            for (const auto& row : result.rows) {
                std::cout << param << " = " << row.value << ": " << row.status << "\n";
                if (row.status != "ok") ++failed;
            }
            std::cout << "summary: " << result.summary_path << "\n";
            if (failed) {
                std::cerr << failed << " of " << result.rows.size() << " runs failed\n";
                return kExitRuntime;
            }
            return kExitOk;
        }
        if (presets_cmd->parsed()) {
            if (list_presets) {
                const auto& summaries = gsim::preset_summaries();
                for (const auto& [preset_name, text] : gsim::embedded_presets()) {
                    auto it = summaries.find(preset_name);
                    std::printf("%-24s %s\n", preset_name.c_str(),
                                it == summaries.end() ? "" : it->second.c_str());
                }
            } else {
                std::cout << "use --list to enumerate presets\n";
            }
            return kExitOk;
        }
    } catch (const gsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
