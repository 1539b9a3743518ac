#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ghostsim/config.hpp"
#include "ghostsim/correlation.hpp"
#include "ghostsim/metrics.hpp"

namespace gsim {

struct OutputRecord {
    std::string filename;  // relative to the run directory
    std::string sha256;
};

struct RunResult {
    std::string out_dir;
    std::string manifest_path;
    std::string manifest_text;
    DeltaG2Map delta_g2;
    std::optional<G2Map> g2;         // fixed-test-point mode
    MetricReport metrics;
    std::optional<double> g2_matched;  // g2 at the flip-matched sample x_r = -x_t
    std::vector<OutputRecord> outputs;
    double wall_seconds = 0.0;
};

/**
 * Run the full ensemble: per frame, draw a source realization, push it through
 * both trains, detect, and update the accumulator owned by shard
 * frame_index % shards. Shards merge in ascending index order, so results are
 * bit-reproducible for a given (master_seed, shards) and value-identical
 * across shard counts. Writes per-mode outputs plus a manifest; partial
 * outputs are removed if the run fails.
 */
RunResult run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
    std::string value;
    std::string status;  // "ok" or "failed: reason"
    std::optional<double> g2_matched;
    std::optional<double> visibility;
    std::optional<double> fidelity;
    std::string run_dir;
};

struct SweepResult {
    std::string summary_path;
    std::vector<SweepRow> rows;
};

/**
 * One run per value of the parameter (a "section.key" path, e.g.
 * "medium1.thickness" or "run.preset"), each with a seed derived from the base
 * seed and its index. Failures are recorded in the summary and do not stop the
 * remaining values. An empty values list yields an empty summary.
 */
SweepResult sweep(const RawConfig& base, const std::string& param,
                  const std::vector<std::string>& values,
                  const std::string& out_override = "");

std::uint64_t derive_sweep_seed(std::uint64_t base_seed, std::size_t index);

/// Output directory: config value, else $GHOSTSIM_OUT/<name>, else
/// ghostsim-runs/<name>.
std::string resolve_out_dir(const ExperimentConfig& cfg);

std::string sha256_file(const std::string& path);

}  // namespace gsim
