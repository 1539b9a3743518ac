#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghostsim/correlation.hpp"
#include "ghostsim/detection.hpp"
#include "ghostsim/optics.hpp"
#include "ghostsim/speckle.hpp"

namespace gsim {

/// Configuration problems: unknown keys, missing sections, invariant
/// violations. Messages are anchored to "<source>:<line>" where possible.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Raw sectioned key-value text, before semantic validation. Sections are
 * normalized to ids: grid, source, object, medium1, medium2, train.reference,
 * train.test, detector.reference, detector.test, correlation, run, geometry.
 */
struct RawConfig {
    struct Entry {
        std::string section;
        std::string key;
        std::string value;
        int line = 0;
    };
    std::string source_name;
    std::vector<Entry> entries;
};

RawConfig parse_raw(const std::string& text, const std::string& source_name);

/// Replace the value of (section, key), or append the entry if absent.
void set_key(RawConfig& raw, const std::string& section, const std::string& key,
             const std::string& value);

/// Fully validated experiment description.
struct ExperimentConfig {
    std::string name;  // preset name, or the config source name
    double wavelength = 0.0;
    SourceSpec source;
    std::string object_kind = "none";
    ObjectMask object;           // uniform when object_kind is none
    double object_a = 0.0, object_d = 0.0;
    ScatteringLayer layer1, layer2;
    OpticalTrain reference_train, test_train;
    DetectorSpec det_ref, det_test;
    AccumulatorMode mode = AccumulatorMode::Bucket;
    double x_t = 0.0;
    std::int64_t frames = 0;
    std::uint64_t master_seed = 1;
    int shards = 1;
    std::string out_dir;  // empty = resolve from environment/default at run time
    double magnification = 1.0;
    std::optional<ImagingGeometry> geometry;
    std::optional<ConditionReport> conditions;
};

/// Resolve the preset reference (if any), overlay user entries, and validate.
ExperimentConfig finalize_config(const RawConfig& raw);

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name);
ExperimentConfig parse_config_file(const std::string& path);

/// Deterministic re-serialization of the effective config (manifest echo).
std::string canonical_config(const ExperimentConfig& cfg);

/// Built-in experiment descriptions, name -> config text.
const std::map<std::string, std::string>& embedded_presets();
/// One-line description per preset, for `presets --list`.
const std::map<std::string, std::string>& preset_summaries();

// Unit-suffix value parsers (shared with the CLI).
double parse_length(const std::string& text, const std::string& where);     // meters; bare = mm
double parse_inverse_length(const std::string& text, const std::string& where);  // 1/m; bare = 1/mm

/// Whether (section, key) is part of the config schema.
bool is_known_key(const std::string& section, const std::string& key);

}  // namespace gsim
