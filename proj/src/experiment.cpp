#include "ghostsim/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ghostsim/detection.hpp"
#include "ghostsim/image_io.hpp"
#include "ghostsim/oracle.hpp"
#include "ghostsim/rng.hpp"

namespace fs = std::filesystem;

namespace gsim {

namespace {

constexpr const char* kToolVersion = "ghostsim 1.0.0";

std::string hex(const unsigned char* data, unsigned int len) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += digits[data[i] >> 4];
        out += digits[data[i] & 0xf];
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Removes every file registered with it unless the run is committed.
class OutputSet {
  public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(dir_ / f, ec);
    }

    std::string path(const std::string& filename) {
        files_.push_back(filename);
        return (dir_ / filename).string();
    }

    void commit() { committed_ = true; }

    const std::vector<std::string>& files() const { return files_; }

  private:
    fs::path dir_;
    std::vector<std::string> files_;
    bool committed_ = false;
};

void write_profile_csv(const std::string& path, const char* value_header,
                       const GridSpec& grid, const std::vector<double>& values,
                       const std::vector<std::uint8_t>* valid = nullptr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
    out << "x_mm," << value_header;
    if (valid) out << ",valid";
    out << "\n";
    for (int i = 0; i < grid.n; ++i) {
        out << fmt(grid.coord(i) * 1e3) << "," << fmt(values[i]);
        if (valid) out << "," << int((*valid)[i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

GridSpec camera_grid(const DetectorSpec& det, const GridSpec& grid) {
    const int ratio = static_cast<int>(std::lround(det.pixel_pitch / grid.pitch));
    return make_grid(grid.n / ratio, det.pixel_pitch, grid.dim);
}

/// |t(m x)|^2 sampled at the nearest object-grid point, zero off the grid.
std::vector<double> truth_profile(const ObjectMask& object, double magnification,
                                  const GridSpec& grid_r) {
    std::vector<double> truth(grid_r.samples(), 0.0);
    for (int i = 0; i < grid_r.n; ++i) {
        const double xo = magnification * grid_r.coord(i);
        if (std::abs(xo) > object.grid.extent() / 2) continue;
        truth[i] = std::norm(object.transmission[object.grid.index_of(xo)]);
    }
    return truth;
}

bool train_has_halo(const OpticalTrain& train) {
    for (const auto& el : train.elements) {
        if (const auto* sc = std::get_if<ScatterElement>(&el)) {
            if (sc->layer.diffuse_halo) return true;
        }
    }
    return false;
}

void append_note(std::string& notes, const std::string& note) {
    if (!notes.empty()) notes += "; ";
    notes += note;
}

SceneSpec scene_from_config(const ExperimentConfig& cfg) {
    SceneSpec scene;
    scene.object = cfg.object;
    scene.layer1 = cfg.layer1;
    scene.layer2 = cfg.layer2;
    scene.magnification = cfg.magnification;
    scene.source = cfg.source;
    scene.reference_train = cfg.reference_train;
    scene.test_train = cfg.test_train;
    return scene;
}

std::string mode_name(AccumulatorMode mode) {
    switch (mode) {
        case AccumulatorMode::Bucket: return "bucket";
        case AccumulatorMode::OuterProduct: return "outer-product";
        case AccumulatorMode::AntiDiagonal: return "anti-diagonal";
        case AccumulatorMode::FixedTestPoint: return "fixed-test-point";
    }
    return "?";
}

}  // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for checksumming");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("EVP_DigestInit_ex failed");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::streamsize got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx, buf.data(), static_cast<size_t>(got)) != 1) {
            EVP_MD_CTX_free(ctx);
            throw std::runtime_error("EVP_DigestUpdate failed");
        }
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    return hex(md, len);
}

std::uint64_t derive_sweep_seed(std::uint64_t base_seed, std::size_t index) {
    std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::string resolve_out_dir(const ExperimentConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("GHOSTSIM_OUT"); env && *env)
        return (fs::path(env) / cfg.name).string();
    return (fs::path("ghostsim-runs") / cfg.name).string();
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.frames < 2) throw ConfigError("run_experiment: frames must be at least 2");
    if (cfg.shards < 1) throw ConfigError("run_experiment: shards must be at least 1");

    RunResult result;
    result.out_dir = resolve_out_dir(cfg);
    fs::create_directories(result.out_dir);
    OutputSet outputs(result.out_dir);

    const GridSpec grid = cfg.source.grid;
    const GridSpec grid_r = camera_grid(cfg.det_ref, grid);
    const bool test_is_frame = cfg.det_test.kind == DetectorKind::Camera;
    const GridSpec grid_t = test_is_frame ? camera_grid(cfg.det_test, grid) : grid;

    std::vector<CorrelationAccumulator> accs;
    accs.reserve(static_cast<std::size_t>(cfg.shards));
    for (int s = 0; s < cfg.shards; ++s)
        accs.push_back(CorrelationAccumulator::make(cfg.mode, grid_r, grid_t, cfg.x_t));

    MetricReport metrics;
    for (std::int64_t i = 0; i < cfg.frames; ++i) {
        const FrameSeed seed = derive_frame_seed(cfg.master_seed, i);
        const ComplexField src = generate_frame(cfg.source, seed, cfg.wavelength);
        const ComplexField e_r = run_arm(src, cfg.reference_train, &seed);
        const ComplexField e_t = run_arm(src, cfg.test_train, &seed);
        const IntensityFrame i_r = camera_bin(measure_intensity(e_r), cfg.det_ref);
        const IntensityFrame i_t_full = measure_intensity(e_t);
        CorrelationAccumulator& acc = accs[static_cast<std::size_t>(i % cfg.shards)];
        switch (cfg.mode) {
            case AccumulatorMode::Bucket:
                acc.update(i_r, bucket_value(i_t_full, cfg.det_test));
                break;
            case AccumulatorMode::FixedTestPoint:
                if (cfg.det_test.kind == DetectorKind::Point)
                    acc.update(i_r, point_value(i_t_full, cfg.det_test));
                else
                    acc.update(i_r, camera_bin(i_t_full, cfg.det_test));
                break;
            default:
                acc.update(i_r, camera_bin(i_t_full, cfg.det_test));
                break;
        }
        if (i == 0) {
            try {
                metrics.speckle_fwhm = speckle_size(i_r);
            } catch (const std::exception& e) {
                append_note(metrics.notes, std::string("speckle_fwhm unavailable: ") + e.what());
            }
        }
    }

    CorrelationAccumulator merged = std::move(accs.front());
    for (int s = 1; s < cfg.shards; ++s) merged = CorrelationAccumulator::merge(merged, accs[s]);
    result.delta_g2 = finalize_delta_g2(merged);

    const bool deterministic =
        !train_has_halo(cfg.reference_train) && !train_has_halo(cfg.test_train);
    const SceneSpec scene = scene_from_config(cfg);
    const bool with_object = cfg.object_kind != "none";
    std::string scales_block;

    switch (cfg.mode) {
        case AccumulatorMode::Bucket: {
            write_profile_csv(outputs.path("bucket_image.csv"), "delta_g2", grid_r,
                              result.delta_g2.values);
            if (deterministic) {
                try {
                    std::vector<double> predicted = predict_bucket_image(scene);
                    write_profile_csv(outputs.path("oracle_bucket.csv"), "delta_g2_predicted",
                                      grid, predicted);
                } catch (const std::exception& e) {
                    append_note(metrics.notes, std::string("bucket oracle skipped: ") + e.what());
                }
            } else {
                append_note(metrics.notes, "bucket oracle skipped: train adds a diffuse halo");
            }
            break;
        }
        case AccumulatorMode::AntiDiagonal: {
            write_profile_csv(outputs.path("camera_image.csv"), "delta_g2", grid_r,
                              result.delta_g2.values);
            try {
                std::vector<double> predicted = predict_ccd_image(scene, grid_r);
                write_profile_csv(outputs.path("oracle_ccd.csv"), "delta_g2_predicted", grid_r,
                                  predicted);
            } catch (const std::exception& e) {
                append_note(metrics.notes, std::string("camera oracle skipped: ") + e.what());
            }
            break;
        }
        case AccumulatorMode::FixedTestPoint: {
            result.g2 = finalize_g2(merged);
            write_profile_csv(outputs.path("g2_profile.csv"), "g2", grid_r, result.g2->values,
                              &result.g2->valid);
            const double matched = -cfg.x_t;
            if (std::abs(matched) <= grid_r.extent() / 2) {
                const int idx = grid_r.index_of(matched);
                if (result.g2->valid[idx]) result.g2_matched = result.g2->values[idx];
            }
            break;
        }
        case AccumulatorMode::OuterProduct: {
            std::vector<std::uint16_t> pixels;
            const auto [offset, step] = quantize16(result.delta_g2.values, pixels);
            write_png16(outputs.path("delta_g2_map.png"), grid_t.n, grid_r.n, pixels);
            std::ostringstream scale;
            scale << "delta_g2_map.png.offset = " << fmt(offset) << "\n"
                  << "delta_g2_map.png.step = " << fmt(step) << "\n";
            scales_block = scale.str();
            break;
        }
    }

    if (with_object &&
        (cfg.mode == AccumulatorMode::Bucket || cfg.mode == AccumulatorMode::AntiDiagonal)) {
        const std::vector<double> truth =
            truth_profile(cfg.object, cfg.magnification, grid_r);
        try {
            metrics.fidelity = fidelity(result.delta_g2.values, truth);
        } catch (const std::exception& e) {
            append_note(metrics.notes, std::string("fidelity unavailable: ") + e.what());
        }
        if (cfg.object_kind == "double-slit") {
            const double m = std::abs(cfg.magnification);
            const auto [fg, bg] = slit_region_masks(grid_r, cfg.object_a / m, cfg.object_d / m);
            try {
                const double v = visibility(result.delta_g2.values, fg, bg);
                metrics.visibility = std::clamp(v, 0.0, 1.0);
            } catch (const std::exception& e) {
                append_note(metrics.notes, std::string("visibility unavailable: ") + e.what());
            }
        }
    } else if (!with_object &&
               (cfg.mode == AccumulatorMode::Bucket || cfg.mode == AccumulatorMode::AntiDiagonal)) {
        append_note(metrics.notes, "no object: fidelity and visibility skipped");
    }

    result.metrics = metrics;

    // Manifest: everything needed to reproduce and verify the run. The
    // [timing] section is the only part expected to vary between identical
    // runs; reproducibility comparisons strip it.
    std::ostringstream man;
    man << "[manifest]\n";
    man << "format = 1\n";
    man << "name = " << cfg.name << "\n";
    man << "versions = " << kToolVersion << "\n";
    man << "mode = " << mode_name(cfg.mode) << "\n";
    man << "[config]\n";
    {
        std::istringstream echo(canonical_config(cfg));
        std::string line;
        while (std::getline(echo, line)) man << "  " << line << "\n";
    }
    if (cfg.conditions) {
        man << "[conditions]\n";
        for (int i = 0; i < 3; ++i) {
            man << "residual_" << (i + 1) << " = " << fmt(cfg.conditions->residual[i]) << "\n";
            man << "satisfied_" << (i + 1) << " = "
                << (cfg.conditions->satisfied[i] ? "yes" : "no") << "\n";
        }
    }
    man << "[seeds]\n";
    man << "master_seed = " << cfg.master_seed << "\n";
    man << "frames = " << cfg.frames << "\n";
    man << "shards = " << cfg.shards << "\n";
    man << "frame_assignment = frame_index mod shards\n";
    man << "[outputs]\n";
    for (const auto& f : outputs.files()) {
        const std::string digest = sha256_file((fs::path(result.out_dir) / f).string());
        result.outputs.push_back({f, digest});
        man << f << " = sha256:" << digest << "\n";
    }
    if (!scales_block.empty()) {
        man << "[scales]\n" << scales_block;
    }
    man << "[metrics]\n";
    if (metrics.fidelity) man << "fidelity = " << fmt(*metrics.fidelity) << "\n";
    if (metrics.visibility) man << "visibility = " << fmt(*metrics.visibility) << "\n";
    if (metrics.speckle_fwhm) man << "speckle_fwhm = " << fmt(*metrics.speckle_fwhm) << "\n";
    if (metrics.edge_width) man << "edge_width = " << fmt(*metrics.edge_width) << "\n";
    if (result.g2_matched) man << "g2_matched = " << fmt(*result.g2_matched) << "\n";
    if (!metrics.notes.empty()) man << "notes = " << metrics.notes << "\n";
    const auto t1 = std::chrono::steady_clock::now();
    result.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    man << "[timing]\n";
    man << "wall_seconds = " << fmt(result.wall_seconds) << "\n";

    result.manifest_text = man.str();
    result.manifest_path = (fs::path(result.out_dir) / "manifest.txt").string();
    {
        std::ofstream out(result.manifest_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write manifest '" + result.manifest_path + "'");
        out << result.manifest_text;
        if (!out) throw std::runtime_error("failed while writing the manifest");
    }
    outputs.commit();
    return result;
}

namespace {

std::string sanitize_token(const std::string& s) {
    std::string out;
    for (char c : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                        c == '_';
        out += ok ? c : '_';
    }
    return out.empty() ? std::string("value") : out;
}

std::string csv_field(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

SweepResult sweep(const RawConfig& base, const std::string& param,
                  const std::vector<std::string>& values, const std::string& out_override) {
    const size_t dot = param.find_last_of('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == param.size())
        throw ConfigError("sweep parameter must be a section.key path, got '" + param + "'");
    const std::string section = param.substr(0, dot);
    const std::string key = param.substr(dot + 1);
    if (!is_known_key(section, key))
        throw ConfigError("sweep parameter '" + param + "' is not a known config key");

    std::string stem = base.source_name;
    if (size_t slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (size_t d = stem.find_last_of('.'); d != std::string::npos && d > 0) stem = stem.substr(0, d);

    std::string base_dir = out_override;
    if (base_dir.empty()) {
        for (const auto& e : base.entries)
            if (e.section == "run" && e.key == "out") base_dir = e.value;
    }
    if (base_dir.empty()) {
        const char* env = std::getenv("GHOSTSIM_OUT");
        base_dir = ((env && *env) ? fs::path(env) : fs::path("ghostsim-runs")) / (stem + "-sweep");
    }
    fs::create_directories(base_dir);

    std::uint64_t base_seed = 1;
    for (const auto& e : base.entries) {
        if (e.section == "run" && e.key == "seed") {
            try {
                base_seed = std::stoull(e.value);
            } catch (const std::exception&) {
                throw ConfigError(base.source_name + ": cannot parse run.seed '" + e.value + "'");
            }
        }
    }

    SweepResult result;
    for (std::size_t i = 0; i < values.size(); ++i) {
        SweepRow row;
        row.value = values[i];
        const std::string run_dir =
            (fs::path(base_dir) / (sanitize_token(param) + "=" + sanitize_token(values[i])))
                .string();
        row.run_dir = run_dir;
        try {
            RawConfig raw = base;
            set_key(raw, section, key, values[i]);
            set_key(raw, "run", "seed", std::to_string(derive_sweep_seed(base_seed, i)));
            set_key(raw, "run", "out", run_dir);
            const ExperimentConfig cfg = finalize_config(raw);
            const RunResult run = run_experiment(cfg);
            row.status = "ok";
            row.g2_matched = run.g2_matched;
            row.visibility = run.metrics.visibility;
            row.fidelity = run.metrics.fidelity;
        } catch (const std::exception& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            row.status = "failed: " + msg;
        }
        result.rows.push_back(std::move(row));
    }

    result.summary_path = (fs::path(base_dir) / "sweep_summary.csv").string();
    std::ofstream out(result.summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write sweep summary '" + result.summary_path + "'");
    out << "value,g2_matched,visibility,fidelity,status,run_dir\n";
    for (const auto& row : result.rows) {
        out << row.value << "," << csv_field(row.g2_matched) << "," << csv_field(row.visibility)
            << "," << csv_field(row.fidelity) << "," << row.status << "," << row.run_dir << "\n";
    }
    if (!out) throw std::runtime_error("failed while writing the sweep summary");
    return result;
}

}  // namespace gsim
