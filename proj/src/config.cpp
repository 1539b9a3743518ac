#include "ghostsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ghostsim/scattering.hpp"

namespace gsim {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

[[noreturn]] void fail(const std::string& anchor, const std::string& msg) {
    throw ConfigError(anchor + ": " + msg);
}

std::string line_anchor(const std::string& source, int line) {
    return source + ":" + std::to_string(line);
}

/// "[medium 1]" and "[medium1]" both normalize to "medium1", etc.
std::string normalize_section(const std::string& label, const std::string& anchor) {
    std::string collapsed;
    for (char c : lower(label)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!collapsed.empty() && collapsed.back() != ' ') collapsed += ' ';
        } else {
            collapsed += c;
        }
    }
    collapsed = trim(collapsed);
    static const std::map<std::string, std::string> aliases = {
        {"grid", "grid"},
        {"source", "source"},
        {"object", "object"},
        {"medium 1", "medium1"},
        {"medium1", "medium1"},
        {"medium 2", "medium2"},
        {"medium2", "medium2"},
        {"train reference", "train.reference"},
        {"train.reference", "train.reference"},
        {"train test", "train.test"},
        {"train.test", "train.test"},
        {"detector reference", "detector.reference"},
        {"detector.reference", "detector.reference"},
        {"detector test", "detector.test"},
        {"detector.test", "detector.test"},
        {"correlation", "correlation"},
        {"run", "run"},
        {"geometry", "geometry"},
    };
    auto it = aliases.find(collapsed);
    if (it == aliases.end()) fail(anchor, "unknown section [" + label + "]");
    return it->second;
}

struct UnitScale {
    const char* suffix;
    double scale;
};

double parse_scaled(const std::string& text, const std::string& where,
                    const UnitScale* units, size_t n_units, double bare_scale,
                    const char* what) {
    std::string t = trim(text);
    if (t.empty()) fail(where, std::string("empty ") + what + " value");
    const char* begin = t.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail(where, std::string("cannot parse ") + what + " '" + t + "'");
    std::string rest = trim(std::string(end));
    if (rest.empty()) return v * bare_scale;
    for (size_t i = 0; i < n_units; ++i) {
        if (rest == units[i].suffix) return v * units[i].scale;
    }
    fail(where, std::string("unknown ") + what + " unit '" + rest + "' in '" + t + "'");
}

}  // namespace

double parse_length(const std::string& text, const std::string& where) {
    static const UnitScale units[] = {
        {"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0},
    };
    return parse_scaled(text, where, units, 5, 1e-3, "length");
}

double parse_inverse_length(const std::string& text, const std::string& where) {
    static const UnitScale units[] = {
        {"/m", 1.0}, {"/cm", 1e2}, {"/mm", 1e3},
    };
    return parse_scaled(text, where, units, 3, 1e3, "inverse length");
}

RawConfig parse_raw(const std::string& text, const std::string& source_name) {
    RawConfig raw;
    raw.source_name = source_name;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string anchor = line_anchor(source_name, lineno);
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(anchor, "unterminated section header");
            section = normalize_section(line.substr(1, line.size() - 2), anchor);
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) fail(anchor, "expected 'key = value'");
        std::string key = lower(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(anchor, "missing key before '='");
        if (value.empty()) fail(anchor, "missing value for key '" + key + "'");
        if (section.empty()) fail(anchor, "key '" + key + "' appears before any [section]");
        raw.entries.push_back({section, key, value, lineno});
    }
    return raw;
}

void set_key(RawConfig& raw, const std::string& section, const std::string& key,
             const std::string& value) {
    for (auto& e : raw.entries) {
        if (e.section == section && e.key == key) {
            e.value = value;
            return;
        }
    }
    raw.entries.push_back({section, key, value, 0});
}

namespace {

struct Located {
    std::string value;
    std::string anchor;
};

/// Flattened (section, key) -> value view over preset + user entries.
class Lookup {
  public:
    void add(const RawConfig& raw) {
        for (const auto& e : raw.entries) {
            std::string anchor = e.line > 0 ? line_anchor(raw.source_name, e.line)
                                            : raw.source_name;
            map_[{e.section, e.key}] = {e.value, anchor};
        }
    }

    const Located* find(const std::string& section, const std::string& key) const {
        auto it = map_.find({section, key});
        return it == map_.end() ? nullptr : &it->second;
    }

    bool has_section(const std::string& section) const {
        for (const auto& [k, v] : map_) {
            if (k.first == section) return true;
        }
        return false;
    }

    const std::map<std::pair<std::string, std::string>, Located>& all() const { return map_; }

  private:
    std::map<std::pair<std::string, std::string>, Located> map_;
};

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"grid", {"n", "pitch"}},
        {"source", {"wavelength", "aperture", "intensity", "statistics"}},
        {"object", {"kind", "a", "d", "diameter", "stroke", "path"}},
        {"medium1",
         {"mu_s", "thickness", "delta_x", "halo", "halo_band", "k_x", "a_x", "b_x",
          "c_x", "d_x", "e_x", "k_beta", "a_beta", "b_beta", "c_beta", "d_beta",
          "e_beta", "particle_diameter", "concentration", "n_index"}},
        {"medium2",
         {"mu_s", "thickness", "delta_x", "halo", "halo_band", "k_x", "a_x", "b_x",
          "c_x", "d_x", "e_x", "k_beta", "a_beta", "b_beta", "c_beta", "d_beta",
          "e_beta", "particle_diameter", "concentration", "n_index"}},
        {"train.reference", {"elements"}},
        {"train.test", {"elements"}},
        {"detector.reference", {"kind", "pixel_pitch", "extent", "x", "noise"}},
        {"detector.test", {"kind", "pixel_pitch", "extent", "x", "noise"}},
        {"correlation", {"mode", "x_t"}},
        {"run", {"frames", "seed", "shards", "out", "preset"}},
        {"geometry", {"z", "z1", "z2", "z3", "f", "f1", "f2", "l1", "l2"}},
    };
    return s;
}

double get_double(const Lookup& lk, const std::string& sec, const std::string& key,
                  double fallback) {
    const Located* e = lk.find(sec, key);
    if (!e) return fallback;
    try {
        size_t pos = 0;
        double v = std::stod(e->value, &pos);
        if (trim(e->value.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(e->anchor, "cannot parse number '" + e->value + "' for key '" + key + "'");
}

std::int64_t get_int(const Lookup& lk, const std::string& sec, const std::string& key,
                     std::int64_t fallback) {
    const Located* e = lk.find(sec, key);
    if (!e) return fallback;
    try {
        size_t pos = 0;
        long long v = std::stoll(e->value, &pos);
        if (trim(e->value.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(e->anchor, "cannot parse integer '" + e->value + "' for key '" + key + "'");
}

std::uint64_t get_u64(const Lookup& lk, const std::string& sec, const std::string& key,
                      std::uint64_t fallback) {
    const Located* e = lk.find(sec, key);
    if (!e) return fallback;
    try {
        size_t pos = 0;
        unsigned long long v = std::stoull(e->value, &pos);
        if (trim(e->value.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(e->anchor, "cannot parse unsigned integer '" + e->value + "' for key '" + key + "'");
}

double get_length(const Lookup& lk, const std::string& sec, const std::string& key,
                  double fallback) {
    const Located* e = lk.find(sec, key);
    if (!e) return fallback;
    return parse_length(e->value, e->anchor);
}

double require_length(const Lookup& lk, const std::string& sec, const std::string& key) {
    const Located* e = lk.find(sec, key);
    if (!e) throw ConfigError("missing required key '" + key + "' in section [" + sec + "]");
    return parse_length(e->value, e->anchor);
}

bool get_flag(const Lookup& lk, const std::string& sec, const std::string& key,
              bool fallback) {
    const Located* e = lk.find(sec, key);
    if (!e) return fallback;
    std::string v = lower(trim(e->value));
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    fail(e->anchor, "cannot parse flag '" + e->value + "' for key '" + key + "' (use on/off)");
}

ScatteringLayer build_layer(const Lookup& lk, const std::string& sec,
                            double grid_pitch, double wavelength) {
    ScatteringLayer layer;
    layer.label = sec;
    const Located* mu_e = lk.find(sec, "mu_s");
    double mu_s = mu_e ? parse_inverse_length(mu_e->value, mu_e->anchor) : 0.0;
    layer.thickness = get_length(lk, sec, "thickness", 0.0);
    if (layer.thickness < 0.0)
        fail(lk.find(sec, "thickness")->anchor, "thickness must be >= 0");
    auto [alpha, beta] = ballistic_fraction(mu_s, layer.thickness);
    layer.alpha = alpha;
    layer.beta = beta;
    if (layer.thickness > 0.0 && std::abs(beta) > 0.0) {
        const Located* dx = lk.find(sec, "delta_x");
        double k_x = get_double(lk, sec, "k_x", 0.0);
        if (dx) {
            layer.delta_x = parse_length(dx->value, dx->anchor);
        } else if (k_x > 0.0) {
            MediumParams mp;
            mp.particle_diameter = get_length(lk, sec, "particle_diameter", 0.0);
            mp.concentration = get_double(lk, sec, "concentration", 0.0);
            mp.refractive_index = get_double(lk, sec, "n_index", 1.0);
            mp.wavelength = wavelength;
            mp.mu_s = mu_s;
            mp.k_x = k_x;
            mp.a_x = get_double(lk, sec, "a_x", 0.0);
            mp.b_x = get_double(lk, sec, "b_x", 0.0);
            mp.c_x = get_double(lk, sec, "c_x", 0.0);
            mp.d_x = get_double(lk, sec, "d_x", 0.0);
            mp.e_x = get_double(lk, sec, "e_x", 0.0);
            mp.k_beta = get_double(lk, sec, "k_beta", 0.0);
            mp.a_beta = get_double(lk, sec, "a_beta", 0.0);
            mp.b_beta = get_double(lk, sec, "b_beta", 0.0);
            mp.c_beta = get_double(lk, sec, "c_beta", 0.0);
            mp.d_beta = get_double(lk, sec, "d_beta", 0.0);
            mp.e_beta = get_double(lk, sec, "e_beta", 0.0);
            auto [beta_scale, delta_x] = broadening_model(mp, layer.thickness);
            layer.delta_x = delta_x;
            if (mp.k_beta > 0.0) {
                layer.beta = beta_scale;
                layer.alpha = std::sqrt(std::max(0.0, 1.0 - beta_scale * beta_scale));
            }
        } else {
            throw ConfigError("section [" + sec +
                              "]: scattering thickness given without delta_x or "
                              "broadening constants (k_x)");
        }
    } else {
        // Inactive layer; record a declared width if present for bookkeeping.
        const Located* dx = lk.find(sec, "delta_x");
        layer.delta_x = dx ? parse_length(dx->value, dx->anchor) : 0.0;
    }
    layer.diffuse_halo = get_flag(lk, sec, "halo", false) && std::abs(layer.beta) > 0.0;
    const Located* band = lk.find(sec, "halo_band");
    layer.halo_band = band ? parse_inverse_length(band->value, band->anchor) : 0.0;
    if (layer.thickness > 0.0 && std::abs(layer.beta) > 0.0 && layer.delta_x < grid_pitch / 4.0)
        throw ConfigError("section [" + sec + "]: delta_x below a quarter grid pitch");
    validate_layer(layer);
    return layer;
}

ObjectMask build_object(const Lookup& lk, const GridSpec& grid, std::string& kind_out,
                        double& a_out, double& d_out) {
    const Located* kind_e = lk.find("object", "kind");
    std::string kind = kind_e ? lower(trim(kind_e->value)) : "none";
    kind_out = kind;
    if (kind == "none") return make_uniform_mask(grid);
    if (kind == "single-slit") {
        const Located* a = lk.find("object", "a");
        if (!a) throw ConfigError("object kind 'single-slit' requires key 'a'");
        a_out = parse_length(a->value, a->anchor);
        return make_single_slit(grid, a_out);
    }
    if (kind == "double-slit") {
        const Located* a = lk.find("object", "a");
        const Located* d = lk.find("object", "d");
        if (!a || !d) throw ConfigError("object kind 'double-slit' requires keys 'a' and 'd'");
        a_out = parse_length(a->value, a->anchor);
        d_out = parse_length(d->value, d->anchor);
        return make_double_slit(grid, a_out, d_out);
    }
    if (kind == "ring") {
        const Located* dia = lk.find("object", "diameter");
        const Located* st = lk.find("object", "stroke");
        if (!dia || !st) throw ConfigError("object kind 'ring' requires 'diameter' and 'stroke'");
        return make_ring_section(grid, parse_length(dia->value, dia->anchor),
                                 parse_length(st->value, st->anchor));
    }
    if (kind == "image") {
        const Located* p = lk.find("object", "path");
        if (!p) throw ConfigError("object kind 'image' requires key 'path'");
        return mask_from_image(grid, p->value);
    }
    fail(kind_e->anchor, "unknown object kind '" + kind + "'");
}

OpticalTrain build_train(const Lookup& lk, const std::string& sec, const std::string& role,
                         double wavelength, const ObjectMask& object,
                         const ScatteringLayer& layer1, const ScatteringLayer& layer2) {
    const Located* e = lk.find(sec, "elements");
    if (!e) throw ConfigError("missing required key 'elements' in section [" + sec + "]");
    OpticalTrain train;
    train.wavelength = wavelength;
    std::uint32_t next_ref_channel = 0x40;
    std::istringstream in(e->value);
    std::string tok;
    while (std::getline(in, tok, '|')) {
        tok = trim(tok);
        if (tok.empty()) fail(e->anchor, "empty element in train");
        std::istringstream ts(tok);
        std::string word;
        ts >> word;
        std::string rest = trim(tok.substr(word.size()));
        word = lower(word);
        if (word == "free") {
            train.elements.push_back(FreeSpace{parse_length(rest, e->anchor)});
        } else if (word == "lens") {
            train.elements.push_back(ThinLens{parse_length(rest, e->anchor)});
        } else if (word == "object") {
            if (!rest.empty()) fail(e->anchor, "'object' element takes no argument");
            train.elements.push_back(MaskElement{object});
        } else if (word == "scatter") {
            std::uint32_t channel = 0;
            const ScatteringLayer* layer = nullptr;
            if (rest == "1") {
                layer = &layer1;
                channel = role == "test" ? 1u : next_ref_channel++;
            } else if (rest == "2") {
                layer = &layer2;
                channel = role == "test" ? 2u : next_ref_channel++;
            } else {
                fail(e->anchor, "scatter element must reference medium 1 or 2, got '" + rest + "'");
            }
            train.elements.push_back(ScatterElement{*layer, channel});
        } else {
            fail(e->anchor, "unknown train element '" + word + "'");
        }
    }
    train.elements.push_back(DetectorPlane{role});
    validate_train(train);
    return train;
}

DetectorSpec build_detector(const Lookup& lk, const std::string& sec, const GridSpec& grid,
                            DetectorKind fallback_kind) {
    DetectorSpec det;
    det.kind = fallback_kind;
    det.pixel_pitch = grid.pitch;
    const Located* kind_e = lk.find(sec, "kind");
    if (kind_e) {
        std::string k = lower(trim(kind_e->value));
        if (k == "bucket") det.kind = DetectorKind::Bucket;
        else if (k == "camera") det.kind = DetectorKind::Camera;
        else if (k == "point") det.kind = DetectorKind::Point;
        else fail(kind_e->anchor, "unknown detector kind '" + k + "'");
    }
    det.pixel_pitch = get_length(lk, sec, "pixel_pitch", grid.pitch);
    det.extent = get_length(lk, sec, "extent", 0.0);
    det.x = get_length(lk, sec, "x", 0.0);
    const Located* noise = lk.find(sec, "noise");
    if (noise && lower(trim(noise->value)) != "none")
        fail(noise->anchor, "detector noise stages are disabled in this build; only 'none' is accepted");
    validate_detector(det, grid);
    return det;
}

}  // namespace

ExperimentConfig finalize_config(const RawConfig& user_raw) {
    // Resolve an embedded preset reference, then overlay the user's entries.
    // Later add() calls replace earlier ones, so preset entries keep their own
    // anchors while user overrides anchor to the user file.
    Lookup lk;
    std::string name;
    const RawConfig::Entry* preset_entry = nullptr;
    for (const auto& e : user_raw.entries) {
        if (e.section == "run" && e.key == "preset") preset_entry = &e;
    }
    if (preset_entry) {
        const std::string preset_name = trim(preset_entry->value);
        const auto& presets = embedded_presets();
        auto it = presets.find(preset_name);
        if (it == presets.end())
            fail(line_anchor(user_raw.source_name, preset_entry->line),
                 "unknown preset '" + preset_name + "'");
        name = it->first;
        RawConfig preset_raw = parse_raw(it->second, "preset:" + name);
        for (const auto& pe : preset_raw.entries) {
            if (pe.section == "run" && pe.key == "preset")
                fail(line_anchor(preset_raw.source_name, pe.line),
                     "presets must not reference other presets");
        }
        lk.add(preset_raw);
        RawConfig overrides = user_raw;
        std::erase_if(overrides.entries, [](const RawConfig::Entry& e) {
            return e.section == "run" && e.key == "preset";
        });
        lk.add(overrides);
    } else {
        name = user_raw.source_name;
        size_t slash = name.find_last_of("/\\");
        if (slash != std::string::npos) name = name.substr(slash + 1);
        size_t dot = name.find_last_of('.');
        if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
        lk.add(user_raw);
    }

    // Schema check: every entry must name a known (section, key).
    for (const auto& [sk, located] : lk.all()) {
        auto sec_it = schema().find(sk.first);
        if (sec_it == schema().end())
            fail(located.anchor, "unknown section '" + sk.first + "'");
        if (!sec_it->second.count(sk.second))
            fail(located.anchor,
                 "unknown key '" + sk.second + "' in section [" + sk.first + "]");
    }

    ExperimentConfig cfg;
    cfg.name = name;

    if (!lk.has_section("grid")) throw ConfigError("missing required section [grid]");

    int n = static_cast<int>(get_int(lk, "grid", "n", 0));
    double pitch = get_length(lk, "grid", "pitch", 0.0);
    if (n <= 0) throw ConfigError("section [grid]: key 'n' is required and must be positive");
    if (pitch <= 0.0) throw ConfigError("section [grid]: key 'pitch' is required and must be positive");
    GridSpec grid = make_grid(n, pitch, 1);

    if (!lk.has_section("source")) throw ConfigError("missing required section [source]");
    if (!lk.has_section("train.reference"))
        throw ConfigError("missing required section [train reference]");
    if (!lk.has_section("train.test")) throw ConfigError("missing required section [train test]");

    cfg.wavelength = require_length(lk, "source", "wavelength");
    if (cfg.wavelength <= 0.0) throw ConfigError("section [source]: wavelength must be positive");
    cfg.source.grid = grid;
    cfg.source.aperture_width = require_length(lk, "source", "aperture");
    cfg.source.mean_intensity = get_double(lk, "source", "intensity", 1.0);
    const Located* stats = lk.find("source", "statistics");
    if (stats) {
        std::string s = lower(trim(stats->value));
        if (s == "circular-gaussian") cfg.source.statistics = SourceStatistics::CircularGaussian;
        else if (s == "phase-only") cfg.source.statistics = SourceStatistics::PhaseOnly;
        else fail(stats->anchor, "unknown source statistics '" + s + "'");
    }
    if (cfg.source.aperture_width <= 0.0)
        throw ConfigError("section [source]: aperture must be positive");
    if (cfg.source.mean_intensity <= 0.0)
        throw ConfigError("section [source]: intensity must be positive");

    cfg.object = build_object(lk, grid, cfg.object_kind, cfg.object_a, cfg.object_d);
    cfg.layer1 = build_layer(lk, "medium1", pitch, cfg.wavelength);
    cfg.layer2 = build_layer(lk, "medium2", pitch, cfg.wavelength);

    cfg.reference_train = build_train(lk, "train.reference", "reference", cfg.wavelength,
                                      cfg.object, cfg.layer1, cfg.layer2);
    cfg.test_train = build_train(lk, "train.test", "test", cfg.wavelength, cfg.object,
                                 cfg.layer1, cfg.layer2);

    const Located* mode_e = lk.find("correlation", "mode");
    std::string mode = mode_e ? lower(trim(mode_e->value)) : "bucket";
    if (mode == "bucket") cfg.mode = AccumulatorMode::Bucket;
    else if (mode == "outer-product") cfg.mode = AccumulatorMode::OuterProduct;
    else if (mode == "anti-diagonal") cfg.mode = AccumulatorMode::AntiDiagonal;
    else if (mode == "fixed-test-point") cfg.mode = AccumulatorMode::FixedTestPoint;
    else fail(mode_e->anchor, "unknown correlation mode '" + mode + "'");
    cfg.x_t = get_length(lk, "correlation", "x_t", 0.0);

    DetectorKind test_fallback =
        cfg.mode == AccumulatorMode::Bucket ? DetectorKind::Bucket : DetectorKind::Camera;
    cfg.det_ref = build_detector(lk, "detector.reference", grid, DetectorKind::Camera);
    cfg.det_test = build_detector(lk, "detector.test", grid, test_fallback);
    if (cfg.det_ref.kind != DetectorKind::Camera)
        throw ConfigError("reference detector must be a camera (it records full frames)");
    switch (cfg.mode) {
        case AccumulatorMode::Bucket:
            if (cfg.det_test.kind != DetectorKind::Bucket)
                throw ConfigError("correlation mode 'bucket' requires a bucket test detector");
            break;
        case AccumulatorMode::FixedTestPoint:
            if (cfg.det_test.kind == DetectorKind::Bucket)
                throw ConfigError(
                    "correlation mode 'fixed-test-point' requires a camera or point test detector");
            if (cfg.det_test.kind == DetectorKind::Point &&
                std::abs(cfg.det_test.x - cfg.x_t) > pitch / 2.0)
                throw ConfigError("point test detector position does not match correlation x_t");
            break;
        default:
            if (cfg.det_test.kind != DetectorKind::Camera)
                throw ConfigError("map correlation modes require a camera test detector");
            break;
    }

    cfg.frames = get_int(lk, "run", "frames", 0);
    if (cfg.frames < 2) {
        const Located* fe = lk.find("run", "frames");
        std::string anchor = fe ? fe->anchor : "section [run]";
        fail(anchor, "frames must be at least 2 (covariance needs more than one frame)");
    }
    cfg.master_seed = get_u64(lk, "run", "seed", 1);
    cfg.shards = static_cast<int>(get_int(lk, "run", "shards", 1));
    if (cfg.shards < 1) fail(lk.find("run", "shards")->anchor, "shards must be >= 1");
    const Located* out_e = lk.find("run", "out");
    if (out_e) cfg.out_dir = out_e->value;

    if (lk.has_section("geometry")) {
        ImagingGeometry g;
        g.z = require_length(lk, "geometry", "z");
        g.z1 = require_length(lk, "geometry", "z1");
        g.z2 = require_length(lk, "geometry", "z2");
        g.z3 = require_length(lk, "geometry", "z3");
        g.f = require_length(lk, "geometry", "f");
        g.f1 = require_length(lk, "geometry", "f1");
        g.f2 = require_length(lk, "geometry", "f2");
        g.L1 = require_length(lk, "geometry", "l1");
        g.L2 = require_length(lk, "geometry", "l2");
        cfg.geometry = g;
        cfg.conditions = check_imaging_conditions(g);
        cfg.magnification = g.f1 / g.f;
        if (!cfg.conditions->all()) {
            for (int i = 0; i < 3; ++i) {
                if (!cfg.conditions->satisfied[i]) {
                    char buf[160];
                    std::snprintf(buf, sizeof(buf),
                                  "config '%s': imaging condition %d unsatisfied (residual %.6g)",
                                  cfg.name.c_str(), i + 1, cfg.conditions->residual[i]);
                    detail::emit_diagnostic(buf);
                }
            }
        }
    }

    return cfg;
}

bool is_known_key(const std::string& section, const std::string& key) {
    auto it = schema().find(section);
    return it != schema().end() && it->second.count(key) > 0;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name) {
    return finalize_config(parse_raw(text, source_name));
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

namespace {

std::string fmt_len_mm(double meters) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g mm", meters * 1e3);
    return buf;
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string train_dsl(const OpticalTrain& train) {
    std::string out;
    for (const auto& el : train.elements) {
        std::string tok;
        if (const auto* fs = std::get_if<FreeSpace>(&el)) {
            tok = "free " + fmt_len_mm(fs->z);
        } else if (const auto* ln = std::get_if<ThinLens>(&el)) {
            tok = "lens " + fmt_len_mm(ln->f);
        } else if (std::get_if<MaskElement>(&el)) {
            tok = "object";
        } else if (const auto* sc = std::get_if<ScatterElement>(&el)) {
            tok = sc->layer.label == "medium2" ? "scatter 2" : "scatter 1";
        } else {
            continue;  // detector plane is appended implicitly
        }
        if (!out.empty()) out += " | ";
        out += tok;
    }
    return out;
}

std::string detector_block(const char* title, const DetectorSpec& det) {
    std::ostringstream os;
    os << "[detector " << title << "]\n";
    os << "kind = "
       << (det.kind == DetectorKind::Bucket ? "bucket"
           : det.kind == DetectorKind::Camera ? "camera" : "point")
       << "\n";
    os << "pixel_pitch = " << fmt_len_mm(det.pixel_pitch) << "\n";
    if (det.extent > 0.0) os << "extent = " << fmt_len_mm(det.extent) << "\n";
    if (det.x != 0.0) os << "x = " << fmt_len_mm(det.x) << "\n";
    return os.str();
}

std::string medium_block(const char* title, const ScatteringLayer& layer) {
    std::ostringstream os;
    os << "[medium " << title << "]\n";
    os << "thickness = " << fmt_len_mm(layer.thickness) << "\n";
    // alpha and beta are derived; emit the scattering coefficient that produces
    // them so the block reparses through the same builder.
    if (layer.thickness > 0.0 && std::abs(layer.alpha) > 0.0)
        os << "mu_s = " << fmt_num(-2.0 * std::log(std::abs(layer.alpha)) / layer.thickness)
           << " /m\n";
    if (layer.delta_x > 0.0) os << "delta_x = " << fmt_len_mm(layer.delta_x) << "\n";
    os << "halo = " << (layer.diffuse_halo ? "on" : "off") << "\n";
    if (layer.halo_band > 0.0) os << "halo_band = " << fmt_num(layer.halo_band) << " /m\n";
    return os.str();
}

}  // namespace

std::string canonical_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    const GridSpec& grid = cfg.source.grid;
    os << "[grid]\n";
    os << "n = " << grid.n << "\n";
    os << "pitch = " << fmt_len_mm(grid.pitch) << "\n";
    os << "[source]\n";
    char wl[64];
    std::snprintf(wl, sizeof(wl), "%.12g nm", cfg.wavelength * 1e9);
    os << "wavelength = " << wl << "\n";
    os << "aperture = " << fmt_len_mm(cfg.source.aperture_width) << "\n";
    os << "intensity = " << fmt_num(cfg.source.mean_intensity) << "\n";
    os << "statistics = "
       << (cfg.source.statistics == SourceStatistics::CircularGaussian ? "circular-gaussian"
                                                                       : "phase-only")
       << "\n";
    os << "[object]\n";
    os << "kind = " << cfg.object_kind << "\n";
    if (cfg.object_a > 0.0) os << "a = " << fmt_len_mm(cfg.object_a) << "\n";
    if (cfg.object_d > 0.0) os << "d = " << fmt_len_mm(cfg.object_d) << "\n";
    os << medium_block("1", cfg.layer1);
    os << medium_block("2", cfg.layer2);
    os << "[train reference]\n";
    os << "elements = " << train_dsl(cfg.reference_train) << "\n";
    os << "[train test]\n";
    os << "elements = " << train_dsl(cfg.test_train) << "\n";
    os << detector_block("reference", cfg.det_ref);
    os << detector_block("test", cfg.det_test);
    os << "[correlation]\n";
    os << "mode = "
       << (cfg.mode == AccumulatorMode::Bucket            ? "bucket"
           : cfg.mode == AccumulatorMode::OuterProduct    ? "outer-product"
           : cfg.mode == AccumulatorMode::AntiDiagonal    ? "anti-diagonal"
                                                          : "fixed-test-point")
       << "\n";
    os << "x_t = " << fmt_len_mm(cfg.x_t) << "\n";
    if (cfg.geometry) {
        const ImagingGeometry& g = *cfg.geometry;
        os << "[geometry]\n";
        os << "z = " << fmt_len_mm(g.z) << "\n";
        os << "z1 = " << fmt_len_mm(g.z1) << "\n";
        os << "z2 = " << fmt_len_mm(g.z2) << "\n";
        os << "z3 = " << fmt_len_mm(g.z3) << "\n";
        os << "f = " << fmt_len_mm(g.f) << "\n";
        os << "f1 = " << fmt_len_mm(g.f1) << "\n";
        os << "f2 = " << fmt_len_mm(g.f2) << "\n";
        os << "l1 = " << fmt_len_mm(g.L1) << "\n";
        os << "l2 = " << fmt_len_mm(g.L2) << "\n";
    }
    os << "[run]\n";
    os << "frames = " << cfg.frames << "\n";
    os << "seed = " << cfg.master_seed << "\n";
    os << "shards = " << cfg.shards << "\n";
    return os.str();
}

}  // namespace gsim
