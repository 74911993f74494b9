#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cardiomics/nifti.hpp"
#include "cardiomics/volume.hpp"

namespace cardiomics {

inline const std::vector<std::string> kClassNames = {"NOR", "DCM", "HCM", "MINF", "RV"};

inline bool is_known_class(const std::string& c) {
    for (const auto& k : kClassNames)
        if (k == c) return true;
    return false;
}

struct SubjectRecord {
    std::string id;
    double height_cm = 0.0;
    double weight_kg = 0.0;
    int ed_frame = 0;
    int es_frame = 0;
    std::optional<std::string> class_label;  // absent for unlabeled test subjects
    std::string ed_image, ed_mask, es_image, es_mask;  // resolved paths
};

struct DatasetManifest {
    std::vector<SubjectRecord> subjects;
    std::map<int, std::string> label_map;  // nonzero label -> {RV, MYO, LV}

    [[nodiscard]] int label_for(const std::string& structure) const {
        for (const auto& [lbl, name] : label_map)
            if (name == structure) return lbl;
        throw std::runtime_error("manifest: no label mapped to structure '" + structure + "'");
    }
};

// ---------------------------------------------------------------------------
// Raw-JSON volume format: {"dims":[nx,ny,nz],"spacing":[sx,sy,sz],"data":[...]}
// with "data" flat in x-fastest order. Human-writable, used for unit fixtures
// and phantom datasets.
// ---------------------------------------------------------------------------

inline ImageVolume read_raw_json_volume(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("volume: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("volume: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.contains("dims") || !j.contains("spacing") || !j.contains("data"))
        throw std::runtime_error("volume: '" + path + "' is missing dims/spacing/data");
    const auto& jd = j["dims"];
    const auto& js = j["spacing"];
    if (!jd.is_array() || jd.size() != 3 || !js.is_array() || js.size() != 3)
        throw std::runtime_error("volume: '" + path + "' dims/spacing must have 3 entries");

    ImageVolume vol;
    vol.dims = Dims{jd[0].get<int>(), jd[1].get<int>(), jd[2].get<int>()};
    vol.spacing = {js[0].get<double>(), js[1].get<double>(), js[2].get<double>()};
    if (j["data"].size() != vol.dims.size())
        throw std::runtime_error("volume: '" + path + "' data length " +
                                 std::to_string(j["data"].size()) + " does not match dims " +
                                 vol.dims.str());
    vol.voxels = j["data"].get<std::vector<double>>();
    vol.validate();
    return vol;
}

inline void write_raw_json_volume(const ImageVolume& vol, const std::string& path) {
    vol.validate();
    nlohmann::json j;
    j["dims"] = {vol.dims.nx, vol.dims.ny, vol.dims.nz};
    j["spacing"] = {vol.spacing[0], vol.spacing[1], vol.spacing[2]};
    j["data"] = vol.voxels;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("volume: cannot open '" + path + "' for writing");
    out << j.dump() << "\n";
    if (!out) throw std::runtime_error("volume: short write to '" + path + "'");
}

inline bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

/// Loads a volume from NIfTI-1 (.nii/.nii.gz) or the raw-JSON test format (.json).
inline ImageVolume read_volume(const std::string& path) {
    if (has_suffix(path, ".json")) return read_raw_json_volume(path);
    return nifti::read(path);
}

/// Loads a segmentation mask from the same formats; payload values must be
/// nonnegative integers and the grid must match `expected_dims`.
inline LabeledSegmentation read_segmentation(const std::string& path, const Dims& expected_dims) {
    const ImageVolume v = read_volume(path);
    if (!(v.dims == expected_dims))
        throw std::runtime_error("segmentation: '" + path + "' dims " + v.dims.str() +
                                 " do not match expected " + expected_dims.str());
    LabeledSegmentation seg;
    seg.dims = v.dims;
    seg.labels.resize(v.voxels.size());
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        const double x = v.voxels[i];
        if (x < 0.0 || x != std::floor(x))
            throw std::runtime_error("segmentation: '" + path +
                                     "' holds a fractional or negative label value " +
                                     std::to_string(x));
        seg.labels[i] = static_cast<int>(x);
    }
    seg.validate();
    return seg;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
T require_field(const nlohmann::json& j, const std::string& key, const std::string& subject) {
    if (!j.contains(key))
        throw std::runtime_error("manifest: subject '" + subject + "' is missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::runtime_error("manifest: subject '" + subject + "' field '" + key +
                                 "' has the wrong type");
    }
}

}  // namespace detail

/// Parses and validates a dataset manifest. Relative image/mask paths are
/// resolved against the manifest's directory.
inline DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest: '" + path + "' is not valid JSON: " + e.what());
    }

    DatasetManifest m;
    if (!j.contains("label_map") || !j["label_map"].is_object())
        throw std::runtime_error("manifest: missing label_map object");
    std::set<std::string> mapped;
    for (const auto& [key, val] : j["label_map"].items()) {
        int lbl = 0;
        try {
            lbl = std::stoi(key);
        } catch (...) {
            throw std::runtime_error("manifest: label_map key '" + key + "' is not an integer");
        }
        if (lbl <= 0) throw std::runtime_error("manifest: label_map keys must be positive");
        const auto name = val.get<std::string>();
        if (name != "RV" && name != "MYO" && name != "LV")
            throw std::runtime_error("manifest: label_map value '" + name +
                                     "' is not one of RV/MYO/LV");
        if (!mapped.insert(name).second)
            throw std::runtime_error("manifest: structure '" + name + "' mapped twice");
        m.label_map[lbl] = name;
    }
    if (mapped.size() != 3)
        throw std::runtime_error("manifest: label_map must cover exactly {RV, MYO, LV}");

    if (!j.contains("subjects") || !j["subjects"].is_array())
        throw std::runtime_error("manifest: missing subjects array");

    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&base](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    std::set<std::string> ids;
    for (const auto& js : j["subjects"]) {
        SubjectRecord r;
        r.id = detail::require_field<std::string>(js, "id", js.value("id", "<missing id>"));
        if (!ids.insert(r.id).second)
            throw std::runtime_error("manifest: duplicate subject id '" + r.id + "'");
        r.height_cm = detail::require_field<double>(js, "height_cm", r.id);
        r.weight_kg = detail::require_field<double>(js, "weight_kg", r.id);
        r.ed_frame = detail::require_field<int>(js, "ed_frame", r.id);
        r.es_frame = detail::require_field<int>(js, "es_frame", r.id);
        if (!(r.height_cm > 0.0))
            throw std::runtime_error("manifest: subject '" + r.id + "' field 'height_cm' must be > 0");
        if (!(r.weight_kg > 0.0))
            throw std::runtime_error("manifest: subject '" + r.id + "' field 'weight_kg' must be > 0");
        if (r.ed_frame == r.es_frame)
            throw std::runtime_error("manifest: subject '" + r.id + "' has ed_frame == es_frame");
        if (js.contains("class")) {
            const auto c = js.at("class").get<std::string>();
            if (!is_known_class(c))
                throw std::runtime_error("manifest: subject '" + r.id + "' has unknown class '" + c + "'");
            r.class_label = c;
        }
        r.ed_image = resolve(detail::require_field<std::string>(js, "ed_image", r.id));
        r.ed_mask = resolve(detail::require_field<std::string>(js, "ed_mask", r.id));
        r.es_image = resolve(detail::require_field<std::string>(js, "es_image", r.id));
        r.es_mask = resolve(detail::require_field<std::string>(js, "es_mask", r.id));
        m.subjects.push_back(std::move(r));
    }
    return m;
}

inline void write_manifest(const DatasetManifest& m, const std::string& path) {
    nlohmann::json j;
    nlohmann::json lm = nlohmann::json::object();
    for (const auto& [lbl, name] : m.label_map) lm[std::to_string(lbl)] = name;
    j["label_map"] = lm;
    j["subjects"] = nlohmann::json::array();
    for (const auto& r : m.subjects) {
        nlohmann::json js;
        js["id"] = r.id;
        js["height_cm"] = r.height_cm;
        js["weight_kg"] = r.weight_kg;
        js["ed_frame"] = r.ed_frame;
        js["es_frame"] = r.es_frame;
        if (r.class_label) js["class"] = *r.class_label;
        js["ed_image"] = r.ed_image;
        js["ed_mask"] = r.ed_mask;
        js["es_image"] = r.es_image;
        js["es_mask"] = r.es_mask;
        j["subjects"].push_back(js);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("manifest: cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

}  // namespace cardiomics
