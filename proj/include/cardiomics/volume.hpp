#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardiomics {

struct Dims {
    int nx = 0, ny = 0, nz = 0;

    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    bool operator==(const Dims&) const = default;

    [[nodiscard]] std::string str() const {
        return std::to_string(nx) + "x" + std::to_string(ny) + "x" + std::to_string(nz);
    }
};

using Spacing = std::array<double, 3>;

struct IVec3 {
    int x = 0, y = 0, z = 0;
    bool operator==(const IVec3&) const = default;
};

inline std::size_t flat_index(const Dims& d, int x, int y, int z) {
    // x-fastest storage order
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(d.nx) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(z));
}

inline bool in_bounds(const Dims& d, int x, int y, int z) {
    return x >= 0 && x < d.nx && y >= 0 && y < d.ny && z >= 0 && z < d.nz;
}

/// 3D scalar intensity grid with per-axis physical spacing (mm per voxel).
struct ImageVolume {
    Dims dims;
    Spacing spacing{1.0, 1.0, 1.0};
    std::vector<double> voxels;  // x-fastest

    [[nodiscard]] double at(int x, int y, int z) const { return voxels[flat_index(dims, x, y, z)]; }
    double& at(int x, int y, int z) { return voxels[flat_index(dims, x, y, z)]; }

    void validate() const {
        if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0)
            throw std::runtime_error("volume: non-positive dimensions " + dims.str());
        if (voxels.size() != dims.size())
            throw std::runtime_error("volume: voxel count " + std::to_string(voxels.size()) +
                                     " does not match dims " + dims.str());
        for (double s : spacing)
            if (!(s > 0.0) || !std::isfinite(s))
                throw std::runtime_error("volume: spacing components must be positive and finite");
        for (double v : voxels)
            if (!std::isfinite(v)) throw std::runtime_error("volume: non-finite voxel intensity");
    }
};

/// Integer label grid aligned with an ImageVolume; 0 = background.
struct LabeledSegmentation {
    Dims dims;
    std::vector<int> labels;  // x-fastest

    [[nodiscard]] int at(int x, int y, int z) const { return labels[flat_index(dims, x, y, z)]; }
    int& at(int x, int y, int z) { return labels[flat_index(dims, x, y, z)]; }

    [[nodiscard]] std::map<int, std::size_t> label_census() const {
        std::map<int, std::size_t> census;
        for (int v : labels) ++census[v];
        return census;
    }

    void validate() const {
        if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0)
            throw std::runtime_error("segmentation: non-positive dimensions " + dims.str());
        if (labels.size() != dims.size())
            throw std::runtime_error("segmentation: label count does not match dims " + dims.str());
        for (int v : labels)
            if (v < 0) throw std::runtime_error("segmentation: negative label value");
    }
};

}  // namespace cardiomics
