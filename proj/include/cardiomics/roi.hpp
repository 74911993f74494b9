#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardiomics/volume.hpp"

namespace cardiomics {

inline const std::vector<std::string> kStructures = {"LV", "MYO", "RV"};
inline const std::vector<std::string> kPhases = {"ED", "ES"};

/// The voxels of one cardiac structure at one phase, with their intensities.
struct RegionOfInterest {
    std::string structure;  // LV / MYO / RV
    std::string phase;      // ED / ES
    Dims dims;
    Spacing spacing{1.0, 1.0, 1.0};
    std::vector<IVec3> voxel_indices;
    std::vector<double> intensities;       // parallel to voxel_indices
    std::vector<std::uint8_t> binary_mask;  // same dims as the source grids

    [[nodiscard]] std::size_t size() const { return voxel_indices.size(); }
};

/// Collects the voxels with seg == label into a region.
inline RegionOfInterest extract_region(const ImageVolume& volume, const LabeledSegmentation& seg,
                                       int label, const std::string& structure,
                                       const std::string& phase) {
    if (!(volume.dims == seg.dims))
        throw std::runtime_error("extract_region: volume dims " + volume.dims.str() +
                                 " do not match segmentation dims " + seg.dims.str());
    RegionOfInterest roi;
    roi.structure = structure;
    roi.phase = phase;
    roi.dims = volume.dims;
    roi.spacing = volume.spacing;
    roi.binary_mask.assign(volume.dims.size(), 0);
    for (int z = 0; z < seg.dims.nz; ++z)
        for (int y = 0; y < seg.dims.ny; ++y)
            for (int x = 0; x < seg.dims.nx; ++x) {
                const std::size_t idx = flat_index(seg.dims, x, y, z);
                if (seg.labels[idx] == label) {
                    roi.voxel_indices.push_back(IVec3{x, y, z});
                    roi.intensities.push_back(volume.voxels[idx]);
                    roi.binary_mask[idx] = 1;
                }
            }
    if (roi.voxel_indices.empty())
        throw std::runtime_error("extract_region: label " + std::to_string(label) + " (" +
                                 structure + ", " + phase + ") is absent from the segmentation");
    return roi;
}

struct DiscretizationParams {
    enum class Mode { FixedBinCount, FixedBinWidth };
    Mode mode = Mode::FixedBinCount;
    int num_bins = 32;       // Ng, used in FixedBinCount mode
    double bin_width = 1.0;  // used in FixedBinWidth mode
};

/// A region mapped to integer gray levels 1..num_levels.
struct DiscretizedRegion {
    RegionOfInterest region;
    int num_levels = 1;       // maximum observed level
    std::vector<int> levels;  // parallel to region.voxel_indices
};

/// Maps intensities to gray levels. Fixed-bin-count:
///   level(x) = min(Ng, floor((x - min) / ((max - min)/Ng)) + 1),
/// all levels = 1 when max == min. Fixed-bin-width:
///   level(x) = floor((x - min)/w) + 1.
inline DiscretizedRegion discretize(const RegionOfInterest& region,
                                    const DiscretizationParams& params = {}) {
    if (region.voxel_indices.empty()) throw std::runtime_error("discretize: empty region");
    DiscretizedRegion out;
    out.region = region;
    out.levels.resize(region.intensities.size());

    const auto [mn_it, mx_it] =
        std::minmax_element(region.intensities.begin(), region.intensities.end());
    const double mn = *mn_it, mx = *mx_it;

    if (params.mode == DiscretizationParams::Mode::FixedBinCount) {
        const int ng = params.num_bins;
        if (ng < 2) throw std::runtime_error("discretize: bin count must be >= 2");
        if (mx == mn) {
            std::fill(out.levels.begin(), out.levels.end(), 1);
            out.num_levels = 1;
            return out;
        }
        const double width = (mx - mn) / static_cast<double>(ng);
        for (std::size_t i = 0; i < region.intensities.size(); ++i) {
            const int lvl =
                static_cast<int>(std::floor((region.intensities[i] - mn) / width)) + 1;
            out.levels[i] = std::min(ng, lvl);
        }
        out.num_levels = ng;
    } else {
        const double w = params.bin_width;
        if (!(w > 0.0)) throw std::runtime_error("discretize: bin width must be > 0");
        int max_level = 1;
        for (std::size_t i = 0; i < region.intensities.size(); ++i) {
            const int lvl = static_cast<int>(std::floor((region.intensities[i] - mn) / w)) + 1;
            out.levels[i] = lvl;
            max_level = std::max(max_level, lvl);
        }
        out.num_levels = max_level;
    }
    return out;
}

}  // namespace cardiomics
