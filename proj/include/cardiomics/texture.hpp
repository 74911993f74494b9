#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cardiomics/roi.hpp"
#include "cardiomics/volume.hpp"

namespace cardiomics {

/// The 13 unique 3D direction offsets; together with their negations they
/// cover all 26 neighbors exactly once.
inline constexpr std::array<IVec3, 13> kDirections13 = {{
    {0, 0, 1},
    {0, 1, -1},
    {0, 1, 0},
    {0, 1, 1},
    {1, -1, -1},
    {1, -1, 0},
    {1, -1, 1},
    {1, 0, -1},
    {1, 0, 0},
    {1, 0, 1},
    {1, 1, -1},
    {1, 1, 0},
    {1, 1, 1},
}};

namespace detail {

/// Dense level grid: 0 outside the region, 1..Ng inside.
inline std::vector<int> level_grid(const DiscretizedRegion& dr) {
    std::vector<int> grid(dr.region.dims.size(), 0);
    for (std::size_t i = 0; i < dr.region.voxel_indices.size(); ++i) {
        const auto& v = dr.region.voxel_indices[i];
        grid[flat_index(dr.region.dims, v.x, v.y, v.z)] = dr.levels[i];
    }
    return grid;
}

inline double log2_safe(double p) { return std::log2(p); }

}  // namespace detail

// ---------------------------------------------------------------------------
// GLCM
// ---------------------------------------------------------------------------

struct CooccurrenceMatrix {
    int num_levels = 1;
    int distance = 1;
    std::vector<std::int64_t> counts;  // Ng x Ng, symmetrized, summed over offsets
    std::vector<double> p;             // normalized to sum 1
    std::int64_t total_pairs = 0;
    bool degenerate = false;  // no in-region voxel pair at this distance

    [[nodiscard]] std::int64_t count_at(int i, int j) const {
        return counts[static_cast<std::size_t>(i - 1) * num_levels + (j - 1)];
    }
    [[nodiscard]] double at(int i, int j) const {
        return p[static_cast<std::size_t>(i - 1) * num_levels + (j - 1)];
    }
};

/// Counts level pairs over the 13 offsets at the given voxel distance,
/// symmetrizes by adding the transpose, sums across offsets, and normalizes.
/// When the region admits no pair at all (e.g. a single voxel), the
/// probability matrix falls back to the diagonal level histogram, which for a
/// single voxel is the single entry P[g][g] = 1.
inline CooccurrenceMatrix build_glcm(const DiscretizedRegion& dr, int distance = 1) {
    if (dr.region.voxel_indices.empty()) throw std::runtime_error("build_glcm: empty region");
    if (distance < 1) throw std::runtime_error("build_glcm: distance must be >= 1");

    const int ng = dr.num_levels;
    const Dims& dims = dr.region.dims;
    const auto grid = detail::level_grid(dr);

    CooccurrenceMatrix m;
    m.num_levels = ng;
    m.distance = distance;
    m.counts.assign(static_cast<std::size_t>(ng) * ng, 0);

    std::vector<std::int64_t> ordered(static_cast<std::size_t>(ng) * ng, 0);
    for (std::size_t i = 0; i < dr.region.voxel_indices.size(); ++i) {
        const auto& v = dr.region.voxel_indices[i];
        const int a = dr.levels[i];
        for (const auto& d : kDirections13) {
            const int x = v.x + d.x * distance;
            const int y = v.y + d.y * distance;
            const int z = v.z + d.z * distance;
            if (!in_bounds(dims, x, y, z)) continue;
            const int b = grid[flat_index(dims, x, y, z)];
            if (b == 0) continue;
            ++ordered[static_cast<std::size_t>(a - 1) * ng + (b - 1)];
        }
    }
    for (int i = 0; i < ng; ++i)
        for (int j = 0; j < ng; ++j)
            m.counts[static_cast<std::size_t>(i) * ng + j] =
                ordered[static_cast<std::size_t>(i) * ng + j] +
                ordered[static_cast<std::size_t>(j) * ng + i];

    m.total_pairs = 0;
    for (auto c : m.counts) m.total_pairs += c;

    m.p.assign(m.counts.size(), 0.0);
    if (m.total_pairs > 0) {
        for (std::size_t i = 0; i < m.counts.size(); ++i)
            m.p[i] = static_cast<double>(m.counts[i]) / static_cast<double>(m.total_pairs);
    } else {
        m.degenerate = true;
        const double w = 1.0 / static_cast<double>(dr.levels.size());
        for (int lvl : dr.levels) m.p[static_cast<std::size_t>(lvl - 1) * ng + (lvl - 1)] += w;
    }
    return m;
}

struct GlcmFeatures {
    double autocorrelation = 0;
    double cluster_prominence = 0;
    double cluster_shade = 0;
    double cluster_tendency = 0;
    double contrast = 0;
    double correlation = 0;
    double difference_average = 0;
    double difference_entropy = 0;
    double difference_variance = 0;
    double joint_energy = 0;
    double joint_entropy = 0;
    double imc1 = 0;
    double imc2 = 0;
    double inverse_difference = 0;
    double inverse_difference_normalized = 0;
    double inverse_difference_moment = 0;
    double inverse_difference_moment_normalized = 0;
    double inverse_variance = 0;
    double maximum_probability = 0;
    double sum_average = 0;
    double sum_entropy = 0;
    double sum_of_squares = 0;
};

inline GlcmFeatures glcm_features(const CooccurrenceMatrix& m) {
    const int ng = m.num_levels;
    GlcmFeatures f;

    std::vector<double> px(ng, 0.0);
    for (int i = 1; i <= ng; ++i)
        for (int j = 1; j <= ng; ++j) px[i - 1] += m.at(i, j);
    // symmetric matrix, so py == px
    const std::vector<double>& py = px;

    double mu_x = 0;
    for (int i = 1; i <= ng; ++i) mu_x += i * px[i - 1];
    const double mu_y = mu_x;
    double var_x = 0;
    for (int i = 1; i <= ng; ++i) var_x += (i - mu_x) * (i - mu_x) * px[i - 1];
    const double sigma_x = std::sqrt(var_x), sigma_y = sigma_x;

    std::vector<double> p_sum(2 * ng + 1, 0.0);   // index k = i + j, 2..2Ng
    std::vector<double> p_diff(ng, 0.0);          // index k = |i - j|, 0..Ng-1
    double cross = 0;                             // sum of i*j*p
    for (int i = 1; i <= ng; ++i) {
        for (int j = 1; j <= ng; ++j) {
            const double p = m.at(i, j);
            if (p == 0.0) continue;
            p_sum[i + j] += p;
            p_diff[std::abs(i - j)] += p;
            cross += static_cast<double>(i) * j * p;

            const double s = i + j - mu_x - mu_y;
            f.autocorrelation += static_cast<double>(i) * j * p;
            f.cluster_tendency += s * s * p;
            f.cluster_shade += s * s * s * p;
            f.cluster_prominence += s * s * s * s * p;
            f.contrast += static_cast<double>(i - j) * (i - j) * p;
            f.joint_energy += p * p;
            f.joint_entropy -= p * detail::log2_safe(p);
            f.inverse_difference += p / (1.0 + std::abs(i - j));
            f.inverse_difference_normalized += p / (1.0 + static_cast<double>(std::abs(i - j)) / ng);
            f.inverse_difference_moment += p / (1.0 + static_cast<double>(i - j) * (i - j));
            f.inverse_difference_moment_normalized +=
                p / (1.0 + static_cast<double>(i - j) * (i - j) / (static_cast<double>(ng) * ng));
            if (i != j) f.inverse_variance += p / (static_cast<double>(i - j) * (i - j));
            f.maximum_probability = std::max(f.maximum_probability, p);
            f.sum_of_squares += (i - mu_x) * (i - mu_x) * p;
        }
    }

    f.correlation =
        (sigma_x * sigma_y > 1e-15) ? (cross - mu_x * mu_y) / (sigma_x * sigma_y) : 1.0;

    for (int k = 2; k <= 2 * ng; ++k) {
        const double p = p_sum[k];
        if (p == 0.0) continue;
        f.sum_average += k * p;
        f.sum_entropy -= p * detail::log2_safe(p);
    }
    for (int k = 0; k < ng; ++k) {
        const double p = p_diff[k];
        if (p == 0.0) continue;
        f.difference_average += k * p;
        f.difference_entropy -= p * detail::log2_safe(p);
    }
    for (int k = 0; k < ng; ++k) {
        const double p = p_diff[k];
        if (p == 0.0) continue;
        f.difference_variance += (k - f.difference_average) * (k - f.difference_average) * p;
    }

    double hx = 0, hxy1 = 0, hxy2 = 0;
    for (int i = 1; i <= ng; ++i)
        if (px[i - 1] > 0) hx -= px[i - 1] * detail::log2_safe(px[i - 1]);
    for (int i = 1; i <= ng; ++i) {
        for (int j = 1; j <= ng; ++j) {
            const double pp = px[i - 1] * py[j - 1];
            if (pp > 0) {
                hxy2 -= pp * detail::log2_safe(pp);
                if (m.at(i, j) > 0) hxy1 -= m.at(i, j) * detail::log2_safe(pp);
            }
        }
    }
    const double hmax = hx;  // max(HX, HY) with HX == HY
    f.imc1 = (hmax > 1e-15) ? (f.joint_entropy - hxy1) / hmax : 0.0;
    f.imc2 = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - f.joint_entropy))));
    return f;
}

// ---------------------------------------------------------------------------
// GLRLM
// ---------------------------------------------------------------------------

struct RunLengthMatrix {
    int num_levels = 1;
    int max_run_length = 1;
    std::size_t num_voxels = 0;
    // Per direction: counts[g][l] with g in 1..Ng, l in 1..Lmax, plus the run total.
    struct Direction {
        std::vector<std::int64_t> counts;  // Ng x Lmax
        std::int64_t num_runs = 0;
    };
    std::array<Direction, 13> directions;

    [[nodiscard]] std::int64_t count_at(int dir, int g, int l) const {
        return directions[dir].counts[static_cast<std::size_t>(g - 1) * max_run_length + (l - 1)];
    }
};

/// Decomposes each of the 13 directions into maximal constant-level runs.
/// Out-of-region voxels break runs.
inline RunLengthMatrix build_glrlm(const DiscretizedRegion& dr) {
    if (dr.region.voxel_indices.empty()) throw std::runtime_error("build_glrlm: empty region");
    const Dims& dims = dr.region.dims;
    const int ng = dr.num_levels;
    const auto grid = detail::level_grid(dr);

    std::array<std::vector<std::pair<int, int>>, 13> runs;  // (level, length)
    int lmax = 1;
    for (std::size_t di = 0; di < kDirections13.size(); ++di) {
        const IVec3 d = kDirections13[di];
        for (int z = 0; z < dims.nz; ++z) {
            for (int y = 0; y < dims.ny; ++y) {
                for (int x = 0; x < dims.nx; ++x) {
                    // line starts: the predecessor along d falls outside the grid
                    if (in_bounds(dims, x - d.x, y - d.y, z - d.z)) continue;
                    int cur_level = 0, cur_len = 0;
                    int cx = x, cy = y, cz = z;
                    while (in_bounds(dims, cx, cy, cz)) {
                        const int lvl = grid[flat_index(dims, cx, cy, cz)];
                        if (lvl == cur_level && lvl != 0) {
                            ++cur_len;
                        } else {
                            if (cur_level != 0) {
                                runs[di].emplace_back(cur_level, cur_len);
                                lmax = std::max(lmax, cur_len);
                            }
                            cur_level = lvl;
                            cur_len = (lvl != 0) ? 1 : 0;
                        }
                        cx += d.x;
                        cy += d.y;
                        cz += d.z;
                    }
                    if (cur_level != 0) {
                        runs[di].emplace_back(cur_level, cur_len);
                        lmax = std::max(lmax, cur_len);
                    }
                }
            }
        }
    }

    RunLengthMatrix m;
    m.num_levels = ng;
    m.max_run_length = lmax;
    m.num_voxels = dr.region.voxel_indices.size();
    for (std::size_t di = 0; di < runs.size(); ++di) {
        auto& dst = m.directions[di];
        dst.counts.assign(static_cast<std::size_t>(ng) * lmax, 0);
        dst.num_runs = static_cast<std::int64_t>(runs[di].size());
        for (const auto& [g, l] : runs[di])
            ++dst.counts[static_cast<std::size_t>(g - 1) * lmax + (l - 1)];
    }
    return m;
}

struct GlrlmFeatures {
    double short_run_emphasis = 0;
    double long_run_emphasis = 0;
    double gray_level_nonuniformity = 0;
    double gray_level_nonuniformity_normalized = 0;
    double run_length_nonuniformity = 0;
    double run_length_nonuniformity_normalized = 0;
    double run_percentage = 0;
    double gray_level_variance = 0;
    double run_variance = 0;
    double run_entropy = 0;
    double low_gray_level_run_emphasis = 0;
    double high_gray_level_run_emphasis = 0;
    double short_run_low_gray_level_emphasis = 0;
    double short_run_high_gray_level_emphasis = 0;
    double long_run_low_gray_level_emphasis = 0;
    double long_run_high_gray_level_emphasis = 0;
};

namespace detail {

/// The shared 16-feature computation over a (gray level x size) count matrix;
/// used per GLRLM direction and for the single GLSZM matrix.
inline GlrlmFeatures size_distribution_features(const std::vector<std::int64_t>& counts, int ng,
                                                int smax, std::int64_t total,
                                                std::size_t num_voxels) {
    GlrlmFeatures f;
    if (total <= 0) return f;
    const double nr = static_cast<double>(total);

    std::vector<double> by_level(ng, 0.0), by_size(smax, 0.0);
    double mu_g = 0, mu_s = 0;
    for (int g = 1; g <= ng; ++g) {
        for (int s = 1; s <= smax; ++s) {
            const auto c = counts[static_cast<std::size_t>(g - 1) * smax + (s - 1)];
            if (c == 0) continue;
            const double n = static_cast<double>(c);
            const double gg = static_cast<double>(g) * g;
            const double ss = static_cast<double>(s) * s;
            f.short_run_emphasis += n / ss;
            f.long_run_emphasis += n * ss;
            f.low_gray_level_run_emphasis += n / gg;
            f.high_gray_level_run_emphasis += n * gg;
            f.short_run_low_gray_level_emphasis += n / (gg * ss);
            f.short_run_high_gray_level_emphasis += n * gg / ss;
            f.long_run_low_gray_level_emphasis += n * ss / gg;
            f.long_run_high_gray_level_emphasis += n * gg * ss;
            by_level[g - 1] += n;
            by_size[s - 1] += n;
            const double p = n / nr;
            mu_g += p * g;
            mu_s += p * s;
            f.run_entropy -= p * log2_safe(p);
        }
    }
    for (double c : by_level) f.gray_level_nonuniformity += c * c;
    for (double c : by_size) f.run_length_nonuniformity += c * c;

    f.short_run_emphasis /= nr;
    f.long_run_emphasis /= nr;
    f.low_gray_level_run_emphasis /= nr;
    f.high_gray_level_run_emphasis /= nr;
    f.short_run_low_gray_level_emphasis /= nr;
    f.short_run_high_gray_level_emphasis /= nr;
    f.long_run_low_gray_level_emphasis /= nr;
    f.long_run_high_gray_level_emphasis /= nr;
    f.gray_level_nonuniformity /= nr;
    f.gray_level_nonuniformity_normalized = f.gray_level_nonuniformity / nr;
    f.run_length_nonuniformity /= nr;
    f.run_length_nonuniformity_normalized = f.run_length_nonuniformity / nr;
    f.run_percentage = nr / static_cast<double>(num_voxels);

    for (int g = 1; g <= ng; ++g)
        for (int s = 1; s <= smax; ++s) {
            const auto c = counts[static_cast<std::size_t>(g - 1) * smax + (s - 1)];
            if (c == 0) continue;
            const double p = static_cast<double>(c) / nr;
            f.gray_level_variance += (g - mu_g) * (g - mu_g) * p;
            f.run_variance += (s - mu_s) * (s - mu_s) * p;
        }
    return f;
}

}  // namespace detail

/// The 16 run-length features, computed per direction and averaged over the
/// 13 directions.
inline GlrlmFeatures glrlm_features(const RunLengthMatrix& m) {
    GlrlmFeatures acc;
    for (const auto& dir : m.directions) {
        const GlrlmFeatures f = detail::size_distribution_features(
            dir.counts, m.num_levels, m.max_run_length, dir.num_runs, m.num_voxels);
        acc.short_run_emphasis += f.short_run_emphasis;
        acc.long_run_emphasis += f.long_run_emphasis;
        acc.gray_level_nonuniformity += f.gray_level_nonuniformity;
        acc.gray_level_nonuniformity_normalized += f.gray_level_nonuniformity_normalized;
        acc.run_length_nonuniformity += f.run_length_nonuniformity;
        acc.run_length_nonuniformity_normalized += f.run_length_nonuniformity_normalized;
        acc.run_percentage += f.run_percentage;
        acc.gray_level_variance += f.gray_level_variance;
        acc.run_variance += f.run_variance;
        acc.run_entropy += f.run_entropy;
        acc.low_gray_level_run_emphasis += f.low_gray_level_run_emphasis;
        acc.high_gray_level_run_emphasis += f.high_gray_level_run_emphasis;
        acc.short_run_low_gray_level_emphasis += f.short_run_low_gray_level_emphasis;
        acc.short_run_high_gray_level_emphasis += f.short_run_high_gray_level_emphasis;
        acc.long_run_low_gray_level_emphasis += f.long_run_low_gray_level_emphasis;
        acc.long_run_high_gray_level_emphasis += f.long_run_high_gray_level_emphasis;
    }
    const double n = static_cast<double>(m.directions.size());
    acc.short_run_emphasis /= n;
    acc.long_run_emphasis /= n;
    acc.gray_level_nonuniformity /= n;
    acc.gray_level_nonuniformity_normalized /= n;
    acc.run_length_nonuniformity /= n;
    acc.run_length_nonuniformity_normalized /= n;
    acc.run_percentage /= n;
    acc.gray_level_variance /= n;
    acc.run_variance /= n;
    acc.run_entropy /= n;
    acc.low_gray_level_run_emphasis /= n;
    acc.high_gray_level_run_emphasis /= n;
    acc.short_run_low_gray_level_emphasis /= n;
    acc.short_run_high_gray_level_emphasis /= n;
    acc.long_run_low_gray_level_emphasis /= n;
    acc.long_run_high_gray_level_emphasis /= n;
    return acc;
}

// ---------------------------------------------------------------------------
// GLSZM
// ---------------------------------------------------------------------------

struct SizeZoneMatrix {
    int num_levels = 1;
    int max_zone_size = 1;
    std::size_t num_voxels = 0;
    std::vector<std::int64_t> counts;  // Ng x Zmax
    std::int64_t num_zones = 0;

    [[nodiscard]] std::int64_t count_at(int g, int z) const {
        return counts[static_cast<std::size_t>(g - 1) * max_zone_size + (z - 1)];
    }
};

/// Zones are maximal 26-connected components of equal-level in-region voxels.
inline SizeZoneMatrix build_glszm(const DiscretizedRegion& dr) {
    if (dr.region.voxel_indices.empty()) throw std::runtime_error("build_glszm: empty region");
    const Dims& dims = dr.region.dims;
    const int ng = dr.num_levels;
    const auto grid = detail::level_grid(dr);

    std::vector<std::uint8_t> visited(dims.size(), 0);
    std::vector<std::pair<int, int>> zones;  // (level, size)
    std::vector<IVec3> stack;
    int zmax = 1;

    for (const auto& seed : dr.region.voxel_indices) {
        const std::size_t seed_idx = flat_index(dims, seed.x, seed.y, seed.z);
        if (visited[seed_idx]) continue;
        const int level = grid[seed_idx];
        int size = 0;
        visited[seed_idx] = 1;
        stack.clear();
        stack.push_back(seed);
        while (!stack.empty()) {
            const IVec3 v = stack.back();
            stack.pop_back();
            ++size;
            for (int dz = -1; dz <= 1; ++dz)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0 && dz == 0) continue;
                        const int x = v.x + dx, y = v.y + dy, z = v.z + dz;
                        if (!in_bounds(dims, x, y, z)) continue;
                        const std::size_t idx = flat_index(dims, x, y, z);
                        if (visited[idx] || grid[idx] != level) continue;
                        visited[idx] = 1;
                        stack.push_back(IVec3{x, y, z});
                    }
        }
        zones.emplace_back(level, size);
        zmax = std::max(zmax, size);
    }

    SizeZoneMatrix m;
    m.num_levels = ng;
    m.max_zone_size = zmax;
    m.num_voxels = dr.region.voxel_indices.size();
    m.num_zones = static_cast<std::int64_t>(zones.size());
    m.counts.assign(static_cast<std::size_t>(ng) * zmax, 0);
    for (const auto& [g, z] : zones)
        ++m.counts[static_cast<std::size_t>(g - 1) * zmax + (z - 1)];
    return m;
}

struct GlszmFeatures {
    double small_area_emphasis = 0;
    double large_area_emphasis = 0;
    double gray_level_nonuniformity = 0;
    double gray_level_nonuniformity_normalized = 0;
    double size_zone_nonuniformity = 0;
    double size_zone_nonuniformity_normalized = 0;
    double zone_percentage = 0;
    double gray_level_variance = 0;
    double zone_variance = 0;
    double zone_entropy = 0;
    double low_gray_level_zone_emphasis = 0;
    double high_gray_level_zone_emphasis = 0;
    double small_area_low_gray_level_emphasis = 0;
    double small_area_high_gray_level_emphasis = 0;
    double large_area_low_gray_level_emphasis = 0;
    double large_area_high_gray_level_emphasis = 0;
};

inline GlszmFeatures glszm_features(const SizeZoneMatrix& m) {
    const GlrlmFeatures f = detail::size_distribution_features(m.counts, m.num_levels,
                                                               m.max_zone_size, m.num_zones,
                                                               m.num_voxels);
    GlszmFeatures out;
    out.small_area_emphasis = f.short_run_emphasis;
    out.large_area_emphasis = f.long_run_emphasis;
    out.gray_level_nonuniformity = f.gray_level_nonuniformity;
    out.gray_level_nonuniformity_normalized = f.gray_level_nonuniformity_normalized;
    out.size_zone_nonuniformity = f.run_length_nonuniformity;
    out.size_zone_nonuniformity_normalized = f.run_length_nonuniformity_normalized;
    out.zone_percentage = f.run_percentage;
    out.gray_level_variance = f.gray_level_variance;
    out.zone_variance = f.run_variance;
    out.zone_entropy = f.run_entropy;
    out.low_gray_level_zone_emphasis = f.low_gray_level_run_emphasis;
    out.high_gray_level_zone_emphasis = f.high_gray_level_run_emphasis;
    out.small_area_low_gray_level_emphasis = f.short_run_low_gray_level_emphasis;
    out.small_area_high_gray_level_emphasis = f.short_run_high_gray_level_emphasis;
    out.large_area_low_gray_level_emphasis = f.long_run_low_gray_level_emphasis;
    out.large_area_high_gray_level_emphasis = f.long_run_high_gray_level_emphasis;
    return out;
}

}  // namespace cardiomics
