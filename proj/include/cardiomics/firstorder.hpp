#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cardiomics/roi.hpp"

namespace cardiomics {

struct FirstOrderFeatures {
    double energy = 0;
    double total_energy = 0;  // energy * single-voxel volume
    double entropy = 0;       // bits, over the discretized histogram
    double minimum = 0;
    double p10 = 0;
    double p90 = 0;
    double maximum = 0;
    double mean = 0;
    double median = 0;
    double interquartile_range = 0;
    double range = 0;
    double mean_absolute_deviation = 0;
    double robust_mad = 0;  // MAD over values within [p10, p90]
    double root_mean_squared = 0;
    double standard_deviation = 0;
    double variance = 0;
    double skewness = 0;
    double kurtosis = 0;  // non-excess: Gaussian -> 3
    double uniformity = 0;
};

namespace detail {

/// Percentile by linear interpolation between closest ranks over sorted data.
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q / 100.0 * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

/// First-order statistics over the region's raw intensities, with population
/// (1/N) moments. Entropy and uniformity use the discretized level histogram.
inline FirstOrderFeatures first_order_features(const DiscretizedRegion& dr) {
    const auto& xs = dr.region.intensities;
    if (xs.empty()) throw std::runtime_error("first_order_features: empty region");
    const double n = static_cast<double>(xs.size());

    FirstOrderFeatures f;
    double sum = 0, sum_sq = 0;
    for (double x : xs) {
        sum += x;
        sum_sq += x * x;
    }
    f.mean = sum / n;
    f.energy = sum_sq;
    f.total_energy = sum_sq * dr.region.spacing[0] * dr.region.spacing[1] * dr.region.spacing[2];
    f.root_mean_squared = std::sqrt(sum_sq / n);

    double m2 = 0, m3 = 0, m4 = 0, abs_dev = 0;
    for (double x : xs) {
        const double d = x - f.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        abs_dev += std::abs(d);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    f.variance = m2;
    f.standard_deviation = std::sqrt(m2);
    f.mean_absolute_deviation = abs_dev / n;
    if (m2 > 0) {
        f.skewness = m3 / std::pow(m2, 1.5);
        f.kurtosis = m4 / (m2 * m2);
    }  // both defined as 0 for zero-variance regions

    std::vector<double> sorted(xs);
    std::sort(sorted.begin(), sorted.end());
    f.minimum = sorted.front();
    f.maximum = sorted.back();
    f.range = f.maximum - f.minimum;
    f.p10 = detail::percentile_sorted(sorted, 10.0);
    f.p90 = detail::percentile_sorted(sorted, 90.0);
    f.median = detail::percentile_sorted(sorted, 50.0);
    f.interquartile_range =
        detail::percentile_sorted(sorted, 75.0) - detail::percentile_sorted(sorted, 25.0);

    double trimmed_sum = 0;
    std::size_t trimmed_n = 0;
    for (double x : sorted)
        if (x >= f.p10 && x <= f.p90) {
            trimmed_sum += x;
            ++trimmed_n;
        }
    if (trimmed_n > 0) {
        const double trimmed_mean = trimmed_sum / static_cast<double>(trimmed_n);
        double trimmed_dev = 0;
        for (double x : sorted)
            if (x >= f.p10 && x <= f.p90) trimmed_dev += std::abs(x - trimmed_mean);
        f.robust_mad = trimmed_dev / static_cast<double>(trimmed_n);
    }

    std::vector<double> hist(dr.num_levels, 0.0);
    for (int lvl : dr.levels) hist[lvl - 1] += 1.0 / n;
    for (double p : hist)
        if (p > 0) {
            f.entropy -= p * std::log2(p);
            f.uniformity += p * p;
        }
    return f;
}

}  // namespace cardiomics
