#pragma once

#include <cstdint>
#include <vector>

#include <cassini/cassini.hpp>

namespace cassini::testing {

inline PointCloud line(std::vector<double> xs) { return PointCloud(1, std::move(xs)); }

inline PointCloud cloud(std::size_t n, std::uint64_t seed, std::size_t dim = 2, double lo = 0.0, double hi = 1.0)
{
    Rng rng(seed);
    return random_cloud(n, dim, rng, lo, hi);
}

inline DistanceMatrix euclid(std::size_t n, std::uint64_t seed, std::size_t dim = 2)
{
    return build_distance_matrix(cloud(n, seed, dim), BaseMetric::euclidean);
}

/// Points at several scales around a few cluster centres, so that ratios of
/// distances span orders of magnitude.
inline PointCloud multiscale(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> xy;
    for (std::size_t i = 0; i < n; ++i) {
        const double cx = static_cast<double>(rng.below(3)) * 10.0;
        const double r = std::pow(10.0, rng.uniform(-3.0, 1.0));
        const double a = rng.uniform(0.0, 6.283185307179586);
        xy.push_back(cx + r * std::cos(a));
        xy.push_back(r * std::sin(a));
    }
    return PointCloud(2, std::move(xy));
}

} // namespace cassini::testing
