#pragma once

// Base metric spaces: point clouds, the distance functions used as base
// metrics, and the symmetric distance matrix every other module consumes.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"

namespace cassini {

using Coords = std::span<const double>;

/// Anything that answers d(i, j) over the index set [0, size()).
/// By contract d(i, i) == 0, d(i, j) == d(j, i) and d(i, j) >= 0.
template <class O>
concept MetricOracle = requires(const O& o, std::size_t i, std::size_t j) {
    { o(i, j) } -> std::convertible_to<double>;
    { o.size() } -> std::convertible_to<std::size_t>;
};

/// Labelled points in R^dim. Immutable once built.
class PointCloud {
public:
    PointCloud() = default;

    PointCloud(std::size_t dim, std::vector<double> coords, std::vector<std::string> labels = {})
        : dim_(dim)
        , coords_(std::move(coords))
        , labels_(std::move(labels))
    {
        if (dim_ == 0) {
            throw InputError("point cloud dimension must be positive");
        }
        if (coords_.size() % dim_ != 0) {
            throw InputError("coordinate count " + std::to_string(coords_.size())
                             + " is not a multiple of dimension " + std::to_string(dim_));
        }
        for (std::size_t k = 0; k < coords_.size(); ++k) {
            if (!std::isfinite(coords_[k])) {
                throw InputError("non-finite coordinate at point " + std::to_string(k / dim_));
            }
        }
        if (!labels_.empty()) {
            if (labels_.size() != size()) {
                throw InputError("label count does not match point count");
            }
            std::unordered_set<std::string> seen;
            for (const auto& label : labels_) {
                if (!seen.insert(label).second) {
                    throw InputError("duplicate point label '" + label + "'");
                }
            }
        }
    }

    static PointCloud from_rows(const std::vector<std::vector<double>>& rows,
                                std::vector<std::string> labels = {})
    {
        if (rows.empty()) {
            throw InputError("point cloud has no points");
        }
        const std::size_t dim = rows.front().size();
        std::vector<double> flat;
        flat.reserve(rows.size() * dim);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != dim) {
                throw InputError("point " + std::to_string(i) + " has dimension "
                                 + std::to_string(rows[i].size()) + ", expected " + std::to_string(dim));
            }
            flat.insert(flat.end(), rows[i].begin(), rows[i].end());
        }
        return PointCloud(dim, std::move(flat), std::move(labels));
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const noexcept { return size() == 0; }

    Coords point(std::size_t i) const { return Coords(coords_).subspan(i * dim_, dim_); }

    bool has_labels() const noexcept { return !labels_.empty(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// The stored label, or the decimal index when the cloud is unlabelled.
    std::string label(std::size_t i) const { return has_labels() ? labels_[i] : std::to_string(i); }

    const std::vector<double>& raw() const noexcept { return coords_; }

    /// A new cloud with `extra` appended. Labels are kept only if both sides carry them.
    PointCloud concat(const PointCloud& extra) const
    {
        if (extra.empty()) {
            return *this;
        }
        if (extra.dim() != dim_) {
            throw InputError("cannot append points of dimension " + std::to_string(extra.dim())
                             + " to a cloud of dimension " + std::to_string(dim_));
        }
        std::vector<double> flat = coords_;
        flat.insert(flat.end(), extra.coords_.begin(), extra.coords_.end());
        std::vector<std::string> labels;
        if (has_labels() && extra.has_labels()) {
            labels = labels_;
            labels.insert(labels.end(), extra.labels_.begin(), extra.labels_.end());
        }
        return PointCloud(dim_, std::move(flat), std::move(labels));
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::vector<std::string> labels_;
};

/// Symmetric, nonnegative n x n matrix with zero diagonal, stored row-major.
/// The triangle inequality is deliberately not enforced here.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    /// Validates the invariants exactly (no tolerance).
    DistanceMatrix(std::size_t n, std::vector<double> entries, std::vector<std::string> labels = {})
        : n_(n)
        , entries_(std::move(entries))
        , labels_(std::move(labels))
    {
        if (entries_.size() != n_ * n_) {
            throw InputError("distance matrix needs " + std::to_string(n_ * n_) + " entries, got "
                             + std::to_string(entries_.size()));
        }
        if (!labels_.empty() && labels_.size() != n_) {
            throw InputError("distance matrix label count does not match n");
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (at(i, i) != 0.0) {
                throw InputError("distance matrix diagonal entry " + std::to_string(i) + " is not zero");
            }
            for (std::size_t j = 0; j < n_; ++j) {
                const double v = at(i, j);
                if (!std::isfinite(v) || v < 0.0) {
                    throw InputError("distance matrix entry (" + std::to_string(i) + ","
                                     + std::to_string(j) + ") is negative or not finite");
                }
                if (v != at(j, i)) {
                    throw InputError("distance matrix is not symmetric at (" + std::to_string(i) + ","
                                     + std::to_string(j) + ")");
                }
            }
        }
    }

    static DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                    std::vector<std::string> labels = {})
    {
        const std::size_t n = rows.size();
        std::vector<double> flat;
        flat.reserve(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n) {
                throw InputError("distance matrix row " + std::to_string(i) + " has wrong length");
            }
            flat.insert(flat.end(), rows[i].begin(), rows[i].end());
        }
        return DistanceMatrix(n, std::move(flat), std::move(labels));
    }

    /// Fills the upper triangle from `f(i, j)` (i < j) and mirrors it, so the
    /// result is symmetric bit-for-bit. Rows are split across workers.
    template <class F>
    static DistanceMatrix generate(std::size_t n, F&& f, std::size_t workers = 1,
                                   std::vector<std::string> labels = {})
    {
        DistanceMatrix m;
        m.n_ = n;
        m.entries_.assign(n * n, 0.0);
        m.labels_ = std::move(labels);
        parallel_for(n, workers, [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                m.entries_[i * n + j] = f(i, j);
            }
        });
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = m.entries_[i * n + j];
                if (!std::isfinite(v) || v < 0.0) {
                    throw InputError("generated distance (" + std::to_string(i) + ","
                                     + std::to_string(j) + ") is negative or not finite");
                }
                m.entries_[j * n + i] = v;
            }
        }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return std::span(entries_).subspan(i * n_, n_); }
    const std::vector<double>& raw() const noexcept { return entries_; }

    bool has_labels() const noexcept { return !labels_.empty(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::string label(std::size_t i) const { return has_labels() ? labels_[i] : std::to_string(i); }

    /// Principal submatrix on `keep` (in the given order).
    DistanceMatrix restrict_to(std::span<const std::size_t> keep) const
    {
        std::vector<std::string> labels;
        if (has_labels()) {
            for (auto i : keep) {
                labels.push_back(labels_[i]);
            }
        }
        return generate(keep.size(), [&](std::size_t a, std::size_t b) { return at(keep[a], keep[b]); }, 1,
                        std::move(labels));
    }

    DistanceMatrix scaled(double factor) const
    {
        return generate(n_, [&](std::size_t i, std::size_t j) { return factor * at(i, j); }, 1, labels_);
    }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
    std::vector<std::string> labels_;
};

static_assert(MetricOracle<DistanceMatrix>);

/// Wraps an arbitrary callable (i, j) -> double as an oracle over n indices.
class FunctionOracle {
public:
    FunctionOracle(std::size_t n, std::function<double(std::size_t, std::size_t)> f)
        : n_(n)
        , f_(std::move(f))
    {
    }

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return i == j ? 0.0 : f_(i, j); }

private:
    std::size_t n_;
    std::function<double(std::size_t, std::size_t)> f_;
};

namespace detail {
inline void require_same_dim(Coords x, Coords y)
{
    if (x.size() != y.size()) {
        throw InputError("dimension mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    }
}

inline void require_planar(Coords x, Coords y)
{
    require_same_dim(x, y);
    if (x.size() != 2) {
        throw InputError("arctan-split metrics need planar points, got dimension " + std::to_string(x.size()));
    }
}
} // namespace detail

inline double euclidean_distance(Coords x, Coords y)
{
    detail::require_same_dim(x, y);
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x[k] - y[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

inline double taxicab_distance(Coords x, Coords y)
{
    detail::require_same_dim(x, y);
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sum += std::abs(x[k] - y[k]);
    }
    return sum;
}

enum class ArctanSplit { d1, d2, sum };

/// d1 = |x1-y1| + atan|x2-y2|, d2 = |x2-y2| + atan|x1-y1|, sum = d1 + d2.
/// Each of d1, d2 is Gromov hyperbolic; their sum is not.
inline double arctan_split_distance(ArctanSplit which, Coords x, Coords y)
{
    detail::require_planar(x, y);
    const double a = std::abs(x[0] - y[0]);
    const double b = std::abs(x[1] - y[1]);
    const double d1 = a + std::atan(b);
    const double d2 = b + std::atan(a);
    switch (which) {
    case ArctanSplit::d1:
        return d1;
    case ArctanSplit::d2:
        return d2;
    case ArctanSplit::sum:
        return d1 + d2;
    }
    return d1 + d2;
}

enum class BaseMetric { euclidean, taxicab, d1, d2, d1_plus_d2 };

inline std::string_view to_string(BaseMetric m) noexcept
{
    switch (m) {
    case BaseMetric::euclidean:
        return "euclidean";
    case BaseMetric::taxicab:
        return "taxicab";
    case BaseMetric::d1:
        return "d1";
    case BaseMetric::d2:
        return "d2";
    case BaseMetric::d1_plus_d2:
        return "d1+d2";
    }
    return "euclidean";
}

inline BaseMetric parse_base_metric(std::string_view name)
{
    for (auto m : {BaseMetric::euclidean, BaseMetric::taxicab, BaseMetric::d1, BaseMetric::d2,
                   BaseMetric::d1_plus_d2}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw InputError("unknown base metric '" + std::string(name) + "' (expected euclidean|taxicab|d1|d2|d1+d2)");
}

inline double distance(BaseMetric metric, Coords x, Coords y)
{
    switch (metric) {
    case BaseMetric::euclidean:
        return euclidean_distance(x, y);
    case BaseMetric::taxicab:
        return taxicab_distance(x, y);
    case BaseMetric::d1:
        return arctan_split_distance(ArctanSplit::d1, x, y);
    case BaseMetric::d2:
        return arctan_split_distance(ArctanSplit::d2, x, y);
    case BaseMetric::d1_plus_d2:
        return arctan_split_distance(ArctanSplit::sum, x, y);
    }
    return euclidean_distance(x, y);
}

/// Lazily evaluates a base metric on a cloud; for spaces too large to materialize.
class CloudOracle {
public:
    CloudOracle(const PointCloud& cloud, BaseMetric metric)
        : cloud_(&cloud)
        , metric_(metric)
    {
    }

    std::size_t size() const noexcept { return cloud_->size(); }
    double operator()(std::size_t i, std::size_t j) const
    {
        return i == j ? 0.0 : distance(metric_, cloud_->point(i), cloud_->point(j));
    }

private:
    const PointCloud* cloud_;
    BaseMetric metric_;
};

inline DistanceMatrix build_distance_matrix(const PointCloud& cloud, BaseMetric metric, std::size_t workers = 1)
{
    if (cloud.empty()) {
        throw InputError("cannot build a distance matrix from an empty cloud");
    }
    if (metric != BaseMetric::euclidean && metric != BaseMetric::taxicab && cloud.dim() != 2) {
        throw InputError("metric " + std::string(to_string(metric)) + " needs planar points");
    }
    return DistanceMatrix::generate(
        cloud.size(), [&](std::size_t i, std::size_t j) { return distance(metric, cloud.point(i), cloud.point(j)); },
        workers, cloud.labels());
}

/// n points uniform in [lo, hi)^dim, drawn coordinate by coordinate from `rng`.
template <class Gen>
PointCloud random_cloud(std::size_t n, std::size_t dim, Gen& rng, double lo = 0.0, double hi = 1.0)
{
    std::vector<double> flat(n * dim);
    for (auto& c : flat) {
        c = rng.uniform(lo, hi);
    }
    return PointCloud(dim, std::move(flat));
}

} // namespace cassini
