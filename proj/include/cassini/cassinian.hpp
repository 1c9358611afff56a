#pragma once

// Hyperbolic-type metrics built from distances to puncture points.
//
// For a base metric d on X and punctures P = {p_1, ..., p_k}:
//
//   mu_p(x,y)        = d(x,y) + sqrt(d(x,p) d(y,p))
//   tau_p(x,y)       = log(1 + 2 d(x,y) / sqrt(d(x,p) d(y,p)))
//   tilde_tau_p(x,y) = log(1 +   d(x,y) / sqrt(d(x,p) d(y,p)))
//   mu_P             = prod_i mu_{p_i}
//   avg_tau          = (1/k) sum_i tau_{p_i}         (Gromov hyperbolic, constant independent of k)
//   tilde_avg_tau    = (1/k) sum_i tilde_tau_{p_i}
//   sup_tau          = max_i tau_{p_i}               (a metric, not Gromov hyperbolic in general)
//   j, j_tilde       = mean / max of log(1 + d(x,y)/dist(x,P)) and log(1 + d(x,y)/dist(y,P))
//
// All logarithms are natural. Every function here is pure and thread-safe.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "metric_core.hpp"

namespace cassini {

using IndexList = std::span<const std::size_t>;

namespace detail {
template <MetricOracle D>
double puncture_distance(const D& d, std::size_t x, std::size_t p)
{
    const double r = d(x, p);
    if (!(r > 0.0)) {
        throw DomainError("point on puncture", x);
    }
    return r;
}

inline void require_punctures(IndexList punctures)
{
    if (punctures.empty()) {
        throw InputError("puncture set is empty");
    }
}
} // namespace detail

template <MetricOracle D>
double mu_p(const D& d, std::size_t x, std::size_t y, std::size_t p)
{
    return d(x, y) + std::sqrt(d(x, p) * d(y, p));
}

template <MetricOracle D>
double tau_p(const D& d, std::size_t x, std::size_t y, std::size_t p)
{
    const double gx = detail::puncture_distance(d, x, p);
    const double gy = detail::puncture_distance(d, y, p);
    return std::log1p(2.0 * d(x, y) / std::sqrt(gx * gy));
}

/// Not a metric on general spaces; it is one when d is Ptolemaic.
template <MetricOracle D>
double tilde_tau_p(const D& d, std::size_t x, std::size_t y, std::size_t p)
{
    const double gx = detail::puncture_distance(d, x, p);
    const double gy = detail::puncture_distance(d, y, p);
    return std::log1p(d(x, y) / std::sqrt(gx * gy));
}

template <MetricOracle D>
double mu_P(const D& d, std::size_t x, std::size_t y, IndexList punctures)
{
    double product = 1.0;
    for (auto p : punctures) {
        product *= mu_p(d, x, y, p);
    }
    return product;
}

/// log mu_P, accumulated term by term so large k cannot overflow.
template <MetricOracle D>
double log_mu_P(const D& d, std::size_t x, std::size_t y, IndexList punctures)
{
    double sum = 0.0;
    for (auto p : punctures) {
        sum += std::log(mu_p(d, x, y, p));
    }
    return sum;
}

template <MetricOracle D>
double avg_tau(const D& d, std::size_t x, std::size_t y, IndexList punctures)
{
    detail::require_punctures(punctures);
    double sum = 0.0;
    for (auto p : punctures) {
        sum += tau_p(d, x, y, p);
    }
    return sum / static_cast<double>(punctures.size());
}

template <MetricOracle D>
double tilde_avg_tau(const D& d, std::size_t x, std::size_t y, IndexList punctures)
{
    detail::require_punctures(punctures);
    double sum = 0.0;
    for (auto p : punctures) {
        sum += tilde_tau_p(d, x, y, p);
    }
    return sum / static_cast<double>(punctures.size());
}

template <MetricOracle D>
double sup_tau(const D& d, std::size_t x, std::size_t y, IndexList punctures)
{
    detail::require_punctures(punctures);
    double best = 0.0;
    for (auto p : punctures) {
        best = std::max(best, tau_p(d, x, y, p));
    }
    return best;
}

/// dist(x, P) = min_i d(x, p_i); the boundary of X \ P is P itself.
template <MetricOracle D>
double distance_to_punctures(const D& d, std::size_t x, IndexList punctures)
{
    detail::require_punctures(punctures);
    double best = detail::puncture_distance(d, x, punctures.front());
    for (auto p : punctures.subspan(1)) {
        best = std::min(best, detail::puncture_distance(d, x, p));
    }
    return best;
}

namespace detail {
template <MetricOracle D>
std::pair<double, double> j_terms(const D& d, std::size_t x, std::size_t y, IndexList punctures)
{
    const double gx = distance_to_punctures(d, x, punctures);
    const double gy = distance_to_punctures(d, y, punctures);
    const double dxy = d(x, y);
    return {std::log1p(dxy / gx), std::log1p(dxy / gy)};
}
} // namespace detail

template <MetricOracle D>
double j_metric(const D& d, std::size_t x, std::size_t y, IndexList punctures)
{
    const auto [a, b] = detail::j_terms(d, x, y, punctures);
    return 0.5 * (a + b);
}

template <MetricOracle D>
double j_tilde_metric(const D& d, std::size_t x, std::size_t y, IndexList punctures)
{
    const auto [a, b] = detail::j_terms(d, x, y, punctures);
    return std::max(a, b);
}

enum class Variant { tau_p, tilde_tau_p, avg_tau, tilde_avg_tau, sup_tau, j, j_tilde };

inline constexpr Variant all_variants[] = {Variant::tau_p,         Variant::tilde_tau_p, Variant::avg_tau,
                                           Variant::tilde_avg_tau, Variant::sup_tau,     Variant::j,
                                           Variant::j_tilde};

inline std::string_view to_string(Variant v) noexcept
{
    switch (v) {
    case Variant::tau_p:
        return "tau_p";
    case Variant::tilde_tau_p:
        return "tilde_tau_p";
    case Variant::avg_tau:
        return "avg_tau";
    case Variant::tilde_avg_tau:
        return "tilde_avg_tau";
    case Variant::sup_tau:
        return "sup_tau";
    case Variant::j:
        return "j";
    case Variant::j_tilde:
        return "j_tilde";
    }
    return "tau_p";
}

inline Variant parse_variant(std::string_view name)
{
    for (auto v : all_variants) {
        if (name == to_string(v)) {
            return v;
        }
    }
    throw InputError("unknown variant '" + std::string(name)
                     + "' (expected tau_p|tilde_tau_p|avg_tau|tilde_avg_tau|sup_tau|j|j_tilde)");
}

constexpr bool is_one_point(Variant v) noexcept { return v == Variant::tau_p || v == Variant::tilde_tau_p; }

/// Evaluates `variant` at (x, y). For one-point variants only punctures[anchor] is used.
template <MetricOracle D>
double evaluate_variant(Variant variant, const D& d, std::size_t x, std::size_t y, IndexList punctures,
                        std::size_t anchor = 0)
{
    switch (variant) {
    case Variant::tau_p:
        return tau_p(d, x, y, punctures[anchor]);
    case Variant::tilde_tau_p:
        return tilde_tau_p(d, x, y, punctures[anchor]);
    case Variant::avg_tau:
        return avg_tau(d, x, y, punctures);
    case Variant::tilde_avg_tau:
        return tilde_avg_tau(d, x, y, punctures);
    case Variant::sup_tau:
        return sup_tau(d, x, y, punctures);
    case Variant::j:
        return j_metric(d, x, y, punctures);
    case Variant::j_tilde:
        return j_tilde_metric(d, x, y, punctures);
    }
    return 0.0;
}

/// A base cloud together with the metric used to measure it.
struct CloudBase {
    PointCloud cloud;
    BaseMetric metric = BaseMetric::euclidean;
};

/// Base space X (cloud or raw matrix), punctures P as indices into X, the metric
/// variant and, for one-point variants, the position in P of the anchor puncture.
/// The domain is always D = X \ P.
struct PuncturedSpec {
    std::variant<CloudBase, DistanceMatrix> base;
    std::vector<std::size_t> punctures;
    Variant variant = Variant::avg_tau;
    std::size_t anchor = 0;
};

/// A validated PuncturedSpec with its base distances materialized.
struct PuncturedSpace {
    DistanceMatrix base;
    std::vector<std::size_t> punctures;
    std::vector<std::size_t> domain;
    Variant variant = Variant::avg_tau;
    std::size_t anchor = 0;
};

inline DistanceMatrix materialize_base(const std::variant<CloudBase, DistanceMatrix>& base, std::size_t workers = 1)
{
    if (const auto* cb = std::get_if<CloudBase>(&base)) {
        return build_distance_matrix(cb->cloud, cb->metric, workers);
    }
    return std::get<DistanceMatrix>(base);
}

/// Checks the spec invariants and splits X into P and D.
/// Throws InputError for malformed specs and DomainError for a domain point on a puncture.
inline PuncturedSpace resolve(const PuncturedSpec& spec, std::size_t workers = 1)
{
    PuncturedSpace space;
    space.base = materialize_base(spec.base, workers);
    space.punctures = spec.punctures;
    space.variant = spec.variant;
    space.anchor = spec.anchor;

    const std::size_t n = space.base.size();
    const auto& P = space.punctures;
    if (P.empty()) {
        throw InputError("puncture set is empty");
    }
    std::vector<bool> is_puncture(n, false);
    for (auto p : P) {
        if (p >= n) {
            throw InputError("puncture index " + std::to_string(p) + " out of range (n = " + std::to_string(n) + ")");
        }
        if (is_puncture[p]) {
            throw InputError("puncture index " + std::to_string(p) + " listed twice");
        }
        is_puncture[p] = true;
    }
    for (std::size_t a = 0; a < P.size(); ++a) {
        for (std::size_t b = a + 1; b < P.size(); ++b) {
            if (!(space.base(P[a], P[b]) > 0.0)) {
                throw InputError("punctures " + std::to_string(P[a]) + " and " + std::to_string(P[b])
                                 + " coincide");
            }
        }
    }
    if (is_one_point(spec.variant) && spec.anchor >= P.size()) {
        throw InputError("anchor " + std::to_string(spec.anchor) + " is not a position in the puncture list");
    }

    for (std::size_t x = 0; x < n; ++x) {
        if (is_puncture[x]) {
            continue;
        }
        for (auto p : P) {
            if (!(space.base(x, p) > 0.0)) {
                throw DomainError("point on puncture", x);
            }
        }
        space.domain.push_back(x);
    }
    if (space.domain.empty()) {
        throw InputError("punctured domain is empty");
    }
    return space;
}

/// Lazy view of a variant over the domain: index a in [0, |D|) is base point domain[a].
class PuncturedOracle {
public:
    explicit PuncturedOracle(const PuncturedSpace& space) : space_(&space) {}

    std::size_t size() const noexcept { return space_->domain.size(); }
    double operator()(std::size_t a, std::size_t b) const
    {
        if (a == b) {
            return 0.0;
        }
        return evaluate_variant(space_->variant, space_->base, space_->domain[a], space_->domain[b],
                                space_->punctures, space_->anchor);
    }

private:
    const PuncturedSpace* space_;
};

/// The variant materialized over D. Labels carry the base-space label of each domain point.
inline DistanceMatrix punctured_matrix(const PuncturedSpace& space, std::size_t workers = 1)
{
    std::vector<std::string> labels;
    labels.reserve(space.domain.size());
    for (auto x : space.domain) {
        labels.push_back(space.base.label(x));
    }
    return DistanceMatrix::generate(space.domain.size(), PuncturedOracle(space), workers, std::move(labels));
}

inline DistanceMatrix punctured_matrix(const PuncturedSpec& spec, std::size_t workers = 1)
{
    return punctured_matrix(resolve(spec, workers), workers);
}

} // namespace cassini
