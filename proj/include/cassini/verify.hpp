#pragma once

// Numerical checks for metric axioms and for the inequalities satisfied by
// mu_p, mu_P and the Cassinian metrics.
//
// An inequality lhs <= rhs passes when lhs <= rhs + tol * max(1, |lhs|, |rhs|).
// The inequalities are exact in real arithmetic; the tolerance only absorbs
// rounding. Product inequalities with four or more factors are compared in
// log domain, with the constants 9^k and (27/2)^k turned into additive terms.
//
// Sampled checkers evaluate a fixed battery of degenerate tuples (every tuple
// over the anchors and a few fixed indices, so repeats and anchor coincidences
// are always covered) followed by `samples` uniform tuples. Sample chunk c is
// drawn from substream_seed(seed, c); reports are identical for any worker count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cassinian.hpp"
#include "errors.hpp"
#include "metric_core.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace cassini {

struct Violation {
    std::string check;
    std::vector<std::size_t> tuple;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

struct ViolationReport {
    std::string name;
    std::uint64_t checked = 0;
    std::uint64_t violation_count = 0;
    std::vector<Violation> violations; // the first `max_listed` of them
    double tolerance = 1e-9;
    double worst_slack = -std::numeric_limits<double>::infinity();
    std::uint64_t skipped = 0;                  // tuples whose lemma hypothesis failed
    std::optional<bool> hypothesis_satisfied;   // single-matrix hypothesis checks
    std::optional<double> max_ratio;            // empirical tightness, where meaningful
    std::uint64_t zero_off_diagonal = 0;        // distinct indices at distance 0
    std::optional<std::uint64_t> seed;

    bool passed() const noexcept { return violation_count == 0; }
};

struct CheckOptions {
    double tol = 1e-9;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::size_t max_listed = 1000;
};

/// Accumulates inequality outcomes for one block of work.
class Recorder {
public:
    Recorder(double tol, std::size_t max_listed)
        : tol_(tol)
        , max_listed_(max_listed)
    {
    }

    static double slack_of(double lhs, double rhs) noexcept { return lhs == rhs ? 0.0 : lhs - rhs; }

    double threshold(double lhs, double rhs) const noexcept
    {
        double scale = 1.0;
        if (std::isfinite(lhs)) {
            scale = std::max(scale, std::abs(lhs));
        }
        if (std::isfinite(rhs)) {
            scale = std::max(scale, std::abs(rhs));
        }
        return tol_ * scale;
    }

    /// Records lhs <= rhs for `tuple`; returns whether it held.
    bool le(std::string_view check, std::span<const std::size_t> tuple, double lhs, double rhs)
    {
        ++checked_;
        const double slack = slack_of(lhs, rhs);
        worst_ = std::max(worst_, slack);
        if (slack > threshold(lhs, rhs) || std::isnan(slack)) {
            ++count_;
            if (listed_.size() < max_listed_) {
                listed_.push_back({std::string(check), {tuple.begin(), tuple.end()}, lhs, rhs, slack});
            }
            return false;
        }
        return true;
    }

    void skip() noexcept { ++skipped_; }
    void ratio(double r) noexcept
    {
        if (std::isfinite(r)) {
            max_ratio_ = std::max(max_ratio_.value_or(r), r);
        }
    }
    void zero_pair() noexcept { ++zeros_; }

    void merge(const Recorder& other)
    {
        checked_ += other.checked_;
        count_ += other.count_;
        skipped_ += other.skipped_;
        zeros_ += other.zeros_;
        worst_ = std::max(worst_, other.worst_);
        if (other.max_ratio_) {
            ratio(*other.max_ratio_);
        }
        for (const auto& v : other.listed_) {
            if (listed_.size() >= max_listed_) {
                break;
            }
            listed_.push_back(v);
        }
    }

    ViolationReport report(std::string name) const
    {
        ViolationReport r;
        r.name = std::move(name);
        r.checked = checked_;
        r.violation_count = count_;
        r.violations = listed_;
        r.tolerance = tol_;
        r.worst_slack = worst_;
        r.skipped = skipped_;
        r.max_ratio = max_ratio_;
        r.zero_off_diagonal = zeros_;
        return r;
    }

private:
    double tol_;
    std::size_t max_listed_;
    std::uint64_t checked_ = 0;
    std::uint64_t count_ = 0;
    std::uint64_t skipped_ = 0;
    std::uint64_t zeros_ = 0;
    double worst_ = -std::numeric_limits<double>::infinity();
    std::optional<double> max_ratio_;
    std::vector<Violation> listed_;
};

inline double log_add_exp(double a, double b) noexcept
{
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    if (b == -std::numeric_limits<double>::infinity()) {
        return a;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline constexpr std::size_t log_domain_threshold = 4;

namespace detail {

inline void require_tolerance(double tol)
{
    if (!(tol > 0.0)) {
        throw InputError("tolerance must be positive");
    }
}

template <std::size_t Arity>
using Tuple = std::array<std::size_t, Arity>;

/// Every Arity-tuple over the distinct entries of `special` that are < n.
template <std::size_t Arity>
std::vector<Tuple<Arity>> degenerate_battery(std::size_t n, std::vector<std::size_t> special)
{
    std::erase_if(special, [n](std::size_t i) { return i >= n; });
    std::sort(special.begin(), special.end());
    special.erase(std::unique(special.begin(), special.end()), special.end());
    std::vector<Tuple<Arity>> out;
    if (special.empty()) {
        return out;
    }
    std::size_t total = 1;
    for (std::size_t a = 0; a < Arity; ++a) {
        total *= special.size();
    }
    out.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        Tuple<Arity> t{};
        std::size_t rest = code;
        for (std::size_t a = 0; a < Arity; ++a) {
            t[a] = special[rest % special.size()];
            rest /= special.size();
        }
        out.push_back(t);
    }
    return out;
}

inline constexpr std::size_t check_chunk = 1 << 14;

/// Runs body(recorder, tuple) over the degenerate battery and then over
/// `opts.samples` uniform tuples of indices in [0, n) (repeats allowed).
template <std::size_t Arity, class Body>
ViolationReport sample_tuples(std::string name, std::size_t n, std::vector<std::size_t> special,
                              const CheckOptions& opts, Body&& body)
{
    require_tolerance(opts.tol);
    if (n == 0) {
        throw InputError("cannot sample tuples from an empty space");
    }
    const auto battery = degenerate_battery<Arity>(n, std::move(special));
    const std::size_t chunks = static_cast<std::size_t>((opts.samples + check_chunk - 1) / check_chunk);
    std::vector<Recorder> parts(chunks + 1, Recorder(opts.tol, opts.max_listed));
    parallel_for(chunks + 1, opts.workers, [&](std::size_t task) {
        Recorder& rec = parts[task];
        if (task == 0) {
            for (const auto& t : battery) {
                body(rec, t);
            }
            return;
        }
        const std::size_t c = task - 1;
        Rng rng(substream_seed(opts.seed, c));
        const std::uint64_t count = std::min<std::uint64_t>(check_chunk, opts.samples - std::uint64_t{c} * check_chunk);
        for (std::uint64_t s = 0; s < count; ++s) {
            Tuple<Arity> t{};
            for (auto& i : t) {
                i = static_cast<std::size_t>(rng.below(n));
            }
            body(rec, t);
        }
    });
    Recorder total(opts.tol, opts.max_listed);
    for (const auto& p : parts) {
        total.merge(p);
    }
    auto report = total.report(std::move(name));
    report.seed = opts.seed;
    return report;
}

inline std::vector<std::size_t> fixed_indices(std::size_t n, std::initializer_list<std::size_t> anchors)
{
    std::vector<std::size_t> out(anchors);
    out.push_back(0);
    if (n > 1) {
        out.push_back(1);
        out.push_back(n - 1);
    }
    return out;
}

} // namespace detail

/// Symmetry, zero diagonal, nonnegativity and the triangle inequality over all
/// triples. Triangle violations are listed as (a, b, c): d(a,b) > d(a,c) + d(c,b), a < b.
/// Distinct indices at distance zero are counted in zero_off_diagonal, not as violations.
inline ViolationReport check_metric_axioms(const DistanceMatrix& m, const CheckOptions& opts = {})
{
    detail::require_tolerance(opts.tol);
    const std::size_t n = m.size();
    std::vector<Recorder> rows(n, Recorder(opts.tol, opts.max_listed));
    parallel_for(n, opts.workers, [&](std::size_t a) {
        Recorder& rec = rows[a];
        const std::array<std::size_t, 1> diag{a};
        rec.le("zero_diagonal", diag, std::abs(m(a, a)), 0.0);
        for (std::size_t b = a + 1; b < n; ++b) {
            const std::array<std::size_t, 2> pair{a, b};
            rec.le("symmetry", pair, std::abs(m(a, b) - m(b, a)), 0.0);
            rec.le("nonnegative", pair, -m(a, b), 0.0);
            if (m(a, b) == 0.0) {
                rec.zero_pair();
            }
            for (std::size_t c = 0; c < n; ++c) {
                if (c == a || c == b) {
                    continue;
                }
                const std::array<std::size_t, 3> triple{a, b, c};
                rec.le("triangle", triple, m(a, b), m(a, c) + m(c, b));
            }
        }
    });
    Recorder total(opts.tol, opts.max_listed);
    for (const auto& r : rows) {
        total.merge(r);
    }
    return total.report("metric_axioms");
}

/// d(x,y) d(z,w) <= d(x,z) d(y,w) + d(x,w) d(y,z) over every 4-subset and each
/// of its three pairings. A violation tuple (x, y, z, w) names the failing product d(x,y) d(z,w).
inline ViolationReport check_ptolemaic(const DistanceMatrix& m, const CheckOptions& opts = {})
{
    detail::require_tolerance(opts.tol);
    const std::size_t n = m.size();
    std::vector<Recorder> rows(n, Recorder(opts.tol, opts.max_listed));
    parallel_for(n, opts.workers, [&](std::size_t a) {
        Recorder& rec = rows[a];
        for (std::size_t b = a + 1; b < n; ++b) {
            for (std::size_t c = b + 1; c < n; ++c) {
                for (std::size_t d = c + 1; d < n; ++d) {
                    const double p1 = m(a, b) * m(c, d);
                    const double p2 = m(a, c) * m(b, d);
                    const double p3 = m(a, d) * m(b, c);
                    const std::array<std::size_t, 4> t1{a, b, c, d};
                    const std::array<std::size_t, 4> t2{a, c, b, d};
                    const std::array<std::size_t, 4> t3{a, d, b, c};
                    rec.le("ptolemy", t1, p1, p2 + p3);
                    rec.le("ptolemy", t2, p2, p1 + p3);
                    rec.le("ptolemy", t3, p3, p1 + p2);
                }
            }
        }
    });
    Recorder total(opts.tol, opts.max_listed);
    for (const auto& r : rows) {
        total.merge(r);
    }
    return total.report("ptolemy");
}

enum class SandwichKind { one_point, average, taxicab };

inline std::string_view to_string(SandwichKind k) noexcept
{
    switch (k) {
    case SandwichKind::one_point:
        return "one_point";
    case SandwichKind::average:
        return "average";
    case SandwichKind::taxicab:
        return "taxicab";
    }
    return "one_point";
}

namespace detail {
template <class Lower, class Upper>
ViolationReport sandwich_pairs(std::string name, std::size_t n, double gap, const CheckOptions& opts, Lower&& lower,
                               Upper&& upper)
{
    require_tolerance(opts.tol);
    std::vector<Recorder> rows(n, Recorder(opts.tol, opts.max_listed));
    parallel_for(n, opts.workers, [&](std::size_t a) {
        Recorder& rec = rows[a];
        for (std::size_t b = a + 1; b < n; ++b) {
            const double lo = lower(a, b);
            const double mid = upper(a, b);
            const std::array<std::size_t, 2> pair{a, b};
            rec.le("lower", pair, lo, mid);
            rec.le("upper", pair, mid, lo + gap);
        }
    });
    Recorder total(opts.tol, opts.max_listed);
    for (const auto& r : rows) {
        total.merge(r);
    }
    return total.report(std::move(name));
}
} // namespace detail

/// tilde_tau_p <= tau_p <= tilde_tau_p + log 2 (one_point, using the anchor) or
/// tilde_avg_tau <= avg_tau <= tilde_avg_tau + log 2 (average), over all domain pairs.
/// Tuples are positions in space.domain.
inline ViolationReport check_sandwich(SandwichKind kind, const PuncturedSpace& space, const CheckOptions& opts = {})
{
    const auto& D = space.domain;
    const auto& d = space.base;
    const IndexList P(space.punctures);
    switch (kind) {
    case SandwichKind::one_point: {
        const std::size_t p = space.punctures.at(space.anchor);
        return detail::sandwich_pairs(
            "sandwich_one_point", D.size(), std::numbers::ln2, opts,
            [&](std::size_t a, std::size_t b) { return tilde_tau_p(d, D[a], D[b], p); },
            [&](std::size_t a, std::size_t b) { return tau_p(d, D[a], D[b], p); });
    }
    case SandwichKind::average:
        return detail::sandwich_pairs(
            "sandwich_average", D.size(), std::numbers::ln2, opts,
            [&](std::size_t a, std::size_t b) { return tilde_avg_tau(d, D[a], D[b], P); },
            [&](std::size_t a, std::size_t b) { return avg_tau(d, D[a], D[b], P); });
    case SandwichKind::taxicab:
        throw InputError("the taxicab sandwich takes a planar point cloud, not a punctured space");
    }
    throw InputError("unknown sandwich kind");
}

/// d_T <= d1 + d2 <= d_T + pi over all pairs of a planar cloud.
inline ViolationReport check_sandwich(SandwichKind kind, const PointCloud& cloud, const CheckOptions& opts = {})
{
    if (kind != SandwichKind::taxicab) {
        throw InputError("only the taxicab sandwich takes a bare point cloud");
    }
    if (cloud.dim() != 2) {
        throw InputError("the taxicab sandwich needs planar points");
    }
    return detail::sandwich_pairs(
        "sandwich_taxicab", cloud.size(), std::numbers::pi, opts,
        [&](std::size_t a, std::size_t b) { return taxicab_distance(cloud.point(a), cloud.point(b)); },
        [&](std::size_t a, std::size_t b) {
            return arctan_split_distance(ArctanSplit::sum, cloud.point(a), cloud.point(b));
        });
}

/// The elementary bounds on mu_p over sampled triples (x, y, z), with a second anchor q:
///   mu_p(x,y) <= 3/2 (d(x,p) + d(y,p)) <= 3 max(d(x,p), d(y,p))
///   mu_p(x,y) >= max(d(x,p), d(y,p)) >= 1/2 (d(x,p) + d(y,p))
///   mu_p(x,z) + mu_q(y,z) >= d(x,z) + d(y,z) >= d(x,y)
///   max(mu_p(x,z), mu_q(y,z)) >= 1/2 d(x,y)
template <MetricOracle D>
ViolationReport check_mu_bounds(const D& d, std::size_t p, std::size_t q, const CheckOptions& opts = {})
{
    const std::size_t n = d.size();
    if (p >= n || q >= n) {
        throw InputError("anchor index out of range");
    }
    return detail::sample_tuples<3>(
        "mu_bounds", n, detail::fixed_indices(n, {p, q}), opts, [&](Recorder& rec, const detail::Tuple<3>& t) {
            const auto [x, y, z] = t;
            const double dxp = d(x, p);
            const double dyp = d(y, p);
            const double mu = mu_p(d, x, y, p);
            const double hi = std::max(dxp, dyp);
            const double sum = dxp + dyp;
            rec.le("mu_le_three_halves_sum", t, mu, 1.5 * sum);
            rec.le("three_halves_sum_le_three_max", t, 1.5 * sum, 3.0 * hi);
            rec.le("max_le_mu", t, hi, mu);
            rec.le("half_sum_le_max", t, 0.5 * sum, hi);

            const double a = mu_p(d, x, z, p);
            const double b = mu_p(d, y, z, q);
            const double base_pair = d(x, z) + d(y, z);
            const double dxy = d(x, y);
            rec.le("base_pair_le_mu_pair", t, base_pair, a + b);
            rec.le("distance_le_base_pair", t, dxy, base_pair);
            rec.le("half_distance_le_mu_max", t, 0.5 * dxy, std::max(a, b));
        });
}

/// mu_p(x,y) mu_p(z,w) <= 9 max(mu_p(x,z) mu_p(y,w), mu_p(x,w) mu_p(y,z)).
/// max_ratio records the largest observed lhs / max(...), i.e. the constant actually needed.
template <MetricOracle D>
ViolationReport check_lemma_nine(const D& d, std::size_t p, const CheckOptions& opts = {})
{
    const std::size_t n = d.size();
    if (p >= n) {
        throw InputError("anchor index out of range");
    }
    return detail::sample_tuples<4>(
        "lemma_nine", n, detail::fixed_indices(n, {p}), opts, [&](Recorder& rec, const detail::Tuple<4>& t) {
            const auto [x, y, z, w] = t;
            const double lhs = mu_p(d, x, y, p) * mu_p(d, z, w, p);
            const double best = std::max(mu_p(d, x, z, p) * mu_p(d, y, w, p), mu_p(d, x, w, p) * mu_p(d, y, z, p));
            rec.le("factor_nine", t, lhs, 9.0 * best);
            if (best > 0.0) {
                rec.ratio(lhs / best);
            }
        });
}

/// 3(K+3) / (2(K-3)).
inline double lemma_k_constant(double K)
{
    if (!(K > 3.0)) {
        throw InputError("lemma K needs K > 3, got " + std::to_string(K));
    }
    return 3.0 * (K + 3.0) / (2.0 * (K - 3.0));
}

/// For triples with max(a, b) >= K min(a, b), a = mu_p(x,z), b = mu_p(y,z):
///   a + b <= 3(K+3) / (2(K-3)) d(x,y).
/// Triples failing the hypothesis are counted in `skipped`.
template <MetricOracle D>
ViolationReport check_lemma_K(const D& d, std::size_t p, double K, const CheckOptions& opts = {})
{
    const double C = lemma_k_constant(K);
    const std::size_t n = d.size();
    if (p >= n) {
        throw InputError("anchor index out of range");
    }
    return detail::sample_tuples<3>(
        "lemma_K", n, detail::fixed_indices(n, {p}), opts, [&](Recorder& rec, const detail::Tuple<3>& t) {
            const auto [x, y, z] = t;
            const double a = mu_p(d, x, z, p);
            const double b = mu_p(d, y, z, p);
            if (std::max(a, b) < K * std::min(a, b)) {
                rec.skip();
                return;
            }
            rec.le("lemma_K", t, a + b, C * d(x, y));
        });
}

struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of prod_i (a_i + b_i) <= 9^k (prod_i a_i + prod_i b_i), with
/// a_i = mu_{p_i}(x,z) and b_i = mu_{p_i}(y,z); in log domain when `log_domain`.
template <MetricOracle D>
InequalitySides product_lemma_sides(const D& d, std::size_t x, std::size_t y, std::size_t z, IndexList P,
                                    bool log_domain)
{
    const double k = static_cast<double>(P.size());
    if (!log_domain) {
        double lhs = 1.0;
        double pa = 1.0;
        double pb = 1.0;
        for (auto p : P) {
            const double a = mu_p(d, x, z, p);
            const double b = mu_p(d, y, z, p);
            lhs *= a + b;
            pa *= a;
            pb *= b;
        }
        return {lhs, std::pow(9.0, k) * (pa + pb)};
    }
    double lhs = 0.0;
    double la = 0.0;
    double lb = 0.0;
    for (auto p : P) {
        const double a = mu_p(d, x, z, p);
        const double b = mu_p(d, y, z, p);
        lhs += std::log(a + b);
        la += std::log(a);
        lb += std::log(b);
    }
    return {lhs, k * std::log(9.0) + log_add_exp(la, lb)};
}

template <MetricOracle D>
ViolationReport check_product_lemma(const D& d, std::span<const std::size_t> P, const CheckOptions& opts = {})
{
    const std::size_t n = d.size();
    if (P.empty()) {
        throw InputError("puncture set is empty");
    }
    for (auto p : P) {
        if (p >= n) {
            throw InputError("puncture index out of range");
        }
    }
    const bool log_domain = P.size() >= log_domain_threshold;
    const double log_nine_k = static_cast<double>(P.size()) * std::log(9.0);
    return detail::sample_tuples<3>(
        "product_lemma", n, detail::fixed_indices(n, {P.front(), P.back()}), opts,
        [&](Recorder& rec, const detail::Tuple<3>& t) {
            const auto s = product_lemma_sides(d, t[0], t[1], t[2], P, log_domain);
            rec.le(log_domain ? "product_nine_k_log" : "product_nine_k", t, s.lhs, s.rhs);
            // ratio against the bare sum of products, i.e. the effective 9^k
            if (log_domain) {
                rec.ratio(std::exp((s.lhs - (s.rhs - log_nine_k)) / static_cast<double>(P.size())));
            } else if (s.rhs > 0.0) {
                rec.ratio(std::pow(s.lhs / (s.rhs / std::exp(log_nine_k)), 1.0 / static_cast<double>(P.size())));
            }
        });
}

using Matrix4 = std::array<std::array<double, 4>, 4>;

namespace detail {

inline void require_quasi_ptolemy_input(const Matrix4& r, double K)
{
    if (!(K >= 1.0)) {
        throw InputError("quasi-Ptolemy check needs K >= 1");
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            if (!std::isfinite(r[i][j]) || r[i][j] < 0.0 || r[i][j] != r[j][i]) {
                throw InputError("quasi-Ptolemy input must be a symmetric nonnegative 4x4 matrix");
            }
        }
    }
}

inline bool quasi_triangle_holds(const Matrix4& r, double K, double tol)
{
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            for (std::size_t k = 0; k < 4; ++k) {
                const double rhs = K * (r[i][k] + r[j][k]);
                if (r[i][j] > rhs + tol * std::max({1.0, r[i][j], rhs})) {
                    return false;
                }
            }
        }
    }
    return true;
}

// Both conclusions, for each of the three ways to split {0,1,2,3} into two pairs.
template <std::size_t N>
void quasi_ptolemy_conclusions(Recorder& rec, const Matrix4& r, double K, const std::array<std::size_t, N>& labels)
{
    static constexpr std::array<std::array<std::size_t, 4>, 3> splits{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
    for (const auto& s : splits) {
        const auto [i, j, k, l] = s;
        const double a = r[i][j] * r[k][l];
        const double b = r[i][k] * r[j][l];
        const double c = r[i][l] * r[j][k];
        const std::array<std::size_t, 4> t{labels[i], labels[j], labels[k], labels[l]};
        rec.le("quasi_ptolemy_sqrt", t, std::sqrt(a), K * (std::sqrt(b) + std::sqrt(c)));
        rec.le("quasi_ptolemy_product", t, a, 2.0 * K * K * (b + c));
        rec.le("quasi_ptolemy_max", t, 2.0 * K * K * (b + c), 4.0 * K * K * std::max(b, c));
    }
}

} // namespace detail

/// For r symmetric nonnegative with r_ij <= K (r_ik + r_jk) for all i, j, k:
///   sqrt(r12 r34) <= K (sqrt(r13 r24) + sqrt(r14 r23))
///   r12 r34 <= 2K^2 (r13 r24 + r14 r23) <= (2K)^2 max(r13 r24, r14 r23)
/// checked for all three pairings. If the hypothesis fails nothing else is checked
/// and hypothesis_satisfied is false.
inline ViolationReport check_quasi_ptolemy(const Matrix4& r, double K, const CheckOptions& opts = {})
{
    detail::require_tolerance(opts.tol);
    detail::require_quasi_ptolemy_input(r, K);
    Recorder rec(opts.tol, opts.max_listed);
    if (!detail::quasi_triangle_holds(r, K, opts.tol)) {
        auto report = rec.report("quasi_ptolemy");
        report.hypothesis_satisfied = false;
        return report;
    }
    detail::quasi_ptolemy_conclusions(rec, r, K, std::array<std::size_t, 4>{0, 1, 2, 3});
    auto report = rec.report("quasi_ptolemy");
    report.hypothesis_satisfied = true;
    return report;
}

/// The quasi-Ptolemy lemma on sampled quadruples of `d`, with r_ij = d(x_i, x_j)
/// when `mu_anchor` is empty and r_ij = mu_p(x_i, x_j) otherwise (so r_ii = d(x_i, p)).
/// Quadruples failing the hypothesis are counted in `skipped`.
template <MetricOracle D>
ViolationReport check_quasi_ptolemy_sampled(const D& d, double K, std::optional<std::size_t> mu_anchor,
                                            const CheckOptions& opts = {})
{
    const std::size_t n = d.size();
    if (mu_anchor && *mu_anchor >= n) {
        throw InputError("anchor index out of range");
    }
    if (!(K >= 1.0)) {
        throw InputError("quasi-Ptolemy check needs K >= 1");
    }
    auto special = mu_anchor ? detail::fixed_indices(n, {*mu_anchor}) : detail::fixed_indices(n, {});
    return detail::sample_tuples<4>(
        "quasi_ptolemy", n, std::move(special), opts, [&](Recorder& rec, const detail::Tuple<4>& t) {
            Matrix4 r{};
            for (std::size_t i = 0; i < 4; ++i) {
                for (std::size_t j = 0; j < 4; ++j) {
                    r[i][j] = mu_anchor ? mu_p(d, t[i], t[j], *mu_anchor) : d(t[i], t[j]);
                }
            }
            if (!detail::quasi_triangle_holds(r, K, opts.tol)) {
                rec.skip();
                return;
            }
            detail::quasi_ptolemy_conclusions(rec, r, K, t);
        });
}

/// On sampled quadruples (x, y, z, w):
///   mu_P(x,y) <= (27/2)^k (mu_P(x,z) + mu_P(z,y))
///   mu_P(x,y) mu_P(z,w) <= 4 (27/2)^(2k) max(mu_P(x,z) mu_P(y,w), mu_P(x,w) mu_P(y,z))
/// in log domain once k >= 4.
template <MetricOracle D>
ViolationReport check_mu_P_quasi_triangle(const D& d, std::span<const std::size_t> P, const CheckOptions& opts = {})
{
    const std::size_t n = d.size();
    if (P.empty()) {
        throw InputError("puncture set is empty");
    }
    for (auto p : P) {
        if (p >= n) {
            throw InputError("puncture index out of range");
        }
    }
    const double k = static_cast<double>(P.size());
    const bool log_domain = P.size() >= log_domain_threshold;
    const double log_c = k * std::log(13.5);
    return detail::sample_tuples<4>(
        "mu_P_quasi_triangle", n, detail::fixed_indices(n, {P.front(), P.back()}), opts,
        [&](Recorder& rec, const detail::Tuple<4>& t) {
            const auto [x, y, z, w] = t;
            const std::array<std::size_t, 3> tri{x, y, z};
            if (log_domain) {
                const double xy = log_mu_P(d, x, y, P);
                const double xz = log_mu_P(d, x, z, P);
                const double zy = log_mu_P(d, z, y, P);
                const double zw = log_mu_P(d, z, w, P);
                const double yw = log_mu_P(d, y, w, P);
                const double xw = log_mu_P(d, x, w, P);
                const double yz = zy;
                rec.le("mu_P_triangle_log", tri, xy, log_c + log_add_exp(xz, zy));
                rec.le("mu_P_quadruple_log", t, xy + zw, std::log(4.0) + 2.0 * log_c + std::max(xz + yw, xw + yz));
            } else {
                const double c = std::exp(log_c);
                const double xy = mu_P(d, x, y, P);
                const double xz = mu_P(d, x, z, P);
                const double zy = mu_P(d, z, y, P);
                const double zw = mu_P(d, z, w, P);
                const double yw = mu_P(d, y, w, P);
                const double xw = mu_P(d, x, w, P);
                rec.le("mu_P_triangle", tri, xy, c * (xz + zy));
                rec.le("mu_P_quadruple", t, xy * zw, 4.0 * c * c * std::max(xz * yw, xw * zy));
            }
        });
}

} // namespace cassini
