#pragma once

// Four-point Gromov hyperbolicity constant.
//
// For a quadruple (x, y, z, v) let the three pairing sums be
//   d(x,y) + d(z,v),  d(x,z) + d(y,v),  d(x,v) + d(y,z)
// and S1 >= S2 >= S3 their sorted values. The smallest delta for which
//   d(x,y) + d(z,v) <= max(d(x,z) + d(y,v), d(x,v) + d(y,z)) + 2 delta
// holds under every relabelling is (S1 - S2) / 2. The delta of a finite
// space is the maximum of that over all 4-subsets.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "metric_core.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace cassini {

using Quadruple = std::array<std::size_t, 4>;

enum class DeltaMode { exact, sampled };

inline std::string_view to_string(DeltaMode m) noexcept { return m == DeltaMode::exact ? "exact" : "sampled"; }

struct DeltaReport {
    double delta = 0.0;
    Quadruple witness{};
    DeltaMode mode = DeltaMode::exact;
    std::uint64_t quadruples = 0;
    std::optional<std::uint64_t> seed;
    double elapsed_ms = 0.0;
};

/// S1 - S2 for three pairing sums. Pure selection, so the result does not
/// depend on the order the sums are passed in.
inline double pairing_gap(double a, double b, double c) noexcept
{
    const double hi = std::max(std::max(a, b), c);
    const double mid = std::max(std::min(a, b), std::min(std::max(a, b), c));
    return hi - mid;
}

template <MetricOracle D>
double quadruple_delta(const D& d, std::size_t x, std::size_t y, std::size_t z, std::size_t v)
{
    return 0.5 * pairing_gap(d(x, y) + d(z, v), d(x, z) + d(y, v), d(x, v) + d(y, z));
}

/// C(n, 4); saturates at UINT64_MAX.
inline std::uint64_t quadruple_count(std::size_t n) noexcept
{
    if (n < 4) {
        return 0;
    }
    // C(n,k) * (n-k) is always divisible by k+1.
    std::uint64_t c = 1;
    for (std::uint64_t k = 0; k < 4; ++k) {
        std::uint64_t next = 0;
        if (__builtin_mul_overflow(c, static_cast<std::uint64_t>(n) - k, &next)) {
            return UINT64_MAX;
        }
        c = next / (k + 1);
    }
    return c;
}

namespace detail {

struct GapBest {
    double gap = -std::numeric_limits<double>::infinity();
    Quadruple witness{};

    /// Larger gap wins; equal gaps keep the lexicographically smaller witness.
    void offer(double g, const Quadruple& q) noexcept
    {
        if (g > gap || (g == gap && q < witness)) {
            gap = g;
            witness = q;
        }
    }
};

// All quadruples with smallest index i, in lexicographic order.
inline GapBest exact_block(const DistanceMatrix& m, std::size_t i)
{
    const std::size_t n = m.size();
    const double* base = m.raw().data();
    const double* ri = base + i * n;
    GapBest best;
    for (std::size_t j = i + 1; j + 2 < n; ++j) {
        const double* rj = base + j * n;
        const double dij = ri[j];
        for (std::size_t k = j + 1; k + 1 < n; ++k) {
            const double* rk = base + k * n;
            const double dik = ri[k];
            const double djk = rj[k];
            double local = -std::numeric_limits<double>::infinity();
            for (std::size_t l = k + 1; l < n; ++l) {
                const double g = pairing_gap(dij + rk[l], dik + rj[l], ri[l] + djk);
                local = g > local ? g : local;
            }
            if (local > best.gap) {
                for (std::size_t l = k + 1; l < n; ++l) {
                    if (pairing_gap(dij + rk[l], dik + rj[l], ri[l] + djk) == local) {
                        best.gap = local;
                        best.witness = {i, j, k, l};
                        break;
                    }
                }
            }
        }
    }
    return best;
}

template <MetricOracle D>
GapBest exact_block(const D& d, std::size_t i)
{
    const std::size_t n = d.size();
    GapBest best;
    for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            for (std::size_t l = k + 1; l < n; ++l) {
                const double g = pairing_gap(d(i, j) + d(k, l), d(i, k) + d(j, l), d(i, l) + d(j, k));
                if (g > best.gap) {
                    best.gap = g;
                    best.witness = {i, j, k, l};
                }
            }
        }
    }
    return best;
}

inline void require_quadruple_space(std::size_t n)
{
    if (n < 4) {
        throw InputError("delta needs at least 4 points, got " + std::to_string(n));
    }
}

inline double elapsed_ms_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

template <class D>
GapBest exact_search(const D& d, std::size_t workers)
{
    const std::size_t n = d.size();
    std::vector<GapBest> blocks(n - 3);
    parallel_for(blocks.size(), workers, [&](std::size_t i) { blocks[i] = exact_block(d, i); });
    GapBest best;
    for (const auto& b : blocks) {
        best.offer(b.gap, b.witness);
    }
    return best;
}

} // namespace detail

/// Maximum of quadruple_delta over all C(n,4) distinct quadruples. The index
/// space is split by smallest index; the reduction keeps the largest delta and,
/// among ties, the lexicographically smallest witness, so the report is the
/// same for every worker count. `workers == 0` uses all hardware threads.
template <MetricOracle D>
DeltaReport exact_delta(const D& d, std::size_t workers = 0)
{
    const auto start = std::chrono::steady_clock::now();
    detail::require_quadruple_space(d.size());
    const auto best = detail::exact_search(d, workers);
    DeltaReport report;
    report.delta = 0.5 * best.gap;
    report.witness = best.witness;
    report.mode = DeltaMode::exact;
    report.quadruples = quadruple_count(d.size());
    report.elapsed_ms = detail::elapsed_ms_since(start);
    return report;
}

/// Uniformly drawn sorted 4-subset of [0, n).
inline Quadruple draw_quadruple(Rng& rng, std::size_t n)
{
    Quadruple q{};
    for (std::size_t filled = 0; filled < 4;) {
        const auto c = static_cast<std::size_t>(rng.below(n));
        if (std::find(q.begin(), q.begin() + filled, c) == q.begin() + filled) {
            q[filled++] = c;
        }
    }
    std::sort(q.begin(), q.end());
    return q;
}

inline constexpr std::size_t sample_chunk = 1 << 15;

/// Lower bound on delta from `samples` random distinct quadruples. Chunk c of
/// the sample stream is drawn from substream_seed(seed, c), so the result is
/// independent of the worker count. When samples >= C(n,4) the search falls
/// back to full enumeration.
template <MetricOracle D>
DeltaReport sampled_delta(const D& d, std::uint64_t samples, std::uint64_t seed, std::size_t workers = 0)
{
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = d.size();
    detail::require_quadruple_space(n);
    if (samples == 0) {
        throw InputError("sampled delta needs at least one sample");
    }

    DeltaReport report;
    report.mode = DeltaMode::sampled;
    report.seed = seed;

    if (samples >= quadruple_count(n)) {
        const auto best = detail::exact_search(d, workers);
        report.delta = 0.5 * best.gap;
        report.witness = best.witness;
        report.quadruples = quadruple_count(n);
        report.elapsed_ms = detail::elapsed_ms_since(start);
        return report;
    }

    const std::size_t chunks = static_cast<std::size_t>((samples + sample_chunk - 1) / sample_chunk);
    std::vector<detail::GapBest> results(chunks);
    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng(substream_seed(seed, c));
        const std::uint64_t count = std::min<std::uint64_t>(sample_chunk, samples - std::uint64_t{c} * sample_chunk);
        detail::GapBest best;
        for (std::uint64_t s = 0; s < count; ++s) {
            const auto q = draw_quadruple(rng, n);
            best.offer(pairing_gap(d(q[0], q[1]) + d(q[2], q[3]), d(q[0], q[2]) + d(q[1], q[3]),
                                   d(q[0], q[3]) + d(q[1], q[2])),
                       q);
        }
        results[c] = best;
    });
    detail::GapBest best;
    for (const auto& r : results) {
        best.offer(r.gap, r.witness);
    }
    report.delta = 0.5 * best.gap;
    report.witness = best.witness;
    report.quadruples = samples;
    report.elapsed_ms = detail::elapsed_ms_since(start);
    return report;
}

} // namespace cassini
