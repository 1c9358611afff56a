#include <algorithm>
#include <array>
#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace cassini;
using cassini::testing::euclid;
using cassini::testing::line;

namespace {

DistanceMatrix corners(double t, BaseMetric metric) { return build_distance_matrix(corner_quadruple(t), metric); }

// Brute force over every ordered 4-tuple, repeats included, straight from the
// four-point condition.
double brute_delta(const DistanceMatrix& d)
{
    const std::size_t n = d.size();
    double best = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            for (std::size_t z = 0; z < n; ++z) {
                for (std::size_t v = 0; v < n; ++v) {
                    const double lhs = d(x, y) + d(z, v);
                    const double rhs = std::max(d(x, z) + d(y, v), d(x, v) + d(y, z));
                    best = std::max(best, 0.5 * (lhs - rhs));
                }
            }
        }
    }
    return best;
}

} // namespace

TEST(PairingGap, SelectionIsOrderFree)
{
    EXPECT_EQ(pairing_gap(4, 2, 2), 2.0);
    EXPECT_EQ(pairing_gap(1, 5, 3), 2.0);
    EXPECT_EQ(pairing_gap(3, 3, 3), 0.0);
    std::array<double, 3> s{0.1 + 0.2, 0.7, 1e-17};
    const double g = pairing_gap(s[0], s[1], s[2]);
    std::sort(s.begin(), s.end());
    do {
        EXPECT_EQ(pairing_gap(s[0], s[1], s[2]), g);
    } while (std::next_permutation(s.begin(), s.end()));
}

TEST(QuadrupleDelta, Examples)
{
    const auto collinear = build_distance_matrix(line({0, 1, 2, 3}), BaseMetric::euclidean);
    EXPECT_EQ(quadruple_delta(collinear, 0, 1, 2, 3), 0.0);
    EXPECT_EQ(quadruple_delta(corners(1, BaseMetric::taxicab), 0, 1, 2, 3), 1.0);
    EXPECT_NEAR(quadruple_delta(corners(1, BaseMetric::d1), 0, 1, 2, 3), 0.78539816339744831, 1e-15);
    EXPECT_NEAR(quadruple_delta(corners(10, BaseMetric::d1_plus_d2), 0, 1, 2, 3), 11.471127674303735, 1e-13);
    EXPECT_NEAR(quadruple_delta(corners(100, BaseMetric::d1_plus_d2), 0, 1, 2, 3), 101.56079666010823, 1e-12);
}

TEST(QuadrupleDelta, PermutationInvariant)
{
    const auto d = euclid(10, 4);
    std::array<std::size_t, 4> q{1, 4, 6, 9};
    const double ref = quadruple_delta(d, 1, 4, 6, 9);
    int seen = 0;
    do {
        ASSERT_EQ(quadruple_delta(d, q[0], q[1], q[2], q[3]), ref);
        ++seen;
    } while (std::next_permutation(q.begin(), q.end()));
    EXPECT_EQ(seen, 24);
}

TEST(QuadrupleDelta, RepeatedPointGivesZero)
{
    const auto d = euclid(6, 12);
    for (std::size_t a = 0; a < 6; ++a) {
        for (std::size_t b = 0; b < 6; ++b) {
            for (std::size_t c = 0; c < 6; ++c) {
                ASSERT_EQ(quadruple_delta(d, a, a, b, c), 0.0);
                ASSERT_EQ(quadruple_delta(d, a, b, c, a), 0.0);
            }
        }
    }
}

TEST(QuadrupleCount, Values)
{
    EXPECT_EQ(quadruple_count(3), 0u);
    EXPECT_EQ(quadruple_count(4), 1u);
    EXPECT_EQ(quadruple_count(40), 91390u);
    EXPECT_EQ(quadruple_count(200), 64684950u);
    EXPECT_EQ(quadruple_count(std::size_t{1} << 40), UINT64_MAX);
}

TEST(ExactDelta, SmallSpaces)
{
    EXPECT_THROW(exact_delta(euclid(3, 1)), InputError);
    const auto four = euclid(4, 9);
    const auto r = exact_delta(four);
    EXPECT_EQ(r.delta, quadruple_delta(four, 0, 1, 2, 3));
    EXPECT_EQ(r.witness, (Quadruple{0, 1, 2, 3}));
    EXPECT_EQ(r.quadruples, 1u);
    EXPECT_EQ(r.mode, DeltaMode::exact);
    EXPECT_FALSE(r.seed.has_value());

    const auto collinear = build_distance_matrix(line({0, 0.5, 1.7, 3, 3.25, 9, 11}), BaseMetric::euclidean);
    EXPECT_EQ(exact_delta(collinear).delta, 0.0);
    EXPECT_EQ(exact_delta(collinear).witness, (Quadruple{0, 1, 2, 3}));
}

TEST(ExactDelta, MatchesBruteForceWithRepeats)
{
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto d = euclid(9, seed);
        EXPECT_NEAR(exact_delta(d).delta, brute_delta(d), 1e-15);
        const auto tau = punctured_matrix(resolve(PuncturedSpec{
            CloudBase{cassini::testing::cloud(10, seed), BaseMetric::euclidean}, {0}, Variant::tau_p, 0}));
        EXPECT_NEAR(exact_delta(tau).delta, brute_delta(tau), 1e-15);
    }
}

TEST(ExactDelta, WorkerIndependentAndOracleAgrees)
{
    const auto d = euclid(45, 77);
    const auto one = exact_delta(d, 1);
    for (std::size_t w : {2u, 3u, 8u, 0u}) {
        const auto r = exact_delta(d, w);
        EXPECT_EQ(r.delta, one.delta);
        EXPECT_EQ(r.witness, one.witness);
    }
    const FunctionOracle f(d.size(), [&](std::size_t i, std::size_t j) { return d(i, j); });
    const auto via_oracle = exact_delta(f, 2);
    EXPECT_EQ(via_oracle.delta, one.delta);
    EXPECT_EQ(via_oracle.witness, one.witness);
}

TEST(ExactDelta, ScaleCovariantAndMonotone)
{
    const auto d = euclid(20, 3);
    const auto base = exact_delta(d).delta;
    EXPECT_NEAR(exact_delta(d.scaled(4.0)).delta, 4.0 * base, 1e-12);
    EXPECT_NEAR(exact_delta(d.scaled(0.1)).delta, 0.1 * base, 1e-12);

    std::vector<std::size_t> keep;
    double previous = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        keep.push_back(i);
        if (keep.size() < 4) {
            continue;
        }
        const double now = exact_delta(d.restrict_to(keep)).delta;
        EXPECT_GE(now, previous);
        previous = now;
    }
    EXPECT_EQ(previous, base);
}

TEST(ExactDelta, WitnessIsLexicographicallySmallestAmongTies)
{
    // Every quadruple of a regular simplex has the same delta.
    const std::size_t n = 7;
    std::vector<double> e(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        e[i * n + i] = 0.0;
    }
    const auto r = exact_delta(DistanceMatrix(n, e), 3);
    EXPECT_EQ(r.witness, (Quadruple{0, 1, 2, 3}));
}

TEST(SampledDelta, BoundedByExactAndDeterministic)
{
    const auto d = euclid(60, 5);
    const auto exact = exact_delta(d);
    const auto a = sampled_delta(d, 50000, 99, 1);
    const auto b = sampled_delta(d, 50000, 99, 4);
    EXPECT_LE(a.delta, exact.delta);
    EXPECT_EQ(a.delta, b.delta);
    EXPECT_EQ(a.witness, b.witness);
    EXPECT_EQ(a.seed, std::optional<std::uint64_t>(99));
    EXPECT_EQ(a.quadruples, 50000u);
    EXPECT_EQ(a.mode, DeltaMode::sampled);
    EXPECT_EQ(quadruple_delta(d, a.witness[0], a.witness[1], a.witness[2], a.witness[3]), a.delta);
    EXPECT_THROW(sampled_delta(d, 0, 1), InputError);
}

TEST(SampledDelta, FallsBackToExhaustive)
{
    const auto d = euclid(12, 8);
    const auto exact = exact_delta(d);
    const auto s = sampled_delta(d, quadruple_count(12), 3);
    EXPECT_EQ(s.delta, exact.delta);
    EXPECT_EQ(s.witness, exact.witness);
    EXPECT_EQ(s.quadruples, quadruple_count(12));
    EXPECT_EQ(s.mode, DeltaMode::sampled);
}

TEST(SampledDelta, DrawnQuadruplesAreDistinctAndSorted)
{
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        const auto q = draw_quadruple(rng, 6);
        ASSERT_TRUE(q[0] < q[1] && q[1] < q[2] && q[2] < q[3]);
        ASSERT_LT(q[3], 6u);
    }
}

TEST(OnePointBound, TildeTauOnEuclideanClouds)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto m = punctured_matrix(resolve(PuncturedSpec{
            CloudBase{cassini::testing::cloud(30, seed), BaseMetric::euclidean}, {0}, Variant::tilde_tau_p, 0}));
        EXPECT_LE(exact_delta(m).delta, std::log(3.0) + 1e-9);
    }
}
