#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace cassini;
using cassini::testing::cloud;
using cassini::testing::euclid;
using cassini::testing::multiscale;

namespace {

CheckOptions samples(std::uint64_t n, std::uint64_t seed = 0)
{
    CheckOptions o;
    o.samples = n;
    o.seed = seed;
    return o;
}

PuncturedSpace counter_space(Variant v)
{
    return resolve(PuncturedSpec{counterexample_space(), {0}, v, 0});
}

DistanceMatrix multiscale_matrix(std::size_t n, std::uint64_t seed)
{
    return build_distance_matrix(multiscale(n, seed), BaseMetric::euclidean);
}

} // namespace

TEST(Tolerance, RelativeRule)
{
    Recorder rec(1e-9, 10);
    const std::array<std::size_t, 1> t{0};
    EXPECT_TRUE(rec.le("a", t, 1.0 + 5e-10, 1.0));
    EXPECT_FALSE(rec.le("b", t, 1.0 + 2e-9, 1.0));
    EXPECT_TRUE(rec.le("c", t, 1e6 + 1e-4, 1e6));
    EXPECT_FALSE(rec.le("d", t, std::nan(""), 1.0));
    const auto r = rec.report("x");
    EXPECT_EQ(r.checked, 4u);
    EXPECT_EQ(r.violation_count, 2u);
    EXPECT_EQ(r.violations[0].check, "b");
    EXPECT_THROW(check_metric_axioms(euclid(5, 1), [] {
                     CheckOptions o;
                     o.tol = 0.0;
                     return o;
                 }()),
                 InputError);
}

TEST(Tolerance, LogAddExp)
{
    EXPECT_NEAR(log_add_exp(std::log(2.0), std::log(3.0)), std::log(5.0), 1e-15);
    EXPECT_NEAR(log_add_exp(1000.0, 1000.0), 1000.0 + std::numbers::ln2, 1e-12);
    EXPECT_EQ(log_add_exp(-INFINITY, 2.0), 2.0);
}

TEST(Axioms, EuclideanAndCassinianMatricesPass)
{
    EXPECT_TRUE(check_metric_axioms(euclid(40, 2)).passed());
    const auto c = cloud(30, 6);
    for (auto v : {Variant::tau_p, Variant::tilde_tau_p, Variant::avg_tau, Variant::tilde_avg_tau, Variant::sup_tau,
                   Variant::j}) {
        const auto m = punctured_matrix(resolve(PuncturedSpec{CloudBase{c, BaseMetric::euclidean}, {0, 1, 2}, v, 0}));
        const auto r = check_metric_axioms(m);
        EXPECT_TRUE(r.passed()) << to_string(v);
        EXPECT_EQ(r.zero_off_diagonal, 0u);
    }
}

TEST(Axioms, CounterexampleTildeTauFailsOnce)
{
    EXPECT_TRUE(check_metric_axioms(counterexample_space()).passed());

    const auto m = punctured_matrix(counter_space(Variant::tilde_tau_p));
    const auto r = check_metric_axioms(m);
    ASSERT_EQ(r.violation_count, 1u);
    const auto& v = r.violations.front();
    ASSERT_EQ(v.tuple.size(), 3u);
    EXPECT_EQ(m.label(v.tuple[0]), "y");
    EXPECT_EQ(m.label(v.tuple[1]), "z");
    EXPECT_EQ(m.label(v.tuple[2]), "x");
    EXPECT_NEAR(v.slack, 0.029012295188968950, 1e-12);

    const auto tau = punctured_matrix(counter_space(Variant::tau_p));
    EXPECT_TRUE(check_metric_axioms(tau).passed());
    EXPECT_NEAR(tau(1, 2) - (tau(0, 1) + tau(0, 2)), -0.15330926160498568, 1e-12);
}

TEST(Axioms, ZeroDistancesCountedNotFlagged)
{
    const auto d = DistanceMatrix::from_rows({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}});
    const auto r = check_metric_axioms(d);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.zero_off_diagonal, 1u);
}

TEST(Ptolemy, EuclideanPassesAndEquidistantIsStrict)
{
    EXPECT_TRUE(check_ptolemaic(euclid(30, 3)).passed());
    EXPECT_TRUE(check_ptolemaic(euclid(25, 4, 3)).passed());
    const auto eq = DistanceMatrix::from_rows({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
    const auto r = check_ptolemaic(eq);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.worst_slack, -1.0);
}

TEST(Ptolemy, CounterexampleBaseFailsOncePerBruteForce)
{
    // Brute force: the (p,x | y,z) product is 4 against 1 + 1.
    const auto r = check_ptolemaic(counterexample_space());
    EXPECT_EQ(r.violation_count, 1u);
    ASSERT_FALSE(r.violations.empty());
    EXPECT_EQ(r.violations.front().lhs, 4.0);
    EXPECT_EQ(r.violations.front().rhs, 2.0);
}

TEST(Sandwich, AllThreeBoundsHold)
{
    const auto c = cloud(40, 9);
    const auto space = resolve(PuncturedSpec{CloudBase{c, BaseMetric::euclidean}, {0, 1, 2, 3, 4}, Variant::avg_tau, 2});
    EXPECT_TRUE(check_sandwich(SandwichKind::one_point, space).passed());
    EXPECT_TRUE(check_sandwich(SandwichKind::average, space).passed());
    const auto wide = cloud(60, 10, 2, -50.0, 50.0);
    const auto tx = check_sandwich(SandwichKind::taxicab, wide);
    EXPECT_TRUE(tx.passed());
    EXPECT_EQ(tx.checked, 2u * 60u * 59u / 2u);
    EXPECT_THROW(check_sandwich(SandwichKind::taxicab, space), InputError);
    EXPECT_THROW(check_sandwich(SandwichKind::average, wide), InputError);
    EXPECT_THROW(check_sandwich(SandwichKind::taxicab, cloud(5, 1, 3)), InputError);
}

TEST(MuBounds, DegenerateAndRandom)
{
    const auto d = multiscale_matrix(50, 1);
    const auto r = check_mu_bounds(d, 0, 1, samples(20000));
    EXPECT_TRUE(r.passed());
    EXPECT_GT(r.checked, 7u * 20000u);
    EXPECT_THROW(check_mu_bounds(d, 0, 50), InputError);
}

TEST(LemmaNine, PassesAndRecordsRatio)
{
    const auto r = check_lemma_nine(multiscale_matrix(50, 2), 3, samples(20000));
    EXPECT_TRUE(r.passed());
    ASSERT_TRUE(r.max_ratio.has_value());
    EXPECT_LE(*r.max_ratio, 9.0);
    EXPECT_GE(*r.max_ratio, 1.0);
}

TEST(LemmaK, ConstantAndSkips)
{
    EXPECT_DOUBLE_EQ(lemma_k_constant(6.0), 4.5);
    EXPECT_THROW(lemma_k_constant(3.0), InputError);
    const auto d = multiscale_matrix(60, 3);
    for (double K : {4.0, 6.0, 10.0}) {
        const auto r = check_lemma_K(d, 0, K, samples(30000, 4));
        EXPECT_TRUE(r.passed());
        EXPECT_GT(r.checked, 0u) << "hypothesis never triggered at K=" << K;
        EXPECT_GT(r.skipped, 0u);
    }
    // All mu values equal: the hypothesis fails for every K > 3.
    const auto eq = DistanceMatrix::from_rows({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
    const auto r = check_lemma_K(eq, 0, 4.0, samples(100));
    EXPECT_TRUE(r.passed());
}

TEST(ProductLemma, DirectAndLogDomainAgree)
{
    const auto d = multiscale_matrix(30, 5);
    for (std::size_t k = 1; k <= 8; ++k) {
        std::vector<std::size_t> P;
        for (std::size_t i = 0; i < k; ++i) {
            P.push_back(29 - i);
        }
        for (std::size_t x = 0; x < 5; ++x) {
            for (std::size_t y = 0; y < 5; ++y) {
                const auto direct = product_lemma_sides(d, x, y, 6, P, false);
                const auto logged = product_lemma_sides(d, x, y, 6, P, true);
                EXPECT_NEAR(std::log(direct.lhs), logged.lhs, 1e-9 * std::max(1.0, std::abs(logged.lhs)));
                EXPECT_NEAR(std::log(direct.rhs), logged.rhs, 1e-9 * std::max(1.0, std::abs(logged.rhs)));
            }
        }
        EXPECT_TRUE(check_product_lemma(d, P, samples(5000, k)).passed()) << "k=" << k;
    }
}

TEST(QuasiPtolemy, SingleMatrix)
{
    Matrix4 unit{};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            unit[i][j] = i == j ? 0.0 : 1.0;
        }
    }
    const auto r = check_quasi_ptolemy(unit, 1.0);
    EXPECT_EQ(r.hypothesis_satisfied, std::optional<bool>(true));
    EXPECT_TRUE(r.passed());

    Matrix4 bad = unit;
    bad[0][1] = bad[1][0] = 10.0;
    const auto skipped = check_quasi_ptolemy(bad, 1.0);
    EXPECT_EQ(skipped.hypothesis_satisfied, std::optional<bool>(false));

    Matrix4 asym = unit;
    asym[0][1] = 2.0;
    EXPECT_THROW(check_quasi_ptolemy(asym, 1.0), InputError);
    EXPECT_THROW(check_quasi_ptolemy(unit, 0.5), InputError);
}

TEST(QuasiPtolemy, SampledOnDistancesAndMu)
{
    const auto d = multiscale_matrix(40, 6);
    EXPECT_TRUE(check_quasi_ptolemy_sampled(d, 1.0, std::nullopt, samples(20000)).passed());
    const auto mu = check_quasi_ptolemy_sampled(d, 1.5, 0, samples(20000));
    EXPECT_TRUE(mu.passed());
    EXPECT_GT(mu.checked, 0u);
}

TEST(MuPQuasiTriangle, TripleAndQuadrupleForms)
{
    const auto d = multiscale_matrix(40, 7);
    for (std::size_t k : {1u, 2u, 4u, 8u}) {
        std::vector<std::size_t> P;
        for (std::size_t i = 0; i < k; ++i) {
            P.push_back(i * 3);
        }
        EXPECT_TRUE(check_mu_P_quasi_triangle(d, P, samples(10000, k)).passed()) << "k=" << k;
    }
    EXPECT_THROW(check_mu_P_quasi_triangle(d, std::vector<std::size_t>{}), InputError);
}

TEST(Sampling, ReportsAreWorkerIndependent)
{
    const auto d = multiscale_matrix(40, 8);
    auto a = samples(40000, 3);
    auto b = a;
    a.workers = 1;
    b.workers = 4;
    const auto ra = check_lemma_nine(d, 0, a);
    const auto rb = check_lemma_nine(d, 0, b);
    EXPECT_EQ(ra.checked, rb.checked);
    EXPECT_EQ(ra.worst_slack, rb.worst_slack);
    EXPECT_EQ(ra.max_ratio, rb.max_ratio);
    EXPECT_EQ(ra.seed, std::optional<std::uint64_t>(3));
}

TEST(Sampling, ListedViolationsAreCapped)
{
    // A non-metric with many triangle failures.
    const std::size_t n = 12;
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                e[i * n + j] = (i + j) % 2 == 0 ? 10.0 : 1.0;
            }
        }
    }
    CheckOptions o;
    o.max_listed = 5;
    const auto r = check_metric_axioms(DistanceMatrix(n, e), o);
    EXPECT_GT(r.violation_count, 5u);
    EXPECT_EQ(r.violations.size(), 5u);
}
