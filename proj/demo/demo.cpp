// Punctures a random planar cloud, builds the averaged tau metric and compares
// its exact Gromov delta with the one-point variant.

#include <cstdio>

#include <cassini/cassini.hpp>

int main()
{
    cassini::Rng rng(7);
    auto cloud = cassini::random_cloud(36, 2, rng);

    cassini::PuncturedSpec spec{cassini::CloudBase{cloud, cassini::BaseMetric::euclidean}, {0, 1, 2, 3}, cassini::Variant::avg_tau, 0};
    for (auto v : {cassini::Variant::tilde_tau_p, cassini::Variant::tau_p, cassini::Variant::avg_tau,
                   cassini::Variant::tilde_avg_tau}) {
        spec.variant = v;
        const auto m = cassini::punctured_matrix(spec);
        const auto report = cassini::exact_delta(m);
        std::printf("%-14s |D| = %zu  delta = %.6f  witness = (%zu %zu %zu %zu)\n",
                    std::string(cassini::to_string(v)).c_str(), m.size(), report.delta, report.witness[0],
                    report.witness[1], report.witness[2], report.witness[3]);
    }
    return 0;
}
