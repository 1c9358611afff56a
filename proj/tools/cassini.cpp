// cassini: build Cassinian-type metrics on punctured point sets, measure their
// four-point Gromov delta and check the inequalities they satisfy.
//
// Exit codes: 0 success / pass, 1 verification failure, 2 input error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cassini/cassini.hpp>

namespace fs = std::filesystem;
using namespace cassini;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_input = 2;

struct InputFlags {
    std::string cloud;
    std::string matrix;
    std::string spec;
    std::string metric = "euclidean";
    std::string punctures;
    std::string variant;
    std::optional<std::size_t> anchor;

    void attach(CLI::App* cmd)
    {
        auto* c = cmd->add_option("--cloud", cloud, "point cloud (.csv or .json)");
        auto* m = cmd->add_option("--matrix", matrix, "distance matrix (.json or .csv)");
        auto* s = cmd->add_option("--spec", spec, "punctured-space spec (.json)");
        c->excludes(m)->excludes(s);
        m->excludes(s);
        cmd->add_option("--metric", metric, "base metric for clouds: euclidean|taxicab|d1|d2|d1+d2");
        cmd->add_option("--punctures", punctures, "comma-separated puncture indices into the base");
        cmd->add_option("--variant", variant, "tau_p|tilde_tau_p|avg_tau|tilde_avg_tau|sup_tau|j|j_tilde");
        cmd->add_option("--anchor", anchor, "position in the puncture list used by one-point variants");
    }
};

struct Loaded {
    DistanceMatrix base;
    std::optional<PointCloud> cloud;
    std::optional<PuncturedSpace> space;

    /// The matrix the command operates on: the variant over D if punctured, else the base.
    DistanceMatrix target(std::size_t workers) const
    {
        return space ? punctured_matrix(*space, workers) : base;
    }
};

std::vector<std::size_t> parse_index_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            throw InputError("'" + item + "' is not an index");
        }
        if (pos != item.size() || v < 0) {
            throw InputError("'" + item + "' is not an index");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

template <class T>
std::vector<T> parse_number_list(const std::string& text)
{
    std::vector<T> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) {
            continue;
        }
        try {
            std::size_t pos = 0;
            if constexpr (std::is_floating_point_v<T>) {
                out.push_back(static_cast<T>(std::stod(item, &pos)));
            } else {
                out.push_back(static_cast<T>(std::stoull(item, &pos)));
            }
            if (pos != item.size()) {
                throw InputError("bad number '" + item + "'");
            }
        } catch (const std::logic_error&) {
            throw InputError("bad number '" + item + "'");
        }
    }
    return out;
}

Loaded load_input(const InputFlags& f, std::size_t workers)
{
    Loaded out;
    std::optional<PuncturedSpec> spec;
    if (!f.spec.empty()) {
        spec = load_spec(f.spec);
    } else if (!f.cloud.empty() || !f.matrix.empty()) {
        std::variant<CloudBase, DistanceMatrix> base;
        if (!f.cloud.empty()) {
            base = CloudBase{load_cloud(f.cloud), parse_base_metric(f.metric)};
        } else {
            base = load_matrix(f.matrix);
        }
        const auto punctures = parse_index_list(f.punctures);
        if (punctures.empty()) {
            if (!f.variant.empty()) {
                throw InputError("--variant needs --punctures");
            }
            if (const auto* cb = std::get_if<CloudBase>(&base)) {
                out.cloud = cb->cloud;
            }
            out.base = materialize_base(base, workers);
            return out;
        }
        spec = PuncturedSpec{std::move(base), punctures, Variant::avg_tau, 0};
    } else {
        throw InputError("one of --cloud, --matrix or --spec is required");
    }

    if (!f.variant.empty()) {
        spec->variant = parse_variant(f.variant);
    }
    if (f.anchor) {
        spec->anchor = *f.anchor;
    }
    if (const auto* cb = std::get_if<CloudBase>(&spec->base)) {
        out.cloud = cb->cloud;
    }
    out.space = resolve(*spec, workers);
    out.base = out.space->base;
    return out;
}

void emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text(out_path, text);
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

fs::path default_report_dir()
{
    if (const char* env = std::getenv("CASSINI_OUT_DIR"); env && *env) {
        return env;
    }
    return "cassini-reports";
}

// ---- subcommands -------------------------------------------------------------

struct GenFlags {
    std::size_t n = 0;
    std::size_t dim = 2;
    std::uint64_t seed = 0;
    double lo = 0.0;
    double hi = 1.0;
    std::string out;
    std::string format;
};

int cmd_gen(const GenFlags& f)
{
    if (f.n < 1) {
        throw InputError("--n must be at least 1");
    }
    if (f.dim < 1) {
        throw InputError("--dim must be at least 1");
    }
    Rng rng(f.seed);
    const auto cloud = random_cloud(f.n, f.dim, rng, f.lo, f.hi);
    std::string format = f.format;
    if (format.empty()) {
        format = fs::path(f.out).extension() == ".json" ? "json" : "csv";
    }
    if (format == "json") {
        emit(dump(to_json(cloud)), f.out);
    } else if (format == "csv") {
        emit(to_csv(cloud), f.out);
    } else {
        throw InputError("unknown format '" + format + "'");
    }
    return exit_ok;
}

struct DistFlags {
    InputFlags input;
    std::string out;
    std::string format = "json";
    std::size_t workers = 0;
};

int cmd_dist(const DistFlags& f)
{
    const auto loaded = load_input(f.input, f.workers);
    const auto m = loaded.target(f.workers);
    if (f.format == "json") {
        emit(dump(to_json(m)), f.out);
    } else if (f.format == "csv") {
        emit(to_csv(m), f.out);
    } else {
        throw InputError("unknown format '" + f.format + "'");
    }
    return exit_ok;
}

struct DeltaFlags {
    InputFlags input;
    std::string mode = "exact";
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::string out;
};

int cmd_delta(const DeltaFlags& f)
{
    const auto loaded = load_input(f.input, f.workers);
    const auto m = loaded.target(f.workers);
    DeltaReport report;
    if (f.mode == "exact") {
        report = exact_delta(m, f.workers);
    } else if (f.mode == "sampled") {
        report = sampled_delta(m, f.samples, f.seed, f.workers);
    } else {
        throw InputError("--mode must be exact or sampled");
    }
    emit(dump(to_json(report)), f.out);
    return exit_ok;
}

struct VerifyFlags {
    std::string target;
    InputFlags input;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::size_t workers = 0;
    std::size_t k = 8;
    std::string out;
};

std::vector<ViolationReport> run_lemmas(const DistanceMatrix& d, std::vector<std::size_t> punctures,
                                        const CheckOptions& opts, std::size_t k)
{
    const std::size_t n = d.size();
    if (punctures.empty()) {
        for (std::size_t i = 0; i < std::min(k, n); ++i) {
            punctures.push_back(i);
        }
    }
    if (punctures.empty()) {
        throw InputError("lemma checks need a nonempty space");
    }
    const std::size_t p = punctures.front();
    const std::size_t q = punctures.size() > 1 ? punctures[1] : (n > 1 ? (p + 1) % n : p);

    std::vector<ViolationReport> reports;
    auto tagged = [](ViolationReport r, std::string name) {
        r.name = std::move(name);
        return r;
    };
    auto salted = [&](std::uint64_t salt) {
        auto o = opts;
        o.seed = substream_seed(opts.seed, salt);
        return o;
    };
    reports.push_back(check_mu_bounds(d, p, q, salted(1)));
    reports.push_back(check_lemma_nine(d, p, salted(2)));
    for (double K : {4.0, 6.0, 10.0}) {
        reports.push_back(tagged(check_lemma_K(d, p, K, salted(3 + static_cast<std::uint64_t>(K))),
                                 "lemma_K[K=" + format_double(K) + "]"));
    }
    reports.push_back(check_product_lemma(d, punctures, salted(20)));
    reports.push_back(tagged(check_quasi_ptolemy_sampled(d, 1.0, std::nullopt, salted(21)), "quasi_ptolemy[K=1,d]"));
    reports.push_back(tagged(check_quasi_ptolemy_sampled(d, 1.5, p, salted(22)), "quasi_ptolemy[K=1.5,mu_p]"));
    reports.push_back(check_mu_P_quasi_triangle(d, punctures, salted(23)));
    return reports;
}

int cmd_verify(const VerifyFlags& f)
{
    if (!(f.tol > 0.0)) {
        throw InputError("--tol must be positive");
    }
    CheckOptions opts;
    opts.tol = f.tol;
    opts.samples = f.samples;
    opts.seed = f.seed;
    opts.workers = f.workers;

    const auto loaded = load_input(f.input, f.workers);
    std::vector<ViolationReport> reports;
    if (f.target == "axioms") {
        reports.push_back(check_metric_axioms(loaded.target(f.workers), opts));
    } else if (f.target == "ptolemy") {
        reports.push_back(check_ptolemaic(loaded.target(f.workers), opts));
    } else if (f.target == "sandwich") {
        if (loaded.space) {
            reports.push_back(check_sandwich(SandwichKind::one_point, *loaded.space, opts));
            reports.push_back(check_sandwich(SandwichKind::average, *loaded.space, opts));
        }
        if (loaded.cloud && loaded.cloud->dim() == 2) {
            reports.push_back(check_sandwich(SandwichKind::taxicab, *loaded.cloud, opts));
        }
        if (reports.empty()) {
            throw InputError("sandwich needs punctures (for the Cassinian bounds) or a planar cloud (for taxicab)");
        }
    } else if (f.target == "lemmas") {
        const auto punctures = loaded.space ? loaded.space->punctures : std::vector<std::size_t>{};
        reports = run_lemmas(loaded.base, punctures, opts, f.k);
    } else {
        throw InputError("unknown verify target '" + f.target + "' (expected axioms|ptolemy|sandwich|lemmas)");
    }

    bool passed = true;
    json list = json::array();
    for (const auto& r : reports) {
        passed = passed && r.passed();
        list.push_back(to_json(r));
    }
    const json doc = {{"target", f.target}, {"tolerance", f.tol}, {"seed", f.seed}, {"samples", f.samples},
                      {"reports", list},    {"passed", passed}};
    emit(dump(doc), f.out);
    std::cerr << render_table(reports);
    return passed ? exit_ok : exit_failed;
}

struct ReproFlags {
    std::string scenario;
    std::size_t n = 40;
    std::string ks = "1,2,4,8";
    std::size_t trials = 30;
    std::uint64_t seed = 0;
    std::string t_grid = "1,10,100";
    std::uint64_t samples = 100000;
    double tol = 1e-9;
    std::size_t workers = 0;
    std::string out;
    std::string out_dir;
};

int cmd_repro(const ReproFlags& f)
{
    if (!(f.tol > 0.0)) {
        throw InputError("--tol must be positive");
    }
    auto run = [&](const std::string& id) {
        if (id == "four-point") {
            return four_point_counterexample(f.tol);
        }
        if (id == "arctan") {
            ArctanConfig cfg;
            cfg.t_grid = parse_number_list<double>(f.t_grid);
            cfg.samples = f.samples;
            cfg.seed = f.seed;
            cfg.workers = f.workers;
            cfg.tol = f.tol;
            return arctan_family(cfg);
        }
        if (id == "sweep") {
            SweepConfig cfg;
            cfg.n = f.n;
            cfg.ks = parse_number_list<std::size_t>(f.ks);
            cfg.trials = f.trials;
            cfg.seed = f.seed;
            cfg.workers = f.workers;
            cfg.tol = f.tol;
            return hyperbolicity_sweep(cfg);
        }
        throw InputError("unknown scenario '" + id + "' (expected four-point|arctan|sweep|all)");
    };

    if (f.scenario != "all") {
        const auto result = run(f.scenario);
        emit(dump(to_json(result)), f.out);
        std::cerr << render_table(result);
        return result.pass ? exit_ok : exit_failed;
    }

    const fs::path dir = f.out_dir.empty() ? default_report_dir() : fs::path(f.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create report directory '" + dir.string() + "'");
    }
    bool pass = true;
    json summary = json::array();
    for (const std::string id : {"four-point", "arctan", "sweep"}) {
        const auto result = run(id);
        write_text(dir / (id + ".json"), dump(to_json(result)));
        std::cerr << render_table(result);
        summary.push_back({{"scenario", id}, {"pass", result.pass}});
        pass = pass && result.pass;
    }
    emit(dump({{"report_dir", dir.string()}, {"scenarios", summary}, {"pass", pass}}), f.out);
    return pass ? exit_ok : exit_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cassinian-type metrics on punctured spaces: construction, Gromov delta, verification"};
    app.require_subcommand(1);

    GenFlags gen;
    auto* g = app.add_subcommand("gen", "write a seeded random point cloud");
    g->add_option("--n", gen.n, "number of points")->required();
    g->add_option("--dim", gen.dim, "dimension");
    g->add_option("--seed", gen.seed, "64-bit seed");
    g->add_option("--lo", gen.lo, "lower coordinate bound");
    g->add_option("--hi", gen.hi, "upper coordinate bound");
    g->add_option("--out", gen.out, "output path (stdout if omitted)");
    g->add_option("--format", gen.format, "csv|json (default from --out extension, else csv)");

    DistFlags dist;
    auto* d = app.add_subcommand("dist", "materialize a base or punctured distance matrix");
    dist.input.attach(d);
    d->add_option("--out", dist.out, "output path (stdout if omitted)");
    d->add_option("--format", dist.format, "json|csv");
    d->add_option("--workers", dist.workers, "worker threads (0 = all cores)");

    DeltaFlags delta;
    auto* dl = app.add_subcommand("delta", "four-point Gromov delta, exact or sampled");
    delta.input.attach(dl);
    dl->add_option("--mode", delta.mode, "exact|sampled");
    dl->add_option("--samples", delta.samples, "quadruples to sample");
    dl->add_option("--seed", delta.seed, "64-bit seed for sampling");
    dl->add_option("--workers", delta.workers, "worker threads (0 = all cores)");
    dl->add_option("--out", delta.out, "output path (stdout if omitted)");

    VerifyFlags verify;
    auto* v = app.add_subcommand("verify", "check metric axioms, Ptolemy, sandwich bounds or the mu lemmas");
    v->add_option("target", verify.target, "axioms|ptolemy|sandwich|lemmas")->required();
    verify.input.attach(v);
    v->add_option("--samples", verify.samples, "sampled tuples per lemma");
    v->add_option("--seed", verify.seed, "64-bit seed");
    v->add_option("--tol", verify.tol, "relative tolerance");
    v->add_option("--k", verify.k, "puncture count for lemmas when no punctures are given");
    v->add_option("--workers", verify.workers, "worker threads (0 = all cores)");
    v->add_option("--out", verify.out, "output path (stdout if omitted)");

    ReproFlags repro;
    auto* r = app.add_subcommand("repro", "run a reproduction scenario");
    r->add_option("scenario", repro.scenario, "four-point|arctan|sweep|all")->required();
    r->add_option("--n", repro.n, "sweep: domain points per trial");
    r->add_option("--k", repro.ks, "sweep: comma-separated puncture counts");
    r->add_option("--trials", repro.trials, "sweep: number of trials");
    r->add_option("--seed", repro.seed, "64-bit seed");
    r->add_option("--t-grid", repro.t_grid, "arctan: comma-separated t values");
    r->add_option("--samples", repro.samples, "arctan: sampled quadruples");
    r->add_option("--tol", repro.tol, "tolerance");
    r->add_option("--workers", repro.workers, "worker threads (0 = all cores)");
    r->add_option("--out", repro.out, "output path (stdout if omitted)");
    r->add_option("--out-dir", repro.out_dir, "report directory for 'all' (default $CASSINI_OUT_DIR)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*g) {
            return cmd_gen(gen);
        }
        if (*d) {
            return cmd_dist(dist);
        }
        if (*dl) {
            return cmd_delta(delta);
        }
        if (*v) {
            return cmd_verify(verify);
        }
        if (*r) {
            return cmd_repro(repro);
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
    return exit_input;
}
