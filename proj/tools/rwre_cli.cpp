// Experiment driver: generation, entropy profiles, SDB, heat-kernel fits,
// corrector, dimension probes, covers, and the deterministic invariant suite.

#include "rwre/entropy.hpp"
#include "rwre/harmonic.hpp"
#include "rwre/heatkernel.hpp"
#include "rwre/models.hpp"
#include "rwre/serialize.hpp"
#include "rwre/testing.hpp"
#include "rwre/walk.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace rwre;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct Config {
    std::map<std::string, std::string> kv;

    static Config load(const std::string& path) {
        Config c;
        if (path.empty()) return c;
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file " + path);
        std::string line, section;
        std::size_t line_no = 0;
        while (std::getline(f, line)) {
            ++line_no;
            auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            auto last = line.find_last_not_of(" \t\r");
            line = line.substr(first, last - first + 1);
            if (line.empty() || line[0] == '#') continue;
            if (line.front() == '[' && line.back() == ']') {
                section = line.substr(1, line.size() - 2);
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected key=value");
            auto trim = [](std::string s) {
                auto a = s.find_first_not_of(" \t");
                if (a == std::string::npos) return std::string();
                auto b = s.find_last_not_of(" \t");
                return s.substr(a, b - a + 1);
            };
            std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
            c.kv[section.empty() ? key : section + "." + key] = val;
        }
        return c;
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& def) const {
        auto it = kv.find(section + "." + key);
        if (it != kv.end()) return it->second;
        it = kv.find(key);
        if (it != kv.end()) return it->second;
        return def;
    }

    double get_double(const std::string& section, const std::string& key, double def) const {
        const std::string s = get(section, key, "");
        if (s.empty()) return def;
        try {
            return std::stod(s);
        } catch (...) {
            throw ConfigError(section + "." + key + ": not a number: '" + s + "'");
        }
    }

    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t def) const {
        const std::string s = get(section, key, "");
        if (s.empty()) return def;
        try {
            return std::stoll(s);
        } catch (...) {
            throw ConfigError(section + "." + key + ": not an integer: '" + s + "'");
        }
    }

    std::vector<std::int64_t> get_list(const std::string& section, const std::string& key,
                                       const std::vector<std::int64_t>& def) const {
        const std::string s = get(section, key, "");
        if (s.empty()) return def;
        std::vector<std::int64_t> out;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            try {
                out.push_back(std::stoll(item));
            } catch (...) {
                throw ConfigError(section + "." + key + ": bad list entry '" + item + "'");
            }
        return out;
    }

    // Hash of the resolved configuration (thread count excluded on purpose:
    // outputs must not depend on it).
    std::uint64_t hash(std::uint64_t seed) const {
        std::uint64_t h = fnv1a_u64(seed);
        for (auto& [k, v] : kv) {
            if (k == "threads" || k.size() > 8 && k.substr(k.size() - 8) == ".threads")
                continue;
            h = fnv1a(k, h);
            h = fnv1a(v, h);
        }
        return h;
    }
};

struct Options {
    std::string config_path;
    std::string out = "out";
    std::uint64_t seed = 12345;
    int threads = 1;
};

ModelSpec model_from_config(const Config& cfg, const std::string& section,
                            const ModelSpec& defaults) {
    ModelSpec spec = defaults;
    spec.name = cfg.get(section, "model", defaults.name);
    spec.d = static_cast<int>(cfg.get_int(section, "d", defaults.d));
    spec.L = static_cast<int>(cfg.get_int(section, "L", defaults.L));
    spec.side = static_cast<int>(cfg.get_int(section, "side", defaults.side));
    spec.p = cfg.get_double(section, "p", defaults.p);
    spec.alpha = cfg.get_double(section, "alpha", defaults.alpha);
    spec.level = static_cast<int>(cfg.get_int(section, "level", defaults.level));
    spec.depth = static_cast<int>(cfg.get_int(section, "depth", defaults.depth));

    const bool known = spec.name == "lattice" || spec.name == "torus" ||
                       spec.name == "percolation" || spec.name == "conductance" ||
                       spec.name == "balanced" || spec.name == "sierpinski" ||
                       spec.name == "kesten";
    if (!known) throw ConfigError(section + ".model: unknown model '" + spec.name + "'");
    if (spec.name == "percolation" && (spec.p <= 0 || spec.p > 1))
        throw ConfigError(section + ".p: must be in (0,1], got " + g17(spec.p));
    if (spec.name == "conductance" && (spec.alpha <= 0 || spec.alpha >= 1))
        throw ConfigError(section + ".alpha: must be in (0,1), got " + g17(spec.alpha));
    if (spec.name == "torus" && spec.L < 1 && spec.side < 1)
        throw ConfigError(section + ": torus needs L >= 1 or side >= 1");
    if (spec.name != "torus" && spec.name != "sierpinski" && spec.name != "kesten" &&
        spec.L < 1)
        throw ConfigError(section + ".L: must be >= 1");
    if (spec.name == "sierpinski" && (spec.level < 1 || spec.level > 10))
        throw ConfigError(section + ".level: must be in 1..10");
    if (spec.name == "kesten" && spec.depth < 1)
        throw ConfigError(section + ".depth: must be >= 1");
    if (spec.d < 1 && spec.name != "sierpinski" && spec.name != "kesten")
        throw ConfigError(section + ".d: must be >= 1");
    return spec;
}

void write_manifest(const Options& opt, const Config& cfg, const ordered_json& results,
                    bool pass) {
    ordered_json m;
    m["config_hash"] = cfg.hash(opt.seed);
    m["code_version"] = kVersion;
    // resolved non-default settings, so manifests record tolerance overrides
    ordered_json overrides = ordered_json::object();
    for (const auto& [k, v] : cfg.kv) {
        if (k == "threads" || (k.size() > 8 && k.substr(k.size() - 8) == ".threads")) continue;
        overrides[k] = v;
    }
    m["config"] = overrides;
    m["seed"] = opt.seed;
    m["results"] = results;
    m["pass"] = pass;
    std::ofstream f(fs::path(opt.out) / "manifest.json");
    f << m.dump(2) << '\n';
}

std::ofstream open_csv(const Options& opt, const std::string& name, const std::string& header) {
    fs::create_directories(opt.out);
    std::ofstream f(fs::path(opt.out) / name);
    f << header << '\n';
    return f;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const Config& cfg, const Options& opt) {
    const auto spec = model_from_config(cfg, "generate", {.name = "percolation", .d = 2,
                                                          .L = 16, .p = 0.7});
    const auto replicas = static_cast<std::size_t>(cfg.get_int("generate", "replicas", 1));
    fs::create_directories(opt.out);
    ordered_json results = ordered_json::array();
    for (std::size_t r = 0; r < replicas; ++r) {
        const auto env = make_env(spec, opt.seed, r);
        const std::string name = spec.name + "_" + std::to_string(r) + ".env";
        serialize_to_file(env, (fs::path(opt.out) / name).string());
        ordered_json row;
        row["name"] = name;
        row["env_hash"] = env_hash(env);
        row["vertices"] = env.num_vertices();
        row["pass"] = true;
        results.push_back(row);
    }
    write_manifest(opt, cfg, results, true);
    return 0;
}

// ----------------------------------------------------------------- entropy

int cmd_entropy(const Config& cfg, const Options& opt) {
    const auto spec = model_from_config(cfg, "entropy", {.name = "torus", .d = 1, .L = 0,
                                                         .side = 12});
    const auto n_max = cfg.get_int("entropy", "n_max", 20);
    const auto replicas = static_cast<std::size_t>(cfg.get_int("entropy", "replicas", 1));
    std::vector<std::int64_t> default_ns;
    for (std::int64_t n = 1; n <= n_max; n *= 2) default_ns.push_back(n);
    const auto ns = cfg.get_list("entropy", "ns", default_ns);

    const auto profile = entropy_profile(spec, n_max, replicas, opt.seed, opt.threads);
    const auto theorem = check_theorem_entropy_profile(spec, ns, replicas, opt.seed,
                                                       opt.threads);
    std::vector<std::int64_t> ns_sorted = ns;
    std::sort(ns_sorted.begin(), ns_sorted.end());
    ns_sorted.erase(std::unique(ns_sorted.begin(), ns_sorted.end()), ns_sorted.end());

    auto csv = open_csv(opt, "entropy.csv", "n,H_n,H1n,increment,lhs,rhs,slack,stderr,replicas");
    for (std::int64_t n = 0; n <= n_max; ++n) {
        csv << n << ',' << g17(profile.H[n].mean) << ','
            << (n >= 1 ? g17(profile.H1n[n].mean) : "") << ','
            << (n >= 1 ? g17(profile.increment[n].mean) : "") << ',';
        const auto it = std::find(ns_sorted.begin(), ns_sorted.end(), n);
        if (it != ns_sorted.end()) {
            const auto& t = theorem[it - ns_sorted.begin()];
            csv << g17(t.lhs) << ',' << g17(t.rhs) << ',' << g17(t.slack) << ','
                << g17(t.slack_stderr);
        } else {
            csv << ",,," << g17(profile.H[n].stderr_);
        }
        csv << ',' << replicas << '\n';
    }

    ordered_json results = ordered_json::array();
    bool pass = true;
    for (std::size_t i = 0; i < ns_sorted.size(); ++i) {
        ordered_json row;
        row["name"] = "theorem_entropy_n" + std::to_string(ns_sorted[i]);
        row["lhs"] = theorem[i].lhs;
        row["rhs"] = theorem[i].rhs;
        row["slack"] = theorem[i].slack;
        row["stderr"] = theorem[i].slack_stderr;
        const bool ok = spec.deterministic()
                            ? theorem[i].slack >= -1e-10
                            : theorem[i].slack >= -2 * theorem[i].slack_stderr - 1e-10;
        row["pass"] = ok;
        pass = pass && ok;
        results.push_back(row);
    }
    write_manifest(opt, cfg, results, pass);
    return pass ? 0 : 1;
}

// --------------------------------------------------------------------- sdb

int cmd_sdb(const Config& cfg, const Options& opt) {
    const auto spec = model_from_config(cfg, "sdb", {.name = "lattice", .d = 2, .L = 32});
    const auto n_max = cfg.get_int("sdb", "n_max", 30);
    const auto replicas = static_cast<std::size_t>(cfg.get_int("sdb", "replicas", 1));

    const auto rows = displacement_profile(spec, n_max, replicas, opt.seed, opt.threads);
    auto csv = open_csv(opt, "sdb.csv", "n,mean_d2,stderr,replicas");
    for (const auto& row : rows)
        csv << row.n << ',' << g17(row.mean_d2) << ',' << g17(row.stderr_) << ',' << replicas
            << '\n';

    std::vector<double> xs, ys;
    for (const auto& row : rows)
        if (row.n >= std::max<std::int64_t>(2, n_max / 4) && row.mean_d2 > 0) {
            xs.push_back(std::log(static_cast<double>(row.n)));
            ys.push_back(std::log(row.mean_d2));
        }
    ordered_json results = ordered_json::array();
    ordered_json row;
    row["name"] = "sdb_loglog_slope";
    row["value"] = xs.size() >= 2 ? ols_fit(xs, ys).slope : 0.0;
    row["pass"] = true;
    results.push_back(row);
    write_manifest(opt, cfg, results, true);
    return 0;
}

// --------------------------------------------------------------- heatkernel

int cmd_heatkernel(const Config& cfg, const Options& opt) {
    const auto spec = model_from_config(cfg, "heatkernel", {.name = "percolation", .d = 2,
                                                            .L = 32, .p = 0.7});
    const auto n_min = cfg.get_int("heatkernel", "n_min", 8);
    const auto n_max = cfg.get_int("heatkernel", "n_max", 64);
    const auto replicas = static_cast<std::size_t>(cfg.get_int("heatkernel", "replicas", 4));
    const auto disp64 = cfg.get_list("heatkernel", "displacements", {0, 1, 2, 4, 8});
    std::vector<int> displacements(disp64.begin(), disp64.end());
    std::vector<std::int64_t> ns;
    for (std::int64_t n = n_min + (n_min % 2); n <= n_max; n *= 2) ns.push_back(n);

    const auto fit = fit_gaussian(spec, n_min, n_max, replicas, opt.seed, opt.threads);
    const auto grad = annealed_gradient_estimate(spec, ns, displacements, replicas, opt.seed,
                                                 opt.threads);

    const double c4 = -grad.profile.slope;
    const double c3 = std::exp(grad.profile.intercept);
    auto csv = open_csv(opt, "heatkernel.csv", "n,dist,estimate,stderr,C3,C4,exponent");
    for (const auto& row : grad.rows)
        csv << row.n << ',' << row.displacement << ',' << g17(row.mean) << ','
            << g17(row.stderr_) << ',' << g17(c3) << ',' << g17(c4) << ','
            << g17(grad.exponent_sup) << '\n';
    for (const auto& row : grad.sup_rows)  // dist=-1: sup over y
        csv << row.n << ',' << row.displacement << ',' << g17(row.mean) << ','
            << g17(row.stderr_) << ',' << g17(c3) << ',' << g17(c4) << ','
            << g17(grad.exponent_sup) << '\n';

    auto diag = open_csv(opt, "gaussian.csv", "n,q_diag,slope,intercept,r2");
    for (std::size_t i = 0; i < fit.ns.size(); ++i)
        diag << fit.ns[i] << ',' << g17(fit.q_diag[i]) << ',' << g17(fit.diagonal.slope) << ','
             << g17(fit.diagonal.intercept) << ',' << g17(fit.diagonal.r2) << '\n';

    ordered_json results = ordered_json::array();
    const double half_d = 0.5 * spec.d;
    {
        ordered_json row;
        row["name"] = "diagonal_slope";
        row["value"] = fit.diagonal.slope;
        row["band"] = {-half_d - 0.15, -half_d + 0.15};
        row["pass"] = fit.diagonal.slope >= -half_d - 0.15 && fit.diagonal.slope <= -half_d + 0.15;
        results.push_back(row);
    }
    {
        ordered_json row;
        row["name"] = "gradient_exponent";
        row["value"] = grad.exponent_sup;
        row["value_at_zero"] = grad.exponent_at_zero;
        row["all_zero_at_zero"] = grad.all_zero_at_zero;
        if (spec.name == "percolation") {
            const double target = -(spec.d + 1.0);
            row["band"] = {target - 0.3, target + 0.3};
            row["pass"] = grad.exponent_sup >= target - 0.3 && grad.exponent_sup <= target + 0.3;
        } else {
            row["pass"] = true;
        }
        results.push_back(row);
    }
    bool pass = true;
    for (const auto& row : results) pass = pass && row["pass"].get<bool>();
    write_manifest(opt, cfg, results, pass);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------- corrector

int cmd_corrector(const Config& cfg, const Options& opt) {
    const auto spec = model_from_config(cfg, "corrector", {.name = "percolation", .d = 2,
                                                           .L = 64, .p = 0.7});
    const auto R = static_cast<int>(cfg.get_int("corrector", "R", 32));
    const auto replicas = static_cast<std::size_t>(cfg.get_int("corrector", "replicas", 4));
    const double tol = cfg.get_double("corrector", "tol", 1e-10);
    std::vector<double> v;
    for (auto x : cfg.get_list("corrector", "v", {1, 0})) v.push_back(static_cast<double>(x));

    struct Row {
        std::vector<int> radii;
        std::vector<double> sup_over_r;
    };
    auto rows = parallel_map<Row>(replicas, opt.threads, [&](std::size_t r) {
        const auto env = make_env(spec, opt.seed, r);
        std::vector<double> dir(env.meta.d, 0.0);
        for (std::size_t j = 0; j < dir.size() && j < v.size(); ++j) dir[j] = v[j];
        const auto res = estimate_corrector(env, dir, R, tol);
        return Row{res.radii, res.sup_over_r};
    });

    auto csv = open_csv(opt, "corrector.csv", "replica,r,sup_over_r");
    for (std::size_t r = 0; r < replicas; ++r)
        for (std::size_t i = 0; i < rows[r].radii.size(); ++i)
            csv << r << ',' << rows[r].radii[i] << ',' << g17(rows[r].sup_over_r[i]) << '\n';

    // Median profile across replicas.
    ordered_json results = ordered_json::array();
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    if (!rows.empty()) {
        for (std::size_t i = 0; i < rows[0].radii.size(); ++i) {
            std::vector<double> col;
            for (auto& row : rows)
                if (i < row.sup_over_r.size()) col.push_back(row.sup_over_r[i]);
            std::sort(col.begin(), col.end());
            const double med = col[col.size() / 2];
            csv << "median," << rows[0].radii[i] << ',' << g17(med) << '\n';
            if (med >= prev) decreasing = false;
            prev = med;
            ordered_json row;
            row["name"] = "median_sup_over_r_" + std::to_string(rows[0].radii[i]);
            row["value"] = med;
            row["pass"] = true;
            results.push_back(row);
        }
    }
    ordered_json row;
    row["name"] = "median_profile_decreasing";
    row["pass"] = decreasing;
    results.push_back(row);
    write_manifest(opt, cfg, results, decreasing);
    return decreasing ? 0 : 1;
}

// ---------------------------------------------------------------- dimension

int cmd_dimension(const Config& cfg, const Options& opt) {
    const auto spec = model_from_config(cfg, "dimension", {.name = "lattice", .d = 2, .L = 40});
    const auto n = static_cast<int>(cfg.get_int("dimension", "n", 8));
    const double eps = cfg.get_double("dimension", "eps", 0.25);
    const auto replicas = static_cast<std::size_t>(cfg.get_int("dimension", "replicas", 1));

    auto reports = parallel_map<GramProbeReport>(replicas, opt.threads, [&](std::size_t r) {
        const auto env = make_env(spec, opt.seed, r);
        const BallView big = ball(env, env.root, 4 * n);
        std::vector<std::vector<double>> candidates;
        candidates.emplace_back(env.num_vertices(), 1.0);
        for (int j = 0; j < env.meta.d; ++j) {
            std::vector<double> g(env.num_vertices(), 0.0);
            for (std::int32_t x = 0; x < env.num_vertices(); ++x)
                g[x] = env.coords_of(x)[j];
            candidates.push_back(dirichlet_solve(env, big, g).value);
        }
        return gram_dimension_probe(env, candidates, n, eps);
    });

    auto csv = open_csv(opt, "dimension.csv",
                        "replica,candidates,cover_size,rank_n,rank_4n,det_n,det_4n,ratio,verdict");
    ordered_json results = ordered_json::array();
    bool pass = true;
    for (std::size_t r = 0; r < replicas; ++r) {
        const auto& rep = reports[r];
        csv << r << ',' << rep.n_candidates << ',' << rep.cover_size << ',' << rep.rank_n << ','
            << rep.rank_4n << ',' << g17(rep.det_n) << ',' << g17(rep.det_4n) << ','
            << g17(rep.ratio) << ',' << rep.verdict << '\n';
        ordered_json row;
        row["name"] = "gram_rank_replica_" + std::to_string(r);
        row["rank_n"] = rep.rank_n;
        row["rank_4n"] = rep.rank_4n;
        row["verdict"] = rep.verdict;
        const bool ok = rep.rank_n == static_cast<int>(rep.n_candidates);
        row["pass"] = ok;
        pass = pass && ok;
        results.push_back(row);
    }
    write_manifest(opt, cfg, results, pass);
    return pass ? 0 : 1;
}

// -------------------------------------------------------------------- cover

int cmd_cover(const Config& cfg, const Options& opt) {
    const auto spec = model_from_config(cfg, "cover", {.name = "lattice", .d = 2, .L = 40});
    const auto R = static_cast<int>(cfg.get_int("cover", "R", 16));
    const auto r = static_cast<int>(cfg.get_int("cover", "r", 8));
    if (r < 1 || r > 2 * R) throw ConfigError("cover.r: must be in 1..2R");

    const auto env = make_env(spec, opt.seed, 0);
    const auto cover = proper_cover(env, env.root, R, r);
    const auto vd = volume_doubling(env, cover.centers, r);

    auto csv = open_csv(opt, "cover.csv", "center,R,r,size,overlap,covers,vd_max");
    csv << cover.center << ',' << R << ',' << r << ',' << cover.size() << ',' << cover.overlap
        << ',' << (cover.covers ? 1 : 0) << ',' << g17(vd.max_ratio) << '\n';

    const double cvd4 = std::pow(vd.max_ratio, 4.0);
    ordered_json results = ordered_json::array();
    ordered_json row;
    row["name"] = "proper_cover";
    row["size"] = cover.size();
    row["overlap"] = cover.overlap;
    row["covers"] = cover.covers;
    row["vd_max"] = vd.max_ratio;
    const bool ok = cover.covers && cover.overlap <= cvd4 + 1e-9;
    row["pass"] = ok;
    results.push_back(row);
    write_manifest(opt, cfg, results, ok);
    return ok ? 0 : 1;
}

// ------------------------------------------------------------------- verify

struct CheckRow {
    std::string name;
    double lhs = 0, rhs = 0, slack = 0;
    bool pass = false;
};

int cmd_verify(const Config& cfg, const Options& opt) {
    std::vector<CheckRow> rows;
    auto add = [&](const std::string& name, double lhs, double rhs, double slack, bool pass) {
        rows.push_back({name, lhs, rhs, slack, pass});
    };

    // Delta/TV and mean inequality on random laws.
    {
        CounterRng rng(derive_stream(opt.seed, "verify_laws", 0));
        double min_tv_slack = 1e300, min_mean_slack = 1e300, max_delta = 0;
        for (int i = 0; i < 2000; ++i) {
            const int atoms = 2 + static_cast<int>(rng.next_below(63));
            const auto mu = random_law(rng, atoms);
            const auto nu = random_law(rng, atoms);
            min_tv_slack = std::min(min_tv_slack, check_tv_delta(mu, nu).slack);
            std::vector<double> f(atoms);
            for (auto& x : f) x = 2 * rng.next_double() - 1;
            min_mean_slack = std::min(min_mean_slack, check_mean_inequality(mu, nu, f).slack);
            max_delta = std::max(max_delta, delta(mu, nu));
        }
        add("tv_delta_random", 0, min_tv_slack, min_tv_slack, min_tv_slack >= -1e-12);
        add("mean_inequality_random", 0, min_mean_slack, min_mean_slack,
            min_mean_slack >= -1e-12);
        add("delta_upper_bound", max_delta, std::sqrt(2.0), std::sqrt(2.0) - max_delta,
            max_delta <= std::sqrt(2.0) + 1e-12);
    }

    // Lemma XY on random joints; equality on independent tables.
    {
        CounterRng rng(derive_stream(opt.seed, "verify_xy", 0));
        double min_slack = 1e300, max_indep = 0;
        for (int i = 0; i < 2000; ++i) {
            const auto q = random_joint(rng, 2 + rng.next_below(7), 2 + rng.next_below(7));
            min_slack = std::min(min_slack, check_lemma_xy(q).slack);
        }
        for (int i = 0; i < 200; ++i) {
            const auto q = product_joint(rng, 2 + rng.next_below(7), 2 + rng.next_below(7));
            const auto c = check_lemma_xy(q);
            max_indep = std::max(max_indep, std::abs(c.lhs) + std::abs(c.rhs));
        }
        add("lemma_xy_random", 0, min_slack, min_slack, min_slack >= -1e-10);
        add("lemma_xy_independent", max_indep, 1e-12, 1e-12 - max_indep, max_indep <= 1e-12);
    }

    // Exact stationarity identities on the cycle.
    {
        const ModelSpec spec{.name = "torus", .d = 1, .L = 0, .side = 12};
        const auto profile = entropy_profile(spec, 12, 1, opt.seed);
        double max_id = 0, max_inc_rise = -1e300;
        for (int n = 1; n <= 12; ++n)
            max_id = std::max(max_id, std::abs(profile.H1n[n].mean - profile.H[n - 1].mean -
                                               profile.H[1].mean));
        for (int n = 2; n <= 12; ++n)
            max_inc_rise = std::max(max_inc_rise,
                                    profile.increment[n].mean - profile.increment[n - 1].mean);
        add("torus_H1n_identity", max_id, 1e-10, 1e-10 - max_id, max_id <= 1e-10);
        add("torus_increments_nonincreasing", max_inc_rise, 1e-10, 1e-10 - max_inc_rise,
            max_inc_rise <= 1e-10);
        const auto t = check_theorem_entropy_profile(spec, {1, 2, 4, 8, 12}, 1, opt.seed);
        double min_slack = 1e300;
        for (const auto& c : t) min_slack = std::min(min_slack, c.slack);
        add("torus_theorem_entropy", 0, min_slack, min_slack, min_slack >= -1e-10);
    }

    // Serialization round trip.
    {
        const ModelSpec spec{.name = "percolation", .d = 2, .L = 16, .p = 0.7};
        const auto env = make_env(spec, opt.seed, 0);
        std::stringstream ss;
        serialize(env, ss);
        const auto back = deserialize(ss);
        const bool same = env_hash(env) == env_hash(back);
        add("serialize_roundtrip", static_cast<double>(env_hash(env)),
            static_cast<double>(env_hash(back)), 0, same);
    }

    // Reverse Poincare on three weighted models.
    {
        const std::vector<ModelSpec> specs = {
            {.name = "lattice", .d = 2, .L = 24},
            {.name = "conductance", .d = 2, .L = 24, .alpha = 0.5},
            {.name = "percolation", .d = 2, .L = 24, .p = 0.7},
        };
        double max_ratio = 0;
        for (const auto& spec : specs) {
            const auto env = make_env(spec, opt.seed, 0);
            const int n = 8;
            const BallView big = ball(env, env.root, 2 * n);
            std::vector<double> g(env.num_vertices(), 0.0);
            for (std::int32_t x = 0; x < env.num_vertices(); ++x) {
                const auto c = env.coords_of(x);
                g[x] = c[0] + 0.3 * c[1];
            }
            const auto h = dirichlet_solve(env, big, g);
            max_ratio = std::max(max_ratio,
                                 check_reverse_poincare(env, h.value, env.root, n).ratio);
        }
        add("reverse_poincare", max_ratio, 1.0, 1.0 - max_ratio, max_ratio <= 1 + 1e-9);
    }

    // Gradient lemma on random triples.
    {
        CounterRng rng(derive_stream(opt.seed, "verify_zz", 0));
        const std::vector<ModelSpec> specs = {
            {.name = "lattice", .d = 2, .L = 16},
            {.name = "percolation", .d = 2, .L = 16, .p = 0.7},
        };
        double min_slack = 1e300;
        for (const auto& spec : specs) {
            const auto env = make_env(spec, opt.seed, 1);
            const auto b = ball(env, env.root, 6);
            for (int i = 0; i < 10; ++i) {
                const std::int32_t x = b.members[rng.next_below(b.members.size())];
                std::int32_t xp = x;
                for (std::int64_t k = env.row_ptr[x]; k < env.row_ptr[x + 1]; ++k)
                    if (env.col[k] != x) {
                        xp = env.col[k];
                        break;
                    }
                const std::int32_t y = b.members[rng.next_below(b.members.size())];
                const auto n = 1 + static_cast<std::int64_t>(rng.next_below(6));
                min_slack = std::min(min_slack, check_gradient_lemma(env, x, xp, y, n).slack);
            }
        }
        add("gradient_lemma_zz", 0, min_slack, min_slack, min_slack >= -1e-12);
    }

    // Gram rank on the full lattice.
    {
        const ModelSpec spec{.name = "lattice", .d = 2, .L = 40};
        const auto env = make_env(spec, opt.seed, 0);
        std::vector<std::vector<double>> cands;
        cands.emplace_back(env.num_vertices(), 1.0);
        for (int j = 0; j < 2; ++j) {
            std::vector<double> g(env.num_vertices());
            for (std::int32_t x = 0; x < env.num_vertices(); ++x) g[x] = env.coords_of(x)[j];
            cands.push_back(std::move(g));
        }
        const auto rep = gram_dimension_probe(env, cands, 8, 0.25);
        add("gram_rank_lattice", rep.rank_n, 3, rep.rank_n - 3.0, rep.rank_n == 3);
    }

    auto csv = open_csv(opt, "verify.csv", "check,lhs,rhs,slack,pass");
    ordered_json results = ordered_json::array();
    bool pass = true;
    for (const auto& row : rows) {
        csv << row.name << ',' << g17(row.lhs) << ',' << g17(row.rhs) << ',' << g17(row.slack)
            << ',' << (row.pass ? 1 : 0) << '\n';
        ordered_json j;
        j["name"] = row.name;
        j["lhs"] = row.lhs;
        j["rhs"] = row.rhs;
        j["slack"] = row.slack;
        j["pass"] = row.pass;
        results.push_back(j);
        pass = pass && row.pass;
        std::cout << (row.pass ? "PASS " : "FAIL ") << row.name << " slack=" << g17(row.slack)
                  << '\n';
    }
    write_manifest(opt, cfg, results, pass);
    return pass ? 0 : 1;
}

// ------------------------------------------------------------------- report

int cmd_report(const Options& opt) {
    std::vector<fs::path> manifests;
    if (!fs::exists(opt.out)) {
        std::cerr << "report: directory not found: " << opt.out << '\n';
        return 2;
    }
    for (const auto& entry : fs::recursive_directory_iterator(opt.out))
        if (entry.is_regular_file() && entry.path().filename() == "manifest.json")
            manifests.push_back(entry.path());
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) {
        std::cerr << "report: no manifest.json found under " << opt.out << '\n';
        return 2;
    }

    int flags = 0;
    bool all_pass = true;
    for (const auto& path : manifests) {
        std::ifstream f(path);
        ordered_json m;
        f >> m;
        const bool pass = m.value("pass", false);
        all_pass = all_pass && pass;
        std::cout << path.string() << "  pass=" << (pass ? "yes" : "no") << '\n';
        for (const auto& row : m.value("results", ordered_json::array())) {
            const std::string name = row.value("name", "?");
            std::cout << "  " << name;
            if (row.contains("value")) std::cout << "  value=" << row["value"].dump();
            if (row.contains("slack")) std::cout << "  slack=" << row["slack"].dump();
            if (row.contains("band") && row.contains("value")) {
                const double v = row["value"].get<double>();
                const double lo = row["band"][0].get<double>();
                const double hi = row["band"][1].get<double>();
                if (v < lo || v > hi) {
                    std::cout << "  FLAGGED (band " << lo << ".." << hi << ")";
                    ++flags;
                }
            }
            if (row.contains("pass") && !row["pass"].get<bool>()) {
                std::cout << "  FAIL";
            }
            std::cout << '\n';
        }
    }
    std::cout << "manifests=" << manifests.size() << " flags=" << flags << '\n';
    return (all_pass && flags == 0) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for walks, entropy, and harmonic fields on random "
                 "environments"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_path, "key=value config file with [sections]");
    app.add_option("--seed", opt.seed, "master seed");
    app.add_option("--threads", opt.threads, "worker thread count");
    app.add_option("--out", opt.out, "output directory");

    const std::vector<std::string> names = {"generate", "entropy",   "sdb",
                                            "heatkernel", "corrector", "dimension",
                                            "cover",    "verify",    "report"};
    for (const auto& name : names) app.add_subcommand(name);
    CLI11_PARSE(app, argc, argv);

    const auto t0 = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        const Config cfg = Config::load(opt.config_path);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "generate") rc = cmd_generate(cfg, opt);
        else if (sub == "entropy") rc = cmd_entropy(cfg, opt);
        else if (sub == "sdb") rc = cmd_sdb(cfg, opt);
        else if (sub == "heatkernel") rc = cmd_heatkernel(cfg, opt);
        else if (sub == "corrector") rc = cmd_corrector(cfg, opt);
        else if (sub == "dimension") rc = cmd_dimension(cfg, opt);
        else if (sub == "cover") rc = cmd_cover(cfg, opt);
        else if (sub == "verify") rc = cmd_verify(cfg, opt);
        else if (sub == "report") rc = cmd_report(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::cerr << "wall_time_ms=" << ms << '\n';
    return rc;
}
