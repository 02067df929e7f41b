#include "rwre/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rwre {

namespace {

inline double phi(double t) { return t > 0 ? -t * std::log(t) : 0.0; }

inline double delta_term(double a, double b) {
    const double s = a + b;
    if (s <= 0) return 0.0;
    const double d = a - b;
    return d * d / s;
}

} // namespace

std::vector<double> JointTable::marginal_x() const {
    std::vector<double> p(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) p[x] += at(x, y);
    return p;
}

std::vector<double> JointTable::marginal_y() const {
    std::vector<double> p(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) p[y] += at(x, y);
    return p;
}

double JointTable::total() const { return std::accumulate(q.begin(), q.end(), 0.0); }

double entropy(const DistributionVector& mu) {
    double h = 0;
    for (double m : mu.mass) h += phi(m);
    return h;
}

double entropy(const std::vector<double>& mass) {
    double h = 0;
    for (double m : mass) h += phi(m);
    return h;
}

double entropy(const JointTable& q) { return entropy(q.q); }

double delta(const DistributionVector& mu, const DistributionVector& nu) {
    double s = 0;
    std::size_t i = 0, j = 0;
    while (i < mu.idx.size() || j < nu.idx.size()) {
        if (j >= nu.idx.size() || (i < mu.idx.size() && mu.idx[i] < nu.idx[j])) {
            s += mu.mass[i];  // delta_term(m, 0) = m
            ++i;
        } else if (i >= mu.idx.size() || nu.idx[j] < mu.idx[i]) {
            s += nu.mass[j];
            ++j;
        } else {
            s += delta_term(mu.mass[i], nu.mass[j]);
            ++i;
            ++j;
        }
    }
    return std::sqrt(s);
}

double delta(const std::vector<double>& mu, const std::vector<double>& nu) {
    double s = 0;
    const std::size_t n = std::max(mu.size(), nu.size());
    for (std::size_t i = 0; i < n; ++i)
        s += delta_term(i < mu.size() ? mu[i] : 0.0, i < nu.size() ? nu[i] : 0.0);
    return std::sqrt(s);
}

TvDeltaCheck check_tv_delta(const DistributionVector& mu, const DistributionVector& nu) {
    const double tv = tv_distance(mu, nu);
    const double d = delta(mu, nu);
    return {tv, d, std::sqrt(2.0) * d - tv};
}

MeanCheck check_mean_inequality(const DistributionVector& mu, const DistributionVector& nu,
                                const std::vector<double>& f) {
    double mf = 0, nf = 0, mf2 = 0, nf2 = 0;
    for (std::size_t i = 0; i < mu.idx.size(); ++i) {
        const double v = f[mu.idx[i]];
        mf += mu.mass[i] * v;
        mf2 += mu.mass[i] * v * v;
    }
    for (std::size_t j = 0; j < nu.idx.size(); ++j) {
        const double v = f[nu.idx[j]];
        nf += nu.mass[j] * v;
        nf2 += nu.mass[j] * v * v;
    }
    const double lhs = std::abs(mf - nf);
    const double rhs = delta(mu, nu) * std::sqrt(mf2 + nf2);
    return {lhs, rhs, rhs - lhs};
}

double delta_n(const RootedEnvironment& env, std::int32_t x, std::int32_t y, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("delta_n requires n >= 1");
    const auto mu = propagate(env, DistributionVector::point(x), n);
    const auto nu = propagate(env, DistributionVector::point(y), n - 1);
    return delta(mu, nu);
}

LemmaXyCheck check_lemma_xy(const JointTable& q) {
    const auto px = q.marginal_x();
    const auto py = q.marginal_y();
    double lhs = 0;
    std::vector<double> cond(q.nx);
    for (std::size_t y = 0; y < q.ny; ++y) {
        if (py[y] <= 0) continue;
        for (std::size_t x = 0; x < q.nx; ++x) cond[x] = q.at(x, y) / py[y];
        const double d = delta(px, cond);
        lhs += py[y] * d * d;
    }
    const double rhs = 2.0 * (entropy(px) + entropy(py) - entropy(q));
    return {lhs, rhs, rhs - lhs};
}

namespace {

// Entropies of P^t(delta_v) for t = 0..n_max, via one incremental sweep.
std::vector<double> entropy_trace(const RootedEnvironment& env, std::int32_t v,
                                  std::int64_t n_max) {
    env.check_horizon(n_max);
    Propagator prop(env, DistributionVector::point(v));
    std::vector<double> h(n_max + 1);
    h[0] = 0.0;
    for (std::int64_t t = 1; t <= n_max; ++t) {
        prop.step();
        h[t] = prop.entropy();
    }
    return h;
}

struct EnvEntropy {
    double weight = 1.0;
    std::vector<double> H, H1n;
};

EnvEntropy env_entropy_profile(const RootedEnvironment& env, std::int64_t n_max) {
    EnvEntropy r;
    r.weight = env.stationary_weight();
    r.H = entropy_trace(env, env.root, n_max);

    const std::int32_t rho = env.root;
    double h1 = 0;
    for (std::int64_t k = env.row_ptr[rho]; k < env.row_ptr[rho + 1]; ++k)
        h1 += -env.prob[k] * std::log(env.prob[k]);
    r.H1n.assign(n_max + 1, 0.0);
    for (std::int64_t k = env.row_ptr[rho]; k < env.row_ptr[rho + 1]; ++k) {
        const auto hy = entropy_trace(env, env.col[k], n_max - 1);
        for (std::int64_t n = 1; n <= n_max; ++n) r.H1n[n] += env.prob[k] * hy[n - 1];
    }
    for (std::int64_t n = 1; n <= n_max; ++n) r.H1n[n] += h1;
    return r;
}

} // namespace

EntropyProfile entropy_profile(const ModelSpec& spec, std::int64_t n_max, std::size_t replicas,
                               std::uint64_t master_seed, int threads) {
    EntropyProfile out;
    out.n_max = n_max;
    out.replicas = replicas;

    auto per_env = parallel_map<EnvEntropy>(replicas, threads, [&](std::size_t r) {
        return env_entropy_profile(make_env(spec, master_seed, r), n_max);
    });
    for (auto& e : per_env) {
        out.weight.push_back(e.weight);
        out.H_env.push_back(std::move(e.H));
        out.H1n_env.push_back(std::move(e.H1n));
    }

    out.H.resize(n_max + 1);
    out.H1n.resize(n_max + 1);
    out.increment.resize(n_max + 1);
    std::vector<double> col(replicas);
    for (std::int64_t n = 0; n <= n_max; ++n) {
        for (std::size_t r = 0; r < replicas; ++r) col[r] = out.H_env[r][n];
        out.H[n] = weighted_stat(col, out.weight);
        for (std::size_t r = 0; r < replicas; ++r) col[r] = out.H1n_env[r][n];
        out.H1n[n] = weighted_stat(col, out.weight);
        if (n >= 1) {
            for (std::size_t r = 0; r < replicas; ++r)
                col[r] = out.H_env[r][n] - out.H_env[r][n - 1];
            out.increment[n] = weighted_stat(col, out.weight);
        }
    }
    return out;
}

TheoremEntropyCheck check_theorem_entropy(const ModelSpec& spec, std::int64_t n,
                                          std::size_t replicas, std::uint64_t master_seed,
                                          int threads) {
    if (n < 1) throw std::invalid_argument("check_theorem_entropy requires n >= 1");

    struct Row {
        double weight, lhs, rhs;
    };
    auto rows = parallel_map<Row>(replicas, threads, [&](std::size_t r) {
        const auto env = make_env(spec, master_seed, r);
        env.check_horizon(n);
        Propagator prop(env, DistributionVector::point(env.root));
        for (std::int64_t t = 0; t < n - 1; ++t) prop.step();
        const double h_prev = prop.entropy();
        prop.step();
        const double h_n = prop.entropy();
        const DistributionVector& mu_n = prop.current();

        double lhs = 0;
        const std::int32_t rho = env.root;
        for (std::int64_t k = env.row_ptr[rho]; k < env.row_ptr[rho + 1]; ++k) {
            const auto nu = propagate(env, DistributionVector::point(env.col[k]), n - 1);
            const double d = delta(mu_n, nu);
            lhs += env.prob[k] * d * d;
        }
        return Row{env.stationary_weight(), lhs, 2.0 * (h_n - h_prev)};
    });

    std::vector<double> w, lhs, rhs, slack;
    for (auto& row : rows) {
        w.push_back(row.weight);
        lhs.push_back(row.lhs);
        rhs.push_back(row.rhs);
        slack.push_back(row.rhs - row.lhs);
    }
    const auto sl = weighted_stat(lhs, w);
    const auto sr = weighted_stat(rhs, w);
    const auto ss = weighted_stat(slack, w);
    return {sl.mean, sr.mean, ss.mean, sl.stderr_, sr.stderr_, ss.stderr_, replicas};
}

std::vector<TheoremEntropyCheck> check_theorem_entropy_profile(
    const ModelSpec& spec, const std::vector<std::int64_t>& ns, std::size_t replicas,
    std::uint64_t master_seed, int threads) {
    std::vector<std::int64_t> sorted = ns;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (!sorted.empty() && sorted.front() < 1)
        throw std::invalid_argument("check_theorem_entropy_profile requires n >= 1");

    struct Row {
        double weight;
        std::vector<double> lhs, rhs;  // aligned with sorted ns
    };
    auto rows = parallel_map<Row>(replicas, threads, [&](std::size_t r) {
        const auto env = make_env(spec, master_seed, r);
        if (!sorted.empty()) env.check_horizon(sorted.back());
        const std::int32_t rho = env.root;
        Propagator from_root(env, DistributionVector::point(rho));
        std::vector<Propagator> from_nbr;
        std::vector<double> nbr_prob;
        for (std::int64_t k = env.row_ptr[rho]; k < env.row_ptr[rho + 1]; ++k) {
            from_nbr.emplace_back(env, DistributionVector::point(env.col[k]));
            nbr_prob.push_back(env.prob[k]);
        }
        Row row{env.stationary_weight(), {}, {}};
        for (std::int64_t n : sorted) {
            while (from_root.time() < n - 1) from_root.step();
            const double h_prev = from_root.entropy();
            from_root.step();
            const double h_n = from_root.entropy();
            for (auto& p : from_nbr)
                while (p.time() < n - 1) p.step();
            double lhs = 0;
            for (std::size_t j = 0; j < from_nbr.size(); ++j) {
                const double d = delta(from_root.current(), from_nbr[j].current());
                lhs += nbr_prob[j] * d * d;
            }
            row.lhs.push_back(lhs);
            row.rhs.push_back(2.0 * (h_n - h_prev));
        }
        return row;
    });

    std::vector<TheoremEntropyCheck> out;
    std::vector<double> w, lhs(replicas), rhs(replicas), slack(replicas);
    for (auto& row : rows) w.push_back(row.weight);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t r = 0; r < replicas; ++r) {
            lhs[r] = rows[r].lhs[i];
            rhs[r] = rows[r].rhs[i];
            slack[r] = rhs[r] - lhs[r];
        }
        const auto sl = weighted_stat(lhs, w);
        const auto sr = weighted_stat(rhs, w);
        const auto ss = weighted_stat(slack, w);
        out.push_back({sl.mean, sr.mean, ss.mean, sl.stderr_, sr.stderr_, ss.stderr_, replicas});
    }
    return out;
}

std::vector<LiouvilleProbeRow> sublinear_liouville_probe(const RootedEnvironment& env,
                                                         const std::vector<double>& h,
                                                         const std::vector<std::int64_t>& ns) {
    std::vector<std::int64_t> sorted = ns;
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty() && sorted.front() < 1)
        throw std::invalid_argument("probe times must be >= 1");
    if (!sorted.empty()) env.check_horizon(sorted.back());

    const std::int32_t rho = env.root;
    double lhs = 0;
    for (std::int64_t k = env.row_ptr[rho]; k < env.row_ptr[rho + 1]; ++k)
        lhs += env.prob[k] * std::abs(h[rho] - h[env.col[k]]);

    Propagator from_root(env, DistributionVector::point(rho));
    std::vector<Propagator> from_nbr;
    std::vector<double> nbr_prob;
    for (std::int64_t k = env.row_ptr[rho]; k < env.row_ptr[rho + 1]; ++k) {
        from_nbr.emplace_back(env, DistributionVector::point(env.col[k]));
        nbr_prob.push_back(env.prob[k]);
    }

    std::vector<double> h2(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) h2[i] = h[i] * h[i];

    std::vector<LiouvilleProbeRow> out;
    for (std::int64_t n : sorted) {
        while (from_root.time() < n) from_root.step();
        for (auto& p : from_nbr)
            while (p.time() < n - 1) p.step();
        double e_delta2 = 0;
        for (std::size_t j = 0; j < from_nbr.size(); ++j) {
            const double d = delta(from_root.current(), from_nbr[j].current());
            e_delta2 += nbr_prob[j] * d * d;
        }
        const double eh2 = from_root.mean(h2);
        const double rhs = std::sqrt(2.0 * e_delta2 * eh2);
        out.push_back({n, lhs, rhs, rhs > 0 ? lhs / rhs : 0.0});
    }
    return out;
}

} // namespace rwre
