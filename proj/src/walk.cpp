#include "rwre/walk.hpp"

#include "rwre/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace rwre {

double DistributionVector::total() const {
    double s = 0;
    for (double m : mass) s += m;
    return s;
}

double DistributionVector::at(std::int32_t v) const {
    auto it = std::lower_bound(idx.begin(), idx.end(), v);
    if (it == idx.end() || *it != v) return 0.0;
    return mass[static_cast<std::size_t>(it - idx.begin())];
}

Propagator::Propagator(const RootedEnvironment& env, DistributionVector mu)
    : env_(env), mu_(std::move(mu)), scratch_(env.num_vertices(), 0.0) {
    for (auto v : mu_.idx)
        if (v < 0 || v >= env.num_vertices())
            throw ValidationError("distribution support outside environment");
}

void Propagator::step() {
    touched_.clear();
    for (std::size_t i = 0; i < mu_.idx.size(); ++i) {
        const std::int32_t x = mu_.idx[i];
        const double m = mu_.mass[i];
        for (std::int64_t k = env_.row_ptr[x]; k < env_.row_ptr[x + 1]; ++k) {
            const std::int32_t y = env_.col[k];
            if (scratch_[y] == 0.0) touched_.push_back(y);
            scratch_[y] += m * env_.prob[k];
        }
    }
    std::sort(touched_.begin(), touched_.end());
    mu_.idx.clear();
    mu_.mass.clear();
    for (auto y : touched_) {
        const double m = scratch_[y];
        scratch_[y] = 0.0;
        if (m < DistributionVector::kDropThreshold) {
            mu_.dropped += m;
            continue;
        }
        mu_.idx.push_back(y);
        mu_.mass.push_back(m);
    }
    ++t_;
}

double Propagator::mean(const std::vector<double>& f) const {
    double s = 0;
    for (std::size_t i = 0; i < mu_.idx.size(); ++i) s += mu_.mass[i] * f[mu_.idx[i]];
    return s;
}

double Propagator::entropy() const {
    double h = 0;
    for (double m : mu_.mass)
        if (m > 0) h -= m * std::log(m);
    return h;
}

DistributionVector propagate(const RootedEnvironment& env, const DistributionVector& mu,
                             std::int64_t steps) {
    env.check_horizon(steps);
    Propagator p(env, mu);
    for (std::int64_t t = 0; t < steps; ++t) p.step();
    return p.current();
}

double heat_kernel(const RootedEnvironment& env, std::int32_t x, std::int32_t y, std::int64_t n) {
    return propagate(env, DistributionVector::point(x), n).at(y);
}

WalkSample sample_path(const RootedEnvironment& env, std::int32_t start, std::int64_t n,
                       std::uint64_t stream) {
    CounterRng rng(stream);
    WalkSample s;
    s.stream = stream;
    s.path.reserve(n + 1);
    std::int32_t x = start;
    s.path.push_back(x);
    for (std::int64_t t = 0; t < n; ++t) {
        const double u = rng.next_double();
        double acc = 0;
        std::int32_t next = env.col[env.row_ptr[x + 1] - 1];  // guard against rounding
        for (std::int64_t k = env.row_ptr[x]; k < env.row_ptr[x + 1]; ++k) {
            acc += env.prob[k];
            if (u < acc) {
                next = env.col[k];
                break;
            }
        }
        x = next;
        s.path.push_back(x);
    }
    return s;
}

std::vector<DisplacementRow> displacement_profile(const ModelSpec& spec, std::int64_t n_max,
                                                  std::size_t replicas,
                                                  std::uint64_t master_seed, int threads) {
    struct PerEnv {
        double weight = 1.0;
        std::vector<double> d2;  // E_rho[d(rho,X_n)^2], n = 0..n_max
    };
    auto per_env = parallel_map<PerEnv>(replicas, threads, [&](std::size_t r) {
        const auto env = make_env(spec, master_seed, r);
        env.check_horizon(n_max);
        // squared Euclidean displacement where coordinates exist (and are not
        // wrapped); graph distance on abstract models
        std::vector<double> dist2(env.num_vertices());
        if (env.embedded() && !env.meta.torus) {
            const auto o = env.coords_of(env.root);
            for (std::int32_t v = 0; v < env.num_vertices(); ++v) {
                const auto c = env.coords_of(v);
                double s = 0;
                for (int i = 0; i < env.meta.d; ++i) {
                    const double t = static_cast<double>(c[i]) - o[i];
                    s += t * t;
                }
                dist2[v] = s;
            }
        } else {
            const auto dist = bfs_distances(env, env.root);
            for (std::size_t i = 0; i < dist.size(); ++i)
                dist2[i] = static_cast<double>(dist[i]) * dist[i];
        }
        PerEnv pe;
        pe.weight = env.stationary_weight();
        pe.d2.resize(n_max + 1);
        Propagator prop(env, DistributionVector::point(env.root));
        pe.d2[0] = 0.0;
        for (std::int64_t n = 1; n <= n_max; ++n) {
            prop.step();
            pe.d2[n] = prop.mean(dist2);
        }
        return pe;
    });

    std::vector<double> w, col(replicas);
    for (auto& pe : per_env) w.push_back(pe.weight);
    std::vector<DisplacementRow> out;
    for (std::int64_t n = 0; n <= n_max; ++n) {
        for (std::size_t r = 0; r < replicas; ++r) col[r] = per_env[r].d2[n];
        const auto s = weighted_stat(col, w);
        out.push_back({n, s.mean, s.stderr_});
    }
    return out;
}

double tv_distance(const DistributionVector& mu, const DistributionVector& nu) {
    double tv = 0;
    std::size_t i = 0, j = 0;
    while (i < mu.idx.size() || j < nu.idx.size()) {
        if (j >= nu.idx.size() || (i < mu.idx.size() && mu.idx[i] < nu.idx[j])) {
            tv += mu.mass[i++];
        } else if (i >= mu.idx.size() || nu.idx[j] < mu.idx[i]) {
            tv += nu.mass[j++];
        } else {
            tv += std::abs(mu.mass[i] - nu.mass[j]);
            ++i;
            ++j;
        }
    }
    return tv;
}

void write_distribution(std::ostream& out, const RootedEnvironment& env,
                        const DistributionVector& mu, std::int64_t n) {
    out << "dist env_hash=" << env_hash(env) << " n=" << n << '\n';
    char buf[48];
    for (std::size_t i = 0; i < mu.idx.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "p %d %.17g\n", mu.idx[i], mu.mass[i]);
        out << buf;
    }
}

DistributionVector read_distribution(std::istream& in) {
    DistributionVector mu;
    std::string line;
    if (!std::getline(in, line) || line.rfind("dist ", 0) != 0)
        throw ParseError("missing 'dist' header");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        std::int32_t v;
        double m;
        if (!(ls >> tag >> v >> m) || tag != "p")
            throw ParseError("line " + std::to_string(line_no) + ": bad 'p' record");
        mu.idx.push_back(v);
        mu.mass.push_back(m);
    }
    return mu;
}

} // namespace rwre
