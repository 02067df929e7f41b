#include "rwre/environment.hpp"

#include "rwre/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <unordered_set>

namespace rwre {

int RootedEnvironment::max_degree() const {
    std::int64_t m = 0;
    for (std::int32_t v = 0; v < num_vertices(); ++v) m = std::max(m, out_degree(v));
    return static_cast<int>(m);
}

std::int64_t RootedEnvironment::horizon_budget() const {
    if (meta.torus || meta.L <= 0 || !embedded()) return std::int64_t{1} << 62;
    std::int64_t q = meta.L / 4;
    return q * q;
}

void RootedEnvironment::check_horizon(std::int64_t n) const {
    if (n > horizon_budget())
        throw BudgetError("horizon " + std::to_string(n) + " exceeds boundary budget " +
                          std::to_string(horizon_budget()) + " for model " + meta.model);
}

void RootedEnvironment::validate() const {
    const std::int32_t n = num_vertices();
    if (n <= 0) throw ValidationError("environment has no vertices");
    if (root < 0 || root >= n) throw ValidationError("root out of range");

    for (std::int32_t v = 0; v < n; ++v) {
        double s = 0;
        for (std::int64_t k = row_ptr[v]; k < row_ptr[v + 1]; ++k) {
            if (col[k] < 0 || col[k] >= n) throw ValidationError("kernel column out of range");
            if (prob[k] < 0.0 || prob[k] > 1.0)
                throw ValidationError("transition probability outside [0,1]");
            s += prob[k];
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw ValidationError("row " + std::to_string(v) + " sums to " + std::to_string(s));
    }

    if (reversible()) {
        if (edge_weight.size() != col.size() || vertex_weight.size() != static_cast<std::size_t>(n))
            throw ValidationError("weight arrays inconsistent with kernel");
        for (std::int32_t v = 0; v < n; ++v) {
            double nu = 0;
            for (std::int64_t k = row_ptr[v]; k < row_ptr[v + 1]; ++k) {
                if (edge_weight[k] < 0) throw ValidationError("negative edge weight");
                nu += edge_weight[k];
            }
            if (std::abs(nu - vertex_weight[v]) > 1e-12 * std::max(1.0, nu))
                throw ValidationError("nu(x) does not match edge weight sum at " + std::to_string(v));
            for (std::int64_t k = row_ptr[v]; k < row_ptr[v + 1]; ++k) {
                if (std::abs(prob[k] - edge_weight[k] / nu) > 1e-12)
                    throw ValidationError("P(x,y) != nu(x,y)/nu(x) at vertex " + std::to_string(v));
            }
        }
        // weight symmetry
        for (std::int32_t v = 0; v < n; ++v) {
            for (std::int64_t k = row_ptr[v]; k < row_ptr[v + 1]; ++k) {
                std::int32_t w = col[k];
                bool found = false;
                for (std::int64_t j = row_ptr[w]; j < row_ptr[w + 1]; ++j) {
                    if (col[j] == v) {
                        if (std::abs(edge_weight[j] - edge_weight[k]) > 1e-12 * std::max(1.0, edge_weight[k]))
                            throw ValidationError("edge weight not symmetric");
                        found = true;
                        break;
                    }
                }
                if (!found && edge_weight[k] > 0)
                    throw ValidationError("missing reverse edge for weighted arc");
            }
        }
    }

    // connectivity under "P(x,y)>0 or P(y,x)>0"
    {
        std::vector<std::vector<std::int32_t>> sym(n);
        for (std::int32_t v = 0; v < n; ++v)
            for (std::int64_t k = row_ptr[v]; k < row_ptr[v + 1]; ++k)
                if (prob[k] > 0 && col[k] != v) {
                    sym[v].push_back(col[k]);
                    sym[col[k]].push_back(v);
                }
        std::vector<char> seen(n, 0);
        std::deque<std::int32_t> q{root};
        seen[root] = 1;
        std::int64_t cnt = 1;
        while (!q.empty()) {
            auto v = q.front();
            q.pop_front();
            for (auto w : sym[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++cnt;
                    q.push_back(w);
                }
        }
        if (cnt != n) throw ValidationError("vertex set not connected from root");
    }

    if (embedded()) {
        if (coord.size() != static_cast<std::size_t>(n) * meta.d)
            throw ValidationError("coordinate array size mismatch");
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(n * 2);
        for (std::int32_t v = 0; v < n; ++v) {
            std::uint64_t h = 0xCBF29CE484222325ULL;
            for (auto c : coords_of(v)) h = fnv1a_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(c)), h);
            if (!seen.insert(h).second) {
                // hash collision or true duplicate; confirm by scan
                for (std::int32_t w = 0; w < v; ++w) {
                    if (std::equal(coords_of(v).begin(), coords_of(v).end(), coords_of(w).begin()))
                        throw ValidationError("duplicate coordinates at vertices " +
                                              std::to_string(w) + "," + std::to_string(v));
                }
            }
        }
    }
}

bool BallView::contains(std::int32_t v) const {
    return std::binary_search(members.begin(), members.end(), v);
}

int BallView::dist_of(std::int32_t v) const {
    auto it = std::lower_bound(members.begin(), members.end(), v);
    if (it == members.end() || *it != v) return -1;
    return dist[static_cast<std::size_t>(it - members.begin())];
}

static std::vector<int> bfs_impl(const RootedEnvironment& env, std::int32_t x, int cap) {
    const std::int32_t n = env.num_vertices();
    std::vector<int> d(n, -1);
    std::deque<std::int32_t> q{x};
    d[x] = 0;
    const bool rev = env.reversible();
    // symmetric adjacency for the reversible case; directed arcs otherwise
    std::vector<std::vector<std::int32_t>> back;
    if (rev) {
        back.resize(n);
        for (std::int32_t v = 0; v < n; ++v)
            for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k)
                if (env.prob[k] > 0) back[env.col[k]].push_back(v);
    }
    while (!q.empty()) {
        auto v = q.front();
        q.pop_front();
        if (cap >= 0 && d[v] >= cap) continue;
        for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k) {
            auto w = env.col[k];
            if (env.prob[k] > 0 && d[w] < 0) {
                d[w] = d[v] + 1;
                q.push_back(w);
            }
        }
        if (rev)
            for (auto w : back[v])
                if (d[w] < 0) {
                    d[w] = d[v] + 1;
                    q.push_back(w);
                }
    }
    return d;
}

std::vector<int> bfs_distances(const RootedEnvironment& env, std::int32_t x) {
    return bfs_impl(env, x, -1);
}

BallView ball(const RootedEnvironment& env, std::int32_t x, int r) {
    auto d = bfs_impl(env, x, r);
    BallView b;
    b.center = x;
    b.radius = r;
    for (std::int32_t v = 0; v < env.num_vertices(); ++v)
        if (d[v] >= 0 && d[v] <= r) b.members.push_back(v);
    b.dist.reserve(b.members.size());
    for (auto v : b.members) {
        b.dist.push_back(d[v]);
        if (d[v] == r)
            b.boundary.push_back(v);
        else
            b.inner.push_back(v);
    }
    return b;
}

void kernel_from_weights(RootedEnvironment& env) {
    const std::int32_t n = env.num_vertices();
    env.vertex_weight.assign(n, 0.0);
    env.prob.assign(env.col.size(), 0.0);
    for (std::int32_t v = 0; v < n; ++v) {
        double nu = 0;
        for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k) nu += env.edge_weight[k];
        env.vertex_weight[v] = nu;
        for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k)
            env.prob[k] = env.edge_weight[k] / nu;
    }
}

std::uint64_t env_hash(const RootedEnvironment& env) {
    std::uint64_t h = fnv1a(env.meta.model);
    h = fnv1a_u64(static_cast<std::uint64_t>(env.root), h);
    auto mix_doubles = [&h](const std::vector<double>& v) {
        for (double x : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, 8);
            h = fnv1a_u64(bits, h);
        }
    };
    for (auto x : env.row_ptr) h = fnv1a_u64(static_cast<std::uint64_t>(x), h);
    for (auto x : env.col) h = fnv1a_u64(static_cast<std::uint64_t>(x), h);
    mix_doubles(env.prob);
    mix_doubles(env.edge_weight);
    for (auto c : env.coord) h = fnv1a_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(c)), h);
    return h;
}

} // namespace rwre
