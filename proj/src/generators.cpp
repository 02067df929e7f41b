#include "rwre/generators.hpp"

#include "rwre/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace rwre {

namespace {

// assemble a reversible environment from per-vertex neighbor/weight lists
RootedEnvironment build_weighted(std::vector<std::vector<std::pair<std::int32_t, double>>> adj,
                                 std::vector<std::int32_t> coord, std::int32_t root, EnvMeta meta) {
    RootedEnvironment env;
    const std::int32_t n = static_cast<std::int32_t>(adj.size());
    env.row_ptr.assign(n + 1, 0);
    for (std::int32_t v = 0; v < n; ++v) {
        if (adj[v].empty()) adj[v].push_back({v, 1.0});  // isolated vertex holds in place
        std::sort(adj[v].begin(), adj[v].end());
        env.row_ptr[v + 1] = env.row_ptr[v] + static_cast<std::int64_t>(adj[v].size());
    }
    env.col.reserve(env.row_ptr[n]);
    env.edge_weight.reserve(env.row_ptr[n]);
    for (std::int32_t v = 0; v < n; ++v)
        for (auto& [w, wt] : adj[v]) {
            env.col.push_back(w);
            env.edge_weight.push_back(wt);
        }
    env.coord = std::move(coord);
    env.root = root;
    env.meta = std::move(meta);
    kernel_from_weights(env);
    return env;
}

struct Box {
    int d, L, side;
    bool torus;

    std::int64_t size() const {
        std::int64_t s = 1;
        for (int i = 0; i < d; ++i) s *= side;
        return s;
    }
    // id from coordinates; box coords are in [-L,L], torus coords in [0,side)
    std::int32_t id_of(const std::vector<int>& c) const {
        std::int64_t id = 0;
        for (int i = 0; i < d; ++i) id = id * side + (torus ? c[i] : c[i] + L);
        return static_cast<std::int32_t>(id);
    }
    std::vector<int> coords_of(std::int32_t id) const {
        std::vector<int> c(d);
        for (int i = d - 1; i >= 0; --i) {
            int r = static_cast<int>(id % side);
            c[i] = torus ? r : r - L;
            id /= side;
        }
        return c;
    }
};

struct UnionFind {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> rank;
    explicit UnionFind(std::int32_t n) : parent(n), rank(n, 0) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::int32_t find(std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank[a] < rank[b]) std::swap(a, b);
        parent[b] = a;
        if (rank[a] == rank[b]) ++rank[a];
    }
};

// enumerate box edges in a fixed order: vertex id ascending, axis ascending
template <class F>
void for_each_box_edge(const Box& box, F&& f) {
    const std::int64_t n = box.size();
    for (std::int32_t v = 0; v < n; ++v) {
        auto c = box.coords_of(v);
        for (int i = 0; i < box.d; ++i) {
            auto cw = c;
            if (box.torus) {
                cw[i] = (c[i] + 1) % box.side;
                if (box.side == 2 && cw[i] == c[i]) continue;  // degenerate
                f(v, box.id_of(cw), i);
            } else {
                if (c[i] + 1 > box.L) continue;
                cw[i] = c[i] + 1;
                f(v, box.id_of(cw), i);
            }
        }
    }
}

std::vector<std::int32_t> flat_coords(const Box& box) {
    std::vector<std::int32_t> out;
    out.reserve(box.size() * box.d);
    for (std::int32_t v = 0; v < box.size(); ++v)
        for (int x : box.coords_of(v)) out.push_back(x);
    return out;
}

} // namespace

RootedEnvironment gen_lattice(int d, int L, bool torus, int side) {
    if (d < 1) throw ValidationError("gen_lattice: d must be >= 1");
    if (L < 1 && side <= 0) throw ValidationError("gen_lattice: L must be >= 1");
    if (side > 0 && !torus) throw ValidationError("gen_lattice: side override is torus-only");
    Box box{d, L, side > 0 ? side : 2 * L + 1, torus};
    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(box.size());
    for_each_box_edge(box, [&](std::int32_t v, std::int32_t w, int) {
        adj[v].push_back({w, 1.0});
        adj[w].push_back({v, 1.0});
    });
    EnvMeta meta;
    meta.model = torus ? "torus" : "lattice";
    meta.d = d;
    meta.L = L;
    meta.torus = torus;
    if (side > 0) meta.params["side"] = std::to_string(side);
    std::vector<int> origin(d, 0);
    return build_weighted(std::move(adj), flat_coords(box), box.id_of(origin), std::move(meta));
}

RootedEnvironment gen_percolation(int d, int L, double p, std::uint64_t seed) {
    if (d < 2) throw ValidationError("gen_percolation: d must be >= 2");
    if (L < 4) throw ValidationError("gen_percolation: L must be >= 4");
    if (!(p > 0.0 && p < 1.0) && p != 1.0)
        throw ValidationError("gen_percolation: p must be in (0,1]");
    Box box{d, L, 2 * L + 1, false};
    CounterRng rng(derive_stream(seed, "percolation", 0));

    std::vector<std::pair<std::int32_t, std::int32_t>> kept;
    UnionFind uf(static_cast<std::int32_t>(box.size()));
    for_each_box_edge(box, [&](std::int32_t v, std::int32_t w, int) {
        if (p == 1.0 || rng.next_double() < p) {
            kept.push_back({v, w});
            uf.unite(v, w);
        }
    });

    // largest component; ties resolved toward the one containing the smallest id
    std::vector<std::int64_t> count(box.size(), 0);
    for (std::int32_t v = 0; v < box.size(); ++v) ++count[uf.find(v)];
    std::int32_t best = 0;
    for (std::int32_t r = 1; r < box.size(); ++r)
        if (count[r] > count[best]) best = r;

    std::vector<std::int32_t> old2new(box.size(), -1);
    std::vector<std::int32_t> comp;
    for (std::int32_t v = 0; v < box.size(); ++v)
        if (uf.find(v) == best) {
            old2new[v] = static_cast<std::int32_t>(comp.size());
            comp.push_back(v);
        }

    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(comp.size());
    for (auto& [v, w] : kept)
        if (old2new[v] >= 0 && old2new[w] >= 0) {
            adj[old2new[v]].push_back({old2new[w], 1.0});
            adj[old2new[w]].push_back({old2new[v], 1.0});
        }

    std::vector<std::int32_t> coord;
    coord.reserve(comp.size() * d);
    for (auto v : comp)
        for (int x : box.coords_of(v)) coord.push_back(x);

    // root: nearest the origin by l1 norm, coordinate-lexicographic tie-break
    std::int32_t root = 0;
    auto key = [&](std::int32_t nv) {
        std::int64_t l1 = 0;
        for (int i = 0; i < d; ++i) l1 += std::abs(coord[static_cast<std::size_t>(nv) * d + i]);
        return l1;
    };
    for (std::int32_t nv = 1; nv < static_cast<std::int32_t>(comp.size()); ++nv) {
        std::int64_t a = key(nv), b = key(root);
        if (a < b) {
            root = nv;
        } else if (a == b) {
            for (int i = 0; i < d; ++i) {
                auto cv = coord[static_cast<std::size_t>(nv) * d + i];
                auto cr = coord[static_cast<std::size_t>(root) * d + i];
                if (cv != cr) {
                    if (cv < cr) root = nv;
                    break;
                }
            }
        }
    }

    EnvMeta meta;
    meta.model = "percolation";
    meta.d = d;
    meta.L = L;
    meta.seed = seed;
    meta.params["p"] = std::to_string(p);
    return build_weighted(std::move(adj), std::move(coord), root, std::move(meta));
}

RootedEnvironment gen_random_conductance(int d, int L, double alpha, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("gen_random_conductance: alpha must be in (0,1)");
    if (L < 1) throw ValidationError("gen_random_conductance: L must be >= 1");
    Box box{d, L, 2 * L + 1, false};
    CounterRng rng(derive_stream(seed, "conductance", 0));
    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(box.size());
    for_each_box_edge(box, [&](std::int32_t v, std::int32_t w, int) {
        double wt = alpha + rng.next_double() * (1.0 / alpha - alpha);
        adj[v].push_back({w, wt});
        adj[w].push_back({v, wt});
    });
    EnvMeta meta;
    meta.model = "conductance";
    meta.d = d;
    meta.L = L;
    meta.seed = seed;
    meta.params["alpha"] = std::to_string(alpha);
    std::vector<int> origin(d, 0);
    return build_weighted(std::move(adj), flat_coords(box), box.id_of(origin), std::move(meta));
}

RootedEnvironment gen_balanced(int d, int L, std::uint64_t seed) {
    if (d < 1) throw ValidationError("gen_balanced: d must be >= 1");
    if (L < 1) throw ValidationError("gen_balanced: L must be >= 1");
    Box box{d, L, 2 * L + 1, false};
    CounterRng rng(derive_stream(seed, "balanced", 0));

    RootedEnvironment env;
    const std::int32_t n = static_cast<std::int32_t>(box.size());
    env.row_ptr.assign(n + 1, 0);
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(n);
    for (std::int32_t v = 0; v < n; ++v) {
        auto c = box.coords_of(v);
        std::vector<double> rate(d, 0.0);
        double total = 0;
        for (int i = 0; i < d; ++i) {
            // rate consumed from the stream even for dropped axes, so the
            // interior kernel does not depend on L
            double a = 0.1 + 0.9 * rng.next_double();
            if (std::abs(c[i]) < L) {
                rate[i] = a;
                total += a;
            }
        }
        if (total == 0) {
            rows[v].push_back({v, 1.0});  // fully cornered site holds in place
            continue;
        }
        for (int i = 0; i < d; ++i) {
            if (rate[i] == 0) continue;
            auto cp = c, cm = c;
            cp[i] += 1;
            cm[i] -= 1;
            double q = rate[i] / (2 * total);
            rows[v].push_back({box.id_of(cp), q});
            rows[v].push_back({box.id_of(cm), q});
        }
        std::sort(rows[v].begin(), rows[v].end());
    }
    for (std::int32_t v = 0; v < n; ++v)
        env.row_ptr[v + 1] = env.row_ptr[v] + static_cast<std::int64_t>(rows[v].size());
    for (std::int32_t v = 0; v < n; ++v)
        for (auto& [w, q] : rows[v]) {
            env.col.push_back(w);
            env.prob.push_back(q);
        }
    env.coord = flat_coords(box);
    std::vector<int> origin(d, 0);
    env.root = box.id_of(origin);
    env.meta.model = "balanced";
    env.meta.d = d;
    env.meta.L = L;
    env.meta.seed = seed;
    return env;
}

RootedEnvironment gen_sierpinski(int level) {
    if (level < 0 || level > 10) throw ValidationError("gen_sierpinski: level must be in [0,10]");

    using P = std::pair<std::int32_t, std::int32_t>;
    std::vector<std::pair<P, P>> edges = {{{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{1, 0}, {0, 1}}};
    for (int l = 0; l < level; ++l) {
        std::int32_t s = std::int32_t{1} << l;
        auto base = edges;
        edges.reserve(base.size() * 3);
        for (auto& [a, b] : base) {
            edges.push_back({{a.first + s, a.second}, {b.first + s, b.second}});
            edges.push_back({{a.first, a.second + s}, {b.first, b.second + s}});
        }
    }

    std::map<P, std::int32_t> id;  // ordered: deterministic vertex numbering
    for (auto& [a, b] : edges) {
        id.emplace(a, 0);
        id.emplace(b, 0);
    }
    std::int32_t next = 0;
    for (auto& [c, i] : id) i = next++;

    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(next);
    for (auto& [a, b] : edges) {
        adj[id[a]].push_back({id[b], 1.0});
        adj[id[b]].push_back({id[a], 1.0});
    }
    std::vector<std::int32_t> coord(static_cast<std::size_t>(next) * 2);
    for (auto& [c, i] : id) {
        coord[static_cast<std::size_t>(i) * 2] = c.first;
        coord[static_cast<std::size_t>(i) * 2 + 1] = c.second;
    }
    std::int32_t root = id.at({0, std::int32_t{1} << level});  // apex corner
    EnvMeta meta;
    meta.model = "sierpinski";
    meta.d = 2;
    meta.params["level"] = std::to_string(level);
    return build_weighted(std::move(adj), std::move(coord), root, std::move(meta));
}

RootedEnvironment gen_kesten_tree(const std::vector<double>& pmf, int depth, std::uint64_t seed) {
    if (pmf.empty()) throw ValidationError("gen_kesten_tree: empty offspring pmf");
    double sum = 0, mean = 0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        if (pmf[k] < 0) throw ValidationError("gen_kesten_tree: negative pmf entry");
        sum += pmf[k];
        mean += static_cast<double>(k) * pmf[k];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("gen_kesten_tree: pmf does not sum to 1");
    if (std::abs(mean - 1.0) > 1e-9)
        throw ValidationError("gen_kesten_tree: offspring mean must be 1 (critical)");
    if (depth < 1) throw ValidationError("gen_kesten_tree: depth must be >= 1");

    // size-biased law q_k = k p_k (mean 1 makes it a pmf)
    std::vector<double> biased(pmf.size());
    for (std::size_t k = 0; k < pmf.size(); ++k) biased[k] = static_cast<double>(k) * pmf[k];

    CounterRng rng(derive_stream(seed, "kesten", 0));
    auto draw = [&rng](const std::vector<double>& q) {
        double u = rng.next_double();
        double acc = 0;
        for (std::size_t k = 0; k < q.size(); ++k) {
            acc += q[k];
            if (u < acc) return static_cast<int>(k);
        }
        return static_cast<int>(q.size()) - 1;
    };

    struct Node {
        std::int32_t parent;
        int depth;
        bool spine;
    };
    std::vector<Node> nodes{{-1, 0, true}};
    constexpr std::size_t kNodeCap = 5'000'000;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        if (nodes[v].depth >= depth) continue;
        int k = nodes[v].spine ? draw(biased) : draw(pmf);
        int spine_child = nodes[v].spine && k > 0 ? static_cast<int>(rng.next_below(k)) : -1;
        for (int j = 0; j < k; ++j) {
            nodes.push_back({static_cast<std::int32_t>(v), nodes[v].depth + 1, j == spine_child});
            if (nodes.size() > kNodeCap)
                throw ValidationError("gen_kesten_tree: node cap exceeded");
        }
    }

    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(nodes.size());
    for (std::size_t v = 1; v < nodes.size(); ++v) {
        adj[v].push_back({nodes[v].parent, 1.0});
        adj[nodes[v].parent].push_back({static_cast<std::int32_t>(v), 1.0});
    }
    EnvMeta meta;
    meta.model = "kesten";
    meta.seed = seed;
    meta.params["depth"] = std::to_string(depth);
    return build_weighted(std::move(adj), {}, 0, std::move(meta));
}

} // namespace rwre
