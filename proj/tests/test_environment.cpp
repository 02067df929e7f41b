#include "rwre/environment.hpp"
#include "rwre/generators.hpp"
#include "rwre/models.hpp"
#include "rwre/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace rwre;

namespace {

std::pair<int, int> coords2(const RootedEnvironment& env, std::int32_t v) {
    const auto c = env.coords_of(v);
    return {c[0], c[1]};
}

} // namespace

TEST_CASE("lattice box structure") {
    const auto env = gen_lattice(2, 3, false);
    CHECK(env.num_vertices() == 49);
    CHECK(env.reversible());
    env.validate();
    // interior vertex has 4 neighbors, corner has 2
    int deg2 = 0, deg4 = 0;
    for (std::int32_t v = 0; v < env.num_vertices(); ++v) {
        if (env.out_degree(v) == 2) ++deg2;
        if (env.out_degree(v) == 4) ++deg4;
    }
    CHECK(deg2 == 4);
    CHECK(deg4 == 25);
}

TEST_CASE("torus is regular and supports side override") {
    const auto env = gen_lattice(1, 0, true, 12);
    CHECK(env.num_vertices() == 12);
    for (std::int32_t v = 0; v < env.num_vertices(); ++v) CHECK(env.out_degree(v) == 2);
    env.validate();
    const auto t2 = gen_lattice(2, 0, true, 12);
    CHECK(t2.num_vertices() == 144);
    for (std::int32_t v = 0; v < t2.num_vertices(); ++v) CHECK(t2.out_degree(v) == 4);
    t2.validate();
}

TEST_CASE("percolation at p=1 equals the lattice up to relabeling") {
    const auto lat = gen_lattice(2, 4, false);
    const auto per = gen_percolation(2, 4, 1.0, 7);
    CHECK(per.num_vertices() == lat.num_vertices());
    CHECK(per.col.size() == lat.col.size());
    std::multiset<std::pair<int, int>> a, b;
    for (std::int32_t v = 0; v < lat.num_vertices(); ++v) a.insert(coords2(lat, v));
    for (std::int32_t v = 0; v < per.num_vertices(); ++v) b.insert(coords2(per, v));
    CHECK(a == b);
}

TEST_CASE("generator outputs validate over many seeds") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        gen_percolation(2, 8, 0.7, s).validate();
    }
    for (std::uint64_t s = 0; s < 25; ++s) {
        gen_random_conductance(2, 6, 0.5, s).validate();
        gen_balanced(2, 6, s).validate();
        gen_kesten_tree({0.25, 0.5, 0.25}, 6, s).validate();
    }
}

TEST_CASE("balanced environment has exactly zero drift") {
    const auto env = gen_balanced(2, 5, 3);
    std::map<std::pair<int, int>, std::int32_t> by_coord;
    for (std::int32_t v = 0; v < env.num_vertices(); ++v) by_coord[coords2(env, v)] = v;
    for (std::int32_t v = 0; v < env.num_vertices(); ++v) {
        double dx = 0, dy = 0;
        const auto [x, y] = coords2(env, v);
        for (std::int64_t k = env.row_ptr[v]; k < env.row_ptr[v + 1]; ++k) {
            const auto [nx, ny] = coords2(env, env.col[k]);
            dx += env.prob[k] * (nx - x);
            dy += env.prob[k] * (ny - y);
        }
        CHECK(dx == 0.0);
        CHECK(dy == 0.0);
    }
}

TEST_CASE("sierpinski gasket vertex count") {
    // v(l) = 3 (3^l + 1) / 2
    CHECK(gen_sierpinski(1).num_vertices() == 6);
    CHECK(gen_sierpinski(3).num_vertices() == 42);
    CHECK(gen_sierpinski(5).num_vertices() == 366);
    gen_sierpinski(4).validate();
}

TEST_CASE("kesten tree has an infinite spine down to the depth cap") {
    const auto env = gen_kesten_tree({0.25, 0.5, 0.25}, 8, 11);
    env.validate();
    // depth 8 means some vertex at distance 8 from the root
    const auto dist = bfs_distances(env, env.root);
    int maxd = 0;
    for (int d : dist) maxd = std::max(maxd, d);
    CHECK(maxd >= 8);
}

TEST_CASE("metric balls") {
    const auto env = gen_lattice(2, 10, false);
    const auto b = ball(env, env.root, 3);
    // l1 ball: 1 + 2r(r+1) vertices
    CHECK(b.members.size() == 25);
    CHECK(b.boundary.size() == 12);
    CHECK(b.inner.size() == 13);
    for (auto v : b.members) CHECK(b.dist_of(v) <= 3);
    CHECK(b.contains(env.root));
    CHECK(b.dist_of(env.root) == 0);
}

TEST_CASE("horizon budget on box models") {
    const auto env = gen_lattice(2, 16, false);
    CHECK(env.horizon_budget() == 16);
    CHECK_THROWS_AS(env.check_horizon(17), BudgetError);
    const auto torus = gen_lattice(1, 0, true, 12);
    CHECK_NOTHROW(torus.check_horizon(1000000));
}

TEST_CASE("serialization round trip is the identity on all fields") {
    for (const ModelSpec& spec :
         {ModelSpec{.name = "percolation", .d = 2, .L = 10, .p = 0.7},
          ModelSpec{.name = "conductance", .d = 2, .L = 6, .alpha = 0.5},
          ModelSpec{.name = "balanced", .d = 2, .L = 5},
          ModelSpec{.name = "sierpinski", .level = 3}}) {
        const auto env = make_env(spec, 42, 0);
        std::stringstream ss;
        serialize(env, ss);
        const auto back = deserialize(ss);
        CHECK(back.row_ptr == env.row_ptr);
        CHECK(back.col == env.col);
        CHECK(back.prob == env.prob);
        CHECK(back.edge_weight == env.edge_weight);
        CHECK(back.coord == env.coord);
        CHECK(back.root == env.root);
        CHECK(back.meta.model == env.meta.model);
        CHECK(env_hash(back) == env_hash(env));
    }
}

TEST_CASE("deserialization rejects malformed input") {
    CHECK_THROWS_AS(deserialize_file("/nonexistent/env"), std::runtime_error);
    {
        std::stringstream ss("nonsense\n");
        CHECK_THROWS_AS(deserialize(ss), ParseError);
    }
    {
        // duplicate coordinates
        std::stringstream ss("env v=1 model=m d=1 L=1 seed=0 torus=0 params= root=0\n"
                             "v 0 0\nv 1 0\ne 0 1 1\n");
        CHECK_THROWS_AS(deserialize(ss), ValidationError);
    }
    {
        // disconnected
        std::stringstream ss("env v=1 model=m d=1 L=2 seed=0 torus=0 params= root=0\n"
                             "v 0 0\nv 1 1\nv 2 2\ne 0 1 1\ne 2 2 1\n");
        CHECK_THROWS_AS(deserialize(ss), ValidationError);
    }
}

TEST_CASE("stream derivation is stable and replica-separated") {
    const auto a = derive_stream(1, "percolation", 0);
    const auto b = derive_stream(1, "percolation", 1);
    const auto c = derive_stream(2, "percolation", 0);
    CHECK(a != b);
    CHECK(a != c);
    CHECK(a == derive_stream(1, "percolation", 0));
}
