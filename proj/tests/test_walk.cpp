#include "rwre/generators.hpp"
#include "rwre/models.hpp"
#include "rwre/walk.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace rwre;

namespace {

std::int32_t vertex_at(const RootedEnvironment& env, std::initializer_list<int> want) {
    for (std::int32_t v = 0; v < env.num_vertices(); ++v) {
        const auto c = env.coords_of(v);
        bool ok = true;
        int i = 0;
        for (int x : want) ok = ok && c[i++] == x;
        if (ok) return v;
    }
    REQUIRE(false);
    return -1;
}

} // namespace

TEST_CASE("propagate on Z: hand convolution at n=2") {
    const auto env = gen_lattice(1, 16, false);
    const auto mu = propagate(env, DistributionVector::point(env.root), 2);
    CHECK(mu.support_size() == 3);
    CHECK(mu.at(vertex_at(env, {-2})) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(mu.at(vertex_at(env, {0})) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mu.at(vertex_at(env, {2})) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(propagate(env, DistributionVector::point(env.root), 0).at(env.root) == 1.0);
}

TEST_CASE("heat kernel binomial values and parity") {
    const auto env = gen_lattice(1, 16, false);
    CHECK(heat_kernel(env, env.root, env.root, 0) == 1.0);
    CHECK(heat_kernel(env, env.root, vertex_at(env, {1}), 3) ==
          doctest::Approx(3.0 / 8).epsilon(1e-14));
    // bipartite parity
    CHECK(heat_kernel(env, env.root, vertex_at(env, {1}), 2) == 0.0);
    CHECK(heat_kernel(env, env.root, env.root, 3) == 0.0);
}

TEST_CASE("mass conservation over 50 steps") {
    for (const ModelSpec& spec : {ModelSpec{.name = "percolation", .d = 2, .L = 32, .p = 0.7},
                                  ModelSpec{.name = "sierpinski", .level = 4}}) {
        const auto env = make_env(spec, 9, 0);
        const auto mu = propagate(env, DistributionVector::point(env.root), 50);
        CHECK(std::abs(mu.total() + mu.dropped - 1.0) <= 1e-10);
    }
}

TEST_CASE("Chapman-Kolmogorov") {
    const auto env = gen_percolation(2, 24, 0.7, 5);
    const auto a = propagate(env, DistributionVector::point(env.root), 12);
    const auto b = propagate(env, propagate(env, DistributionVector::point(env.root), 7), 5);
    CHECK(tv_distance(a, b) <= 1e-10);
}

TEST_CASE("detailed balance on reversible environments") {
    const auto env = gen_random_conductance(2, 24, 0.5, 3);
    const std::int32_t x = env.root, y = vertex_at(env, {3, -2});
    for (int n : {3, 6, 11}) {
        const double lhs = env.vertex_weight[x] * heat_kernel(env, x, y, n);
        const double rhs = env.vertex_weight[y] * heat_kernel(env, y, x, n);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("sample paths are kernel-valid and match the law at n=1") {
    const auto env = gen_lattice(1, 8, false);
    std::map<std::int32_t, int> hits;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        const auto s = sample_path(env, env.root, 4, derive_stream(77, "paths", i));
        REQUIRE(s.path.size() == 5);
        for (std::size_t t = 0; t + 1 < s.path.size(); ++t) {
            bool ok = false;
            for (std::int64_t k = env.row_ptr[s.path[t]]; k < env.row_ptr[s.path[t] + 1]; ++k)
                ok = ok || (env.col[k] == s.path[t + 1] && env.prob[k] > 0);
            REQUIRE(ok);
        }
        ++hits[s.path[1]];
    }
    const double frac = static_cast<double>(hits[vertex_at(env, {1})]) / trials;
    CHECK(std::abs(frac - 0.5) < 0.005);
}

TEST_CASE("deterministic chain forces its orbit") {
    RootedEnvironment env;
    env.row_ptr = {0, 1, 2, 3};
    env.col = {1, 2, 0};
    env.prob = {1.0, 1.0, 1.0};
    env.meta.model = "cycle3";
    env.validate();
    const auto s = sample_path(env, 0, 6, 123);
    CHECK(s.path == std::vector<std::int32_t>{0, 1, 2, 0, 1, 2, 0});
}

TEST_CASE("displacement profile: E|X_n|^2 = n on Z and Z^2") {
    for (int d : {1, 2}) {
        const ModelSpec spec{.name = "lattice", .d = d, .L = 32};
        const auto rows = displacement_profile(spec, 30, 1, 1);
        for (const auto& row : rows)
            CHECK(std::abs(row.mean_d2 - static_cast<double>(row.n)) <= 1e-10);
    }
}

TEST_CASE("displacement profile is thread-count invariant") {
    const ModelSpec spec{.name = "percolation", .d = 2, .L = 24, .p = 0.7};
    const auto a = displacement_profile(spec, 16, 6, 31, 1);
    const auto b = displacement_profile(spec, 16, 6, 31, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean_d2 == b[i].mean_d2);
        CHECK(a[i].stderr_ == b[i].stderr_);
    }
}

TEST_CASE("distribution dump round trip") {
    const auto env = gen_lattice(2, 16, false);
    const auto mu = propagate(env, DistributionVector::point(env.root), 6);
    std::stringstream ss;
    write_distribution(ss, env, mu, 6);
    const auto back = read_distribution(ss);
    CHECK(back.idx == mu.idx);
    CHECK(back.mass == mu.mass);
}

TEST_CASE("monte carlo empirical law approaches the exact law") {
    const auto env = gen_percolation(2, 16, 0.7, 21);
    const int n = 8, trials = 20000;
    std::map<std::int32_t, double> freq;
    for (int i = 0; i < trials; ++i)
        freq[sample_path(env, env.root, n, derive_stream(5, "mc", i)).path[n]] += 1.0 / trials;
    const auto exact = propagate(env, DistributionVector::point(env.root), n);
    double tv = 0;
    std::map<std::int32_t, double> all(freq);
    for (std::size_t i = 0; i < exact.idx.size(); ++i) all[exact.idx[i]] += 0;
    for (auto& [v, f] : all) tv += std::abs(f - exact.at(v));
    CHECK(tv <= 3.0 * std::sqrt(static_cast<double>(exact.support_size()) / trials));
}
