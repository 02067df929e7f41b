#include "rwre/generators.hpp"
#include "rwre/heatkernel.hpp"
#include "rwre/models.hpp"
#include "rwre/walk.hpp"

#include <doctest.h>

#include <cmath>

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

TEST_CASE("gradient squared on Z: binomial oracle") {
    const auto env = gen_lattice(1, 16, false);
    // p_4(0,0) = 3/8 = p_3(1,0): exact cancellation at y = x
    CHECK(gradient_squared(env, env.root, vertex_at(env, {1}), env.root, 4) <= 1e-30);
    // p_4(0,2) = 1/4, p_3(1,2) = 3/8
    CHECK(gradient_squared(env, env.root, vertex_at(env, {1}), vertex_at(env, {2}), 4) ==
          doctest::Approx(1.0 / 64).epsilon(1e-13));
    CHECK_THROWS_AS(gradient_squared(env, env.root, env.root, env.root, 3),
                    std::invalid_argument);
}

TEST_CASE("cancellation at y = x is exact on the full Z^2 lattice") {
    const auto env = gen_lattice(2, 20, false);
    const auto e1 = vertex_at(env, {1, 0});
    for (std::int64_t two_n : {4, 8, 16})
        CHECK(gradient_squared(env, env.root, e1, env.root, two_n) <= 1e-30);
}

TEST_CASE("gradient lemma on SRW and percolation") {
    const auto z = gen_lattice(1, 40, false);
    const auto c = check_gradient_lemma(z, z.root, vertex_at(z, {1}), z.root, 4);
    CHECK(c.slack >= -1e-12);
    CHECK(c.max_all <= 1.0);
    CHECK(c.max_constrained <= c.max_all);

    const auto per = gen_percolation(2, 12, 0.7, 3);
    std::int32_t xp = per.root;
    for (std::int64_t k = per.row_ptr[per.root]; k < per.row_ptr[per.root + 1]; ++k)
        if (per.col[k] != per.root) {
            xp = per.col[k];
            break;
        }
    const auto dist = bfs_distances(per, per.root);
    for (std::int32_t y = 0; y < per.num_vertices(); ++y) {
        if (dist[y] != 2) continue;
        const auto r = check_gradient_lemma(per, per.root, xp, y, 3);
        // trivial cross-check: (a-b)^2 <= 2(a^2 + b^2)
        const double a = heat_kernel(per, per.root, y, 6);
        const double b = heat_kernel(per, xp, y, 5);
        CHECK(r.lhs <= 2 * (a * a + b * b) + 1e-15);
        CHECK(r.slack >= -1e-12);
        break;
    }
}

TEST_CASE("gaussian diagonal fit recovers -d/2") {
    const ModelSpec z2{.name = "lattice", .d = 2, .L = 44};
    const auto rep = fit_gaussian(z2, 16, 100, 1, 7);
    CHECK(rep.diagonal.slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(rep.diagonal.r2 > 0.999);
    // single replica: onset at the first grid point by construction
    REQUIRE(rep.onsets.size() == 1);
    CHECK(rep.onsets[0] == rep.ns.front());
    // off-diagonal profile decays in k^2/n
    CHECK(rep.profile.slope < 0);
    CHECK(rep.profile_r2 > 0.5);

    const ModelSpec z1{.name = "lattice", .d = 1, .L = 60};
    const auto r1 = fit_gaussian(z1, 16, 100, 1, 7);
    CHECK(r1.diagonal.slope == doctest::Approx(-0.5).epsilon(0.1));

    CHECK_THROWS_AS(fit_gaussian(z2, 60, 100, 1, 7), std::invalid_argument);
}

TEST_CASE("annealed gradient flags the lattice cancellation") {
    const ModelSpec spec{.name = "lattice", .d = 2, .L = 24};
    const auto rep = annealed_gradient_estimate(spec, {4, 8, 16}, {0, 2, 4}, 1, 3);
    CHECK(rep.all_zero_at_zero);
    for (const auto& row : rep.rows)
        if (row.displacement == 0) CHECK(row.mean <= 1e-30);
}

TEST_CASE("annealed gradient decays on weighted environments") {
    const ModelSpec spec{.name = "conductance", .d = 1, .L = 40, .alpha = 0.5};
    const auto rep = annealed_gradient_estimate(spec, {8, 16, 32, 64}, {0, 2}, 4, 11, 2);
    CHECK_FALSE(rep.all_zero_at_zero);
    CHECK(rep.exponent_at_zero < -0.5);
    // sup over y decays too, and dominates the value at y = x
    REQUIRE(rep.sup_rows.size() == 4);
    CHECK(rep.exponent_sup < -1.0);
    CHECK(rep.sup_rows.front().mean > rep.sup_rows.back().mean);
    for (std::size_t i = 0; i < rep.sup_rows.size(); ++i)
        CHECK(rep.sup_rows[i].mean >= rep.rows[2 * i].mean);
    // thread-count invariance
    const auto again = annealed_gradient_estimate(spec, {8, 16, 32, 64}, {0, 2}, 4, 11, 1);
    REQUIRE(again.rows.size() == rep.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(again.rows[i].mean == rep.rows[i].mean);
        CHECK(again.rows[i].stderr_ == rep.rows[i].stderr_);
    }
}
