#include "rwre/entropy.hpp"
#include "rwre/generators.hpp"
#include "rwre/testing.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace rwre;

namespace {

// Dense n x n matrix-power oracle for laws on small chains.
std::vector<double> dense_law(const RootedEnvironment& env, std::int32_t start,
                              std::int64_t steps) {
    const std::size_t n = env.num_vertices();
    std::vector<double> mu(n, 0.0), next(n);
    mu[start] = 1.0;
    for (std::int64_t t = 0; t < steps; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t x = 0; x < n; ++x)
            for (std::int64_t k = env.row_ptr[x]; k < env.row_ptr[x + 1]; ++k)
                next[env.col[k]] += mu[x] * env.prob[k];
        mu = next;
    }
    return mu;
}

RootedEnvironment directed_3cycle() {
    RootedEnvironment env;
    env.row_ptr = {0, 1, 2, 3};
    env.col = {1, 2, 0};
    env.prob = {1.0, 1.0, 1.0};
    env.meta.model = "cycle3";
    env.validate();
    return env;
}

} // namespace

TEST_CASE("entropy of basic laws") {
    CHECK(entropy(DistributionVector::point(3)) == 0.0);
    DistributionVector uniform{{0, 1, 2, 3}, {0.25, 0.25, 0.25, 0.25}, 0};
    CHECK(entropy(uniform) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    // SRW on Z at n=2: {1/4, 1/2, 1/4}
    DistributionVector srw2{{0, 1, 2}, {0.25, 0.5, 0.25}, 0};
    CHECK(entropy(srw2) == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("delta closed forms") {
    DistributionVector mu{{0}, {1.0}, 0};
    DistributionVector half{{0, 1}, {0.5, 0.5}, 0};
    DistributionVector other{{1}, {1.0}, 0};
    CHECK(delta(mu, mu) == 0.0);
    CHECK(delta(mu, other) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(delta(mu, half) == doctest::Approx(std::sqrt(2.0 / 3)).epsilon(1e-14));
}

TEST_CASE("tv/delta inequality with the equality case") {
    DistributionVector mu{{0}, {1.0}, 0};
    DistributionVector nu{{1}, {1.0}, 0};
    const auto c = check_tv_delta(mu, nu);
    CHECK(c.tv == doctest::Approx(2.0));
    CHECK(std::sqrt(2.0) * c.delta == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(c.slack) <= 1e-12);
    const auto same = check_tv_delta(mu, mu);
    CHECK(same.tv == 0.0);
    CHECK(same.delta == 0.0);
}

TEST_CASE("mean inequality example") {
    DistributionVector mu{{0}, {1.0}, 0};
    DistributionVector nu{{1}, {1.0}, 0};
    const auto c = check_mean_inequality(mu, nu, {0.0, 1.0});
    CHECK(c.lhs == doctest::Approx(1.0));
    CHECK(c.rhs == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(c.slack == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-12));
}

TEST_CASE("random-law property sweep") {
    CounterRng rng(derive_stream(3, "entropy_props", 0));
    for (int i = 0; i < 3000; ++i) {
        const int atoms = 2 + static_cast<int>(rng.next_below(63));
        const auto mu = random_law(rng, atoms);
        const auto nu = random_law(rng, atoms);
        const double d = delta(mu, nu);
        CHECK(d >= 0.0);
        CHECK(d <= std::sqrt(2.0) + 1e-12);
        CHECK(check_tv_delta(mu, nu).slack >= -1e-12);
        std::vector<double> f(atoms);
        for (auto& x : f) x = 2 * rng.next_double() - 1;
        CHECK(check_mean_inequality(mu, nu, f).slack >= -1e-12);
    }
}

TEST_CASE("delta_n matches a dense oracle on the 6-cycle") {
    const auto env = gen_lattice(1, 0, true, 6);
    const auto a = dense_law(env, 0, 3);
    const auto b = dense_law(env, 1, 2);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] + b[i] > 0) s += (a[i] - b[i]) * (a[i] - b[i]) / (a[i] + b[i]);
    CHECK(delta_n(env, 0, 1, 3) == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
}

TEST_CASE("delta_n is asymmetric by construction") {
    const auto env = directed_3cycle();
    CHECK(delta_n(env, 0, 1, 2) == 0.0);  // both point masses land on vertex 2
    CHECK(delta_n(env, 1, 0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("lemma XY closed forms") {
    // X = Y fair bit
    JointTable eq{2, 2, {0.5, 0.0, 0.0, 0.5}};
    const auto c = check_lemma_xy(eq);
    CHECK(c.lhs == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(c.rhs == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(c.slack > 0);

    CounterRng rng(derive_stream(8, "xy", 0));
    for (int i = 0; i < 500; ++i) {
        const auto q = product_joint(rng, 2 + rng.next_below(7), 2 + rng.next_below(7));
        const auto r = check_lemma_xy(q);
        CHECK(std::abs(r.lhs) + std::abs(r.rhs) <= 1e-12);
    }
    for (int i = 0; i < 3000; ++i) {
        const auto q = random_joint(rng, 2 + rng.next_below(7), 2 + rng.next_below(7));
        CHECK(check_lemma_xy(q).slack >= -1e-10);
    }
}

TEST_CASE("joint entropy subadditivity") {
    CounterRng rng(derive_stream(13, "subadd", 0));
    for (int i = 0; i < 500; ++i) {
        const auto q = random_joint(rng, 2 + rng.next_below(7), 2 + rng.next_below(7));
        CHECK(entropy(q) <= entropy(q.marginal_x()) + entropy(q.marginal_y()) + 1e-12);
    }
}

TEST_CASE("entropy profile identities on the transitive cycle") {
    const ModelSpec spec{.name = "torus", .d = 1, .L = 0, .side = 12};
    const auto profile = entropy_profile(spec, 20, 1, 1);
    // H_1^n = H_{n-1} + H_1, computed through two independent routes
    for (int n = 1; n <= 20; ++n)
        CHECK(std::abs(profile.H1n[n].mean - profile.H[n - 1].mean - profile.H[1].mean) <=
              1e-10);
    for (int n = 2; n <= 20; ++n)
        CHECK(profile.increment[n].mean <= profile.increment[n - 1].mean + 1e-10);
}

TEST_CASE("H_1^n decomposition equals the direct joint-entropy double sum") {
    const ModelSpec spec{.name = "percolation", .d = 2, .L = 16, .p = 0.7};
    const auto env = make_env(spec, 2, 0);  // same replica stream as the profile
    const std::int32_t rho = env.root;
    const int n = 6;
    const auto profile = entropy_profile(spec, n, 1, 2);

    // direct route: H(X_1, X_n) = sum_{y,z} phi(P(rho,y) p_{n-1}(y,z))
    double direct = 0;
    for (std::int64_t k = env.row_ptr[rho]; k < env.row_ptr[rho + 1]; ++k) {
        const auto law = propagate(env, DistributionVector::point(env.col[k]), n - 1);
        for (double m : law.mass) {
            const double joint = env.prob[k] * m;
            if (joint > 0) direct -= joint * std::log(joint);
        }
    }
    CHECK(profile.H1n[n].mean == doctest::Approx(direct).epsilon(1e-11));
}

TEST_CASE("theorem entropy holds exactly on the torus") {
    const ModelSpec spec{.name = "torus", .d = 2, .L = 0, .side = 12};
    const auto checks = check_theorem_entropy_profile(spec, {1, 2, 5, 10, 20}, 1, 1);
    for (const auto& c : checks) CHECK(c.slack >= -1e-10);
    // batched and single-n paths agree
    const auto single = check_theorem_entropy(spec, 5, 1, 1);
    CHECK(single.lhs == doctest::Approx(checks[2].lhs).epsilon(1e-13));
    CHECK(single.rhs == doctest::Approx(checks[2].rhs).epsilon(1e-13));
}

TEST_CASE("liouville probe: constants vanish, linear h on Z is consistent") {
    const auto env = gen_lattice(1, 40, false);
    std::vector<double> h_const(env.num_vertices(), 3.0);
    std::vector<double> h_lin(env.num_vertices());
    for (std::int32_t v = 0; v < env.num_vertices(); ++v) h_lin[v] = env.coords_of(v)[0];

    for (const auto& row : sublinear_liouville_probe(env, h_const, {1, 4, 16})) {
        CHECK(row.lhs == 0.0);
        CHECK(row.ratio == 0.0);
    }
    for (const auto& row : sublinear_liouville_probe(env, h_lin, {1, 4, 16})) {
        CHECK(row.lhs == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(row.rhs >= 1.0 - 1e-9);  // linear functions are not excluded
    }
}

TEST_CASE("weighted statistics") {
    const auto s = weighted_stat({1.0, 3.0}, {1.0, 1.0});
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.stderr_ == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
    const auto w = weighted_stat({1.0, 3.0}, {3.0, 1.0});
    CHECK(w.mean == doctest::Approx(1.5));
}
