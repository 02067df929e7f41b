#pragma once

#include "rwre/environment.hpp"
#include "rwre/models.hpp"
#include "rwre/stats.hpp"

#include <cstdint>
#include <vector>

namespace rwre {

// (p_{2n}(x,y) - p_{2n-1}(x',y))^2 by exact propagation; two_n must be even.
double gradient_squared(const RootedEnvironment& env, std::int32_t x, std::int32_t xp,
                        std::int32_t y, std::int64_t two_n);

struct GradientLemmaCheck {
    double lhs, rhs, slack;
    double delta_n2;           // Delta_n(x,x')^2
    double max_constrained;    // max p_n(a,b) over a,b in B_x(2n), d(a,b) >= d(x,y)/2
    double max_all;            // max p_n(a,b) over a,b in B_x(2n)
};
// lhs = gradient_squared(x,x',y,2n);
// rhs = 4 d(d+1) Delta_n(x,x')^2 * max_constrained * max_all with d = max degree.
// Maxima by exhaustive scan over the materialized ball.
GradientLemmaCheck check_gradient_lemma(const RootedEnvironment& env, std::int32_t x,
                                        std::int32_t xp, std::int32_t y, std::int64_t n);

struct GaussianFitReport {
    LinFit diagonal;               // log(p_n+p_{n+1})(rho,rho) vs log n
    std::vector<std::int64_t> ns;  // sample points used for the diagonal fit
    std::vector<double> q_diag;    // annealed (p_n+p_{n+1})(rho,rho) at those n
    LinFit profile;                // log[(p_n+p_{n+1}) n^{d/2}] vs d(rho,y)^2/n
    double profile_r2 = 0;
    std::vector<std::int64_t> onsets;  // per replica; -1 if never inside the envelope
    std::size_t replicas = 0;
};
// Diagonal and off-diagonal Gaussian fits over n in [n_min, n_max] on a
// geometric grid; profile restricted to d(rho,y) <= 3 sqrt(n) at n = n_max.
GaussianFitReport fit_gaussian(const ModelSpec& spec, std::int64_t n_min, std::int64_t n_max,
                               std::size_t replicas, std::uint64_t master_seed,
                               int threads = 1);

struct AnnealedGradientRow {
    std::int64_t n;
    int displacement;  // graph distance d(x,y); 0 means y = x
    double mean, stderr_;
};
struct AnnealedGradientReport {
    std::vector<AnnealedGradientRow> rows;
    std::vector<AnnealedGradientRow> sup_rows;  // displacement = -1: sup over all y
    double exponent_at_zero = 0;  // OLS slope of log estimate vs log n at d(x,y)=0
    bool all_zero_at_zero = false;  // exact cancellation (e.g. full lattices)
    double exponent_sup = 0;  // OLS slope of log E[sup_y (...)^2] vs log n
    LinFit profile;  // log[estimate * n^{-exponent}] vs d(x,y)^2/n at the largest n
};
// E[(p_n(x,y) - p_{n-1}(x',y))^2] with x = rho and x' its first neighbor,
// averaged over y at each requested graph distance and over replicas; the
// sup rows take the per-environment maximum over all y before averaging
// (the quantity the n^{-(d+1)} gradient estimate bounds — at y = x the
// difference nearly cancels and decays strictly faster).
// Use even n so both kernels share the parity of their target.
AnnealedGradientReport annealed_gradient_estimate(const ModelSpec& spec,
                                                  const std::vector<std::int64_t>& ns,
                                                  const std::vector<int>& displacements,
                                                  std::size_t replicas,
                                                  std::uint64_t master_seed, int threads = 1);

} // namespace rwre
