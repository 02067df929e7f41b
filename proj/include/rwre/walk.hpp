#pragma once

#include "rwre/environment.hpp"
#include "rwre/models.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rwre {

// Sparse probability vector over environment vertices. Entries are kept
// sorted by vertex id; mass below the drop threshold is removed and
// accounted in `dropped` (mass drift is an accuracy diagnostic, the vector
// is never renormalized).
struct DistributionVector {
    std::vector<std::int32_t> idx;
    std::vector<double> mass;
    double dropped = 0.0;

    static constexpr double kDropThreshold = 1e-300;

    static DistributionVector point(std::int32_t v) { return {{v}, {1.0}, 0.0}; }

    double total() const;
    double at(std::int32_t v) const;  // 0 if absent
    std::size_t support_size() const { return idx.size(); }
};

struct WalkSample {
    std::vector<std::int32_t> path;  // X_0 ... X_n
    std::uint64_t stream = 0;
};

// mu -> mu P^n by sparse vector-kernel products; exact up to rounding.
DistributionVector propagate(const RootedEnvironment& env, const DistributionVector& mu,
                             std::int64_t steps);

// p_n(x,y)
double heat_kernel(const RootedEnvironment& env, std::int32_t x, std::int32_t y, std::int64_t n);

// Path sampled by inverse-CDF on the fixed CSR column ordering.
WalkSample sample_path(const RootedEnvironment& env, std::int32_t start, std::int64_t n,
                       std::uint64_t stream);

// ||mu - nu||_TV = sum |mu - nu| (the unhalved convention)
double tv_distance(const DistributionVector& mu, const DistributionVector& nu);

// Incremental propagation: advances the distribution one step at a time so
// per-step statistics can be recorded without restarting.
class Propagator {
public:
    Propagator(const RootedEnvironment& env, DistributionVector mu);

    void step();                                // advance one step
    const DistributionVector& current() const { return mu_; }
    std::int64_t time() const { return t_; }

    // sum_x mu(x) f(x) for f given as a dense per-vertex table
    double mean(const std::vector<double>& f) const;
    double entropy() const;  // sum phi(mass), natural log

private:
    const RootedEnvironment& env_;
    DistributionVector mu_;
    std::vector<double> scratch_;
    std::vector<std::int32_t> touched_;
    std::int64_t t_ = 0;
};

struct DisplacementRow {
    std::int64_t n;
    double mean_d2;   // annealed E[d(rho,X_n)^2]
    double stderr_;   // weighted-ensemble standard error
};

// Annealed E[d(rho,X_n)^2] for n = 0..n_max by exact propagation, averaged
// over replicas with nu(rho) importance weights.
std::vector<DisplacementRow> displacement_profile(const ModelSpec& spec, std::int64_t n_max,
                                                  std::size_t replicas,
                                                  std::uint64_t master_seed, int threads = 1);

// Writers for the external distribution dump format.
void write_distribution(std::ostream& out, const RootedEnvironment& env,
                        const DistributionVector& mu, std::int64_t n);
DistributionVector read_distribution(std::istream& in);

} // namespace rwre
