#pragma once

#include "rwre/environment.hpp"
#include "rwre/models.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

#include <cstdint>
#include <vector>

namespace rwre {

// Dense joint law q(x,y) of a pair of discrete variables, row-major.
struct JointTable {
    std::size_t nx = 0, ny = 0;
    std::vector<double> q;  // nx*ny entries, sum 1

    double at(std::size_t x, std::size_t y) const { return q[x * ny + y]; }
    std::vector<double> marginal_x() const;
    std::vector<double> marginal_y() const;
    double total() const;
};

// Shannon entropy in nats, phi(t) = -t log t with phi(0) = 0.
double entropy(const DistributionVector& mu);
double entropy(const std::vector<double>& mass);
double entropy(const JointTable& q);

// Delta(mu,nu) = [sum (mu-nu)^2/(mu+nu)]^{1/2}, zero-mass atoms skipped.
double delta(const DistributionVector& mu, const DistributionVector& nu);
double delta(const std::vector<double>& mu, const std::vector<double>& nu);

struct TvDeltaCheck {
    double tv, delta, slack;  // slack = sqrt(2)*delta - tv
};
TvDeltaCheck check_tv_delta(const DistributionVector& mu, const DistributionVector& nu);

struct MeanCheck {
    double lhs, rhs, slack;  // |mu(f)-nu(f)| <= Delta * (mu(f^2)+nu(f^2))^{1/2}
};
MeanCheck check_mean_inequality(const DistributionVector& mu, const DistributionVector& nu,
                                const std::vector<double>& f);

// Delta(law(X_n | X_0=x), law(X_{n-1} | X_0=y)); deliberately asymmetric.
double delta_n(const RootedEnvironment& env, std::int32_t x, std::int32_t y, std::int64_t n);

struct LemmaXyCheck {
    double lhs, rhs, slack;
};
// lhs = sum_y p(y) Delta^2(law X, law X|Y=y); rhs = 2(H(X)+H(Y)-H(X,Y)).
LemmaXyCheck check_lemma_xy(const JointTable& q);

struct EntropyProfile {
    std::int64_t n_max = 0;
    std::size_t replicas = 0;
    std::vector<double> weight;              // per replica (nu(root) or 1)
    std::vector<std::vector<double>> H_env;  // [replica][n], n = 0..n_max
    std::vector<std::vector<double>> H1n_env;  // [replica][n], valid for n >= 1
    std::vector<SeqStat> H;    // annealed H_n
    std::vector<SeqStat> H1n;  // annealed H_1^n
    std::vector<SeqStat> increment;  // H_n - H_{n-1}, index n >= 1
};

// Per-environment H_n by exact propagation from the root; H_1^n as
// H(X_1) + sum_y P(rho,y) H_{n-1}(from y), the proof decomposition.
EntropyProfile entropy_profile(const ModelSpec& spec, std::int64_t n_max, std::size_t replicas,
                               std::uint64_t master_seed, int threads = 1);

struct TheoremEntropyCheck {
    double lhs, rhs, slack;          // lhs = E[Delta_n(rho,X_1)^2], rhs = 2(H_n - H_{n-1})
    double lhs_stderr, rhs_stderr, slack_stderr;
    std::size_t replicas;
};
TheoremEntropyCheck check_theorem_entropy(const ModelSpec& spec, std::int64_t n,
                                          std::size_t replicas, std::uint64_t master_seed,
                                          int threads = 1);

// Same check over several n in one sweep (propagators advanced in lockstep,
// one pass per environment instead of one per n).
std::vector<TheoremEntropyCheck> check_theorem_entropy_profile(
    const ModelSpec& spec, const std::vector<std::int64_t>& ns, std::size_t replicas,
    std::uint64_t master_seed, int threads = 1);

struct LiouvilleProbeRow {
    std::int64_t n;
    double lhs;    // E_rho |h(rho) - h(X_1)|
    double rhs;    // sqrt(2 E_rho[Delta_n^2] E[h^2(X_n)])
    double ratio;  // lhs / rhs (inf-safe: 0/0 -> 0)
};
std::vector<LiouvilleProbeRow> sublinear_liouville_probe(const RootedEnvironment& env,
                                                         const std::vector<double>& h,
                                                         const std::vector<std::int64_t>& ns);

} // namespace rwre
