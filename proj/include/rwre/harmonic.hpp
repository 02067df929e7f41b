#pragma once

#include "rwre/environment.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rwre {

struct SolverError : std::runtime_error {
    SolverError(const std::string& msg, double residual)
        : std::runtime_error(msg), residual(residual) {}
    double residual;
};

// Discrete harmonic field on a metric ball: boundary values fixed, the
// mean-value property enforced on the interior up to `residual`.
struct HarmonicField {
    BallView ball;
    std::vector<double> value;  // dense over env vertices; 0 outside the ball
    double residual = 0;        // max interior |h(x) - sum_y P(x,y) h(y)|
    double tol = 0;             // stopping tolerance used (relative to max|h|)
};

// Solve the Dirichlet problem on `ball`: h = g on the ball boundary,
// h(x) = sum_y P(x,y) h(y) on the interior. `g` is read on boundary
// vertices only (dense per-vertex table).
HarmonicField dirichlet_solve(const RootedEnvironment& env, const BallView& ball,
                              const std::vector<double>& g, double tol = 1e-10);

struct ReversePoincareCheck {
    double lhs, rhs, ratio;  // edge energy on B(n) vs (4/n^2) * mass on B(2n)
};
// Requires h harmonic on B_x(2n) and a reversible environment.
ReversePoincareCheck check_reverse_poincare(const RootedEnvironment& env,
                                            const std::vector<double>& h, std::int32_t x,
                                            int n);

// Smallest C with sum_{B_x(n)} nu (f - mean)^2 <= C n^2 * edge energy on
// B_x(2n), for all f: extremal Rayleigh quotient of the form pencil by
// power iteration (relative tolerance 1e-6). Infinity if B_x(2n) is
// disconnected as an induced subgraph.
double poincare_constant(const RootedEnvironment& env, std::int32_t x, int n);

struct VolumeDoubling {
    double max_ratio = 0;
    std::vector<double> ratios;  // aligned with the supplied centers
};
VolumeDoubling volume_doubling(const RootedEnvironment& env,
                               const std::vector<std::int32_t>& centers, int n);

struct BallCover {
    std::int32_t center = 0;
    int R = 0, r = 0;
    std::vector<std::int32_t> centers;  // greedy maximal disjoint floor(r/2)-balls
    int overlap = 0;                    // max count of 2r-balls containing one vertex
    bool covers = false;                // exhaustive cover check of B_center(R)
    std::size_t size() const { return centers.size(); }
};
BallCover proper_cover(const RootedEnvironment& env, std::int32_t center, int R, int r);

struct ZeroMeanBasis {
    std::vector<std::vector<double>> fields;  // dense per-vertex combinations
    std::vector<std::vector<double>> coeffs;  // basis vectors in candidate space
};
// Basis of the span of `fields` with nu-mean 0 on every cover ball
// (nullspace of the M x d ball-means matrix).
ZeroMeanBasis zero_mean_subspace(const RootedEnvironment& env,
                                 const std::vector<std::vector<double>>& fields,
                                 const BallCover& cover);

struct LemmaBCheck {
    double lhs, rhs, ratio;
    double c_p;   // per-ball Poincare constant used
    int overlap;  // cover overlap used
};
// Requires h harmonic on B_rho(4n) with nu-mean 0 on every ball of the
// internally built eps*n cover of B_rho(n) (same construction as
// proper_cover(env, root, n, max(1, floor(eps*n)))).
LemmaBCheck check_lemma_b(const RootedEnvironment& env, const std::vector<double>& h,
                          double eps, int n);

struct GramProbeReport {
    std::size_t n_candidates = 0;
    std::size_t cover_size = 0;
    double det_n = 0, det_4n = 0, ratio = 0;
    int rank_n = 0, rank_4n = 0;
    std::vector<double> eig_n, eig_4n;  // Gram spectra, descending
    std::string verdict;                // "independent" | "dependent on B(n)"
};
// Gram matrices of the candidates under <f,g>_m = sum_{B_rho(m)} f g nu at
// m = n and m = 4n; numerical rank at threshold 1e-8 * max eigenvalue.
GramProbeReport gram_dimension_probe(const RootedEnvironment& env,
                                     const std::vector<std::vector<double>>& candidates,
                                     int n, double eps);

struct CorrectorResult {
    HarmonicField h;          // harmonic extension of the linear boundary data
    std::vector<double> chi;  // h - <v,x>, dense over env vertices
    std::vector<int> radii;
    std::vector<double> sup_over_r;  // sup_{B_rho(r)} |chi| / r, aligned with radii
};
// Dirichlet solve on B_rho(R) with g(x) = <v, coords(x)>; dyadic
// sublinearity profile for r <= R/2.
CorrectorResult estimate_corrector(const RootedEnvironment& env, const std::vector<double>& v,
                                   int R, double tol = 1e-10);

// Field dump: header then `h <vertex-id> <value>` per ball member.
void write_field(std::ostream& out, const HarmonicField& field, std::uint64_t boundary_hash);

} // namespace rwre
