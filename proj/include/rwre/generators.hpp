#pragma once

#include "rwre/environment.hpp"

#include <cstdint>
#include <vector>

namespace rwre {

// Z^d box {-L..L}^d (or discrete torus). Unit edge weights, SRW kernel.
// For the torus, `side` overrides the default 2L+1 circumference when > 0
// (the box parametrization only produces odd sides).
RootedEnvironment gen_lattice(int d, int L, bool torus, int side = 0);

// Bond percolation on the box: edges kept independently with probability p,
// largest component extracted, root = component vertex nearest the origin
// (lexicographic tie-break). Unit weights on retained edges.
RootedEnvironment gen_percolation(int d, int L, double p, std::uint64_t seed);

// iid edge conductances uniform on [alpha, 1/alpha] on the full box.
RootedEnvironment gen_random_conductance(int d, int L, double alpha, std::uint64_t seed);

// Non-reversible balanced environment: per-site positive axis rates with
// P(x,x+e_i) = P(x,x-e_i) exactly. Boundary sites drop whole axes so the
// balance is never broken; a site with no surviving axis holds in place.
RootedEnvironment gen_balanced(int d, int L, std::uint64_t seed);

// Graphical Sierpinski gasket of the given level, built inside-out by corner
// identification. Unit weights, root at the apex corner. level <= 10.
RootedEnvironment gen_sierpinski(int level);

// Critical Galton-Watson tree conditioned to survive (Kesten's tree):
// size-biased offspring along an infinite spine, truncated at `depth`.
// The offspring pmf must have mean 1 (within 1e-9) and finite support.
RootedEnvironment gen_kesten_tree(const std::vector<double>& offspring_pmf, int depth,
                                  std::uint64_t seed);

} // namespace rwre
