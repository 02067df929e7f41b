#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwre {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnvMeta {
    std::string model;
    int d = 0;          // embedding dimension, 0 if not embedded
    int L = 0;          // box radius, 0 if not a box model
    std::uint64_t seed = 0;
    bool torus = false;
    std::map<std::string, std::string> params;
};

// A finite rooted Markov chain. The kernel is stored CSR; when the chain is
// reversible the edge weights nu(x,y) are kept alongside and the kernel is
// always nu(x,y)/nu(x). Coordinates are optional (embedded models).
struct RootedEnvironment {
    std::vector<std::int64_t> row_ptr;   // size n+1
    std::vector<std::int32_t> col;
    std::vector<double> prob;

    std::vector<double> edge_weight;     // aligned with col; empty if non-reversible
    std::vector<double> vertex_weight;   // nu(x); empty if non-reversible

    std::vector<std::int32_t> coord;     // flat, meta.d per vertex; empty if not embedded
    std::int32_t root = 0;
    EnvMeta meta;

    std::int32_t num_vertices() const { return static_cast<std::int32_t>(row_ptr.size()) - 1; }
    bool reversible() const { return !vertex_weight.empty(); }
    bool embedded() const { return !coord.empty(); }

    std::span<const std::int32_t> coords_of(std::int32_t v) const {
        return {coord.data() + static_cast<std::size_t>(v) * meta.d,
                static_cast<std::size_t>(meta.d)};
    }

    // degree in the kernel (number of outgoing arcs)
    std::int64_t out_degree(std::int32_t v) const { return row_ptr[v + 1] - row_ptr[v]; }

    // nu(x) for reversible chains, 1 otherwise (used for stationarity weights)
    double stationary_weight() const { return reversible() ? vertex_weight[root] : 1.0; }

    // maximal out-degree over vertices
    int max_degree() const;

    // Largest exact-propagation horizon honoring the boundary budget
    // n <= (L/4)^2 for box models; unbounded for the torus and for models
    // that are whole finite graphs (gasket, tree).
    std::int64_t horizon_budget() const;
    void check_horizon(std::int64_t n) const;

    // Throws ValidationError if any structural invariant fails:
    // row sums, kernel/weight consistency, connectivity, coordinate injectivity.
    void validate() const;
};

struct BallView {
    std::int32_t center = 0;
    int radius = 0;
    std::vector<std::int32_t> members;   // sorted by vertex id
    std::vector<int> dist;               // aligned with members
    std::vector<std::int32_t> boundary;  // vertices at exact distance `radius`
    std::vector<std::int32_t> inner;     // members minus boundary

    bool contains(std::int32_t v) const;
    int dist_of(std::int32_t v) const;   // -1 if not a member
};

// BFS metric ball. For non-reversible chains the distance is directed:
// d(x,y) = min{n : P^n(x,y) > 0}, i.e. BFS over positive-probability arcs.
BallView ball(const RootedEnvironment& env, std::int32_t x, int r);

// BFS distances from x to every vertex (directed for non-reversible),
// -1 where unreachable.
std::vector<int> bfs_distances(const RootedEnvironment& env, std::int32_t x);

// Recompute the kernel from the stored edge weights (reversible case).
void kernel_from_weights(RootedEnvironment& env);

// Content hash of the environment (kernel + coordinates + root).
std::uint64_t env_hash(const RootedEnvironment& env);

} // namespace rwre
