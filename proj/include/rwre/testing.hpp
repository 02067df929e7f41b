#pragma once

#include "rwre/entropy.hpp"
#include "rwre/rng.hpp"
#include "rwre/walk.hpp"

#include <cstdint>

namespace rwre {

// Random law on vertex ids 0..n_atoms-1 (Dirichlet-like via normalized
// uniforms; occasional zero atoms to exercise edge cases).
inline DistributionVector random_law(CounterRng& rng, int n_atoms) {
    DistributionVector mu;
    double total = 0;
    for (int i = 0; i < n_atoms; ++i) {
        double m = rng.next_double();
        if (rng.next_below(8) == 0) m = 0;  // sprinkle exact zeros
        if (m > 0) {
            mu.idx.push_back(i);
            mu.mass.push_back(m);
            total += m;
        }
    }
    if (mu.idx.empty()) {
        mu.idx.push_back(0);
        mu.mass.push_back(1.0);
        return mu;
    }
    for (auto& m : mu.mass) m /= total;
    return mu;
}

inline JointTable random_joint(CounterRng& rng, std::size_t nx, std::size_t ny) {
    JointTable q;
    q.nx = nx;
    q.ny = ny;
    q.q.resize(nx * ny);
    double total = 0;
    for (auto& v : q.q) {
        v = rng.next_below(6) == 0 ? 0.0 : rng.next_double();
        total += v;
    }
    if (total == 0) {
        q.q[0] = 1.0;
        return q;
    }
    for (auto& v : q.q) v /= total;
    return q;
}

// Product of independent marginals (lemma XY equality case).
inline JointTable product_joint(CounterRng& rng, std::size_t nx, std::size_t ny) {
    std::vector<double> px(nx), py(ny);
    double sx = 0, sy = 0;
    for (auto& v : px) {
        v = rng.next_double() + 1e-3;
        sx += v;
    }
    for (auto& v : py) {
        v = rng.next_double() + 1e-3;
        sy += v;
    }
    JointTable q;
    q.nx = nx;
    q.ny = ny;
    q.q.resize(nx * ny);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) q.q[x * ny + y] = (px[x] / sx) * (py[y] / sy);
    return q;
}

} // namespace rwre
