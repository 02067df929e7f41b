#pragma once

#include "rwre/environment.hpp"
#include "rwre/generators.hpp"
#include "rwre/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rwre {

// Ensemble model description: which generator, with which parameters.
// Replica i of an ensemble uses stream seed derive_stream(master_seed, name, i).
struct ModelSpec {
    std::string name;  // lattice | torus | percolation | conductance | balanced | sierpinski | kesten
    int d = 2;
    int L = 16;
    int side = 0;       // torus-only override
    double p = 0.7;     // percolation
    double alpha = 0.5; // conductance
    int level = 5;      // sierpinski
    int depth = 12;     // kesten
    std::vector<double> offspring_pmf = {0.25, 0.5, 0.25};

    bool deterministic() const {
        return name == "lattice" || name == "torus" || name == "sierpinski";
    }
};

RootedEnvironment make_env(const ModelSpec& spec, std::uint64_t master_seed,
                           std::uint64_t replica);

// Runs fn(i) for i in [0,count) on `threads` workers and returns results in
// index order, so reductions are independent of the thread count.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn);

} // namespace rwre

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace rwre {

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn) {
    std::vector<T> out(count);
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nw = static_cast<int>(std::min<std::size_t>(threads, count));
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    return out;
}

} // namespace rwre
