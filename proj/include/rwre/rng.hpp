#pragma once

#include <cstdint>
#include <string_view>

namespace rwre {

// Counter-based 64-bit generator (splitmix64 output function). A stream is
// identified by a key; successive outputs are a pure function of
// (key, counter), so replica streams never overlap and can be recreated
// from the master seed alone.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key), ctr_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++ctr_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in {0,...,n-1}
    std::uint64_t next_below(std::uint64_t n) {
        // rejection-free modulo is fine here; n is tiny relative to 2^64
        return next_u64() % n;
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_;
};

// FNV-1a over arbitrary bytes, used to derive stream keys and file hashes.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t x, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (int i = 0; i < 8; ++i) {
        h ^= (x >> (8 * i)) & 0xFF;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Stream key for (master seed, model name, replica index).
inline std::uint64_t derive_stream(std::uint64_t master_seed, std::string_view model,
                                   std::uint64_t replica) {
    std::uint64_t h = fnv1a_u64(master_seed);
    h = fnv1a(model, h);
    h = fnv1a_u64(replica, h);
    return h;
}

} // namespace rwre
