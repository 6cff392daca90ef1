#ifndef FORGE_UTIL_HPP
#define FORGE_UTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge {

// Error taxonomy maps onto the CLI exit codes: input 2, cap 3, tameness 4,
// internal invariant 5.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& m) : std::runtime_error(m) {}
};
struct cap_error : std::runtime_error {
    explicit cap_error(const std::string& m) : std::runtime_error(m) {}
};
struct tameness_error : std::runtime_error {
    explicit tameness_error(const std::string& m) : std::runtime_error(m) {}
};
struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& m) : std::runtime_error(m) {}
};

#define FORGE_CHECK(cond, msg) \
    do { if (!(cond)) ::forge::forge_fail(msg); } while (0)

[[noreturn]] void forge_fail(const std::string& msg);

// Runtime caps. Loud failures, never silent truncation.
struct Caps {
    int tower_height = 6;
    int cyclotomic = 24;
    int degree_rationals = 32;
    int degree_tower = 16;
    int degree_function_field = 12;
    int parameters = 4;
    int expansion_height = 64;
    int ramification = 24;
    int complex_dim = 3;
    int retries = 40;
};

Caps caps_from_env();

// Deterministic splittable generator (splitmix64). All randomized choices in
// the library flow through this so runs are reproducible from the seed.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}
    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [lo, hi]
    int64_t range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
    Rng split() { return Rng(next()); }

  private:
    uint64_t state_;
};

// Graded lexicographic comparison of exponent vectors; the canonical term
// order used everywhere (printing, hashing, term maps).
struct GrlexLess {
    bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
        long da = 0, db = 0;
        for (int e : a) da += e;
        for (int e : b) db += e;
        if (da != db) return da < db;
        return a < b;
    }
};

inline std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += v[i];
    }
    return s;
}

}  // namespace forge

#endif
