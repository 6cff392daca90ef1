#include <cstdio>
#include <cstdlib>

#include "util.hpp"

namespace forge {

namespace {
int env_int(const char* name, int dflt) {
    const char* v = std::getenv(name);
    if (!v) return dflt;
    return std::atoi(v);
}
}  // namespace

void forge_fail(const std::string& msg) {
    if (std::getenv("FORGE_ABORT")) {
        fprintf(stderr, "FORGE_CHECK failed: %s\n", msg.c_str());
        std::abort();
    }
    throw invariant_error(msg);
}

Caps caps_from_env() {
    Caps c;
    c.tower_height = env_int("FORGE_CAP_TOWER_HEIGHT", c.tower_height);
    c.cyclotomic = env_int("FORGE_CAP_CYCLOTOMIC", c.cyclotomic);
    c.degree_rationals = env_int("FORGE_CAP_DEGREE_Q", c.degree_rationals);
    c.degree_tower = env_int("FORGE_CAP_DEGREE_TOWER", c.degree_tower);
    c.degree_function_field = env_int("FORGE_CAP_DEGREE_FF", c.degree_function_field);
    c.parameters = env_int("FORGE_CAP_PARAMETERS", c.parameters);
    c.expansion_height = env_int("FORGE_CAP_HEIGHT", c.expansion_height);
    c.ramification = env_int("FORGE_CAP_RAMIFICATION", c.ramification);
    c.complex_dim = env_int("FORGE_CAP_COMPLEX_DIM", c.complex_dim);
    c.retries = env_int("FORGE_CAP_RETRIES", c.retries);
    return c;
}

}  // namespace forge
