#ifndef FORGE_PIPELINE_HPP
#define FORGE_PIPELINE_HPP

#include <map>
#include <optional>
#include <string>

#include "glue.hpp"
#include "models.hpp"
#include "poset.hpp"

namespace forge {

struct FieldSpec {
    // successive simple extensions of Q: (generator name, minimal polynomial
    // text in that generator over the previous field)
    std::vector<std::pair<std::string, std::string>> gens;
};

struct SkeletonInput {
    FieldSpec field;
    std::string uniformizer = "t";
    std::string xvar = "x";
    std::string zvar = "z";
    // named abbreviations usable in the polynomial (e.g. p = t^2)
    std::vector<std::pair<std::string, std::string>> defines;
    std::string polynomial;
    int truncation = 0;  // 0: adaptive
    uint64_t seed = 1;
    std::optional<int> residue_char;
    Caps caps;
};

struct ChartPointSpec {
    std::string global_name;
    std::vector<int> prime;  // chart variable indices generating the prime
    // gluing data at shared codimension-one points: the common uniformizer is
    // series_var * other_var^u_absorb and the common residue coordinate xi
    // satisfies (chart residue)^res_power = moebius(xi)
    int u_absorb = 0;
    int res_power = 1;
    std::string moebius = "xi";  // expression in xi
};

struct ResidueExtSpec {
    std::string at;        // global point name
    std::string minpoly;   // in `w` over the chart variables
    std::string reduction; // value at the deeper prime
};

struct ChartSpec {
    std::string name;
    std::vector<std::string> vars;  // two chart variables
    std::map<std::string, std::string> subst;  // ambient var -> chart expression
    std::vector<int> kummer{1, 1};
    std::string action = "toric";  // "toric" (independent) or "annulus" (antidiagonal)
    std::vector<ChartPointSpec> points;
    std::vector<ResidueExtSpec> residue_ext;
};

struct ChartsInput {
    FieldSpec field;
    std::vector<std::string> ambient;  // ambient variable names
    std::string zvar = "z";
    std::string polynomial;
    std::vector<ChartSpec> charts;
    // spanning tree as pairs (vertex point, double point); edges of the base
    // Hasse diagram not covered get transfer maps
    std::vector<std::pair<std::string, std::string>> tree;
    int truncation = 0;
    uint64_t seed = 1;
    Caps caps;
};

// run diagnostics the emitters print alongside the covering
struct Bundle {
    CoveringPoset covering;
    std::vector<std::string> log;
    std::map<std::string, std::vector<std::string>> approximations;  // per point
    std::map<std::string, std::vector<std::string>> orbits;          // per point
    std::vector<std::string> matchings;
    long betti1 = 0;
    long genus_total = 0;
    int rescale = 1;
    int degree = 0;
};

Bundle run_skeleton(const SkeletonInput& in);
Bundle run_charts(const ChartsInput& in);

// build a tower from a field specification
TowerPtr build_field(const FieldSpec& spec, const Caps& caps, Rng rng);

}  // namespace forge

#endif
