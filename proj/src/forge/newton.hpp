#ifndef FORGE_NEWTON_HPP
#define FORGE_NEWTON_HPP

#include <string>
#include <vector>

#include "factor.hpp"
#include "series.hpp"

namespace forge {

struct ramification_error : tameness_error {
    int needed;
    explicit ramification_error(int q)
        : tameness_error("non-integral slope: chart needs Kummer regularization of degree " +
                         std::to_string(q)),
          needed(q) {}
};

// One branch step of the symbolic Newton-Puiseux iteration on the reduction
// of f modulo the expansion variable.
struct NPBranch {
    Elem d0;          // adjoined constant coefficient
    SPoly f2;         // shifted-rescaled continuation polynomial
    Rational slope;   // segment slope (root valuation)
    int content;      // power of the variable divided out
    bool hensel;      // simple root modulo the variable: unique lift
    int local_degree;
};

// pin the branch choice when embedding a generator whose minimal polynomial
// matches: the root whose constant term equals `reduction` is taken
struct EmbedHint {
    UPoly minpoly;       // over the tower of the first-stage expansion
    Rational reduction;
};

struct NPOptions {
    int height = 8;        // expansion truncation (exclusive bound)
    bool allow_ram = false;
    std::string gen_prefix = "c";
    std::vector<EmbedHint> embed_hints;
    Caps caps;
};

// np_step: factor the reduction, shift by each root, report slopes
std::pair<TowerPtr, std::vector<NPBranch>> np_step(const SPoly& f, const NPOptions& opt, Rng rng);

struct NPRoot {
    TSeries series;  // in s; with ramification the variable is t^(1/ram)
    int ram = 1;     // branch ramification index (divides the global one)
};

struct NPResult {
    TowerPtr tower;              // shared extension housing every coefficient
    std::vector<NPRoot> roots;   // exactly deg(f mod s) labeled roots
    int ram = 1;                 // global substitution s = t^(1/ram) applied
};

// expand all integral roots of f (those with nonnegative valuation whose
// count equals the degree of the reduction) to the requested height; with
// allow_ram the variable is refined by t -> t^(1/q) as needed
NPResult expand_roots(const SPoly& f, const NPOptions& opt, Rng rng);

// a chart chain expansion: approximations at every chain point
struct Approximation {
    int label;       // 1..deg f, assigned at the finest chain point
    MSeries series;  // in the expansion variables of this chain point
};

struct ChainExpansion {
    // per chain point (outermost prime first), deg f approximations with
    // chain-consistent labels
    std::vector<std::vector<Approximation>> points;
    std::vector<int> heights;  // per expansion variable, in chain order
};

// chain_vars lists the chart variable indices in expansion order: the first
// generates the smallest prime. All other chart variables must have been
// promoted into the coefficient tower as parameters beforehand.
ChainExpansion expand_chain(const MultiPoly& f, int zvar, const std::vector<int>& chain_vars,
                            std::vector<int> heights, const NPOptions& opt, Rng rng);

// minimal uniform truncation at which all series are pairwise distinct,
// + 1 safety margin applied by the caller; throws when f is not squarefree
// (detected as inseparability within the computed height)
int separating_height(const std::vector<Approximation>& approxs);

// ramified univariate Puiseux expansion over K(t)
struct PuiseuxBranch {
    TSeries series;  // in s = t^(1/e)
    int e;           // ramification index
};
struct PuiseuxResult {
    TowerPtr tower;
    std::vector<PuiseuxBranch> branches;
    int global_ram;
};
PuiseuxResult puiseux_univariate(const MultiPoly& g, int zvar, int tvar, int height, int e_cap,
                                 const Caps& caps, Rng rng);

// residual check: v(f(series)) exceeds the declared truncation
bool residual_vanishes(const SPoly& f, const TSeries& root);

}  // namespace forge

#endif
