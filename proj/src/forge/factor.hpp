#ifndef FORGE_FACTOR_HPP
#define FORGE_FACTOR_HPP

#include <utility>
#include <vector>

#include "multipoly.hpp"
#include "tower.hpp"
#include "util.hpp"

namespace forge {

// dense univariate polynomial over a tower, c[k] = coefficient of z^k
using UPoly = std::vector<Elem>;

int updeg(const UPoly& f);
UPoly uptrim(UPoly f);
UPoly upadd(const UPoly& a, const UPoly& b);
UPoly upsub(const UPoly& a, const UPoly& b);
UPoly upmul(const UPoly& a, const UPoly& b);
UPoly upscale(const UPoly& a, const Elem& c);
UPoly upmonic(const UPoly& a);
std::pair<UPoly, UPoly> updivrem(const UPoly& a, const UPoly& b);
UPoly upgcd(const UPoly& a, const UPoly& b);  // monic
UPoly upderiv(const UPoly& a);
Elem upeval(const UPoly& a, const Elem& x);
UPoly upshift(const UPoly& f, const Elem& d);          // f(z + d)
UPoly uplift(const UPoly& f, const TowerPtr& big);     // coefficient lift
bool upeq(const UPoly& a, const UPoly& b);
std::string upstr(const UPoly& f, const std::string& zname = "z");

struct FactorPart {
    UPoly poly;        // monic
    int multiplicity;
};
struct Factorization {
    Elem unit;                       // input = unit * prod poly^mult
    std::vector<FactorPart> factors; // canonically sorted
};

// Yun's squarefree decomposition (characteristic zero).
std::vector<std::pair<UPoly, int>> squarefree_decomposition(const UPoly& f);
bool upoly_is_squarefree(const UPoly& f);

// Irreducible factorization over the tower's field: Q towers (Trager via
// norms), rational function fields over them (evaluation + Hensel lifting in
// one parameter at a time), plain Q (Zassenhaus).
Factorization factor_upoly(const UPoly& f, const Caps& caps, Rng rng);

bool is_irreducible(const UPoly& f, const Caps& caps, Rng rng);

// roots of f lying inside its own tower, with multiplicity
std::vector<std::pair<Elem, int>> roots_in_tower(const UPoly& f, const Caps& caps, Rng rng);

// checked simple extension: p must be monic irreducible over t's field.
// Degree-1 polys return the explicit root with the tower unchanged.
std::pair<TowerPtr, Elem> adjoin_root(const TowerPtr& t, const UPoly& p,
                                      const std::string& gen_name, const Caps& caps, Rng rng);

// primitive m-th root of unity; reuses an existing one when present
std::pair<TowerPtr, Elem> cyclotomic_adjoin(const TowerPtr& t, int m, const Caps& caps, Rng rng);

// cyclotomic polynomial over Q as integer coefficient list
std::vector<Rational> cyclotomic_polynomial(int m);

// minimal polynomial of `a` over the subtower at base_level (monic, dense)
UPoly minimal_polynomial(const Elem& a, int base_level);

// all automorphisms of the tower fixing Q(params) and the constant gens up to
// `fixed_levels` (used by conjugate-closure checks); each is the list of
// generator images
std::vector<std::vector<Elem>> tower_automorphisms(const TowerPtr& t, const Caps& caps, Rng rng);
Elem apply_automorphism(const Elem& x, const std::vector<Elem>& gen_images);

}  // namespace forge

#endif
