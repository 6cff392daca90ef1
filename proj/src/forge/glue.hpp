#ifndef FORGE_GLUE_HPP
#define FORGE_GLUE_HPP

#include <optional>

#include "galois.hpp"
#include "poset.hpp"

namespace forge {

// bijection on 0-based label indices
struct Permutation {
    std::vector<int> img;
    static Permutation identity(int n);
    Permutation inverse() const;
    Permutation then(const Permutation& second) const;  // second(this(.))
    bool is_identity() const;
};

// pair approximations by exact agreement of their series modulo the common
// truncation; nullopt when a label has no match or several
std::optional<Permutation> match_approximations(const std::vector<Approximation>& from,
                                                const std::vector<Approximation>& to);

// the same, allowing a tower isomorphism over the common parameter field
std::optional<Permutation> match_approximations_iso(const std::vector<Approximation>& from,
                                                    const std::vector<Approximation>& to);

// replace parameter `y` of the tower by a Kummer generator Y placed above the
// constant generators, with Y^m = moebius(xi) - shift; the parameter slot is
// renamed to xi_name. moebius is a rational function of xi alone and shift a
// constant algebraic direction.
struct RebasedTower {
    TowerPtr tower;
    std::vector<int> gen_map;  // old generator index -> new index
    int y_gen = -1;            // index of the Kummer generator
};
RebasedTower rebase_kummer(const TowerPtr& t, int y_param, const std::string& xi_name, int m,
                           const QRat& moebius, const Elem& shift);
Elem rebase_elem(const Elem& x, const RebasedTower& rt, int y_param);

// one side of a cross-chart vertex identification: approximations at the
// chart's codimension-one point plus the localization data of the chart
struct VertexSide {
    std::vector<Approximation> approxs;
    int series_var;    // chart variable generating the prime
    int other_var;     // the complementary chart variable (parameter of the tower)
    int kummer_m;      // chart regularization degree
    QRat moebius;      // chart residue coordinate^m as a function of xi (arity 1)
    Elem shift;        // constant algebraic part of the localization
    // series variable = (common uniformizer) * (other variable)^(-u_absorb):
    // rewriting multiplies the i-th coefficient by y^(u_absorb * i)
    int u_absorb = -1;
};

// express a side's approximations t-adically over towers based at Q(xi)
std::vector<Approximation> rebase_side(const VertexSide& side);

// label matching across two charts at a shared vertex
std::optional<Permutation> match_vertex(const VertexSide& a, const VertexSide& b);

// Galois gluing data over a base poset (Def. of gluing data, partition level).
// Edge fibers are expressed in the owning chart's global labels; each side
// carries the permutation into the global labels at that vertex (identity on
// spanning-tree sides, a transfer map on the others).
struct EdgeGlue {
    int base_edge = -1;
    OrbitPartition fiber;
    Permutation to_x, to_y;
};
struct LegGlue {
    int base_leg = -1;
    OrbitPartition fiber;
    std::vector<int> ram;  // ramification index per block
};
struct GluingData {
    int degree = 0;
    std::vector<OrbitPartition> vertex_fibers;  // per base vertex, global labels
    std::vector<EdgeGlue> edges;
    std::vector<LegGlue> legs;
};

// reconstruct the covering poset over the base from the gluing data
CoveringPoset assemble_covering(const CoveringBasePoset& base, const GluingData& data);

}  // namespace forge

#endif
