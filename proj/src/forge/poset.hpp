#ifndef FORGE_POSET_HPP
#define FORGE_POSET_HPP

#include <functional>
#include <string>
#include <vector>

#include "rational.hpp"
#include "util.hpp"

namespace forge {

// Finite poset on labeled elements; the full order relation is kept and the
// Hasse diagram (transitive reduction) is derived.
struct FinitePoset {
    std::vector<std::string> labels;
    std::vector<std::vector<bool>> le;  // le[i][j] : i <= j

    int size() const { return static_cast<int>(labels.size()); }
    static FinitePoset from_relation(std::vector<std::string> labels,
                                     const std::function<bool(int, int)>& leq);
    static FinitePoset from_covers(std::vector<std::string> labels,
                                   const std::vector<std::pair<int, int>>& covers);
    void validate() const;  // antisymmetry, reflexivity, transitivity
};

// covering relations (transitive reduction); errors on order violations
std::vector<std::pair<int, int>> hasse(const FinitePoset& p);

struct SimplicialComplex {
    std::vector<std::string> vertices;
    std::vector<std::vector<int>> faces;  // all nonempty faces, each sorted
    int dimension() const;
};

// faces = totally ordered subsets (chains)
SimplicialComplex order_complex(const FinitePoset& p, int dim_cap);

// reduced rational Betti numbers b~_0 .. b~_dim via exact boundary ranks
std::vector<long> homology_ranks(const SimplicialComplex& c, int dim_cap);

// intersection poset from combinatorial incidence: components plus labeled
// intersection points (each point lists the components containing it)
struct IncidencePoint {
    std::string label;
    std::vector<int> components;
};
FinitePoset intersection_poset(const std::vector<std::string>& components,
                               const std::vector<IncidencePoint>& points);

// tame Riemann-Hurwitz bookkeeping: 2g - 2 = n(2 g0 - 2) + sum (e_P - 1);
// errors when the result is not a nonnegative integer
int component_genus(int n, int g0, const std::vector<int>& ramification_indices);

// ---- covering poset containers (assembled by the glue module) ----

struct BaseVertexData {
    std::string name;
    int genus0 = 0;  // base components are rational
};
struct BaseEdgeData {
    std::string name;
    int x = -1, y = -1;   // incident base vertices
    Rational length;      // annulus length m
};
struct BaseLegData {
    std::string name;     // marked point label
    int vertex = -1;      // reduction component
};
struct CoveringBasePoset {
    std::vector<BaseVertexData> vertices;
    std::vector<BaseEdgeData> edges;
    std::vector<BaseLegData> legs;
    FinitePoset poset(int degree_unused = 0) const;
};

struct CoverVertex {
    int base = -1;
    std::vector<int> orbit;  // global root labels (1-based)
    int genus = 0;
};
struct CoverEdge {
    int base = -1;
    std::vector<int> orbit;
    int vx = -1, vy = -1;  // endpoints among cover vertices
    Rational length;
};
struct CoverLeg {
    int base = -1;
    int vertex = -1;  // cover vertex carrying this point
    std::vector<int> orbit;
    int ram = 1;
};
struct CoveringPoset {
    CoveringBasePoset base;
    int degree = 0;
    std::vector<CoverVertex> vertices;
    std::vector<CoverEdge> edges;
    std::vector<CoverLeg> legs;

    void canonicalize();  // deterministic ordering: base image then orbit
    FinitePoset poset() const;
    // reduced first Betti number of the vertex/edge 1-skeleton
    long betti1() const;
    long components() const;
    long total_genus() const;  // sum of component genera
};

}  // namespace forge

#endif
