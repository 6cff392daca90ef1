#ifndef FORGE_MODELS_HPP
#define FORGE_MODELS_HPP

#include <optional>

#include "newton.hpp"

namespace forge {

// A branch point of the covering, as a truncated expansion of its coordinate
// in the (possibly rescaled) uniformizer. Points near infinity are stored
// through the flipped coordinate 1/x.
struct BranchPoint {
    int index = 0;
    bool at_infinity = false;  // exactly [1 : 0]
    TSeries x_series;          // finite points: expansion of x_P
    // normalized homogeneous pair with min valuation 0
    TSeries U, V;
};

struct ValuationMatrix {
    std::vector<std::vector<Rational>> a;  // symmetric; diagonal unused
    int size() const { return static_cast<int>(a.size()); }
};

// branch locus of f (separable in z) over K(x): Puiseux expansions of the
// z-discriminant roots, plus infinity when the covering ramifies there
struct BranchLocus {
    std::vector<BranchPoint> points;
    TowerPtr tower;   // common coefficient tower
    int rescale = 1;  // s = t^(1/rescale); all series live in s
};
BranchLocus branch_points(const MultiPoly& f, int zvar, int xvar, int tvar, int height,
                          const Caps& caps, Rng rng);

ValuationMatrix plucker_matrix(const BranchLocus& locus);

struct ClusterNode {
    int parent = -1;
    int depth = 0;             // valuation of the defining ball, in s-units
    bool flipped = false;      // subtree works in the coordinate 1/x
    TSeries center;            // truncated series in the subtree coordinate
    std::vector<int> children;
    std::vector<int> legs;     // branch point indices attached here
};

struct ClusterTree {
    std::vector<ClusterNode> nodes;  // node 0 is the root (Gauss point)
    TowerPtr tower;
    int rescale = 1;
    std::vector<int> leaf_node;        // per branch point, the carrying node
    std::vector<TSeries> leaf_series;  // per branch point, series in the node coordinate
};

// metric tree on the branch points from the valuation matrix; errors with the
// offending triple when the ultrametric tree condition fails
ClusterTree cluster_tree(const ValuationMatrix& A, const BranchLocus& locus);

// localization of one annulus end: chart_residue^m = moebius(xi) - shift
struct EndLocalization {
    QRat moebius;  // rational part, arity 1 in xi
    Elem shift;    // constant algebraic part (directions of conjugate centers)
};

// one chart per tree edge, identified by the child node
struct AnnulusChart {
    int child = -1;    // tree node id; the edge is parent(child) -- child
    int a = 0, b = 0;  // valuations of the annulus, b - a = m
    int m = 1;
    bool flipped = false;
    TSeries center;
    EndLocalization deep;     // at the child vertex
    EndLocalization shallow;  // at the parent vertex
};

std::vector<AnnulusChart> annulus_charts(const ClusterTree& tree);

// the Kummer-regularized smooth chart: substitution into the covering
// polynomial; x -> center + (x1 x2)^a x1^m in the chart coordinate and
// t -> (x1 x2)^rescale. For flipped charts the coordinate is 1/x.
struct RegularChart {
    MultiPoly f;      // in (z, x1, x2) over the chart tower
    VarCtx vars;      // {z, x1, x2}
    int m = 1;        // Kummer degree
    int rescale = 1;
    MultiPoly unit;   // scaling applied to clear denominators
};
RegularChart kummer_regularize(const MultiPoly& f, int zvar, int xvar, int tvar,
                               const AnnulusChart& chart, const ClusterTree& tree,
                               std::optional<int> residue_char);

// direction residue: the s^depth coefficient of (series - center)
Elem direction_residue(const TSeries& series, const ClusterNode& at);

}  // namespace forge

#endif
