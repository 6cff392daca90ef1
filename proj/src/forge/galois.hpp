#ifndef FORGE_GALOIS_HPP
#define FORGE_GALOIS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "factor.hpp"
#include "newton.hpp"
#include "series.hpp"

namespace forge {

// Incremental field isomorphism between (subfields of) two towers over the
// same parameter field, pinned coefficient by coefficient. Extending with a
// pair (c, d) succeeds exactly when mapping c to d is consistent with
// everything pinned so far.
class IsoMatcher {
  public:
    IsoMatcher(TowerPtr a, TowerPtr b);

    // pins all constant generators of a shared tower to themselves
    void fix_constants();

    bool pin(const Elem& c, const Elem& d);

  private:
    TowerPtr a_, b_;
    SubfieldFlag fa_, fb_;
};

// A cyclic substitution action on approximations: the chart variables pick up
// phases zeta^(weight * exponent) and one tower parameter may be rotated.
struct MuAction {
    int order = 1;                  // m
    Elem zeta;                      // primitive m-th root of unity in the tower
    std::vector<int> var_weight;    // per chart variable
    int param_index = -1;           // rotated parameter, -1 for none
    int param_weight = 0;
    // constant phase correction (z-rescaled charts transform with an offset)
    int phase_offset = 0;
};

// apply the k-th power of the action
MSeries apply_action(const MSeries& s, const MuAction& act, int k);

// do two approximations match under a tower isomorphism fixing Q(params) and
// the constant generators? compared below the common truncation; `pins` are
// additional elements the isomorphism must fix (declared residue extensions)
bool series_iso_match(const MSeries& a, const MSeries& b);
bool series_iso_match_pinned(const MSeries& a, const MSeries& b, const std::vector<Elem>& pins);
// exact variant: equality of series over a shared tower
bool series_exact_match(const MSeries& a, const MSeries& b);

struct OrbitPartition {
    std::string point;
    std::vector<std::vector<int>> blocks;  // indices into the approximation list
    std::vector<std::string> witness;      // one line per merged pair
};

// orbits of root labels under the decomposition group at a codimension-one
// point: tower isomorphisms over the chart residue field combined with the
// declared Kummer actions
OrbitPartition vertex_orbits(const std::vector<Approximation>& approxs,
                             const std::vector<MuAction>& actions, const std::string& point,
                             const std::vector<Elem>& pins = {});

// orbits at a double point: exact series matching under the Kummer actions
OrbitPartition edge_orbits_kummer(const std::vector<Approximation>& approxs,
                                  const std::vector<MuAction>& actions, const std::string& point);

Rational edge_length(const Rational& base_length, const std::vector<int>& block);

// block maps V/D_e -> V/D_x and V/D_e -> V/D_y by containment; throws on a
// refinement violation
struct OrbitDiagram {
    std::vector<int> to_x;  // per edge block, index of the containing x block
    std::vector<int> to_y;
};
OrbitDiagram orbit_diagram(const OrbitPartition& edge, const OrbitPartition& x,
                           const OrbitPartition& y);

// orbit partition of an arbitrary matching relation; used by both orbit ops
OrbitPartition orbits_of_relation(int n, const std::function<bool(int, int)>& related,
                                  const std::string& point);

}  // namespace forge

#endif
