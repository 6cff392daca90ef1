#ifndef FORGE_TOWER_HPP
#define FORGE_TOWER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpoly.hpp"

namespace forge {

class Tower;
using TowerPtr = std::shared_ptr<const Tower>;

// A number-field style tower over Q(params): an ordered list of transcendental
// parameters followed by successive simple algebraic extensions, one monic
// minimal polynomial per level. Towers are immutable; extensions build new ones.
class Tower : public std::enable_shared_from_this<Tower> {
  public:
    // raw coefficient of a level's minimal polynomial: gen-exponents have
    // arity = index of the level (only lower generators may occur)
    using RawElem = std::map<std::vector<int>, QRat, GrlexLess>;
    struct Level {
        std::string name;
        std::vector<RawElem> minpoly;  // dense, monic: back() == 1
    };

    static TowerPtr make(std::vector<std::string> params);

    const std::vector<std::string>& params() const { return params_; }
    const std::vector<Level>& levels() const { return levels_; }
    int nparams() const { return static_cast<int>(params_.size()); }
    int ngens() const { return static_cast<int>(levels_.size()); }
    int level_degree(int i) const { return static_cast<int>(levels_[i].minpoly.size()) - 1; }
    long total_degree() const;
    int param_index(const std::string& name) const;

    // structural prefix test: same params, levels a prefix of other's
    static bool prefix_of(const Tower& small, const Tower& big);
    static bool same(const Tower& a, const Tower& b);

    std::string describe() const;

  private:
    friend class Elem;
    friend TowerPtr tower_extend(const TowerPtr&, const std::string&,
                                 const std::vector<class Elem>&);
    friend TowerPtr tower_add_param(const TowerPtr&, const std::string&, int position);
    std::vector<std::string> params_;
    std::vector<Level> levels_;
};

// Element of a tower in reduced normal form: a sparse polynomial in the
// generators (exponent < level degree) with Q(params) coefficients.
class Elem {
  public:
    Elem() = default;
    explicit Elem(TowerPtr t) : tw_(std::move(t)) {}
    Elem(TowerPtr t, const QRat& c);
    Elem(TowerPtr t, const Rational& c) : Elem(t, QRat(t->nparams(), c)) {}

    static Elem gen(const TowerPtr& t, int i);          // the i-th generator
    static Elem param(const TowerPtr& t, int i);        // the i-th parameter
    static Elem from_terms(TowerPtr t, std::map<std::vector<int>, QRat, GrlexLess> terms);

    const TowerPtr& tower() const { return tw_; }
    bool is_zero() const { return t_.empty(); }
    bool is_qrat() const;               // lies in the base field Q(params)
    QRat qrat_value() const;            // requires is_qrat()
    bool is_rational_const() const;
    Rational rational_value() const;
    const std::map<std::vector<int>, QRat, GrlexLess>& terms() const { return t_; }

    Elem operator-() const;
    Elem operator+(const Elem& o) const;
    Elem operator-(const Elem& o) const;
    Elem operator*(const Elem& o) const;
    Elem operator/(const Elem& o) const;
    Elem inv() const;
    Elem pow(long e) const;
    bool operator==(const Elem& o) const;
    bool operator!=(const Elem& o) const { return !(*this == o); }

    // lift into a tower this element's tower is a prefix of
    Elem lifted(const TowerPtr& big) const;
    // drop to a prefix tower when no higher generator occurs
    std::optional<Elem> try_lower(const TowerPtr& small) const;

    // does the element involve generator i / parameter i
    bool uses_gen(int i) const;
    bool uses_param(int i) const;
    int top_gen() const;  // largest generator index occurring, -1 if none

    // coordinates over Q(params) w.r.t. the full monomial basis of the tower
    std::vector<QRat> coords() const;
    static Elem from_coords(const TowerPtr& t, const std::vector<QRat>& v);

    // substitute a value for parameter `pi`; the result lives in a tower with
    // that parameter removed only if no minimal polynomial uses it, otherwise
    // caller uses rebase machinery. Throws on denominator vanishing.
    Elem eval_param(int pi, const Rational& v, const TowerPtr& target) const;

    std::string str() const;
    static int cmp(const Elem& a, const Elem& b);  // deterministic total order

  private:
    friend TowerPtr tower_extend(const TowerPtr&, const std::string&, const std::vector<Elem>&);
    void reduce();
    void add_term(const std::vector<int>& e, const QRat& c);
    TowerPtr tw_;
    std::map<std::vector<int>, QRat, GrlexLess> t_;
};

// checked-free extension (irreducibility is the caller's contract; the factor
// module provides the checked adjoin_root on top of this)
TowerPtr tower_extend(const TowerPtr& t, const std::string& name,
                      const std::vector<Elem>& monic_minpoly);

// append a parameter (at `position` in the param list, -1 = end); all levels
// are carried over
TowerPtr tower_add_param(const TowerPtr& t, const std::string& name, int position = -1);

// align two elements into a common tower by prefix-lifting; throws input_error
// if neither tower prefixes the other
std::pair<Elem, Elem> align(const Elem& a, const Elem& b);

enum class ArithOp { add, sub, mul, div };
Elem tower_arith(const Elem& a, const Elem& b, ArithOp op);

// Incremental subfield of a tower over Q(params), with membership tests,
// coordinates and minimal polynomials by linear dependence among powers.
class SubfieldFlag {
  public:
    explicit SubfieldFlag(TowerPtr t);

    const TowerPtr& tower() const { return tw_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<Elem>& basis() const { return basis_; }
    const std::vector<Elem>& gens() const { return gens_; }
    const std::vector<int>& gen_degrees() const { return gen_deg_; }

    // coordinates of x in the current subfield basis, if x lies in it
    std::optional<std::vector<QRat>> coords_in(const Elem& x) const;
    bool contains(const Elem& x) const { return coords_in(x).has_value(); }

    // monic minimal polynomial of x over the current subfield; each
    // coefficient is returned both as a tower element and as basis coordinates
    struct MinPoly {
        std::vector<Elem> coeff;                 // dense, monic
        std::vector<std::vector<QRat>> coords;   // per coefficient, in flag basis
        int degree() const { return static_cast<int>(coeff.size()) - 1; }
    };
    MinPoly min_poly(const Elem& x) const;

    // extend the subfield by x (no-op if already inside); returns the degree
    int adjoin(const Elem& x);

  private:
    void rebuild_matrix();
    TowerPtr tw_;
    std::vector<Elem> gens_;
    std::vector<int> gen_deg_;
    std::vector<Elem> basis_;                 // products of generator powers
    std::vector<std::vector<QRat>> rows_;     // row-echelon of basis coords
    std::vector<int> pivot_;                  // pivot column per row
    std::vector<std::vector<QRat>> inv_rec_;  // expresses echelon rows in basis
};

// evaluate a dense polynomial (over the tower) at an element
Elem eval_poly(const std::vector<Elem>& poly, const Elem& x);

}  // namespace forge

#endif
