#ifndef FORGE_MULTIPOLY_HPP
#define FORGE_MULTIPOLY_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tower.hpp"

namespace forge {

using VarCtx = std::shared_ptr<const std::vector<std::string>>;
VarCtx make_vars(std::vector<std::string> names);
int var_index(const VarCtx& v, const std::string& name);

// Sparse exact multivariate polynomial over a field tower. The variable
// context is fixed per session; terms are kept in graded-lex order.
class MultiPoly {
  public:
    using Terms = std::map<std::vector<int>, Elem, GrlexLess>;

    MultiPoly() = default;
    MultiPoly(VarCtx vars, TowerPtr tw) : vars_(std::move(vars)), tw_(std::move(tw)) {}
    MultiPoly(VarCtx vars, const Elem& c);
    static MultiPoly var(const VarCtx& vars, const TowerPtr& tw, int i, int e = 1);
    static MultiPoly constant(const VarCtx& vars, const TowerPtr& tw, const Rational& c);

    const VarCtx& vars() const { return vars_; }
    const TowerPtr& tower() const { return tw_; }
    const Terms& terms() const { return t_; }
    int nvars() const { return static_cast<int>(vars_->size()); }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    Elem constant_value() const;
    void set_term(const std::vector<int>& e, const Elem& c);
    Elem coeff(const std::vector<int>& e) const;

    MultiPoly operator-() const;
    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly scale(const Elem& c) const;
    MultiPoly pow(long e) const;
    bool operator==(const MultiPoly& o) const;
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    int degree(int var) const;
    int total_degree() const;
    bool depends_on(int var) const { return degree(var) > 0; }
    MultiPoly derivative(int var) const;
    MultiPoly coeff_of(int var, int k) const;   // var-exponent zeroed out
    std::vector<MultiPoly> dense_in(int var) const;
    static MultiPoly from_dense(const std::vector<MultiPoly>& c, int var);

    MultiPoly lifted(const TowerPtr& big) const;  // prefix-lift coefficients
    MultiPoly eval_var(int var, const Elem& value) const;

    // largest k with var^k dividing every term; errors on zero input
    int content_exponent(int var) const;
    MultiPoly shift_var_exp(int var, int delta) const;

    const std::pair<const std::vector<int>, Elem>& leading() const;
    MultiPoly monic_grlex() const;
    MultiPoly divexact(const MultiPoly& d) const;

    std::string str() const;
    static int cmp(const MultiPoly& a, const MultiPoly& b);

  private:
    void add_term(const std::vector<int>& e, const Elem& c);
    VarCtx vars_;
    TowerPtr tw_;
    Terms t_;
};

MultiPoly mpoly_gcd(const MultiPoly& a, const MultiPoly& b);
MultiPoly resultant(const MultiPoly& a, const MultiPoly& b, int var);

enum class PolyOp { add, mul, exact_div };
MultiPoly poly_arith(const MultiPoly& a, const MultiPoly& b, PolyOp op);

// Rational function num/den over a tower, canonical: gcd(num,den)=1 and den
// grlex-monic. den != 0 always.
class RationalFunction {
  public:
    RationalFunction() = default;
    RationalFunction(const MultiPoly& n, const MultiPoly& d);
    explicit RationalFunction(const MultiPoly& n);

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    MultiPoly poly_value() const;  // requires is_polynomial

    RationalFunction operator-() const;
    RationalFunction operator+(const RationalFunction& o) const;
    RationalFunction operator-(const RationalFunction& o) const;
    RationalFunction operator*(const RationalFunction& o) const;
    RationalFunction operator/(const RationalFunction& o) const;
    RationalFunction pow(long e) const;
    bool operator==(const RationalFunction& o) const { return num_ == o.num_ && den_ == o.den_; }

    // valuation at (var): v(num) - v(den)
    int valuation(int var) const;

    std::string str() const;

  private:
    MultiPoly num_, den_;
};

// compose f under var -> rational function bindings; unbound vars pass through
RationalFunction substitute(const MultiPoly& f,
                            const std::map<int, RationalFunction>& bindings);

struct NewtonPolygon {
    struct Segment {
        Rational slope;  // positive rational (root valuation)
        int length;      // horizontal length
    };
    std::vector<Segment> segments;  // slopes strictly decreasing
};

// lower convex hull of (i, val_var-adic valuation of the z^i coefficient);
// only positive slopes are reported
NewtonPolygon newton_polygon(const MultiPoly& f, int zvar, int valvar);

// move a polynomial variable into the coefficient field as a transcendental
// parameter (appended to the tower's parameter list); the variable slot stays
// in the context but no longer occurs
MultiPoly promote_var_to_param(const MultiPoly& f, int var);

}  // namespace forge

#endif
