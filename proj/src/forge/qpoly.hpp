#ifndef FORGE_QPOLY_HPP
#define FORGE_QPOLY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rational.hpp"
#include "util.hpp"

namespace forge {

// Sparse multivariate polynomial over Q in a fixed number of parameter
// variables. Term order is graded lex throughout.
class QPoly {
  public:
    using Terms = std::map<std::vector<int>, Rational, GrlexLess>;

    QPoly() : arity_(0) {}
    explicit QPoly(int arity) : arity_(arity) {}
    QPoly(int arity, const Rational& c) : arity_(arity) {
        if (!c.is_zero()) t_[std::vector<int>(arity, 0)] = c;
    }
    static QPoly var(int arity, int i, int e = 1) {
        QPoly p(arity);
        std::vector<int> ex(arity, 0);
        ex[i] = e;
        p.t_[ex] = Rational(1);
        return p;
    }

    int arity() const { return arity_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    Rational constant_value() const;  // requires is_constant()
    const Terms& terms() const { return t_; }
    void set_term(const std::vector<int>& e, const Rational& c) {
        if (c.is_zero()) t_.erase(e); else t_[e] = c;
    }
    Rational coeff(const std::vector<int>& e) const {
        auto it = t_.find(e);
        return it == t_.end() ? Rational(0) : it->second;
    }

    QPoly operator-() const;
    QPoly operator+(const QPoly& o) const;
    QPoly operator-(const QPoly& o) const;
    QPoly operator*(const QPoly& o) const;
    QPoly scale(const Rational& c) const;
    QPoly pow(long e) const;

    bool operator==(const QPoly& o) const { return arity_ == o.arity_ && t_ == o.t_; }
    bool operator!=(const QPoly& o) const { return !(*this == o); }

    int degree(int var) const;
    int total_degree() const;
    bool depends_on(int var) const { return degree(var) > 0; }
    QPoly derivative(int var) const;

    // view as univariate in `var`: coefficient of var^k
    QPoly coeff_of(int var, int k) const;
    // substitute numeric value for one variable (arity unchanged)
    QPoly eval_at(int var, const Rational& v) const;
    // low-order exponent of `var` dividing every term
    int content_exp(int var) const;
    QPoly shift_var_exp(int var, int delta) const;  // multiply by var^delta (delta may be negative if divisible)

    // arity surgery: append a fresh variable slot / remove an unused one
    QPoly extended(int new_arity) const;
    QPoly drop_var(int var) const;  // var must not occur

    // leading (grlex-largest) term
    const std::pair<const std::vector<int>, Rational>& leading() const;
    QPoly monic_grlex() const;  // scale so grlex-leading coefficient is 1

    // exact division; throws invariant_error when not divisible
    QPoly divexact(const QPoly& d) const;

    std::string str(const std::vector<std::string>& names) const;

    // canonical deterministic total order (arbitrary but stable)
    static int cmp(const QPoly& a, const QPoly& b);

  private:
    int arity_;
    Terms t_;
};

QPoly qpoly_gcd(const QPoly& a, const QPoly& b);

// Rational function num/den over Q in parameter variables.
// Canonical form: gcd(num, den) = 1, den grlex-monic, den != 0.
class QRat {
  public:
    QRat() : num_(0), den_(0, Rational(1)) {}
    explicit QRat(int arity) : num_(arity), den_(arity, Rational(1)) {}
    QRat(const QPoly& n, const QPoly& d);
    explicit QRat(const QPoly& n) : num_(n), den_(n.arity(), Rational(1)) {}
    QRat(int arity, const Rational& c) : num_(arity, c), den_(arity, Rational(1)) {}

    static QRat var(int arity, int i) { return QRat(QPoly::var(arity, i)); }

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }
    int arity() const { return num_.arity(); }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const;
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }
    bool is_polynomial() const { return den_.is_constant(); }

    QRat operator-() const;
    QRat operator+(const QRat& o) const;
    QRat operator-(const QRat& o) const;
    QRat operator*(const QRat& o) const;
    QRat operator/(const QRat& o) const;
    QRat inv() const;
    QRat pow(long e) const;

    bool operator==(const QRat& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const QRat& o) const { return !(*this == o); }

    QRat extended(int new_arity) const { return QRat(num_.extended(new_arity), den_.extended(new_arity)); }
    QRat drop_var(int var) const { return QRat(num_.drop_var(var), den_.drop_var(var)); }
    QRat eval_at(int var, const Rational& v) const;
    bool depends_on(int var) const { return num_.depends_on(var) || den_.depends_on(var); }
    QRat derivative(int var) const;

    std::string str(const std::vector<std::string>& names) const;
    static int cmp(const QRat& a, const QRat& b);

  private:
    QPoly num_, den_;
};

}  // namespace forge

#endif
