#ifndef FORGE_RATIONAL_HPP
#define FORGE_RATIONAL_HPP

#include <gmpxx.h>

#include <string>

#include "util.hpp"

namespace forge {

using Int = mpz_class;

// Exact rational with canonical form: gcd(|num|, den) = 1, den > 0.
// Backed by GMP; the wrapper pins the invariants and the operations the
// rest of the library relies on.
class Rational {
  public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}
    Rational(const Int& n) : q_(n) {}
    Rational(const Int& n, const Int& d) : q_(n, d) {
        if (d == 0) throw input_error("rational with zero denominator");
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    static Rational parse(const std::string& s) {
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw input_error("bad rational literal: " + s);
        q.canonicalize();
        return Rational(q);
    }

    const Int num() const { return q_.get_num(); }
    const Int den() const { return q_.get_den(); }
    bool is_zero() const { return q_ == 0; }
    bool is_one() const { return q_ == 1; }
    bool is_integer() const { return q_.get_den() == 1; }

    Rational operator-() const { return Rational(mpq_class(-q_)); }
    Rational operator+(const Rational& o) const { return Rational(mpq_class(q_ + o.q_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(q_ - o.q_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(q_ * o.q_)); }
    Rational operator/(const Rational& o) const {
        if (o.is_zero()) throw input_error("rational division by zero");
        return Rational(mpq_class(q_ / o.q_));
    }
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }

    bool operator==(const Rational& o) const { return q_ == o.q_; }
    bool operator!=(const Rational& o) const { return q_ != o.q_; }
    bool operator<(const Rational& o) const { return q_ < o.q_; }
    bool operator<=(const Rational& o) const { return q_ <= o.q_; }
    bool operator>(const Rational& o) const { return q_ > o.q_; }

    Rational inv() const {
        if (is_zero()) throw input_error("inverse of zero");
        return Rational(mpq_class(1 / q_));
    }

    Rational pow(long e) const {
        if (e < 0) return inv().pow(-e);
        mpq_class r = 1, b = q_;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return Rational(r);
    }

    std::string str() const { return q_.get_str(); }

    // numerically smallest first; total order used for canonical labelings
    static int cmp(const Rational& a, const Rational& b) {
        return mpq_cmp(a.q_.get_mpq_t(), b.q_.get_mpq_t());
    }

  private:
    mpq_class q_;
};

inline Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}
inline Int lcm(const Int& a, const Int& b) {
    Int g;
    mpz_lcm(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

}  // namespace forge

#endif
