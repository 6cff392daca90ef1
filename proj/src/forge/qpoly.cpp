#include "qpoly.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace forge {

bool QPoly::is_constant() const {
    if (t_.empty()) return true;
    if (t_.size() > 1) return false;
    for (int e : t_.begin()->first)
        if (e) return false;
    return true;
}

Rational QPoly::constant_value() const {
    FORGE_CHECK(is_constant(), "constant_value on non-constant");
    return t_.empty() ? Rational(0) : t_.begin()->second;
}

QPoly QPoly::operator-() const {
    QPoly r(arity_);
    for (auto& [e, c] : t_) r.t_[e] = -c;
    return r;
}

QPoly QPoly::operator+(const QPoly& o) const {
    FORGE_CHECK(arity_ == o.arity_, "qpoly arity mismatch");
    QPoly r = *this;
    for (auto& [e, c] : o.t_) {
        auto it = r.t_.find(e);
        if (it == r.t_.end()) {
            r.t_[e] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) r.t_.erase(it);
        }
    }
    return r;
}

QPoly QPoly::operator-(const QPoly& o) const { return *this + (-o); }

QPoly QPoly::operator*(const QPoly& o) const {
    FORGE_CHECK(arity_ == o.arity_, "qpoly arity mismatch");
    QPoly r(arity_);
    for (auto& [e1, c1] : t_) {
        for (auto& [e2, c2] : o.t_) {
            std::vector<int> e(arity_);
            for (int i = 0; i < arity_; ++i) e[i] = e1[i] + e2[i];
            Rational c = c1 * c2;
            auto it = r.t_.find(e);
            if (it == r.t_.end()) {
                if (!c.is_zero()) r.t_[e] = c;
            } else {
                it->second += c;
                if (it->second.is_zero()) r.t_.erase(it);
            }
        }
    }
    return r;
}

QPoly QPoly::scale(const Rational& c) const {
    QPoly r(arity_);
    if (c.is_zero()) return r;
    for (auto& [e, v] : t_) r.t_[e] = v * c;
    return r;
}

QPoly QPoly::pow(long e) const {
    FORGE_CHECK(e >= 0, "negative qpoly power");
    QPoly r(arity_, Rational(1)), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        if (e >>= 1) b = b * b;
    }
    return r;
}

int QPoly::degree(int var) const {
    int d = -1;
    for (auto& [e, c] : t_) d = std::max(d, e[var]);
    return t_.empty() ? -1 : d;
}

int QPoly::total_degree() const {
    int d = -1;
    for (auto& [e, c] : t_) {
        int s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

QPoly QPoly::derivative(int var) const {
    QPoly r(arity_);
    for (auto& [e, c] : t_) {
        if (e[var] == 0) continue;
        std::vector<int> e2 = e;
        e2[var] -= 1;
        r.t_[e2] = c * Rational(e[var]);
    }
    return r;
}

QPoly QPoly::coeff_of(int var, int k) const {
    QPoly r(arity_);
    for (auto& [e, c] : t_) {
        if (e[var] != k) continue;
        std::vector<int> e2 = e;
        e2[var] = 0;
        r.t_[e2] = c;
    }
    return r;
}

QPoly QPoly::eval_at(int var, const Rational& v) const {
    QPoly r(arity_);
    for (auto& [e, c] : t_) {
        std::vector<int> e2 = e;
        e2[var] = 0;
        Rational c2 = c * v.pow(e[var]);
        auto it = r.t_.find(e2);
        if (it == r.t_.end()) {
            if (!c2.is_zero()) r.t_[e2] = c2;
        } else {
            it->second += c2;
            if (it->second.is_zero()) r.t_.erase(it);
        }
    }
    return r;
}

int QPoly::content_exp(int var) const {
    FORGE_CHECK(!t_.empty(), "content of zero polynomial");
    int k = -1;
    for (auto& [e, c] : t_) k = (k < 0) ? e[var] : std::min(k, e[var]);
    return k;
}

QPoly QPoly::shift_var_exp(int var, int delta) const {
    QPoly r(arity_);
    for (auto& [e, c] : t_) {
        std::vector<int> e2 = e;
        e2[var] += delta;
        FORGE_CHECK(e2[var] >= 0, "negative exponent in shift_var_exp");
        r.t_[e2] = c;
    }
    return r;
}

QPoly QPoly::extended(int new_arity) const {
    FORGE_CHECK(new_arity >= arity_, "extended shrinks arity");
    QPoly r(new_arity);
    for (auto& [e, c] : t_) {
        std::vector<int> e2 = e;
        e2.resize(new_arity, 0);
        r.t_[e2] = c;
    }
    return r;
}

QPoly QPoly::drop_var(int var) const {
    QPoly r(arity_ - 1);
    for (auto& [e, c] : t_) {
        FORGE_CHECK(e[var] == 0, "drop_var on occurring variable");
        std::vector<int> e2;
        e2.reserve(arity_ - 1);
        for (int i = 0; i < arity_; ++i)
            if (i != var) e2.push_back(e[i]);
        r.t_[e2] = c;
    }
    return r;
}

const std::pair<const std::vector<int>, Rational>& QPoly::leading() const {
    FORGE_CHECK(!t_.empty(), "leading term of zero");
    return *t_.rbegin();
}

QPoly QPoly::monic_grlex() const {
    if (t_.empty()) return *this;
    return scale(leading().second.inv());
}

QPoly QPoly::divexact(const QPoly& d) const {
    FORGE_CHECK(!d.is_zero(), "division by zero polynomial");
    QPoly rem = *this, quot(arity_);
    const std::vector<int> de = d.leading().first;
    const Rational dc = d.leading().second;
    while (!rem.is_zero()) {
        const std::vector<int> re = rem.leading().first;
        const Rational rc = rem.leading().second;
        std::vector<int> qe(arity_);
        for (int i = 0; i < arity_; ++i) {
            qe[i] = re[i] - de[i];
            FORGE_CHECK(qe[i] >= 0, "inexact polynomial division");
        }
        QPoly t(arity_);
        t.t_[qe] = rc / dc;
        quot = quot + t;
        rem = rem - t * d;
        if (!rem.is_zero()) {
            // grlex leading term must strictly decrease
            FORGE_CHECK(GrlexLess()(rem.leading().first, re), "inexact polynomial division");
        }
    }
    return quot;
}

std::string QPoly::str(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // print high-to-low for readability
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        const auto& [e, c] = *it;
        Rational a = c;
        if (first) {
            if (a < Rational(0)) { os << "-"; a = -a; }
        } else {
            os << (a < Rational(0) ? " - " : " + ");
            if (a < Rational(0)) a = -a;
        }
        first = false;
        bool any_var = false;
        for (int x : e)
            if (x) any_var = true;
        if (!a.is_one() || !any_var) os << a.str();
        bool star = !a.is_one() || !any_var;
        for (size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            if (star) os << "*";
            star = true;
            os << names[i];
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    return os.str();
}

int QPoly::cmp(const QPoly& a, const QPoly& b) {
    if (a.arity_ != b.arity_) return a.arity_ < b.arity_ ? -1 : 1;
    auto ia = a.t_.begin(), ib = b.t_.begin();
    for (; ia != a.t_.end() && ib != b.t_.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return GrlexLess()(ia->first, ib->first) ? -1 : 1;
        int c = Rational::cmp(ia->second, ib->second);
        if (c) return c;
    }
    if (ia != a.t_.end()) return 1;
    if (ib != b.t_.end()) return -1;
    return 0;
}

// ---- gcd via subresultant PRS, recursing on variables ----

namespace {

// pick the variable of highest positive degree present in either poly
int pick_main_var(const QPoly& a, const QPoly& b) {
    for (int v = a.arity() - 1; v >= 0; --v)
        if (a.degree(v) > 0 || b.degree(v) > 0) return v;
    return -1;
}

// dense coefficient list of `p` seen as univariate in `var`
std::vector<QPoly> univ(const QPoly& p, int var) {
    int d = std::max(p.degree(var), 0);
    std::vector<QPoly> c(d + 1, QPoly(p.arity()));
    for (int k = 0; k <= d; ++k) c[k] = p.coeff_of(var, k);
    while (c.size() > 1 && c.back().is_zero()) c.pop_back();
    return c;
}

QPoly from_univ(const std::vector<QPoly>& c, int var) {
    QPoly r(c.empty() ? 0 : c[0].arity());
    for (size_t k = 0; k < c.size(); ++k)
        r = r + c[k] * QPoly::var(c[0].arity(), var, static_cast<int>(k));
    return r;
}

QPoly content_in(const std::vector<QPoly>& c) {
    QPoly g = c.empty() ? QPoly(0) : QPoly(c[0].arity());
    for (auto& x : c) g = qpoly_gcd(g, x);
    return g;
}


// pseudo-remainder of a by b in `var` (deg a >= deg b)
std::vector<QPoly> prem(std::vector<QPoly> a, const std::vector<QPoly>& b) {
    int da = static_cast<int>(a.size()) - 1, db = static_cast<int>(b.size()) - 1;
    const QPoly& lb = b.back();
    int steps = da - db + 1;
    for (int k = 0; k < steps && static_cast<int>(a.size()) - 1 >= db; ++k) {
        int cur = static_cast<int>(a.size()) - 1;
        QPoly la = a.back();
        for (auto& x : a) x = x * lb;
        for (int i = 0; i <= db; ++i) a[cur - db + i] = a[cur - db + i] - la * b[i];
        while (a.size() > 1 && a.back().is_zero()) a.pop_back();
        if (a.size() == 1 && a[0].is_zero()) break;
    }
    return a;
}

}  // namespace

QPoly qpoly_gcd(const QPoly& a, const QPoly& b) {
    if (a.is_zero()) return b.monic_grlex();
    if (b.is_zero()) return a.monic_grlex();
    if (a.is_constant() || b.is_constant()) return QPoly(a.arity(), Rational(1));
    int var = pick_main_var(a, b);
    if (var < 0) return QPoly(a.arity(), Rational(1));

    std::vector<QPoly> ua = univ(a, var), ub = univ(b, var);
    QPoly ca = content_in(ua), cb = content_in(ub);
    auto strip = [&](std::vector<QPoly>& v) {
        // rational content: one uniform scale for the whole list
        Int den(1), num(0);
        for (auto& x : v)
            for (auto& [e, c] : x.terms()) den = lcm(den, c.den());
        for (auto& x : v)
            for (auto& [e, c] : x.terms()) num = gcd(num, Int(c.num() * (den / c.den())));
        if (num != 0) {
            Rational scale(den, num);
            for (auto& x : v) x = x.scale(scale);
        }
    };
    for (auto& x : ua) x = x.divexact(ca);
    for (auto& x : ub) x = x.divexact(cb);
    strip(ua);
    strip(ub);
    QPoly cont = qpoly_gcd(ca, cb);

    if (ua.size() < ub.size()) std::swap(ua, ub);
    // primitive PRS
    while (true) {
        if (ub.size() == 1 && ub[0].is_zero()) break;
        if (ub.size() == 1) { ub = {QPoly(a.arity(), Rational(1))}; break; }
        std::vector<QPoly> r = prem(ua, ub);
        if (r.size() == 1 && r[0].is_zero()) { ua = ub; ub = r; break; }
        QPoly cr = content_in(r);
        for (auto& x : r) x = x.divexact(cr);
        strip(r);
        ua = ub;
        ub = r;
    }
    std::vector<QPoly>& g = (ub.size() == 1 && !ub[0].is_zero()) ? ub : ua;
    QPoly cg = content_in(g);
    for (auto& x : g) x = x.divexact(cg);
    QPoly res = from_univ(g, var) * cont;
    return res.monic_grlex();
}

// ---- QRat ----

QRat::QRat(const QPoly& n, const QPoly& d) : num_(n), den_(d) {
    FORGE_CHECK(n.arity() == d.arity(), "qrat arity mismatch");
    if (d.is_zero()) throw input_error("rational function with zero denominator");
    if (num_.is_zero()) {
        den_ = QPoly(d.arity(), Rational(1));
        return;
    }
    QPoly g = qpoly_gcd(num_, den_);
    if (!g.is_constant()) {
        num_ = num_.divexact(g);
        den_ = den_.divexact(g);
    }
    Rational lc = den_.leading().second;
    if (!lc.is_one()) {
        num_ = num_.scale(lc.inv());
        den_ = den_.scale(lc.inv());
    }
}

bool QRat::is_one() const {
    return den_.is_constant() && den_.constant_value().is_one() && num_.is_constant() &&
           !num_.is_zero() && num_.constant_value().is_one();
}

QRat QRat::operator-() const {
    QRat r = *this;
    r.num_ = -r.num_;
    return r;
}
QRat QRat::operator+(const QRat& o) const {
    return QRat(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}
QRat QRat::operator-(const QRat& o) const {
    return QRat(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}
QRat QRat::operator*(const QRat& o) const { return QRat(num_ * o.num_, den_ * o.den_); }
QRat QRat::operator/(const QRat& o) const {
    if (o.is_zero()) throw input_error("division by zero rational function");
    return QRat(num_ * o.den_, den_ * o.num_);
}
QRat QRat::inv() const {
    if (is_zero()) throw input_error("inverse of zero rational function");
    return QRat(den_, num_);
}
QRat QRat::pow(long e) const {
    if (e < 0) return inv().pow(-e);
    QRat r(arity(), Rational(1)), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        if (e >>= 1) b = b * b;
    }
    return r;
}

QRat QRat::eval_at(int var, const Rational& v) const {
    QPoly d = den_.eval_at(var, v);
    if (d.is_zero()) throw invariant_error("pole while evaluating rational function");
    return QRat(num_.eval_at(var, v), d);
}

QRat QRat::derivative(int var) const {
    return QRat(num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
}

std::string QRat::str(const std::vector<std::string>& names) const {
    if (is_polynomial()) {
        Rational d = den_.constant_value();
        if (d.is_one()) return num_.str(names);
        return "(" + num_.str(names) + ")/" + d.str();
    }
    return "(" + num_.str(names) + ")/(" + den_.str(names) + ")";
}

int QRat::cmp(const QRat& a, const QRat& b) {
    int c = QPoly::cmp(a.num_, b.num_);
    if (c) return c;
    return QPoly::cmp(a.den_, b.den_);
}

}  // namespace forge
