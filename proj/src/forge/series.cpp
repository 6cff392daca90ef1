#include "series.hpp"

#include <algorithm>
#include <sstream>

namespace forge {

TSeries TSeries::constant(const TowerPtr& t, const Elem& c, int trunc) {
    TSeries s(t, trunc);
    if (!c.is_zero() && 0 < trunc) s.c_[0] = c.lifted(t);
    return s;
}

TSeries TSeries::monomial(const TowerPtr& t, const Elem& c, int k, int trunc) {
    TSeries s(t, trunc);
    if (!c.is_zero() && k < trunc) s.c_[k] = c.lifted(t);
    return s;
}

Elem TSeries::at(int k) const {
    FORGE_CHECK(k < trunc_, "coefficient past truncation requested");
    auto it = c_.find(k);
    return it == c_.end() ? Elem(tw_) : it->second;
}

void TSeries::set(int k, const Elem& c) {
    if (k >= trunc_) return;
    if (c.is_zero()) c_.erase(k);
    else {
        if (!Tower::same(*c.tower(), *tw_)) {
            c_[k] = c.lifted(tw_);
        } else {
            c_[k] = c;
        }
    }
}

static TowerPtr bigger_tower(const TowerPtr& a, const TowerPtr& b) {
    if (Tower::same(*a, *b)) return a;
    if (Tower::prefix_of(*a, *b)) return b;
    if (Tower::prefix_of(*b, *a)) return a;
    throw input_error("incompatible towers in series arithmetic");
}

TSeries TSeries::operator-() const {
    TSeries r(tw_, trunc_);
    for (auto& [k, v] : c_) r.c_[k] = -v;
    return r;
}

TSeries TSeries::operator+(const TSeries& o) const {
    TowerPtr t = bigger_tower(tw_, o.tw_);
    TSeries r(t, std::min(trunc_, o.trunc_));
    for (auto& [k, v] : c_)
        if (k < r.trunc_) r.c_[k] = v.lifted(t);
    for (auto& [k, v] : o.c_) {
        if (k >= r.trunc_) continue;
        auto it = r.c_.find(k);
        if (it == r.c_.end()) r.c_[k] = v.lifted(t);
        else {
            Elem s = it->second + v;
            if (s.is_zero()) r.c_.erase(it); else it->second = s;
        }
    }
    return r;
}

TSeries TSeries::operator-(const TSeries& o) const { return *this + (-o); }

TSeries TSeries::operator*(const TSeries& o) const {
    TowerPtr t = bigger_tower(tw_, o.tw_);
    long ta = (trunc_ >= EXACT && o.trunc_ >= EXACT)
                  ? EXACT
                  : std::min<long>(static_cast<long>(trunc_) + o.valuation(),
                                   static_cast<long>(o.trunc_) + valuation());
    TSeries r(t, static_cast<int>(std::min<long>(ta, EXACT)));
    for (auto& [i, a] : c_)
        for (auto& [j, b] : o.c_) {
            long k = static_cast<long>(i) + j;
            if (k >= r.trunc_) continue;
            Elem p = a.lifted(t) * b.lifted(t);
            if (p.is_zero()) continue;
            auto it = r.c_.find(static_cast<int>(k));
            if (it == r.c_.end()) r.c_[static_cast<int>(k)] = p;
            else {
                Elem s = it->second + p;
                if (s.is_zero()) r.c_.erase(it); else it->second = s;
            }
        }
    return r;
}

TSeries TSeries::inverse(int want_terms) const {
    FORGE_CHECK(!c_.empty(), "inverse of (visibly) zero series");
    int v = valuation();
    // number of unit-part coefficients we can honestly produce
    int work = (trunc_ >= EXACT) ? want_terms : trunc_ - 2 * v + std::max(v, 0) * 0;
    if (trunc_ < EXACT) work = trunc_ - v;  // unit part known mod s^(trunc - v)
    FORGE_CHECK(work >= 1, "series inverse has no known terms");
    Elem linv = c_.begin()->second.inv();
    std::vector<Elem> u(work, Elem(tw_));
    for (auto& [k, a] : c_) {
        int idx = k - v;
        if (idx < work) u[idx] = a;
    }
    std::vector<Elem> w(work, Elem(tw_));
    w[0] = linv;
    for (int k = 1; k < work; ++k) {
        Elem acc(tw_);
        for (int j = 1; j <= k; ++j) acc = acc + u[j] * w[k - j];
        w[k] = -(linv * acc);
    }
    TSeries r(tw_, work - v);
    for (int k = 0; k < work; ++k)
        if (!w[k].is_zero()) r.c_[k - v] = w[k];
    return r;
}

TSeries TSeries::truncated(int n) const {
    TSeries r(tw_, std::min(n, trunc_));
    for (auto& [k, v] : c_)
        if (k < r.trunc_) r.c_[k] = v;
    return r;
}

TSeries TSeries::shifted(int k) const {
    TSeries r(tw_, trunc_ >= EXACT ? EXACT : trunc_ + k);
    for (auto& [e, v] : c_) r.c_[e + k] = v;
    return r;
}

TSeries TSeries::scaled(const Elem& c) const {
    TowerPtr t = bigger_tower(tw_, c.tower());
    TSeries r(t, trunc_);
    if (c.is_zero()) return r;
    for (auto& [k, v] : c_) {
        Elem p = v.lifted(t) * c.lifted(t);
        if (!p.is_zero()) r.c_[k] = p;
    }
    return r;
}

TSeries TSeries::ramified(int q) const {
    TSeries r(tw_, trunc_ >= EXACT ? EXACT : trunc_ * q);
    for (auto& [k, v] : c_) r.c_[k * q] = v;
    return r;
}

TSeries TSeries::lifted(const TowerPtr& big) const {
    TSeries r(big, trunc_);
    for (auto& [k, v] : c_) r.c_[k] = v.lifted(big);
    return r;
}

TSeries TSeries::phase_twisted(const Elem& zeta) const {
    TowerPtr t = bigger_tower(tw_, zeta.tower());
    TSeries r(t, trunc_);
    for (auto& [k, v] : c_) {
        Elem p = v.lifted(t) * zeta.pow(k);
        if (!p.is_zero()) r.c_[k] = p;
    }
    return r;
}

bool TSeries::equal_mod(const TSeries& o, int n) const {
    FORGE_CHECK(n <= trunc_ && n <= o.trunc_, "comparison beyond truncation");
    TSeries d = (*this - o).truncated(n);
    return d.known_zero();
}

std::string TSeries::str(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : c_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << v.str() << ")";
        if (k != 0) os << "*" << var << "^" << k;
    }
    if (first) os << "0";
    if (trunc_ < EXACT) os << " + O(" << var << "^" << trunc_ << ")";
    return os.str();
}

// ---- SPoly ----

int spdeg(const SPoly& f) {
    int d = static_cast<int>(f.size()) - 1;
    while (d >= 0 && f[d].known_zero()) --d;
    return d;
}

SPoly sptrim(SPoly f) {
    FORGE_CHECK(!f.empty(), "empty series polynomial");
    int d = spdeg(f);
    f.resize(std::max(d + 1, 1), TSeries(f[0].tower(), f[0].trunc()));
    return f;
}

SPoly spadd(const SPoly& a, const SPoly& b) {
    SPoly r(std::max(a.size(), b.size()),
            TSeries(a.empty() ? b[0].tower() : a[0].tower(), TSeries::EXACT));
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < a.size() && i < b.size()) r[i] = a[i] + b[i];
        else if (i < a.size()) r[i] = a[i];
        else r[i] = b[i];
    }
    return r;
}

SPoly spsub(const SPoly& a, const SPoly& b) {
    SPoly nb;
    for (auto& x : b) nb.push_back(-x);
    return spadd(a, nb);
}

SPoly spmul(const SPoly& a, const SPoly& b) {
    TowerPtr t = a[0].tower();
    SPoly r(a.size() + b.size() - 1, TSeries(t, TSeries::EXACT));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    return r;
}

TSeries speval(const SPoly& f, const TSeries& x) {
    TSeries r(x.tower(), TSeries::EXACT);
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) r = r * x + f[i];
    return r;
}

SPoly spderiv(const SPoly& f) {
    if (f.size() <= 1) return SPoly{TSeries(f[0].tower(), f[0].trunc())};
    SPoly r(f.size() - 1, TSeries(f[0].tower(), TSeries::EXACT));
    for (size_t i = 1; i < f.size(); ++i)
        r[i - 1] = f[i].scaled(Elem(f[i].tower(), Rational(static_cast<long>(i))));
    return r;
}

SPoly splift(const SPoly& f, const TowerPtr& big) {
    SPoly r;
    for (auto& c : f) r.push_back(c.lifted(big));
    return r;
}

SPoly spshift_root(const SPoly& f, const TSeries& d) {
    TowerPtr t = d.tower();
    SPoly r{TSeries(t, TSeries::EXACT)};
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) {
        SPoly nr(r.size() + 1, TSeries(t, TSeries::EXACT));
        for (size_t k = 0; k < r.size(); ++k) {
            nr[k + 1] = nr[k + 1] + r[k];
            nr[k] = nr[k] + r[k] * d;
        }
        nr[0] = nr[0] + f[i].lifted(t);
        r = nr;
    }
    return r;
}

SPoly spramify(const SPoly& f, int q) {
    SPoly r;
    for (auto& c : f) r.push_back(c.ramified(q));
    return r;
}

// ---- MSeries ----

void MSeries::set(const std::vector<int>& e, const Elem& coeff) {
    for (size_t i = 0; i < e.size(); ++i)
        if (e[i] >= trunc[i]) return;
    if (coeff.is_zero()) c.erase(e);
    else c[e] = coeff.lifted(tw);
}

Elem MSeries::at(const std::vector<int>& e) const {
    auto it = c.find(e);
    return it == c.end() ? Elem(tw) : it->second;
}

MSeries MSeries::truncated(const std::vector<int>& bound) const {
    MSeries r = *this;
    r.c.clear();
    for (size_t i = 0; i < bound.size(); ++i) r.trunc[i] = std::min(trunc[i], bound[i]);
    for (auto& [e, v] : c) {
        bool keep = true;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] >= r.trunc[i]) keep = false;
        if (keep) r.c[e] = v;
    }
    return r;
}

bool MSeries::equal_mod(const MSeries& o, const std::vector<int>& bound) const {
    MSeries a = truncated(bound), b = o.truncated(bound);
    if (a.c.size() != b.c.size()) return false;
    auto ia = a.c.begin(), ib = b.c.begin();
    for (; ia != a.c.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return false;
        auto [x, y] = align(ia->second, ib->second);
        if (!(x == y)) return false;
    }
    return true;
}

bool MSeries::same_series(const MSeries& o) const {
    std::vector<int> bound(trunc.size());
    for (size_t i = 0; i < bound.size(); ++i) bound[i] = std::min(trunc[i], o.trunc[i]);
    return equal_mod(o, bound);
}

MSeries MSeries::lifted(const TowerPtr& big) const {
    MSeries r = *this;
    r.tw = big;
    r.c.clear();
    for (auto& [e, v] : c) r.c[e] = v.lifted(big);
    return r;
}

std::string MSeries::str() const {
    std::ostringstream os;
    bool first = true;
    for (auto& [e, v] : c) {
        if (!first) os << " + ";
        first = false;
        bool simple = v.is_rational_const();
        os << (simple ? v.rational_value().str() : "(" + v.str() + ")");
        for (size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            os << "*" << (*vars)[i];
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    if (first) os << "0";
    return os.str();
}

int MSeries::cmp(const MSeries& a, const MSeries& b) {
    auto ia = a.c.begin(), ib = b.c.begin();
    for (; ia != a.c.end() && ib != b.c.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return GrlexLess()(ia->first, ib->first) ? -1 : 1;
        int c = Elem::cmp(ia->second, ib->second);
        if (c) return c;
    }
    if (ia != a.c.end()) return 1;
    if (ib != b.c.end()) return -1;
    return 0;
}

TSeries elem_param_series(const Elem& x, int pi, const TowerPtr& target, int trunc) {
    // split numerators by powers of parameter pi, then divide as series
    const TowerPtr& t = x.tower();
    FORGE_CHECK(target->ngens() == t->ngens(), "target tower shape mismatch");
    auto split_poly = [&](const QPoly& p, std::map<int, QPoly>& out) {
        int maxd = 0;
        for (auto& [e, c] : p.terms()) maxd = std::max(maxd, e[pi]);
        for (int k = 0; k <= maxd; ++k) {
            QPoly ck = p.coeff_of(pi, k).drop_var(pi);
            if (!ck.is_zero()) out[k] = ck;
        }
    };
    TSeries num(target, TSeries::EXACT), den(target, TSeries::EXACT);
    // gather common denominator across the element's terms
    QPoly lcd(t->nparams(), Rational(1));
    for (auto& [e, c] : x.terms())
        lcd = lcd.divexact(qpoly_gcd(lcd, c.den())) * c.den();
    for (auto& [e, c] : x.terms()) {
        QPoly n = c.num() * lcd.divexact(c.den());
        std::map<int, QPoly> parts;
        split_poly(n, parts);
        for (auto& [k, q] : parts) {
            std::map<std::vector<int>, QRat, GrlexLess> one{{e, QRat(q)}};
            Elem coeff = Elem::from_terms(target, std::move(one));
            num.set(k, num.at(k) + coeff);
        }
    }
    {
        std::map<int, QPoly> parts;
        split_poly(lcd, parts);
        for (auto& [k, q] : parts)
            den.set(k, Elem(target, QRat(q)));
    }
    if (num.known_zero()) return TSeries(target, trunc);
    TSeries r = (num * den.inverse()).truncated(trunc);
    return r;
}

}  // namespace forge
