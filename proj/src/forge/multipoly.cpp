#include "multipoly.hpp"

#include <algorithm>
#include <sstream>

namespace forge {

VarCtx make_vars(std::vector<std::string> names) {
    return std::make_shared<const std::vector<std::string>>(std::move(names));
}

int var_index(const VarCtx& v, const std::string& name) {
    for (size_t i = 0; i < v->size(); ++i)
        if ((*v)[i] == name) return static_cast<int>(i);
    return -1;
}

MultiPoly::MultiPoly(VarCtx vars, const Elem& c) : vars_(std::move(vars)), tw_(c.tower()) {
    if (!c.is_zero()) t_[std::vector<int>(vars_->size(), 0)] = c;
}

MultiPoly MultiPoly::var(const VarCtx& vars, const TowerPtr& tw, int i, int e) {
    MultiPoly p(vars, tw);
    std::vector<int> ex(vars->size(), 0);
    ex[i] = e;
    p.t_[ex] = Elem(tw, Rational(1));
    return p;
}

MultiPoly MultiPoly::constant(const VarCtx& vars, const TowerPtr& tw, const Rational& c) {
    return MultiPoly(vars, Elem(tw, c));
}

bool MultiPoly::is_constant() const {
    if (t_.empty()) return true;
    if (t_.size() > 1) return false;
    for (int e : t_.begin()->first)
        if (e) return false;
    return true;
}

Elem MultiPoly::constant_value() const {
    FORGE_CHECK(is_constant(), "constant_value of non-constant MultiPoly");
    return t_.empty() ? Elem(tw_) : t_.begin()->second;
}

void MultiPoly::set_term(const std::vector<int>& e, const Elem& c) {
    if (c.is_zero()) t_.erase(e); else t_[e] = c;
}

Elem MultiPoly::coeff(const std::vector<int>& e) const {
    auto it = t_.find(e);
    return it == t_.end() ? Elem(tw_) : it->second;
}

void MultiPoly::add_term(const std::vector<int>& e, const Elem& c) {
    if (c.is_zero()) return;
    auto it = t_.find(e);
    if (it == t_.end()) {
        t_[e] = c;
    } else {
        Elem s = it->second + c;
        if (s.is_zero()) t_.erase(it); else it->second = s;
    }
}

namespace {
// align the towers of two polys by prefix-lifting
void align_polys(MultiPoly& a, MultiPoly& b) {
    FORGE_CHECK(*a.vars() == *b.vars(), "variable context mismatch");
    if (Tower::same(*a.tower(), *b.tower())) return;
    if (Tower::prefix_of(*a.tower(), *b.tower())) { a = a.lifted(b.tower()); return; }
    if (Tower::prefix_of(*b.tower(), *a.tower())) { b = b.lifted(a.tower()); return; }
    throw input_error("incompatible coefficient towers");
}
}  // namespace

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(vars_, tw_);
    for (auto& [e, c] : t_) r.t_[e] = -c;
    return r;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    MultiPoly a = *this, b = o;
    align_polys(a, b);
    for (auto& [e, c] : b.t_) a.add_term(e, c);
    return a;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const { return *this + (-o); }

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    MultiPoly a = *this, b = o;
    align_polys(a, b);
    MultiPoly r(a.vars_, a.tw_);
    for (auto& [e1, c1] : a.t_)
        for (auto& [e2, c2] : b.t_) {
            std::vector<int> e(e1.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    return r;
}

MultiPoly MultiPoly::scale(const Elem& c) const {
    MultiPoly r(vars_, tw_);
    if (c.is_zero()) return r;
    for (auto& [e, v] : t_) {
        Elem p = v * c;
        if (!p.is_zero()) {
            r.tw_ = p.tower();
            r.t_[e] = p;
        }
    }
    return r;
}

MultiPoly MultiPoly::pow(long e) const {
    FORGE_CHECK(e >= 0, "negative power of MultiPoly");
    MultiPoly r = MultiPoly::constant(vars_, tw_, Rational(1)), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        if (e >>= 1) b = b * b;
    }
    return r;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
    MultiPoly a = *this, b = o;
    align_polys(a, b);
    return a.t_ == b.t_;
}

int MultiPoly::degree(int var) const {
    int d = -1;
    for (auto& [e, c] : t_) d = std::max(d, e[var]);
    return d;
}

int MultiPoly::total_degree() const {
    int d = -1;
    for (auto& [e, c] : t_) {
        int s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

MultiPoly MultiPoly::derivative(int var) const {
    MultiPoly r(vars_, tw_);
    for (auto& [e, c] : t_) {
        if (!e[var]) continue;
        std::vector<int> e2 = e;
        e2[var] -= 1;
        r.add_term(e2, c * Elem(tw_, Rational(e[var])));
    }
    return r;
}

MultiPoly MultiPoly::coeff_of(int var, int k) const {
    MultiPoly r(vars_, tw_);
    for (auto& [e, c] : t_) {
        if (e[var] != k) continue;
        std::vector<int> e2 = e;
        e2[var] = 0;
        r.t_[e2] = c;
    }
    return r;
}

std::vector<MultiPoly> MultiPoly::dense_in(int var) const {
    int d = std::max(degree(var), 0);
    std::vector<MultiPoly> out(d + 1, MultiPoly(vars_, tw_));
    for (int k = 0; k <= d; ++k) out[k] = coeff_of(var, k);
    while (out.size() > 1 && out.back().is_zero()) out.pop_back();
    return out;
}

MultiPoly MultiPoly::from_dense(const std::vector<MultiPoly>& c, int var) {
    FORGE_CHECK(!c.empty(), "from_dense of empty");
    MultiPoly r(c[0].vars_, c[0].tw_);
    for (size_t k = 0; k < c.size(); ++k)
        r = r + c[k] * MultiPoly::var(c[0].vars_, c[0].tw_, var, static_cast<int>(k));
    return r;
}

MultiPoly MultiPoly::lifted(const TowerPtr& big) const {
    MultiPoly r(vars_, big);
    for (auto& [e, c] : t_) r.t_[e] = c.lifted(big);
    return r;
}

MultiPoly MultiPoly::eval_var(int var, const Elem& value) const {
    TowerPtr tv = value.tower();
    MultiPoly r(vars_, tv);
    for (auto& [e, c] : t_) {
        std::vector<int> e2 = e;
        e2[var] = 0;
        r.add_term(e2, c.lifted(tv) * value.pow(e[var]));
    }
    return r;
}

int MultiPoly::content_exponent(int var) const {
    FORGE_CHECK(!t_.empty(), "content_exponent of zero polynomial");
    int k = -1;
    for (auto& [e, c] : t_) k = (k < 0) ? e[var] : std::min(k, e[var]);
    return k;
}

MultiPoly MultiPoly::shift_var_exp(int var, int delta) const {
    MultiPoly r(vars_, tw_);
    for (auto& [e, c] : t_) {
        std::vector<int> e2 = e;
        e2[var] += delta;
        FORGE_CHECK(e2[var] >= 0, "negative exponent after shift");
        r.t_[e2] = c;
    }
    return r;
}

const std::pair<const std::vector<int>, Elem>& MultiPoly::leading() const {
    FORGE_CHECK(!t_.empty(), "leading term of zero polynomial");
    return *t_.rbegin();
}

MultiPoly MultiPoly::monic_grlex() const {
    if (t_.empty()) return *this;
    return scale(leading().second.inv());
}

MultiPoly MultiPoly::divexact(const MultiPoly& d) const {
    FORGE_CHECK(!d.is_zero(), "division by zero polynomial");
    MultiPoly a = *this, b = d;
    align_polys(a, b);
    MultiPoly rem = a, quot(a.vars_, a.tw_);
    const auto& [de, dc] = b.leading();
    Elem dcinv = dc.inv();
    while (!rem.is_zero()) {
        const auto& [re, rc] = rem.leading();
        std::vector<int> qe(re.size());
        for (size_t i = 0; i < qe.size(); ++i) {
            qe[i] = re[i] - de[i];
            FORGE_CHECK(qe[i] >= 0, "inexact division");
        }
        MultiPoly t(a.vars_, a.tw_);
        t.t_[qe] = rc * dcinv;
        quot = quot + t;
        MultiPoly nrem = rem - t * b;
        if (!nrem.is_zero())
            FORGE_CHECK(GrlexLess()(nrem.leading().first, re), "inexact division");
        rem = nrem;
    }
    return quot;
}

std::string MultiPoly::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        const auto& [e, c] = *it;
        if (!first) os << " + ";
        first = false;
        bool any = false;
        for (int x : e) any = any || x;
        bool simple = c.is_rational_const();
        if (!any) {
            os << (simple ? c.rational_value().str() : "(" + c.str() + ")");
        } else {
            bool star = false;
            if (!(simple && c.rational_value().is_one())) {
                os << (simple ? c.rational_value().str() : "(" + c.str() + ")");
                star = true;
            }
            for (size_t i = 0; i < e.size(); ++i) {
                if (!e[i]) continue;
                if (star) os << "*";
                star = true;
                os << (*vars_)[i];
                if (e[i] > 1) os << "^" << e[i];
            }
        }
    }
    return os.str();
}

int MultiPoly::cmp(const MultiPoly& a, const MultiPoly& b) {
    auto ia = a.t_.begin(), ib = b.t_.begin();
    for (; ia != a.t_.end() && ib != b.t_.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return GrlexLess()(ia->first, ib->first) ? -1 : 1;
        int c = Elem::cmp(ia->second, ib->second);
        if (c) return c;
    }
    if (ia != a.t_.end()) return 1;
    if (ib != b.t_.end()) return -1;
    return 0;
}

// ---- gcd (subresultant PRS, recursing on variables) ----

namespace {

int pick_main_var(const MultiPoly& a, const MultiPoly& b) {
    for (int v = a.nvars() - 1; v >= 0; --v)
        if (a.degree(v) > 0 || b.degree(v) > 0) return v;
    return -1;
}

MultiPoly content_of(const std::vector<MultiPoly>& c) {
    MultiPoly g = c.empty() ? MultiPoly() : MultiPoly(c[0].vars(), c[0].tower());
    for (auto& x : c) g = mpoly_gcd(g, x);
    return g;
}

std::vector<MultiPoly> prem_mp(std::vector<MultiPoly> a, const std::vector<MultiPoly>& b) {
    int db = static_cast<int>(b.size()) - 1;
    const MultiPoly& lb = b.back();
    while (static_cast<int>(a.size()) - 1 >= db) {
        int cur = static_cast<int>(a.size()) - 1;
        MultiPoly la = a.back();
        for (auto& x : a) x = x * lb;
        for (int i = 0; i <= db; ++i) a[cur - db + i] = a[cur - db + i] - la * b[i];
        while (a.size() > 1 && a.back().is_zero()) a.pop_back();
        if (a.size() == 1 && a[0].is_zero()) break;
    }
    return a;
}

}  // namespace

MultiPoly mpoly_gcd(const MultiPoly& a0, const MultiPoly& b0) {
    MultiPoly a = a0, b = b0;
    if (a.is_zero()) return b.monic_grlex();
    if (b.is_zero()) return a.monic_grlex();
    align_polys(a, b);
    if (a.is_constant() || b.is_constant())
        return MultiPoly::constant(a.vars(), a.tower(), Rational(1));
    int var = pick_main_var(a, b);
    if (var < 0) return MultiPoly::constant(a.vars(), a.tower(), Rational(1));

    std::vector<MultiPoly> ua = a.dense_in(var), ub = b.dense_in(var);
    MultiPoly ca = content_of(ua), cb = content_of(ub);
    for (auto& x : ua) x = x.divexact(ca);
    for (auto& x : ub) x = x.divexact(cb);
    MultiPoly cont = mpoly_gcd(ca, cb);

    if (ua.size() < ub.size()) std::swap(ua, ub);
    while (true) {
        if (ub.size() == 1 && ub[0].is_zero()) break;
        if (ub.size() == 1) {
            ub = {MultiPoly::constant(a.vars(), a.tower(), Rational(1))};
            break;
        }
        std::vector<MultiPoly> r = prem_mp(ua, ub);
        if (r.size() == 1 && r[0].is_zero()) { ua = ub; ub = r; break; }
        MultiPoly cr = content_of(r);
        for (auto& x : r) x = x.divexact(cr);
        ua = ub;
        ub = r;
    }
    std::vector<MultiPoly>& g = (ub.size() == 1 && !ub[0].is_zero()) ? ub : ua;
    MultiPoly cg = content_of(g);
    for (auto& x : g) x = x.divexact(cg);
    MultiPoly res = MultiPoly::from_dense(g, var) * cont;
    return res.monic_grlex();
}

MultiPoly resultant(const MultiPoly& a0, const MultiPoly& b0, int var) {
    MultiPoly a = a0, b = b0;
    align_polys(a, b);
    FORGE_CHECK(!a.is_zero() && !b.is_zero(), "resultant of zero");
    std::vector<MultiPoly> ua = a.dense_in(var), ub = b.dense_in(var);
    int m = static_cast<int>(ua.size()) - 1, n = static_cast<int>(ub.size()) - 1;
    if (m == 0) return ua[0].pow(n);
    if (n == 0) return ub[0].pow(m);
    // Sylvester matrix + fraction-free Bareiss elimination
    int N = m + n;
    std::vector<std::vector<MultiPoly>> M(
        N, std::vector<MultiPoly>(N, MultiPoly(a.vars(), a.tower())));
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) M[r][r + k] = ua[m - k];
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) M[n + r][r + k] = ub[n - k];
    MultiPoly prev = MultiPoly::constant(a.vars(), a.tower(), Rational(1));
    int sign = 1;
    for (int k = 0; k < N - 1; ++k) {
        if (M[k][k].is_zero()) {
            int p = -1;
            for (int r = k + 1; r < N; ++r)
                if (!M[r][k].is_zero()) { p = r; break; }
            if (p < 0) return MultiPoly(a.vars(), a.tower());  // singular: resultant 0
            std::swap(M[k], M[p]);
            sign = -sign;
        }
        for (int i = k + 1; i < N; ++i)
            for (int j = k + 1; j < N; ++j)
                M[i][j] = (M[k][k] * M[i][j] - M[i][k] * M[k][j]).divexact(prev);
        prev = M[k][k];
    }
    MultiPoly det = M[N - 1][N - 1];
    return sign < 0 ? -det : det;
}

MultiPoly poly_arith(const MultiPoly& a, const MultiPoly& b, PolyOp op) {
    switch (op) {
        case PolyOp::add: return a + b;
        case PolyOp::mul: return a * b;
        case PolyOp::exact_div: return a.divexact(b);
    }
    throw input_error("bad op");
}

// ---- RationalFunction ----

RationalFunction::RationalFunction(const MultiPoly& n, const MultiPoly& d) : num_(n), den_(d) {
    align_polys(num_, den_);
    if (den_.is_zero()) throw input_error("rational function with zero denominator");
    if (num_.is_zero()) {
        den_ = MultiPoly::constant(den_.vars(), den_.tower(), Rational(1));
        return;
    }
    MultiPoly g = mpoly_gcd(num_, den_);
    if (!g.is_constant()) {
        num_ = num_.divexact(g);
        den_ = den_.divexact(g);
    }
    Elem lc = den_.leading().second;
    if (!(lc.is_rational_const() && lc.rational_value().is_one())) {
        Elem inv = lc.inv();
        num_ = num_.scale(inv);
        den_ = den_.scale(inv);
    }
}

RationalFunction::RationalFunction(const MultiPoly& n)
    : num_(n), den_(MultiPoly::constant(n.vars(), n.tower(), Rational(1))) {}

MultiPoly RationalFunction::poly_value() const {
    FORGE_CHECK(is_polynomial(), "not a polynomial");
    return num_.scale(den_.constant_value().inv());
}

RationalFunction RationalFunction::operator-() const { return RationalFunction(-num_, den_); }
RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
    return RationalFunction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}
RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
    return RationalFunction(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}
RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
    return RationalFunction(num_ * o.num_, den_ * o.den_);
}
RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
    if (o.is_zero()) throw input_error("division by zero rational function");
    return RationalFunction(num_ * o.den_, den_ * o.num_);
}
RationalFunction RationalFunction::pow(long e) const {
    if (e < 0) {
        if (is_zero()) throw input_error("negative power of zero");
        return RationalFunction(den_, num_).pow(-e);
    }
    RationalFunction r(MultiPoly::constant(num_.vars(), num_.tower(), Rational(1)));
    RationalFunction b = *this;
    while (e) {
        if (e & 1) r = r * b;
        if (e >>= 1) b = b * b;
    }
    return r;
}

int RationalFunction::valuation(int var) const {
    FORGE_CHECK(!num_.is_zero(), "valuation of zero");
    return num_.content_exponent(var) - den_.content_exponent(var);
}

std::string RationalFunction::str() const {
    if (is_polynomial()) return poly_value().str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
}

RationalFunction substitute(const MultiPoly& f, const std::map<int, RationalFunction>& bindings) {
    RationalFunction acc{MultiPoly(f.vars(), f.tower())};
    for (auto& [e, c] : f.terms()) {
        RationalFunction term{MultiPoly(f.vars(), c)};
        for (size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            auto it = bindings.find(static_cast<int>(i));
            RationalFunction base =
                it != bindings.end()
                    ? it->second
                    : RationalFunction(MultiPoly::var(f.vars(), f.tower(), static_cast<int>(i)));
            term = term * base.pow(e[i]);
        }
        acc = acc + term;
    }
    return acc;
}

NewtonPolygon newton_polygon(const MultiPoly& f, int zvar, int valvar) {
    FORGE_CHECK(!f.is_zero(), "newton polygon of zero");
    std::vector<MultiPoly> c = f.dense_in(zvar);
    std::vector<std::pair<long, long>> pts;
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i].is_zero()) continue;
        pts.push_back({static_cast<long>(i), c[i].content_exponent(valvar)});
    }
    // lower convex hull, left to right
    std::vector<std::pair<long, long>> hull;
    for (auto& p : pts) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            long cross = (b.first - a.first) * (p.second - a.second) -
                         (p.first - a.first) * (b.second - a.second);
            if (cross <= 0) hull.pop_back(); else break;
        }
        hull.push_back(p);
    }
    NewtonPolygon np;
    for (size_t k = 0; k + 1 < hull.size(); ++k) {
        long di = hull[k + 1].first - hull[k].first;
        long dv = hull[k].second - hull[k + 1].second;  // positive = root valuation
        if (dv <= 0) continue;
        np.segments.push_back({Rational(Int(dv), Int(di)), static_cast<int>(di)});
    }
    return np;
}

MultiPoly promote_var_to_param(const MultiPoly& f, int var) {
    const TowerPtr& t = f.tower();
    TowerPtr nt = tower_add_param(t, (*f.vars())[var], -1);
    int pi = nt->nparams() - 1;
    MultiPoly r(f.vars(), nt);
    for (auto& [e, c] : f.terms()) {
        std::map<std::vector<int>, QRat, GrlexLess> terms;
        for (auto& [ge, q] : c.terms()) terms[ge] = q.extended(nt->nparams());
        Elem c2 = Elem::from_terms(nt, std::move(terms));
        c2 = c2 * Elem::param(nt, pi).pow(e[var]);
        std::vector<int> e2 = e;
        e2[var] = 0;
        MultiPoly shifted(f.vars(), nt);
        shifted.set_term(e2, c2);
        r = r + shifted;
    }
    return r;
}

}  // namespace forge
