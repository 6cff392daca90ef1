#include "tower.hpp"

#include <algorithm>
#include <sstream>

namespace forge {

TowerPtr Tower::make(std::vector<std::string> params) {
    auto t = std::make_shared<Tower>();
    t->params_ = std::move(params);
    return t;
}

long Tower::total_degree() const {
    long d = 1;
    for (int i = 0; i < ngens(); ++i) d *= level_degree(i);
    return d;
}

int Tower::param_index(const std::string& name) const {
    for (int i = 0; i < nparams(); ++i)
        if (params_[i] == name) return i;
    return -1;
}

bool Tower::same(const Tower& a, const Tower& b) {
    if (&a == &b) return true;
    if (a.params_ != b.params_ || a.levels_.size() != b.levels_.size()) return false;
    for (size_t i = 0; i < a.levels_.size(); ++i) {
        if (a.levels_[i].name != b.levels_[i].name) return false;
        if (a.levels_[i].minpoly.size() != b.levels_[i].minpoly.size()) return false;
        for (size_t j = 0; j < a.levels_[i].minpoly.size(); ++j)
            if (a.levels_[i].minpoly[j] != b.levels_[i].minpoly[j]) return false;
    }
    return true;
}

bool Tower::prefix_of(const Tower& small, const Tower& big) {
    if (small.params_ != big.params_ || small.levels_.size() > big.levels_.size()) return false;
    for (size_t i = 0; i < small.levels_.size(); ++i) {
        if (small.levels_[i].name != big.levels_[i].name) return false;
        if (small.levels_[i].minpoly.size() != big.levels_[i].minpoly.size()) return false;
        for (size_t j = 0; j < small.levels_[i].minpoly.size(); ++j)
            if (small.levels_[i].minpoly[j] != big.levels_[i].minpoly[j]) return false;
    }
    return true;
}

std::string Tower::describe() const {
    std::ostringstream os;
    os << "Q";
    if (!params_.empty()) os << "(" << join(params_, ",") << ")";
    for (auto& lv : levels_) os << "(" << lv.name << ")";
    return os.str();
}

// ---- Elem ----

Elem::Elem(TowerPtr t, const QRat& c) : tw_(std::move(t)) {
    FORGE_CHECK(c.arity() == tw_->nparams(), "coefficient arity mismatch");
    if (!c.is_zero()) t_[std::vector<int>(tw_->ngens(), 0)] = c;
}

Elem Elem::gen(const TowerPtr& t, int i) {
    FORGE_CHECK(i >= 0 && i < t->ngens(), "generator index out of range");
    Elem r(t);
    std::vector<int> e(t->ngens(), 0);
    e[i] = 1;
    r.t_[e] = QRat(t->nparams(), Rational(1));
    return r;
}

Elem Elem::param(const TowerPtr& t, int i) {
    return Elem(t, QRat::var(t->nparams(), i));
}

Elem Elem::from_terms(TowerPtr t, std::map<std::vector<int>, QRat, GrlexLess> terms) {
    Elem r(std::move(t));
    r.t_ = std::move(terms);
    for (auto it = r.t_.begin(); it != r.t_.end();)
        it = it->second.is_zero() ? r.t_.erase(it) : std::next(it);
    r.reduce();
    return r;
}

bool Elem::is_qrat() const {
    for (auto& [e, c] : t_)
        for (int x : e)
            if (x) return false;
    return true;
}

QRat Elem::qrat_value() const {
    FORGE_CHECK(is_qrat(), "qrat_value on algebraic element");
    return t_.empty() ? QRat(tw_->nparams()) : t_.begin()->second;
}

bool Elem::is_rational_const() const { return is_qrat() && (t_.empty() || t_.begin()->second.is_constant()); }

Rational Elem::rational_value() const {
    FORGE_CHECK(is_rational_const(), "rational_value on non-constant");
    return t_.empty() ? Rational(0) : t_.begin()->second.constant_value();
}

void Elem::add_term(const std::vector<int>& e, const QRat& c) {
    if (c.is_zero()) return;
    auto it = t_.find(e);
    if (it == t_.end()) {
        t_[e] = c;
    } else {
        QRat s = it->second + c;
        if (s.is_zero()) t_.erase(it); else it->second = s;
    }
}

void Elem::reduce() {
    const int ng = tw_->ngens();
    bool changed = true;
    while (changed) {
        changed = false;
        // pick the grlex-largest term with an over-degree exponent
        for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
            int gi = -1;
            for (int i = ng - 1; i >= 0; --i) {
                if (it->first[i] >= tw_->level_degree(i) && tw_->level_degree(i) > 0) { gi = i; break; }
            }
            if (gi < 0) continue;
            std::vector<int> e = it->first;
            QRat c = it->second;
            t_.erase(std::next(it).base());
            int d = tw_->level_degree(gi);
            e[gi] -= d;
            // gen^d = -(lower part of minpoly)
            const auto& mp = tw_->levels_[gi].minpoly;
            for (int k = 0; k < d; ++k) {
                for (auto& [re, rc] : mp[k]) {
                    std::vector<int> e2 = e;
                    for (size_t j = 0; j < re.size(); ++j) e2[j] += re[j];
                    e2[gi] += k;
                    add_term(e2, c * (-rc));
                }
            }
            changed = true;
            break;
        }
    }
}

Elem Elem::operator-() const {
    Elem r(tw_);
    for (auto& [e, c] : t_) r.t_[e] = -c;
    return r;
}

Elem Elem::operator+(const Elem& o) const {
    auto [a, b] = align(*this, o);
    Elem r = a;
    for (auto& [e, c] : b.t_) r.add_term(e, c);
    return r;
}

Elem Elem::operator-(const Elem& o) const { return *this + (-o); }

Elem Elem::operator*(const Elem& o) const {
    auto [a, b] = align(*this, o);
    Elem r(a.tw_);
    for (auto& [e1, c1] : a.t_)
        for (auto& [e2, c2] : b.t_) {
            std::vector<int> e(e1.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    r.reduce();
    return r;
}

Elem Elem::operator/(const Elem& o) const { return *this * o.inv(); }

namespace {

// dense representation in generator `gi` with coefficients not using gens >= gi
std::vector<Elem> dense_in_gen(const Elem& a, int gi) {
    int d = 0;
    for (auto& [e, c] : a.terms()) d = std::max(d, e[gi]);
    std::vector<Elem> out(d + 1, Elem(a.tower()));
    for (auto& [e, c] : a.terms()) {
        std::vector<int> e2 = e;
        e2[gi] = 0;
        std::map<std::vector<int>, QRat, GrlexLess> one{{e2, c}};
        out[e[gi]] = out[e[gi]] + Elem::from_terms(a.tower(), one);
    }
    return out;
}

Elem from_dense_in_gen(const TowerPtr& t, const std::vector<Elem>& v, int gi) {
    Elem r(t);
    Elem g = Elem::gen(t, gi);
    for (int k = static_cast<int>(v.size()) - 1; k >= 0; --k) r = r * g + v[k];
    return r;
}

// invert an element known to only use generators < level
Elem invert_below(const Elem& a, int level) {
    FORGE_CHECK(!a.is_zero(), "tower division by zero");
    const TowerPtr& t = a.tower();
    if (level == 0 || a.is_qrat()) return Elem(t, a.qrat_value().inv());
    int gi = level - 1;
    bool uses = a.uses_gen(gi);
    if (!uses) return invert_below(a, level - 1);

    // extended Euclid of a against minpoly of gen gi, coefficients below gi
    std::vector<Elem> r0;  // minpoly as dense Elem vector
    const auto& mp = t->levels()[gi].minpoly;
    for (auto& raw : mp) {
        std::map<std::vector<int>, QRat, GrlexLess> terms;
        for (auto& [e, c] : raw) {
            std::vector<int> e2 = e;
            e2.resize(t->ngens(), 0);
            terms[e2] = c;
        }
        r0.push_back(Elem::from_terms(t, terms));
    }
    std::vector<Elem> r1 = dense_in_gen(a, gi);
    std::vector<Elem> s0{Elem(t)}, s1{Elem(t, Rational(1))};  // track coeff of `a`

    auto deg = [](const std::vector<Elem>& p) {
        int d = static_cast<int>(p.size()) - 1;
        while (d >= 0 && p[d].is_zero()) --d;
        return d;
    };
    while (true) {
        int d1 = deg(r1);
        FORGE_CHECK(d1 >= 0, "minpoly not irreducible: gcd found in inversion");
        if (d1 == 0) {
            Elem c_inv = invert_below(r1[0], gi);
            Elem s = from_dense_in_gen(t, s1, gi);
            return s * c_inv;
        }
        // r0 = q*r1 + r2 ; s2 = s0 - q*s1
        int d0 = deg(r0);
        if (d0 < d1) { std::swap(r0, r1); std::swap(s0, s1); continue; }
        Elem linv = invert_below(r1[d1], gi);
        std::vector<Elem> q(d0 - d1 + 1, Elem(t));
        std::vector<Elem> rr = r0;
        for (int k = d0 - d1; k >= 0; --k) {
            int dd = deg(rr);
            if (dd != d1 + k) continue;
            Elem qc = rr[dd] * linv;
            q[k] = qc;
            for (int i = 0; i <= d1; ++i) rr[k + i] = rr[k + i] - qc * r1[i];
        }
        // s2 = s0 - q*s1
        std::vector<Elem> s2(std::max(s0.size(), q.size() + s1.size()), Elem(t));
        for (size_t i = 0; i < s0.size(); ++i) s2[i] = s2[i] + s0[i];
        for (size_t i = 0; i < q.size(); ++i)
            for (size_t j = 0; j < s1.size(); ++j) s2[i + j] = s2[i + j] - q[i] * s1[j];
        r0 = r1; r1 = rr;
        s0 = s1; s1 = s2;
    }
}

}  // namespace

Elem Elem::inv() const { return invert_below(*this, tw_->ngens()); }

Elem Elem::pow(long e) const {
    if (e < 0) return inv().pow(-e);
    Elem r(tw_, Rational(1)), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        if (e >>= 1) b = b * b;
    }
    return r;
}

bool Elem::operator==(const Elem& o) const {
    if (Tower::same(*tw_, *o.tw_)) return t_ == o.t_;
    auto [a, b] = align(*this, o);
    return a.t_ == b.t_;
}

Elem Elem::lifted(const TowerPtr& big) const {
    if (Tower::same(*tw_, *big)) { Elem r = *this; r.tw_ = big; return r; }
    FORGE_CHECK(Tower::prefix_of(*tw_, *big), "lift into non-extension tower");
    Elem r(big);
    for (auto& [e, c] : t_) {
        std::vector<int> e2 = e;
        e2.resize(big->ngens(), 0);
        r.t_[e2] = c;
    }
    return r;
}

std::optional<Elem> Elem::try_lower(const TowerPtr& small) const {
    if (!Tower::prefix_of(*small, *tw_)) return std::nullopt;
    for (auto& [e, c] : t_)
        for (int i = small->ngens(); i < tw_->ngens(); ++i)
            if (e[i]) return std::nullopt;
    Elem r(small);
    for (auto& [e, c] : t_) {
        std::vector<int> e2(e.begin(), e.begin() + small->ngens());
        r.t_[e2] = c;
    }
    return r;
}

bool Elem::uses_gen(int i) const {
    for (auto& [e, c] : t_)
        if (e[i]) return true;
    return false;
}

bool Elem::uses_param(int i) const {
    for (auto& [e, c] : t_)
        if (c.depends_on(i)) return true;
    return false;
}

int Elem::top_gen() const {
    int top = -1;
    for (auto& [e, c] : t_)
        for (int i = 0; i < static_cast<int>(e.size()); ++i)
            if (e[i]) top = std::max(top, i);
    return top;
}

std::vector<QRat> Elem::coords() const {
    long dim = tw_->total_degree();
    std::vector<QRat> v(dim, QRat(tw_->nparams()));
    for (auto& [e, c] : t_) {
        long idx = 0;
        for (int i = tw_->ngens() - 1; i >= 0; --i) idx = idx * tw_->level_degree(i) + e[i];
        v[idx] = c;
    }
    return v;
}

Elem Elem::from_coords(const TowerPtr& t, const std::vector<QRat>& v) {
    std::map<std::vector<int>, QRat, GrlexLess> terms;
    for (long idx = 0; idx < static_cast<long>(v.size()); ++idx) {
        if (v[idx].is_zero()) continue;
        std::vector<int> e(t->ngens());
        long r = idx;
        for (int i = 0; i < t->ngens(); ++i) {
            e[i] = static_cast<int>(r % t->level_degree(i));
            r /= t->level_degree(i);
        }
        terms[e] = v[idx];
    }
    return Elem::from_terms(t, terms);
}

Elem Elem::eval_param(int pi, const Rational& v, const TowerPtr& target) const {
    Elem r(target);
    for (auto& [e, c] : t_) {
        QPoly n = c.num().eval_at(pi, v), d = c.den().eval_at(pi, v);
        if (d.is_zero()) throw invariant_error("parameter evaluation hits a pole");
        QRat c2 = QRat(n, d).drop_var(pi);
        std::vector<int> e2 = e;
        e2.resize(target->ngens(), 0);
        r.add_term(e2, c2);
    }
    r.reduce();
    return r;
}

std::string Elem::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    std::vector<std::string> pn = tw_->params();
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        const auto& [e, c] = *it;
        if (!first) os << " + ";
        first = false;
        bool any = false;
        for (int x : e) any = any || x;
        std::string cs = c.str(pn);
        if (!any) {
            os << cs;
        } else {
            if (!c.is_one()) os << "(" << cs << ")*";
            bool star = false;
            for (size_t i = 0; i < e.size(); ++i) {
                if (!e[i]) continue;
                if (star) os << "*";
                star = true;
                os << tw_->levels()[i].name;
                if (e[i] > 1) os << "^" << e[i];
            }
        }
    }
    return os.str();
}

int Elem::cmp(const Elem& a, const Elem& b) {
    auto ia = a.t_.begin(), ib = b.t_.begin();
    for (; ia != a.t_.end() && ib != b.t_.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return GrlexLess()(ia->first, ib->first) ? -1 : 1;
        int c = QRat::cmp(ia->second, ib->second);
        if (c) return c;
    }
    if (ia != a.t_.end()) return 1;
    if (ib != b.t_.end()) return -1;
    return 0;
}

TowerPtr tower_extend(const TowerPtr& t, const std::string& name,
                      const std::vector<Elem>& monic_minpoly) {
    FORGE_CHECK(monic_minpoly.size() >= 2, "minimal polynomial must have degree >= 1");
    FORGE_CHECK(!monic_minpoly.back().is_zero(), "minimal polynomial not monic");
    auto nt = std::make_shared<Tower>(*t);
    Tower::Level lv;
    lv.name = name;
    Elem lead = monic_minpoly.back();
    FORGE_CHECK(lead.is_qrat() && lead.qrat_value().is_one(), "minimal polynomial not monic");
    for (auto& c : monic_minpoly) {
        FORGE_CHECK(Tower::same(*c.tower(), *t), "minpoly coefficient in wrong tower");
        Tower::RawElem raw;
        for (auto& [e, q] : c.terms()) raw[e] = q;
        lv.minpoly.push_back(std::move(raw));
    }
    nt->levels_.push_back(std::move(lv));
    return nt;
}

TowerPtr tower_add_param(const TowerPtr& t, const std::string& name, int position) {
    int p = t->nparams();
    int pos = position < 0 ? p : position;
    FORGE_CHECK(pos >= 0 && pos <= p, "bad param position");
    FORGE_CHECK(t->param_index(name) < 0, "duplicate parameter name");
    auto nt = std::make_shared<Tower>();
    std::vector<std::string> np = t->params();
    np.insert(np.begin() + pos, name);
    nt->params_ = np;
    auto fix = [&](const QRat& q) {
        // re-index: insert a zero-exponent slot at `pos`
        auto fixp = [&](const QPoly& x) {
            QPoly r(p + 1);
            for (auto& [e, c] : x.terms()) {
                std::vector<int> e2 = e;
                e2.insert(e2.begin() + pos, 0);
                r.set_term(e2, c);
            }
            return r;
        };
        return QRat(fixp(q.num()), fixp(q.den()));
    };
    for (auto& lv : t->levels_) {
        Tower::Level nl;
        nl.name = lv.name;
        for (auto& raw : lv.minpoly) {
            Tower::RawElem nraw;
            for (auto& [e, c] : raw) nraw[e] = fix(c);
            nl.minpoly.push_back(std::move(nraw));
        }
        nt->levels_.push_back(std::move(nl));
    }
    return nt;
}

std::pair<Elem, Elem> align(const Elem& a, const Elem& b) {
    if (Tower::same(*a.tower(), *b.tower())) return {a, b};
    if (Tower::prefix_of(*a.tower(), *b.tower())) return {a.lifted(b.tower()), b};
    if (Tower::prefix_of(*b.tower(), *a.tower())) return {a, b.lifted(a.tower())};
    throw input_error("incompatible towers: no level-by-level embedding");
}

Elem tower_arith(const Elem& a, const Elem& b, ArithOp op) {
    switch (op) {
        case ArithOp::add: return a + b;
        case ArithOp::sub: return a - b;
        case ArithOp::mul: return a * b;
        case ArithOp::div:
            if (b.is_zero()) throw input_error("tower division by zero");
            return a / b;
    }
    throw input_error("bad op");
}

// ---- SubfieldFlag ----

SubfieldFlag::SubfieldFlag(TowerPtr t) : tw_(std::move(t)) {
    basis_ = {Elem(tw_, Rational(1))};
    rebuild_matrix();
}

void SubfieldFlag::rebuild_matrix() {
    rows_.clear();
    pivot_.clear();
    inv_rec_.clear();
    long dim = tw_->total_degree();
    for (size_t bi = 0; bi < basis_.size(); ++bi) {
        std::vector<QRat> row = basis_[bi].coords();
        std::vector<QRat> rec(basis_.size(), QRat(tw_->nparams()));
        rec[bi] = QRat(tw_->nparams(), Rational(1));
        // eliminate against existing rows
        for (size_t r = 0; r < rows_.size(); ++r) {
            const QRat& x = row[pivot_[r]];
            if (x.is_zero()) continue;
            for (long j = 0; j < dim; ++j) row[j] = row[j] - x * rows_[r][j];
            for (size_t j = 0; j < rec.size(); ++j) rec[j] = rec[j] - x * inv_rec_[r][j];
        }
        int pv = -1;
        for (long j = 0; j < dim; ++j)
            if (!row[j].is_zero()) { pv = static_cast<int>(j); break; }
        FORGE_CHECK(pv >= 0, "linearly dependent subfield basis");
        QRat inv = row[pv].inv();
        for (long j = 0; j < dim; ++j) row[j] = row[j] * inv;
        for (size_t j = 0; j < rec.size(); ++j) rec[j] = rec[j] * inv;
        rows_.push_back(std::move(row));
        inv_rec_.push_back(std::move(rec));
        pivot_.push_back(pv);
    }
}

std::optional<std::vector<QRat>> SubfieldFlag::coords_in(const Elem& x) const {
    Elem xx = x.tower() == tw_ || Tower::same(*x.tower(), *tw_) ? x : x.lifted(tw_);
    std::vector<QRat> v = xx.coords();
    std::vector<QRat> out(basis_.size(), QRat(tw_->nparams()));
    long dim = tw_->total_degree();
    for (size_t r = 0; r < rows_.size(); ++r) {
        const QRat c = v[pivot_[r]];
        if (c.is_zero()) continue;
        for (long j = 0; j < dim; ++j) v[j] = v[j] - c * rows_[r][j];
        for (size_t j = 0; j < basis_.size(); ++j) out[j] = out[j] + c * inv_rec_[r][j];
    }
    for (long j = 0; j < dim; ++j)
        if (!v[j].is_zero()) return std::nullopt;
    return out;
}

SubfieldFlag::MinPoly SubfieldFlag::min_poly(const Elem& x) const {
    // find the least k with x^k in the span of {x^l * basis : l < k}
    Elem xx = Tower::same(*x.tower(), *tw_) ? x : x.lifted(tw_);
    long dim = tw_->total_degree();
    const int np = tw_->nparams();

    std::vector<std::vector<QRat>> ech;   // echelon rows over the span
    std::vector<int> piv;
    std::vector<std::vector<QRat>> rec;   // row recipe in terms of (l, basis j)
    auto insert_vec = [&](std::vector<QRat> row, std::vector<QRat> recipe)
        -> std::optional<std::vector<QRat>> {
        for (size_t r = 0; r < ech.size(); ++r) {
            const QRat c = row[piv[r]];
            if (c.is_zero()) continue;
            for (long j = 0; j < dim; ++j) row[j] = row[j] - c * ech[r][j];
            for (size_t j = 0; j < recipe.size(); ++j) recipe[j] = recipe[j] - c * rec[r][j];
        }
        int pv = -1;
        for (long j = 0; j < dim; ++j)
            if (!row[j].is_zero()) { pv = static_cast<int>(j); break; }
        if (pv < 0) return recipe;  // dependent: recipe expresses the dependence
        QRat iv = row[pv].inv();
        for (long j = 0; j < dim; ++j) row[j] = row[j] * iv;
        for (size_t j = 0; j < recipe.size(); ++j) recipe[j] = recipe[j] * iv;
        ech.push_back(std::move(row));
        rec.push_back(std::move(recipe));
        piv.push_back(pv);
        return std::nullopt;
    };

    const size_t m = basis_.size();
    Elem xpow(tw_, Rational(1));
    long maxk = dim + 1;
    for (long k = 0; k <= maxk; ++k) {
        // try to express x^k in the current span before adding its own shelf
        std::vector<QRat> probe = xpow.coords();
        {
            // attempt reduction without inserting; recipe index l*m + j
            // stands for x^l * basis_j
            std::vector<QRat> row = probe;
            std::vector<QRat> full(m * k, QRat(np));
            for (size_t r = 0; r < ech.size(); ++r) {
                const QRat c = row[piv[r]];
                if (c.is_zero()) continue;
                for (long j = 0; j < dim; ++j) row[j] = row[j] - c * ech[r][j];
                for (size_t j = 0; j < full.size(); ++j) full[j] = full[j] + c * rec[r][j];
            }
            bool zero = true;
            for (long j = 0; j < dim; ++j)
                if (!row[j].is_zero()) { zero = false; break; }
            if (zero && k > 0) {
                MinPoly mp;
                mp.coeff.assign(k + 1, Elem(tw_));
                mp.coords.assign(k + 1, std::vector<QRat>(m, QRat(np)));
                mp.coeff[k] = Elem(tw_, Rational(1));
                mp.coords[k][0] = QRat(np, Rational(1));  // valid when basis_[0] == 1
                for (long l = 0; l < k; ++l) {
                    Elem cl(tw_);
                    for (size_t j = 0; j < m; ++j) {
                        mp.coords[l][j] = -full[l * m + j];
                        cl = cl + Elem(tw_, mp.coords[l][j]) * basis_[j];
                    }
                    mp.coeff[l] = cl;
                }
                return mp;
            }
        }
        // widen the older recipes, then add the shelf {x^k * basis_j}
        for (auto& r0 : rec) r0.resize(m * (k + 1), QRat(np));
        for (size_t j = 0; j < m; ++j) {
            std::vector<QRat> recipe(m * (k + 1), QRat(np));
            recipe[k * m + j] = QRat(np, Rational(1));
            Elem v = xpow * basis_[j];
            insert_vec(v.coords(), std::move(recipe));
        }
        xpow = xpow * xx;
    }
    throw invariant_error("min_poly: no dependence found (dimension overflow)");
}

int SubfieldFlag::adjoin(const Elem& x) {
    Elem xx = Tower::same(*x.tower(), *tw_) ? x : x.lifted(tw_);
    if (contains(xx)) return 1;
    MinPoly mp = min_poly(xx);
    int d = mp.degree();
    std::vector<Elem> nb;
    Elem xpow(tw_, Rational(1));
    for (int k = 0; k < d; ++k) {
        for (auto& b : basis_) nb.push_back(b * xpow);
        xpow = xpow * xx;
    }
    gens_.push_back(xx);
    gen_deg_.push_back(d);
    basis_ = std::move(nb);
    rebuild_matrix();
    return d;
}

Elem eval_poly(const std::vector<Elem>& poly, const Elem& x) {
    FORGE_CHECK(!poly.empty(), "eval of empty polynomial");
    Elem r(x.tower());
    for (int k = static_cast<int>(poly.size()) - 1; k >= 0; --k) r = r * x + poly[k].lifted(x.tower());
    return r;
}

}  // namespace forge
