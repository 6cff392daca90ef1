#include "factor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace forge {

// ---- dense univariate helpers ----

int updeg(const UPoly& f) {
    int d = static_cast<int>(f.size()) - 1;
    while (d >= 0 && f[d].is_zero()) --d;
    return d;
}

UPoly uptrim(UPoly f) {
    FORGE_CHECK(!f.empty(), "empty UPoly");
    f.resize(std::max(updeg(f) + 1, 1), Elem(f[0].tower()));
    return f;
}

static TowerPtr common_tower(const UPoly& a, const UPoly& b) {
    TowerPtr t = a.empty() ? b[0].tower() : a[0].tower();
    for (auto& c : a)
        if (Tower::prefix_of(*t, *c.tower()) && !Tower::same(*t, *c.tower())) t = c.tower();
    for (auto& c : b)
        if (Tower::prefix_of(*t, *c.tower()) && !Tower::same(*t, *c.tower())) t = c.tower();
    return t;
}

UPoly uplift(const UPoly& f, const TowerPtr& big) {
    UPoly r;
    r.reserve(f.size());
    for (auto& c : f) r.push_back(c.lifted(big));
    return r;
}

UPoly upadd(const UPoly& a, const UPoly& b) {
    TowerPtr t = common_tower(a, b);
    UPoly x = uplift(a, t), y = uplift(b, t);
    UPoly r(std::max(x.size(), y.size()), Elem(t));
    for (size_t i = 0; i < x.size(); ++i) r[i] = r[i] + x[i];
    for (size_t i = 0; i < y.size(); ++i) r[i] = r[i] + y[i];
    return uptrim(r);
}

UPoly upsub(const UPoly& a, const UPoly& b) {
    TowerPtr t = common_tower(a, b);
    UPoly y = uplift(b, t);
    for (auto& c : y) c = -c;
    return upadd(uplift(a, t), y);
}

UPoly upmul(const UPoly& a, const UPoly& b) {
    TowerPtr t = common_tower(a, b);
    UPoly x = uplift(a, t), y = uplift(b, t);
    UPoly r(x.size() + y.size() - 1, Elem(t));
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i].is_zero()) continue;
        for (size_t j = 0; j < y.size(); ++j) r[i + j] = r[i + j] + x[i] * y[j];
    }
    return uptrim(r);
}

UPoly upscale(const UPoly& a, const Elem& c) {
    UPoly r;
    for (auto& x : a) r.push_back(x * c);
    return uptrim(r);
}

UPoly upmonic(const UPoly& a) {
    int d = updeg(a);
    FORGE_CHECK(d >= 0, "monic of zero polynomial");
    return uptrim(upscale(a, a[d].inv()));
}

std::pair<UPoly, UPoly> updivrem(const UPoly& a, const UPoly& b) {
    int db = updeg(b);
    FORGE_CHECK(db >= 0, "division by zero polynomial");
    TowerPtr t = common_tower(a, b);
    UPoly r = uplift(a, t), bb = uplift(b, t);
    Elem linv = bb[db].inv();
    int da = updeg(r);
    UPoly q(std::max(da - db + 1, 1), Elem(t));
    while (da >= db) {
        Elem c = r[da] * linv;
        q[da - db] = c;
        for (int i = 0; i <= db; ++i) r[da - db + i] = r[da - db + i] - c * bb[i];
        r[da] = Elem(t);
        da = updeg(r);
    }
    return {uptrim(q), uptrim(r)};
}

UPoly upgcd(const UPoly& a, const UPoly& b) {
    UPoly x = uptrim(a), y = uptrim(b);
    while (updeg(y) >= 0) {
        auto [q, r] = updivrem(x, y);
        x = y;
        y = r;
    }
    if (updeg(x) < 0) return x;
    return upmonic(x);
}

UPoly upderiv(const UPoly& a) {
    if (updeg(a) <= 0) return UPoly{Elem(a[0].tower())};
    UPoly r(a.size() - 1, Elem(a[0].tower()));
    for (size_t i = 1; i < a.size(); ++i)
        r[i - 1] = a[i] * Elem(a[i].tower(), Rational(static_cast<long>(i)));
    return uptrim(r);
}

Elem upeval(const UPoly& a, const Elem& x) {
    Elem r(x.tower());
    for (int i = updeg(a); i >= 0; --i) r = r * x + a[i].lifted(x.tower());
    return r;
}

UPoly upshift(const UPoly& f, const Elem& d) {
    TowerPtr t = d.tower();
    UPoly r{Elem(t)};
    for (int i = updeg(f); i >= 0; --i) {
        UPoly nr(r.size() + 1, Elem(t));
        for (size_t k = 0; k < r.size(); ++k) {
            nr[k + 1] = nr[k + 1] + r[k];
            nr[k] = nr[k] + r[k] * d;
        }
        nr[0] = nr[0] + f[i].lifted(t);
        r = uptrim(nr);
    }
    return r;
}

bool upeq(const UPoly& a, const UPoly& b) { return updeg(upsub(a, b)) < 0; }

std::string upstr(const UPoly& f, const std::string& zname) {
    std::ostringstream os;
    bool first = true;
    for (int i = updeg(f); i >= 0; --i) {
        if (f[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << f[i].str() << ")";
        if (i >= 1) os << "*" << zname;
        if (i >= 2) os << "^" << i;
    }
    if (first) os << "0";
    return os.str();
}

// gcd-free squarefree test: the resultant of f and f' vanishes exactly on
// squarefull input; Bareiss keeps every division exact
bool upoly_is_squarefree(const UPoly& f) {
    int d = updeg(f);
    if (d <= 1) return true;
    TowerPtr t = f[0].tower();
    VarCtx zc = make_vars({"z!"});
    MultiPoly A(zc, t), B(zc, t);
    for (int k = 0; k <= d; ++k) A.set_term({k}, f[k]);
    UPoly df = upderiv(f);
    for (int k = 0; k <= updeg(df); ++k) B.set_term({k}, df[k]);
    MultiPoly r = resultant(A, B, 0);
    return !r.is_zero();
}

// ---- squarefree decomposition (Yun) ----

std::vector<std::pair<UPoly, int>> squarefree_decomposition(const UPoly& f0) {
    UPoly f = uptrim(f0);
    FORGE_CHECK(updeg(f) >= 0, "squarefree decomposition of zero");
    std::vector<std::pair<UPoly, int>> out;
    if (updeg(f) == 0) return out;
    f = upmonic(f);
    if (upoly_is_squarefree(f)) {
        out.push_back({f, 1});
        return out;
    }
    UPoly fp = upderiv(f);
    UPoly u = upgcd(f, fp);
    if (updeg(u) == 0) {
        out.push_back({f, 1});
        return out;
    }
    UPoly v = updivrem(f, u).first;
    UPoly w = upsub(updivrem(fp, u).first, upderiv(v));
    int k = 1;
    while (updeg(v) > 0) {
        UPoly g = upgcd(v, w);
        if (updeg(g) > 0) out.push_back({g, k});
        v = updivrem(v, g).first;
        w = upsub(updivrem(w, g).first, upderiv(v));
        ++k;
    }
    return out;
}

// =====================================================================
// Zassenhaus over Q: good prime, Berlekamp, linear Hensel lifting to the
// Mignotte bound, subset recombination.
// =====================================================================

namespace {

using ZPoly = std::vector<Int>;

int zdeg(const ZPoly& f) {
    int d = static_cast<int>(f.size()) - 1;
    while (d >= 0 && f[d] == 0) --d;
    return d;
}
ZPoly ztrim(ZPoly f) {
    f.resize(std::max(zdeg(f) + 1, 1), Int(0));
    return f;
}
ZPoly zmul(const ZPoly& a, const ZPoly& b) {
    ZPoly r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return ztrim(r);
}
ZPoly zsub(const ZPoly& a, const ZPoly& b) {
    ZPoly r(std::max(a.size(), b.size()), Int(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return ztrim(r);
}
Int zmod_sym(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    if (2 * r > m) r -= m;
    return r;
}
ZPoly zmodp(const ZPoly& a, const Int& m) {
    ZPoly r = a;
    for (auto& x : r) {
        x %= m;
        if (x < 0) x += m;
    }
    return ztrim(r);
}
ZPoly zmods(const ZPoly& a, const Int& m) {
    ZPoly r = a;
    for (auto& x : r) x = zmod_sym(x, m);
    return ztrim(r);
}
// exact integer division test: does b (monic) divide a over Z?
bool zdivides_monic(const ZPoly& a, const ZPoly& b, ZPoly* quot = nullptr) {
    ZPoly r = a;
    int db = zdeg(b);
    int da = zdeg(r);
    if (da < db) return false;
    ZPoly q(da - db + 1, Int(0));
    while ((da = zdeg(r)) >= db) {
        Int c = r[da];  // b monic
        q[da - db] = c;
        for (int i = 0; i <= db; ++i) r[da - db + i] -= c * b[i];
    }
    if (zdeg(r) >= 0) return false;
    if (quot) *quot = ztrim(q);
    return true;
}

// small-prime polynomial arithmetic
struct PP {
    long p;
    std::vector<long> c;
};
long pinv(long a, long p) {
    long t = 0, nt = 1, r = p, nr = ((a % p) + p) % p;
    while (nr) {
        long q = r / nr;
        long tmp = t - q * nt; t = nt; nt = tmp;
        tmp = r - q * nr; r = nr; nr = tmp;
    }
    return ((t % p) + p) % p;
}
int ppdeg(const PP& f) {
    int d = static_cast<int>(f.c.size()) - 1;
    while (d >= 0 && f.c[d] == 0) --d;
    return d;
}
PP pptrim(PP f) {
    f.c.resize(std::max(ppdeg(f) + 1, 1), 0);
    return f;
}
PP ppmul(const PP& a, const PP& b) {
    PP r{a.p, std::vector<long>(a.c.size() + b.c.size() - 1, 0)};
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = (r.c[i + j] + a.c[i] * b.c[j]) % a.p;
    return pptrim(r);
}
std::pair<PP, PP> ppdivrem(const PP& a, const PP& b) {
    PP r = a;
    int db = ppdeg(b);
    long li = pinv(b.c[db], a.p);
    PP q{a.p, std::vector<long>(std::max(ppdeg(a) - db + 1, 1), 0)};
    int da;
    while ((da = ppdeg(r)) >= db) {
        long c = r.c[da] * li % a.p;
        q.c[da - db] = c;
        for (int i = 0; i <= db; ++i)
            r.c[da - db + i] = ((r.c[da - db + i] - c * b.c[i]) % a.p + a.p) % a.p;
        r.c[da] = 0;
    }
    return {pptrim(q), pptrim(r)};
}
PP ppgcd(PP a, PP b) {
    while (ppdeg(b) >= 0) {
        auto [q, r] = ppdivrem(a, b);
        a = b;
        b = r;
    }
    int d = ppdeg(a);
    if (d >= 0) {
        long li = pinv(a.c[d], a.p);
        for (auto& x : a.c) x = x * li % a.p;
    }
    return pptrim(a);
}
PP ppderiv(const PP& a) {
    PP r{a.p, std::vector<long>(std::max<size_t>(a.c.size() - 1, 1), 0)};
    for (size_t i = 1; i < a.c.size(); ++i)
        r.c[i - 1] = a.c[i] * (static_cast<long>(i) % a.p) % a.p;
    return pptrim(r);
}
PP pppowmod(PP b, long e, const PP& m) {
    PP r{b.p, {1}};
    b = ppdivrem(b, m).second;
    while (e) {
        if (e & 1) r = ppdivrem(ppmul(r, b), m).second;
        b = ppdivrem(ppmul(b, b), m).second;
        e >>= 1;
    }
    return r;
}

// Berlekamp factorization of a squarefree monic polynomial over F_p
std::vector<PP> berlekamp(const PP& f) {
    int n = ppdeg(f);
    long p = f.p;
    if (n <= 1) return {f};
    std::vector<std::vector<long>> Q(n, std::vector<long>(n, 0));
    PP xp = pppowmod(PP{p, {0, 1}}, p, f);
    PP cur{p, {1}};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= ppdeg(cur); ++j) Q[i][j] = cur.c[j];
        cur = ppdivrem(ppmul(cur, xp), f).second;
    }
    for (int i = 0; i < n; ++i) Q[i][i] = ((Q[i][i] - 1) % p + p) % p;
    // nullspace of the transpose acting on coefficient columns: we need v with
    // v(x)^p = v(x) mod f, i.e. rows i of Q give x^{pi}; v = sum v_i x^i needs
    // sum v_i (row_i) = v, so solve M w = 0 with M = Q^T - already transposed in Q[i][j] usage
    std::vector<std::vector<long>> M(n, std::vector<long>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M[i][j] = Q[j][i];
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < n; ++col) {
        int pr = -1;
        for (int r = rank; r < n; ++r)
            if (M[r][col]) { pr = r; break; }
        if (pr < 0) continue;
        std::swap(M[rank], M[pr]);
        long li = pinv(M[rank][col], p);
        for (int j = 0; j < n; ++j) M[rank][j] = M[rank][j] * li % p;
        for (int r = 0; r < n; ++r) {
            if (r == rank || !M[r][col]) continue;
            long c = M[r][col];
            for (int j = 0; j < n; ++j)
                M[r][j] = ((M[r][j] - c * M[rank][j]) % p + p) % p;
        }
        pivot_col.push_back(col);
        ++rank;
    }
    int nullity = n - rank;
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<std::vector<long>> basis;
    for (int col = 0; col < n; ++col) {
        if (is_pivot[col]) continue;
        std::vector<long> v(n, 0);
        v[col] = 1;
        for (int r = 0; r < rank; ++r)
            v[pivot_col[r]] = (p - M[r][col] % p) % p;
        basis.push_back(v);
    }
    std::vector<PP> factors{f};
    for (auto& v : basis) {
        if (static_cast<int>(factors.size()) >= nullity) break;
        PP vp = pptrim(PP{p, v});
        if (ppdeg(vp) <= 0) continue;
        std::vector<PP> next;
        for (auto& g : factors) {
            if (ppdeg(g) <= 1) {
                next.push_back(g);
                continue;
            }
            PP rest = g;
            for (long c = 0; c < p && ppdeg(rest) > 0; ++c) {
                PP sh = vp;
                sh.c[0] = ((sh.c[0] - c) % p + p) % p;
                PP d = ppgcd(sh, rest);
                if (ppdeg(d) > 0 && ppdeg(d) < ppdeg(rest)) {
                    next.push_back(d);
                    rest = ppdivrem(rest, d).first;
                }
            }
            if (ppdeg(rest) > 0) next.push_back(rest);
        }
        factors = next;
    }
    return factors;
}

// linear two-factor Hensel lift: f == g*h mod p (all monic), lift to mod p^e
void hensel_lift_pair(const ZPoly& f, ZPoly& g, ZPoly& h, long p, int e) {
    // Bezout s*g + t*h = 1 mod p via extended Euclid over F_p
    auto topp = [&](const ZPoly& a) {
        PP r{p, {}};
        for (auto& x : a) r.c.push_back(mpz_class((x % p + p) % p).get_si());
        if (r.c.empty()) r.c.push_back(0);
        return pptrim(r);
    };
    PP g0 = topp(g), h0 = topp(h);
    // extended Euclid
    PP r0 = g0, r1 = h0;
    PP s0{p, {1}}, s1{p, {0}}, t0{p, {0}}, t1{p, {1}};
    while (ppdeg(r1) >= 0) {
        auto [q, r2] = ppdivrem(r0, r1);
        PP s2 = pptrim(PP{p, [&] {
                            std::vector<long> v(std::max(s0.c.size(), q.c.size() + s1.c.size()), 0);
                            for (size_t i = 0; i < s0.c.size(); ++i) v[i] = s0.c[i];
                            PP qs = ppmul(q, s1);
                            for (size_t i = 0; i < qs.c.size(); ++i)
                                v[i] = ((v[i] - qs.c[i]) % p + p) % p;
                            return v;
                        }()});
        PP t2 = pptrim(PP{p, [&] {
                            std::vector<long> v(std::max(t0.c.size(), q.c.size() + t1.c.size()), 0);
                            for (size_t i = 0; i < t0.c.size(); ++i) v[i] = t0.c[i];
                            PP qt = ppmul(q, t1);
                            for (size_t i = 0; i < qt.c.size(); ++i)
                                v[i] = ((v[i] - qt.c[i]) % p + p) % p;
                            return v;
                        }()});
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
        t0 = t1; t1 = t2;
    }
    FORGE_CHECK(ppdeg(r0) == 0, "factors not coprime mod p");
    long ci = pinv(r0.c[0], p);
    for (auto& x : s0.c) x = x * ci % p;
    for (auto& x : t0.c) x = x * ci % p;
    // s0*g + t0*h = 1 mod p
    Int pk(p);
    for (int k = 1; k < e; ++k) {
        Int pk1 = pk * p;
        // residual e_k = (f - g*h)/p^k mod p
        ZPoly res = zsub(f, zmul(g, h));
        ZPoly ek;
        for (auto& x : res) {
            FORGE_CHECK(x % pk == 0, "hensel residual not divisible");
            ek.push_back((x / pk) % p);
        }
        ek = zmodp(ek, Int(p));
        if (zdeg(ek) < 0) { pk = pk1; continue; }
        PP ekp = topp(ek);
        // want g0*dh + h0*dg = ek with deg dh < deg h0, deg dg < deg g0;
        // write ek = g0*(s0 ek) + h0*(t0 ek) and reduce s0*ek modulo h0
        PP se = ppmul(s0, ekp);
        auto [q1, dhp] = ppdivrem(se, h0);
        PP te = ppmul(t0, ekp);
        // dg = t0*ek + q1*g0
        PP dgp = pptrim(PP{p, [&] {
                             PP qg = ppmul(q1, g0);
                             std::vector<long> v(std::max(te.c.size(), qg.c.size()), 0);
                             for (size_t i = 0; i < te.c.size(); ++i) v[i] = te.c[i];
                             for (size_t i = 0; i < qg.c.size(); ++i)
                                 v[i] = (v[i] + qg.c[i]) % p;
                             return v;
                         }()});
        // g += p^k * dg ; h += p^k * dh
        ZPoly gg = g, hh = h;
        gg.resize(std::max(gg.size(), dgp.c.size()), Int(0));
        for (size_t i = 0; i < dgp.c.size(); ++i) gg[i] += pk * dgp.c[i];
        hh.resize(std::max(hh.size(), dhp.c.size()), Int(0));
        for (size_t i = 0; i < dhp.c.size(); ++i) hh[i] += pk * dhp.c[i];
        g = zmodp(gg, pk1);
        h = zmodp(hh, pk1);
        pk = pk1;
    }
}

// lift all mod-p factors of monic H to mod p^e (iterated pair extraction)
std::vector<ZPoly> hensel_lift_all(const ZPoly& H, std::vector<PP> fac, long p, int e) {
    std::vector<ZPoly> out;
    ZPoly cur = H;
    while (fac.size() > 1) {
        PP g0 = fac[0];
        PP h0{p, {1}};
        for (size_t i = 1; i < fac.size(); ++i) h0 = ppmul(h0, fac[i]);
        ZPoly g, h;
        for (long x : g0.c) g.push_back(Int(x));
        for (long x : h0.c) h.push_back(Int(x));
        hensel_lift_pair(cur, g, h, p, e);
        out.push_back(g);
        cur = h;
        fac.erase(fac.begin());
    }
    out.push_back(cur);
    return out;
}

// check g*dh... verify mod p^e product and swap in: helper not needed further

// monic factors over Q of a squarefree rational-coefficient polynomial
std::vector<std::vector<Rational>> factor_rationals_sqfree(const std::vector<Rational>& f,
                                                           const Caps& caps, Rng& rng) {
    (void)rng;
    (void)caps;
    int d = static_cast<int>(f.size()) - 1;
    if (d > 200) throw cap_error("internal degree safety cap exceeded");
    if (d == 1) {
        std::vector<Rational> m{f[0] / f[1], Rational(1)};
        return {m};
    }
    // integer primitive part
    Int den(1);
    for (auto& c : f) den = lcm(den, c.den());
    ZPoly P;
    for (auto& c : f) P.push_back(c.num() * (den / c.den()));
    Int cont(0);
    for (auto& c : P) cont = gcd(cont, c);
    if (cont != 0)
        for (auto& c : P) c /= cont;
    if (P[d] < 0)
        for (auto& c : P) c = -c;
    Int l = P[d];
    // monic transform H(z) = l^(d-1) P(z/l)
    ZPoly H(d + 1, Int(0));
    for (int i = 0; i <= d; ++i) {
        Int li(1);
        for (int k = 0; k < d - 1 - i + (i == d ? 1 : 0); ++k) li *= l;
        // exponent is d-1-i for i<d; for i==d it is 0 and the coeff becomes 1
        H[i] = (i == d) ? Int(1) : P[i] * li;
    }
    // pick a good prime: squarefree reduction
    static const long primes[] = {3,     5,     7,     11,    13,    17,    19,   23,
                                  29,    31,    37,    41,    43,    47,    53,   59,
                                  61,    67,    71,    73,    79,    83,    89,   97,
                                  101,   103,   107,   109,   113,   127,   131,  137,
                                  139,   149,   151,   157,   163,   167,   173,  179,
                                  181,   191,   193,   197,   199,   211,   223,  227};
    long p = 0;
    PP Hp{0, {}};
    for (long cand : primes) {
        PP hp{cand, {}};
        for (auto& x : H) hp.c.push_back(mpz_class((x % cand + cand) % cand).get_si());
        hp = pptrim(hp);
        if (ppdeg(hp) != d) continue;  // monic: cannot happen, kept for safety
        PP g = ppgcd(hp, ppderiv(hp));
        if (ppdeg(g) == 0) {
            p = cand;
            Hp = hp;
            break;
        }
    }
    FORGE_CHECK(p != 0, "no good prime found");
    std::vector<PP> pf = berlekamp(Hp);
    std::sort(pf.begin(), pf.end(), [](const PP& a, const PP& b) { return a.c < b.c; });
    if (pf.size() == 1) {
        std::vector<Rational> m;
        for (auto& c : f) m.push_back(c / f[d]);
        return {m};
    }
    // Mignotte-style bound for coefficients of monic factors of H
    Int norm2(0);
    for (auto& c : H) norm2 += c * c;
    Int B(1);
    for (int i = 0; i < d; ++i) B *= 2;
    Int s;
    mpz_sqrt(s.get_mpz_t(), norm2.get_mpz_t());
    B *= (s + 1);
    int e = 1;
    Int pe(p);
    while (pe <= 2 * B) {
        pe *= p;
        ++e;
    }
    std::vector<ZPoly> lifted = hensel_lift_all(H, pf, p, e);
    // subset recombination
    std::vector<ZPoly> results;
    ZPoly rem = H;
    std::vector<int> live(lifted.size());
    std::iota(live.begin(), live.end(), 0);
    int maxsz = static_cast<int>(live.size());
    for (int sz = 1; sz <= maxsz; ++sz) {
        if (static_cast<int>(live.size()) < sz) break;
        // enumerate subsets of size sz over live indices
        std::vector<int> idx(sz);
        std::iota(idx.begin(), idx.end(), 0);
        bool advanced = true;
        while (advanced) {
            ZPoly cand{Int(1)};
            for (int k : idx) cand = zmods(zmul(cand, zmodp(lifted[live[k]], pe)), pe);
            ZPoly q;
            if (zdeg(cand) <= zdeg(rem) && zdivides_monic(rem, cand, &q)) {
                results.push_back(cand);
                rem = q;
                std::vector<int> nl;
                for (size_t i = 0; i < live.size(); ++i)
                    if (std::find(idx.begin(), idx.end(), static_cast<int>(i)) == idx.end())
                        nl.push_back(live[i]);
                live = nl;
                idx.assign(sz, 0);
                std::iota(idx.begin(), idx.end(), 0);
                if (static_cast<int>(live.size()) < sz) break;
                continue;
            }
            // next subset
            int i = sz - 1;
            while (i >= 0 && idx[i] == static_cast<int>(live.size()) - sz + i) --i;
            if (i < 0) {
                advanced = false;
            } else {
                ++idx[i];
                for (int j = i + 1; j < sz; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    }
    if (zdeg(rem) > 0) results.push_back(rem);
    // un-transform: factor(z) of H -> pp(factor(l*z)) of P, then monic over Q
    std::vector<std::vector<Rational>> out;
    for (auto& h : results) {
        int dh = zdeg(h);
        std::vector<Rational> g(dh + 1);
        Int lp(1);
        for (int i = 0; i <= dh; ++i) {
            g[i] = Rational(Int(h[i] * lp));
            lp *= l;
        }
        // monic normalize over Q
        Rational lc = g[dh];
        for (auto& c : g) c = c / lc;
        out.push_back(g);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t i = 0; i < a.size(); ++i) {
            int c = Rational::cmp(a[i], b[i]);
            if (c) return c < 0;
        }
        return false;
    });
    return out;
}

}  // namespace

// =====================================================================
// Fraction-field route: evaluation of the last parameter, recursion,
// linear Hensel lift in (y - a), recombination. Coefficients are QRat.
// =====================================================================

namespace {

using FPoly = std::vector<QRat>;  // dense in z over Q(params)

int fdeg(const FPoly& f) {
    int d = static_cast<int>(f.size()) - 1;
    while (d >= 0 && f[d].is_zero()) --d;
    return d;
}
FPoly ftrim(FPoly f, int arity) {
    int d = fdeg(f);
    f.resize(std::max(d + 1, 1), QRat(arity));
    return f;
}
FPoly fmul(const FPoly& a, const FPoly& b, int arity) {
    FPoly r(a.size() + b.size() - 1, QRat(arity));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    return ftrim(r, arity);
}
std::pair<FPoly, FPoly> fdivrem(const FPoly& a, const FPoly& b, int arity) {
    FPoly r = a;
    int db = fdeg(b);
    QRat li = b[db].inv();
    FPoly q(std::max(fdeg(a) - db + 1, 1), QRat(arity));
    int da;
    while ((da = fdeg(r)) >= db) {
        QRat c = r[da] * li;
        q[da - db] = c;
        for (int i = 0; i <= db; ++i) r[da - db + i] = r[da - db + i] - c * b[i];
        r[da] = QRat(arity);
    }
    return {ftrim(q, arity), ftrim(r, arity)};
}
FPoly fgcd(FPoly a, FPoly b, int arity) {
    while (fdeg(b) >= 0) {
        auto [q, r] = fdivrem(a, b, arity);
        a = b;
        b = r;
    }
    if (fdeg(a) >= 0) {
        QRat li = a[fdeg(a)].inv();
        for (auto& c : a) c = c * li;
    }
    return ftrim(a, arity);
}
FPoly fderiv(const FPoly& a, int arity) {
    FPoly r(std::max<size_t>(a.size() - 1, 1), QRat(arity));
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * QRat(arity, Rational((long)i));
    return ftrim(r, arity);
}

// series element: truncated power series in u over Q(arity-1 params),
// represented as dense coefficient vector
using USer = std::vector<QRat>;
USer user_mul(const USer& a, const USer& b, int B, int ar) {
    USer r(B, QRat(ar));
    for (int i = 0; i < B; ++i) {
        if (a.size() <= static_cast<size_t>(i) || a[i].is_zero()) continue;
        for (int j = 0; i + j < B; ++j) {
            if (b.size() <= static_cast<size_t>(j)) break;
            r[i + j] = r[i + j] + a[i] * b[j];
        }
    }
    return r;
}

using SPoly = std::vector<USer>;  // dense in z, coefficients truncated series

SPoly spoly_mul(const SPoly& a, const SPoly& b, int B, int ar) {
    SPoly r(a.size() + b.size() - 1, USer(B, QRat(ar)));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) {
            USer prod = user_mul(a[i], b[j], B, ar);
            for (int k = 0; k < B; ++k) r[i + j][k] = r[i + j][k] + prod[k];
        }
    return r;
}

// factor a squarefree monic-normalized polynomial over Q(params); returns
// monic irreducible factors
std::vector<FPoly> factor_fracfield_sqfree(const FPoly& f0, int arity, const Caps& caps,
                                           Rng& rng);

std::vector<FPoly> factor_fracfield_sqfree_inner(const FPoly& f0, int arity, const Caps& caps,
                                                 Rng& rng) {
    int d = fdeg(f0);
    FORGE_CHECK(d >= 1, "factor of constant");
    if (arity == 0) {
        std::vector<Rational> rf(d + 1);
        for (int i = 0; i <= d; ++i) rf[i] = f0[i].constant_value();
        auto fs = factor_rationals_sqfree(rf, caps, rng);
        std::vector<FPoly> out;
        for (auto& g : fs) {
            FPoly gg;
            for (auto& c : g) gg.push_back(QRat(0, c));
            out.push_back(gg);
        }
        return out;
    }
    if (d == 1) return {FPoly{f0[0] / f0[1], QRat(arity, Rational(1))}};
    if (d > 200) throw cap_error("internal degree safety cap exceeded");
    int y = arity - 1;

    // clear denominators, remove z-content, monic transform
    QPoly den(arity, Rational(1));
    bool ydep = false;
    for (auto& c : f0) {
        den = den.divexact(qpoly_gcd(den, c.den())) * c.den();
        if (c.depends_on(y)) ydep = true;
    }
    if (!ydep) {
        // the last parameter does not occur: factor with it ignored
        FPoly f1;
        for (auto& c : f0) f1.push_back(QRat(c.num().drop_var(y), c.den().drop_var(y)));
        auto fs = factor_fracfield_sqfree(f1, arity - 1, caps, rng);
        std::vector<FPoly> out;
        for (auto& g : fs) {
            FPoly gg;
            for (auto& c : g) gg.push_back(c.extended(arity));
            // re-insert var y at the right position: extended appends at end == y
            out.push_back(gg);
        }
        return out;
    }
    std::vector<QPoly> P(d + 1, QPoly(arity));
    for (int i = 0; i <= d; ++i) {
        QRat c = f0[i] * QRat(den);
        FORGE_CHECK(c.is_polynomial(), "denominator clearing failed");
        P[i] = c.num().scale(c.den().constant_value().inv());
    }
    QPoly cont = P[0];
    for (int i = 1; i <= d; ++i) cont = qpoly_gcd(cont, P[i]);
    if (!cont.is_constant())
        for (auto& c : P) c = c.divexact(cont);
    QPoly lc = P[d];
    // H(z) = lc^(d-1) P(z/lc): H_i = P_i * lc^(d-1-i), monic
    std::vector<QPoly> H(d + 1, QPoly(arity));
    for (int i = 0; i < d; ++i) H[i] = P[i] * lc.pow(d - 1 - i);
    H[d] = QPoly(arity, Rational(1));
    int DH = 0;
    for (auto& c : H) DH = std::max(DH, c.degree(y));
    int B = DH + 1;

    // specialize y = a with squarefree same-degree image
    Rational a;
    FPoly Ha;
    bool found = false;
    for (int tries = 0; tries < caps.retries; ++tries) {
        long cand = static_cast<long>(rng.range(-40, 40));
        a = Rational(cand);
        FPoly ha;
        for (auto& c : H) ha.push_back(QRat(c.eval_at(y, a).drop_var(y)));
        if (fdeg(ha) != d) continue;
        FPoly g = fgcd(ha, fderiv(ha, arity - 1), arity - 1);
        if (fdeg(g) != 0) continue;
        Ha = ha;
        found = true;
        break;
    }
    if (!found) throw cap_error("no good evaluation point for function-field factorization");

    auto sub = factor_fracfield_sqfree(Ha, arity - 1, caps, rng);
    if (sub.size() == 1) {
        FPoly m;
        for (auto& c : f0) m.push_back(c / f0[d]);
        return {m};
    }

    // Hensel lift the factorization of H at y = a+u to precision u^B
    // represent H in u: coefficients H_i(y = a+u)
    SPoly Hu(d + 1, USer(B, QRat(arity - 1)));
    for (int i = 0; i <= d; ++i) {
        // expand H_i(a+u) = sum_k H_i^(k)(a)/k! u^k via repeated derivative
        QPoly cur = H[i];
        Rational fact(1);
        for (int k = 0; k < B; ++k) {
            if (k > 0) {
                cur = cur.derivative(y);
                fact = fact * Rational(k);
            }
            QPoly v = cur.eval_at(y, a);
            Hu[i][k] = QRat(v.drop_var(y)) * QRat(arity - 1, Rational(1) / fact);
        }
    }
    // initial factors = sub (series of order 0); iterated pair extraction
    std::vector<SPoly> lifted;
    {
        SPoly curh = Hu;
        std::vector<FPoly> fac = sub;
        int ar1 = arity - 1;
        while (fac.size() >= 1) {
            if (fac.size() == 1) {
                lifted.push_back(curh);
                break;
            }
            // g0 = fac[0], h0 = prod rest (mod u)
            FPoly g0 = fac[0];
            FPoly h0{QRat(ar1, Rational(1))};
            for (size_t i = 1; i < fac.size(); ++i) h0 = fmul(h0, fac[i], ar1);
            // Bezout s g0 + t h0 = 1
            FPoly r0 = g0, r1 = h0;
            FPoly s0{QRat(ar1, Rational(1))}, s1{QRat(ar1)};
            FPoly t0{QRat(ar1)}, t1{QRat(ar1, Rational(1))};
            while (fdeg(r1) >= 0) {
                auto [q, r2] = fdivrem(r0, r1, ar1);
                FPoly s2 = s0, t2 = t0;
                FPoly qs = fmul(q, s1, ar1), qt = fmul(q, t1, ar1);
                s2.resize(std::max(s2.size(), qs.size()), QRat(ar1));
                for (size_t i = 0; i < qs.size(); ++i) s2[i] = s2[i] - qs[i];
                t2.resize(std::max(t2.size(), qt.size()), QRat(ar1));
                for (size_t i = 0; i < qt.size(); ++i) t2[i] = t2[i] - qt[i];
                r0 = r1; r1 = ftrim(r2, ar1);
                s0 = s1; s1 = ftrim(s2, ar1);
                t0 = t1; t1 = ftrim(t2, ar1);
            }
            FORGE_CHECK(fdeg(r0) == 0, "evaluation factors not coprime");
            QRat ci = r0[0].inv();
            for (auto& c : s0) c = c * ci;
            for (auto& c : t0) c = c * ci;
            // series lift of (g,h) from order 1 to order B
            SPoly G(g0.size(), USer(B, QRat(ar1))), Hh(h0.size(), USer(B, QRat(ar1)));
            for (size_t i = 0; i < g0.size(); ++i) G[i][0] = g0[i];
            for (size_t i = 0; i < h0.size(); ++i) Hh[i][0] = h0[i];
            for (int n = 1; n < B; ++n) {
                SPoly gh = spoly_mul(G, Hh, B, ar1);
                // e_n(z) = coeff of u^n in (curh - G*Hh)
                FPoly en(d + 1, QRat(ar1));
                for (int i = 0; i <= d; ++i) {
                    QRat v = (static_cast<size_t>(i) < curh.size() ? curh[i][n] : QRat(ar1));
                    if (static_cast<size_t>(i) < gh.size()) v = v - gh[i][n];
                    en[i] = v;
                }
                en = ftrim(en, ar1);
                if (fdeg(en) < 0) continue;
                auto [q1, dh] = fdivrem(fmul(s0, en, ar1), h0, ar1);
                FPoly dg = fmul(t0, en, ar1);
                FPoly qg = fmul(q1, g0, ar1);
                dg.resize(std::max(dg.size(), qg.size()), QRat(ar1));
                for (size_t i = 0; i < qg.size(); ++i) dg[i] = dg[i] + qg[i];
                dg = ftrim(dg, ar1);
                for (size_t i = 0; i < dh.size(); ++i)
                    if (i < Hh.size()) Hh[i][n] = Hh[i][n] + dh[i];
                for (size_t i = 0; i < dg.size(); ++i)
                    if (i < G.size()) G[i][n] = G[i][n] + dg[i];
            }
            lifted.push_back(G);
            curh = Hh;
            fac.erase(fac.begin());
        }
    }

    // recombination: products of lifted factor subsets whose series
    // coefficients are polynomials of u-degree <= DH give candidates
    int ar1 = arity - 1;
    auto to_ypoly = [&](const SPoly& s) -> FPoly {
        // substitute u = y - a back; valid because true factor coefficients
        // are polynomials of u-degree <= DH < B
        FPoly out(s.size(), QRat(arity));
        for (size_t i = 0; i < s.size(); ++i) {
            QPoly ym = QPoly::var(arity, y) - QPoly(arity, a);
            QPoly po(arity, Rational(1));
            QRat tot(arity);
            for (int k = 0; k < B; ++k) {
                QRat ck = s[i][k].extended(arity);  // appends y slot at the end
                tot = tot + ck * QRat(po);
                po = po * ym;
            }
            out[i] = tot;
        }
        return out;
    };
    std::vector<FPoly> results;
    std::vector<int> live(lifted.size());
    std::iota(live.begin(), live.end(), 0);
    FPoly remH(H.size(), QRat(arity));
    for (size_t i = 0; i < H.size(); ++i) remH[i] = QRat(H[i]);
    for (int sz = 1; sz <= static_cast<int>(lifted.size()); ++sz) {
        if (static_cast<int>(live.size()) < sz) break;
        std::vector<int> idx(sz);
        std::iota(idx.begin(), idx.end(), 0);
        bool go = true;
        while (go) {
            SPoly prod{USer(B, QRat(ar1))};
            prod[0][0] = QRat(ar1, Rational(1));
            for (int k : idx) prod = spoly_mul(prod, lifted[live[k]], B, ar1);
            FPoly cand = to_ypoly(prod);
            auto [q, r] = fdivrem(remH, cand, arity);
            if (fdeg(r) < 0) {
                results.push_back(cand);
                remH = q;
                std::vector<int> nl;
                for (size_t i = 0; i < live.size(); ++i)
                    if (std::find(idx.begin(), idx.end(), static_cast<int>(i)) == idx.end())
                        nl.push_back(live[i]);
                live = nl;
                idx.assign(sz, 0);
                std::iota(idx.begin(), idx.end(), 0);
                if (static_cast<int>(live.size()) < sz) break;
                continue;
            }
            int i = sz - 1;
            while (i >= 0 && idx[i] == static_cast<int>(live.size()) - sz + i) --i;
            if (i < 0) {
                go = false;
            } else {
                ++idx[i];
                for (int j = i + 1; j < sz; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    }
    if (fdeg(remH) > 0) results.push_back(remH);

    // un-transform: h(z) factor of H -> monic factor of f0: h(lc*z) normalized
    std::vector<FPoly> out;
    for (auto& h : results) {
        int dh = fdeg(h);
        FPoly g(dh + 1, QRat(arity));
        QRat lp(arity, Rational(1));
        QRat lcq{QPoly(lc)};
        for (int i = 0; i <= dh; ++i) {
            g[i] = h[i] * lp;
            lp = lp * lcq;
        }
        QRat glc = g[dh];
        for (auto& c : g) c = c / glc;
        out.push_back(g);
    }
    return out;
}

std::vector<FPoly> factor_fracfield_sqfree(const FPoly& f0, int arity, const Caps& caps,
                                           Rng& rng) {
    auto out = factor_fracfield_sqfree_inner(f0, arity, caps, rng);
    std::sort(out.begin(), out.end(), [](const FPoly& a, const FPoly& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t i = 0; i < a.size(); ++i) {
            int c = QRat::cmp(a[i], b[i]);
            if (c) return c < 0;
        }
        return false;
    });
    return out;
}

}  // namespace

// =====================================================================
// Tower route (Trager): norm down one generator, recurse, gcd back.
// =====================================================================

namespace {

TowerPtr tower_prefix(const TowerPtr& t, int nlevels) {
    auto nt = Tower::make(t->params());
    TowerPtr cur = nt;
    for (int i = 0; i < nlevels; ++i) {
        std::vector<Elem> mp;
        for (auto& raw : t->levels()[i].minpoly) {
            std::map<std::vector<int>, QRat, GrlexLess> terms;
            for (auto& [e, c] : raw) {
                std::vector<int> e2 = e;
                e2.resize(i, 0);
                terms[e2] = c;
            }
            mp.push_back(Elem::from_terms(cur, std::move(terms)));
        }
        cur = tower_extend(cur, t->levels()[i].name, mp);
    }
    return cur;
}

// minimal polynomial of the top generator as UPoly over the prefix tower
UPoly top_minpoly(const TowerPtr& t, const TowerPtr& sub) {
    UPoly mp;
    int top = t->ngens() - 1;
    for (auto& raw : t->levels()[top].minpoly) {
        std::map<std::vector<int>, QRat, GrlexLess> terms;
        for (auto& [e, c] : raw) {
            std::vector<int> e2 = e;
            e2.resize(sub->ngens(), 0);
            terms[e2] = c;
        }
        mp.push_back(Elem::from_terms(sub, std::move(terms)));
    }
    return mp;
}

std::vector<UPoly> factor_sqfree_over(const UPoly& f, const Caps& caps, Rng& rng);

// squarefree monic f over a tower with >= 1 generators
std::vector<UPoly> factor_trager(const UPoly& f, const Caps& caps, Rng& rng) {
    TowerPtr t = f[0].tower();
    int top = t->ngens() - 1;
    TowerPtr sub = tower_prefix(t, top);
    Elem theta = Elem::gen(t, top);
    VarCtx zw = make_vars({"z!", "w!"});
    UPoly mp = top_minpoly(t, sub);
    MultiPoly mpw(zw, sub);
    for (size_t k = 0; k < mp.size(); ++k) {
        std::vector<int> e{0, static_cast<int>(k)};
        mpw.set_term(e, mp[k]);
    }

    for (int si = 0; si < caps.retries; ++si) {
        long s = (si % 2 == 0) ? si / 2 : -(si / 2 + 1);
        // gs(z) = f(z - s*theta)
        UPoly gs = upshift(f, -theta * Elem(t, Rational(s)));
        // write gs coefficients as polynomials in theta over sub
        MultiPoly G(zw, sub);
        for (size_t i = 0; i <= static_cast<size_t>(updeg(gs)); ++i) {
            // dense in top generator
            const Elem& c = gs[i];
            for (auto& [e, q] : c.terms()) {
                std::vector<int> esub(e.begin(), e.begin() + top);
                std::map<std::vector<int>, QRat, GrlexLess> one{{esub, q}};
                Elem low = Elem::from_terms(sub, std::move(one));
                std::vector<int> ez{static_cast<int>(i), e[top]};
                G.set_term(ez, G.coeff(ez) + low);
            }
        }
        MultiPoly N = resultant(mpw, G, 1);  // eliminate w
        UPoly Np;
        for (int k = 0; k <= N.degree(0); ++k) {
            MultiPoly ck = N.coeff_of(0, k);
            FORGE_CHECK(ck.is_constant(), "norm not univariate");
            Np.push_back(ck.constant_value());
        }
        Np = uptrim(Np);
        if (updeg(Np) != updeg(f) * (static_cast<int>(mp.size()) - 1)) continue;
        if (!upoly_is_squarefree(upmonic(Np))) continue;  // next shift
        auto nf = factor_sqfree_over(upmonic(Np), caps, rng);
        std::vector<UPoly> out;
        if (nf.size() == 1) {
            out.push_back(upmonic(f));
            return out;
        }
        for (auto& h : nf) {
            UPoly hL = uplift(h, t);
            UPoly fi = upgcd(gs, hL);
            if (updeg(fi) <= 0) continue;
            // shift back: fi(z + s*theta)
            UPoly fa = upshift(fi, theta * Elem(t, Rational(s)));
            out.push_back(upmonic(fa));
        }
        // sanity: degrees add up
        int dsum = 0;
        for (auto& x : out) dsum += updeg(x);
        FORGE_CHECK(dsum == updeg(f), "trager factors lost degree");
        return out;
    }
    throw cap_error("no squarefree shift found in Trager norm");
}

// dispatch for squarefree monic f over any supported coefficient field
std::vector<UPoly> factor_sqfree_over(const UPoly& f, const Caps& caps, Rng& rng) {
    TowerPtr t = f[0].tower();
    if (updeg(f) == 1) return {upmonic(f)};
    if (t->ngens() > 0) return factor_trager(f, caps, rng);
    // fraction field / rationals
    FPoly fp;
    for (auto& c : f) fp.push_back(c.qrat_value());
    auto fs = factor_fracfield_sqfree(fp, t->nparams(), caps, rng);
    std::vector<UPoly> out;
    for (auto& g : fs) {
        UPoly gg;
        for (auto& c : g) gg.push_back(Elem(t, c));
        out.push_back(gg);
    }
    return out;
}

}  // namespace

Factorization factor_upoly(const UPoly& f0, const Caps& caps, Rng rng) {
    UPoly f = uptrim(f0);
    int d = updeg(f);
    FORGE_CHECK(d >= 0, "factorization of zero");
    const TowerPtr& t = f[0].tower();
    if (t->nparams() > 0) {
        if (t->nparams() > caps.parameters)
            throw cap_error("parameter count cap exceeded in factorization");
        if (d > caps.degree_function_field)
            throw cap_error("function-field degree cap exceeded");
    } else if (t->ngens() > 0) {
        if (d > caps.degree_tower) throw cap_error("tower degree cap exceeded");
    } else if (d > caps.degree_rationals) {
        throw cap_error("rational degree cap exceeded");
    }
    Factorization out;
    out.unit = f[d];
    if (d == 0) return out;
    auto parts = squarefree_decomposition(f);
    for (auto& [part, mult] : parts) {
        auto irr = factor_sqfree_over(part, caps, rng);
        for (auto& g : irr) out.factors.push_back({g, mult});
    }
    std::sort(out.factors.begin(), out.factors.end(), [](const FactorPart& a, const FactorPart& b) {
        int da = updeg(a.poly), db = updeg(b.poly);
        if (da != db) return da < db;
        for (int i = 0; i <= da; ++i) {
            int c = Elem::cmp(a.poly[i], b.poly[i]);
            if (c) return c < 0;
        }
        return a.multiplicity < b.multiplicity;
    });
    // exactness invariant: unit * prod factors^mult == f
    UPoly check{out.unit};
    for (auto& fp : out.factors)
        for (int k = 0; k < fp.multiplicity; ++k) check = upmul(check, fp.poly);
    FORGE_CHECK(upeq(check, f), "factorization does not reconstitute input");
    return out;
}

bool is_irreducible(const UPoly& f, const Caps& caps, Rng rng) {
    auto fac = factor_upoly(f, caps, rng);
    return fac.factors.size() == 1 && fac.factors[0].multiplicity == 1;
}

std::vector<std::pair<Elem, int>> roots_in_tower(const UPoly& f, const Caps& caps, Rng rng) {
    auto fac = factor_upoly(f, caps, rng);
    std::vector<std::pair<Elem, int>> out;
    for (auto& fp : fac.factors) {
        if (updeg(fp.poly) != 1) continue;
        out.push_back({-fp.poly[0], fp.multiplicity});
    }
    return out;
}

std::pair<TowerPtr, Elem> adjoin_root(const TowerPtr& t, const UPoly& p,
                                      const std::string& gen_name, const Caps& caps, Rng rng) {
    UPoly f = uptrim(p);
    int d = updeg(f);
    FORGE_CHECK(d >= 1, "adjoin_root needs degree >= 1");
    if (d == 1) {
        UPoly m = upmonic(f);
        return {t, -m[0]};
    }
    auto fac = factor_upoly(f, caps, rng);
    if (fac.factors.size() != 1 || fac.factors[0].multiplicity != 1)
        throw input_error("adjoin_root: polynomial is reducible");
    if (t->ngens() >= caps.tower_height)
        throw cap_error("tower height cap exceeded");
    TowerPtr nt = tower_extend(t, gen_name, fac.factors[0].poly);
    return {nt, Elem::gen(nt, nt->ngens() - 1)};
}

std::vector<Rational> cyclotomic_polynomial(int m) {
    // (z^m - 1) / prod_{d | m, d < m} Phi_d
    std::vector<std::vector<Rational>> memo(m + 1);
    std::function<std::vector<Rational>(int)> phi = [&](int n) -> std::vector<Rational> {
        if (!memo[n].empty()) return memo[n];
        std::vector<Rational> num(n + 1, Rational(0));
        num[0] = Rational(-1);
        num[n] = Rational(1);
        for (int d = 1; d < n; ++d) {
            if (n % d) continue;
            auto pd = phi(d);
            // divide num by pd exactly
            std::vector<Rational> q(num.size() - pd.size() + 1, Rational(0));
            std::vector<Rational> r = num;
            for (int k = static_cast<int>(q.size()) - 1; k >= 0; --k) {
                Rational c = r[k + pd.size() - 1] / pd.back();
                q[k] = c;
                for (size_t j = 0; j < pd.size(); ++j)
                    r[k + j] = r[k + j] - c * pd[j];
            }
            num = q;
        }
        memo[n] = num;
        return num;
    };
    return phi(m);
}

std::pair<TowerPtr, Elem> cyclotomic_adjoin(const TowerPtr& t, int m, const Caps& caps, Rng rng) {
    FORGE_CHECK(m >= 1, "cyclotomic_adjoin needs m >= 1");
    if (m > caps.cyclotomic) throw cap_error("cyclotomic cap exceeded");
    if (m == 1) return {t, Elem(t, Rational(1))};
    if (m == 2) return {t, Elem(t, Rational(-1))};
    auto phim = cyclotomic_polynomial(m);
    UPoly f;
    for (auto& c : phim) f.push_back(Elem(t, c));
    auto fac = factor_upoly(f, caps, rng);
    for (auto& fp : fac.factors)
        if (updeg(fp.poly) == 1) return {t, -fp.poly[0]};  // already present
    const UPoly& g = fac.factors[0].poly;
    if (t->ngens() >= caps.tower_height) throw cap_error("tower height cap exceeded");
    std::string name = "zeta" + std::to_string(m);
    TowerPtr nt = tower_extend(t, name, g);
    return {nt, Elem::gen(nt, nt->ngens() - 1)};
}

UPoly minimal_polynomial(const Elem& a, int base_level) {
    const TowerPtr& t = a.tower();
    FORGE_CHECK(base_level >= 0 && base_level <= t->ngens(), "bad base level");
    SubfieldFlag flag(t);
    for (int i = 0; i < base_level; ++i) flag.adjoin(Elem::gen(t, i));
    auto mp = flag.min_poly(a);
    return mp.coeff;
}

std::vector<std::vector<Elem>> tower_automorphisms(const TowerPtr& t, const Caps& caps, Rng rng) {
    std::vector<std::vector<Elem>> result;
    std::vector<Elem> images;
    std::function<void(int)> rec = [&](int level) {
        if (level == t->ngens()) {
            result.push_back(images);
            return;
        }
        // minpoly of gen `level`, coefficients mapped through current images
        UPoly mp;
        for (auto& raw : t->levels()[level].minpoly) {
            std::map<std::vector<int>, QRat, GrlexLess> terms;
            for (auto& [e, c] : raw) {
                std::vector<int> e2 = e;
                e2.resize(t->ngens(), 0);
                terms[e2] = c;
            }
            Elem coeff = Elem::from_terms(t, std::move(terms));
            mp.push_back(apply_automorphism(coeff, images));
        }
        auto roots = roots_in_tower(mp, caps, rng);
        for (auto& [r, mult] : roots) {
            images.push_back(r);
            rec(level + 1);
            images.pop_back();
        }
    };
    rec(0);
    return result;
}

Elem apply_automorphism(const Elem& x, const std::vector<Elem>& gen_images) {
    const TowerPtr& t = x.tower();
    Elem out(t);
    for (auto& [e, c] : x.terms()) {
        Elem term(t, c);
        for (size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            FORGE_CHECK(i < gen_images.size(), "automorphism image missing");
            term = term * gen_images[i].pow(e[i]);
        }
        out = out + term;
    }
    return out;
}

}  // namespace forge
