#include "newton.hpp"

#include <algorithm>
#include <numeric>

namespace forge {

namespace {

// reduction of f modulo the series variable, as a dense polynomial over the tower
UPoly reduction_poly(const SPoly& f) {
    UPoly r;
    for (auto& c : f) {
        FORGE_CHECK(c.known_zero() || c.valuation() >= 0, "negative valuation in reduction");
        r.push_back(c.known_zero() || c.valuation() > 0 ? Elem(c.tower()) : c.coeffs().begin()->second);
    }
    return uptrim(r);
}

// split a monic polynomial completely over extensions of t, returning the
// final tower and the roots with multiplicity
std::pair<TowerPtr, std::vector<std::pair<Elem, int>>> split_completely(
    UPoly g, TowerPtr t, const NPOptions& opt, Rng& rng, int& name_counter) {
    std::vector<std::pair<Elem, int>> roots;
    std::vector<std::pair<UPoly, int>> todo;
    auto fac = factor_upoly(g, opt.caps, rng.split());
    for (auto& fp : fac.factors) todo.push_back({fp.poly, fp.multiplicity});
    while (!todo.empty()) {
        auto [h, mult] = todo.back();
        todo.pop_back();
        h = uplift(h, t);
        if (updeg(h) == 1) {
            roots.push_back({-h[0], mult});
            continue;
        }
        std::string name = opt.gen_prefix + std::to_string(name_counter++);
        auto [t2, r] = adjoin_root(t, h, name, opt.caps, rng.split());
        t = t2;
        roots.push_back({r, mult});
        // peel the found root off and keep splitting the rest
        UPoly lin{-r, Elem(t, Rational(1))};
        UPoly rest = updivrem(uplift(h, t), lin).first;
        if (updeg(rest) >= 1) {
            auto fac2 = factor_upoly(rest, opt.caps, rng.split());
            for (auto& fp : fac2.factors) todo.push_back({fp.poly, mult * fp.multiplicity});
        }
    }
    // lift all roots into the final tower
    for (auto& [r, m] : roots) r = r.lifted(t);
    return {t, roots};
}

// lower hull slopes of f1 at a root of multiplicity mu: returns (num, den,
// length) triples with positive slope, in decreasing slope order
struct Slope {
    long num, den;  // slope = num/den > 0 in lowest terms
    int length;
};
std::vector<Slope> positive_slopes(const SPoly& f1) {
    std::vector<std::pair<long, long>> pts;
    for (size_t i = 0; i < f1.size(); ++i) {
        if (f1[i].known_zero()) continue;
        long v = f1[i].valuation();
        pts.push_back({static_cast<long>(i), v});
    }
    FORGE_CHECK(pts.size() >= 2, "degenerate polygon");
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
    std::vector<Slope> out;
    for (size_t k = 0; k + 1 < hull.size(); ++k) {
        long di = hull[k + 1].first - hull[k].first;
        long dv = hull[k].second - hull[k + 1].second;
        if (dv <= 0) continue;
        long g = std::gcd(di, dv);
        out.push_back({dv / g, di / g, static_cast<int>(di)});
    }
    return out;
}

// rescale: f2(z) = s^-k f1(s^r z)
SPoly rescale(const SPoly& f1, int r, int& content_out) {
    int k = 1 << 30;
    for (size_t i = 0; i < f1.size(); ++i) {
        if (f1[i].known_zero()) continue;
        k = std::min<int>(k, f1[i].valuation() + r * static_cast<int>(i));
    }
    content_out = k;
    SPoly f2;
    for (size_t i = 0; i < f1.size(); ++i)
        f2.push_back(f1[i].shifted(r * static_cast<int>(i) - k));
    return f2;
}

// Newton iteration for a simple root of the reduction
TSeries hensel_root(const SPoly& f, const Elem& d0, int height) {
    TowerPtr t = d0.tower();
    SPoly fl = splift(f, t);
    SPoly fp = spderiv(fl);
    TSeries z = TSeries::constant(t, d0, height);
    while (true) {
        TSeries fz = speval(fl, z).truncated(height);
        if (fz.known_zero()) break;
        int v = fz.valuation();
        if (v >= height) break;
        TSeries fpz = speval(fp, z).truncated(height);
        z = (z - fz / fpz).truncated(height);
    }
    return z;
}

struct RecState {
    TowerPtr tower;
    NPOptions opt;
    Rng* rng;
    int name_counter = 0;
};

// expand the integral roots of f to the given remaining height; f's reduction
// degree equals the number of roots returned
std::vector<NPRoot> expand_rec(RecState& st, SPoly f, int height, int depth) {
    FORGE_CHECK(depth <= st.opt.caps.expansion_height + 8, "expansion recursion too deep");
    f = splift(sptrim(f), st.tower);
    UPoly red = reduction_poly(f);
    int dred = updeg(red);
    std::vector<NPRoot> out;
    if (dred <= 0) return out;
    auto [t2, roots] = split_completely(red, st.tower, st.opt, *st.rng, st.name_counter);
    st.tower = t2;
    f = splift(f, st.tower);
    // deterministic processing order
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return Elem::cmp(a.first, b.first) < 0;
    });
    for (auto& [d0r, mult] : roots) {
        Elem d0 = d0r.lifted(st.tower);
        if (mult == 1) {
            NPRoot r;
            r.series = hensel_root(f, d0, height);
            out.push_back(std::move(r));
            continue;
        }
        if (height <= 1) {
            // cannot separate within the remaining budget: truncated copies
            for (int c = 0; c < mult; ++c) {
                NPRoot r;
                r.series = TSeries::constant(st.tower, d0, height);
                out.push_back(std::move(r));
            }
            continue;
        }
        SPoly f1 = spshift_root(f, TSeries::constant(st.tower, d0, TSeries::EXACT));
        int covered = 0;
        // exact roots at d0: trailing exactly-zero coefficients
        size_t j0 = 0;
        while (j0 < f1.size() && f1[j0].known_zero() && f1[j0].trunc() >= TSeries::EXACT) ++j0;
        if (j0 > 0) {
            for (size_t c = 0; c < j0; ++c) {
                NPRoot r;
                r.series = TSeries::constant(st.tower, d0, height);
                out.push_back(std::move(r));
            }
            covered += static_cast<int>(j0);
            f1.erase(f1.begin(), f1.begin() + j0);
            f1 = sptrim(f1);
        }
        if (covered == mult) continue;
        if (!f1[0].known_zero() && f1[0].valuation() == 0) {
            FORGE_CHECK(covered == mult, "branch count not conserved at exact roots");
            continue;
        }
        // recurse on the smallest positive slope only: the rescaled polynomial
        // keeps the steeper branches as its own z = 0 reduction root
        auto slopes = positive_slopes(f1);
        FORGE_CHECK(!slopes.empty(), "missing positive slope at a multiple root");
        const Slope& sl = slopes.back();
        if (sl.den != 1) throw ramification_error(static_cast<int>(sl.den));
        int r = static_cast<int>(sl.num);
        int k = 0;
        SPoly f2 = rescale(f1, r, k);
        int sub_h = height - r;
        if (sub_h <= 0) {
            UPoly red2 = reduction_poly(f2);
            int mult2 = updeg(red2);
            for (int c = 0; c < mult2; ++c) {
                NPRoot rr;
                rr.series = TSeries::constant(st.tower, d0, height);
                out.push_back(std::move(rr));
            }
            covered += mult2;
        } else {
            auto sub = expand_rec(st, f2, sub_h, depth + 1);
            for (auto& s : sub) {
                NPRoot rr;
                rr.series = (TSeries::constant(st.tower, d0, height) +
                             s.series.shifted(r).lifted(st.tower))
                                .truncated(height);
                out.push_back(std::move(rr));
                ++covered;
            }
        }
        FORGE_CHECK(covered == mult, "branch count not conserved in np recursion");
    }
    // lift everything into the final tower of this level
    for (auto& r : out) r.series = r.series.lifted(st.tower);
    return out;
}

}  // namespace

std::pair<TowerPtr, std::vector<NPBranch>> np_step(const SPoly& f0, const NPOptions& opt, Rng rng) {
    SPoly f = sptrim(f0);
    UPoly red = reduction_poly(f);
    FORGE_CHECK(updeg(red) >= 1, "reduction identically degenerate; divide out content first");
    RecState st{red[0].tower(), opt, &rng, 0};
    auto [t2, roots] = split_completely(red, st.tower, st.opt, rng, st.name_counter);
    std::vector<NPBranch> out;
    SPoly fl = splift(f, t2);
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return Elem::cmp(a.first, b.first) < 0;
    });
    for (auto& [d0, mult] : roots) {
        if (mult == 1) {
            NPBranch b;
            b.d0 = d0;
            b.slope = Rational(0);
            b.content = 0;
            b.hensel = true;
            b.local_degree = 1;
            b.f2 = fl;
            out.push_back(std::move(b));
            continue;
        }
        SPoly f1 = spshift_root(fl, TSeries::constant(t2, d0, TSeries::EXACT));
        size_t j0 = 0;
        while (j0 < f1.size() && f1[j0].known_zero() && f1[j0].trunc() >= TSeries::EXACT) ++j0;
        for (size_t c = 0; c < j0; ++c) {
            NPBranch b;
            b.d0 = d0;
            b.slope = Rational(0);
            b.content = 0;
            b.hensel = true;
            b.local_degree = 1;
            b.f2 = fl;
            out.push_back(std::move(b));
        }
        if (j0 > 0) {
            f1.erase(f1.begin(), f1.begin() + j0);
            f1 = sptrim(f1);
            if (static_cast<int>(j0) == mult || (!f1[0].known_zero() && f1[0].valuation() == 0))
                continue;
        }
        auto slopes = positive_slopes(f1);
        for (auto& sl : slopes) {
            if (sl.den != 1 && !opt.allow_ram) throw ramification_error(static_cast<int>(sl.den));
            NPBranch b;
            b.d0 = d0;
            b.slope = Rational(Int(sl.num), Int(sl.den));
            b.hensel = false;
            b.local_degree = sl.length;
            if (sl.den == 1) {
                b.f2 = rescale(f1, static_cast<int>(sl.num), b.content);
            } else {
                SPoly fr = spramify(f1, static_cast<int>(sl.den));
                b.f2 = rescale(fr, static_cast<int>(sl.num), b.content);
            }
            out.push_back(std::move(b));
        }
    }
    return {t2, out};
}

NPResult expand_roots(const SPoly& f0, const NPOptions& opt, Rng rng) {
    int ram = 1;
    SPoly f = sptrim(f0);
    while (true) {
        try {
            RecState st{f[0].tower(), opt, &rng, 0};
            int h = opt.height * ram;
            auto roots = expand_rec(st, splift(f, st.tower), h, 0);
            NPResult res;
            res.tower = st.tower;
            res.ram = ram;
            for (auto& r : roots) {
                NPRoot rr;
                rr.series = r.series.lifted(st.tower);
                int g = 0;
                for (auto& [k, v] : rr.series.coeffs()) g = std::gcd(g, std::abs(k));
                rr.ram = (g == 0) ? 1 : ram / std::gcd(ram, g);
                res.roots.push_back(std::move(rr));
            }
            return res;
        } catch (const ramification_error& e) {
            if (!opt.allow_ram) throw;
            long nram = std::lcm<long>(ram, static_cast<long>(e.needed) * ram);
            if (nram > opt.caps.ramification)
                throw cap_error("ramification cap exceeded in Puiseux expansion");
            int q = static_cast<int>(nram / ram);
            ram = static_cast<int>(nram);
            f = spramify(f, q);
        }
    }
}

// ---- chain expansion ----

namespace {

// series (in the chain variable `v`) from a coefficient of the chart
// polynomial: the coefficient is a MultiPoly in v alone over the tower
TSeries coeff_series(const MultiPoly& c, int v) {
    TSeries s(c.tower(), TSeries::EXACT);
    for (auto& [e, el] : c.terms()) {
        for (size_t i = 0; i < e.size(); ++i)
            FORGE_CHECK(static_cast<int>(i) == v || e[i] == 0,
                        "chart polynomial has stray variables in chain expansion");
        s.set(e[v], s.at(e[v]) + el);
    }
    return s;
}

// pure-base version of elem_param_series for QRat coefficients: expand the
// parameter `pi` (an index in q's arity) as the series variable
TSeries qrat_series(const QRat& q, int pi, const TowerPtr& target, int trunc) {
    TSeries num(target, TSeries::EXACT), den(target, TSeries::EXACT);
    auto split = [&](const QPoly& p, TSeries& out) {
        int maxd = p.is_zero() ? 0 : p.degree(pi);
        for (int k = 0; k <= maxd; ++k) {
            QPoly ck = p.coeff_of(pi, k).drop_var(pi);
            if (!ck.is_zero()) out.set(k, Elem(target, QRat(ck)));
        }
    };
    split(q.num(), num);
    split(q.den(), den);
    if (num.known_zero()) return TSeries(target, trunc);
    int want = trunc + std::abs(den.valuation()) * 2 + 4;
    return (num * den.inverse(want)).truncated(trunc);
}

int tseries_cmp(const TSeries& a, const TSeries& b) {
    auto ia = a.coeffs().begin(), ib = b.coeffs().begin();
    for (; ia != a.coeffs().end() && ib != b.coeffs().end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
        int c = Elem::cmp(ia->second, ib->second);
        if (c) return c;
    }
    if (ia != a.coeffs().end()) return 1;
    if (ib != b.coeffs().end()) return -1;
    return 0;
}

}  // namespace


namespace {
// prefix tower with the first `n` levels (for hint comparison)
TowerPtr tower_prefix_of(const TowerPtr& t, int n) {
    auto cur = Tower::make(t->params());
    for (int i = 0; i < n; ++i) {
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
}  // namespace

ChainExpansion expand_chain(const MultiPoly& f0, int zvar, const std::vector<int>& chain_vars,
                            std::vector<int> heights, const NPOptions& opt, Rng rng) {
    FORGE_CHECK(!chain_vars.empty() && chain_vars.size() <= 2,
                "chain expansion supports one or two expansion variables");
    FORGE_CHECK(heights.size() == chain_vars.size(), "height per chain variable required");
    int v0 = chain_vars[0];
    MultiPoly f = f0;
    // promote every chart variable other than zvar and v0 into the tower
    for (int i = 0; i < f.nvars(); ++i) {
        if (i == zvar || i == v0) continue;
        if (f.degree(i) > 0) f = promote_var_to_param(f, i);
    }
    // divide out the content in v0
    int cont = f.content_exponent(v0);
    if (cont > 0) f = f.shift_var_exp(v0, -cont);

    // assemble the series polynomial in z over series in v0
    std::vector<MultiPoly> dz = f.dense_in(zvar);
    SPoly sp;
    for (auto& c : dz) sp.push_back(coeff_series(c, v0));
    sp = sptrim(sp);
    FORGE_CHECK(!sp.back().known_zero() && sp.back().valuation() == 0,
                "leading coefficient degenerates modulo the chain prime");

    NPOptions o1 = opt;
    o1.height = heights[0];
    o1.allow_ram = false;
    NPResult r0 = expand_roots(sp, o1, rng.split());

    ChainExpansion out;
    out.heights = heights;

    const int d = static_cast<int>(r0.roots.size());
    VarCtx vars = f.vars();

    auto mseries_point0 = [&](const TSeries& s) {
        MSeries m;
        m.vars = vars;
        m.tw = r0.tower;
        m.trunc.assign(vars->size(), TSeries::EXACT);
        m.trunc[v0] = std::min(heights[0], s.trunc());
        for (auto& [k, v] : s.coeffs()) {
            std::vector<int> e(vars->size(), 0);
            e[v0] = k;
            m.set(e, v.lifted(r0.tower));
        }
        return m;
    };

    if (chain_vars.size() == 1) {
        std::vector<Approximation> pt;
        for (auto& r : r0.roots) pt.push_back({0, mseries_point0(r.series)});
        std::sort(pt.begin(), pt.end(), [](const Approximation& a, const Approximation& b) {
            return MSeries::cmp(a.series, b.series) < 0;
        });
        for (int i = 0; i < d; ++i) pt[i].label = i + 1;
        out.points.push_back(std::move(pt));
        return out;
    }

    // second chain variable: expand every tower generator and map through
    int v1 = chain_vars[1];
    const TowerPtr& T = r0.tower;
    int pi = T->param_index((*vars)[v1]);
    FORGE_CHECK(pi >= 0, "second chain variable missing from parameters");

    // constants tower: same params minus v1; generators whose minimal
    // polynomials never touch the expansion parameter carry over verbatim
    std::vector<std::string> cparams;
    for (int i = 0; i < T->nparams(); ++i)
        if (i != pi) cparams.push_back(T->params()[i]);
    TowerPtr C = Tower::make(cparams);
    std::vector<bool> is_const(T->ngens(), false);
    std::vector<int> cindex(T->ngens(), -1);
    for (int g = 0; g < T->ngens(); ++g) {
        bool ok = true;
        for (auto& raw : T->levels()[g].minpoly)
            for (auto& [e, q] : raw) {
                if (q.depends_on(pi)) ok = false;
                for (int j = 0; j < g; ++j)
                    if (e[j] && !is_const[j]) ok = false;
            }
        if (!ok) continue;
        is_const[g] = true;
        std::vector<Elem> mp;
        for (auto& raw : T->levels()[g].minpoly) {
            std::map<std::vector<int>, QRat, GrlexLess> terms;
            for (auto& [e, q] : raw) {
                std::vector<int> e2(C->ngens(), 0);
                for (int j = 0; j < g; ++j)
                    if (e[j]) e2[cindex[j]] = e[j];
                QPoly n = q.num().drop_var(pi), dn = q.den().drop_var(pi);
                terms[e2] = QRat(n, dn);
            }
            mp.push_back(Elem::from_terms(C, std::move(terms)));
        }
        C = tower_extend(C, T->levels()[g].name, mp);
        cindex[g] = C->ngens() - 1;
    }

    int h1 = heights[1];
    std::vector<TSeries> emb;  // per generator of T, a series in v1 over C
    Rng rng2 = rng.split();
    for (int g = 0; g < T->ngens(); ++g) {
        if (is_const[g]) {
            emb.push_back(TSeries::constant(C, Elem::gen(C, cindex[g]), TSeries::EXACT));
            continue;
        }
        // minimal polynomial of generator g with earlier generators replaced
        // by their embeddings
        SPoly mp;
        for (auto& raw : T->levels()[g].minpoly) {
            TSeries acc(C, TSeries::EXACT);
            for (auto& [e, q] : raw) {
                TSeries term = qrat_series(q, pi, C, h1 + 4);
                for (int j = 0; j < g; ++j)
                    for (int k = 0; k < e[j]; ++k) term = term * emb[j].lifted(C);
                acc = acc + term.lifted(C);
            }
            mp.push_back(acc);
        }
        NPOptions og = opt;
        og.height = h1;
        og.allow_ram = false;
        og.gen_prefix = opt.gen_prefix + "e";
        NPResult rg = expand_roots(mp, og, rng2.split());
        FORGE_CHECK(!rg.roots.empty(), "generator embedding found no roots");
        C = rg.tower;
        for (auto& s : emb) s = s.lifted(C);
        // an embedding hint pins the branch; otherwise take the
        // lexicographically least series
        std::optional<Rational> want;
        for (auto& hint : opt.embed_hints) {
            if (static_cast<int>(hint.minpoly.size()) !=
                static_cast<int>(T->levels()[g].minpoly.size()))
                continue;
            bool same = true;
            for (size_t k = 0; k < hint.minpoly.size() && same; ++k) {
                std::map<std::vector<int>, QRat, GrlexLess> terms(
                    T->levels()[g].minpoly[k].begin(), T->levels()[g].minpoly[k].end());
                Elem coeff = Elem::from_terms(tower_prefix_of(T, g), std::move(terms));
                auto [x, y] = align(hint.minpoly[k], coeff);
                if (!(x == y)) same = false;
            }
            if (same) want = hint.reduction;
        }
        int best = -1;
        if (want) {
            for (size_t i = 0; i < rg.roots.size(); ++i) {
                const TSeries& s = rg.roots[i].series;
                Elem c0 = s.coeffs().count(0) ? s.coeffs().at(0) : Elem(C);
                if (c0.is_rational_const() && c0.rational_value() == *want) {
                    best = static_cast<int>(i);
                    break;
                }
            }
            FORGE_CHECK(best >= 0, "embedding hint matches no branch");
        }
        if (best < 0) {
            best = 0;
            for (size_t i = 1; i < rg.roots.size(); ++i)
                if (tseries_cmp(rg.roots[i].series, rg.roots[best].series) < 0)
                    best = static_cast<int>(i);
        }
        emb.push_back(rg.roots[best].series.lifted(C));
    }

    // map each root's coefficients through the embedding
    auto embed_elem = [&](const Elem& x) {
        TSeries acc(C, TSeries::EXACT);
        for (auto& [e, q] : x.terms()) {
            TSeries term = qrat_series(q, pi, C, h1 + 4);
            for (int j = 0; j < T->ngens(); ++j)
                for (int k = 0; k < e[j]; ++k) term = term * emb[j];
            acc = acc + term;
        }
        return acc.truncated(h1);
    };

    std::vector<Approximation> pt0, pt1;
    for (auto& r : r0.roots) {
        MSeries m0 = mseries_point0(r.series);
        MSeries m1;
        m1.vars = vars;
        m1.tw = C;
        m1.trunc.assign(vars->size(), TSeries::EXACT);
        m1.trunc[v0] = std::min(heights[0], r.series.trunc());
        m1.trunc[v1] = h1;
        for (auto& [k, coeff] : r.series.coeffs()) {
            TSeries cs = embed_elem(coeff);
            for (auto& [j, v] : cs.coeffs()) {
                std::vector<int> e(vars->size(), 0);
                e[v0] = k;
                e[v1] = j;
                m1.set(e, v);
            }
        }
        pt0.push_back({0, std::move(m0)});
        pt1.push_back({0, std::move(m1)});
    }
    // labels assigned at the finest chain point, consistently across points
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return MSeries::cmp(pt1[a].series, pt1[b].series) < 0;
    });
    std::vector<Approximation> s0(d), s1(d);
    for (int i = 0; i < d; ++i) {
        s0[i] = pt0[order[i]];
        s1[i] = pt1[order[i]];
        s0[i].label = s1[i].label = i + 1;
    }
    out.points.push_back(std::move(s0));
    out.points.push_back(std::move(s1));
    return out;
}

int separating_height(const std::vector<Approximation>& approxs) {
    if (approxs.size() <= 1) return 0;
    int avail = 1 << 28;
    for (auto& a : approxs)
        for (int t : a.series.trunc) avail = std::min(avail, t);
    for (int h = 0; h <= avail; ++h) {
        std::vector<int> bound(approxs[0].series.trunc.size(), h);
        bool distinct = true;
        for (size_t i = 0; i < approxs.size() && distinct; ++i)
            for (size_t j = i + 1; j < approxs.size() && distinct; ++j)
                if (approxs[i].series.equal_mod(approxs[j].series, bound)) distinct = false;
        if (distinct) return h;
    }
    return -1;  // not separated within the available truncation
}

PuiseuxResult puiseux_univariate(const MultiPoly& g, int zvar, int tvar, int height, int e_cap,
                                 const Caps& caps, Rng rng) {
    MultiPoly f = g;
    for (int i = 0; i < f.nvars(); ++i) {
        if (i == zvar || i == tvar) continue;
        if (f.degree(i) > 0) f = promote_var_to_param(f, i);
    }
    int cont = f.is_zero() ? 0 : f.content_exponent(tvar);
    if (cont > 0) f = f.shift_var_exp(tvar, -cont);
    std::vector<MultiPoly> dz = f.dense_in(zvar);
    SPoly sp;
    for (auto& c : dz) sp.push_back(coeff_series(c, tvar));
    sp = sptrim(sp);
    NPOptions opt;
    opt.caps = caps;
    opt.caps.ramification = std::min(caps.ramification, e_cap);
    opt.allow_ram = true;
    opt.height = height;
    NPResult r = expand_roots(sp, opt, rng.split());
    PuiseuxResult out;
    out.tower = r.tower;
    out.global_ram = r.ram;
    for (auto& root : r.roots) out.branches.push_back({root.series, root.ram});
    return out;
}

bool residual_vanishes(const SPoly& f, const TSeries& root) {
    TSeries fz = speval(splift(f, root.tower()), root);
    if (fz.known_zero()) return true;
    return fz.valuation() >= root.trunc();
}

}  // namespace forge
