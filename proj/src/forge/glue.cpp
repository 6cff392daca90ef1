#include "glue.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace forge {

Permutation Permutation::identity(int n) {
    Permutation p;
    p.img.resize(n);
    std::iota(p.img.begin(), p.img.end(), 0);
    return p;
}

Permutation Permutation::inverse() const {
    Permutation p;
    p.img.assign(img.size(), -1);
    for (size_t i = 0; i < img.size(); ++i) p.img[img[i]] = static_cast<int>(i);
    return p;
}

Permutation Permutation::then(const Permutation& second) const {
    Permutation p;
    p.img.resize(img.size());
    for (size_t i = 0; i < img.size(); ++i) p.img[i] = second.img[img[i]];
    return p;
}

bool Permutation::is_identity() const {
    for (size_t i = 0; i < img.size(); ++i)
        if (img[i] != static_cast<int>(i)) return false;
    return true;
}

namespace {

std::optional<Permutation> match_generic(const std::vector<Approximation>& from,
                                         const std::vector<Approximation>& to,
                                         bool (*match)(const MSeries&, const MSeries&)) {
    int n = static_cast<int>(from.size());
    if (n != static_cast<int>(to.size())) return std::nullopt;
    Permutation p;
    p.img.assign(n, -1);
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        int hit = -1;
        for (int j = 0; j < n; ++j) {
            if (!match(from[i].series, to[j].series)) continue;
            if (hit >= 0) return std::nullopt;  // ambiguous
            hit = j;
        }
        if (hit < 0 || used[hit]) return std::nullopt;
        used[hit] = true;
        p.img[i] = hit;
    }
    return p;
}

}  // namespace

std::optional<Permutation> match_approximations(const std::vector<Approximation>& from,
                                                const std::vector<Approximation>& to) {
    return match_generic(from, to, &series_exact_match);
}

std::optional<Permutation> match_approximations_iso(const std::vector<Approximation>& from,
                                                    const std::vector<Approximation>& to) {
    // one field isomorphism must carry every series at once: search the
    // assignments with a shared incremental matcher, lexicographically first
    int n = static_cast<int>(from.size());
    if (n != static_cast<int>(to.size())) return std::nullopt;
    if (n == 0) return Permutation::identity(0);
    std::vector<int> bound(from[0].series.trunc.size(), 1 << 28);
    for (auto& a : from)
        for (size_t i = 0; i < bound.size(); ++i) bound[i] = std::min(bound[i], a.series.trunc[i]);
    for (auto& b : to)
        for (size_t i = 0; i < bound.size(); ++i) bound[i] = std::min(bound[i], b.series.trunc[i]);
    std::vector<MSeries> A, B;
    for (auto& a : from) A.push_back(a.series.truncated(bound));
    for (auto& b : to) B.push_back(b.series.truncated(bound));

    std::vector<int> img(n, -1);
    std::vector<bool> used(n, false);
    std::function<bool(const IsoMatcher&, int)> rec = [&](const IsoMatcher& state, int i) -> bool {
        if (i == n) return true;
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            IsoMatcher trial = state;
            // scan the union of supports in canonical order
            std::vector<std::vector<int>> exps;
            for (auto& [e, c] : A[i].c) exps.push_back(e);
            for (auto& [e, c] : B[j].c)
                if (!A[i].c.count(e)) exps.push_back(e);
            std::sort(exps.begin(), exps.end(), GrlexLess());
            bool ok = true;
            for (auto& e : exps)
                if (!trial.pin(A[i].at(e), B[j].at(e))) { ok = false; break; }
            if (!ok) continue;
            used[j] = true;
            img[i] = j;
            if (rec(trial, i + 1)) return true;
            used[j] = false;
            img[i] = -1;
        }
        return false;
    };
    IsoMatcher base(A[0].tw, B[0].tw);
    if (Tower::same(*A[0].tw, *B[0].tw)) base.fix_constants();
    if (!rec(base, 0)) return std::nullopt;
    Permutation p;
    p.img = img;
    return p;
}

RebasedTower rebase_kummer(const TowerPtr& t, int y_param, const std::string& xi_name, int m,
                           const QRat& moebius, const Elem& shift) {
    FORGE_CHECK(m >= 1, "Kummer degree must be positive");
    FORGE_CHECK(moebius.arity() == 1, "moebius must be a function of xi alone");
    std::vector<std::string> params = t->params();
    params[y_param] = xi_name;

    // classify generators: constant ones (parameter-free minimal polynomial
    // chains) sit below the Kummer generator
    int ng = t->ngens();
    std::vector<bool> cst(ng, false);
    for (int g = 0; g < ng; ++g) {
        bool ok = true;
        for (auto& raw : t->levels()[g].minpoly)
            for (auto& [e, q] : raw) {
                for (int pi = 0; pi < t->nparams(); ++pi)
                    if (q.depends_on(pi)) ok = false;
                for (int j = 0; j < g; ++j)
                    if (e[j] && !cst[j]) ok = false;
            }
        cst[g] = ok;
    }
    RebasedTower rt;
    rt.gen_map.assign(ng, -1);
    TowerPtr cur = Tower::make(params);
    int placed = 0;
    auto carry_level = [&](int g) {
        std::vector<Elem> lvl;
        for (auto& raw : t->levels()[g].minpoly) {
            Elem acc(cur);
            for (auto& [e, q] : raw) {
                std::vector<int> e2(cur->ngens(), 0);
                for (int j = 0; j < g; ++j)
                    if (e[j]) {
                        FORGE_CHECK(rt.gen_map[j] >= 0, "generator order violated in rebase");
                        e2[rt.gen_map[j]] = e[j];
                    }
                std::map<std::vector<int>, QRat, GrlexLess> mono{
                    {e2, QRat(cur->nparams(), Rational(1))}};
                Elem monoe = Elem::from_terms(cur, std::move(mono));
                // substitute Y for the y parameter inside the coefficient
                Elem num(cur), den(cur);
                auto subst_poly = [&](const QPoly& p, Elem& out_acc) {
                    int dmax = p.is_zero() ? 0 : p.degree(y_param);
                    for (int k = 0; k <= dmax; ++k) {
                        QPoly ck = p.coeff_of(y_param, k);
                        if (ck.is_zero()) continue;
                        Elem base(cur, QRat(ck));
                        if (k > 0) {
                            FORGE_CHECK(rt.y_gen >= 0, "parameter used below the Kummer level");
                            base = base * Elem::gen(cur, rt.y_gen).pow(k);
                        }
                        out_acc = out_acc + base;
                    }
                };
                subst_poly(q.num(), num);
                subst_poly(q.den(), den);
                acc = acc + monoe * num * den.inv();
            }
            lvl.push_back(acc);
        }
        cur = tower_extend(cur, t->levels()[g].name, lvl);
        rt.gen_map[g] = placed++;
    };
    for (int g = 0; g < ng; ++g)
        if (cst[g]) carry_level(g);
    // the Kummer generator: w^m = moebius(xi) - shift
    {
        auto widen = [&](const QPoly& p) {
            QPoly r(static_cast<int>(params.size()));
            for (auto& [e, c] : p.terms()) {
                std::vector<int> e2(params.size(), 0);
                e2[y_param] = e[0];
                r.set_term(e2, c);
            }
            return r;
        };
        QRat mo(widen(moebius.num()), widen(moebius.den()));
        Elem rhs = Elem(cur, mo);
        if (!shift.is_zero()) {
            // the shift lives over the constant part (possibly fewer params)
            Elem sh(cur);
            for (auto& [e, q] : shift.terms()) {
                std::vector<int> e2(cur->ngens(), 0);
                for (size_t j = 0; j < e.size(); ++j)
                    if (e[j]) {
                        FORGE_CHECK(rt.gen_map[j] >= 0 && cst[j],
                                    "localization shift is not constant");
                        e2[rt.gen_map[j]] = e[j];
                    }
                std::map<std::vector<int>, QRat, GrlexLess> mono{
                    {e2, q.extended(cur->nparams())}};
                sh = sh + Elem::from_terms(cur, std::move(mono));
            }
            rhs = rhs - sh;
        }
        std::vector<Elem> mp(m + 1, Elem(cur));
        mp[0] = -rhs;
        mp[m] = Elem(cur, Rational(1));
        cur = tower_extend(cur, "Y_" + xi_name, mp);
        rt.y_gen = placed++;
    }
    for (int g = 0; g < ng; ++g)
        if (!cst[g]) carry_level(g);
    rt.tower = cur;
    return rt;
}

Elem rebase_elem(const Elem& x, const RebasedTower& rt, int y_param) {
    const TowerPtr& R = rt.tower;
    Elem Y = Elem::gen(R, rt.y_gen);
    Elem out(R);
    for (auto& [e, q] : x.terms()) {
        std::vector<int> e2(R->ngens(), 0);
        for (size_t j = 0; j < e.size(); ++j)
            if (e[j]) e2[rt.gen_map[j]] = e[j];
        std::map<std::vector<int>, QRat, GrlexLess> mono{{e2, QRat(R->nparams(), Rational(1))}};
        Elem monoe = Elem::from_terms(R, std::move(mono));
        auto subst_poly = [&](const QPoly& p) {
            Elem acc(R);
            int dmax = p.is_zero() ? 0 : p.degree(y_param);
            for (int k = 0; k <= dmax; ++k) {
                QPoly ck = p.coeff_of(y_param, k);
                if (ck.is_zero()) continue;
                acc = acc + Elem(R, QRat(ck)) * Y.pow(k);
            }
            return acc;
        };
        Elem num = subst_poly(q.num());
        Elem den = subst_poly(q.den());
        out = out + monoe * num * den.inv();
    }
    return out;
}

std::vector<Approximation> rebase_side(const VertexSide& side) {
    std::vector<Approximation> out;
    if (side.approxs.empty()) return out;
    const MSeries& first = side.approxs.front().series;
    const TowerPtr& T = first.tw;
    int pi = T->param_index((*first.vars)[side.other_var]);
    FORGE_CHECK(pi >= 0, "other chart variable is not a tower parameter");
    RebasedTower rt = rebase_kummer(T, pi, "xi", side.kummer_m, side.moebius, side.shift);
    VarCtx tvars = make_vars({"t"});
    Elem Y = Elem::gen(rt.tower, rt.y_gen);
    for (auto& a : side.approxs) {
        MSeries m;
        m.vars = tvars;
        m.tw = rt.tower;
        m.trunc = {a.series.trunc[side.series_var]};
        for (auto& [e, c] : a.series.c) {
            int i = e[side.series_var];
            // rewrite into the common uniformizer, absorbing residue powers
            Elem coeff = rebase_elem(c, rt, pi) *
                         Y.pow(static_cast<long>(side.u_absorb) * i);
            m.set({i}, m.at({i}) + coeff);
        }
        out.push_back({a.label, std::move(m)});
    }
    return out;
}

std::optional<Permutation> match_vertex(const VertexSide& a, const VertexSide& b) {
    auto ra = rebase_side(a), rb = rebase_side(b);
    return match_approximations_iso(ra, rb);
}

CoveringPoset assemble_covering(const CoveringBasePoset& base, const GluingData& data) {
    FORGE_CHECK(data.vertex_fibers.size() == base.vertices.size(),
                "vertex fiber missing from gluing data");
    FORGE_CHECK(data.edges.size() == base.edges.size(), "edge fiber missing from gluing data");
    CoveringPoset cov;
    cov.base = base;
    cov.degree = data.degree;
    // vertices
    std::vector<std::vector<int>> vindex(base.vertices.size());
    for (size_t bv = 0; bv < base.vertices.size(); ++bv) {
        long total = 0;
        for (auto& blk : data.vertex_fibers[bv].blocks) {
            CoverVertex v;
            v.base = static_cast<int>(bv);
            for (int x : blk) v.orbit.push_back(x + 1);
            vindex[bv].push_back(static_cast<int>(cov.vertices.size()));
            cov.vertices.push_back(std::move(v));
            total += static_cast<long>(blk.size());
        }
        FORGE_CHECK(total == data.degree, "vertex fiber does not have full degree");
    }
    auto locate_block = [&](size_t bv, int global_label) {
        const auto& part = data.vertex_fibers[bv];
        for (size_t b = 0; b < part.blocks.size(); ++b)
            for (int x : part.blocks[b])
                if (x == global_label) return vindex[bv][b];
        throw invariant_error("diagram map lands outside the declared fibers");
    };
    // edges
    for (auto& eg : data.edges) {
        const auto& be = base.edges[eg.base_edge];
        long total = 0;
        for (auto& blk : eg.fiber.blocks) {
            CoverEdge e;
            e.base = eg.base_edge;
            for (int x : blk) e.orbit.push_back(x + 1);
            int xlab = eg.to_x.img.empty() ? blk[0] : eg.to_x.img[blk[0]];
            int ylab = eg.to_y.img.empty() ? blk[0] : eg.to_y.img[blk[0]];
            e.vx = locate_block(be.x, xlab);
            e.vy = locate_block(be.y, ylab);
            // refinement check: every member lands in the same blocks
            for (int x : blk) {
                int xl = eg.to_x.img.empty() ? x : eg.to_x.img[x];
                int yl = eg.to_y.img.empty() ? x : eg.to_y.img[x];
                if (locate_block(be.x, xl) != e.vx || locate_block(be.y, yl) != e.vy)
                    throw invariant_error("edge orbit does not refine the vertex orbits");
            }
            e.length = edge_length(be.length, blk);
            total += static_cast<long>(blk.size());
            cov.edges.push_back(std::move(e));
        }
        FORGE_CHECK(total == data.degree, "edge fiber does not have full degree");
    }
    // legs
    for (auto& lg : data.legs) {
        const auto& bl = base.legs[lg.base_leg];
        for (size_t b = 0; b < lg.fiber.blocks.size(); ++b) {
            CoverLeg l;
            l.base = lg.base_leg;
            for (int x : lg.fiber.blocks[b]) l.orbit.push_back(x + 1);
            l.vertex = locate_block(bl.vertex, lg.fiber.blocks[b][0]);
            l.ram = lg.ram.empty() ? 1 : lg.ram[b];
            cov.legs.push_back(std::move(l));
        }
    }
    cov.canonicalize();
    return cov;
}

}  // namespace forge
