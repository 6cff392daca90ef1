#include "galois.hpp"

#include <algorithm>
#include <functional>

namespace forge {

IsoMatcher::IsoMatcher(TowerPtr a, TowerPtr b)
    : a_(std::move(a)), b_(std::move(b)), fa_(a_), fb_(b_) {
    FORGE_CHECK(a_->params() == b_->params(), "iso match needs a common parameter field");
}

void IsoMatcher::fix_constants() {
    FORGE_CHECK(Tower::same(*a_, *b_), "fix_constants needs a shared tower");
    // a generator is constant when its minimal polynomial chain never touches
    // a parameter
    int n = a_->ngens();
    std::vector<bool> cst(n, false);
    for (int g = 0; g < n; ++g) {
        bool ok = true;
        for (auto& raw : a_->levels()[g].minpoly)
            for (auto& [e, q] : raw) {
                for (int pi = 0; pi < a_->nparams(); ++pi)
                    if (q.depends_on(pi)) ok = false;
                for (int j = 0; j < g; ++j)
                    if (e[j] && !cst[j]) ok = false;
            }
        cst[g] = ok;
        if (ok) {
            Elem gen = Elem::gen(a_, g);
            bool pinned = pin(gen, gen);
            FORGE_CHECK(pinned, "failed to fix a constant generator");
        }
    }
}

bool IsoMatcher::pin(const Elem& c0, const Elem& d0) {
    Elem c = Tower::same(*c0.tower(), *a_) ? c0 : c0.lifted(a_);
    Elem d = Tower::same(*d0.tower(), *b_) ? d0 : d0.lifted(b_);
    auto coords = fa_.coords_in(c);
    if (coords) {
        // image determined by the pinned part
        Elem img(b_);
        for (size_t i = 0; i < coords->size(); ++i)
            img = img + Elem(b_, (*coords)[i]) * fb_.basis()[i];
        return img == d;
    }
    // symmetric check on the other side
    if (fb_.coords_in(d)) return false;
    SubfieldFlag::MinPoly mp = fa_.min_poly(c);
    SubfieldFlag::MinPoly mq = fb_.min_poly(d);
    if (mp.degree() != mq.degree()) return false;
    // map the coefficients of mp through the basis correspondence and test d
    Elem val(b_);
    Elem dp(b_, Rational(1));
    for (int j = 0; j <= mp.degree(); ++j) {
        Elem cj(b_);
        for (size_t i = 0; i < mp.coords[j].size(); ++i)
            cj = cj + Elem(b_, mp.coords[j][i]) * fb_.basis()[i];
        val = val + cj * dp;
        dp = dp * d;
    }
    if (!val.is_zero()) return false;
    int da = fa_.adjoin(c);
    int db = fb_.adjoin(d);
    FORGE_CHECK(da == db, "parallel flags diverged");
    return true;
}

MSeries apply_action(const MSeries& s, const MuAction& act, int k) {
    if (act.order == 1 || k % act.order == 0) return s;
    TowerPtr t = act.zeta.tower();
    FORGE_CHECK(Tower::prefix_of(*s.tw, *t) || Tower::same(*s.tw, *t),
                "action root of unity missing from the tower");
    MSeries r = s.lifted(t);
    r.c.clear();
    for (auto& [e, c] : s.c) {
        long w = 0;
        for (size_t i = 0; i < e.size(); ++i) w += static_cast<long>(act.var_weight[i]) * e[i];
        Elem coeff = c.lifted(t);
        if (act.param_index >= 0 && act.param_weight != 0) {
            // rotate the parameter: y -> zeta^(k*pw) y
            Elem rot(t);
            Elem zp = act.zeta.pow((static_cast<long>(k) * act.param_weight) % act.order + act.order);
            for (auto& [ge, q] : coeff.terms()) {
                // split num and den by powers of the parameter
                auto twist_poly = [&](const QPoly& p) {
                    Elem acc(t);
                    int dmax = p.is_zero() ? 0 : p.degree(act.param_index);
                    for (int j = 0; j <= dmax; ++j) {
                        QPoly cj = p.coeff_of(act.param_index, j);
                        if (cj.is_zero()) continue;
                        QPoly full = cj * QPoly::var(p.arity(), act.param_index, j);
                        acc = acc + Elem(t, QRat(full)) * zp.pow(j);
                    }
                    return acc;
                };
                Elem num = twist_poly(q.num());
                Elem den = twist_poly(q.den());
                std::map<std::vector<int>, QRat, GrlexLess> mono{
                    {ge, QRat(t->nparams(), Rational(1))}};
                rot = rot + Elem::from_terms(t, std::move(mono)) * num * den.inv();
            }
            coeff = rot;
        }
        long tot = ((w + act.phase_offset) % act.order) * k % act.order;
        Elem phased = coeff * act.zeta.pow((tot % act.order + act.order) % act.order);
        if (!phased.is_zero()) r.c[e] = phased;
    }
    return r;
}

bool series_iso_match_pinned(const MSeries& a, const MSeries& b, const std::vector<Elem>& pins) {
    // compare below the common truncation with an incremental isomorphism
    std::vector<int> bound(a.trunc.size());
    for (size_t i = 0; i < bound.size(); ++i) bound[i] = std::min(a.trunc[i], b.trunc[i]);
    MSeries at = a.truncated(bound), bt = b.truncated(bound);
    IsoMatcher iso(at.tw, bt.tw);
    if (Tower::same(*at.tw, *bt.tw)) iso.fix_constants();
    for (auto& p : pins)
        if (!iso.pin(p.lifted(at.tw), p.lifted(bt.tw))) return false;
    // scan the union of supports in canonical order
    std::vector<std::vector<int>> exps;
    for (auto& [e, c] : at.c) exps.push_back(e);
    for (auto& [e, c] : bt.c)
        if (!at.c.count(e)) exps.push_back(e);
    std::sort(exps.begin(), exps.end(), GrlexLess());
    for (auto& e : exps)
        if (!iso.pin(at.at(e), bt.at(e))) return false;
    return true;
}

bool series_iso_match(const MSeries& a, const MSeries& b) {
    return series_iso_match_pinned(a, b, {});
}

bool series_exact_match(const MSeries& a, const MSeries& b) {
    std::vector<int> bound(a.trunc.size());
    for (size_t i = 0; i < bound.size(); ++i) bound[i] = std::min(a.trunc[i], b.trunc[i]);
    return a.equal_mod(b, bound);
}

OrbitPartition orbits_of_relation(int n, const std::function<bool(int, int)>& related,
                                  const std::string& point) {
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    OrbitPartition out;
    out.point = point;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (find(i) == find(j)) continue;
            if (related(i, j)) {
                parent[find(j)] = find(i);
                out.witness.push_back(point + ": merged " + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1));
            }
        }
    std::map<int, std::vector<int>> blocks;
    for (int i = 0; i < n; ++i) blocks[find(i)].push_back(i);
    for (auto& [r, b] : blocks) out.blocks.push_back(b);
    std::sort(out.blocks.begin(), out.blocks.end());
    return out;
}

namespace {

// iterate over all tuples of action powers
bool any_action_match(const std::vector<Approximation>& approxs,
                      const std::vector<MuAction>& actions, int i, int j,
                      const std::function<bool(const MSeries&, const MSeries&)>& match) {
    int r = static_cast<int>(actions.size());
    std::vector<int> k(r, 0);
    while (true) {
        MSeries twisted = approxs[i].series;
        for (int a = 0; a < r; ++a) twisted = apply_action(twisted, actions[a], k[a]);
        if (match(twisted, approxs[j].series)) return true;
        int a = 0;
        while (a < r) {
            if (++k[a] < actions[a].order) break;
            k[a] = 0;
            ++a;
        }
        if (a == r || r == 0) break;
    }
    return false;
}

}  // namespace

OrbitPartition vertex_orbits(const std::vector<Approximation>& approxs,
                             const std::vector<MuAction>& actions, const std::string& point,
                             const std::vector<Elem>& pins) {
    int n = static_cast<int>(approxs.size());
    return orbits_of_relation(
        n,
        [&](int i, int j) {
            return any_action_match(approxs, actions, i, j,
                                    [&](const MSeries& a, const MSeries& b) {
                                        return series_iso_match_pinned(a, b, pins);
                                    });
        },
        point);
}

OrbitPartition edge_orbits_kummer(const std::vector<Approximation>& approxs,
                                  const std::vector<MuAction>& actions, const std::string& point) {
    int n = static_cast<int>(approxs.size());
    // the action must permute the approximation set within truncation
    for (auto& act : actions) {
        if (act.order == 1) continue;
        for (int i = 0; i < n; ++i) {
            MSeries im = apply_action(approxs[i].series, act, 1);
            bool hit = false;
            for (int j = 0; j < n && !hit; ++j)
                if (series_exact_match(im, approxs[j].series)) hit = true;
            if (!hit)
                throw invariant_error(point +
                                      ": Kummer action does not permute approximations; "
                                      "insufficient truncation");
        }
    }
    OrbitPartition part = orbits_of_relation(
        n,
        [&](int i, int j) {
            return any_action_match(approxs, actions, i, j, &series_exact_match);
        },
        point);
    // block sizes divide the group order
    long order = 1;
    for (auto& a : actions) order *= a.order;
    for (auto& b : part.blocks)
        FORGE_CHECK(order % static_cast<long>(b.size()) == 0,
                    "edge orbit size does not divide the Kummer order");
    return part;
}

Rational edge_length(const Rational& base_length, const std::vector<int>& block) {
    FORGE_CHECK(!block.empty(), "empty orbit block");
    return base_length / Rational(static_cast<long>(block.size()));
}

OrbitDiagram orbit_diagram(const OrbitPartition& edge, const OrbitPartition& x,
                           const OrbitPartition& y) {
    auto locate = [](const OrbitPartition& p, int label) {
        for (size_t b = 0; b < p.blocks.size(); ++b)
            for (int v : p.blocks[b])
                if (v == label) return static_cast<int>(b);
        throw invariant_error("label missing from partition");
    };
    OrbitDiagram d;
    for (auto& eb : edge.blocks) {
        int bx = locate(x, eb[0]), by = locate(y, eb[0]);
        for (int v : eb) {
            if (locate(x, v) != bx || locate(y, v) != by)
                throw invariant_error("edge orbit does not refine a vertex orbit");
        }
        d.to_x.push_back(bx);
        d.to_y.push_back(by);
    }
    return d;
}

}  // namespace forge
