#include "pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "input.hpp"

namespace forge {

TowerPtr build_field(const FieldSpec& spec, const Caps& caps, Rng rng) {
    TowerPtr t = Tower::make({});
    for (auto& [name, mp] : spec.gens) {
        VarCtx ctx = make_vars({name});
        MultiPoly p = parse_poly(mp, ctx, t);
        UPoly up;
        for (int k = 0; k <= p.degree(0); ++k) {
            MultiPoly c = p.coeff_of(0, k);
            FORGE_CHECK(c.is_constant(), "minimal polynomial coefficient not constant");
            up.push_back(c.constant_value());
        }
        auto [t2, gen] = adjoin_root(t, upmonic(up), name, caps, rng.split());
        t = t2;
    }
    return t;
}

namespace {

std::string orbit_str(const OrbitPartition& p) {
    std::ostringstream os;
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        if (b) os << " ";
        os << "{";
        for (size_t i = 0; i < p.blocks[b].size(); ++i) {
            if (i) os << ",";
            os << p.blocks[b][i] + 1;
        }
        os << "}";
    }
    return os.str();
}

OrbitPartition relabel(const OrbitPartition& p, const Permutation& to_new) {
    OrbitPartition out;
    out.point = p.point;
    out.witness = p.witness;
    for (auto& b : p.blocks) {
        std::vector<int> nb;
        for (int x : b) nb.push_back(to_new.img[x]);
        std::sort(nb.begin(), nb.end());
        out.blocks.push_back(nb);
    }
    std::sort(out.blocks.begin(), out.blocks.end());
    return out;
}

// everything computed for one regularized two-variable chart
struct ChartWork {
    MultiPoly f;
    int degree = 0;
    std::vector<int> kummer{1, 1};
    bool annulus = true;
    int height = 0;
    std::vector<Approximation> at_v1, at_v2, at_m;  // indexed by local label
    int zk1 = 0, zk2 = 0;                           // w = z x1^zk1 x2^zk2
    OrbitPartition vert1, vert2, edgep;
};

std::vector<MuAction> point_actions(const ChartWork& cw, int point,
                                    const std::vector<Approximation>& approxs, const Caps& caps,
                                    Rng& rng) {
    std::vector<MuAction> actions;
    if (approxs.empty()) return actions;
    TowerPtr t = approxs[0].series.tw;
    auto add = [&](int order, std::vector<int> vw, const std::string& pname, int pw,
                   int offset) {
        if (order <= 1) return;
        auto [t2, zeta] = cyclotomic_adjoin(t, order, caps, rng.split());
        t = t2;
        MuAction a;
        a.order = order;
        a.zeta = zeta;
        a.var_weight = std::move(vw);
        a.param_index = pname.empty() ? -1 : t->param_index(pname);
        a.param_weight = pw;
        a.phase_offset = ((offset % order) + order) % order;
        actions.push_back(std::move(a));
    };
    if (cw.annulus) {
        int m = cw.kummer[0];
        std::string pname;
        int pw = 0;
        if (point == 0) { pname = "x2"; pw = -1; }
        if (point == 1) { pname = "x1"; pw = 1; }
        // the approximations expand w = z x1^zk1 x2^zk2, which picks up the
        // constant extra phase zeta^(zk1 - zk2) under the action
        add(m, {0, 1, -1}, pname, pw, cw.zk1 - cw.zk2);
    } else {
        if (point == 0) {
            add(cw.kummer[0], {0, 1, 0}, "", 0, cw.zk1);
            add(cw.kummer[1], {0, 0, 0}, "x2", 1, cw.zk2);
        } else if (point == 1) {
            add(cw.kummer[0], {0, 0, 0}, "x1", 1, cw.zk1);
            add(cw.kummer[1], {0, 0, 1}, "", 0, cw.zk2);
        } else {
            add(cw.kummer[0], {0, 1, 0}, "", 0, cw.zk1);
            add(cw.kummer[1], {0, 0, 1}, "", 0, cw.zk2);
        }
    }
    return actions;
}

// strip variable contents and rescale z so the leading z-coefficient is a
// unit modulo each chart prime
MultiPoly normalize_chart_poly(MultiPoly f, int zvar, int v1, int v2, int* k1_out, int* k2_out) {
    for (int v : {v1, v2}) {
        int c = f.is_zero() ? 0 : f.content_exponent(v);
        if (c > 0) f = f.shift_var_exp(v, -c);
    }
    int k1 = 0, k2 = 0;
    for (int round = 0; round < 64; ++round) {
        int n = f.degree(zvar);
        FORGE_CHECK(n >= 1, "chart polynomial degenerate in z");
        std::vector<MultiPoly> cz = f.dense_in(zvar);
        bool changed = false;
        for (int v : {v1, v2}) {
            int vn = cz[n].is_zero() ? 0 : cz[n].content_exponent(v);
            int k = 0;
            for (int j = 0; j < n; ++j) {
                if (cz[j].is_zero()) continue;
                int need = vn - cz[j].content_exponent(v);
                if (need > 0) k = std::max(k, (need + (n - j) - 1) / (n - j));
            }
            if (k > 0) {
                MultiPoly nf(f.vars(), f.tower());
                for (int j = 0; j <= n; ++j) {
                    if (cz[j].is_zero()) continue;
                    nf = nf + cz[j].shift_var_exp(v, k * (n - j)) *
                                  MultiPoly::var(f.vars(), f.tower(), zvar, j);
                }
                f = nf;
                (v == v1 ? k1 : k2) += k;
                for (int vv : {v1, v2}) {
                    int c = f.content_exponent(vv);
                    if (c > 0) f = f.shift_var_exp(vv, -c);
                }
                changed = true;
                cz = f.dense_in(zvar);
            }
        }
        if (!changed) break;
    }
    if (k1_out) *k1_out = k1;
    if (k2_out) *k2_out = k2;
    return f;
}

ChartWork drive_chart(const MultiPoly& f_in, const std::vector<int>& kummer, bool annulus,
                      int trunc_override, const NPOptions& base_opt, Rng& rng,
                      const std::vector<Elem>& orbit_pins, std::vector<std::string>* log,
                      const std::string& chart_name) {
    ChartWork cw;
    cw.kummer = kummer;
    cw.annulus = annulus;
    cw.f = normalize_chart_poly(f_in, 0, 1, 2, &cw.zk1, &cw.zk2);
    cw.degree = cw.f.degree(0);

    int h = std::max(4, trunc_override);
    int match_retries = 0;
    while (true) {
        if (h > base_opt.caps.expansion_height)
            throw cap_error("expansion height cap exceeded in chart " + chart_name);
        NPOptions opt = base_opt;
        opt.height = h;
        ChainExpansion ex1 = expand_chain(cw.f, 0, {1, 2}, {h, h}, opt, rng.split());
        ChainExpansion ex2 = expand_chain(cw.f, 0, {2, 1}, {h, h}, opt, rng.split());
        int s1 = separating_height(ex1.points[0]);
        int s2 = separating_height(ex2.points[0]);
        int sm = separating_height(ex1.points[1]);
        if (s1 < 0 || s2 < 0 || sm < 0) {
            h *= 2;
            continue;
        }
        int need = std::max({s1, s2, sm}) + 2;
        if (h < need) {
            h = need;
            continue;
        }
        auto cross = match_approximations(ex1.points[1], ex2.points[1]);
        if (!cross) {
            if (++match_retries > 1)
                throw invariant_error("cross-chain matching failed twice in chart " + chart_name);
            h *= 2;
            continue;
        }
        cw.height = h;
        cw.at_v1 = ex1.points[0];
        cw.at_m = ex1.points[1];
        cw.at_v2.resize(cw.degree);
        for (int i = 0; i < cw.degree; ++i) {
            cw.at_v2[i] = ex2.points[0][cross->img[i]];
            cw.at_v2[i].label = i + 1;
        }
        break;
    }

    Rng r2 = rng.split();
    auto a1 = point_actions(cw, 0, cw.at_v1, base_opt.caps, r2);
    cw.vert1 = vertex_orbits(cw.at_v1, a1, chart_name + ":v1", orbit_pins);
    auto a2 = point_actions(cw, 1, cw.at_v2, base_opt.caps, r2);
    cw.vert2 = vertex_orbits(cw.at_v2, a2, chart_name + ":v2", orbit_pins);
    auto am = point_actions(cw, 2, cw.at_m, base_opt.caps, r2);
    cw.edgep = edge_orbits_kummer(cw.at_m, am, chart_name + ":m");
    orbit_diagram(cw.edgep, cw.vert1, cw.vert2);  // refinement invariant

    if (log) {
        log->push_back("chart " + chart_name + ": degree " + std::to_string(cw.degree) +
                       ", height " + std::to_string(cw.height));
        log->push_back("chart " + chart_name + " orbits v1: " + orbit_str(cw.vert1));
        log->push_back("chart " + chart_name + " orbits v2: " + orbit_str(cw.vert2));
        log->push_back("chart " + chart_name + " orbits edge: " + orbit_str(cw.edgep));
    }
    return cw;
}

VertexSide make_side(const ChartWork& cw, int which, const QRat& moebius, const Elem& shift,
                     int u_absorb) {
    VertexSide s;
    s.approxs = which == 0 ? cw.at_v1 : cw.at_v2;
    s.series_var = which == 0 ? 1 : 2;
    s.other_var = which == 0 ? 2 : 1;
    s.kummer_m = which == 0 ? cw.kummer[0] : cw.kummer[1];
    s.moebius = moebius;
    s.shift = shift;
    s.u_absorb = u_absorb;
    return s;
}

// ---- evaluation of approximations along a marked direction ----

struct EvalState {
    TowerPtr E;                 // evaluation tower (no parameters)
    int fine = 1;               // values live in s^(1/fine)
    TSeries value;              // the parameter value, in the fine variable
    std::vector<TSeries> emb;   // per generator of the source tower
};

// substitute the parameter value into a rational function; requires den != 0,
// nullopt marks an exact pole
std::optional<TSeries> plug_qrat(const QRat& q, EvalState& st, int prec) {
    auto horner = [&](const QPoly& p) {
        TSeries acc(st.E, TSeries::EXACT);
        int d = p.is_zero() ? -1 : p.degree(0);
        for (int k = d; k >= 0; --k) {
            Rational c = p.coeff({k});
            acc = acc * st.value + TSeries::constant(st.E, Elem(st.E, c));
        }
        return acc;
    };
    TSeries num = horner(q.num()), den = horner(q.den());
    if (num.known_zero()) return TSeries(st.E, prec);
    if (den.known_zero()) {
        if (st.value.trunc() >= TSeries::EXACT) return std::nullopt;  // exact pole
        throw invariant_error("denominator vanishes within truncation: raise precision");
    }
    return (num * den.inverse(prec + 8)).truncated(prec);
}

std::optional<TSeries> eval_elem(const Elem& x, EvalState& st, int prec) {
    TSeries acc(st.E, TSeries::EXACT);
    for (auto& [e, q] : x.terms()) {
        auto base = plug_qrat(q, st, prec);
        if (!base) return std::nullopt;
        TSeries term = *base;
        for (size_t j = 0; j < e.size(); ++j)
            for (int k = 0; k < e[j]; ++k) term = term * st.emb[j];
        acc = acc + term;
    }
    return acc.truncated(prec);
}

void apply_fine(EvalState& st, int q) {
    if (q == 1) return;
    st.fine *= q;
    st.value = st.value.ramified(q);
    for (auto& s : st.emb) s = s.ramified(q);
}

// embed the generators of T (one parameter) along the value; deterministic
// lex-least branch per generator, reciprocal route for escaping generators
EvalState make_eval_state(const TowerPtr& T, const TSeries& value, int prec,
                          const NPOptions& opt, Rng& rng) {
    FORGE_CHECK(T->nparams() == 1, "evaluation expects a single parameter");
    EvalState st;
    st.E = Tower::make({});
    st.value = value;
    auto tseries_cmp = [](const TSeries& a, const TSeries& b) {
        auto ia = a.coeffs().begin(), ib = b.coeffs().begin();
        for (; ia != a.coeffs().end() && ib != b.coeffs().end(); ++ia, ++ib) {
            if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
            int c = Elem::cmp(ia->second, ib->second);
            if (c) return c;
        }
        if (ia != a.coeffs().end()) return 1;
        if (ib != b.coeffs().end()) return -1;
        return 0;
    };
    for (int g = 0; g < T->ngens(); ++g) {
        // clear parameter denominators across the minimal polynomial
        QPoly lcm(1, Rational(1));
        for (auto& raw : T->levels()[g].minpoly)
            for (auto& [e, q] : raw) lcm = lcm.divexact(qpoly_gcd(lcm, q.den())) * q.den();
        SPoly mp;
        bool pole = false;
        for (auto& raw : T->levels()[g].minpoly) {
            TSeries acc(st.E, TSeries::EXACT);
            for (auto& [e, q] : raw) {
                QRat cleared = q * QRat(lcm);
                FORGE_CHECK(cleared.is_polynomial(), "denominator clearing failed");
                auto base = plug_qrat(cleared, st, prec * st.fine + 8);
                if (!base) { pole = true; break; }
                TSeries term = *base;
                for (int j = 0; j < g; ++j)
                    for (int k = 0; k < e[j]; ++k) term = term * st.emb[j];
                acc = acc + term;
            }
            if (pole) break;
            mp.push_back(acc);
        }
        FORGE_CHECK(!pole, "pole while clearing generator minimal polynomial");
        mp = sptrim(mp);
        NPOptions go = opt;
        go.allow_ram = true;
        go.height = prec * st.fine + 4;
        go.gen_prefix = "ev";
        // integral roots first
        UPoly red;
        for (auto& c : mp)
            red.push_back(c.known_zero() || c.valuation() > 0
                              ? Elem(st.E)
                              : (c.valuation() == 0 ? c.coeffs().begin()->second : Elem(st.E)));
        bool has_integral = updeg(uptrim(red)) >= 1;
        if (has_integral) {
            NPResult rr = expand_roots(mp, go, rng.split());
            FORGE_CHECK(!rr.roots.empty(), "generator evaluation found no roots");
            if (rr.ram > 1) apply_fine(st, rr.ram);
            st.E = rr.tower;
            for (auto& s : st.emb) s = s.lifted(st.E);
            int best = 0;
            for (size_t i = 1; i < rr.roots.size(); ++i)
                if (tseries_cmp(rr.roots[i].series, rr.roots[best].series) < 0)
                    best = static_cast<int>(i);
            st.emb.push_back(rr.roots[best].series.lifted(st.E));
        } else {
            // all conjugates escape: embed the reciprocal
            SPoly rev(mp.rbegin(), mp.rend());
            rev = sptrim(rev);
            NPResult rr = expand_roots(rev, go, rng.split());
            FORGE_CHECK(!rr.roots.empty(), "reciprocal generator evaluation found no roots");
            if (rr.ram > 1) apply_fine(st, rr.ram);
            st.E = rr.tower;
            for (auto& s : st.emb) s = s.lifted(st.E);
            int best = -1;
            for (size_t i = 0; i < rr.roots.size(); ++i) {
                if (rr.roots[i].series.known_zero() || rr.roots[i].series.valuation() <= 0)
                    continue;
                if (best < 0 || tseries_cmp(rr.roots[i].series, rr.roots[best].series) < 0)
                    best = static_cast<int>(i);
            }
            FORGE_CHECK(best >= 0, "escaping generator has no reciprocal branch");
            st.emb.push_back(rr.roots[best].series.lifted(st.E).inverse());
        }
    }
    return st;
}

struct LegClasses {
    std::vector<std::vector<int>> classes;  // local (0-based) label groups
    std::vector<int> ram;
};

// cluster values by exact agreement within truncation; margin guarded
LegClasses cluster_values(const std::vector<std::optional<TSeries>>& vals) {
    int n = static_cast<int>(vals.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    long max_cross = -(1 << 20);
    long min_trunc = 1 << 20;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool ii = !vals[i].has_value(), ij = !vals[j].has_value();
            if (ii && ij) {
                parent[find(j)] = find(i);  // exact poles cluster together
                continue;
            }
            if (ii != ij) continue;
            TSeries d = *vals[i] - *vals[j];
            min_trunc = std::min<long>(min_trunc, d.trunc());
            if (d.known_zero()) parent[find(j)] = find(i);
            else {
                // reciprocal comparison for a pair of escaping values
                max_cross = std::max<long>(max_cross, d.valuation());
            }
        }
    if (max_cross > min_trunc - 2 && n > 1)
        throw invariant_error("insufficient precision separating marked-point values");
    LegClasses out;
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    for (auto& [r, g] : groups) {
        out.classes.push_back(g);
        out.ram.push_back(static_cast<int>(g.size()));
    }
    return out;
}

}  // namespace

// ===================== skeleton pipeline =====================

Bundle run_skeleton(const SkeletonInput& in) {
    Bundle bundle;
    Rng rng(in.seed);
    TowerPtr K = build_field(in.field, in.caps, rng.split());

    std::vector<std::string> names{in.zvar, in.xvar, in.uniformizer};
    for (auto& [n, e] : in.defines) names.push_back(n);
    VarCtx ctx = make_vars(names);
    MultiPoly f0 = parse_poly(in.polynomial, ctx, K);
    {
        std::map<int, RationalFunction> binds;
        for (size_t i = 0; i < in.defines.size(); ++i)
            binds[static_cast<int>(3 + i)] = parse_expression(in.defines[i].second, ctx, K);
        if (!binds.empty()) {
            RationalFunction rf = substitute(f0, binds);
            FORGE_CHECK(rf.is_polynomial(), "defines introduce denominators");
            f0 = rf.poly_value();
        }
    }
    const int zv = 0, xv = 1, tv = 2;
    int degree = f0.degree(zv);
    FORGE_CHECK(degree >= 2, "skeleton pipeline expects a covering of degree at least two");
    bundle.degree = degree;

    // stage 1: branch locus, matrix, tree, annuli
    int h0 = std::max(8, in.truncation);
    BranchLocus locus;
    while (true) {
        try {
            locus = branch_points(f0, zv, xv, tv, h0, in.caps, rng.split());
            plucker_matrix(locus);
            break;
        } catch (const invariant_error&) {
            h0 *= 2;
            if (h0 > in.caps.expansion_height * 4)
                throw cap_error("branch point separation exceeded the height cap");
        }
    }
    ValuationMatrix A = plucker_matrix(locus);
    ClusterTree tree = cluster_tree(A, locus);
    std::vector<AnnulusChart> charts = annulus_charts(tree);
    bundle.rescale = tree.rescale;
    bundle.log.push_back("branch points: " + std::to_string(locus.points.size()) +
                         ", rescale: " + std::to_string(tree.rescale));
    bundle.log.push_back("cluster tree: " + std::to_string(tree.nodes.size()) + " vertices, " +
                         std::to_string(charts.size()) + " annuli");
    FORGE_CHECK(!charts.empty(), "skeleton base tree has a single vertex: nothing to glue");

    // stage 2: per-chart expansions and orbits
    std::map<int, int> chart_of_child;
    std::vector<ChartWork> work;
    NPOptions bopt;
    bopt.caps = in.caps;
    for (size_t ci = 0; ci < charts.size(); ++ci) {
        const AnnulusChart& ch = charts[ci];
        RegularChart reg = kummer_regularize(f0, zv, xv, tv, ch, tree, in.residue_char);
        Rng crng = rng.split();
        ChartWork cw = drive_chart(reg.f, {ch.m, ch.m}, true, in.truncation, bopt, crng, {},
                                   &bundle.log, "edge" + std::to_string(ch.child));
        chart_of_child[ch.child] = static_cast<int>(work.size());
        work.push_back(std::move(cw));
    }

    // stage 3: global labels over the chart tree
    int nw = static_cast<int>(work.size());
    std::vector<Permutation> glabel(nw);
    std::vector<bool> labeled(nw, false);
    std::vector<int> order;
    {
        std::vector<int> q{0};
        while (!q.empty()) {
            int v = q.front();
            q.erase(q.begin());
            for (int c : tree.nodes[v].children) {
                order.push_back(chart_of_child[c]);
                q.push_back(c);
            }
        }
    }
    auto side_of = [&](int wi, int which) {
        const AnnulusChart& ch = charts[wi];
        if (which == 0) return make_side(work[wi], 0, ch.deep.moebius, ch.deep.shift, -1);
        return make_side(work[wi], 1, ch.shallow.moebius, ch.shallow.shift, -1);
    };
    for (int idx = 0; idx < nw; ++idx) {
        int wi = order[idx];
        const AnnulusChart& ch = charts[wi];
        if (idx == 0) {
            glabel[wi] = Permutation::identity(degree);
            labeled[wi] = true;
            continue;
        }
        int pnode = tree.nodes[ch.child].parent;
        int anchor = -1, anchor_which = 0;
        auto it = chart_of_child.find(pnode);
        if (pnode != 0 && it != chart_of_child.end() && labeled[it->second]) {
            anchor = it->second;
            anchor_which = 0;
        }
        if (anchor < 0) {
            for (int c : tree.nodes[pnode].children) {
                int w2 = chart_of_child[c];
                if (w2 != wi && labeled[w2]) {
                    anchor = w2;
                    anchor_which = 1;
                    break;
                }
            }
        }
        FORGE_CHECK(anchor >= 0, "no labeled neighbor chart at a tree vertex");
        VertexSide mine = side_of(wi, 1);
        VertexSide theirs = side_of(anchor, anchor_which);
        auto perm = match_vertex(mine, theirs);
        if (!perm)
            throw invariant_error("cross-chart vertex matching failed at node " +
                                  std::to_string(pnode));
        glabel[wi] = perm->then(glabel[anchor]);
        labeled[wi] = true;
        bundle.matchings.push_back("chart edge" + std::to_string(ch.child) +
                                   " glued at vertex v" + std::to_string(pnode));
    }

    // per tree vertex: the anchor (chart, side) that computes its fiber
    auto vertex_anchor_of = [&](int v) -> std::pair<int, int> {
        if (v != 0) return {chart_of_child[v], 0};
        return {chart_of_child[tree.nodes[0].children[0]], 1};
    };

    // stage 4: base poset and fibers
    CoveringBasePoset base;
    for (size_t v = 0; v < tree.nodes.size(); ++v)
        base.vertices.push_back({"v" + std::to_string(v), 0});
    std::map<int, int> edge_index;
    for (size_t ci = 0; ci < charts.size(); ++ci) {
        BaseEdgeData be;
        be.name = "e" + std::to_string(charts[ci].child);
        be.x = charts[ci].child;
        be.y = tree.nodes[charts[ci].child].parent;
        be.length = Rational(charts[ci].m) / Rational(tree.rescale);
        edge_index[charts[ci].child] = static_cast<int>(base.edges.size());
        base.edges.push_back(be);
    }
    for (size_t p = 0; p < locus.points.size(); ++p) {
        BaseLegData bl;
        bl.name = locus.points[p].at_infinity ? "P_inf" : "P" + std::to_string(p);
        bl.vertex = tree.leaf_node[p];
        base.legs.push_back(bl);
    }

    GluingData data;
    data.degree = degree;
    data.vertex_fibers.resize(base.vertices.size());
    for (size_t v = 0; v < tree.nodes.size(); ++v) {
        auto [wi, which] = vertex_anchor_of(static_cast<int>(v));
        OrbitPartition part =
            relabel(which == 0 ? work[wi].vert1 : work[wi].vert2, glabel[wi]);
        part.point = "v" + std::to_string(v);
        data.vertex_fibers[v] = part;
        bundle.orbits[part.point] = {orbit_str(part)};
    }
    for (size_t ci = 0; ci < charts.size(); ++ci) {
        EdgeGlue eg;
        eg.base_edge = edge_index[charts[ci].child];
        eg.fiber = relabel(work[ci].edgep, glabel[ci]);
        eg.fiber.point = base.edges[eg.base_edge].name;
        data.edges.push_back(eg);
        bundle.orbits[eg.fiber.point] = {orbit_str(eg.fiber)};
    }

    // stage 5: marked-point fibers via disk expansions at the carrying vertex
    for (size_t node = 0; node < tree.nodes.size(); ++node) {
        const ClusterNode& nd = tree.nodes[node];
        if (nd.legs.empty()) continue;
        // disk polynomial f(z, x = center + s^depth w) over (z, w, s)
        VarCtx dctx = make_vars({"z", "w", "s"});
        MultiPoly w = MultiPoly::var(dctx, tree.tower, 1);
        MultiPoly svar = MultiPoly::var(dctx, tree.tower, 2);
        MultiPoly cpoly(dctx, tree.tower);
        for (auto& [k, coeff] : nd.center.coeffs()) cpoly = cpoly + svar.pow(k).scale(coeff);
        MultiPoly coord = cpoly + svar.pow(nd.depth) * w;
        RationalFunction xbind =
            nd.flipped ? RationalFunction(MultiPoly::constant(dctx, tree.tower, Rational(1))) /
                             RationalFunction(coord)
                       : RationalFunction(coord);
        RationalFunction acc{MultiPoly(dctx, tree.tower)};
        for (auto& [e, c] : f0.terms()) {
            RationalFunction term{MultiPoly(dctx, c.lifted(tree.tower))};
            if (e[zv]) term = term * RationalFunction(MultiPoly::var(dctx, tree.tower, 0)).pow(e[zv]);
            if (e[xv]) term = term * xbind.pow(e[xv]);
            if (e[tv]) term = term * RationalFunction(svar.pow(tree.rescale)).pow(e[tv]);
            acc = acc + term;
        }
        MultiPoly fdisk = acc.num();
        // strip contents; rescale z in s only when the leading coefficient
        // degenerates modulo (s)
        for (int v : {1, 2}) {
            int c = fdisk.content_exponent(v);
            if (c > 0) fdisk = fdisk.shift_var_exp(v, -c);
        }
        int zks = 0;
        {
            int n = fdisk.degree(0);
            std::vector<MultiPoly> cz = fdisk.dense_in(0);
            int vn = cz[n].content_exponent(2);
            for (int j = 0; j < n; ++j) {
                if (cz[j].is_zero()) continue;
                int need = vn - cz[j].content_exponent(2);
                if (need > 0) zks = std::max(zks, (need + (n - j) - 1) / (n - j));
            }
            if (zks > 0) {
                MultiPoly nf(dctx, tree.tower);
                for (int j = 0; j <= n; ++j) {
                    if (cz[j].is_zero()) continue;
                    nf = nf + cz[j].shift_var_exp(2, zks * (n - j)) *
                                  MultiPoly::var(dctx, tree.tower, 0, j);
                }
                fdisk = nf;
                int c = fdisk.content_exponent(2);
                if (c > 0) fdisk = fdisk.shift_var_exp(2, -c);
            }
        }

        int h = std::max(6, work[vertex_anchor_of(static_cast<int>(node)).first].height);
        std::vector<Approximation> dv;
        Permutation to_global;
        while (true) {
            if (h > in.caps.expansion_height)
                throw cap_error("disk expansion height cap exceeded at node " +
                                std::to_string(node));
            NPOptions opt = bopt;
            opt.height = h;
            ChainExpansion de = expand_chain(fdisk, 0, {2}, {h}, opt, rng.split());
            if (separating_height(de.points[0]) < 0) {
                h *= 2;
                continue;
            }
            dv = de.points[0];
            // match the disk labels with the vertex anchor labels
            VertexSide dside;
            dside.approxs = dv;
            dside.series_var = 2;
            dside.other_var = 1;
            dside.kummer_m = 1;
            dside.moebius = QRat(QPoly::var(1, 0));
            dside.shift = Elem(tree.tower);
            dside.u_absorb = 0;
            auto [awi, awhich] = vertex_anchor_of(static_cast<int>(node));
            auto perm = match_vertex(dside, side_of(awi, awhich));
            if (!perm) {
                h *= 2;
                continue;
            }
            to_global = perm->then(glabel[awi]);
            break;
        }

        // evaluate at each leg and cluster
        for (int p : nd.legs) {
            TSeries wP = (tree.leaf_series[p].lifted(tree.tower) - nd.center.lifted(tree.tower))
                             .shifted(-nd.depth);
            int attempt_h = h;
            while (true) {
                try {
                    TowerPtr T = dv[0].series.tw;
                    EvalState st = make_eval_state(T, wP, attempt_h, bopt, rng);
                    std::vector<std::optional<TSeries>> vals;
                    for (auto& a : dv) {
                        std::optional<TSeries> val = TSeries(st.E, TSeries::EXACT);
                        TSeries acc2(st.E, TSeries::EXACT);
                        bool inf = false;
                        for (auto& [e, c] : a.series.c) {
                            auto ce = eval_elem(c, st, attempt_h * st.fine + 4);
                            if (!ce) { inf = true; break; }
                            acc2 = acc2 + ce->shifted(e[2] * st.fine);
                        }
                        if (inf) val = std::nullopt;
                        else {
                            // undo the z-normalization w = z s^zks
                            val = acc2.shifted(-zks * st.fine);
                        }
                        vals.push_back(val);
                    }
                    LegClasses lc = cluster_values(vals);
                    LegGlue lg;
                    lg.base_leg = p;
                    lg.fiber.point = base.legs[p].name;
                    for (size_t cidx = 0; cidx < lc.classes.size(); ++cidx) {
                        std::vector<int> blk;
                        for (int loc : lc.classes[cidx]) blk.push_back(to_global.img[loc]);
                        std::sort(blk.begin(), blk.end());
                        lg.fiber.blocks.push_back(blk);
                        lg.ram.push_back(lc.ram[cidx]);
                    }
                    // deterministic block order with parallel ram info
                    std::vector<size_t> ord(lg.fiber.blocks.size());
                    std::iota(ord.begin(), ord.end(), 0);
                    std::sort(ord.begin(), ord.end(), [&](size_t a, size_t b) {
                        return lg.fiber.blocks[a] < lg.fiber.blocks[b];
                    });
                    LegGlue sorted;
                    sorted.base_leg = lg.base_leg;
                    sorted.fiber.point = lg.fiber.point;
                    for (size_t k : ord) {
                        sorted.fiber.blocks.push_back(lg.fiber.blocks[k]);
                        sorted.ram.push_back(lg.ram[k]);
                    }
                    data.legs.push_back(sorted);
                    break;
                } catch (const invariant_error&) {
                    attempt_h *= 2;
                    if (attempt_h > in.caps.expansion_height * 4)
                        throw cap_error("marked point evaluation exceeded the height cap");
                    NPOptions opt = bopt;
                    opt.height = attempt_h;
                    ChainExpansion de = expand_chain(fdisk, 0, {2}, {attempt_h}, opt, rng.split());
                    dv = de.points[0];
                }
            }
        }
    }

    // stage 6: assemble and fill genera
    CoveringPoset cov = assemble_covering(base, data);
    for (size_t vi = 0; vi < cov.vertices.size(); ++vi) {
        auto& v = cov.vertices[vi];
        std::vector<int> ram;
        for (auto& e : cov.edges)
            if (e.vx == static_cast<int>(vi) || e.vy == static_cast<int>(vi))
                ram.push_back(static_cast<int>(e.orbit.size()));
        for (auto& l : cov.legs)
            if (l.vertex == static_cast<int>(vi) && l.ram > 1) ram.push_back(l.ram);
        v.genus = component_genus(static_cast<int>(v.orbit.size()), 0, ram);
    }
    bundle.covering = cov;
    bundle.betti1 = cov.betti1();
    bundle.genus_total = cov.total_genus();
    for (auto& a : work[0].at_m)
        bundle.approximations["chart-e" + std::to_string(charts[0].child) + ":m"].push_back(
            "[" + std::to_string(a.label) + "] " + a.series.str());
    return bundle;
}

// ===================== charts pipeline =====================

Bundle run_charts(const ChartsInput& in) {
    Bundle bundle;
    Rng rng(in.seed);
    TowerPtr K = build_field(in.field, in.caps, rng.split());

    std::vector<std::string> anames{in.zvar};
    for (auto& a : in.ambient) anames.push_back(a);
    VarCtx actx = make_vars(anames);
    MultiPoly f_amb = parse_poly(in.polynomial, actx, K);
    int degree = f_amb.degree(0);
    bundle.degree = degree;

    std::map<std::string, int> vname2id, ename2id;
    CoveringBasePoset base;
    struct EdgeMeta {
        int chart = -1;
        std::string xname, yname;
    };
    std::vector<EdgeMeta> emeta;

    struct CWext {
        ChartWork cw;
        std::map<std::string, int> point_which;
        std::map<std::string, ChartPointSpec> pspec;
        std::vector<Elem> pins;
    };
    std::vector<CWext> work;

    NPOptions bopt;
    bopt.caps = in.caps;

    for (auto& cs : in.charts) {
        FORGE_CHECK(cs.vars.size() == 2, "charts need exactly two variables");
        VarCtx cctx = make_vars({in.zvar, cs.vars[0], cs.vars[1]});
        std::map<int, RationalFunction> binds;
        for (size_t ai = 0; ai < in.ambient.size(); ++ai) {
            auto it = cs.subst.find(in.ambient[ai]);
            if (it != cs.subst.end())
                binds[static_cast<int>(ai + 1)] = parse_expression(it->second, cctx, K);
        }
        RationalFunction acc{MultiPoly(cctx, K)};
        for (auto& [e, c] : f_amb.terms()) {
            RationalFunction term{MultiPoly(cctx, c)};
            if (e[0]) term = term * RationalFunction(MultiPoly::var(cctx, K, 0)).pow(e[0]);
            for (size_t ai = 0; ai < in.ambient.size(); ++ai) {
                if (!e[ai + 1]) continue;
                auto it = binds.find(static_cast<int>(ai + 1));
                FORGE_CHECK(it != binds.end(), "chart substitution missing for " + in.ambient[ai]);
                term = term * it->second.pow(e[ai + 1]);
            }
            acc = acc + term;
        }
        MultiPoly fchart = acc.num();

        CWext w;
        NPOptions copt = bopt;
        for (auto& re : cs.residue_ext) {
            VarCtx wctx = make_vars({"w", cs.vars[0], cs.vars[1]});
            MultiPoly mp = parse_poly(re.minpoly, wctx, K);
            for (int v : {1, 2})
                if (mp.degree(v) > 0) mp = promote_var_to_param(mp, v);
            UPoly up;
            for (int k = 0; k <= mp.degree(0); ++k) {
                MultiPoly c = mp.coeff_of(0, k);
                FORGE_CHECK(c.is_constant(), "residue extension minpoly malformed");
                up.push_back(c.constant_value());
            }
            EmbedHint hint;
            hint.minpoly = upmonic(up);
            hint.reduction = Rational::parse(re.reduction);
            copt.embed_hints.push_back(hint);
        }
        bool annulus = cs.action == "annulus";
        Rng crng = rng.split();
        w.cw = drive_chart(fchart, cs.kummer, annulus, in.truncation, copt, crng, {}, &bundle.log,
                           cs.name);
        // pins: tower generators matching a declared residue extension
        for (auto& re : cs.residue_ext) {
            VarCtx wctx = make_vars({"w", cs.vars[0], cs.vars[1]});
            MultiPoly mp = parse_poly(re.minpoly, wctx, K);
            for (int v : {1, 2})
                if (mp.degree(v) > 0) mp = promote_var_to_param(mp, v);
            for (auto* apxs : {&w.cw.at_v1, &w.cw.at_v2}) {
                if (apxs->empty()) continue;
                TowerPtr T = (*apxs)[0].series.tw;
                for (int g = 0; g < T->ngens(); ++g) {
                    if (static_cast<int>(T->levels()[g].minpoly.size()) != mp.degree(0) + 1)
                        continue;
                    bool same = true, lowgen = true;
                    for (size_t k = 0; k < T->levels()[g].minpoly.size() && same; ++k) {
                        Elem coeff(T);
                        for (auto& [e, q] : T->levels()[g].minpoly[k]) {
                            for (int j = 0; j < g; ++j)
                                if (e[j]) lowgen = false;
                            std::map<std::vector<int>, QRat, GrlexLess> one{
                                {std::vector<int>(T->ngens(), 0), q}};
                            coeff = coeff + Elem::from_terms(T, std::move(one));
                        }
                        if (!lowgen) break;
                        MultiPoly mk = mp.coeff_of(0, static_cast<int>(k));
                        Elem want = mk.is_constant() ? mk.constant_value() : Elem(T);
                        if (!mk.is_constant()) { same = false; break; }
                        try {
                            auto [x, y] = align(want, coeff);
                            if (!(x == y)) same = false;
                        } catch (const input_error&) {
                            same = false;
                        }
                    }
                    if (same && lowgen) w.pins.push_back(Elem::gen(T, g));
                }
            }
        }
        if (!w.pins.empty()) {
            Rng r2 = rng.split();
            auto a1 = point_actions(w.cw, 0, w.cw.at_v1, in.caps, r2);
            w.cw.vert1 = vertex_orbits(w.cw.at_v1, a1, cs.name + ":v1", w.pins);
            auto a2 = point_actions(w.cw, 1, w.cw.at_v2, in.caps, r2);
            w.cw.vert2 = vertex_orbits(w.cw.at_v2, a2, cs.name + ":v2", w.pins);
        }
        for (auto& ps : cs.points) {
            int which;
            if (ps.prime == std::vector<int>{1}) which = 0;
            else if (ps.prime == std::vector<int>{2}) which = 1;
            else which = 2;
            w.point_which[ps.global_name] = which;
            w.pspec[ps.global_name] = ps;
            if (which != 2 && !vname2id.count(ps.global_name)) {
                vname2id[ps.global_name] = static_cast<int>(base.vertices.size());
                base.vertices.push_back({ps.global_name, 0});
            }
        }
        work.push_back(std::move(w));
    }
    for (size_t ci = 0; ci < in.charts.size(); ++ci) {
        std::string mname, xn, yn;
        for (auto& [name, which] : work[ci].point_which) {
            if (which == 2) mname = name;
            if (which == 0) xn = name;
            if (which == 1) yn = name;
        }
        FORGE_CHECK(!mname.empty() && !xn.empty() && !yn.empty(),
                    "chart must declare both vertices and the double point");
        BaseEdgeData be;
        be.name = mname;
        be.x = vname2id[xn];
        be.y = vname2id[yn];
        be.length = Rational(1);
        ename2id[mname] = static_cast<int>(base.edges.size());
        emeta.push_back({static_cast<int>(ci), xn, yn});
        base.edges.push_back(be);
    }

    // label propagation over the declared spanning tree
    int nw = static_cast<int>(work.size());
    std::vector<Permutation> glabel(nw);
    std::vector<bool> labeled(nw, false);
    std::map<std::string, std::pair<int, int>> vertex_anchor;

    auto side_for = [&](int wi, const std::string& vname) {
        int which = work[wi].point_which.at(vname);
        const ChartPointSpec& ps = work[wi].pspec.at(vname);
        VarCtx xictx = make_vars({"xi"});
        RationalFunction r = parse_expression(ps.moebius, xictx, Tower::make({}));
        QPoly num(1), den(1);
        for (auto& [e, c] : r.num().terms()) num.set_term({e[0]}, c.rational_value());
        for (auto& [e, c] : r.den().terms()) den.set_term({e[0]}, c.rational_value());
        VertexSide s = make_side(work[wi].cw, which, QRat(num, den),
                                 Elem(work[wi].cw.at_v1[0].series.tw), ps.u_absorb);
        s.shift = Elem(s.approxs[0].series.tw);
        s.kummer_m = ps.res_power;
        return s;
    };

    glabel[0] = Permutation::identity(degree);
    labeled[0] = true;
    for (auto& [name, which] : work[0].point_which)
        if (which != 2 && !vertex_anchor.count(name)) vertex_anchor[name] = {0, which};
    bool progress = true;
    while (progress) {
        progress = false;
        for (auto& [vn, mn] : in.tree) {
            FORGE_CHECK(ename2id.count(mn), "tree edge references unknown double point " + mn);
            int ci = emeta[ename2id[mn]].chart;
            FORGE_CHECK(work[ci].point_which.count(vn),
                        "tree edge vertex " + vn + " not in chart of " + mn);
            if (labeled[ci] && !vertex_anchor.count(vn)) {
                vertex_anchor[vn] = {ci, work[ci].point_which.at(vn)};
                progress = true;
            } else if (!labeled[ci] && vertex_anchor.count(vn)) {
                auto [ai, awhich] = vertex_anchor[vn];
                auto perm = match_vertex(side_for(ci, vn), side_for(ai, vn));
                if (!perm) throw invariant_error("vertex matching failed at " + vn);
                glabel[ci] = perm->then(glabel[ai]);
                labeled[ci] = true;
                for (auto& [name, which] : work[ci].point_which)
                    if (which != 2 && !vertex_anchor.count(name))
                        vertex_anchor[name] = {ci, which};
                progress = true;
            }
        }
    }
    for (int ci = 0; ci < nw; ++ci)
        FORGE_CHECK(labeled[ci], "spanning tree does not reach chart " + in.charts[ci].name);

    GluingData data;
    data.degree = degree;
    data.vertex_fibers.resize(base.vertices.size());
    for (auto& [vn, anch] : vertex_anchor) {
        auto [ci, which] = anch;
        OrbitPartition part =
            relabel(which == 0 ? work[ci].cw.vert1 : work[ci].cw.vert2, glabel[ci]);
        part.point = vn;
        data.vertex_fibers[vname2id[vn]] = part;
        bundle.orbits[vn] = {orbit_str(part)};
    }
    auto in_tree = [&](const std::string& vn, const std::string& mn) {
        for (auto& [a, b] : in.tree)
            if (a == vn && b == mn) return true;
        return false;
    };
    for (size_t ei = 0; ei < base.edges.size(); ++ei) {
        int ci = emeta[ei].chart;
        EdgeGlue eg;
        eg.base_edge = static_cast<int>(ei);
        eg.fiber = relabel(work[ci].cw.edgep, glabel[ci]);
        eg.fiber.point = base.edges[ei].name;
        bundle.orbits[eg.fiber.point] = {orbit_str(eg.fiber)};
        auto transfer_for = [&](const std::string& vn) {
            auto [ai, awhich] = vertex_anchor.at(vn);
            if (in_tree(vn, base.edges[ei].name) || ai == ci)
                return Permutation::identity(degree);
            auto perm = match_vertex(side_for(ci, vn), side_for(ai, vn));
            if (!perm) throw invariant_error("transfer matching failed at " + vn);
            Permutation tau = glabel[ci].inverse().then(*perm).then(glabel[ai]);
            if (!tau.is_identity())
                bundle.matchings.push_back("transfer at " + vn + " over " + base.edges[ei].name +
                                           " is nontrivial");
            return tau;
        };
        eg.to_x = transfer_for(emeta[ei].xname);
        eg.to_y = transfer_for(emeta[ei].yname);
        data.edges.push_back(eg);
    }

    CoveringPoset cov = assemble_covering(base, data);
    bundle.covering = cov;
    bundle.betti1 = cov.betti1();
    bundle.genus_total = 0;
    for (size_t ci = 0; ci < work.size(); ++ci)
        for (auto& a : work[ci].cw.at_m)
            bundle.approximations[in.charts[ci].name + ":m"].push_back(
                "[" + std::to_string(a.label) + "] " + a.series.str());
    return bundle;
}

}  // namespace forge
