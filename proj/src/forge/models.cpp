#include "models.hpp"

#include "galois.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace forge {

namespace {

// squarefree part in `var`
MultiPoly radical_in(const MultiPoly& p, int var) {
    MultiPoly d = p.derivative(var);
    if (d.is_zero()) return p;
    MultiPoly g = mpoly_gcd(p, d);
    if (g.is_constant()) return p;
    return p.divexact(g);
}

// does the covering ramify over the local fiber of g at u = 0? checks both
// the finite z-branches and the ones escaping to z = infinity
bool ramified_over_local(const MultiPoly& g, int zvar, int uvar, const Caps& caps, Rng& rng) {
    int dz = g.degree(zvar);
    // finite branches
    MultiPoly fib = g.coeff_of(uvar, 0);
    int dzf = fib.degree(zvar);
    if (dzf >= 1) {
        MultiPoly h = mpoly_gcd(fib, fib.derivative(zvar));
        if (!h.is_constant()) {
            // repeated fiber root: confirm via expansion multiplicities
            PuiseuxResult pr = puiseux_univariate(g, zvar, uvar, 4, caps.ramification, caps,
                                                  rng.split());
            for (auto& b : pr.branches)
                if (b.e >= 2) return true;
            // distinct expansions despite the repeated fiber value
            std::vector<Approximation> as;
            VarCtx tv = make_vars({"u"});
            for (auto& b : pr.branches) {
                MSeries m;
                m.vars = tv;
                m.tw = pr.tower;
                m.trunc = {b.series.trunc()};
                for (auto& [k, c] : b.series.coeffs()) m.set({k}, c);
                as.push_back({0, std::move(m)});
            }
            for (size_t i = 0; i < as.size(); ++i)
                for (size_t j = i + 1; j < as.size(); ++j)
                    if (series_exact_match(as[i].series, as[j].series)) return true;
        }
    }
    if (dzf < dz) {
        // roots escaping to infinity: reverse z and look at the branches of
        // positive valuation
        MultiPoly rev(g.vars(), g.tower());
        for (auto& [e, c] : g.terms()) {
            std::vector<int> e2 = e;
            e2[zvar] = dz - e[zvar];
            MultiPoly one(g.vars(), g.tower());
            one.set_term(e2, c);
            rev = rev + one;
        }
        PuiseuxResult pr =
            puiseux_univariate(rev, zvar, uvar, 4, caps.ramification, caps, rng.split());
        for (auto& b : pr.branches) {
            if (b.series.known_zero() || b.series.valuation() > 0) {
                if (b.e >= 2) return true;
            }
        }
        // several infinite branches with identical truncated series would be a
        // collision; their count equals dz - dzf
        int esc = 0;
        for (auto& b : pr.branches)
            if (b.series.known_zero() || b.series.valuation() > 0) ++esc;
        FORGE_CHECK(esc == dz - dzf, "escaping branch count mismatch");
    }
    return false;
}

}  // namespace

BranchLocus branch_points(const MultiPoly& f, int zvar, int xvar, int tvar, int height,
                          const Caps& caps, Rng rng) {
    FORGE_CHECK(f.degree(zvar) >= 2, "covering degree must be at least two");
    MultiPoly disc = resultant(f, f.derivative(zvar), zvar);
    if (disc.is_zero()) throw input_error("discriminant vanishes: polynomial not separable");
    int tc = disc.content_exponent(tvar);
    if (tc > 0) disc = disc.shift_var_exp(tvar, -tc);
    int xc = disc.content_exponent(xvar);
    if (xc > 0) disc = disc.shift_var_exp(xvar, -xc);
    disc = radical_in(disc, xvar);
    // spurious candidates where the leading z-coefficient vanishes are kept
    // only if genuinely ramified; with x-content divided out the candidate
    // x = 0 is re-added below when needed
    MultiPoly lc = f.coeff_of(zvar, f.degree(zvar));

    BranchLocus out;
    out.tower = f.tower();
    std::vector<TSeries> finite_series;
    int dx = disc.degree(xvar);
    PuiseuxResult pr;
    pr.global_ram = 1;
    if (dx > 0) {
        pr = puiseux_univariate(disc, xvar, tvar, height, caps.ramification, caps, rng.split());
        out.tower = pr.tower;
        out.rescale = pr.global_ram;
        FORGE_CHECK(static_cast<int>(pr.branches.size()) == dx,
                    "discriminant roots not all integral over the uniformizer");
    }
    Rng r2 = rng.split();
    for (auto& b : pr.branches) {
        // filter: honest branch points have colliding finite roots unless the
        // leading coefficient vanishes along them
        bool keep = true;
        if (!lc.is_constant()) {
            // rational-constant candidate: exact local check; otherwise the
            // leading coefficient cannot vanish on a transcendental series
            if (b.series.known_zero()) {
                // x_P = 0 exactly: local model g(z, x) at x -> 0
                keep = ramified_over_local(f, zvar, xvar, caps, r2);
            }
        }
        if (keep) {
            BranchPoint p;
            p.index = static_cast<int>(out.points.size());
            p.x_series = b.series;
            out.points.push_back(std::move(p));
        }
    }
    // did we drop x = 0 by dividing the x-content out of the discriminant?
    if (xc > 0) {
        bool have_zero = false;
        for (auto& p : out.points)
            if (!p.at_infinity && p.x_series.known_zero()) have_zero = true;
        if (!have_zero && ramified_over_local(f, zvar, xvar, caps, r2)) {
            BranchPoint p;
            p.index = static_cast<int>(out.points.size());
            p.x_series = TSeries(out.tower, TSeries::EXACT);
            out.points.push_back(std::move(p));
        }
    }

    // infinity: flip the coordinate and check ramification over x' = 0
    {
        int D = f.degree(xvar);
        MultiPoly ff(f.vars(), f.tower());
        for (auto& [e, c] : f.terms()) {
            std::vector<int> e2 = e;
            e2[xvar] = D - e[xvar];
            MultiPoly one(f.vars(), f.tower());
            one.set_term(e2, c);
            ff = ff + one;
        }
        int cc = ff.content_exponent(xvar);
        if (cc > 0) ff = ff.shift_var_exp(xvar, -cc);
        if (ramified_over_local(ff, zvar, xvar, caps, r2)) {
            BranchPoint p;
            p.index = static_cast<int>(out.points.size());
            p.at_infinity = true;
            p.x_series = TSeries(out.tower, TSeries::EXACT);
            out.points.push_back(std::move(p));
        }
    }

    for (auto& p : out.points) {
        TSeries one = TSeries::constant(out.tower, Elem(out.tower, Rational(1)));
        if (p.at_infinity) {
            p.U = one;
            p.V = TSeries(out.tower, TSeries::EXACT);
            continue;
        }
        TSeries x = p.x_series.lifted(out.tower);
        p.x_series = x;
        if (x.known_zero() || x.valuation() >= 0) {
            p.U = x;
            p.V = one;
        } else {
            p.U = one;
            p.V = x.inverse();
        }
    }
    return out;
}

ValuationMatrix plucker_matrix(const BranchLocus& locus) {
    int n = static_cast<int>(locus.points.size());
    ValuationMatrix M;
    M.a.assign(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            TSeries d = locus.points[i].U * locus.points[j].V -
                        locus.points[j].U * locus.points[i].V;
            if (d.known_zero())
                throw invariant_error(
                    "truncation insufficient: two branch points indistinguishable");
            int v = d.valuation();
            FORGE_CHECK(v < d.trunc(), "truncation insufficient for pairwise valuation");
            M.a[i][j] = M.a[j][i] = Rational(static_cast<long>(v));
        }
    return M;
}

Elem direction_residue(const TSeries& series, const ClusterNode& at) {
    TSeries d = series - at.center;
    if (d.known_zero()) return Elem(series.tower());
    FORGE_CHECK(d.valuation() >= at.depth, "point escapes its cluster ball");
    return d.at(at.depth);
}

ClusterTree cluster_tree(const ValuationMatrix& A, const BranchLocus& locus) {
    int n = A.size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                Rational x = A.a[i][j], y = A.a[i][k], z = A.a[j][k];
                Rational mn = x;
                if (y < mn) mn = y;
                if (z < mn) mn = z;
                int cnt = (x == mn) + (y == mn) + (z == mn);
                if (cnt < 2)
                    throw input_error("tree condition violated for triple (" + std::to_string(i) +
                                      "," + std::to_string(j) + "," + std::to_string(k) + ")");
            }

    ClusterTree tree;
    tree.tower = locus.tower;
    tree.rescale = locus.rescale;
    tree.leaf_node.assign(n, -1);
    tree.leaf_series.assign(n, TSeries(locus.tower, TSeries::EXACT));

    struct Member {
        int idx;
        TSeries ser;  // in the current subtree coordinate
    };

    std::function<void(std::vector<Member>, int, int, bool)> build =
        [&](std::vector<Member> members, int parent, int depth, bool flipped) {
            int node_id = static_cast<int>(tree.nodes.size());
            ClusterNode nd;
            nd.parent = parent;
            nd.depth = depth;
            nd.flipped = flipped;
            nd.center = members[0].ser.truncated(depth);
            tree.nodes.push_back(nd);
            if (parent >= 0) tree.nodes[parent].children.push_back(node_id);

            auto dist = [&](const Member& a, const Member& b) -> long {
                TSeries d = a.ser - b.ser;
                FORGE_CHECK(!d.known_zero(), "indistinguishable points in cluster recursion");
                return d.valuation();
            };
            int m = static_cast<int>(members.size());
            std::vector<int> comp(m);
            std::iota(comp.begin(), comp.end(), 0);
            std::function<int(int)> find = [&](int x) {
                while (comp[x] != x) x = comp[x] = comp[comp[x]];
                return x;
            };
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    if (dist(members[i], members[j]) > depth) comp[find(j)] = find(i);
            std::map<int, std::vector<int>> classes;
            for (int i = 0; i < m; ++i) classes[find(i)].push_back(i);
            for (auto& [root, cls] : classes) {
                if (cls.size() == 1) {
                    const Member& mem = members[cls[0]];
                    tree.nodes[node_id].legs.push_back(mem.idx);
                    tree.leaf_node[mem.idx] = node_id;
                    tree.leaf_series[mem.idx] = mem.ser;
                    continue;
                }
                long h = -1;
                std::vector<Member> sub;
                for (int i : cls) sub.push_back(members[i]);
                for (size_t i = 0; i < sub.size(); ++i)
                    for (size_t j = i + 1; j < sub.size(); ++j) {
                        long d = dist(sub[i], sub[j]);
                        if (h < 0 || d < h) h = d;
                    }
                FORGE_CHECK(h > depth, "child cluster not strictly deeper");
                build(std::move(sub), node_id, static_cast<int>(h), flipped);
            }
        };

    // root split via the homogeneous matrix; the infinity-direction class
    // continues in the flipped coordinate
    {
        std::vector<int> comp(n);
        std::iota(comp.begin(), comp.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (comp[x] != x) x = comp[x] = comp[comp[x]];
            return x;
        };
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (A.a[i][j] > Rational(0)) comp[find(j)] = find(i);
        std::map<int, std::vector<int>> classes;
        for (int i = 0; i < n; ++i) classes[find(i)].push_back(i);

        // root node
        ClusterNode nd;
        nd.parent = -1;
        nd.depth = 0;
        nd.flipped = false;
        nd.center = TSeries(locus.tower, TSeries::EXACT);
        tree.nodes.push_back(nd);

        for (auto& [root, cls] : classes) {
            bool inf_dir = false;
            for (int i : cls) {
                const auto& p = locus.points[i];
                if (p.at_infinity || (!p.x_series.known_zero() && p.x_series.valuation() < 0))
                    inf_dir = true;
            }
            std::vector<Member> sub;
            for (int i : cls) {
                const auto& p = locus.points[i];
                TSeries ser =
                    inf_dir ? (p.at_infinity ? TSeries(locus.tower, TSeries::EXACT)
                                             : p.x_series.inverse())
                            : p.x_series;
                sub.push_back({i, ser.lifted(locus.tower)});
            }
            if (cls.size() == 1) {
                tree.nodes[0].legs.push_back(cls[0]);
                tree.leaf_node[cls[0]] = 0;
                tree.leaf_series[cls[0]] = sub[0].ser;
                continue;
            }
            long h = -1;
            for (size_t i = 0; i < sub.size(); ++i)
                for (size_t j = i + 1; j < sub.size(); ++j) {
                    TSeries d = sub[i].ser - sub[j].ser;
                    FORGE_CHECK(!d.known_zero(), "indistinguishable points at the root split");
                    long v = d.valuation();
                    if (h < 0 || v < h) h = v;
                }
            FORGE_CHECK(h > 0, "root child cluster not strictly deeper");
            build(std::move(sub), 0, static_cast<int>(h), inf_dir);
        }
    }

    // contract valence-two legless interior nodes (the root always stays)
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 1; i < tree.nodes.size(); ++i) {
            ClusterNode& nd = tree.nodes[i];
            if (nd.parent < 0) continue;
            if (nd.legs.empty() && nd.children.size() == 1) {
                int child = nd.children[0];
                int parent = nd.parent;
                auto& pc = tree.nodes[parent].children;
                std::replace(pc.begin(), pc.end(), static_cast<int>(i), child);
                tree.nodes[child].parent = parent;
                nd.parent = -2;
                nd.children.clear();
                changed = true;
            }
        }
    }
    std::vector<int> remap(tree.nodes.size(), -1);
    std::vector<ClusterNode> keep;
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
        if (tree.nodes[i].parent == -2) continue;
        remap[i] = static_cast<int>(keep.size());
        keep.push_back(tree.nodes[i]);
    }
    for (auto& nd : keep) {
        if (nd.parent >= 0) nd.parent = remap[nd.parent];
        for (auto& c : nd.children) c = remap[c];
    }
    for (auto& ln : tree.leaf_node) ln = remap[ln];
    tree.nodes = std::move(keep);
    return tree;
}

std::vector<AnnulusChart> annulus_charts(const ClusterTree& tree) {
    std::vector<AnnulusChart> out;
    QPoly xi = QPoly::var(1, 0);
    for (size_t c = 1; c < tree.nodes.size(); ++c) {
        const ClusterNode& child = tree.nodes[c];
        if (child.parent < 0) continue;
        const ClusterNode& parent = tree.nodes[child.parent];
        AnnulusChart ch;
        ch.child = static_cast<int>(c);
        ch.flipped = child.flipped;
        ch.center = child.center;
        bool boundary = parent.flipped != child.flipped;  // infinity direction at the root
        ch.a = boundary ? 0 : parent.depth;
        ch.b = child.depth;
        ch.m = ch.b - ch.a;
        FORGE_CHECK(ch.m >= 1, "annulus of nonpositive length");
        // deep end: residue^m = 1/xi_child
        ch.deep.moebius = QRat(QPoly(1, Rational(1)), xi);
        ch.deep.shift = Elem(tree.tower);
        // shallow end: residue^m = xi_parent - direction, through the flip
        // boundary it reads 1/xi_root (the direction constant is zero there)
        if (boundary) {
            ch.shallow.moebius = QRat(QPoly(1, Rational(1)), xi);
            ch.shallow.shift = Elem(tree.tower);
        } else {
            ch.shallow.moebius = QRat(xi);
            ch.shallow.shift = direction_residue(child.center, parent);
        }
        out.push_back(std::move(ch));
    }
    return out;
}

RegularChart kummer_regularize(const MultiPoly& f, int zvar, int xvar, int tvar,
                               const AnnulusChart& chart, const ClusterTree& tree,
                               std::optional<int> residue_char) {
    if (residue_char && *residue_char > 1 && chart.m % *residue_char == 0)
        throw tameness_error("Kummer degree divisible by the declared residue characteristic");
    VarCtx cv = make_vars({"z", "x1", "x2"});
    TowerPtr T = tree.tower;
    MultiPoly x1 = MultiPoly::var(cv, T, 1), x2 = MultiPoly::var(cv, T, 2);
    MultiPoly s = x1 * x2;
    MultiPoly cpoly(cv, T);
    for (auto& [k, coeff] : chart.center.coeffs()) cpoly = cpoly + s.pow(k).scale(coeff);
    MultiPoly coord = cpoly + s.pow(chart.a) * x1.pow(chart.m);

    RationalFunction xbind =
        chart.flipped
            ? RationalFunction(MultiPoly::constant(cv, T, Rational(1))) / RationalFunction(coord)
            : RationalFunction(coord);
    RationalFunction tbind(s.pow(tree.rescale));

    RationalFunction acc{MultiPoly(cv, T)};
    for (auto& [e, c] : f.terms()) {
        for (size_t i = 0; i < e.size(); ++i)
            FORGE_CHECK(static_cast<int>(i) == zvar || static_cast<int>(i) == xvar ||
                            static_cast<int>(i) == tvar || e[i] == 0,
                        "stray variable in skeleton polynomial");
        RationalFunction term{MultiPoly(cv, c.lifted(T))};
        if (e[zvar]) term = term * RationalFunction(MultiPoly::var(cv, T, 0)).pow(e[zvar]);
        if (e[xvar]) term = term * xbind.pow(e[xvar]);
        if (e[tvar]) term = term * tbind.pow(e[tvar]);
        acc = acc + term;
    }
    RegularChart out;
    out.vars = cv;
    out.m = chart.m;
    out.rescale = tree.rescale;
    out.unit = acc.den();
    out.f = acc.num();
    for (int v : {1, 2}) {
        int ce = out.f.is_zero() ? 0 : out.f.content_exponent(v);
        if (ce > 0) {
            out.f = out.f.shift_var_exp(v, -ce);
            out.unit = out.unit * MultiPoly::var(cv, T, v, ce);
        }
    }
    return out;
}

}  // namespace forge
