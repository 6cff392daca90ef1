#include "poset.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace forge {

FinitePoset FinitePoset::from_relation(std::vector<std::string> labels,
                                       const std::function<bool(int, int)>& leq) {
    FinitePoset p;
    p.labels = std::move(labels);
    int n = p.size();
    p.le.assign(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p.le[i][j] = (i == j) || leq(i, j);
    p.validate();
    return p;
}

FinitePoset FinitePoset::from_covers(std::vector<std::string> labels,
                                     const std::vector<std::pair<int, int>>& covers) {
    FinitePoset p;
    p.labels = std::move(labels);
    int n = p.size();
    p.le.assign(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) p.le[i][i] = true;
    for (auto& [a, b] : covers) p.le[a][b] = true;
    // transitive closure
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (p.le[i][k])
                for (int j = 0; j < n; ++j)
                    if (p.le[k][j]) p.le[i][j] = true;
    p.validate();
    return p;
}

void FinitePoset::validate() const {
    int n = size();
    for (int i = 0; i < n; ++i) {
        FORGE_CHECK(le[i][i], "order not reflexive");
        for (int j = 0; j < n; ++j) {
            if (i != j && le[i][j] && le[j][i])
                throw invariant_error("cycle detected: order not antisymmetric");
            if (!le[i][j]) continue;
            for (int k = 0; k < n; ++k)
                if (le[j][k]) FORGE_CHECK(le[i][k], "order not transitive");
        }
    }
}

std::vector<std::pair<int, int>> hasse(const FinitePoset& p) {
    p.validate();
    std::vector<std::pair<int, int>> out;
    int n = p.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || !p.le[i][j]) continue;
            bool covered = true;
            for (int k = 0; k < n && covered; ++k)
                if (k != i && k != j && p.le[i][k] && p.le[k][j]) covered = false;
            if (covered) out.push_back({i, j});
        }
    return out;
}

int SimplicialComplex::dimension() const {
    int d = -1;
    for (auto& f : faces) d = std::max(d, static_cast<int>(f.size()) - 1);
    return d;
}

SimplicialComplex order_complex(const FinitePoset& p, int dim_cap) {
    p.validate();
    SimplicialComplex c;
    c.vertices = p.labels;
    int n = p.size();
    // chains by breadth-first extension
    std::vector<std::vector<int>> cur;
    for (int i = 0; i < n; ++i) cur.push_back({i});
    int dim = 0;
    while (!cur.empty()) {
        for (auto& f : cur) c.faces.push_back(f);
        if (dim >= dim_cap) {
            // ensure nothing longer exists before stopping
            for (auto& f : cur)
                for (int j = 0; j < n; ++j)
                    if (j != f.back() && p.le[f.back()][j])
                        throw cap_error("order complex dimension cap exceeded");
            break;
        }
        std::vector<std::vector<int>> next;
        for (auto& f : cur)
            for (int j = 0; j < n; ++j) {
                if (j == f.back() || !p.le[f.back()][j]) continue;
                auto g = f;
                g.push_back(j);
                next.push_back(g);
            }
        cur = std::move(next);
        ++dim;
    }
    // canonical: sort each face's vertex set and the face list
    for (auto& f : c.faces) std::sort(f.begin(), f.end());
    std::sort(c.faces.begin(), c.faces.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    c.faces.erase(std::unique(c.faces.begin(), c.faces.end()), c.faces.end());
    return c;
}

namespace {

// exact rank over Q by fraction-free elimination
long matrix_rank(std::vector<std::vector<Rational>> m) {
    long rank = 0;
    size_t rows = m.size();
    if (rows == 0) return 0;
    size_t cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && m[piv][c].is_zero()) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        Rational inv = m[r][c].inv();
        for (size_t j = c; j < cols; ++j) m[r][j] = m[r][j] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c].is_zero()) continue;
            Rational f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
        }
        ++r;
        ++rank;
    }
    return rank;
}

}  // namespace

std::vector<long> homology_ranks(const SimplicialComplex& c, int dim_cap) {
    int dim = c.dimension();
    if (dim > dim_cap) throw cap_error("complex dimension cap exceeded");
    // faces by dimension, with index maps
    std::vector<std::vector<std::vector<int>>> byd(std::max(dim + 1, 1));
    for (auto& f : c.faces) byd[f.size() - 1].push_back(f);
    std::vector<std::map<std::vector<int>, int>> index(byd.size());
    for (size_t d = 0; d < byd.size(); ++d) {
        std::sort(byd[d].begin(), byd[d].end());
        for (size_t i = 0; i < byd[d].size(); ++i) index[d][byd[d][i]] = static_cast<int>(i);
    }
    // boundary ranks; include the augmentation map for reduced homology
    std::vector<long> ranks(byd.size() + 1, 0);  // ranks[d] = rank of d_d: C_d -> C_{d-1}
    if (!byd[0].empty()) ranks[0] = 1;           // augmentation C_0 -> Q
    for (size_t d = 1; d < byd.size(); ++d) {
        if (byd[d].empty() || byd[d - 1].empty()) continue;
        std::vector<std::vector<Rational>> m(byd[d - 1].size(),
                                             std::vector<Rational>(byd[d].size(), Rational(0)));
        for (size_t j = 0; j < byd[d].size(); ++j) {
            const auto& f = byd[d][j];
            int sign = 1;
            for (size_t k = 0; k < f.size(); ++k) {
                std::vector<int> g;
                for (size_t l = 0; l < f.size(); ++l)
                    if (l != k) g.push_back(f[l]);
                auto it = index[d - 1].find(g);
                FORGE_CHECK(it != index[d - 1].end(), "complex not downward closed");
                m[it->second][j] = Rational(sign);
                sign = -sign;
            }
        }
        ranks[d] = matrix_rank(std::move(m));
    }
    std::vector<long> betti(byd.size(), 0);
    for (size_t d = 0; d < byd.size(); ++d) {
        long dimC = static_cast<long>(byd[d].size());
        long lower = ranks[d];
        long upper = (d + 1 < ranks.size()) ? ranks[d + 1] : 0;
        betti[d] = dimC - lower - upper;
        FORGE_CHECK(betti[d] >= 0, "negative Betti rank");
    }
    return betti;
}

FinitePoset intersection_poset(const std::vector<std::string>& components,
                               const std::vector<IncidencePoint>& points) {
    std::vector<std::string> labels = components;
    for (auto& p : points) {
        labels.push_back(p.label);
        for (int ci : p.components)
            FORGE_CHECK(ci >= 0 && ci < static_cast<int>(components.size()),
                        "incidence references a missing component");
    }
    int nc = static_cast<int>(components.size());
    return FinitePoset::from_relation(labels, [&](int i, int j) {
        // component <= point when the point lies on the component
        if (i < nc && j >= nc) {
            const auto& p = points[j - nc];
            return std::find(p.components.begin(), p.components.end(), i) != p.components.end();
        }
        return false;
    });
}

int component_genus(int n, int g0, const std::vector<int>& ramification_indices) {
    long rhs = static_cast<long>(n) * (2 * g0 - 2);
    for (int e : ramification_indices) {
        FORGE_CHECK(e >= 1, "ramification index must be positive");
        rhs += e - 1;
    }
    if (rhs % 2 != 0 || rhs < -2)
        throw invariant_error("Riemann-Hurwitz bookkeeping inconsistent (2g-2 = " +
                              std::to_string(rhs) + ")");
    long g = (rhs + 2) / 2;
    if (g < 0) throw invariant_error("negative genus");
    return static_cast<int>(g);
}

// ---- covering containers ----

FinitePoset CoveringBasePoset::poset(int) const {
    std::vector<std::string> labels;
    for (auto& v : vertices) labels.push_back(v.name);
    int nv = static_cast<int>(vertices.size());
    for (auto& e : edges) labels.push_back(e.name);
    int ne = static_cast<int>(edges.size());
    for (auto& l : legs) labels.push_back(l.name);
    return FinitePoset::from_relation(labels, [&](int i, int j) {
        if (i < nv && j >= nv && j < nv + ne) {
            const auto& e = edges[j - nv];
            return e.x == i || e.y == i;
        }
        if (i < nv && j >= nv + ne) return legs[j - nv - ne].vertex == i;
        return false;
    });
}

void CoveringPoset::canonicalize() {
    auto key_v = [](const CoverVertex& v) { return std::make_pair(v.base, v.orbit); };
    std::vector<int> perm(vertices.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return key_v(vertices[a]) < key_v(vertices[b]); });
    std::vector<int> inv(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
    std::vector<CoverVertex> nv;
    for (int i : perm) nv.push_back(vertices[i]);
    vertices = std::move(nv);
    for (auto& e : edges) {
        e.vx = inv[e.vx];
        e.vy = inv[e.vy];
    }
    for (auto& l : legs) l.vertex = inv[l.vertex];
    std::sort(edges.begin(), edges.end(), [](const CoverEdge& a, const CoverEdge& b) {
        return std::tie(a.base, a.orbit) < std::tie(b.base, b.orbit);
    });
    std::sort(legs.begin(), legs.end(), [](const CoverLeg& a, const CoverLeg& b) {
        return std::tie(a.base, a.orbit) < std::tie(b.base, b.orbit);
    });
}

FinitePoset CoveringPoset::poset() const {
    std::vector<std::string> labels;
    auto orbit_str = [](const std::vector<int>& o) {
        std::string s = "{";
        for (size_t i = 0; i < o.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(o[i]);
        }
        return s + "}";
    };
    for (auto& v : vertices) labels.push_back(base.vertices[v.base].name + orbit_str(v.orbit));
    int nv = static_cast<int>(vertices.size());
    for (auto& e : edges) labels.push_back(base.edges[e.base].name + orbit_str(e.orbit));
    int ne = static_cast<int>(edges.size());
    for (auto& l : legs) labels.push_back(base.legs[l.base].name + orbit_str(l.orbit));
    return FinitePoset::from_relation(labels, [&](int i, int j) {
        if (i < nv && j >= nv && j < nv + ne) {
            const auto& e = edges[j - nv];
            return e.vx == i || e.vy == i;
        }
        if (i < nv && j >= nv + ne) return legs[j - nv - ne].vertex == i;
        return false;
    });
}

long CoveringPoset::components() const {
    std::vector<int> parent(vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto& e : edges) parent[find(e.vx)] = find(e.vy);
    long c = 0;
    for (size_t i = 0; i < parent.size(); ++i)
        if (find(static_cast<int>(i)) == static_cast<int>(i)) ++c;
    return c;
}

long CoveringPoset::betti1() const {
    return static_cast<long>(edges.size()) - static_cast<long>(vertices.size()) + components();
}

long CoveringPoset::total_genus() const {
    long g = 0;
    for (auto& v : vertices) g += v.genus;
    return g;
}

}  // namespace forge
