#ifndef FORGE_SERIES_HPP
#define FORGE_SERIES_HPP

#include <map>
#include <vector>

#include "multipoly.hpp"
#include "tower.hpp"

namespace forge {

// Truncated Laurent series in one formal variable over a tower. Coefficients
// with exponent >= trunc are unknown; EXACT marks polynomial data.
class TSeries {
  public:
    static constexpr int EXACT = 1 << 28;

    TSeries() = default;
    TSeries(TowerPtr t, int trunc) : tw_(std::move(t)), trunc_(trunc) {}
    static TSeries constant(const TowerPtr& t, const Elem& c, int trunc = EXACT);
    static TSeries monomial(const TowerPtr& t, const Elem& c, int k, int trunc = EXACT);

    const TowerPtr& tower() const { return tw_; }
    int trunc() const { return trunc_; }
    const std::map<int, Elem>& coeffs() const { return c_; }
    bool known_zero() const { return c_.empty(); }

    Elem at(int k) const;            // 0 when absent; throws past truncation
    void set(int k, const Elem& c);
    // valuation: smallest exponent with nonzero coefficient; a series with no
    // visible terms reports its truncation bound
    int valuation() const { return c_.empty() ? trunc_ : c_.begin()->first; }

    TSeries operator-() const;
    TSeries operator+(const TSeries& o) const;
    TSeries operator-(const TSeries& o) const;
    TSeries operator*(const TSeries& o) const;
    // leading coefficient must be invertible; want_terms controls the
    // window produced for exact inputs
    TSeries inverse(int want_terms = 96) const;
    TSeries operator/(const TSeries& o) const { return *this * o.inverse(); }

    TSeries truncated(int n) const;     // forget terms at exponent >= n
    TSeries shifted(int k) const;       // multiply by s^k
    TSeries scaled(const Elem& c) const;
    TSeries ramified(int q) const;      // substitute s -> s^q (exponents * q)
    TSeries lifted(const TowerPtr& big) const;
    // s -> zeta * s twist: coefficient at k gains zeta^k
    TSeries phase_twisted(const Elem& zeta) const;

    bool equal_mod(const TSeries& o, int n) const;
    std::string str(const std::string& var) const;

  private:
    TowerPtr tw_;
    std::map<int, Elem> c_;
    int trunc_ = EXACT;
};

// dense polynomial in one outer variable with truncated series coefficients
using SPoly = std::vector<TSeries>;

int spdeg(const SPoly& f);
SPoly sptrim(SPoly f);
SPoly spadd(const SPoly& a, const SPoly& b);
SPoly spsub(const SPoly& a, const SPoly& b);
SPoly spmul(const SPoly& a, const SPoly& b);
TSeries speval(const SPoly& f, const TSeries& x);
SPoly spderiv(const SPoly& f);
SPoly splift(const SPoly& f, const TowerPtr& big);
SPoly spshift_root(const SPoly& f, const TSeries& d);  // f(z + d)
SPoly spramify(const SPoly& f, int q);

// Multivariate truncated series: finitely many terms in the chart variables
// with tower coefficients, truncated per variable.
struct MSeries {
    VarCtx vars;
    TowerPtr tw;
    std::map<std::vector<int>, Elem, GrlexLess> c;
    std::vector<int> trunc;  // per variable bound (exclusive)

    void set(const std::vector<int>& e, const Elem& coeff);
    Elem at(const std::vector<int>& e) const;
    MSeries truncated(const std::vector<int>& bound) const;
    bool equal_mod(const MSeries& o, const std::vector<int>& bound) const;
    bool same_series(const MSeries& o) const;  // equal at common truncation
    MSeries lifted(const TowerPtr& big) const;
    std::string str() const;
    static int cmp(const MSeries& a, const MSeries& b);  // deterministic order
};

// expand one tower element as a Laurent series in parameter `pi`, lifting the
// remaining structure into `target` (same generators, parameter removed).
// The element's generators must not depend on the parameter.
TSeries elem_param_series(const Elem& x, int pi, const TowerPtr& target, int trunc);

}  // namespace forge

#endif
