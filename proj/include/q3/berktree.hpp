#pragma once

#include "q3/field.hpp"
#include "q3/kpoly.hpp"
#include "q3/tpoly.hpp"
#include "q3/valrational.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace q3 {

/// Closed interval of Q ∪ {±∞}. An empty `lo` stands for −∞; `hi` may be +∞.
struct RInterval {
    std::optional<ValRational> lo;
    ValRational hi;
    bool contains(const ValRational& r) const { return (!lo || *lo <= r) && r <= hi; }
    std::string str() const;
};

bool intervals_contain(const std::vector<RInterval>& s, const ValRational& r);

/// Continuous piecewise-affine function on the whole rational line, or the
/// constant +∞. Piece i lives between breakpoints i-1 and i.
class PiecewiseAffine {
public:
    PiecewiseAffine() : slopes_{ValRational(0)}, icpts_{ValRational(0)} {}
    static PiecewiseAffine affine(const ValRational& slope, const ValRational& intercept);
    static PiecewiseAffine constant(const ValRational& c) { return affine(ValRational(0), c); }
    static PiecewiseAffine infinite();

    bool is_infinite() const { return inf_; }
    const std::vector<ValRational>& breakpoints() const { return bps_; }
    const std::vector<ValRational>& slopes() const { return slopes_; }
    const std::vector<ValRational>& intercepts() const { return icpts_; }

    /// Value at a finite r (infinity for the constant +∞).
    ValRational eval(const ValRational& r) const;
    /// Slope of the piece containing r (right-hand slope at breakpoints).
    ValRational slope_at(const ValRational& r) const;

    /// {r : f(r) >= c} and {r : f(r) <= c} as sorted disjoint closed intervals.
    std::vector<RInterval> where_ge(const ValRational& c) const;
    std::vector<RInterval> where_le(const ValRational& c) const;

    friend PiecewiseAffine pa_min(const PiecewiseAffine& a, const PiecewiseAffine& b);
    friend PiecewiseAffine pa_max(const PiecewiseAffine& a, const PiecewiseAffine& b);
    friend PiecewiseAffine operator+(const PiecewiseAffine& a, const PiecewiseAffine& b);
    PiecewiseAffine scale(const ValRational& q) const;
    /// f ∘ g for g weakly increasing.
    PiecewiseAffine compose(const PiecewiseAffine& g) const;

    std::string str() const;

private:
    friend PiecewiseAffine combine(const PiecewiseAffine&, const PiecewiseAffine&, int);
    void simplify();
    size_t piece(const ValRational& r) const;
    std::vector<ValRational> bps_;
    std::vector<ValRational> slopes_, icpts_;
    bool inf_ = false;
};

/// r ↦ min_i (v_i + i·r). Infinite v_i are skipped; all infinite gives +∞.
PiecewiseAffine gauss_profile(const std::vector<std::pair<int, ValRational>>& coeff_vals);
/// Gauss profile of the certified coefficients of f. Exact zeros and
/// uncertified coefficients are left out; `trust` receives the set of r where
/// no uncertified coefficient can reach the profile.
PiecewiseAffine gauss_profile(const TPoly& f, std::vector<RInterval>* trust = nullptr);

/// θ_ψ built from the distances of one root to the other roots of ψ.
class Theta {
public:
    Theta() = default;
    Theta(int degree, std::vector<ValRational> distances);

    int degree() const { return deg_; }
    const std::vector<ValRational>& distances() const { return d_; }
    /// Roots within distance >= r of the fixed root, itself included.
    int cluster(const ValRational& r) const;
    ValRational eval(const ValRational& r) const;
    ValRational inverse(const ValRational& s) const;
    PiecewiseAffine function() const;
    /// (number of geometric disks, geometric radius) of D[ψ, s].
    std::pair<int, ValRational> split(const ValRational& s) const;

private:
    int deg_ = 1;
    std::vector<ValRational> d_;  // sorted, finite
};

/// A closed point of the line over the completion: an irreducible polynomial
/// together with one of its roots.
struct Center {
    std::string name;
    TPoly chi;                   // monic over the completion
    TElem root;                  // a root of chi
    std::optional<KPoly> exact;  // set when chi is known exactly over K
    Theta theta;
    int degree() const { return tpoly::degree(chi); }
};

/// Registry of centers with cached mutual distances. Index 0 is always x.
class CenterSet {
public:
    explicit CenterSet(FieldPtr K, long W = 64);

    const FieldPtr& field() const { return K_; }
    const TowerPtr& base() const { return base_; }
    int size() const { return static_cast<int>(cs_.size()); }
    const Center& operator[](int i) const { return cs_[i]; }

    /// Adds chi with the given root; returns the index of an existing equal
    /// center when there is one (the stored name is kept).
    int add(const TPoly& chi, const TElem& root, const std::string& name,
            std::optional<KPoly> exact = std::nullopt);
    /// Center for an element of K (degree 1).
    int add_rational(const KElem& a, const std::string& name);
    void rename(int i, const std::string& name) { cs_[i].name = name; }

    /// Largest v(α_i − β) over the roots β of χ_j; +∞ when i == j.
    ValRational dist(int i, int j) const;
    /// v(α_i − β) over all roots β of χ_j, ascending (+∞ for β = α_i).
    const std::vector<ValRational>& distances(int i, int j) const;
    /// v_ξ(χ_j) at ξ = ξ_{α_i, r}; r = +∞ at the Type I point α_i.
    ValRational value(int i, int j, const ValRational& r) const;

private:
    FieldPtr K_;
    TowerPtr base_;
    long W_;
    std::vector<Center> cs_;
    mutable std::map<std::pair<int, int>, std::vector<ValRational>> dist_;
};
using CenterSetPtr = std::shared_ptr<CenterSet>;

/// D[α_c, r] in geometric radius; over K it is D[χ_c, θ_c(r)]. The open
/// variant is {v(x − α_c) > r} together with its conjugates.
struct Discoid {
    int c = 0;
    ValRational r;
    ValRational psi_radius(const CenterSet& cs) const { return cs[c].theta.eval(r); }
    std::string str(const CenterSet& cs, bool open = false) const;
};

/// Closed outer discoid (or the whole line) minus open holes.
struct Component {
    bool whole = false;
    Discoid outer;
    std::vector<Discoid> holes;
    /// A single hole around a K-rational point with a whole outer: D[1/(x−a), −r].
    bool is_infinity_disk(const CenterSet& cs) const;
    std::string str(const CenterSet& cs) const;
};

struct DiscoidDomain {
    std::vector<Component> comps;
    bool empty() const { return comps.empty(); }
    std::string str(const CenterSet& cs) const;
};

bool in_closed(const CenterSet& cs, const Discoid& d, int i, const ValRational& r);
bool in_open(const CenterSet& cs, const Discoid& d, int i, const ValRational& r);
/// Membership of ξ_{α_i, r}; r = +∞ gives the Type I point α_i.
bool contains(const CenterSet& cs, const Component& k, int i, const ValRational& r);
bool contains(const CenterSet& cs, const DiscoidDomain& d, int i, const ValRational& r);
bool contains_infinity(const DiscoidDomain& d);

/// Membership oracle on points ξ_{α_i, r}: finite r for Type II points,
/// r = +∞ for the Type I point α_i.
using Membership = std::function<bool(int i, const ValRational& r)>;

/// Point of the K-level tree: ξ_{α_c, r}, or ∞ when `inf` is set.
struct TreePoint {
    bool inf = false;
    int c = 0;
    ValRational r;
};

/// Tree spanned by a set of centers (as Type I leaves), extra radii and ∞.
/// Vertices sit at every merge radius and every extra radius on every path.
class KTree {
public:
    KTree(const CenterSet& cs, std::vector<int> leaves, std::vector<ValRational> radii);

    struct Node {
        TreePoint p;
        int parent = -1;             // -1 for the root ∞
        std::vector<int> children;
        bool leaf = false;           // Type I point
    };
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<int>& leaves() const { return leaves_; }
    /// Smallest leaf index whose path passes through ξ_{α_i, r}.
    int canon(int i, const ValRational& r) const;
    /// A radius strictly inside the edge from node n to its parent.
    ValRational edge_sample(int n) const;
    /// Node at ξ_{α_i, r} (r one of the tree radii, or +∞ for a leaf); -1 if absent.
    int node_at(int i, const ValRational& r) const;

    /// Components of the retraction preimage of the marked subset. The marking
    /// must be constant on open edges; off-tree directions follow their base point.
    DiscoidDomain extract(const Membership& m, bool inf_member) const;

private:
    const CenterSet& cs_;
    std::vector<int> leaves_;
    std::vector<ValRational> R_;
    std::vector<Node> nodes_;
    std::map<std::pair<int, int>, int> index_;  // (canonical leaf, radius slot) → node; slot -1 = leaf
};

/// Centers and radii occurring in a domain.
void collect(const DiscoidDomain& d, std::vector<int>& centers, std::vector<ValRational>& radii);

DiscoidDomain normalize(const CenterSet& cs, const DiscoidDomain& a);
DiscoidDomain unite(const CenterSet& cs, const DiscoidDomain& a, const DiscoidDomain& b);
DiscoidDomain intersect(const CenterSet& cs, const DiscoidDomain& a, const DiscoidDomain& b);
/// Closure of a \ b.
DiscoidDomain subtract(const CenterSet& cs, const DiscoidDomain& a, const DiscoidDomain& b);

/// Replaces every discoid by the same set named with the center of least degree.
void rename_canonical(const CenterSet& cs, DiscoidDomain& d);

/// One factor of a polynomial over the completion: a registered center and
/// its multiplicity.
struct LocalTerm {
    int c;
    int mult;
};

/// Valuative function ξ ↦ v_ξ(h) of h = u · ∏ χ_c^{mult} with v(u) = `unit_val`.
struct ValuativeFunction {
    ValRational unit_val;
    std::vector<LocalTerm> terms;
    bool zero = false;  // h ≡ 0, valuation +∞
    /// v at ξ_{α_i, r}; r = +∞ at a Type I point.
    ValRational eval(const CenterSet& cs, int i, const ValRational& r) const;
    /// Sum with integer weight.
    void add(const ValuativeFunction& o, int weight);
};

/// Factors a polynomial over the completion, registering its factors.
ValuativeFunction local_factorization(CenterSet& cs, const KPoly& f, const std::string& name_prefix,
                                      const RootOptions& opt);

/// {ξ : v_ξ(h) >= 0}.
DiscoidDomain domain_from_inequality(const CenterSet& cs, const ValuativeFunction& h);

/// Rooted tree spanned by discoid boundaries and centers, with ∞ as root.
struct SpannedTree {
    struct Vertex {
        TreePoint p;
        int parent = -1;
        bool marked = false;  // one of the input points
        bool leaf = false;    // Type I point
        std::string label;
    };
    std::vector<Vertex> vertices;
    /// Optional edge annotation (vertex index → "positive"/"zero").
    std::map<int, std::string> edge_style;
};

/// Points are given as boundaries (c, r) with r finite, or Type I centers with r = +∞.
SpannedTree span_tree(const CenterSet& cs, const std::vector<Discoid>& points);
std::string to_dot(const CenterSet& cs, const SpannedTree& t);

}  // namespace q3
