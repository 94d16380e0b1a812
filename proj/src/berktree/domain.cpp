#include "q3/berktree.hpp"
#include "q3/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace q3 {

// ---------------------------------------------------------------- centers

CenterSet::CenterSet(FieldPtr K, long W) : K_(std::move(K)), W_(W) {
    base_ = K_->completion();
    Center x;
    x.name = "x";
    x.chi = {TElem(base_), TElem::from_int(base_, 1)};
    x.root = TElem(base_);
    x.exact = kpoly::x(*K_);
    x.theta = Theta(1, {});
    cs_.push_back(std::move(x));
}

int CenterSet::add(const TPoly& chi, const TElem& root, const std::string& name, std::optional<KPoly> exact) {
    int d = tpoly::degree(chi);
    for (int j = 0; j < size(); ++j) {
        if (cs_[j].degree() != d) continue;
        TElem v = tpoly::eval(cs_[j].chi, root);
        if (!v.certified() || (v.is_exact() && v.rep_is_zero())) {
            if (exact && !cs_[j].exact) cs_[j].exact = exact;
            return j;
        }
    }
    Center c;
    c.name = name;
    c.chi = chi;
    c.root = root;
    c.exact = std::move(exact);
    c.theta = d == 1 ? Theta(1, {}) : Theta(d, root_distances(chi, root));
    cs_.push_back(std::move(c));
    return size() - 1;
}

int CenterSet::add_rational(const KElem& a, const std::string& name) {
    TElem r = K_->embed(a, base_, W_);
    TPoly chi{-r, TElem::from_int(base_, 1)};
    KPoly ex{K_->neg(a), K_->one()};
    kpoly::trim(*K_, ex);
    return add(chi, r, name, ex);
}

const std::vector<ValRational>& CenterSet::distances(int i, int j) const {
    auto key = std::make_pair(i, j);
    auto it = dist_.find(key);
    if (it != dist_.end()) return it->second;
    std::vector<ValRational> d;
    if (i == j) {
        d = cs_[i].theta.distances();
        d.push_back(ValRational::infinity());
    } else {
        d = distances_to_roots(cs_[j].chi, cs_[i].root);
        if (!d.empty() && d.back().is_inf()) throw PrecisionExhausted("distinct centers not separated");
    }
    return dist_.emplace(key, std::move(d)).first->second;
}

ValRational CenterSet::dist(int i, int j) const {
    if (i == j) return ValRational::infinity();
    // the maximum is symmetric; shift the cheaper polynomial
    auto cost = [&](int a, int b) {
        long n = cs_[b].degree();
        return n * n * static_cast<long>(cs_[a].root.tower()->degree());
    };
    const auto& d = cost(i, j) <= cost(j, i) ? distances(i, j) : distances(j, i);
    return d.empty() ? ValRational::infinity() : d.back();
}

ValRational CenterSet::value(int i, int j, const ValRational& r) const {
    ValRational s(0);
    for (const auto& d : distances(i, j)) s += vmin(r, d);
    return s;
}

// ---------------------------------------------------------------- discoids

std::string Discoid::str(const CenterSet& cs, bool open) const {
    return std::string(open ? "D°[" : "D[") + cs[c].name + ", " + psi_radius(cs).str() + "]";
}

bool Component::is_infinity_disk(const CenterSet& cs) const {
    return whole && holes.size() == 1 && cs[holes[0].c].degree() == 1 && cs[holes[0].c].exact.has_value();
}

std::string Component::str(const CenterSet& cs) const {
    std::string s;
    if (is_infinity_disk(cs)) {
        const Discoid& h = holes[0];
        std::string den = cs[h.c].name == "x" ? "x" : "(" + cs[h.c].name + ")";
        return "D[1/" + den + ", " + (-h.r).str() + "]";
    }
    s = whole ? std::string("P1") : outer.str(cs);
    for (const auto& h : holes) s += " \\ " + h.str(cs, true);
    return s;
}

std::string DiscoidDomain::str(const CenterSet& cs) const {
    if (comps.empty()) return "{}";
    std::string s;
    for (size_t i = 0; i < comps.size(); ++i) s += (i ? " u " : "") + comps[i].str(cs);
    return s;
}

bool in_closed(const CenterSet& cs, const Discoid& d, int i, const ValRational& r) {
    return r >= d.r && cs.dist(i, d.c) >= d.r;
}

bool in_open(const CenterSet& cs, const Discoid& d, int i, const ValRational& r) {
    return r > d.r && cs.dist(i, d.c) > d.r;
}

bool contains(const CenterSet& cs, const Component& k, int i, const ValRational& r) {
    if (!k.whole && !in_closed(cs, k.outer, i, r)) return false;
    for (const auto& h : k.holes)
        if (in_open(cs, h, i, r)) return false;
    return true;
}

bool contains(const CenterSet& cs, const DiscoidDomain& d, int i, const ValRational& r) {
    for (const auto& k : d.comps)
        if (contains(cs, k, i, r)) return true;
    return false;
}

bool contains_infinity(const DiscoidDomain& d) {
    for (const auto& k : d.comps)
        if (k.whole) return true;
    return false;
}

// ---------------------------------------------------------------- trees

KTree::KTree(const CenterSet& cs, std::vector<int> leaves, std::vector<ValRational> radii)
    : cs_(cs), leaves_(std::move(leaves)) {
    std::sort(leaves_.begin(), leaves_.end());
    leaves_.erase(std::unique(leaves_.begin(), leaves_.end()), leaves_.end());
    for (const auto& r : radii)
        if (!r.is_inf()) R_.push_back(r);
    for (size_t a = 0; a < leaves_.size(); ++a)
        for (size_t b = a + 1; b < leaves_.size(); ++b) R_.push_back(cs.dist(leaves_[a], leaves_[b]));
    std::sort(R_.begin(), R_.end());
    R_.erase(std::unique(R_.begin(), R_.end()), R_.end());

    nodes_.push_back(Node{TreePoint{true, 0, ValRational(0)}, -1, {}, false});
    for (int i : leaves_) {
        int prev = 0;
        for (int k = 0; k <= static_cast<int>(R_.size()); ++k) {
            bool leaf = k == static_cast<int>(R_.size());
            ValRational r = leaf ? ValRational::infinity() : R_[k];
            int c = leaf ? i : canon(i, r);
            auto key = std::make_pair(c, leaf ? -1 : k);
            auto it = index_.find(key);
            int n;
            if (it == index_.end()) {
                n = static_cast<int>(nodes_.size());
                nodes_.push_back(Node{TreePoint{false, c, r}, prev, {}, leaf});
                nodes_[prev].children.push_back(n);
                index_[key] = n;
            } else {
                n = it->second;
            }
            prev = n;
        }
    }
}

int KTree::canon(int i, const ValRational& r) const {
    for (int j : leaves_)
        if (j == i || cs_.dist(i, j) >= r) return j;
    return i;
}

int KTree::node_at(int i, const ValRational& r) const {
    if (r.is_inf()) {
        auto it = index_.find({i, -1});
        return it == index_.end() ? -1 : it->second;
    }
    auto pos = std::lower_bound(R_.begin(), R_.end(), r);
    if (pos == R_.end() || *pos != r) return -1;
    auto it = index_.find({canon(i, r), static_cast<int>(pos - R_.begin())});
    return it == index_.end() ? -1 : it->second;
}

ValRational KTree::edge_sample(int n) const {
    const Node& a = nodes_[n];
    const Node& p = nodes_[a.parent];
    if (p.p.inf) return a.p.r.is_inf() ? ValRational(0) : a.p.r - ValRational(1);
    if (a.p.r.is_inf()) return p.p.r + ValRational(1);
    return (a.p.r + p.p.r) / ValRational(2);
}

DiscoidDomain KTree::extract(const Membership& m, bool inf_member) const {
    size_t n = nodes_.size();
    std::vector<char> in(n, 0), edge(n, 0);
    in[0] = inf_member;
    for (size_t k = 1; k < n; ++k) {
        in[k] = m(nodes_[k].p.c, nodes_[k].p.r);
        edge[k] = m(nodes_[k].p.c, edge_sample(static_cast<int>(k)));
    }
    // closure: both ends of a member edge are members
    for (size_t k = 1; k < n; ++k)
        if (edge[k]) in[k] = in[nodes_[k].parent] = 1;

    DiscoidDomain out;
    for (size_t k = 0; k < n; ++k) {
        if (!in[k] || (k > 0 && edge[k])) continue;  // not a top
        if (nodes_[k].leaf) continue;                 // isolated Type I point
        Component comp;
        if (k == 0) comp.whole = true;
        else comp.outer = Discoid{nodes_[k].p.c, nodes_[k].p.r};
        std::vector<int> stack{static_cast<int>(k)};
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            for (int q : nodes_[p].children) {
                if (edge[q]) stack.push_back(q);
                else comp.holes.push_back(Discoid{nodes_[q].p.c, nodes_[p].p.r});
            }
        }
        out.comps.push_back(std::move(comp));
    }
    return out;
}

void collect(const DiscoidDomain& d, std::vector<int>& centers, std::vector<ValRational>& radii) {
    for (const auto& k : d.comps) {
        if (!k.whole) {
            centers.push_back(k.outer.c);
            radii.push_back(k.outer.r);
        }
        for (const auto& h : k.holes) {
            centers.push_back(h.c);
            radii.push_back(h.r);
        }
    }
}

namespace {

int best_center(const CenterSet& cs, const Discoid& d, bool open) {
    int best = d.c;
    for (int k = 0; k < cs.size(); ++k) {
        if (cs[k].degree() > cs[best].degree()) continue;
        if (cs[k].degree() == cs[best].degree() && k >= best) continue;
        ValRational dk = cs.dist(k, d.c);
        if (open ? dk > d.r : dk >= d.r) best = k;
    }
    return best;
}

bool disc_less(const Discoid& a, const Discoid& b) {
    if (a.c != b.c) return a.c < b.c;
    return a.r < b.r;
}

DiscoidDomain combine_domains(const CenterSet& cs, const std::vector<const DiscoidDomain*>& ds,
                              const std::function<bool(const std::vector<bool>&)>& op) {
    std::vector<int> centers{0};
    std::vector<ValRational> radii;
    for (const auto* d : ds) collect(*d, centers, radii);
    KTree t(cs, centers, radii);
    auto m = [&](int i, const ValRational& r) {
        std::vector<bool> v;
        for (const auto* d : ds) v.push_back(contains(cs, *d, i, r));
        return op(v);
    };
    std::vector<bool> vi;
    for (const auto* d : ds) vi.push_back(contains_infinity(*d));
    DiscoidDomain out = t.extract(m, op(vi));
    rename_canonical(cs, out);
    return out;
}

}  // namespace

void rename_canonical(const CenterSet& cs, DiscoidDomain& d) {
    for (auto& k : d.comps) {
        if (!k.whole) k.outer.c = best_center(cs, k.outer, false);
        for (auto& h : k.holes) h.c = best_center(cs, h, true);
        std::sort(k.holes.begin(), k.holes.end(), disc_less);
    }
    std::sort(d.comps.begin(), d.comps.end(), [](const Component& a, const Component& b) {
        if (a.whole != b.whole) return a.whole;
        if (a.whole) return false;
        return disc_less(a.outer, b.outer);
    });
}

DiscoidDomain normalize(const CenterSet& cs, const DiscoidDomain& a) {
    return combine_domains(cs, {&a}, [](const std::vector<bool>& v) { return v[0]; });
}

DiscoidDomain unite(const CenterSet& cs, const DiscoidDomain& a, const DiscoidDomain& b) {
    return combine_domains(cs, {&a, &b}, [](const std::vector<bool>& v) { return v[0] || v[1]; });
}

DiscoidDomain intersect(const CenterSet& cs, const DiscoidDomain& a, const DiscoidDomain& b) {
    return combine_domains(cs, {&a, &b}, [](const std::vector<bool>& v) { return v[0] && v[1]; });
}

DiscoidDomain subtract(const CenterSet& cs, const DiscoidDomain& a, const DiscoidDomain& b) {
    return combine_domains(cs, {&a, &b}, [](const std::vector<bool>& v) { return v[0] && !v[1]; });
}

// ---------------------------------------------------------------- valuative functions

ValRational ValuativeFunction::eval(const CenterSet& cs, int i, const ValRational& r) const {
    if (zero) return ValRational::infinity();
    if (r.is_inf()) throw InvalidUse("ValuativeFunction::eval at a Type I point");
    ValRational s = unit_val;
    for (const auto& t : terms) {
        ValRational v = cs.value(i, t.c, r);
        s += t.mult >= 0 ? v * ValRational(t.mult) : -(v * ValRational(-t.mult));
    }
    return s;
}

void ValuativeFunction::add(const ValuativeFunction& o, int weight) {
    if (o.zero) {
        if (weight > 0) zero = true;
        else if (weight < 0) throw InvalidUse("valuative function: division by zero");
        return;
    }
    unit_val += weight >= 0 ? o.unit_val * ValRational(weight) : -(o.unit_val * ValRational(-weight));
    for (const auto& t : o.terms) {
        bool found = false;
        for (auto& s : terms)
            if (s.c == t.c) {
                s.mult += weight * t.mult;
                found = true;
            }
        if (!found) terms.push_back({t.c, weight * t.mult});
    }
    terms.erase(std::remove_if(terms.begin(), terms.end(), [](const LocalTerm& t) { return t.mult == 0; }),
                terms.end());
}

ValuativeFunction local_factorization(CenterSet& cs, const KPoly& f0, const std::string& prefix,
                                      const RootOptions& opt) {
    const InputField& K = *cs.field();
    ValuativeFunction h;
    KPoly f = f0;
    kpoly::trim(K, f);
    if (f.empty()) {
        h.zero = true;
        return h;
    }
    h.unit_val = K.val(f.back());
    f = kpoly::monic(K, f);
    // Yun's squarefree decomposition
    std::vector<KPoly> parts;
    if (kpoly::deg(f) > 0) {
        KPoly df = kpoly::derivative(K, f);
        KPoly a = kpoly::gcd(K, f, df);
        KPoly b = kpoly::exact_quo(K, f, a);
        KPoly c = kpoly::exact_quo(K, df, a);
        KPoly d = kpoly::sub(K, c, kpoly::derivative(K, b));
        while (kpoly::deg(b) > 0) {
            KPoly g = kpoly::monic(K, kpoly::gcd(K, b, d));
            parts.push_back(g);
            b = kpoly::exact_quo(K, b, g);
            c = kpoly::exact_quo(K, d, g);
            d = kpoly::sub(K, c, kpoly::derivative(K, b));
        }
    }
    int idx = 0;
    for (size_t m = 0; m < parts.size(); ++m) {
        if (kpoly::deg(parts[m]) < 1) continue;
        TPoly g = kpoly::embed(K, parts[m], cs.base(), opt.W);
        RootOptions o = opt;
        for (auto& lf : factor_completion(g, o)) {
            std::optional<KPoly> ex;
            if (tpoly::degree(lf.chi) == kpoly::deg(parts[m])) ex = parts[m];
            int c = cs.add(lf.chi, lf.root, prefix + "#" + std::to_string(++idx), ex);
            h.terms.push_back({c, static_cast<int>(m + 1)});
        }
    }
    return h;
}

DiscoidDomain domain_from_inequality(const CenterSet& cs, const ValuativeFunction& h) {
    DiscoidDomain whole;
    whole.comps.push_back(Component{true, {}, {}});
    if (h.zero) return whole;
    if (h.terms.empty()) return h.unit_val >= ValRational(0) ? whole : DiscoidDomain{};

    std::vector<int> leaves;
    for (const auto& t : h.terms) leaves.push_back(t.c);
    std::sort(leaves.begin(), leaves.end());
    leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());

    // profile of v(h) along each path, with its breakpoints and zero crossings
    std::map<int, PiecewiseAffine> prof;
    std::vector<ValRational> radii;
    for (int i : leaves) {
        PiecewiseAffine f = PiecewiseAffine::constant(h.unit_val);
        const PiecewiseAffine id = PiecewiseAffine::affine(ValRational(1), ValRational(0));
        for (const auto& t : h.terms) {
            PiecewiseAffine g = PiecewiseAffine::constant(ValRational(0));
            for (const auto& d : cs.distances(i, t.c)) {
                g = g + (d.is_inf() ? id : pa_min(id, PiecewiseAffine::constant(d)));
                if (!d.is_inf()) radii.push_back(d);
            }
            f = f + g.scale(ValRational(t.mult));
        }
        for (const auto& iv : f.where_ge(ValRational(0))) {
            if (iv.lo) radii.push_back(*iv.lo);
            if (!iv.hi.is_inf()) radii.push_back(iv.hi);
        }
        prof.emplace(i, std::move(f));
    }
    int degree = 0;
    for (const auto& t : h.terms) degree += t.mult * cs[t.c].degree();
    bool inf_member;
    if (degree != 0) inf_member = degree < 0;
    else inf_member = prof.begin()->second.intercepts().front() >= ValRational(0);

    KTree tree(cs, leaves, radii);
    auto m = [&](int i, const ValRational& r) {
        if (r.is_inf()) {
            int ord = 0;
            for (const auto& t : h.terms)
                if (t.c == i) ord += t.mult;
            if (ord != 0) return ord > 0;
            // no zero or pole at α_i: the profile is eventually constant
            const PiecewiseAffine& f = prof.at(i);
            return f.intercepts().back() >= ValRational(0);
        }
        return prof.at(i).eval(r) >= ValRational(0);
    };
    DiscoidDomain out = tree.extract(m, inf_member);
    rename_canonical(cs, out);
    return out;
}

// ---------------------------------------------------------------- spanned trees

SpannedTree span_tree(const CenterSet& cs, const std::vector<Discoid>& points) {
    std::vector<int> centers;
    std::vector<ValRational> radii;
    for (const auto& p : points) {
        centers.push_back(p.c);
        radii.push_back(p.r);
    }
    KTree t(cs, centers, radii);
    const auto& N = t.nodes();
    std::vector<char> keep(N.size(), 0), marked(N.size(), 0);
    for (const auto& p : points) {
        int n = t.node_at(p.c, p.r);
        if (n < 0) throw InvalidUse("span_tree: point not on tree");
        marked[n] = 1;
        for (int a = n; a >= 0; a = N[a].parent) keep[a] = 1;
    }
    keep[0] = 1;
    // vertices: root, marked points, and branchings of the kept subtree
    std::vector<int> vid(N.size(), -1);
    SpannedTree out;
    for (size_t k = 0; k < N.size(); ++k) {
        if (!keep[k]) continue;
        int kids = 0;
        for (int q : N[k].children) kids += keep[q];
        if (k != 0 && !marked[k] && kids == 1) continue;
        SpannedTree::Vertex v;
        v.p = N[k].p;
        v.marked = marked[k];
        v.leaf = N[k].leaf;
        if (v.p.inf) v.label = "inf";
        else if (v.leaf) v.label = cs[v.p.c].name;
        else {
            Discoid d{v.p.c, v.p.r};
            d.c = best_center(cs, d, false);
            v.p.c = d.c;
            v.label = d.str(cs);
        }
        vid[k] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(v);
    }
    for (size_t k = 1; k < N.size(); ++k) {
        if (vid[k] < 0) continue;
        int a = N[k].parent;
        while (vid[a] < 0) a = N[a].parent;
        out.vertices[vid[k]].parent = vid[a];
    }
    return out;
}

std::string to_dot(const CenterSet& cs, const SpannedTree& t) {
    (void)cs;
    std::ostringstream os;
    os << "digraph tree {\n  rankdir=TB;\n";
    for (size_t k = 0; k < t.vertices.size(); ++k) {
        const auto& v = t.vertices[k];
        os << "  v" << k << " [label=\"" << v.label << "\"";
        if (v.leaf) os << ", shape=point";
        else if (v.marked) os << ", shape=box";
        os << "];\n";
    }
    for (size_t k = 0; k < t.vertices.size(); ++k) {
        const auto& v = t.vertices[k];
        if (v.parent < 0) continue;
        os << "  v" << v.parent << " -> v" << k;
        auto it = t.edge_style.find(static_cast<int>(k));
        if (it != t.edge_style.end() && it->second == "positive") os << " [color=red, penwidth=2]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace q3
