#pragma once

#include "q3/ffield.hpp"
#include "q3/padic.hpp"
#include "q3/valrational.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace q3 {

class Tower;
class TElem;
using TowerPtr = std::shared_ptr<const Tower>;
/// Coefficients on the power basis, lowest level least significant.
using Flat = std::vector<Z3>;

/// One simple extension L_i = L_{i-1}[x]/(phi_i), with phi_i certified
/// irreducible by a single Newton slope and an irreducible residual.
struct Step {
    std::string label;
    int d = 1;
    int e = 1;
    int f = 1;
    ValRational lambda;  // v(theta_i)
    std::vector<Flat> p;  // phi_i = x^d + p_{d-1} x^{d-1} + ... + p_0, exact
    Flat g;               // exact monomial of valuation e*lambda in L_{i-1}
    FFPtr res;            // residue field of L_i
    FElem rho;            // residue of theta^e / g
};

/// Finite extension of Q_3 given as a tower of simple extensions.
class Tower : public std::enable_shared_from_this<Tower> {
public:
    static TowerPtr base();

    /// Extension by a monic polynomial with exact coefficients in this tower.
    /// Returns nullptr when the polynomial is not certified irreducible in
    /// single-slope form.
    static TowerPtr extend(const TowerPtr& parent, const std::vector<TElem>& low_coeffs,
                           const std::string& label);
    /// Unramified extension by the lift of an irreducible residue polynomial.
    static TowerPtr adjoin_unramified(const TowerPtr& parent, const FPoly& phi, const std::string& label);
    /// Totally ramified extension x^e = g * u with g an exact monomial and u an exact unit.
    static TowerPtr adjoin_ramified(const TowerPtr& parent, int e, const TElem& g, const TElem& u,
                                    const std::string& label);

    int levels() const { return static_cast<int>(steps_.size()); }
    int degree() const { return dims_.back(); }
    int dim(int level) const { return dims_[level]; }
    long ram_index() const { return eprod_.back(); }
    long ram_index(int level) const { return eprod_[level]; }
    int res_degree() const { return residue_field()->degree(); }
    const Step& step(int level) const { return *steps_[level - 1]; }
    const FFPtr& residue_field() const;
    const TowerPtr& parent() const { return parent_; }
    TowerPtr prefix(int level) const;
    /// Valuation of basis element idx, times the ramification index.
    long wE(int idx) const { return wE_[idx]; }
    ValRational basis_val(int idx) const { return ValRational(wE_[idx], eprod_.back()); }
    bool is_prefix_of(const Tower& other) const;
    std::string describe() const;

    /// Product of two level-`level` elements stored as flat arrays.
    void mul_flat(int level, const Z3* a, const Z3* b, Z3* out) const;

    /// theta_level^{-1} with absolute precision at least about W.
    TElem theta_inverse(int level, long W) const;

private:
    Tower() = default;
    static TowerPtr make_child(const TowerPtr& parent, std::shared_ptr<Step> step);

    TowerPtr parent_;
    std::vector<std::shared_ptr<const Step>> steps_;
    std::vector<int> dims_{1};
    std::vector<long> eprod_{1};
    std::vector<long> wE_{0};

    mutable std::mutex cache_mu_;
    mutable std::map<int, std::pair<long, std::shared_ptr<TElem>>> inv_cache_;
};

/// Approximate element of a tower: representative plus an absolute guarantee
/// N meaning the true value differs from the representative by valuation >= N.
class TElem {
public:
    TElem() = default;
    explicit TElem(TowerPtr t);

    static TElem from_int(const TowerPtr& t, long n);
    static TElem from_mpz(const TowerPtr& t, const mpz_class& n);
    static TElem from_mpq(const TowerPtr& t, const mpq_class& q, long W);
    static TElem from_z3(const TowerPtr& t, const Z3& a);
    /// theta_level placed in the tower t.
    static TElem gen(const TowerPtr& t, int level);
    /// Exact monomial of valuation w; throws if w is outside the value group.
    static TElem monomial(const TowerPtr& t, const ValRational& w);
    /// Exact lift of a residue.
    static TElem lift(const TowerPtr& t, const FElem& r);

    const TowerPtr& tower() const { return tower_; }
    const Flat& coeffs() const { return c_; }
    Flat& coeffs_mut() { return c_; }
    const ValRational& guarantee() const { return N_; }

    bool valid() const { return static_cast<bool>(tower_); }
    bool rep_is_zero() const;
    ValRational rep_val() const;
    ValRational lb() const { return vmin(rep_val(), N_); }
    bool certified() const { return rep_val() < N_ || (N_.is_inf()); }
    bool is_exact() const { return N_.is_inf(); }
    /// Certified valuation; throws PrecisionExhausted when rep_val >= N.
    ValRational val() const;
    /// Residue of an element with valuation >= 0.
    FElem residue() const;

    TElem promote(const TowerPtr& t) const;
    TElem with_guarantee(const ValRational& n) const;
    void set_guarantee(const ValRational& n);
    void truncate();

    TElem operator-() const;
    TElem& operator+=(const TElem& o);
    TElem& operator-=(const TElem& o);
    friend TElem operator+(TElem a, const TElem& b) { return a += b; }
    friend TElem operator-(TElem a, const TElem& b) { return a -= b; }
    friend TElem operator*(const TElem& a, const TElem& b);
    TElem& operator*=(const TElem& o) { return *this = *this * o; }

    TElem mul_z3(const Z3& s) const;
    /// Multiplies by 3^k exactly.
    TElem shift(long k) const;
    TElem pow(unsigned long n) const;
    TElem inverse(long W) const;
    /// True when the element lies in Q_3 (only the first coordinate is used).
    bool is_scalar() const;

    std::string str() const;

private:
    TowerPtr tower_;
    Flat c_;
    ValRational N_ = ValRational::infinity();
};

/// Brings two elements to a common tower (one must contain the other).
TowerPtr common_tower(const TowerPtr& a, const TowerPtr& b);

}  // namespace q3
