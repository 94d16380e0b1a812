#pragma once

#include "q3/tower.hpp"

#include <optional>
#include <vector>

namespace q3 {

/// Polynomial with tower coefficients, lowest degree first.
using TPoly = std::vector<TElem>;

struct NPSegment {
    ValRational slope;  // valuation of the roots on this segment
    int length = 0;
    int i0 = 0;  // left end (lower degree)
    int i1 = 0;
};

struct NewtonPolygon {
    int zero_order = 0;  // exact zero roots stripped before the hull
    std::vector<NPSegment> segments;  // slopes strictly decreasing
};

/// Options shared by root searches.
struct RootOptions {
    long W = 64;             // working absolute precision
    int depth_cap = 3;       // nested refinement levels that extend the tower
    bool alt = false;        // reverse slope and residual-factor order
    std::string label = "a";
};

namespace tpoly {

TowerPtr tower_of(const TPoly& f);
TPoly promote(const TPoly& f, const TowerPtr& t);
TPoly from_ints(const TowerPtr& t, const std::vector<long>& c);
int degree(const TPoly& f);
TElem eval(const TPoly& f, const TElem& x);
TPoly derivative(const TPoly& f);
/// f(c + t)
TPoly taylor_shift(const TPoly& f, const TElem& c);
TPoly mul(const TPoly& a, const TPoly& b);
/// Remainder by a monic polynomial.
TPoly rem_monic(const TPoly& a, const TPoly& m);
void divrem_monic(const TPoly& a, const TPoly& m, TPoly& q, TPoly& r);
/// Drops the guarantee and keeps the representative as an exact value.
TElem exact_rep(const TElem& x, long W);

}  // namespace tpoly

NewtonPolygon newton_polygon(const TPoly& f);

/// One root from the selected branch, in an extension of the coefficient tower.
TElem adjoin_root(const TPoly& f, const RootOptions& opt);

/// One root per branch of the slope/residual search. Conjugate roots over
/// the coefficient tower are represented once per branch, but distinct
/// branches may still be conjugate in wild cases.
std::vector<TElem> branch_roots(const TPoly& f, const RootOptions& opt);

/// Newton iteration from an approximation satisfying the simple-root
/// Hensel condition.
TElem hensel_lift(const TPoly& f, const TElem& approx, const ValRational& target, long W);

/// Valuations v(x0 - a) over the other roots a of psi.
std::vector<ValRational> root_distances(const TPoly& psi, const TElem& x0);
/// v(x0 - b) over all roots b of chi, ascending; +inf for roots equal to x0.
std::vector<ValRational> distances_to_roots(const TPoly& chi, const TElem& x0);
/// Largest distance from x0 to a root of chi (skipping x0 itself if it is a root).
ValRational max_root_distance(const TPoly& chi, const TElem& x0);

/// Monic polynomial over `base` of least degree with a root b such that
/// v(alpha - b) >= r, built from the key polynomials of alpha (residue
/// extensions included). Throws PrecisionExhausted when alpha is too coarse.
TPoly minimal_center(const TElem& alpha, const TowerPtr& base, const ValRational& r, long W);

/// Minimal polynomial of alpha over the sub-tower `base`, with degree bounded by
/// max_deg; when `must_divide` is given the result is checked to divide it.
std::optional<TPoly> minpoly_over(const TElem& alpha, const TowerPtr& base, int max_deg,
                                  const TPoly* must_divide);

struct LocalFactor {
    TPoly chi;   // monic, coefficients in the base tower
    TElem root;  // a root of chi in some extension
};

/// Irreducible factorization over the completion the coefficients live in.
std::vector<LocalFactor> factor_completion(const TPoly& f, const RootOptions& opt);

}  // namespace q3
