#pragma once

#include "q3/berktree.hpp"
#include "q3/polyalg.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace q3 {

/// Homogeneous quartic Σ a_{ijk} x^i y^j z^k. Coefficients are listed for
/// i = 4..0 and, inside each i, j = 4-i..0 (so x^4, x^3y, x^3z, x^2y^2, ...).
struct TernaryQuartic {
    FieldPtr K;
    std::array<KElem, 15> a;
    static int index(int i, int j);
    const KElem& at(int i, int j) const { return a[index(i, j)]; }
};

struct NormalForm {
    QuarticCurve curve;
    /// (x, y, z)_old = M (x, y, z)_new, and F_new = F_old ∘ M / scale.
    std::array<std::array<KElem, 3>, 3> M;
    KElem scale;
    bool swapped = false;
    std::string description;
};

/// Moves the point to [0:1:0], kills the x y^3 term (or swaps x and z) and
/// dehomogenizes at z = 1.
NormalForm normal_form(const TernaryQuartic& q, const std::array<KElem, 3>& point);

/// Value of F_old at M·(x, y, 1) divided by the scale, for checking the map.
KElem ternary_eval(const TernaryQuartic& q, const std::array<KElem, 3>& p);

/// μ(x0) = max_{i>=1} (d̂0 − d̂i)/i for d_i the Taylor coefficients of Δ at x0;
/// +∞ when x0 is a root of Δ.
ValRational mu(const KPoly& delta, const InputField& K, const TElem& x0, long W);

struct DeltaProfile {
    PiecewiseAffine profile;       // δ on r ∈ (−∞, ∞)
    std::vector<RInterval> zero_set;
    std::vector<RInterval> trust;  // where the profile is certified
    InteriorTransform transform;
};

/// δ(ξ_r) = max{0, min{3/2, (3/2)v_r(A) − v_r(C)/2, (3/2)v_r(B) − v_r(C)}}.
DeltaProfile delta_from_transform(const InteriorTransform& it);
DeltaProfile delta_path(const QuarticCurve& C, const TElem& x0, const InteriorOptions& opt);

/// min{r >= mu : δ(ξ_r) = 0}, read off the zero set; +∞ when there is none.
/// PrecisionExhausted when that radius lies outside the trusted range.
ValRational lambda_of(const DeltaProfile& dp, const ValRational& mu);

struct TailData {
    ValRational lambda, mu;
    int genus = 0;
    std::vector<int> achieving;    // the k in {2,3,4} reaching λ
    TElem y0;
    /// b̄0, c̄2, c̄3, c̄4 up to units, when normalizable; coefficient vectors
    /// over the residue field (zero for the k that do not reach λ).
    std::vector<FElem> residues;
    FFPtr residue_field;
};

/// λ(x0) and the tail genus from the evaluated tail coefficients at p0 = (x0, y0).
/// Requires λ > μ, checked against the δ profile at x0 (InvalidUse otherwise).
TailData lambda_tail(const QuarticCurve& C, const TailTransform& tt, const KPoly& delta, const TElem& x0,
                     const InteriorOptions& opt);

/// The norms entering U: Nm(b0), Nm(c2), Nm(c3), Nm(c4).
struct UNorms {
    RatFunc b0, c2, c3, c4;
};
UNorms u_norms(const QuarticCurve& C, const TailTransform& tt);

/// U = U2 ∪ U4 with U2 = {v(h2) >= 0}, U4 = {v(h4) >= 0}.
struct UDomain {
    DiscoidDomain U2, U4, U;
    bool degenerate = false;
};
UDomain compute_U(CenterSet& cs, const QuarticCurve& C, const TailTransform& tt, const RootOptions& opt);

struct RunOptions {
    long W = 64;
    long max_W = 256;
    bool alt = false;
    int depth_cap = 3;
};

struct BranchPoint {
    int center;
    DeltaProfile delta;
    int fiber_multiplicity = 1;
};

struct TailComponent {
    Discoid disc;       // canonical center, geometric radius λ
    int split = 1;      // geometric disks
    TailData data;
};

struct ReportComponent {
    std::string kind;   // "interior" or "tail"
    Component comp;
    int split = 1;
    std::vector<int> genera;  // tails only, one per geometric disk
};

struct ReductionReport {
    QuarticCurve curve;
    KPoly delta;
    bool infinity_branch = false;
    std::shared_ptr<CenterSet> cs;
    std::vector<BranchPoint> branch;
    DiscoidDomain interior, U;
    std::vector<TailComponent> tails;
    std::vector<ReportComponent> components;
    std::vector<Discoid> boundary;
    SpannedTree tree;
    bool may_require_refinement = false;
    long precision = 0;
    std::vector<std::string> diagnostics;
};

ReductionReport run_algorithm_at(const QuarticCurve& C, long W, bool alt, int depth_cap = 3);
/// Doubles the working precision on PrecisionExhausted up to the cap.
ReductionReport run_algorithm(const QuarticCurve& C, const RunOptions& opt);

/// Display name of a center used in reports.
std::string center_label(const ReductionReport& r, int c);
/// Canonical one-line-per-component summary (stable across selectors and precisions).
std::vector<std::string> summary_lines(const ReductionReport& r);

}  // namespace q3
