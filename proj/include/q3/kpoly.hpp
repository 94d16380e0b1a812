#pragma once

#include "q3/field.hpp"
#include "q3/tpoly.hpp"

#include <string>
#include <vector>

namespace q3 {

/// Polynomial in x over the input field, lowest degree first, no trailing zeros.
using KPoly = std::vector<KElem>;

namespace kpoly {

void trim(const InputField& K, KPoly& a);
int deg(const KPoly& a);
KPoly from_rationals(const InputField& K, const std::vector<mpq_class>& c);
KPoly constant(const InputField& K, const KElem& c);
KPoly x(const InputField& K);
KPoly add(const InputField& K, const KPoly& a, const KPoly& b);
KPoly sub(const InputField& K, const KPoly& a, const KPoly& b);
KPoly neg(const InputField& K, const KPoly& a);
KPoly mul(const InputField& K, const KPoly& a, const KPoly& b);
KPoly scale(const InputField& K, const KPoly& a, const KElem& c);
KPoly pow(const InputField& K, const KPoly& a, unsigned n);
void divrem(const InputField& K, const KPoly& a, const KPoly& b, KPoly& q, KPoly& r);
bool divides(const InputField& K, const KPoly& b, const KPoly& a);
KPoly exact_quo(const InputField& K, const KPoly& a, const KPoly& b);
KPoly monic(const InputField& K, const KPoly& a);
KPoly gcd(const InputField& K, const KPoly& a, const KPoly& b);
KPoly derivative(const InputField& K, const KPoly& a);
/// Coefficient of t^l in a(x + t), as a polynomial in x.
KPoly taylor_coeff(const InputField& K, const KPoly& a, int l);
KElem eval(const InputField& K, const KPoly& a, const KElem& x);
KPoly squarefree_part(const InputField& K, const KPoly& a);
TPoly embed(const InputField& K, const KPoly& a, const TowerPtr& t, long W);
bool equal(const KPoly& a, const KPoly& b);
std::string str(const InputField& K, const KPoly& a, const std::string& var = "x");
/// Dense coefficient strings (for JSON): rationals, or coefficient vectors in γ.
std::vector<std::string> coeff_strings(const InputField& K, const KPoly& a);

}  // namespace kpoly

}  // namespace q3
