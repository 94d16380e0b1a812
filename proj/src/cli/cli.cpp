#include "q3/cli.hpp"

#include "q3/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

namespace q3::cli {

using nlohmann::json;

// ---------------------------------------------------------------- input

mpq_class parse_rational(const std::string& s, const std::string& where) {
    static const std::regex re(R"(^\s*([+-]?[0-9]+)(\s*/\s*([+-]?[0-9]+))?\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw ParseError(where + ": not a rational \"n\" or \"n/d\": \"" + s + "\"");
    auto z = [](std::string t) { return mpz_class(t[0] == '+' ? t.substr(1) : t); };
    mpz_class n = z(m[1].str()), d = m[3].matched ? z(m[3].str()) : mpz_class(1);
    if (d == 0) throw ParseError(where + ": zero denominator");
    mpq_class q(n, d);
    q.canonicalize();
    return q;
}

namespace {

std::string qstr(const mpq_class& q) { return q.get_str(); }

mpq_class rational_field(const json& v, const std::string& where) {
    if (v.is_string()) return parse_rational(v.get<std::string>(), where);
    if (v.is_number_integer()) return mpq_class(v.dump());
    if (v.is_number_float()) throw ParseError(where + ": floating-point literal " + v.dump());
    throw ParseError(where + ": expected a rational string");
}

// A field element is a rational (string) or a coefficient vector in γ.
KElem elem_field(const InputField& K, const json& v, const std::string& where) {
    if (!v.is_array()) return K.from_mpq(rational_field(v, where));
    if (static_cast<int>(v.size()) > K.degree())
        throw ParseError(where + ": " + std::to_string(v.size()) + " coordinates for a field of degree " +
                         std::to_string(K.degree()));
    KElem a = K.zero();
    for (size_t i = 0; i < v.size(); ++i) a[i] = rational_field(v[i], where + "[" + std::to_string(i) + "]");
    return a;
}

KPoly poly_field(const InputField& K, const json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected a coefficient list");
    KPoly p;
    for (size_t i = 0; i < v.size(); ++i) p.push_back(elem_field(K, v[i], where + "[" + std::to_string(i) + "]"));
    kpoly::trim(K, p);
    return p;
}

const json& member(const json& o, const char* key, const std::string& where) {
    if (!o.is_object()) throw ParseError(where + ": expected an object");
    auto it = o.find(key);
    if (it == o.end()) throw ParseError(where + ": missing \"" + key + "\"");
    return *it;
}

json elem_json(const InputField& K, const KElem& a) {
    if (K.is_rational()) return qstr(a[0]);
    json v = json::array();
    for (const auto& c : a) v.push_back(qstr(c));
    return v;
}

json poly_json(const InputField& K, const KPoly& p) {
    json v = json::array();
    for (const auto& c : p) v.push_back(elem_json(K, c));
    return v;
}

json q_json(const ValRational& r) { return r.str(); }

}  // namespace

ParsedInput parse_input_json(const json& doc) {
    ParsedInput in;
    const json& base = member(doc, "base", "input");
    json base_echo;
    if (base.is_string()) {
        if (base.get<std::string>() != "Q3") throw ParseError("base: expected \"Q3\" or {\"minpoly\": [...]}");
        in.K = InputField::rationals();
        base_echo = "Q3";
    } else {
        const json& mp = member(base, "minpoly", "base");
        if (!mp.is_array() || mp.size() < 2) throw ParseError("base.minpoly: expected a coefficient list of degree >= 1");
        std::vector<mpq_class> m;
        for (size_t i = 0; i < mp.size(); ++i)
            m.push_back(rational_field(mp[i], "base.minpoly[" + std::to_string(i) + "]"));
        if (m.back() != 1) throw ParseError("base.minpoly: the polynomial must be monic");
        in.K = mp.size() == 2 ? InputField::rationals() : InputField::from_minpoly(m);
        json e = json::array();
        for (const auto& c : m) e.push_back(qstr(c));
        base_echo = mp.size() == 2 ? json("Q3") : json{{"minpoly", e}};
    }
    const InputField& K = *in.K;
    const json& curve = member(doc, "curve", "input");
    json curve_echo;
    if (curve.is_object() && curve.contains("normal")) {
        const json& nf = curve["normal"];
        QuarticCurve C{in.K, poly_field(K, member(nf, "A2", "curve.normal"), "curve.normal.A2"),
                       poly_field(K, member(nf, "A1", "curve.normal"), "curve.normal.A1"),
                       poly_field(K, member(nf, "A0", "curve.normal"), "curve.normal.A0")};
        in.curve = C;
        curve_echo = json{{"normal", {{"A2", poly_json(K, C.A2)}, {"A1", poly_json(K, C.A1)}, {"A0", poly_json(K, C.A0)}}}};
    } else if (curve.is_object() && curve.contains("ternary")) {
        const json& t = curve["ternary"];
        if (!t.is_array() || t.size() != 15) throw ParseError("curve.ternary: expected 15 coefficients");
        TernaryQuartic q{in.K, {}};
        json te = json::array();
        for (size_t i = 0; i < 15; ++i) {
            q.a[i] = elem_field(K, t[i], "curve.ternary[" + std::to_string(i) + "]");
            te.push_back(elem_json(K, q.a[i]));
        }
        const json& pt = member(curve, "point", "curve");
        if (!pt.is_array() || pt.size() != 3) throw ParseError("curve.point: expected 3 coordinates");
        std::array<KElem, 3> P;
        json pe = json::array();
        for (size_t i = 0; i < 3; ++i) {
            P[i] = elem_field(K, pt[i], "curve.point[" + std::to_string(i) + "]");
            pe.push_back(elem_json(K, P[i]));
        }
        in.normal_form = normal_form(q, P);
        in.curve = in.normal_form->curve;
        curve_echo = json{{"ternary", te}, {"point", pe}};
    } else {
        throw ParseError("curve: expected {\"normal\": ...} or {\"ternary\": ..., \"point\": ...}");
    }
    check_curve(in.curve);
    in.echo = json{{"base", base_echo}, {"curve", curve_echo}};
    return in;
}

ParsedInput parse_input_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return parse_input_json(doc);
}

ParsedInput parse_input(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_input_text(ss.str());
}

// ---------------------------------------------------------------- report

namespace {

struct Emitter {
    const ReductionReport& r;
    const CenterSet& cs;
    const InputField& K;
    std::map<int, ValRational> max_radius;  // per center, ψ-radii in use

    void use(int c, const ValRational& psi) {
        auto it = max_radius.find(c);
        if (it == max_radius.end()) max_radius.emplace(c, psi);
        else if (psi > it->second) it->second = psi;
    }

    json disc(const Discoid& d) {
        ValRational psi = d.psi_radius(cs);
        use(d.c, psi);
        return json{{"center", cs[d.c].name}, {"radius", q_json(psi)}, {"geometric_radius", q_json(d.r)}};
    }

    json component(const Component& k) {
        json holes = json::array();
        if (k.is_infinity_disk(cs)) {
            const Discoid& h = k.holes[0];
            use(h.c, h.r);
            return json{{"center", "infinity"}, {"coordinate", cs[h.c].name}, {"radius", q_json(-h.r)}, {"holes", holes}};
        }
        for (const auto& h : k.holes) holes.push_back(disc(h));
        if (k.whole) return json{{"center", "line"}, {"holes", holes}};
        json o = disc(k.outer);
        o["holes"] = holes;
        return o;
    }

    json domain(const DiscoidDomain& d) {
        json v = json::array();
        for (const auto& k : d.comps) v.push_back(component(k));
        return v;
    }

    // θ-coordinates of a base element reduced mod 3^M, rewritten on powers of γ.
    json approx_coeff(const TElem& a, long M) {
        const Tower& T = *a.tower();
        int n = T.degree();
        std::vector<mpq_class> b(n, 0);
        for (int j = 0; j < n; ++j) {
            if (!a.is_exact() && (a.guarantee() - T.basis_val(j)).floor_long() < M)
                throw PrecisionExhausted("center coefficient known to fewer digits than reported");
            Z3 c = a.coeffs()[j];
            z3_truncate(c, M);
            b[j] = z3_to_mpq(c);
        }
        KElem out = K.zero(), th = K.one();
        KElem step = K.sub(K.is_rational() ? K.zero() : K.gamma(), K.from_mpq(K.shift()));
        for (int j = 0; j < n; ++j) {
            out = K.add(out, K.scale(th, b[j]));
            th = K.mul(th, step);
        }
        for (auto& c : out) {
            bool exact = true;
            Z3 z = z3_from_mpq(c, M, exact);
            z3_truncate(z, M);
            c = z3_to_mpq(z);
        }
        return elem_json(K, out);
    }

    json center(int c) {
        const Center& ce = cs[c];
        json o{{"degree", ce.degree()}};
        if (c == 0) {
            o["poly"] = poly_json(K, kpoly::x(K));
            return o;
        }
        if (ce.exact) {
            o["poly"] = poly_json(K, kpoly::monic(K, *ce.exact));
            return o;
        }
        // digits needed to pin every discoid of this center that is reported
        ValRational rmax = max_radius.count(c) ? max_radius.at(c) : ValRational(0);
        if (rmax.is_inf()) rmax = ValRational(0);  // Type I point only
        long neg = 0;
        if (!(ce.chi[0].is_exact() && ce.chi[0].rep_is_zero())) {
            ValRational v0 = ce.chi[0].val() / ValRational(ce.degree());
            if (v0 < ValRational(0)) neg = (-v0).ceil_long() * ce.degree();
        }
        long M = std::max<long>(rmax.ceil_long(), 0) + neg + 2;
        json coeffs = json::array();
        for (const auto& a : ce.chi) coeffs.push_back(approx_coeff(a, M));
        o["approx"] = json{{"modulus", "3^" + std::to_string(M)}, {"coefficients", coeffs}};
        return o;
    }
};

json profile_json(const PiecewiseAffine& f) {
    if (f.is_infinite()) return "inf";
    json bp = json::array(), sl = json::array(), ic = json::array();
    for (const auto& b : f.breakpoints()) bp.push_back(q_json(b));
    for (const auto& s : f.slopes()) sl.push_back(q_json(s));
    for (const auto& c : f.intercepts()) ic.push_back(q_json(c));
    return json{{"breakpoints", bp}, {"slopes", sl}, {"intercepts", ic}};
}

json intervals_json(const std::vector<RInterval>& s) {
    json v = json::array();
    for (const auto& i : s) v.push_back(json::array({i.lo ? json(q_json(*i.lo)) : json("-inf"), q_json(i.hi)}));
    return v;
}

// T^3 + b T + c2 x^2 + c3 x^3 + c4 x^4 over the algebraic closure of the residue
// field, with b != 0: scaling T and x gives y^3 - y = ..., and the x^3 term is
// absorbed by y -> y + ρx when c4 = 0.
std::string artin_schreier_form(const FField& F, const std::vector<FElem>& res) {
    bool c2 = !F.is_zero(res[1]), c3 = !F.is_zero(res[2]), c4 = !F.is_zero(res[3]);
    if (c4) return std::string("y^3 - y = x^4") + (c3 ? " + u*x^3" : "") + (c2 ? " + u*x^2" : "");
    if (c2) return "y^3 - y = x^2";
    return "y^3 - y = 0";
}

}  // namespace

json report_json(const ReductionReport& r, const ParsedInput& in, bool raw_residues) {
    const CenterSet& cs = *r.cs;
    const InputField& K = *r.curve.K;
    Emitter em{r, cs, K, {}};
    json out;
    out["schema"] = "quartic3/1";
    out["input"] = in.echo;
    out["curve"] = json{{"A2", poly_json(K, r.curve.A2)}, {"A1", poly_json(K, r.curve.A1)}, {"A0", poly_json(K, r.curve.A0)}};
    if (in.normal_form) out["normal_form"] = in.normal_form->description;
    out["discriminant"] = poly_json(K, r.delta);
    out["infinity_is_branch_point"] = r.infinity_branch;

    json branch = json::array();
    for (const auto& b : r.branch) {
        em.use(b.center, ValRational::infinity());
        branch.push_back(json{{"center", cs[b.center].name},
                              {"fiber_multiplicity", b.fiber_multiplicity},
                              {"delta", profile_json(b.delta.profile)},
                              {"delta_zero_set", intervals_json(b.delta.zero_set)}});
    }
    out["branch_points"] = branch;

    json comps = json::array();
    std::vector<std::pair<std::string, json>> sorted;
    for (const auto& rc : r.components) {
        json c = em.component(rc.comp);
        c["kind"] = rc.kind;
        c["split"] = rc.split;
        if (rc.kind == "tail") c["genera"] = rc.genera;
        c["text"] = rc.comp.str(cs);
        sorted.emplace_back(rc.kind + " " + rc.comp.str(cs), c);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [k, c] : sorted) comps.push_back(c);
    out["components"] = comps;

    json tails = json::array();
    for (const auto& t : r.tails) {
        json tj{{"discoid", em.disc(t.disc)},
                {"split", t.split},
                {"genus", t.data.genus},
                {"lambda", q_json(t.data.lambda)},
                {"mu", q_json(t.data.mu)},
                {"achieving", t.data.achieving}};
        if (!t.data.residues.empty()) {
            const char* names[] = {"b0", "c2", "c3", "c4"};
            const FField& F = *t.data.residue_field;
            json pat, raw;
            for (size_t i = 0; i < t.data.residues.size(); ++i) {
                pat[names[i]] = F.is_zero(t.data.residues[i]) ? "zero" : "nonzero";
                raw[names[i]] = t.data.residues[i];
            }
            tj["residue_pattern"] = pat;
            tj["reduction"] = artin_schreier_form(F, t.data.residues);
            if (raw_residues) {
                tj["residue_vectors"] = raw;
                tj["residue_field_degree"] = F.degree();
            }
        }
        tails.push_back(tj);
    }
    out["tails"] = tails;
    out["interior"] = em.domain(r.interior);
    out["U"] = em.domain(r.U);

    json bd = json::array();
    for (const auto& d : r.boundary) bd.push_back(em.disc(d));
    out["boundary"] = bd;

    json verts = json::array();
    for (size_t v = 0; v < r.tree.vertices.size(); ++v) {
        const auto& vx = r.tree.vertices[v];
        json o{{"parent", vx.parent}, {"label", vx.label}, {"leaf", vx.leaf}, {"marked", vx.marked}};
        if (vx.p.inf) o["point"] = "infinity";
        else if (vx.p.r.is_inf()) {
            em.use(vx.p.c, ValRational::infinity());
            o["point"] = json{{"center", cs[vx.p.c].name}};
        } else o["point"] = em.disc(Discoid{vx.p.c, vx.p.r});
        auto st = r.tree.edge_style.find(static_cast<int>(v));
        if (st != r.tree.edge_style.end()) o["edge"] = st->second;
        verts.push_back(o);
    }
    out["tree"] = json{{"vertices", verts}};
    out["may_require_refinement"] = r.may_require_refinement;
    out["assumptions"] = {"smoothness of the projective quartic is not verified",
                          "geometric irreducibility is only checked by the rational-root test for F over K(x)"};

    json centers = json::object();
    for (const auto& mr : em.max_radius) centers[cs[mr.first].name] = em.center(mr.first);
    out["centers"] = centers;
    return out;
}

std::string report_text(const ReductionReport& r) {
    std::string s;
    for (const auto& l : summary_lines(r)) s += l + "\n";
    return s;
}

// ---------------------------------------------------------------- driver

namespace {

void write_out(const std::string& path, const std::string& content) {
    if (path.empty()) return;
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(path);
    if (!f || !(f << content)) throw IoError("cannot write " + path);
}

int execute(const JobConfig& cfg) {
    if (cfg.precision <= 0 || cfg.precision > cfg.max_precision)
        throw InputError("precision must satisfy 0 < precision <= max-precision");
    ParsedInput in = parse_input(cfg.input);
    RunOptions opt;
    opt.W = cfg.precision;
    opt.max_W = cfg.max_precision;
    opt.alt = cfg.alt;
    opt.depth_cap = cfg.depth_cap;
    ReductionReport rep = run_algorithm(in.curve, opt);
    for (const auto& d : rep.diagnostics) std::cerr << "note: " << d << "\n";
    std::string text = report_text(rep);
    if (cfg.text_out.empty()) std::cout << text;
    else write_out(cfg.text_out, text);
    if (!cfg.json_out.empty()) write_out(cfg.json_out, report_json(rep, in, cfg.raw_residues).dump(2) + "\n");
    if (!cfg.dot_out.empty()) write_out(cfg.dot_out, to_dot(*rep.cs, rep.tree));
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Tame locus of the degree-3 cover attached to a plane quartic over a 3-adic field"};
    app.require_subcommand(1);
    JobConfig cfg;
    if (const char* env = std::getenv("QUARTIC3_MAX_PRECISION")) {
        try {
            cfg.max_precision = std::stol(env);
        } catch (const std::exception&) {
            std::cerr << "error: QUARTIC3_MAX_PRECISION is not an integer\n";
            return 4;
        }
    }
    std::string selector = "default";
    CLI::App* reduce = app.add_subcommand("reduce", "compute the tame locus and the boundary points");
    reduce->add_option("--input", cfg.input, "input JSON file")->required();
    reduce->add_option("--precision", cfg.precision, "starting absolute precision")->capture_default_str();
    reduce->add_option("--max-precision", cfg.max_precision, "precision cap (env QUARTIC3_MAX_PRECISION)")
        ->capture_default_str();
    reduce->add_option("--depth-cap", cfg.depth_cap, "refinement depth cap for root finding")->capture_default_str();
    reduce->add_option("--json", cfg.json_out, "write the JSON report (- for stdout)");
    reduce->add_option("--dot", cfg.dot_out, "write the spanning tree as DOT (- for stdout)");
    reduce->add_option("--text", cfg.text_out, "write the summary here instead of stdout");
    reduce->add_flag("--residue-vectors", cfg.raw_residues,
                     "add the residue coefficient vectors (they depend on the selector)");
    reduce->add_option("--selector", selector, "choice of y0 and v")
        ->check(CLI::IsMember({"default", "alt"}))
        ->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }
    cfg.alt = selector == "alt";
    try {
        return execute(cfg);
    } catch (const PrecisionExhausted& e) {
        std::cerr << "precision exhausted: " << e.what() << "\n";
        return 2;
    } catch (const IrregularResidual& e) {
        std::cerr << "irregular residual: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace q3::cli
