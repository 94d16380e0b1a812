#pragma once

#include "q3/quartic.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace q3::cli {

struct JobConfig {
    std::string input;
    long precision = 64;
    long max_precision = 256;
    int depth_cap = 3;
    std::string json_out, dot_out, text_out;  // empty: not written; "-": stdout
    bool alt = false;
    bool raw_residues = false;
};

struct ParsedInput {
    FieldPtr K;
    QuarticCurve curve;
    std::optional<NormalForm> normal_form;  // set for ternary input
    nlohmann::json echo;                     // the input in canonical form
};

/// Parses the input document; throws ParseError (with the offending field),
/// InvalidBase, PointNotOnCurve or SingularAtPoint.
ParsedInput parse_input_json(const nlohmann::json& doc);
ParsedInput parse_input_text(const std::string& text);
ParsedInput parse_input(const std::string& path);

/// Exact rational from "n" or "n/d"; anything else is a ParseError.
mpq_class parse_rational(const std::string& s, const std::string& where);

/// The full report. Keys are sorted, so the dump is stable; the working
/// precision and the diagnostics are left out. Tail residues appear as a
/// zero pattern and a normalized equation; the coefficient vectors, which
/// depend on the residue field presentation, only with `raw_residues`.
nlohmann::json report_json(const ReductionReport& r, const ParsedInput& in, bool raw_residues = false);
/// Summary lines joined by newlines.
std::string report_text(const ReductionReport& r);

/// `quartic3` entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace q3::cli
