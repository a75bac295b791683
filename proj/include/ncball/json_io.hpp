#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncball/deform.hpp"
#include "ncball/fock.hpp"
#include "ncball/freealg.hpp"
#include "ncball/ncfunc.hpp"
#include "ncball/norms.hpp"

namespace ncball {

using json = nlohmann::json;

/// 17 significant digits, '.' decimal, locale-free: enough to round-trip a
/// double bit-exactly, so equal numbers give equal bytes.
inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

// ---- polynomials ----------------------------------------------------------

/// Term-list form, graded-lex order: [{"word":[1,2],"re":1.0,"im":0.0},...]
inline json poly_to_json(const FreePoly& p) {
    json terms = json::array();
    for (const auto& [w, c] : p.terms()) {
        json t;
        t["word"] = w.letters;
        t["re"] = c.real();
        t["im"] = c.imag();
        terms.push_back(std::move(t));
    }
    return terms;
}

// ---- matrix tuples --------------------------------------------------------

inline json matrix_to_json(const Eigen::MatrixXcd& A) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < A.cols(); ++c) row.push_back({A(r, c).real(), A(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json tuple_to_json(const MatrixTuple& X) {
    json out;
    out["n"] = X.n;
    out["d"] = X.d;
    json mats = json::array();
    for (const auto& A : X.X) mats.push_back(matrix_to_json(A));
    out["matrices"] = std::move(mats);
    return out;
}

// ---- ideals and reports ---------------------------------------------------

inline json ideal_to_json(const GradedIdealBasis& ideal, bool with_bases = false) {
    json out;
    out["d"] = ideal.alphabet();
    out["cutoff"] = ideal.cutoff();
    out["dims"] = ideal.dims();
    json comp = json::array();
    for (int m = 0; m <= ideal.cutoff(); ++m)
        comp.push_back(degree_dim(ideal.alphabet(), m) - ideal.dim(m));
    out["complement_dims"] = std::move(comp);
    if (with_bases) {
        json bases = json::array();
        for (int m = 0; m <= ideal.cutoff(); ++m) bases.push_back(matrix_to_json(ideal.basis(m)));
        out["bases"] = std::move(bases);
    }
    return out;
}

inline json bracket_to_json(const NormBracket& b) {
    json out;
    out["lower"] = b.lower;
    out["upper"] = b.upper;
    out["lower_method"] = b.lower_method;
    out["upper_method"] = b.upper_method;
    return out;
}

inline json continuity_to_json(const ContinuityReport& rep) {
    json out;
    out["threshold"] = rep.threshold;
    out["max_jump"] = rep.max_jump;
    out["pass"] = rep.pass();
    json flags = json::array();
    for (const auto& f : rep.flags) flags.push_back({{"index", f.index}, {"jump", f.jump}});
    out["flags"] = std::move(flags);
    return out;
}

inline json grassmann_to_json(const GrassmannPathReport& rep) {
    json out;
    out["degree"] = rep.degree;
    out["dim"] = rep.k;
    out["chordal"] = rep.chordal;
    out["max_chordal"] = rep.max_chordal;
    out["modulus"] = rep.modulus;
    out["pass"] = rep.pass;
    if (!rep.plucker_dist.empty()) out["plucker_dist"] = rep.plucker_dist;
    return out;
}

inline json tower_to_json(const TowerReport& rep) {
    json out;
    out["radii"] = rep.radii;
    out["seminorms"] = rep.seminorms;
    out["max_coeff_mismatch"] = rep.max_coeff_mismatch;
    out["coeff_bitwise"] = rep.coeff_bitwise;
    out["coeff_pass"] = rep.coeff_pass;
    out["monotone_pass"] = rep.monotone_pass;
    out["pass"] = rep.pass();
    return out;
}

inline json vn_to_json(const VnReport& rep) {
    json out;
    out["lhs"] = rep.lhs;
    out["rhs"] = rep.rhs;
    out["row_norm"] = rep.row;
    out["pass"] = rep.pass;
    return out;
}

inline json contraction_to_json(const ContractionReport& rep) {
    json out;
    out["verdict"] = to_string(rep.verdict);
    out["lhs"] = rep.lhs;
    out["upper"] = rep.upper;
    out["row_norm"] = rep.row;
    out["on_variety"] = rep.on_variety;
    if (!rep.note.empty()) out["note"] = rep.note;
    return out;
}

inline json axiom_to_json(const AxiomReport& rep) {
    json out;
    out["direct_sum_err"] = rep.direct_sum_err;
    out["similarity_err"] = rep.similarity_err;
    out["cond_S"] = rep.cond_S;
    out["pass"] = rep.pass;
    return out;
}

// ---- CSV ------------------------------------------------------------------

/// (t, lower, upper, exact_flag) rows; ordered by the grid, so the bytes do
/// not depend on how the field was evaluated.
inline std::string field_to_csv(const NormField& field) {
    std::ostringstream os;
    os << "t,lower,upper,exact\n";
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        const FieldValue& v = field.values[i];
        os << format_g17(field.grid[i]) << ',' << format_g17(v.lower) << ',' << format_g17(v.upper) << ','
           << (v.exact ? 1 : 0) << '\n';
    }
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace ncball
