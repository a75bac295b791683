#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncball/deform.hpp"
#include "ncball/freealg.hpp"
#include "ncball/ncfunc.hpp"

namespace ncball {

/// Configuration problems carry the JSON field path of the offending entry.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfg {

using nlohmann::json;

inline void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

inline void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError(path.empty() ? item.key() + ": unknown key" : path + "." + item.key() + ": unknown key");
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
    return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path + ": expected a string");
    return j.get<std::string>();
}

inline bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path + ": expected a boolean");
    return j.get<bool>();
}

inline Word as_word(const json& j, const std::string& path, int d) {
    if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a nonempty array of letters");
    Word w;
    w.letters.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        int letter = as_int(j[i], path + "[" + std::to_string(i) + "]");
        if (letter < 1 || letter > d)
            throw ConfigError(path + "[" + std::to_string(i) + "]: letter " + std::to_string(letter) +
                              " outside alphabet [1," + std::to_string(d) + "]");
        w.letters.push_back(letter);
    }
    return w;
}

} // namespace cfg

/// One parsed generator term: constant complex coefficient or a real
/// polynomial in the deformation parameter.
struct GenTerm {
    Word word;
    bool timed = false;
    Complex constant{0.0, 0.0};
    RealPoly varying;
};

struct ParsedGenerator {
    std::vector<GenTerm> terms;
};

/// The experiment configuration: a single versioned JSON document, unknown
/// keys rejected so that golden files stay honest.
struct ExperimentConfig {
    int schema = 1;
    std::optional<int> d;
    std::optional<int> M;
    std::optional<int> degree;
    int n = 3;
    int samples = 100;
    std::uint64_t seed = 12345;

    std::vector<ParsedGenerator> generators;
    std::optional<double> t_min, t_max;
    std::optional<int> grid_points;
    std::optional<std::vector<double>> explicit_grid;

    std::optional<FreePoly> p;
    std::vector<double> radii;
    std::vector<FreePoly> probes;

    double rank_tol = 1e-10;
    double opnorm_tol = 1e-10;
    double ineq_slack = 1e-9;
    std::optional<double> jump_threshold;

    std::optional<MatrixTuple> X;
    std::optional<std::string> ideal_kind;
    double q = 0.5;

    std::vector<std::string> suites{"brackets", "tower", "axioms", "vn", "contraction"};
    bool suites_given = false;
    double corrupt_ideal_eps = 0.0;
    bool emit_bases = false;

    std::optional<std::string> out;
    std::optional<std::string> report_out;

    // ---- derived views ------------------------------------------------

    int alphabet() const {
        if (!d) throw ConfigError("d: required by this command");
        return *d;
    }

    int truncation() const {
        if (!M) throw ConfigError("M: required by this command");
        return *M;
    }

    /// Constant-coefficient generators for fixed-ideal commands.
    std::vector<FreePoly> fixed_generators() const {
        std::vector<FreePoly> out_;
        for (std::size_t i = 0; i < generators.size(); ++i) {
            FreePoly g = FreePoly::zero(alphabet());
            for (std::size_t t = 0; t < generators[i].terms.size(); ++t) {
                const GenTerm& term = generators[i].terms[t];
                if (term.timed)
                    throw ConfigError("generators[" + std::to_string(i) + "].terms[" + std::to_string(t) +
                                      "].coeff_t: this command needs constant generators");
                g.add_term(term.word, term.constant);
            }
            out_.push_back(std::move(g));
        }
        return out_;
    }

    /// Parameter-dependent generator templates for family commands.
    IdealFamily family() const {
        if (!t_min || !t_max) throw ConfigError("family: required by this command");
        if (generators.empty()) throw ConfigError("generators: required by this command");
        std::vector<GeneratorTemplate> templates;
        for (std::size_t i = 0; i < generators.size(); ++i) {
            std::vector<std::pair<Word, RealPoly>> terms;
            for (std::size_t t = 0; t < generators[i].terms.size(); ++t) {
                const GenTerm& term = generators[i].terms[t];
                if (term.timed) {
                    terms.emplace_back(term.word, term.varying);
                } else {
                    if (term.constant.imag() != 0.0)
                        throw ConfigError("generators[" + std::to_string(i) + "].terms[" + std::to_string(t) +
                                          "].im: family generators need real coefficients");
                    terms.emplace_back(term.word, RealPoly{{term.constant.real()}});
                }
            }
            try {
                templates.emplace_back(alphabet(), std::move(terms));
            } catch (const std::invalid_argument& e) {
                throw ConfigError("generators[" + std::to_string(i) + "]: " + e.what());
            }
        }
        try {
            return IdealFamily(alphabet(), *t_min, *t_max, std::move(templates));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("family: ") + e.what());
        }
    }

    std::vector<double> make_grid() const {
        if (explicit_grid) return *explicit_grid;
        if (!t_min || !t_max || !grid_points) throw ConfigError("family.grid_points: required by this command");
        int n_ = *grid_points;
        std::vector<double> g;
        g.reserve(static_cast<std::size_t>(n_));
        if (n_ == 1) {
            g.push_back(*t_min);
            return g;
        }
        double a = *t_min, b = *t_max;
        for (int i = 0; i < n_; ++i) g.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n_ - 1));
        g.back() = b; // endpoint exact regardless of rounding
        return g;
    }

    FreePoly poly() const {
        if (!p) throw ConfigError("p: required by this command");
        return *p;
    }

    double jump_or_default(const std::vector<double>& grid) const {
        if (jump_threshold) return *jump_threshold;
        if (grid.size() < 2) return 1.0;
        return 10.0 * (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    }
};

namespace cfg {

inline FreePoly parse_poly(const json& j, const std::string& path, int d) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array of terms");
    FreePoly p = FreePoly::zero(d);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& term = j[i];
        std::string tpath = path + "[" + std::to_string(i) + "]";
        expect_object(term, tpath);
        check_keys(term, tpath, {"word", "re", "im"});
        if (!term.contains("word")) throw ConfigError(tpath + ".word: required");
        Word w;
        if (term["word"].is_array() && term["word"].empty())
            w = Word{}; // unit word: the constant term
        else
            w = as_word(term["word"], tpath + ".word", d);
        double re = term.contains("re") ? as_number(term["re"], tpath + ".re") : 0.0;
        double im = term.contains("im") ? as_number(term["im"], tpath + ".im") : 0.0;
        p.add_term(w, Complex(re, im));
    }
    return p;
}

inline ParsedGenerator parse_generator(const json& j, const std::string& path, int d) {
    expect_object(j, path);
    check_keys(j, path, {"terms"});
    if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
        throw ConfigError(path + ".terms: expected a nonempty array");
    ParsedGenerator g;
    std::size_t wordlen = 0;
    for (std::size_t i = 0; i < j["terms"].size(); ++i) {
        const json& term = j["terms"][i];
        std::string tpath = path + ".terms[" + std::to_string(i) + "]";
        expect_object(term, tpath);
        check_keys(term, tpath, {"word", "re", "im", "coeff_t"});
        if (!term.contains("word")) throw ConfigError(tpath + ".word: required");
        GenTerm out;
        out.word = as_word(term["word"], tpath + ".word", d);
        if (i == 0)
            wordlen = out.word.size();
        else if (out.word.size() != wordlen)
            throw ConfigError(tpath + ".word: generator mixes word lengths (saturation needs homogeneous generators)");
        if (term.contains("coeff_t")) {
            if (term.contains("re") || term.contains("im"))
                throw ConfigError(tpath + ": give either re/im or coeff_t, not both");
            if (!term["coeff_t"].is_array() || term["coeff_t"].empty())
                throw ConfigError(tpath + ".coeff_t: expected a nonempty array of numbers");
            out.timed = true;
            for (std::size_t c = 0; c < term["coeff_t"].size(); ++c)
                out.varying.coeffs.push_back(as_number(term["coeff_t"][c], tpath + ".coeff_t[" + std::to_string(c) + "]"));
        } else {
            double re = term.contains("re") ? as_number(term["re"], tpath + ".re") : 0.0;
            double im = term.contains("im") ? as_number(term["im"], tpath + ".im") : 0.0;
            out.constant = Complex(re, im);
        }
        g.terms.push_back(std::move(out));
    }
    return g;
}

inline MatrixTuple parse_tuple(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"n", "d", "matrices"});
    if (!j.contains("n") || !j.contains("d") || !j.contains("matrices"))
        throw ConfigError(path + ": needs n, d and matrices");
    int n = as_int(j["n"], path + ".n");
    int d = as_int(j["d"], path + ".d");
    if (n < 1 || n > 16) throw ConfigError(path + ".n: must be in [1,16]");
    if (d < 1) throw ConfigError(path + ".d: must be >= 1");
    const json& mats = j["matrices"];
    if (!mats.is_array() || static_cast<int>(mats.size()) != d)
        throw ConfigError(path + ".matrices: expected exactly d matrices");
    MatrixTuple X(n, d);
    for (int m = 0; m < d; ++m) {
        const json& rows = mats[static_cast<std::size_t>(m)];
        std::string mpath = path + ".matrices[" + std::to_string(m) + "]";
        if (!rows.is_array() || static_cast<int>(rows.size()) != n)
            throw ConfigError(mpath + ": expected n rows");
        for (int r = 0; r < n; ++r) {
            const json& row = rows[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw ConfigError(mpath + "[" + std::to_string(r) + "]: expected n entries");
            for (int c = 0; c < n; ++c) {
                const json& e = row[static_cast<std::size_t>(c)];
                std::string epath = mpath + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
                if (!e.is_array() || e.size() != 2) throw ConfigError(epath + ": expected [re, im]");
                X.X[static_cast<std::size_t>(m)](r, c) =
                    Complex(as_number(e[0], epath + "[0]"), as_number(e[1], epath + "[1]"));
            }
        }
    }
    return X;
}

} // namespace cfg

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using namespace cfg;
    expect_object(j, "");
    check_keys(j, "", {"schema", "d", "M", "degree", "n", "samples", "seed", "generators", "family", "p", "radii",
                       "probes", "tolerances", "X", "ideal_kind", "q", "suites", "corrupt_ideal_eps", "emit_bases",
                       "out", "report_out"});
    ExperimentConfig c;
    if (!j.contains("schema")) throw ConfigError("schema: required");
    c.schema = as_int(j["schema"], "schema");
    if (c.schema != 1) throw ConfigError("schema: unsupported version " + std::to_string(c.schema));

    if (j.contains("d")) {
        c.d = as_int(j["d"], "d");
        if (*c.d < 1) throw ConfigError("d: must be >= 1");
    }
    if (j.contains("M")) {
        c.M = as_int(j["M"], "M");
        if (*c.M < 0) throw ConfigError("M: must be >= 0");
    }
    if (j.contains("degree")) {
        c.degree = as_int(j["degree"], "degree");
        if (*c.degree < 0) throw ConfigError("degree: must be >= 0");
    }
    if (j.contains("n")) {
        c.n = as_int(j["n"], "n");
        if (c.n < 1 || c.n > 16) throw ConfigError("n: must be in [1,16]");
    }
    if (j.contains("samples")) {
        c.samples = as_int(j["samples"], "samples");
        if (c.samples < 1) throw ConfigError("samples: must be >= 1");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0)
            throw ConfigError("seed: expected a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }

    if (j.contains("generators")) {
        if (!j["generators"].is_array()) throw ConfigError("generators: expected an array");
        int d = c.d ? *c.d : 0;
        if (d == 0) throw ConfigError("d: required when generators are given");
        for (std::size_t i = 0; i < j["generators"].size(); ++i)
            c.generators.push_back(parse_generator(j["generators"][i], "generators[" + std::to_string(i) + "]", d));
    }

    if (j.contains("family")) {
        const json& f = j["family"];
        expect_object(f, "family");
        check_keys(f, "family", {"t_min", "t_max", "grid_points", "grid"});
        if (!f.contains("t_min") || !f.contains("t_max")) throw ConfigError("family: needs t_min and t_max");
        c.t_min = as_number(f["t_min"], "family.t_min");
        c.t_max = as_number(f["t_max"], "family.t_max");
        if (!(*c.t_min < *c.t_max)) throw ConfigError("family.t_min: must be strictly below t_max");
        if (f.contains("grid_points") && f.contains("grid"))
            throw ConfigError("family: give either grid_points or grid, not both");
        if (f.contains("grid_points")) {
            c.grid_points = as_int(f["grid_points"], "family.grid_points");
            if (*c.grid_points < 1) throw ConfigError("family.grid_points: must be >= 1");
        }
        if (f.contains("grid")) {
            std::vector<double> g;
            if (!f["grid"].is_array() || f["grid"].empty())
                throw ConfigError("family.grid: expected a nonempty array");
            for (std::size_t i = 0; i < f["grid"].size(); ++i)
                g.push_back(as_number(f["grid"][i], "family.grid[" + std::to_string(i) + "]"));
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (g[i] < *c.t_min || g[i] > *c.t_max)
                    throw ConfigError("family.grid[" + std::to_string(i) + "]: outside [t_min, t_max]");
                if (i > 0 && !(g[i - 1] < g[i]))
                    throw ConfigError("family.grid[" + std::to_string(i) + "]: grid must be strictly increasing");
            }
            c.explicit_grid = std::move(g);
        }
    }

    if (j.contains("p")) {
        if (!c.d) throw ConfigError("d: required when p is given");
        c.p = parse_poly(j["p"], "p", *c.d);
    }

    if (j.contains("radii")) {
        if (!j["radii"].is_array() || j["radii"].empty()) throw ConfigError("radii: expected a nonempty array");
        for (std::size_t i = 0; i < j["radii"].size(); ++i) {
            double r = as_number(j["radii"][i], "radii[" + std::to_string(i) + "]");
            if (!(r > 0.0)) throw ConfigError("radii[" + std::to_string(i) + "]: must be positive");
            if (i > 0 && !(c.radii.back() < r))
                throw ConfigError("radii[" + std::to_string(i) + "]: must be strictly increasing");
            c.radii.push_back(r);
        }
    }

    if (j.contains("probes")) {
        if (!c.d) throw ConfigError("d: required when probes are given");
        if (!j["probes"].is_array()) throw ConfigError("probes: expected an array of polynomials");
        for (std::size_t i = 0; i < j["probes"].size(); ++i)
            c.probes.push_back(parse_poly(j["probes"][i], "probes[" + std::to_string(i) + "]", *c.d));
    }

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        expect_object(t, "tolerances");
        check_keys(t, "tolerances", {"rank_tol", "opnorm_tol", "jump_threshold", "ineq_slack"});
        auto positive = [&](const char* key, double& slot) {
            if (!t.contains(key)) return;
            double v = as_number(t[key], std::string("tolerances.") + key);
            if (!(v > 0.0)) throw ConfigError(std::string("tolerances.") + key + ": must be positive");
            slot = v;
        };
        positive("rank_tol", c.rank_tol);
        positive("opnorm_tol", c.opnorm_tol);
        positive("ineq_slack", c.ineq_slack);
        if (t.contains("jump_threshold")) {
            double v = as_number(t["jump_threshold"], "tolerances.jump_threshold");
            if (!(v > 0.0)) throw ConfigError("tolerances.jump_threshold: must be positive");
            c.jump_threshold = v;
        }
    }

    if (j.contains("X")) c.X = cfg::parse_tuple(j["X"], "X");

    if (j.contains("ideal_kind")) {
        std::string k = as_string(j["ideal_kind"], "ideal_kind");
        if (k != "commutator" && k != "q_commutator")
            throw ConfigError("ideal_kind: expected \"commutator\" or \"q_commutator\"");
        c.ideal_kind = k;
    }
    if (j.contains("q")) c.q = as_number(j["q"], "q");

    if (j.contains("suites")) {
        if (!j["suites"].is_array()) throw ConfigError("suites: expected an array of names");
        c.suites.clear();
        c.suites_given = true;
        const std::set<std::string> known{"brackets", "tower", "axioms", "vn", "contraction"};
        for (std::size_t i = 0; i < j["suites"].size(); ++i) {
            std::string s = as_string(j["suites"][i], "suites[" + std::to_string(i) + "]");
            if (!known.count(s)) throw ConfigError("suites[" + std::to_string(i) + "]: unknown suite \"" + s + "\"");
            c.suites.push_back(s);
        }
    }

    if (j.contains("corrupt_ideal_eps")) c.corrupt_ideal_eps = as_number(j["corrupt_ideal_eps"], "corrupt_ideal_eps");
    if (j.contains("emit_bases")) c.emit_bases = as_bool(j["emit_bases"], "emit_bases");
    if (j.contains("out")) c.out = as_string(j["out"], "out");
    if (j.contains("report_out")) c.report_out = as_string(j["report_out"], "report_out");
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config file not readable: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

} // namespace ncball
