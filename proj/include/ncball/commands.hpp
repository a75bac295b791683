#pragma once

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ncball/config.hpp"
#include "ncball/json_io.hpp"
#include "ncball/sampling.hpp"

namespace ncball {

/// Per-invocation options layered over the config file.
struct RunOptions {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    int grid_parallel = 1;
    bool log = false;
};

namespace detail {

inline void log_line(const RunOptions& opt, const std::string& msg) {
    if (opt.log) std::fprintf(stderr, "[ncball] %s\n", msg.c_str());
}

inline std::optional<std::string> out_path(const ExperimentConfig& cfg, const RunOptions& opt) {
    if (opt.out) return opt.out;
    return cfg.out;
}

inline void emit(const ExperimentConfig& cfg, const RunOptions& opt, const std::string& text) {
    std::optional<std::string> path = out_path(cfg, opt);
    if (path)
        write_text_file(*path, text);
    else
        std::cout << text;
}

inline std::uint64_t effective_seed(const ExperimentConfig& cfg, const RunOptions& opt) {
    return opt.seed ? *opt.seed : cfg.seed;
}

/// Fixed ideal from the config's constant generators; no generators (or all
/// zero) means the zero ideal.
inline GradedIdealBasis fixed_ideal(const ExperimentConfig& cfg, int M) {
    std::vector<FreePoly> gens = cfg.fixed_generators();
    int maxdeg = 0;
    bool any = false;
    for (const auto& g : gens)
        if (!g.is_zero()) {
            any = true;
            maxdeg = std::max(maxdeg, g.degree());
        }
    if (!any) return GradedIdealBasis::zero(cfg.alphabet(), M);
    if (maxdeg > M) throw ConfigError("M: must be >= the maximum generator degree " + std::to_string(maxdeg));
    return saturate_ideal(gens, M, cfg.rank_tol);
}

} // namespace detail

// ---- ideal-info -------------------------------------------------------

inline int cmd_ideal_info(const ExperimentConfig& cfg, const RunOptions& opt) {
    int M = cfg.truncation();
    detail::log_line(opt, "saturating ideal to degree " + std::to_string(M));
    GradedIdealBasis ideal = detail::fixed_ideal(cfg, M);
    detail::emit(cfg, opt, ideal_to_json(ideal, cfg.emit_bases).dump(2) + "\n");
    return 0;
}

// ---- norm ---------------------------------------------------------------

inline int cmd_norm(const ExperimentConfig& cfg, const RunOptions& opt) {
    int M = cfg.truncation();
    FreePoly p = cfg.poly();
    if (p.degree() > M) throw ConfigError("M: must be >= the degree of p");
    GradedIdealBasis ideal = detail::fixed_ideal(cfg, M);
    json out;
    if (p.is_zero() || p.is_homogeneous()) {
        out["exact"] = quotient_norm_homog(p, ideal);
        out["method"] = "graded-distance";
    } else {
        NormBracket b = quotient_norm_bracket(p, ideal, M);
        out = bracket_to_json(b);
    }
    detail::emit(cfg, opt, out.dump(2) + "\n");
    return 0;
}

// ---- norm-field -----------------------------------------------------------

inline int cmd_norm_field(const ExperimentConfig& cfg, const RunOptions& opt) {
    int M = cfg.truncation();
    FreePoly p = cfg.poly();
    IdealFamily fam = cfg.family();
    if (fam.max_degree() > M) throw ConfigError("M: must be >= the maximum generator degree");
    if (p.degree() > M) throw ConfigError("M: must be >= the degree of p");
    std::vector<double> grid = cfg.make_grid();
    detail::log_line(opt, "norm field over " + std::to_string(grid.size()) + " grid points, " +
                              std::to_string(opt.grid_parallel) + " worker(s)");
    NormField field = norm_field(fam, p, grid, M, cfg.rank_tol, opt.grid_parallel);
    ContinuityReport rep = continuity_report(field, cfg.jump_or_default(grid));

    std::string csv = field_to_csv(field);
    std::string report = continuity_to_json(rep).dump(2) + "\n";
    bool csv_to_file = detail::out_path(cfg, opt).has_value();
    detail::emit(cfg, opt, csv);
    if (cfg.report_out)
        write_text_file(*cfg.report_out, report);
    else if (csv_to_file)
        std::cout << report;
    else
        std::cerr << report;
    return rep.pass() ? 0 : 3;
}

// ---- grassmann-path -------------------------------------------------------

inline int cmd_grassmann_path(const ExperimentConfig& cfg, const RunOptions& opt) {
    if (!cfg.degree) throw ConfigError("degree: required by this command");
    IdealFamily fam = cfg.family();
    if (*cfg.degree < fam.max_degree()) throw ConfigError("degree: below the family's generator degree");
    std::vector<double> grid = cfg.make_grid();
    detail::log_line(opt, "grassmann path at degree " + std::to_string(*cfg.degree));
    GrassmannPathReport rep;
    try {
        rep = grassmann_path(fam, grid, *cfg.degree, cfg.jump_or_default(grid), cfg.rank_tol, 100000,
                             opt.grid_parallel);
    } catch (const std::invalid_argument& e) {
        // dimension jump: the path fell off one Grassmannian component
        json out;
        out["error"] = e.what();
        out["pass"] = false;
        detail::emit(cfg, opt, out.dump(2) + "\n");
        return 3;
    }
    detail::emit(cfg, opt, grassmann_to_json(rep).dump(2) + "\n");
    return rep.pass ? 0 : 3;
}

// ---- tower-check ------------------------------------------------------

inline int cmd_tower_check(const ExperimentConfig& cfg, const RunOptions& opt) {
    int M = cfg.truncation();
    FreePoly F = cfg.poly();
    if (F.degree() > M) throw ConfigError("M: must be >= the degree of p");
    if (cfg.radii.empty()) throw ConfigError("radii: required by this command");
    GradedIdealBasis ideal = detail::fixed_ideal(cfg, M);
    TowerReport rep = tower_check(F, cfg.radii, ideal, M);
    detail::emit(cfg, opt, tower_to_json(rep).dump(2) + "\n");
    return rep.pass() ? 0 : 3;
}

// ---- eval ---------------------------------------------------------------

inline int cmd_eval(const ExperimentConfig& cfg, const RunOptions& opt) {
    FreePoly p = cfg.poly();
    if (!cfg.X) throw ConfigError("X: required by this command");
    if (cfg.X->d != p.alphabet()) throw ConfigError("X.d: must match d");
    Eigen::MatrixXcd value = eval_poly(p, *cfg.X);
    json out;
    out["value"] = matrix_to_json(value);
    out["norm"] = op_norm(value);
    out["row_norm"] = row_norm(*cfg.X);
    detail::emit(cfg, opt, out.dump(2) + "\n");
    return 0;
}

// ---- vn-test ------------------------------------------------------------

inline int cmd_vn_test(const ExperimentConfig& cfg, const RunOptions& opt) {
    FreePoly p = cfg.poly();
    json checks = json::array();
    bool all = true;
    if (cfg.X) {
        if (cfg.X->d != p.alphabet()) throw ConfigError("X.d: must match d");
        VnReport rep = vn_check(p, *cfg.X, cfg.ineq_slack);
        checks.push_back(vn_to_json(rep));
        all = rep.pass;
    } else {
        std::mt19937_64 master(detail::effective_seed(cfg, opt));
        std::uniform_real_distribution<double> target(0.05, 0.99);
        for (int i = 0; i < cfg.samples; ++i) {
            double y = target(master);
            MatrixTuple X = sample_row_contraction(p.alphabet(), cfg.n, y, master());
            VnReport rep = vn_check(p, X, cfg.ineq_slack);
            checks.push_back(vn_to_json(rep));
            all = all && rep.pass;
        }
    }
    json out;
    out["checks"] = std::move(checks);
    out["pass"] = all;
    detail::emit(cfg, opt, out.dump(2) + "\n");
    return all ? 0 : 3;
}

// ---- variety-test ---------------------------------------------------------

inline int cmd_variety_test(const ExperimentConfig& cfg, const RunOptions& opt) {
    if (!cfg.ideal_kind) throw ConfigError("ideal_kind: required by this command");
    FreePoly q = cfg.poly();
    if (q.alphabet() != 2) throw ConfigError("d: variety sampling is defined for d = 2");
    IdealKind kind = *cfg.ideal_kind == "commutator" ? IdealKind::commutator : IdealKind::q_commutator;
    FreePoly gen = FreePoly::monomial(2, Word{{1, 2}}, 1.0) -
                   FreePoly::monomial(2, Word{{2, 1}}, kind == IdealKind::commutator ? 1.0 : cfg.q);
    int M = cfg.M ? *cfg.M : std::max(q.degree(), 2);
    if (M < std::max(q.degree(), 2)) throw ConfigError("M: must cover both p and the relation degree 2");
    std::vector<FreePoly> gens{gen};
    GradedIdealBasis ideal = saturate_ideal(gens, M, cfg.rank_tol);

    std::mt19937_64 master(detail::effective_seed(cfg, opt));
    json checks = json::array();
    bool any_fail = false;
    for (int i = 0; i < cfg.samples; ++i) {
        MatrixTuple X = sample_variety_tuple(kind, cfg.q, cfg.n, master());
        ContractionReport rep = variety_contraction_check(q, X, gens, ideal, cfg.ineq_slack);
        checks.push_back(contraction_to_json(rep));
        if (rep.verdict == Verdict::FAIL) any_fail = true;
    }
    json out;
    out["checks"] = std::move(checks);
    out["pass"] = !any_fail;
    detail::emit(cfg, opt, out.dump(2) + "\n");
    return any_fail ? 3 : 0;
}

// ---- suite -------------------------------------------------------------

namespace detail {

struct SuiteRun {
    json results = json::array();
    int checks = 0;
    int failures = 0;

    void record(const std::string& name, bool pass, const std::string& note = "") {
        ++checks;
        if (!pass) ++failures;
        std::printf("%s %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(), note.empty() ? "" : " ",
                    note.c_str());
        json r;
        r["name"] = name;
        r["pass"] = pass;
        if (!note.empty()) r["note"] = note;
        results.push_back(std::move(r));
    }
};

inline bool wants(const ExperimentConfig& cfg, const std::string& name) {
    for (const auto& s : cfg.suites)
        if (s == name) return true;
    return false;
}

inline void suite_brackets(const ExperimentConfig& cfg, std::mt19937_64& rng, SuiteRun& run) {
    int d = cfg.d.value_or(2);
    int M = cfg.M.value_or(4);
    GradedIdealBasis ideal = [&] {
        ExperimentConfig local = cfg;
        if (!local.d) local.d = d;
        GradedIdealBasis base = fixed_ideal(local, M);
        if (cfg.corrupt_ideal_eps != 0.0) base.corrupt_for_testing(cfg.corrupt_ideal_eps);
        return base;
    }();

    double worst_ortho = 0.0;
    for (int m = 0; m <= ideal.cutoff(); ++m) {
        const Eigen::MatrixXcd& B = ideal.basis(m);
        if (B.cols() == 0) continue;
        worst_ortho = std::max(worst_ortho,
                               (B.adjoint() * B - Eigen::MatrixXcd::Identity(B.cols(), B.cols())).norm());
    }
    run.record("brackets/ideal-orthonormality", worst_ortho <= 1e-8,
               "(max residual " + format_g17(worst_ortho) + ")");

    double worst_proj = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        FockVector v = random_fock_vector(rng, d, M);
        FockVector p1 = project_complement(ideal, v);
        FockVector p2 = project_complement(ideal, p1);
        worst_proj = std::max(worst_proj, (p2 - p1).norm() / (1.0 + v.norm()));
    }
    run.record("brackets/projector-idempotent", worst_proj <= 1e-10);

    if (M < 1) return; // the bracket checks need at least one graded step
    double worst_gap = 0.0;
    bool ordered = true;
    std::uniform_int_distribution<int> degree(1, std::min(4, M));
    for (int rep = 0; rep < 20; ++rep) {
        FreePoly p = random_homogeneous(rng, d, degree(rng));
        NormBracket b = quotient_norm_bracket(p, ideal, M);
        if (b.lower > b.upper + 1e-12) ordered = false;
        worst_gap = std::max(worst_gap, b.gap());
    }
    run.record("brackets/bracket-sandwich", ordered, "(max gap " + format_g17(worst_gap) + ")");
    run.record("brackets/homogeneous-collapse", worst_gap <= 1e-9, "(max gap " + format_g17(worst_gap) + ")");
}

inline void suite_tower(const ExperimentConfig& cfg, std::mt19937_64& rng, SuiteRun& run) {
    int d = cfg.d.value_or(2);
    int M = cfg.M.value_or(4);
    std::vector<double> radii = cfg.radii.empty() ? std::vector<double>{0.3, 0.6, 0.9} : cfg.radii;
    ExperimentConfig local = cfg;
    if (!local.d) local.d = d;
    GradedIdealBasis ideal = fixed_ideal(local, M);
    bool coeff_ok = true, mono_ok = true;
    for (int rep = 0; rep < 10; ++rep) {
        FreePoly F = random_poly(rng, d, std::min(4, M));
        TowerReport t = tower_check(F, radii, ideal, M);
        coeff_ok = coeff_ok && t.coeff_pass;
        mono_ok = mono_ok && t.monotone_pass;
    }
    run.record("tower/coefficient-compat", coeff_ok);
    run.record("tower/seminorm-monotone", mono_ok);
}

inline void suite_axioms(const ExperimentConfig& cfg, std::mt19937_64& rng, SuiteRun& run) {
    int d = cfg.d.value_or(2);
    int n = std::min(cfg.n, 4);
    int samples = std::min(cfg.samples, 100);
    bool ax_ok = true, hom_ok = true;
    std::uniform_real_distribution<double> cond(1.0, 100.0);
    for (int i = 0; i < samples; ++i) {
        FreePoly p = random_poly(rng, d, 3);
        MatrixTuple X = random_tuple(rng, d, n);
        MatrixTuple Y = random_tuple(rng, d, n);
        Eigen::MatrixXcd S = random_similarity(rng, n, cond(rng));
        AxiomReport rep = nc_axiom_check(p, X, Y, S);
        ax_ok = ax_ok && rep.pass;

        FreePoly q = random_poly(rng, d, 2);
        Eigen::MatrixXcd lhs = eval_poly(p * q, X);
        Eigen::MatrixXcd rhs = eval_poly(p, X) * eval_poly(q, X);
        double scale = 1.0 + op_norm(eval_poly(p, X)) * op_norm(eval_poly(q, X));
        if (op_norm(lhs - rhs) > 1e-10 * scale) hom_ok = false;
    }
    run.record("axioms/direct-sum-and-similarity", ax_ok);
    run.record("axioms/eval-multiplicative", hom_ok);
}

inline void suite_vn(const ExperimentConfig& cfg, std::mt19937_64& rng, SuiteRun& run) {
    int d = cfg.d.value_or(2);
    int n = std::min(cfg.n, 6);
    int samples = std::min(cfg.samples, 200);
    std::uniform_real_distribution<double> target(0.05, 0.99);
    bool ok = true;
    for (int i = 0; i < samples; ++i) {
        FreePoly p = random_poly(rng, d, 3);
        MatrixTuple X = sample_row_contraction(d, n, target(rng), rng());
        ok = ok && vn_check(p, X, cfg.ineq_slack).pass;
    }
    run.record("vn/inequality", ok);
}

inline void suite_contraction(const ExperimentConfig& cfg, std::mt19937_64& rng, SuiteRun& run) {
    IdealKind kind = cfg.ideal_kind && *cfg.ideal_kind == "q_commutator" ? IdealKind::q_commutator
                                                                         : IdealKind::commutator;
    FreePoly q12 = FreePoly::monomial(2, Word{{1, 2}}, 1.0);
    FreePoly gen = FreePoly::monomial(2, Word{{1, 2}}, 1.0) -
                   FreePoly::monomial(2, Word{{2, 1}}, kind == IdealKind::commutator ? 1.0 : cfg.q);
    std::vector<FreePoly> gens{gen};
    GradedIdealBasis ideal = saturate_ideal(gens, 2, cfg.rank_tol);
    int samples = std::min(cfg.samples, 200);
    bool ok = true;
    for (int i = 0; i < samples; ++i) {
        MatrixTuple X = sample_variety_tuple(kind, cfg.q, cfg.n, rng());
        ContractionReport rep = variety_contraction_check(q12, X, gens, ideal, cfg.ineq_slack);
        if (rep.verdict != Verdict::PASS) ok = false;
    }
    run.record("contraction/universal-bound", ok);
}

} // namespace detail

inline int cmd_suite(const ExperimentConfig& cfg, const RunOptions& opt) {
    detail::SuiteRun run;
    std::mt19937_64 rng(detail::effective_seed(cfg, opt));
    if (cfg.suites.empty()) {
        std::fprintf(stderr, "warning: no suites selected, nothing to check\n");
    } else {
        if (detail::wants(cfg, "brackets")) detail::suite_brackets(cfg, rng, run);
        if (detail::wants(cfg, "tower")) detail::suite_tower(cfg, rng, run);
        if (detail::wants(cfg, "axioms")) detail::suite_axioms(cfg, rng, run);
        if (detail::wants(cfg, "vn")) detail::suite_vn(cfg, rng, run);
        if (detail::wants(cfg, "contraction")) detail::suite_contraction(cfg, rng, run);
    }
    json out;
    out["checks"] = run.checks;
    out["failures"] = run.failures;
    out["results"] = std::move(run.results);
    out["pass"] = run.failures == 0;
    std::optional<std::string> path = detail::out_path(cfg, opt);
    if (path) write_text_file(*path, out.dump(2) + "\n");
    return run.failures == 0 ? 0 : 3;
}

} // namespace ncball
