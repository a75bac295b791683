#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ncball/fock.hpp"
#include "ncball/freealg.hpp"
#include "ncball/norms.hpp"

namespace ncball {

/// Real polynomial in the deformation parameter, dense coefficients from
/// the constant term up, evaluated by Horner.
struct RealPoly {
    std::vector<double> coeffs;

    double operator()(double t) const {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
        return acc;
    }
    bool is_zero() const {
        for (double c : coeffs)
            if (c != 0.0) return false;
        return true;
    }
};

/// One homogeneous generator whose coefficients vary polynomially in t.
/// All words share a fixed length, so every instantiation stays homogeneous
/// (possibly the zero polynomial, where the ideal degenerates).
class GeneratorTemplate {
public:
    GeneratorTemplate(int d, std::vector<std::pair<Word, RealPoly>> terms)
        : d_(d), terms_(std::move(terms)) {
        if (terms_.empty()) throw std::invalid_argument("generator template needs at least one term");
        deg_ = static_cast<int>(terms_.front().first.size());
        if (deg_ < 1) throw std::invalid_argument("generator template words must have length >= 1");
        for (const auto& [w, c] : terms_) {
            if (static_cast<int>(w.size()) != deg_)
                throw std::invalid_argument("generator template mixes word lengths");
            check_letters(w, d_);
        }
    }

    int alphabet() const { return d_; }
    int degree() const { return deg_; }
    const std::vector<std::pair<Word, RealPoly>>& terms() const { return terms_; }

    FreePoly at(double t) const {
        FreePoly g = FreePoly::zero(d_);
        for (const auto& [w, c] : terms_) g.add_term(w, Complex(c(t), 0.0));
        return g;
    }

private:
    int d_;
    int deg_;
    std::vector<std::pair<Word, RealPoly>> terms_;
};

/// A one-parameter family of graded ideals I_t over [t_min, t_max], given
/// by generator templates. Instantiation evaluates coefficients and hands
/// the generators to saturation.
class IdealFamily {
public:
    IdealFamily(int d, double t_min, double t_max, std::vector<GeneratorTemplate> gens)
        : d_(d), t_min_(t_min), t_max_(t_max), gens_(std::move(gens)) {
        if (d < 1) throw std::invalid_argument("alphabet size must be >= 1");
        if (!(t_min_ < t_max_)) throw std::invalid_argument("parameter domain must have t_min < t_max");
        if (gens_.empty()) throw std::invalid_argument("ideal family needs at least one generator template");
        for (const auto& g : gens_)
            if (g.alphabet() != d_) throw std::invalid_argument("generator template alphabet mismatch");
    }

    int alphabet() const { return d_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    int max_degree() const {
        int m = 0;
        for (const auto& g : gens_) m = std::max(m, g.degree());
        return m;
    }

    std::vector<FreePoly> instantiate(double t) const {
        if (t < t_min_ - 1e-12 || t > t_max_ + 1e-12)
            throw std::invalid_argument("parameter " + std::to_string(t) + " outside family domain");
        std::vector<FreePoly> out;
        out.reserve(gens_.size());
        for (const auto& g : gens_) out.push_back(g.at(t));
        return out;
    }

    GradedIdealBasis saturate(double t, int M, double rank_tol = 1e-10) const {
        std::vector<FreePoly> gens = instantiate(t);
        bool all_zero = true;
        for (const auto& g : gens)
            if (!g.is_zero()) all_zero = false;
        if (all_zero) return GradedIdealBasis::zero(d_, M);
        return saturate_ideal(gens, M, rank_tol);
    }

private:
    int d_;
    double t_min_;
    double t_max_;
    std::vector<GeneratorTemplate> gens_;
};

/// The q-commutator family <z1 z2 - t z2 z1> on two letters, t in [a, b].
inline IdealFamily family_qcommutator(double a = 0.0, double b = 1.0) {
    GeneratorTemplate g(2, {{Word{{1, 2}}, RealPoly{{1.0}}}, {Word{{2, 1}}, RealPoly{{0.0, -1.0}}}});
    return IdealFamily(2, a, b, {g});
}

/// Value of the norm field at one grid point: exact when p is homogeneous
/// (graded distance), otherwise a bracket.
struct FieldValue {
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
};

struct NormField {
    std::vector<double> grid;
    std::vector<FieldValue> values;
    int M = 0;
    double rank_tol = 0.0;
};

namespace detail {

inline void check_grid(const IdealFamily& family, const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < family.t_min() - 1e-12 || grid[i] > family.t_max() + 1e-12)
            throw std::invalid_argument("grid point " + std::to_string(grid[i]) + " outside family domain");
        if (i > 0 && !(grid[i - 1] < grid[i]))
            throw std::invalid_argument("grid must be strictly increasing");
    }
}

/// Runs fn(i) for i in [0, n) on n_threads workers with strided assignment.
/// Each index writes only its own slot, so the result does not depend on
/// the thread count; the first worker exception (by thread rank) rethrows.
template <typename Fn>
inline void parallel_indices(std::size_t n, int n_threads, Fn&& fn) {
    if (n_threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

/// Evaluates t -> ||p + I_t|| over the grid. Homogeneous p gives exact
/// values; general p gives brackets at truncation M. Grid points are
/// independent, so the optional parallelism cannot change the numbers.
inline NormField norm_field(const IdealFamily& family, const FreePoly& p, const std::vector<double>& grid,
                            int M, double rank_tol = 1e-10, int n_threads = 1) {
    detail::check_grid(family, grid);
    if (p.alphabet() != family.alphabet()) throw std::invalid_argument("alphabet mismatch");
    if (p.degree() > M)
        throw std::invalid_argument("polynomial degree " + std::to_string(p.degree()) +
                                    " exceeds truncation " + std::to_string(M));
    NormField field;
    field.grid = grid;
    field.values.assign(grid.size(), FieldValue{});
    field.M = M;
    field.rank_tol = rank_tol;
    bool homog = p.is_zero() || p.is_homogeneous();
    detail::parallel_indices(grid.size(), n_threads, [&](std::size_t i) {
        GradedIdealBasis ideal = family.saturate(grid[i], M, rank_tol);
        if (homog) {
            double v = quotient_norm_homog(p, ideal);
            field.values[i] = FieldValue{v, v, true};
        } else {
            NormBracket b = quotient_norm_bracket(p, ideal, M);
            field.values[i] = FieldValue{b.lower, b.upper, false};
        }
    });
    return field;
}

/// Grid-level continuity audit. For exact values the jump is the plain
/// difference; for brackets it is the pessimistic gap between enclosures,
/// which is zero whenever the intervals overlap.
struct ContinuityFlag {
    std::size_t index = 0; // flag sits between grid[index] and grid[index+1]
    double jump = 0.0;
};

struct ContinuityReport {
    double threshold = 0.0;
    double max_jump = 0.0;
    std::vector<ContinuityFlag> flags;
    bool pass() const { return flags.empty(); }
};

inline ContinuityReport continuity_report(const NormField& field, double jump_threshold) {
    if (!(jump_threshold > 0.0)) throw std::invalid_argument("jump threshold must be positive");
    ContinuityReport rep;
    rep.threshold = jump_threshold;
    for (std::size_t i = 0; i + 1 < field.values.size(); ++i) {
        const FieldValue& a = field.values[i];
        const FieldValue& b = field.values[i + 1];
        double jump;
        if (a.exact && b.exact)
            jump = std::abs(b.lower - a.lower);
        else
            jump = std::max({0.0, b.lower - a.upper, a.lower - b.upper});
        rep.max_jump = std::max(rep.max_jump, jump);
        if (jump > jump_threshold) rep.flags.push_back(ContinuityFlag{i, jump});
    }
    return rep;
}

/// Degree-m ideal dimensions along the grid. The verdict flags isolated
/// down-spikes (an interior point strictly below both neighbors), the one
/// pattern a semicontinuous dimension function cannot produce.
struct KernelDimReport {
    int degree = 0;
    std::vector<std::size_t> dims;
    bool semicontinuous = true;
};

inline KernelDimReport kernel_dims(const IdealFamily& family, const std::vector<double>& grid, int m,
                                   double rank_tol = 1e-10, int n_threads = 1) {
    detail::check_grid(family, grid);
    if (m < family.max_degree())
        throw std::invalid_argument("degree below the family's generator degree");
    KernelDimReport rep;
    rep.degree = m;
    rep.dims.assign(grid.size(), 0);
    detail::parallel_indices(grid.size(), n_threads, [&](std::size_t i) {
        rep.dims[i] = family.saturate(grid[i], m, rank_tol).dim(m);
    });
    for (std::size_t i = 1; i + 1 < rep.dims.size(); ++i)
        if (rep.dims[i] < std::min(rep.dims[i - 1], rep.dims[i + 1])) rep.semicontinuous = false;
    return rep;
}

/// One point on the Grassmannian path: the orthonormal basis of the
/// degree-m ideal block and, when the ambient minor count is affordable,
/// the gauge-fixed Pluecker coordinate vector.
struct GrassmannPoint {
    double t = 0.0;
    std::size_t k = 0;
    Eigen::MatrixXcd basis;
    std::optional<Eigen::VectorXcd> plucker;
};

/// Chordal distance between equal-dimensional subspaces spanned by
/// orthonormal columns: the sine of the largest principal angle.
inline double chordal_distance(const Eigen::MatrixXcd& B1, const Eigen::MatrixXcd& B2) {
    if (B1.cols() != B2.cols()) throw std::invalid_argument("subspace dimensions differ");
    if (B1.rows() != B2.rows()) throw std::invalid_argument("ambient dimensions differ");
    if (B1.cols() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B1.adjoint() * B2);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    smin = std::clamp(smin, 0.0, 1.0);
    return std::sqrt(1.0 - smin * smin);
}

namespace detail {

inline std::optional<std::size_t> binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
    if (k > n) return std::size_t{0};
    k = std::min(k, n - k);
    std::size_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i; // exact: the partial product is C(n-k+i, i)
        if (c > cap) return std::nullopt;
    }
    return c;
}

/// Pluecker coordinates: k x k minors over lexicographic row subsets, then
/// a phase gauge (first sizable coordinate made real positive) and unit
/// normalization.
inline Eigen::VectorXcd plucker_coordinates(const Eigen::MatrixXcd& B) {
    std::size_t n = static_cast<std::size_t>(B.rows());
    std::size_t k = static_cast<std::size_t>(B.cols());
    if (k == 0) {
        Eigen::VectorXcd v(1);
        v(0) = 1.0;
        return v;
    }
    std::vector<std::size_t> rows(k);
    for (std::size_t i = 0; i < k; ++i) rows[i] = i;
    std::vector<Complex> minors;
    Eigen::MatrixXcd sub(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    bool more = true;
    while (more) {
        for (std::size_t i = 0; i < k; ++i)
            sub.row(static_cast<Eigen::Index>(i)) = B.row(static_cast<Eigen::Index>(rows[i]));
        minors.push_back(sub.determinant());
        more = false;
        for (std::size_t i = k; i-- > 0;) {
            if (rows[i] < n - k + i) { // lex successor: bump and reset the tail
                ++rows[i];
                for (std::size_t j = i + 1; j < k; ++j) rows[j] = rows[j - 1] + 1;
                more = true;
                break;
            }
        }
    }
    Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(minors.data(), static_cast<Eigen::Index>(minors.size()));
    double vmax = v.cwiseAbs().maxCoeff();
    if (vmax > 0.0) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (std::abs(v(i)) > 1e-12 * vmax) {
                v *= std::conj(v(i)) / std::abs(v(i));
                break;
            }
        v /= v.norm();
    }
    return v;
}

} // namespace detail

struct GrassmannPathReport {
    int degree = 0;
    std::size_t k = 0;
    std::vector<GrassmannPoint> points;
    std::vector<double> chordal;      // adjacent pairs
    std::vector<double> plucker_dist; // empty when minors were not affordable
    double max_chordal = 0.0;
    double modulus = 0.0;
    bool pass = false;
};

/// Walks the degree-m ideal blocks along the grid as a path on the
/// Grassmannian. The dimension must not jump; a jump is reported as an
/// error naming the offending pair. Adjacent chordal distances within the
/// modulus give PASS. Pluecker vectors are attached when the minor count
/// stays under the cap; their pairwise distance is phase-invariant.
inline GrassmannPathReport grassmann_path(const IdealFamily& family, const std::vector<double>& grid, int m,
                                          double modulus, double rank_tol = 1e-10,
                                          std::size_t plucker_cap = 100000, int n_threads = 1) {
    detail::check_grid(family, grid);
    if (!(modulus > 0.0)) throw std::invalid_argument("continuity modulus must be positive");
    GrassmannPathReport rep;
    rep.degree = m;
    rep.modulus = modulus;
    rep.points.assign(grid.size(), GrassmannPoint{});
    detail::parallel_indices(grid.size(), n_threads, [&](std::size_t i) {
        GradedIdealBasis ideal = family.saturate(grid[i], m, rank_tol);
        GrassmannPoint pt;
        pt.t = grid[i];
        pt.basis = ideal.basis(m);
        pt.k = static_cast<std::size_t>(pt.basis.cols());
        rep.points[i] = std::move(pt);
    });
    rep.k = rep.points.front().k;
    for (std::size_t i = 0; i < rep.points.size(); ++i)
        if (rep.points[i].k != rep.k)
            throw std::invalid_argument("ideal dimension jumps between t=" + std::to_string(rep.points.front().t) +
                                        " (dim " + std::to_string(rep.k) + ") and t=" +
                                        std::to_string(rep.points[i].t) + " (dim " + std::to_string(rep.points[i].k) +
                                        "); the path leaves the Grassmannian component");

    std::size_t ambient = degree_dim(family.alphabet(), m);
    bool with_plucker = detail::binomial_capped(ambient, rep.k, plucker_cap).has_value();
    if (with_plucker)
        detail::parallel_indices(rep.points.size(), n_threads, [&](std::size_t i) {
            rep.points[i].plucker = detail::plucker_coordinates(rep.points[i].basis);
        });

    for (std::size_t i = 0; i + 1 < rep.points.size(); ++i) {
        double c = chordal_distance(rep.points[i].basis, rep.points[i + 1].basis);
        rep.chordal.push_back(c);
        rep.max_chordal = std::max(rep.max_chordal, c);
        if (with_plucker) {
            double ip = std::abs(rep.points[i].plucker->dot(*rep.points[i + 1].plucker));
            rep.plucker_dist.push_back(std::sqrt(std::max(0.0, 2.0 - 2.0 * std::min(ip, 1.0))));
        }
    }
    rep.pass = rep.max_chordal <= modulus;
    return rep;
}

/// Strong-operator continuity probe: for fixed degree-m vectors v the map
/// t -> p_{I_t} v should move by at most the bound between adjacent grid
/// points.
struct StrongContinuityEntry {
    int degree = 0;
    std::size_t probe = 0;
    double max_increment = 0.0;
};

struct StrongContinuityReport {
    double bound = 0.0;
    std::vector<StrongContinuityEntry> entries;
    bool pass = true;
};

inline StrongContinuityReport strong_continuity_check(const IdealFamily& family, const std::vector<double>& grid,
                                                      const std::vector<FreePoly>& probes, int m_max, double bound,
                                                      double rank_tol = 1e-10) {
    detail::check_grid(family, grid);
    if (probes.empty()) throw std::invalid_argument("no probe vectors given");
    if (!(bound > 0.0)) throw std::invalid_argument("continuity bound must be positive");
    for (const auto& p : probes) {
        if (p.alphabet() != family.alphabet()) throw std::invalid_argument("probe alphabet mismatch");
        if (p.degree() > m_max) throw std::invalid_argument("probe degree exceeds requested maximum");
    }
    StrongContinuityReport rep;
    rep.bound = bound;
    std::vector<GradedIdealBasis> ideals;
    ideals.reserve(grid.size());
    for (double t : grid) ideals.push_back(family.saturate(t, m_max, rank_tol));
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        FockVector v = ev(probes[pi], m_max);
        for (int m = 1; m <= m_max; ++m) {
            const Eigen::VectorXcd& vm = v.blocks[static_cast<std::size_t>(m)];
            if (vm.norm() == 0.0) continue;
            StrongContinuityEntry entry{m, pi, 0.0};
            Eigen::VectorXcd prev;
            for (std::size_t i = 0; i < ideals.size(); ++i) {
                Eigen::VectorXcd proj = vm;
                const Eigen::MatrixXcd& B = ideals[i].basis(m);
                if (B.cols() > 0) proj -= B * (B.adjoint() * vm);
                if (i > 0) entry.max_increment = std::max(entry.max_increment, (proj - prev).norm());
                prev = std::move(proj);
            }
            rep.entries.push_back(entry);
            if (entry.max_increment > bound) rep.pass = false;
        }
    }
    return rep;
}

/// The restriction homomorphism between ball radii 0 < x < y: degree k is
/// rescaled by (x/y)^k. Composable: going y -> x directly agrees with
/// y -> w -> x.
inline FreePoly scaling_map(const FreePoly& p, double x, double y) {
    if (!(0.0 < x && x < y)) throw std::invalid_argument("scaling_map needs radii 0 < x < y");
    return scale_series(p, x / y);
}

/// Consistency audit for the tower of truncated seminorms along increasing
/// radii: coefficient compatibility of the scalings and monotonicity of the
/// seminorms.
struct TowerReport {
    std::vector<double> radii;
    std::vector<double> seminorms;
    double max_coeff_mismatch = 0.0;
    bool coeff_bitwise = true;
    bool coeff_pass = true;
    bool monotone_pass = true;
    bool pass() const { return coeff_pass && monotone_pass; }
};

inline TowerReport tower_check(const FreePoly& F, const std::vector<double>& radii,
                               const GradedIdealBasis& ideal, int M) {
    if (radii.size() < 1) throw std::invalid_argument("tower_check needs at least one radius");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw std::invalid_argument("radii must be positive");
        if (i > 0 && !(radii[i - 1] < radii[i])) throw std::invalid_argument("radii must be strictly increasing");
    }
    TowerReport rep;
    rep.radii = radii;
    double coeff_scale = 0.0;
    for (const auto& [w, c] : F.terms()) coeff_scale = std::max(coeff_scale, std::abs(c));
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        double x = radii[i], y = radii[i + 1];
        FreePoly direct = scale_series(F, x);
        FreePoly composed = scaling_map(scale_series(F, y), x, y);
        FreePoly diff = direct - composed;
        double mism = 0.0;
        for (const auto& [w, c] : diff.terms()) mism = std::max(mism, std::abs(c));
        rep.max_coeff_mismatch = std::max(rep.max_coeff_mismatch, mism);
        if (mism != 0.0) rep.coeff_bitwise = false;
        if (mism > 1e-14 * (1.0 + coeff_scale)) rep.coeff_pass = false;
    }
    rep.seminorms.reserve(radii.size());
    for (double x : radii) rep.seminorms.push_back(seminorm_trunc(F, x, ideal, M));
    for (std::size_t i = 0; i + 1 < rep.seminorms.size(); ++i)
        if (rep.seminorms[i] > rep.seminorms[i + 1] + 1e-12) rep.monotone_pass = false;
    return rep;
}

} // namespace ncball
