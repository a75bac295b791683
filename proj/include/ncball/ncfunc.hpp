#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncball/fock.hpp"
#include "ncball/freealg.hpp"
#include "ncball/norms.hpp"

namespace ncball {

/// A point of the matrix universe: a d-tuple of complex n x n matrices.
struct MatrixTuple {
    int n = 0;
    int d = 0;
    std::vector<Eigen::MatrixXcd> X;

    MatrixTuple() = default;
    MatrixTuple(int n_, int d_) : n(n_), d(d_) {
        if (n < 1) throw std::invalid_argument("matrix size must be >= 1");
        if (d < 1) throw std::invalid_argument("tuple needs at least one matrix");
        X.assign(static_cast<std::size_t>(d), Eigen::MatrixXcd::Zero(n, n));
    }
    MatrixTuple(std::vector<Eigen::MatrixXcd> mats) : X(std::move(mats)) {
        if (X.empty()) throw std::invalid_argument("tuple needs at least one matrix");
        d = static_cast<int>(X.size());
        n = static_cast<int>(X.front().rows());
        if (n < 1) throw std::invalid_argument("matrix size must be >= 1");
        for (const auto& A : X)
            if (A.rows() != n || A.cols() != n) throw std::invalid_argument("tuple matrices must share a square size");
    }

    MatrixTuple scaled(double s) const {
        MatrixTuple out = *this;
        for (auto& A : out.X) A *= s;
        return out;
    }
};

/// Row norm ||sum X_j X_j^*||^{1/2}; a tuple is a strict row contraction of
/// radius r when this is < r.
inline double row_norm(const MatrixTuple& X) {
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(X.n, X.n);
    for (const auto& A : X.X) S += A * A.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().size() > 0 ? es.eigenvalues().maxCoeff() : 0.0;
    return std::sqrt(std::max(0.0, lmax));
}

inline Eigen::MatrixXcd eval_poly(const FreePoly& p, const MatrixTuple& X) {
    if (p.alphabet() != X.d) throw std::invalid_argument("alphabet mismatch");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(X.n, X.n);
    for (const auto& [w, c] : p.terms()) {
        if (w.size() == 0) {
            out += c * Eigen::MatrixXcd::Identity(X.n, X.n);
            continue;
        }
        Eigen::MatrixXcd prod = X.X[static_cast<std::size_t>(w.letters[0] - 1)];
        for (std::size_t i = 1; i < w.size(); ++i)
            prod = (prod * X.X[static_cast<std::size_t>(w.letters[i] - 1)]).eval();
        out += c * prod;
    }
    return out;
}

/// Partial sum of a graded series at a matrix point, with a certified
/// scalar remainder: the tail is dominated by sum_{k>K} y^k ||ev(F_k)||
/// where y is the row norm. The bound is summed until its increments are
/// negligible; crossing the blow-up threshold clears the finite flag.
struct SeriesValue {
    Eigen::MatrixXcd value;
    double tail_bound = 0.0;
    bool tail_finite = true;
};

inline SeriesValue eval_series_trunc(const std::function<FreePoly(int)>& coeff, const MatrixTuple& X, int K,
                                     double radius = 1.0, double blowup_threshold = 1e6) {
    if (K < 0) throw std::invalid_argument("cutoff must be >= 0");
    double y = row_norm(X);
    if (y >= radius)
        throw std::invalid_argument("row norm " + std::to_string(y) + " is not below the radius " +
                                    std::to_string(radius) + "; no convergence certificate");
    SeriesValue out;
    out.value = Eigen::MatrixXcd::Zero(X.n, X.n);
    for (int k = 0; k <= K; ++k) {
        FreePoly Fk = coeff(k);
        if (Fk.is_zero()) continue;
        if (Fk.degree() != k)
            throw std::invalid_argument("coefficient at index " + std::to_string(k) +
                                        " is not homogeneous of that degree");
        out.value += eval_poly(Fk, X);
    }
    double yk = std::pow(y, static_cast<double>(K) + 1.0);
    int quiet = 0;
    for (int k = K + 1; quiet < 3; ++k) {
        FreePoly Fk = coeff(k);
        double term = 0.0;
        if (!Fk.is_zero()) {
            if (Fk.degree() != k)
                throw std::invalid_argument("coefficient at index " + std::to_string(k) +
                                            " is not homogeneous of that degree");
            term = yk * homogeneous_anorm(Fk);
        }
        out.tail_bound += term;
        if (out.tail_bound > blowup_threshold) {
            out.tail_finite = false;
            break;
        }
        quiet = (term <= 1e-17 * (1.0 + out.tail_bound)) ? quiet + 1 : 0;
        yk *= y;
        if (k - K > 100000) {
            out.tail_finite = false;
            break;
        }
    }
    return out;
}

/// X lies on the variety of the generator set when every generator
/// evaluates to (numerical) zero.
inline bool in_variety(const MatrixTuple& X, const std::vector<FreePoly>& generators, double tol = 1e-10) {
    for (const auto& g : generators)
        if (op_norm(eval_poly(g, X)) > tol) return false;
    return true;
}

/// Direct-sum and similarity axioms of noncommutative polynomial functions,
/// checked against independently assembled right-hand sides.
struct AxiomReport {
    double direct_sum_err = 0.0;
    double similarity_err = 0.0;
    double cond_S = 0.0;
    double tol_direct = 0.0;
    double tol_similarity = 0.0;
    bool pass = false;
};

inline AxiomReport nc_axiom_check(const FreePoly& p, const MatrixTuple& X, const MatrixTuple& Y,
                                  const Eigen::MatrixXcd& S) {
    if (X.d != Y.d || p.alphabet() != X.d) throw std::invalid_argument("alphabet mismatch");
    if (S.rows() != X.n || S.cols() != X.n) throw std::invalid_argument("similarity size must match X");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(S);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin <= 0.0 || smax / smin > 1e14) throw std::invalid_argument("similarity matrix is numerically singular");

    AxiomReport rep;
    rep.cond_S = smax / smin;

    MatrixTuple Z(X.n + Y.n, X.d);
    for (int j = 0; j < X.d; ++j) {
        Z.X[static_cast<std::size_t>(j)].topLeftCorner(X.n, X.n) = X.X[static_cast<std::size_t>(j)];
        Z.X[static_cast<std::size_t>(j)].bottomRightCorner(Y.n, Y.n) = Y.X[static_cast<std::size_t>(j)];
    }
    Eigen::MatrixXcd pX = eval_poly(p, X);
    Eigen::MatrixXcd pY = eval_poly(p, Y);
    Eigen::MatrixXcd direct = eval_poly(p, Z);
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(Z.n, Z.n);
    expected.topLeftCorner(X.n, X.n) = pX;
    expected.bottomRightCorner(Y.n, Y.n) = pY;
    rep.direct_sum_err = op_norm(direct - expected);

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S);
    Eigen::MatrixXcd Sinv = lu.inverse();
    MatrixTuple W(X.n, X.d);
    for (int j = 0; j < X.d; ++j) W.X[static_cast<std::size_t>(j)] = S * X.X[static_cast<std::size_t>(j)] * Sinv;
    Eigen::MatrixXcd lhs = eval_poly(p, W);
    Eigen::MatrixXcd rhs = S * pX * Sinv;
    rep.similarity_err = op_norm(lhs - rhs);

    double mag = 1.0 + std::max(op_norm(pX), op_norm(pY));
    rep.tol_direct = 1e-10 * mag;
    rep.tol_similarity = 1e-10 * mag * rep.cond_S;
    rep.pass = rep.direct_sum_err <= rep.tol_direct && rep.similarity_err <= rep.tol_similarity;
    return rep;
}

/// Von Neumann inequality consequence: ||p(X)|| is dominated by the graded
/// coefficient norms weighted by powers of the row norm.
struct VnReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double row = 0.0;
    bool pass = false;
};

inline VnReport vn_check(const FreePoly& p, const MatrixTuple& X, double slack = 1e-9) {
    if (p.alphabet() != X.d) throw std::invalid_argument("alphabet mismatch");
    VnReport rep;
    rep.row = row_norm(X);
    rep.lhs = op_norm(eval_poly(p, X));
    double yk = 1.0;
    for (int k = 0; k <= p.degree(); ++k) {
        FreePoly pk = homogeneous_component(p, k);
        if (!pk.is_zero()) rep.rhs += yk * homogeneous_anorm(pk);
        yk *= rep.row;
    }
    rep.pass = rep.lhs <= rep.rhs + slack;
    return rep;
}

/// Level-1 contraction consequence of the universal property: a row
/// contraction annihilating the ideal cannot beat the quotient norm. When
/// the preconditions fail the conclusion is untestable, hence INAPPLICABLE
/// rather than FAIL.
enum class Verdict { PASS, FAIL, INAPPLICABLE };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::FAIL: return "FAIL";
        default: return "INAPPLICABLE";
    }
}

struct ContractionReport {
    Verdict verdict = Verdict::INAPPLICABLE;
    double lhs = 0.0;
    double upper = 0.0;
    double row = 0.0;
    bool on_variety = false;
    std::string note;
};

inline ContractionReport variety_contraction_check(const FreePoly& q, const MatrixTuple& X,
                                                   const std::vector<FreePoly>& generators,
                                                   const GradedIdealBasis& ideal, double slack = 1e-9) {
    ContractionReport rep;
    rep.row = row_norm(X);
    rep.on_variety = in_variety(X, generators, 1e-10);
    if (rep.row > 1.0 + 1e-12) {
        rep.note = "row norm exceeds 1";
        return rep;
    }
    if (!rep.on_variety) {
        rep.note = "tuple does not annihilate the generators";
        return rep;
    }
    rep.lhs = op_norm(eval_poly(q, X));
    rep.upper = quotient_norm_upper(q, ideal);
    rep.verdict = rep.lhs <= rep.upper + slack ? Verdict::PASS : Verdict::FAIL;
    return rep;
}

/// Deterministic samplers for test batteries.
enum class IdealKind { commutator, q_commutator };

inline MatrixTuple sample_row_contraction(int d, int n, double target_row, std::uint64_t seed) {
    if (n < 1 || n > 16) throw std::invalid_argument("matrix size out of the desk-scale range [1,16]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixTuple X(n, d);
    for (auto& A : X.X)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) A(r, c) = Complex(gauss(rng), gauss(rng));
    double y = row_norm(X);
    return X.scaled(target_row / y);
}

inline MatrixTuple sample_variety_tuple(IdealKind kind, double q, int n, std::uint64_t seed) {
    if (n < 1 || n > 16) throw std::invalid_argument("matrix size out of the desk-scale range [1,16]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixTuple X(n, 2);
    if (kind == IdealKind::commutator) {
        // simultaneously diagonal tuples commute exactly
        for (auto& A : X.X)
            for (int i = 0; i < n; ++i) A(i, i) = Complex(gauss(rng), gauss(rng));
    } else if (n == 1) {
        // scalars satisfy x1 x2 = q x2 x1 iff (1-q) x1 x2 = 0; take x2 = 0
        X.X[0](0, 0) = Complex(gauss(rng), gauss(rng));
    } else {
        // canonical relation-satisfying pair: X1 = a E_12, X2 = diag(u, qu),
        // padded with zeros; both products equal a q u E_12 exactly
        Complex a(gauss(rng), gauss(rng));
        Complex u(gauss(rng), gauss(rng));
        X.X[0](0, 1) = a;
        X.X[1](0, 0) = u;
        X.X[1](1, 1) = q * u;
    }
    double y = row_norm(X);
    if (y == 0.0) {
        X.X[0](0, 0) = 1.0;
        y = 1.0;
    }
    return X.scaled(0.9 / y);
}

} // namespace ncball
