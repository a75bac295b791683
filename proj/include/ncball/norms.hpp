#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncball/fock.hpp"
#include "ncball/freealg.hpp"

namespace ncball {

/// Thrown when an iterative routine fails to reach its tolerance within the
/// iteration budget. The CLI maps this to a dedicated exit code.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double power_iteration_norm(const Eigen::MatrixXcd& A, double rel_tol, int max_iter) {
    // largest singular value via power iteration on A^*A, deterministic
    // all-ones start
    Eigen::Index n = A.cols();
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd w = A.adjoint() * (A * v);
        double lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
        double sigma = std::sqrt(lambda);
        if (it > 0 && std::abs(sigma - prev) <= rel_tol * std::max(1.0, sigma)) return sigma;
        prev = sigma;
    }
    throw NonConvergence("operator norm power iteration did not converge within " +
                         std::to_string(max_iter) + " iterations");
}

} // namespace detail

/// Largest singular value. Dense SVD for desk-scale matrices, power
/// iteration on A^*A above the threshold. The empty matrix has norm 0.
inline double op_norm(const Eigen::MatrixXcd& A, double rel_tol = 1e-10, int max_iter = 10000,
                      Eigen::Index dense_threshold = 1024) {
    if (A.rows() == 0 || A.cols() == 0) return 0.0;
    if (A.rows() <= dense_threshold && A.cols() <= dense_threshold) {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
        return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    }
    return detail::power_iteration_norm(A, rel_tol, max_iter);
}

inline double op_norm(const BlockOperator& op, double rel_tol = 1e-10, int max_iter = 10000) {
    return op_norm(op.mat, rel_tol, max_iter);
}

/// For homogeneous p the operator p(s) acts as v -> Ev(p) (x) v, so its norm
/// on the full Fock space is the Euclidean length of the coefficient vector.
/// Distinct words are orthonormal slots, so no tensor-power vector is ever
/// materialized (degrees in the hundreds stay cheap).
inline double homogeneous_anorm(const FreePoly& p) {
    if (p.is_zero()) throw std::invalid_argument("zero polynomial has no degree");
    if (!p.is_homogeneous()) throw std::invalid_argument("polynomial is not homogeneous");
    double s = 0.0;
    for (const auto& [w, c] : p.terms()) s += std::norm(c);
    return std::sqrt(s);
}

/// Quotient norm of a homogeneous class p + I: the distance from Ev(p) to
/// the saturated degree block, computed as the length of the projection onto
/// the orthogonal complement.
inline double quotient_norm_homog(const FreePoly& p, const GradedIdealBasis& ideal) {
    if (p.is_zero()) return 0.0;
    if (!p.is_homogeneous()) throw std::invalid_argument("polynomial is not homogeneous");
    int m = p.degree();
    if (m > ideal.cutoff())
        throw std::invalid_argument("degree " + std::to_string(m) + " exceeds ideal saturation " +
                                    std::to_string(ideal.cutoff()));
    if (p.alphabet() != ideal.alphabet()) throw std::invalid_argument("alphabet mismatch");
    FockVector v = ev(p);
    Eigen::VectorXcd block = v.blocks[static_cast<std::size_t>(m)];
    const Eigen::MatrixXcd& B = ideal.basis(m);
    if (B.cols() > 0) block -= B * (B.adjoint() * block);
    return block.norm();
}

/// Certified two-sided enclosure of a quotient norm.
struct NormBracket {
    double lower = 0.0;
    double upper = 0.0;
    std::string lower_method;
    std::string upper_method;
    double gap() const { return upper - lower; }
};

namespace detail {

/// Polynomials in a single letter compress to the span of that letter's
/// tensor powers, where every creation block is the coordinate shift. The
/// model is the (K+1)-square lower-triangular band matrix with the degree-k
/// coefficient on the k-th subdiagonal.
inline Eigen::MatrixXcd single_letter_model(const FreePoly& p, int j, int K) {
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(K + 1, K + 1);
    for (const auto& [w, c] : p.terms()) {
        int k = static_cast<int>(w.size());
        for (int i : w.letters)
            if (i != j) throw std::invalid_argument("polynomial is not supported on a single letter");
        for (int i = 0; i + k <= K; ++i) T(i + k, i) += c;
    }
    return T;
}

} // namespace detail

/// Triangle-inequality upper bound on ||p + I||: the sum of the exact
/// graded distances of the homogeneous components. Tight for homogeneous p.
inline double quotient_norm_upper(const FreePoly& p, const GradedIdealBasis& ideal) {
    double s = 0.0;
    for (int m = 0; m <= p.degree(); ++m) {
        FreePoly pm = homogeneous_component(p, m);
        if (pm.is_zero()) continue;
        s += quotient_norm_homog(pm, ideal);
    }
    return s;
}

/// Lower bound: the norm of the compression of p(s^I) to degrees <= M,
/// which is monotone nondecreasing in M. Upper bound: the triangle
/// inequality across homogeneous components, each measured exactly by the
/// graded distance. For homogeneous p with M = deg p the two coincide up to
/// roundoff. Polynomials in one letter modulo the zero ideal take a
/// band-matrix shortcut that handles large M.
inline NormBracket quotient_norm_bracket(const FreePoly& p, const GradedIdealBasis& ideal, int M) {
    if (p.alphabet() != ideal.alphabet()) throw std::invalid_argument("alphabet mismatch");
    if (p.degree() > M)
        throw std::invalid_argument("polynomial degree " + std::to_string(p.degree()) +
                                    " exceeds truncation " + std::to_string(M));
    NormBracket out;
    std::optional<int> j = p.single_letter();
    if (ideal.is_zero_ideal() && j.has_value()) {
        out.lower = op_norm(detail::single_letter_model(p, *j == 0 ? 1 : *j, M));
        out.lower_method = "single-letter-band";
    } else {
        out.lower = op_norm(apply_poly(compressed_tuple(ideal, M), p));
        out.lower_method = "compressed-truncation";
    }
    out.upper = quotient_norm_upper(p, ideal);
    out.upper_method = "graded-triangle";
    if (out.upper < out.lower) out.upper = out.lower; // roundoff guard on the enclosure
    return out;
}

/// Truncated seminorm ||F||_x at radius x: the norm of the compression of
/// (F o x)(s^I) to degrees <= M, where (F o x) rescales degree k by x^k.
/// Monotone nondecreasing in both M and x.
inline double seminorm_trunc(const FreePoly& F, double x, const GradedIdealBasis& ideal, int M) {
    if (!(x > 0.0)) throw std::invalid_argument("radius must be positive");
    if (F.degree() > M)
        throw std::invalid_argument("polynomial degree " + std::to_string(F.degree()) +
                                    " exceeds truncation " + std::to_string(M));
    FreePoly scaled = scale_series(F, x);
    std::optional<int> j = F.single_letter();
    if (ideal.is_zero_ideal() && j.has_value())
        return op_norm(detail::single_letter_model(scaled, *j == 0 ? 1 : *j, M));
    return op_norm(apply_poly(compressed_tuple(ideal, M), scaled));
}

/// Partial sums of sum_k x^k ||F_k(s)|| for a coefficient sequence, the
/// majorant whose finiteness certifies membership in the x-ball algebra.
/// The sequence is monotone; crossing the blow-up threshold stops the scan
/// and raises the divergence flag. Convergence itself is left to the caller.
struct MajorantReport {
    std::vector<double> partial_sums;
    bool diverged = false;
    std::optional<int> blowup_index;
    double blowup_threshold = 0.0;
};

inline MajorantReport membership_majorant(const std::function<FreePoly(int)>& coeff, double x, int K,
                                          double blowup_threshold = 1e6) {
    if (!(x >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
    if (K < 0) throw std::invalid_argument("cutoff must be >= 0");
    MajorantReport rep;
    rep.blowup_threshold = blowup_threshold;
    rep.partial_sums.reserve(static_cast<std::size_t>(K) + 1);
    double sum = 0.0;
    double xk = 1.0;
    for (int k = 0; k <= K; ++k) {
        FreePoly Fk = coeff(k);
        if (!Fk.is_zero()) {
            if (Fk.degree() != k)
                throw std::invalid_argument("coefficient at index " + std::to_string(k) +
                                            " is not homogeneous of that degree");
            sum += xk * homogeneous_anorm(Fk);
        }
        rep.partial_sums.push_back(sum);
        if (sum > blowup_threshold) {
            rep.diverged = true;
            rep.blowup_index = k;
            break;
        }
        xk *= x;
    }
    return rep;
}

} // namespace ncball
