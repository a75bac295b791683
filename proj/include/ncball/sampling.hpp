#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "ncball/fock_vector.hpp"
#include "ncball/freealg.hpp"
#include "ncball/ncfunc.hpp"

namespace ncball {

/// Seeded generators for test batteries. Everything here is a pure function
/// of the RNG state, so a fixed seed fixes the whole battery.

inline Complex random_gauss(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    double re = g(rng);
    double im = g(rng);
    return Complex(re, im);
}

inline Word random_word(std::mt19937_64& rng, int d, int len) {
    std::uniform_int_distribution<int> letter(1, d);
    Word w;
    w.letters.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) w.letters.push_back(letter(rng));
    return w;
}

inline FreePoly random_homogeneous(std::mt19937_64& rng, int d, int deg, int max_terms = 5) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    FreePoly p = FreePoly::zero(d);
    int n = nterms(rng);
    for (int i = 0; i < n; ++i) p.add_term(random_word(rng, d, deg), random_gauss(rng));
    if (p.is_zero()) p.add_term(random_word(rng, d, deg), Complex(1.0, 0.0)); // collisions cannot zero it out
    return p;
}

inline FreePoly random_poly(std::mt19937_64& rng, int d, int max_deg, int max_terms_per_degree = 3) {
    FreePoly p = FreePoly::zero(d);
    std::uniform_int_distribution<int> nterms(1, max_terms_per_degree);
    for (int k = 0; k <= max_deg; ++k) {
        int n = nterms(rng);
        for (int i = 0; i < n; ++i) p.add_term(random_word(rng, d, k), random_gauss(rng));
    }
    return p;
}

inline FockVector random_fock_vector(std::mt19937_64& rng, int d, int M) {
    FockVector v(d, M);
    for (auto& block : v.blocks)
        for (Eigen::Index i = 0; i < block.size(); ++i) block(i) = random_gauss(rng);
    return v;
}

inline Eigen::MatrixXcd random_gauss_matrix(std::mt19937_64& rng, int rows, int cols) {
    Eigen::MatrixXcd A(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = random_gauss(rng);
    return A;
}

inline Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int n) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_gauss_matrix(rng, n, n));
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

/// Invertible matrix with exactly the requested condition number: unitary
/// factors around a prescribed singular spectrum.
inline Eigen::MatrixXcd random_similarity(std::mt19937_64& rng, int n, double cond) {
    Eigen::MatrixXcd U = random_unitary(rng, n);
    Eigen::MatrixXcd V = random_unitary(rng, n);
    Eigen::VectorXd sigma(n);
    sigma(0) = 1.0;
    if (n > 1) {
        sigma(n - 1) = 1.0 / cond;
        std::uniform_real_distribution<double> mid(1.0 / cond, 1.0);
        for (int i = 1; i + 1 < n; ++i) sigma(i) = mid(rng);
    }
    return U * sigma.asDiagonal() * V.adjoint();
}

inline MatrixTuple random_tuple(std::mt19937_64& rng, int d, int n) {
    MatrixTuple X(n, d);
    for (auto& A : X.X) A = random_gauss_matrix(rng, n, n);
    return X;
}

} // namespace ncball
