#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ncball/word.hpp"

namespace ncball {

/// Element of the truncated full Fock space: one dense complex vector per
/// degree 0..M, the degree-k block living in C^(d^k). The squared norm is
/// the sum of the squared block norms.
struct FockVector {
    int d = 1;
    std::vector<Eigen::VectorXcd> blocks; // blocks[k] has size d^k

    FockVector() = default;
    FockVector(int d_, int M) : d(d_) {
        if (M < 0) throw std::invalid_argument("FockVector cutoff must be >= 0");
        blocks.reserve(static_cast<std::size_t>(M) + 1);
        for (int k = 0; k <= M; ++k)
            blocks.push_back(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(degree_dim(d_, k))));
    }

    int cutoff() const { return static_cast<int>(blocks.size()) - 1; }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& b : blocks) s += b.squaredNorm();
        return s;
    }
    double norm() const { return std::sqrt(squared_norm()); }
};

inline FockVector operator-(const FockVector& a, const FockVector& b) {
    if (a.d != b.d || a.blocks.size() != b.blocks.size())
        throw std::invalid_argument("FockVector shape mismatch");
    FockVector out = a;
    for (std::size_t k = 0; k < out.blocks.size(); ++k) out.blocks[k] -= b.blocks[k];
    return out;
}

inline std::complex<double> inner(const FockVector& a, const FockVector& b) {
    if (a.d != b.d || a.blocks.size() != b.blocks.size())
        throw std::invalid_argument("FockVector shape mismatch");
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < a.blocks.size(); ++k) s += a.blocks[k].dot(b.blocks[k]);
    return s;
}

} // namespace ncball
