#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncball/freealg.hpp"

namespace ncball {

/// Truncated full Fock space: the direct sum of the tensor powers of C^d up
/// to degree M, with the graded-lex basis bookkeeping. Words of length <= M
/// biject with basis slots.
struct TruncatedFock {
    int d;
    int M;
    std::vector<std::size_t> dims;    // dims[k] = d^k
    std::vector<std::size_t> offsets; // start of degree k in the assembled vector
    std::size_t total = 0;

    TruncatedFock(int d_, int M_) : d(d_), M(M_) {
        if (M < 0) throw std::invalid_argument("cutoff must be >= 0");
        dims.reserve(static_cast<std::size_t>(M) + 1);
        offsets.reserve(static_cast<std::size_t>(M) + 1);
        for (int k = 0; k <= M; ++k) {
            offsets.push_back(total);
            dims.push_back(degree_dim(d, k));
            total += dims.back();
        }
    }

    std::size_t slot(const Word& w) const {
        if (static_cast<int>(w.size()) > M) throw std::invalid_argument("word length exceeds cutoff");
        return offsets[w.size()] + word_index(w, d);
    }
    Word word_at(int degree, std::size_t offset) const { return word_from_index(d, degree, offset); }

    Eigen::VectorXcd assemble(const FockVector& v) const {
        if (v.d != d || v.cutoff() > M) throw std::invalid_argument("FockVector does not fit truncation");
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
        for (int k = 0; k <= v.cutoff(); ++k)
            out.segment(static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(k)]),
                        v.blocks[static_cast<std::size_t>(k)].size()) = v.blocks[static_cast<std::size_t>(k)];
        return out;
    }
};

/// Creation operator s_j on the truncation: the degree k -> k+1 block sends
/// basis word w to j.w, and degree-M input is mapped to zero. Blocks are 0/1
/// column maps (row (j-1)*d^k + col), kept structured; dense blocks are
/// materialized on demand.
struct CreationOp {
    int d;
    int M;
    int j;

    std::size_t row_of_column(int k, std::size_t col) const {
        return static_cast<std::size_t>(j - 1) * degree_dim(d, k) + col;
    }

    // dense degree k -> k+1 block, d^{k+1} x d^k
    Eigen::MatrixXcd block(int k) const {
        if (k < 0 || k >= M) throw std::invalid_argument("creation block index out of range");
        std::size_t nk = degree_dim(d, k);
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nk * static_cast<std::size_t>(d)),
                                                    static_cast<Eigen::Index>(nk));
        for (std::size_t c = 0; c < nk; ++c)
            B(static_cast<Eigen::Index>(row_of_column(k, c)), static_cast<Eigen::Index>(c)) = 1.0;
        return B;
    }

    FockVector apply(const FockVector& v) const {
        FockVector out(d, M);
        int top = std::min(v.cutoff(), M - 1);
        for (int k = 0; k <= top; ++k) {
            const auto& b = v.blocks[static_cast<std::size_t>(k)];
            std::size_t base = static_cast<std::size_t>(j - 1) * degree_dim(d, k);
            out.blocks[static_cast<std::size_t>(k) + 1].segment(static_cast<Eigen::Index>(base), b.size()) = b;
        }
        return out;
    }

    // the whole operator on the truncation, for small M
    Eigen::MatrixXcd to_matrix() const {
        TruncatedFock fock(d, M);
        Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(fock.total),
                                                    static_cast<Eigen::Index>(fock.total));
        for (int k = 0; k < M; ++k)
            for (std::size_t c = 0; c < fock.dims[static_cast<std::size_t>(k)]; ++c)
                S(static_cast<Eigen::Index>(fock.offsets[static_cast<std::size_t>(k) + 1] + row_of_column(k, c)),
                  static_cast<Eigen::Index>(fock.offsets[static_cast<std::size_t>(k)] + c)) = 1.0;
        return S;
    }
};

inline CreationOp creation_matrix(int j, const TruncatedFock& fock) {
    if (j < 1 || j > fock.d) throw std::invalid_argument("creation letter out of range");
    return CreationOp{fock.d, fock.M, j};
}

/// Per-degree orthonormal bases of Ev(I^m) for a graded two-sided ideal I,
/// up to a degree cutoff. Degree 0 is always empty. The zero ideal stores
/// empty blocks only, so it is cheap at any cutoff.
class GradedIdealBasis {
public:
    GradedIdealBasis(int d, std::vector<Eigen::MatrixXcd> blocks) : d_(d), basis_(std::move(blocks)) {
        if (d < 1) throw std::invalid_argument("alphabet size must be >= 1");
        if (basis_.empty()) throw std::invalid_argument("ideal basis needs at least degree 0");
        if (basis_[0].cols() != 0) throw std::invalid_argument("graded ideal has no degree-0 component");
        for (std::size_t m = 0; m < basis_.size(); ++m) {
            if (basis_[m].cols() == 0) { basis_[m] = Eigen::MatrixXcd(0, 0); continue; }
            if (static_cast<std::size_t>(basis_[m].rows()) != degree_dim(d, static_cast<int>(m)))
                throw std::invalid_argument("ideal basis row count differs from d^m at degree " + std::to_string(m));
        }
    }

    static GradedIdealBasis zero(int d, int M) {
        if (M < 0) throw std::invalid_argument("cutoff must be >= 0");
        return GradedIdealBasis(d, std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(M) + 1,
                                                                 Eigen::MatrixXcd(0, 0)));
    }

    int alphabet() const { return d_; }
    int cutoff() const { return static_cast<int>(basis_.size()) - 1; }
    std::size_t dim(int m) const { return static_cast<std::size_t>(basis_.at(static_cast<std::size_t>(m)).cols()); }
    const Eigen::MatrixXcd& basis(int m) const { return basis_.at(static_cast<std::size_t>(m)); }

    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> out;
        out.reserve(basis_.size());
        for (const auto& b : basis_) out.push_back(static_cast<std::size_t>(b.cols()));
        return out;
    }

    bool is_zero_ideal() const {
        for (const auto& b : basis_)
            if (b.cols() != 0) return false;
        return true;
    }

    /// Degreewise membership test: every homogeneous component of p must sit
    /// in the corresponding column span (relative residual <= tol).
    bool contains(const FreePoly& p, double tol = 1e-10) const;

    // test fixture hook: perturbs one basis entry, breaking orthonormality
    void corrupt_for_testing(double eps) {
        for (auto& b : basis_)
            if (b.size() > 0) { b(0, 0) += eps; return; }
    }

private:
    int d_;
    std::vector<Eigen::MatrixXcd> basis_;
};

namespace detail {

/// Rank by relative singular-value threshold, orthonormal column-space basis
/// by column-pivoted QR re-orthogonalized once. Deterministic for fixed
/// input.
inline Eigen::MatrixXcd orthonormal_column_space(const Eigen::MatrixXcd& A, double rank_tol) {
    if (A.cols() == 0 || A.rows() == 0) return Eigen::MatrixXcd(A.rows(), 0);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * smax) ++rank;
    if (smax == 0.0) rank = 0;
    if (rank == 0) return Eigen::MatrixXcd(A.rows(), 0);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(A.rows(), rank);
    Eigen::HouseholderQR<Eigen::MatrixXcd> reortho(Q);
    return reortho.householderQ() * Eigen::MatrixXcd::Identity(A.rows(), rank);
}

} // namespace detail

/// Degree-m spanning vectors Ev(w.g.w') of the two-sided ideal generated by
/// homogeneous polynomials, assembled as columns. Each column is sparse:
/// one entry per term of g, at the slot of the word w.alpha.w'.
inline Eigen::MatrixXcd ideal_spanning_matrix(const std::vector<FreePoly>& generators, int d, int m) {
    std::size_t nm = degree_dim(d, m);
    std::size_t ncols = 0;
    for (const auto& g : generators) {
        if (g.is_zero()) continue;
        int e = g.degree();
        if (e > m) continue;
        for (int a = 0; a + e <= m; ++a)
            ncols += degree_dim(d, a) * degree_dim(d, m - e - a);
    }
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nm), static_cast<Eigen::Index>(ncols));
    std::size_t col = 0;
    for (const auto& g : generators) {
        if (g.is_zero()) continue;
        int e = g.degree();
        if (e > m) continue;
        for (int a = 0; a + e <= m; ++a) {
            int b = m - e - a;
            std::size_t na = degree_dim(d, a);
            std::size_t nb = degree_dim(d, b);
            for (std::size_t wi = 0; wi < na; ++wi)
                for (std::size_t vi = 0; vi < nb; ++vi) {
                    for (const auto& [alpha, c] : g.terms()) {
                        std::size_t ai = word_index(alpha, d);
                        std::size_t row = (wi * degree_dim(d, e) + ai) * nb + vi;
                        A(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = c;
                    }
                    ++col;
                }
        }
    }
    return A;
}

/// Saturates the two-sided graded ideal generated by homogeneous polynomials
/// up to degree M: for each m the columns form an orthonormal basis of
/// span{ Ev(z_w . g . z_w') : |w| + deg g + |w'| = m }. Zero generators are
/// skipped; non-homogeneous or degree-0 generators are rejected.
inline GradedIdealBasis saturate_ideal(const std::vector<FreePoly>& generators, int M,
                                       double rank_tol = 1e-10) {
    if (M < 0) throw std::invalid_argument("cutoff must be >= 0");
    int d = generators.empty() ? 0 : generators.front().alphabet();
    std::vector<FreePoly> gens;
    for (const auto& g : generators) {
        if (g.alphabet() != d) throw std::invalid_argument("generator alphabet mismatch");
        if (g.is_zero()) continue;
        if (!g.is_homogeneous()) throw std::invalid_argument("ideal generator must be homogeneous");
        if (g.degree() < 1) throw std::invalid_argument("ideal generator must have degree >= 1");
        if (g.degree() > M)
            throw std::invalid_argument("generator degree " + std::to_string(g.degree()) +
                                        " exceeds cutoff " + std::to_string(M));
        gens.push_back(g);
    }
    if (d == 0) throw std::invalid_argument("saturate_ideal needs at least one generator to fix the alphabet");

    std::vector<Eigen::MatrixXcd> blocks(static_cast<std::size_t>(M) + 1, Eigen::MatrixXcd(0, 0));
    for (int m = 1; m <= M; ++m) {
        Eigen::MatrixXcd A = ideal_spanning_matrix(gens, d, m);
        blocks[static_cast<std::size_t>(m)] = detail::orthonormal_column_space(A, rank_tol);
    }
    return GradedIdealBasis(d, std::move(blocks));
}

/// Orthogonal projection p_I onto the Hardy space Ev(I)^perp, applied
/// degreewise: out_m = v_m - B_m (B_m^* v_m).
inline FockVector project_complement(const GradedIdealBasis& ideal, const FockVector& v) {
    if (v.d != ideal.alphabet()) throw std::invalid_argument("alphabet mismatch");
    if (v.cutoff() > ideal.cutoff()) throw std::invalid_argument("vector degree exceeds ideal cutoff");
    FockVector out = v;
    for (int m = 0; m <= v.cutoff(); ++m) {
        const Eigen::MatrixXcd& B = ideal.basis(m);
        if (B.cols() == 0) continue;
        auto& block = out.blocks[static_cast<std::size_t>(m)];
        block -= B * (B.adjoint() * block);
    }
    return out;
}

inline bool GradedIdealBasis::contains(const FreePoly& p, double tol) const {
    if (p.alphabet() != d_) throw std::invalid_argument("alphabet mismatch");
    if (p.degree() > cutoff()) throw std::invalid_argument("polynomial degree exceeds ideal cutoff");
    if (p.is_zero()) return true;
    FockVector v = ev(p);
    FockVector r = project_complement(*this, v);
    return r.norm() <= tol * (1.0 + v.norm());
}

/// The compressed creation tuple s_j^I on the truncated Hardy space: per
/// degree an orthonormal complement basis C_k of the ideal columns (the
/// identity when the ideal is empty at that degree, so the zero ideal
/// reproduces the raw creation blocks exactly), and blocks
/// C_{k+1}^* S_j C_k for k < M.
class CompressedTuple {
public:
    CompressedTuple(int d, int M, std::vector<Eigen::MatrixXcd> complements, std::vector<bool> complement_is_identity)
        : d_(d), M_(M), comp_(std::move(complements)), comp_id_(std::move(complement_is_identity)) {
        build_blocks();
        offsets_.reserve(comp_.size());
        total_ = 0;
        for (const auto& c : comp_) {
            offsets_.push_back(total_);
            total_ += static_cast<std::size_t>(c.cols());
        }
    }

    int alphabet() const { return d_; }
    int cutoff() const { return M_; }
    std::size_t total_dim() const { return total_; }
    std::size_t offset(int k) const { return offsets_.at(static_cast<std::size_t>(k)); }
    std::size_t complement_dim(int k) const {
        return static_cast<std::size_t>(comp_.at(static_cast<std::size_t>(k)).cols());
    }
    std::vector<std::size_t> complement_dims() const {
        std::vector<std::size_t> out;
        out.reserve(comp_.size());
        for (const auto& c : comp_) out.push_back(static_cast<std::size_t>(c.cols()));
        return out;
    }
    const Eigen::MatrixXcd& complement_basis(int k) const { return comp_.at(static_cast<std::size_t>(k)); }

    // degree k -> k+1 block of s_j^I (the degree-M block is identically zero
    // and not stored)
    const Eigen::MatrixXcd& block(int j, int k) const {
        if (j < 1 || j > d_) throw std::invalid_argument("letter out of range");
        return blocks_.at(static_cast<std::size_t>(j - 1)).at(static_cast<std::size_t>(k));
    }

private:
    void build_blocks() {
        blocks_.assign(static_cast<std::size_t>(d_), {});
        for (int j = 1; j <= d_; ++j) {
            auto& per_degree = blocks_[static_cast<std::size_t>(j - 1)];
            per_degree.reserve(static_cast<std::size_t>(M_));
            for (int k = 0; k < M_; ++k) {
                const Eigen::MatrixXcd& Ck = comp_[static_cast<std::size_t>(k)];
                const Eigen::MatrixXcd& Ck1 = comp_[static_cast<std::size_t>(k) + 1];
                std::size_t nk = degree_dim(d_, k);
                std::size_t base = static_cast<std::size_t>(j - 1) * nk;
                // S_j C_k places C_k's rows into rows [base, base + d^k)
                if (comp_id_[static_cast<std::size_t>(k)] && comp_id_[static_cast<std::size_t>(k) + 1]) {
                    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(Ck1.cols(), Ck.cols());
                    for (std::size_t c = 0; c < nk; ++c)
                        B(static_cast<Eigen::Index>(base + c), static_cast<Eigen::Index>(c)) = 1.0;
                    per_degree.push_back(std::move(B));
                } else {
                    Eigen::MatrixXcd SC = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nk * static_cast<std::size_t>(d_)),
                                                                 Ck.cols());
                    SC.middleRows(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(nk)) = Ck;
                    per_degree.push_back(Ck1.adjoint() * SC);
                }
            }
        }
    }

    int d_;
    int M_;
    std::vector<Eigen::MatrixXcd> comp_;
    std::vector<bool> comp_id_;
    std::vector<std::vector<Eigen::MatrixXcd>> blocks_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
};

/// Builds s^I on the degree-<=M truncation of the Hardy space. The ideal
/// must be saturated at least to M. Dense desk-scale guard: the truncation
/// dimension is capped.
inline CompressedTuple compressed_tuple(const GradedIdealBasis& ideal, int M,
                                        std::size_t max_total_dim = 4096) {
    if (M < 0) throw std::invalid_argument("cutoff must be >= 0");
    if (ideal.cutoff() < M)
        throw std::invalid_argument("ideal saturated to degree " + std::to_string(ideal.cutoff()) +
                                    " but truncation needs " + std::to_string(M));
    int d = ideal.alphabet();
    std::size_t total = 0;
    for (int k = 0; k <= M; ++k) total += degree_dim(d, k);
    if (total > max_total_dim)
        throw std::invalid_argument("truncation dimension " + std::to_string(total) +
                                    " exceeds dense desk scale; use the single-letter model for large cutoffs");

    std::vector<Eigen::MatrixXcd> comp;
    std::vector<bool> is_id;
    comp.reserve(static_cast<std::size_t>(M) + 1);
    for (int k = 0; k <= M; ++k) {
        std::size_t nk = degree_dim(d, k);
        const Eigen::MatrixXcd& B = ideal.basis(k);
        if (B.cols() == 0) {
            comp.push_back(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk)));
            is_id.push_back(true);
        } else if (static_cast<std::size_t>(B.cols()) == nk) {
            comp.push_back(Eigen::MatrixXcd(static_cast<Eigen::Index>(nk), 0));
            is_id.push_back(false);
        } else {
            // trailing Householder Q columns span the orthogonal complement
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(B);
            Eigen::MatrixXcd Qfull = qr.householderQ();
            comp.push_back(Qfull.rightCols(Qfull.cols() - B.cols()));
            is_id.push_back(false);
        }
    }
    return CompressedTuple(d, M, std::move(comp), std::move(is_id));
}

/// A degree-graded operator on the truncated Hardy space, assembled dense
/// with per-degree offsets.
struct BlockOperator {
    std::vector<std::size_t> dims;
    Eigen::MatrixXcd mat;
};

/// p(s_1^I, ..., s_d^I) on the truncation: for each term a_alpha z_alpha the
/// ordered block product from input degree k to degree k + |alpha|; the
/// constant term contributes the identity. Degrees that would exceed the
/// cutoff are annihilated by the truncation rule, but polynomials of degree
/// beyond M are rejected outright.
inline BlockOperator apply_poly(const CompressedTuple& tuple, const FreePoly& p) {
    if (p.alphabet() != tuple.alphabet()) throw std::invalid_argument("alphabet mismatch");
    if (p.degree() > tuple.cutoff())
        throw std::invalid_argument("polynomial degree " + std::to_string(p.degree()) +
                                    " exceeds truncation " + std::to_string(tuple.cutoff()));
    std::size_t T = tuple.total_dim();
    BlockOperator out{tuple.complement_dims(),
                      Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(T))};
    int M = tuple.cutoff();
    for (const auto& [alpha, a] : p.terms()) {
        int len = static_cast<int>(alpha.size());
        if (len == 0) {
            out.mat += a * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(T));
            continue;
        }
        for (int k = 0; k + len <= M; ++k) {
            // s_alpha = s_{i_1} o ... o s_{i_len}: rightmost letter acts first
            Eigen::MatrixXcd prod = tuple.block(alpha.letters[static_cast<std::size_t>(len - 1)], k);
            for (int t = len - 2; t >= 0; --t)
                prod = tuple.block(alpha.letters[static_cast<std::size_t>(t)], k + (len - 1 - t)).eval() * prod;
            if (prod.rows() == 0 || prod.cols() == 0) continue;
            out.mat.block(static_cast<Eigen::Index>(tuple.offset(k + len)), static_cast<Eigen::Index>(tuple.offset(k)),
                          prod.rows(), prod.cols()) += a * prod;
        }
    }
    return out;
}

} // namespace ncball
