#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "ncball/fock.hpp"
#include "ncball/freealg.hpp"
#include "ncball/sampling.hpp"

using namespace ncball;

// ---- oracles ---------------------------------------------------------------
// Brute-force degree-m span of a two-sided ideal: enumerate every word pair
// (w, w'), expand w.g.w' term by term into a C^(d^m) vector, then take the
// rank by Gaussian elimination with partial pivoting. Shares no index
// arithmetic with the library's spanning-matrix assembly.
namespace oracle {

std::vector<Word> words_of_length(int d, int len) {
    std::vector<Word> out;
    if (len == 0) {
        out.push_back(Word{});
        return out;
    }
    for (const Word& shorter : words_of_length(d, len - 1))
        for (int j = 1; j <= d; ++j) {
            Word w = shorter;
            w.letters.push_back(j);
            out.push_back(w);
        }
    return out;
}

Eigen::VectorXcd expand(const FreePoly& g, const Word& left, const Word& right, int d, int m) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(degree_dim(d, m)));
    for (const auto& [alpha, c] : g.terms()) {
        Word w = concat(concat(left, alpha), right);
        v(static_cast<Eigen::Index>(word_index(w, d))) += c;
    }
    return v;
}

std::size_t rank_by_elimination(std::vector<Eigen::VectorXcd> vecs, double tol = 1e-9) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < vecs.size(); ++col) {
        // pick the remaining vector with the largest norm as the pivot
        std::size_t best = col;
        for (std::size_t i = col; i < vecs.size(); ++i)
            if (vecs[i].norm() > vecs[best].norm()) best = i;
        if (vecs[best].norm() <= tol) break;
        std::swap(vecs[col], vecs[best]);
        vecs[col] /= vecs[col].norm();
        for (std::size_t i = col + 1; i < vecs.size(); ++i) vecs[i] -= vecs[col].dot(vecs[i]) * vecs[col];
        ++rank;
    }
    return rank;
}

std::size_t ideal_degree_rank(const std::vector<FreePoly>& gens, int d, int m) {
    std::vector<Eigen::VectorXcd> vecs;
    for (const FreePoly& g : gens) {
        int e = g.degree();
        if (e > m) continue;
        for (int a = 0; a + e <= m; ++a)
            for (const Word& left : words_of_length(d, a))
                for (const Word& right : words_of_length(d, m - e - a))
                    vecs.push_back(expand(g, left, right, d, m));
    }
    return rank_by_elimination(std::move(vecs));
}

} // namespace oracle

static FreePoly commutator_gen() {
    return FreePoly::monomial(2, Word{{1, 2}}, 1.0) - FreePoly::monomial(2, Word{{2, 1}}, 1.0);
}

static FreePoly q_gen(double q) {
    return FreePoly::monomial(2, Word{{1, 2}}, 1.0) - FreePoly::monomial(2, Word{{2, 1}}, q);
}

// ---- truncated space bookkeeping -------------------------------------------

TEST_CASE("truncated space dimensions and offsets") {
    TruncatedFock fock(2, 2);
    REQUIRE(fock.dims == std::vector<std::size_t>{1, 2, 4});
    REQUIRE(fock.offsets == std::vector<std::size_t>{0, 1, 3});
    REQUIRE(fock.total == 7);
    REQUIRE(fock.slot(Word{}) == 0);
    REQUIRE(fock.slot(Word{{2}}) == 2);
    REQUIRE(fock.slot(Word{{2, 1}}) == 5);
    REQUIRE(fock.word_at(2, 2) == Word{{2, 1}});
    REQUIRE_THROWS_AS(fock.slot(Word{{1, 1, 1}}), std::invalid_argument);
}

TEST_CASE("creation operator prepends its letter and kills the top degree") {
    TruncatedFock fock(2, 2);
    CreationOp s1 = creation_matrix(1, fock);

    FockVector vac(2, 2);
    vac.blocks[0](0) = 1.0;
    FockVector out = s1.apply(vac);
    REQUIRE(out.blocks[1](0) == Complex(1.0)); // word (1)
    REQUIRE(out.blocks[1](1) == Complex(0.0));

    FockVector e2(2, 2);
    e2.blocks[1](1) = 1.0; // word (2)
    out = s1.apply(e2);
    REQUIRE(out.blocks[2](static_cast<Eigen::Index>(word_index(Word{{1, 2}}, 2))) == Complex(1.0));

    FockVector top(2, 2);
    top.blocks[2].setConstant(1.0);
    REQUIRE(s1.apply(top).norm() == 0.0); // truncation rule
}

TEST_CASE("creation blocks are isometries below the cutoff") {
    TruncatedFock fock(3, 3);
    for (int j = 1; j <= 3; ++j) {
        CreationOp s = creation_matrix(j, fock);
        for (int k = 0; k < 3; ++k) {
            Eigen::MatrixXcd B = s.block(k);
            REQUIRE((B.adjoint() * B - Eigen::MatrixXcd::Identity(B.cols(), B.cols())).norm() == 0.0);
        }
    }
}

TEST_CASE("assembled creation matrix squares to a projector defect") {
    TruncatedFock fock(2, 3);
    Eigen::MatrixXcd S = creation_matrix(1, fock).to_matrix();
    Eigen::MatrixXcd StS = S.adjoint() * S;
    // isometric up to the killed top degree: S*S = identity on degrees < M
    for (std::size_t i = 0; i < fock.total; ++i) {
        double expected = i < fock.offsets[3] ? 1.0 : 0.0;
        REQUIRE(std::abs(StS(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) - expected) < 1e-15);
    }
    REQUIRE((StS.diagonal().asDiagonal().toDenseMatrix() - StS).norm() == 0.0);
}

// ---- saturation -------------------------------------------------------------

TEST_CASE("commutator ideal dimensions match the elimination oracle and the closed form") {
    std::vector<FreePoly> gens{commutator_gen()};
    GradedIdealBasis ideal = saturate_ideal(gens, 4);
    std::vector<std::size_t> dims = ideal.dims();
    REQUIRE(dims == std::vector<std::size_t>{0, 0, 1, 4, 11});
    for (int m = 0; m <= 4; ++m) {
        REQUIRE(dims[static_cast<std::size_t>(m)] == oracle::ideal_degree_rank(gens, 2, m));
        std::size_t closed_form = m == 0 ? 0 : degree_dim(2, m) - static_cast<std::size_t>(m + 1);
        REQUIRE(dims[static_cast<std::size_t>(m)] == closed_form);
    }
}

TEST_CASE("q-deformed ideal dimensions are constant across the deformation") {
    for (double q : {0.0, 0.3, 0.7, 1.0}) {
        std::vector<FreePoly> gens{q_gen(q)};
        GradedIdealBasis ideal = saturate_ideal(gens, 3);
        REQUIRE(ideal.dims() == std::vector<std::size_t>{0, 0, 1, 4});
        for (int m = 2; m <= 3; ++m) REQUIRE(ideal.dim(m) == oracle::ideal_degree_rank(gens, 2, m));
    }
}

TEST_CASE("saturation bases are orthonormal and span every shifted generator") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<FreePoly> gens{random_homogeneous(rng, 2, 2), random_homogeneous(rng, 2, 1)};
        int M = 4;
        GradedIdealBasis ideal = saturate_ideal(gens, M);
        for (int m = 0; m <= M; ++m) {
            const Eigen::MatrixXcd& B = ideal.basis(m);
            if (B.cols() == 0) continue;
            REQUIRE((B.adjoint() * B - Eigen::MatrixXcd::Identity(B.cols(), B.cols())).norm() <= 1e-12);
        }
        // closure: every Ev(w.g.w') has negligible residual against the basis
        for (const FreePoly& g : gens)
            for (int m = g.degree(); m <= M; ++m) {
                int a_max = m - g.degree();
                for (int a = 0; a <= a_max; ++a)
                    for (const Word& left : oracle::words_of_length(2, a))
                        for (const Word& right : oracle::words_of_length(2, a_max - a)) {
                            Eigen::VectorXcd v = oracle::expand(g, left, right, 2, m);
                            const Eigen::MatrixXcd& B = ideal.basis(m);
                            Eigen::VectorXcd r = v - B * (B.adjoint() * v);
                            REQUIRE(r.norm() <= 1e-10 * (1.0 + v.norm()));
                        }
            }
    }
}

TEST_CASE("saturation validates its generators") {
    FreePoly nonhom = FreePoly::letter(2, 1) + FreePoly::monomial(2, Word{{1, 2}}, 1.0);
    REQUIRE_THROWS_AS(saturate_ideal({nonhom}, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(saturate_ideal({FreePoly::one(2)}, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(saturate_ideal({commutator_gen()}, 1), std::invalid_argument); // degree above cutoff
    REQUIRE_THROWS_AS(saturate_ideal({}, 3), std::invalid_argument);
    // zero generators are skipped; all-zero input yields the zero ideal
    GradedIdealBasis z = saturate_ideal({FreePoly::zero(2)}, 3);
    REQUIRE(z.is_zero_ideal());
}

TEST_CASE("membership test accepts ideal elements and rejects outsiders") {
    std::vector<FreePoly> gens{commutator_gen()};
    GradedIdealBasis ideal = saturate_ideal(gens, 4);
    FreePoly inside = FreePoly::letter(2, 2) * commutator_gen(); // left multiple
    REQUIRE(ideal.contains(inside));
    REQUIRE(!ideal.contains(FreePoly::monomial(2, Word{{1, 2}}, 1.0)));
    REQUIRE(ideal.contains(FreePoly::zero(2)));
}

// ---- projection -------------------------------------------------------------

TEST_CASE("projection in degree 2 matches the hand computation") {
    // ideal <z1z2 - z2z1>: the degree-2 block is the line through e12 - e21;
    // projecting e12 onto its complement leaves (e12 + e21)/2, length 1/sqrt2
    GradedIdealBasis ideal = saturate_ideal({commutator_gen()}, 2);
    FockVector v = ev(FreePoly::monomial(2, Word{{1, 2}}, 1.0), 2);
    FockVector proj = project_complement(ideal, v);
    REQUIRE(std::abs(proj.blocks[2](1) - Complex(0.5)) <= 1e-14);
    REQUIRE(std::abs(proj.blocks[2](2) - Complex(0.5)) <= 1e-14);
    REQUIRE(std::abs(proj.blocks[2](0)) <= 1e-14);
    REQUIRE(std::abs(proj.blocks[2](3)) <= 1e-14);
    REQUIRE(proj.norm() == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("projection is an idempotent self-adjoint contraction") {
    std::mt19937_64 rng(22);
    GradedIdealBasis ideal = saturate_ideal({q_gen(0.6)}, 3);
    for (int rep = 0; rep < 10; ++rep) {
        FockVector v = random_fock_vector(rng, 2, 3);
        FockVector w = random_fock_vector(rng, 2, 3);
        FockVector pv = project_complement(ideal, v);
        FockVector ppv = project_complement(ideal, pv);
        REQUIRE((ppv - pv).norm() <= 1e-12 * (1.0 + v.norm()));
        REQUIRE(pv.norm() <= v.norm() + 1e-12);
        Complex a = inner(pv, w);
        Complex b = inner(v, project_complement(ideal, w));
        REQUIRE(std::abs(a - b) <= 1e-12 * (1.0 + v.norm() * w.norm()));
    }
}

TEST_CASE("projection rejects vectors beyond the saturation cutoff") {
    GradedIdealBasis ideal = saturate_ideal({commutator_gen()}, 2);
    FockVector v(2, 3);
    REQUIRE_THROWS_AS(project_complement(ideal, v), std::invalid_argument);
}

// ---- compression -------------------------------------------------------------

TEST_CASE("zero ideal compresses to the raw creation blocks exactly") {
    int M = 3;
    GradedIdealBasis zero = GradedIdealBasis::zero(2, M);
    CompressedTuple tuple = compressed_tuple(zero, M);
    TruncatedFock fock(2, M);
    REQUIRE(tuple.complement_dims() == fock.dims);
    for (int j = 1; j <= 2; ++j) {
        CreationOp s = creation_matrix(j, fock);
        for (int k = 0; k < M; ++k) REQUIRE((tuple.block(j, k) - s.block(k)).norm() == 0.0);
    }
}

TEST_CASE("compressed blocks are contractions") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<FreePoly> gens{random_homogeneous(rng, 2, 2)};
        GradedIdealBasis ideal = saturate_ideal(gens, 4);
        CompressedTuple tuple = compressed_tuple(ideal, 4);
        for (int j = 1; j <= 2; ++j)
            for (int k = 0; k < 4; ++k) {
                const Eigen::MatrixXcd& B = tuple.block(j, k);
                if (B.rows() == 0 || B.cols() == 0) continue;
                Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
                REQUIRE(svd.singularValues()(0) <= 1.0 + 1e-12);
            }
    }
}

TEST_CASE("complement dimensions complement the ideal dimensions") {
    GradedIdealBasis ideal = saturate_ideal({commutator_gen()}, 4);
    CompressedTuple tuple = compressed_tuple(ideal, 4);
    for (int k = 0; k <= 4; ++k)
        REQUIRE(tuple.complement_dim(k) + ideal.dim(k) == degree_dim(2, k));
    // commutative quotient: complement dims are k+1
    REQUIRE(tuple.complement_dims() == std::vector<std::size_t>{1, 2, 3, 4, 5});
}

TEST_CASE("apply_poly is multiplicative under compression") {
    std::mt19937_64 rng(24);
    GradedIdealBasis ideal = saturate_ideal({q_gen(0.4)}, 4);
    CompressedTuple tuple = compressed_tuple(ideal, 4);
    for (int rep = 0; rep < 8; ++rep) {
        FreePoly p = random_poly(rng, 2, 2);
        FreePoly q = random_poly(rng, 2, 2);
        Eigen::MatrixXcd lhs = apply_poly(tuple, p * q).mat;
        Eigen::MatrixXcd rhs = apply_poly(tuple, p).mat * apply_poly(tuple, q).mat;
        double scale = 1.0 + apply_poly(tuple, p).mat.norm() * apply_poly(tuple, q).mat.norm();
        REQUIRE((lhs - rhs).norm() <= 1e-12 * scale);
    }
}

TEST_CASE("apply_poly kills the defining relation in the quotient") {
    for (double q : {0.0, 0.5, 1.0}) {
        GradedIdealBasis ideal = saturate_ideal({q_gen(q)}, 3);
        CompressedTuple tuple = compressed_tuple(ideal, 3);
        REQUIRE(apply_poly(tuple, q_gen(q)).mat.norm() <= 1e-12);
    }
}

TEST_CASE("apply_poly handles constants and rejects overflow") {
    GradedIdealBasis zero = GradedIdealBasis::zero(2, 2);
    CompressedTuple tuple = compressed_tuple(zero, 2);
    Eigen::MatrixXcd id = apply_poly(tuple, FreePoly::one(2)).mat;
    REQUIRE((id - Eigen::MatrixXcd::Identity(7, 7)).norm() == 0.0);
    FreePoly deep = FreePoly::monomial(2, Word{{1, 1, 1}}, 1.0);
    REQUIRE_THROWS_AS(apply_poly(tuple, deep), std::invalid_argument);
}

TEST_CASE("compressed vacuum column realizes the projected coefficients") {
    // first column of p(s^I) in the complement coordinates is C_m^* Ev(p):
    // its length is the quotient distance when p is homogeneous
    GradedIdealBasis ideal = saturate_ideal({commutator_gen()}, 2);
    CompressedTuple tuple = compressed_tuple(ideal, 2);
    FreePoly p = FreePoly::monomial(2, Word{{1, 2}}, 1.0);
    Eigen::MatrixXcd A = apply_poly(tuple, p).mat;
    Eigen::VectorXcd vac_col = A.col(0);
    REQUIRE(vac_col.norm() == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("compressed_tuple enforces the saturation cutoff") {
    GradedIdealBasis ideal = saturate_ideal({commutator_gen()}, 2);
    REQUIRE_THROWS_AS(compressed_tuple(ideal, 3), std::invalid_argument);
}
