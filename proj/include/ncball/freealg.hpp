#pragma once

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "ncball/fock_vector.hpp"
#include "ncball/word.hpp"

namespace ncball {

using Complex = std::complex<double>;

/// Finitely supported free noncommutative polynomial over C in d letters.
/// Terms map words to coefficients in graded-lex order; exact zeros are
/// never stored (no tolerance-based pruning -- dropping small coefficients
/// is the caller's decision). The degree of the zero polynomial is -1.
class FreePoly {
public:
    explicit FreePoly(int d) : d_(d) {
        if (d < 1) throw std::invalid_argument("alphabet size must be >= 1");
    }

    static FreePoly zero(int d) { return FreePoly(d); }
    static FreePoly one(int d) { return monomial(d, Word{}, 1.0); }
    static FreePoly letter(int d, int j) {
        if (j < 1 || j > d) throw std::invalid_argument("letter outside alphabet");
        return monomial(d, Word{j}, 1.0);
    }
    static FreePoly monomial(int d, const Word& w, Complex c) {
        FreePoly p(d);
        check_letters(w, d);
        if (c != 0.0) p.terms_.emplace(w, c);
        return p;
    }

    int alphabet() const { return d_; }
    const std::map<Word, Complex>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    /// Max word length over stored terms; -1 for the zero polynomial.
    int degree() const {
        int deg = -1;
        for (const auto& [w, c] : terms_) deg = std::max(deg, static_cast<int>(w.size()));
        return deg;
    }

    bool is_homogeneous() const {
        int deg = -1;
        for (const auto& [w, c] : terms_) {
            int k = static_cast<int>(w.size());
            if (deg == -1) deg = k;
            else if (k != deg) return false;
        }
        return true;
    }

    Complex coeff(const Word& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? Complex{0.0} : it->second;
    }

    void add_term(const Word& w, Complex c) {
        check_letters(w, d_);
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            if (c != 0.0) terms_.emplace(w, c);
        } else {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    FreePoly& operator+=(const FreePoly& q) {
        require_same_alphabet(q);
        for (const auto& [w, c] : q.terms_) add_term(w, c);
        return *this;
    }
    FreePoly& operator-=(const FreePoly& q) {
        require_same_alphabet(q);
        for (const auto& [w, c] : q.terms_) add_term(w, -c);
        return *this;
    }
    FreePoly& operator*=(Complex a) {
        if (a == 0.0) { terms_.clear(); return *this; }
        for (auto& [w, c] : terms_) c *= a;
        return *this;
    }

    friend FreePoly operator+(FreePoly p, const FreePoly& q) { p += q; return p; }
    friend FreePoly operator-(FreePoly p, const FreePoly& q) { p -= q; return p; }
    friend FreePoly operator*(FreePoly p, Complex a) { p *= a; return p; }
    friend FreePoly operator*(Complex a, FreePoly p) { p *= a; return p; }

    /// Convolution product: the coefficient of w in pq sums p[u]q[v] over
    /// splittings w = uv.
    friend FreePoly operator*(const FreePoly& p, const FreePoly& q) {
        p.require_same_alphabet(q);
        FreePoly out(p.d_);
        for (const auto& [u, a] : p.terms_)
            for (const auto& [v, b] : q.terms_)
                out.add_term(concat(u, v), a * b);
        return out;
    }

    friend bool operator==(const FreePoly& p, const FreePoly& q) {
        return p.d_ == q.d_ && p.terms_ == q.terms_;
    }

    /// If every non-unit word is a power of one common letter, returns that
    /// letter (0 when only the unit word occurs, meaning any letter works).
    /// Enables the bidiagonal single-letter model in the norm routines.
    std::optional<int> single_letter() const {
        int letter = 0;
        for (const auto& [w, c] : terms_) {
            for (int l : w.letters) {
                if (letter == 0) letter = l;
                else if (l != letter) return std::nullopt;
            }
        }
        return letter;
    }

private:
    void require_same_alphabet(const FreePoly& q) const {
        if (d_ != q.d_) throw std::invalid_argument("alphabet size mismatch");
    }

    int d_;
    std::map<Word, Complex> terms_;
};

/// Keeps exactly the terms of word length k (the graded component F_k).
inline FreePoly homogeneous_component(const FreePoly& p, int k) {
    if (k < 0) throw std::invalid_argument("homogeneous degree must be >= 0");
    FreePoly out(p.alphabet());
    for (const auto& [w, c] : p.terms())
        if (static_cast<int>(w.size()) == k) out.add_term(w, c);
    return out;
}

/// F -> F^x: multiplies the degree-k coefficients by x^k. Powers are built
/// by repeated multiplication so that dyadic radius ratios compose
/// bit-reproducibly.
inline FreePoly scale_series(const FreePoly& p, Complex x) {
    int deg = p.degree();
    std::vector<Complex> pw(static_cast<std::size_t>(std::max(deg, 0)) + 1);
    pw[0] = 1.0;
    for (std::size_t k = 1; k < pw.size(); ++k) pw[k] = pw[k - 1] * x;
    FreePoly out(p.alphabet());
    for (const auto& [w, c] : p.terms()) out.add_term(w, pw[w.size()] * c);
    return out;
}

/// The coefficient-vector map Ev: places p[w] at the graded-lex slot of w in
/// the degree-|w| block. Linear and injective on polynomials.
inline FockVector ev(const FreePoly& p, int cutoff = -1) {
    int M = cutoff >= 0 ? cutoff : std::max(p.degree(), 0);
    if (p.degree() > M) throw std::invalid_argument("ev: polynomial degree exceeds cutoff");
    FockVector v(p.alphabet(), M);
    for (const auto& [w, c] : p.terms())
        v.blocks[w.size()](static_cast<Eigen::Index>(word_index(w, p.alphabet()))) = c;
    return v;
}

} // namespace ncball
