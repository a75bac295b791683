#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncball {

/// A word in the free monoid on letters 1..d. The empty word is the unit.
/// Ordering is graded lexicographic (shorter words first, then lex with
/// 1 < 2 < ... < d); this fixes every vector and matrix index map in the
/// library.
struct Word {
    std::vector<int> letters;

    Word() = default;
    Word(std::initializer_list<int> ls) : letters(ls) {}
    explicit Word(std::vector<int> ls) : letters(std::move(ls)) {}

    std::size_t size() const { return letters.size(); }
    bool empty() const { return letters.empty(); }

    friend bool operator==(const Word& a, const Word& b) { return a.letters == b.letters; }
    friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }

    // graded-lex
    friend bool operator<(const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.letters < b.letters;
    }
};

inline Word concat(const Word& a, const Word& b) {
    Word out = a;
    out.letters.insert(out.letters.end(), b.letters.begin(), b.letters.end());
    return out;
}

inline void check_letters(const Word& w, int d) {
    for (int l : w.letters)
        if (l < 1 || l > d)
            throw std::invalid_argument("word letter " + std::to_string(l) +
                                        " outside alphabet [1," + std::to_string(d) + "]");
}

/// d^k with an overflow guard; degree-block dimensions stay at desk scale.
inline std::size_t degree_dim(int d, int k) {
    if (d < 1) throw std::invalid_argument("alphabet size must be >= 1");
    if (k < 0) throw std::invalid_argument("negative degree");
    std::size_t dim = 1;
    for (int i = 0; i < k; ++i) {
        if (dim > (std::size_t{1} << 40) / static_cast<std::size_t>(d))
            throw std::invalid_argument("degree dimension d^k overflows desk scale");
        dim *= static_cast<std::size_t>(d);
    }
    return dim;
}

/// Offset of w inside the degree-|w| block: the base-d number with digits
/// (letters[i]-1), most significant first. Matches graded-lex order within
/// a degree.
inline std::size_t word_index(const Word& w, int d) {
    check_letters(w, d);
    std::size_t idx = 0;
    for (int l : w.letters) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(l - 1);
    return idx;
}

inline Word word_from_index(int d, int degree, std::size_t index) {
    Word w;
    w.letters.assign(static_cast<std::size_t>(degree), 1);
    for (int pos = degree - 1; pos >= 0; --pos) {
        w.letters[static_cast<std::size_t>(pos)] = static_cast<int>(index % static_cast<std::size_t>(d)) + 1;
        index /= static_cast<std::size_t>(d);
    }
    if (index != 0) throw std::invalid_argument("word index out of range for degree block");
    return w;
}

inline std::string to_string(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (int l : w.letters) {
        if (!s.empty()) s += '.';
        s += 'z';
        s += std::to_string(l);
    }
    return s;
}

} // namespace ncball
