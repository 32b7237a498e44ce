// Non-commutative polynomial algebra over ell letters: words, star involution,
// cyclic symmetrization, cyclic derivative D_i and tensor derivative d_i.
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmlab {

using cplx = std::complex<double>;

// A monomial X_{i_1}...X_{i_k}; letters are 1-based indices, empty = unit.
struct Word {
    std::vector<int> letters;

    Word() = default;
    explicit Word(std::vector<int> ls) : letters(std::move(ls)) {}

    std::size_t degree() const { return letters.size(); }
    bool empty() const { return letters.empty(); }

    Word reversed() const {
        return Word(std::vector<int>(letters.rbegin(), letters.rend()));
    }
    // Rotation by p: X_{i_{p+1}}...X_{i_k} X_{i_1}...X_{i_p}
    Word rotated(std::size_t p) const {
        std::vector<int> out;
        out.reserve(letters.size());
        for (std::size_t j = 0; j < letters.size(); ++j)
            out.push_back(letters[(p + j) % letters.size()]);
        return Word(out);
    }
    Word concat(const Word& other) const {
        std::vector<int> out = letters;
        out.insert(out.end(), other.letters.begin(), other.letters.end());
        return Word(out);
    }

    auto operator<=>(const Word&) const = default;
    bool operator==(const Word&) const = default;

    std::string str() const;
};

class TensorPolynomial;

// Element of C<X_1,...,X_ell> stored as word -> coefficient, zero terms pruned.
class NCPolynomial {
  public:
    NCPolynomial() : ell_(1) {}
    explicit NCPolynomial(int ell) : ell_(ell) {
        if (ell < 1) throw std::invalid_argument("alphabet size must be >= 1");
    }

    static NCPolynomial zero(int ell) { return NCPolynomial(ell); }
    static NCPolynomial unit(int ell) {
        NCPolynomial p(ell);
        p.add_term(Word{}, 1.0);
        return p;
    }
    static NCPolynomial letter(int ell, int i) {
        NCPolynomial p(ell);
        p.check_letter(i);
        p.add_term(Word({i}), 1.0);
        return p;
    }
    static NCPolynomial monomial(int ell, const Word& w, cplx coeff = 1.0) {
        NCPolynomial p(ell);
        for (int l : w.letters) p.check_letter(l);
        p.add_term(w, coeff);
        return p;
    }

    int alphabet_size() const { return ell_; }
    const std::map<Word, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t degree() const {
        std::size_t d = 0;
        for (auto& [w, c] : terms_) d = std::max(d, w.degree());
        return d;
    }
    cplx coeff(const Word& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? cplx(0.0) : it->second;
    }

    void add_term(const Word& w, cplx c) {
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            if (c != 0.0) terms_.emplace(w, c);
        } else {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }
    // Drop coefficients with |c| <= eps (eps = 0 keeps exact arithmetic).
    void prune(double eps) {
        for (auto it = terms_.begin(); it != terms_.end();)
            it = (std::abs(it->second) <= eps) ? terms_.erase(it) : std::next(it);
    }

    NCPolynomial operator+(const NCPolynomial& q) const;
    NCPolynomial operator-(const NCPolynomial& q) const;
    NCPolynomial operator*(cplx s) const;
    NCPolynomial operator-() const { return *this * cplx(-1.0); }
    bool operator==(const NCPolynomial& q) const {
        return ell_ == q.ell_ && terms_ == q.terms_;
    }

    std::string str() const;

  private:
    void check_letter(int i) const {
        if (i < 1 || i > ell_) throw std::invalid_argument("letter index out of range");
    }
    int ell_;
    std::map<Word, cplx> terms_;

    friend NCPolynomial multiply(const NCPolynomial&, const NCPolynomial&);
};

// Bilinear concatenation product.
NCPolynomial multiply(const NCPolynomial& p, const NCPolynomial& q);
inline NCPolynomial operator*(const NCPolynomial& p, const NCPolynomial& q) {
    return multiply(p, q);
}

// (z X_{j_1}...X_{j_d})* = conj(z) X_{j_d}...X_{j_1}
NCPolynomial star(const NCPolynomial& p);

// c(q) = (1/k) sum of the k cyclic rotations of q.
NCPolynomial cyclic_symmetrize(const Word& q, int ell);
NCPolynomial cyclic_symmetrize(const NCPolynomial& p);

// D_i(X_{i_1}...X_{i_k}) = sum_{p: i_p = i} X_{i_{p+1}}...X_{i_k} X_{i_1}...X_{i_{p-1}}
NCPolynomial cyclic_derivative(const NCPolynomial& p, int i);

// d_i(X_{i_1}...X_{i_k}) = sum_{j: i_j = i} X_{i_1}..X_{i_{j-1}} (x) X_{i_{j+1}}..X_{i_k}
TensorPolynomial nc_derivative(const NCPolynomial& p, int i);

bool is_self_adjoint(const NCPolynomial& p, double tol = 0.0);
bool is_cyclically_invariant(const NCPolynomial& p, double tol = 0.0);

// X_i . P = (X_i P + P X_i) / 2
NCPolynomial sym_dot(int ell, int i, const NCPolynomial& p);

// Affine substitution X_i <- shift_i + sum_j mat(i,j) X_j (row-major ell x ell).
NCPolynomial substitute_affine(const NCPolynomial& p, const std::vector<double>& shift,
                               const std::vector<double>& mat);

// -[X_a, X_b]^2 expanded into its four monomials.
NCPolynomial minus_commutator_squared(int ell, int a, int b);

// Element of C<X>^(x)2 stored as (left word, right word) -> coefficient.
class TensorPolynomial {
  public:
    TensorPolynomial() : ell_(1) {}
    explicit TensorPolynomial(int ell) : ell_(ell) {}

    int alphabet_size() const { return ell_; }
    const std::map<std::pair<Word, Word>, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Word& a, const Word& b, cplx c) {
        auto key = std::make_pair(a, b);
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            if (c != 0.0) terms_.emplace(key, c);
        } else {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    TensorPolynomial operator+(const TensorPolynomial& q) const;
    TensorPolynomial operator-(const TensorPolynomial& q) const;
    TensorPolynomial operator*(cplx s) const;
    bool operator==(const TensorPolynomial& q) const {
        return ell_ == q.ell_ && terms_ == q.terms_;
    }

    // Componentwise leg products: (P (x) Q).this = (P a (x) Q b) and
    // this.(P (x) Q) = (a P (x) b Q).
    TensorPolynomial left_multiply(const NCPolynomial& p, const NCPolynomial& q) const;
    TensorPolynomial right_multiply(const NCPolynomial& p, const NCPolynomial& q) const;

    // Multiply the two legs together and sum: (a (x) b) -> ab.
    NCPolynomial flatten() const;

  private:
    int ell_;
    std::map<std::pair<Word, Word>, cplx> terms_;
};

}  // namespace mmlab
