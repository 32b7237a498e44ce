#include "mmlab/ncpoly.hpp"

#include <sstream>

namespace mmlab {

std::string Word::str() const {
    if (letters.empty()) return "1";
    std::ostringstream os;
    for (std::size_t j = 0; j < letters.size(); ++j) {
        if (j) os << '.';
        os << 'X' << letters[j];
    }
    return os.str();
}

std::string NCPolynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [w, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << '(' << c.real();
        if (c.imag() != 0.0) os << (c.imag() > 0 ? "+" : "") << c.imag() << 'i';
        os << ')' << w.str();
    }
    return os.str();
}

NCPolynomial NCPolynomial::operator+(const NCPolynomial& q) const {
    if (ell_ != q.ell_) throw std::invalid_argument("alphabet mismatch");
    NCPolynomial out = *this;
    for (auto& [w, c] : q.terms_) out.add_term(w, c);
    return out;
}

NCPolynomial NCPolynomial::operator-(const NCPolynomial& q) const {
    if (ell_ != q.ell_) throw std::invalid_argument("alphabet mismatch");
    NCPolynomial out = *this;
    for (auto& [w, c] : q.terms_) out.add_term(w, -c);
    return out;
}

NCPolynomial NCPolynomial::operator*(cplx s) const {
    NCPolynomial out(ell_);
    if (s == 0.0) return out;
    for (auto& [w, c] : terms_) out.add_term(w, c * s);
    return out;
}

NCPolynomial multiply(const NCPolynomial& p, const NCPolynomial& q) {
    if (p.alphabet_size() != q.alphabet_size())
        throw std::invalid_argument("alphabet mismatch");
    NCPolynomial out(p.alphabet_size());
    for (auto& [wp, cp] : p.terms_)
        for (auto& [wq, cq] : q.terms_) out.add_term(wp.concat(wq), cp * cq);
    return out;
}

NCPolynomial star(const NCPolynomial& p) {
    NCPolynomial out(p.alphabet_size());
    for (auto& [w, c] : p.terms()) out.add_term(w.reversed(), std::conj(c));
    return out;
}

NCPolynomial cyclic_symmetrize(const Word& q, int ell) {
    if (q.empty()) throw std::invalid_argument("cyclic_symmetrize: empty word");
    NCPolynomial out(ell);
    const double k = static_cast<double>(q.degree());
    for (std::size_t p = 0; p < q.degree(); ++p) out.add_term(q.rotated(p), 1.0 / k);
    return out;
}

NCPolynomial cyclic_symmetrize(const NCPolynomial& p) {
    NCPolynomial out(p.alphabet_size());
    for (auto& [w, c] : p.terms()) {
        if (w.empty()) {
            out.add_term(w, c);
            continue;
        }
        const double k = static_cast<double>(w.degree());
        for (std::size_t r = 0; r < w.degree(); ++r) out.add_term(w.rotated(r), c / k);
    }
    return out;
}

NCPolynomial cyclic_derivative(const NCPolynomial& p, int i) {
    if (i < 1 || i > p.alphabet_size())
        throw std::invalid_argument("cyclic_derivative: letter out of range");
    NCPolynomial out(p.alphabet_size());
    for (auto& [w, c] : p.terms()) {
        const auto& ls = w.letters;
        for (std::size_t pos = 0; pos < ls.size(); ++pos) {
            if (ls[pos] != i) continue;
            std::vector<int> rot;
            rot.reserve(ls.size() - 1);
            for (std::size_t j = pos + 1; j < ls.size(); ++j) rot.push_back(ls[j]);
            for (std::size_t j = 0; j < pos; ++j) rot.push_back(ls[j]);
            out.add_term(Word(rot), c);
        }
    }
    return out;
}

TensorPolynomial nc_derivative(const NCPolynomial& p, int i) {
    if (i < 1 || i > p.alphabet_size())
        throw std::invalid_argument("nc_derivative: letter out of range");
    TensorPolynomial out(p.alphabet_size());
    for (auto& [w, c] : p.terms()) {
        const auto& ls = w.letters;
        for (std::size_t pos = 0; pos < ls.size(); ++pos) {
            if (ls[pos] != i) continue;
            Word left(std::vector<int>(ls.begin(), ls.begin() + pos));
            Word right(std::vector<int>(ls.begin() + pos + 1, ls.end()));
            out.add_term(left, right, c);
        }
    }
    return out;
}

bool is_self_adjoint(const NCPolynomial& p, double tol) {
    NCPolynomial d = p - star(p);
    if (tol == 0.0) return d.is_zero();
    for (auto& [w, c] : d.terms())
        if (std::abs(c) > tol) return false;
    return true;
}

bool is_cyclically_invariant(const NCPolynomial& p, double tol) {
    NCPolynomial d = p - cyclic_symmetrize(p);
    if (tol == 0.0) return d.is_zero();
    for (auto& [w, c] : d.terms())
        if (std::abs(c) > tol) return false;
    return true;
}

NCPolynomial sym_dot(int ell, int i, const NCPolynomial& p) {
    NCPolynomial xi = NCPolynomial::letter(ell, i);
    return (multiply(xi, p) + multiply(p, xi)) * cplx(0.5);
}

NCPolynomial substitute_affine(const NCPolynomial& p, const std::vector<double>& shift,
                               const std::vector<double>& mat) {
    const int ell = p.alphabet_size();
    if (static_cast<int>(shift.size()) != ell || static_cast<int>(mat.size()) != ell * ell)
        throw std::invalid_argument("substitute_affine: bad shape");
    std::vector<NCPolynomial> images;
    images.reserve(ell);
    for (int i = 0; i < ell; ++i) {
        NCPolynomial img = NCPolynomial::unit(ell) * cplx(shift[i]);
        for (int j = 0; j < ell; ++j) {
            double m = mat[i * ell + j];
            if (m != 0.0) img = img + NCPolynomial::letter(ell, j + 1) * cplx(m);
        }
        images.push_back(img);
    }
    NCPolynomial out(ell);
    for (auto& [w, c] : p.terms()) {
        NCPolynomial acc = NCPolynomial::unit(ell) * c;
        for (int l : w.letters) acc = multiply(acc, images[l - 1]);
        out = out + acc;
    }
    return out;
}

NCPolynomial minus_commutator_squared(int ell, int a, int b) {
    NCPolynomial xa = NCPolynomial::letter(ell, a), xb = NCPolynomial::letter(ell, b);
    NCPolynomial comm = multiply(xa, xb) - multiply(xb, xa);
    return -multiply(comm, comm);
}

TensorPolynomial TensorPolynomial::operator+(const TensorPolynomial& q) const {
    if (ell_ != q.ell_) throw std::invalid_argument("alphabet mismatch");
    TensorPolynomial out = *this;
    for (auto& [k, c] : q.terms_) out.add_term(k.first, k.second, c);
    return out;
}

TensorPolynomial TensorPolynomial::operator-(const TensorPolynomial& q) const {
    if (ell_ != q.ell_) throw std::invalid_argument("alphabet mismatch");
    TensorPolynomial out = *this;
    for (auto& [k, c] : q.terms_) out.add_term(k.first, k.second, -c);
    return out;
}

TensorPolynomial TensorPolynomial::operator*(cplx s) const {
    TensorPolynomial out(ell_);
    if (s == 0.0) return out;
    for (auto& [k, c] : terms_) out.add_term(k.first, k.second, c * s);
    return out;
}

TensorPolynomial TensorPolynomial::left_multiply(const NCPolynomial& p,
                                                 const NCPolynomial& q) const {
    TensorPolynomial out(ell_);
    for (auto& [k, c] : terms_)
        for (auto& [wp, cp] : p.terms())
            for (auto& [wq, cq] : q.terms())
                out.add_term(wp.concat(k.first), wq.concat(k.second), c * cp * cq);
    return out;
}

TensorPolynomial TensorPolynomial::right_multiply(const NCPolynomial& p,
                                                  const NCPolynomial& q) const {
    TensorPolynomial out(ell_);
    for (auto& [k, c] : terms_)
        for (auto& [wp, cp] : p.terms())
            for (auto& [wq, cq] : q.terms())
                out.add_term(k.first.concat(wp), k.second.concat(wq), c * cp * cq);
    return out;
}

NCPolynomial TensorPolynomial::flatten() const {
    NCPolynomial out(ell_);
    for (auto& [k, c] : terms_) out.add_term(k.first.concat(k.second), c);
    return out;
}

}  // namespace mmlab
