#include "mmlab/matnum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mmlab {

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& b) const {
    if (n_ != b.n_) throw std::invalid_argument("dimension mismatch");
    ComplexMatrix c(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) c.a_[k] = a_[k] + b.a_[k];
    return c;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& b) const {
    if (n_ != b.n_) throw std::invalid_argument("dimension mismatch");
    ComplexMatrix c(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) c.a_[k] = a_[k] - b.a_[k];
    return c;
}

ComplexMatrix ComplexMatrix::operator*(cplx s) const {
    ComplexMatrix c(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) c.a_[k] = a_[k] * s;
    return c;
}

cplx ComplexMatrix::trace() const {
    cplx t = 0.0;
    for (int i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const cplx& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix c(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) c.at(i, j) = std::conj(at(j, i));
    return c;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    double scale = 0.0;
    for (const cplx& v : a_) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return true;
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            if (std::abs(at(i, j) - std::conj(at(j, i))) > tol * scale) return false;
    return true;
}

namespace {
inline void matmul_row_range(const ComplexMatrix& a, const ComplexMatrix& b,
                             ComplexMatrix& c, int i0, int i1) {
    const int n = a.dim();
    for (int i = i0; i < i1; ++i) {
        cplx* crow = &c.data()[static_cast<std::size_t>(i) * n];
        for (int k = 0; k < n; ++k) {
            const cplx aik = a.at(i, k);
            if (aik == 0.0) continue;
            const cplx* brow = &b.data()[static_cast<std::size_t>(k) * n];
            for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
}
}  // namespace

ComplexMatrix matmul_serial(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    ComplexMatrix c(a.dim());
    matmul_row_range(a, b, c, 0, a.dim());
    return c;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    const int n = a.dim();
    ComplexMatrix c(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= 64)
#endif
    for (int i = 0; i < n; ++i) matmul_row_range(a, b, c, i, i + 1);
    return c;
}

HermitianMatrix HermitianMatrix::from_matrix(const ComplexMatrix& m, double tol) {
    if (!m.is_hermitian(tol)) throw std::invalid_argument("matrix is not Hermitian");
    return hermitize(m);
}

HermitianMatrix HermitianMatrix::hermitize(const ComplexMatrix& m) {
    HermitianMatrix h(m.dim());
    for (int i = 0; i < m.dim(); ++i) {
        h.m_.at(i, i) = cplx(0.5 * (m.at(i, i) + std::conj(m.at(i, i))).real(), 0.0);
        for (int j = i + 1; j < m.dim(); ++j) {
            cplx v = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
            h.m_.at(i, j) = v;
            h.m_.at(j, i) = std::conj(v);
        }
    }
    return h;
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
    HermitianMatrix h(static_cast<int>(d.size()));
    for (int i = 0; i < h.dim(); ++i) h.m_.at(i, i) = d[i];
    return h;
}

HermitianMatrix HermitianMatrix::identity(int n) {
    return diagonal(std::vector<double>(n, 1.0));
}

HermitianMatrix HermitianMatrix::gaussian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    HermitianMatrix h(n);
    const double isq2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        h.m_.at(i, i) = nd(rng);
        for (int j = i + 1; j < n; ++j) {
            cplx v(nd(rng) * isq2, nd(rng) * isq2);
            h.m_.at(i, j) = v;
            h.m_.at(j, i) = std::conj(v);
        }
    }
    return h;
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& b) const {
    HermitianMatrix h;
    h.m_ = m_ + b.m_;
    return h;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& b) const {
    HermitianMatrix h;
    h.m_ = m_ - b.m_;
    return h;
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
    HermitianMatrix h;
    h.m_ = m_ * cplx(s);
    return h;
}

// ---------------------------------------------------------------------------
// Eigensolver. Householder reduction of a Hermitian matrix to real symmetric
// tridiagonal form (phases absorbed into the accumulated unitary), followed by
// implicit-shift QL with Wilkinson shifts.
namespace {

struct Tridiag {
    std::vector<double> d;  // diagonal
    std::vector<double> e;  // sub-diagonal, e[0..n-2]
    ComplexMatrix q;        // accumulated unitary (if requested)
    bool has_q = false;
};

Tridiag householder_tridiag(const HermitianMatrix& h, bool want_q) {
    const int n = h.dim();
    ComplexMatrix a = h.matrix();
    Tridiag t;
    t.d.assign(n, 0.0);
    t.e.assign(std::max(0, n - 1), 0.0);
    std::vector<cplx> esub(std::max(0, n - 1), 0.0);
    if (want_q) {
        t.q = ComplexMatrix::identity(n);
        t.has_q = true;
    }

    std::vector<cplx> v(n), p(n), w(n);
    for (int k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (int i = k + 1; i < n; ++i) xnorm2 += std::norm(a.at(i, k));
        const double xnorm = std::sqrt(xnorm2);
        const cplx x0 = a.at(k + 1, k);
        if (xnorm == 0.0) {
            esub[k] = 0.0;
            continue;
        }
        const cplx phase = (std::abs(x0) == 0.0) ? cplx(1.0) : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;
        double vnorm2 = 0.0;
        for (int i = k + 1; i < n; ++i) {
            v[i] = a.at(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm2 += std::norm(v[i]);
        }
        if (vnorm2 == 0.0) {
            esub[k] = alpha;
            continue;
        }
        const double inv = 1.0 / std::sqrt(vnorm2);
        for (int i = k + 1; i < n; ++i) v[i] *= inv;

        // Rank-2 update of the trailing block: A <- A - v w* - w v*,
        // with p = 2 A v and w = p - (v* p) v.
        cplx vp = 0.0;
        for (int i = k + 1; i < n; ++i) {
            cplx s = 0.0;
            for (int j = k + 1; j < n; ++j) s += a.at(i, j) * v[j];
            p[i] = 2.0 * s;
        }
        for (int i = k + 1; i < n; ++i) vp += std::conj(v[i]) * p[i];
        for (int i = k + 1; i < n; ++i) w[i] = p[i] - vp * v[i];
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a.at(i, j) -= v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);

        esub[k] = alpha;
        a.at(k + 1, k) = alpha;
        a.at(k, k + 1) = std::conj(alpha);
        for (int i = k + 2; i < n; ++i) {
            a.at(i, k) = 0.0;
            a.at(k, i) = 0.0;
        }
        if (want_q) {
            // Q <- Q (I - 2 v v*)
            for (int r = 0; r < n; ++r) {
                cplx s = 0.0;
                for (int i = k + 1; i < n; ++i) s += t.q.at(r, i) * v[i];
                s *= 2.0;
                for (int i = k + 1; i < n; ++i) t.q.at(r, i) -= s * std::conj(v[i]);
            }
        }
    }
    if (n >= 2) esub[n - 2] = a.at(n - 1, n - 2);
    for (int i = 0; i < n; ++i) t.d[i] = a.at(i, i).real();

    // Rotate away the phases of the sub-diagonal: D* T D has |e| entries.
    cplx cum(1.0, 0.0);
    for (int k = 0; k + 1 < n; ++k) {
        const double mag = std::abs(esub[k]);
        t.e[k] = mag;
        cplx ph = (mag == 0.0) ? cplx(1.0) : esub[k] / mag;
        cum *= ph;
        if (want_q)
            for (int r = 0; r < n; ++r) t.q.at(r, k + 1) *= cum;
    }
    return t;
}

// Implicit-shift QL on (d, e); rotations accumulated into the columns of q.
void tqli(std::vector<double>& d, std::vector<double>& e, ComplexMatrix* q) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return;
    e.push_back(0.0);
    const int max_iter = 64 * std::max(n, 1);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == max_iter)
                    throw std::runtime_error("eigenvalue iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (q) {
                        for (int row = 0; row < n; ++row) {
                            const cplx qi1 = q->at(row, i + 1);
                            const cplx qi = q->at(row, i);
                            q->at(row, i + 1) = s * qi + c * qi1;
                            q->at(row, i) = c * qi - s * qi1;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    e.pop_back();
}

}  // namespace

EigenDecomposition eigen_decompose(const HermitianMatrix& h, bool want_vectors) {
    const int n = h.dim();
    Tridiag t = householder_tridiag(h, want_vectors);
    tqli(t.d, t.e, want_vectors ? &t.q : nullptr);

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return t.d[a] < t.d[b]; });

    EigenDecomposition out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = t.d[idx[i]];
    if (want_vectors) {
        out.vectors = ComplexMatrix(n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) out.vectors.at(i, j) = t.q.at(i, idx[j]);
        out.has_vectors = true;
    }
    return out;
}

std::vector<double> eigenvalues(const HermitianMatrix& h) {
    return eigen_decompose(h, false).values;
}

double operator_norm(const HermitianMatrix& h) {
    if (h.dim() == 0) return 0.0;
    auto ev = eigenvalues(h);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

HermitianMatrix spectral_map(const HermitianMatrix& h,
                             const std::function<double(double)>& f) {
    EigenDecomposition ed = eigen_decompose(h, true);
    const int n = h.dim();
    ComplexMatrix tmp(n);
    for (int i = 0; i < n; ++i) {
        const double fv = f(ed.values[i]);
        for (int r = 0; r < n; ++r) tmp.at(r, i) = ed.vectors.at(r, i) * fv;
    }
    ComplexMatrix out = matmul(tmp, ed.vectors.adjoint());
    return HermitianMatrix::hermitize(out);
}

void MatrixTuple::validate() const {
    if (x.empty()) throw std::invalid_argument("tuple must have ell >= 1");
    for (const auto& m : x)
        if (m.dim() != x[0].dim()) throw std::invalid_argument("tuple dimension mismatch");
}

MatrixTuple MatrixTuple::gaussian(int ell, int n, std::mt19937_64& rng) {
    std::vector<HermitianMatrix> xs;
    xs.reserve(ell);
    for (int i = 0; i < ell; ++i) xs.push_back(HermitianMatrix::gaussian(n, rng));
    return MatrixTuple(std::move(xs));
}

ComplexMatrix evaluate(const Word& w, const MatrixTuple& xs) {
    const int n = xs.dim();
    ComplexMatrix acc = ComplexMatrix::identity(n);
    for (int l : w.letters) {
        if (l < 1 || l > xs.ell()) throw std::invalid_argument("letter/alphabet mismatch");
        acc = matmul(acc, xs.x[l - 1].matrix());
    }
    return acc;
}

ComplexMatrix evaluate(const NCPolynomial& p, const MatrixTuple& xs) {
    if (p.alphabet_size() != xs.ell())
        throw std::invalid_argument("alphabet/tuple mismatch");
    const int n = xs.dim();
    ComplexMatrix out(n);
    for (auto& [w, c] : p.terms()) out = out + evaluate(w, xs) * c;
    return out;
}

HermitianMatrix evaluate_sa(const NCPolynomial& p, const MatrixTuple& xs, double tol) {
    ComplexMatrix m = evaluate(p, xs);
    if (!m.is_hermitian(tol))
        throw std::runtime_error("evaluation of self-adjoint polynomial is not Hermitian");
    return HermitianMatrix::hermitize(m);
}

cplx normalized_trace(const Word& w, const MatrixTuple& xs) {
    return evaluate(w, xs).trace() / static_cast<double>(xs.dim());
}

cplx normalized_trace(const NCPolynomial& p, const MatrixTuple& xs) {
    return evaluate(p, xs).trace() / static_cast<double>(xs.dim());
}

ComplexMatrix commutator(const HermitianMatrix& a, const HermitianMatrix& b) {
    return matmul(a.matrix(), b.matrix()) - matmul(b.matrix(), a.matrix());
}

std::vector<Word> all_words(int ell, int max_len) {
    std::vector<Word> out;
    out.emplace_back();
    std::vector<Word> frontier = out;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<Word> next;
        for (const Word& w : frontier)
            for (int l = 1; l <= ell; ++l) {
                Word e = w;
                e.letters.push_back(l);
                next.push_back(std::move(e));
            }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

EmpiricalLaw empirical_law(const MatrixTuple& xs, int d, std::size_t budget) {
    if (d < 0) throw std::invalid_argument("degree cap must be >= 0");
    const int ell = xs.ell();
    std::size_t count = 1, pow = 1;
    for (int k = 1; k <= d; ++k) {
        pow *= static_cast<std::size_t>(ell);
        count += pow;
        if (count > budget) throw BudgetError("word budget exceeded in empirical_law");
    }
    EmpiricalLaw law;
    law.ell = ell;
    law.max_degree = d;
    law.dim = xs.dim();
    const double n = static_cast<double>(xs.dim());

    // DFS over the word tree reusing prefix products.
    std::vector<ComplexMatrix> stack;
    stack.push_back(ComplexMatrix::identity(xs.dim()));
    std::vector<int> word;
    law.moments[Word{}] = stack.back().trace() / n;

    std::function<void()> recurse = [&]() {
        if (static_cast<int>(word.size()) == d) return;
        for (int l = 1; l <= ell; ++l) {
            word.push_back(l);
            stack.push_back(matmul(stack.back(), xs.x[l - 1].matrix()));
            law.moments[Word(word)] = stack.back().trace() / n;
            recurse();
            stack.pop_back();
            word.pop_back();
        }
    };
    recurse();
    return law;
}

HermitianMatrix law_gram_matrix(const EmpiricalLaw& law) {
    auto words = all_words(law.ell, law.max_degree / 2);
    const int m = static_cast<int>(words.size());
    ComplexMatrix g(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            g.at(i, j) = law.moment(words[i].reversed().concat(words[j]));
    return HermitianMatrix::hermitize(g);
}

}  // namespace mmlab
