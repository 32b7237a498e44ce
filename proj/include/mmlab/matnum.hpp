// Dense Hermitian matrix numerics: eigenvalues (Householder tridiagonalization +
// implicit-shift QL), polynomial evaluation on matrix tuples, traces, norms and
// empirical non-commutative laws. Hot kernels have a serial reference and an
// OpenMP version; both summation orders are identical so results match bitwise.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "mmlab/ncpoly.hpp"

namespace mmlab {

class HermitianMatrix;

// General dense complex matrix; intermediate word products need not be Hermitian.
class ComplexMatrix {
  public:
    ComplexMatrix() : n_(0) {}
    explicit ComplexMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    int dim() const { return n_; }
    cplx& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const cplx& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    static ComplexMatrix identity(int n);

    ComplexMatrix operator+(const ComplexMatrix& b) const;
    ComplexMatrix operator-(const ComplexMatrix& b) const;
    ComplexMatrix operator*(cplx s) const;

    cplx trace() const;
    double frobenius_norm() const;
    ComplexMatrix adjoint() const;
    bool is_hermitian(double tol) const;

  private:
    int n_;
    std::vector<cplx> a_;
};

// C = A * B, serial reference and OpenMP (row-parallel, same inner order).
ComplexMatrix matmul_serial(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// N x N complex Hermitian matrix; construction enforces the symmetry.
class HermitianMatrix {
  public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(int n) : m_(n) {}

    // Validates Hermitian symmetry within tol (relative to max entry).
    static HermitianMatrix from_matrix(const ComplexMatrix& m, double tol = 1e-12);
    // Averages (M + M*)/2, no validation.
    static HermitianMatrix hermitize(const ComplexMatrix& m);
    static HermitianMatrix diagonal(const std::vector<double>& d);
    static HermitianMatrix identity(int n);
    static HermitianMatrix zero(int n) { return HermitianMatrix(n); }
    // GUE-normalized draw: diagonal N(0,1), off-diagonal complex with
    // E|H_ij|^2 = 1 (real and imaginary parts N(0,1/2)).
    static HermitianMatrix gaussian(int n, std::mt19937_64& rng);

    int dim() const { return m_.dim(); }
    const ComplexMatrix& matrix() const { return m_; }
    cplx entry(int i, int j) const { return m_.at(i, j); }
    void set_entry(int i, int j, cplx v) {  // keeps H Hermitian
        m_.at(i, j) = v;
        m_.at(j, i) = std::conj(v);
        if (i == j) m_.at(i, i) = cplx(v.real(), 0.0);
    }

    double trace() const { return m_.trace().real(); }
    double frobenius_norm() const { return m_.frobenius_norm(); }

    HermitianMatrix operator+(const HermitianMatrix& b) const;
    HermitianMatrix operator-(const HermitianMatrix& b) const;
    HermitianMatrix operator*(double s) const;

  private:
    ComplexMatrix m_;
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns; H = Q diag(values) Q*
    bool has_vectors = false;
};

// Householder tridiagonalization + implicit-shift QL with Wilkinson shifts.
// Throws on non-convergence after 64*N sweeps.
std::vector<double> eigenvalues(const HermitianMatrix& h);
EigenDecomposition eigen_decompose(const HermitianMatrix& h, bool want_vectors = true);

double operator_norm(const HermitianMatrix& h);

// f applied through the spectrum: U f(Lambda) U*.
HermitianMatrix spectral_map(const HermitianMatrix& h,
                             const std::function<double(double)>& f);

// Tuple of ell Hermitian matrices of common dimension.
struct MatrixTuple {
    std::vector<HermitianMatrix> x;

    MatrixTuple() = default;
    explicit MatrixTuple(std::vector<HermitianMatrix> xs) : x(std::move(xs)) {
        validate();
    }
    static MatrixTuple zero(int ell, int n) {
        return MatrixTuple(std::vector<HermitianMatrix>(ell, HermitianMatrix::zero(n)));
    }
    static MatrixTuple gaussian(int ell, int n, std::mt19937_64& rng);

    int ell() const { return static_cast<int>(x.size()); }
    int dim() const { return x.empty() ? 0 : x[0].dim(); }
    void validate() const;
};

// P(X_1,...,X_ell) by word-product accumulation.
ComplexMatrix evaluate(const NCPolynomial& p, const MatrixTuple& xs);
ComplexMatrix evaluate(const Word& w, const MatrixTuple& xs);
// Self-adjoint P: evaluates and checks Hermitian within tol.
HermitianMatrix evaluate_sa(const NCPolynomial& p, const MatrixTuple& xs, double tol = 1e-9);

// (1/N) Tr P(X)
cplx normalized_trace(const NCPolynomial& p, const MatrixTuple& xs);
cplx normalized_trace(const Word& w, const MatrixTuple& xs);

// [A, B] = AB - BA
ComplexMatrix commutator(const HermitianMatrix& a, const HermitianMatrix& b);

// Word-indexed moment table (1/N)Tr of every word up to max_degree.
struct EmpiricalLaw {
    int ell = 1;
    int max_degree = 0;
    int dim = 0;
    std::map<Word, cplx> moments;

    cplx moment(const Word& w) const {
        auto it = moments.find(w);
        if (it == moments.end()) throw std::out_of_range("word beyond degree cap");
        return it->second;
    }
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All words of length <= d; throws BudgetError if sum_k ell^k exceeds the budget.
EmpiricalLaw empirical_law(const MatrixTuple& xs, int d, std::size_t budget = 1000000);

// Gram matrix [moment(v* w)] over words of length <= d/2; for positivity checks.
HermitianMatrix law_gram_matrix(const EmpiricalLaw& law);

std::vector<Word> all_words(int ell, int max_len);

}  // namespace mmlab
