// Trapping/confinement verification toolkit: the trace-inequality residual of
// the trapping definition, the syntactic confining classifier, appendix matrix
// inequalities, the decreasing flow, spectral Jacobians and point insertion.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmlab/matnum.hpp"
#include "mmlab/ncpoly.hpp"

namespace mmlab {

using Partition = std::vector<std::vector<int>>;  // disjoint blocks covering 1..ell

Partition trivial_partition(int ell);
void check_partition(const Partition& I, int ell);

struct TrappingSpec {
    NCPolynomial V;
    double eta = 0.0;
    double A = 0.0;
    Partition blocks;

    TrappingSpec(NCPolynomial v, double eta_, double a, Partition I);
};

// Tr(sum_j Z_j^k sum_{i in I_j} X_i . D_i V) - Tr(eta sum_j Z_j^{k+1} - A(1 + sum_j Z_j^k));
// the spec holds on X iff this is >= 0.
double trapping_residual(const TrappingSpec& spec, int k, const MatrixTuple& x);

// Randomized verification report over sizes and powers.
struct TrappingReport {
    int trials = 0;
    int violations = 0;
    double worst_residual = 0.0;
    int worst_k = -1;
    int worst_dim = 0;
    std::uint64_t worst_seed = 0;
    std::vector<int> dims;
    int max_k = 0;
};

TrappingReport verify_trapping(const TrappingSpec& spec, int trials, int max_k,
                               const std::vector<int>& dims, std::uint64_t seed,
                               double tol = 1e-10, MatrixTuple* worst_witness = nullptr);

// Syntactic confining classifier: V = sum_i P_i(X_i) + sum_u d_u q_u with
// every P_i of positive even top degree and every interaction monomial q_u of
// degree <= 2 min_{i in I_m} D_i - 1 for each touched block m.
struct ConfiningResult {
    bool confining = false;
    std::string failed_constraint;          // empty when confining
    std::vector<NCPolynomial> one_body;     // P_i per letter
    std::vector<std::pair<Word, cplx>> interactions;  // q_u with coefficients
    // Certified trapping parameters for the decomposition (valid when confining):
    double eta = 0.0;
    double A = 0.0;
};

ConfiningResult classify_confining(const NCPolynomial& v, const Partition& I);

// Tr(X^{u+v} Y^2) - Tr(X^u Y X^v Y); guaranteed >= 0 when u+v is even or X >= 0.
struct TraceIneqResult {
    double gap = 0.0;
    bool precondition_ok = false;
};
TraceIneqResult trace_ineq_commutator(const HermitianMatrix& x, const HermitianMatrix& y,
                                      int u, int v);

// ell^D Tr(Z^k sum_i X_i^{2D}) - Tr(Z^{k+D}) with Z = sum X_i^2; always >= 0.
double trace_ineq_holder(const MatrixTuple& x, int k, int d);

struct FlowTrajectory {
    std::vector<double> times;
    std::vector<MatrixTuple> states;
    // traces[t][j][n-1] = (1/N) Tr (Z_j(t))^n for n = 1..k+1
    std::vector<std::vector<std::vector<double>>> traces;
};

// RK4 integration of dX_i/dt = -(Z_j^k X_i + X_i Z_j^k) on each block j.
// Throws if any recorded trace increases beyond tol.
FlowTrajectory trapping_flow(const MatrixTuple& x0, const Partition& I, int k,
                             double dt, int steps, double tol = 1e-8);
double default_flow_step(const MatrixTuple& x0, const Partition& I, int k);

// Jacobian of X -> U f(Lambda) U* : (Delta(f(lambda))/Delta(lambda))^2 prod f'(lambda_i).
// Requires distinct eigenvalues (gap >= gap_tol) and f' > 0 on the spectrum.
double spectral_jacobian(const HermitianMatrix& h, const std::function<double(double)>& f,
                         const std::function<double(double)>& fprime,
                         double gap_tol = 1e-8);

// Sequential point insertion into the interval maximizing y -> sum ln(|x_i - y| - eps).
struct InsertedPoint {
    double y = 0.0;
    double objective = 0.0;   // sum of logs at y (0 for an empty constraint set)
    double bound = 0.0;       // certified lower bound n ln(|I|(1-eta)/(2e))
    double epsilon = 0.0;
};
std::vector<InsertedPoint> insert_points(double a, double b, std::vector<double> existing,
                                         double eta, int count);

// (eta, A) such that x P'(x) >= eta x^2 - A for all real x, for a one-variable
// self-adjoint polynomial with positive even leading term.
struct OneVarTrap {
    double eta = 0.0;
    double A = 0.0;
};
OneVarTrap one_var_trapping_params(const std::vector<double>& coeffs);

}  // namespace mmlab
