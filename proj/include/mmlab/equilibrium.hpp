// Convex equilibrium-measure solver on a uniform grid: exact cell-averaged
// kernels (-ln|x-y| and the finite-beta kernel ln(1+1/(beta t^2))), simplex
// mirror descent with an active-set refinement jump, water-filling, and the
// closed-form low-temperature constants.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mmlab {

struct Grid {
    double a = 0.0, b = 1.0;
    int m = 1;

    Grid() = default;
    Grid(double a_, double b_, int m_);
    double h() const { return (b - a) / m; }
    double center(int k) const { return a + (k + 0.5) * h(); }
};

struct GridMeasure {
    Grid grid;
    std::vector<double> w;  // nonnegative, sums to 1

    GridMeasure() = default;
    GridMeasure(Grid g, std::vector<double> weights);
    double density(int k) const { return w[k] / grid.h(); }
    void validate(double tol = 1e-12) const;
    // mass carried by cells whose center lies in [lo, hi]
    double mass_in(double lo, double hi) const;
    double moment(int p) const;
};

enum class KernelKind { NegLog, ModLog };

struct KernelMatrix {
    KernelKind kind = KernelKind::NegLog;
    double beta = 0.0;  // ModLog only
    int m = 0;
    std::vector<double> a;  // m*m symmetric, exact cell-pair averages

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }
};

// phi_beta(t) = ln(1 + 1/(beta t^2)); +inf sentinel at t = 0.
double pair_kernel(double beta, double t);

// Second antiderivatives G with G'' = kernel, G(0) = 0, used for exact
// cell-pair averages [G(d+h) - 2G(d) + G(d-h)] / h^2.
double neg_log_G(double t);
double mod_log_G(double beta, double t);

KernelMatrix assemble_kernel_serial(const Grid& g, KernelKind kind, double beta = 0.0);
KernelMatrix assemble_kernel(const Grid& g, KernelKind kind, double beta = 0.0);

// y = K w
std::vector<double> kernel_matvec_serial(const KernelMatrix& k, const std::vector<double>& w);
std::vector<double> kernel_matvec(const KernelMatrix& k, const std::vector<double>& w);

struct MinimizeOptions {
    int max_iter = 200000;
    double kkt_tol = 1e-8;
    double rel_decrease_tol = 1e-10;
    int jump_every = 250;  // active-set refinement cadence (0 = off)
};

struct MinimizeResult {
    GridMeasure minimizer;
    double energy = 0.0;   // w.Vbar + w^T K w
    int iterations = 0;
    double kkt_residual = 0.0;
    bool converged = false;
};

// min over the simplex of J(w) = sum_k w_k Vbar_k + w^T K w; Vbar_k is the
// Gauss-Legendre cell average of V. Monotone in the objective by construction.
MinimizeResult minimize(const std::function<double(double)>& v, const Grid& g,
                        KernelKind kind, double beta = 0.0,
                        const MinimizeOptions& opts = {});

struct WaterFillResult {
    double level = 0.0;              // A_m
    std::vector<double> alpha;       // (A_m - v_i)_+ / (2 pi m)
    double objective = 0.0;          // phi_m(alpha)
};

// Exact minimizer of phi_m(alpha) = sum alpha_i v_i + 2 pi m sum alpha_i^2 on
// the simplex; the level solves sum (A - v_i)_+ = 2 pi m by bisection.
WaterFillResult water_fill(int m, const std::vector<double>& values);

struct LimitDensity {
    double level = 0.0;  // A
    double c = 0.0;
    int p = 1;
    double support_radius = 0.0;  // (A/c)^{1/(2p)}
    double operator()(double x) const;
};

// nu_c(dx) = (1/2pi)(A - c x^{2p})_+ dx with the closed-form normalizing A.
LimitDensity limit_density(double c, int p);

// Low-temperature energy constant for wells of maximal flatness p.
double cV_constant(int p, const std::vector<double>& c_list);

// Scale for the energy (beta_p) and support width (gamma_p).
struct ScalingLaws {
    int p = 1;
    double beta = 0.0;
    double beta_p = 0.0;   // beta^{p/(2p+1)}
    double gamma_p = 0.0;  // beta^{-1/(2(2p+1))}
};
ScalingLaws scaling_laws(int p, double beta);

struct SimplexPowerResult {
    std::vector<double> alpha;
    double value = 0.0;
};
// min over the simplex of sum u_i alpha_i^{1+k}: alpha_i ~ u_i^{-1/k},
// value (sum u_i^{-1/k})^{-k}.
SimplexPowerResult simplex_power_minimize(const std::vector<double>& u, double k);

// Coulomb distance D(mu, nu): quadratic form of the neg-log kernel on w_mu - w_nu.
double coulomb_distance(const GridMeasure& mu, const GridMeasure& nu);
// Same quantity through (int_0^inf |hat(mu-nu)(t)|^2 / t dt)^{1/2} by quadrature.
double coulomb_distance_fourier(const GridMeasure& mu, const GridMeasure& nu);

// ||f||_{1/2} = (int_0^inf t |hat f(t)|^2 dt)^{1/2} for a sampled function on the grid.
double half_norm(const std::function<double(double)>& f, double a, double b, int samples);

// sigma^k_r: minimizer of int r x^{2k} dmu - int int ln|x-y| dmu dmu on the grid.
MinimizeResult sigma_kr(int k, double r, const Grid& g);

// Exact moment int x^a y^b over the ball of radius (3 pi)^{1/3} in R^3,
// divided by its volume.
double ball_moment(int a, int b);
double ball_radius();

}  // namespace mmlab
