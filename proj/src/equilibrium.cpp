#include "mmlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mmlab {

Grid::Grid(double a_, double b_, int m_) : a(a_), b(b_), m(m_) {
    if (!(b > a) || m < 2) throw std::invalid_argument("grid needs b > a and m >= 2");
}

GridMeasure::GridMeasure(Grid g, std::vector<double> weights)
    : grid(g), w(std::move(weights)) {
    if (static_cast<int>(w.size()) != grid.m)
        throw std::invalid_argument("weight count does not match grid");
}

void GridMeasure::validate(double tol) const {
    double s = 0.0;
    for (double x : w) {
        if (x < -tol) throw std::invalid_argument("negative weight");
        s += x;
    }
    if (std::abs(s - 1.0) > tol) throw std::invalid_argument("weights do not sum to 1");
}

double GridMeasure::mass_in(double lo, double hi) const {
    double s = 0.0;
    for (int k = 0; k < grid.m; ++k) {
        const double c = grid.center(k);
        if (c >= lo && c <= hi) s += w[k];
    }
    return s;
}

double GridMeasure::moment(int p) const {
    double s = 0.0;
    for (int k = 0; k < grid.m; ++k) s += w[k] * std::pow(grid.center(k), p);
    return s;
}

double pair_kernel(double beta, double t) {
    if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
    if (t == 0.0) return std::numeric_limits<double>::infinity();
    return std::log1p(1.0 / (beta * t * t));
}

double neg_log_G(double t) {
    if (t == 0.0) return 0.0;
    return 0.75 * t * t - 0.5 * t * t * std::log(std::abs(t));
}

double mod_log_G(double beta, double t) {
    if (t == 0.0) return 0.0;
    const double bt2 = beta * t * t;
    const double sq = std::sqrt(beta);
    return 0.5 * t * t * std::log1p(1.0 / bt2) - std::log1p(bt2) / (2.0 * beta) +
           (2.0 * t / sq) * std::atan(sq * t);
}

namespace {

inline double cell_avg(KernelKind kind, double beta, double d, double h) {
    auto G = [&](double t) {
        return kind == KernelKind::NegLog ? neg_log_G(t) : mod_log_G(beta, t);
    };
    return (G(d + h) - 2.0 * G(d) + G(d - h)) / (h * h);
}

}  // namespace

KernelMatrix assemble_kernel_serial(const Grid& g, KernelKind kind, double beta) {
    if (kind == KernelKind::ModLog && beta <= 0.0)
        throw std::invalid_argument("ModLog kernel needs beta > 0");
    KernelMatrix k;
    k.kind = kind;
    k.beta = beta;
    k.m = g.m;
    k.a.assign(static_cast<std::size_t>(g.m) * g.m, 0.0);
    const double h = g.h();
    // entries depend only on |i-j|
    std::vector<double> row(g.m);
    for (int d = 0; d < g.m; ++d) row[d] = cell_avg(kind, beta, d * h, h);
    for (int i = 0; i < g.m; ++i)
        for (int j = 0; j < g.m; ++j)
            k.a[static_cast<std::size_t>(i) * g.m + j] = row[std::abs(i - j)];
    return k;
}

KernelMatrix assemble_kernel(const Grid& g, KernelKind kind, double beta) {
    if (kind == KernelKind::ModLog && beta <= 0.0)
        throw std::invalid_argument("ModLog kernel needs beta > 0");
    KernelMatrix k;
    k.kind = kind;
    k.beta = beta;
    k.m = g.m;
    k.a.assign(static_cast<std::size_t>(g.m) * g.m, 0.0);
    const double h = g.h();
    std::vector<double> row(g.m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int d = 0; d < g.m; ++d) row[d] = cell_avg(kind, beta, d * h, h);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < g.m; ++i)
        for (int j = 0; j < g.m; ++j)
            k.a[static_cast<std::size_t>(i) * g.m + j] = row[std::abs(i - j)];
    return k;
}

std::vector<double> kernel_matvec_serial(const KernelMatrix& k, const std::vector<double>& w) {
    std::vector<double> y(k.m, 0.0);
    for (int i = 0; i < k.m; ++i) {
        const double* row = &k.a[static_cast<std::size_t>(i) * k.m];
        double s = 0.0;
        for (int j = 0; j < k.m; ++j) s += row[j] * w[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> kernel_matvec(const KernelMatrix& k, const std::vector<double>& w) {
    std::vector<double> y(k.m, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (k.m >= 256)
#endif
    for (int i = 0; i < k.m; ++i) {
        const double* row = &k.a[static_cast<std::size_t>(i) * k.m];
        double s = 0.0;
        for (int j = 0; j < k.m; ++j) s += row[j] * w[j];
        y[i] = s;
    }
    return y;
}

namespace {

// 5-point Gauss-Legendre cell average (exact for polynomial degree <= 9)
double cell_average(const std::function<double(double)>& f, double lo, double hi) {
    static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += ws[i] * f(mid + half * xs[i]);
    return 0.5 * s;
}

// dense symmetric-indefinite solve by Gaussian elimination with partial pivoting
bool solve_dense(std::vector<double> a, std::vector<double> b, int n,
                 std::vector<double>& out) {
    std::vector<int> piv(n);
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * n + c]) >
                std::abs(a[static_cast<std::size_t>(p) * n + c]))
                p = r;
        if (a[static_cast<std::size_t>(p) * n + c] == 0.0) return false;
        if (p != c) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<std::size_t>(p) * n + j],
                          a[static_cast<std::size_t>(c) * n + j]);
            std::swap(b[p], b[c]);
        }
        const double inv = 1.0 / a[static_cast<std::size_t>(c) * n + c];
        for (int r = c + 1; r < n; ++r) {
            const double f = a[static_cast<std::size_t>(r) * n + c] * inv;
            if (f == 0.0) continue;
            for (int j = c; j < n; ++j)
                a[static_cast<std::size_t>(r) * n + j] -=
                    f * a[static_cast<std::size_t>(c) * n + j];
            b[r] -= f * b[c];
        }
    }
    out.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < n; ++j) s -= a[static_cast<std::size_t>(r) * n + j] * out[j];
        out[r] = s / a[static_cast<std::size_t>(r) * n + r];
    }
    return true;
}

}  // namespace

MinimizeResult minimize(const std::function<double(double)>& v, const Grid& g,
                        KernelKind kind, double beta, const MinimizeOptions& opts) {
    const int m = g.m;
    KernelMatrix kmat = assemble_kernel(g, kind, beta);
    std::vector<double> vbar(m);
    for (int k = 0; k < m; ++k) {
        const double lo = g.a + k * g.h(), hi = lo + g.h();
        vbar[k] = cell_average(v, lo, hi);
        if (!std::isfinite(vbar[k]))
            throw std::invalid_argument("potential not finite on the grid");
    }

    std::vector<double> w(m, 1.0 / m);
    auto objective = [&](const std::vector<double>& ww, const std::vector<double>& kw) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += ww[k] * (vbar[k] + kw[k]);
        return s;
    };

    std::vector<double> kw = kernel_matvec(kmat, w);
    double j = objective(w, kw);
    double step = 1.0;
    MinimizeResult res;

    auto kkt_residual = [&](const std::vector<double>& grad) {
        double mu = 0.0;
        for (int k = 0; k < m; ++k) mu += w[k] * grad[k];
        const double scale = std::max(1.0, std::abs(mu));
        double r = 0.0;
        for (int k = 0; k < m; ++k) {
            if (w[k] > 1e-12) r = std::max(r, std::abs(grad[k] - mu) / scale);
            r = std::max(r, (mu - grad[k]) / scale);
        }
        return r;
    };

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        std::vector<double> grad(m);
        for (int k = 0; k < m; ++k) grad[k] = vbar[k] + 2.0 * kw[k];
        res.kkt_residual = kkt_residual(grad);
        if (res.kkt_residual < opts.kkt_tol) {
            res.converged = true;
            break;
        }

        // occasional active-set refinement: exact stationary point on the
        // current support, accepted only when it lowers the objective
        if (opts.jump_every > 0 && it > 0 && it % opts.jump_every == 0) {
            std::vector<int> sup;
            for (int k = 0; k < m; ++k)
                if (w[k] > 1e-14) sup.push_back(k);
            const int s = static_cast<int>(sup.size());
            if (s >= 1 && s <= 4000) {
                std::vector<double> a(static_cast<std::size_t>(s + 1) * (s + 1), 0.0);
                std::vector<double> rhs(s + 1, 0.0);
                for (int r = 0; r < s; ++r) {
                    for (int c = 0; c < s; ++c)
                        a[static_cast<std::size_t>(r) * (s + 1) + c] =
                            2.0 * kmat.at(sup[r], sup[c]);
                    a[static_cast<std::size_t>(r) * (s + 1) + s] = -1.0;
                    rhs[r] = -vbar[sup[r]];
                }
                for (int c = 0; c < s; ++c)
                    a[static_cast<std::size_t>(s) * (s + 1) + c] = 1.0;
                rhs[s] = 1.0;
                std::vector<double> sol;
                if (solve_dense(std::move(a), std::move(rhs), s + 1, sol)) {
                    std::vector<double> cand(m, 0.0);
                    double mass = 0.0;
                    for (int r = 0; r < s; ++r) {
                        cand[sup[r]] = std::max(0.0, sol[r]);
                        mass += cand[sup[r]];
                    }
                    if (mass > 0.0) {
                        for (double& x : cand) x /= mass;
                        auto kc = kernel_matvec(kmat, cand);
                        const double jc = objective(cand, kc);
                        if (jc < j) {
                            w = std::move(cand);
                            kw = std::move(kc);
                            j = jc;
                            continue;
                        }
                    }
                }
            }
        }

        // exponentiated-gradient step with backtracking on the true objective
        double gmin = grad[0];
        for (double gk : grad) gmin = std::min(gmin, gk);
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            std::vector<double> cand(m);
            double z = 0.0;
            for (int k = 0; k < m; ++k) {
                cand[k] = w[k] * std::exp(-step * (grad[k] - gmin));
                z += cand[k];
            }
            if (z <= 0.0 || !std::isfinite(z)) {
                step *= 0.5;
                continue;
            }
            for (double& x : cand) x /= z;
            auto kc = kernel_matvec(kmat, cand);
            const double jc = objective(cand, kc);
            if (jc <= j) {
                const double decrease = j - jc;
                w = std::move(cand);
                kw = std::move(kc);
                const double rel = decrease / std::max(1.0, std::abs(jc));
                j = jc;
                accepted = true;
                step *= 1.25;
                if (rel < opts.rel_decrease_tol && tries == 0) {
                    std::vector<double> g2(m);
                    for (int k = 0; k < m; ++k) g2[k] = vbar[k] + 2.0 * kw[k];
                    res.kkt_residual = kkt_residual(g2);
                    res.converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if (!accepted || res.converged) break;
    }

    for (double& x : w)
        if (x < 1e-300) x = 0.0;
    double z = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= z;
    res.minimizer = GridMeasure(g, w);
    res.iterations = it;
    kw = kernel_matvec(kmat, w);
    res.energy = objective(w, kw);
    return res;
}

WaterFillResult water_fill(int m, const std::vector<double>& values) {
    if (m < 1 || values.empty()) throw std::invalid_argument("water_fill: bad input");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("water_fill: non-finite value");
    const double target = 2.0 * M_PI * m;
    auto excess = [&](double a) {
        double s = 0.0;
        for (double v : values) s += std::max(0.0, a - v);
        return s - target;
    };
    double lo = *std::min_element(values.begin(), values.end());
    double hi = lo + target + 1.0;
    while (excess(hi) < 0.0) hi += target;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    WaterFillResult out;
    out.level = 0.5 * (lo + hi);
    out.alpha.resize(values.size());
    double obj = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.alpha[i] = std::max(0.0, out.level - values[i]) / target;
        obj += out.alpha[i] * values[i] + target * out.alpha[i] * out.alpha[i];
    }
    out.objective = obj;
    return out;
}

double LimitDensity::operator()(double x) const {
    return std::max(0.0, level - c * std::pow(x, 2 * p)) / (2.0 * M_PI);
}

LimitDensity limit_density(double c, int p) {
    if (c <= 0.0 || p < 1) throw std::invalid_argument("limit_density: c > 0, p >= 1");
    LimitDensity d;
    d.c = c;
    d.p = p;
    d.level = std::pow(c, 1.0 / (2 * p + 1)) *
              std::pow((2.0 * p + 1.0) * M_PI / (2.0 * p),
                       2.0 * p / (2.0 * p + 1.0));
    d.support_radius = std::pow(d.level / c, 1.0 / (2.0 * p));
    return d;
}

double cV_constant(int p, const std::vector<double>& c_list) {
    if (p < 1 || c_list.empty()) throw std::invalid_argument("cV_constant: bad input");
    double s = 0.0;
    for (double c : c_list) {
        if (c <= 0.0) throw std::invalid_argument("cV_constant: c_j must be positive");
        s += std::pow(c, -1.0 / (2.0 * p));
    }
    const double dp = static_cast<double>(p);
    return std::pow(1.0 + 1.0 / (2.0 * dp), (4.0 * dp + 1.0) / (2.0 * dp + 1.0)) *
           std::pow(M_PI, 1.0 - 1.0 / (2.0 * dp + 1.0)) *
           std::pow(s, 1.0 / (2.0 * dp + 1.0) - 1.0);
}

ScalingLaws scaling_laws(int p, double beta) {
    ScalingLaws s;
    s.p = p;
    s.beta = beta;
    s.beta_p = std::pow(beta, static_cast<double>(p) / (2.0 * p + 1.0));
    s.gamma_p = std::pow(beta, -1.0 / (2.0 * (2.0 * p + 1.0)));
    return s;
}

SimplexPowerResult simplex_power_minimize(const std::vector<double>& u, double k) {
    if (u.empty() || k <= 0.0) throw std::invalid_argument("simplex_power_minimize");
    SimplexPowerResult out;
    double z = 0.0;
    for (double ui : u) {
        if (ui <= 0.0) throw std::invalid_argument("u_i must be positive");
        z += std::pow(ui, -1.0 / k);
    }
    out.alpha.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out.alpha[i] = std::pow(u[i], -1.0 / k) / z;
    out.value = std::pow(z, -k);
    return out;
}

double coulomb_distance(const GridMeasure& mu, const GridMeasure& nu) {
    if (mu.grid.m != nu.grid.m || mu.grid.a != nu.grid.a || mu.grid.b != nu.grid.b)
        throw std::invalid_argument("coulomb_distance: grids must match");
    KernelMatrix k = assemble_kernel(mu.grid, KernelKind::NegLog);
    std::vector<double> d(mu.grid.m);
    for (int i = 0; i < mu.grid.m; ++i) d[i] = mu.w[i] - nu.w[i];
    auto kd = kernel_matvec(k, d);
    double q = 0.0;
    for (int i = 0; i < mu.grid.m; ++i) q += d[i] * kd[i];
    return std::sqrt(std::max(0.0, q));
}

double coulomb_distance_fourier(const GridMeasure& mu, const GridMeasure& nu) {
    if (mu.grid.m != nu.grid.m || mu.grid.a != nu.grid.a || mu.grid.b != nu.grid.b)
        throw std::invalid_argument("coulomb_distance: grids must match");
    const int m = mu.grid.m;
    const double h = mu.grid.h();
    std::vector<double> d(m);
    double d2sum = 0.0;
    for (int i = 0; i < m; ++i) {
        d[i] = mu.w[i] - nu.w[i];
        d2sum += d[i] * d[i];
    }
    auto f2 = [&](double t) {  // |hat(mu-nu)(t)|^2
        double re = 0.0, im = 0.0;
        for (int i = 0; i < m; ++i) {
            const double c = mu.grid.center(i);
            re += d[i] * std::cos(t * c);
            im += d[i] * std::sin(t * c);
        }
        const double x = 0.5 * t * h;
        const double sinc = (std::abs(x) < 1e-8) ? 1.0 : std::sin(x) / x;
        return (re * re + im * im) * sinc * sinc;
    };
    // integrand |F|^2 / t ~ t near 0 (mass difference is 0); Simpson on [0, T]
    const double span = mu.grid.b - mu.grid.a;
    const double T = 3000.0 / span;
    const int n = 300000;  // even
    const double dt = T / n;
    double s = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double t = i * dt;
        const double val = f2(t) / t;
        s += (i == n) ? val : (i % 2 == 1 ? 4.0 : 2.0) * val;
    }
    double q = s * dt / 3.0;
    // mean-oscillation tail estimate: |F|^2 averages to sum d_i^2 * 2/(t h)^2
    q += 2.0 * d2sum / (h * h * 2.0 * T * T);
    return std::sqrt(std::max(0.0, q));
}

double half_norm(const std::function<double(double)>& f, double a, double b, int samples) {
    // hat f(t) by Simpson on [a,b], then int_0^inf t |hat f|^2 dt by Simpson;
    // for smooth compactly supported f the transform decays fast.
    const int n = samples % 2 == 0 ? samples : samples + 1;
    const double h = (b - a) / n;
    auto fhat2 = [&](double t) {
        double re = 0.0, im = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = a + i * h;
            const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            re += wgt * f(x) * std::cos(t * x);
            im += wgt * f(x) * std::sin(t * x);
        }
        re *= h / 3.0;
        im *= h / 3.0;
        return re * re + im * im;
    };
    const double T = 600.0 / (b - a);
    const int nt = 20000;
    const double dt = T / nt;
    double s = 0.0;
    for (int i = 1; i <= nt; ++i) {
        const double t = i * dt;
        const double val = t * fhat2(t);
        s += (i == nt) ? val : (i % 2 == 1 ? 4.0 : 2.0) * val;
    }
    return std::sqrt(std::max(0.0, s * dt / 3.0));
}

MinimizeResult sigma_kr(int k, double r, const Grid& g) {
    if (k < 1 || r <= 0.0) throw std::invalid_argument("sigma_kr: k >= 1, r > 0");
    return minimize([r, k](double x) { return r * std::pow(x, 2 * k); }, g,
                    KernelKind::NegLog);
}

double ball_radius() { return std::cbrt(3.0 * M_PI); }

double ball_moment(int a, int b) {
    if (a < 0 || b < 0) throw std::invalid_argument("ball_moment: a, b >= 0");
    if (a % 2 == 1 || b % 2 == 1) return 0.0;
    const double r = ball_radius();
    // int_{B_1} x^a y^b dV = 2 * (1/2) B((a+b+2)/2, 3/2) * 2 B((a+1)/2, (b+1)/2)
    auto lbeta = [](double x, double y) {
        return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
    };
    const double radial = std::exp(lbeta(0.5 * (a + b + 2), 1.5));
    const double angular = 2.0 * std::exp(lbeta(0.5 * (a + 1), 0.5 * (b + 1)));
    const double integral = radial * angular * std::pow(r, a + b + 3);
    const double volume = 4.0 / 3.0 * M_PI * r * r * r;
    return integral / volume;
}

}  // namespace mmlab
