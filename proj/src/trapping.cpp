#include "mmlab/trapping.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mmlab {

Partition trivial_partition(int ell) {
    Partition I;
    for (int i = 1; i <= ell; ++i) I.push_back({i});
    return I;
}

void check_partition(const Partition& I, int ell) {
    std::vector<bool> seen(ell + 1, false);
    for (const auto& block : I) {
        if (block.empty()) throw std::invalid_argument("empty partition block");
        for (int i : block) {
            if (i < 1 || i > ell || seen[i])
                throw std::invalid_argument("partition does not cover 1..ell exactly once");
            seen[i] = true;
        }
    }
    for (int i = 1; i <= ell; ++i)
        if (!seen[i]) throw std::invalid_argument("partition misses a letter");
}

TrappingSpec::TrappingSpec(NCPolynomial v, double eta_, double a, Partition I)
    : V(std::move(v)), eta(eta_), A(a), blocks(std::move(I)) {
    check_partition(blocks, V.alphabet_size());
    if (!is_self_adjoint(V, 1e-12)) throw std::invalid_argument("V must be self-adjoint");
}

namespace {

ComplexMatrix matrix_power(const ComplexMatrix& m, int k) {
    ComplexMatrix acc = ComplexMatrix::identity(m.dim());
    for (int t = 0; t < k; ++t) acc = matmul(acc, m);
    return acc;
}

ComplexMatrix block_z(const MatrixTuple& x, const std::vector<int>& block) {
    ComplexMatrix z(x.dim());
    for (int i : block) {
        const ComplexMatrix& xi = x.x[i - 1].matrix();
        z = z + matmul(xi, xi);
    }
    return z;
}

}  // namespace

double trapping_residual(const TrappingSpec& spec, int k, const MatrixTuple& x) {
    if (k < 0) throw std::invalid_argument("k must be >= 0");
    if (spec.V.alphabet_size() != x.ell())
        throw std::invalid_argument("partition/alphabet mismatch");
    const int n = x.dim();
    double lhs = 0.0, sum_zk = 0.0, sum_zk1 = 0.0;
    for (const auto& block : spec.blocks) {
        ComplexMatrix z = block_z(x, block);
        ComplexMatrix zk = matrix_power(z, k);
        sum_zk += zk.trace().real();
        sum_zk1 += matmul(zk, z).trace().real();
        ComplexMatrix dot(n);
        for (int i : block) {
            ComplexMatrix g = evaluate(cyclic_derivative(spec.V, i), x);
            const ComplexMatrix& xi = x.x[i - 1].matrix();
            dot = dot + (matmul(xi, g) + matmul(g, xi)) * cplx(0.5);
        }
        lhs += matmul(zk, dot).trace().real();
    }
    const double rhs = spec.eta * sum_zk1 - spec.A * (n + sum_zk);
    return lhs - rhs;
}

TrappingReport verify_trapping(const TrappingSpec& spec, int trials, int max_k,
                               const std::vector<int>& dims, std::uint64_t seed,
                               double tol, MatrixTuple* worst_witness) {
    TrappingReport rep;
    rep.dims = dims;
    rep.max_k = max_k;
    rep.worst_residual = std::numeric_limits<double>::infinity();
    const int ell = spec.V.alphabet_size();
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t sub_seed = seed + 0x9e3779b97f4a7c15ULL * (t + 1);
        std::mt19937_64 rng(sub_seed);
        const int n = dims[t % dims.size()];
        MatrixTuple x = MatrixTuple::gaussian(ell, n, rng);
        for (int k = 0; k <= max_k; ++k) {
            const double r = trapping_residual(spec, k, x);
            ++rep.trials;
            if (r < -tol) ++rep.violations;
            if (r < rep.worst_residual) {
                rep.worst_residual = r;
                rep.worst_k = k;
                rep.worst_dim = n;
                rep.worst_seed = sub_seed;
                if (worst_witness) *worst_witness = x;
            }
        }
    }
    return rep;
}

OneVarTrap one_var_trapping_params(const std::vector<double>& coeffs) {
    // P(x) = sum_k coeffs[k] x^k with even top degree and positive lead.
    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg > 0 && coeffs[deg] == 0.0) --deg;
    if (deg < 2 || deg % 2 != 0 || coeffs[deg] <= 0.0)
        throw std::invalid_argument("needs positive even leading term of degree >= 2");
    OneVarTrap out;
    out.eta = (deg == 2) ? coeffs[deg] : coeffs[deg] * (deg / 2);

    // g(x) = x P'(x) - eta x^2; A = max(0, -min g) over a Cauchy-type bound.
    auto g = [&](double x) {
        double xp = 0.0;
        for (int j = deg; j >= 1; --j) xp = xp * x + j * coeffs[j];
        return x * xp - out.eta * x * x;
    };
    double bound = 1.0;
    for (int j = 0; j < deg; ++j)
        if (coeffs.size() > static_cast<std::size_t>(j) && coeffs[j] != 0.0)
            bound = std::max(bound,
                             2.0 * std::pow(std::abs(coeffs[j]) / coeffs[deg] * (deg + 1),
                                            1.0 / (deg - j)));
    bound = std::max(bound, 2.0 * (out.eta + 1.0) / coeffs[deg]);
    double gmin = 0.0;
    const int m = 40001;
    double best_x = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x = -bound + 2.0 * bound * i / (m - 1);
        const double v = g(x);
        if (v < gmin) {
            gmin = v;
            best_x = x;
        }
    }
    double lo = best_x - 2.0 * bound / (m - 1), hi = best_x + 2.0 * bound / (m - 1);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        if (g(c) < g(d))
            hi = d;
        else
            lo = c;
    }
    gmin = std::min(gmin, g(0.5 * (lo + hi)));
    out.A = std::max(0.0, -gmin);
    return out;
}

ConfiningResult classify_confining(const NCPolynomial& v, const Partition& I) {
    const int ell = v.alphabet_size();
    check_partition(I, ell);
    ConfiningResult res;
    res.one_body.assign(ell, NCPolynomial(1));

    NCPolynomial vc = cyclic_symmetrize(v);
    vc.prune(1e-14);

    std::vector<std::vector<double>> pcoeffs(ell);
    for (auto& [w, c] : vc.terms()) {
        if (w.empty()) continue;
        const bool single =
            std::all_of(w.letters.begin(), w.letters.end(),
                        [&](int l) { return l == w.letters.front(); });
        if (single) {
            if (std::abs(c.imag()) > 1e-12) {
                res.failed_constraint = "one-body term with non-real coefficient: " + w.str();
                return res;
            }
            auto& pc = pcoeffs[w.letters.front() - 1];
            if (pc.size() < w.degree() + 1) pc.resize(w.degree() + 1, 0.0);
            pc[w.degree()] += c.real();
        } else {
            res.interactions.emplace_back(w, c);
        }
    }

    std::vector<int> big_d(ell, 0);
    for (int i = 0; i < ell; ++i) {
        auto& pc = pcoeffs[i];
        int deg = static_cast<int>(pc.size()) - 1;
        while (deg > 0 && std::abs(pc[deg]) < 1e-14) --deg;
        if (pc.empty() || deg < 1) {
            res.failed_constraint =
                "letter X" + std::to_string(i + 1) + " has no one-body potential";
            return res;
        }
        if (deg % 2 != 0 || pc[deg] <= 0.0) {
            res.failed_constraint = "one-body potential of X" + std::to_string(i + 1) +
                                    " lacks a positive even leading term";
            return res;
        }
        big_d[i] = deg / 2;
        res.one_body[i] = NCPolynomial(1);
        for (std::size_t k = 0; k < pc.size(); ++k)
            if (pc[k] != 0.0)
                res.one_body[i].add_term(Word(std::vector<int>(k, 1)), pc[k]);
    }

    // every interaction monomial must have degree <= 2 min_{i in I_m} D_i - 1
    // for each block m it touches
    for (auto& [w, c] : res.interactions) {
        std::set<std::size_t> blocks_touched;
        for (int l : w.letters)
            for (std::size_t m = 0; m < I.size(); ++m)
                if (std::find(I[m].begin(), I[m].end(), l) != I[m].end())
                    blocks_touched.insert(m);
        for (std::size_t m : blocks_touched) {
            int dmin = std::numeric_limits<int>::max();
            for (int i : I[m]) dmin = std::min(dmin, big_d[i - 1]);
            if (static_cast<int>(w.degree()) > 2 * dmin - 1) {
                std::ostringstream os;
                os << "interaction " << w.str() << " has degree " << w.degree()
                   << " > 2 min D - 1 = " << 2 * dmin - 1 << " on a touched block";
                res.failed_constraint = os.str();
                return res;
            }
        }
    }

    res.confining = true;
    // Numeric (eta, A) certificate for the one-body part: x P_i'(x) >= eta x^2 - A.
    double eta = std::numeric_limits<double>::infinity(), a = 0.0;
    for (int i = 0; i < ell; ++i) {
        OneVarTrap t = one_var_trapping_params(pcoeffs[i]);
        eta = std::min(eta, t.eta);
        a = std::max(a, t.A);
    }
    res.eta = eta;
    res.A = a;
    return res;
}

TraceIneqResult trace_ineq_commutator(const HermitianMatrix& x, const HermitianMatrix& y,
                                      int u, int v) {
    if (u < 0 || v < 0) throw std::invalid_argument("u, v must be >= 0");
    TraceIneqResult out;
    if ((u + v) % 2 == 0) {
        out.precondition_ok = true;
    } else {
        auto ev = eigenvalues(x);
        out.precondition_ok = ev.front() >= -1e-12 * std::max(1.0, std::abs(ev.back()));
    }
    ComplexMatrix xu = matrix_power(x.matrix(), u);
    ComplexMatrix xv = matrix_power(x.matrix(), v);
    const ComplexMatrix& ym = y.matrix();
    const double lhs = matmul(matmul(xu, xv), matmul(ym, ym)).trace().real();
    const double rhs = matmul(matmul(xu, ym), matmul(xv, ym)).trace().real();
    out.gap = lhs - rhs;
    return out;
}

double trace_ineq_holder(const MatrixTuple& x, int k, int d) {
    if (k < 0 || d < 0) throw std::invalid_argument("k, D must be >= 0");
    if (d == 0) return 0.0;  // both sides collapse to Tr Z^k
    const int ell = x.ell();
    ComplexMatrix z(x.dim());
    for (int i = 0; i < ell; ++i)
        z = z + matmul(x.x[i].matrix(), x.x[i].matrix());
    ComplexMatrix zk = matrix_power(z, k);
    ComplexMatrix sum2d(x.dim());
    for (int i = 0; i < ell; ++i)
        sum2d = sum2d + matrix_power(x.x[i].matrix(), 2 * d);
    const double rhs = std::pow(static_cast<double>(ell), d) *
                       matmul(zk, sum2d).trace().real();
    const double lhs = matmul(zk, matrix_power(z, d)).trace().real();
    return rhs - lhs;
}

namespace {

// dX_i/dt = -(Z_j^k X_i + X_i Z_j^k) on the block containing i
std::vector<ComplexMatrix> flow_derivative(const std::vector<ComplexMatrix>& xs,
                                           const Partition& I, int k, int n) {
    std::vector<ComplexMatrix> dx(xs.size(), ComplexMatrix(n));
    for (const auto& block : I) {
        ComplexMatrix z(n);
        for (int i : block) z = z + matmul(xs[i - 1], xs[i - 1]);
        ComplexMatrix zk = matrix_power(z, k);
        for (int i : block)
            dx[i - 1] = (matmul(zk, xs[i - 1]) + matmul(xs[i - 1], zk)) * cplx(-1.0);
    }
    return dx;
}

}  // namespace

double default_flow_step(const MatrixTuple& x0, const Partition& I, int k) {
    double zmax = 0.0;
    for (const auto& block : I) {
        ComplexMatrix z = block_z(x0, block);
        zmax = std::max(zmax, operator_norm(HermitianMatrix::hermitize(z)));
    }
    return 1e-3 / (1.0 + std::pow(zmax, k));
}

FlowTrajectory trapping_flow(const MatrixTuple& x0, const Partition& I, int k,
                             double dt, int steps, double tol) {
    check_partition(I, x0.ell());
    if (k < 0 || dt <= 0.0 || steps < 1) throw std::invalid_argument("bad flow parameters");
    const int n = x0.dim();

    FlowTrajectory traj;
    std::vector<ComplexMatrix> xs;
    for (const auto& m : x0.x) xs.push_back(m.matrix());

    auto record = [&](double t) {
        traj.times.push_back(t);
        std::vector<HermitianMatrix> hs;
        for (const auto& m : xs) hs.push_back(HermitianMatrix::hermitize(m));
        traj.states.emplace_back(hs);
        std::vector<std::vector<double>> per_block;
        for (const auto& block : I) {
            ComplexMatrix z(n);
            for (int i : block) z = z + matmul(xs[i - 1], xs[i - 1]);
            std::vector<double> tr;
            ComplexMatrix zp = ComplexMatrix::identity(n);
            for (int p = 1; p <= k + 1; ++p) {
                zp = matmul(zp, z);
                tr.push_back(zp.trace().real() / n);
            }
            per_block.push_back(std::move(tr));
        }
        traj.traces.push_back(std::move(per_block));
    };
    record(0.0);

    const std::size_t nb = I.size();
    std::vector<double> b0(nb);
    for (std::size_t j = 0; j < nb; ++j) b0[j] = traj.traces[0][j][k];
    const double window = std::pow(static_cast<double>(n), -static_cast<double>(k) / (k + 1));

    for (int s = 1; s <= steps; ++s) {
        auto k1 = flow_derivative(xs, I, k, n);
        std::vector<ComplexMatrix> tmp(xs.size(), ComplexMatrix(n));
        for (std::size_t i = 0; i < xs.size(); ++i) tmp[i] = xs[i] + k1[i] * cplx(dt / 2);
        auto k2 = flow_derivative(tmp, I, k, n);
        for (std::size_t i = 0; i < xs.size(); ++i) tmp[i] = xs[i] + k2[i] * cplx(dt / 2);
        auto k3 = flow_derivative(tmp, I, k, n);
        for (std::size_t i = 0; i < xs.size(); ++i) tmp[i] = xs[i] + k3[i] * cplx(dt);
        auto k4 = flow_derivative(tmp, I, k, n);
        for (std::size_t i = 0; i < xs.size(); ++i)
            xs[i] = xs[i] + (k1[i] + k2[i] * cplx(2.0) + k3[i] * cplx(2.0) + k4[i]) *
                                cplx(dt / 6.0);
        record(s * dt);

        const auto& prev = traj.traces[s - 1];
        const auto& cur = traj.traces[s];
        for (std::size_t j = 0; j < nb; ++j)
            for (int p = 0; p <= k; ++p) {
                const double scale = std::max(1.0, std::abs(prev[j][p]));
                if (cur[j][p] > prev[j][p] + tol * scale) {
                    std::ostringstream os;
                    os << "flow instability: Tr(Z_" << j << ")^" << (p + 1)
                       << " increased at t=" << s * dt << " (" << prev[j][p] << " -> "
                       << cur[j][p] << ")";
                    throw std::runtime_error(os.str());
                }
                if (p == k && s * dt <= window) {
                    const double bound =
                        b0[j] - 4.0 * (k + 1) * (s * dt) *
                                    std::pow(static_cast<double>(n),
                                             static_cast<double>(k) / (k + 1)) *
                                    std::pow(b0[j], (2.0 * k + 1) / (k + 1));
                    if (cur[j][p] < bound - tol * std::max(1.0, std::abs(bound)))
                        throw std::runtime_error("flow decayed below the certified floor");
                }
            }
    }
    return traj;
}

double spectral_jacobian(const HermitianMatrix& h, const std::function<double(double)>& f,
                         const std::function<double(double)>& fprime, double gap_tol) {
    auto ev = eigenvalues(h);
    const int n = h.dim();
    for (int i = 0; i + 1 < n; ++i)
        if (ev[i + 1] - ev[i] < gap_tol)
            throw std::invalid_argument("degenerate spectrum");
    double logj = 0.0;
    for (int i = 0; i < n; ++i) {
        const double fp = fprime(ev[i]);
        if (fp <= 0.0) throw std::invalid_argument("f' must be positive on the spectrum");
        logj += std::log(fp);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            logj += 2.0 * (std::log(std::abs(f(ev[j]) - f(ev[i]))) -
                           std::log(ev[j] - ev[i]));
    return std::exp(logj);
}

std::vector<InsertedPoint> insert_points(double a, double b, std::vector<double> existing,
                                         double eta, int count) {
    if (!(b > a)) throw std::invalid_argument("interval must have positive length");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must be in (0,1)");
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    const double len = b - a;
    std::vector<InsertedPoint> out;

    for (int c = 0; c < count; ++c) {
        const std::size_t n = existing.size();
        InsertedPoint pt;
        if (n == 0) {
            pt.y = 0.5 * (a + b);
            pt.objective = 0.0;
            pt.bound = 0.0;
            pt.epsilon = 0.0;
        } else {
            const double eps = eta * len / (2.0 * static_cast<double>(n));
            auto g = [&](double y) {
                double s = 0.0;
                for (double x : existing) {
                    const double d = std::abs(x - y) - eps;
                    if (d <= 0.0) return -std::numeric_limits<double>::infinity();
                    s += std::log(d);
                }
                return s;
            };
            const int m = std::max<int>(2000, 100 * static_cast<int>(n));
            double best = -std::numeric_limits<double>::infinity();
            int best_i = 0;
            for (int i = 0; i <= m; ++i) {
                const double y = a + len * i / m;
                const double v = g(y);
                if (v > best) {
                    best = v;
                    best_i = i;
                }
            }
            double lo = a + len * std::max(0, best_i - 1) / m;
            double hi = a + len * std::min(m, best_i + 1) / m;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            for (int it = 0; it < 100; ++it) {
                const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
                if (g(x1) >= g(x2))
                    hi = x2;
                else
                    lo = x1;
            }
            const double y = 0.5 * (lo + hi);
            if (g(y) >= best) {
                pt.y = y;
                pt.objective = g(y);
            } else {
                pt.y = a + len * best_i / m;
                pt.objective = best;
            }
            pt.bound = static_cast<double>(n) * std::log(len * (1.0 - eta) / (2.0 * M_E));
            pt.epsilon = eps;
            if (pt.objective < pt.bound - 1e-9 * std::max(1.0, std::abs(pt.bound)))
                throw std::runtime_error(
                    "insert_points: certified bound unreachable after refinement budget");
        }
        existing.push_back(pt.y);
        out.push_back(pt);
    }
    return out;
}

}  // namespace mmlab
