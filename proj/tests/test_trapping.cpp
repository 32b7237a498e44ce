#include <cmath>
#include <random>

#include "doctest.h"
#include "mmlab/trapping.hpp"

using namespace mmlab;

namespace {

NCPolynomial sum_of_squares(int ell) {
    NCPolynomial v(ell);
    for (int i = 1; i <= ell; ++i) v.add_term(Word({i, i}), 1.0);
    return v;
}

// small real determinant by Gaussian elimination, for finite-difference Jacobians
double det_real(std::vector<std::vector<double>> m) {
    const int n = static_cast<int>(m.size());
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < n; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int j = c; j < n; ++j) m[r][j] -= f * m[c][j];
        }
    }
    return det;
}

// Isometric real coordinates of a Hermitian matrix (diag, then sqrt2*Re/Im upper).
std::vector<double> theta_coords(const HermitianMatrix& h) {
    const int n = h.dim();
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(h.entry(i, i).real());
    const double s2 = std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            v.push_back(s2 * h.entry(i, j).real());
            v.push_back(s2 * h.entry(i, j).imag());
        }
    return v;
}

HermitianMatrix from_theta(const std::vector<double>& v, int n) {
    HermitianMatrix h(n);
    int p = 0;
    for (int i = 0; i < n; ++i) h.set_entry(i, i, v[p++]);
    const double is2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double re = v[p++] * is2;
            const double im = v[p++] * is2;
            h.set_entry(i, j, cplx(re, im));
        }
    return h;
}

}  // namespace

TEST_CASE("trapping residual is identically zero for V = sum X_i^2, eta=2, A=0") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
        const int ell = 1 + t % 3;
        Partition I = (t % 2 == 0) ? trivial_partition(ell)
                                   : Partition{[&] {
                                         std::vector<int> all;
                                         for (int i = 1; i <= ell; ++i) all.push_back(i);
                                         return all;
                                     }()};
        TrappingSpec spec(sum_of_squares(ell), 2.0, 0.0, I);
        MatrixTuple x = MatrixTuple::gaussian(ell, 2 + t % 5, rng);
        for (int k = 0; k <= 3; ++k)
            CHECK(std::abs(trapping_residual(spec, k, x)) <= 1e-8);
    }
}

TEST_CASE("-[X1,X2]^2 satisfies the (0,0)-trapping condition") {
    TrappingSpec spec(minus_commutator_squared(2, 1, 2), 0.0, 0.0, trivial_partition(2));
    TrappingReport rep = verify_trapping(spec, 250, 3, {2, 3, 4, 5, 6, 7, 8}, 424242);
    CHECK(rep.trials == 1000);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_residual >= -1e-10);
}

TEST_CASE("verify_trapping trials are reproducible from their sub-seed") {
    TrappingSpec spec(minus_commutator_squared(2, 1, 2), 0.0, 0.0, trivial_partition(2));
    MatrixTuple w1, w2;
    TrappingReport a = verify_trapping(spec, 50, 2, {3, 4}, 7, 1e-10, &w1);
    TrappingReport b = verify_trapping(spec, 50, 2, {3, 4}, 7, 1e-10, &w2);
    CHECK(a.worst_residual == b.worst_residual);
    CHECK(a.worst_seed == b.worst_seed);
    std::mt19937_64 rng(a.worst_seed);
    MatrixTuple x = MatrixTuple::gaussian(2, a.worst_dim, rng);
    CHECK(trapping_residual(spec, a.worst_k, x) == doctest::Approx(a.worst_residual));
}

TEST_CASE("trace-convex quartic: not confining, yet no trapping violation") {
    // X^2+Y^2+X^2Y^2 fails the confining degree constraint, but its trapping
    // residual is nonnegative: on single-letter blocks the interaction only
    // adds Tr(X^{2k} . sym-dot terms) = 2 Tr(X^{2k+2} Y^2) >= 0, so the
    // inequality holds identically with eta = 2, A = 0. A randomized search
    // (including rescalings, which amplify any negative quartic direction)
    // must therefore come up empty for both partitions.
    NCPolynomial v = sum_of_squares(2);
    v.add_term(Word({1, 1, 2, 2}), 1.0);
    v = cyclic_symmetrize(v);
    REQUIRE(is_self_adjoint(v, 1e-12));
    CHECK_FALSE(classify_confining(v, trivial_partition(2)).confining);

    for (const Partition& I : {trivial_partition(2), Partition{{1, 2}}}) {
        TrappingSpec spec(v, 2.0, 0.0, I);
        double worst = 1e300;
        std::mt19937_64 rng(99);
        for (int t = 0; t < 200; ++t) {
            MatrixTuple x = MatrixTuple::gaussian(2, 2 + t % 3, rng);
            for (double s : {1.0, 4.0, 16.0}) {
                MatrixTuple xs = x;
                for (auto& m : xs.x) m = m * s;
                for (int k = 0; k <= 4; ++k)
                    worst = std::min(worst, trapping_residual(spec, k, xs));
            }
        }
        CHECK(worst >= -1e-6);
    }
}

TEST_CASE("trapping additivity: beta U + W with combined parameters") {
    std::mt19937_64 rng(13);
    NCPolynomial u = minus_commutator_squared(2, 1, 2);
    NCPolynomial w = sum_of_squares(2) +
                     NCPolynomial::monomial(2, Word({1, 2})) +
                     NCPolynomial::monomial(2, Word({2, 1}));
    const double eta_u = 0.3, a_u = 1.0, eta_w = 0.7, a_w = 0.2, beta = 2.5;
    Partition I = trivial_partition(2);
    TrappingSpec su(u, eta_u, a_u, I), sw(w, eta_w, a_w, I);
    TrappingSpec combined(u * cplx(beta) + w, beta * eta_u + eta_w, beta * a_u + a_w, I);
    for (int t = 0; t < 10; ++t) {
        MatrixTuple x = MatrixTuple::gaussian(2, 3 + t % 3, rng);
        for (int k = 0; k <= 3; ++k) {
            const double lhs = trapping_residual(combined, k, x);
            const double rhs =
                beta * trapping_residual(su, k, x) + trapping_residual(sw, k, x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("adding -alpha [X_i,X_j]^2 never decreases the residual") {
    std::mt19937_64 rng(17);
    NCPolynomial v = sum_of_squares(2);
    Partition I = trivial_partition(2);
    TrappingSpec base(v, 0.5, 0.1, I);
    for (double alpha : {0.5, 2.0}) {
        TrappingSpec aug(v + minus_commutator_squared(2, 1, 2) * cplx(alpha), 0.5, 0.1, I);
        for (int t = 0; t < 10; ++t) {
            MatrixTuple x = MatrixTuple::gaussian(2, 4, rng);
            for (int k = 0; k <= 3; ++k)
                CHECK(trapping_residual(aug, k, x) >=
                      trapping_residual(base, k, x) - 1e-10);
        }
    }
}

TEST_CASE("classify_confining on the three reference potentials") {
    // X1^4 + X2^4 + X1 X2^2 + X3^2 is confining
    NCPolynomial p(3);
    p.add_term(Word({1, 1, 1, 1}), 1.0);
    p.add_term(Word({2, 2, 2, 2}), 1.0);
    p.add_term(Word({1, 2, 2}), 1.0);
    p.add_term(Word({3, 3}), 1.0);
    ConfiningResult r = classify_confining(p, trivial_partition(3));
    CHECK(r.confining);
    CHECK(r.interactions.size() > 0);
    CHECK(r.eta > 0.0);

    // X^2 + Y^2 + X^2 Y^2 is not confining: interaction degree 4 > 2*1-1
    NCPolynomial q = sum_of_squares(2);
    q.add_term(Word({1, 1, 2, 2}), 1.0);
    ConfiningResult r2 = classify_confining(q, trivial_partition(2));
    CHECK_FALSE(r2.confining);
    CHECK(r2.failed_constraint.find("degree") != std::string::npos);

    ConfiningResult r3 = classify_confining(sum_of_squares(4), trivial_partition(4));
    CHECK(r3.confining);
    CHECK(r3.interactions.empty());
    CHECK(r3.eta == doctest::Approx(1.0));
    CHECK(r3.A == doctest::Approx(0.0));
}

TEST_CASE("classify_confining rejects a letter with no one-body term") {
    NCPolynomial p(2);
    p.add_term(Word({1, 1}), 1.0);
    ConfiningResult r = classify_confining(p, trivial_partition(2));
    CHECK_FALSE(r.confining);
    CHECK(r.failed_constraint.find("X2") != std::string::npos);
}

TEST_CASE("trace_ineq_commutator: zero case and eigenbasis oracle") {
    std::mt19937_64 rng(23);
    HermitianMatrix x = HermitianMatrix::gaussian(5, rng);
    CHECK(trace_ineq_commutator(x, HermitianMatrix::zero(5), 2, 2).gap ==
          doctest::Approx(0.0));

    for (int t = 0; t < 20; ++t) {
        HermitianMatrix a = HermitianMatrix::gaussian(4, rng);
        HermitianMatrix b = HermitianMatrix::gaussian(4, rng);
        TraceIneqResult r = trace_ineq_commutator(a, b, 1, 1);
        CHECK(r.precondition_ok);
        CHECK(r.gap >= -1e-10);

        // oracle from the proof: (1/2) sum |Y_ab|^2 (x_a^u - x_b^u)(x_a^v - x_b^v)
        EigenDecomposition ed = eigen_decompose(a, true);
        ComplexMatrix yt = matmul(matmul(ed.vectors.adjoint(), b.matrix()), ed.vectors);
        double oracle = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                oracle += 0.5 * std::norm(yt.at(i, j)) *
                          (ed.values[i] - ed.values[j]) * (ed.values[i] - ed.values[j]);
        CHECK(r.gap == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("trace_ineq_commutator: odd powers with indefinite X can fail") {
    std::mt19937_64 rng(29);
    bool violation = false;
    for (int t = 0; t < 200 && !violation; ++t) {
        HermitianMatrix a = HermitianMatrix::gaussian(3, rng);
        HermitianMatrix b = HermitianMatrix::gaussian(3, rng);
        TraceIneqResult r = trace_ineq_commutator(a, b, 1, 2);
        if (r.gap < -1e-10) {
            violation = true;
            CHECK_FALSE(r.precondition_ok);
        }
    }
    CHECK(violation);

    // with X psd the precondition holds and the inequality is restored
    for (int t = 0; t < 50; ++t) {
        HermitianMatrix g = HermitianMatrix::gaussian(3, rng);
        HermitianMatrix x2 = HermitianMatrix::hermitize(matmul(g.matrix(), g.matrix()));
        HermitianMatrix b = HermitianMatrix::gaussian(3, rng);
        TraceIneqResult r = trace_ineq_commutator(x2, b, 1, 2);
        CHECK(r.precondition_ok);
        CHECK(r.gap >= -1e-8);
    }
}

TEST_CASE("trace_ineq_holder examples and fuzz") {
    std::mt19937_64 rng(31);
    // ell = 1: equality
    for (int k = 0; k <= 2; ++k)
        for (int d = 0; d <= 2; ++d) {
            MatrixTuple x = MatrixTuple::gaussian(1, 4, rng);
            CHECK(std::abs(trace_ineq_holder(x, k, d)) <= 1e-8);
        }
    // D = 0: zero gap
    MatrixTuple x2 = MatrixTuple::gaussian(2, 4, rng);
    CHECK(std::abs(trace_ineq_holder(x2, 2, 0)) <= 1e-10);
    // random instances nonnegative
    for (int t = 0; t < 50; ++t) {
        MatrixTuple x = MatrixTuple::gaussian(2, 4, rng);
        CHECK(trace_ineq_holder(x, 1, 2) >= -1e-10);
    }
}

TEST_CASE("trapping_flow: k=0 closed form e^{-2t} X") {
    std::mt19937_64 rng(37);
    MatrixTuple x0 = MatrixTuple::gaussian(2, 4, rng);
    const double dt = 1e-3;
    FlowTrajectory tr = trapping_flow(x0, trivial_partition(2), 0, dt, 100);
    const double t_end = tr.times.back();
    for (std::size_t j = 0; j < 2; ++j) {
        const double expect = tr.traces.front()[j][0] * std::exp(-4.0 * t_end);
        CHECK(tr.traces.back()[j][0] == doctest::Approx(expect).epsilon(1e-6));
    }
    for (int i = 0; i < 2; ++i) {
        HermitianMatrix diff = tr.states.back().x[i] - x0.x[i] * std::exp(-2.0 * t_end);
        CHECK(diff.frobenius_norm() <= 1e-6 * x0.x[i].frobenius_norm());
    }
}

TEST_CASE("trapping_flow: monotone traces for k=1 and constant zero tuple") {
    std::mt19937_64 rng(41);
    MatrixTuple x0 = MatrixTuple::gaussian(2, 4, rng);
    Partition I = trivial_partition(2);
    const double dt = default_flow_step(x0, I, 1);
    FlowTrajectory tr = trapping_flow(x0, I, 1, dt, 50);
    for (std::size_t s = 1; s < tr.traces.size(); ++s)
        for (std::size_t j = 0; j < 2; ++j)
            for (int p = 0; p < 2; ++p)
                CHECK(tr.traces[s][j][p] <= tr.traces[s - 1][j][p] + 1e-8);

    MatrixTuple z = MatrixTuple::zero(2, 3);
    FlowTrajectory tz = trapping_flow(z, I, 1, 1e-3, 10);
    CHECK(tz.traces.back()[0][1] == doctest::Approx(0.0));
    CHECK(tz.states.back().x[0].frobenius_norm() == doctest::Approx(0.0));
}

TEST_CASE("spectral_jacobian: identity, doubling, composition") {
    std::mt19937_64 rng(43);
    HermitianMatrix h = HermitianMatrix::gaussian(3, rng);
    auto id = [](double x) { return x; };
    auto one = [](double) { return 1.0; };
    CHECK(spectral_jacobian(h, id, one) == doctest::Approx(1.0));

    HermitianMatrix h2 = HermitianMatrix::gaussian(2, rng);
    CHECK(spectral_jacobian(h2, [](double x) { return 2.0 * x; },
                            [](double) { return 2.0; }) == doctest::Approx(16.0));

    // product over composed maps equals Jacobian of the composition
    auto f = [](double x) { return x + 0.1 * x * x * x; };
    auto fp = [](double x) { return 1.0 + 0.3 * x * x; };
    auto g = [](double x) { return 2.0 * x + 0.05 * x * x * x; };
    auto gp = [](double x) { return 2.0 + 0.15 * x * x; };
    HermitianMatrix gh = spectral_map(h, g);
    const double j_comp = spectral_jacobian(
        h, [&](double x) { return f(g(x)); }, [&](double x) { return fp(g(x)) * gp(x); });
    const double j_prod = spectral_jacobian(gh, f, fp) * spectral_jacobian(h, g, gp);
    CHECK(j_comp == doctest::Approx(j_prod).epsilon(1e-8));

    CHECK_THROWS_AS(spectral_jacobian(HermitianMatrix::identity(3), id, one),
                    std::invalid_argument);
}

TEST_CASE("spectral_jacobian matches the finite-difference determinant") {
    std::mt19937_64 rng(47);
    auto f = [](double x) { return x * x * x + 3.0 * x; };
    auto fp = [](double x) { return 3.0 * x * x + 3.0; };
    for (int t = 0; t < 3; ++t) {
        HermitianMatrix h = HermitianMatrix::gaussian(3, rng);
        const double analytic = spectral_jacobian(h, f, fp);

        const int dim = 9;
        std::vector<double> base = theta_coords(h);
        std::vector<std::vector<double>> jac(dim, std::vector<double>(dim, 0.0));
        const double eps = 1e-5;
        for (int c = 0; c < dim; ++c) {
            std::vector<double> up = base, dn = base;
            up[c] += eps;
            dn[c] -= eps;
            auto fu = theta_coords(spectral_map(from_theta(up, 3), f));
            auto fd = theta_coords(spectral_map(from_theta(dn, 3), f));
            for (int r = 0; r < dim; ++r) jac[r][c] = (fu[r] - fd[r]) / (2.0 * eps);
        }
        const double numeric = std::abs(det_real(jac));
        CHECK(std::abs(analytic - numeric) <= 1e-4 * std::abs(numeric));
    }
}

TEST_CASE("insert_points: empty set, single constraint, symmetric tie") {
    auto r0 = insert_points(0.0, 1.0, {}, 0.5, 1);
    CHECK(r0.size() == 1);
    CHECK(r0[0].y > 0.0);
    CHECK(r0[0].y < 1.0);
    CHECK(r0[0].objective == 0.0);

    // existing {0}, eta=1/2, m=1: ln(y - 1/4) >= ln(1/(4e))
    auto r1 = insert_points(0.0, 1.0, {0.0}, 0.5, 1);
    CHECK(std::log(r1[0].y - 0.25) >= std::log(1.0 / (4.0 * M_E)) - 1e-9);
    CHECK(r1[0].epsilon == doctest::Approx(0.25));
    CHECK(r1[0].objective >= r1[0].bound - 1e-9);

    // symmetric constraints: maximizer at the center
    auto r2 = insert_points(-1.0, 1.0, {-1.0, 1.0}, 0.5, 1);
    CHECK(std::abs(r2[0].y) <= 1e-9);

    // sequential insertion certifies every appended point
    auto r3 = insert_points(0.0, 1.0, {0.2, 0.8}, 0.3, 4);
    for (const auto& p : r3) CHECK(p.objective >= p.bound - 1e-9);
}

TEST_CASE("one_var_trapping_params") {
    OneVarTrap t = one_var_trapping_params({0.0, 0.0, 1.0});  // x^2
    CHECK(t.eta == doctest::Approx(1.0));
    CHECK(t.A == doctest::Approx(0.0));

    // (x^2-1)^2 = 1 - 2x^2 + x^4: x P' = 4x^4 - 4x^2 >= eta x^2 - A
    OneVarTrap q = one_var_trapping_params({1.0, 0.0, -2.0, 0.0, 1.0});
    CHECK(q.eta > 0.0);
    const double eta = q.eta, a = q.A;
    for (double x = -3.0; x <= 3.0; x += 0.01) {
        const double g = x * (4.0 * x * x * x - 4.0 * x);
        CHECK(g >= eta * x * x - a - 1e-9);
    }
    CHECK_THROWS_AS(one_var_trapping_params({0.0, 1.0}), std::invalid_argument);
}
