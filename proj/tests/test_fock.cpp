#include "kerrosc/fock.hpp"
#include "kerrosc/errors.hpp"
#include "oracles.hpp"
#include <doctest.h>

using namespace kerrosc;

TEST_CASE("diagonal Hamiltonian at zero drive")
{
    ModelParams p;
    p.delta = 1;
    p.alpha = 2;
    FockMatrix h = build_hamiltonian(p, 2);
    CHECK(h(0, 0).real() == doctest::Approx(0.0));
    CHECK(h(1, 1).real() == doctest::Approx(0.0));
    CHECK(h(2, 2).real() == doctest::Approx(2.0));
    CHECK(h(0, 1) == cplx(0, 0));
}

TEST_CASE("drive matrix element carries the ladder sqrt")
{
    ModelParams p;
    p.delta = 1;
    p.alpha = 2;
    p.drive = 0.5;
    FockMatrix h = build_hamiltonian(p, 1);
    CHECK(h(0, 1).real() == doctest::Approx(0.5));
    CHECK(h(1, 0).real() == doctest::Approx(0.5));
}

TEST_CASE("higher-order term is a diagonal power of n")
{
    ModelParams p;
    p.delta = 1;
    p.alpha = 2;
    p.alpha_q[3] = 0.1;
    FockMatrix h = build_hamiltonian(p, 2);
    CHECK(h(2, 2).real() == doctest::Approx(2.0 + 0.1 * 8));
}

TEST_CASE("annihilation operator structure")
{
    FockMatrix a = annihilation_op(4);
    for (int n = 1; n <= 4; n++)
        CHECK(a(n - 1, n).real() == doctest::Approx(std::sqrt((double)n)));
    double off = 0;
    for (int i = 0; i <= 4; i++)
        for (int j = 0; j <= 4; j++)
            if (j != i + 1)
                off += std::abs(a(i, j));
    CHECK(off == 0.0);
}

TEST_CASE("Hamiltonian is Hermitian across parameter points")
{
    for (double f : {0.0, 0.3, 2.7}) {
        for (double a3 : {0.0, 1e-4}) {
            ModelParams p;
            p.delta = 5;
            p.alpha = 1;
            p.drive = f;
            if (a3 != 0)
                p.alpha_q[3] = a3;
            FockMatrix h = build_hamiltonian(p, 24);
            double rel = (h - h.adjoint()).norm() / h.norm();
            CHECK(rel < 1e-12);
        }
    }
}

TEST_CASE("truncation guard rejects unsafe n_max with a suggestion")
{
    ModelParams p;
    p.delta = 10;
    p.alpha = 1;
    try {
        build_hamiltonian(p, 12);  // delta/alpha = 10 > 12/2
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.suggested_n_max == 40);
    }
}

TEST_CASE("generator preserves the trace on random Hermitian matrices")
{
    ModelParams p;
    p.delta = 4;
    p.alpha = 1;
    p.drive = 1.2;
    p.gamma = 0.37;
    p.n_thermal = 1.4;
    const int n_max = 10;
    SparseSuperOp gen = build_lindblad_superoperator(p, n_max);
    double scale = Eigen::MatrixXcd(gen).cwiseAbs().maxCoeff();
    for (unsigned seed = 0; seed < 100; seed++) {
        Eigen::MatrixXcd rho = oracles::random_hermitian_unit_trace(n_max + 1, seed);
        Eigen::MatrixXcd lr = apply_generator(gen, rho);
        CHECK(std::abs(lr.trace()) < 1e-12 * scale * rho.norm());
    }
}

TEST_CASE("unitary limit at gamma = 0 reproduces the commutator")
{
    ModelParams p;
    p.delta = 3;
    p.alpha = 1;
    p.drive = 0.8;
    const int n_max = 8;
    SparseSuperOp gen = build_lindblad_superoperator(p, n_max);
    Eigen::MatrixXcd h = build_hamiltonian(p, n_max);
    Eigen::MatrixXcd rho = oracles::random_hermitian_unit_trace(n_max + 1, 7);
    Eigen::MatrixXcd lr = apply_generator(gen, rho);
    Eigen::MatrixXcd expect = cplx(0, 1) * (rho * h - h * rho);
    CHECK((lr - expect).norm() < 1e-12 * expect.norm());
    CHECK((lr - lr.adjoint()).norm() < 1e-12 * lr.norm());
}

TEST_CASE("thermal state is a fixed point of the undriven generator")
{
    ModelParams p;
    p.delta = 2;
    p.alpha = 1;
    p.gamma = 1;
    p.n_thermal = 3;
    const int n_max = 60;
    SparseSuperOp gen = build_lindblad_superoperator(p, n_max);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    double z = 0;
    for (int n = 0; n <= n_max; n++)
        z += std::pow(0.75, n);
    for (int n = 0; n <= n_max; n++)
        rho(n, n) = std::pow(0.75, n) / z;
    Eigen::MatrixXcd lr = apply_generator(gen, rho);
    CHECK(lr.norm() < 1e-10);
}

TEST_CASE("eigenvalues in the occupied window converge under truncation doubling")
{
    ModelParams p;
    p.delta = 5;
    p.alpha = 1;
    p.drive = 0.3 * p.f_crit();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(
        Eigen::MatrixXd(build_hamiltonian(p, p.default_n_max()).real()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(
        Eigen::MatrixXd(build_hamiltonian(p, 2 * p.default_n_max()).real()));
    double scale = std::fabs(es1.eigenvalues()(0));
    for (int i = 0; i < p.default_n_max() / 2; i++) {
        double d = std::fabs(es1.eigenvalues()(i) - es2.eigenvalues()(i));
        CHECK(d < 1e-8 * scale);
    }
}

TEST_CASE("noise intensity and critical drive formulas")
{
    ModelParams p;
    p.delta = 3;
    p.alpha = 1;
    p.gamma = 0.2;
    p.n_thermal = 2.5;
    CHECK(p.noise_q() == doctest::Approx(0.2 * 3.0));
    CHECK(p.f_crit() == doctest::Approx(2.0));
    p.alpha_q[2] = 1.0;  // invalid order
    CHECK_THROWS(p.validate());
}
