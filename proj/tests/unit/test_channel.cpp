#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "irskg/channel.hpp"
#include "test_support.hpp"

using namespace irskg;
using namespace irskg::testing;

TEST_CASE("BS steering vector") {
    const SteeringVector one = bs_steering(1.3, 1, 0.1);
    REQUIRE(one.entries.size() == 1);
    CHECK(std::abs(one.entries[0] - Complex(1.0, 0.0)) < 1e-15);

    const SteeringVector flat = bs_steering(0.0, 6, 0.1);
    for (int m = 0; m < 6; ++m) {
        CHECK(std::abs(flat.entries[m] - Complex(1.0 / std::sqrt(6.0), 0.0)) < 1e-15);
    }

    const SteeringVector two = bs_steering(kPi / 2, 2, 0.1);
    CHECK(std::abs(two.entries[0] - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(two.entries[1] - std::polar(1.0 / std::sqrt(2.0), -0.2 * kPi)) < 1e-15);
}

TEST_CASE("IRS steering vector") {
    const SteeringVector one = irs_steering(0.4, 1.1, 1, 1, 0.1);
    REQUIRE(one.entries.size() == 1);
    CHECK(std::abs(one.entries[0] - Complex(1.0, 0.0)) < 1e-15);

    const SteeringVector flat = irs_steering(0.0, kPi / 2, 3, 4, 0.1);
    for (int n = 0; n < 12; ++n) {
        CHECK(std::abs(flat.entries[n] - Complex(1.0 / std::sqrt(12.0), 0.0)) < 1e-15);
    }

    const SteeringVector two = irs_steering(kPi / 2, kPi / 2, 2, 1, 0.1);
    CHECK(std::abs(two.entries[0] - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(two.entries[1] - std::polar(1.0 / std::sqrt(2.0), -0.2 * kPi)) < 1e-15);
}

TEST_CASE("IRS enumeration is row-major") {
    // Element n = x * Y + y; the y index advances fastest.
    const double theta = 0.7;
    const double gamma = 1.2;
    const SteeringVector a = irs_steering(theta, gamma, 3, 4, 0.25);
    for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 4; ++y) {
            const double phase = -2.0 * kPi * 0.25 * (x * std::sin(theta) * std::sin(gamma) + y * std::cos(gamma));
            CHECK(std::abs(a.entries[x * 4 + y] - std::polar(0.5 / std::sqrt(3.0), phase)) < 1e-14);
        }
    }
}

TEST_CASE("steering vectors have unit norm and equal-modulus entries") {
    Rng rng(5);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    for (int i = 0; i < 50; ++i) {
        const int M = 1 + i % 8;
        const SteeringVector b = bs_steering(2.0 * ang(rng), M, 0.1 + 0.01 * i);
        CHECK(std::abs(b.entries.squaredNorm() - 1.0) < 1e-12);
        for (int m = 0; m < M; ++m) {
            CHECK(std::abs(std::abs(b.entries[m]) - 1.0 / std::sqrt(double(M))) < 1e-15);
        }
        const SteeringVector a = irs_steering(ang(rng), ang(rng), 1 + i % 5, 1 + i % 7, 0.1);
        CHECK(std::abs(a.entries.squaredNorm() - 1.0) < 1e-12);
    }
}

TEST_CASE("sampled realizations are deterministic and rank one") {
    const Scenario sc = default_scenario();
    Rng a(99);
    Rng b(99);
    for (int i = 0; i < 20; ++i) {
        const ChannelRealization r1 = sample_realization(sc, a);
        const ChannelRealization r2 = sample_realization(sc, b);
        CHECK(r1.Q == r2.Q);
        CHECK(r1.h_ab == r2.h_ab);
        CHECK(r1.h_be == r2.h_be);

        Eigen::JacobiSVD<CMatrix> svd(r1.Q);
        const auto sv = svd.singularValues();
        CHECK(sv[1] < 1e-10 * sv[0]);
        CHECK((r1.R_U - r1.G_U.asDiagonal() * r1.Q).norm() == doctest::Approx(0.0));
        Eigen::JacobiSVD<CMatrix> svd_u(r1.R_U);
        CHECK(svd_u.singularValues()[1] < 1e-10 * svd_u.singularValues()[0]);
    }
}

TEST_CASE("direct-link variance matches the path loss") {
    const Scenario sc = default_scenario();
    Rng rng(2024);
    const int n = 100000;
    double sum_ab = 0.0;
    double sum_ae = 0.0;
    for (int i = 0; i < n; ++i) {
        const ChannelRealization r = sample_realization(sc, rng);
        sum_ab += std::norm(r.h_ab[0]);
        sum_ae += std::norm(r.h_ae[1]);
    }
    CHECK(rel_err(sum_ab / n, sc.var_ab) < 0.02);
    CHECK(rel_err(sum_ae / n, sc.var_ae) < 0.02);
}

TEST_CASE("geometry vectors") {
    const Scenario sc = default_scenario();
    const GeometryVectors g = geometry_vectors(sc);
    REQUIRE(g.beta.size() == sc.L);
    for (int n = 0; n < sc.L; ++n) {
        CHECK(std::abs(std::abs(g.beta[n]) - 1.0) < 1e-15);
        CHECK(std::abs(std::abs(g.psi[n]) - 1.0) < 1e-15);
    }
    CHECK(std::abs(g.R_BS.trace() - Complex(sc.M, 0.0)) < 1e-12);
    for (int m = 0; m < sc.M; ++m) {
        CHECK(std::abs(g.R_BS(m, m) - Complex(1.0, 0.0)) < 1e-15);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(g.R_BS);
    CHECK(std::abs(eig.eigenvalues()[sc.M - 1] - sc.M) < 1e-12);
    CHECK(std::abs(eig.eigenvalues()[sc.M - 2]) < 1e-12);
}

TEST_CASE("identical UT and Eve angles give beta = psi") {
    ScenarioConfig c;
    c.angles.phi_irs_eve = 0.9;
    c.angles.omega_irs_eve = 1.4;
    c.angles.phi_irs_ut = 0.9;
    c.angles.omega_irs_ut = 1.4;
    const GeometryVectors g = geometry_vectors(resolve(c));
    CHECK(g.beta == g.psi);
}

TEST_CASE("swapping UT and Eve angles swaps beta and psi") {
    ScenarioConfig c;
    c.angles.phi_irs_ut = 0.3;
    c.angles.omega_irs_ut = 1.0;
    c.angles.phi_irs_eve = 2.1;
    c.angles.omega_irs_eve = 0.6;
    ScenarioConfig s = c;
    std::swap(s.angles.phi_irs_ut, s.angles.phi_irs_eve);
    std::swap(s.angles.omega_irs_ut, s.angles.omega_irs_eve);
    const GeometryVectors a = geometry_vectors(resolve(c));
    const GeometryVectors b = geometry_vectors(resolve(s));
    CHECK(a.beta == b.psi);
    CHECK(a.psi == b.beta);
}

TEST_CASE("cascade identity against the explicit matrix product") {
    // diag(G_U) Q assembled element by element, compared with the beta shortcut.
    for (int L : {1, 6, 20}) {
        for (int M : {1, 3, 4}) {
            const Scenario sc = scenario_with(L, M);
            const GeometryVectors g = geometry_vectors(sc);
            const CVector a_bs = bs_steering(sc.angles.phi_bs, M, sc.config.spacing_ratio).entries;
            Rng rng(L * 100 + M);
            for (int i = 0; i < 100; ++i) {
                const ChannelRealization r = sample_realization(sc, rng);
                const CVector v = random_phases(rng, L);
                Eigen::RowVectorXcd lhs = Eigen::RowVectorXcd::Zero(M);
                for (int n = 0; n < L; ++n) {
                    for (int m = 0; m < M; ++m) {
                        lhs[m] += v[n] * r.G_U[n] * r.Q(n, m);
                    }
                }
                const Complex vb = (v.transpose() * g.beta)(0);
                const Eigen::RowVectorXcd rhs =
                    std::sqrt(double(M)) * r.gains.alpha_gu * r.gains.alpha_q * vb * a_bs.adjoint();
                CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
            }
        }
    }
}

TEST_CASE("realization CSV dump") {
    const Scenario sc = scenario_with(2, 2);
    Rng rng(1);
    const ChannelRealization r = sample_realization(sc, rng);
    std::ostringstream out;
    write_realization_csv(out, r);
    const std::string text = out.str();
    CHECK(text.rfind("field,row,col,re,im\n", 0) == 0);
    // 2 + 2 + 1 + 3 scalars + Q (4) + G_U (2) + G_E (2) + R_U (4) + R_E (4) rows.
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 24);
    CHECK(text.find("\nR_E,1,1,") != std::string::npos);
}
