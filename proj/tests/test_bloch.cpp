#include "helitube/bloch.hpp"
#include "helitube/errors.hpp"
#include "helitube/operators.hpp"
#include "helitube/oracle.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace helitube;
using namespace test_support;
using std::numbers::pi;

namespace {

// Analytic Hessian of the two-band roots for m = K1 in (k_s, k_phi):
// E = S/2 - a + V0 -+ sqrt(f), f = D^2 + g^2, D = -k.K - K^2/2,
// g = eps (kappa^2/16 - (k_s^2 + tau k_s)/2).
Eigen::Matrix2d analytic_hessian(const HelixSpec& spec, double ks, double kp, int band) {
    const double eps = spec.epsilon();
    const double tau = spec.tau();
    const Eigen::Vector2d K(tau, -1.0 / spec.rho0());
    const Eigen::Vector2d k(ks, kp);
    const double D = -k.dot(K) - 0.5 * K.squaredNorm();
    const double g = eps * (spec.kappa() * spec.kappa() / 16.0 - 0.5 * (ks * ks + tau * ks));
    const Eigen::Vector2d dD = -K;
    const Eigen::Vector2d dg(-eps * (ks + 0.5 * tau), 0.0);
    Eigen::Matrix2d d2g = Eigen::Matrix2d::Zero();
    d2g(0, 0) = -eps;
    const double f = D * D + g * g;
    const Eigen::Vector2d df = 2 * D * dD + 2 * g * dg;
    const Eigen::Matrix2d d2f = 2 * dD * dD.transpose() + 2 * dg * dg.transpose() + 2 * g * d2g;
    const double sign = band == 0 ? -1.0 : 1.0;
    return 2.0 * Eigen::Matrix2d::Identity() +
           sign * (d2f / (2 * std::sqrt(f)) - df * df.transpose() / (4 * std::pow(f, 1.5)));
}

}  // namespace

TEST_CASE("reciprocal and bloch vectors") {
    const HelixSpec spec(1.0, 2.0, 0.25);
    const ReciprocalVector k1 = ReciprocalVector::ray(1);
    CHECK(k1.k_s(spec) == 2.0);
    CHECK(k1.k_phi(spec) == -4.0);
    CHECK(k1.norm_sq(spec) == 20.0);
    CHECK(ReciprocalVector::ray(-1) == -k1);
    CHECK(k1.on_ray());
    CHECK_FALSE(ReciprocalVector{1, 1}.on_ray());

    const BlochVector k{0.3, 2.0};
    CHECK(k.k_phi(spec) == 8.0);
    CHECK(k.norm_sq(spec) == doctest::Approx(0.09 + 64.0));
    const BlochVector kk = k.shifted(k1, spec);
    CHECK(kk.k_s == doctest::Approx(2.3));
    CHECK(kk.n == 1.0);

    const BlochVector zb = zone_boundary(spec);
    CHECK(zb.k_s == -1.0);
    CHECK(zb.n == 0.5);
    // -K1/2 and -K1/2 + K1 have equal length.
    CHECK(zb.norm_sq(spec) == doctest::Approx(zb.shifted(k1, spec).norm_sq(spec)).epsilon(1e-15));

    // Folding keeps the helical family: k_s moves by a lattice multiple j tau and n by -j.
    const BlochVector f = BlochVector::in_first_zone(spec, 4.5, 0.0);
    CHECK(f.k_s == doctest::Approx(0.5));
    CHECK(f.n == 2.0);
    CHECK(f.k_s >= -1.0);
    CHECK(f.k_s < 1.0);
    const HelixSpec left(1.0, -2.0, 0.25);
    const BlochVector fl = BlochVector::in_first_zone(left, 4.5, 0.0);
    CHECK(fl.k_s == doctest::Approx(0.5));
    CHECK(fl.n == -2.0);
}

TEST_CASE("coupling table closed forms") {
    const HelixSpec spec(1.0, 1.0, 0.05);
    for (double q : {-1.3, 0.0, 0.5, 2.0}) {
        const CouplingTable t = coupling_coefficients(spec, q);
        CHECK(t.q_s == q);
        CHECK(t.diagonal() == doctest::Approx(0.05 / 4).epsilon(1e-15));
        CHECK(t.at(3).real() == doctest::Approx(-0.05 / 16).epsilon(1e-15));
        CHECK(t.at(-3).real() == doctest::Approx(-0.05 / 16).epsilon(1e-15));
        CHECK(t.at(2).real() == doctest::Approx(0.05 / 8).epsilon(1e-15));
        CHECK(t.at(4) == cplx(0.0, 0.0));
    }
    const CouplingTable zero = coupling_coefficients(HelixSpec(0.0, 1.0, 0.3), 0.7);
    for (int j = -3; j <= 3; ++j) CHECK(zero.at(j) == cplx(0.0, 0.0));
    CHECK(coupling(spec, ReciprocalVector{1, 1}, 0.3) == cplx(0.0, 0.0));

    // Linear in eps at fixed kappa, tau: eps enters only as a prefactor.
    const HelixSpec twice(1.0, 1.0, 0.1);
    for (int j = -3; j <= 3; ++j) {
        CHECK(std::abs(coupling_coefficients(twice, 0.4).at(j) - 2.0 * coupling_coefficients(spec, 0.4).at(j)) <= 1e-15);
    }
}

TEST_CASE("coupling table matches the Fourier content of the perturbation") {
    // Project v1_apply(exp(i(q s + n phi))) onto exp(i((q + j tau) s + (n - j) phi)).
    for (double s0 : {0.0, 0.7}) {
        const HelixSpec spec(0.8, 1.0, 0.1, s0);
        const CellGrid g = CellGrid::for_spec(spec, 32, 32);
        const long m = 2;
        const long n = 1;
        const double q = m * spec.tau();
        const WaveField src = plane_wave(g, m, n);
        const WaveField out = v1_apply(spec, src);
        const CouplingTable t = coupling_coefficients(spec, q);
        const double area = static_cast<double>(g.size());
        for (int j = -5; j <= 5; ++j) {
            const WaveField target = plane_wave(g, m + j, n - j);
            cplx proj(0.0, 0.0);
            for (std::size_t p = 0; p < g.size(); ++p) proj += std::conj(target.values[p]) * out.values[p];
            proj /= area;
            CHECK(std::abs(proj - t.at(j)) <= 1e-10 * std::abs(t.diagonal()));
        }
        // Off-ray targets receive nothing.
        for (auto [a, b] : {std::pair{1L, 1L}, {0L, 1L}, {2L, 0L}}) {
            const WaveField target = plane_wave(g, m + a, n + b);
            cplx proj(0.0, 0.0);
            for (std::size_t p = 0; p < g.size(); ++p) proj += std::conj(target.values[p]) * out.values[p];
            CHECK(std::abs(proj / area) <= 1e-12);
        }
    }
}

TEST_CASE("first-order coefficients") {
    const HelixSpec spec(1.0, 1.0, 0.05);
    const BlochVector k{0.0, 0.0};
    const double free = k.norm_sq(spec) - spec.spectral_offset();
    const cplx u = first_order_u(spec, k, ReciprocalVector::ray(1), free);
    CHECK(std::abs(u) > 0.0);
    CHECK(std::abs(u) < 0.05);

    CHECK(first_order_u(HelixSpec(0.0, 1.0, 0.05), k, ReciprocalVector::ray(1), free) == cplx(0.0, 0.0));

    SUBCASE("resonance at the zone boundary") {
        const BlochVector zb = zone_boundary(spec);
        const double e = zb.norm_sq(spec) - spec.spectral_offset();
        CHECK_THROWS_AS(first_order_u(spec, zb, ReciprocalVector::ray(1), e), NearResonance);
        CHECK_THROWS_AS(first_order_energy(spec, zb), NearResonance);
        FirstOrderOptions loose;
        loose.resonance_threshold = -1.0;
        CHECK_NOTHROW(first_order_u(spec, zb, ReciprocalVector::ray(2), e, loose));
    }

    SUBCASE("matches the plane-wave eigenvector") {
        for (double eps : {0.02, 0.04}) {
            const HelixSpec sp(1.0, 1.0, eps);
            const DiscretizedHamiltonian H = assemble_perturbed(sp, k, 7);
            const SpectrumResult r = eigensolve(H, 1, true);
            const Eigen::VectorXcd v = r.eigenvectors->col(0);
            const cplx ratio = v(8) / v(7);
            const double e0 = k.norm_sq(sp) - sp.spectral_offset();
            const cplx uu = first_order_u(sp, k, ReciprocalVector::ray(1), e0);
            CHECK(std::abs(ratio - uu) <= 2.0 * eps * eps * std::abs(uu) + 1e-12);
        }
    }

    SUBCASE("energy includes the uniform shift and second-order terms") {
        const double e = first_order_energy(spec, BlochVector{0.2, 0.0});
        const double free2 = 0.04 - spec.spectral_offset();
        CHECK(e == doctest::Approx(free2 + 0.05 / 4).epsilon(1e-4));
        const DiscretizedHamiltonian H = assemble_perturbed(spec, BlochVector{0.2, 0.0}, 7);
        CHECK(e == doctest::Approx(eigensolve(H, 1).eigenvalues[0]).epsilon(1e-9));
    }
}

TEST_CASE("two-band energies") {
    SUBCASE("free parabolas at eps = 0") {
        const HelixSpec spec(0.0, 1.0, 0.1);
        for (double ks : {-0.5, -0.2, 0.0, 0.3}) {
            const BlochVector k{ks, 0.0};
            const TwoBandResult r = two_band_energies(spec, k);
            const double a = spec.spectral_offset();
            const double e0 = k.norm_sq(spec) - a;
            const double e1 = k.shifted(ReciprocalVector::ray(1), spec).norm_sq(spec) - a;
            CHECK(r.lower == std::min(e0, e1));
            CHECK(r.upper == std::max(e0, e1));
            CHECK(a == 25.0);
        }
        const TwoBandResult zb = two_band_energies(spec, zone_boundary(spec));
        CHECK(zb.lower == zb.upper);
    }
    SUBCASE("gap at the zone boundary is 2|U|") {
        const HelixSpec spec(1.0, 1.0, 0.05);
        const TwoBandResult r = two_band_energies(spec, zone_boundary(spec));
        CHECK(r.gap() == doctest::Approx(2.0 * std::sqrt(r.u_squared)).epsilon(1e-14));
        // |U| = eps (kappa^2/16 + tau^2/8) at k_s = -tau/2.
        CHECK(r.gap() == doctest::Approx(2 * 0.05 * (1.0 / 16 + 1.0 / 8)).epsilon(1e-13));
        CHECK_FALSE(r.u_squared_negative);
        CHECK(r.lower <= r.upper);
        CHECK(spec.spectral_offset() == doctest::Approx(0.25 * (400.0 + 1.0)));
    }
    SUBCASE("rejects lattice vectors that do not couple") {
        const HelixSpec spec(1.0, 1.0, 0.05);
        CHECK_THROWS_AS(two_band_energies(spec, BlochVector{}, ReciprocalVector{0, 0}), InvalidSpec);
        CHECK_THROWS_AS(two_band_energies(spec, BlochVector{}, ReciprocalVector{1, 1}), InvalidSpec);
    }
    SUBCASE("second-order limit away from the boundary") {
        const HelixSpec spec(1.0, 1.0, 0.05);
        const BlochVector k{0.0, 0.0};
        const TwoBandResult r = two_band_energies(spec, k);
        const double a = spec.spectral_offset();
        const double v0 = coupling_coefficients(spec, 0.0).diagonal();
        const double e0 = k.norm_sq(spec);
        const double e1 = k.shifted(ReciprocalVector::ray(1), spec).norm_sq(spec);
        const double expected = r.u_squared / (e0 - e1);
        const double measured = r.lower - (e0 - a + v0);
        CHECK(measured == doctest::Approx(expected).epsilon(0.05));
    }
    SUBCASE("compared with the plane-wave oracle at eps = 0.05") {
        const HelixSpec spec(1.0, 1.0, 0.05);
        const double two = two_band_energies(spec, zone_boundary(spec)).gap();
        const double oracle = zone_boundary_gap(spec, BandSource::OraclePerturbed);
        CHECK(std::abs(two - oracle) / oracle <= 0.1);
    }
}

TEST_CASE("near-boundary expansion") {
    const HelixSpec spec(1.0, 1.0, 0.05);
    const double K2 = ReciprocalVector::ray(1).norm_sq(spec);
    const double U = std::sqrt(two_band_energies(spec, zone_boundary(spec)).u_squared);

    SUBCASE("gap 2|U| at G = 0") {
        const auto [lo, hi] = near_boundary_expansion(spec, 0.0);
        CHECK(hi - lo == doctest::Approx(2 * U).epsilon(1e-13));
        const TwoBandResult r = two_band_energies(spec, zone_boundary(spec));
        CHECK(lo == doctest::Approx(r.lower).epsilon(1e-14));
        CHECK(hi == doctest::Approx(r.upper).epsilon(1e-14));
    }
    SUBCASE("agrees with the two-band roots inside the validity region") {
        const double K = std::sqrt(K2);
        for (double frac : {0.1, 0.5, 0.9}) {
            const double G = frac * std::sqrt(0.1) * U / K;
            const auto [lo, hi] = near_boundary_expansion(spec, G);
            const ReciprocalVector m = ReciprocalVector::ray(1);
            const BlochVector k0 = zone_boundary(spec);
            const BlochVector k{k0.k_s + G * m.k_s(spec) / K, k0.n + G * m.k_phi(spec) / K * spec.rho0()};
            const TwoBandResult r = two_band_energies(spec, k);
            const double bound = K2 * G * G / (U * U);
            CHECK(std::abs(lo - r.lower) <= bound * U);
            CHECK(std::abs(hi - r.upper) <= bound * U);
            CHECK(std::abs(lo - r.lower) / std::abs(r.lower) <= bound);
        }
    }
    SUBCASE("outside the validity region") {
        // G = 0.01 tau gives K^2 G^2 = 0.04, far above 0.1 U^2 = 8.8e-6.
        CHECK_THROWS_AS(near_boundary_expansion(spec, 0.01 * spec.tau()), OutOfValidity);
        CHECK_THROWS_AS(near_boundary_expansion(HelixSpec(0.0, 1.0, 0.05), 1e-6), OutOfValidity);
        CHECK_THROWS_AS(near_boundary_expansion(spec, 0.0, ReciprocalVector{1, 0}), InvalidSpec);
    }
}

TEST_CASE("gap scaling") {
    const HelixSpec base(1.0, 1.0, 0.1);
    const GapScaling g = gap_scaling(base, {0.01, 0.02, 0.03, 0.04, 0.05});
    CHECK(g.fit.r_squared >= 0.999);
    CHECK(g.fit.slope >= 0.5);
    CHECK(g.fit.slope <= 2.0);
    for (double v : g.gap) CHECK(v > 0.0);
    CHECK(g.gap[1] / g.gap[0] == doctest::Approx(2.0).epsilon(0.02));
    CHECK(g.gap[3] / g.gap[1] == doctest::Approx(2.0).epsilon(0.02));

    const GapScaling zero = gap_scaling(base, {0.0, 0.0, 0.0, 0.0});
    for (double v : zero.gap) CHECK(v == 0.0);
    CHECK(zero.fit.slope == 0.0);

    CHECK_THROWS_AS(gap_scaling(base, {0.01, 0.02, 0.03}), InvalidSpec);
    CHECK_THROWS_AS(gap_scaling(base, {0.01, 0.02, 0.03, 0.2}), InvalidSpec);

    const HelixSpec m = epsilon_family_member(base, 0.04);
    CHECK(m.rho0() == doctest::Approx(0.04));
    CHECK(epsilon_family_member(base, 0.0).kappa() == 0.0);
    CHECK_THROWS_AS(epsilon_family_member(HelixSpec(0.0, 1.0, 0.1), 0.02), InvalidSpec);

    const LinearFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("effective mass") {
    SUBCASE("free particle") {
        const HelixSpec spec(0.0, 1.0, 0.1);
        const Eigen::Matrix2d m = effective_mass(spec, BlochVector{0.1, 0.0}, 0);
        CHECK((m - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-5);
    }
    SUBCASE("finite differences match the analytic Hessian") {
        const HelixSpec spec(1.0, 1.0, 0.05);
        const BlochVector zb = zone_boundary(spec);
        for (int band : {0, 1}) {
            const Eigen::Matrix2d num = band_hessian(spec, zb, band);
            const Eigen::Matrix2d ref = analytic_hessian(spec, zb.k_s, zb.k_phi(spec), band);
            CHECK((num - ref).cwiseAbs().maxCoeff() <= 1e-4 * ref.cwiseAbs().maxCoeff());
        }
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> ks(-0.5, 0.5);
        std::uniform_real_distribution<double> n(-0.5, 0.5);
        for (int trial = 0; trial < 10; ++trial) {
            const BlochVector k{ks(rng), n(rng)};
            const Eigen::Matrix2d num = band_hessian(spec, k, 0);
            const Eigen::Matrix2d ref = analytic_hessian(spec, k.k_s, k.k_phi(spec), 0);
            CHECK((num - ref).cwiseAbs().maxCoeff() <= 1e-4 * ref.cwiseAbs().maxCoeff());
        }
        const Eigen::Matrix2d mass = effective_mass(spec, zb, 0);
        CHECK(mass.allFinite());
        // The off-diagonal entry is measured, not asserted.
        MESSAGE("lower-band mass tensor at -K1/2: ", mass(0, 0), " ", mass(0, 1), " ", mass(1, 1));
    }
    SUBCASE("band index") {
        const HelixSpec spec(0.0, 1.0, 0.1);
        CHECK_NOTHROW(effective_mass(spec, BlochVector{0.1, 0.0}, 1));
        CHECK_THROWS_AS(effective_mass(spec, BlochVector{0.1, 0.0}, 2), InvalidSpec);
    }
}

TEST_CASE("cylinder limit") {
    const HelixSpec spec(0.0, 1.0, 1.0);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(cylinder_limit_energies(spec, 1, 1, inf) == 0.75);
    CHECK(cylinder_limit_energies(spec, 0, 1, inf) == -0.25);
    CHECK(cylinder_limit_energies(spec, 0, 1, pi) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(cylinder_limit_energies(HelixSpec(0.0, 1.0, 0.5), 2, 1, inf) == doctest::Approx(15.0));
    CHECK_THROWS_AS(cylinder_limit_energies(HelixSpec(0.5, 1.0, 1.0), 0, 1, inf), InvalidSpec);
    CHECK_THROWS_AS(cylinder_limit_energies(spec, 0, 1, 0.0), InvalidSpec);
    CHECK_THROWS_AS(cylinder_limit_energies(spec, 0, 0, 1.0), InvalidSpec);
}

TEST_CASE("band sources") {
    CHECK(to_string(BandSource::TwoBand) == "TWO_BAND");
    CHECK(to_string(BandSource::FirstOrder) == "FIRST_ORDER");
    CHECK(to_string(BandSource::OraclePerturbed) == "ORACLE_PERTURBED");
    CHECK(to_string(BandSource::OracleFull) == "ORACLE_FULL");

    const HelixSpec spec(1.0, 1.0, 0.1);
    std::vector<BlochVector> path;
    // k = 0 is avoided: there k + K1 and k - K1 are degenerate for the second root.
    for (int p = 1; p <= 10; ++p) path.push_back({-0.04 * p, 0.0});
    for (BandSource src : {BandSource::TwoBand, BandSource::FirstOrder, BandSource::OraclePerturbed, BandSource::OracleFull}) {
        SweepOptions o;
        o.n_s = 16;
        o.n_phi = 32;
        const BandStructure b = band_sweep(spec, path, src, o);
        CHECK(b.source == src);
        REQUIRE(b.energies.size() == path.size());
        for (const auto& e : b.energies) {
            REQUIRE(e.size() == 2);
            CHECK(std::isfinite(e[0]));
            CHECK(e[0] <= e[1]);
        }
    }
}

TEST_CASE("curvature lowers the ground state by about kappa^2/4") {
    // Same tube radius with and without curvature, lowest band near the zone centre.
    const double rho0 = 0.05;
    const HelixSpec bent(1.0, 1.0, rho0);
    const BlochVector k{0.1, 0.0};
    const double base = 0.01 - 0.25 / (rho0 * rho0);
    SweepOptions o;
    o.n_s = 32;
    o.n_phi = 64;
    for (BandSource src : {BandSource::TwoBand, BandSource::FirstOrder, BandSource::OraclePerturbed, BandSource::OracleFull}) {
        const double e = band_sweep(bent, {k}, src, o).energies[0][0];
        const double deficit = base - e;
        CAPTURE(to_string(src));
        CHECK(deficit == doctest::Approx(0.25).epsilon(0.25));
    }
}
