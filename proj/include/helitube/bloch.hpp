#pragma once

// Bloch-wave treatment of the first-order equation
//   -(d_ss + d_vv) Phi - a Phi + V1 Phi = E Phi,   E = 2 mu E / hbar^2.
//
// Wave vectors are (k_s, k_varphi) with k_varphi = n / rho0. The perturbation
// depends on s and varphi only through x = tau (s - s0) - varphi/rho0, so it
// couples a plane wave only to its translates by multiples of the lattice
// vector K1 = (tau, -1/rho0). Because V1 contains d_s and d_ss, its Fourier
// amplitudes depend on the s-wavenumber of the component they act on.

#include "helitube/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace helitube {

using cplx = std::complex<double>;

/// Lattice vector (m_s tau, m_phi / rho0).
struct ReciprocalVector {
    int m_s = 0;
    int m_phi = 0;

    static constexpr ReciprocalVector ray(int j) { return {j, -j}; }

    double k_s(const HelixSpec& spec) const { return m_s * spec.tau(); }
    double k_phi(const HelixSpec& spec) const { return m_phi / spec.rho0(); }
    double norm_sq(const HelixSpec& spec) const;
    bool on_ray() const { return m_phi == -m_s; }

    ReciprocalVector operator-() const { return {-m_s, -m_phi}; }
    bool operator==(const ReciprocalVector&) const = default;
};

/// Quasi-momentum (k_s, n / rho0). `n` is the transverse quantum number:
/// integer for single-valued states on the tube, half-integer for the
/// antiperiodic sector that contains the zone-boundary point -K1/2.
struct BlochVector {
    double k_s = 0.0;
    double n = 0.0;

    double k_phi(const HelixSpec& spec) const { return n / spec.rho0(); }
    double norm_sq(const HelixSpec& spec) const;
    BlochVector shifted(const ReciprocalVector& m, const HelixSpec& spec) const;

    /// Same helical family with k_s folded into [-|tau|/2, |tau|/2).
    /// Folding k_s by j*tau moves n by -j so the state family is unchanged.
    static BlochVector in_first_zone(const HelixSpec& spec, double k_s, double n);
};

/// -K_m / 2, the Bragg point between the components 0 and K_m.
BlochVector zone_boundary(const HelixSpec& spec, const ReciprocalVector& m = ReciprocalVector::ray(1));

/// Fourier amplitudes of V1 acting on exp(i q_s s), indexed by ray multiple j.
struct CouplingTable {
    double q_s = 0.0;
    std::array<cplx, 7> entries{};  // j = -3..3

    static constexpr int max_harmonic = 3;

    cplx at(int j) const;
    /// j = 0 entry, the uniform energy shift.
    double diagonal() const { return entries[max_harmonic].real(); }
};

CouplingTable coupling_coefficients(const HelixSpec& spec, double q_s);

/// Amplitude for lattice vector m acting on a component of s-wavenumber q_s;
/// zero for m off the K1 ray.
cplx coupling(const HelixSpec& spec, const ReciprocalVector& m, double q_s);

struct FirstOrderOptions {
    /// Resonance threshold on |k_eff^2 - (k + K_m)^2|; defaults to 1e-6 tau^2.
    std::optional<double> resonance_threshold;
};

/// u(K_m) = V(K_m; k_s) / (k_eff^2 - (k + K_m)^2) with k_eff^2 = a + energy.
/// Throws NearResonance when the denominator falls below the threshold.
cplx first_order_u(const HelixSpec& spec, const BlochVector& k, const ReciprocalVector& m, double energy,
                   const FirstOrderOptions& options = {});

/// Energy of the component at k including the second-order shift built from
/// the first-order coefficients of all ray harmonics.
double first_order_energy(const HelixSpec& spec, const BlochVector& k, const FirstOrderOptions& options = {});

struct TwoBandResult {
    double lower = 0.0;
    double upper = 0.0;
    /// U^2 = V(K_m; k_s) V(-K_m; k_s + m_s tau).
    double u_squared = 0.0;
    /// True when U^2 came out negative; the gap then uses sqrt|U^2|.
    bool u_squared_negative = false;

    double gap() const { return upper - lower; }
};

/// Roots of the 2x2 central-equation determinant for the components k and
/// k + K_m. Both roots include the uniform shift V(0). Throws InvalidSpec if m
/// is zero or off the K1 ray.
TwoBandResult two_band_energies(const HelixSpec& spec, const BlochVector& k,
                                const ReciprocalVector& m = ReciprocalVector::ray(1));

/// Expansion of the two-band roots around the Bragg point: the wave vector is
/// -K_m/2 + G K_m/|K_m|. Valid for K_m^2 G^2 < 0.1 U^2, OutOfValidity otherwise.
std::pair<double, double> near_boundary_expansion(const HelixSpec& spec, double G,
                                                  const ReciprocalVector& m = ReciprocalVector::ray(1));

/// Member of an epsilon sweep at fixed kappa and tau: rho0 = eps / kappa.
/// eps = 0 maps to the straight tube (kappa = 0) at the base rho0.
HelixSpec epsilon_family_member(const HelixSpec& base, double eps);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct GapScaling {
    std::vector<double> epsilon;
    std::vector<double> gap;
    /// Fit of gap against eps * kappa^2 / 4.
    LinearFit fit;
};

/// Two-band gap at -K1/2 over an epsilon sweep; needs at least 4 points in [0, 0.1].
GapScaling gap_scaling(const HelixSpec& base, const std::vector<double>& epsilons);

struct EffectiveMassOptions {
    /// Finite-difference step in units of |tau| (or 1/rho0 when tau = 0).
    double step = 1e-4;
    bool richardson = true;
};

/// Hessian of a two-band root in (k_s, k_phi) by central differences.
Eigen::Matrix2d band_hessian(const HelixSpec& spec, const BlochVector& k, int band,
                             const EffectiveMassOptions& options = {},
                             const ReciprocalVector& m = ReciprocalVector::ray(1));

/// m*/mu = 2 [d^2 E / dk_i dk_j]^-1 for band 0 (lower) or 1 (upper).
/// Throws SingularMass when |det| < 1e-12 tau^4.
Eigen::Matrix2d effective_mass(const HelixSpec& spec, const BlochVector& k, int band,
                               const EffectiveMassOptions& options = {},
                               const ReciprocalVector& m = ReciprocalVector::ray(1));

/// Straight tube (kappa = 0) of length L with fixed ends:
/// E = (n^2 - 1/4)/rho0^2 + (l pi / L)^2. L may be +infinity.
double cylinder_limit_energies(const HelixSpec& spec, int n, int l, double L);

enum class BandSource { TwoBand, FirstOrder, OraclePerturbed, OracleFull };

std::string_view to_string(BandSource source);

struct BandStructure {
    BandSource source = BandSource::TwoBand;
    std::vector<BlochVector> path;
    /// energies[p] ascending for path point p.
    std::vector<std::vector<double>> energies;
};

}  // namespace helitube
