#pragma once

// Differential operators on the tube surface.
//
// Two unknowns are used. Psi lives on the curved surface and is normalized
// with the area element h ds dvarphi. Phi = sqrt(h) Psi is normalized with
// the flat element ds dvarphi; the price of the flat norm is the extra
// potential V_kin. All derivatives are trigonometric (spectral) on the
// periodic unit cell, so fields must be periodic on that cell.

#include "helitube/field.hpp"
#include "helitube/spectral.hpp"

#include <optional>

namespace helitube {

enum class Gauge { Psi, Phi };

/// Complex field over a CellGrid, tagged with the gauge it represents.
struct WaveField {
    CellGrid grid;
    ComplexGrid values;
    Gauge gauge = Gauge::Phi;

    static WaveField zeros(const CellGrid& grid, Gauge gauge);

    ScalarField2D real() const;
    ScalarField2D imag() const;

    /// Norm in the declared gauge: sqrt(sum |Psi|^2 h dA) for Psi,
    /// sqrt(sum |Phi|^2 dA) for Phi. Uses the periodic rectangle rule.
    double norm(const HelixSpec& spec) const;
    /// Scales in place so that norm(spec) == 1.
    void normalize(const HelixSpec& spec);
};

/// Flat inner product <a, b> = sum conj(a) b dA over the unit cell.
cplx flat_inner(const WaveField& a, const WaveField& b);

struct EffectiveParams {
    double a = 0.0;
    double epsilon = 0.0;

    static EffectiveParams from(const HelixSpec& spec) { return {spec.spectral_offset(), spec.epsilon()}; }
    /// k_eff^2 = a + E.
    double k_eff_sq(double energy) const { return a + energy; }
};

/// V_kin = h_vv/(2h) - h_v^2/(4h^2) + h_ss/(2h^3) - 5 h_s^2/(4h^4).
double v_kin(const HelixSpec& spec, double s, double phi);

/// V_eff = V_kin + V_curv (units of 2 mu / hbar^2).
double v_eff(const HelixSpec& spec, double s, double phi);

/// -Delta Psi in divergence form: -(1/h) d_s(h^-1 d_s Psi) - (1/h) d_v(h d_v Psi).
WaveField apply_laplace_beltrami(const HelixSpec& spec, const WaveField& psi);

/// -Delta Psi written out with explicit first-order terms and analytic
/// derivatives of h. Cross-check for apply_laplace_beltrami.
WaveField apply_laplace_beltrami_expanded(const HelixSpec& spec, const WaveField& psi);

/// Flux form -d_s(h^-2 d_s Phi) - d_vv Phi + (V_eff + extra_potential) Phi.
/// `extra_potential` is a constant shift (zero except for negative controls).
WaveField apply_transformed_operator(const HelixSpec& spec, const WaveField& phi,
                                     double extra_potential = 0.0);

/// -h^-2 d_ss Phi - d_vv Phi + 2 (h_s / h^3) d_s Phi + V_eff Phi.
WaveField apply_transformed_operator_expanded(const HelixSpec& spec, const WaveField& phi);

/// -d_ss Phi - d_vv Phi.
WaveField apply_flat_kinetic(const WaveField& phi);

/// Multiplicative part of the first-order perturbation,
/// (eps kappa^2 / 2) [cos x + cos^2 x - cos^3 x], x = tau (s - s0) - varphi/rho0.
double v1_multiplicative(const HelixSpec& spec, double s, double phi);

/// First-order perturbing operator of the expanded equation:
/// eps { (kappa^2/2)[cos x + cos^2 x - cos^3 x] + cos x d_ss - tau sin x d_s }.
WaveField v1_apply(const HelixSpec& spec, const WaveField& phi);

/// Linear-in-eps part of (transformed operator + flat Laplacian + a), taken
/// directly from the unexpanded operator:
/// eps { (kappa^2 - tau^2)/2 cos x + 2 d_s(cos x d_s) }.
/// Used to measure how well v1_apply tracks the full operator.
WaveField first_order_part_apply(const HelixSpec& spec, const WaveField& phi);

}  // namespace helitube
