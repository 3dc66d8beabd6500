#pragma once

// Helical tube geometry: base helix, Frenet and rotation-minimizing frames,
// the tube embedding and its curvature data.
//
// Coordinates on the surface are (s, phi): s is arclength along the base
// helix and phi in [-pi, pi) the angle around the cross-section. The
// transverse arclength is varphi = rho0 * phi. Only constant curvature and
// torsion are supported, so every quantity here is closed form.

#include <Eigen/Core>

#include <optional>

namespace helitube {

using Vec3 = Eigen::Vector3d;

/// Parameters of one helical tube.
class HelixSpec {
public:
    /// Validates rho0 > 0, kappa >= 0 and epsilon = rho0*kappa < 1.
    /// Throws InvalidSpec or EmbeddingViolation.
    HelixSpec(double kappa, double tau, double rho0, double s0 = 0.0);

    double kappa() const { return kappa_; }
    double tau() const { return tau_; }
    double rho0() const { return rho0_; }
    double s0() const { return s0_; }

    /// rho0 * kappa, the small parameter of the perturbative treatment.
    double epsilon() const { return rho0_ * kappa_; }

    /// Radius R = kappa / (kappa^2 + tau^2) of the cylinder the helix winds on.
    double helix_radius() const;
    /// Pitch parameter p = tau / (kappa^2 + tau^2); signed by handedness.
    double helix_pitch() const;

    /// Length of one unit cell along s, 2 pi / |tau|. Throws DegeneratePeriod for tau = 0.
    double period_s() const;
    double period_varphi() const;

    /// a = (1/rho0^2 + kappa^2) / 4, the constant that the curvature potential
    /// subtracts from the flat kinetic energy.
    double spectral_offset() const {
        const double inv = 1.0 / rho0_;
        return 0.25 * (inv * inv + kappa_ * kappa_);
    }

    /// Same tube with a different curvature (used by epsilon sweeps).
    HelixSpec with_kappa(double kappa) const { return {kappa, tau_, rho0_, s0_}; }
    HelixSpec with_rho0(double rho0) const { return {kappa_, tau_, rho0, s0_}; }

private:
    double kappa_;
    double tau_;
    double rho0_;
    double s0_;
};

struct FrameSample {
    double s = 0.0;
    Vec3 t = Vec3::Zero();
    Vec3 n = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    /// Rotated pair; equal to (n, b) until rotated_frame fills them.
    Vec3 N = Vec3::Zero();
    Vec3 B = Vec3::Zero();
    double theta = 0.0;
};

struct Curvatures {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double mean = 0.0;
    double gauss = 0.0;
};

struct SurfaceSample {
    double s = 0.0;
    double phi = 0.0;
    double varphi = 0.0;
    Vec3 point = Vec3::Zero();
    double h = 1.0;
    Curvatures curvature;
    double v_curv = 0.0;
};

/// h and its analytic partial derivatives with respect to s and varphi.
struct MetricJet {
    double h = 1.0;
    double h_s = 0.0;
    double h_ss = 0.0;
    double h_v = 0.0;
    double h_vv = 0.0;
};

/// theta(s) = -integral_{s0}^{s} tau ds' = -tau (s - s0).
double rotation_angle(const HelixSpec& spec, double s);

/// Base curve x(s) = (R cos(alpha s), R sin(alpha s), p alpha s),
/// alpha = sqrt(kappa^2 + tau^2).
Vec3 base_point(const HelixSpec& spec, double s);

/// Analytic Frenet frame of the base helix. Throws DegenerateCurve when
/// kappa = tau = 0.
FrameSample frenet_frame(const HelixSpec& spec, double s);

/// Frenet frame with (N, B) rotated by theta(s) so that the frame's angular
/// velocity has no tangential component.
FrameSample rotated_frame(const HelixSpec& spec, double s);

/// X(s, phi) = x(s) - rho0 (sin(phi) B + cos(phi) N).
Vec3 surface_point(const HelixSpec& spec, double s, double phi);

/// h = 1 + rho0 kappa cos(theta(s) + phi).
double metric_h(const HelixSpec& spec, double s, double phi);

MetricJet metric_jet(const HelixSpec& spec, double s, double phi);

/// Shape operator in the (varphi, s) coordinate basis:
/// diag(1/rho0, kappa cos(theta + phi) / h).
Eigen::Matrix2d weingarten(const HelixSpec& spec, double s, double phi);

/// Principal, mean and Gauss curvatures.
///
/// The mean curvature is taken as (kappa1 + kappa2)/2, the sign that makes
/// kappa1 = +1/rho0. The curvature potential only sees (kappa1 - kappa2)^2 so
/// the opposite sign convention (-tr W / 2) gives the same physics.
Curvatures principal_curvatures(const HelixSpec& spec, double s, double phi);

/// Curvature-induced potential -(M^2 - K) = -1/(4 rho0^2 h^2), in units of
/// 2 mu / hbar^2.
double v_curv(const HelixSpec& spec, double s, double phi);

SurfaceSample surface_sample(const HelixSpec& spec, double s, double phi);

}  // namespace helitube
