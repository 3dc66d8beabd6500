#include "helitube/geometry.hpp"

#include "helitube/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace helitube {

HelixSpec::HelixSpec(double kappa, double tau, double rho0, double s0)
    : kappa_(kappa), tau_(tau), rho0_(rho0), s0_(s0) {
    if (!std::isfinite(kappa) || !std::isfinite(tau) || !std::isfinite(rho0) || !std::isfinite(s0)) {
        throw InvalidSpec("helix parameters must be finite");
    }
    if (!(rho0 > 0.0)) {
        throw InvalidSpec("rho0 must be positive, got " + std::to_string(rho0));
    }
    if (kappa < 0.0) {
        throw InvalidSpec("kappa must be non-negative, got " + std::to_string(kappa));
    }
    if (!(rho0 * kappa < 1.0)) {
        throw EmbeddingViolation("epsilon = rho0*kappa = " + std::to_string(rho0 * kappa) +
                                 " must be < 1");
    }
}

double HelixSpec::helix_radius() const {
    const double norm2 = kappa_ * kappa_ + tau_ * tau_;
    if (norm2 == 0.0) {
        throw DegenerateCurve("straight untwisted line has no helix radius");
    }
    return kappa_ / norm2;
}

double HelixSpec::helix_pitch() const {
    const double norm2 = kappa_ * kappa_ + tau_ * tau_;
    if (norm2 == 0.0) {
        throw DegenerateCurve("straight untwisted line has no helix pitch");
    }
    return tau_ / norm2;
}

double HelixSpec::period_s() const {
    if (tau_ == 0.0) {
        throw DegeneratePeriod("zero torsion: the s-period must be supplied explicitly");
    }
    return 2.0 * std::numbers::pi / std::abs(tau_);
}

double HelixSpec::period_varphi() const { return 2.0 * std::numbers::pi * rho0_; }

double rotation_angle(const HelixSpec& spec, double s) { return -spec.tau() * (s - spec.s0()); }

namespace {

double helix_rate(const HelixSpec& spec) {
    const double alpha = std::hypot(spec.kappa(), spec.tau());
    if (alpha == 0.0) {
        throw DegenerateCurve("kappa = tau = 0: Frenet frame undefined");
    }
    return alpha;
}

}  // namespace

Vec3 base_point(const HelixSpec& spec, double s) {
    const double alpha = helix_rate(spec);
    const double R = spec.helix_radius();
    const double p = spec.helix_pitch();
    return {R * std::cos(alpha * s), R * std::sin(alpha * s), p * alpha * s};
}

FrameSample frenet_frame(const HelixSpec& spec, double s) {
    const double alpha = helix_rate(spec);
    const double R = spec.helix_radius();
    const double p = spec.helix_pitch();
    const double c = std::cos(alpha * s);
    const double sn = std::sin(alpha * s);

    FrameSample f;
    f.s = s;
    f.t = alpha * Vec3(-R * sn, R * c, p);
    f.n = Vec3(-c, -sn, 0.0);
    f.b = alpha * Vec3(p * sn, -p * c, R);
    f.N = f.n;
    f.B = f.b;
    f.theta = 0.0;
    return f;
}

FrameSample rotated_frame(const HelixSpec& spec, double s) {
    FrameSample f = frenet_frame(spec, s);
    f.theta = rotation_angle(spec, s);
    const double c = std::cos(f.theta);
    const double sn = std::sin(f.theta);
    f.N = c * f.n + sn * f.b;
    f.B = -sn * f.n + c * f.b;
    return f;
}

Vec3 surface_point(const HelixSpec& spec, double s, double phi) {
    const FrameSample f = rotated_frame(spec, s);
    return base_point(spec, s) - spec.rho0() * (std::sin(phi) * f.B + std::cos(phi) * f.N);
}

double metric_h(const HelixSpec& spec, double s, double phi) {
    return 1.0 + spec.epsilon() * std::cos(rotation_angle(spec, s) + phi);
}

MetricJet metric_jet(const HelixSpec& spec, double s, double phi) {
    // u = theta(s) + varphi/rho0, du/ds = -tau, du/dvarphi = 1/rho0.
    const double u = rotation_angle(spec, s) + phi;
    const double eps = spec.epsilon();
    const double c = std::cos(u);
    const double sn = std::sin(u);
    const double tau = spec.tau();
    const double inv_rho = 1.0 / spec.rho0();

    MetricJet j;
    j.h = 1.0 + eps * c;
    j.h_s = eps * tau * sn;
    j.h_ss = -eps * tau * tau * c;
    j.h_v = -eps * inv_rho * sn;
    j.h_vv = -eps * inv_rho * inv_rho * c;
    return j;
}

Eigen::Matrix2d weingarten(const HelixSpec& spec, double s, double phi) {
    const double u = rotation_angle(spec, s) + phi;
    const double h = 1.0 + spec.epsilon() * std::cos(u);
    Eigen::Matrix2d w = Eigen::Matrix2d::Zero();
    w(0, 0) = 1.0 / spec.rho0();
    w(1, 1) = spec.kappa() * std::cos(u) / h;
    return w;
}

Curvatures principal_curvatures(const HelixSpec& spec, double s, double phi) {
    const Eigen::Matrix2d w = weingarten(spec, s, phi);
    Curvatures k;
    k.kappa1 = w(0, 0);
    k.kappa2 = w(1, 1);
    k.mean = 0.5 * (k.kappa1 + k.kappa2);
    k.gauss = k.kappa1 * k.kappa2;
    return k;
}

double v_curv(const HelixSpec& spec, double s, double phi) {
    const double h = metric_h(spec, s, phi);
    const double rho = spec.rho0();
    return -0.25 / (rho * rho * h * h);
}

SurfaceSample surface_sample(const HelixSpec& spec, double s, double phi) {
    SurfaceSample out;
    out.s = s;
    out.phi = phi;
    out.varphi = spec.rho0() * phi;
    out.point = surface_point(spec, s, phi);
    out.h = metric_h(spec, s, phi);
    out.curvature = principal_curvatures(spec, s, phi);
    out.v_curv = v_curv(spec, s, phi);
    return out;
}

}  // namespace helitube
