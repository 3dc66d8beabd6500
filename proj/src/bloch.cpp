#include "helitube/bloch.hpp"

#include "helitube/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace helitube {

double ReciprocalVector::norm_sq(const HelixSpec& spec) const {
    const double a = k_s(spec);
    const double b = k_phi(spec);
    return a * a + b * b;
}

double BlochVector::norm_sq(const HelixSpec& spec) const {
    const double b = k_phi(spec);
    return k_s * k_s + b * b;
}

BlochVector BlochVector::shifted(const ReciprocalVector& m, const HelixSpec& spec) const {
    return {k_s + m.k_s(spec), n + m.m_phi};
}

BlochVector BlochVector::in_first_zone(const HelixSpec& spec, double k_s, double n) {
    const double period = std::abs(spec.tau());
    if (period == 0.0) {
        return {k_s, n};
    }
    const double j = std::floor((k_s + 0.5 * period) / period);
    const double sign = spec.tau() > 0.0 ? 1.0 : -1.0;
    return {k_s - j * period, n + j * sign};
}

BlochVector zone_boundary(const HelixSpec& spec, const ReciprocalVector& m) {
    return {-0.5 * m.k_s(spec), -0.5 * static_cast<double>(m.m_phi)};
}

cplx CouplingTable::at(int j) const {
    if (j < -max_harmonic || j > max_harmonic) return {0.0, 0.0};
    return entries[static_cast<std::size_t>(j + max_harmonic)];
}

CouplingTable coupling_coefficients(const HelixSpec& spec, double q_s) {
    // cos x + cos^2 x - cos^3 x = 1/2 + (1/4) cos x + (1/2) cos 2x - (1/4) cos 3x,
    // and cos x d_ss - tau sin x d_s on exp(i q s) gives
    // -(q(q + tau)/2) e^{ix} - (q(q - tau)/2) e^{-ix}.
    const double eps = spec.epsilon();
    const double k2 = spec.kappa() * spec.kappa();
    const double tau = spec.tau();
    std::array<double, 7> real{};
    real[3] = k2 / 4.0;
    real[3 + 1] = k2 / 16.0 - 0.5 * q_s * (q_s + tau);
    real[3 - 1] = k2 / 16.0 - 0.5 * q_s * (q_s - tau);
    real[3 + 2] = real[3 - 2] = k2 / 8.0;
    real[3 + 3] = real[3 - 3] = -k2 / 16.0;

    CouplingTable t;
    t.q_s = q_s;
    for (int j = -3; j <= 3; ++j) {
        // x = tau (s - s0) - varphi/rho0, so e^{ijx} = e^{i j K1.r} e^{-i j tau s0}.
        const cplx phase = std::polar(1.0, -static_cast<double>(j) * tau * spec.s0());
        t.entries[static_cast<std::size_t>(j + 3)] = eps * real[static_cast<std::size_t>(j + 3)] * phase;
    }
    return t;
}

cplx coupling(const HelixSpec& spec, const ReciprocalVector& m, double q_s) {
    if (!m.on_ray()) return {0.0, 0.0};
    return coupling_coefficients(spec, q_s).at(m.m_s);
}

namespace {

double default_resonance_threshold(const HelixSpec& spec) {
    const double t2 = spec.tau() * spec.tau();
    return 1e-6 * (t2 > 0.0 ? t2 : 1.0 / (spec.rho0() * spec.rho0()));
}

}  // namespace

cplx first_order_u(const HelixSpec& spec, const BlochVector& k, const ReciprocalVector& m, double energy,
                   const FirstOrderOptions& options) {
    const double threshold = options.resonance_threshold.value_or(default_resonance_threshold(spec));
    const double k_eff_sq = spec.spectral_offset() + energy;
    const double denom = k_eff_sq - k.shifted(m, spec).norm_sq(spec);
    if (std::abs(denom) <= threshold) {
        throw NearResonance("k_eff^2 - (k + K_m)^2 = " + std::to_string(denom) + " for m = (" +
                            std::to_string(m.m_s) + ", " + std::to_string(m.m_phi) + ")");
    }
    return coupling(spec, m, k.k_s) / denom;
}

double first_order_energy(const HelixSpec& spec, const BlochVector& k, const FirstOrderOptions& options) {
    const double free = k.norm_sq(spec) - spec.spectral_offset();
    const double shift = coupling_coefficients(spec, k.k_s).diagonal();
    cplx second(0.0, 0.0);
    for (int j = -CouplingTable::max_harmonic; j <= CouplingTable::max_harmonic; ++j) {
        if (j == 0) continue;
        const ReciprocalVector m = ReciprocalVector::ray(j);
        const cplx u = first_order_u(spec, k, m, free, options);
        const double q_m = k.k_s + m.k_s(spec);
        second += coupling(spec, -m, q_m) * u;
    }
    return free + shift + second.real();
}

TwoBandResult two_band_energies(const HelixSpec& spec, const BlochVector& k, const ReciprocalVector& m) {
    if (m.m_s == 0 && m.m_phi == 0) {
        throw InvalidSpec("two_band_energies needs a non-zero lattice vector");
    }
    if (!m.on_ray()) {
        throw InvalidSpec("lattice vector is off the K1 ray: the components do not couple");
    }
    const BlochVector kk = k.shifted(m, spec);
    const double e0 = k.norm_sq(spec);
    const double e1 = kk.norm_sq(spec);
    const double a = spec.spectral_offset();
    const double v0 = coupling_coefficients(spec, k.k_s).diagonal();

    const cplx u2 = coupling(spec, m, k.k_s) * coupling(spec, -m, kk.k_s);
    TwoBandResult r;
    r.u_squared = u2.real();
    r.u_squared_negative = r.u_squared < 0.0;
    if (r.u_squared == 0.0) {
        // Uncoupled: the free parabolas themselves, without rounding through the centre.
        r.lower = std::min(e0, e1) - a + v0;
        r.upper = std::max(e0, e1) - a + v0;
        return r;
    }
    const double half_split = 0.5 * (e0 - e1);
    const double root = std::sqrt(half_split * half_split + std::abs(r.u_squared));
    const double centre = 0.5 * (e0 + e1) - a + v0;
    r.lower = centre - root;
    r.upper = centre + root;
    return r;
}

std::pair<double, double> near_boundary_expansion(const HelixSpec& spec, double G, const ReciprocalVector& m) {
    if (!m.on_ray() || (m.m_s == 0 && m.m_phi == 0)) {
        throw InvalidSpec("near_boundary_expansion needs a non-zero lattice vector on the K1 ray");
    }
    const double K2 = m.norm_sq(spec);
    const double K = std::sqrt(K2);
    const BlochVector k0 = zone_boundary(spec, m);
    // Move by G along K_m: k_phi = n / rho0, so n moves by G (K_phi/K) rho0.
    const BlochVector k{k0.k_s + G * m.k_s(spec) / K, k0.n + G * m.k_phi(spec) / K * spec.rho0()};
    const BlochVector kk = k.shifted(m, spec);
    const double u2 = std::abs((coupling(spec, m, k.k_s) * coupling(spec, -m, kk.k_s)).real());
    if (!(K2 * G * G < 0.1 * u2)) {
        throw OutOfValidity("K^2 G^2 = " + std::to_string(K2 * G * G) + " not below 0.1 U^2 = " +
                            std::to_string(0.1 * u2));
    }
    const double U = std::sqrt(u2);
    const double a = spec.spectral_offset();
    const double v0 = coupling_coefficients(spec, k.k_s).diagonal();
    const double quarter = 0.25 * K2;
    // E(+-) = G^2 - a +- |U|; E_{1,2} = E(-+) + (K/2)^2 [1 -+ 2 G^2/|U|].
    const double lower = (G * G - a - U) + quarter * (1.0 - 2.0 * G * G / U) + v0;
    const double upper = (G * G - a + U) + quarter * (1.0 + 2.0 * G * G / U) + v0;
    return {lower, upper};
}

HelixSpec epsilon_family_member(const HelixSpec& base, double eps) {
    if (eps < 0.0) throw InvalidSpec("epsilon must be non-negative");
    if (eps == 0.0) return HelixSpec(0.0, base.tau(), base.rho0(), base.s0());
    if (base.kappa() <= 0.0) {
        throw InvalidSpec("epsilon sweep needs kappa > 0 to set rho0 = eps / kappa");
    }
    return HelixSpec(base.kappa(), base.tau(), eps / base.kappa(), base.s0());
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) {
        throw InvalidSpec("fit_line needs equally sized, non-empty samples");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    if (sxx == 0.0) {
        f.slope = 0.0;
        f.intercept = my;
        f.r_squared = syy == 0.0 ? 1.0 : 0.0;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
    }
    f.r_squared = syy == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / syy;
    return f;
}

GapScaling gap_scaling(const HelixSpec& base, const std::vector<double>& epsilons) {
    if (epsilons.size() < 4) {
        throw InvalidSpec("gap_scaling needs at least 4 epsilon values");
    }
    GapScaling out;
    std::vector<double> x;
    const double k2 = base.kappa() * base.kappa();
    for (double eps : epsilons) {
        if (eps < 0.0 || eps > 0.1) {
            throw InvalidSpec("gap_scaling epsilon " + std::to_string(eps) + " outside [0, 0.1]");
        }
        const HelixSpec spec = epsilon_family_member(base, eps);
        const TwoBandResult r = two_band_energies(spec, zone_boundary(spec));
        out.epsilon.push_back(eps);
        out.gap.push_back(r.gap());
        x.push_back(eps * k2 / 4.0);
    }
    out.fit = fit_line(x, out.gap);
    return out;
}

namespace {

double band_energy(const HelixSpec& spec, double k_s, double k_phi, int band, const ReciprocalVector& m) {
    const TwoBandResult r = two_band_energies(spec, BlochVector{k_s, k_phi * spec.rho0()}, m);
    return band == 0 ? r.lower : r.upper;
}

Eigen::Matrix2d fd_hessian(const HelixSpec& spec, double ks, double kp, double h, int band,
                           const ReciprocalVector& m) {
    auto E = [&](double a, double b) { return band_energy(spec, a, b, band, m); };
    const double e0 = E(ks, kp);
    Eigen::Matrix2d H;
    H(0, 0) = (E(ks + h, kp) - 2.0 * e0 + E(ks - h, kp)) / (h * h);
    H(1, 1) = (E(ks, kp + h) - 2.0 * e0 + E(ks, kp - h)) / (h * h);
    H(0, 1) = H(1, 0) =
        (E(ks + h, kp + h) - E(ks + h, kp - h) - E(ks - h, kp + h) + E(ks - h, kp - h)) / (4.0 * h * h);
    return H;
}

double momentum_scale(const HelixSpec& spec) {
    return spec.tau() != 0.0 ? std::abs(spec.tau()) : 1.0 / spec.rho0();
}

}  // namespace

Eigen::Matrix2d band_hessian(const HelixSpec& spec, const BlochVector& k, int band,
                             const EffectiveMassOptions& options, const ReciprocalVector& m) {
    if (band != 0 && band != 1) throw InvalidSpec("band index must be 0 or 1");
    const double h = options.step * momentum_scale(spec);
    const double kp = k.k_phi(spec);
    const Eigen::Matrix2d coarse = fd_hessian(spec, k.k_s, kp, h, band, m);
    if (!options.richardson) return coarse;
    const Eigen::Matrix2d fine = fd_hessian(spec, k.k_s, kp, 0.5 * h, band, m);
    return (4.0 * fine - coarse) / 3.0;
}

Eigen::Matrix2d effective_mass(const HelixSpec& spec, const BlochVector& k, int band,
                               const EffectiveMassOptions& options, const ReciprocalVector& m) {
    const Eigen::Matrix2d H = band_hessian(spec, k, band, options, m);
    const double scale = momentum_scale(spec);
    const double det = H.determinant();
    if (!(std::abs(det) >= 1e-12 * std::pow(scale, 4))) {
        throw SingularMass("band Hessian determinant " + std::to_string(det) + " is numerically singular");
    }
    return 2.0 * H.inverse();
}

double cylinder_limit_energies(const HelixSpec& spec, int n, int l, double L) {
    if (spec.kappa() != 0.0) throw InvalidSpec("cylinder limit requires kappa = 0");
    if (!(L > 0.0)) throw InvalidSpec("cylinder length must be positive");
    if (l < 1) throw InvalidSpec("longitudinal quantum number must be >= 1");
    const double rho = spec.rho0();
    const double nn = static_cast<double>(n);
    const double axial = std::isinf(L) ? 0.0 : std::pow(l * std::numbers::pi / L, 2);
    return (nn * nn - 0.25) / (rho * rho) + axial;
}

std::string_view to_string(BandSource source) {
    switch (source) {
        case BandSource::TwoBand: return "TWO_BAND";
        case BandSource::FirstOrder: return "FIRST_ORDER";
        case BandSource::OraclePerturbed: return "ORACLE_PERTURBED";
        case BandSource::OracleFull: return "ORACLE_FULL";
    }
    return "?";
}

}  // namespace helitube
