#include "helitube/operators.hpp"

#include "helitube/errors.hpp"

#include <cmath>

namespace helitube {

namespace {

void require_gauge(const WaveField& f, Gauge expected, const char* op) {
    if (f.gauge != expected) {
        throw GaugeMismatch(std::string(op) + ": field is in the wrong gauge");
    }
}

// Evaluates fn(s, phi) at every node.
template <typename Fn>
std::vector<double> nodal(const CellGrid& g, Fn&& fn) {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) out[g.index(i, j)] = fn(g.s(i), g.phi(j));
    }
    return out;
}

ComplexGrid times(const std::vector<double>& w, const ComplexGrid& f) {
    ComplexGrid out(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = w[k] * f[k];
    return out;
}

// Phase x = tau (s - s0) - phi of the first-order perturbation.
double ray_phase(const HelixSpec& spec, double s, double phi) { return spec.tau() * (s - spec.s0()) - phi; }

}  // namespace

WaveField WaveField::zeros(const CellGrid& grid, Gauge gauge) {
    return WaveField{grid, ComplexGrid(grid.size(), cplx(0.0, 0.0)), gauge};
}

ScalarField2D WaveField::real() const {
    ScalarField2D out{grid, std::vector<double>(values.size())};
    for (std::size_t k = 0; k < values.size(); ++k) out.values[k] = values[k].real();
    return out;
}

ScalarField2D WaveField::imag() const {
    ScalarField2D out{grid, std::vector<double>(values.size())};
    for (std::size_t k = 0; k < values.size(); ++k) out.values[k] = values[k].imag();
    return out;
}

double WaveField::norm(const HelixSpec& spec) const {
    const double dA = grid.ds() * grid.dvarphi();
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.n_s; ++i) {
        for (std::size_t j = 0; j < grid.n_phi; ++j) {
            const double w = gauge == Gauge::Psi ? metric_h(spec, grid.s(i), grid.phi(j)) : 1.0;
            sum += std::norm(values[grid.index(i, j)]) * w;
        }
    }
    return std::sqrt(sum * dA);
}

void WaveField::normalize(const HelixSpec& spec) {
    const double n = norm(spec);
    if (n == 0.0) {
        throw Error("cannot normalize a zero field");
    }
    for (auto& v : values) v /= n;
}

cplx flat_inner(const WaveField& a, const WaveField& b) {
    if (!(a.grid == b.grid)) {
        throw GridMismatch("inner product of fields on different grids");
    }
    cplx sum(0.0, 0.0);
    for (std::size_t k = 0; k < a.values.size(); ++k) sum += std::conj(a.values[k]) * b.values[k];
    return sum * (a.grid.ds() * a.grid.dvarphi());
}

double v_kin(const HelixSpec& spec, double s, double phi) {
    const MetricJet j = metric_jet(spec, s, phi);
    const double h = j.h;
    const double h2 = h * h;
    return 0.5 * j.h_vv / h - 0.25 * j.h_v * j.h_v / h2 + 0.5 * j.h_ss / (h2 * h) -
           1.25 * j.h_s * j.h_s / (h2 * h2);
}

double v_eff(const HelixSpec& spec, double s, double phi) { return v_kin(spec, s, phi) + v_curv(spec, s, phi); }

WaveField apply_laplace_beltrami(const HelixSpec& spec, const WaveField& psi) {
    require_gauge(psi, Gauge::Psi, "apply_laplace_beltrami");
    const CellGrid& g = psi.grid;
    const SpectralDifferentiator D(g);
    const auto h = nodal(g, [&](double s, double p) { return metric_h(spec, s, p); });
    std::vector<double> inv_h(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) inv_h[k] = 1.0 / h[k];

    const ComplexGrid flux_s = D.d_s(times(inv_h, D.d_s(psi.values)));
    const ComplexGrid flux_v = D.d_v(times(h, D.d_v(psi.values)));
    WaveField out = WaveField::zeros(g, Gauge::Psi);
    for (std::size_t k = 0; k < g.size(); ++k) out.values[k] = -inv_h[k] * (flux_s[k] + flux_v[k]);
    return out;
}

WaveField apply_laplace_beltrami_expanded(const HelixSpec& spec, const WaveField& psi) {
    require_gauge(psi, Gauge::Psi, "apply_laplace_beltrami_expanded");
    const CellGrid& g = psi.grid;
    const SpectralDifferentiator D(g);
    const ComplexGrid ps = D.d_s(psi.values);
    const ComplexGrid pss = D.d_ss(psi.values);
    const ComplexGrid pv = D.d_v(psi.values);
    const ComplexGrid pvv = D.d_vv(psi.values);
    WaveField out = WaveField::zeros(g, Gauge::Psi);
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            const MetricJet m = metric_jet(spec, g.s(i), g.phi(j));
            const std::size_t k = g.index(i, j);
            const double h = m.h;
            out.values[k] = -pss[k] / (h * h) - pvv[k] - (m.h_v / h) * pv[k] + (m.h_s / (h * h * h)) * ps[k];
        }
    }
    return out;
}

WaveField apply_transformed_operator(const HelixSpec& spec, const WaveField& phi, double extra_potential) {
    require_gauge(phi, Gauge::Phi, "apply_transformed_operator");
    const CellGrid& g = phi.grid;
    const SpectralDifferentiator D(g);
    const auto inv_h2 = nodal(g, [&](double s, double p) {
        const double h = metric_h(spec, s, p);
        return 1.0 / (h * h);
    });
    const auto veff = nodal(g, [&](double s, double p) { return v_eff(spec, s, p); });

    const ComplexGrid flux = D.d_s(times(inv_h2, D.d_s(phi.values)));
    const ComplexGrid pvv = D.d_vv(phi.values);
    WaveField out = WaveField::zeros(g, Gauge::Phi);
    for (std::size_t k = 0; k < g.size(); ++k) {
        out.values[k] = -flux[k] - pvv[k] + (veff[k] + extra_potential) * phi.values[k];
    }
    return out;
}

WaveField apply_transformed_operator_expanded(const HelixSpec& spec, const WaveField& phi) {
    require_gauge(phi, Gauge::Phi, "apply_transformed_operator_expanded");
    const CellGrid& g = phi.grid;
    const SpectralDifferentiator D(g);
    const ComplexGrid ps = D.d_s(phi.values);
    const ComplexGrid pss = D.d_ss(phi.values);
    const ComplexGrid pvv = D.d_vv(phi.values);
    WaveField out = WaveField::zeros(g, Gauge::Phi);
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            const MetricJet m = metric_jet(spec, g.s(i), g.phi(j));
            const std::size_t k = g.index(i, j);
            const double h = m.h;
            out.values[k] = -pss[k] / (h * h) - pvv[k] + 2.0 * m.h_s / (h * h * h) * ps[k] +
                            v_eff(spec, g.s(i), g.phi(j)) * phi.values[k];
        }
    }
    return out;
}

WaveField apply_flat_kinetic(const WaveField& phi) {
    const SpectralDifferentiator D(phi.grid);
    const ComplexGrid pss = D.d_ss(phi.values);
    const ComplexGrid pvv = D.d_vv(phi.values);
    WaveField out = WaveField::zeros(phi.grid, phi.gauge);
    for (std::size_t k = 0; k < pss.size(); ++k) out.values[k] = -pss[k] - pvv[k];
    return out;
}

double v1_multiplicative(const HelixSpec& spec, double s, double phi) {
    const double c = std::cos(ray_phase(spec, s, phi));
    const double k2 = spec.kappa() * spec.kappa();
    return spec.epsilon() * 0.5 * k2 * (c + c * c - c * c * c);
}

WaveField v1_apply(const HelixSpec& spec, const WaveField& phi) {
    require_gauge(phi, Gauge::Phi, "v1_apply");
    const CellGrid& g = phi.grid;
    const SpectralDifferentiator D(g);
    const ComplexGrid ps = D.d_s(phi.values);
    const ComplexGrid pss = D.d_ss(phi.values);
    const double eps = spec.epsilon();
    const double tau = spec.tau();
    WaveField out = WaveField::zeros(g, Gauge::Phi);
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            const std::size_t k = g.index(i, j);
            const double x = ray_phase(spec, g.s(i), g.phi(j));
            out.values[k] = v1_multiplicative(spec, g.s(i), g.phi(j)) * phi.values[k] +
                            eps * (std::cos(x) * pss[k] - tau * std::sin(x) * ps[k]);
        }
    }
    return out;
}

WaveField first_order_part_apply(const HelixSpec& spec, const WaveField& phi) {
    require_gauge(phi, Gauge::Phi, "first_order_part_apply");
    const CellGrid& g = phi.grid;
    const SpectralDifferentiator D(g);
    const double eps = spec.epsilon();
    const double k2 = spec.kappa() * spec.kappa();
    const double t2 = spec.tau() * spec.tau();
    const auto cosx = nodal(g, [&](double s, double p) { return std::cos(ray_phase(spec, s, p)); });
    const ComplexGrid flux = D.d_s(times(cosx, D.d_s(phi.values)));
    WaveField out = WaveField::zeros(g, Gauge::Phi);
    for (std::size_t k = 0; k < g.size(); ++k) {
        out.values[k] = eps * (0.5 * (k2 - t2) * cosx[k] * phi.values[k] + 2.0 * flux[k]);
    }
    return out;
}

}  // namespace helitube
