#include "helitube/field.hpp"

#include "helitube/errors.hpp"
#include "helitube/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace helitube {

CellGrid CellGrid::for_spec(const HelixSpec& spec, std::size_t n_s, std::size_t n_phi,
                            std::optional<double> period_override) {
    if (n_s < 2 || n_phi < 2) {
        throw InvalidSpec("grid needs n_s, n_phi >= 2");
    }
    CellGrid g;
    g.n_s = n_s;
    g.n_phi = n_phi;
    if (period_override) {
        if (!(*period_override > 0.0)) throw InvalidSpec("s-period override must be positive");
        g.period_s = *period_override;
    } else {
        g.period_s = spec.period_s();
    }
    g.period_varphi = spec.period_varphi();
    return g;
}

double CellGrid::rho0() const { return period_varphi / (2.0 * std::numbers::pi); }

double CellGrid::varphi(std::size_t j) const { return -0.5 * period_varphi + static_cast<double>(j) * dvarphi(); }

double CellGrid::phi(std::size_t j) const {
    return -std::numbers::pi + static_cast<double>(j) * (2.0 * std::numbers::pi / static_cast<double>(n_phi));
}

std::string_view to_string(FieldQuantity q) {
    switch (q) {
        case FieldQuantity::H: return "h";
        case FieldQuantity::VCurv: return "v_curv";
        case FieldQuantity::VKin: return "v_kin";
        case FieldQuantity::VEff: return "v_eff";
        case FieldQuantity::V1: return "V1";
    }
    return "?";
}

FieldQuantity parse_field_quantity(std::string_view name) {
    for (auto q : {FieldQuantity::H, FieldQuantity::VCurv, FieldQuantity::VKin, FieldQuantity::VEff, FieldQuantity::V1}) {
        if (name == to_string(q)) return q;
    }
    throw InvalidSpec("unknown field quantity '" + std::string(name) + "'");
}

ScalarField2D sample_field(const HelixSpec& spec, FieldQuantity quantity, std::size_t n_s, std::size_t n_phi,
                           std::optional<double> period_override) {
    ScalarField2D f{CellGrid::for_spec(spec, n_s, n_phi, period_override), {}};
    f.values.resize(f.grid.size());
    for (std::size_t i = 0; i < n_s; ++i) {
        const double s = f.grid.s(i);
        for (std::size_t j = 0; j < n_phi; ++j) {
            const double phi = f.grid.phi(j);
            double v = 0.0;
            switch (quantity) {
                case FieldQuantity::H: v = metric_h(spec, s, phi); break;
                case FieldQuantity::VCurv: v = v_curv(spec, s, phi); break;
                case FieldQuantity::VKin: v = v_kin(spec, s, phi); break;
                case FieldQuantity::VEff: v = v_eff(spec, s, phi); break;
                case FieldQuantity::V1: v = v1_multiplicative(spec, s, phi); break;
            }
            f.at(i, j) = v;
        }
    }
    return f;
}

}  // namespace helitube
