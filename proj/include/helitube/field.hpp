#pragma once

#include "helitube/geometry.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace helitube {

/// Uniform grid over one periodic unit cell [0, period_s) x [-pi rho0, pi rho0).
/// Node (i, j) sits at s_i = i * period_s / n_s and
/// varphi_j = -pi rho0 + j * period_varphi / n_phi; the periodic end points are
/// not duplicated.
struct CellGrid {
    std::size_t n_s = 0;
    std::size_t n_phi = 0;
    double period_s = 0.0;
    double period_varphi = 0.0;

    /// Grid on the unit cell of `spec`. `period_override` replaces 2 pi/|tau|
    /// (required when tau = 0).
    static CellGrid for_spec(const HelixSpec& spec, std::size_t n_s, std::size_t n_phi,
                             std::optional<double> period_override = std::nullopt);

    std::size_t size() const { return n_s * n_phi; }
    std::size_t index(std::size_t i, std::size_t j) const { return i * n_phi + j; }
    double ds() const { return period_s / static_cast<double>(n_s); }
    double dvarphi() const { return period_varphi / static_cast<double>(n_phi); }
    double s(std::size_t i) const { return static_cast<double>(i) * ds(); }
    double varphi(std::size_t j) const;
    /// Cross-section angle of column j.
    double phi(std::size_t j) const;
    double rho0() const;

    bool operator==(const CellGrid&) const = default;
};

/// Real samples over a CellGrid, row-major with s as the slow index.
struct ScalarField2D {
    CellGrid grid;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
    double& at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
};

enum class FieldQuantity { H, VCurv, VKin, VEff, V1 };

std::string_view to_string(FieldQuantity q);
/// Parses "h", "v_curv", "v_kin", "v_eff", "V1". Throws InvalidSpec otherwise.
FieldQuantity parse_field_quantity(std::string_view name);

/// Samples `quantity` at every node of the unit cell. For V1 the multiplicative
/// part of the first-order perturbation is sampled.
ScalarField2D sample_field(const HelixSpec& spec, FieldQuantity quantity, std::size_t n_s,
                           std::size_t n_phi, std::optional<double> period_override = std::nullopt);

}  // namespace helitube
