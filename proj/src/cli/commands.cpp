#include "helitube/cli.hpp"

#include "helitube/bloch.hpp"
#include "helitube/field.hpp"
#include "helitube/operators.hpp"
#include "helitube/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace helitube::cli {

namespace {

using nlohmann::ordered_json;

CellGrid config_grid(const RunConfig& c, const HelixSpec& spec) {
    try {
        return CellGrid::for_spec(spec, c.n_s, c.n_phi, c.s_period);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

void require_torsion(const RunConfig& c, const char* command) {
    if (c.tau == 0.0) throw ConfigError(std::string(command) + " needs tau != 0 (the helical cell is undefined)");
}

void emit_row(std::ostringstream& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << format_number(v);
        first = false;
    }
    out << '\n';
}

void announce(const std::filesystem::path& p) { std::cout << "wrote " << p.string() << '\n'; }

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

SweepOptions sweep_options(const RunConfig& c) {
    SweepOptions o;
    o.n_bands = 2;
    o.n_s = c.n_s;
    o.n_phi = c.n_phi;
    o.n_harmonics = c.n_harmonics;
    o.reduction = c.n_phi % c.n_s == 0 ? GridReduction::HelicalSector : GridReduction::None;
    return o;
}

double max_abs_diff(const BandStructure& a, const BandStructure& b) {
    double m = 0.0;
    for (std::size_t p = 0; p < a.energies.size(); ++p) {
        for (std::size_t q = 0; q < 2; ++q) m = std::max(m, std::abs(a.energies[p][q] - b.energies[p][q]));
    }
    return m;
}

}  // namespace

int cmd_geometry(const RunConfig& c) {
    const HelixSpec spec = c.spec();
    const CellGrid g = config_grid(c, spec);
    std::ostringstream out;
    out << "s,phi,x,y,z,h,kappa1,kappa2,M,K\n";
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            const SurfaceSample p = surface_sample(spec, g.s(i), g.phi(j));
            emit_row(out, {p.s, p.phi, p.point.x(), p.point.y(), p.point.z(), p.h, p.curvature.kappa1,
                           p.curvature.kappa2, p.curvature.mean, p.curvature.gauss});
        }
    }
    const auto path = c.out_dir / "geometry.csv";
    write_atomic(path, out.str());
    announce(path);
    return Ok;
}

int cmd_potential(const RunConfig& c) {
    const HelixSpec spec = c.spec();
    const CellGrid g = config_grid(c, spec);
    const double scale = c.units.energy_scale();
    std::ostringstream out;
    out << "s,phi,v_curv,v_kin,v_eff\n";
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            const double s = g.s(i);
            const double phi = g.phi(j);
            emit_row(out, {s, phi, scale * v_curv(spec, s, phi), scale * v_kin(spec, s, phi),
                           scale * v_eff(spec, s, phi)});
        }
    }
    const auto path = c.out_dir / "potential.csv";
    write_atomic(path, out.str());
    announce(path);
    return Ok;
}

int cmd_bands(const RunConfig& c) {
    require_torsion(c, "bands");
    const HelixSpec spec = c.spec();
    const SweepOptions opts = sweep_options(c);
    std::vector<BlochVector> path;
    for (double k : c.kpath.k_s_values()) path.push_back({k, c.kpath.n});

    const BandStructure two = band_sweep(spec, path, BandSource::TwoBand, opts);
    const BandStructure pert = band_sweep(spec, path, BandSource::OraclePerturbed, opts);
    const BandStructure full = band_sweep(spec, path, BandSource::OracleFull, opts);

    const double scale = c.units.energy_scale();
    std::ostringstream csv;
    csv << "k_s,n,E_twoband_1,E_twoband_2,E_oracle_pert_1,E_oracle_pert_2,E_oracle_full_1,E_oracle_full_2\n";
    for (std::size_t p = 0; p < path.size(); ++p) {
        emit_row(csv, {path[p].k_s, path[p].n, scale * two.energies[p][0], scale * two.energies[p][1],
                       scale * pert.energies[p][0], scale * pert.energies[p][1], scale * full.energies[p][0],
                       scale * full.energies[p][1]});
    }

    const double gap_two = zone_boundary_gap(spec, BandSource::TwoBand, opts);
    const double gap_pert = zone_boundary_gap(spec, BandSource::OraclePerturbed, opts);
    const double gap_full = zone_boundary_gap(spec, BandSource::OracleFull, opts);
    const BlochVector zb = zone_boundary(spec);

    ordered_json j;
    j["units"] = c.units.label();
    j["kappa"] = c.kappa;
    j["tau"] = c.tau;
    j["rho0"] = c.rho0;
    j["a"] = scale * spec.spectral_offset();
    j["epsilon"] = spec.epsilon();
    j["grid"] = {{"n_s", c.n_s}, {"n_phi", c.n_phi}};
    j["n_harmonics"] = c.n_harmonics;
    j["path_points"] = path.size();
    j["zone_boundary"] = {{"k_s", zb.k_s}, {"n", zb.n}};
    j["gap"] = {{"two_band", scale * gap_two}, {"oracle_perturbed", scale * gap_pert}, {"oracle_full", scale * gap_full}};
    j["agreement"] = {
        {"max_abs_twoband_vs_oracle_perturbed", scale * max_abs_diff(two, pert)},
        {"max_abs_twoband_vs_oracle_full", scale * max_abs_diff(two, full)},
        {"max_abs_oracle_perturbed_vs_oracle_full", scale * max_abs_diff(pert, full)},
        {"gap_rel_twoband_vs_oracle_perturbed", rel_diff(gap_two, gap_pert)},
        {"gap_rel_twoband_vs_oracle_full", rel_diff(gap_two, gap_full)},
    };

    const auto csv_path = c.out_dir / "bands.csv";
    const auto json_path = c.out_dir / "summary.json";
    write_atomic(csv_path, csv.str());
    write_atomic(json_path, j.dump(2) + "\n");
    announce(csv_path);
    announce(json_path);
    return Ok;
}

int cmd_gap_scan(const RunConfig& c) {
    require_torsion(c, "gap-scan");
    if (c.eps_sweep.empty()) throw ConfigError("gap-scan needs a non-empty eps_sweep");
    const HelixSpec base = c.spec();
    const bool any_positive = std::any_of(c.eps_sweep.begin(), c.eps_sweep.end(), [](double e) { return e > 0.0; });
    if (any_positive && base.kappa() <= 0.0) throw ConfigError("gap-scan with eps > 0 needs kappa > 0");

    const double scale = c.units.energy_scale();
    const double k2 = c.kappa * c.kappa;
    SweepOptions opts = sweep_options(c);
    std::vector<double> x, gaps;
    std::ostringstream csv;
    csv << "epsilon,gap_twoband,gap_oracle,ratio_to_eps_kappa2_over_4\n";
    for (double eps : c.eps_sweep) {
        const HelixSpec spec = epsilon_family_member(base, eps);
        const double g2 = zone_boundary_gap(spec, BandSource::TwoBand, opts);
        const double go = zone_boundary_gap(spec, BandSource::OraclePerturbed, opts);
        const double ref = eps * k2 / 4.0;
        const double ratio = ref > 0.0 ? g2 / ref : std::numeric_limits<double>::quiet_NaN();
        emit_row(csv, {eps, scale * g2, scale * go, ratio});
        x.push_back(ref);
        gaps.push_back(g2);
    }
    const LinearFit fit = fit_line(x, gaps);
    ordered_json j;
    j["x"] = "epsilon*kappa^2/4";
    j["y"] = "gap_twoband (natural units)";
    j["points"] = x.size();
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;

    const auto csv_path = c.out_dir / "gapscan.csv";
    const auto json_path = c.out_dir / "gapscan.json";
    write_atomic(csv_path, csv.str());
    write_atomic(json_path, j.dump(2) + "\n");
    announce(csv_path);
    announce(json_path);
    return Ok;
}

CylinderCheck run_cylinder_check(double rho0, double tau, std::size_t n_s, std::size_t n_phi,
                                 std::optional<double> s_period) {
    const HelixSpec spec(0.0, tau, rho0);
    CylinderCheck out;
    out.n_s = n_s;
    out.n_phi = n_phi;
    FullAssemblyOptions opts;
    opts.reduction = GridReduction::TransverseMode;
    opts.period_override = s_period;
    for (int n = 0; n <= 3; ++n) {
        CylinderCheck::Row row;
        row.n = n;
        row.exact = cylinder_limit_energies(spec, n, 1, std::numeric_limits<double>::infinity());
        for (std::size_t level = 0; level < 3; ++level) {
            const std::size_t m = n_phi << level;
            const BlochVector k{0.0, static_cast<double>(n)};
            row.raw.push_back(eigensolve(assemble_full(spec, k, n_s, m, opts), 1).eigenvalues[0]);
        }
        // Two Richardson levels for an error series in even powers of the spacing.
        const double r1 = (4.0 * row.raw[1] - row.raw[0]) / 3.0;
        const double r2 = (4.0 * row.raw[2] - row.raw[1]) / 3.0;
        row.extrapolated = (16.0 * r2 - r1) / 15.0;
        row.raw_rel_error = std::abs(row.raw[0] - row.exact) / std::abs(row.exact);
        row.extrapolated_rel_error = std::abs(row.extrapolated - row.exact) / std::abs(row.exact);
        out.max_raw_rel_error = std::max(out.max_raw_rel_error, row.raw_rel_error);
        out.max_extrapolated_rel_error = std::max(out.max_extrapolated_rel_error, row.extrapolated_rel_error);
        out.rows.push_back(std::move(row));
    }
    return out;
}

int cmd_cylinder_check(const RunConfig& c) {
    const CylinderCheck r = run_cylinder_check(c.rho0, c.tau, c.n_s, c.n_phi, c.s_period);
    const double scale = c.units.energy_scale();
    ordered_json j;
    j["rho0"] = c.rho0;
    j["grid"] = {{"n_s", r.n_s}, {"n_phi", {r.n_phi, 2 * r.n_phi, 4 * r.n_phi}}};
    j["units"] = c.units.label();
    j["rows"] = ordered_json::array();
    std::cout << "n  exact                    raw                      rel_err_raw  rel_err_extrap\n";
    for (const auto& row : r.rows) {
        j["rows"].push_back({{"n", row.n},
                             {"exact", scale * row.exact},
                             {"raw", scale * row.raw[0]},
                             {"extrapolated", scale * row.extrapolated},
                             {"raw_rel_error", row.raw_rel_error},
                             {"extrapolated_rel_error", row.extrapolated_rel_error}});
        std::cout << row.n << "  " << format_number(scale * row.exact) << "  " << format_number(scale * row.raw[0])
                  << "  " << format_number(row.raw_rel_error) << "  " << format_number(row.extrapolated_rel_error)
                  << '\n';
    }
    j["max_raw_rel_error"] = r.max_raw_rel_error;
    j["max_extrapolated_rel_error"] = r.max_extrapolated_rel_error;
    j["pass"] = r.pass();
    std::cout << "max relative error: raw " << format_number(r.max_raw_rel_error) << ", extrapolated "
              << format_number(r.max_extrapolated_rel_error) << (r.pass() ? "  PASS" : "  FAIL") << '\n';
    const auto path = c.out_dir / "cylinder.json";
    write_atomic(path, j.dump(2) + "\n");
    announce(path);
    return r.pass() ? Ok : VerifyFailed;
}

}  // namespace helitube::cli
