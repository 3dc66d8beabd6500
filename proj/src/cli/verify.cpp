#include "helitube/cli.hpp"

#include "helitube/bloch.hpp"
#include "helitube/operators.hpp"
#include "helitube/oracle.hpp"
#include "helitube/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <random>

namespace helitube::cli {

namespace {

using nlohmann::ordered_json;

struct Check {
    std::string name;
    double tolerance = 0.0;
    double measured = 0.0;
    bool pass = false;
    std::string grid;
    /// Measured must be <= tolerance, else >= (orders of convergence).
    bool at_least = false;
};

std::string grid_label(std::size_t a, std::size_t b) { return std::to_string(a) + "x" + std::to_string(b); }

Check finish(Check c) {
    c.pass = c.at_least ? c.measured >= c.tolerance : c.measured <= c.tolerance;
    return c;
}

// Sum of random Fourier modes with |m_s|, |m_phi| <= band, evaluated on the grid.
WaveField random_field(const CellGrid& g, int band, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    const int width = 2 * band + 1;
    std::vector<cplx> coef(static_cast<std::size_t>(width * width));
    for (auto& c : coef) c = {normal(rng), normal(rng)};
    auto table = [&](std::size_t n, double period, double origin, auto coord) {
        std::vector<cplx> t(n * static_cast<std::size_t>(width));
        for (std::size_t i = 0; i < n; ++i) {
            for (int m = -band; m <= band; ++m) {
                t[i * width + static_cast<std::size_t>(m + band)] =
                    std::polar(1.0, 2.0 * std::numbers::pi * m * (coord(i) - origin) / period);
            }
        }
        return t;
    };
    const auto es = table(g.n_s, g.period_s, 0.0, [&](std::size_t i) { return g.s(i); });
    const auto ev = table(g.n_phi, g.period_varphi, g.varphi(0), [&](std::size_t j) { return g.varphi(j); });
    WaveField f = WaveField::zeros(g, Gauge::Phi);
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            cplx sum(0.0, 0.0);
            for (int a = 0; a < width; ++a) {
                cplx row(0.0, 0.0);
                for (int b = 0; b < width; ++b) row += coef[static_cast<std::size_t>(a * width + b)] * ev[j * width + b];
                sum += row * es[i * width + a];
            }
            f.values[g.index(i, j)] = sum;
        }
    }
    return f;
}

double l2(const ComplexGrid& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

// Grid fine enough that the harmonics of 1/sqrt(h) and its powers are resolved:
// they decay like r^m with r = eps / (1 + sqrt(1 - eps^2)).
std::size_t identity_grid(double eps, std::size_t base) {
    const double r = eps / (1.0 + std::sqrt(1.0 - eps * eps));
    std::size_t n = base;
    while (n < 512 && r > 0.0 && std::pow(r, static_cast<double>(n) / 2.0 - 8.0) > 1e-14) n *= 2;
    return n;
}

Check operator_identity(const RunConfig& c, const HelixSpec& spec) {
    const std::size_t n = identity_grid(spec.epsilon(), std::max(c.n_s, c.n_phi));
    const CellGrid g = CellGrid::for_spec(spec, std::max(c.n_s, n), std::max(c.n_phi, n), c.s_period);
    std::mt19937_64 rng(20240611);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const WaveField phi = random_field(g, 4, rng);
        const WaveField lhs = apply_transformed_operator(spec, phi, c.corrupt_vkin);
        WaveField psi = phi;
        psi.gauge = Gauge::Psi;
        for (std::size_t i = 0; i < g.n_s; ++i) {
            for (std::size_t j = 0; j < g.n_phi; ++j) psi.values[g.index(i, j)] /= std::sqrt(metric_h(spec, g.s(i), g.phi(j)));
        }
        WaveField rhs = apply_laplace_beltrami(spec, psi);
        ComplexGrid diff(g.size());
        for (std::size_t i = 0; i < g.n_s; ++i) {
            for (std::size_t j = 0; j < g.n_phi; ++j) {
                const std::size_t p = g.index(i, j);
                const double s = g.s(i), ph = g.phi(j);
                const cplx surface = rhs.values[p] + v_curv(spec, s, ph) * psi.values[p];
                diff[p] = lhs.values[p] - std::sqrt(metric_h(spec, s, ph)) * surface;
            }
        }
        worst = std::max(worst, l2(diff) / l2(lhs.values));
    }
    return finish({"operator_identity", 1e-8, worst, false, grid_label(g.n_s, g.n_phi)});
}

Check hermiticity(const RunConfig& c, const HelixSpec& spec) {
    const BlochVector k{0.3 * spec.tau(), 0.25};
    double worst = 0.0;
    FullAssemblyOptions none;
    none.reduction = GridReduction::None;
    none.period_override = c.s_period;
    worst = std::max(worst, assemble_full(spec, k, 12, 12, none).relative_asymmetry());
    std::string grid = grid_label(12, 12);
    if (spec.tau() != 0.0 && c.n_phi % c.n_s == 0) {
        worst = std::max(worst, assemble_full(spec, k, c.n_s, c.n_phi).relative_asymmetry());
        grid += "," + grid_label(c.n_s, c.n_phi);
    }
    worst = std::max(worst, assemble_perturbed(spec, k, c.n_harmonics).relative_asymmetry());

    // The spectral transformed operator is symmetric for the flat inner product.
    const CellGrid g = CellGrid::for_spec(spec, c.n_s, c.n_phi, c.s_period);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 4; ++trial) {
        const WaveField a = random_field(g, 3, rng);
        const WaveField b = random_field(g, 3, rng);
        const WaveField ta = apply_transformed_operator(spec, a);
        const WaveField tb = apply_transformed_operator(spec, b);
        const double scale = std::sqrt(std::abs(flat_inner(a, a)) * std::abs(flat_inner(tb, tb)));
        worst = std::max(worst, std::abs(flat_inner(a, tb) - flat_inner(ta, b)) / scale);
    }
    return finish({"hermiticity", 1e-12, worst, false, grid});
}

Check reflection_symmetry(const RunConfig& c, const HelixSpec& spec) {
    const CellGrid g = CellGrid::for_spec(spec, c.n_s, c.n_phi, c.s_period);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            const double s = spec.s0() + g.s(i);
            const double s_mirror = spec.s0() - g.s(i);
            const double phi = g.phi(j);
            worst = std::max(worst, std::abs(metric_h(spec, s, phi) - metric_h(spec, s_mirror, -phi)));
            const double v = v_eff(spec, s, phi);
            worst = std::max(worst, std::abs(v - v_eff(spec, s_mirror, -phi)) / std::max(1.0, std::abs(v)));
        }
    }
    return finish({"reflection_symmetry", 1e-14, worst, false, grid_label(g.n_s, g.n_phi)});
}

Check ray_selection(const RunConfig& c, const HelixSpec& spec) {
    const CellGrid g = CellGrid::for_spec(spec, c.n_s, c.n_phi, c.s_period);
    ComplexGrid v(g.size());
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) v[g.index(i, j)] = v1_multiplicative(spec, g.s(i), g.phi(j));
    }
    const ComplexGrid coef = SpectralDifferentiator(g).fourier_coefficients(v);
    // exp(i x) sits in bin (tau P_s / 2 pi, -1).
    const long bin_s = std::lround(spec.tau() * g.period_s / (2.0 * std::numbers::pi));
    double worst = 0.0;
    for (std::size_t a = 0; a < g.n_s; ++a) {
        for (std::size_t b = 0; b < g.n_phi; ++b) {
            const long ms = signed_frequency(a, g.n_s);
            const long mp = signed_frequency(b, g.n_phi);
            if (ms == -mp * bin_s) continue;
            worst = std::max(worst, std::abs(coef[g.index(a, b)]));
        }
    }
    const double k2 = spec.kappa() * spec.kappa();
    return finish({"ray_selection", 1e-12 * spec.epsilon() * k2, worst, false, grid_label(g.n_s, g.n_phi)});
}

Check cylinder_limit(const RunConfig& c) {
    const CylinderCheck r = run_cylinder_check(c.rho0, c.tau, c.n_s, c.n_phi, c.s_period);
    Check out{"cylinder_limit", 1e-6, r.max_extrapolated_rel_error, r.pass(),
              std::to_string(c.n_s) + "x{" + std::to_string(c.n_phi) + "," + std::to_string(2 * c.n_phi) + "," +
                  std::to_string(4 * c.n_phi) + "}"};
    return out;
}

Check convergence(const RunConfig& c, const HelixSpec& spec) {
    const bool sector = spec.tau() != 0.0;
    // Strongly bent tubes localize the state near the inner rim and need finer grids.
    const bool strong = spec.epsilon() > 0.5;
    std::vector<std::size_t> sizes{8, 16, 32};
    if (sector) sizes = strong ? std::vector<std::size_t>{128, 256, 512} : std::vector<std::size_t>{32, 64, 128};
    FullAssemblyOptions opts;
    opts.reduction = sector ? GridReduction::HelicalSector : GridReduction::None;
    opts.period_override = c.s_period;
    const BlochVector k{sector ? 0.3 * spec.tau() : 0.3 / spec.rho0(), 0.0};
    std::vector<double> e;
    for (std::size_t n : sizes) e.push_back(eigensolve(assemble_full(spec, k, n, n, opts), 1).eigenvalues[0]);
    const double d1 = std::abs(e[0] - e[1]);
    const double d2 = std::abs(e[1] - e[2]);
    const double order = d2 > 0.0 ? std::log2(d1 / d2) : std::numeric_limits<double>::infinity();
    Check out{"convergence_order", strong ? 1.5 : 1.8, order, false,
              grid_label(sizes[0], sizes[0]) + "," + grid_label(sizes[1], sizes[1]) + "," +
                  grid_label(sizes[2], sizes[2])};
    out.at_least = true;
    return finish(out);
}

}  // namespace

int cmd_verify(const RunConfig& c) {
    const HelixSpec spec = c.spec();
    std::vector<Check> checks;
    checks.push_back(operator_identity(c, spec));
    checks.push_back(hermiticity(c, spec));
    checks.push_back(reflection_symmetry(c, spec));
    checks.push_back(ray_selection(c, spec));
    checks.push_back(cylinder_limit(c));
    checks.push_back(convergence(c, spec));

    bool all = true;
    ordered_json j;
    j["epsilon"] = spec.epsilon();
    j["grid"] = {{"n_s", c.n_s}, {"n_phi", c.n_phi}};
    j["checks"] = ordered_json::array();
    for (const auto& ch : checks) {
        all = all && ch.pass;
        j["checks"].push_back({{"name", ch.name},
                               {"tolerance", ch.tolerance},
                               {"comparison", ch.at_least ? ">=" : "<="},
                               {"measured", ch.measured},
                               {"pass", ch.pass},
                               {"grid", ch.grid}});
        std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << "  measured " << format_number(ch.measured)
                  << (ch.at_least ? "  >= " : "  <= ") << format_number(ch.tolerance) << "  grid " << ch.grid
                  << '\n';
    }
    j["pass"] = all;
    const auto path = c.out_dir / "verify.json";
    write_atomic(path, j.dump(2) + "\n");
    std::cout << "wrote " << path.string() << '\n';
    if (!all) {
        for (const auto& ch : checks) {
            if (!ch.pass) std::cerr << "verify: check failed: " << ch.name << '\n';
        }
        return VerifyFailed;
    }
    return Ok;
}

}  // namespace helitube::cli
