#include "helitube/oracle.hpp"

#include "helitube/errors.hpp"
#include "helitube/operators.hpp"
#include "helitube/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace helitube {

double DiscretizedHamiltonian::relative_asymmetry() const {
    const double scale = matrix.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() / scale;
}

namespace {

// Adds the Hermitian pair of a nearest-neighbour link a -> b with coupling c
// (a real stiffness) and seam phase ph to the matrix.
void add_link(Eigen::MatrixXcd& H, Eigen::Index a, Eigen::Index b, double c, cplx ph) {
    H(a, a) += c;
    H(b, b) += c;
    H(a, b) += -c * ph;
    H(b, a) += -c * std::conj(ph);
}

double s_stiffness(const HelixSpec& spec, double s_mid, double phi, double ds) {
    const double h = metric_h(spec, s_mid, phi);
    return 1.0 / (h * h * ds * ds);
}

void check_dimension(std::size_t dim, const FullAssemblyOptions& options) {
    if (dim > options.max_dimension) {
        throw DimensionLimit("matrix dimension " + std::to_string(dim) + " exceeds limit " +
                             std::to_string(options.max_dimension));
    }
}

Eigen::MatrixXcd assemble_grid(const HelixSpec& spec, const CellGrid& g, cplx phase_s, cplx phase_v) {
    const auto dim = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    const double ds = g.ds();
    const double cv = 1.0 / (g.dvarphi() * g.dvarphi());
    for (std::size_t i = 0; i < g.n_s; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            const auto a = static_cast<Eigen::Index>(g.index(i, j));
            const std::size_t inext = (i + 1) % g.n_s;
            const std::size_t jnext = (j + 1) % g.n_phi;
            add_link(H, a, static_cast<Eigen::Index>(g.index(inext, j)),
                     s_stiffness(spec, g.s(i) + 0.5 * ds, g.phi(j), ds), inext == 0 ? phase_s : cplx(1.0, 0.0));
            add_link(H, a, static_cast<Eigen::Index>(g.index(i, jnext)), cv, jnext == 0 ? phase_v : cplx(1.0, 0.0));
            H(a, a) += v_eff(spec, g.s(i), g.phi(j));
        }
    }
    return H;
}

Eigen::MatrixXcd assemble_sector(const HelixSpec& spec, const CellGrid& g, double k_s, double n, cplx phase_v) {
    if (spec.tau() == 0.0) {
        throw InvalidSpec("helical-sector reduction needs non-zero torsion");
    }
    if (g.n_phi % g.n_s != 0) {
        throw InvalidSpec("helical-sector reduction needs n_phi to be a multiple of n_s");
    }
    const long sign = spec.tau() > 0.0 ? 1 : -1;
    const long shift = sign * static_cast<long>(g.n_phi / g.n_s);
    const auto nv = static_cast<long>(g.n_phi);
    const double ds = g.ds();
    const double sigma = k_s * ds + static_cast<double>(sign) * 2.0 * std::numbers::pi * n / static_cast<double>(g.n_s);
    const cplx step_phase = std::polar(1.0, sigma);
    const double cv = 1.0 / (g.dvarphi() * g.dvarphi());

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(nv, nv);
    for (long j = 0; j < nv; ++j) {
        // psi(1, j) = e^{i sigma} g(j - shift), with g quasi-periodic in j.
        long t = j - shift;
        cplx wrap(1.0, 0.0);
        while (t < 0) {
            t += nv;
            wrap *= std::conj(phase_v);
        }
        while (t >= nv) {
            t -= nv;
            wrap *= phase_v;
        }
        const double phi = g.phi(static_cast<std::size_t>(j));
        add_link(H, j, t, s_stiffness(spec, 0.5 * ds, phi, ds), step_phase * wrap);
        const long jn = (j + 1) % nv;
        add_link(H, j, jn, cv, jn == 0 ? phase_v : cplx(1.0, 0.0));
        H(j, j) += v_eff(spec, 0.0, phi);
    }
    return H;
}

Eigen::MatrixXcd assemble_transverse(const HelixSpec& spec, const CellGrid& g, double n, cplx phase_s) {
    const auto dim = static_cast<Eigen::Index>(g.n_s);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    const double ds = g.ds();
    const double dv = g.dvarphi();
    const double lambda_v =
        (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * n / static_cast<double>(g.n_phi))) / (dv * dv);
    const double inv_nv = 1.0 / static_cast<double>(g.n_phi);
    for (std::size_t i = 0; i < g.n_s; ++i) {
        double c = 0.0;
        double v = 0.0;
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            c += s_stiffness(spec, g.s(i) + 0.5 * ds, g.phi(j), ds);
            v += v_eff(spec, g.s(i), g.phi(j));
        }
        const std::size_t inext = (i + 1) % g.n_s;
        const auto a = static_cast<Eigen::Index>(i);
        add_link(H, a, static_cast<Eigen::Index>(inext), c * inv_nv, inext == 0 ? phase_s : cplx(1.0, 0.0));
        H(a, a) += v * inv_nv + lambda_v;
    }
    return H;
}

}  // namespace

DiscretizedHamiltonian assemble_full(const HelixSpec& spec, const BlochVector& k, std::size_t n_s,
                                     std::size_t n_phi, const FullAssemblyOptions& options) {
    if (!(spec.epsilon() < 1.0)) {
        throw EmbeddingViolation("epsilon must be < 1");
    }
    const CellGrid g = CellGrid::for_spec(spec, n_s, n_phi, options.period_override);
    const cplx phase_s = std::polar(1.0, k.k_s * g.period_s);
    const cplx phase_v = std::polar(1.0, 2.0 * std::numbers::pi * k.n);

    DiscretizedHamiltonian out;
    out.basis = HamiltonianBasis::Grid2D;
    out.k = k;
    out.grid = g;
    out.reduction = options.reduction;
    switch (options.reduction) {
        case GridReduction::None:
            check_dimension(g.size(), options);
            out.matrix = assemble_grid(spec, g, phase_s, phase_v);
            break;
        case GridReduction::HelicalSector:
            check_dimension(g.n_phi, options);
            out.matrix = assemble_sector(spec, g, k.k_s, k.n, phase_v);
            break;
        case GridReduction::TransverseMode:
            check_dimension(g.n_s, options);
            out.matrix = assemble_transverse(spec, g, k.n, phase_s);
            break;
    }
    return out;
}

DiscretizedHamiltonian assemble_perturbed(const HelixSpec& spec, const BlochVector& k, int n_harmonics) {
    if (n_harmonics < 3) {
        throw InvalidSpec("plane-wave basis needs n_harmonics >= 3");
    }
    const int dim = 2 * n_harmonics + 1;
    const double a = spec.spectral_offset();
    DiscretizedHamiltonian out;
    out.basis = HamiltonianBasis::PlaneWaveRay;
    out.k = k;
    out.n_harmonics = n_harmonics;
    out.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    for (int j = -n_harmonics; j <= n_harmonics; ++j) {
        const BlochVector kj = k.shifted(ReciprocalVector::ray(j), spec);
        const CouplingTable table = coupling_coefficients(spec, kj.k_s);
        const int col = j + n_harmonics;
        out.matrix(col, col) = kj.norm_sq(spec) - a + table.diagonal();
        for (int d = -CouplingTable::max_harmonic; d <= CouplingTable::max_harmonic; ++d) {
            const int row = col + d;
            if (d == 0 || row < 0 || row >= dim) continue;
            out.matrix(row, col) = table.at(d);
        }
    }
    return out;
}

SpectrumResult eigensolve(const Eigen::MatrixXcd& H, std::size_t n_lowest, bool keep_vectors) {
    const auto dim = static_cast<std::size_t>(H.rows());
    if (H.rows() != H.cols()) throw InvalidSpec("eigensolve needs a square matrix");
    if (n_lowest > dim) {
        throw InvalidSpec("requested " + std::to_string(n_lowest) + " eigenvalues of a " + std::to_string(dim) +
                          "-dimensional matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) {
        throw ConvergenceFailure("Hermitian eigensolver did not converge (dimension " + std::to_string(dim) + ")");
    }
    SpectrumResult out;
    const Eigen::VectorXd& ev = es.eigenvalues();
    out.matrix_norm = dim == 0 ? 0.0 : std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    const auto count = static_cast<Eigen::Index>(n_lowest);
    const double tolerance = 1e-9 * std::max(out.matrix_norm, std::numeric_limits<double>::min());
    for (Eigen::Index c = 0; c < count; ++c) {
        const Eigen::VectorXcd v = es.eigenvectors().col(c);
        const double residual = (H * v - ev(c) * v).norm();
        if (!(residual <= tolerance)) {
            throw ConvergenceFailure("residual " + std::to_string(residual) + " of eigenpair " + std::to_string(c) +
                                     " exceeds 1e-9 |H| = " + std::to_string(tolerance));
        }
        out.eigenvalues.push_back(ev(c));
        out.residuals.push_back(residual);
    }
    if (keep_vectors) {
        out.eigenvectors = es.eigenvectors().leftCols(count);
    }
    return out;
}

SpectrumResult eigensolve(const DiscretizedHamiltonian& H, std::size_t n_lowest, bool keep_vectors) {
    return eigensolve(H.matrix, n_lowest, keep_vectors);
}

namespace {

std::vector<double> energies_at(const HelixSpec& spec, const BlochVector& k, BandSource source,
                                const SweepOptions& options) {
    switch (source) {
        case BandSource::TwoBand: {
            const TwoBandResult r = two_band_energies(spec, k, options.m);
            return {r.lower, r.upper};
        }
        case BandSource::FirstOrder: {
            std::vector<double> e{first_order_energy(spec, k), first_order_energy(spec, k.shifted(options.m, spec))};
            std::sort(e.begin(), e.end());
            return e;
        }
        case BandSource::OraclePerturbed:
            return eigensolve(assemble_perturbed(spec, k, options.n_harmonics), options.n_bands).eigenvalues;
        case BandSource::OracleFull: {
            FullAssemblyOptions full;
            full.reduction = options.reduction;
            return eigensolve(assemble_full(spec, k, options.n_s, options.n_phi, full), options.n_bands).eigenvalues;
        }
    }
    return {};
}

}  // namespace

BandStructure band_sweep(const HelixSpec& spec, const std::vector<BlochVector>& path, BandSource source,
                         const SweepOptions& options) {
    BandStructure out;
    out.source = source;
    out.path = path;
    out.energies.resize(path.size());
    parallel_for(path.size(), [&](std::size_t p) { out.energies[p] = energies_at(spec, path[p], source, options); });
    return out;
}

double zone_boundary_gap(const HelixSpec& spec, BandSource source, const SweepOptions& options) {
    SweepOptions opts = options;
    opts.n_bands = std::max<std::size_t>(2, opts.n_bands);
    const std::vector<double> e = energies_at(spec, zone_boundary(spec, options.m), source, opts);
    return e[1] - e[0];
}

}  // namespace helitube
