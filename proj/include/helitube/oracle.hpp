#pragma once

// Brute-force reference spectra.
//
// Two independent Hamiltonians are built and diagonalized densely:
//  - the unexpanded transformed operator -d_s(h^-2 d_s) - d_vv + V_eff,
//    discretized with second-order flux-form finite differences on the unit
//    cell with Bloch phases across both seams;
//  - the first-order central equation in the plane-wave basis along the K1 ray.

#include "helitube/bloch.hpp"
#include "helitube/field.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <vector>

namespace helitube {

enum class HamiltonianBasis { Grid2D, PlaneWaveRay };

/// How the 2D grid problem is reduced before diagonalization.
enum class GridReduction {
    /// Whole grid, dimension n_s * n_phi.
    None,
    /// Exact block of the helical family of k. The grid operator commutes with
    /// the shift (i, j) -> (i + 1, j + sign(tau) n_phi / n_s), so the grid
    /// spectrum is the union of n_s blocks of dimension n_phi. Needs
    /// n_phi % n_s == 0.
    HelicalSector,
    /// Galerkin projection onto the single transverse mode exp(i n phi);
    /// exact only for kappa = 0. Dimension n_s.
    TransverseMode,
};

struct FullAssemblyOptions {
    GridReduction reduction = GridReduction::HelicalSector;
    std::size_t max_dimension = 4096;
    /// Required when tau = 0.
    std::optional<double> period_override;
};

struct DiscretizedHamiltonian {
    Eigen::MatrixXcd matrix;
    HamiltonianBasis basis = HamiltonianBasis::Grid2D;
    BlochVector k;
    /// Grid metadata (Grid2D only).
    std::optional<CellGrid> grid;
    GridReduction reduction = GridReduction::None;
    /// Ray harmonics retained (PlaneWaveRay only).
    int n_harmonics = 0;

    std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
    /// max |H - H^dagger| / max |H|.
    double relative_asymmetry() const;
};

/// Flux-form discretization of -d_s(h^-2 d_s) - d_vv + V_eff. h^-2 is sampled
/// at link midpoints. Phases exp(i k_s P_s) and exp(2 pi i n) enter only on
/// seam-crossing links. Throws EmbeddingViolation for eps >= 1 (via HelixSpec),
/// DimensionLimit above options.max_dimension.
DiscretizedHamiltonian assemble_full(const HelixSpec& spec, const BlochVector& k, std::size_t n_s,
                                     std::size_t n_phi, const FullAssemblyOptions& options = {});

/// Central equation in the basis k + j K1, j = -n_harmonics..n_harmonics:
/// diagonal |k + j K1|^2 - a + V(0), couplings V((j'-j) K1; k_s + j tau).
DiscretizedHamiltonian assemble_perturbed(const HelixSpec& spec, const BlochVector& k, int n_harmonics);

struct SpectrumResult {
    std::vector<double> eigenvalues;
    /// Columns are eigenvectors of the reported eigenvalues (if requested).
    std::optional<Eigen::MatrixXcd> eigenvectors;
    std::vector<double> residuals;
    /// Spectral norm of H, the residual scale.
    double matrix_norm = 0.0;
    /// Sweep count of the backend; 0 when the backend does not report one.
    std::size_t iterations = 0;
};

/// Lowest `n_lowest` eigenpairs of a Hermitian matrix, ascending. Every
/// reported pair satisfies |H v - E v| <= 1e-9 |H|, else ConvergenceFailure.
SpectrumResult eigensolve(const DiscretizedHamiltonian& H, std::size_t n_lowest, bool keep_vectors = false);
SpectrumResult eigensolve(const Eigen::MatrixXcd& H, std::size_t n_lowest, bool keep_vectors = false);

struct SweepOptions {
    std::size_t n_bands = 2;
    std::size_t n_s = 64;
    std::size_t n_phi = 64;
    int n_harmonics = 7;
    ReciprocalVector m = ReciprocalVector::ray(1);
    GridReduction reduction = GridReduction::HelicalSector;
};

/// Lowest bands along `path` for one source. TWO_BAND and FIRST_ORDER give the
/// pair (k, k + K_m); the oracle sources give the lowest n_bands eigenvalues.
BandStructure band_sweep(const HelixSpec& spec, const std::vector<BlochVector>& path, BandSource source,
                         const SweepOptions& options = {});

/// E_2 - E_1 at -K1/2 for `source`.
double zone_boundary_gap(const HelixSpec& spec, BandSource source, const SweepOptions& options = {});

}  // namespace helitube
