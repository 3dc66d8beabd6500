#pragma once

#include "helitube/field.hpp"

#include <complex>
#include <vector>

namespace helitube {

using cplx = std::complex<double>;
using ComplexGrid = std::vector<cplx>;

/// Trigonometric differentiation on a periodic CellGrid.
///
/// Exact on grid-representable Fourier modes. The Nyquist mode of an even
/// grid is dropped by first derivatives (keeping D anti-Hermitian) and kept by
/// second derivatives.
class SpectralDifferentiator {
public:
    explicit SpectralDifferentiator(const CellGrid& grid);

    const CellGrid& grid() const { return grid_; }

    ComplexGrid d_s(const ComplexGrid& f) const { return apply(f, Axis::S, 1); }
    ComplexGrid d_ss(const ComplexGrid& f) const { return apply(f, Axis::S, 2); }
    ComplexGrid d_v(const ComplexGrid& f) const { return apply(f, Axis::Varphi, 1); }
    ComplexGrid d_vv(const ComplexGrid& f) const { return apply(f, Axis::Varphi, 2); }

    /// 2D discrete Fourier coefficients c(m_s, m_phi), normalized so that
    /// f = sum c exp(i (2 pi m_s s / P_s + 2 pi m_phi (varphi - varphi_0) / P_v)).
    /// Index layout matches the field (row = m_s mod n_s).
    ComplexGrid fourier_coefficients(const ComplexGrid& f) const;

private:
    enum class Axis { S, Varphi };
    ComplexGrid apply(const ComplexGrid& f, Axis axis, int order) const;

    CellGrid grid_;
};

/// Signed frequency of FFT bin m on an n-point grid: m for m <= n/2, m - n otherwise.
long signed_frequency(std::size_t m, std::size_t n);

}  // namespace helitube
