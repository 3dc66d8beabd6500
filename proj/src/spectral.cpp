#include "helitube/spectral.hpp"

#include "helitube/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace helitube {

long signed_frequency(std::size_t m, std::size_t n) {
    return m <= n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

SpectralDifferentiator::SpectralDifferentiator(const CellGrid& grid) : grid_(grid) {
    if (grid.n_s < 2 || grid.n_phi < 2) {
        throw GridMismatch("spectral differentiation needs at least 2 nodes per direction");
    }
}

namespace {

// Multiplier for derivative `order` of bin m on an n-point grid of period P.
cplx derivative_symbol(std::size_t m, std::size_t n, double period, int order) {
    const bool nyquist = (n % 2 == 0) && (m == n / 2);
    const double k = 2.0 * std::numbers::pi / period * static_cast<double>(signed_frequency(m, n));
    if (order == 1) {
        return nyquist ? cplx(0.0, 0.0) : cplx(0.0, k);
    }
    return cplx(-k * k, 0.0);
}

}  // namespace

ComplexGrid SpectralDifferentiator::apply(const ComplexGrid& f, Axis axis, int order) const {
    if (f.size() != grid_.size()) {
        throw GridMismatch("field size does not match grid");
    }
    Eigen::FFT<double> fft;
    ComplexGrid out(f.size());
    const std::size_t ns = grid_.n_s;
    const std::size_t nv = grid_.n_phi;
    if (axis == Axis::Varphi) {
        std::vector<cplx> line(nv), spec(nv);
        for (std::size_t i = 0; i < ns; ++i) {
            for (std::size_t j = 0; j < nv; ++j) line[j] = f[grid_.index(i, j)];
            fft.fwd(spec, line);
            for (std::size_t m = 0; m < nv; ++m) spec[m] *= derivative_symbol(m, nv, grid_.period_varphi, order);
            fft.inv(line, spec);
            for (std::size_t j = 0; j < nv; ++j) out[grid_.index(i, j)] = line[j];
        }
    } else {
        std::vector<cplx> line(ns), spec(ns);
        for (std::size_t j = 0; j < nv; ++j) {
            for (std::size_t i = 0; i < ns; ++i) line[i] = f[grid_.index(i, j)];
            fft.fwd(spec, line);
            for (std::size_t m = 0; m < ns; ++m) spec[m] *= derivative_symbol(m, ns, grid_.period_s, order);
            fft.inv(line, spec);
            for (std::size_t i = 0; i < ns; ++i) out[grid_.index(i, j)] = line[i];
        }
    }
    return out;
}

ComplexGrid SpectralDifferentiator::fourier_coefficients(const ComplexGrid& f) const {
    if (f.size() != grid_.size()) {
        throw GridMismatch("field size does not match grid");
    }
    Eigen::FFT<double> fft;
    const std::size_t ns = grid_.n_s;
    const std::size_t nv = grid_.n_phi;
    ComplexGrid tmp(f.size());
    std::vector<cplx> line(nv), spec(nv);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nv; ++j) line[j] = f[grid_.index(i, j)];
        fft.fwd(spec, line);
        for (std::size_t m = 0; m < nv; ++m) tmp[grid_.index(i, m)] = spec[m];
    }
    ComplexGrid out(f.size());
    std::vector<cplx> col(ns), cspec(ns);
    const double scale = 1.0 / static_cast<double>(ns * nv);
    for (std::size_t m = 0; m < nv; ++m) {
        for (std::size_t i = 0; i < ns; ++i) col[i] = tmp[grid_.index(i, m)];
        fft.fwd(cspec, col);
        for (std::size_t i = 0; i < ns; ++i) out[grid_.index(i, m)] = cspec[i] * scale;
    }
    return out;
}

}  // namespace helitube
