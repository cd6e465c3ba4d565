#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "dirac1d/fft.hpp"
#include "dirac1d/modes.hpp"
#include "dirac1d/propagator.hpp"

namespace dirac1d {

struct PairNumberSeries {
    std::vector<double> t;
    std::vector<double> n;
};

/// Electron energy spectrum density dN/dE over uniform bins starting at the
/// gap edge c^2. Both signs of p land in the same |p| bin.
struct EnergySpectrum {
    double bin_width = 0.0;
    double e_min = 0.0;  // lower edge of bin 0
    std::vector<double> density;

    double bin_center(int i) const { return e_min + (i + 0.5) * bin_width; }
    double total_mass() const {
        double s = 0.0;
        for (double d : density)
            s += d;
        return s * bin_width;
    }
};

/// N(t) = sum_p sum_n |U_pn|^2, summed in fixed (column-major) order.
inline double pair_number(const ScatteringMatrix& u) {
    double s = 0.0;
    for (const auto& v : u.a)
        s += std::norm(v);
    return s;
}

/// Per positive mode weight w_p = sum_n |U_pn|^2, FFT-bin order.
inline std::vector<double> mode_weights(const ScatteringMatrix& u) {
    std::vector<double> w(u.n, 0.0);
    for (int col = 0; col < u.n; ++col) {
        const std::complex<double>* ucol = u.column(col);
        for (int b = 0; b < u.n; ++b)
            w[b] += std::norm(ucol[b]);
    }
    return w;
}

/// rho(z) = sum_n |sum_p U_pn W_p(z)|^2: each column is projected back to
/// position space through one inverse transform, then |.|^2-accumulated in
/// column order.
inline std::vector<double> electron_density(const ScatteringMatrix& u, const ModeBasis& basis) {
    const int n = u.n;
    if (n != basis.num_momenta())
        throw std::invalid_argument("electron_density: matrix and basis grids disagree");
    std::vector<double> rho(n, 0.0);
    BatchFft fft(n, 2);
    std::vector<std::complex<double>> buf(2 * n);
    // sum_p U_pn W_p(z_j) = (1/sqrt(L)) * BackwardDFT[ (-1)^b U_b u+(b) ]_j,
    // since exp(i p_b z_j) = (-1)^b exp(2 pi i b j / N) on this lattice.
    const double inv_box = 1.0 / basis.grid().box_length();
    for (int col = 0; col < n; ++col) {
        const std::complex<double>* ucol = u.column(col);
        for (int b = 0; b < n; ++b) {
            const std::complex<double> cb = (b & 1) ? -ucol[b] : ucol[b];
            buf[b] = cb * basis.spinor_component(b, Branch::positive, 0);
            buf[n + b] = cb * basis.spinor_component(b, Branch::positive, 1);
        }
        fft.backward(buf.data());
        for (int j = 0; j < n; ++j)
            rho[j] += (std::norm(buf[j]) + std::norm(buf[n + j])) * inv_box;
    }
    return rho;
}

/// Spectrum of the positive-branch weights; degenerate +-p pairs accumulate
/// into the same energy bin. Reported as a density (divide by bin width).
inline EnergySpectrum energy_spectrum(const ScatteringMatrix& u, const ModeBasis& basis,
                                      double bin_width) {
    if (!(bin_width > 0.0))
        throw std::invalid_argument("energy_spectrum: bin width must be positive");
    const std::vector<double> w = mode_weights(u);
    EnergySpectrum spec;
    spec.bin_width = bin_width;
    spec.e_min = basis.constants().c2();
    double e_max = spec.e_min;
    for (int b = 0; b < u.n; ++b)
        e_max = std::max(e_max, basis.energy(b));
    const int nbins = static_cast<int>(std::floor((e_max - spec.e_min) / bin_width)) + 1;
    spec.density.assign(nbins, 0.0);
    for (int b = 0; b < u.n; ++b) {
        int bin = static_cast<int>((basis.energy(b) - spec.e_min) / bin_width);
        bin = std::min(std::max(bin, 0), nbins - 1);
        spec.density[bin] += w[b] / bin_width;
    }
    return spec;
}

}  // namespace dirac1d
