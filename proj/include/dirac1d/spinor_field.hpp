#pragma once

#include <cassert>
#include <complex>
#include <vector>

#include "dirac1d/constants.hpp"
#include "dirac1d/modes.hpp"

namespace dirac1d {

enum class Representation { position, momentum };

/// One two-component spinor field on the lattice. Components are stored
/// contiguously: data[0..N) is the upper component, data[N..2N) the lower, so
/// both can be transformed with one batched FFT.
struct SpinorField {
    Representation repr = Representation::position;
    int n_sites = 0;
    std::vector<std::complex<double>> data;

    SpinorField() = default;
    SpinorField(Representation r, int n) : repr(r), n_sites(n), data(2 * n) {}

    std::complex<double>* comp(int c) { return data.data() + static_cast<std::size_t>(c) * n_sites; }
    const std::complex<double>* comp(int c) const {
        return data.data() + static_cast<std::size_t>(c) * n_sites;
    }

    /// Lattice norm sum_j psi^dag psi * dz.
    double norm_squared(double dz) const {
        double s = 0.0;
        for (const auto& v : data)
            s += std::norm(v);
        return s * dz;
    }
};

/// A batch of spinor fields advanced in lockstep, one column per initial
/// mode. Layout: [column][component][site].
class FieldBlock {
  public:
    FieldBlock() = default;
    FieldBlock(int n_sites, int n_cols)
        : n_sites_(n_sites), n_cols_(n_cols),
          data_(static_cast<std::size_t>(2) * n_sites * n_cols) {}

    int n_sites() const { return n_sites_; }
    int n_cols() const { return n_cols_; }
    std::complex<double>* column(int c) {
        return data_.data() + static_cast<std::size_t>(2) * n_sites_ * c;
    }
    const std::complex<double>* column(int c) const {
        return data_.data() + static_cast<std::size_t>(2) * n_sites_ * c;
    }
    std::complex<double>* data() { return data_.data(); }
    const std::complex<double>* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

  private:
    int n_sites_ = 0;
    int n_cols_ = 0;
    std::vector<std::complex<double>> data_;
};

/// Exact free-evolution coefficients exp(-i h(p) dt) per momentum bin:
///   [[a, b], [b, conj(a)]],  a = cos(E dt) - i (c^2/E) sin(E dt),
///                            b = -i (c p/E) sin(E dt).
/// `scale` folds the 1/N of the unnormalized inverse FFT into the step.
struct KineticTable {
    double dt = 0.0;
    std::vector<std::complex<double>> a;
    std::vector<std::complex<double>> b;

    KineticTable() = default;
    KineticTable(const ModeBasis& basis, double dt_, double scale) : dt(dt_) {
        const int n = basis.num_momenta();
        const double c = basis.constants().c;
        const double c2 = basis.constants().c2();
        a.resize(n);
        b.resize(n);
        for (int bin = 0; bin < n; ++bin) {
            const double e = basis.energy(bin);
            const double cp = c * basis.grid().momentum(bin);
            const double ce = std::cos(e * dt_);
            const double se = std::sin(e * dt_);
            a[bin] = scale * std::complex<double>(ce, -se * c2 / e);
            b[bin] = scale * std::complex<double>(0.0, -se * cp / e);
        }
    }
};

namespace kernel {

/// Multiply both spinor components by the same per-site phase row.
inline void apply_phase(std::complex<double>* field, const std::complex<double>* phase, int n) {
    for (int j = 0; j < n; ++j)
        field[j] *= phase[j];
    for (int j = 0; j < n; ++j)
        field[n + j] *= phase[j];
}

/// Apply the 2x2 momentum-space blocks of a KineticTable (scale included).
inline void apply_kinetic(std::complex<double>* field, const KineticTable& kin, int n) {
    std::complex<double>* x = field;
    std::complex<double>* y = field + n;
    for (int bin = 0; bin < n; ++bin) {
        const std::complex<double> a = kin.a[bin];
        const std::complex<double> b = kin.b[bin];
        const std::complex<double> x0 = x[bin];
        const std::complex<double> y0 = y[bin];
        x[bin] = a * x0 + b * y0;
        y[bin] = b * x0 + std::conj(a) * y0;
    }
}

/// Phase row exp(-i V_j * dt) from sampled potential values.
inline void phase_from_potential(const double* v, double dt, std::complex<double>* out, int n) {
    for (int j = 0; j < n; ++j)
        out[j] = std::polar(1.0, -v[j] * dt);
}

}  // namespace kernel

}  // namespace dirac1d
