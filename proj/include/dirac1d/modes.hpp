#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "dirac1d/constants.hpp"
#include "dirac1d/grid.hpp"

namespace dirac1d {

enum class Branch { positive, negative };

/// One field-free eigenstate of h(p) = [[c^2, c p], [c p, -c^2]].
/// Spatial form: amplitude * exp(i p z) / sqrt(L).
struct FreeMode {
    double p = 0.0;
    Branch branch = Branch::positive;
    double energy = 0.0;
    std::array<std::complex<double>, 2> amplitude{};
};

/// Field-free Dirac modes over the momentum lattice, one positive and one
/// negative branch state per momentum. Modes are indexed by FFT bin; the
/// flat mode index puts the positive block first.
///
/// The spinors of this representation are real:
///   u+ = ( E + c^2, c p ) / sqrt(2 E (E + c^2))
///   u- = ( -c p, E + c^2 ) / sqrt(2 E (E + c^2))
class ModeBasis {
  public:
    ModeBasis(const Grid& grid, const Constants& constants)
        : grid_(grid), constants_(constants) {
        const int n = grid_.num_sites();
        const double c = constants_.c;
        const double c2 = constants_.c2();
        energy_.resize(n);
        upos0_.resize(n);
        upos1_.resize(n);
        uneg0_.resize(n);
        uneg1_.resize(n);
        for (int b = 0; b < n; ++b) {
            const double p = grid_.momentum(b);
            const double cp = c * p;
            const double e = std::sqrt(c2 * c2 + cp * cp);
            const double norm = std::sqrt(2.0 * e * (e + c2));
            energy_[b] = e;
            upos0_[b] = (e + c2) / norm;
            upos1_[b] = cp / norm;
            uneg0_[b] = -cp / norm;
            uneg1_[b] = (e + c2) / norm;
        }
    }

    const Grid& grid() const { return grid_; }
    const Constants& constants() const { return constants_; }
    int num_momenta() const { return grid_.num_sites(); }
    int num_modes() const { return 2 * grid_.num_sites(); }

    /// Positive-branch energy E_p = sqrt(c^4 + c^2 p^2) for bin b; the
    /// negative branch sits at -E_p.
    double energy(int bin) const { return energy_[bin]; }

    double spinor_component(int bin, Branch branch, int comp) const {
        if (branch == Branch::positive)
            return comp == 0 ? upos0_[bin] : upos1_[bin];
        return comp == 0 ? uneg0_[bin] : uneg1_[bin];
    }

    FreeMode mode(int bin, Branch branch) const {
        FreeMode m;
        m.p = grid_.momentum(bin);
        m.branch = branch;
        m.energy = branch == Branch::positive ? energy_[bin] : -energy_[bin];
        m.amplitude = {std::complex<double>(spinor_component(bin, branch, 0), 0.0),
                       std::complex<double>(spinor_component(bin, branch, 1), 0.0)};
        return m;
    }

    /// Flat index: positive block [0, N), negative block [N, 2N), bin order.
    int mode_index(int bin, Branch branch) const {
        return branch == Branch::positive ? bin : bin + grid_.num_sites();
    }

    /// Spinor value of the mode at site j, including the plane wave.
    std::array<std::complex<double>, 2> spatial_value(int bin, Branch branch, int j) const {
        const double p = grid_.momentum(bin);
        const double z = grid_.site(j);
        const std::complex<double> wave =
            std::polar(1.0 / std::sqrt(grid_.box_length()), p * z);
        return {spinor_component(bin, branch, 0) * wave,
                spinor_component(bin, branch, 1) * wave};
    }

  private:
    Grid grid_;
    Constants constants_;
    std::vector<double> energy_;
    std::vector<double> upos0_, upos1_, uneg0_, uneg1_;
};

inline ModeBasis build_basis(const Grid& grid, const Constants& constants) {
    return ModeBasis(grid, constants);
}

}  // namespace dirac1d
