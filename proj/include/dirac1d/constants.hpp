#pragma once

namespace dirac1d {

/// Atomic units: hbar = e = m_e = 1. Energies are usually quoted in units of
/// c^2 (the electron rest energy) and lengths in Compton wavelengths 1/c.
struct Constants {
    double c = 137.035999;  // speed of light (a.u.)

    double c2() const { return c * c; }
    double compton_wavelength() const { return 1.0 / c; }
};

}  // namespace dirac1d
