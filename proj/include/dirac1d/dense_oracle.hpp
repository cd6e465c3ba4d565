#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "dirac1d/linalg.hpp"
#include "dirac1d/modes.hpp"
#include "dirac1d/potential.hpp"

namespace dirac1d {

/// Dense 2N x 2N Hamiltonian with V frozen at time t. State index c*N + j
/// (component-major), matching the SpinorField layout. The kinetic block is
/// circulant in j - j'; its off-diagonal spinor part comes from one inverse
/// DFT of the momentum sequence.
inline CMatrix dense_hamiltonian(const ModeBasis& basis, const PotentialField& pot, double t) {
    const int n = basis.grid().num_sites();
    const double c2 = basis.constants().c2();
    const double cc = basis.constants().c;
    std::vector<std::complex<double>> gp(n);
    for (int d = 0; d < n; ++d) {
        std::complex<double> s(0.0, 0.0);
        for (int b = 0; b < n; ++b)
            s += basis.grid().momentum(b) *
                 std::polar(1.0, 2.0 * std::numbers::pi * b * d / n);
        gp[d] = s * (cc / n);
    }
    std::vector<double> v(n);
    pot.sample(t, std::span<double>(v));
    CMatrix h(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        h(j, j) = c2 + v[j];
        h(n + j, n + j) = -c2 + v[j];
        for (int jp = 0; jp < n; ++jp) {
            const int d = (j - jp + n) % n;
            h(j, n + jp) = gp[d];
            h(n + j, jp) = gp[d];
        }
    }
    return h;
}

/// Brute-force reference propagator: time-ordered product of exact
/// exponentials of the midpoint-frozen Hamiltonian over fine substeps.
/// Returns the full 2N x 2N unitary in the site basis. Small grids only.
inline CMatrix dense_oracle_evolve(const ModeBasis& basis, const PotentialField& pot,
                                   double t_end, long n_substeps) {
    const int n = basis.grid().num_sites();
    if (n > 64)
        throw std::invalid_argument("dense_oracle_evolve: grid too large (N_z > 64)");
    if (n_substeps < 1)
        throw std::invalid_argument("dense_oracle_evolve: need at least one substep");
    const double delta = t_end / n_substeps;
    const int dim = 2 * n;
    CMatrix u(dim, dim);
    for (int i = 0; i < dim; ++i)
        u(i, i) = 1.0;
    for (long s = 0; s < n_substeps; ++s) {
        const double mid = (s + 0.5) * delta;
        CMatrix h = dense_hamiltonian(basis, pot, mid);
        const std::vector<double> w = hermitian_eigensystem(h);
        CMatrix phased(dim, dim);
        for (int j = 0; j < dim; ++j) {
            const std::complex<double> ph = std::polar(1.0, -w[j] * delta);
            for (int i = 0; i < dim; ++i)
                phased(i, j) = h(i, j) * ph;
        }
        const CMatrix expm = matmul_adjoint_right(phased, h);
        u = matmul(expm, u);
    }
    return u;
}

/// Oracle with the leading O(delta^2) bias of the frozen-midpoint product
/// cancelled by Richardson extrapolation across a substep halving. The
/// result is unitary to O(delta^4), which is far below every comparison
/// tolerance used against it.
inline CMatrix dense_oracle_extrapolated(const ModeBasis& basis, const PotentialField& pot,
                                         double t_end, long n_substeps) {
    const CMatrix coarse = dense_oracle_evolve(basis, pot, t_end, n_substeps);
    const CMatrix fine = dense_oracle_evolve(basis, pot, t_end, 2 * n_substeps);
    CMatrix out(coarse.rows(), coarse.cols());
    for (int j = 0; j < out.cols(); ++j)
        for (int i = 0; i < out.rows(); ++i)
            out(i, j) = (4.0 * fine(i, j) - coarse(i, j)) / 3.0;
    return out;
}

/// Columns are the field-free modes' spatial samples (flat mode order:
/// positive block then negative block).
inline CMatrix mode_matrix(const ModeBasis& basis) {
    const int n = basis.grid().num_sites();
    CMatrix w(2 * n, 2 * n);
    for (Branch branch : {Branch::positive, Branch::negative})
        for (int bin = 0; bin < n; ++bin) {
            const int m = basis.mode_index(bin, branch);
            for (int j = 0; j < n; ++j) {
                const auto val = basis.spatial_value(bin, branch, j);
                w(j, m) = val[0];
                w(n + j, m) = val[1];
            }
        }
    return w;
}

/// Mode-basis matrix elements <mode_row| U |mode_col> of a site-basis
/// unitary under the lattice inner product (one factor of dz). Row/column
/// order matches ModeBasis::mode_index.
inline CMatrix oracle_mode_overlaps(const ModeBasis& basis, const CMatrix& u_sites) {
    CMatrix w = mode_matrix(basis);
    CMatrix uw = matmul(u_sites, w);
    CMatrix m = matmul_adjoint_left(w, uw);
    const double dz = basis.grid().dz();
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            m(i, j) *= dz;
    return m;
}

}  // namespace dirac1d
