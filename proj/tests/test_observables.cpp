#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "dirac1d/modes.hpp"
#include "dirac1d/observables.hpp"

using namespace dirac1d;
using cd = std::complex<double>;

namespace {
const Constants kConsts;

ScatteringMatrix pseudo_random_matrix(int n, unsigned seed, double scale) {
    ScatteringMatrix u(n);
    std::uint64_t s = 0x2545f4914f6cdd1dull + seed;
    auto next = [&s] {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return 2.0 * (static_cast<double>(s % 1000003ull) / 1000003.0) - 1.0;
    };
    for (auto& v : u.a)
        v = scale * cd(next(), next());
    return u;
}
}  // namespace

TEST_CASE("pair number: zero matrix and a single entry") {
    ScatteringMatrix u(16);
    CHECK(pair_number(u) == 0.0);
    u.at(3, 7) = cd(0.5, 0.0);  // |U|^2 = 0.25
    CHECK(pair_number(u) == Catch::Approx(0.25));
}

TEST_CASE("electron density: zero matrix and the Parseval identity") {
    const ModeBasis basis = build_basis(make_grid(2.0, 32), kConsts);

    ScatteringMatrix zero(32);
    const auto rho0 = electron_density(zero, basis);
    for (double r : rho0)
        CHECK(r == 0.0);

    const ScatteringMatrix u = pseudo_random_matrix(32, 11, 0.05);
    const auto rho = electron_density(u, basis);
    double integral = 0.0;
    for (double r : rho) {
        CHECK(r >= 0.0);
        integral += r;
    }
    integral *= basis.grid().dz();
    const double n = pair_number(u);
    CHECK(std::abs(integral - n) <= 1e-8 * n);
}

TEST_CASE("energy spectrum: mass matches the pair number, +-p share bins") {
    const ModeBasis basis = build_basis(make_grid(2.0, 64), kConsts);

    ScatteringMatrix zero(64);
    const auto s0 = energy_spectrum(zero, basis, 0.02 * kConsts.c2());
    for (double d : s0.density)
        CHECK(d == 0.0);

    const ScatteringMatrix u = pseudo_random_matrix(64, 12, 0.03);
    const auto spec = energy_spectrum(u, basis, 0.02 * kConsts.c2());
    const double n = pair_number(u);
    CHECK(std::abs(spec.total_mass() - n) <= 1e-6 * n);

    // A matrix supported on the +-p row pair accumulates into one bin.
    ScatteringMatrix pm(64);
    pm.at(5, 0) = cd(0.6, 0.0);
    pm.at(64 - 5, 1) = cd(0.0, 0.6);
    const auto spec2 = energy_spectrum(pm, basis, 0.02 * kConsts.c2());
    int populated = 0;
    for (double d : spec2.density)
        if (d > 0.0)
            ++populated;
    CHECK(populated == 1);
    CHECK(spec2.total_mass() == Catch::Approx(0.72));
}

TEST_CASE("zeroing a column never increases the pair number") {
    const ScatteringMatrix u = pseudo_random_matrix(24, 13, 0.1);
    const double full = pair_number(u);
    for (int col = 0; col < u.n; ++col) {
        ScatteringMatrix masked = u;
        for (int row = 0; row < u.n; ++row)
            masked.at(row, col) = cd(0.0, 0.0);
        CHECK(pair_number(masked) <= full);
    }
}

TEST_CASE("mode weights sum the squared column entries") {
    const ScatteringMatrix u = pseudo_random_matrix(16, 14, 0.2);
    const auto w = mode_weights(u);
    double total = 0.0;
    for (double x : w)
        total += x;
    CHECK(total == Catch::Approx(pair_number(u)));
}
