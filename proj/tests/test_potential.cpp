#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dirac1d/constants.hpp"
#include "dirac1d/grid.hpp"
#include "dirac1d/potential.hpp"

using namespace dirac1d;

namespace {
const Constants kConsts;
const double kC2 = kConsts.c2();
const double kLc = kConsts.compton_wavelength();

CombinedPotential fig1_potential() {
    CombinedPotential pot;
    pot.static_depth = 1.47 * kC2;
    pot.osc_amplitude = 1.47 * kC2;
    pot.shape = {10.0 * kLc, 0.3 * kLc};
    pot.envelope = {5.0 / kC2, 40.0 * std::numbers::pi / kC2};
    pot.drive = {0.5 * kC2, 0.0, 0.2 * kC2, 5.0 / kC2, 40.0 * std::numbers::pi / kC2};
    return pot;
}
}  // namespace

TEST_CASE("sauter shape saturates, is negative-unit deep and even") {
    const SauterShape s{10.0 * kLc, 0.3 * kLc};
    CHECK(sauter_shape(1e6, s) == 0.0);
    CHECK(sauter_shape(-1e6, s) == 0.0);
    // Independent closed form at the center: -tanh(D / 2W).
    CHECK(sauter_shape(0.0, s) ==
          Catch::Approx(-std::tanh(s.well_width / (2.0 * s.edge_width))).margin(1e-15));
    CHECK(sauter_shape(0.0, s) == Catch::Approx(-1.0).margin(1e-10));
    // Half depth at the edge when D >> W.
    CHECK(sauter_shape(0.5 * s.well_width, s) == Catch::Approx(-0.5).margin(1e-10));
    for (double z : {0.013, 0.2, 0.5, 1.0}) {
        CHECK(sauter_shape(z, s) == sauter_shape(-z, s));
        CHECK(sauter_shape(z, s) <= 0.0);
        CHECK(sauter_shape(z, s) >= -1.0);
    }
}

TEST_CASE("envelope hits its junction values") {
    const Envelope env{5.0 / kC2, 40.0 * std::numbers::pi / kC2};
    const double t0 = env.ramp, t1 = env.plateau;
    CHECK(envelope_value(0.0, env) == 0.0);
    CHECK(envelope_value(t0, env) == Catch::Approx(1.0));
    CHECK(envelope_value(t0 + t1, env) == Catch::Approx(1.0));
    CHECK(envelope_value(2.0 * t0 + t1, env) == Catch::Approx(0.0).margin(1e-12));
    CHECK(envelope_value(t0 / 3.0, env) == Catch::Approx(0.5));
    CHECK(envelope_value(-1.0, env) == 0.0);
    CHECK(envelope_value(2.0 * t0 + t1 + 1e-9, env) == 0.0);
}

TEST_CASE("envelope is continuous at the junctions") {
    const Envelope env{5.0 / kC2, 40.0 * std::numbers::pi / kC2};
    const double eps = 1e-9;
    for (double tj : {0.0, env.ramp, env.ramp + env.plateau, 2.0 * env.ramp + env.plateau}) {
        const double jump =
            std::abs(envelope_value(tj + eps, env) - envelope_value(tj - eps, env));
        CHECK(jump < 1e-4);  // |f'| <= pi/(2 t0) ~ 6e3, so eps * slope ~ 6e-6
    }
}

TEST_CASE("instantaneous frequency follows the FM law") {
    const FMDrive d{1.5 * kC2, 0.05 * kC2, 0.2 * kC2, 5.0 / kC2, 1.0};
    CHECK(instantaneous_frequency(d.start, d) == Catch::Approx(d.omega0));
    CHECK(instantaneous_frequency(d.start + 0.5 * std::numbers::pi / d.mod_rate, d) ==
          Catch::Approx(d.omega0 + d.delta_omega));
    const FMDrive plain{1.5 * kC2, 0.0, 0.2 * kC2, 0.0, 1.0};
    for (double t : {0.0, 0.3, 0.9})
        CHECK(instantaneous_frequency(t, plain) == plain.omega0);
}

TEST_CASE("drive signal is windowed and reduces to a pure tone") {
    const double t0 = 5.0 / kC2;
    const double t1 = 40.0 * std::numbers::pi / kC2;
    const FMDrive fm{0.5 * kC2, 0.0, 0.2 * kC2, t0, t1};
    CHECK(drive_signal(0.5 * t0, fm) == 0.0);
    CHECK(drive_signal(t0, fm) == 0.0);  // open window
    CHECK(drive_signal(t0 + t1, fm) == 0.0);
    CHECK(drive_signal(t0 + t1 + 1e-6, fm) == 0.0);
    for (int i = 1; i < 40; ++i) {
        const double t = t0 + i * (t1 / 40.0);
        CHECK(drive_signal(t, fm) == std::sin(fm.omega0 * t));
    }
}

TEST_CASE("combined potential superposes its two terms") {
    CombinedPotential pot = fig1_potential();
    const double t0 = pot.envelope.ramp;

    SECTION("zero amplitudes give zero") {
        CombinedPotential off = pot;
        off.static_depth = 0.0;
        off.osc_amplitude = 0.0;
        for (double z : {-0.4, 0.0, 0.02})
            for (double t : {0.0, t0, 3.0 * t0})
                CHECK(potential_at(z, t, off) == 0.0);
    }

    SECTION("static well bottom at full ramp") {
        CombinedPotential stat = pot;
        stat.osc_amplitude = 0.0;
        CHECK(potential_at(0.0, t0, stat) == Catch::Approx(-1.47 * kC2).epsilon(1e-9));
    }

    SECTION("pure oscillating term when V1 = 0") {
        CombinedPotential osc = pot;
        osc.static_depth = 0.0;
        const double t = t0 + 0.37 * pot.drive.duration;
        for (double z : {-0.05, 0.0, 0.013}) {
            const double expect =
                osc.osc_amplitude * drive_signal(t, osc.drive) * sauter_shape(z, osc.shape);
            CHECK(potential_at(z, t, osc) == Catch::Approx(expect));
        }
    }

    SECTION("linear in V1 and V2 separately") {
        const double z = 0.011, t = t0 + 0.21 * pot.drive.duration;
        CombinedPotential only1 = pot, only2 = pot;
        only1.osc_amplitude = 0.0;
        only2.static_depth = 0.0;
        CHECK(potential_at(z, t, pot) ==
              Catch::Approx(potential_at(z, t, only1) + potential_at(z, t, only2)));
        CombinedPotential doubled = pot;
        doubled.static_depth *= 2.0;
        CHECK(potential_at(z, t, doubled) - potential_at(z, t, pot) ==
              Catch::Approx(potential_at(z, t, only1)));
    }
}

TEST_CASE("combined potential field matches the pointwise formula") {
    const Grid g = make_grid(2.0, 64);
    const CombinedPotential pot = fig1_potential();
    const CombinedPotentialField field(g, pot);
    std::vector<double> row(g.num_sites());
    const double t = pot.envelope.ramp + 0.11 * pot.drive.duration;
    field.sample(t, row);
    for (int j = 0; j < g.num_sites(); ++j)
        CHECK(row[j] == Catch::Approx(potential_at(g.site(j), t, pot)).margin(1e-18));
}
