#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "dirac1d/checkpoint.hpp"
#include "dirac1d/dense_oracle.hpp"
#include "dirac1d/modes.hpp"
#include "dirac1d/observables.hpp"
#include "dirac1d/potential.hpp"
#include "dirac1d/propagator.hpp"

using namespace dirac1d;
using cd = std::complex<double>;

namespace {
const Constants kConsts;
const double kC2 = kConsts.c2();

// Deterministic filler, so tests need no RNG machinery.
SpinorField pseudo_random_field(int n, unsigned seed) {
    SpinorField f(Representation::position, n);
    std::uint64_t s = 0x9e3779b97f4a7c15ull + seed;
    auto next = [&s] {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return 2.0 * (static_cast<double>(s % 1000003ull) / 1000003.0) - 1.0;
    };
    for (auto& v : f.data)
        v = cd(next(), next());
    double norm = 0.0;
    for (auto& v : f.data)
        norm += std::norm(v);
    for (auto& v : f.data)
        v /= std::sqrt(norm);
    return f;
}

// Fixed smooth z-periodic potential bounded by ~1.5 c^2.
double smooth_test_potential(double z, double t) {
    const double wz = 2.0 * std::numbers::pi / 2.0;
    return kC2 * (std::sin(wz * z + 0.7) * std::cos(1.1 * kC2 * t + 0.3) +
                  0.5 * std::cos(2.0 * wz * z) * std::sin(0.62 * kC2 * t));
}

double max_elementwise_deviation(const ScatteringMatrix& u, const CMatrix& oracle_modes,
                                 const ModeBasis& basis) {
    const int n = basis.num_momenta();
    double worst = 0.0;
    for (int col = 0; col < n; ++col)
        for (int row = 0; row < n; ++row) {
            const cd ours = u.at(row, col);
            const cd ref = oracle_modes(basis.mode_index(row, Branch::positive),
                                        basis.mode_index(col, Branch::negative));
            worst = std::max(worst, std::abs(ours - ref));
        }
    return worst;
}
}  // namespace

TEST_CASE("kinetic step: identity at dt = 0 and p = 0 phases") {
    const ModeBasis basis = build_basis(make_grid(2.0, 32), kConsts);
    SpinorField f = pseudo_random_field(32, 1);
    f.repr = Representation::momentum;
    SpinorField g = f;
    kinetic_half_step(g, basis, 0.0);
    for (int i = 0; i < 64; ++i)
        CHECK(g.data[i] == f.data[i]);

    const double dt = 3e-7;
    SpinorField h = f;
    kinetic_half_step(h, basis, dt);
    // Bin 0 is p = 0: diag(exp(-i c^2 dt), exp(+i c^2 dt)).
    CHECK(std::abs(h.comp(0)[0] - f.comp(0)[0] * std::polar(1.0, -kC2 * dt)) < 1e-15);
    CHECK(std::abs(h.comp(1)[0] - f.comp(1)[0] * std::polar(1.0, +kC2 * dt)) < 1e-15);
}

TEST_CASE("kinetic step preserves the norm") {
    const Grid g = make_grid(2.0, 64);
    const ModeBasis basis = build_basis(g, kConsts);
    SpinorField f = pseudo_random_field(64, 2);
    f.repr = Representation::momentum;
    const double before = f.norm_squared(g.dz());
    kinetic_half_step(f, basis, 7.7e-6);
    CHECK(std::abs(f.norm_squared(g.dz()) - before) < 1e-14);
}

TEST_CASE("potential phase step: identity, global phase, norm") {
    const Grid g = make_grid(2.0, 64);
    const ModeBasis basis = build_basis(g, kConsts);

    SECTION("V = 0 leaves the field bitwise unchanged") {
        const CallbackPotentialField zero(g, [](double, double) { return 0.0; });
        SpinorField f = pseudo_random_field(64, 3);
        SpinorField before = f;
        potential_phase_step(f, 0.1, 1e-6, zero);
        for (std::size_t i = 0; i < f.data.size(); ++i)
            CHECK(f.data[i] == before.data[i]);
    }

    SECTION("constant V = c^2 is a global phase") {
        const CallbackPotentialField flat(g, [](double, double) { return kC2; });
        SpinorField f = pseudo_random_field(64, 4);
        SpinorField before = f;
        const double dt = 2.5e-6;
        potential_phase_step(f, 0.0, dt, flat);
        const cd phase = std::polar(1.0, -kC2 * dt);
        for (std::size_t i = 0; i < f.data.size(); ++i) {
            CHECK(std::abs(f.data[i] - before.data[i] * phase) < 1e-15);
            CHECK(std::abs(std::abs(f.data[i]) - std::abs(before.data[i])) < 1e-16);
        }
    }

    SECTION("norm preserved for an arbitrary sampled potential") {
        const CallbackPotentialField v(g, smooth_test_potential);
        SpinorField f = pseudo_random_field(64, 5);
        const double before = f.norm_squared(g.dz());
        potential_phase_step(f, 3e-4, 4e-6, v);
        CHECK(std::abs(f.norm_squared(g.dz()) - before) < 1e-14);
    }
}

TEST_CASE("split step with V = 0 equals the pure kinetic path bitwise") {
    const Grid g = make_grid(2.0, 32);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField zero(g, [](double, double) { return 0.0; });
    const double dt = 1e-6;
    SpinorField f = pseudo_random_field(32, 6);
    SpinorField ref = f;

    BatchFft fft(32, 2);
    split_step(f, 0.0, dt, zero, basis, fft);

    fft.forward(ref.data.data());
    KineticTable kin(basis, dt, 1.0 / 32);
    kernel::apply_kinetic(ref.data.data(), kin, 32);
    fft.backward(ref.data.data());
    for (std::size_t i = 0; i < f.data.size(); ++i)
        CHECK(f.data[i] == ref.data[i]);
}

TEST_CASE("split step: 1000 steps keep the norm to 1e-12") {
    const Grid g = make_grid(2.0, 64);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField v(g, smooth_test_potential);
    SpinorField f = pseudo_random_field(64, 7);
    const double before = f.norm_squared(g.dz());
    BatchFft fft(64, 2);
    const double dt = 1e-8;
    for (int s = 0; s < 1000; ++s)
        split_step(f, s * dt, dt, v, basis, fft);
    CHECK(std::abs(f.norm_squared(g.dz()) - before) < 1e-12);
}

TEST_CASE("dense oracle: free evolution matches the kinetic step") {
    const Grid g = make_grid(2.0, 16);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField zero(g, [](double, double) { return 0.0; });
    const double t_end = 5.0 / kC2;
    const CMatrix u = dense_oracle_evolve(basis, zero, t_end, 64);
    const CMatrix m = oracle_mode_overlaps(basis, u);
    // Diagonal in modes with phases exp(-i E t); off-branch entries vanish.
    for (int a = 0; a < m.rows(); ++a) {
        const int n = g.num_sites();
        const double e = a < n ? basis.energy(a) : -basis.energy(a - n);
        CHECK(std::abs(m(a, a) - std::polar(1.0, -e * t_end)) < 1e-9);
        for (int b = 0; b < m.cols(); ++b)
            if (a != b)
                CHECK(std::abs(m(a, b)) < 1e-10);
    }
}

TEST_CASE("dense oracle converges at second order in its substep") {
    const Grid g = make_grid(2.0, 16);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField v(g, smooth_test_potential);
    const double t_end = 4.0 / kC2;
    auto diff = [](const CMatrix& a, const CMatrix& b) {
        double worst = 0.0;
        for (int j = 0; j < a.cols(); ++j)
            for (int i = 0; i < a.rows(); ++i)
                worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
        return worst;
    };
    const CMatrix u1 = dense_oracle_evolve(basis, v, t_end, 1024);
    const CMatrix u2 = dense_oracle_evolve(basis, v, t_end, 2048);
    const CMatrix u3 = dense_oracle_evolve(basis, v, t_end, 4096);
    const double d12 = diff(u1, u2);
    const double d23 = diff(u2, u3);
    INFO("d12=" << d12 << " d23=" << d23);
    CHECK(d12 < 1e-5);
    CHECK(d12 / d23 > 3.0);
    CHECK(d12 / d23 < 5.5);
    CHECK_THROWS_AS(dense_oracle_evolve(build_basis(make_grid(2.0, 128), kConsts), v, 1.0, 4),
                    std::invalid_argument);
}

TEST_CASE("split-operator matrix matches the dense oracle at second order") {
    const Grid g = make_grid(2.0, 32);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField v(g, smooth_test_potential);
    const double t_end = 20.0 / kC2;

    const CMatrix oracle = dense_oracle_extrapolated(basis, v, t_end, 8192);
    const CMatrix modes = oracle_mode_overlaps(basis, oracle);

    auto run_split = [&](long steps) {
        EvolutionConfig cfg;
        cfg.dt = t_end / steps;
        cfg.t_end = t_end;
        cfg.record_times = {t_end};
        cfg.workers = 2;
        const auto series = evolve_scattering_matrix(basis, v, cfg);
        REQUIRE(series.size() == 1);
        return max_elementwise_deviation(series[0], modes, basis);
    };

    const double err_coarse = run_split(8192);
    const double err_fine = run_split(16384);
    INFO("coarse=" << err_coarse << " fine=" << err_fine
                   << " ratio=" << err_coarse / err_fine);
    CHECK(err_coarse < 1e-6);
    const double ratio = err_coarse / err_fine;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("free evolution creates no pairs") {
    const Grid g = make_grid(2.0, 64);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField zero(g, [](double, double) { return 0.0; });
    EvolutionConfig cfg;
    cfg.dt = 1e-7;
    cfg.t_end = 100.0 / kC2;
    cfg.record_times = {0.0, 30.0 / kC2, 100.0 / kC2};
    const auto series = evolve_scattering_matrix(basis, zero, cfg);
    REQUIRE(series.size() == 3);
    for (const auto& u : series)
        CHECK(pair_number(u) < 1e-10);
}

TEST_CASE("scattering matrix run: unitarity, symmetry, determinism") {
    const Grid g = make_grid(2.0, 48);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField v(g, smooth_test_potential);

    struct Capture final : RecordSink {
        std::vector<ScatteringMatrix> mats;
        std::vector<std::vector<double>> seas, deficits;
        void on_record(const RecordView& view) override {
            mats.push_back(view.matrix);
            seas.emplace_back(view.sea_colsum.begin(), view.sea_colsum.end());
            deficits.emplace_back(view.unit_deficit.begin(), view.unit_deficit.end());
        }
    };

    EvolutionConfig cfg;
    cfg.dt = 2e-7;
    cfg.t_end = 10.0 / kC2;
    cfg.record_times = {0.0, 4.0 / kC2, 10.0 / kC2};
    cfg.workers = 2;
    cfg.chunk_cols = 8;

    Capture one;
    Propagator(basis, v, cfg).run(one);
    REQUIRE(one.mats.size() == 3);

    SECTION("U(0) vanishes and N grows from zero") {
        CHECK(pair_number(one.mats[0]) < 1e-20);  // projection round-off only
        CHECK(pair_number(one.mats[2]) > 0.0);
    }

    SECTION("per-column completeness holds to 1e-8") {
        for (const auto& d : one.deficits)
            for (double dc : d)
                CHECK(dc <= 1e-8);
    }

    SECTION("electron and positron numbers agree through the sea block") {
        // N_e = sum |U_pn|^2 and N_pos = N_cols - sum_n sea_colsum[n] are
        // equal up to the unitarity deficit.
        const auto& u = one.mats[2];
        const double ne = pair_number(u);
        double npos = 0.0;
        for (int col = 0; col < u.n; ++col)
            npos += 1.0 - one.seas[2][col];
        CHECK(ne == Catch::Approx(npos).margin(1e-8 * u.n));
    }

    SECTION("identical results at any worker count") {
        EvolutionConfig cfg1 = cfg;
        cfg1.workers = 1;
        Capture ser;
        Propagator(basis, v, cfg1).run(ser);
        REQUIRE(ser.mats.size() == one.mats.size());
        for (std::size_t r = 0; r < ser.mats.size(); ++r)
            for (std::size_t i = 0; i < ser.mats[r].a.size(); ++i)
                CHECK(ser.mats[r].a[i] == one.mats[r].a[i]);
    }

    SECTION("momentum cutoff keeps only small-|p| columns evolving") {
        EvolutionConfig cut = cfg;
        cut.momentum_cutoff = 40.0;
        Capture sink;
        Propagator prop(basis, v, cut);
        CHECK(static_cast<int>(prop.column_bins().size()) < g.num_sites());
        prop.run(sink);
        for (int bin = 0; bin < g.num_sites(); ++bin) {
            if (std::abs(g.momentum(bin)) > 40.0) {
                const cd* col = sink.mats[2].column(bin);
                for (int row = 0; row < g.num_sites(); ++row)
                    CHECK(col[row] == cd(0.0, 0.0));
            }
        }
    }
}

TEST_CASE("unitarity violations abort with the worst column named") {
    const Grid g = make_grid(2.0, 32);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField v(g, smooth_test_potential);
    EvolutionConfig cfg;
    cfg.dt = 2e-7;
    cfg.t_end = 4.0 / kC2;
    cfg.record_times = {4.0 / kC2};
    cfg.unitarity_tol = 1e-18;  // unreachable: FFT round-off exceeds this
    struct Null final : RecordSink {
        void on_record(const RecordView&) override {}
    } sink;
    CHECK_THROWS_AS(Propagator(basis, v, cfg).run(sink), UnitarityError);
}

TEST_CASE("checkpoint round-trips and resume reproduces a straight run bitwise") {
    const Grid g = make_grid(2.0, 32);
    const ModeBasis basis = build_basis(g, kConsts);
    const CallbackPotentialField v(g, smooth_test_potential);

    struct Capture final : RecordSink {
        std::vector<ScatteringMatrix> mats;
        std::vector<FieldBlock> fields;
        void on_record(const RecordView& view) override {
            mats.push_back(view.matrix);
            fields.push_back(view.fields);
        }
    };

    EvolutionConfig cfg;
    cfg.dt = 5e-7;
    cfg.t_end = 8.0 / kC2;
    cfg.record_times = {4.0 / kC2, 8.0 / kC2};
    Capture straight;
    Propagator prop(basis, v, cfg);
    prop.run(straight);
    REQUIRE(straight.mats.size() == 2);

    const std::string path = "test_checkpoint.bin";
    Checkpoint ck;
    ck.config_hash = 0xabcdef12345678ull;
    ck.box_length = g.box_length();
    ck.t = cfg.record_times[0];
    ck.field_bins.resize(g.num_sites());
    for (int i = 0; i < g.num_sites(); ++i)
        ck.field_bins[i] = i;
    ck.fields = straight.fields[0];
    ck.matrix = straight.mats[0];
    write_checkpoint(path, ck);

    Checkpoint back = read_checkpoint(path);
    CHECK(back.config_hash == ck.config_hash);
    CHECK(back.t == ck.t);
    REQUIRE(back.fields.size() == ck.fields.size());
    for (std::size_t i = 0; i < ck.fields.size(); ++i)
        CHECK(back.fields.data()[i] == ck.fields.data()[i]);
    for (std::size_t i = 0; i < ck.matrix.a.size(); ++i)
        CHECK(back.matrix.a[i] == ck.matrix.a[i]);

    Capture resumed;
    Propagator prop2(basis, v, cfg);
    prop2.run_from(resumed, back.fields, back.t);
    // run_from emits the record at t_start itself plus everything after.
    REQUIRE(resumed.mats.size() >= 1);
    const auto& final_straight = straight.mats.back();
    const auto& final_resumed = resumed.mats.back();
    for (std::size_t i = 0; i < final_straight.a.size(); ++i)
        CHECK(final_resumed.a[i] == final_straight.a[i]);
    std::remove(path.c_str());
}
