#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dirac1d/observables.hpp"
#include "dirac1d/potential.hpp"
#include "dirac1d/propagator.hpp"
#include "dirac1d/spectral_analysis.hpp"
#include "dirac1d/version.hpp"

namespace dirac1d {

enum class ExperimentKind {
    time_series,
    fm_amplitude_scan,
    optimal_fm_curve,
    frequency_response,
    bound_state_movie,
    density_snapshots,
    spectrum_pair,
    drive_spectrum,
};

/// Physical parameters of the combined well, all in a.u.
struct PhysicalParams {
    double v1 = 0.0;
    double v2 = 0.0;
    double well_width = 0.0;  // D
    double edge_width = 0.0;  // W
    double omega0 = 0.0;
    double delta_omega = 0.0;
    double mod_rate = 0.0;  // Omega
    double ramp = 0.0;      // t0
    double plateau = 0.0;   // t1
    bool drive_phase_from_start = false;
    Constants constants;

    double total_time() const { return 2.0 * ramp + plateau; }
};

struct NumericalParams {
    double box_length = 2.0;
    int n_sites = 2048;
    double dt_max_phase = 5e-3;  // radians of potential phase per step
    double dt_override = 0.0;    // takes precedence when positive
    int records_per_period = 16;
    double unitarity_tol = 1e-8;
    double spectrum_bin = 0.0;  // 0: default 0.02 c^2
    int spectral_sites = 512;
    double frames_per_period = 80.0;
    int workers = 0;
    double momentum_cutoff = 0.0;
    int chunk_cols = 16;
};

inline CombinedPotential make_potential(const PhysicalParams& p,
                                        std::optional<double> omega0 = {},
                                        std::optional<double> delta_omega = {}) {
    CombinedPotential pot;
    pot.static_depth = p.v1;
    pot.osc_amplitude = p.v2;
    pot.shape = {p.well_width, p.edge_width};
    pot.envelope = {p.ramp, p.plateau};
    pot.drive = {omega0.value_or(p.omega0), delta_omega.value_or(p.delta_omega),
                 p.mod_rate,    p.ramp,     p.plateau,
                 p.drive_phase_from_start};
    return pot;
}

/// Step size from the phase rule: at most dt_max_phase radians of potential
/// phase per step at the deepest point of the combined well.
inline double resolve_dt(const PhysicalParams& p, const NumericalParams& n) {
    if (n.dt_override > 0.0)
        return n.dt_override;
    const double vmax =
        (std::abs(p.v1) + std::abs(p.v2)) *
        std::abs(sauter_shape(0.0, SauterShape{p.well_width, p.edge_width}));
    if (!(vmax > 0.0))
        return p.total_time() / 4096.0;
    return n.dt_max_phase / vmax;
}

/// Record schedule: ramp boundaries, drive-period-aligned samples on the
/// plateau, and any extra times (deduplicated, sorted).
inline std::vector<double> record_schedule(const PhysicalParams& p, const NumericalParams& n,
                                           const std::vector<double>& extra = {}) {
    std::vector<double> times;
    times.push_back(0.0);
    const double t0 = p.ramp;
    const double t1 = p.plateau;
    for (int k = 1; k <= 8; ++k)
        times.push_back(t0 * k / 8.0);
    const double omega_ref = p.omega0 > 0.0 && p.v2 != 0.0 ? p.omega0 : 0.0;
    const double period = omega_ref > 0.0 ? 2.0 * std::numbers::pi / omega_ref : t1 / 4.0;
    const double step = period / std::max(1, n.records_per_period);
    for (double t = t0 + step; t < t0 + t1; t += step)
        times.push_back(t);
    times.push_back(t0 + t1);
    for (int k = 1; k <= 8; ++k)
        times.push_back(t0 + t1 + t0 * k / 8.0);
    times.insert(times.end(), extra.begin(), extra.end());
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    const double tol = 1e-9 * p.total_time();
    for (double t : times) {
        if (t < 0.0 || t > p.total_time() + tol)
            continue;
        t = std::min(t, p.total_time());
        if (out.empty() || t - out.back() > tol)
            out.push_back(t);
    }
    return out;
}

struct DensitySnapshot {
    double t = 0.0;
    std::vector<double> rho;
};

struct RunResult {
    PairNumberSeries series;
    std::vector<double> max_deficit;  // per record
    ScatteringMatrix final_u;
    std::vector<DensitySnapshot> snapshots;
    EnergySpectrum spectrum;
    double n_final = 0.0;
    double wall_seconds = 0.0;
};

/// One full evolution over [0, 2 t0 + t1]: N(t) series, final scattering
/// matrix and spectrum, densities at the requested snapshot times.
inline RunResult run_single(const PhysicalParams& phys, const NumericalParams& num,
                            const std::vector<double>& snapshot_times = {},
                            std::optional<double> omega0 = {},
                            std::optional<double> delta_omega = {}) {
    const auto t_begin = std::chrono::steady_clock::now();
    const Grid grid = make_grid(num.box_length, num.n_sites);
    const ModeBasis basis = build_basis(grid, phys.constants);
    const CombinedPotential pot = make_potential(phys, omega0, delta_omega);
    const CombinedPotentialField field(grid, pot);

    EvolutionConfig cfg;
    cfg.dt = resolve_dt(phys, num);
    cfg.t_end = phys.total_time();
    cfg.record_times = record_schedule(phys, num, snapshot_times);
    cfg.unitarity_tol = num.unitarity_tol;
    cfg.workers = num.workers;
    cfg.chunk_cols = num.chunk_cols;
    cfg.momentum_cutoff = num.momentum_cutoff;

    struct Sink final : RecordSink {
        RunResult* out;
        const std::vector<double>* snaps;
        double snap_tol;
        void on_record(const RecordView& view) override {
            out->series.t.push_back(view.t);
            out->series.n.push_back(pair_number(view.matrix));
            double worst = 0.0;
            for (double d : view.unit_deficit)
                worst = std::max(worst, d);
            out->max_deficit.push_back(worst);
            for (double ts : *snaps)
                if (std::abs(ts - view.t) <= snap_tol)
                    out->snapshots.push_back({view.t, electron_density(view.matrix, view.basis)});
            out->final_u = view.matrix;
        }
    };

    RunResult result;
    Sink sink;
    sink.out = &result;
    sink.snaps = &snapshot_times;
    sink.snap_tol = 1e-9 * phys.total_time();
    Propagator(basis, field, cfg).run(sink);

    result.n_final = result.series.n.empty() ? 0.0 : result.series.n.back();
    const double bin =
        num.spectrum_bin > 0.0 ? num.spectrum_bin : 0.02 * phys.constants.c2();
    result.spectrum = energy_spectrum(result.final_u, basis, bin);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return result;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepPoint {
    double value = 0.0;     // scanned delta_omega (or omega0, per axis name)
    double n_final = 0.0;
    bool ok = false;
    std::string note;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepPoint> points;
    int argmax = -1;  // ties resolved toward the smallest axis value
    double wall_seconds = 0.0;
    std::string version{kVersion};

    bool all_ok() const {
        for (const auto& p : points)
            if (!p.ok)
                return false;
        return true;
    }
};

/// N_final at each FM amplitude of the axis; failures are recorded and the
/// scan continues.
inline SweepResult scan_fm_amplitude(const PhysicalParams& phys, const NumericalParams& num,
                                     const std::vector<double>& delta_omegas,
                                     std::optional<double> omega0 = {}) {
    if (delta_omegas.empty())
        throw std::invalid_argument("scan_fm_amplitude: empty axis");
    for (double d : delta_omegas)
        if (!std::isfinite(d))
            throw std::invalid_argument("scan_fm_amplitude: non-finite axis value");
    const auto t_begin = std::chrono::steady_clock::now();
    SweepResult sweep;
    sweep.axis = "delta_omega";
    for (double d : delta_omegas) {
        SweepPoint pt;
        pt.value = d;
        try {
            pt.n_final = run_single(phys, num, {}, omega0, d).n_final;
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.note = e.what();
        }
        sweep.points.push_back(std::move(pt));
    }
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        if (!sweep.points[i].ok)
            continue;
        if (sweep.argmax < 0 || sweep.points[i].n_final > sweep.points[sweep.argmax].n_final)
            sweep.argmax = static_cast<int>(i);
    }
    sweep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return sweep;
}

struct ResponsePoint {
    double omega0 = 0.0;
    double n_fixed = 0.0;        // delta_omega = 0
    double delta_opt = 0.0;      // argmax over the search grid
    double n_opt = 0.0;
    double ratio = 0.0;          // n_opt / n_fixed
    bool ok = false;
    std::string note;
};

/// For each center frequency: the fixed-frequency yield, the optimal FM
/// amplitude over the search grid (ties toward the smallest), and the
/// enhancement ratio R.
inline std::vector<ResponsePoint> frequency_response(const PhysicalParams& phys,
                                                     const NumericalParams& num,
                                                     const std::vector<double>& omega0_axis,
                                                     const std::vector<double>& search_deltas) {
    if (omega0_axis.empty() || search_deltas.empty())
        throw std::invalid_argument("frequency_response: empty axis");
    std::vector<ResponsePoint> out;
    for (double w0 : omega0_axis) {
        ResponsePoint rp;
        rp.omega0 = w0;
        std::vector<double> axis{0.0};
        for (double d : search_deltas)
            if (d > 0.0)
                axis.push_back(d);
        const SweepResult sweep = scan_fm_amplitude(phys, num, axis, w0);
        if (sweep.points[0].ok) {
            rp.n_fixed = sweep.points[0].n_final;
            if (sweep.argmax >= 0) {
                rp.delta_opt = sweep.points[sweep.argmax].value;
                rp.n_opt = sweep.points[sweep.argmax].n_final;
                rp.ratio = rp.n_fixed > 0.0 ? rp.n_opt / rp.n_fixed
                                            : std::numeric_limits<double>::infinity();
                rp.ok = sweep.all_ok();
            }
        }
        if (!rp.ok)
            for (const auto& p : sweep.points)
                if (!p.ok)
                    rp.note += p.note + "; ";
        out.push_back(std::move(rp));
    }
    return out;
}

/// Fig. 4-style curve: optimal FM amplitude per center frequency.
inline std::vector<ResponsePoint> optimal_fm_curve(const PhysicalParams& phys,
                                                   const NumericalParams& num,
                                                   const std::vector<double>& omega0_axis,
                                                   const std::vector<double>& search_deltas) {
    return frequency_response(phys, num, omega0_axis, search_deltas);
}

struct SpectrumPairResult {
    EnergySpectrum fixed;
    EnergySpectrum modulated;
    double n_fixed = 0.0;
    double n_modulated = 0.0;
};

/// The two end-of-run spectra (delta_omega = 0 and the given FM amplitude).
inline SpectrumPairResult spectrum_pair(const PhysicalParams& phys, const NumericalParams& num,
                                        double delta_omega_fm) {
    SpectrumPairResult out;
    const RunResult fixed = run_single(phys, num, {}, {}, 0.0);
    const RunResult fm = run_single(phys, num, {}, {}, delta_omega_fm);
    out.fixed = fixed.spectrum;
    out.modulated = fm.spectrum;
    out.n_fixed = fixed.n_final;
    out.n_modulated = fm.n_final;
    return out;
}

}  // namespace dirac1d
