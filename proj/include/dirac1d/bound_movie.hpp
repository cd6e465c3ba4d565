#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dirac1d/experiments.hpp"
#include "dirac1d/parallel.hpp"
#include "dirac1d/spectral_analysis.hpp"

namespace dirac1d {

struct MovieFrameRecord {
    double t = 0.0;
    std::vector<double> energies;
};

struct MovieResult {
    std::vector<MovieFrameRecord> frames;  // every folded frame, time order
    std::vector<LevelTrajectory> trajectories;
    std::vector<DiveRecord> dives;
    long n_eigensolves = 0;
};

/// Largest rate at which the instantaneous well depth wiggles: the drive's
/// literal-phase rate plus the envelope ramp rate.
inline double effective_depth_rate(const PhysicalParams& p) {
    double rate = 0.0;
    if (p.v2 != 0.0) {
        const double t_ref = p.drive_phase_from_start ? p.plateau : p.ramp + p.plateau;
        rate = std::abs(p.omega0) + p.delta_omega + t_ref * p.delta_omega * p.mod_rate;
    }
    if (p.ramp > 0.0)
        rate = std::max(rate, std::numbers::pi / (2.0 * p.ramp));
    return std::max(rate, 2.0 * std::numbers::pi / p.total_time());
}

/// Instantaneous gap spectra over the whole run on the dedicated spectral
/// grid, with overlap tracking and dive extraction.
///
/// Frame schedule: a uniform base grid of a few frames per effective depth
/// wiggle resolves the level curves; intervals where the gap population
/// changes near the lower edge, or where a level approaches it, are
/// subdivided to frames_per_period points per wiggle so the -c^2 crossing
/// times interpolate to around the 1% level. The whole schedule is a pure
/// function of the configuration.
inline MovieResult bound_state_movie(const PhysicalParams& phys, const NumericalParams& num) {
    const Constants& consts = phys.constants;
    const double c2 = consts.c2();
    const Grid grid = make_grid(num.box_length, num.spectral_sites);
    const ModeBasis basis = build_basis(grid, consts);
    const CombinedPotential pot = make_potential(phys);
    const CombinedPotentialField field(grid, pot);
    const CMatrix kinetic = dense_kinetic(basis);

    const double t_total = phys.total_time();
    const double rate = effective_depth_rate(phys);
    const double wiggle = 2.0 * std::numbers::pi / rate;
    const double base_per_wiggle = 8.0;
    const long n_base =
        std::max<long>(9, static_cast<long>(std::ceil(t_total / wiggle * base_per_wiggle)) + 1);
    const double dt_base = t_total / static_cast<double>(n_base - 1);
    const double dt_target = wiggle / std::max(8.0, num.frames_per_period);

    MovieResult result;

    // Pass 1: eigenvalues only on the base grid, to locate bottom-edge
    // activity.
    std::vector<BoundSpectrumFrame> base(static_cast<std::size_t>(n_base));
    parallel_for(static_cast<int>(n_base), num.workers, [&](int i) {
        base[i] = instantaneous_spectrum(field, i * dt_base, basis, false, &kinetic);
    });
    result.n_eigensolves += n_base;

    auto bottom_dist = [&](const BoundSpectrumFrame& f) {
        return f.energies.empty() ? std::numeric_limits<double>::infinity()
                                  : f.energies.front() + c2;
    };

    std::vector<double> times;
    times.reserve(n_base);
    for (long i = 0; i < n_base; ++i) {
        times.push_back(base[i].t);
        if (i + 1 == n_base)
            break;
        const double da = bottom_dist(base[i]);
        const double db = bottom_dist(base[i + 1]);
        const bool count_changed = base[i].energies.size() != base[i + 1].energies.size();
        const bool refine = (count_changed && std::min(da, db) < 0.45 * c2) ||
            std::min(da, db) < 0.06 * c2;
        if (!refine || dt_base <= dt_target)
            continue;
        const int pieces = static_cast<int>(std::ceil(dt_base / dt_target));
        for (int k = 1; k < pieces; ++k)
            times.push_back(base[i].t + dt_base * k / pieces);
    }
    std::sort(times.begin(), times.end());

    // Pass 2: full frames with eigenvectors, folded through the tracker in
    // bounded windows so the vectors never accumulate.
    LevelTracker tracker(c2);
    const long total = static_cast<long>(times.size());
    const long window = 128;
    std::vector<BoundSpectrumFrame> buf;
    for (long w0 = 0; w0 < total; w0 += window) {
        const long w1 = std::min(total, w0 + window);
        buf.assign(static_cast<std::size_t>(w1 - w0), {});
        parallel_for(static_cast<int>(w1 - w0), num.workers, [&](int i) {
            buf[i] = instantaneous_spectrum(field, times[w0 + i], basis, true, &kinetic);
        });
        result.n_eigensolves += w1 - w0;
        for (auto& frame : buf) {
            tracker.feed(frame);
            result.frames.push_back({frame.t, frame.energies});
        }
    }
    result.trajectories = tracker.finish();
    result.dives = dive_analysis(result.trajectories, c2);
    return result;
}

/// The ground level of the well: the trajectory with the lowest energy near
/// a reference time (every diving level bottoms out near -c^2, so the
/// global minimum cannot identify it). Use a time where the well is at its
/// quiet static depth, e.g. t = ramp. Returns -1 when nothing qualifies.
inline int ground_trajectory_index(const std::vector<LevelTrajectory>& trajectories,
                                   double t_ref, double window) {
    int best = -1;
    double best_e = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        double e_near = std::numeric_limits<double>::infinity();
        double dt_near = window;
        for (const auto& s : trajectories[i].samples) {
            const double dt = std::abs(s.t - t_ref);
            if (dt <= dt_near) {
                dt_near = dt;
                e_near = s.energy;
            }
        }
        if (e_near < best_e) {
            best_e = e_near;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace dirac1d
