#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dirac1d/dense_oracle.hpp"
#include "dirac1d/fft.hpp"
#include "dirac1d/linalg.hpp"
#include "dirac1d/modes.hpp"
#include "dirac1d/potential.hpp"

namespace dirac1d {

/// Eigenvalues of the frozen Hamiltonian strictly inside the mass gap
/// (-c^2, c^2), sorted ascending, with the matching eigenvectors optionally
/// retained for frame-to-frame tracking.
struct BoundSpectrumFrame {
    double t = 0.0;
    std::vector<double> energies;
    CMatrix vectors;  // 2N x m; zero columns when not retained
};

/// Kinetic block of the dense Hamiltonian (reusable across frames).
inline CMatrix dense_kinetic(const ModeBasis& basis) {
    struct Zero final : PotentialField {
        void sample(double, std::span<double> v) const override {
            std::fill(v.begin(), v.end(), 0.0);
        }
    } zero;
    return dense_hamiltonian(basis, zero, 0.0);
}

inline BoundSpectrumFrame instantaneous_spectrum(const PotentialField& pot, double t,
                                                 const ModeBasis& basis,
                                                 bool keep_vectors = true,
                                                 const CMatrix* kinetic = nullptr) {
    const int n = basis.grid().num_sites();
    if (n > 4096)
        throw std::invalid_argument("instantaneous_spectrum: grid too large for dense solve");
    CMatrix h = kinetic ? *kinetic : dense_kinetic(basis);
    std::vector<double> v(n);
    pot.sample(t, std::span<double>(v));
    for (int j = 0; j < n; ++j) {
        h(j, j) += v[j];
        h(n + j, n + j) += v[j];
    }
    BoundSpectrumFrame frame;
    frame.t = t;
    // Strictly-inside filter with an edge tolerance well above eigensolver
    // round-off: the free p = 0 eigenvalues sit at exactly +-c^2 and must
    // not leak into the gap.
    const double c2 = basis.constants().c2() * (1.0 - 1e-9);
    if (keep_vectors) {
        const std::vector<double> w = hermitian_eigensystem(h);
        std::vector<int> keep;
        for (int i = 0; i < 2 * n; ++i)
            if (w[i] > -c2 && w[i] < c2)
                keep.push_back(i);
        frame.energies.reserve(keep.size());
        frame.vectors = CMatrix(2 * n, static_cast<int>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k) {
            frame.energies.push_back(w[keep[k]]);
            const std::complex<double>* src = h.col(keep[k]);
            std::copy(src, src + 2 * n, frame.vectors.col(static_cast<int>(k)));
        }
    } else {
        const std::vector<double> w = hermitian_eigenvalues(h);
        for (double e : w)
            if (e > -c2 && e < c2)
                frame.energies.push_back(e);
    }
    return frame;
}

// ---------------------------------------------------------------------------
// Level tracking.

struct TrajectorySample {
    double t = 0.0;
    double energy = 0.0;
};

/// One adiabatic gap level followed through time. Samples hold only in-gap
/// energies; intervals where the level left the gap are kept as absences
/// (bottom = it crossed into the Dirac sea, top = it merged with the
/// positive continuum) so that dives can be reconstructed.
struct LevelTrajectory {
    struct Absence {
        int before_index = 0;        // last in-gap sample before the absence
        double t_first_missing = 0;  // first frame where the level was gone
        double t_last_missing = 0;   // last frame where it was still gone
        bool bottom = false;
    };

    int id = 0;
    std::vector<TrajectorySample> samples;
    std::vector<Absence> absences;
    bool suspended_at_end = false;
    bool suspended_bottom = false;

    double min_energy() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& s : samples)
            m = std::min(m, s.energy);
        return m;
    }
};

struct TrackerConfig {
    double overlap_threshold = 0.5;
};

/// Incremental overlap tracker. Frames must arrive in increasing time and
/// carry eigenvectors. Matching is greedy on |<v_prev|v_now>|^2; a level that
/// disappears is suspended at the edge its trend points to and may resume
/// when a matching state re-enters through the same half of the gap.
class LevelTracker {
  public:
    LevelTracker(double c2, TrackerConfig cfg = {}) : c2_(c2), cfg_(cfg) {}

    void feed(const BoundSpectrumFrame& frame) {
        const int m = static_cast<int>(frame.energies.size());
        const int dim = frame.vectors.rows();
        // Overlap of every live trajectory against every frame state.
        std::vector<double> overlap(static_cast<std::size_t>(live_.size()) * m);
        for (std::size_t i = 0; i < live_.size(); ++i)
            for (int j = 0; j < m; ++j) {
                std::complex<double> s(0.0, 0.0);
                const std::complex<double>* a = live_[i].vector.data();
                const std::complex<double>* b = frame.vectors.col(j);
                for (int r = 0; r < dim; ++r)
                    s += std::conj(a[r]) * b[r];
                overlap[i * m + j] = std::norm(s);
            }
        std::vector<int> traj_match(live_.size(), -1);
        std::vector<int> state_match(m, -1);
        for (;;) {
            double best = cfg_.overlap_threshold;
            int bi = -1, bj = -1;
            for (std::size_t i = 0; i < live_.size(); ++i) {
                if (traj_match[i] >= 0)
                    continue;
                for (int j = 0; j < m; ++j) {
                    if (state_match[j] >= 0)
                        continue;
                    if (overlap[i * m + j] > best) {
                        best = overlap[i * m + j];
                        bi = static_cast<int>(i);
                        bj = j;
                    }
                }
            }
            if (bi < 0)
                break;
            traj_match[bi] = bj;
            state_match[bj] = bi;
        }

        // Suspend unmatched live trajectories.
        std::vector<Live> still_live;
        for (std::size_t i = 0; i < live_.size(); ++i) {
            Live& lv = live_[i];
            if (traj_match[i] >= 0) {
                const int j = traj_match[i];
                append_sample(lv, frame.t, frame.energies[j], frame.vectors.col(j), dim);
                still_live.push_back(std::move(lv));
            } else {
                Suspended sp;
                sp.traj = std::move(lv.traj);
                sp.vector = std::move(lv.vector);
                sp.bottom = heading_bottom(lv);
                sp.t_first_missing = frame.t;
                sp.t_last_missing = frame.t;
                suspended_.push_back(std::move(sp));
            }
        }
        live_ = std::move(still_live);

        // Unmatched frame states: try to resume a suspended trajectory
        // through the same half of the gap, otherwise open a new one.
        // States are visited in ascending energy so ids are deterministic.
        for (int j = 0; j < m; ++j) {
            if (state_match[j] >= 0)
                continue;
            const double e = frame.energies[j];
            int best_k = -1;
            double best_ov = cfg_.overlap_threshold;
            for (std::size_t k = 0; k < suspended_.size(); ++k) {
                const bool half_ok = suspended_[k].bottom ? (e < 0.0) : (e > 0.0);
                if (!half_ok)
                    continue;
                std::complex<double> s(0.0, 0.0);
                const std::complex<double>* a = suspended_[k].vector.data();
                const std::complex<double>* b = frame.vectors.col(j);
                for (int r = 0; r < dim; ++r)
                    s += std::conj(a[r]) * b[r];
                const double ov = std::norm(s);
                if (ov > best_ov) {
                    best_ov = ov;
                    best_k = static_cast<int>(k);
                }
            }
            if (best_k >= 0) {
                Suspended sp = std::move(suspended_[best_k]);
                suspended_.erase(suspended_.begin() + best_k);
                LevelTrajectory::Absence ab;
                ab.before_index = static_cast<int>(sp.traj.samples.size()) - 1;
                ab.t_first_missing = sp.t_first_missing;
                ab.t_last_missing = sp.t_last_missing;
                ab.bottom = sp.bottom;
                sp.traj.absences.push_back(ab);
                Live lv;
                lv.traj = std::move(sp.traj);
                append_sample(lv, frame.t, e, frame.vectors.col(j), dim);
                live_.push_back(std::move(lv));
            } else {
                Live lv;
                lv.traj.id = next_id_++;
                append_sample(lv, frame.t, e, frame.vectors.col(j), dim);
                live_.push_back(std::move(lv));
            }
        }

        // Suspended trajectories that stayed missing extend their absence.
        for (auto& sp : suspended_)
            sp.t_last_missing = frame.t;
    }

    std::vector<LevelTrajectory> finish() {
        std::vector<LevelTrajectory> out;
        for (auto& lv : live_)
            out.push_back(std::move(lv.traj));
        for (auto& sp : suspended_) {
            sp.traj.suspended_at_end = true;
            sp.traj.suspended_bottom = sp.bottom;
            out.push_back(std::move(sp.traj));
        }
        live_.clear();
        suspended_.clear();
        std::sort(out.begin(), out.end(),
                  [](const LevelTrajectory& a, const LevelTrajectory& b) { return a.id < b.id; });
        return out;
    }

  private:
    struct Live {
        LevelTrajectory traj;
        std::vector<std::complex<double>> vector;
        double prev_t = 0.0, prev_e = 0.0;
        double last_t = 0.0, last_e = 0.0;
        int n_samples = 0;
    };
    struct Suspended {
        LevelTrajectory traj;
        std::vector<std::complex<double>> vector;
        bool bottom = false;
        double t_first_missing = 0.0;
        double t_last_missing = 0.0;
    };

    void append_sample(Live& lv, double t, double e, const std::complex<double>* vec, int dim) {
        lv.traj.samples.push_back({t, e});
        lv.vector.assign(vec, vec + dim);
        lv.prev_t = lv.n_samples ? lv.last_t : t;
        lv.prev_e = lv.n_samples ? lv.last_e : e;
        lv.last_t = t;
        lv.last_e = e;
        ++lv.n_samples;
    }

    bool heading_bottom(const Live& lv) const {
        double predicted = lv.last_e;
        if (lv.n_samples >= 2 && lv.last_t > lv.prev_t) {
            const double slope = (lv.last_e - lv.prev_e) / (lv.last_t - lv.prev_t);
            predicted = lv.last_e + slope * (lv.last_t - lv.prev_t);
        }
        if (predicted <= -c2_)
            return true;
        if (predicted >= c2_)
            return false;
        return (lv.last_e + c2_) < (c2_ - lv.last_e);
    }

    double c2_;
    TrackerConfig cfg_;
    std::vector<Live> live_;
    std::vector<Suspended> suspended_;
    int next_id_ = 0;
};

inline std::vector<LevelTrajectory> track_levels(const std::vector<BoundSpectrumFrame>& frames,
                                                 double c2, TrackerConfig cfg = {}) {
    LevelTracker tracker(c2, cfg);
    for (const auto& f : frames)
        tracker.feed(f);
    return tracker.finish();
}

// ---------------------------------------------------------------------------
// Dive statistics and the yield heuristic.

enum class GrowthRegime { quadratic, linear, saturated };

struct DiveRecord {
    int trajectory_id = 0;
    double entry = 0.0;
    double exit = 0.0;
    double duration = 0.0;
    bool well_resolved = true;
    GrowthRegime regime = GrowthRegime::linear;  // assigned by classify_dives
};

/// A dive is a maximal interval with E(t) < -c^2, reconstructed from a
/// bottom-edge absence: the level crossed down between its last in-gap
/// sample and the first missing frame, and back up between the last missing
/// frame and the resume sample. Crossing times come from linear
/// inter/extrapolation of the neighbouring samples, clamped to those frame
/// brackets. Dives still open when tracking ended are not reported.
inline std::vector<DiveRecord> dive_analysis(const std::vector<LevelTrajectory>& trajectories,
                                             double c2) {
    std::vector<DiveRecord> out;
    for (const auto& traj : trajectories) {
        for (const auto& ab : traj.absences) {
            if (!ab.bottom)
                continue;
            const int bi = ab.before_index;
            if (bi < 0 || bi + 1 >= static_cast<int>(traj.samples.size()))
                continue;
            const TrajectorySample& last = traj.samples[bi];
            const TrajectorySample& back = traj.samples[bi + 1];

            double entry = 0.5 * (last.t + ab.t_first_missing);
            if (bi >= 1) {
                const TrajectorySample& prev = traj.samples[bi - 1];
                const double de = last.energy - prev.energy;
                if (de < 0.0)
                    entry = last.t + (-c2 - last.energy) * (last.t - prev.t) / de;
            }
            entry = std::clamp(entry, last.t, ab.t_first_missing);

            double exit = 0.5 * (ab.t_last_missing + back.t);
            if (bi + 2 < static_cast<int>(traj.samples.size())) {
                const TrajectorySample& nxt = traj.samples[bi + 2];
                const double de = nxt.energy - back.energy;
                if (de > 0.0)
                    exit = back.t + (-c2 - back.energy) * (nxt.t - back.t) / de;
            }
            exit = std::clamp(exit, ab.t_last_missing, back.t);

            DiveRecord rec;
            rec.trajectory_id = traj.id;
            rec.entry = entry;
            rec.exit = std::max(exit, entry + 0.0);
            rec.duration = rec.exit - rec.entry;
            if (rec.duration <= 0.0)
                continue;
            const double bracket =
                (ab.t_first_missing - last.t) + (back.t - ab.t_last_missing);
            rec.well_resolved = bracket <= 0.5 * rec.duration;
            out.push_back(rec);
        }
    }
    std::sort(out.begin(), out.end(), [](const DiveRecord& a, const DiveRecord& b) {
        return a.entry < b.entry || (a.entry == b.entry && a.trajectory_id < b.trajectory_id);
    });
    return out;
}

/// Regime boundaries for the per-dive growth rate: quadratic growth below
/// quad_to_linear, constant-rate (linear) growth up to linear_to_saturated,
/// saturated beyond. Defaults follow 1/c^2 and 1/c^2 + D/c.
struct GrowthThresholds {
    double quad_to_linear = 0.0;
    double linear_to_saturated = 0.0;
};

inline GrowthThresholds default_growth_thresholds(const Constants& consts, double well_width) {
    const double base = 1.0 / consts.c2();
    return {base, base + well_width / consts.c};
}

struct GrowthWeights {
    double quadratic = 1.0;
    double linear = 1.0;
    double saturated = 1.0;
};

inline GrowthRegime classify_growth(double duration, const GrowthThresholds& th) {
    if (duration < th.quad_to_linear)
        return GrowthRegime::quadratic;
    if (duration <= th.linear_to_saturated)
        return GrowthRegime::linear;
    return GrowthRegime::saturated;
}

inline void classify_dives(std::vector<DiveRecord>& dives, const GrowthThresholds& th) {
    for (auto& d : dives)
        d.regime = classify_growth(d.duration, th);
}

/// Relative yield score  sum_i r(dt_i) dt_i  with
///   quadratic regime:  w_q * dt^2 / t_quad      (rate grows with dt)
///   linear regime:     w_l * dt                 (constant rate)
///   saturated regime:  w_s * t_lin              (dt capped at t_lin)
/// Continuous across the joints when the weights are equal. The score is a
/// ranking device, not an absolute electron count.
inline double heuristic_yield(const std::vector<DiveRecord>& dives, const GrowthThresholds& th,
                              const GrowthWeights& w = {}) {
    if (!(th.quad_to_linear > 0.0) || !(th.linear_to_saturated >= th.quad_to_linear))
        throw std::invalid_argument("heuristic_yield: thresholds must be ordered and positive");
    double score = 0.0;
    for (const auto& d : dives) {
        switch (classify_growth(d.duration, th)) {
            case GrowthRegime::quadratic:
                score += w.quadratic * d.duration * d.duration / th.quad_to_linear;
                break;
            case GrowthRegime::linear:
                score += w.linear * d.duration;
                break;
            case GrowthRegime::saturated:
                score += w.saturated * th.linear_to_saturated;
                break;
        }
    }
    return score;
}

// ---------------------------------------------------------------------------
// Drive-signal frequency spectrum.

enum class SpectralWindow { rectangular, hann };

struct AmplitudeSpectrum {
    std::vector<double> frequency;  // rad / a.u., one-sided
    std::vector<double> amplitude;
    double df = 0.0;
    double parseval_signal = 0.0;    // sum |x_j|^2 dt
    double parseval_spectrum = 0.0;  // sum |X_k|^2 df over the two-sided set
};

/// Largest instantaneous rate of the literal phase omega(t) * t over the
/// drive window (used to pick a safe sampling rate):
///   d/dt [omega(t) t] = omega(t) + t * delta_omega * Omega * cos(...)
inline double max_phase_rate(const FMDrive& d) {
    const double t_max = d.start + d.duration;
    return std::abs(d.omega0) + d.delta_omega + t_max * d.delta_omega * d.mod_rate;
}

/// DFT of the sampled drive over its window. Amplitudes are scaled so that
/// sum |X_k|^2 df = sum |x_j|^2 dt (Parseval, checked in the returned
/// fields). Samples sit at half-offsets inside the open window.
inline AmplitudeSpectrum drive_spectrum(const FMDrive& drive, double sample_rate = 0.0,
                                        SpectralWindow window = SpectralWindow::rectangular) {
    if (!(drive.duration > 0.0))
        throw std::invalid_argument("drive_spectrum: drive window is empty");
    const double rate_floor = 10.0 * max_phase_rate(drive);
    if (sample_rate <= 0.0)
        sample_rate = 1.6 * rate_floor;
    if (sample_rate < rate_floor)
        throw std::invalid_argument("drive_spectrum: sample rate below 10x the max phase rate");
    long m = static_cast<long>(std::ceil(sample_rate * drive.duration));
    m += m % 2;
    const double dt = drive.duration / static_cast<double>(m);
    std::vector<std::complex<double>> buf(m);
    double sig2 = 0.0;
    for (long j = 0; j < m; ++j) {
        const double t = drive.start + (j + 0.5) * dt;
        double x = drive_signal(t, drive);
        if (window == SpectralWindow::hann)
            x *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (j + 0.5) / m));
        buf[j] = x;
        sig2 += x * x;
    }
    BatchFft fft(static_cast<int>(m), 1);
    fft.forward(buf.data());

    AmplitudeSpectrum spec;
    spec.df = 2.0 * std::numbers::pi / (m * dt);
    spec.parseval_signal = sig2 * dt;
    const double scale = dt / std::sqrt(2.0 * std::numbers::pi);
    double spec2 = 0.0;
    for (long k = 0; k < m; ++k)
        spec2 += std::norm(buf[k]) * scale * scale;
    spec.parseval_spectrum = spec2 * spec.df;
    spec.frequency.resize(m / 2 + 1);
    spec.amplitude.resize(m / 2 + 1);
    for (long k = 0; k <= m / 2; ++k) {
        spec.frequency[k] = spec.df * k;
        spec.amplitude[k] = std::abs(buf[k]) * scale;
    }
    return spec;
}

/// Indices of strict-left / weak-right local maxima.
inline std::vector<int> local_maxima(const std::vector<double>& v) {
    std::vector<int> out;
    for (int i = 1; i + 1 < static_cast<int>(v.size()); ++i)
        if (v[i] > v[i - 1] && v[i] >= v[i + 1])
            out.push_back(i);
    return out;
}

}  // namespace dirac1d
