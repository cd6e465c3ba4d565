#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "dirac1d/grid.hpp"

namespace dirac1d {

/// Smooth well profile S(z) = {tanh[(z-D/2)/W] - tanh[(z+D/2)/W]}/2,
/// valued in [-1, 0] and even in z.
struct SauterShape {
    double well_width = 0.0;  // D
    double edge_width = 0.0;  // W
};

inline double sauter_shape(double z, const SauterShape& s) {
    return 0.5 * (std::tanh((z - 0.5 * s.well_width) / s.edge_width) -
                  std::tanh((z + 0.5 * s.well_width) / s.edge_width));
}

/// Turn-on/off window: sine ramp on [0, t0], flat 1 on [t0, t0+t1],
/// cosine ramp down on [t0+t1, 2 t0+t1], zero outside.
struct Envelope {
    double ramp = 0.0;     // t0
    double plateau = 0.0;  // t1
};

inline double envelope_value(double t, const Envelope& env) {
    const double t0 = env.ramp;
    const double t1 = env.plateau;
    if (t <= 0.0 || t >= 2.0 * t0 + t1)
        return 0.0;
    if (t < t0)
        return std::sin(std::numbers::pi * t / (2.0 * t0));
    if (t <= t0 + t1)
        return 1.0;
    return std::cos(std::numbers::pi * (t - t0 - t1) / (2.0 * t0));
}

/// Sinusoidally frequency-modulated drive, active on the open window
/// (start, start + duration). The oscillation phase is the literal product
/// omega(t)*t, not the integral of omega. With phase_from_start the clock
/// of that product is the time since the window opened, which makes the
/// drive begin at zero amplitude; see the dive counting discussion in the
/// docs for when that matters.
struct FMDrive {
    double omega0 = 0.0;       // center frequency
    double delta_omega = 0.0;  // FM amplitude
    double mod_rate = 0.0;     // Omega, speed of the frequency change
    double start = 0.0;        // t0
    double duration = 0.0;     // t1
    bool phase_from_start = false;
};

inline double instantaneous_frequency(double t, const FMDrive& d) {
    return d.omega0 + d.delta_omega * std::sin(d.mod_rate * (t - d.start));
}

inline double drive_signal(double t, const FMDrive& d) {
    if (!(t > d.start && t < d.start + d.duration))
        return 0.0;
    const double clock = d.phase_from_start ? t - d.start : t;
    return std::sin(instantaneous_frequency(t, d) * clock);
}

/// V(z,t) = V1 S(z) f(t) + V2 sin[omega(t) t] S(z) theta(t; t0, t0+t1).
/// Both terms share the spatial profile, so V(z,t) = S(z) * amplitude(t).
struct CombinedPotential {
    double static_depth = 0.0;   // V1
    double osc_amplitude = 0.0;  // V2
    SauterShape shape;
    Envelope envelope;
    FMDrive drive;

    double amplitude(double t) const {
        return static_depth * envelope_value(t, envelope) +
               osc_amplitude * drive_signal(t, drive);
    }
};

inline double potential_at(double z, double t, const CombinedPotential& pot) {
    return sauter_shape(z, pot.shape) * pot.amplitude(t);
}

/// Sampler used by the propagator: fills V(z_j, t) for every lattice site.
class PotentialField {
  public:
    virtual ~PotentialField() = default;
    virtual void sample(double t, std::span<double> values) const = 0;
};

class CombinedPotentialField final : public PotentialField {
  public:
    CombinedPotentialField(const Grid& grid, const CombinedPotential& pot) : pot_(pot) {
        shape_.resize(grid.num_sites());
        for (int j = 0; j < grid.num_sites(); ++j)
            shape_[j] = sauter_shape(grid.site(j), pot.shape);
    }

    void sample(double t, std::span<double> values) const override {
        const double a = pot_.amplitude(t);
        for (std::size_t j = 0; j < values.size(); ++j)
            values[j] = shape_[j] * a;
    }

    const CombinedPotential& potential() const { return pot_; }

  private:
    CombinedPotential pot_;
    std::vector<double> shape_;
};

/// Arbitrary V(z,t) callback, mainly for oracle cross-checks.
class CallbackPotentialField final : public PotentialField {
  public:
    CallbackPotentialField(const Grid& grid, std::function<double(double, double)> fn)
        : sites_(grid.sites()), fn_(std::move(fn)) {}

    void sample(double t, std::span<double> values) const override {
        for (std::size_t j = 0; j < values.size(); ++j)
            values[j] = fn_(sites_[j], t);
    }

  private:
    std::vector<double> sites_;
    std::function<double(double, double)> fn_;
};

}  // namespace dirac1d
