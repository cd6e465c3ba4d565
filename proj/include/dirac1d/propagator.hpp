#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirac1d/fft.hpp"
#include "dirac1d/modes.hpp"
#include "dirac1d/parallel.hpp"
#include "dirac1d/potential.hpp"
#include "dirac1d/spinor_field.hpp"

namespace dirac1d {

struct EvolutionConfig {
    double dt = 0.0;
    double t_end = 0.0;
    std::vector<double> record_times;  // sorted, within [0, t_end]
    double unitarity_tol = 1e-8;
    int workers = 0;            // 0 = hardware concurrency
    int chunk_cols = 16;        // parallel grain; fixed so results never depend on workers
    double momentum_cutoff = 0.0;  // 0 = evolve the whole Dirac sea

    void validate() const {
        if (!(dt > 0.0))
            throw std::invalid_argument("EvolutionConfig: dt must be positive");
        if (record_times.empty())
            throw std::invalid_argument("EvolutionConfig: no record times");
        if (!std::is_sorted(record_times.begin(), record_times.end()))
            throw std::invalid_argument("EvolutionConfig: record times must be sorted");
        if (record_times.front() < 0.0 || record_times.back() > t_end * (1.0 + 1e-12) + 1e-300)
            throw std::invalid_argument("EvolutionConfig: record times outside [0, t_end]");
        if (!(unitarity_tol > 0.0))
            throw std::invalid_argument("EvolutionConfig: unitarity tolerance must be positive");
        if (chunk_cols < 1)
            throw std::invalid_argument("EvolutionConfig: chunk_cols must be >= 1");
    }
};

/// U_pn(t): overlap of every evolved negative mode (column) with every
/// field-free positive mode (row), FFT-bin order, column-major storage.
struct ScatteringMatrix {
    double t = 0.0;
    int n = 0;
    std::vector<std::complex<double>> a;

    ScatteringMatrix() = default;
    explicit ScatteringMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_) {}
    std::complex<double>& at(int p_bin, int n_bin) {
        return a[static_cast<std::size_t>(n_bin) * n + p_bin];
    }
    const std::complex<double>& at(int p_bin, int n_bin) const {
        return a[static_cast<std::size_t>(n_bin) * n + p_bin];
    }
    std::complex<double>* column(int n_bin) { return a.data() + static_cast<std::size_t>(n_bin) * n; }
    const std::complex<double>* column(int n_bin) const {
        return a.data() + static_cast<std::size_t>(n_bin) * n;
    }
};

class UnitarityError : public std::runtime_error {
  public:
    UnitarityError(double t, int column_bin, double deficit)
        : std::runtime_error("unitarity violated at t=" + std::to_string(t) +
                             ": column bin " + std::to_string(column_bin) +
                             " completeness deficit " + std::to_string(deficit)),
          t_(t), column_bin_(column_bin), deficit_(deficit) {}
    double t() const { return t_; }
    int column_bin() const { return column_bin_; }
    double deficit() const { return deficit_; }

  private:
    double t_;
    int column_bin_;
    double deficit_;
};

struct RecordView {
    double t = 0.0;
    const ScatteringMatrix& matrix;
    std::span<const double> sea_colsum;    // sum_{n'} |U_{n'n}|^2 per column bin
    std::span<const double> unit_deficit;  // per column bin
    const FieldBlock& fields;              // evolved columns, position space
    std::span<const int> field_bins;       // bin of each evolved column
    const ModeBasis& basis;
};

class RecordSink {
  public:
    virtual ~RecordSink() = default;
    virtual void on_record(const RecordView& view) = 0;
};

// ---------------------------------------------------------------------------
// Single-field steps (the batched engine below uses the same kernels).

/// Exact free evolution exp(-i h(p) dt) applied per momentum bin.
inline void kinetic_half_step(SpinorField& field, const ModeBasis& basis, double dt) {
    if (field.repr != Representation::momentum)
        throw std::invalid_argument("kinetic_half_step: field must be in momentum space");
    KineticTable kin(basis, dt, 1.0);
    kernel::apply_kinetic(field.data.data(), kin, field.n_sites);
}

/// Pointwise phase exp(-i V(z_j, t) dt); the potential is scalar in spinor space.
inline void potential_phase_step(SpinorField& field, double t, double dt,
                                 const PotentialField& pot) {
    if (field.repr != Representation::position)
        throw std::invalid_argument("potential_phase_step: field must be in position space");
    const int n = field.n_sites;
    std::vector<double> v(n);
    pot.sample(t, std::span<double>(v));
    std::vector<std::complex<double>> phase(n);
    kernel::phase_from_potential(v.data(), dt, phase.data(), n);
    kernel::apply_phase(field.data.data(), phase.data(), n);
}

/// One Strang step: half potential phase at the midpoint, exact kinetic step,
/// half potential phase. Second-order accurate in dt.
inline void split_step(SpinorField& field, double t, double dt, const PotentialField& pot,
                       const ModeBasis& basis, const BatchFft& fft) {
    if (field.repr != Representation::position)
        throw std::invalid_argument("split_step: field must be in position space");
    const int n = field.n_sites;
    potential_phase_step(field, t + 0.5 * dt, 0.5 * dt, pot);
    fft.forward(field.data.data());
    KineticTable kin(basis, dt, 1.0 / n);
    kernel::apply_kinetic(field.data.data(), kin, n);
    fft.backward(field.data.data());
    potential_phase_step(field, t + 0.5 * dt, 0.5 * dt, pot);
}

inline void split_step(SpinorField& field, double t, double dt, const PotentialField& pot,
                       const ModeBasis& basis) {
    BatchFft fft(field.n_sites, 2);
    split_step(field, t, dt, pot, basis, fft);
}

// ---------------------------------------------------------------------------

/// Batched split-operator evolution of every (selected) negative mode, with
/// Bogoliubov projections at each record time. Columns advance independently
/// between records, so the chunked parallel map gives results that are
/// bitwise independent of the worker count.
class Propagator {
  public:
    Propagator(const ModeBasis& basis, const PotentialField& pot, EvolutionConfig cfg)
        : basis_(basis), pot_(pot), cfg_(std::move(cfg)) {
        cfg_.validate();
        const int n = basis_.num_momenta();
        for (int bin = 0; bin < n; ++bin) {
            if (cfg_.momentum_cutoff > 0.0 &&
                std::abs(basis_.grid().momentum(bin)) > cfg_.momentum_cutoff)
                continue;
            col_bins_.push_back(bin);
        }
        if (col_bins_.empty())
            throw std::invalid_argument("Propagator: momentum cutoff removed every column");
        const int cols = static_cast<int>(col_bins_.size());
        for (int b = 0; b < cols; b += cfg_.chunk_cols)
            chunks_.emplace_back(b, std::min(b + cfg_.chunk_cols, cols));
        for (const auto& [cb, ce] : chunks_) {
            const int width = ce - cb;
            if (!fft_by_width_.count(width))
                fft_by_width_.emplace(width, std::make_unique<BatchFft>(n, 2 * width));
        }
    }

    const std::vector<int>& column_bins() const { return col_bins_; }

    FieldBlock initial_fields() const {
        const int n = basis_.num_momenta();
        FieldBlock fields(n, static_cast<int>(col_bins_.size()));
        const double amp = 1.0 / std::sqrt(basis_.grid().box_length());
        parallel_for(static_cast<int>(chunks_.size()), cfg_.workers, [&](int ci) {
            for (int c = chunks_[ci].first; c < chunks_[ci].second; ++c) {
                const int bin = col_bins_[c];
                const double p = basis_.grid().momentum(bin);
                const double u0 = basis_.spinor_component(bin, Branch::negative, 0);
                const double u1 = basis_.spinor_component(bin, Branch::negative, 1);
                std::complex<double>* c0 = fields.column(c);
                std::complex<double>* c1 = c0 + n;
                for (int j = 0; j < n; ++j) {
                    const std::complex<double> wave = std::polar(amp, p * basis_.grid().site(j));
                    c0[j] = u0 * wave;
                    c1[j] = u1 * wave;
                }
            }
        });
        return fields;
    }

    void run(RecordSink& sink) {
        FieldBlock fields = initial_fields();
        run_from(sink, fields, 0.0);
    }

    /// Resume from a state at t_start (e.g. a checkpoint); records at or
    /// before t_start are skipped.
    void run_from(RecordSink& sink, FieldBlock& fields, double t_start) {
        if (fields.n_sites() != basis_.num_momenta() ||
            fields.n_cols() != static_cast<int>(col_bins_.size()))
            throw std::invalid_argument("Propagator: field block shape mismatch");
        const int n = basis_.num_momenta();
        ScatteringMatrix u(n);
        std::vector<double> sea(n, 1.0), deficit(n, 0.0);
        const double teps = cfg_.dt * 1e-9;
        double t_cur = t_start;
        for (double rt : cfg_.record_times) {
            if (rt < t_start - teps)
                continue;
            if (rt > t_cur + teps) {
                advance_segment(fields, t_cur, rt);
                t_cur = rt;
            }
            project_record(fields, t_cur, u, sea, deficit);
            int worst = -1;
            double worst_deficit = 0.0;
            for (int bin = 0; bin < n; ++bin)
                if (deficit[bin] > worst_deficit) {
                    worst_deficit = deficit[bin];
                    worst = bin;
                }
            if (worst_deficit > cfg_.unitarity_tol)
                throw UnitarityError(t_cur, worst, worst_deficit);
            RecordView view{t_cur, u,    std::span<const double>(sea),
                            std::span<const double>(deficit), fields,
                            std::span<const int>(col_bins_), basis_};
            sink.on_record(view);
        }
    }

  private:
    const BatchFft& fft_for(int width) const { return *fft_by_width_.at(width); }

    /// Advance all columns from ta to tb: full dt steps, then one partial
    /// step with the remainder. Potential phases for a window of steps are
    /// tabulated once and shared; trailing/leading half phases of adjacent
    /// steps are merged into one pointwise pass.
    void advance_segment(FieldBlock& fields, double ta, double tb) {
        const int n = basis_.num_momenta();
        const double total = tb - ta;
        long n_full = static_cast<long>(std::floor(total / cfg_.dt + 1e-9));
        double rem = total - n_full * cfg_.dt;
        if (rem <= cfg_.dt * 1e-9)
            rem = 0.0;
        const long n_steps = n_full + (rem > 0.0 ? 1 : 0);
        if (n_steps == 0)
            return;
        const KineticTable kin_dt(basis_, cfg_.dt, 1.0 / n);
        const KineticTable kin_rem = rem > 0.0 ? KineticTable(basis_, rem, 1.0 / n)
                                               : KineticTable();
        auto step_size = [&](long s) { return s < n_full ? cfg_.dt : rem; };
        auto step_mid = [&](long s) {
            return s < n_full ? ta + (s + 0.5) * cfg_.dt : ta + n_full * cfg_.dt + 0.5 * rem;
        };

        const long max_block =
            std::max<long>(1, (64l << 20) / (static_cast<long>(sizeof(std::complex<double>)) * n) - 1);
        for (long s0 = 0; s0 < n_steps; s0 += max_block) {
            const long s1 = std::min(n_steps, s0 + max_block);
            const long nb = s1 - s0;
            std::vector<std::complex<double>> tables(static_cast<std::size_t>(nb + 1) * n);
            parallel_for(static_cast<int>(nb + 1), cfg_.workers, [&](int i) {
                std::complex<double>* row = tables.data() + static_cast<std::size_t>(i) * n;
                std::vector<double> va(n), vb(n);
                const long s = s0 + i;
                if (i == 0) {
                    pot_.sample(step_mid(s0), std::span<double>(va));
                    kernel::phase_from_potential(va.data(), 0.5 * step_size(s0), row, n);
                } else if (s == n_steps) {
                    pot_.sample(step_mid(s - 1), std::span<double>(va));
                    kernel::phase_from_potential(va.data(), 0.5 * step_size(s - 1), row, n);
                } else {
                    pot_.sample(step_mid(s - 1), std::span<double>(va));
                    pot_.sample(step_mid(s), std::span<double>(vb));
                    const double ha = 0.5 * step_size(s - 1);
                    const double hb = 0.5 * step_size(s);
                    for (int j = 0; j < n; ++j)
                        row[j] = std::polar(1.0, -(va[j] * ha + vb[j] * hb));
                }
            });
            parallel_for(static_cast<int>(chunks_.size()), cfg_.workers, [&](int ci) {
                const auto [cb, ce] = chunks_[ci];
                const int width = ce - cb;
                const BatchFft& fft = fft_for(width);
                std::complex<double>* block = fields.column(cb);
                auto apply_table = [&](long i) {
                    const std::complex<double>* row =
                        tables.data() + static_cast<std::size_t>(i) * n;
                    for (int c = 0; c < width; ++c)
                        kernel::apply_phase(block + static_cast<std::size_t>(2) * n * c, row, n);
                };
                apply_table(0);
                for (long s = s0; s < s1; ++s) {
                    fft.forward(block);
                    const KineticTable& kin = s < n_full ? kin_dt : kin_rem;
                    for (int c = 0; c < width; ++c)
                        kernel::apply_kinetic(block + static_cast<std::size_t>(2) * n * c, kin, n);
                    fft.backward(block);
                    apply_table(s - s0 + 1);
                }
            });
        }
    }

    /// Project every evolved column onto the field-free modes. Writes the
    /// positive-branch overlaps into u and per-column sea sums/deficits.
    void project_record(const FieldBlock& fields, double t, ScatteringMatrix& u,
                        std::vector<double>& sea, std::vector<double>& deficit) {
        const int n = basis_.num_momenta();
        u.t = t;
        const double base = std::sqrt(basis_.grid().box_length()) / n;
        parallel_for(static_cast<int>(chunks_.size()), cfg_.workers, [&](int ci) {
            const auto [cb, ce] = chunks_[ci];
            const int width = ce - cb;
            const BatchFft& fft = fft_for(width);
            std::vector<std::complex<double>> scratch(
                fields.column(cb), fields.column(cb) + static_cast<std::size_t>(2) * n * width);
            fft.forward(scratch.data());
            for (int c = 0; c < width; ++c) {
                const int bin_col = col_bins_[cb + c];
                const std::complex<double>* x0 = scratch.data() + static_cast<std::size_t>(2) * n * c;
                const std::complex<double>* x1 = x0 + n;
                std::complex<double>* ucol = u.column(bin_col);
                double s_pos = 0.0, s_sea = 0.0;
                for (int b = 0; b < n; ++b) {
                    const double f = (b & 1) ? -base : base;
                    const double up0 = basis_.spinor_component(b, Branch::positive, 0);
                    const double up1 = basis_.spinor_component(b, Branch::positive, 1);
                    const double un0 = basis_.spinor_component(b, Branch::negative, 0);
                    const double un1 = basis_.spinor_component(b, Branch::negative, 1);
                    const std::complex<double> pos = f * (up0 * x0[b] + up1 * x1[b]);
                    const std::complex<double> neg = f * (un0 * x0[b] + un1 * x1[b]);
                    ucol[b] = pos;
                    s_pos += std::norm(pos);
                    s_sea += std::norm(neg);
                }
                sea[bin_col] = s_sea;
                deficit[bin_col] = std::abs(1.0 - (s_pos + s_sea));
            }
        });
    }

    const ModeBasis& basis_;
    const PotentialField& pot_;
    EvolutionConfig cfg_;
    std::vector<int> col_bins_;
    std::vector<std::pair<int, int>> chunks_;
    std::map<int, std::unique_ptr<BatchFft>> fft_by_width_;
};

inline void evolve_scattering_matrix(const ModeBasis& basis, const PotentialField& pot,
                                     const EvolutionConfig& cfg, RecordSink& sink) {
    Propagator(basis, pot, cfg).run(sink);
}

/// Convenience for tests and small grids: collects a copy of U per record.
inline std::vector<ScatteringMatrix> evolve_scattering_matrix(const ModeBasis& basis,
                                                              const PotentialField& pot,
                                                              const EvolutionConfig& cfg) {
    struct Collect final : RecordSink {
        std::vector<ScatteringMatrix> out;
        void on_record(const RecordView& view) override { out.push_back(view.matrix); }
    } sink;
    evolve_scattering_matrix(basis, pot, cfg, sink);
    return std::move(sink.out);
}

}  // namespace dirac1d
