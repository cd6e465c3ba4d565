#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace dirac1d {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// In-place c2c transforms over `howmany` contiguous rows of length n.
/// Plans are created with FFTW_ESTIMATE so the chosen algorithm, and hence
/// the rounding, is reproducible run to run; FFTW_UNALIGNED lets one plan
/// serve any buffer. Execution through the new-array interface is
/// thread-safe; plan creation is serialized on a process-wide mutex.
class BatchFft {
  public:
    BatchFft(int n, int howmany) : n_(n), howmany_(howmany) {
        std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * howmany);
        auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
        const int dims[1] = {n};
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fwd_ = fftw_plan_many_dft(1, dims, howmany, ptr, nullptr, 1, n, ptr, nullptr, 1, n,
                                  FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_many_dft(1, dims, howmany, ptr, nullptr, 1, n, ptr, nullptr, 1, n,
                                  FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    BatchFft(const BatchFft&) = delete;
    BatchFft& operator=(const BatchFft&) = delete;

    ~BatchFft() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    int length() const { return n_; }
    int howmany() const { return howmany_; }

    /// X_k = sum_j x_j exp(-2 pi i j k / n)
    void forward(std::complex<double>* data) const {
        auto* ptr = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(fwd_, ptr, ptr);
    }

    /// Unnormalized inverse: applying forward then backward scales by n.
    void backward(std::complex<double>* data) const {
        auto* ptr = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(bwd_, ptr, ptr);
    }

  private:
    int n_;
    int howmany_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

}  // namespace dirac1d
