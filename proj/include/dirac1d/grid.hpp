#pragma once

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirac1d {

/// Periodic lattice on [-L/2, L/2) with the conjugate momentum lattice
/// p_k = 2*pi*k/L for k in [-N/2, N/2). The single Nyquist mode is assigned
/// to the negative-momentum side.
class Grid {
  public:
    Grid(double box_length, int num_sites)
        : box_length_(box_length), num_sites_(num_sites) {
        if (!(box_length > 0.0))
            throw std::invalid_argument("Grid: box length must be positive, got " +
                                        std::to_string(box_length));
        if (num_sites < 4 || num_sites % 2 != 0)
            throw std::invalid_argument("Grid: number of sites must be even and >= 4, got " +
                                        std::to_string(num_sites));
        dz_ = box_length_ / num_sites_;
        sites_.resize(num_sites_);
        for (int j = 0; j < num_sites_; ++j)
            sites_[j] = -0.5 * box_length_ + j * dz_;
        momenta_bin_.resize(num_sites_);
        const double dp = 2.0 * std::numbers::pi / box_length_;
        for (int b = 0; b < num_sites_; ++b)
            momenta_bin_[b] = dp * bin_to_k(b);
    }

    double box_length() const { return box_length_; }
    int num_sites() const { return num_sites_; }
    double dz() const { return dz_; }
    double site(int j) const { return sites_[j]; }
    const std::vector<double>& sites() const { return sites_; }

    /// Momentum of FFT bin b (bins 0..N/2-1 map to k = b, the rest to k = b - N).
    double momentum(int bin) const { return momenta_bin_[bin]; }
    int bin_to_k(int bin) const { return bin < num_sites_ / 2 ? bin : bin - num_sites_; }
    int k_to_bin(int k) const { return k >= 0 ? k : k + num_sites_; }

    /// Momenta sorted ascending, k = -N/2 .. N/2-1.
    std::vector<double> momenta_ascending() const {
        std::vector<double> out(num_sites_);
        const double dp = 2.0 * std::numbers::pi / box_length_;
        for (int i = 0; i < num_sites_; ++i)
            out[i] = dp * (i - num_sites_ / 2);
        return out;
    }

    bool operator==(const Grid& o) const {
        return box_length_ == o.box_length_ && num_sites_ == o.num_sites_;
    }

  private:
    double box_length_;
    int num_sites_;
    double dz_;
    std::vector<double> sites_;
    std::vector<double> momenta_bin_;
};

inline Grid make_grid(double box_length, int num_sites) { return Grid(box_length, num_sites); }

}  // namespace dirac1d
