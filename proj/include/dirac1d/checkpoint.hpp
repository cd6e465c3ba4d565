#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirac1d/propagator.hpp"
#include "dirac1d/spinor_field.hpp"

namespace dirac1d {

/// Binary state snapshot at a record time, for resuming long runs.
///
/// Layout (native endianness, no padding):
///   magic   "D1CKPT01"            8 bytes
///   u64     config hash
///   f64     box length
///   u32     n_sites, n_cols, matrix_n (0 when no matrix stored)
///   f64     t
///   i32     column bins           [n_cols]
///   c128    fields, column-major  [n_cols][2][n_sites]
///   c128    U, column-major       [matrix_n][matrix_n]
struct Checkpoint {
    std::uint64_t config_hash = 0;
    double box_length = 0.0;
    double t = 0.0;
    std::vector<int> field_bins;
    FieldBlock fields;
    ScatteringMatrix matrix;  // matrix.n == 0 when absent
};

inline void write_checkpoint(const std::string& path, const Checkpoint& ck) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open checkpoint for writing: " + path);
    const char magic[8] = {'D', '1', 'C', 'K', 'P', 'T', '0', '1'};
    out.write(magic, 8);
    auto put = [&out](const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    };
    put(&ck.config_hash, 8);
    put(&ck.box_length, 8);
    const std::uint32_t ns = ck.fields.n_sites(), nc = ck.fields.n_cols(),
                        nm = static_cast<std::uint32_t>(ck.matrix.n);
    put(&ns, 4);
    put(&nc, 4);
    put(&nm, 4);
    put(&ck.t, 8);
    put(ck.field_bins.data(), ck.field_bins.size() * sizeof(int));
    put(ck.fields.data(), ck.fields.size() * sizeof(std::complex<double>));
    if (nm)
        put(ck.matrix.a.data(), ck.matrix.a.size() * sizeof(std::complex<double>));
    if (!out)
        throw std::runtime_error("short write on checkpoint: " + path);
}

inline Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "D1CKPT01", 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    auto get = [&in, &path](void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in)
            throw std::runtime_error("truncated checkpoint: " + path);
    };
    Checkpoint ck;
    get(&ck.config_hash, 8);
    get(&ck.box_length, 8);
    std::uint32_t ns = 0, nc = 0, nm = 0;
    get(&ns, 4);
    get(&nc, 4);
    get(&nm, 4);
    get(&ck.t, 8);
    ck.field_bins.resize(nc);
    get(ck.field_bins.data(), nc * sizeof(int));
    ck.fields = FieldBlock(static_cast<int>(ns), static_cast<int>(nc));
    get(ck.fields.data(), ck.fields.size() * sizeof(std::complex<double>));
    if (nm) {
        ck.matrix = ScatteringMatrix(static_cast<int>(nm));
        ck.matrix.t = ck.t;
        get(ck.matrix.a.data(), ck.matrix.a.size() * sizeof(std::complex<double>));
    }
    return ck;
}

/// Sink wrapper that snapshots the state at every record it passes through.
class CheckpointSink final : public RecordSink {
  public:
    CheckpointSink(RecordSink& inner, std::string path, std::uint64_t config_hash,
                   bool store_matrix = true)
        : inner_(inner), path_(std::move(path)), hash_(config_hash), store_matrix_(store_matrix) {}

    void on_record(const RecordView& view) override {
        inner_.on_record(view);
        Checkpoint ck;
        ck.config_hash = hash_;
        ck.box_length = view.basis.grid().box_length();
        ck.t = view.t;
        ck.field_bins.assign(view.field_bins.begin(), view.field_bins.end());
        ck.fields = view.fields;
        if (store_matrix_)
            ck.matrix = view.matrix;
        write_checkpoint(path_, ck);
    }

  private:
    RecordSink& inner_;
    std::string path_;
    std::uint64_t hash_;
    bool store_matrix_;
};

}  // namespace dirac1d
