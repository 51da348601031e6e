// SPDX-License-Identifier: Apache-2.0
#pragma once

// Complex-vector primitives shared by every other module: a unitary radix-2
// FFT, a row-major complex matrix, and reproducible random streams.

#include <bit>
#include <cmath>
#include <complex>
#include <deque>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mcnc/errors.hpp"

namespace mcnc {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

enum class Direction { forward, inverse };

/// Row-major complex matrix. Rows are antennas, columns are data subcarriers
/// throughout the library.
class Grid {
  public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, cplx fill = {}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const cplx> flat() const noexcept { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline bool is_power_of_two(std::size_t n) { return n > 0 && std::has_single_bit(n); }

/// Precomputed bit-reversal permutation and twiddles for one transform size.
/// Both directions are scaled by 1/sqrt(N) so the pair is unitary.
class FftPlan {
  public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (!is_power_of_two(n))
            throw SizingError("FFT length " + std::to_string(n) + " is not a power of two");
        const unsigned bits = static_cast<unsigned>(std::countr_zero(n));
        reversed_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (unsigned b = 0; b < bits; ++b)
                r |= ((i >> b) & 1u) << (bits - 1 - b);
            reversed_[i] = r;
        }
        twiddles_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
            twiddles_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
        scale_ = 1.0 / std::sqrt(static_cast<double>(n));
    }

    std::size_t size() const noexcept { return n_; }

    void transform(std::span<cplx> data, Direction dir) const {
        if (data.size() != n_)
            throw SizingError("FFT input length " + std::to_string(data.size()) + " does not match plan size " +
                              std::to_string(n_));
        for (std::size_t i = 0; i < n_; ++i)
            if (i < reversed_[i])
                std::swap(data[i], data[reversed_[i]]);

        const bool inverse = dir == Direction::inverse;
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    cplx w = twiddles_[j * stride];
                    if (inverse)
                        w = std::conj(w);
                    const cplx u = data[start + j];
                    const cplx v = data[start + j + half] * w;
                    data[start + j] = u + v;
                    data[start + j + half] = u - v;
                }
            }
        }
        for (auto& x : data)
            x *= scale_;
    }

  private:
    std::size_t n_;
    std::vector<std::size_t> reversed_;
    std::vector<cplx> twiddles_;
    double scale_ = 1.0;
};

/// Cached plan for size n; one cache per thread.
inline const FftPlan& fft_plan(std::size_t n) {
    thread_local std::deque<FftPlan> cache;
    for (const auto& p : cache)
        if (p.size() == n)
            return p;
    cache.emplace_back(n);
    return cache.back();
}

/// Unitary DFT: forward uses e^{-j2πnt/N}, inverse e^{+j2πnt/N}, both scaled by 1/sqrt(N).
inline CVec dft(std::span<const cplx> v, Direction dir) {
    CVec out(v.begin(), v.end());
    fft_plan(out.size()).transform(out, dir);
    return out;
}

inline double energy(std::span<const cplx> v) {
    double e = 0.0;
    for (const auto& x : v)
        e += std::norm(x);
    return e;
}

inline double mean_power(std::span<const cplx> v) { return v.empty() ? 0.0 : energy(v) / static_cast<double>(v.size()); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Reproducible random stream. Every (seed, stream id) pair maps to an
/// independent generator, so parallel trials never share state.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(mix(mix(seed) ^ (stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull))) {}

    /// Stream id for a (point, trial) pair inside a campaign.
    static std::uint64_t stream_id(std::uint64_t point, std::uint64_t trial) { return mix(point + 0x9E37) ^ trial; }

    /// Circularly-symmetric complex Gaussian with E|x|^2 = variance.
    cplx gaussian(double variance) {
        if (!(variance >= 0.0))
            throw SizingError("gaussian variance must be non-negative");
        if (variance == 0.0)
            return {0.0, 0.0};
        const double sd = std::sqrt(variance / 2.0);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {sd * re, sd * im};
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    std::uint64_t next() { return engine_(); }

  private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Convenience wrapper over RngStream::gaussian.
inline cplx gaussian_pair(RngStream& rng, double variance) { return rng.gaussian(variance); }

} // namespace mcnc
