// SPDX-License-Identifier: Apache-2.0
#pragma once

// CSV rendering of sweep records. Column order is fixed; cells that do not
// apply to a sweep are left empty. Wall time is not written so that equal
// configurations produce identical bytes.

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>

#include "mcnc/harness/sweep.hpp"

namespace mcnc {

inline constexpr const char* sweep_csv_header =
    "sweep,n_fft,n_used,qam,precoder,csi_eps,symbols,seed,antenna,ibo_k_db,alpha_analytic,alpha_empirical,ber_in,"
    "receiver,iterations,ebn0_db,ibo_db,k,channel,ber,bit_errors,total_bits,sdr_db,alpha_mean";

inline constexpr const char* complexity_csv_header =
    "kind,qam,n_fft,n_used,k,iterations,additions,multiplications,additions_per_subcarrier,"
    "multiplications_per_subcarrier";

namespace detail {

inline std::string num(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

template <class T>
std::string cell(const std::optional<T>& v) {
    if (!v)
        return {};
    if constexpr (std::is_floating_point_v<T>)
        return num(*v);
    else
        return std::to_string(*v);
}

} // namespace detail

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRecord> rows) {
    using detail::cell;
    using detail::num;
    os << sweep_csv_header << '\n';
    for (const auto& r : rows) {
        os << r.sweep << ',' << r.fft_size << ',' << r.data_subcarriers << ',' << r.qam << ',' << to_string(r.precoder)
           << ',' << num(r.csi_eps) << ',' << r.symbols << ',' << r.seed << ',' << cell(r.antenna) << ','
           << cell(r.ibo_k_db) << ',' << cell(r.alpha_analytic) << ',' << cell(r.alpha_empirical) << ','
           << cell(r.ber_in) << ',' << r.receiver << ',' << cell(r.iterations) << ',' << cell(r.ebn0_db) << ','
           << num(r.ibo_db) << ',' << r.k << ',' << to_string(r.channel) << ',' << cell(r.ber) << ','
           << cell(r.bit_errors) << ',' << cell(r.total_bits) << ',' << cell(r.sdr_db) << ',' << cell(r.alpha_mean)
           << '\n';
    }
}

inline void write_complexity_csv(std::ostream& os, std::span<const ComplexityRow> rows) {
    using detail::num;
    os << complexity_csv_header << '\n';
    for (const auto& r : rows) {
        os << to_string(r.kind) << ',' << r.params.qam_order << ',' << r.params.fft_size << ','
           << r.params.data_subcarriers << ',' << r.params.antennas << ',' << r.params.iterations << ','
           << num(r.count.additions) << ',' << num(r.count.multiplications) << ','
           << num(r.count.additions_per_subcarrier) << ',' << num(r.count.multiplications_per_subcarrier) << '\n';
    }
}

} // namespace mcnc
