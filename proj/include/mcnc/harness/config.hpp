// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scenario configuration and its plain-text format.
//
// Grammar (one statement per line):
//   line     := blank | comment | section | entry
//   comment  := ('#' | ';') text
//   section  := '[' name ']'
//   entry    := key '=' value-list
//   value-list := item (',' item)*
//   item     := scalar | start ':' step ':' stop      (inclusive numeric range)
// Numbers accept "inf" where an infinite value is meaningful (Eb/N0, IBO).
// Every key is addressed as section.key; see ScenarioConfig for the list.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "mcnc/channel.hpp"
#include "mcnc/modem.hpp"

namespace mcnc {

/// Collects every validation failure with the offending field path.
class ConfigError : public std::invalid_argument {
  public:
    explicit ConfigError(std::vector<std::string> problems)
        : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const noexcept { return problems_; }

  private:
    static std::string join(const std::vector<std::string>& p) {
        std::string s = "invalid configuration:";
        for (const auto& x : p)
            s += "\n  " + x;
        return s;
    }
    std::vector<std::string> problems_;
};

enum class PrecoderKind { mrt, phase_only };
enum class ReceiverChoice { standard, cnc, mcnc, nodist };

inline std::string_view to_string(PrecoderKind p) { return p == PrecoderKind::mrt ? "mrt" : "phase-only"; }

inline std::string_view to_string(ReceiverChoice r) {
    switch (r) {
    case ReceiverChoice::standard:
        return "standard";
    case ReceiverChoice::cnc:
        return "cnc";
    case ReceiverChoice::mcnc:
        return "mcnc";
    case ReceiverChoice::nodist:
        return "nodist";
    }
    return "?";
}

struct ScenarioConfig {
    // [ofdm]
    OfdmConfig ofdm = OfdmConfig::with_size(256, 128);
    // [link]
    unsigned qam = 64;
    std::vector<std::size_t> antennas{64};
    std::vector<ChannelModel> channels{ChannelModel::los};
    PrecoderKind precoder = PrecoderKind::mrt;
    // Unit-power constellations, so the mean symbol power is fixed.
    static constexpr double symbol_power = 1.0;
    // [geometry]
    double tx_height_m = 15.0;
    double rx_distance_m = 300.0;
    double rx_azimuth_deg = 45.0;
    double rx_height_m = 1.5;
    double jitter_box_m = 10.0;
    double reflection = -1.0;
    // [sweep]
    std::vector<double> ibo_db{0.0};
    std::vector<double> ebn0_db{10, 15, 20, 25, 30};
    std::vector<int> iterations{0, 1, 2, 3, 8};
    std::vector<ReceiverChoice> receivers{ReceiverChoice::standard, ReceiverChoice::cnc, ReceiverChoice::mcnc,
                                          ReceiverChoice::nodist};
    std::size_t symbols = 200;
    std::vector<double> csi_eps{0.0};
    std::uint64_t seed = 1;
    // [complexity]
    unsigned complexity_qam = 64;
    std::size_t complexity_fft_size = 4096;
    std::size_t complexity_data_subcarriers = 2048;
    std::size_t complexity_antennas = 64;
    std::vector<int> complexity_iterations{0, 1, 3, 8};

    ReceiverPlacement placement() const { return {rx_distance_m, rx_azimuth_deg, rx_height_m, jitter_box_m}; }

    ArrayGeometry geometry(std::size_t k) const {
        return ArrayGeometry::half_wavelength(k, ofdm.carrier_hz, tx_height_m);
    }

    int max_iterations() const {
        int m = 0;
        for (int i : iterations)
            m = std::max(m, i);
        return m;
    }

    std::vector<std::string> problems() const {
        std::vector<std::string> p;
        try {
            ofdm.validate();
        } catch (const std::exception& e) {
            p.push_back(std::string("ofdm: ") + e.what());
        }
        if (qam != 4 && qam != 16 && qam != 64 && qam != 256)
            p.push_back("link.qam: must be one of 4, 16, 64, 256");
        if (antennas.empty())
            p.push_back("link.antennas: list is empty");
        for (auto k : antennas)
            if (k == 0)
                p.push_back("link.antennas: antenna count must be >= 1");
        if (channels.empty())
            p.push_back("link.channels: list is empty");
        if (!(rx_distance_m > 0.0))
            p.push_back("geometry.rx_distance_m: must be positive");
        if (!(tx_height_m > 0.0))
            p.push_back("geometry.tx_height_m: must be positive");
        if (rx_height_m < 0.0)
            p.push_back("geometry.rx_height_m: must be non-negative");
        if (jitter_box_m < 0.0)
            p.push_back("geometry.jitter_box_m: must be non-negative");
        if (ibo_db.empty())
            p.push_back("sweep.ibo_db: list is empty");
        for (double v : ibo_db)
            if (std::isnan(v) || (std::isinf(v) && v < 0))
                p.push_back("sweep.ibo_db: values must be finite or +inf");
        if (ebn0_db.empty())
            p.push_back("sweep.ebn0_db: list is empty");
        for (double v : ebn0_db)
            if (std::isnan(v) || (std::isinf(v) && v < 0))
                p.push_back("sweep.ebn0_db: values must be finite or +inf");
        if (iterations.empty())
            p.push_back("sweep.iterations: list is empty");
        for (int i : iterations)
            if (i < 0)
                p.push_back("sweep.iterations: negative iteration count");
        if (receivers.empty())
            p.push_back("sweep.receivers: list is empty");
        if (symbols < 1)
            p.push_back("sweep.symbols: must be >= 1");
        if (csi_eps.empty())
            p.push_back("sweep.csi_eps: list is empty");
        for (double e : csi_eps)
            if (!(e >= 0.0 && e <= 1.0))
                p.push_back("sweep.csi_eps: values must lie in [0, 1]");
        if (!is_power_of_two(complexity_fft_size))
            p.push_back("complexity.fft_size: must be a power of two");
        if (complexity_data_subcarriers == 0 || complexity_data_subcarriers > complexity_fft_size)
            p.push_back("complexity.data_subcarriers: need 0 < N_U <= N");
        if (complexity_iterations.empty())
            p.push_back("complexity.iterations: list is empty");
        return p;
    }

    void validate() const {
        auto p = problems();
        if (!p.empty())
            throw ConfigError(std::move(p));
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s == "inf" || s == "+inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    if (s == "-inf") {
        out = -std::numeric_limits<double>::infinity();
        return true;
    }
    std::istringstream is(s);
    is >> out;
    return !is.fail() && is.eof();
}

inline bool parse_double_list(const std::string& v, std::vector<double>& out) {
    out.clear();
    for (const auto& item : split(v, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            double x;
            if (!parse_double(parts[0], x))
                return false;
            out.push_back(x);
        } else if (parts.size() == 3) {
            double a, step, b;
            if (!parse_double(parts[0], a) || !parse_double(parts[1], step) || !parse_double(parts[2], b))
                return false;
            if (!(step > 0.0) || !std::isfinite(a) || !std::isfinite(b) || b < a)
                return false;
            const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
            for (std::size_t i = 0; i < count; ++i)
                out.push_back(a + static_cast<double>(i) * step);
        } else {
            return false;
        }
    }
    return !out.empty();
}

template <class Int>
bool parse_int_list(const std::string& v, std::vector<Int>& out) {
    std::vector<double> d;
    if (!parse_double_list(v, d))
        return false;
    out.clear();
    for (double x : d) {
        if (!std::isfinite(x) || x != std::floor(x))
            return false;
        if constexpr (std::is_unsigned_v<Int>)
            if (x < 0)
                return false;
        out.push_back(static_cast<Int>(x));
    }
    return true;
}

template <class Int>
bool parse_int(const std::string& v, Int& out) {
    std::vector<Int> l;
    if (!parse_int_list(v, l) || l.size() != 1)
        return false;
    out = l[0];
    return true;
}

inline bool parse_channel(const std::string& s, ChannelModel& m) {
    if (s == "los")
        m = ChannelModel::los;
    else if (s == "two-path" || s == "two_path")
        m = ChannelModel::two_path;
    else if (s == "rayleigh")
        m = ChannelModel::rayleigh;
    else
        return false;
    return true;
}

inline bool parse_receiver(const std::string& s, ReceiverChoice& r) {
    if (s == "standard")
        r = ReceiverChoice::standard;
    else if (s == "cnc")
        r = ReceiverChoice::cnc;
    else if (s == "mcnc")
        r = ReceiverChoice::mcnc;
    else if (s == "nodist")
        r = ReceiverChoice::nodist;
    else
        return false;
    return true;
}

} // namespace detail

/// Parse the sectioned key=value text. Unknown keys and malformed values are
/// all reported together in one ConfigError.
inline ScenarioConfig parse_config(std::string_view text) {
    using namespace detail;
    ScenarioConfig c;
    std::vector<std::string> errors;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    bool cp_given = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(line_no) + ": unterminated section header");
                continue;
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        bool ok = true;

        if (key == "ofdm.fft_size")
            ok = parse_int(value, c.ofdm.fft_size);
        else if (key == "ofdm.data_subcarriers")
            ok = parse_int(value, c.ofdm.data_subcarriers);
        else if (key == "ofdm.cp_length") {
            ok = parse_int(value, c.ofdm.cp_length);
            cp_given = true;
        } else if (key == "ofdm.subcarrier_spacing_hz")
            ok = parse_double(value, c.ofdm.subcarrier_spacing_hz);
        else if (key == "ofdm.carrier_hz")
            ok = parse_double(value, c.ofdm.carrier_hz);
        else if (key == "link.qam")
            ok = parse_int(value, c.qam);
        else if (key == "link.antennas")
            ok = parse_int_list(value, c.antennas);
        else if (key == "link.channels") {
            c.channels.clear();
            for (const auto& item : split(value, ',')) {
                ChannelModel m;
                if (!parse_channel(item, m)) {
                    ok = false;
                    break;
                }
                c.channels.push_back(m);
            }
        } else if (key == "link.precoder") {
            if (value == "mrt")
                c.precoder = PrecoderKind::mrt;
            else if (value == "phase-only" || value == "phase_only")
                c.precoder = PrecoderKind::phase_only;
            else
                ok = false;
        } else if (key == "geometry.tx_height_m")
            ok = parse_double(value, c.tx_height_m);
        else if (key == "geometry.rx_distance_m")
            ok = parse_double(value, c.rx_distance_m);
        else if (key == "geometry.rx_azimuth_deg")
            ok = parse_double(value, c.rx_azimuth_deg);
        else if (key == "geometry.rx_height_m")
            ok = parse_double(value, c.rx_height_m);
        else if (key == "geometry.jitter_box_m")
            ok = parse_double(value, c.jitter_box_m);
        else if (key == "geometry.reflection")
            ok = parse_double(value, c.reflection);
        else if (key == "sweep.ibo_db")
            ok = parse_double_list(value, c.ibo_db);
        else if (key == "sweep.ebn0_db")
            ok = parse_double_list(value, c.ebn0_db);
        else if (key == "sweep.iterations")
            ok = parse_int_list(value, c.iterations);
        else if (key == "sweep.receivers") {
            c.receivers.clear();
            for (const auto& item : split(value, ',')) {
                ReceiverChoice r;
                if (!parse_receiver(item, r)) {
                    ok = false;
                    break;
                }
                c.receivers.push_back(r);
            }
        } else if (key == "sweep.symbols")
            ok = parse_int(value, c.symbols);
        else if (key == "sweep.csi_eps")
            ok = parse_double_list(value, c.csi_eps);
        else if (key == "sweep.seed")
            ok = parse_int(value, c.seed);
        else if (key == "complexity.qam")
            ok = parse_int(value, c.complexity_qam);
        else if (key == "complexity.fft_size")
            ok = parse_int(value, c.complexity_fft_size);
        else if (key == "complexity.data_subcarriers")
            ok = parse_int(value, c.complexity_data_subcarriers);
        else if (key == "complexity.antennas")
            ok = parse_int(value, c.complexity_antennas);
        else if (key == "complexity.iterations")
            ok = parse_int_list(value, c.complexity_iterations);
        else {
            errors.push_back(key + ": unknown key (line " + std::to_string(line_no) + ")");
            continue;
        }
        if (!ok)
            errors.push_back(key + ": cannot parse '" + value + "' (line " + std::to_string(line_no) + ")");
    }
    if (!cp_given)
        c.ofdm.cp_length = c.ofdm.fft_size / 16;
    for (auto& p : c.problems())
        errors.push_back(std::move(p));
    if (!errors.empty())
        throw ConfigError(std::move(errors));
    return c;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError({"cannot open config file '" + path + "'"});
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

} // namespace mcnc
