#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "iccool/cooling.hpp"
#include "iccool/coupling.hpp"
#include "iccool/errors.hpp"
#include "iccool/fit.hpp"
#include "iccool/phonon.hpp"
#include "iccool/spectrum.hpp"

// File formats: CSV for spectra, distributions and strength maps, a small
// line-oriented text format for cooling sequences, JSON for fit reports.
// Values are printed with enough digits to round-trip exactly, and writers
// emit canonical text so that a parse/serialize cycle is byte-stable.

namespace iccool {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // trim to the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        if (std::strtod(probe, nullptr) == v) return probe;
    }
    return buf;
}

inline double parse_double(const std::string& s, int line, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used])))
            ++used;
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": bad " + what + " '" +
                          s + "'");
    }
}

inline long parse_int(const std::string& s, int line, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": bad " + what + " '" +
                          s + "'");
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

} // namespace detail

// ---------------------------------------------------------------------
// spectrum CSV: detuning_hz,excitation,shots,observable

inline std::string spectrum_to_csv(const std::vector<SpectrumPoint>& pts) {
    std::string out = "detuning_hz,excitation,shots,observable\n";
    for (const auto& p : pts) {
        out += detail::fmt_double(p.detuning);
        out += ',';
        out += detail::fmt_double(p.excitation);
        out += ',';
        out += std::to_string(p.shots);
        out += ',';
        out += to_string(p.observable);
        out += '\n';
    }
    return out;
}

inline std::vector<SpectrumPoint> spectrum_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<SpectrumPoint> pts;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "detuning_hz,excitation,shots,observable")
                throw ConfigError("line 1: unexpected spectrum CSV header");
            continue;
        }
        const auto f = detail::split(line, ',');
        if (f.size() != 4)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 4 fields");
        SpectrumPoint p;
        p.detuning = detail::parse_double(f[0], lineno, "detuning");
        p.excitation = detail::parse_double(f[1], lineno, "excitation");
        p.shots = static_cast<int>(detail::parse_int(f[2], lineno, "shots"));
        p.observable = observable_from_string(f[3]);
        pts.push_back(p);
    }
    return pts;
}

// ---------------------------------------------------------------------
// distribution CSV: n1,n2,prob  (zero cells omitted; the top corner is
// always written so the grid dimensions survive the round trip)

inline std::string distribution_to_csv(const PhononDistribution& d) {
    std::string out = "n1,n2,prob\n";
    const int n1m = d.probs.n1_max(), n2m = d.probs.n2_max();
    for (int n1 = 0; n1 <= n1m; ++n1)
        for (int n2 = 0; n2 <= n2m; ++n2) {
            const double v = d.probs(n1, n2);
            if (v != 0.0 || (n1 == n1m && n2 == n2m)) {
                out += std::to_string(n1);
                out += ',';
                out += std::to_string(n2);
                out += ',';
                out += detail::fmt_double(v);
                out += '\n';
            }
        }
    return out;
}

inline PhononDistribution distribution_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::tuple<int, int, double>> cells;
    int n1m = 0, n2m = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "n1,n2,prob")
                throw ConfigError("line 1: unexpected distribution CSV header");
            continue;
        }
        const auto f = detail::split(line, ',');
        if (f.size() != 3)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 3 fields");
        const int a = static_cast<int>(detail::parse_int(f[0], lineno, "n1"));
        const int b = static_cast<int>(detail::parse_int(f[1], lineno, "n2"));
        if (a < 0 || b < 0)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": negative phonon number");
        cells.emplace_back(a, b, detail::parse_double(f[2], lineno, "prob"));
        n1m = std::max(n1m, a);
        n2m = std::max(n2m, b);
    }
    PhononDistribution d;
    d.probs = Grid2D(n1m, n2m);
    for (auto [a, b, v] : cells) d.probs(a, b) = v;
    return d;
}

// ---------------------------------------------------------------------
// strength map CSV: n1,n2,strength (dense)

inline std::string strength_map_to_csv(const StrengthMap& m) {
    std::string out = "n1,n2,strength\n";
    for (int n1 = 0; n1 <= m.grid.n1_max(); ++n1)
        for (int n2 = 0; n2 <= m.grid.n2_max(); ++n2) {
            out += std::to_string(n1);
            out += ',';
            out += std::to_string(n2);
            out += ',';
            out += detail::fmt_double(m.grid(n1, n2));
            out += '\n';
        }
    return out;
}

// ---------------------------------------------------------------------
// sequence files: one pulse per line
//   sideband=<dn1>,<dn2> duration_us=<t> repeats=<k>
// inside  begin-block N / end-block  markers

inline std::string sequence_to_text(const CoolingSequence& seq) {
    std::string out;
    for (const auto& block : seq.blocks) {
        out += "begin-block " + std::to_string(block.repeat) + "\n";
        for (const auto& p : block.pulses) {
            out += "sideband=" + std::to_string(p.sideband.delta_n1) + "," +
                   std::to_string(p.sideband.delta_n2) +
                   " duration_us=" + detail::fmt_double(p.duration * 1e6) +
                   " repeats=" + std::to_string(p.repeats) + "\n";
        }
        out += "end-block\n";
    }
    return out;
}

inline CoolingSequence sequence_from_text(const std::string& text,
                                          double rabi_hz = kCoolingRabiHz) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    CoolingSequence seq;
    bool in_block = false;
    PulseBlock block;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "begin-block") {
            if (in_block)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": nested begin-block");
            std::string n;
            ls >> n;
            block = PulseBlock{};
            block.repeat =
                static_cast<int>(detail::parse_int(n, lineno, "block repeat"));
            in_block = true;
        } else if (tok == "end-block") {
            if (!in_block)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": end-block without begin-block");
            seq.blocks.push_back(block);
            in_block = false;
        } else if (tok.rfind("sideband=", 0) == 0) {
            if (!in_block)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": pulse outside a block");
            PulseSpec p;
            p.rabi_frequency = rabi_hz;
            const auto sb = detail::split(tok.substr(9), ',');
            if (sb.size() != 2)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": sideband needs two integers");
            p.sideband.delta_n1 =
                static_cast<int>(detail::parse_int(sb[0], lineno, "sideband dn1"));
            p.sideband.delta_n2 =
                static_cast<int>(detail::parse_int(sb[1], lineno, "sideband dn2"));
            std::string dur, rep;
            ls >> dur >> rep;
            if (dur.rfind("duration_us=", 0) != 0 || rep.rfind("repeats=", 0) != 0)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected duration_us= and repeats=");
            p.duration =
                detail::parse_double(dur.substr(12), lineno, "duration") * 1e-6;
            p.repeats =
                static_cast<int>(detail::parse_int(rep.substr(8), lineno, "repeats"));
            block.pulses.push_back(p);
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unexpected '" +
                              tok + "'");
        }
    }
    if (in_block) throw ConfigError("unterminated block at end of file");
    seq.validate();
    return seq;
}

// ---------------------------------------------------------------------
// heating delay scans: delay_s,nbar,uncertainty

inline std::string heating_to_csv(const std::vector<HeatingPoint>& pts) {
    std::string out = "delay_s,nbar,uncertainty\n";
    for (const auto& p : pts) {
        out += detail::fmt_double(p.delay);
        out += ',';
        out += detail::fmt_double(p.nbar);
        out += ',';
        out += detail::fmt_double(p.uncertainty);
        out += '\n';
    }
    return out;
}

inline std::vector<HeatingPoint> heating_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<HeatingPoint> pts;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "delay_s,nbar,uncertainty")
                throw ConfigError("line 1: unexpected heating CSV header");
            continue;
        }
        const auto f = detail::split(line, ',');
        if (f.size() != 3)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 3 fields");
        pts.push_back({detail::parse_double(f[0], lineno, "delay"),
                       detail::parse_double(f[1], lineno, "nbar"),
                       detail::parse_double(f[2], lineno, "uncertainty")});
    }
    return pts;
}

// ---------------------------------------------------------------------
// fit report JSON

inline nlohmann::ordered_json fit_result_to_json(const FitResult& r) {
    nlohmann::ordered_json j;
    j["nbar"] = {r.nbar[0], r.nbar[1]};
    j["nbar_err"] = {r.nbar_err[0], r.nbar_err[1]};
    j["gaussian_sigma_hz"] = {r.gaussian_sigma[0], r.gaussian_sigma[1]};
    j["gaussian_sigma_err_hz"] = {r.gaussian_sigma_err[0], r.gaussian_sigma_err[1]};
    j["carrier_offset_hz"] = r.carrier_offset;
    j["carrier_offset_err_hz"] = r.carrier_offset_err;
    j["rabi_frequency_hz"] = r.rabi_frequency;
    j["rabi_frequency_err_hz"] = r.rabi_frequency_err;
    j["chi2"] = r.chi2;
    j["dof"] = r.dof;
    j["converged"] = r.converged;
    j["nbar_upper_bound_only"] = r.nbar_upper_bound_only;
    j["warnings"] = r.warnings;
    return j;
}

} // namespace iccool
