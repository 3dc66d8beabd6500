#include "helitube/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

namespace helitube::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": '" + text + "' is not a number");
    }
    if (used != t.size() || !std::isfinite(v)) {
        throw ConfigError(key + ": '" + text + "' is not a finite number");
    }
    return v;
}

long parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(t, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": '" + text + "' is not an integer");
    }
    if (used != t.size()) throw ConfigError(key + ": '" + text + "' is not an integer");
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    const long v = parse_int(key, text);
    if (v < 1) throw ConfigError(key + " must be positive");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

}  // namespace

std::vector<double> KPath::k_s_values() const {
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(start);
        return out;
    }
    for (std::size_t p = 0; p < count; ++p) {
        const double f = static_cast<double>(p) / static_cast<double>(count - 1);
        out.push_back(p + 1 == count ? end : start + f * (end - start));
    }
    return out;
}

double Units::energy_scale() const {
    if (!physical) return 1.0;
    constexpr double hbar = 1.054571817e-34;
    return hbar * hbar / (2.0 * mu);
}

std::string Units::label() const {
    if (!physical) return "natural";
    return "physical:" + format_number(mu);
}

HelixSpec RunConfig::spec() const { return HelixSpec(kappa, tau, rho0, s0); }

void RunConfig::validate() const {
    try {
        (void)spec();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (n_s < 2 || n_phi < 2) throw ConfigError("grid must be at least 2x2");
    if (n_harmonics < 3) throw ConfigError("harmonics must be >= 3");
    if (kpath.count < 1) throw ConfigError("kpath needs at least one point");
    if (!std::isfinite(kpath.n)) throw ConfigError("transverse_n must be finite");
    for (double e : eps_sweep) {
        if (!(e >= 0.0 && e < 1.0)) throw ConfigError("eps_sweep values must lie in [0, 1)");
    }
    if (tau == 0.0 && !s_period) throw ConfigError("tau = 0 needs s_period (the cell length along s)");
    if (s_period && !(*s_period > 0.0)) throw ConfigError("s_period must be positive");
    if (units.physical && !(units.mu > 0.0)) throw ConfigError("physical units need a positive mass");
}

Entries read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    Entries out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

RunConfig make_config(const Entries& entries) {
    RunConfig c;
    bool have_kpath = false;
    for (const auto& [key, value] : entries) {
        if (key == "kappa") {
            c.kappa = parse_real(key, value);
        } else if (key == "tau") {
            c.tau = parse_real(key, value);
        } else if (key == "rho0") {
            c.rho0 = parse_real(key, value);
        } else if (key == "s0") {
            c.s0 = parse_real(key, value);
        } else if (key == "grid") {
            const auto x = value.find_first_of("xX");
            if (x == std::string::npos) throw ConfigError("grid must look like NxM");
            c.n_s = parse_count(key, value.substr(0, x));
            c.n_phi = parse_count(key, value.substr(x + 1));
        } else if (key == "harmonics") {
            c.n_harmonics = static_cast<int>(parse_int(key, value));
        } else if (key == "kpath") {
            const auto parts = split(value, ':');
            if (parts.size() != 3) throw ConfigError("kpath must look like a:b:n");
            c.kpath.start = parse_real(key, parts[0]);
            c.kpath.end = parse_real(key, parts[1]);
            c.kpath.count = parse_count(key, parts[2]);
            have_kpath = true;
        } else if (key == "transverse_n") {
            c.kpath.n = parse_real(key, value);
        } else if (key == "eps_sweep") {
            c.eps_sweep.clear();
            for (const auto& p : split(value, ',')) c.eps_sweep.push_back(parse_real(key, p));
            if (c.eps_sweep.empty()) throw ConfigError("eps_sweep must not be empty");
        } else if (key == "out") {
            if (value.empty()) throw ConfigError("out must not be empty");
            c.out_dir = value;
        } else if (key == "units") {
            if (value == "natural") {
                c.units = {};
            } else if (value.rfind("physical:", 0) == 0) {
                c.units.physical = true;
                c.units.mu = parse_real(key, value.substr(9));
            } else {
                throw ConfigError("units must be natural or physical:<mu>");
            }
        } else if (key == "s_period") {
            c.s_period = parse_real(key, value);
        } else if (key == "corrupt_vkin") {
            c.corrupt_vkin = parse_real(key, value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (!have_kpath) {
        // Zone centre to the zone edge along k_s.
        c.kpath.start = 0.0;
        if (c.tau != 0.0) {
            c.kpath.end = -0.5 * c.tau;
        } else {
            c.kpath.end = c.s_period ? -std::numbers::pi / *c.s_period : 0.0;
        }
    }
    c.validate();
    return c;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace helitube::cli
