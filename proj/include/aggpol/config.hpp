#ifndef AGGPOL_CONFIG_HPP
#define AGGPOL_CONFIG_HPP

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aggpol/drive.hpp"
#include "aggpol/dynamics.hpp"
#include "aggpol/errors.hpp"
#include "aggpol/langevin.hpp"
#include "aggpol/media.hpp"
#include "aggpol/pearson.hpp"

namespace aggpol {

// ============================================================================
//  Strict TOML-subset configuration
//
//  Sections [medium], [noise], [drive], [run]; scalar values (float, int,
//  bool, quoted string) and single-line float arrays.  The parser is strict
//  by design: any section or key it does not recognize aborts with the
//  offending name, so a typo can never silently fall back to a default.
// ============================================================================

struct RunSettings {
    double alpha = 1.0;
    double dt = 1e-9;
    double t_record = 25e-6;
    double t_end = 0.0; ///< ensemble horizon; 0 = pick from relaxation rate
    CouplingMode coupling = CouplingMode::self_consistent;
    unsigned long long seed = 0;
    std::size_t n_traj = 10000;
    std::size_t record_stride = 100;
    SdeScheme scheme = SdeScheme::euler_ito;
    double rtol = 1e-8;
    double atol = 1e-12;
    double H = 1e-3;
    double A_el = 1e-6;
    double box = 1e-3;
    int threads = 0; ///< 0 = automatic
};

struct FullConfig {
    MediumParams medium{};
    std::optional<NoiseParams> noise;
    DriveSignal drive = DriveSignal::zero();
    RunSettings run{};
    bool has_medium = false;
    bool has_drive = false;
};

/// The relaxation/noise parameter set shipped with the presets.
inline NoiseParams reference_noise()
{
    NoiseParams n;
    n.alpha_bar = 2.10e7;
    n.gamma_bar = 1.41e7;
    n.alpha_prime = 2242.08;
    n.gamma_prime = 1446.9;
    n.epsilon = 0.983;
    n.u = 0.568;
    n.chi = 1;
    return n;
}

namespace detail {

struct TomlValue {
    enum class Kind { number, boolean, string, array } kind = Kind::number;
    double num = 0.0;
    bool b = false;
    std::string str;
    std::vector<double> arr;
    std::string raw; ///< verbatim text, for integer-exact rebinds
};

inline std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& tok, const std::string& where)
{
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw config_error("config: malformed number '" + tok + "' at " + where);
    return v;
}

inline TomlValue parse_value(const std::string& text, const std::string& where)
{
    TomlValue v;
    v.raw = text;
    if (text.empty())
        throw config_error("config: empty value at " + where);
    if (text == "true" || text == "false") {
        v.kind = TomlValue::Kind::boolean;
        v.b = text == "true";
        return v;
    }
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            throw config_error("config: unterminated string at " + where);
        v.kind = TomlValue::Kind::string;
        v.str = text.substr(1, text.size() - 2);
        return v;
    }
    if (text.front() == '[') {
        if (text.back() != ']')
            throw config_error("config: unterminated array at " + where);
        v.kind = TomlValue::Kind::array;
        std::string inner = text.substr(1, text.size() - 2);
        std::stringstream ss(inner);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty())
                throw config_error("config: empty array element at " + where);
            v.arr.push_back(parse_number(tok, where));
        }
        return v;
    }
    v.kind = TomlValue::Kind::number;
    v.num = parse_number(text, where);
    return v;
}

using Section = std::map<std::string, TomlValue>;
using Document = std::map<std::string, Section>;

inline Document parse_toml_subset(std::istream& in)
{
    Document doc;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Strip comments outside of strings.
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                in_str = !in_str;
            else if (line[i] == '#' && !in_str) {
                line.erase(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("config: malformed section header at " + where);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw config_error("config: empty section name at " + where);
            doc[section]; // register even if empty
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: expected key = value at " + where);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("config: empty key at " + where);
        if (section.empty())
            throw config_error("config: key '" + key + "' outside any section at "
                               + where);
        if (doc[section].count(key))
            throw config_error("config: duplicate key '" + section + "." + key + "'");
        doc[section][key] = parse_value(val, where);
    }
    return doc;
}

inline double want_number(const Section& s, const std::string& sec,
                          const std::string& key, const TomlValue& v)
{
    (void)s;
    if (v.kind != TomlValue::Kind::number)
        throw config_error("config: '" + sec + "." + key + "' must be a number");
    return v.num;
}

inline const std::vector<double>& want_array(const std::string& sec,
                                             const std::string& key,
                                             const TomlValue& v)
{
    if (v.kind != TomlValue::Kind::array)
        throw config_error("config: '" + sec + "." + key + "' must be an array");
    return v.arr;
}

inline const std::string& want_string(const std::string& sec,
                                      const std::string& key, const TomlValue& v)
{
    if (v.kind != TomlValue::Kind::string)
        throw config_error("config: '" + sec + "." + key + "' must be a string");
    return v.str;
}

} // namespace detail

/// Parse a configuration document.  Unknown sections and keys are fatal.
inline FullConfig parse_config(std::istream& in)
{
    using detail::TomlValue;
    const detail::Document doc = detail::parse_toml_subset(in);

    FullConfig cfg;
    for (const auto& [sec, entries] : doc) {
        if (sec == "medium") {
            cfg.has_medium = true;
            for (const auto& [key, v] : entries) {
                if (key == "sigma_c")
                    cfg.medium.sigma_c = detail::want_number(entries, sec, key, v);
                else if (key == "sigma_e")
                    cfg.medium.sigma_e = detail::want_number(entries, sec, key, v);
                else if (key == "S_L")
                    cfg.medium.S_L = detail::want_number(entries, sec, key, v);
                else if (key == "C_m")
                    cfg.medium.C_m = detail::want_number(entries, sec, key, v);
                else if (key == "R")
                    cfg.medium.R = detail::want_number(entries, sec, key, v);
                else if (key == "phi")
                    cfg.medium.phi = detail::want_number(entries, sec, key, v);
                else if (key == "phi_box")
                    cfg.medium.phi_box = detail::want_number(entries, sec, key, v);
                else if (key == "h")
                    cfg.medium.h = detail::want_number(entries, sec, key, v);
                else
                    throw config_error("config: unknown key 'medium." + key + "'");
            }
        } else if (sec == "noise") {
            NoiseParams n;
            for (const auto& [key, v] : entries) {
                if (key == "alpha_bar")
                    n.alpha_bar = detail::want_number(entries, sec, key, v);
                else if (key == "gamma_bar")
                    n.gamma_bar = detail::want_number(entries, sec, key, v);
                else if (key == "alpha_prime")
                    n.alpha_prime = detail::want_number(entries, sec, key, v);
                else if (key == "gamma_prime")
                    n.gamma_prime = detail::want_number(entries, sec, key, v);
                else if (key == "epsilon")
                    n.epsilon = detail::want_number(entries, sec, key, v);
                else if (key == "u")
                    n.u = detail::want_number(entries, sec, key, v);
                else if (key == "chi")
                    n.chi = static_cast<int>(detail::want_number(entries, sec, key, v));
                else
                    throw config_error("config: unknown key 'noise." + key + "'");
            }
            cfg.noise = n;
        } else if (sec == "drive") {
            cfg.has_drive = true;
            std::string kind = "none";
            double amplitude = 0.0, t_on = 0.0, E0 = 0.0, t_f = 20e-6;
            std::vector<double> times, amplitudes;
            for (const auto& [key, v] : entries) {
                if (key == "kind")
                    kind = detail::want_string(sec, key, v);
                else if (key == "amplitude")
                    amplitude = detail::want_number(entries, sec, key, v);
                else if (key == "t_on")
                    t_on = detail::want_number(entries, sec, key, v);
                else if (key == "E0")
                    E0 = detail::want_number(entries, sec, key, v);
                else if (key == "t_f")
                    t_f = detail::want_number(entries, sec, key, v);
                else if (key == "times")
                    times = detail::want_array(sec, key, v);
                else if (key == "amplitudes")
                    amplitudes = detail::want_array(sec, key, v);
                else
                    throw config_error("config: unknown key 'drive." + key + "'");
            }
            if (kind == "none")
                cfg.drive = DriveSignal::zero();
            else if (kind == "step")
                cfg.drive = DriveSignal::step(amplitude, t_on);
            else if (kind == "step_train")
                cfg.drive = DriveSignal::step_train(times, amplitudes);
            else if (kind == "gaussian")
                cfg.drive = DriveSignal::gaussian_pulse(E0, t_f);
            else
                throw config_error("config: unknown drive kind '" + kind + "'");
        } else if (sec == "run") {
            for (const auto& [key, v] : entries) {
                if (key == "alpha")
                    cfg.run.alpha = detail::want_number(entries, sec, key, v);
                else if (key == "dt")
                    cfg.run.dt = detail::want_number(entries, sec, key, v);
                else if (key == "t_record")
                    cfg.run.t_record = detail::want_number(entries, sec, key, v);
                else if (key == "t_end")
                    cfg.run.t_end = detail::want_number(entries, sec, key, v);
                else if (key == "coupling") {
                    const std::string& c = detail::want_string(sec, key, v);
                    if (c == "fixed_field")
                        cfg.run.coupling = CouplingMode::fixed_field;
                    else if (c == "self_consistent")
                        cfg.run.coupling = CouplingMode::self_consistent;
                    else
                        throw config_error("config: unknown coupling '" + c + "'");
                } else if (key == "seed") {
                    if (v.kind != TomlValue::Kind::number)
                        throw config_error("config: 'run.seed' must be an integer");
                    try {
                        cfg.run.seed = std::stoull(v.raw);
                    } catch (const std::exception&) {
                        throw config_error("config: 'run.seed' must be a "
                                           "non-negative integer");
                    }
                } else if (key == "n_traj")
                    cfg.run.n_traj = static_cast<std::size_t>(
                        detail::want_number(entries, sec, key, v));
                else if (key == "record_stride")
                    cfg.run.record_stride = static_cast<std::size_t>(
                        detail::want_number(entries, sec, key, v));
                else if (key == "scheme") {
                    const std::string& s = detail::want_string(sec, key, v);
                    if (s == "euler_ito")
                        cfg.run.scheme = SdeScheme::euler_ito;
                    else if (s == "heun_stratonovich")
                        cfg.run.scheme = SdeScheme::heun_stratonovich;
                    else
                        throw config_error("config: unknown scheme '" + s + "'");
                } else if (key == "rtol")
                    cfg.run.rtol = detail::want_number(entries, sec, key, v);
                else if (key == "atol")
                    cfg.run.atol = detail::want_number(entries, sec, key, v);
                else if (key == "H")
                    cfg.run.H = detail::want_number(entries, sec, key, v);
                else if (key == "A_el")
                    cfg.run.A_el = detail::want_number(entries, sec, key, v);
                else if (key == "box")
                    cfg.run.box = detail::want_number(entries, sec, key, v);
                else if (key == "threads")
                    cfg.run.threads = static_cast<int>(
                        detail::want_number(entries, sec, key, v));
                else
                    throw config_error("config: unknown key 'run." + key + "'");
            }
        } else {
            throw config_error("config: unknown section [" + sec + "]");
        }
    }
    return cfg;
}

inline FullConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("config: cannot open " + path);
    return parse_config(in);
}

} // namespace aggpol

#endif // AGGPOL_CONFIG_HPP
