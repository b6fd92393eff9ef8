#pragma once

// INI-style experiment configuration.
//
//   [network]   lambda_b, lambda_u (km^-2), e_th (J), p_s, alpha, a_eff, sigma2, slot_seconds
//   [numeric]   NumericPolicy fields; shape_c1..shape_c4 for the distance density
//   [sim]       SimConfig fields
//   [sweep]     parameter, values, outputs, modes
//
// Lines are `key = value`; `#` and `;` start comments. Unknown sections or
// keys and repeated keys are rejected with the offending line number.
// lambda_b, lambda_u and e_th are required unless swept.

#include "rfh/core.hpp"
#include "rfh/mcsim/field.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rfh::io {

/// Malformed configuration text. line() is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

enum class SweptParameter { LambdaB, LambdaU, ETh };
enum class Metric { PTr, TAvg, TTotal, MeanUsers, SustainableRatio };
enum class RunModes { Analytic, Simulate, Both };
enum class Mode { Analytic, Simulate };

inline std::string to_string(SweptParameter p) {
    switch (p) {
    case SweptParameter::LambdaB: return "lambda_b";
    case SweptParameter::LambdaU: return "lambda_u";
    case SweptParameter::ETh: return "e_th";
    }
    return "?";
}

inline std::string to_string(Metric m) {
    switch (m) {
    case Metric::PTr: return "p_tr";
    case Metric::TAvg: return "t_avg";
    case Metric::TTotal: return "t_total";
    case Metric::MeanUsers: return "mean_users";
    case Metric::SustainableRatio: return "sustainable_ratio";
    }
    return "?";
}

inline std::string to_string(RunModes m) {
    switch (m) {
    case RunModes::Analytic: return "analytic";
    case RunModes::Simulate: return "simulate";
    case RunModes::Both: return "both";
    }
    return "?";
}

inline std::string to_string(Mode m) { return m == Mode::Analytic ? "analytic" : "simulate"; }

inline std::string to_string(ErlangIndexMode m) {
    return m == ErlangIndexMode::ShapeConsistent ? "shape_consistent" : "literal_shape";
}

inline std::string to_string(SaturationBasis b) {
    return b == SaturationBasis::TotalThroughput ? "total_throughput" : "cell_throughput";
}

inline std::string to_string(mcsim::EdgeMode m) { return m == mcsim::EdgeMode::Torus ? "torus" : "guard_ring"; }

/// Shortest round-trip decimal form.
inline std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Sweep values are in configuration units: km^-2 for densities, J for e_th.
struct SweepSpec {
    SweptParameter parameter = SweptParameter::LambdaB;
    std::vector<double> values;
    NetworkParams fixed;
    std::vector<Metric> outputs{Metric::PTr};
    RunModes modes = RunModes::Analytic;
};

/// Template parameters with the swept parameter set to `value`.
inline NetworkParams apply_sweep_value(NetworkParams params, SweptParameter parameter, double value) {
    switch (parameter) {
    case SweptParameter::LambdaB: params.lambda_b = units::per_km2_to_per_m2(value); break;
    case SweptParameter::LambdaU: params.lambda_u = units::per_km2_to_per_m2(value); break;
    case SweptParameter::ETh: params.e_th = value; break;
    }
    return params;
}

inline SweepSpec validate(const SweepSpec& spec) {
    if (spec.values.empty())
        throw ValidationError("values", "sweep values must not be empty");
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        if (!std::isfinite(spec.values[i]))
            throw ValidationError("values", "sweep values must be finite");
        if (i > 0 && !(spec.values[i] > spec.values[i - 1]))
            throw ValidationError("values", "sweep values must be strictly increasing");
        validate(apply_sweep_value(spec.fixed, spec.parameter, spec.values[i]));
    }
    if (spec.outputs.empty())
        throw ValidationError("outputs", "sweep outputs must not be empty");
    std::set<Metric> seen;
    for (Metric m : spec.outputs) {
        if (!seen.insert(m).second)
            throw ValidationError("outputs", "sweep output listed twice: " + to_string(m));
        if (m == Metric::SustainableRatio && spec.parameter != SweptParameter::LambdaB)
            throw ValidationError("outputs", "sustainable_ratio requires parameter = lambda_b");
    }
    return spec;
}

struct ExperimentConfig {
    NetworkParams network;
    NumericPolicy policy;
    mcsim::SimConfig sim;
    std::optional<SweepSpec> sweep;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

inline double parse_real(std::string_view s, int line, std::string_view key) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(line, std::string(key) + ": expected a number, got '" + std::string(s) + "'");
    return v;
}

template <class Int>
Int parse_int(std::string_view s, int line, std::string_view key) {
    Int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(line, std::string(key) + ": expected an integer, got '" + std::string(s) + "'");
    return v;
}

inline bool parse_bool(std::string_view s, int line, std::string_view key) {
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    throw ConfigError(line, std::string(key) + ": expected true or false, got '" + std::string(s) + "'");
}

template <class E>
E parse_enum(std::string_view s, std::initializer_list<E> choices, int line, std::string_view key) {
    std::string allowed;
    for (E c : choices) {
        if (s == to_string(c))
            return c;
        allowed += (allowed.empty() ? "" : ", ") + to_string(c);
    }
    throw ConfigError(line, std::string(key) + ": expected one of {" + allowed + "}, got '" + std::string(s) + "'");
}

struct Binding {
    std::function<void(std::string_view value, int line)> set;
    std::function<std::string()> get;
};

using Section = std::vector<std::pair<std::string, Binding>>;

// Stored value = configured value / divisor.
inline Binding real_binding(double& field, std::string key, double divisor = 1.0) {
    return {[&field, key, divisor](std::string_view v, int line) { field = parse_real(v, line, key) / divisor; },
            [&field, divisor] { return format_real(field * divisor); }};
}

template <class Int>
Binding int_binding(Int& field, std::string key) {
    return {[&field, key](std::string_view v, int line) { field = parse_int<Int>(v, line, key); },
            [&field] { return std::to_string(field); }};
}

template <class E>
Binding enum_binding(E& field, std::string key, std::initializer_list<E> choices) {
    std::vector<E> options(choices);
    return {[&field, key, options](std::string_view v, int line) {
                for (E c : options)
                    if (v == to_string(c)) {
                        field = c;
                        return;
                    }
                std::string allowed;
                for (E c : options)
                    allowed += (allowed.empty() ? "" : ", ") + to_string(c);
                throw ConfigError(line, key + ": expected one of {" + allowed + "}, got '" + std::string(v) + "'");
            },
            [&field] { return to_string(field); }};
}

inline std::map<std::string, Section> bindings(ExperimentConfig& c, SweepSpec& sweep) {
    constexpr double km2 = units::kSquareMetersPerSquareKm;
    auto& n = c.network;
    auto& p = c.policy;
    auto& s = c.sim;
    std::map<std::string, Section> out;
    out["network"] = {
        {"lambda_b", real_binding(n.lambda_b, "lambda_b", km2)},
        {"lambda_u", real_binding(n.lambda_u, "lambda_u", km2)},
        {"e_th", real_binding(n.e_th, "e_th")},
        {"p_s", real_binding(n.p_s, "p_s")},
        {"alpha", real_binding(n.alpha, "alpha")},
        {"a_eff", real_binding(n.a_eff, "a_eff")},
        {"sigma2", real_binding(n.sigma2, "sigma2")},
        {"slot_seconds", real_binding(n.slot_seconds, "slot_seconds")},
    };
    out["numeric"] = {
        {"quad_rel_tol", real_binding(p.quad_rel_tol, "quad_rel_tol")},
        {"quad_abs_tol", real_binding(p.quad_abs_tol, "quad_abs_tol")},
        {"quad_max_subdivisions", int_binding(p.quad_max_subdivisions, "quad_max_subdivisions")},
        {"series_tail_eps", real_binding(p.series_tail_eps, "series_tail_eps")},
        {"n_max_cap", int_binding(p.n_max_cap, "n_max_cap")},
        {"k_max_cap", int_binding(p.k_max_cap, "k_max_cap")},
        {"erlang_index_mode", enum_binding(p.erlang_index_mode, "erlang_index_mode",
                                           {ErlangIndexMode::ShapeConsistent, ErlangIndexMode::LiteralShape})},
        {"shape_c1", real_binding(p.distance_shape.c1, "shape_c1")},
        {"shape_c2", real_binding(p.distance_shape.c2, "shape_c2")},
        {"shape_c3", real_binding(p.distance_shape.c3, "shape_c3")},
        {"shape_c4", real_binding(p.distance_shape.c4, "shape_c4")},
        {"saturation_eps", real_binding(p.saturation_eps, "saturation_eps")},
        {"plateau_multiple", real_binding(p.plateau_multiple, "plateau_multiple")},
        {"ratio_min", real_binding(p.ratio_min, "ratio_min")},
        {"ratio_growth", real_binding(p.ratio_growth, "ratio_growth")},
        {"ratio_rel_tol", real_binding(p.ratio_rel_tol, "ratio_rel_tol")},
        {"saturation_basis", enum_binding(p.saturation_basis, "saturation_basis",
                                          {SaturationBasis::TotalThroughput, SaturationBasis::CellThroughput})},
    };
    out["sim"] = {
        {"region_side", real_binding(s.region_side, "region_side")},
        {"n_slots", int_binding(s.n_slots, "n_slots")},
        {"n_replications", int_binding(s.n_replications, "n_replications")},
        {"seed", int_binding(s.seed, "seed")},
        {"edge_mode", enum_binding(s.edge_mode, "edge_mode", {mcsim::EdgeMode::Torus, mcsim::EdgeMode::GuardRing})},
        {"guard_width", real_binding(s.guard_width, "guard_width")},
        {"force_all_bs_transmit",
         {[&s](std::string_view v, int line) { s.force_all_bs_transmit = parse_bool(v, line, "force_all_bs_transmit"); },
          [&s] { return std::string(s.force_all_bs_transmit ? "true" : "false"); }}},
        {"warmup_rounds", int_binding(s.warmup_rounds, "warmup_rounds")},
        {"threads", int_binding(s.threads, "threads")},
    };
    out["sweep"] = {
        {"parameter", enum_binding(sweep.parameter, "parameter",
                                   {SweptParameter::LambdaB, SweptParameter::LambdaU, SweptParameter::ETh})},
        {"values",
         {[&sweep](std::string_view v, int line) {
              sweep.values.clear();
              for (auto item : split_list(v))
                  sweep.values.push_back(parse_real(item, line, "values"));
          },
          [&sweep] {
              std::string s;
              for (double v : sweep.values)
                  s += (s.empty() ? "" : ",") + format_real(v);
              return s;
          }}},
        {"outputs",
         {[&sweep](std::string_view v, int line) {
              sweep.outputs.clear();
              for (auto item : split_list(v))
                  sweep.outputs.push_back(parse_enum(item,
                                                     {Metric::PTr, Metric::TAvg, Metric::TTotal, Metric::MeanUsers,
                                                      Metric::SustainableRatio},
                                                     line, "outputs"));
          },
          [&sweep] {
              std::string s;
              for (Metric m : sweep.outputs)
                  s += (s.empty() ? "" : ",") + to_string(m);
              return s;
          }}},
        {"modes", enum_binding(sweep.modes, "modes", {RunModes::Analytic, RunModes::Simulate, RunModes::Both})},
    };
    return out;
}

inline const Binding* find_binding(const Section& section, std::string_view key) {
    for (const auto& [name, b] : section)
        if (name == key)
            return &b;
    return nullptr;
}

} // namespace detail

/// Parses configuration text; see the header comment for the layout.
inline ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    SweepSpec sweep;
    auto table = detail::bindings(config, sweep);

    std::map<std::string, std::map<std::string, int>> seen; // section -> key -> line
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(line_no, "malformed section header");
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (!table.count(section))
                throw ConfigError(line_no, "unknown section [" + section + "]");
            if (seen.count(section))
                throw ConfigError(line_no, "section [" + section + "] appears twice");
            seen[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(line_no, "expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const auto value = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(line_no, "key '" + key + "' outside any section");
        const auto* binding = detail::find_binding(table[section], key);
        if (!binding)
            throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
        if (auto [it, fresh] = seen[section].emplace(key, line_no); !fresh)
            throw ConfigError(line_no, "duplicate key '" + key + "' (first set on line " +
                                           std::to_string(it->second) + ")");
        binding->set(value, line_no);
    }

    const bool has_sweep = seen.count("sweep") > 0;
    if (has_sweep) {
        for (const char* key : {"parameter", "values"})
            if (!seen["sweep"].count(key))
                throw ValidationError(key, std::string("[sweep] requires '") + key + "'");
        if (seen["network"].count(to_string(sweep.parameter)))
            throw ValidationError(to_string(sweep.parameter),
                                  to_string(sweep.parameter) + " is swept and must not also be fixed in [network]");
    }
    for (const char* key : {"lambda_b", "lambda_u", "e_th"}) {
        const bool swept = has_sweep && to_string(sweep.parameter) == key;
        if (!swept && !seen["network"].count(key))
            throw ValidationError(key, std::string("missing required [network] key '") + key + "'");
    }

    validate(config.policy);
    validate(config.sim);
    if (has_sweep) {
        sweep.fixed = config.network;
        config.sweep = validate(sweep);
        // The swept slot holds the first sweep value so that `network` is usable on its own.
        config.network = apply_sweep_value(config.network, sweep.parameter, sweep.values.front());
    }
    validate(config.network);
    return config;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

/// Fully resolved configuration as ordered (section.key, value) pairs.
/// parse_config of the equivalent INI text reproduces the same values.
inline std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentConfig& config) {
    ExperimentConfig copy = config;
    SweepSpec sweep = config.sweep.value_or(SweepSpec{});
    auto table = detail::bindings(copy, sweep);
    std::vector<std::pair<std::string, std::string>> out;
    for (const char* section : {"network", "numeric", "sim", "sweep"}) {
        if (std::string_view(section) == "sweep" && !config.sweep)
            continue;
        for (const auto& [key, binding] : table[section]) {
            if (config.sweep && std::string_view(section) == "network" && key == to_string(config.sweep->parameter))
                continue;
            out.emplace_back(std::string(section) + "." + key, binding.get());
        }
    }
    return out;
}

} // namespace rfh::io
