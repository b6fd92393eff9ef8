#pragma once

// Parameter sweeps over the analytic model and the simulator, and their CSV
// form.
//
// CSV layout:
//   # key=value           resolved configuration, one line per key
//   value,metric,mode,result,stderr,status
//   <rows sorted by (value, metric, mode)>
//   # wall_time_ms=<value>,<metric>,<mode>,<ms>
//   # generated_at=<UTC timestamp>
// Reals are written as %.17e; analytic rows and failed rows leave the
// empty fields blank. Everything above the trailing comments depends only
// on the configuration and seed.

#include "rfh/analytic.hpp"
#include "rfh/core.hpp"
#include "rfh/io/config.hpp"
#include "rfh/mcsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace rfh::io {

/// Result units: p_tr probability; t_avg bits/slot; t_total bits/slot/km^2;
/// mean_users other users sharing the typical user's cell;
/// sustainable_ratio lambda_u / lambda_b.
struct SweepRecord {
    double value = 0.0;
    Metric metric = Metric::PTr;
    Mode mode = Mode::Analytic;
    std::optional<double> result;
    std::optional<double> stderr_value;
    std::string status = "ok"; ///< "ok" or "error: <message>"
    double wall_time_ms = 0.0;

    bool ok() const { return status == "ok"; }
    bool operator==(const SweepRecord&) const = default;
};

inline bool record_less(const SweepRecord& a, const SweepRecord& b) {
    return std::tuple(a.value, static_cast<int>(a.metric), static_cast<int>(a.mode)) <
           std::tuple(b.value, static_cast<int>(b.metric), static_cast<int>(b.mode));
}

inline const char* kCsvHeader = "value,metric,mode,result,stderr,status";

inline std::string format_csv_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

/// Error text made safe for a single unquoted CSV field.
inline std::string error_status(const std::string& message) {
    std::string s = "error: " + message;
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"')
            c = ';';
    return s;
}

inline void write_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& preamble,
                      std::vector<SweepRecord> records, bool with_timestamp = true) {
    std::stable_sort(records.begin(), records.end(), record_less);
    for (const auto& [k, v] : preamble)
        out << "# " << k << '=' << v << '\n';
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << format_csv_real(r.value) << ',' << to_string(r.metric) << ',' << to_string(r.mode) << ','
            << (r.result ? format_csv_real(*r.result) : "") << ','
            << (r.stderr_value ? format_csv_real(*r.stderr_value) : "") << ',' << r.status << '\n';
    }
    for (const auto& r : records)
        out << "# wall_time_ms=" << format_csv_real(r.value) << ',' << to_string(r.metric) << ','
            << to_string(r.mode) << ',' << format_csv_real(r.wall_time_ms) << '\n';
    if (with_timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# generated_at=" << buf << '\n';
    }
}

struct ParsedCsv {
    std::vector<std::pair<std::string, std::string>> preamble;
    std::vector<SweepRecord> records;
};

/// Inverse of write_csv. Wall times are restored from the trailing comments.
inline ParsedCsv parse_csv(std::istream& in) {
    ParsedCsv out;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    auto fields_of = [](const std::string& s) {
        std::vector<std::string> f;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            f.push_back(item);
        if (!s.empty() && s.back() == ',')
            f.emplace_back();
        return f;
    };
    auto real = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size())
                throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(line_no, "bad number '" + s + "'");
        }
    };
    auto metric_of = [&](const std::string& s) {
        return detail::parse_enum(s, {Metric::PTr, Metric::TAvg, Metric::TTotal, Metric::MeanUsers,
                                      Metric::SustainableRatio},
                                  line_no, "metric");
    };
    auto mode_of = [&](const std::string& s) { return detail::parse_enum(s, {Mode::Analytic, Mode::Simulate}, line_no, "mode"); };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("# ", 0) == 0) {
            const auto body = line.substr(2);
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                continue;
            const auto key = body.substr(0, eq);
            const auto value = body.substr(eq + 1);
            if (!header_seen) {
                out.preamble.emplace_back(key, value);
            } else if (key == "wall_time_ms") {
                const auto f = fields_of(value);
                if (f.size() != 4)
                    throw ConfigError(line_no, "malformed wall_time_ms comment");
                const double v = real(f[0]);
                const Metric m = metric_of(f[1]);
                const Mode md = mode_of(f[2]);
                for (auto& r : out.records)
                    if (r.value == v && r.metric == m && r.mode == md)
                        r.wall_time_ms = real(f[3]);
            }
            continue;
        }
        if (!header_seen) {
            if (line != kCsvHeader)
                throw ConfigError(line_no, "expected CSV header '" + std::string(kCsvHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto f = fields_of(line);
        if (f.size() != 6)
            throw ConfigError(line_no, "expected 6 fields, got " + std::to_string(f.size()));
        SweepRecord r;
        r.value = real(f[0]);
        r.metric = metric_of(f[1]);
        r.mode = mode_of(f[2]);
        if (!f[3].empty())
            r.result = real(f[3]);
        if (!f[4].empty())
            r.stderr_value = real(f[4]);
        r.status = f[5];
        out.records.push_back(std::move(r));
    }
    if (!header_seen)
        throw ConfigError(0, "CSV header not found");
    return out;
}

namespace detail {

inline double saturation_metric(const mcsim::SimOutcome& s, SaturationBasis basis, double* err) {
    if (basis == SaturationBasis::TotalThroughput) {
        *err = s.t_total_stderr;
        return s.t_total_hat;
    }
    *err = s.t_avg_stderr;
    return s.t_avg_hat;
}

} // namespace detail

/// Simulated sustainable ratio by grid scan: ratios ratio_min * growth^i up
/// to plateau_multiple. The plateau is the largest simulated metric; the
/// ratio is the first grid point within saturation_eps of it (allowing two
/// standard errors of noise).
inline double simulated_sustainable_ratio(const NetworkParams& tmpl, const NumericPolicy& policy,
                                          const mcsim::SimConfig& sim) {
    std::vector<double> ratios;
    for (double r = policy.ratio_min; r < policy.plateau_multiple; r *= policy.ratio_growth)
        ratios.push_back(r);
    ratios.push_back(policy.plateau_multiple);
    std::vector<double> metric, err;
    for (double r : ratios) {
        NetworkParams p = tmpl;
        p.lambda_u = r * tmpl.lambda_b;
        double e = 0.0;
        metric.push_back(detail::saturation_metric(mcsim::estimate(p, sim), policy.saturation_basis, &e));
        err.push_back(e);
    }
    const double plateau = *std::max_element(metric.begin(), metric.end());
    for (std::size_t i = 0; i < ratios.size(); ++i)
        if (metric[i] + 2.0 * err[i] >= (1.0 - policy.saturation_eps) * plateau)
            return ratios[i];
    return ratios.back();
}

struct SweepOptions {
    bool stop_on_error = false;
};

/// Evaluates every (value, metric, mode) of the sweep. A failing point
/// becomes an error row; the remaining points still run.
inline std::vector<SweepRecord> run_sweep(const SweepSpec& spec_in, const NumericPolicy& policy,
                                          const mcsim::SimConfig& sim, const SweepOptions& options = {}) {
    const SweepSpec spec = validate(spec_in);
    std::vector<Mode> modes;
    if (spec.modes != RunModes::Simulate)
        modes.push_back(Mode::Analytic);
    if (spec.modes != RunModes::Analytic)
        modes.push_back(Mode::Simulate);

    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    std::vector<SweepRecord> records;
    for (double value : spec.values) {
        const NetworkParams params = apply_sweep_value(spec.fixed, spec.parameter, value);
        for (Mode mode : modes) {
            // The simulator runs once per value and feeds every simulated metric.
            std::optional<mcsim::SimOutcome> sim_out;
            std::string sim_error;
            double sim_ms = 0.0;
            const bool needs_sim = mode == Mode::Simulate &&
                                   std::any_of(spec.outputs.begin(), spec.outputs.end(),
                                               [](Metric m) { return m != Metric::SustainableRatio; });
            if (needs_sim) {
                const auto t0 = clock::now();
                try {
                    sim_out = mcsim::estimate(params, sim);
                } catch (const std::exception& e) {
                    if (options.stop_on_error)
                        throw;
                    sim_error = e.what();
                }
                sim_ms = ms_since(t0);
            }
            // Analytic P(Tr) and E[N] come from one evaluation.
            std::optional<analytic::DeliveryBreakdown> delivery;

            for (Metric metric : spec.outputs) {
                SweepRecord rec;
                rec.value = value;
                rec.metric = metric;
                rec.mode = mode;
                const auto t0 = clock::now();
                try {
                    if (mode == Mode::Analytic) {
                        switch (metric) {
                        case Metric::PTr:
                        case Metric::MeanUsers:
                            if (!delivery)
                                delivery = analytic::delivery_prob(params, policy);
                            rec.result = metric == Metric::PTr ? delivery->p_tr : delivery->expected_users_typical_cell;
                            break;
                        case Metric::TAvg:
                            rec.result = analytic::avg_cell_throughput(params, policy);
                            break;
                        case Metric::TTotal:
                            rec.result =
                                units::per_m2_to_per_km2(analytic::total_throughput(params, policy).t_total);
                            break;
                        case Metric::SustainableRatio:
                            rec.result = analytic::sustainable_ratio(params.lambda_b, params, policy).ratio;
                            break;
                        }
                    } else if (metric == Metric::SustainableRatio) {
                        rec.result = simulated_sustainable_ratio(params, policy, sim);
                    } else {
                        if (!sim_out)
                            throw std::runtime_error(sim_error);
                        const auto& s = *sim_out;
                        switch (metric) {
                        case Metric::PTr:
                            rec.result = s.p_tr_hat;
                            rec.stderr_value = s.p_tr_stderr;
                            break;
                        case Metric::TAvg:
                            rec.result = s.t_avg_hat;
                            rec.stderr_value = s.t_avg_stderr;
                            break;
                        case Metric::TTotal:
                            rec.result = units::per_m2_to_per_km2(s.t_total_hat);
                            rec.stderr_value = units::per_m2_to_per_km2(s.t_total_stderr);
                            break;
                        case Metric::MeanUsers:
                            rec.result = s.mean_other_users_typical;
                            rec.stderr_value = s.mean_other_users_stderr;
                            break;
                        case Metric::SustainableRatio:
                            break;
                        }
                    }
                } catch (const std::exception& e) {
                    if (options.stop_on_error)
                        throw;
                    rec.result.reset();
                    rec.stderr_value.reset();
                    rec.status = error_status(e.what());
                }
                rec.wall_time_ms = ms_since(t0) + (metric == spec.outputs.front() ? sim_ms : 0.0);
                records.push_back(std::move(rec));
            }
        }
    }
    std::stable_sort(records.begin(), records.end(), record_less);
    return records;
}

/// Comparison of the fitted distance density against the exact one.
struct FitReport {
    analytic::DistanceFit fit;
    double max_abs_error = 0.0; ///< max |target - fitted| over the output grid
    double peak = 0.0;          ///< max target over the output grid
};

/// Output grid for the fit comparison: r = 0, 0.025, ..., 2.5.
inline std::vector<double> fit_output_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 100; ++i)
        g.push_back(0.025 * i);
    return g;
}

/// Writes r,target,fitted,reference rows (normalized units, lambda_b = 1) with
/// the fitted and reference coefficients in the comment preamble.
inline FitReport write_fit_csv(std::ostream& out, const analytic::DistanceFit& fit, const NumericPolicy& policy) {
    const auto opts = analytic::fit_quad_options(policy);
    const DistanceShape reference{};
    FitReport report{fit, 0.0, 0.0};
    std::ostringstream rows;
    for (double r : fit_output_grid()) {
        const double target = analytic::nearest_distance_pdf_normalized(r);
        const double fitted = r > 0.0 ? analytic::reconstructed_distance_pdf(r, fit.shape, opts) : 0.0;
        const double ref = r > 0.0 ? analytic::reconstructed_distance_pdf(r, reference, opts) : 0.0;
        report.max_abs_error = std::max(report.max_abs_error, std::abs(target - fitted));
        report.peak = std::max(report.peak, target);
        rows << format_csv_real(r) << ',' << format_csv_real(target) << ',' << format_csv_real(fitted) << ','
             << format_csv_real(ref) << '\n';
    }
    out << "# fitted_c1=" << format_real(fit.shape.c1) << '\n'
        << "# fitted_c2=" << format_real(fit.shape.c2) << '\n'
        << "# fitted_c3=" << format_real(fit.shape.c3) << '\n'
        << "# fitted_c4=" << format_real(fit.shape.c4) << '\n'
        << "# reference_c1=" << format_real(reference.c1) << '\n'
        << "# reference_c2=" << format_real(reference.c2) << '\n'
        << "# reference_c3=" << format_real(reference.c3) << '\n'
        << "# reference_c4=" << format_real(reference.c4) << '\n'
        << "# fit_sse=" << format_real(fit.fit.residual) << '\n'
        << "# max_abs_error=" << format_real(report.max_abs_error) << '\n'
        << "# peak=" << format_real(report.peak) << '\n'
        << "r,target,fitted,reference\n"
        << rows.str();
    return report;
}

} // namespace rfh::io
