// Command-line front end: analytic, simulate, sweep and fit subcommands.
//
// Exit codes: 0 every point succeeded, 1 at least one point failed,
// 2 configuration or usage error.

#include "rfh/analytic.hpp"
#include "rfh/io/config.hpp"
#include "rfh/io/sweep.hpp"
#include "rfh/mcsim.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct Overrides {
    std::string config_path;
    std::optional<double> lambda_b; // km^-2
    std::optional<double> lambda_u; // km^-2
    std::optional<double> e_th;     // J
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_path;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_network) {
    cmd->add_option("--config", o.config_path, "configuration file")->required()->check(CLI::ExistingFile);
    if (with_network) {
        cmd->add_option("--lambda-b", o.lambda_b, "BS density override, km^-2");
        cmd->add_option("--lambda-u", o.lambda_u, "user density override, km^-2");
        cmd->add_option("--e-th", o.e_th, "energy threshold override, J");
        cmd->add_option("--seed", o.seed, "simulator seed override");
        cmd->add_option("--threads", o.threads, "simulator worker threads (RFH_THREADS caps this)");
    }
    cmd->add_option("--out", o.out_path, "output CSV path (default: stdout)");
}

rfh::io::ExperimentConfig resolve(const Overrides& o) {
    using rfh::io::SweptParameter;
    auto config = rfh::io::load_config(o.config_path);
    auto set = [&](const std::optional<double>& v, SweptParameter p, double& field, double divisor) {
        if (!v)
            return;
        if (config.sweep && config.sweep->parameter == p)
            throw rfh::ValidationError(rfh::io::to_string(p),
                                       rfh::io::to_string(p) + " is swept and cannot be overridden");
        field = *v / divisor;
        if (config.sweep)
            config.sweep->fixed = rfh::io::apply_sweep_value(config.sweep->fixed, p, *v);
    };
    constexpr double km2 = rfh::units::kSquareMetersPerSquareKm;
    set(o.lambda_b, SweptParameter::LambdaB, config.network.lambda_b, km2);
    set(o.lambda_u, SweptParameter::LambdaU, config.network.lambda_u, km2);
    set(o.e_th, SweptParameter::ETh, config.network.e_th, 1.0);
    if (o.seed)
        config.sim.seed = *o.seed;
    if (o.threads)
        config.sim.threads = *o.threads;
    rfh::validate(config.network);
    rfh::mcsim::validate(config.sim);
    if (config.sweep)
        rfh::io::validate(*config.sweep);
    return config;
}

/// Writes to --out or stdout.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw rfh::io::ConfigError(0, "cannot open output file '" + path + "'");
    write(out);
}

int run_point(const Overrides& o, rfh::io::RunModes modes) {
    auto config = resolve(o);
    // A single-point sweep at the configured lambda_b.
    rfh::io::SweepSpec spec;
    spec.parameter = rfh::io::SweptParameter::LambdaB;
    spec.values = {rfh::units::per_m2_to_per_km2(config.network.lambda_b)};
    spec.fixed = config.network;
    spec.outputs = {rfh::io::Metric::PTr, rfh::io::Metric::TAvg, rfh::io::Metric::TTotal,
                    rfh::io::Metric::MeanUsers};
    spec.modes = modes;
    config.sweep.reset();
    const auto records = rfh::io::run_sweep(spec, config.policy, config.sim);
    emit(o.out_path, [&](std::ostream& out) { rfh::io::write_csv(out, rfh::io::resolved_entries(config), records); });
    for (const auto& r : records)
        if (!r.ok())
            return kExitPartial;
    return kExitOk;
}

int run_sweep_command(const Overrides& o) {
    const auto config = resolve(o);
    if (!config.sweep)
        throw rfh::io::ConfigError(0, "the sweep command needs a [sweep] section");
    const auto records = rfh::io::run_sweep(*config.sweep, config.policy, config.sim);
    emit(o.out_path, [&](std::ostream& out) { rfh::io::write_csv(out, rfh::io::resolved_entries(config), records); });
    int failed = 0;
    for (const auto& r : records)
        if (!r.ok())
            ++failed;
    if (failed > 0)
        std::cerr << "rfh: " << failed << " of " << records.size() << " sweep points failed\n";
    return failed > 0 ? kExitPartial : kExitOk;
}

int run_fit(const Overrides& o, double max_error_fraction) {
    const auto config = resolve(o);
    const auto fit = rfh::analytic::fit_conditional_distance_pdf(config.policy);
    rfh::io::FitReport report;
    emit(o.out_path, [&](std::ostream& out) { report = rfh::io::write_fit_csv(out, fit, config.policy); });
    std::cerr << "rfh: c1=" << fit.shape.c1 << " c3=" << fit.shape.c3 << " c4=" << fit.shape.c4
              << " max |target - fitted| = " << report.max_abs_error << " (peak " << report.peak << ")\n";
    if (report.max_abs_error > max_error_fraction * report.peak) {
        std::cerr << "rfh: fit error exceeds " << max_error_fraction << " of the peak\n";
        return kExitPartial;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delivery probability and throughput of RF-powered cellular networks"};
    app.require_subcommand(1);
    Overrides o;
    double max_error_fraction = 0.05;

    auto* analytic = app.add_subcommand("analytic", "evaluate the analytic model at one point");
    auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo simulator at one point");
    auto* sweep = app.add_subcommand("sweep", "run the [sweep] section of the configuration");
    auto* fit = app.add_subcommand("fit", "fit the cell distance density and emit the comparison");
    for (auto* cmd : {analytic, simulate, sweep})
        add_common(cmd, o, true);
    add_common(fit, o, false);
    fit->add_option("--max-error", max_error_fraction, "allowed max |target - fitted| as a fraction of the peak");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (analytic->parsed())
            return run_point(o, rfh::io::RunModes::Analytic);
        if (simulate->parsed())
            return run_point(o, rfh::io::RunModes::Simulate);
        if (sweep->parsed())
            return run_sweep_command(o);
        return run_fit(o, max_error_fraction);
    } catch (const rfh::ValidationError& e) {
        std::cerr << "rfh: invalid " << e.field() << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const rfh::io::ConfigError& e) {
        std::cerr << "rfh: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "rfh: " << e.what() << '\n';
        return kExitPartial;
    }
}
