#include "rfh/io/config.hpp"
#include "rfh/io/sweep.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <string>

namespace io = rfh::io;

namespace {

const char* kBaseline = R"(# reference point
[network]
lambda_b = 100
lambda_u = 450
e_th = 1e-5
p_s = 1
alpha = 3
a_eff = 0.5

[sim]
region_side = 1000
)";

std::string config_error(const std::string& text) {
    try {
        io::parse_config(text);
    } catch (const io::ConfigError& e) {
        return std::string("config:") + e.what();
    } catch (const rfh::ValidationError& e) {
        return "field:" + e.field();
    }
    return "";
}

TEST(Config, BaselineLoads) {
    const auto c = io::parse_config(kBaseline);
    EXPECT_DOUBLE_EQ(c.network.lambda_b, 1e-4);
    EXPECT_DOUBLE_EQ(c.network.lambda_u, 4.5e-4);
    EXPECT_EQ(c.network.e_th, 1e-5);
    EXPECT_EQ(c.sim.region_side, 1000.0);
    EXPECT_FALSE(c.sweep.has_value());
}

TEST(Config, MissingRequiredKeyNamesField) {
    EXPECT_EQ(config_error("[network]\nlambda_u = 450\ne_th = 1e-5\n"), "field:lambda_b");
}

TEST(Config, CoreValidationSurfaces) {
    EXPECT_EQ(config_error(std::string(kBaseline) + "[numeric]\n" + "quad_rel_tol = -1\n"), "field:quad_rel_tol");
    EXPECT_EQ(config_error("[network]\nlambda_b=100\nlambda_u=450\ne_th=1e-5\nalpha=2\n"), "field:alpha");
}

TEST(Config, StrictParsingReportsLines) {
    EXPECT_EQ(config_error("[network]\nlambda_b = 100\nlambda_bb = 3\n"), "config:line 3: unknown key 'lambda_bb' in [network]");
    EXPECT_EQ(config_error("[network]\nlambda_b = 100\nlambda_b = 200\n"),
              "config:line 3: duplicate key 'lambda_b' (first set on line 2)");
    EXPECT_EQ(config_error("[nework]\n"), "config:line 1: unknown section [nework]");
    EXPECT_EQ(config_error("lambda_b = 1\n"), "config:line 1: key 'lambda_b' outside any section");
    EXPECT_EQ(config_error("[network]\nlambda_b = 1x\n"), "config:line 2: lambda_b: expected a number, got '1x'");
    EXPECT_EQ(config_error("[sim]\nedge_mode = sphere\n"),
              "config:line 2: edge_mode: expected one of {torus, guard_ring}, got 'sphere'");
}

TEST(Config, SweepSection) {
    const auto c = io::parse_config(R"(
[network]
lambda_u = 150
e_th = 7e-5
[sweep]
parameter = lambda_b
values = 100, 300, 600
outputs = p_tr, sustainable_ratio
modes = both
)");
    ASSERT_TRUE(c.sweep);
    EXPECT_EQ(c.sweep->values, (std::vector<double>{100, 300, 600}));
    EXPECT_EQ(c.sweep->modes, io::RunModes::Both);
    EXPECT_EQ(c.sweep->outputs.size(), 2u);
    EXPECT_DOUBLE_EQ(c.network.lambda_b, 1e-4);
}

TEST(Config, SweepValidation) {
    const std::string net = "[network]\nlambda_u = 150\ne_th = 7e-5\n";
    EXPECT_EQ(config_error(net + "[sweep]\nparameter = lambda_b\nvalues =\n"), "config:line 6: values: expected a number, got ''");
    EXPECT_EQ(config_error(net + "[sweep]\nparameter = lambda_b\nvalues = 300, 100\n"), "field:values");
    EXPECT_EQ(config_error("[network]\nlambda_b=100\nlambda_u = 150\ne_th = 7e-5\n[sweep]\nparameter = lambda_b\nvalues = 1\n"),
              "field:lambda_b");
    EXPECT_EQ(config_error(net + "lambda_b = 100\n[sweep]\nparameter = lambda_u\nvalues = 1\noutputs = sustainable_ratio\n"),
              "field:lambda_u");
    io::SweepSpec spec;
    EXPECT_THROW(io::validate(spec), rfh::ValidationError);
}

TEST(Config, ResolvedEntriesRoundTrip) {
    const auto c = io::parse_config(kBaseline);
    std::string text;
    std::string section;
    for (const auto& [key, value] : io::resolved_entries(c)) {
        const auto dot = key.find('.');
        if (key.substr(0, dot) != section) {
            section = key.substr(0, dot);
            text += "[" + section + "]\n";
        }
        text += key.substr(dot + 1) + " = " + value + "\n";
    }
    const auto again = io::parse_config(text);
    EXPECT_EQ(io::resolved_entries(again), io::resolved_entries(c));
    EXPECT_EQ(again.network.lambda_b, c.network.lambda_b);
}

io::SweepSpec small_spec(io::RunModes modes) {
    io::SweepSpec s;
    s.parameter = io::SweptParameter::LambdaB;
    s.values = {300, 600};
    s.fixed.lambda_u = rfh::units::per_km2_to_per_m2(300);
    s.fixed.e_th = 3e-5;
    s.outputs = {io::Metric::PTr, io::Metric::TTotal, io::Metric::MeanUsers};
    s.modes = modes;
    return s;
}

rfh::mcsim::SimConfig tiny_sim() {
    rfh::mcsim::SimConfig c;
    c.region_side = 300.0;
    c.n_slots = 60;
    c.n_replications = 2;
    c.seed = 4;
    return c;
}

std::string body_of(const std::string& csv) {
    std::string out;
    std::istringstream in(csv);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.rfind("value,", 0) == 0)
            header = true;
        if (header && line.rfind("#", 0) == 0)
            continue;
        out += line + "\n";
    }
    return out;
}

TEST(Sweep, CsvRoundTripAndOrdering) {
    const auto records = io::run_sweep(small_spec(io::RunModes::Both), rfh::NumericPolicy{}, tiny_sim());
    ASSERT_EQ(records.size(), 12u);
    for (std::size_t i = 1; i < records.size(); ++i)
        EXPECT_TRUE(io::record_less(records[i - 1], records[i]));
    for (const auto& r : records) {
        EXPECT_TRUE(r.ok()) << r.status;
        EXPECT_EQ(r.stderr_value.has_value(), r.mode == io::Mode::Simulate);
    }
    std::ostringstream out;
    const std::vector<std::pair<std::string, std::string>> pre = {{"network.lambda_u", "300"}};
    io::write_csv(out, pre, records);
    std::istringstream in(out.str());
    const auto parsed = io::parse_csv(in);
    EXPECT_EQ(parsed.preamble, pre);
    EXPECT_EQ(parsed.records, records);
}

TEST(Sweep, RerunGivesIdenticalBody) {
    auto run = [] {
        std::ostringstream out;
        io::write_csv(out, {}, io::run_sweep(small_spec(io::RunModes::Simulate), rfh::NumericPolicy{}, tiny_sim()));
        return out.str();
    };
    const auto a = run();
    const auto b = run();
    EXPECT_EQ(body_of(a), body_of(b));
    EXPECT_NE(body_of(a).find("simulate"), std::string::npos);
}

TEST(Sweep, FailingPointsBecomeErrorRows) {
    rfh::NumericPolicy pol;
    pol.quad_max_subdivisions = 1;
    pol.quad_rel_tol = 1e-13;
    const auto records = io::run_sweep(small_spec(io::RunModes::Analytic), pol, tiny_sim());
    ASSERT_EQ(records.size(), 6u);
    bool any_error = false;
    for (const auto& r : records)
        if (!r.ok()) {
            any_error = true;
            EXPECT_FALSE(r.result);
            EXPECT_EQ(r.status.rfind("error: ", 0), 0u);
            EXPECT_EQ(r.status.find(','), std::string::npos);
        }
    EXPECT_TRUE(any_error);
}

TEST(Sweep, EmptyValuesRejectedBeforeWork) {
    auto spec = small_spec(io::RunModes::Analytic);
    spec.values.clear();
    EXPECT_THROW(io::run_sweep(spec, rfh::NumericPolicy{}, tiny_sim()), rfh::ValidationError);
}

TEST(FitCsv, TargetIntegratesToOneAndReportsError) {
    const rfh::NumericPolicy pol;
    const auto fit = rfh::analytic::fit_conditional_distance_pdf(pol);
    std::ostringstream out;
    const auto report = io::write_fit_csv(out, fit, pol);
    EXPECT_LT(report.max_abs_error, 0.05 * report.peak);

    std::istringstream in(out.str());
    std::string line;
    std::vector<std::array<double, 4>> rows;
    bool header = false;
    int comments = 0;
    while (std::getline(in, line)) {
        if (line[0] == '#') {
            ++comments;
            continue;
        }
        if (!header) {
            EXPECT_EQ(line, "r,target,fitted,reference");
            header = true;
            continue;
        }
        std::array<double, 4> row{};
        std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &row[0], &row[1], &row[2], &row[3]);
        rows.push_back(row);
    }
    EXPECT_GE(comments, 8);
    double mass = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        mass += 0.5 * (rows[i][1] + rows[i - 1][1]) * (rows[i][0] - rows[i - 1][0]);
    EXPECT_NEAR(mass, 1.0, 0.01);
    EXPECT_NE(out.str().find("# fitted_c1="), std::string::npos);
    EXPECT_NE(out.str().find("# reference_c1=6.029"), std::string::npos);
}

} // namespace
