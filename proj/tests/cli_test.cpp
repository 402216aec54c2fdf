// Copyright 2026 The kerrqnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kerrqnd/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"

using namespace kerrqnd;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "kerrqnd");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    Invocation r;
    r.code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class CliFiles : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("kerrqnd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    std::string write(const std::string &name, const std::string &text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    static std::string slurp(const std::string &p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    fs::path dir_;
};

std::vector<std::string> csv_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> csv_fields(const std::string &line) { return cli::detail::split(line, ','); }

}  // namespace

TEST(parse_config, flags) {
    const char *argv[] = {"kerrqnd", "--experiment", "cnot", "--alpha", "50", "--theta", "0.5",
                          "--shots",  "100000",       "--seed", "7"};
    auto cfg = cli::parse_config(11, argv);
    EXPECT_EQ(cfg.experiment, "cnot");
    EXPECT_EQ(cfg.alpha, 50.0);
    EXPECT_EQ(cfg.theta, 0.5);
    EXPECT_EQ(cfg.shots, 100000);
    EXPECT_EQ(cfg.seed, 7U);
    EXPECT_EQ(cfg.format, cli::OutputFormat::csv);
}

TEST(parse_config, defaults) {
    const char *argv[] = {"kerrqnd", "--experiment", "parity", "--alpha", "3", "--theta", "0.5"};
    auto cfg = cli::parse_config(7, argv);
    EXPECT_EQ(cfg.shots, 10000);
    EXPECT_EQ(cfg.seed, 42U);
    EXPECT_EQ(cfg.format, cli::OutputFormat::csv);
    EXPECT_EQ(cfg.output_path, "-");
    ASSERT_EQ(cfg.inputs.size(), 2U);
}

TEST(parse_config, input_amplitudes) {
    auto cfg = cli::build_config({{"experiment", "parity"}, {"alpha", "1"}, {"theta", "1"}, {"input", "0.6,0:0.8;1,0"}});
    EXPECT_EQ(cfg.inputs[0].first, Complex(0.6));
    EXPECT_NEAR(std::abs(cfg.inputs[0].second - Complex(0.0, 0.8)), 0.0, 1e-15);
    EXPECT_THROW(cli::build_config({{"experiment", "parity"}, {"alpha", "1"}, {"theta", "1"}, {"input", "1,1;1,0"}}),
                 cli::ConfigError);
    EXPECT_THROW(cli::build_config({{"experiment", "parity"}, {"alpha", "1"}, {"theta", "1"}, {"input", "1,0"}}),
                 cli::ConfigError);
}

TEST(read_config_text, key_values_and_comments) {
    std::istringstream in("# probe\nalpha = 4\n\n  theta=0.25   # inline\nexperiment = parity\n");
    auto raw = cli::read_config_text(in);
    EXPECT_EQ(raw.at("alpha"), "4");
    EXPECT_EQ(raw.at("theta"), "0.25");
    EXPECT_EQ(raw.at("experiment"), "parity");
}

TEST_F(CliFiles, config_file_theta_out_of_range) {
    auto cfg = write("bad.cfg", "experiment = cnot\nalpha = 50\ntheta = 4.0\n");
    auto r = invoke({"--config", cfg});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("theta"), std::string::npos);
}

TEST_F(CliFiles, unknown_key_names_the_key) {
    auto cfg = write("bad.cfg", "experiment = cnot\nalpha = 50\ntheta = 0.5\nphotons = 3\n");
    auto r = invoke({"--config", cfg});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("photons"), std::string::npos);
}

TEST_F(CliFiles, flags_override_file) {
    auto cfg = write("ok.cfg", "experiment = parity\nalpha = 2\ntheta = 0.3\nseed = 5\n");
    const std::string cfg_path = cfg;
    const char *argv[] = {"kerrqnd", "--config", cfg_path.c_str(), "--seed", "9", "--theta", "0.7"};
    auto parsed = cli::parse_config(7, argv);
    EXPECT_EQ(parsed.seed, 9U);
    EXPECT_EQ(parsed.theta, 0.7);
    EXPECT_EQ(parsed.alpha, 2.0);
}

TEST(main_exit_codes, config_errors) {
    EXPECT_EQ(invoke({"--experiment", "sweep", "--grid-alpha", "1:2:2"}).code, 2);
    EXPECT_EQ(invoke({"--experiment", "sweep"}).code, 2);
    EXPECT_EQ(invoke({"--experiment", "cnot", "--alpha", "5"}).code, 2);
    EXPECT_EQ(invoke({"--experiment", "cnot", "--alpha", "-1", "--theta", "0.5"}).code, 2);
    EXPECT_EQ(invoke({"--experiment", "teleport", "--alpha", "1", "--theta", "0.5"}).code, 2);
    EXPECT_EQ(invoke({"--experiment", "cnot", "--alpha", "1", "--theta", "0.5", "--shots", "0"}).code, 2);
    EXPECT_EQ(invoke({"--experiment", "cnot", "--alpha", "1", "--theta", "0.5", "--format", "xml"}).code, 2);
    EXPECT_EQ(invoke({"--experiment", "validate-oracle", "--alpha", "5", "--theta", "0.5"}).code, 2);
    EXPECT_EQ(invoke({"--bogus"}).code, 2);
    EXPECT_EQ(invoke({"--config", "/nonexistent/kerrqnd.cfg"}).code, 2);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(run, cnot_row_surfaces_headline_bound) {
    auto r = invoke({"--experiment", "cnot", "--alpha", "50", "--theta", "0.5", "--shots", "2000", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto lines = csv_lines(r.out);
    ASSERT_EQ(lines.size(), 2U);
    EXPECT_EQ(lines[0], cli::kCsvHeader);
    auto f = csv_fields(lines[1]);
    ASSERT_EQ(f.size(), 11U);
    EXPECT_EQ(f[0], "cnot");
    EXPECT_LT(std::stod(f[7]), 1e-5);
    EXPECT_EQ(std::stod(f[8]), 0.0);
    // Summary goes to stderr when the table takes stdout.
    EXPECT_NE(r.err.find("experiment=cnot"), std::string::npos);
    EXPECT_NE(r.err.find("runtime_s="), std::string::npos);
}

TEST(run, validate_oracle) {
    auto r = invoke({"--experiment", "validate-oracle", "--alpha", "2", "--theta", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto f = csv_fields(csv_lines(r.out).at(1));
    EXPECT_LT(std::stod(f[8]), 1e-6);
    EXPECT_GE(std::stod(f[10]), 1.0 - 1e-9);
    EXPECT_NE(r.err.find("sup_norm_density_deviation="), std::string::npos);
}

TEST_F(CliFiles, sweep_has_one_row_per_grid_point) {
    auto out = path("sweep.csv");
    auto r = invoke({"--experiment", "sweep", "--grid-alpha", "5:10:2", "--grid-theta", "0.3:0.9:3", "--shots", "200",
                     "--sweep-of", "parity", "--output", out});
    ASSERT_EQ(r.code, 0) << r.err;
    auto lines = csv_lines(slurp(out));
    ASSERT_EQ(lines.size(), 1U + 2U * 3U);
    EXPECT_EQ(csv_fields(lines[1])[0], "parity");
    EXPECT_EQ(std::stod(csv_fields(lines[6])[1]), 10.0);
    EXPECT_NEAR(std::stod(csv_fields(lines[6])[2]), 0.9, 1e-15);
    // Summary on stdout once the table goes to a file.
    EXPECT_NE(r.out.find("experiment=sweep rows=6"), std::string::npos);
}

TEST_F(CliFiles, json_mirrors_csv_fields) {
    auto out = path("r.json");
    auto r = invoke({"--experiment", "entangler", "--alpha", "8", "--theta", "0.6", "--shots", "500", "--format", "json",
                     "--output", out});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = nlohmann::json::parse(slurp(out));
    ASSERT_TRUE(doc.is_array());
    ASSERT_EQ(doc.size(), 1U);
    auto header = csv_fields(std::string(cli::kCsvHeader));
    EXPECT_EQ(doc[0].size(), header.size());
    for (const auto &key : header) {
        EXPECT_TRUE(doc[0].contains(key)) << key;
    }
    EXPECT_EQ(doc[0]["experiment"], "entangler");
    EXPECT_EQ(doc[0]["shots"], 500);
}

TEST_F(CliFiles, unwritable_output_is_internal_error) {
    auto r = invoke({"--experiment", "parity", "--alpha", "2", "--theta", "0.5", "--shots", "10", "--output",
                     path("missing_dir/out.csv")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("cannot write"), std::string::npos);
}

TEST_F(CliFiles, repeated_binary_runs_are_byte_identical) {
    for (const char *format : {"csv", "json"}) {
        std::string outputs[2];
        for (int i = 0; i < 2; ++i) {
            auto out = path(std::string("run") + std::to_string(i) + "." + format);
            std::string cmd = std::string(KERRQND_CLI_PATH) +
                              " --experiment cnot --alpha 10 --theta 0.7 --shots 3000 --seed 123 --format " + format +
                              " --output " + out + " > " + path("stdout.txt");
            ASSERT_EQ(std::system(cmd.c_str()), 0) << cmd;
            outputs[i] = slurp(out);
        }
        EXPECT_FALSE(outputs[0].empty());
        EXPECT_EQ(outputs[0], outputs[1]);
    }
    // A different seed changes the result.
    auto a = invoke({"--experiment", "cnot", "--alpha", "10", "--theta", "0.7", "--shots", "3000", "--seed", "1"});
    auto b = invoke({"--experiment", "cnot", "--alpha", "10", "--theta", "0.7", "--shots", "3000", "--seed", "2"});
    EXPECT_NE(a.out, b.out);
}

TEST(format_real, round_trips) {
    for (double v : {0.1, 1.0 / 3.0, 3.397673124730060e-6, 1e300, -2.5}) {
        EXPECT_EQ(std::stod(cli::format_real(v)), v);
    }
}
