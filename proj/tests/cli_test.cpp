#include "qod/cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace qod {
namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + "qod_cli_" + name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string read_back(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run_config(const RunConfig& config) {
  std::ostringstream out, err;
  Run r;
  r.code = run(config, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string field(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return "<missing>";
}

const char* kVariant1 = "variant 1\nc 3 5 7\ntarget 8\n";
const char* kVariant3 = "variant 3\nc 2 3 4\nw 3 4 5\nbudget 6\n";
const char* kReferenceDevice =
    "lambda=5e-7\nd_b=2e-3\nL=0.3333\nn_gates=30\nR_M=10\nkappa=5e-3\n";

TEST(ParseInstanceTest, Examples) {
  const auto v1 = parse_instance(kVariant1);
  EXPECT_EQ(v1.variant, Variant::ExactSum);
  EXPECT_EQ(v1.size(), 3u);
  EXPECT_EQ(v1.target, 8);

  const auto v3 = parse_instance(kVariant3);
  EXPECT_EQ(v3, KnapsackInstance::optimization({2, 3, 4}, {3, 4, 5}, 6));

  const auto commented = parse_instance("# header\n\nvariant 2  # interval\nc 1 2\nbounds 0 3\n");
  EXPECT_EQ(commented, KnapsackInstance::interval_sum({1, 2}, 0, 3));

  EXPECT_EQ(parse_instance("variant 1\nc\ntarget 0\n").size(), 0u);
}

TEST(ParseInstanceTest, Errors) {
  try {
    parse_instance("variant 2\nc 1\nbounds 9 4");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bounds not increasing"), std::string::npos);
  }
  const auto line_of = [](const char* text) {
    try {
      parse_instance(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("variant 1\nc 3 x\ntarget 1\n"), 2);
  EXPECT_EQ(line_of("variant 1\nc 3\n\nweight 4\n"), 4);
  EXPECT_EQ(line_of("variant 1\nc 3 -2\ntarget 1\n"), 2);
  EXPECT_EQ(line_of("variant 1\ntarget 1 2\nc 3\n"), 2);
  EXPECT_EQ(line_of("variant 4\nc 3\n"), 1);
  EXPECT_EQ(line_of("variant 1\nc 3\nc 4\ntarget 1\n"), 3);
  EXPECT_EQ(line_of("variant 1\nc 3\ntarget 1\nbudget 4\n"), 4);
  EXPECT_EQ(line_of("variant 1\nc 3\ntarget 99999999999999999999\n"), 3);
  EXPECT_EQ(line_of("c 3\ntarget 1\n"), 0);
  EXPECT_EQ(line_of("variant 3\nc 1 2\nw 1\nbudget 3\n"), 0);
  EXPECT_THROW(parse_instance("variant 3\nc 1\nw 1\nbudget 0\n"), ParseError);
}

TEST(ParseInstanceTest, EmitRoundTrip) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> size(0, 20);
  std::uniform_int_distribution<std::int64_t> value(0, 1'000'000);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::int64_t> c(size(rng)), w(c.size());
    for (auto& x : c) x = value(rng);
    for (auto& x : w) x = value(rng);
    const auto a = value(rng);
    KnapsackInstance inst;
    switch (trial % 3) {
      case 0: inst = KnapsackInstance::exact_sum(c, a); break;
      case 1: inst = KnapsackInstance::interval_sum(c, a, a + 1 + value(rng)); break;
      default: inst = KnapsackInstance::optimization(c, w, a + 1); break;
    }
    const auto text = emit_instance(inst);
    const auto parsed = parse_instance(text);
    ASSERT_EQ(parsed, inst) << text;
    EXPECT_EQ(emit_instance(parsed), text);
  }
}

TEST(ParseDeviceTest, Examples) {
  const auto dev = parse_device(kReferenceDevice);
  EXPECT_DOUBLE_EQ(dev.lambda, 5e-7);
  EXPECT_DOUBLE_EQ(dev.d_b, 2e-3);
  EXPECT_DOUBLE_EQ(dev.L, 0.3333);
  EXPECT_EQ(dev.n_gates, 30);
  EXPECT_DOUBLE_EQ(dev.R_M, 10);
  EXPECT_DOUBLE_EQ(dev.kappa, 5e-3);
  EXPECT_DOUBLE_EQ(dev.delta_p, 1e-7);
  EXPECT_DOUBLE_EQ(dev.T_atom, 1e-8);
  EXPECT_DOUBLE_EQ(dev.gain, 2);
  EXPECT_DOUBLE_EQ(dev.I_sat, 1);
  EXPECT_DOUBLE_EQ(dev.phase_jitter, 0);

  const auto inst = parse_instance(kVariant3);
  const auto ctx = device_context_for(inst);
  EXPECT_EQ(parse_device("", ctx), size_device(3, 12, 5e-7, 10.0 / 3));
  const auto partial = parse_device("gain=3\n# comment\n", ctx);
  EXPECT_DOUBLE_EQ(partial.gain, 3);
  EXPECT_DOUBLE_EQ(partial.kappa, size_device(3, 12, 5e-7, 10.0 / 3).kappa);
}

TEST(ParseDeviceTest, Errors) {
  const auto line_of = [](const std::string& text) {
    try {
      parse_device(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("kappa=-1"), 1);
  EXPECT_EQ(line_of("lambda=5e-7\ncolour=red\n"), 2);
  EXPECT_EQ(line_of("lambda=5e-7\nlambda=5e-7\n"), 2);
  EXPECT_EQ(line_of("lambda 5e-7\n"), 1);
  EXPECT_EQ(line_of("gain=0.5\n"), 1);
  EXPECT_EQ(line_of("n_gates=2.5\n"), 1);
  EXPECT_EQ(line_of("lambda=5e-7\n"), 0);
}

TEST(ParseDeviceTest, EmitRoundTrip) {
  auto dev = size_device(17, 345, 6.3e-7, 0.123);
  dev.phase_jitter = 0.01;
  dev.gain = 1.7;
  EXPECT_EQ(parse_device(emit_device(dev)), dev);
}

TEST(FormatNumberTest, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(6e-7), "6e-07");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(std::stod(format_number(1.0 / 3)), 1.0 / 3);
}

TEST(RunConfigTest, InvalidCombinations) {
  RunConfig c;
  c.instance_paths = {"x"};
  c.method = Method::Qod;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.command = Command::Simulate;
  EXPECT_NO_THROW(validate(c));
  c.method = Method::Dp;
  EXPECT_THROW(validate(c), std::invalid_argument);

  RunConfig e;
  e.instance_paths = {"x"};
  e.epsilon = 0.1;
  EXPECT_THROW(validate(e), std::invalid_argument);
  e.method = Method::Truncated;
  EXPECT_NO_THROW(validate(e));
  e.epsilon = 1.5;
  EXPECT_THROW(validate(e), std::invalid_argument);
  e.epsilon.reset();
  EXPECT_THROW(validate(e), std::invalid_argument);

  RunConfig f;
  f.command = Command::Feasibility;
  EXPECT_THROW(validate(f), std::invalid_argument);
}

TEST(RunTest, SolveVariant1) {
  RunConfig c;
  c.instance_paths = {write_temp("v1.txt", kVariant1)};
  c.format = OutputFormat::Structured;
  const auto r = run_config(c);
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(field(r.out, "decision"), "YES");
  EXPECT_EQ(field(r.out, "witness"), "0 1");
  EXPECT_EQ(field(r.out, "tool_version"), std::string(kToolVersion));
  EXPECT_TRUE(r.err.empty());
}

TEST(RunTest, TextFormatAlignsKeys) {
  RunConfig c;
  c.instance_paths = {write_temp("v1t.txt", kVariant1)};
  const auto r = run_config(c);
  EXPECT_NE(r.out.find("decision:"), std::string::npos);
  EXPECT_NE(r.out.find(" YES\n"), std::string::npos);
}

TEST(RunTest, SimulateMatchesSolve) {
  for (const char* text : {kVariant1, kVariant3, "variant 2\nc 3 5 7\nbounds 9 11\n"}) {
    const auto path = write_temp("sim.txt", text);
    RunConfig solve_cfg;
    solve_cfg.instance_paths = {path};
    solve_cfg.format = OutputFormat::Structured;
    RunConfig sim_cfg = solve_cfg;
    sim_cfg.command = Command::Simulate;
    sim_cfg.method = Method::Qod;
    const auto s = run_config(solve_cfg);
    const auto q = run_config(sim_cfg);
    ASSERT_EQ(q.code, kExitOk) << q.err;
    if (field(s.out, "variant") == "3") {
      EXPECT_EQ(field(q.out, "measured_optimum"), field(s.out, "optimum"));
    } else {
      EXPECT_EQ(field(q.out, "decision"), field(s.out, "decision"));
    }
  }
}

TEST(RunTest, DumpStagesWritesEveryBeam) {
  RunConfig c;
  c.command = Command::Simulate;
  c.instance_paths = {write_temp("dump.txt", kVariant3)};
  c.dump_stages = ::testing::TempDir() + "qod_cli_stages.txt";
  ASSERT_EQ(run_config(c).code, kExitOk);
  const auto dump = read_back(*c.dump_stages);
  // 1 + 2 + 4 + 8 beams plus the header line.
  EXPECT_EQ(std::count(dump.begin(), dump.end(), '\n'), 16);
}

TEST(RunTest, BatchSimulationUsesDerivedSeeds) {
  RunConfig c;
  c.command = Command::Simulate;
  c.format = OutputFormat::Structured;
  c.seed = 5;
  c.instance_paths = {write_temp("b1.txt", kVariant1), write_temp("b3.txt", kVariant3)};
  const auto r = run_config(c);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("record=0\n"), std::string::npos);
  EXPECT_NE(r.out.find("record=1\n"), std::string::npos);
  EXPECT_NE(r.out.find("seed=5\n"), std::string::npos);
  EXPECT_NE(r.out.find("seed=6\n"), std::string::npos);
}

TEST(RunTest, FeasibilityReportsNote) {
  RunConfig c;
  c.command = Command::Feasibility;
  c.device_path = write_temp("dev.txt", kReferenceDevice);
  c.format = OutputFormat::Structured;
  const auto r = run_config(c);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(field(r.out, "B_plus_max"), "1999");
  EXPECT_EQ(field(r.out, "kappa_min_nominal"), "0.004");
  EXPECT_NE(field(r.out, "note_0").find("2e2"), std::string::npos);
}

TEST(RunTest, StrictTurnsWarningsIntoExitOne) {
  RunConfig c;
  c.command = Command::Feasibility;
  c.device_path = write_temp("bad_dev.txt", "lambda=5e-7\nd_b=2e-3\nL=0.3333\nn_gates=30\nR_M=10\nkappa=1e-3\n");
  EXPECT_EQ(run_config(c).code, kExitOk);
  c.strict = true;
  EXPECT_EQ(run_config(c).code, kExitWarnings);
}

TEST(RunTest, ErrorsGiveOneDiagnosticLine) {
  std::vector<RunConfig> configs;
  RunConfig missing;
  missing.instance_paths = {::testing::TempDir() + "qod_cli_no_such_file.txt"};
  configs.push_back(missing);
  RunConfig bad_parse;
  bad_parse.instance_paths = {write_temp("bad.txt", "variant 1\nc 3 x\ntarget 2\n")};
  configs.push_back(bad_parse);
  RunConfig bad_method = bad_parse;
  bad_method.instance_paths = {write_temp("good.txt", kVariant1)};
  bad_method.method = Method::Qod;
  configs.push_back(bad_method);
  RunConfig truncated_v1 = bad_method;
  truncated_v1.method = Method::Truncated;
  truncated_v1.epsilon = 0.5;
  configs.push_back(truncated_v1);
  RunConfig bad_device = bad_method;
  bad_device.command = Command::Simulate;
  bad_device.method.reset();
  bad_device.device_path = write_temp("neg.txt", "kappa=-1\n");
  configs.push_back(bad_device);
  RunConfig no_instance;
  no_instance.command = Command::Cost;
  configs.push_back(no_instance);

  for (const auto& c : configs) {
    const auto r = run_config(c);
    EXPECT_EQ(r.code, kExitError);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
    EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
  }
  EXPECT_NE(run_config(configs[1]).err.find("line 2"), std::string::npos);
}

TEST(RunTest, StructuredReportsAreByteIdentical) {
  const auto inst = write_temp("det.txt", "variant 3\nc 4 1 7 3 5 2\nw 2 8 4 6 1 9\nbudget 11\n");
  for (const auto command : {Command::Solve, Command::Simulate, Command::Cost, Command::Compare,
                             Command::Feasibility}) {
    RunConfig c;
    c.command = command;
    c.instance_paths = {inst};
    c.format = OutputFormat::Structured;
    c.seed = 3;
    const auto a = run_config(c);
    const auto b = run_config(c);
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(RunTest, CompareOnAccelerationScenario) {
  std::string c_line = "c", w_line = "w";
  for (int i = 0; i < 30; ++i) {
    c_line += " " + std::to_string(1 + i % 6);
    w_line += " " + std::to_string(3 + (7 * i) % 37);
  }
  RunConfig c;
  c.command = Command::Compare;
  c.instance_paths = {write_temp("acc.txt", "variant 3\n" + c_line + "\n" + w_line + "\nbudget 60\n")};
  c.device_path = write_temp("acc_dev.txt",
                             "lambda=5e-7\nd_b=2e-3\nL=0.3333333333333333\nn_gates=30\nR_M=10\nkappa=5e-3\n");
  c.format = OutputFormat::Structured;
  const auto r = run_config(c);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(field(r.out, "epsilon"), "0.00025");
  EXPECT_EQ(field(r.out, "answers_agree"), "true");
  const double ratio = std::stod(field(r.out, "time_ratio"));
  EXPECT_GE(ratio, 1e5);
  EXPECT_LE(ratio, 1e7);
}

}  // namespace
}  // namespace qod
