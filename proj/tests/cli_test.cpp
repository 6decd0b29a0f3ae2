#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "mixsig/cli/commands.hpp"

using namespace mixsig;
using namespace mixsig::cli;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      rows.push_back(line);
    }
  }
  return rows;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  return out;
}

struct Captured {
  int code = 0;
  std::string out;
  std::string log;
};

template <class Fn>
Captured capture(Fn&& fn) {
  std::ostringstream out;
  std::ostringstream log;
  Captured c;
  c.code = fn(Streams{out, log});
  c.out = out.str();
  c.log = log.str();
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MIXSIG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST(ConfigParse, ReadsKeysCommentsAndLists) {
  const auto cfg = parse("# header\n p = 0.4 # trailing\n\nq = 0.2, 0.3\ngreen_ratio=0.6,0.4\n"
                         "phases = 3\ncritical_flow_ratios = 0.3,0.2\nobjective = average\n");
  EXPECT_EQ(*cfg.p, 0.4);
  EXPECT_EQ(cfg.q, (std::vector<double>{0.2, 0.3}));
  EXPECT_EQ(cfg.green_ratio, (std::vector<double>{0.6, 0.4}));
  EXPECT_EQ(*cfg.phases, 3);
  EXPECT_EQ(cfg.critical_flow_ratios, (std::vector<double>{0.3, 0.2}));
  EXPECT_EQ(cfg.objective, Objective::average_per_vehicle);
}

TEST(ConfigParse, DiagnosticsNameLineAndKey) {
  EXPECT_NE(config_error("p = 0.5\nbogus = 1\n").find("test.cfg:2:"), std::string::npos);
  EXPECT_NE(config_error("p = 0.5\nbogus = 1\n").find("bogus"), std::string::npos);
  EXPECT_NE(config_error("p = abc\n").find("test.cfg:1:"), std::string::npos);
  EXPECT_NE(config_error("p = 0.5\np = 0.6\n").find("duplicate"), std::string::npos);
  EXPECT_NE(config_error("just words\n").find("key = value"), std::string::npos);
  EXPECT_NE(config_error("ls_mode = both\n").find("ls_mode"), std::string::npos);
  EXPECT_NE(config_error("mc_samples = -3\n").find("mc_samples"), std::string::npos);
}

TEST(ConfigValidate, RangesAndWarnings) {
  auto cfg = parse("p = 0.5\nq = 0.5\ncycle_length = 200\n");
  validate(cfg);
  EXPECT_EQ(cfg.warnings.size(), 2u);
  auto bad = parse("p = 1.5\n");
  EXPECT_THROW(validate(bad), ConfigError);
  auto mismatch = parse("q = 0.2,0.2,0.2\ngreen_ratio = 0.5,0.5\n");
  EXPECT_THROW(validate(mismatch), ConfigError);
}

TEST(ConfigValidate, ShippedConfigsLoad) {
  for (const char* name : {"defaults.cfg", "green055.cfg", "full_penetration.cfg", "full_green.cfg"}) {
    auto cfg = load_config(std::string(MIXSIG_CONFIG_DIR) + "/" + name);
    EXPECT_NO_THROW(validate(cfg)) << name;
  }
}

TEST(ConfigResolve, EchoesEveryKey) {
  const auto lines = resolved_lines(RunConfig{});
  ASSERT_EQ(lines.size(), known_keys().size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    EXPECT_EQ(lines[i].rfind(known_keys()[i] + " = ", 0), 0u) << lines[i];
  }
}

TEST(ConfigResolve, SingleValuesReplicate) {
  auto cfg = parse("q = 0.2\ngreen_ratio = 0.6, 0.4, 0.5\n");
  const auto ic = intersection(cfg, 0.3);
  ASSERT_EQ(ic.approaches.size(), 3u);
  EXPECT_EQ(ic.approaches[2].demand.arrival_rate, 0.2);
  EXPECT_EQ(ic.approaches[1].green_ratio, 0.4);
  EXPECT_EQ(ic.penetration(), 0.3);
}

TEST(SweepSpec, ParsesAndSnapsGrid) {
  const auto axis = parse_sweep_axis("q:0.15:0.35:0.025");
  const auto v = axis.values();
  ASSERT_EQ(v.size(), 9u);
  EXPECT_EQ(v.front(), 0.15);
  EXPECT_EQ(v[3], 0.225);
  EXPECT_EQ(v.back(), 0.35);
  EXPECT_EQ(parse_sweep_axis("p:0.01:0.99:0.02").values().size(), 50u);
}

TEST(SweepSpec, Rejections) {
  EXPECT_THROW(parse_sweep_axis("p:0:1:0"), ConfigError);
  EXPECT_THROW(parse_sweep_axis("p:1:0:0.1"), ConfigError);
  EXPECT_THROW(parse_sweep_axis("p:0:1"), ConfigError);
  EXPECT_THROW(parse_sweep_axis("seed:0:1:1"), ConfigError);
  EXPECT_THROW(parse_sweep({"p:0:1:0.1", "q:0.1:0.3:0.1", "l_c:1:2:1"}), ConfigError);
  EXPECT_THROW(parse_sweep({"p:0:1:0.1", "p:0:1:0.2"}), ConfigError);
}

TEST(SteadyStateCommand, RequiresPenetration) {
  EXPECT_THROW(capture([](Streams io) { return cmd_steady_state(RunConfig{}, io); }), ConfigError);
}

TEST(SteadyStateCommand, TwoStateChain) {
  auto cfg = parse("n = 2\np = 0.5\n");
  const auto r = capture([&](Streams io) { return cmd_steady_state(cfg, io); });
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "state,closed_form,power_iteration,abs_diff");
  EXPECT_EQ(split(rows[1])[1], "0.5");
  EXPECT_EQ(split(rows[2])[1], "0.25");
  EXPECT_EQ(split(rows[3])[1], "0.25");
  EXPECT_NE(r.out.find("# sum_closed_form = 1\n"), std::string::npos);
}

TEST(SteadyStateCommand, PureHdvSingleNonzeroRow) {
  auto cfg = parse("p = 0\n");
  const auto rows = data_rows(capture([&](Streams io) { return cmd_steady_state(cfg, io); }).out);
  int nonzero = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    nonzero += split(rows[i])[1] != "0";
  }
  EXPECT_EQ(nonzero, 1);
}

TEST(CapacityCommand, PureHdvAndSweep) {
  auto cfg = parse("p = 0\n");
  auto rows = data_rows(capture([&](Streams io) { return cmd_capacity(cfg, {}, io); }).out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(split(rows[1])[2], "0.545454545");

  const auto r = capture([&](Streams io) {
    return cmd_capacity(cfg, parse_sweep({"p:0:0.99:0.01"}), io);
  });
  rows = data_rows(r.out);
  EXPECT_EQ(rows.size(), 101u);
  EXPECT_NE(r.out.find("non_decreasing_in_p = 1"), std::string::npos);
}

TEST(DelayCommand, PerApproachRows) {
  auto cfg = parse("p = 0.5\nq = 0.2\ngreen_ratio = 0.55\ncycle_length = 100\n");
  const auto r = capture([&](Streams io) { return cmd_delay(cfg, io); });
  EXPECT_EQ(r.code, exit_ok);
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  const auto cells = split(rows[1]);
  EXPECT_EQ(cells.size(), split(rows[0]).size());
}

TEST(DelayCommand, SaturatedApproachFlagged) {
  auto cfg = parse("p = 0\nq = 0.2\ngreen_ratio = 0.25\ncycle_length = 100\n");
  const auto r = capture([&](Streams io) { return cmd_delay(cfg, io); });
  EXPECT_EQ(r.code, exit_infeasible);
  const auto cells = split(data_rows(r.out)[1]);
  EXPECT_EQ(cells[cells.size() - 2], "1");
  EXPECT_EQ(cells[8], "nan");
}

TEST(SweepCommand, ArrivalRateTrend) {
  auto cfg = parse("p = 0.5\n");
  const auto rows = data_rows(
      capture([&](Streams io) { return cmd_sweep(cfg, parse_sweep({"q:0.15:0.35:0.025"}), io, nullptr); })
          .out);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], "q,capacity,E_D,E_Dbar,saturated,beyond_closed_form");
  double prev = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = split(rows[i]);
    if (c[4] == "1") {
      EXPECT_EQ(c[3], "nan");
      continue;
    }
    const double v = std::stod(c[3]);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(SweepCommand, TwoDimensionalWithChart) {
  auto cfg = parse("p = 0.5\nq = 0.2\ngreen_ratio = 0.55\n");
  std::ostringstream chart;
  const auto rows = data_rows(capture([&](Streams io) {
                                return cmd_sweep(cfg, parse_sweep({"p:0:1:0.25", "cycle_length:60:120:30"}),
                                                 io, &chart);
                              }).out);
  EXPECT_EQ(rows.size(), 1u + 5u * 3u);
  EXPECT_EQ(split(rows[0])[0], "p");
  EXPECT_EQ(split(rows[0])[1], "cycle_length");
  EXPECT_NE(chart.str().find("<svg"), std::string::npos);
  EXPECT_NE(chart.str().find("cycle_length"), std::string::npos);
}

TEST(SweepCommand, FullySaturatedGridIsAnError) {
  auto cfg = parse("p = 0\n");
  EXPECT_THROW(capture([&](Streams io) {
                 return cmd_sweep(cfg, parse_sweep({"q:0.5:0.6:0.05"}), io, nullptr);
               }),
               InfeasibleError);
}

TEST(OptimizeCommand, FullPenetration) {
  auto cfg = load_config(std::string(MIXSIG_CONFIG_DIR) + "/full_penetration.cfg");
  const auto r = capture([&](Streams io) { return cmd_optimize(cfg, {}, io, nullptr); });
  const auto cells = split(data_rows(r.out)[1]);
  EXPECT_EQ(cells[1], "15.2");
  EXPECT_NEAR(std::stod(cells[3]), 15.2, 1e-6);
  EXPECT_NE(r.log.find("C_min:"), std::string::npos);
}

TEST(OptimizeCommand, DegenerateFormulaStillReportsOptimum) {
  auto cfg = load_config(std::string(MIXSIG_CONFIG_DIR) + "/full_green.cfg");
  const auto r = capture([&](Streams io) { return cmd_optimize(cfg, {}, io, nullptr); });
  EXPECT_EQ(r.code, exit_ok);
  EXPECT_NE(r.log.find("denominator vanishes"), std::string::npos);
  const auto cells = split(data_rows(r.out)[1]);
  EXPECT_EQ(cells[2], "nan");
  EXPECT_GT(std::stod(cells[3]), 0.0);
}

TEST(OptimizeCommand, PenetrationCurve) {
  auto cfg = parse("");
  const auto r = capture([&](Streams io) {
    return cmd_optimize(cfg, parse_sweep({"p:0.01:0.99:0.02"}), io, nullptr);
  });
  EXPECT_EQ(data_rows(r.out).size(), 51u);
  EXPECT_NE(r.out.find("optimal_cycle_non_increasing = 1"), std::string::npos);
}

TEST(ValidateCommand, DefaultReport) {
  const auto r = capture([](Streams io) { return cmd_validate(RunConfig{}, io); });
  EXPECT_EQ(r.code, exit_ok);
  EXPECT_NE(r.out.find("tolerance: 1e-06 -> PASS"), std::string::npos);
  EXPECT_NE(r.out.find("derived (T_r + T_a/2 per phase):  7 s"), std::string::npos);
  EXPECT_NE(r.out.find("printed (T_r + 3T_a/2 per phase): 13 s"), std::string::npos);
  EXPECT_NE(r.out.find("printed derivative is constant in C"), std::string::npos);
}

TEST(Executable, ExitCodes) {
  const std::string cfg = std::string("--config ") + MIXSIG_CONFIG_DIR + "/defaults.cfg";
  EXPECT_EQ(run_cli("steady-state " + cfg), 0);
  EXPECT_EQ(run_cli("steady-state"), 1);
  EXPECT_EQ(run_cli("capacity " + cfg + " --sweep p:0:1:0"), 1);
  EXPECT_EQ(run_cli("steady-state --set nosuchkey=1"), 1);
  EXPECT_EQ(run_cli("bogus"), 1);
  EXPECT_EQ(run_cli("sweep " + cfg + " --set p=0 --sweep q:0.5:0.6:0.05"), 2);
  EXPECT_EQ(run_cli("optimize " + cfg + " --set critical_flow_ratios=0.5,0.5"), 2);
  EXPECT_EQ(run_cli("sweep " + cfg + " --svg --sweep q:0.15:0.35:0.025"), 1);
}

TEST(Executable, ByteIdenticalOutput) {
  const std::string dir = ::testing::TempDir();
  const std::string cfg = std::string("--config ") + MIXSIG_CONFIG_DIR + "/defaults.cfg";
  const std::string args = "sweep " + cfg + " --sweep p:0:1:0.1 --sweep cycle_length:60:120:6";
  ASSERT_EQ(run_cli(args + " --out " + dir + "/a.csv --svg"), 0);
  ASSERT_EQ(run_cli(args + " --out " + dir + "/b.csv --svg"), 0);
  EXPECT_EQ(slurp(dir + "/a.csv"), slurp(dir + "/b.csv"));
  EXPECT_EQ(slurp(dir + "/a.svg"), slurp(dir + "/b.svg"));
  EXPECT_FALSE(slurp(dir + "/a.csv").empty());
}
