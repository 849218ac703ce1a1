// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(DYNPREC_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, {}};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dynprec_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

TEST(Cli, DemoAddPrintsStepTable) {
  const CliRun r = run("--t 3 --T 2 demo add 2^0*1.11010101110 2^-3*1.11111001011");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("(d) redistribution"), std::string::npos);
  EXPECT_NE(r.out.find("result: +2^1 : 1.000|0.101|0.100"), std::string::npos) << r.out;
}

TEST(Cli, DemoMulCsv) {
  const CliRun r = run("--t 3 --T 2 --format csv demo mul 2^0*1.01101111100 2^0*1.10111111101");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("label,scale,", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("(f) rounding,2^1,,1.010,0.000,1.010"), std::string::npos) << r.out;
}

TEST(Cli, DemoReciprocal) {
  const CliRun r = run("--t 3 --T 7 demo recip 10");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("+2^-4 : 1.100|1.100|1.100|1.100|1.100|1.100|1.100|1.101"), std::string::npos) << r.out;
}

TEST(Cli, EvalSumReportsCount) {
  const CliRun r = run(
      "--t 7 --T 3 --rounding truncate eval-sum 2^-1*1.0001100000010111111001001110110 "
      "2^0*1.0010101010110010110101001101011 -2^0*1.1011011010111011011011010111001 --target 0.00390625");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("grossdigit additions/subtractions: 6"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--t 3 --T 2 demo div 1 0").status, 2);
  EXPECT_EQ(run("--t 3 --T 2 demo add 1 abc").status, 1);
  EXPECT_EQ(run("--t 3 --T 2 demo nope 1 2").status, 1);
  EXPECT_EQ(run("--t 99 demo add 1 2").status, 1);
  const CliRun r = run("--t 7 --T 3 --rounding truncate eval-sum 1 2^-40*1.0 --target 1e-30");
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.out.find("best:"), std::string::npos);
}

TEST(Cli, ConfigFileAndOutput) {
  const fs::path d = scratch_dir("config");
  std::ofstream(d / "cfg.ini") << "t=3\nT=2\nrounding=truncate\n";
  const CliRun r = run("--config " + (d / "cfg.ini").string() + " --out " + (d / "out.txt").string() + " demo add 1 0.1");
  EXPECT_EQ(r.status, 0) << r.out;
  std::ifstream in(d / "out.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("result: +2^0 : 1.000|1.100|1.100"), std::string::npos) << ss.str();
  fs::remove_all(d);
}

TEST(Cli, NewtonCsv) {
  const fs::path d = scratch_dir("newton");
  const CliRun r = run("--t 52 --T 4 --format csv --out " + (d / "n.csv").string() + " newton --mode fixed:0 --max-iter 20");
  EXPECT_EQ(r.status, 0) << r.out;
  std::ifstream in(d / "n.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "step,x_k,err_k,prec,cum_mults,cum_adds");
  fs::remove_all(d);
}

TEST(Cli, FiguresWriteOneFilePerCurve) {
  const fs::path d = scratch_dir("figure");
  EXPECT_EQ(run("figure 1 --out " + d.string()).status, 0);
  EXPECT_TRUE(fs::exists(d / "fig1_emulator.csv"));
  EXPECT_TRUE(fs::exists(d / "fig1_double.csv"));
  EXPECT_EQ(run("--t 52 --T 4 figure 2 --max-iter 50 --out " + d.string()).status, 0);
  for (int q = 0; q <= 4; ++q) {
    const fs::path f = d / ("fig2_fixed_q" + std::to_string(q) + ".csv");
    ASSERT_TRUE(fs::exists(f)) << f;
    EXPECT_EQ(line_count(f), 51u);
  }
  EXPECT_EQ(line_count(d / "fig2_dynamic.csv"), 51u);
  fs::remove_all(d);
}

TEST(Cli, CostReport) {
  const CliRun r = run("--t 3 --T 2 report");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("op,q,p,predicted_mults,measured_mults,predicted_adds,measured_adds", 0), 0u) << r.out;
}

}  // namespace
