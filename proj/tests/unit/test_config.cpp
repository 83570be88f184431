#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "hslg/config.hpp"
#include "hslg/experiments.hpp"
#include "hslg/report.hpp"
#include "hslg/rng.hpp"

using namespace hslg::lab;

TEST_CASE("format_double round trips") {
  hslg::RngState rng(1, 0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.uniform_index(80)) - 40);
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("config parsing") {
  const auto c = ExperimentConfig::parse("# comment\nexperiment = bw-identity\n m=4 \nalpha = 0.5  # trailing\nlist = 1, 2.5,3\n\nfloor = -inf\n");
  CHECK(c.experiment == "bw-identity");
  CHECK(c.get_int("m") == 4);
  CHECK(c.get_double("alpha") == 0.5);
  CHECK(c.get_list("list") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(c.get_double("floor") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(c.get("missing"), ConfigError);
  CHECK_THROWS_AS(c.get_int("alpha"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("experiment = x\nnot a pair\n", "f.cfg"), ConfigError);
  try {
    ExperimentConfig::parse("experiment = x\nm = 1\nm = 2\n", "f.cfg");
    FAIL("duplicate key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("f.cfg:3") != std::string::npos);
  }
  CHECK_THROWS_AS(ExperimentConfig::parse("m = 1\n"), ConfigError);
  auto bad = c;
  bad.set("m", std::string("four"));
  CHECK_THROWS_AS(bad.get_double("m"), ConfigError);
}

TEST_CASE("every default config round trips") {
  for (const auto& info : registry()) {
    const auto c = default_config(info.name);
    CHECK(ExperimentConfig::parse(c.serialize()) == c);
    CHECK(c.has("seed"));
    CHECK(c.has("workers"));
    CHECK(c.has("out"));
  }
  auto c = default_config("bridge-tail");
  c.set("samples", 123.0);
  c.set("T_list", std::string("0.5,0.25"));
  CHECK(ExperimentConfig::parse(c.serialize()) == c);
}

TEST_CASE("resolve fills defaults and rejects unknown keys") {
  ExperimentConfig partial{"sym-identity", {{"n", "6"}}};
  const auto r = resolve(partial);
  CHECK(r.get("n") == "6");
  CHECK(r.get("environments") == "100");
  partial.values["bogus"] = "1";
  CHECK_THROWS_AS(resolve(partial), UsageError);
  CHECK_THROWS_AS(default_config("no-such-experiment"), UsageError);
}

TEST_CASE("reports are deterministic and omit runner-only keys") {
  ExperimentConfig partial{"sym-identity", {{"environments", "5"}, {"n", "6"}, {"seed", "7"}}};
  auto a = resolve(partial), b = a;
  b.set("workers", std::string("2"));
  b.set("out", std::string("elsewhere"));
  const auto ja = to_json(execute(a)).dump(2), jb = to_json(execute(b)).dump(2);
  CHECK(ja == jb);
  CHECK(ja.find("\"out\"") == std::string::npos);
  CHECK(ja.find("\"workers\"") == std::string::npos);
  CHECK(ja.find("\"environments\": \"5\"") != std::string::npos);
}

TEST_CASE("report writing") {
  const auto dir = std::filesystem::temp_directory_path() / "hslg_report_test";
  std::filesystem::remove_all(dir);
  Report r;
  r.config = default_config("bw-identity");
  r.checks.push_back({"c", hslg::stats::Verdict::pass, {}});
  Table t{"tab", {"x", "y"}, {}};
  t.add_row({cell(1.5), cell(static_cast<long long>(2))});
  CHECK_THROWS_AS(t.add_row({"1"}), std::logic_error);
  r.tables.push_back(t);
  write_report(r, dir);
  std::ifstream csv(dir / "tab.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "x,y");
  CHECK(row == "1.5,2");
  CHECK(std::filesystem::exists(dir / "report.json"));
  // a regular file where a directory is needed
  CHECK_THROWS_AS(write_report(r, dir / "tab.csv" / "sub"), IoError);
  std::filesystem::remove_all(dir);

  CHECK(exit_status(hslg::stats::Verdict::pass) == 0);
  CHECK(exit_status(hslg::stats::Verdict::fail) == 1);
  CHECK(exit_status(hslg::stats::Verdict::inconclusive) == 2);
  Report mixed;
  mixed.checks = {{"a", hslg::stats::Verdict::pass, {}}, {"b", hslg::stats::Verdict::inconclusive, {}}};
  CHECK(mixed.overall() == hslg::stats::Verdict::inconclusive);
  mixed.checks.push_back({"c", hslg::stats::Verdict::fail, {}});
  CHECK(mixed.overall() == hslg::stats::Verdict::fail);
}
