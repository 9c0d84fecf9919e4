// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fnncert/qsim.hpp"
#include "fnncert/stats.hpp"
#include "testutil.hpp"

using namespace fnncert;
using stats::ScenarioTag;

namespace {

const std::string kRoot = FNNCERT_SOURCE_DIR;

stats::CountTable load_star() {
  stats::CountTable all;
  all.tag = ScenarioTag::star_b0;
  for (const char* s : {"000", "001", "010", "011", "100", "101", "110", "111"})
    all.merge(stats::parse_counts(kRoot + "/data/star/setting_" + s + ".csv",
                                  ScenarioTag::star_b0));
  return all;
}

stats::CountTable load_bilocal() {
  stats::CountTable all;
  all.tag = ScenarioTag::bilocal;
  for (const char* s : {"00", "01", "10", "11"})
    all.merge(stats::parse_counts(kRoot + "/data/bilocal/setting_" + s + ".csv",
                                  ScenarioTag::bilocal));
  return all;
}

const stats::ProjectionRecord kProjection{15562, 2019};

}  // namespace

TEST_CASE("fixture checksums match the transcribed supplementary tables") {
  const std::pair<const char*, std::uint64_t> sums[] = {
      {"data/star/setting_000.csv", 0xdc48930510349279ULL},
      {"data/star/setting_001.csv", 0x360ef03087ac6114ULL},
      {"data/star/setting_010.csv", 0x2dafa67a7f3bc683ULL},
      {"data/star/setting_011.csv", 0x3bf91579662e7ac2ULL},
      {"data/star/setting_100.csv", 0x89bb983eda5fe9aaULL},
      {"data/star/setting_101.csv", 0xd3f7defd2518772eULL},
      {"data/star/setting_110.csv", 0x7c0fa7c4fbc37f0dULL},
      {"data/star/setting_111.csv", 0xdd79da89b4a910abULL},
      {"data/bilocal/setting_00.csv", 0x32a4886a786c10dbULL},
      {"data/bilocal/setting_01.csv", 0x8d2a3e1ab13bf433ULL},
      {"data/bilocal/setting_10.csv", 0xef9ee6d717c07017ULL},
      {"data/bilocal/setting_11.csv", 0x4fa37c9e12918cecULL},
  };
  for (const auto& [path, sum] : sums) CHECK(stats::file_checksum(kRoot + "/" + path) == sum);
}

TEST_CASE("count parsing reproduces the published per-setting totals") {
  const auto star = load_star();
  CHECK(star.setting_total({0, 0, 0}) == 19530);
  CHECK(star.setting_total({1, 1, 1}) == 20132);
  const auto biloc = load_bilocal();
  CHECK(biloc.setting_total({1, 1}) == 7848);
  CHECK(biloc.setting_total({0, 0}) == 8087);
}

TEST_CASE("count parsing rejects malformed input") {
  const std::string dir = "/tmp";
  const std::string empty = dir + "/empty_counts.csv";
  std::ofstream(empty).close();
  CHECK_THROWS(stats::parse_counts(empty, ScenarioTag::star_b0));

  const std::string bad = dir + "/bad_counts.csv";
  {
    std::ofstream f(bad);
    f << "x1,x2,x3,a1,a2,a3,count\n0,0,0,0,0,zero,12\n";
  }
  CHECK_THROWS(stats::parse_counts(bad, ScenarioTag::star_b0));

  const std::string neg = dir + "/neg_counts.csv";
  {
    std::ofstream f(neg);
    f << "x1,x2,x3,a1,a2,a3,count\n0,0,0,0,0,0,-3\n";
  }
  CHECK_THROWS(stats::parse_counts(neg, ScenarioTag::star_b0));

  // missing outcome rows: error unless explicitly allowed
  const std::string missing = dir + "/missing_counts.csv";
  {
    std::ofstream f(missing);
    f << "x1,x2,x3,a1,a2,a3,count\n0,0,0,0,0,0,7\n";
  }
  CHECK_THROWS(stats::parse_counts(missing, ScenarioTag::star_b0));
  stats::ParseOptions allow;
  allow.allow_missing_outcomes = true;
  const auto t = stats::parse_counts(missing, ScenarioTag::star_b0, allow);
  CHECK(t.setting_total({0, 0, 0}) == 7);
}

TEST_CASE("projection probability estimate") {
  const auto r = stats::estimate_p_b0(kProjection);
  CHECK(std::abs(r.value - 0.1297) < 5e-5);
  CHECK(std::abs(r.sigma - 0.0027) < 5e-5);
  CHECK(stats::estimate_p_b0({100, 0}).value == 0.0);
  CHECK(stats::estimate_p_b0({100, 0}).sigma == 0.0);
  CHECK(stats::estimate_p_b0({100, 100}).value == 1.0);
  CHECK(stats::estimate_p_b0({100, 100}).sigma == 0.0);
  CHECK_THROWS_AS(stats::estimate_p_b0({0, 0}), std::domain_error);
}

TEST_CASE("star ingestion reproduces the published witness values") {
  const auto ing = stats::ingest_star(load_star(), stats::estimate_p_b0(kProjection));
  CHECK(std::abs(ing.witness_values[0] - 0.0598) < 1e-3);
  CHECK(std::abs(ing.witness_values[1] - 0.0404) < 1e-3);
  CHECK(std::abs(ing.witness_values[2] - 0.0471) < 1e-3);
}

TEST_CASE("bilocal ingestion reproduces the published witness values") {
  const auto ing = stats::ingest_bilocal(load_bilocal());
  CHECK(std::abs(ing.r_cns - 3.4966) < 2e-3);
  CHECK(std::abs(ing.r_nsc - 3.4166) < 2e-3);
}

TEST_CASE("bilocal ingestion: zero b=2 counts make doubling a no-op") {
  stats::CountTable t;
  t.tag = ScenarioTag::bilocal;
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) {
      auto& m = t.counts[{x, z}];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 2; ++c) m[{a, b, c}] = (b == 2) ? 0 : 100 + 10 * a + b + c;
    }
  const auto ing = stats::ingest_bilocal(t);
  // manual normalization of the undoubled table must match
  const long long total = t.setting_total({0, 0});
  CHECK(ing.distribution.p({0, 0, 0}, {0, 0, 0}) ==
        doctest::Approx(100.0 / static_cast<double>(total)));
}

TEST_CASE("bilocal doubling invariance under global count scaling") {
  auto t = load_bilocal();
  stats::CountTable doubled = t;
  for (auto& [s, m] : doubled.counts)
    for (auto& [o, n] : m) n *= 2;
  const auto a = stats::ingest_bilocal(t);
  const auto b = stats::ingest_bilocal(doubled);
  CHECK(a.r_cns == b.r_cns);
  CHECK(a.r_nsc == b.r_nsc);
}

TEST_CASE("synthetic ideal-proportional counts recover the quantum value") {
  const auto d = qsim::simulate_star({testutil::kOptTheta0, testutil::kOptTheta1});
  const auto b0 = dist::marginal(d, {0, 1, 2}, dist::Conditioning{3, 0});
  stats::CountTable t;
  t.tag = ScenarioTag::star_b0;
  const dist::Scenario& sc = b0.scenario();
  for (long i = 0; i < sc.joint_inputs(); ++i) {
    const auto in = sc.unpack_input(i);
    auto& m = t.counts[in];
    for (long o = 0; o < sc.joint_outputs(); ++o)
      m[sc.unpack_output(o)] = std::llround(b0.p(i, o) * 1000000.0);
  }
  stats::MeasurementResult pb0;
  pb0.value = 0.125;
  const auto ing = stats::ingest_star(t, pb0);
  for (double v : ing.witness_values) CHECK(std::abs(v - 0.1859) < 2e-3);
}

TEST_CASE("bootstrap sigma lands in the published band and is deterministic") {
  const auto star = load_star();
  stats::BootstrapOptions opt;
  opt.resamples = 400;
  opt.seed = 20260810;
  const double s1 = stats::bootstrap_uncertainty(star, &kProjection, stats::WitnessId::I1, opt);
  CHECK(s1 >= 0.0031);
  CHECK(s1 <= 0.0051);
  const double s1b = stats::bootstrap_uncertainty(star, &kProjection, stats::WitnessId::I1, opt);
  CHECK(s1 == s1b);
  CHECK_THROWS(stats::bootstrap_uncertainty(star, &kProjection, stats::WitnessId::I1,
                                            {50, 1}));  // too few resamples
}

TEST_CASE("bootstrap of a point-mass table has zero count noise") {
  stats::CountTable t;
  t.tag = ScenarioTag::bilocal;
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) {
      auto& m = t.counts[{x, z}];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 2; ++c) m[{a, b, c}] = 0;
      m[{0, 0, 0}] = 5000;
    }
  stats::BootstrapOptions opt;
  opt.resamples = 200;
  CHECK(stats::bootstrap_uncertainty(t, nullptr, stats::WitnessId::R_CNS, opt) == 0.0);
}

TEST_CASE("bootstrap sigma scales roughly as 1/sqrt(N)") {
  const auto d = qsim::simulate_star({testutil::kOptTheta0, testutil::kOptTheta1});
  const auto b0 = dist::marginal(d, {0, 1, 2}, dist::Conditioning{3, 0});
  auto synth = [&](long long scale) {
    stats::CountTable t;
    t.tag = ScenarioTag::star_b0;
    const dist::Scenario& sc = b0.scenario();
    for (long i = 0; i < sc.joint_inputs(); ++i) {
      auto& m = t.counts[sc.unpack_input(i)];
      for (long o = 0; o < sc.joint_outputs(); ++o)
        m[sc.unpack_output(o)] = std::llround(b0.p(i, o) * static_cast<double>(scale));
    }
    return t;
  };
  stats::BootstrapOptions opt;
  opt.resamples = 400;
  opt.seed = 99;
  const stats::ProjectionRecord big{4000000, 500000};
  const double s1 = stats::bootstrap_uncertainty(synth(20000), &big, stats::WitnessId::I1, opt);
  const double s4 = stats::bootstrap_uncertainty(synth(80000), &big, stats::WitnessId::I1, opt);
  CHECK(std::abs(s4 - 0.5 * s1) <= 0.15 * 0.5 * s1);
}

TEST_CASE("one-sided Gaussian p-values") {
  CHECK(stats::p_value(3.0, 0.1, 3.0) == doctest::Approx(0.5));
  CHECK(stats::p_value(2.0, 1.0, 3.0) > 0.5);
  // 14.59 sigma above the bound: ~1.6e-48
  const double p = stats::p_value(14.59, 1.0, 0.0);
  CHECK(std::abs(std::log10(p) - std::log10(1.6e-48)) < 0.5);
  CHECK_THROWS_AS(stats::p_value(1.0, 0.0, 0.0), std::domain_error);
}
