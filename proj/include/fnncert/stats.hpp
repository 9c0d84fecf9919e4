// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fnncert/dist.hpp"

namespace fnncert::stats {

enum class ScenarioTag { star_b0, bilocal };

// Raw coincidence counts per joint input setting. Star tables are
// GHZ-success-conditioned (b = 0 implicit); bilocal tables carry b explicitly.
struct CountTable {
  ScenarioTag tag = ScenarioTag::star_b0;
  // setting -> (outcome -> count); keys are the input/output tuples of the tag
  std::map<std::vector<int>, std::map<std::vector<int>, long long>> counts;

  long long setting_total(const std::vector<int>& setting) const;
  void merge(const CountTable& other);  // disjoint settings from another file
};

struct ParseOptions {
  bool allow_missing_outcomes = false;  // absent outcome rows read as zero
};

// CSV with header x1,x2,x3,a1,a2,a3,count (star) or x,z,a,b,c,count (bilocal).
CountTable parse_counts(const std::string& path, ScenarioTag tag, const ParseOptions& = {});

// FNV-1a 64 of the file bytes; guards fixture transcription drift.
std::uint64_t file_checksum(const std::string& path);

struct ProjectionRecord {
  long long successful_runs = 0;  // six-photon events
  long long ghz_events = 0;
};

struct MeasurementResult {
  double value = 0.0;
  double sigma = 0.0;
  double p_value = 1.0;
  std::string method;
};

// value = ghz/runs, sigma = sqrt(value(1-value)/runs).
MeasurementResult estimate_p_b0(const ProjectionRecord& rec);

struct StarIngest {
  dist::ConditionalDistribution b0_table;   // p(a1,a2,a3 | b=0, x1,x2,x3)
  std::vector<double> setting_weights;      // per joint input: total counts
  double p_b0 = 0.0;
  std::array<double, 3> witness_values{};   // I1, I2, I3
};

// Normalizes each setting, multiplies by p(b=0), evaluates I1..I3 through the
// b=0 reduction with count-weighted pooling of spectator settings.
StarIngest ingest_star(const CountTable& counts, const MeasurementResult& p_b0);

struct BilocalIngest {
  dist::ConditionalDistribution distribution;  // p(a,b,c|x,z) after b=2 doubling
  std::vector<double> setting_weights;
  double r_cns = 0.0;
  double r_nsc = 0.0;
};

// Doubles every b=2 count (the setup halves those events), renormalizes per
// setting, evaluates both bilocal witnesses.
BilocalIngest ingest_bilocal(const CountTable& counts);

enum class WitnessId { I1, I2, I3, R_CNS, R_NSC };

struct BootstrapOptions {
  int resamples = 1000;
  std::uint64_t seed = 0;
};

// Multinomial resampling per setting (plus binomial resampling of the
// projection record for star witnesses); sigma is the sample standard
// deviation of the re-evaluated witness. Deterministic under a fixed seed.
double bootstrap_uncertainty(const CountTable& counts, const ProjectionRecord* projection,
                             WitnessId witness, const BootstrapOptions& options = {});

// One-sided Gaussian upper tail: P[X <= bound] for X ~ N(value, sigma),
// via erfc. Small when the violation is many sigma above the bound.
double p_value(double value, double sigma, double bound);

}  // namespace fnncert::stats
