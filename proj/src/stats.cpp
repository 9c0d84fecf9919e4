// SPDX-License-Identifier: Apache-2.0
#include "fnncert/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fnncert/witness.hpp"

namespace fnncert::stats {

namespace {

struct Layout {
  int setting_arity;
  int outcome_arity;
  std::vector<int> setting_card;
  std::vector<int> outcome_card;
  std::vector<std::string> header;
};

Layout layout_for(ScenarioTag tag) {
  if (tag == ScenarioTag::star_b0)
    return {3, 3, {2, 2, 2}, {2, 2, 2}, {"x1", "x2", "x3", "a1", "a2", "a3", "count"}};
  return {2, 3, {2, 2}, {2, 3, 2}, {"x", "z", "a", "b", "c", "count"}};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

void enumerate_tuples(const std::vector<int>& card, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(card.size(), 0);
  while (true) {
    out.push_back(cur);
    int k = static_cast<int>(card.size()) - 1;
    while (k >= 0 && ++cur[k] == card[k]) cur[k--] = 0;
    if (k < 0) break;
  }
}

}  // namespace

long long CountTable::setting_total(const std::vector<int>& setting) const {
  auto it = counts.find(setting);
  if (it == counts.end()) return 0;
  long long total = 0;
  for (const auto& [outcome, n] : it->second) total += n;
  return total;
}

void CountTable::merge(const CountTable& other) {
  if (other.tag != tag) throw std::invalid_argument("cannot merge tables of different scenarios");
  for (const auto& [setting, m] : other.counts) {
    if (counts.count(setting))
      throw std::invalid_argument("duplicate setting across merged count tables");
    counts[setting] = m;
  }
}

CountTable parse_counts(const std::string& path, ScenarioTag tag, const ParseOptions& options) {
  const Layout lay = layout_for(tag);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open count file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty count file: " + path);
  if (split_csv(line) != lay.header)
    throw std::runtime_error("count file header does not match scenario: " + path);

  CountTable table;
  table.tag = tag;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != lay.header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    std::vector<int> setting(lay.setting_arity), outcome(lay.outcome_arity);
    long long n = 0;
    try {
      for (int k = 0; k < lay.setting_arity; ++k) setting[k] = std::stoi(f[k]);
      for (int k = 0; k < lay.outcome_arity; ++k) outcome[k] = std::stoi(f[lay.setting_arity + k]);
      n = std::stoll(f.back());
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    }
    for (int k = 0; k < lay.setting_arity; ++k)
      if (setting[k] < 0 || setting[k] >= lay.setting_card[k])
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": setting out of range");
    for (int k = 0; k < lay.outcome_arity; ++k)
      if (outcome[k] < 0 || outcome[k] >= lay.outcome_card[k])
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": outcome out of range");
    if (n < 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": negative count");
    auto& m = table.counts[setting];
    if (m.count(outcome))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate outcome row");
    m[outcome] = n;
  }
  if (table.counts.empty()) throw std::runtime_error("count file has no data rows: " + path);

  std::vector<std::vector<int>> outcomes;
  enumerate_tuples(lay.outcome_card, outcomes);
  for (auto& [setting, m] : table.counts) {
    for (const auto& o : outcomes) {
      if (!m.count(o)) {
        if (!options.allow_missing_outcomes)
          throw std::runtime_error(path + ": missing outcome row for a present setting");
        m[o] = 0;
      }
    }
  }
  return table;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

MeasurementResult estimate_p_b0(const ProjectionRecord& rec) {
  if (rec.successful_runs <= 0) throw std::domain_error("projection record has no runs");
  if (rec.ghz_events < 0 || rec.ghz_events > rec.successful_runs)
    throw std::domain_error("ghz_events outside [0, successful_runs]");
  MeasurementResult out;
  out.value = static_cast<double>(rec.ghz_events) / static_cast<double>(rec.successful_runs);
  out.sigma = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(rec.successful_runs));
  out.p_value = 1.0;
  out.method = "binomial";
  return out;
}

namespace {

// b0 table + per-setting weights from star counts
std::pair<dist::ConditionalDistribution, std::vector<double>> star_b0_table(
    const CountTable& counts) {
  if (counts.tag != ScenarioTag::star_b0) throw std::invalid_argument("expected star counts");
  const dist::Scenario sc({{"A1", 2, 2}, {"A2", 2, 2}, {"A3", 2, 2}});
  std::vector<double> table(sc.joint_inputs() * sc.joint_outputs(), 0.0);
  std::vector<double> weights(sc.joint_inputs(), 0.0);
  if (static_cast<long>(counts.counts.size()) != sc.joint_inputs())
    throw std::invalid_argument("star ingestion requires all 8 settings");
  for (const auto& [setting, m] : counts.counts) {
    const long i = sc.input_index(setting);
    long long total = 0;
    for (const auto& [o, n] : m) total += n;
    if (total <= 0) throw std::domain_error("star setting with zero total counts");
    weights[i] = static_cast<double>(total);
    for (const auto& [o, n] : m)
      table[i * sc.joint_outputs() + sc.output_index(o)] =
          static_cast<double>(n) / static_cast<double>(total);
  }
  return {dist::ConditionalDistribution(sc, std::move(table)), std::move(weights)};
}

std::pair<dist::ConditionalDistribution, std::vector<double>> bilocal_table(
    const CountTable& counts) {
  if (counts.tag != ScenarioTag::bilocal) throw std::invalid_argument("expected bilocal counts");
  const dist::Scenario sc = dist::Scenario::bilocal();
  std::vector<double> table(sc.joint_inputs() * sc.joint_outputs(), 0.0);
  std::vector<double> weights(sc.joint_inputs(), 0.0);
  if (counts.counts.size() != 4)
    throw std::invalid_argument("bilocal ingestion requires all 4 settings");
  for (const auto& [setting, m] : counts.counts) {
    const long i = sc.input_index({setting[0], 0, setting[1]});
    long long total = 0;
    for (const auto& [o, n] : m) {
      const long long eff = (o[1] == 2) ? 2 * n : n;  // b=2 doubling
      total += eff;
    }
    if (total <= 0) throw std::domain_error("bilocal setting with zero total counts");
    weights[i] = static_cast<double>(total);
    for (const auto& [o, n] : m) {
      const long long eff = (o[1] == 2) ? 2 * n : n;
      table[i * sc.joint_outputs() + sc.output_index(o)] =
          static_cast<double>(eff) / static_cast<double>(total);
    }
  }
  return {dist::ConditionalDistribution(sc, std::move(table)), std::move(weights)};
}

}  // namespace

StarIngest ingest_star(const CountTable& counts, const MeasurementResult& p_b0) {
  auto [b0, weights] = star_b0_table(counts);
  StarIngest out{std::move(b0), weights, p_b0.value, {}};
  for (int i = 1; i <= 3; ++i)
    out.witness_values[i - 1] =
        witness::evaluate_from_b0_data(i, out.b0_table, p_b0.value, &out.setting_weights);
  return out;
}

BilocalIngest ingest_bilocal(const CountTable& counts) {
  auto [d, weights] = bilocal_table(counts);
  BilocalIngest out{std::move(d), weights, 0.0, 0.0};
  out.r_cns = witness::evaluate(witness::builtin_fnn_bilocal(witness::BilocalWitness::C_NS),
                                out.distribution, &out.setting_weights)
                  .value;
  out.r_nsc = witness::evaluate(witness::builtin_fnn_bilocal(witness::BilocalWitness::NS_C),
                                out.distribution, &out.setting_weights)
                  .value;
  return out;
}

double bootstrap_uncertainty(const CountTable& counts, const ProjectionRecord* projection,
                             WitnessId witness_id, const BootstrapOptions& options) {
  if (options.resamples < 100) throw std::invalid_argument("bootstrap needs >= 100 resamples");
  const bool star = witness_id == WitnessId::I1 || witness_id == WitnessId::I2 ||
                    witness_id == WitnessId::I3;
  if (star && projection == nullptr)
    throw std::invalid_argument("star bootstrap needs the projection record");

  std::vector<double> values;
  values.reserve(options.resamples);
  for (int r = 0; r < options.resamples; ++r) {
    // independent deterministic stream per resample
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r + 1)};
    std::mt19937_64 rng(seq);

    CountTable resampled;
    resampled.tag = counts.tag;
    for (const auto& [setting, m] : counts.counts) {
      long long total = 0;
      for (const auto& [o, n] : m) total += n;
      // sequential multinomial via conditional binomials; the last outcome
      // absorbs the remainder so the setting total is preserved exactly
      long long remaining = total;
      double prob_left = 1.0;
      auto& rm = resampled.counts[setting];
      size_t k = 0;
      for (const auto& [o, n] : m) {
        ++k;
        long long draw = remaining;
        if (k < m.size()) {
          const double p =
              prob_left > 0 ? static_cast<double>(n) / static_cast<double>(total) / prob_left
                            : 0.0;
          std::binomial_distribution<long long> bin(std::max(remaining, 0LL),
                                                    std::clamp(p, 0.0, 1.0));
          draw = remaining > 0 ? bin(rng) : 0;
        }
        rm[o] = draw;
        remaining -= draw;
        prob_left -= static_cast<double>(n) / static_cast<double>(total);
      }
    }

    if (star) {
      std::binomial_distribution<long long> bin(
          projection->successful_runs,
          static_cast<double>(projection->ghz_events) /
              static_cast<double>(projection->successful_runs));
      ProjectionRecord rec{projection->successful_runs, bin(rng)};
      const StarIngest ing = ingest_star(resampled, estimate_p_b0(rec));
      const int idx = witness_id == WitnessId::I1 ? 0 : witness_id == WitnessId::I2 ? 1 : 2;
      values.push_back(ing.witness_values[idx]);
    } else {
      const BilocalIngest ing = ingest_bilocal(resampled);
      values.push_back(witness_id == WitnessId::R_CNS ? ing.r_cns : ing.r_nsc);
    }
  }

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size() - 1);
  return std::sqrt(var);
}

double p_value(double value, double sigma, double bound) {
  if (sigma <= 0.0) throw std::domain_error("p_value needs sigma > 0");
  return 0.5 * std::erfc((value - bound) / (sigma * std::sqrt(2.0)));
}

}  // namespace fnncert::stats
