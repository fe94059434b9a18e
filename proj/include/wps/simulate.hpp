#pragma once

// Seeded Monte Carlo over the exact joint (Alice exit, Bob outcome) distribution,
// and the Alice/Bob betting game.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wps/discrimination.hpp"
#include "wps/interferometer.hpp"
#include "wps/marker.hpp"
#include "wps/optics.hpp"
#include "wps/scenario.hpp"
#include "wps/twopath.hpp"

namespace wps::simulate {

using scenario::Condition;
using scenario::Measurement;
using scenario::Scenario;

/// Joint probabilities at or below this are rounding residue of exact zeros.
inline constexpr double kZeroClamp = 1e-15;

/// Analytic model of one scenario: the conditioned joint distribution plus the betting rules.
struct ExperimentModel {
  std::vector<std::string> exits;
  std::vector<std::string> outcomes;
  /// joint[j][b]: probability of exit j and outcome b given the condition.
  std::vector<std::vector<double>> joint;
  /// Probability that a particle satisfies the condition.
  double postselection = 0.0;
  /// Whether Bob bets on outcome b.
  std::vector<bool> bets;
  /// wins[j][b]: a bet on outcome b is won when Alice sees exit j.
  std::vector<std::vector<bool>> wins;

  std::size_t cells() const { return exits.size() * outcomes.size(); }
};

namespace detail {

inline Povm measurement_povm(const Scenario& s) {
  const bool three = s.topology == scenario::Topology::three_path;
  switch (s.measurement) {
    case Measurement::ud: return three ? discrimination::ud3(s.epsilon).povm : discrimination::ud2(s.epsilon).povm;
    case Measurement::exit_orthogonal: return discrimination::exit_povm(s.epsilon).povm;
    case Measurement::min_error:
      return three ? optics::three_path_min_error_povm(s.epsilon) : discrimination::two_path_min_error_povm(s.epsilon);
    default: return Povm({"-"}, {identity(three ? 3 : 2)});
  }
}

inline std::vector<int> allowed_exits(const Scenario& s) {
  const int n = s.path_count();
  switch (s.condition) {
    case Condition::detector_d: return {n - 1};
    case Condition::exit_i: return {0};
    case Condition::exit_ii: return {1};
    default: {
      std::vector<int> all(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) all[static_cast<std::size_t>(j)] = j;
      return all;
    }
  }
}

inline const char* exit_label(int j) {
  static constexpr const char* names[] = {"i", "ii", "iii"};
  return names[j];
}

}  // namespace detail

inline interferometer::NetworkConfig network_config(const Scenario& s) {
  interferometer::NetworkConfig c;
  for (int k = 0; k < 4; ++k) c.present[static_cast<std::size_t>(k)] = s.has_beam_splitter(k + 1);
  for (int p = 0; p < 3; ++p) c.blocked[static_cast<std::size_t>(p)] = s.blocked(p);
  return c;
}

/// Unnormalized marker column at each exit, and the matrix taking claimed links to exits for each outcome.
struct ExitColumns {
  std::vector<CVector> columns;
  /// Transfer from checkpoint links to exits (UD and min-error claims).
  CMatrix checkpoint_transfer;
  /// Transfer from the links after BS3 to exits (exit-orthogonal claims); three-path only.
  CMatrix after_bs3_transfer;
};

inline ExitColumns exit_columns(const Scenario& s) {
  scenario::validate(s);
  ExitColumns out;
  if (s.topology == scenario::Topology::three_path) {
    const auto config = network_config(s);
    const auto family = marker::build_family(s.epsilon);
    const CVector f = interferometer::transfer(config, 0, 2) * interferometer::source_column();
    out.checkpoint_transfer = interferometer::transfer(config, 2, 4);
    out.after_bs3_transfer = interferometer::transfer(config, 3, 4);
    for (int j = 0; j < 3; ++j) {
      CVector col = CVector::Zero(3);
      for (int p = 0; p < 3; ++p) col += out.checkpoint_transfer(j, p) * f(p) * family.state(p).amps;
      out.columns.push_back(col);
    }
    return out;
  }
  const bool bs3 = s.has_beam_splitter(3);
  const auto exits = twopath::exit_marker_states({s.epsilon, s.phase}, bs3, {s.blocked(0), s.blocked(1)});
  out.checkpoint_transfer = bs3 ? twopath::beam_splitter() : identity(2);
  for (const auto& e : exits) out.columns.push_back(e.amps);
  return out;
}

inline ExperimentModel build_model(const Scenario& s) {
  const ExitColumns ex = exit_columns(s);
  const Povm povm = detail::measurement_povm(s);
  ExperimentModel m;
  m.outcomes = povm.labels();
  for (int j : detail::allowed_exits(s)) {
    m.exits.emplace_back(detail::exit_label(j));
    std::vector<double> row;
    const CVector& col = ex.columns[static_cast<std::size_t>(j)];
    for (const auto& label : m.outcomes) {
      double p = col.dot(povm.element(label) * col).real();
      if (p <= kZeroClamp) p = 0.0;
      row.push_back(p);
      m.postselection += p;
    }
    m.joint.push_back(row);
  }
  if (m.postselection <= 0.0)
    throw DomainError(std::string("condition ") + scenario::to_string(s.condition) + " is never satisfied in this setup");
  for (auto& row : m.joint)
    for (auto& p : row) p /= m.postselection;

  // Bob's claim for each outcome: a link index and the transfer that carries it to the exits.
  for (const auto& label : m.outcomes) {
    int claim = -1;
    const CMatrix* transfer = &ex.checkpoint_transfer;
    if (s.measurement == Measurement::exit_orthogonal) {
      transfer = &ex.after_bs3_transfer;
      claim = label == "i" ? 0 : (label == "ii" ? 2 : 1);
    } else if (s.measurement != Measurement::none && label != "0") {
      claim = label == "A" ? 0 : (label == "B" ? 1 : 2);
    }
    m.bets.push_back(claim >= 0);
    for (std::size_t j = 0; j < m.exits.size(); ++j) {
      if (m.wins.size() <= j) m.wins.emplace_back();
      const int exit = detail::allowed_exits(s)[j];
      m.wins[j].push_back(claim >= 0 && std::abs((*transfer)(exit, claim)) > kTolerance);
    }
  }
  return m;
}

/// Counter-based generator: the value for (seed, index) does not depend on any other draw.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline double uniform(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t z = splitmix64(seed ^ splitmix64(index));
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

struct TrialRecord {
  std::uint64_t trial_index = 0;
  std::string alice_outcome;
  std::string bob_outcome;
  bool bet_placed = false;
  std::optional<bool> bet_won;
};

/// Inverse-CDF sampler over the flattened joint table.
class JointSampler {
 public:
  explicit JointSampler(const ExperimentModel& model) : model_(&model) {
    double acc = 0.0;
    for (const auto& row : model.joint)
      for (double p : row) {
        acc += p;
        cdf_.push_back(acc);
        if (p > 0.0) last_nonzero_ = cdf_.size() - 1;
      }
  }

  /// Flattened cell index (exit-major) for trial `index`.
  std::size_t cell(std::uint64_t seed, std::uint64_t index) const {
    const double u = uniform(seed, index);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto k = static_cast<std::size_t>(it - cdf_.begin());
    return k > last_nonzero_ ? last_nonzero_ : k;
  }

  TrialRecord record(std::uint64_t seed, std::uint64_t index) const {
    const std::size_t k = cell(seed, index);
    const std::size_t nb = model_->outcomes.size();
    const std::size_t j = k / nb, b = k % nb;
    TrialRecord r;
    r.trial_index = index;
    r.alice_outcome = model_->exits[j];
    r.bob_outcome = model_->outcomes[b];
    r.bet_placed = model_->bets[b];
    if (r.bet_placed) r.bet_won = model_->wins[j][b];
    return r;
  }

 private:
  const ExperimentModel* model_;
  std::vector<double> cdf_;
  std::size_t last_nonzero_ = 0;
};

struct TrialStats {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> exits;
  std::vector<std::string> outcomes;
  /// counts[j][b] over (exit, outcome).
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t exit_count(std::size_t j) const {
    std::uint64_t c = 0;
    for (auto x : counts[j]) c += x;
    return c;
  }

  std::uint64_t outcome_count(std::size_t b) const {
    std::uint64_t c = 0;
    for (const auto& row : counts) c += row[b];
    return c;
  }

  /// Counts keyed like analytic_probabilities: "exit:<j>", "bob:<b>", "<j>|<b>".
  std::vector<std::pair<std::string, std::uint64_t>> labelled_counts() const {
    std::vector<std::pair<std::string, std::uint64_t>> out;
    for (std::size_t j = 0; j < exits.size(); ++j) out.emplace_back("exit:" + exits[j], exit_count(j));
    for (std::size_t b = 0; b < outcomes.size(); ++b) out.emplace_back("bob:" + outcomes[b], outcome_count(b));
    for (std::size_t j = 0; j < exits.size(); ++j)
      for (std::size_t b = 0; b < outcomes.size(); ++b) out.emplace_back(exits[j] + "|" + outcomes[b], counts[j][b]);
    return out;
  }
};

/// Exact probabilities for every label of TrialStats::labelled_counts.
/// Marginals within rounding of 1 are certain events and get the exact-count check.
inline ProbabilityMap analytic_probabilities(const ExperimentModel& m) {
  auto snap = [](double p) { return std::abs(p - 1.0) <= kTolerance ? 1.0 : p; };
  ProbabilityMap out;
  for (std::size_t j = 0; j < m.exits.size(); ++j) {
    double p = 0.0;
    for (double x : m.joint[j]) p += x;
    out.set("exit:" + m.exits[j], snap(p));
  }
  for (std::size_t b = 0; b < m.outcomes.size(); ++b) {
    double p = 0.0;
    for (const auto& row : m.joint) p += row[b];
    out.set("bob:" + m.outcomes[b], snap(p));
  }
  for (std::size_t j = 0; j < m.exits.size(); ++j)
    for (std::size_t b = 0; b < m.outcomes.size(); ++b) out.set(m.exits[j] + "|" + m.outcomes[b], m.joint[j][b]);
  return out;
}

/// Counts over trial indices [0, n). Blocks run on up to `threads` workers; the result does not
/// depend on the split because every trial is keyed by its own index.
inline TrialStats run_trials(const ExperimentModel& model, std::uint64_t n, std::uint64_t seed, unsigned threads = 0) {
  TrialStats st;
  st.n = n;
  st.seed = seed;
  st.exits = model.exits;
  st.outcomes = model.outcomes;
  st.counts.assign(model.exits.size(), std::vector<std::uint64_t>(model.outcomes.size(), 0));
  if (n == 0) return st;

  const JointSampler sampler(model);
  const std::size_t nb = model.outcomes.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, n / 65536)));

  std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(model.cells(), 0));
  auto work = [&](unsigned t) {
    const std::uint64_t lo = n * t / threads, hi = n * (t + 1) / threads;
    for (std::uint64_t i = lo; i < hi; ++i) ++partial[t][sampler.cell(seed, i)];
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& part : partial)
    for (std::size_t k = 0; k < part.size(); ++k) st.counts[k / nb][k % nb] += part[k];
  return st;
}

inline TrialStats run_trials(const Scenario& s, std::uint64_t n, std::uint64_t seed) {
  return run_trials(build_model(s), n, seed);
}

/// First `count` trial records of the stream, for inspection and replay.
inline std::vector<TrialRecord> trial_records(const ExperimentModel& model, std::uint64_t seed, std::uint64_t count) {
  const JointSampler sampler(model);
  std::vector<TrialRecord> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(sampler.record(seed, i));
  return out;
}

struct BetReport {
  std::uint64_t n = 0;
  std::uint64_t bets = 0;
  std::uint64_t wins = 0;
  double bet_rate = 0.0;
  /// Absent when no bet was placed.
  std::optional<double> win_rate;
  /// Probability of a bet under the model.
  double expected_bet_rate = 0.0;
};

inline BetReport tally_bets(const ExperimentModel& model, const TrialStats& st) {
  BetReport r;
  r.n = st.n;
  for (std::size_t j = 0; j < model.exits.size(); ++j)
    for (std::size_t b = 0; b < model.outcomes.size(); ++b) {
      if (!model.bets[b]) continue;
      r.expected_bet_rate += model.joint[j][b];
      r.bets += st.counts[j][b];
      if (model.wins[j][b]) r.wins += st.counts[j][b];
    }
  if (r.n > 0) r.bet_rate = static_cast<double>(r.bets) / static_cast<double>(r.n);
  if (r.bets > 0) r.win_rate = static_cast<double>(r.wins) / static_cast<double>(r.bets);
  return r;
}

inline BetReport betting_game(const Scenario& s, std::uint64_t n, std::uint64_t seed) {
  if (s.measurement == Measurement::none) throw ContractError("betting_game: the scenario has no discrimination measurement");
  const ExperimentModel model = build_model(s);
  return tally_bets(model, run_trials(model, n, seed));
}

struct ZScore {
  std::string label;
  double expected = 0.0;
  double frequency = 0.0;
  /// Absent for p in {0, 1}, where the count must be exact.
  std::optional<double> z;
  bool pass = true;
};

inline constexpr double kZThreshold = 5.0;

inline std::vector<ZScore> compare_to_analytic(const TrialStats& st, const ProbabilityMap& analytic,
                                               double threshold = kZThreshold) {
  const auto counts = st.labelled_counts();
  if (counts.size() != analytic.size()) throw ContractError("compare_to_analytic: outcome label sets differ");
  std::vector<ZScore> out;
  for (const auto& [label, count] : counts) {
    if (!analytic.has(label)) throw ContractError("compare_to_analytic: no analytic value for " + label);
    ZScore z;
    z.label = label;
    z.expected = analytic.at(label);
    if (st.n == 0) {
      out.push_back(z);
      continue;
    }
    const double n = static_cast<double>(st.n);
    z.frequency = static_cast<double>(count) / n;
    if (z.expected == 0.0) {
      z.pass = count == 0;
    } else if (z.expected == 1.0) {
      z.pass = count == st.n;
    } else {
      z.z = (z.frequency - z.expected) / std::sqrt(z.expected * (1.0 - z.expected) / n);
      z.pass = std::abs(*z.z) <= threshold;
    }
    out.push_back(z);
  }
  return out;
}

}  // namespace wps::simulate
