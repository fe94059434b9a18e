#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "wps/simulate.hpp"

using namespace wps;
using namespace wps::simulate;
using scenario::Topology;

namespace {

Scenario make(Topology t, double e, std::vector<int> bs, Measurement m, Condition c) {
  Scenario s;
  s.topology = t;
  s.epsilon = e;
  s.beam_splitters = std::move(bs);
  s.measurement = m;
  s.condition = c;
  return s;
}

Scenario three_full(double e, Measurement m, Condition c = Condition::detector_d) {
  return make(Topology::three_path, e, {1, 2, 3, 4}, m, c);
}

void expect_all_within_5_sigma(const Scenario& s, std::uint64_t n, std::uint64_t seed) {
  const auto model = build_model(s);
  const auto st = run_trials(model, n, seed);
  for (const auto& z : compare_to_analytic(st, analytic_probabilities(model)))
    EXPECT_TRUE(z.pass) << z.label << " freq " << z.frequency << " p " << z.expected << " z " << z.z.value_or(0.0);
}

}  // namespace

TEST(Rng, CounterBasedAndUniform) {
  EXPECT_EQ(uniform(42, 7), uniform(42, 7));
  EXPECT_NE(uniform(42, 7), uniform(43, 7));
  EXPECT_NE(uniform(42, 7), uniform(42, 8));
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform(3, static_cast<std::uint64_t>(i));
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12.0 / n));
}

TEST(BuildModel, UdOnDetectorD) {
  const double e = 0.04;
  const auto m = build_model(three_full(e, Measurement::ud));
  ASSERT_EQ(m.exits, std::vector<std::string>{"iii"});
  EXPECT_NEAR(m.postselection, (1 + 6 * e) / 9, 1e-12);
  const auto p = analytic_probabilities(m);
  for (const char* a : {"bob:A", "bob:B", "bob:C"}) EXPECT_NEAR(p.at(a), 3 * e / (1 + 6 * e), 1e-12);
  EXPECT_NEAR(p.at("bob:0"), (1 - 3 * e) / (1 + 6 * e), 1e-12);
  EXPECT_EQ(m.bets, (std::vector<bool>{true, true, true, false}));
}

TEST(BuildModel, VerificationModeExitsAndUnreachableCells) {
  const double e = 0.1;
  const auto m = build_model(make(Topology::three_path, e, {1, 2}, Measurement::ud, Condition::unconditioned));
  EXPECT_NEAR(m.postselection, 1.0, 1e-12);
  const auto p = analytic_probabilities(m);
  for (const char* x : {"exit:i", "exit:ii", "exit:iii"}) EXPECT_NEAR(p.at(x), 1.0 / 3.0, 1e-12);
  // Each exit carries one checkpoint; the other two conclusive outcomes never occur there.
  int zeros = 0;
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t b = 0; b < 3; ++b) zeros += m.joint[j][b] == 0.0;
  EXPECT_EQ(zeros, 6);
}

TEST(BuildModel, Errors) {
  auto s = three_full(0.0, Measurement::ud);
  EXPECT_THROW(build_model(s), DegenerateFamilyError);
  s = three_full(0.04, Measurement::none);
  s.blocked_paths = {"i", "ii", "iii"};
  EXPECT_THROW(build_model(s), DomainError);
  EXPECT_THROW(build_model(three_full(0.5, Measurement::ud)), DomainError);
}

TEST(BuildModel, NoneMeasurementHasSingleOutcome) {
  const auto m = build_model(three_full(0.04, Measurement::none, Condition::unconditioned));
  ASSERT_EQ(m.outcomes, std::vector<std::string>{"-"});
  EXPECT_EQ(m.bets, std::vector<bool>{false});
  const auto p = analytic_probabilities(m);
  EXPECT_NEAR(p.at("exit:iii"), (1 + 6 * 0.04) / 9.0, 1e-12);
  EXPECT_NEAR(p.at("exit:i") + p.at("exit:ii") + p.at("exit:iii"), 1.0, 1e-12);
}

TEST(BuildModel, BlockedCLink) {
  auto s = three_full(0.04, Measurement::none, Condition::unconditioned);
  s.blocked_paths = {"iii"};
  const auto m = build_model(s);
  EXPECT_NEAR(m.postselection, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.joint[2][0] * m.postselection, 2.0 / 3.0 * 0.04, 1e-12);
}

TEST(RunTrials, ZeroTrialsAndCountsSum) {
  const auto model = build_model(three_full(0.04, Measurement::ud));
  const auto empty = run_trials(model, 0, 1);
  EXPECT_EQ(empty.n, 0u);
  for (const auto& row : empty.counts)
    for (auto c : row) EXPECT_EQ(c, 0u);
  const auto z = compare_to_analytic(empty, analytic_probabilities(model));
  for (const auto& x : z) EXPECT_TRUE(x.pass);

  const auto st = run_trials(model, 12345, 9);
  std::uint64_t total = 0;
  for (const auto& row : st.counts)
    for (auto c : row) total += c;
  EXPECT_EQ(total, 12345u);
}

TEST(RunTrials, DeterministicAcrossThreadCounts) {
  const auto model = build_model(make(Topology::three_path, 0.1, {1, 2}, Measurement::ud, Condition::unconditioned));
  const auto a = run_trials(model, 300000, 42, 1);
  const auto b = run_trials(model, 300000, 42, 4);
  const auto c = run_trials(model, 300000, 42);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.counts, c.counts);
  EXPECT_NE(a.counts, run_trials(model, 300000, 43).counts);

  const auto r1 = trial_records(model, 42, 1000);
  const auto r2 = trial_records(model, 42, 1000);
  ASSERT_EQ(r1.size(), 1000u);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].alice_outcome, r2[i].alice_outcome);
    EXPECT_EQ(r1[i].bob_outcome, r2[i].bob_outcome);
    EXPECT_EQ(r1[i].bet_placed, r1[i].bob_outcome != "0");
    EXPECT_EQ(r1[i].bet_won.has_value(), r1[i].bet_placed);
  }
}

TEST(RunTrials, MonteCarloWithinFiveSigma) {
  const std::uint64_t n = 1000000;
  for (double e : {0.01, 0.04, 0.1}) {
    expect_all_within_5_sigma(make(Topology::three_path, e, {1, 2}, Measurement::ud, Condition::unconditioned), n, 1);
    expect_all_within_5_sigma(three_full(e, Measurement::ud), n, 2);
    expect_all_within_5_sigma(three_full(e, Measurement::exit_orthogonal), n, 3);
    expect_all_within_5_sigma(make(Topology::three_path, e, {1, 2, 3}, Measurement::exit_orthogonal,
                                   Condition::unconditioned),
                              n, 4);
    expect_all_within_5_sigma(make(Topology::two_path, e, {2}, Measurement::ud, Condition::unconditioned), n, 5);
    expect_all_within_5_sigma(make(Topology::two_path, e, {2, 3}, Measurement::ud, Condition::unconditioned), n, 6);
    expect_all_within_5_sigma(three_full(e, Measurement::min_error), n, 7);
  }
}

TEST(BettingGame, TwoPathVerifyMode) {
  const double e = 0.04;
  const std::uint64_t n = 1000000;
  const auto r = betting_game(make(Topology::two_path, e, {2}, Measurement::ud, Condition::unconditioned), n, 11);
  EXPECT_NEAR(r.expected_bet_rate, 2 * e, 1e-12);
  EXPECT_LE(std::abs(r.bet_rate - 2 * e), 5 * std::sqrt(2 * e * (1 - 2 * e) / n));
  ASSERT_TRUE(r.win_rate);
  EXPECT_EQ(r.wins, r.bets);
  EXPECT_EQ(*r.win_rate, 1.0);
}

TEST(BettingGame, ThreePathUdOnD) {
  const std::uint64_t n = 1000000;
  for (double e : {0.01, 0.04, 0.1}) {
    const auto r = betting_game(three_full(e, Measurement::ud), n, 12);
    const double p = 9 * e / (1 + 6 * e);
    EXPECT_NEAR(r.expected_bet_rate, p, 1e-12);
    EXPECT_LE(std::abs(r.bet_rate - p), 5 * std::sqrt(p * (1 - p) / n));
    EXPECT_EQ(r.wins, r.bets);
  }
}

TEST(BettingGame, ExitOrthogonalBetsEveryTime) {
  const auto r = betting_game(three_full(0.04, Measurement::exit_orthogonal), 200000, 13);
  EXPECT_EQ(r.bets, r.n);
  EXPECT_EQ(r.wins, r.bets);
  EXPECT_NEAR(r.expected_bet_rate, 1.0, 1e-12);
}

TEST(BettingGame, ZeroErrorOverSeedsAndVerificationModes) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (double e : {0.01, 0.2, 1.0 / 3.0}) {
      const auto three = betting_game(make(Topology::three_path, e, {1, 2}, Measurement::ud, Condition::unconditioned),
                                      20000, seed);
      EXPECT_EQ(three.wins, three.bets);
      const auto exits = betting_game(make(Topology::three_path, e, {1, 2, 3}, Measurement::exit_orthogonal,
                                           Condition::exit_ii),
                                      20000, seed);
      EXPECT_EQ(exits.wins, exits.bets);
    }
    const auto two = betting_game(make(Topology::two_path, 0.3, {2}, Measurement::ud, Condition::unconditioned), 20000, seed);
    EXPECT_EQ(two.wins, two.bets);
  }
}

TEST(BettingGame, Errors) {
  EXPECT_THROW(betting_game(three_full(0.04, Measurement::none), 10, 0), ContractError);
  EXPECT_THROW(betting_game(three_full(0.0, Measurement::ud), 10, 0), DegenerateFamilyError);
}

TEST(CompareToAnalytic, ExactCountsForCertainEvents) {
  const auto model = build_model(three_full(0.04, Measurement::exit_orthogonal));
  auto st = run_trials(model, 100000, 5);
  auto z = compare_to_analytic(st, analytic_probabilities(model));
  bool saw_zero = false, saw_one = false;
  for (const auto& x : z) {
    if (x.expected == 0.0) {
      saw_zero = true;
      EXPECT_FALSE(x.z.has_value());
      EXPECT_TRUE(x.pass);
    }
    if (x.expected == 1.0) {
      saw_one = true;
      EXPECT_TRUE(x.pass);
    }
  }
  EXPECT_TRUE(saw_zero);
  EXPECT_TRUE(saw_one);

  // One forged count moved into an impossible cell fails the check.
  std::size_t zero = 0, seen = 0;
  for (std::size_t b = 0; b < model.outcomes.size(); ++b) {
    if (model.joint[0][b] == 0.0) zero = b;
    if (st.counts[0][b] > 0) seen = b;
  }
  ASSERT_EQ(model.joint[0][zero], 0.0);
  st.counts[0][zero] += 1;
  st.counts[0][seen] -= 1;
  z = compare_to_analytic(st, analytic_probabilities(model));
  const std::string cell = model.exits[0] + "|" + model.outcomes[zero];
  bool failed = false;
  for (const auto& x : z)
    if (x.label == cell) failed = !x.pass;
  EXPECT_TRUE(failed);
}

TEST(CompareToAnalytic, LabelMismatch) {
  const auto a = build_model(three_full(0.04, Measurement::ud));
  const auto b = build_model(three_full(0.04, Measurement::exit_orthogonal));
  EXPECT_THROW(compare_to_analytic(run_trials(a, 10, 0), analytic_probabilities(b)), ContractError);
}

TEST(CompareToAnalytic, FairCoinWithinFiveSigma) {
  ExperimentModel coin;
  coin.exits = {"i"};
  coin.outcomes = {"h", "t"};
  coin.joint = {{0.5, 0.5}};
  coin.postselection = 1.0;
  coin.bets = {false, false};
  coin.wins = {{false, false}};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto z = compare_to_analytic(run_trials(coin, 1000000, seed), analytic_probabilities(coin));
    for (const auto& x : z) EXPECT_TRUE(x.pass) << x.label;
  }
}
