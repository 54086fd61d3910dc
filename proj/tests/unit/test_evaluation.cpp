#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tomita/evaluation.hpp"
#include "tomita/sweep.hpp"
#include "tomita/tomita.hpp"

using namespace tomita;

namespace {

LabeledDataset balanced_g4() {
  return split_dataset(generate_dataset(GrammarId(4), {1, 10}, 20, 4), 0.8, 4);
}

}  // namespace

TEST(Accuracy, OracleConstantAndComplement) {
  const auto data = balanced_g4();
  const Dfa& g = tomita_dfa(GrammarId(4));
  const FunctionClassifier always_neg([](std::string_view) { return Label::negative; });
  const auto comp = g.complement();
  EXPECT_EQ(accuracy(g, std::span<const Sample>(data.samples)), 1.0);
  const auto negatives = static_cast<double>(data.count(Label::negative));
  EXPECT_DOUBLE_EQ(accuracy(always_neg, std::span<const Sample>(data.samples)),
                   negatives / static_cast<double>(data.samples.size()));
  EXPECT_EQ(accuracy(comp, data, Split::test), 0.0);
  EXPECT_THROW(accuracy(g, std::span<const Sample>()), InputError);
  LabeledDataset train_only = data;
  for (auto& s : train_only.samples) s.split = Split::train;
  EXPECT_THROW(accuracy(g, train_only, Split::test), InputError);
}

TEST(Fidelity, EqualsOneMinusSymmetricDifference) {
  const auto strings = oracle::strings_up_to(10);
  for (int a = 1; a <= 7; ++a) {
    for (int b = 1; b <= 7; ++b) {
      std::size_t diff = 0;
      for (const auto& x : strings) diff += oracle::tomita(a, x) != oracle::tomita(b, x) ? 1 : 0;
      const double f = fidelity(tomita_dfa(GrammarId(a)), tomita_dfa(GrammarId(b)),
                                std::span<const std::string>(strings));
      EXPECT_DOUBLE_EQ(f, 1.0 - static_cast<double>(diff) / static_cast<double>(strings.size()));
      EXPECT_DOUBLE_EQ(f, fidelity(tomita_dfa(GrammarId(b)), tomita_dfa(GrammarId(a)),
                                   std::span<const std::string>(strings)));
    }
  }
}

TEST(Fidelity, BoundsAccuracyGap) {
  // |acc(A) - acc(B)| <= 1 - fidelity(A, B) on the same samples.
  const auto data = balanced_g4();
  std::vector<std::string> texts;
  for (const auto& s : data.samples) texts.push_back(s.text);
  const std::span<const Sample> samples(data.samples);
  for (int g = 1; g <= 7; ++g) {
    const Dfa& m = tomita_dfa(GrammarId(g));
    const double gap = std::abs(accuracy(m, samples) - accuracy(tomita_dfa(GrammarId(4)), samples));
    EXPECT_LE(gap, 1.0 - fidelity(m, tomita_dfa(GrammarId(4)), std::span<const std::string>(texts)) +
                       1e-12);
  }
}

TEST(LabelNoise, FlipsExactlyTheRequestedCounts) {
  const auto data = balanced_g4();
  const auto noisy = inject_label_noise(data, 2, 2, 9);
  std::size_t flipped_pos = 0;
  std::size_t flipped_neg = 0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& a = data.samples[i];
    const auto& b = noisy.samples[i];
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(b.clean_label(), a.label);
    if (a.label != b.label) {
      EXPECT_TRUE(b.noisy);
      EXPECT_EQ(b.split, Split::train);
      (a.label == Label::positive ? flipped_pos : flipped_neg)++;
    }
  }
  EXPECT_EQ(flipped_pos, 2u);
  EXPECT_EQ(flipped_neg, 2u);
  EXPECT_EQ(inject_label_noise(data, 0, 0, 9), data);
  EXPECT_EQ(inject_label_noise(noisy, 2, 2, 9), data);
  EXPECT_THROW(inject_label_noise(data, 1000, 0, 9), InputError);
}

TEST(SuccessRate, CountsPerfectTrials) {
  std::vector<TrialResult> r(4);
  r[0].success = r[1].success = r[3].success = true;
  EXPECT_DOUBLE_EQ(success_rate(r), 0.75);
  EXPECT_THROW(success_rate({}), InputError);
}

TEST(Summary, AggregatesPerGrammarAndCell) {
  std::vector<TrialResult> r(5);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i].grammar = i < 3 ? 2 : 1;
    r[i].cell = CellKind::gru;
    r[i].dfa_accuracy = 0.5 + 0.1 * static_cast<double>(i);
    r[i].success = i == 4;
  }
  r[1].error = "boom";
  const auto s = summarize(r);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].grammar, 1);
  EXPECT_EQ(s[0].trials, 2u);
  EXPECT_EQ(s[0].successes, 1u);
  EXPECT_DOUBLE_EQ(s[0].mean_dfa_accuracy, 0.85);
  EXPECT_NEAR(s[0].var_dfa_accuracy, 0.0025, 1e-12);
  EXPECT_EQ(s[1].failures, 1u);
  EXPECT_DOUBLE_EQ(s[1].success_rate, 0.0);
}

TEST(TrialsCsv, RoundTrip) {
  std::vector<TrialResult> r(2);
  r[0] = {3, CellKind::mi_rnn, 5, 12, 11, 0xdeadbeefcafeULL, 0.1 + 0.2, 1.0, 0.975, 0.9375, false, 9,
          ""};
  r[1].grammar = 7;
  r[1].error = "quantize: no traces";
  EXPECT_EQ(trials_from_csv(trials_to_csv(r)), r);
  // Commas inside an error message cannot break the row.
  r[1].error = "a, b";
  EXPECT_EQ(trials_from_csv(trials_to_csv(r))[1].error, "a; b");
  EXPECT_THROW(trials_from_csv("grammar\n1\n"), IoError);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(RunSweep, TrialCountAndDeterminism) {
  SweepConfig cfg;
  cfg.data.lengths = {1, 6};
  cfg.data.max_per_class = 10;
  cfg.max_epochs = 20;
  cfg.hidden_seeds = 2;
  cfg.k_values = {3, 4, 5};
  const std::vector<GrammarId> grammars = {GrammarId(1), GrammarId(4)};
  const std::vector<CellKind> cells = {CellKind::second_order};
  std::size_t seen = 0;
  const auto a = run_sweep(grammars, cells, cfg, [&](const TrialResult&) { ++seen; });
  EXPECT_EQ(a.trials.size(), 2u * 2 * 3);
  EXPECT_EQ(seen, a.trials.size());
  EXPECT_EQ(a.summary.size(), 2u);
  const auto b = run_sweep(grammars, cells, cfg);
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(trials_to_csv(a.trials), trials_to_csv(b.trials));
  for (const auto& t : a.trials) EXPECT_TRUE(t.error.empty()) << t.error;
}

TEST(RunSweep, DefaultGridSize) {
  const SweepConfig cfg;
  EXPECT_EQ(cfg.k_values.size() * cfg.hidden_seeds, 130u);
}

TEST(RunSweep, SingleTrialMatchesRunTrial) {
  SweepConfig cfg;
  cfg.data.lengths = {1, 6};
  cfg.data.max_per_class = 10;
  cfg.max_epochs = 10;
  cfg.hidden_seeds = 1;
  cfg.k_values = {4};
  const std::vector<GrammarId> grammars = {GrammarId(3)};
  const std::vector<CellKind> cells = {CellKind::elman};
  const auto sweep = run_sweep(grammars, cells, cfg);
  ASSERT_EQ(sweep.trials.size(), 1u);

  const auto clean = make_dataset(GrammarId(3), cfg.data);
  const auto seeds = trial_seeds(cfg.master_seed, GrammarId(3), CellKind::elman, 0);
  const auto train_data = training_data(clean, cfg, seeds.noise);
  const auto trained = train_trial_model(GrammarId(3), CellKind::elman, 0, train_data, cfg);
  const auto t = run_trial(trained.model, GrammarId(3), clean, train_data, 4,
                           kmeans_seed_for(cfg.master_seed, GrammarId(3), CellKind::elman, 0, 4), cfg);
  EXPECT_EQ(t, sweep.trials[0]);
}
