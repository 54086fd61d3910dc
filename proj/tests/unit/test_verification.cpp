#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "tomita/edit_distance.hpp"
#include "tomita/model.hpp"
#include "tomita/tomita.hpp"
#include "tomita/verification.hpp"

using namespace tomita;

namespace {

// G3 with the transition out of its start state on '0' redirected to the
// state reached after "1", so strings starting with 0 behave as if they
// started with 1.
Dfa corrupted_g3() {
  const Dfa& g = tomita_dfa(GrammarId(3));
  std::vector<std::size_t> delta;
  std::vector<bool> acc;
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    delta.push_back(g.next(s, 0));
    delta.push_back(g.next(s, 1));
    acc.push_back(g.is_accepting(s));
  }
  delta[g.start() * 2] = g.next(g.start(), 1);
  return Dfa(g.num_states(), g.start(), delta, acc);
}

void expect_witnesses_hold(const AdversarialResult& r, const Dfa& oracle,
                           const std::function<Label(const std::string&)>& model) {
  for (const auto& w : r.witnesses) {
    EXPECT_EQ(edit_distance(w.center, w.perturbed), 1u);
    EXPECT_EQ(oracle.classify(w.center), r.label);
    EXPECT_EQ(model(w.center), r.label);
    EXPECT_EQ(oracle.classify(w.perturbed), r.label);
    EXPECT_EQ(model(w.perturbed), flip(r.label));
    EXPECT_EQ(w.oracle_label, r.label);
    EXPECT_EQ(w.model_label, flip(r.label));
  }
}

}  // namespace

TEST(Neighborhood, ExactForShortStrings) {
  const auto candidates = oracle::strings_up_to(6);
  for (const auto& c : oracle::strings_up_to(5)) {
    std::vector<std::string> expected;
    for (const auto& y : candidates) {
      if (y != c && oracle::levenshtein(c, y) == 1) expected.push_back(y);
    }
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(neighborhood(c, 1), expected) << "center '" << c << "'";
  }
}

TEST(Neighborhood, SizeBoundAndExample) {
  for (std::size_t n : {1u, 5u, 40u}) {
    EXPECT_LE(neighborhood(std::string(n, '0'), 1).size(), 3 * n + 2);
  }
  EXPECT_EQ(neighborhood("1", 1), (std::vector<std::string>{"", "0", "01", "10", "11"}));
  EXPECT_THROW(neighborhood("1", 0), InputError);
}

TEST(Neighborhood, RadiusTwo) {
  const auto ball = neighborhood("010", 2);
  std::set<std::string> expected;
  for (const auto& y : oracle::strings_up_to(5)) {
    const auto d = oracle::levenshtein("010", y);
    if (d >= 1 && d <= 2) expected.insert(y);
  }
  EXPECT_EQ(std::set<std::string>(ball.begin(), ball.end()), expected);
}

TEST(LabelSampler, ClassSizesAndLabels) {
  for (int g : kAllGrammars) {
    const Dfa& d = tomita_dfa(GrammarId(g));
    const LabelSampler s(d, 10);
    std::size_t pos = 0;
    for (const auto& x : oracle::all_strings(10)) pos += d.accepts(x) ? 1 : 0;
    EXPECT_EQ(s.class_size(Label::positive), static_cast<double>(pos));
    EXPECT_EQ(s.class_size(Label::negative), static_cast<double>(1024 - pos));
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
      for (Label l : {Label::positive, Label::negative}) {
        const auto x = s.sample(l, rng);
        ASSERT_EQ(x.size(), 10u);
        ASSERT_EQ(d.classify(x), l);
      }
    }
  }
  const LabelSampler odd(tomita_dfa(GrammarId(2)), 7);
  Rng rng(1);
  EXPECT_THROW(odd.sample(Label::positive, rng), InputError);
  EXPECT_GT(LabelSampler(tomita_dfa(GrammarId(4)), 500).class_size(Label::positive), 1e100);
}

TEST(LabelSampler, Uniform) {
  // Grammar 4 at length 4 has 13 positive strings.
  const Dfa& d = tomita_dfa(GrammarId(4));
  const LabelSampler s(d, 4);
  ASSERT_EQ(s.class_size(Label::positive), 13.0);
  Rng rng(2);
  std::map<std::string, int> hist;
  const int draws = 13000;
  for (int i = 0; i < draws; ++i) ++hist[s.sample(Label::positive, rng)];
  ASSERT_EQ(hist.size(), 13u);
  for (const auto& [x, n] : hist) EXPECT_NEAR(n, 1000, 150) << x;
}

TEST(AdversarialAccuracy, OracleIsItsOwnPerfectModel) {
  VerificationParams p;
  p.samples = 10;
  p.trials = 2;
  for (int g : kAllGrammars) {
    const Dfa& d = tomita_dfa(GrammarId(g));
    for (std::size_t n : {4u, 11u, 20u}) {
      p.length = n;
      const auto rep = verify_model(d, "oracle", g, d, p, 7);
      for (const auto& r : {rep.positive, rep.negative}) {
        if (!r) continue;
        EXPECT_EQ(r->mean_gamma(), 1.0) << "G" << g << " N=" << n;
        EXPECT_TRUE(r->witnesses.empty());
      }
    }
  }
}

TEST(AdversarialAccuracy, CorruptedModelIsCaught) {
  const Dfa& g3 = tomita_dfa(GrammarId(3));
  const Dfa bad = corrupted_g3();
  VerificationParams p;
  p.length = 30;
  p.samples = 50;
  p.trials = 3;
  const auto rep = verify_model(bad, "corrupted", 3, g3, p, 11);
  ASSERT_TRUE(rep.error.empty()) << rep.error;
  const double worst = std::min(*rep.gamma_pos(), *rep.gamma_neg());
  EXPECT_LT(worst, 1.0);
  std::size_t total = 0;
  for (const auto& r : {*rep.positive, *rep.negative}) {
    expect_witnesses_hold(r, g3, [&](const std::string& x) { return bad.classify(x); });
    total += r.witnesses.size();
    std::size_t broken = 0;
    for (const auto& t : r.trials) {
      broken += t.broken;
      EXPECT_DOUBLE_EQ(t.gamma, 1.0 - static_cast<double>(t.broken) / 50.0);
    }
    EXPECT_EQ(broken, r.witnesses.size());
  }
  EXPECT_GT(total, 0u);
  // Same seed, same answer.
  const auto again = verify_model(bad, "corrupted", 3, g3, p, 11);
  EXPECT_EQ(again.positive->witnesses, rep.positive->witnesses);
}

TEST(AdversarialAccuracy, NetworkWitnessesReverify) {
  auto model = init_model(CellKind::second_order, 4, 21);
  model.mutable_parameters()[model.parameters().size() - 2].values[0] = 0.0;
  const Dfa& g4 = tomita_dfa(GrammarId(4));
  VerificationParams p;
  p.length = 12;
  p.samples = 20;
  p.trials = 1;
  p.max_attempts = 2000;
  const auto rep = verify_model(model, "rnn", 4, g4, p, 3);
  for (const auto& r : {rep.positive, rep.negative}) {
    if (!r) continue;
    expect_witnesses_hold(*r, g4, [&](const std::string& x) { return model.classify(x); });
  }
}

TEST(AdversarialAccuracy, ExhaustedSamplingIsReported) {
  // A constant-negative model can never supply positive centers.
  const Dfa always_reject(1, 0, {0, 0}, {false});
  VerificationParams p;
  p.length = 6;
  p.samples = 2;
  p.trials = 1;
  p.max_attempts = 100;
  EXPECT_THROW(adversarial_accuracy(always_reject, tomita_dfa(GrammarId(4)), p, Label::positive, 1),
               VerificationError);
  const auto rep = verify_model(always_reject, "reject", 4, tomita_dfa(GrammarId(4)), p, 1);
  EXPECT_FALSE(rep.positive.has_value());
  EXPECT_TRUE(rep.negative.has_value());
  EXPECT_NE(rep.error.find("insufficient correctly-classified strings"), std::string::npos);
  p.length = 7;
  EXPECT_THROW(adversarial_accuracy(tomita_dfa(GrammarId(2)), tomita_dfa(GrammarId(2)), p,
                                    Label::positive, 1),
               VerificationError);
}

TEST(LocalInvariance, VacuousForGrammar5) {
  // Every edit changes the parity of some count, so no neighbor keeps the
  // label and invariance holds vacuously.
  const Dfa& g5 = tomita_dfa(GrammarId(5));
  const Dfa flipped = g5.complement();
  for (const auto& x : oracle::all_strings(8)) {
    ASSERT_FALSE(local_invariance(g5, g5, x, 1).has_value());
  }
  EXPECT_THROW(local_invariance(flipped, g5, "0000", 1), InputError);
  EXPECT_FALSE(local_invariance(corrupted_g3(), tomita_dfa(GrammarId(3)), "1", 1).has_value());
  const auto w = local_invariance(corrupted_g3(), tomita_dfa(GrammarId(3)), "0", 1);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, "00");
  EXPECT_EQ(tomita_dfa(GrammarId(3)).classify(*w), Label::positive);
  EXPECT_EQ(corrupted_g3().classify(*w), Label::negative);
}

TEST(EquivalenceCheck, ExhaustiveAndSampled) {
  const Dfa& g3 = tomita_dfa(GrammarId(3));
  const auto same = equivalence_check(g3, g3, {0, 12}, 1024, 1);
  EXPECT_EQ(same.agreement(), 1.0);
  EXPECT_EQ(same.checked, 2047u + 2 * 1024);
  const auto diff = equivalence_check(corrupted_g3(), g3, {0, 6}, 64, 1, 3);
  EXPECT_LT(diff.agreement(), 1.0);
  EXPECT_EQ(diff.witnesses.size(), 3u);
  for (const auto& x : diff.witnesses) EXPECT_NE(corrupted_g3().classify(x), g3.classify(x));
}

TEST(LengthSweep, RecordsErrorsAndContinues) {
  const Dfa& g2 = tomita_dfa(GrammarId(2));
  VerificationParams p;
  p.samples = 3;
  p.trials = 1;
  const std::vector<std::size_t> lengths = {4, 5, 6};
  const auto rows = length_sweep(g2, g2, lengths, p, Label::positive, 1);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].gamma, 1.0);
  EXPECT_FALSE(rows[1].gamma.has_value());
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_EQ(rows[2].gamma, 1.0);
  const auto csv = length_sweep_to_csv(rows);
  EXPECT_NE(csv.find("4,1,"), std::string::npos);
}

TEST(VerificationCsv, RowsPerTrialAndLabel) {
  const Dfa& g4 = tomita_dfa(GrammarId(4));
  VerificationParams p;
  p.length = 8;
  p.samples = 4;
  p.trials = 3;
  const auto rep = verify_model(corrupted_g3(), "x", 4, g4, p, 2);
  const auto rows = verification_rows(rep);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 6);
  EXPECT_EQ(verification_header(), "grammar,cell,N,trial,label,gamma\n");
  const auto w = witness_rows(rep);
  EXPECT_EQ(static_cast<std::size_t>(std::count(w.begin(), w.end(), '\n')),
            rep.positive->witnesses.size() + rep.negative->witnesses.size());
}
