#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tomita/extraction.hpp"
#include "tomita/kmeans.hpp"
#include "tomita/tomita.hpp"

using namespace tomita;

namespace {

// A trace whose hidden vectors are one-hot encodings of the DFA state, with
// the DFA's own decision at every prefix. Extraction from such traces must
// give back the DFA.
HiddenTrace dfa_trace(const Dfa& d, const std::string& x) {
  HiddenTrace tr;
  tr.input = x;
  auto push = [&](std::size_t s) {
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(d.num_states()));
    v(static_cast<Eigen::Index>(s)) = 1.0;
    tr.states.push_back(v);
    tr.prefix_predictions.push_back(d.is_accepting(s) ? Label::positive : Label::negative);
  };
  std::size_t s = d.start();
  push(s);
  for (char c : x) {
    s = d.next(s, static_cast<std::size_t>(c - '0'));
    push(s);
  }
  tr.prediction = tr.prefix_predictions.back();
  tr.scores = tr.prediction == Label::positive ? Eigen::Vector2d(0, 1) : Eigen::Vector2d(1, 0);
  return tr;
}

HiddenTrace scalar_trace(const std::string& x, std::vector<double> hs, std::vector<Label> labels) {
  HiddenTrace tr;
  tr.input = x;
  for (double h : hs) tr.states.push_back(StateVector::Constant(1, h));
  tr.prefix_predictions = std::move(labels);
  tr.prediction = tr.prefix_predictions.back();
  return tr;
}

}  // namespace

TEST(KMeans, SeparatedPairs) {
  Eigen::MatrixXd p(1, 4);
  p << 0.0, 0.1, 10.0, 10.1;
  const auto r = kmeans(p, 2, 1, 100, 3);
  EXPECT_EQ(r.k, 2u);
  EXPECT_EQ(r.assignment[0], r.assignment[1]);
  EXPECT_EQ(r.assignment[2], r.assignment[3]);
  EXPECT_NE(r.assignment[0], r.assignment[2]);
  EXPECT_NEAR(r.wcss, 4 * 0.05 * 0.05, 1e-12);
}

TEST(KMeans, KEqualToDistinctGivesZeroWcss) {
  Eigen::MatrixXd p(2, 6);
  p << 0, 1, 0, 1, 0, 5,  //
      0, 0, 1, 0, 0, 5;
  EXPECT_EQ(count_distinct(p), 4u);
  const auto r = kmeans(p, 4, 7, 100, 2);
  EXPECT_EQ(r.k, 4u);
  EXPECT_EQ(r.wcss, 0.0);
  const auto reduced = kmeans(p, 9, 7, 100, 2);
  EXPECT_EQ(reduced.k, 4u);
}

TEST(KMeans, Deterministic) {
  Rng rng(3);
  Eigen::MatrixXd p(3, 60);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform();
  const auto a = kmeans(p, 5, 11, 100, 3);
  const auto b = kmeans(p, 5, 11, 100, 3);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.wcss, b.wcss);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(TransitionDiagram, CountsAndVotes) {
  // h values 0 and 1 form two clusters; "1" loops on the high cluster.
  std::vector<HiddenTrace> traces = {
      scalar_trace("1", {0.0, 1.0}, {Label::negative, Label::positive}),
      scalar_trace("11", {0.0, 1.0, 1.0}, {Label::negative, Label::positive, Label::positive}),
  };
  ExtractionConfig cfg;
  cfg.k = 2;
  const auto q = quantize(traces, cfg);
  ASSERT_EQ(q.effective_k, 2u);
  const auto low = q.clusters[0][0];
  const auto high = q.clusters[0][1];
  const auto d = build_diagram(traces, q);
  EXPECT_EQ(d.initial_cluster, low);
  EXPECT_EQ(d.count(low, 1, high), 2u);
  EXPECT_EQ(d.count(high, 1, high), 1u);
  EXPECT_EQ(d.total(), 3u);
  EXPECT_EQ(d.votes[high][1], 3u);
  EXPECT_EQ(d.votes[low][0], 2u);
  const auto fin = build_diagram(traces, q, VoteMode::final_state);
  EXPECT_EQ(fin.votes[high][1], 2u);
  EXPECT_EQ(fin.votes[low][0] + fin.votes[low][1], 0u);
}

TEST(TransitionDiagram, PrefixDoublingDoublesCounts) {
  std::vector<HiddenTrace> traces = {
      scalar_trace("10", {0.0, 1.0, 0.0}, {Label::negative, Label::positive, Label::negative})};
  ExtractionConfig cfg;
  cfg.k = 2;
  const auto once = build_diagram(traces, quantize(traces, cfg));
  traces.push_back(traces.front());
  const auto twice = build_diagram(traces, quantize(traces, cfg));
  EXPECT_EQ(twice.total(), 2 * once.total());
}

TEST(TransitionDiagram, MissingPrefixPredictions) {
  auto tr = scalar_trace("1", {0.0, 1.0}, {Label::negative, Label::positive});
  tr.prefix_predictions.clear();
  const std::vector<HiddenTrace> traces = {tr};
  ExtractionConfig cfg;
  cfg.k = 2;
  const auto q = quantize(traces, cfg);
  EXPECT_THROW(build_diagram(traces, q), InputError);
  EXPECT_NO_THROW(build_diagram(traces, q, VoteMode::final_state));
}

TEST(PruneToDfa, ArgmaxSinkAndVotes) {
  TransitionDiagram d(2);
  d.add(0, 1, 1, 5);
  d.add(0, 1, 0, 1);
  d.add(1, 1, 1, 3);
  d.add(1, 0, 0, 2);
  d.add(1, 0, 1, 2);  // tie goes to cluster 0
  d.votes = {{{7, 2}}, {{1, 4}}};
  const auto dfa = prune_to_dfa(d);
  ASSERT_EQ(dfa.num_states(), 3u);
  EXPECT_EQ(dfa.next(0, 1), 1u);
  EXPECT_EQ(dfa.next(1, 0), 0u);
  EXPECT_EQ(dfa.next(0, 0), 2u);  // unobserved
  EXPECT_EQ(dfa.next(2, 0), 2u);
  EXPECT_EQ(dfa.next(2, 1), 2u);
  EXPECT_FALSE(dfa.is_accepting(0));
  EXPECT_TRUE(dfa.is_accepting(1));
  EXPECT_FALSE(dfa.is_accepting(2));
}

TEST(PruneToDfa, NoSinkWhenComplete) {
  TransitionDiagram d(1);
  d.add(0, 0, 0);
  d.add(0, 1, 0);
  d.votes = {{{0, 1}}};
  EXPECT_EQ(prune_to_dfa(d).num_states(), 1u);
}

class OracleRoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(OracleRoundTrip, RecoversTheGrammar) {
  const Dfa& g = tomita_dfa(GrammarId(GetParam()));
  std::vector<HiddenTrace> traces;
  for (const auto& x : oracle::strings_up_to(8)) traces.push_back(dfa_trace(g, x));
  ExtractionConfig cfg;
  cfg.k = g.num_states();
  cfg.kmeans_seed = 1;
  const auto ex = extract_from_traces(traces, cfg);
  const auto r = equivalent(ex.dfa, g);
  EXPECT_TRUE(r.equivalent) << "counterexample '" << r.counterexample.value_or("") << "'";
  EXPECT_EQ(ex.dfa.num_states(), g.num_states());
}

INSTANTIATE_TEST_SUITE_P(AllGrammars, OracleRoundTrip, ::testing::Range(1, 8));

TEST(Extraction, ReducedKIsRecorded) {
  const Dfa& g = tomita_dfa(GrammarId(1));
  std::vector<HiddenTrace> traces;
  for (const auto& x : oracle::strings_up_to(4)) traces.push_back(dfa_trace(g, x));
  ExtractionConfig cfg;
  cfg.k = 6;
  Provenance p;
  p.model_id = "m";
  const auto ex = extract_from_traces(traces, cfg, p);
  EXPECT_EQ(ex.provenance.k, 6u);
  EXPECT_EQ(ex.provenance.effective_k, 2u);
  EXPECT_TRUE(equivalent(ex.dfa, g).equivalent);
}

TEST(Extraction, ConfigValidation) {
  ExtractionConfig cfg;
  cfg.k = 1;
  EXPECT_THROW(validate(cfg), InputError);
  cfg.k = 3;
  cfg.restarts = 0;
  EXPECT_THROW(validate(cfg), InputError);
  EXPECT_THROW(extract_from_traces({}, ExtractionConfig{}), ExtractionError);
}

TEST(Extraction, FromTrainedModelIsDeterministic) {
  const auto model = init_model(CellKind::second_order, 4, 3);
  const auto data = split_dataset(generate_dataset(GrammarId(4), {1, 6}, 10, 1), 0.8, 1);
  ExtractionConfig cfg;
  cfg.k = 4;
  const auto a = extract_dfa(model, data, cfg);
  const auto b = extract_dfa(model, data, cfg);
  EXPECT_EQ(a.dfa, b.dfa);
  EXPECT_EQ(a.provenance, b.provenance);
  EXPECT_EQ(a.provenance.hidden_seed, 3u);
  EXPECT_EQ(a.provenance.cell, "second_order");
}

TEST(Provenance, JsonRoundTrip) {
  Provenance p{"g3-gru-s2", 3, "gru", 12, 9, 77, 1234567890123ULL, 4};
  EXPECT_EQ(provenance_from_json(provenance_to_json(p)), p);
  p.grammar.reset();
  EXPECT_EQ(provenance_from_json(provenance_to_json(p)), p);
  EXPECT_THROW(provenance_from_json("[1,2]"), IoError);
  EXPECT_THROW(provenance_from_json("{"), IoError);
}

TEST(VoteMode, Parse) {
  EXPECT_EQ(parse_vote_mode("final_state"), VoteMode::final_state);
  EXPECT_EQ(to_string(VoteMode::every_prefix), "every_prefix");
  EXPECT_THROW(parse_vote_mode("majority"), InputError);
}
