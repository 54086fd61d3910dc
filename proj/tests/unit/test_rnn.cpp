#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "tomita/checkpoint.hpp"
#include "tomita/model.hpp"
#include "tomita/sweep.hpp"
#include "tomita/train.hpp"

using namespace tomita;

namespace {

double loss_of(const RnnModel& m, const std::string& x, Label y) {
  auto g = m.zero_gradients();
  return m.accumulate_gradient(x, y, g);
}

class GradientCheck : public ::testing::TestWithParam<CellKind> {};

}  // namespace

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const CellKind kind = GetParam();
  const RnnModel base = init_model(kind, 4, 17, 1.0);
  for (const std::string x : {"101", "011"}) {
    for (Label y : {Label::positive, Label::negative}) {
      auto grads = base.zero_gradients();
      base.accumulate_gradient(x, y, grads);
      const double h = 1e-5;
      for (std::size_t t = 0; t < base.parameters().size(); ++t) {
        for (std::size_t k = 0; k < base.parameters()[t].values.size(); ++k) {
          RnnModel plus = base;
          RnnModel minus = base;
          plus.mutable_parameters()[t].values[k] += h;
          minus.mutable_parameters()[t].values[k] -= h;
          const double numeric = (loss_of(plus, x, y) - loss_of(minus, x, y)) / (2 * h);
          const double analytic = grads[t][k];
          const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-3});
          ASSERT_LE(std::abs(numeric - analytic) / scale, 1e-4)
              << to_string(kind) << " " << base.parameters()[t].name << "[" << k << "] on " << x;
        }
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllCells, GradientCheck, ::testing::ValuesIn(kAllCells),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(RnnModel, ScoresAreNormalized) {
  for (CellKind kind : kAllCells) {
    const auto m = init_model(kind, 6, 3);
    for (const std::string x : {"", "0", "110100111"}) {
      const auto tr = m.forward(x);
      EXPECT_NEAR(tr.scores.sum(), 1.0, 1e-12);
      EXPECT_GE(tr.scores.minCoeff(), 0.0);
      EXPECT_EQ(tr.states.size(), x.size() + 1);
      EXPECT_EQ(tr.prefix_predictions.size(), x.size() + 1);
      EXPECT_EQ(tr.prediction, m.classify(x));
      EXPECT_EQ(tr.prefix_predictions.back(), tr.prediction);
    }
  }
}

TEST(RnnModel, RecordTracesPreservesOrder) {
  const auto m = init_model(CellKind::gru, 5, 1);
  const std::vector<std::string> xs = {"1", "0110", ""};
  const auto traces = record_traces(m, xs);
  ASSERT_EQ(traces.size(), 3u);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(traces[i].input, xs[i]);
    EXPECT_EQ(traces[i].states.size(), xs[i].size() + 1);
    EXPECT_EQ(traces[i].states, m.forward(xs[i]).states);
  }
}

TEST(RnnModel, LayoutAndBudget) {
  EXPECT_EQ(parameter_count(CellKind::elman, 4), 4u * 2 + 16 + 4 + 8 + 2);
  EXPECT_EQ(parameter_count(CellKind::second_order, 4), 32u + 4 + 8 + 2);
  EXPECT_EQ(parameter_count(CellKind::gru, 4), 3 * (8u + 16 + 4) + 10);
  EXPECT_EQ(parameter_count(CellKind::lstm, 4), 4 * (8u + 16 + 4) + 10);
  const std::size_t budget = parameter_count(CellKind::second_order, 8);
  for (CellKind kind : kAllCells) {
    const auto h = hidden_size_for_budget(kind, budget);
    const auto c = static_cast<double>(parameter_count(kind, h));
    EXPECT_LT(std::abs(c - static_cast<double>(budget)) / static_cast<double>(budget), 0.35)
        << to_string(kind);
  }
  EXPECT_THROW(init_model(CellKind::elman, 0, 1), InputError);
  EXPECT_THROW(init_model(CellKind::elman, kMaxHidden + 1, 1), InputError);
}

TEST(RnnModel, InitIsDeterministic) {
  EXPECT_EQ(init_model(CellKind::lstm, 5, 9), init_model(CellKind::lstm, 5, 9));
  EXPECT_NE(init_model(CellKind::lstm, 5, 9), init_model(CellKind::lstm, 5, 10));
  const auto m = init_model(CellKind::second_order, 3, 1);
  EXPECT_EQ(m.initial_state().c.size(), 0);
  EXPECT_NO_THROW(m.classify(""));
}

TEST(Checkpoint, RoundTripIsBitExact) {
  for (CellKind kind : kAllCells) {
    const auto m = init_model(kind, 7, 123);
    const auto back = checkpoint_from_json(checkpoint_to_json(m));
    EXPECT_EQ(back, m) << to_string(kind);
  }
  const auto path = std::filesystem::temp_directory_path() / "tomita_ckpt_test.json";
  const auto m = init_model(CellKind::mi_rnn, 3, 4);
  save_checkpoint(m, path);
  EXPECT_EQ(load_checkpoint(path), m);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsMalformed) {
  EXPECT_THROW(checkpoint_from_json("{}"), IoError);
  EXPECT_THROW(checkpoint_from_json("not json"), IoError);
  auto text = checkpoint_to_json(init_model(CellKind::elman, 2, 1));
  text.replace(text.find("\"elman\""), 7, "\"lstm\"");
  EXPECT_THROW(checkpoint_from_json(text), IoError);
  EXPECT_THROW(load_checkpoint("/nonexistent/model.json"), IoError);
}

TEST(Train, ZeroEpochsLeavesModelUnchanged) {
  const auto data = make_dataset(GrammarId(1), DataConfig{{1, 6}, 10, 0.8, 0});
  const auto m = init_model(CellKind::elman, 4, 2);
  TrainConfig cfg;
  cfg.max_epochs = 0;
  const auto r = train(m, data, cfg);
  EXPECT_EQ(r.model, m);
  EXPECT_TRUE(r.log.epochs.empty());
  EXPECT_GT(r.log.final_train_accuracy, 0.0);
}

TEST(Train, DeterministicGivenSeeds) {
  const auto data = make_dataset(GrammarId(4), DataConfig{{1, 8}, 10, 0.8, 3});
  TrainConfig cfg = default_train_config(CellKind::gru);
  cfg.max_epochs = 5;
  cfg.seed = 8;
  const auto a = train(init_model(CellKind::gru, 4, 1), data, cfg);
  const auto b = train(init_model(CellKind::gru, 4, 1), data, cfg);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.log.epochs.size(), b.log.epochs.size());
}

TEST(Train, SingleSampleLossGoesToZero) {
  LabeledDataset data;
  data.samples.push_back({"0110", Label::positive, Split::train, false});
  TrainConfig cfg;
  cfg.max_epochs = 200;
  cfg.batch_size = 1;
  cfg.target_loss = 1e-3;
  const auto r = train(init_model(CellKind::elman, 4, 5), data, cfg);
  EXPECT_LE(r.log.epochs.back().train_loss, 1e-3);
}

TEST(Train, EveryCellLearnsShortGrammar1) {
  const auto data = make_dataset(GrammarId(1), DataConfig{{1, 6}, 20, 0.8, 1});
  for (CellKind kind : kAllCells) {
    TrainConfig cfg = default_train_config(kind);
    cfg.seed = 3;
    cfg.max_epochs = 1000;
    cfg.target_loss = 1e-3;
    const auto r = train(init_model(kind, 8, 11), data, cfg);
    EXPECT_EQ(r.log.final_train_accuracy, 1.0) << to_string(kind);
  }
}

TEST(Train, SecondOrderLearnsGrammar1) {
  const auto data = make_dataset(GrammarId(1), DataConfig{});
  TrainConfig cfg = default_train_config(CellKind::second_order);
  cfg.seed = 1;
  const auto r = train(init_model(CellKind::second_order, 8, 2), data, cfg);
  EXPECT_EQ(r.log.final_test_accuracy, 1.0);
  EXPECT_TRUE(r.log.reached_target);
  EXPECT_EQ(r.model.classify("1111"), Label::positive);
  EXPECT_EQ(r.log.parameter_count, r.model.parameter_count());
}

TEST(Train, ValidatesConfig) {
  TrainConfig cfg;
  cfg.learning_rate = 0;
  EXPECT_THROW(validate(cfg), InputError);
  cfg = TrainConfig{};
  cfg.target_accuracy = 1.5;
  EXPECT_THROW(validate(cfg), InputError);
  LabeledDataset empty;
  EXPECT_THROW(train(init_model(CellKind::elman, 2, 1), empty, TrainConfig{}), InputError);
}
