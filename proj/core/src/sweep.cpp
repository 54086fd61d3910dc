#include "tomita/sweep.hpp"

#include "tomita/rng.hpp"

namespace tomita {

LabeledDataset make_dataset(GrammarId grammar, const DataConfig& cfg) {
  const auto g = static_cast<std::uint64_t>(grammar.value());
  auto data = generate_dataset(grammar, cfg.lengths, cfg.max_per_class,
                               derive_seed(cfg.seed, {g, 1}));
  return split_dataset(data, cfg.train_fraction, derive_seed(cfg.seed, {g, 2}));
}

std::size_t hidden_size_for(CellKind kind, const ModelConfig& cfg) {
  if (cfg.parameter_budget) return hidden_size_for_budget(kind, *cfg.parameter_budget);
  return cfg.hidden_size;
}

TrialSeeds trial_seeds(std::uint64_t master, GrammarId grammar, CellKind cell,
                       std::size_t seed_index) {
  const auto g = static_cast<std::uint64_t>(grammar.value());
  const auto c = static_cast<std::uint64_t>(cell);
  return {derive_seed(master, {g, c, seed_index, 1}), derive_seed(master, {g, c, seed_index, 2}),
          derive_seed(master, {g, c, seed_index, 3})};
}

std::uint64_t kmeans_seed_for(std::uint64_t master, GrammarId grammar, CellKind cell,
                              std::size_t seed_index, std::size_t k) {
  return derive_seed(master, {static_cast<std::uint64_t>(grammar.value()),
                              static_cast<std::uint64_t>(cell), seed_index, 4, k});
}

TrainConfig train_config_for(CellKind kind, const SweepConfig& cfg, std::uint64_t shuffle_seed) {
  TrainConfig tc = default_train_config(kind);
  tc.max_epochs = cfg.max_epochs;
  tc.target_loss = cfg.target_loss;
  if (cfg.learning_rate) tc.learning_rate = *cfg.learning_rate;
  tc.seed = shuffle_seed;
  return tc;
}

LabeledDataset training_data(const LabeledDataset& clean, const SweepConfig& cfg,
                             std::uint64_t noise_seed) {
  if (cfg.noise_pos == 0 && cfg.noise_neg == 0) return clean;
  return inject_label_noise(clean, cfg.noise_pos, cfg.noise_neg, noise_seed);
}

TrainResult train_trial_model(GrammarId grammar, CellKind cell, std::size_t seed_index,
                              const LabeledDataset& train_data, const SweepConfig& cfg) {
  const auto seeds = trial_seeds(cfg.master_seed, grammar, cell, seed_index);
  const std::size_t hidden = hidden_size_for(cell, cfg.model);
  RnnModel model = cfg.model.weight_range
                       ? init_model(cell, hidden, seeds.init, *cfg.model.weight_range)
                       : init_model(cell, hidden, seeds.init);
  return train(std::move(model), train_data, train_config_for(cell, cfg, seeds.shuffle));
}

ExtractionConfig extraction_config_for(std::size_t k, std::uint64_t kmeans_seed,
                                       const SweepConfig& cfg) {
  return {k, kmeans_seed, cfg.kmeans_max_iters, cfg.kmeans_restarts, cfg.votes};
}

TrialResult score_extraction(const RnnModel& model, const ExtractedDfa& extracted,
                             GrammarId grammar, const LabeledDataset& clean,
                             const LabeledDataset& train_data, const SweepConfig& cfg) {
  TrialResult r;
  r.grammar = grammar.value();
  r.cell = model.kind();
  r.hidden_seed = model.seed();
  r.k = extracted.provenance.k;
  r.effective_k = extracted.provenance.effective_k;
  r.kmeans_seed = extracted.provenance.kmeans_seed;
  r.extracted_states = extracted.dfa.num_states();
  r.dfa_accuracy = accuracy(extracted.dfa, clean, Split::test);
  r.rnn_accuracy_clean = accuracy(model, clean, Split::test);
  if (cfg.noise_pos + cfg.noise_neg > 0) {
    r.rnn_accuracy_noisy = accuracy(model, train_data, Split::train);
  }
  const auto test_strings = clean.strings(Split::test);
  r.fidelity = fidelity(model, extracted.dfa, test_strings);
  r.success = r.dfa_accuracy == 1.0;
  return r;
}

TrialResult run_trial(const RnnModel& model, GrammarId grammar, const LabeledDataset& clean,
                      const LabeledDataset& train_data, std::size_t k, std::uint64_t kmeans_seed,
                      const SweepConfig& cfg) {
  try {
    const auto extracted =
        extract_dfa(model, train_data, extraction_config_for(k, kmeans_seed, cfg));
    return score_extraction(model, extracted, grammar, clean, train_data, cfg);
  } catch (const std::exception& e) {
    TrialResult failed;
    failed.grammar = grammar.value();
    failed.cell = model.kind();
    failed.hidden_seed = model.seed();
    failed.k = k;
    failed.kmeans_seed = kmeans_seed;
    failed.error = e.what();
    return failed;
  }
}

SweepResult run_sweep(std::span<const GrammarId> grammars, std::span<const CellKind> cells,
                      const SweepConfig& cfg, const SweepObserver& observer) {
  if (cfg.k_values.empty()) throw InputError("sweep needs at least one K");
  if (cfg.hidden_seeds == 0) throw InputError("sweep needs at least one hidden seed");
  SweepResult out;
  for (const auto g : grammars) {
    const auto clean = make_dataset(g, cfg.data);
    for (const auto cell : cells) {
      for (std::size_t s = 0; s < cfg.hidden_seeds; ++s) {
        const auto seeds = trial_seeds(cfg.master_seed, g, cell, s);
        std::optional<RnnModel> model;
        std::optional<LabeledDataset> train_data;
        std::string failure;
        try {
          train_data = training_data(clean, cfg, seeds.noise);
          model = train_trial_model(g, cell, s, *train_data, cfg).model;
        } catch (const std::exception& e) {
          failure = std::string("train: ") + e.what();
        }
        for (const auto k : cfg.k_values) {
          const auto ks = kmeans_seed_for(cfg.master_seed, g, cell, s, k);
          TrialResult r;
          if (model) {
            r = run_trial(*model, g, clean, *train_data, k, ks, cfg);
          } else {
            r.grammar = g.value();
            r.cell = cell;
            r.hidden_seed = seeds.init;
            r.k = k;
            r.kmeans_seed = ks;
            r.error = failure;
          }
          if (observer) observer(r);
          out.trials.push_back(std::move(r));
        }
      }
    }
  }
  out.summary = summarize(out.trials);
  return out;
}

}  // namespace tomita
