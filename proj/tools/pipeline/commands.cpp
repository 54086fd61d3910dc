#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pipeline.hpp"
#include "tomita/average_distance.hpp"
#include "tomita/checkpoint.hpp"
#include "tomita/rng.hpp"
#include "tomita/tomita.hpp"

namespace tomita::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path Layout::dataset(int g) const { return root_ / "data" / ("g" + std::to_string(g) + ".csv"); }
fs::path Layout::manifest() const { return root_ / "data" / "manifest.json"; }
fs::path Layout::checkpoint(const std::string& id) const { return root_ / "models" / (id + ".json"); }
fs::path Layout::train_record(const std::string& id) const {
  return root_ / "models" / (id + ".train.json");
}
fs::path Layout::train_log() const { return root_ / "models" / "train_log.csv"; }
fs::path Layout::dfa(const std::string& id, std::size_t k) const {
  return root_ / "dfas" / id / ("k" + std::to_string(k) + ".dfa");
}
fs::path Layout::provenance(const std::string& id, std::size_t k) const {
  return root_ / "dfas" / id / ("k" + std::to_string(k) + ".json");
}
fs::path Layout::extract_stamp(const std::string& id) const {
  return root_ / "dfas" / id / "stamp.json";
}
fs::path Layout::results(std::string_view file) const { return root_ / "results" / std::string(file); }

std::string model_id(int grammar, CellKind cell, std::size_t seed_index) {
  return "g" + std::to_string(grammar) + "-" + std::string(to_string(cell)) + "-s" +
         std::to_string(seed_index);
}

namespace {

// FNV-1a; stable across platforms, unlike std::hash.
std::string fingerprint(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json config_section(const ExperimentConfig& cfg, const char* key) {
  return json::parse(config_to_json(cfg)).at(key);
}

std::string data_fingerprint(const ExperimentConfig& cfg, int g) {
  return fingerprint({{"data", config_section(cfg, "data")},
                      {"seed", cfg.sweep.master_seed},
                      {"grammar", g}});
}

std::string train_fingerprint(const ExperimentConfig& cfg, int g, CellKind cell, std::size_t s) {
  return fingerprint({{"data", data_fingerprint(cfg, g)},
                      {"model", config_section(cfg, "model")},
                      {"train", config_section(cfg, "train")},
                      {"noise", config_section(cfg, "noise")},
                      {"cell", to_string(cell)},
                      {"seed_index", s}});
}

std::string extract_fingerprint(const ExperimentConfig& cfg, int g, CellKind cell, std::size_t s) {
  return fingerprint(
      {{"train", train_fingerprint(cfg, g, cell, s)}, {"extraction", config_section(cfg, "extraction")}});
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError("malformed " + path.string() + ": " + e.what());
  }
}

bool stamp_matches(const fs::path& path, const std::string& fp) {
  if (!fs::exists(path)) return false;
  return read_json(path).value("fingerprint", "") == fp;
}

LabeledDataset load_dataset(const ExperimentConfig& cfg, const Layout& layout, int g) {
  const auto fp = data_fingerprint(cfg, g);
  if (!fs::exists(layout.manifest()) || !fs::exists(layout.dataset(g))) {
    throw StageError("missing dataset for grammar " + std::to_string(g) + " (" +
                     layout.dataset(g).string() + "); run `tomita gen` first");
  }
  const auto manifest = read_json(layout.manifest());
  bool fresh = false;
  for (const auto& entry : manifest.at("grammars")) {
    if (entry.at("grammar").get<int>() == g) fresh = entry.at("fingerprint").get<std::string>() == fp;
  }
  if (!fresh) {
    throw StageError("dataset for grammar " + std::to_string(g) +
                     " was generated with a different configuration; rerun `tomita gen`");
  }
  return dataset_from_csv(read_file(layout.dataset(g)), GrammarId(g));
}

RnnModel load_trained(const ExperimentConfig& cfg, const Layout& layout, int g, CellKind cell,
                      std::size_t s) {
  const auto id = model_id(g, cell, s);
  if (!fs::exists(layout.checkpoint(id)) ||
      !stamp_matches(layout.train_record(id), train_fingerprint(cfg, g, cell, s))) {
    throw StageError("missing or stale checkpoint " + layout.checkpoint(id).string() +
                     "; run `tomita train` first");
  }
  return load_checkpoint(layout.checkpoint(id));
}

struct ModelKey {
  int grammar;
  CellKind cell;
  std::size_t seed_index;
};

std::vector<ModelKey> model_keys(const ExperimentConfig& cfg) {
  std::vector<ModelKey> out;
  for (int g : cfg.grammars) {
    for (auto c : cfg.cells) {
      for (std::size_t s = 0; s < cfg.sweep.hidden_seeds; ++s) out.push_back({g, c, s});
    }
  }
  return out;
}

LabeledDataset noisy_training_data(const ExperimentConfig& cfg, const LabeledDataset& clean,
                                   const ModelKey& key) {
  const auto seeds = trial_seeds(cfg.sweep.master_seed, GrammarId(key.grammar), key.cell, key.seed_index);
  return training_data(clean, cfg.sweep, seeds.noise);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path) {
  std::stringstream in(read_file(path));
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(split_csv_line(line));
  }
  return rows;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

CommandResult cmd_gen(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  const Layout layout(cfg.output_dir);
  CommandResult result;
  json entries = json::array();
  for (int g : cfg.grammars) {
    ++result.requested;
    const auto data = make_dataset(GrammarId(g), cfg.sweep.data);
    write_file_atomic(layout.dataset(g), to_csv(data));
    json lengths = json::array();
    json empty = json::array();
    for (const auto& lc : length_counts(data)) {
      lengths.push_back({{"length", lc.length}, {"positives", lc.positives}, {"negatives", lc.negatives}});
    }
    for (std::size_t n = cfg.sweep.data.lengths.min; n <= cfg.sweep.data.lengths.max; ++n) {
      std::size_t pos = 0;
      std::size_t neg = 0;
      for (const auto& lc : length_counts(data)) {
        if (lc.length == n) {
          pos = lc.positives;
          neg = lc.negatives;
        }
      }
      if (pos == 0) empty.push_back({{"length", n}, {"label", "positive"}});
      if (neg == 0) empty.push_back({{"length", n}, {"label", "negative"}});
    }
    entries.push_back({{"grammar", g},
                       {"fingerprint", data_fingerprint(cfg, g)},
                       {"seed", cfg.sweep.data.seed},
                       {"file", layout.dataset(g).filename().string()},
                       {"train", {{"positive", data.count(Split::train, Label::positive)},
                                  {"negative", data.count(Split::train, Label::negative)}}},
                       {"test", {{"positive", data.count(Split::test, Label::positive)},
                                 {"negative", data.count(Split::test, Label::negative)}}},
                       {"lengths", lengths},
                       {"empty_classes", empty}});
    log << "gen: grammar " << g << ": " << data.count(Split::train) << " train, "
        << data.count(Split::test) << " test";
    if (!empty.empty()) log << ", " << empty.size() << " empty (length, class) pairs";
    log << "\n";
    ++result.succeeded;
  }
  write_file_atomic(layout.manifest(), json{{"grammars", entries}}.dump(1) + "\n");
  return result;
}

CommandResult cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  const Layout layout(cfg.output_dir);
  CommandResult result;
  std::map<int, LabeledDataset> datasets;
  for (int g : cfg.grammars) datasets.emplace(g, load_dataset(cfg, layout, g));

  std::string csv =
      "grammar,cell,seed_index,hidden_seed,hidden_size,parameter_count,epochs,train_accuracy,"
      "test_accuracy,reached_target\n";
  for (const auto& key : model_keys(cfg)) {
    ++result.requested;
    const auto id = model_id(key.grammar, key.cell, key.seed_index);
    const auto fp = train_fingerprint(cfg, key.grammar, key.cell, key.seed_index);
    if (!fs::exists(layout.checkpoint(id)) || !stamp_matches(layout.train_record(id), fp)) {
      const auto train_data = noisy_training_data(cfg, datasets.at(key.grammar), key);
      const auto trained =
          train_trial_model(GrammarId(key.grammar), key.cell, key.seed_index, train_data, cfg.sweep);
      save_checkpoint(trained.model, layout.checkpoint(id));
      const auto& tl = trained.log;
      const json record = {{"id", id},
                           {"fingerprint", fp},
                           {"grammar", key.grammar},
                           {"cell", to_string(key.cell)},
                           {"seed_index", key.seed_index},
                           {"hidden_seed", trained.model.seed()},
                           {"hidden_size", trained.model.hidden_size()},
                           {"parameter_count", tl.parameter_count},
                           {"epochs", tl.epochs.size()},
                           {"train_accuracy", tl.final_train_accuracy},
                           {"test_accuracy", tl.final_test_accuracy},
                           {"reached_target", tl.final_test_accuracy >= 1.0}};
      write_file_atomic(layout.train_record(id), record.dump(1) + "\n");
      log << "train: " << id << " epochs " << tl.epochs.size() << " test accuracy "
          << fixed(tl.final_test_accuracy, 4) << "\n";
    } else {
      log << "train: " << id << " up to date\n";
    }
    const auto r = read_json(layout.train_record(id));
    const bool ok = r.at("reached_target").get<bool>();
    if (ok) {
      ++result.succeeded;
    } else {
      log << "train: " << id << " is below the accuracy target (flagged)\n";
    }
    csv += std::to_string(key.grammar) + ',' + std::string(to_string(key.cell)) + ',' +
           std::to_string(key.seed_index) + ',' +
           std::to_string(r.at("hidden_seed").get<std::uint64_t>()) + ',' +
           std::to_string(r.at("hidden_size").get<std::size_t>()) + ',' +
           std::to_string(r.at("parameter_count").get<std::size_t>()) + ',' +
           std::to_string(r.at("epochs").get<std::size_t>()) + ',' +
           format_double(r.at("train_accuracy").get<double>()) + ',' +
           format_double(r.at("test_accuracy").get<double>()) + ',' + (ok ? "1" : "0") + '\n';
  }
  write_file_atomic(layout.train_log(), csv);
  return result;
}

CommandResult cmd_extract(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  const Layout layout(cfg.output_dir);
  CommandResult result;
  std::map<int, LabeledDataset> datasets;
  for (int g : cfg.grammars) datasets.emplace(g, load_dataset(cfg, layout, g));

  for (const auto& key : model_keys(cfg)) {
    const auto id = model_id(key.grammar, key.cell, key.seed_index);
    const auto fp = extract_fingerprint(cfg, key.grammar, key.cell, key.seed_index);
    const auto model = load_trained(cfg, layout, key.grammar, key.cell, key.seed_index);
    result.requested += cfg.sweep.k_values.size();
    if (stamp_matches(layout.extract_stamp(id), fp)) {
      const auto stamp = read_json(layout.extract_stamp(id));
      result.succeeded += stamp.at("succeeded").get<std::size_t>();
      log << "extract: " << id << " up to date\n";
      continue;
    }
    const auto train_data = noisy_training_data(cfg, datasets.at(key.grammar), key);
    json errors = json::object();
    std::size_t ok = 0;
    for (const auto k : cfg.sweep.k_values) {
      const auto ks = kmeans_seed_for(cfg.sweep.master_seed, GrammarId(key.grammar), key.cell,
                                      key.seed_index, k);
      Provenance prov;
      prov.model_id = id;
      prov.trial = key.seed_index;
      try {
        const auto ex = extract_dfa(model, train_data, extraction_config_for(k, ks, cfg.sweep), prov);
        write_file_atomic(layout.dfa(id, k), to_text(ex.dfa));
        write_file_atomic(layout.provenance(id, k), provenance_to_json(ex.provenance));
        ++ok;
      } catch (const std::exception& e) {
        errors[std::to_string(k)] = e.what();
        log << "extract: " << id << " K=" << k << " failed: " << e.what() << "\n";
      }
    }
    write_file_atomic(layout.extract_stamp(id),
                      json{{"fingerprint", fp}, {"succeeded", ok}, {"errors", errors}}.dump(1) + "\n");
    result.succeeded += ok;
    log << "extract: " << id << " " << ok << "/" << cfg.sweep.k_values.size() << " DFAs\n";
  }
  return result;
}

CommandResult cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  const Layout layout(cfg.output_dir);
  CommandResult result;
  std::map<int, LabeledDataset> datasets;
  for (int g : cfg.grammars) datasets.emplace(g, load_dataset(cfg, layout, g));

  std::vector<TrialResult> trials;
  for (const auto& key : model_keys(cfg)) {
    const auto id = model_id(key.grammar, key.cell, key.seed_index);
    const auto model = load_trained(cfg, layout, key.grammar, key.cell, key.seed_index);
    if (!stamp_matches(layout.extract_stamp(id),
                       extract_fingerprint(cfg, key.grammar, key.cell, key.seed_index))) {
      throw StageError("missing or stale DFAs for " + id + "; run `tomita extract` first");
    }
    const auto stamp = read_json(layout.extract_stamp(id));
    const auto& clean = datasets.at(key.grammar);
    const auto train_data = noisy_training_data(cfg, clean, key);
    for (const auto k : cfg.sweep.k_values) {
      ++result.requested;
      const auto ks = kmeans_seed_for(cfg.sweep.master_seed, GrammarId(key.grammar), key.cell,
                                      key.seed_index, k);
      const auto err = stamp.at("errors").find(std::to_string(k));
      if (err != stamp.at("errors").end()) {
        TrialResult r;
        r.grammar = key.grammar;
        r.cell = key.cell;
        r.hidden_seed = model.seed();
        r.k = k;
        r.kmeans_seed = ks;
        r.error = err->get<std::string>();
        trials.push_back(std::move(r));
        continue;
      }
      ExtractedDfa ex{dfa_from_text(read_file(layout.dfa(id, k))),
                      provenance_from_json(read_file(layout.provenance(id, k)))};
      trials.push_back(score_extraction(model, ex, GrammarId(key.grammar), clean, train_data, cfg.sweep));
      ++result.succeeded;
    }
  }
  const auto summary = summarize(trials);
  write_file_atomic(layout.results("trials.csv"), trials_to_csv(trials));
  write_file_atomic(layout.results("summary.csv"), summary_to_csv(summary));
  for (const auto& row : summary) {
    log << "evaluate: grammar " << row.grammar << " " << to_string(row.cell) << ": success rate "
        << fixed(row.success_rate, 3) << ", mean accuracy " << fixed(row.mean_dfa_accuracy, 4)
        << " over " << row.trials << " trials\n";
  }
  return result;
}

CommandResult cmd_verify(const ExperimentConfig& cfg, bool oracle_as_model, std::ostream& log) {
  validate(cfg);
  const Layout layout(cfg.output_dir);
  const auto& vc = cfg.verification;
  CommandResult result;
  std::string rows = verification_header();
  std::string witnesses = witnesses_header();
  std::string summary = "grammar,cell,N,gamma_pos,gamma_neg,witnesses,error\n";
  std::string sweep = "grammar,cell,label,length,gamma,error\n";

  auto run = [&](const auto& model, const std::string& name, int g, std::uint64_t seed) {
    ++result.requested;
    const Dfa& oracle = tomita_dfa(GrammarId(g));
    const auto rep = verify_model(model, name, g, oracle, vc.params, seed);
    rows += verification_rows(rep);
    witnesses += witness_rows(rep);
    const auto opt = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
    std::size_t nw = (rep.positive ? rep.positive->witnesses.size() : 0) +
                     (rep.negative ? rep.negative->witnesses.size() : 0);
    std::string err = rep.error;
    for (auto& c : err) {
      if (c == ',') c = ';';
    }
    summary += std::to_string(g) + ',' + name + ',' + std::to_string(vc.params.length) + ',' +
               opt(rep.gamma_pos()) + ',' + opt(rep.gamma_neg()) + ',' + std::to_string(nw) + ',' +
               err + '\n';
    log << "verify: grammar " << g << " " << name << ": gamma+ "
        << (rep.gamma_pos() ? fixed(*rep.gamma_pos(), 4) : "n/a") << " gamma- "
        << (rep.gamma_neg() ? fixed(*rep.gamma_neg(), 4) : "n/a") << "\n";
    if (rep.error.empty()) {
      ++result.succeeded;
    } else {
      log << "verify: " << rep.error << "\n";
    }
    for (auto label : {Label::positive, Label::negative}) {
      if (vc.sweep_lengths.empty()) break;
      const auto ls = length_sweep(model, oracle, vc.sweep_lengths, vc.params, label,
                                   derive_seed(seed, {index_of(label), 99}));
      for (const auto& r : ls) {
        std::string e = r.error;
        for (auto& c : e) {
          if (c == ',') c = ';';
        }
        sweep += std::to_string(g) + ',' + name + ',' + (label == Label::positive ? "1" : "0") +
                 ',' + std::to_string(r.length) + ',' + (r.gamma ? format_double(*r.gamma) : "") +
                 ',' + e + '\n';
      }
    }
  };

  for (int g : vc.grammars) {
    const std::uint64_t base = derive_seed(cfg.sweep.master_seed, {static_cast<std::uint64_t>(g), 5});
    if (oracle_as_model) {
      run(tomita_dfa(GrammarId(g)), "oracle", g, base);
      continue;
    }
    for (auto cell : cfg.cells) {
      const auto model = load_trained(cfg, layout, g, cell, vc.seed_index);
      run(model, std::string(to_string(cell)), g, derive_seed(base, {static_cast<std::uint64_t>(cell)}));
    }
  }
  write_file_atomic(layout.results("verification.csv"), rows);
  write_file_atomic(layout.results("witnesses.csv"), witnesses);
  write_file_atomic(layout.results("verification_summary.csv"), summary);
  if (!vc.sweep_lengths.empty()) write_file_atomic(layout.results("length_sweep.csv"), sweep);
  return result;
}

CommandResult cmd_distance(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  const Layout layout(cfg.output_dir);
  CommandResult result;
  std::string csv = "grammar,N,d_pos,d_neg,d_avg\n";
  for (int g : cfg.distance.grammars) {
    for (auto n : cfg.distance.lengths) {
      ++result.requested;
      const auto rep = average_edit_distance_at_n(GrammarId(g), n, cfg.distance.metric);
      csv += std::to_string(g) + ',' + std::to_string(n) + ',';
      if (rep) {
        csv += format_double(rep->d_pos) + ',' + format_double(rep->d_neg) + ',' +
               format_double(rep->d_avg) + '\n';
      } else {
        csv += ",,\n";
        log << "distance: grammar " << g << " has an empty class at N=" << n << "\n";
      }
      ++result.succeeded;
    }
  }
  write_file_atomic(layout.results("distance.csv"), csv);
  log << "distance: wrote " << layout.results("distance.csv").string() << "\n";
  return result;
}

CommandResult cmd_report(const ExperimentConfig& cfg, std::ostream& log) {
  const Layout layout(cfg.output_dir);
  std::string md = "# Experiment report\n";
  bool any = false;

  if (fs::exists(layout.results("distance.csv"))) {
    any = true;
    std::map<std::size_t, std::map<int, std::string>> grid;
    std::vector<int> grammars;
    for (const auto& row : read_csv_rows(layout.results("distance.csv"))) {
      const int g = std::stoi(row.at(0));
      if (std::find(grammars.begin(), grammars.end(), g) == grammars.end()) grammars.push_back(g);
      grid[std::stoul(row.at(1))][g] = row.at(4).empty() ? "-" : fixed(std::stod(row.at(4)), 2);
    }
    md += "\n## Average distance between classes\n\n| N |";
    for (int g : grammars) md += " G" + std::to_string(g) + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < grammars.size(); ++i) md += "---|";
    md += "\n";
    for (const auto& [n, cells] : grid) {
      md += "| " + std::to_string(n) + " |";
      for (int g : grammars) md += " " + (cells.count(g) ? cells.at(g) : std::string("-")) + " |";
      md += "\n";
    }
  }

  if (fs::exists(layout.results("trials.csv"))) {
    any = true;
    const auto trials = trials_from_csv(read_file(layout.results("trials.csv")));
    const auto summary = summarize(trials);
    md += "\n## Extraction\n\n| grammar | cell | trials | success rate | mean accuracy | variance |\n"
          "|---|---|---|---|---|---|\n";
    for (const auto& r : summary) {
      md += "| " + std::to_string(r.grammar) + " | " + std::string(to_string(r.cell)) + " | " +
            std::to_string(r.trials) + " | " + fixed(r.success_rate, 3) + " | " +
            fixed(r.mean_dfa_accuracy, 4) + " | " + fixed(r.var_dfa_accuracy, 5) + " |\n";
    }
    const bool noisy = std::any_of(trials.begin(), trials.end(),
                                   [](const TrialResult& t) { return t.rnn_accuracy_noisy.has_value(); });
    if (noisy) {
      md += "\n## Fidelity under label noise\n\n| grammar | cell | K | clean | noisy | fidelity |\n"
            "|---|---|---|---|---|---|\n";
      for (const auto& t : trials) {
        if (!t.error.empty()) continue;
        md += "| " + std::to_string(t.grammar) + " | " + std::string(to_string(t.cell)) + " | " +
              std::to_string(t.k) + " | " + fixed(t.rnn_accuracy_clean, 4) + " | " +
              fixed(t.rnn_accuracy_noisy.value_or(0.0), 4) + " | " + fixed(t.fidelity, 4) + " |\n";
      }
    }
  }

  if (fs::exists(layout.results("verification_summary.csv"))) {
    any = true;
    md += "\n## Adversarial accuracy\n\n| grammar | model | N | gamma+ | gamma- | witnesses |\n"
          "|---|---|---|---|---|---|\n";
    for (const auto& row : read_csv_rows(layout.results("verification_summary.csv"))) {
      auto g = [&](std::size_t i) {
        return row.size() > i && !row[i].empty() ? fixed(std::stod(row[i]), 4) : std::string("n/a");
      };
      md += "| " + row.at(0) + " | " + row.at(1) + " | " + row.at(2) + " | " + g(3) + " | " + g(4) +
            " | " + row.at(5) + " |\n";
    }
  }

  if (fs::exists(layout.results("length_sweep.csv"))) {
    any = true;
    md += "\n## Adversarial accuracy by length\n\n| grammar | model | label | N | gamma |\n"
          "|---|---|---|---|---|\n";
    for (const auto& row : read_csv_rows(layout.results("length_sweep.csv"))) {
      md += "| " + row.at(0) + " | " + row.at(1) + " | " + (row.at(2) == "1" ? "+" : "-") + " | " +
            row.at(3) + " | " + (row.at(4).empty() ? "n/a" : fixed(std::stod(row.at(4)), 4)) + " |\n";
    }
  }

  if (!any) {
    throw StageError("no results under " + layout.results("").string() +
                     "; run `tomita distance`, `tomita evaluate` or `tomita verify` first");
  }
  write_file_atomic(layout.results("report.md"), md);
  log << "report: wrote " << layout.results("report.md").string() << "\n";
  return {1, 1};
}

}  // namespace tomita::pipeline
