#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "pipeline.hpp"
#include "tomita/checkpoint.hpp"

namespace {

using namespace tomita;
using namespace tomita::pipeline;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "8,10,12" or "100:200:20" (inclusive, with step).
std::vector<std::size_t> parse_lengths(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::size_t> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(std::stoul(p));
    if (parts.size() < 2 || parts.size() > 3) throw InputError("length range must be lo:hi[:step]");
    const std::size_t step = parts.size() == 3 ? parts[2] : 1;
    if (step == 0) throw InputError("length step must be positive");
    for (std::size_t n = parts[0]; n <= parts[1]; n += step) out.push_back(n);
    return out;
  }
  for (const auto& s : split_list(text)) out.push_back(std::stoul(s));
  return out;
}

struct Options {
  std::string config_path;
  std::string preset_name;
  std::string out;
  std::string grammars;
  std::string cells;
  std::optional<std::uint64_t> seed;
  std::string metric;
  std::string lengths;
  std::string votes;
  bool oracle_model = false;
};

ExperimentConfig resolve(const Options& o, const std::string& command) {
  ExperimentConfig cfg = o.preset_name.empty() ? ExperimentConfig{} : preset(o.preset_name);
  if (!o.config_path.empty()) cfg = config_from_json(read_file(o.config_path), cfg);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.grammars.empty()) {
    cfg.grammars.clear();
    for (const auto& g : split_list(o.grammars)) cfg.grammars.push_back(std::stoi(g));
    cfg.verification.grammars = cfg.grammars;
    cfg.distance.grammars = cfg.grammars;
  }
  if (!o.cells.empty()) {
    cfg.cells.clear();
    for (const auto& c : split_list(o.cells)) cfg.cells.push_back(parse_cell_kind(c));
  }
  if (o.seed) {
    cfg.sweep.master_seed = *o.seed;
    cfg.sweep.data.seed = *o.seed;
  }
  if (!o.metric.empty()) cfg.distance.metric = parse_string_metric(o.metric);
  if (!o.votes.empty()) cfg.sweep.votes = parse_vote_mode(o.votes);
  if (!o.lengths.empty()) {
    const auto lengths = parse_lengths(o.lengths);
    if (command == "verify") {
      if (lengths.size() == 1) {
        cfg.verification.params.length = lengths.front();
      } else {
        cfg.verification.sweep_lengths = lengths;
      }
    } else {
      cfg.distance.lengths = lengths;
    }
  }
  validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train recurrent networks on the Tomita grammars, extract DFAs and verify them"};
  app.require_subcommand(1);
  Options opts;
  std::string preset_help = "Named configuration preset (";
  for (const auto& p : preset_names()) preset_help += p + (p == preset_names().back() ? ")" : ", ");

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"gen", "Generate train/test datasets for each grammar"},
      {"train", "Train one network per (grammar, cell, hidden seed)"},
      {"extract", "Extract a DFA from every trained network at every K"},
      {"evaluate", "Score extracted DFAs and write trial and summary CSVs"},
      {"verify", "Adversarial accuracy of trained networks against the grammar DFAs"},
      {"distance", "Average distance between accepted and rejected strings"},
      {"report", "Render a markdown report from existing result CSVs"},
      {"config", "Print the resolved configuration as JSON"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opts.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--preset", opts.preset_name, preset_help);
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--grammars", opts.grammars, "Comma-separated grammar ids, e.g. 3,4,7");
    sub->add_option("--cells", opts.cells,
                    "Comma-separated cells: elman, second_order, mi_rnn, gru, lstm");
    sub->add_option("--seed", opts.seed, "Master seed");
    if (std::string_view(c.name) == "distance" || std::string_view(c.name) == "config") {
      sub->add_option("--metric", opts.metric, "substitution (default) or levenshtein");
    }
    if (std::string_view(c.name) == "distance" || std::string_view(c.name) == "verify" ||
        std::string_view(c.name) == "config") {
      sub->add_option("--lengths", opts.lengths,
                      "String lengths: list (8,10,12) or range lo:hi[:step]");
    }
    if (std::string_view(c.name) == "extract" || std::string_view(c.name) == "config") {
      sub->add_option("--votes", opts.votes, "Cluster labelling: every_prefix or final_state");
    }
    if (std::string_view(c.name) == "verify") {
      sub->add_flag("--oracle-model", opts.oracle_model,
                    "Verify the grammar's own DFA in place of a trained network");
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto cfg = resolve(opts, command);
    CommandResult r;
    if (command == "gen") r = cmd_gen(cfg, std::cerr);
    else if (command == "train") r = cmd_train(cfg, std::cerr);
    else if (command == "extract") r = cmd_extract(cfg, std::cerr);
    else if (command == "evaluate") r = cmd_evaluate(cfg, std::cerr);
    else if (command == "verify") r = cmd_verify(cfg, opts.oracle_model, std::cerr);
    else if (command == "distance") r = cmd_distance(cfg, std::cerr);
    else if (command == "report") r = cmd_report(cfg, std::cerr);
    else {
      std::cout << config_to_json(cfg);
      return 0;
    }
    if (!r.ok()) {
      std::cerr << command << ": " << r.succeeded << " of " << r.requested << " cells succeeded\n";
      return 2;
    }
    return 0;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
