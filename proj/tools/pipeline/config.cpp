#include <nlohmann/json.hpp>

#include "pipeline.hpp"

namespace tomita::pipeline {

using nlohmann::json;

namespace {

std::vector<std::size_t> k_range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
  return out;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return obj.at(key).get<T>();
}

// Every key of `user` must exist in the fully populated `base` document.
void check_known(const json& user, const json& base, const std::string& where) {
  if (!user.is_object()) return;
  for (const auto& [key, value] : user.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw InputError("unknown config field '" + path + "'");
    if (value.is_object()) check_known(value, base.at(key), path);
  }
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
  const auto& s = cfg.sweep;
  const auto& v = cfg.verification;
  json cells = json::array();
  for (auto c : cfg.cells) cells.push_back(std::string(to_string(c)));
  json j;
  j["grammars"] = cfg.grammars;
  j["cells"] = cells;
  j["master_seed"] = s.master_seed;
  j["output_dir"] = cfg.output_dir.string();
  j["data"] = {{"min_length", s.data.lengths.min},
               {"max_length", s.data.lengths.max},
               {"max_per_class", s.data.max_per_class},
               {"train_fraction", s.data.train_fraction}};
  j["model"] = {{"hidden_size", s.model.hidden_size},
                {"parameter_budget", optional_json(s.model.parameter_budget)},
                {"weight_range", optional_json(s.model.weight_range)}};
  j["train"] = {{"max_epochs", s.max_epochs},
                {"target_loss", s.target_loss},
                {"learning_rate", optional_json(s.learning_rate)}};
  j["extraction"] = {{"k_values", s.k_values},
                     {"hidden_seeds", s.hidden_seeds},
                     {"kmeans_max_iters", s.kmeans_max_iters},
                     {"kmeans_restarts", s.kmeans_restarts},
                     {"votes", std::string(to_string(s.votes))}};
  j["noise"] = {{"positive", s.noise_pos}, {"negative", s.noise_neg}};
  j["verification"] = {{"grammars", v.grammars},
                       {"length", v.params.length},
                       {"samples", v.params.samples},
                       {"trials", v.params.trials},
                       {"radius", v.params.radius},
                       {"max_attempts", v.params.max_attempts},
                       {"sweep_lengths", v.sweep_lengths},
                       {"seed_index", v.seed_index}};
  j["distance"] = {{"grammars", cfg.distance.grammars},
                   {"lengths", cfg.distance.lengths},
                   {"metric", std::string(to_string(cfg.distance.metric))}};
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(std::string_view text, const ExperimentConfig& base) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!user.is_object()) throw IoError("config must be a JSON object");
  json j = json::parse(config_to_json(base));
  check_known(user, j, "");
  j.merge_patch(user);

  ExperimentConfig cfg;
  try {
    auto& s = cfg.sweep;
    cfg.grammars = j.at("grammars").get<std::vector<int>>();
    cfg.cells.clear();
    for (const auto& c : j.at("cells")) cfg.cells.push_back(parse_cell_kind(c.get<std::string>()));
    s.master_seed = j.at("master_seed").get<std::uint64_t>();
    s.data.seed = s.master_seed;
    cfg.output_dir = j.at("output_dir").get<std::string>();

    const auto& d = j.at("data");
    s.data.lengths = {d.at("min_length").get<std::size_t>(), d.at("max_length").get<std::size_t>()};
    s.data.max_per_class = d.at("max_per_class").get<std::size_t>();
    s.data.train_fraction = d.at("train_fraction").get<double>();

    const auto& m = j.at("model");
    s.model.hidden_size = m.at("hidden_size").get<std::size_t>();
    s.model.parameter_budget = optional_from<std::size_t>(m, "parameter_budget");
    s.model.weight_range = optional_from<double>(m, "weight_range");

    const auto& t = j.at("train");
    s.max_epochs = t.at("max_epochs").get<std::size_t>();
    s.target_loss = t.at("target_loss").get<double>();
    s.learning_rate = optional_from<double>(t, "learning_rate");

    const auto& e = j.at("extraction");
    s.k_values = e.at("k_values").get<std::vector<std::size_t>>();
    s.hidden_seeds = e.at("hidden_seeds").get<std::size_t>();
    s.kmeans_max_iters = e.at("kmeans_max_iters").get<std::size_t>();
    s.kmeans_restarts = e.at("kmeans_restarts").get<std::size_t>();
    s.votes = parse_vote_mode(e.at("votes").get<std::string>());

    const auto& n = j.at("noise");
    s.noise_pos = n.at("positive").get<std::size_t>();
    s.noise_neg = n.at("negative").get<std::size_t>();

    const auto& v = j.at("verification");
    cfg.verification.grammars = v.at("grammars").get<std::vector<int>>();
    cfg.verification.params.length = v.at("length").get<std::size_t>();
    cfg.verification.params.samples = v.at("samples").get<std::size_t>();
    cfg.verification.params.trials = v.at("trials").get<std::size_t>();
    cfg.verification.params.radius = v.at("radius").get<std::size_t>();
    cfg.verification.params.max_attempts = v.at("max_attempts").get<std::size_t>();
    cfg.verification.sweep_lengths = v.at("sweep_lengths").get<std::vector<std::size_t>>();
    cfg.verification.seed_index = v.at("seed_index").get<std::size_t>();

    const auto& dist = j.at("distance");
    cfg.distance.grammars = dist.at("grammars").get<std::vector<int>>();
    cfg.distance.lengths = dist.at("lengths").get<std::vector<std::size_t>>();
    cfg.distance.metric = parse_string_metric(dist.at("metric").get<std::string>());
  } catch (const json::exception& e) {
    throw IoError(std::string("bad config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  auto check_grammars = [](const std::vector<int>& gs, const char* what) {
    if (gs.empty()) throw InputError(std::string(what) + " lists no grammar");
    for (int g : gs) GrammarId{g};
  };
  check_grammars(cfg.grammars, "grammars");
  check_grammars(cfg.verification.grammars, "verification.grammars");
  check_grammars(cfg.distance.grammars, "distance.grammars");
  if (cfg.cells.empty()) throw InputError("cells lists no cell kind");
  const auto& s = cfg.sweep;
  if (s.data.lengths.min > s.data.lengths.max) throw InputError("data length range is empty");
  if (s.k_values.empty()) throw InputError("extraction.k_values is empty");
  for (auto k : s.k_values) {
    if (k < 2) throw InputError("every K must be at least 2");
  }
  if (s.hidden_seeds == 0) throw InputError("extraction.hidden_seeds must be positive");
  if (cfg.verification.seed_index >= s.hidden_seeds) {
    throw InputError("verification.seed_index must be below extraction.hidden_seeds");
  }
  if (cfg.verification.params.radius == 0) throw InputError("verification.radius must be positive");
  if (cfg.distance.lengths.empty()) throw InputError("distance.lengths is empty");
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;
  cfg.output_dir = std::filesystem::path("out") / std::string(name);
  auto all_cells = std::vector<CellKind>(kAllCells.begin(), kAllCells.end());
  if (name == "paper") {
    cfg.cells = all_cells;
  } else if (name == "table3") {
    // Fidelity under label noise: one trial per (grammar, cell) at K = 20.
    cfg.grammars = {3, 4, 7};
    cfg.cells = all_cells;
    cfg.sweep.k_values = {20};
    cfg.sweep.hidden_seeds = 1;
    cfg.sweep.noise_pos = 2;
    cfg.sweep.noise_neg = 2;
  } else if (name == "fig4") {
    cfg.grammars = {3, 4, 7};
    cfg.cells = {CellKind::mi_rnn};
    cfg.sweep.k_values = k_range(6, 30);
    cfg.sweep.hidden_seeds = 1;
    cfg.sweep.noise_pos = 2;
    cfg.sweep.noise_neg = 2;
  } else if (name == "fig5") {
    cfg.grammars = {3};
    cfg.cells = {CellKind::elman};
    cfg.sweep.hidden_seeds = 1;
    cfg.verification.grammars = {3};
    for (std::size_t n = 100; n <= 200; n += 10) cfg.verification.sweep_lengths.push_back(n);
  } else if (name == "smoke") {
    cfg.grammars = {1, 3};
    cfg.sweep.hidden_seeds = 2;
    cfg.sweep.k_values = {3, 6, 9};
    cfg.sweep.max_epochs = 300;
    cfg.verification.grammars = {3};
    cfg.verification.params.length = 20;
    cfg.verification.params.samples = 10;
    cfg.verification.params.trials = 2;
    cfg.distance.grammars = {1, 3};
    cfg.distance.lengths = {6, 8};
  } else {
    throw InputError("unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

std::vector<std::string> preset_names() { return {"paper", "table3", "fig4", "fig5", "smoke"}; }

}  // namespace tomita::pipeline
