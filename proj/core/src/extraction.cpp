#include "tomita/extraction.hpp"

#include <nlohmann/json.hpp>

#include "tomita/kmeans.hpp"

namespace tomita {

void validate(const ExtractionConfig& cfg) {
  if (cfg.k < 2) throw InputError("extraction needs K >= 2");
  if (cfg.restarts < 1) throw InputError("extraction needs at least one k-means restart");
}

std::string_view to_string(VoteMode mode) noexcept {
  return mode == VoteMode::every_prefix ? "every_prefix" : "final_state";
}

VoteMode parse_vote_mode(std::string_view text) {
  if (text == "every_prefix") return VoteMode::every_prefix;
  if (text == "final_state") return VoteMode::final_state;
  throw InputError("unknown vote mode '" + std::string(text) + "'");
}

Quantization quantize(std::span<const HiddenTrace> traces, const ExtractionConfig& cfg) {
  validate(cfg);
  std::size_t n = 0;
  Eigen::Index dim = 0;
  for (const auto& t : traces) {
    n += t.states.size();
    if (!t.states.empty()) dim = t.states.front().size();
  }
  if (n == 0) throw InputError("no hidden vectors to quantize");

  Eigen::MatrixXd points(dim, static_cast<Eigen::Index>(n));
  Eigen::Index col = 0;
  for (const auto& t : traces) {
    for (const auto& h : t.states) {
      if (h.size() != dim) throw InputError("hidden vectors differ in dimension");
      points.col(col++) = h;
    }
  }

  const KMeansResult km = kmeans(points, cfg.k, cfg.kmeans_seed, cfg.kmeans_max_iters, cfg.restarts);
  Quantization q;
  q.requested_k = cfg.k;
  q.effective_k = km.k;
  q.wcss = km.wcss;
  std::size_t i = 0;
  for (const auto& t : traces) {
    auto& row = q.clusters.emplace_back();
    row.reserve(t.states.size());
    for (std::size_t s = 0; s < t.states.size(); ++s) row.push_back(km.assignment[i++]);
  }
  return q;
}

TransitionDiagram::TransitionDiagram(std::size_t clusters)
    : votes(clusters, {0, 0}), clusters_(clusters), counts_(clusters * 2 * clusters, 0) {}

std::size_t TransitionDiagram::count(std::size_t from, int symbol, std::size_t to) const {
  return counts_[(from * 2 + static_cast<std::size_t>(symbol)) * clusters_ + to];
}

void TransitionDiagram::add(std::size_t from, int symbol, std::size_t to, std::size_t n) {
  if (from >= clusters_ || to >= clusters_ || symbol < 0 || symbol > 1) {
    throw InputError("transition outside the diagram");
  }
  counts_[(from * 2 + static_cast<std::size_t>(symbol)) * clusters_ + to] += n;
}

std::size_t TransitionDiagram::outgoing(std::size_t from, int symbol) const {
  std::size_t sum = 0;
  for (std::size_t to = 0; to < clusters_; ++to) sum += count(from, symbol, to);
  return sum;
}

std::size_t TransitionDiagram::total() const {
  std::size_t sum = 0;
  for (auto c : counts_) sum += c;
  return sum;
}

TransitionDiagram build_diagram(std::span<const HiddenTrace> traces, const Quantization& q,
                                VoteMode votes) {
  if (q.clusters.size() != traces.size()) throw InputError("assignment does not cover every trace");
  TransitionDiagram diagram(q.effective_k);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& trace = traces[i];
    const auto& cl = q.clusters[i];
    if (cl.size() != trace.input.size() + 1 || trace.states.size() != cl.size()) {
      throw InputError("assignment does not cover every hidden vector");
    }
    for (std::size_t t = 0; t < trace.input.size(); ++t) {
      diagram.add(cl[t], symbol_index(trace.input[t]), cl[t + 1]);
    }
    if (votes == VoteMode::final_state) {
      diagram.votes[cl.back()][index_of(trace.prediction)] += 1;
      continue;
    }
    if (trace.prefix_predictions.size() != cl.size()) {
      throw InputError("trace of '" + trace.input + "' lacks per-prefix predictions");
    }
    for (std::size_t t = 0; t < cl.size(); ++t) {
      diagram.votes[cl[t]][index_of(trace.prefix_predictions[t])] += 1;
    }
  }
  if (!q.clusters.empty()) diagram.initial_cluster = q.clusters.front().front();
  return diagram;
}

Dfa prune_to_dfa(const TransitionDiagram& diagram) {
  const std::size_t k = diagram.num_clusters();
  if (k == 0) throw InputError("empty transition diagram");
  std::vector<Dfa::State> delta(k * 2);
  bool needs_sink = false;
  for (std::size_t from = 0; from < k; ++from) {
    for (int sym = 0; sym < 2; ++sym) {
      std::size_t best = k;
      std::size_t best_count = 0;
      for (std::size_t to = 0; to < k; ++to) {
        const std::size_t c = diagram.count(from, sym, to);
        if (c > best_count) {
          best_count = c;
          best = to;
        }
      }
      delta[from * 2 + static_cast<std::size_t>(sym)] = best;
      if (best == k) needs_sink = true;
    }
  }
  const std::size_t n = needs_sink ? k + 1 : k;
  std::vector<bool> accepting(n, false);
  for (std::size_t c = 0; c < k; ++c) {
    accepting[c] = diagram.votes[c][1] > diagram.votes[c][0];
  }
  if (needs_sink) {
    delta.push_back(k);
    delta.push_back(k);
  }
  return Dfa(n, diagram.initial_cluster, std::move(delta), std::move(accepting));
}

std::string provenance_to_json(const Provenance& p) {
  nlohmann::json j;
  j["model_id"] = p.model_id;
  j["grammar"] = p.grammar ? nlohmann::json(*p.grammar) : nlohmann::json(nullptr);
  j["cell"] = p.cell;
  j["k"] = p.k;
  j["effective_k"] = p.effective_k;
  j["hidden_seed"] = p.hidden_seed;
  j["kmeans_seed"] = p.kmeans_seed;
  j["trial"] = p.trial;
  return j.dump(1) + "\n";
}

Provenance provenance_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Provenance p;
    p.model_id = j.at("model_id").get<std::string>();
    if (!j.at("grammar").is_null()) p.grammar = j.at("grammar").get<int>();
    p.cell = j.at("cell").get<std::string>();
    p.k = j.at("k").get<std::size_t>();
    p.effective_k = j.at("effective_k").get<std::size_t>();
    p.hidden_seed = j.at("hidden_seed").get<std::uint64_t>();
    p.kmeans_seed = j.at("kmeans_seed").get<std::uint64_t>();
    p.trial = j.at("trial").get<std::size_t>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed provenance: ") + e.what());
  }
}

ExtractedDfa extract_from_traces(std::span<const HiddenTrace> traces, const ExtractionConfig& cfg,
                                 Provenance provenance) {
  Quantization q;
  try {
    q = quantize(traces, cfg);
  } catch (const std::exception& e) {
    throw ExtractionError(std::string("quantize: ") + e.what());
  }
  Dfa raw = [&] {
    try {
      return prune_to_dfa(build_diagram(traces, q, cfg.votes));
    } catch (const std::exception& e) {
      throw ExtractionError(std::string("transition diagram: ") + e.what());
    }
  }();
  provenance.k = cfg.k;
  provenance.effective_k = q.effective_k;
  provenance.kmeans_seed = cfg.kmeans_seed;
  return {minimize(raw), std::move(provenance)};
}

ExtractedDfa extract_dfa(const RnnModel& model, const LabeledDataset& data,
                         const ExtractionConfig& cfg, Provenance provenance) {
  const auto inputs = data.strings(Split::train);
  if (inputs.empty()) throw ExtractionError("record traces: training split is empty");
  const auto traces = record_traces(model, inputs);
  provenance.hidden_seed = model.seed();
  provenance.cell = std::string(to_string(model.kind()));
  if (!provenance.grammar && data.grammar) provenance.grammar = data.grammar->value();
  return extract_from_traces(traces, cfg, std::move(provenance));
}

}  // namespace tomita
