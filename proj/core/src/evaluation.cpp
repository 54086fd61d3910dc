#include "tomita/evaluation.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <utility>

#include "csv.hpp"
#include "tomita/rng.hpp"

namespace tomita {

LabeledDataset inject_label_noise(const LabeledDataset& data, std::size_t n_pos, std::size_t n_neg,
                                  std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> pools;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    if (s.split == Split::train) pools[index_of(s.clean_label())].push_back(i);
  }
  const std::array<std::size_t, 2> wanted = {n_neg, n_pos};
  LabeledDataset out = data;
  Rng rng(seed);
  for (std::size_t c = 0; c < 2; ++c) {
    auto& pool = pools[c];
    if (wanted[c] > pool.size()) {
      throw InputError("cannot flip " + std::to_string(wanted[c]) + " " +
                       std::string(to_string(static_cast<Label>(c))) + " training labels; only " +
                       std::to_string(pool.size()) + " exist");
    }
    rng.shuffle(pool);
    for (std::size_t i = 0; i < wanted[c]; ++i) {
      auto& s = out.samples[pool[i]];
      s.label = flip(s.label);
      s.noisy = !s.noisy;
    }
  }
  return out;
}

double success_rate(std::span<const TrialResult> results) {
  if (results.empty()) throw InputError("success rate of zero trials");
  const auto ok = std::count_if(results.begin(), results.end(),
                                [](const TrialResult& r) { return r.success; });
  return static_cast<double>(ok) / static_cast<double>(results.size());
}

std::vector<SweepSummaryRow> summarize(std::span<const TrialResult> results) {
  std::map<std::pair<int, int>, std::vector<const TrialResult*>> groups;
  for (const auto& r : results) groups[{r.grammar, static_cast<int>(r.cell)}].push_back(&r);

  std::vector<SweepSummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SweepSummaryRow row;
    row.grammar = key.first;
    row.cell = static_cast<CellKind>(key.second);
    row.trials = group.size();
    double sum = 0.0;
    double fid = 0.0;
    for (const auto* r : group) {
      row.successes += r->success ? 1 : 0;
      row.failures += r->error.empty() ? 0 : 1;
      sum += r->dfa_accuracy;
      fid += r->fidelity;
    }
    const double n = static_cast<double>(group.size());
    row.mean_dfa_accuracy = sum / n;
    row.mean_fidelity = fid / n;
    double sq = 0.0;
    for (const auto* r : group) {
      const double d = r->dfa_accuracy - row.mean_dfa_accuracy;
      sq += d * d;
    }
    row.var_dfa_accuracy = sq / n;
    row.success_rate = static_cast<double>(row.successes) / n;
    rows.push_back(row);
  }
  return rows;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

namespace {

constexpr std::string_view kTrialHeader =
    "grammar,cell,hidden_seed,k,effective_k,kmeans_seed,dfa_accuracy,rnn_accuracy_clean,"
    "rnn_accuracy_noisy,fidelity,success,extracted_states,error";

// Error messages may contain commas or newlines; keep the row parseable.
std::string sanitize(std::string_view text) {
  std::string out(text);
  std::replace(out.begin(), out.end(), ',', ';');
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out;
}

}  // namespace

std::string trials_to_csv(std::span<const TrialResult> results) {
  std::string out(kTrialHeader);
  out += '\n';
  for (const auto& r : results) {
    out += std::to_string(r.grammar) + ',' + std::string(to_string(r.cell)) + ',' +
           std::to_string(r.hidden_seed) + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.effective_k) + ',' + std::to_string(r.kmeans_seed) + ',' +
           format_double(r.dfa_accuracy) + ',' + format_double(r.rnn_accuracy_clean) + ',' +
           (r.rnn_accuracy_noisy ? format_double(*r.rnn_accuracy_noisy) : std::string()) + ',' +
           format_double(r.fidelity) + ',' + (r.success ? "1" : "0") + ',' +
           std::to_string(r.extracted_states) + ',' + sanitize(r.error) + '\n';
  }
  return out;
}

std::vector<TrialResult> trials_from_csv(std::string_view text) {
  using detail::parse_number;
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines.front() != kTrialHeader) {
    throw IoError("trial CSV must start with header '" + std::string(kTrialHeader) + "'");
  }
  std::vector<TrialResult> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = detail::split_fields(lines[i]);
    if (f.size() != 13) {
      throw IoError("trial CSV line " + std::to_string(i + 1) + " has " +
                    std::to_string(f.size()) + " fields, expected 13");
    }
    TrialResult r;
    try {
      r.cell = parse_cell_kind(f[1]);
    } catch (const InputError& e) {
      throw IoError(e.what());
    }
    r.grammar = parse_number<int>(f[0], "grammar");
    r.hidden_seed = parse_number<std::uint64_t>(f[2], "hidden_seed");
    r.k = parse_number<std::size_t>(f[3], "k");
    r.effective_k = parse_number<std::size_t>(f[4], "effective_k");
    r.kmeans_seed = parse_number<std::uint64_t>(f[5], "kmeans_seed");
    r.dfa_accuracy = parse_number<double>(f[6], "dfa_accuracy");
    r.rnn_accuracy_clean = parse_number<double>(f[7], "rnn_accuracy_clean");
    if (!f[8].empty()) r.rnn_accuracy_noisy = parse_number<double>(f[8], "rnn_accuracy_noisy");
    r.fidelity = parse_number<double>(f[9], "fidelity");
    r.success = parse_number<int>(f[10], "success") != 0;
    r.extracted_states = parse_number<std::size_t>(f[11], "extracted_states");
    r.error = std::string(f[12]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_to_csv(std::span<const SweepSummaryRow> rows) {
  std::string out =
      "grammar,cell,trials,successes,failures,mean_dfa_accuracy,var_dfa_accuracy,success_rate,"
      "mean_fidelity\n";
  for (const auto& r : rows) {
    out += std::to_string(r.grammar) + ',' + std::string(to_string(r.cell)) + ',' +
           std::to_string(r.trials) + ',' + std::to_string(r.successes) + ',' +
           std::to_string(r.failures) + ',' + format_double(r.mean_dfa_accuracy) + ',' +
           format_double(r.var_dfa_accuracy) + ',' + format_double(r.success_rate) + ',' +
           format_double(r.mean_fidelity) + '\n';
  }
  return out;
}

}  // namespace tomita
