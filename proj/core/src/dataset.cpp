#include "tomita/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include "tomita/rng.hpp"
#include "tomita/tomita.hpp"

namespace tomita {
namespace {

constexpr std::size_t kEnumerationBits = 16;

std::string bits_to_string(std::uint64_t bits, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    if ((bits >> (n - 1 - i)) & 1U) s[i] = '1';
  }
  return s;
}

}  // namespace

std::string_view to_string(Split split) noexcept {
  return split == Split::train ? "train" : "test";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "test") return Split::test;
  throw InputError("unrecognized split '" + std::string(text) + "'");
}

std::size_t LabeledDataset::count(Split split) const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [&](const Sample& s) { return s.split == split; }));
}

std::size_t LabeledDataset::count(Split split, Label label) const {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [&](const Sample& s) {
    return s.split == split && s.label == label;
  }));
}

std::size_t LabeledDataset::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [&](const Sample& s) { return s.label == label; }));
}

std::vector<std::string> LabeledDataset::strings(Split split) const {
  std::vector<std::string> out;
  for (const auto& s : samples) {
    if (s.split == split) out.push_back(s.text);
  }
  return out;
}

LabeledDataset generate_dataset(GrammarId grammar, LengthRange lengths,
                                std::size_t max_per_class, std::uint64_t seed) {
  if (lengths.min > lengths.max) throw InputError("empty length range");
  if (lengths.max > 63) throw InputError("string length above 63 is not supported");
  const Dfa& oracle = tomita_dfa(grammar);
  LabeledDataset data{grammar, {}};

  for (std::size_t n = lengths.min; n <= lengths.max; ++n) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(grammar.value()), n}));
    std::array<std::vector<std::string>, 2> picked;

    if (n <= kEnumerationBits) {
      std::array<std::vector<std::string>, 2> all;
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        std::string s = bits_to_string(bits, n);
        all[index_of(oracle.classify(s))].push_back(std::move(s));
      }
      for (std::size_t c = 0; c < 2; ++c) {
        rng.shuffle(all[c]);
        if (all[c].size() > max_per_class) all[c].resize(max_per_class);
        picked[c] = std::move(all[c]);
      }
    } else {
      std::unordered_set<std::string> seen;
      const std::size_t attempts = std::max<std::size_t>(10000, 200 * max_per_class);
      for (std::size_t i = 0; i < attempts; ++i) {
        if (picked[0].size() >= max_per_class && picked[1].size() >= max_per_class) break;
        std::string s = bits_to_string(rng.next_u64(), n);
        const std::size_t c = index_of(oracle.classify(s));
        if (picked[c].size() >= max_per_class || !seen.insert(s).second) continue;
        picked[c].push_back(std::move(s));
      }
    }

    for (std::size_t c : {1U, 0U}) {
      for (auto& s : picked[c]) {
        data.samples.push_back({std::move(s), static_cast<Label>(c), Split::train, false});
      }
    }
  }
  return data;
}

std::vector<LengthCounts> length_counts(const LabeledDataset& data) {
  std::map<std::size_t, LengthCounts> by_length;
  for (const auto& s : data.samples) {
    auto& row = by_length[s.text.size()];
    row.length = s.text.size();
    (s.label == Label::positive ? row.positives : row.negatives) += 1;
  }
  std::vector<LengthCounts> out;
  for (auto& [_, row] : by_length) out.push_back(row);
  return out;
}

LabeledDataset split_dataset(const LabeledDataset& data, double train_fraction,
                             std::uint64_t seed) {
  if (data.samples.empty()) throw InputError("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train fraction must lie strictly between 0 and 1");
  }
  LabeledDataset out = data;
  Rng rng(seed);
  std::size_t train_total = 0;
  for (Label label : {Label::positive, Label::negative}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      if (out.samples[i].clean_label() == label) idx.push_back(i);
    }
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out.samples[idx[j]].split = j < n_train ? Split::train : Split::test;
    }
    train_total += n_train;
  }
  if (train_total == 0 || train_total == out.samples.size()) {
    throw InputError("train fraction leaves one side of the split empty");
  }
  return out;
}

std::string to_csv(const LabeledDataset& data) {
  std::string out = "string,label,split\n";
  for (const auto& s : data.samples) {
    out += s.text;
    out += s.label == Label::positive ? ",1," : ",0,";
    out += to_string(s.split);
    out += '\n';
  }
  return out;
}

LabeledDataset dataset_from_csv(std::string_view text, std::optional<GrammarId> grammar) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "string,label,split") {
    throw IoError("dataset CSV must start with header 'string,label,split'");
  }
  LabeledDataset data{grammar, {}};
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw IoError("dataset CSV line " + std::to_string(line_no) + " has fewer than 3 fields");
    }
    Sample s;
    s.text = line.substr(0, c1);
    try {
      require_binary(s.text);
      s.label = parse_label(line.substr(c1 + 1, c2 - c1 - 1));
      s.split = parse_split(line.substr(c2 + 1));
    } catch (const InputError& e) {
      throw IoError("dataset CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(s.text).second) {
      throw IoError("dataset CSV line " + std::to_string(line_no) + ": duplicate string");
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

}  // namespace tomita
