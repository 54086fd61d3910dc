#include "tomita/verification.hpp"

#include <set>

#include "tomita/evaluation.hpp"

namespace tomita {

namespace {

void expand_once(const std::string& x, std::set<std::string>& out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::string sub = x;
    sub[i] = sub[i] == '0' ? '1' : '0';
    out.insert(std::move(sub));
    std::string del = x;
    del.erase(i, 1);
    out.insert(std::move(del));
  }
  for (std::size_t i = 0; i <= x.size(); ++i) {
    for (char c : {'0', '1'}) {
      std::string ins = x;
      ins.insert(ins.begin() + static_cast<std::ptrdiff_t>(i), c);
      out.insert(std::move(ins));
    }
  }
}

// Doubles overflow past 2^1023 completions.
constexpr std::size_t kMaxSampleLength = 1000;

}  // namespace

std::vector<std::string> neighborhood(std::string_view center, std::size_t radius) {
  if (radius == 0) throw InputError("neighborhood radius must be at least 1");
  require_binary(center);
  std::set<std::string> ball{std::string(center)};
  std::set<std::string> frontier = ball;
  for (std::size_t r = 0; r < radius; ++r) {
    std::set<std::string> next;
    for (const auto& x : frontier) expand_once(x, next);
    frontier.clear();
    for (auto& x : next) {
      if (ball.insert(x).second) frontier.insert(x);
    }
  }
  ball.erase(std::string(center));
  return {ball.begin(), ball.end()};
}

LabelSampler::LabelSampler(const Dfa& oracle, std::size_t length)
    : oracle_(&oracle), length_(length) {
  if (length > kMaxSampleLength) {
    throw InputError("sampling length above " + std::to_string(kMaxSampleLength));
  }
  const std::size_t n = oracle.num_states();
  for (int l = 0; l < 2; ++l) {
    auto& c = completions_[l];
    c.assign((length + 1) * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      c[s] = index_of(oracle.decide(s)) == static_cast<std::size_t>(l) ? 1.0 : 0.0;
    }
    for (std::size_t t = 1; t <= length; ++t) {
      for (std::size_t s = 0; s < n; ++s) {
        c[t * n + s] = c[(t - 1) * n + oracle.next(s, 0)] + c[(t - 1) * n + oracle.next(s, 1)];
      }
    }
  }
}

double LabelSampler::class_size(Label label) const {
  return completions_[index_of(label)][length_ * oracle_->num_states() + oracle_->start()];
}

std::string LabelSampler::sample(Label label, Rng& rng) const {
  if (class_size(label) == 0.0) {
    throw InputError("no length-" + std::to_string(length_) + " string is " +
                     std::string(to_string(label)));
  }
  const auto& c = completions_[index_of(label)];
  const std::size_t n = oracle_->num_states();
  std::string x;
  x.reserve(length_);
  Dfa::State s = oracle_->start();
  for (std::size_t rem = length_; rem > 0; --rem) {
    const double w0 = c[(rem - 1) * n + oracle_->next(s, 0)];
    const double w1 = c[(rem - 1) * n + oracle_->next(s, 1)];
    int sym;
    if (w0 == 0.0) {
      sym = 1;
    } else if (w1 == 0.0) {
      sym = 0;
    } else {
      sym = rng.uniform() * (w0 + w1) < w0 ? 0 : 1;
    }
    x.push_back(static_cast<char>('0' + sym));
    s = oracle_->next(s, static_cast<std::size_t>(sym));
  }
  return x;
}

double AdversarialResult::mean_gamma() const {
  if (trials.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& t : trials) sum += t.gamma;
  return sum / static_cast<double>(trials.size());
}

std::uint64_t verification_trial_seed(std::uint64_t seed, Label label, std::size_t trial) {
  return derive_seed(seed, {index_of(label), trial});
}

std::optional<double> VerificationReport::gamma_pos() const {
  if (!positive) return std::nullopt;
  return positive->mean_gamma();
}

std::optional<double> VerificationReport::gamma_neg() const {
  if (!negative) return std::nullopt;
  return negative->mean_gamma();
}

std::string verification_header() { return "grammar,cell,N,trial,label,gamma\n"; }

std::string verification_rows(const VerificationReport& rep) {
  std::string out;
  for (const auto* r : {&rep.positive, &rep.negative}) {
    if (!*r) continue;
    for (const auto& t : (*r)->trials) {
      out += std::to_string(rep.grammar) + ',' + rep.model + ',' +
             std::to_string(rep.params.length) + ',' + std::to_string(t.trial) + ',' +
             (t.label == Label::positive ? "1" : "0") + ',' + format_double(t.gamma) + '\n';
    }
  }
  return out;
}

std::string witnesses_header() { return "center,perturbed,oracle_label,rnn_label\n"; }

std::string witness_rows(const VerificationReport& rep) {
  std::string out;
  for (const auto* r : {&rep.positive, &rep.negative}) {
    if (!*r) continue;
    for (const auto& w : (*r)->witnesses) {
      out += w.center + ',' + w.perturbed + ',' + (w.oracle_label == Label::positive ? "1" : "0") +
             ',' + (w.model_label == Label::positive ? "1" : "0") + '\n';
    }
  }
  return out;
}

std::string length_sweep_to_csv(std::span<const LengthGamma> rows) {
  std::string out = "length,gamma,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out += std::to_string(r.length) + ',' + (r.gamma ? format_double(*r.gamma) : std::string()) +
           ',' + err + '\n';
  }
  return out;
}

}  // namespace tomita
