#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tomita/common.hpp"
#include "tomita/dfa.hpp"
#include "tomita/rng.hpp"

namespace tomita {

/// A classifier that consumes one symbol at a time. Dfa and RnnModel both
/// qualify, which lets neighbors that share a prefix with their center
/// resume from the center's cached state.
template <class M>
concept StepClassifier = requires(const M& m, const typename M::State& s, int sym) {
  { m.initial_state() } -> std::convertible_to<typename M::State>;
  { m.step(s, sym) } -> std::convertible_to<typename M::State>;
  { m.decide(s) } -> std::convertible_to<Label>;
};

template <StepClassifier M>
typename M::State run_from(const M& m, typename M::State s, std::string_view suffix) {
  for (char c : suffix) s = m.step(s, symbol_index(c));
  return s;
}

template <StepClassifier M>
Label classify_with(const M& m, std::string_view x) {
  return m.decide(run_from(m, m.initial_state(), x));
}

/// Every string within edit distance `radius` of `center`, excluding the
/// center itself; sorted and deduplicated. Radius > 1 composes radius-1
/// balls. InputError for radius 0.
std::vector<std::string> neighborhood(std::string_view center, std::size_t radius);

/// Uniform sampler over length-n strings that an oracle assigns a given
/// label. Class sizes are counted per DFA state in floating point, so long
/// lengths with exponentially rare classes are still sampled exactly.
class LabelSampler {
 public:
  LabelSampler(const Dfa& oracle, std::size_t length);

  /// Number of length-n strings with the label (as a double; may be huge).
  double class_size(Label label) const;
  /// InputError when the class is empty.
  std::string sample(Label label, Rng& rng) const;

 private:
  const Dfa* oracle_;
  std::size_t length_;
  // completions_[label][t * states + s]: strings of length t leading from s
  // into a state of that label.
  std::vector<double> completions_[2];
};

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerificationParams {
  std::size_t length = 200;
  std::size_t samples = 100;
  std::size_t trials = 30;
  std::size_t radius = 1;
  /// Per-center rejection cap while looking for strings the model and the
  /// oracle both assign the target label.
  std::size_t max_attempts = 1'000'000;
};

struct Witness {
  std::size_t trial = 0;
  std::string center;
  std::string perturbed;
  Label oracle_label = Label::negative;
  Label model_label = Label::negative;

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct TrialGamma {
  std::size_t trial = 0;
  Label label = Label::positive;
  std::size_t samples = 0;
  std::size_t broken = 0;
  double gamma = 1.0;

  friend bool operator==(const TrialGamma&, const TrialGamma&) = default;
};

struct AdversarialResult {
  Label label = Label::positive;
  std::vector<TrialGamma> trials;
  std::vector<Witness> witnesses;

  double mean_gamma() const;
};

std::uint64_t verification_trial_seed(std::uint64_t seed, Label label, std::size_t trial);

namespace detail {

// Scans the neighbors of one center; returns the first one that keeps the
// oracle's label but changes the model's decision.
template <StepClassifier M>
std::optional<std::string> find_flip(const M& model, const Dfa& oracle, const std::string& center,
                                     Label label, std::size_t radius) {
  std::vector<typename M::State> model_states;
  std::vector<Dfa::State> oracle_states;
  model_states.reserve(center.size() + 1);
  oracle_states.reserve(center.size() + 1);
  model_states.push_back(model.initial_state());
  oracle_states.push_back(oracle.initial_state());
  for (char c : center) {
    const int sym = symbol_index(c);
    model_states.push_back(model.step(model_states.back(), sym));
    oracle_states.push_back(oracle.step(oracle_states.back(), sym));
  }
  for (const auto& y : neighborhood(center, radius)) {
    const auto common = static_cast<std::size_t>(
        std::mismatch(center.begin(), center.end(), y.begin(), y.end()).first - center.begin());
    const std::string_view rest = std::string_view(y).substr(common);
    if (oracle.decide(run_from(oracle, oracle_states[common], rest)) != label) continue;
    if (model.decide(run_from(model, model_states[common], rest)) != label) return y;
  }
  return std::nullopt;
}

}  // namespace detail

/// Adversarial accuracy of `model` around strings of one label. Each trial
/// draws `samples` length-n centers that both the model and the oracle
/// assign `label`, then looks for a neighbor the oracle still assigns
/// `label` but the model does not. gamma = 1 - broken / samples.
/// VerificationError when centers cannot be found within the attempt cap.
template <StepClassifier M>
AdversarialResult adversarial_accuracy(const M& model, const Dfa& oracle,
                                       const VerificationParams& params, Label label,
                                       std::uint64_t seed) {
  if (params.samples == 0 || params.trials == 0) {
    throw InputError("verification needs at least one sample and one trial");
  }
  const LabelSampler sampler(oracle, params.length);
  if (sampler.class_size(label) == 0.0) {
    throw VerificationError("insufficient correctly-classified strings: no length-" +
                            std::to_string(params.length) + " string is " +
                            std::string(to_string(label)));
  }
  AdversarialResult out;
  out.label = label;
  for (std::size_t t = 0; t < params.trials; ++t) {
    Rng rng(verification_trial_seed(seed, label, t));
    TrialGamma tg{t, label, params.samples, 0, 1.0};
    for (std::size_t i = 0; i < params.samples; ++i) {
      std::string center;
      std::size_t attempts = 0;
      while (true) {
        if (attempts++ == params.max_attempts) {
          throw VerificationError(
              "insufficient correctly-classified strings: no " + std::string(to_string(label)) +
              " length-" + std::to_string(params.length) + " string accepted by the model in " +
              std::to_string(params.max_attempts) + " attempts");
        }
        center = sampler.sample(label, rng);
        if (classify_with(model, center) == label) break;
      }
      if (auto y = detail::find_flip(model, oracle, center, label, params.radius)) {
        ++tg.broken;
        out.witnesses.push_back({t, center, *y, label, flip(label)});
      }
    }
    tg.gamma = 1.0 - static_cast<double>(tg.broken) / static_cast<double>(tg.samples);
    out.trials.push_back(tg);
  }
  return out;
}

/// Exhaustive local invariance check at one point: returns the first x' in
/// the ball whose oracle label equals that of x but whose model label
/// differs. InputError when the model and the oracle disagree on x.
template <StepClassifier M>
std::optional<std::string> local_invariance(const M& model, const Dfa& oracle, std::string_view x,
                                            std::size_t radius) {
  require_binary(x);
  const Label label = oracle.classify(x);
  if (classify_with(model, x) != label) {
    throw InputError("local invariance requires the model and the oracle to agree on '" +
                     std::string(x) + "'");
  }
  return detail::find_flip(model, oracle, std::string(x), label, radius);
}

struct EquivalenceReport {
  std::size_t checked = 0;
  std::size_t agreed = 0;
  std::vector<std::string> witnesses;  ///< strings where argmax f != oracle
  double agreement() const {
    return checked == 0 ? 1.0 : static_cast<double>(agreed) / static_cast<double>(checked);
  }
};

/// Compares the model with the oracle on every string of each length whose
/// 2^n fits in `budget`, and on `budget` uniform samples (with replacement)
/// for longer lengths. At most `max_witnesses` disagreements are kept.
template <StepClassifier M>
EquivalenceReport equivalence_check(const M& model, const Dfa& oracle, LengthRange lengths,
                                    std::size_t budget, std::uint64_t seed,
                                    std::size_t max_witnesses = 100) {
  if (lengths.min > lengths.max) throw InputError("empty length range");
  EquivalenceReport rep;
  auto check = [&](const std::string& x) {
    ++rep.checked;
    if (classify_with(model, x) == oracle.classify(x)) {
      ++rep.agreed;
    } else if (rep.witnesses.size() < max_witnesses) {
      rep.witnesses.push_back(x);
    }
  };
  for (std::size_t n = lengths.min; n <= lengths.max; ++n) {
    const bool exhaustive = n < 63 && (std::uint64_t{1} << n) <= budget;
    if (exhaustive) {
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        std::string x(n, '0');
        for (std::size_t i = 0; i < n; ++i) {
          if ((bits >> (n - 1 - i)) & 1U) x[i] = '1';
        }
        check(x);
      }
    } else {
      Rng rng(derive_seed(seed, {n}));
      for (std::size_t s = 0; s < budget; ++s) {
        std::string x(n, '0');
        for (auto& c : x) c = rng.below(2) ? '1' : '0';
        check(x);
      }
    }
  }
  return rep;
}

/// gamma_pos / gamma_neg for one (grammar, model) pair.
struct VerificationReport {
  int grammar = 0;
  std::string model;
  VerificationParams params;
  std::optional<AdversarialResult> positive;
  std::optional<AdversarialResult> negative;
  std::string error;  ///< set when a label could not be verified

  std::optional<double> gamma_pos() const;
  std::optional<double> gamma_neg() const;
};

template <StepClassifier M>
VerificationReport verify_model(const M& model, std::string model_name, int grammar,
                                const Dfa& oracle, const VerificationParams& params,
                                std::uint64_t seed) {
  VerificationReport rep{grammar, std::move(model_name), params, {}, {}, {}};
  for (Label label : {Label::positive, Label::negative}) {
    try {
      auto r = adversarial_accuracy(model, oracle, params, label, seed);
      (label == Label::positive ? rep.positive : rep.negative) = std::move(r);
    } catch (const VerificationError& e) {
      if (!rep.error.empty()) rep.error += "; ";
      rep.error += e.what();
    }
  }
  return rep;
}

struct LengthGamma {
  std::size_t length = 0;
  std::optional<double> gamma;
  std::string error;
};

/// adversarial_accuracy at each length; a length whose centers cannot be
/// sampled is recorded with its error and the sweep continues.
template <StepClassifier M>
std::vector<LengthGamma> length_sweep(const M& model, const Dfa& oracle,
                                      std::span<const std::size_t> lengths,
                                      VerificationParams params, Label label, std::uint64_t seed) {
  std::vector<LengthGamma> out;
  for (auto n : lengths) {
    params.length = n;
    LengthGamma lg{n, std::nullopt, {}};
    try {
      lg.gamma = adversarial_accuracy(model, oracle, params, label, derive_seed(seed, {n}))
                     .mean_gamma();
    } catch (const VerificationError& e) {
      lg.error = e.what();
    }
    out.push_back(std::move(lg));
  }
  return out;
}

/// Rows `grammar,cell,N,trial,label,gamma`.
std::string verification_header();
std::string verification_rows(const VerificationReport& rep);
/// Rows `center,perturbed,oracle_label,rnn_label`.
std::string witnesses_header();
std::string witness_rows(const VerificationReport& rep);
/// Rows `length,gamma,error`.
std::string length_sweep_to_csv(std::span<const LengthGamma> rows);

}  // namespace tomita
