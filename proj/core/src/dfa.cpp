#include "tomita/dfa.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>
#include <utility>

namespace tomita {

Dfa::Dfa(std::size_t num_states, State start, std::vector<State> transitions,
         std::vector<bool> accepting, std::string alphabet)
    : start_(start),
      transitions_(std::move(transitions)),
      accepting_(std::move(accepting)),
      alphabet_(std::move(alphabet)) {
  if (num_states == 0) throw InputError("a DFA needs at least one state");
  if (alphabet_.empty()) throw InputError("a DFA needs a non-empty alphabet");
  if (accepting_.size() != num_states) {
    throw InputError("accepting mask size does not match the state count");
  }
  if (transitions_.size() != num_states * alphabet_.size()) {
    throw InputError("transition table is not total");
  }
  if (start_ >= num_states) throw InputError("start state out of range");
  for (State t : transitions_) {
    if (t >= num_states) throw InputError("transition target out of range");
  }
}

std::vector<Dfa::State> Dfa::accepting_states() const {
  std::vector<State> out;
  for (State s = 0; s < num_states(); ++s) {
    if (accepting_[s]) out.push_back(s);
  }
  return out;
}

std::size_t Dfa::symbol_of(char c) const {
  const auto pos = alphabet_.find(c);
  if (pos == std::string::npos) {
    throw InputError(std::string("symbol '") + c + "' is not in the alphabet");
  }
  return pos;
}

Dfa::State Dfa::run(std::string_view x) const {
  State s = start_;
  for (char c : x) s = next(s, symbol_of(c));
  return s;
}

Dfa Dfa::complement() const {
  std::vector<bool> flipped(accepting_.size());
  for (std::size_t i = 0; i < accepting_.size(); ++i) flipped[i] = !accepting_[i];
  return Dfa(num_states(), start_, transitions_, std::move(flipped), alphabet_);
}

namespace {

// BFS order from start; returns old->new map with npos for unreachable.
std::vector<std::size_t> bfs_order(std::size_t n, std::size_t k, std::size_t start,
                                   const auto& successor) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> order(n, npos);
  std::deque<std::size_t> queue{start};
  order[start] = 0;
  std::size_t next_id = 1;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t a = 0; a < k; ++a) {
      const std::size_t t = successor(s, a);
      if (order[t] == npos) {
        order[t] = next_id++;
        queue.push_back(t);
      }
    }
  }
  return order;
}

}  // namespace

Dfa minimize(const Dfa& dfa) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  const std::size_t k = dfa.alphabet_size();

  // Restrict to reachable states.
  const auto reach = bfs_order(dfa.num_states(), k, dfa.start(),
                               [&](std::size_t s, std::size_t a) { return dfa.next(s, a); });
  std::vector<std::size_t> states;
  for (std::size_t s = 0; s < dfa.num_states(); ++s) {
    if (reach[s] != npos) states.push_back(s);
  }
  std::sort(states.begin(), states.end(),
            [&](std::size_t a, std::size_t b) { return reach[a] < reach[b]; });
  const std::size_t n = states.size();
  std::vector<std::size_t> delta(n * k);
  std::vector<bool> accepting(n);
  for (std::size_t i = 0; i < n; ++i) {
    accepting[i] = dfa.is_accepting(states[i]);
    for (std::size_t a = 0; a < k; ++a) delta[i * k + a] = reach[dfa.next(states[i], a)];
  }

  // Reverse transitions: inverse[a][t] lists sources s with delta(s,a) = t.
  std::vector<std::vector<std::vector<std::size_t>>> inverse(
      k, std::vector<std::vector<std::size_t>>(n));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < k; ++a) inverse[a][delta[s * k + a]].push_back(s);
  }

  // Hopcroft refinement. `block_of` maps state -> block; blocks hold members.
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> block_of(n);
  {
    std::vector<std::size_t> acc, rej;
    for (std::size_t s = 0; s < n; ++s) (accepting[s] ? acc : rej).push_back(s);
    for (auto* part : {&acc, &rej}) {
      if (part->empty()) continue;
      for (std::size_t s : *part) block_of[s] = blocks.size();
      blocks.push_back(std::move(*part));
    }
  }
  std::deque<std::pair<std::size_t, std::size_t>> work;  // (block, symbol)
  std::vector<std::vector<bool>> in_work(k);
  auto push_work = [&](std::size_t b, std::size_t a) {
    if (in_work[a].size() <= b) in_work[a].resize(b + 1, false);
    if (!in_work[a][b]) {
      in_work[a][b] = true;
      work.emplace_back(b, a);
    }
  };
  if (blocks.size() == 2) {
    const std::size_t smaller = blocks[0].size() <= blocks[1].size() ? 0 : 1;
    for (std::size_t a = 0; a < k; ++a) push_work(smaller, a);
  }

  std::vector<bool> marked(n, false);
  while (!work.empty()) {
    const auto [splitter, a] = work.front();
    work.pop_front();
    in_work[a][splitter] = false;

    // Predecessors of the splitter block on symbol a.
    std::vector<std::size_t> preds;
    for (std::size_t t : blocks[splitter]) {
      for (std::size_t s : inverse[a][t]) {
        if (!marked[s]) {
          marked[s] = true;
          preds.push_back(s);
        }
      }
    }
    std::vector<std::size_t> touched;
    for (std::size_t s : preds) {
      const std::size_t b = block_of[s];
      if (std::find(touched.begin(), touched.end(), b) == touched.end()) touched.push_back(b);
    }
    for (std::size_t b : touched) {
      std::vector<std::size_t> in, out;
      for (std::size_t s : blocks[b]) (marked[s] ? in : out).push_back(s);
      if (in.empty() || out.empty()) continue;
      const std::size_t fresh = blocks.size();
      // Keep the larger half in place, give the smaller one a new block.
      auto& keep = in.size() >= out.size() ? in : out;
      auto& move = in.size() >= out.size() ? out : in;
      for (std::size_t s : move) block_of[s] = fresh;
      blocks[b] = std::move(keep);
      blocks.push_back(std::move(move));
      // Whether or not (b, c) is pending, queueing the smaller half suffices.
      for (std::size_t c = 0; c < k; ++c) push_work(fresh, c);
    }
    for (std::size_t s : preds) marked[s] = false;
  }

  // Quotient automaton, then canonical BFS renumbering.
  const std::size_t m = blocks.size();
  auto quotient_next = [&](std::size_t b, std::size_t a) {
    return block_of[delta[blocks[b].front() * k + a]];
  };
  const auto order = bfs_order(m, k, block_of[0], quotient_next);
  std::vector<Dfa::State> transitions(m * k);
  std::vector<bool> acc(m);
  for (std::size_t b = 0; b < m; ++b) {
    const std::size_t id = order[b];
    acc[id] = accepting[blocks[b].front()];
    for (std::size_t a = 0; a < k; ++a) transitions[id * k + a] = order[quotient_next(b, a)];
  }
  return Dfa(m, 0, std::move(transitions), std::move(acc), dfa.alphabet());
}

EquivalenceResult equivalent(const Dfa& a, const Dfa& b) {
  if (a.alphabet() != b.alphabet()) {
    throw InputError("cannot compare DFAs over different alphabets");
  }
  const std::size_t k = a.alphabet_size();
  const std::size_t nb = b.num_states();
  constexpr auto npos = static_cast<std::size_t>(-1);
  // parent[p] = (previous pair, symbol) for path reconstruction.
  std::vector<std::pair<std::size_t, std::size_t>> parent(a.num_states() * nb, {npos, npos});
  std::vector<bool> seen(a.num_states() * nb, false);
  const std::size_t root = a.start() * nb + b.start();
  seen[root] = true;
  std::deque<std::size_t> queue{root};
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    const std::size_t sa = p / nb;
    const std::size_t sb = p % nb;
    if (a.is_accepting(sa) != b.is_accepting(sb)) {
      std::string word;
      for (std::size_t q = p; q != root; q = parent[q].first) word.push_back(a.alphabet()[parent[q].second]);
      std::reverse(word.begin(), word.end());
      return {false, std::move(word)};
    }
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t q = a.next(sa, c) * nb + b.next(sb, c);
      if (!seen[q]) {
        seen[q] = true;
        parent[q] = {p, c};
        queue.push_back(q);
      }
    }
  }
  return {true, std::nullopt};
}

std::string to_text(const Dfa& dfa) {
  std::ostringstream out;
  out << "states " << dfa.num_states() << " start " << dfa.start() << "\n";
  out << "accepting";
  for (auto s : dfa.accepting_states()) out << ' ' << s;
  out << "\n";
  for (std::size_t s = 0; s < dfa.num_states(); ++s) {
    out << "state " << s << ":";
    for (std::size_t a = 0; a < dfa.alphabet_size(); ++a) {
      out << ' ' << dfa.alphabet()[a] << "->" << dfa.next(s, a);
    }
    out << "\n";
  }
  return out.str();
}

Dfa dfa_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& why) -> IoError { return IoError("malformed DFA text: " + why); };

  std::string line, word;
  std::size_t n = 0, start = 0;
  if (!std::getline(in, line)) throw fail("empty input");
  {
    std::istringstream header(line);
    std::string kw_states, kw_start;
    if (!(header >> kw_states >> n >> kw_start >> start) || kw_states != "states" ||
        kw_start != "start") {
      throw fail("bad header '" + line + "'");
    }
  }
  if (!std::getline(in, line)) throw fail("missing accepting line");
  std::vector<bool> accepting(n, false);
  {
    std::istringstream acc(line);
    if (!(acc >> word) || word != "accepting") throw fail("bad accepting line '" + line + "'");
    std::size_t s = 0;
    while (acc >> s) {
      if (s >= n) throw fail("accepting state out of range");
      accepting[s] = true;
    }
    if (!acc.eof()) throw fail("bad accepting line '" + line + "'");
  }

  std::string alphabet;
  std::vector<std::vector<std::pair<char, std::size_t>>> rows(n);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw fail("missing state line");
    std::istringstream row(line);
    std::string id;
    if (!(row >> word >> id) || word != "state" || id.empty() || id.back() != ':') {
      throw fail("bad state line '" + line + "'");
    }
    const std::size_t s = std::stoul(id.substr(0, id.size() - 1));
    if (s >= n || seen[s]) throw fail("state id out of range or repeated");
    seen[s] = true;
    while (row >> word) {
      const auto arrow = word.find("->");
      if (arrow != 1) throw fail("bad arc '" + word + "'");
      rows[s].emplace_back(word[0], std::stoul(word.substr(3)));
    }
    if (i == 0) {
      for (const auto& [sym, _] : rows[s]) alphabet.push_back(sym);
    }
  }
  std::vector<Dfa::State> transitions(n * alphabet.size());
  for (std::size_t s = 0; s < n; ++s) {
    if (rows[s].size() != alphabet.size()) throw fail("state " + std::to_string(s) + " is not total");
    for (std::size_t a = 0; a < alphabet.size(); ++a) {
      if (rows[s][a].first != alphabet[a]) throw fail("inconsistent symbol order");
      transitions[s * alphabet.size() + a] = rows[s][a].second;
    }
  }
  try {
    return Dfa(n, start, std::move(transitions), std::move(accepting), alphabet);
  } catch (const InputError& e) {
    throw fail(e.what());
  }
}

}  // namespace tomita
