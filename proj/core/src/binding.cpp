#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "folreward/le_metric.hpp"
#include "truth_table.hpp"
#include "utf8.hpp"

namespace folreward {

const char* to_string(LeMode mode) noexcept { return mode == LeMode::Original ? "original" : "optimized"; }

LeMode parse_le_mode(std::string_view text) {
  if (text == "original") return LeMode::Original;
  if (text == "optimized") return LeMode::Optimized;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

BindingMap BindingMap::identity(const std::vector<AtomicUnit>& prediction, const std::vector<AtomicUnit>& reference) {
  BindingMap map;
  std::vector<bool> used(reference.size(), false);
  for (const auto& p : prediction) {
    auto it = std::find(reference.begin(), reference.end(), p);
    if (it == reference.end()) {
      map.unbound_prediction.push_back(p);
      continue;
    }
    used[static_cast<std::size_t>(it - reference.begin())] = true;
    map.pairs.emplace_back(p, *it);
  }
  for (std::size_t j = 0; j < reference.size(); ++j) {
    if (!used[j]) map.unbound_reference.push_back(reference[j]);
  }
  return map;
}

bool BindingMap::injective() const {
  std::set<std::string> from;
  std::set<std::string> to;
  for (const auto& [p, r] : pairs) {
    if (!from.insert(p.canonical_text).second) return false;
    if (!to.insert(r.canonical_text).second) return false;
  }
  return true;
}

namespace {

BindingMap to_binding(const std::vector<AtomicUnit>& pa, const std::vector<AtomicUnit>& ra,
                      const std::vector<int>& target) {
  BindingMap map;
  std::vector<bool> used(ra.size(), false);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (target[i] < 0) {
      map.unbound_prediction.push_back(pa[i]);
    } else {
      used[static_cast<std::size_t>(target[i])] = true;
      map.pairs.emplace_back(pa[i], ra[static_cast<std::size_t>(target[i])]);
    }
  }
  for (std::size_t j = 0; j < ra.size(); ++j) {
    if (!used[j]) map.unbound_reference.push_back(ra[j]);
  }
  return map;
}

using DistanceTable = std::vector<std::vector<std::size_t>>;

// With `edges` given only those pairs are filled in; the rest stay 0 and must
// never be bound.
DistanceTable distances(const std::vector<AtomicUnit>& pa, const std::vector<AtomicUnit>& ra,
                        const std::vector<CandidateEdge>* edges = nullptr) {
  auto decode = [](const std::vector<AtomicUnit>& atoms) {
    std::vector<std::u32string> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(detail::decode_utf8(a.canonical_text));
    return out;
  };
  const auto ps = decode(pa);
  const auto rs = decode(ra);
  DistanceTable d(pa.size(), std::vector<std::size_t>(ra.size()));
  if (edges) {
    for (const auto& e : *edges) d[e.prediction][e.reference] = levenshtein(ps[e.prediction], rs[e.reference]);
    return d;
  }
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < ra.size(); ++j) d[i][j] = levenshtein(ps[i], rs[j]);
  }
  return d;
}

std::size_t total_distance(const DistanceTable& d, const std::vector<int>& target) {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] >= 0) sum += d[i][static_cast<std::size_t>(target[i])];
  }
  return sum;
}

// Keeps the best scored binding: higher score, then smaller distance; the
// earlier candidate wins exact ties.
class BestTracker {
 public:
  BestTracker(const detail::PropositionalScorer& scorer, const DistanceTable& d, std::size_t max_atoms)
      : scorer_(scorer), distances_(d), max_atoms_(max_atoms) {}

  void offer(const std::vector<int>& target) {
    const auto r = scorer_.score(target, max_atoms_);
    ++explored_;
    rows_ += r.rows;
    const std::size_t dist = total_distance(distances_, target);
    if (!has_best_ || r.score > score_ || (r.score == score_ && dist < distance_)) {
      has_best_ = true;
      score_ = r.score;
      distance_ = dist;
      variables_ = r.variables;
      best_ = target;
    }
  }

  BindingResult result(bool truncated) const {
    BindingResult out;
    out.binding = to_binding(scorer_.prediction_atoms(), scorer_.reference_atoms(), best_);
    out.score = score_;
    out.total_distance = distance_;
    out.bindings_explored = explored_;
    out.assignments_evaluated = rows_;
    out.atom_count = variables_;
    out.truncated = truncated;
    return out;
  }

  std::size_t explored() const { return explored_; }

 private:
  const detail::PropositionalScorer& scorer_;
  const DistanceTable& distances_;
  std::size_t max_atoms_;
  bool has_best_ = false;
  double score_ = 0.0;
  std::size_t distance_ = 0;
  std::size_t variables_ = 0;
  std::vector<int> best_;
  std::size_t explored_ = 0;
  std::size_t rows_ = 0;
};

}  // namespace

BindingResult bind_original(const FolExpr& prediction, const FolExpr& reference, const LeLimits& limits) {
  detail::PropositionalScorer scorer(prediction, reference);
  const auto& pa = scorer.prediction_atoms();
  const auto& ra = scorer.reference_atoms();
  const std::size_t largest = std::max(pa.size(), ra.size());
  if (largest > limits.max_factorial_atoms) {
    throw CapExceeded(CapExceeded::Which::FactorialAtoms, limits.max_factorial_atoms, largest);
  }

  const DistanceTable d = distances(pa, ra);
  std::vector<std::vector<int>> order(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    order[i].resize(ra.size());
    std::iota(order[i].begin(), order[i].end(), 0);
    std::stable_sort(order[i].begin(), order[i].end(), [&](int a, int b) {
      return d[i][static_cast<std::size_t>(a)] < d[i][static_cast<std::size_t>(b)];
    });
  }

  // Maximal matchings: every atom on the smaller side is bound.
  const std::size_t must_skip = pa.size() > ra.size() ? pa.size() - ra.size() : 0;
  BestTracker best(scorer, d, limits.max_atoms);
  std::vector<int> target(pa.size(), -1);
  std::vector<bool> used(ra.size(), false);
  std::size_t skipped = 0;

  auto dfs = [&](auto&& self, std::size_t i) -> void {
    if (i == pa.size()) {
      best.offer(target);
      return;
    }
    for (int j : order[i]) {
      if (used[static_cast<std::size_t>(j)]) continue;
      used[static_cast<std::size_t>(j)] = true;
      target[i] = j;
      self(self, i + 1);
      used[static_cast<std::size_t>(j)] = false;
    }
    target[i] = -1;
    if (skipped < must_skip) {
      ++skipped;
      self(self, i + 1);
      --skipped;
    }
  };
  dfs(dfs, 0);
  return best.result(false);
}

CandidateGraph build_candidate_graph(const std::vector<AtomicUnit>& prediction,
                                     const std::vector<AtomicUnit>& reference, const LeConfig& config) {
  CandidateGraph graph;
  const double threshold = config.similarity.threshold;
  if (config.similarity_fn) {
    for (std::size_t i = 0; i < prediction.size(); ++i) {
      for (std::size_t j = 0; j < reference.size(); ++j) {
        const double s = config.similarity_fn(prediction[i].canonical_text, reference[j].canonical_text);
        if (s >= threshold) graph.edges.push_back({i, j, s});
      }
    }
  } else {
    graph.edges.reserve(prediction.size() * reference.size());
    std::vector<NgramProfile> rp;
    rp.reserve(reference.size());
    for (const auto& r : reference) rp.emplace_back(r.canonical_text, config.similarity);
    for (std::size_t i = 0; i < prediction.size(); ++i) {
      const NgramProfile pp(prediction[i].canonical_text, config.similarity);
      for (std::size_t j = 0; j < reference.size(); ++j) {
        const double s = cosine(pp, rp[j]);
        if (s >= threshold) graph.edges.push_back({i, j, s});
      }
    }
  }

  // Union-find over prediction nodes [0, n_p) and reference nodes [n_p, n_p + n_r).
  const std::size_t np = prediction.size();
  std::vector<std::size_t> parent(np + reference.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : graph.edges) parent[find(e.prediction)] = find(np + e.reference);

  std::vector<int> component_of(parent.size(), -1);
  for (const auto& e : graph.edges) {
    const std::size_t root = find(e.prediction);
    if (component_of[root] < 0) {
      component_of[root] = static_cast<int>(graph.components.size());
      graph.components.emplace_back();
    }
    graph.components[static_cast<std::size_t>(component_of[root])].edges.push_back(e);
  }
  for (auto& c : graph.components) {
    for (const auto& e : c.edges) {
      c.prediction.push_back(e.prediction);
      c.reference.push_back(e.reference);
    }
    for (auto* side : {&c.prediction, &c.reference}) {
      std::sort(side->begin(), side->end());
      side->erase(std::unique(side->begin(), side->end()), side->end());
    }
  }
  return graph;
}

namespace {

using Assignment = std::vector<std::pair<std::size_t, int>>;  // (prediction atom, reference atom or -1)

// Maximal injective assignments inside one component: nothing is left
// unbound while one of its candidates is still free.
std::vector<Assignment> component_assignments(const CandidateComponent& c, std::size_t cap, bool& truncated) {
  std::vector<std::vector<std::pair<double, std::size_t>>> options(c.prediction.size());
  for (std::size_t k = 0; k < c.prediction.size(); ++k) {
    for (const auto& e : c.edges) {
      if (e.prediction == c.prediction[k]) options[k].emplace_back(e.similarity, e.reference);
    }
    std::stable_sort(options[k].begin(), options[k].end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
  }

  std::vector<Assignment> out;
  Assignment current(c.prediction.size());
  std::vector<bool> used(*std::max_element(c.reference.begin(), c.reference.end()) + 1, false);
  auto dfs = [&](auto&& self, std::size_t k) -> bool {
    if (k == c.prediction.size()) {
      for (std::size_t m = 0; m < current.size(); ++m) {
        if (current[m].second >= 0) continue;
        for (const auto& [s, j] : options[m]) {
          if (!used[j]) return true;  // not maximal
        }
      }
      if (out.size() >= cap) {
        truncated = true;
        return false;
      }
      out.push_back(current);
      return true;
    }
    for (const auto& [s, j] : options[k]) {
      if (used[j]) continue;
      used[j] = true;
      current[k] = {c.prediction[k], static_cast<int>(j)};
      const bool more = self(self, k + 1);
      used[j] = false;
      if (!more) return false;
    }
    current[k] = {c.prediction[k], -1};
    return self(self, k + 1);
  };
  dfs(dfs, 0);
  return out;
}

}  // namespace

BindingResult bind_optimized(const FolExpr& prediction, const FolExpr& reference, const LeConfig& config) {
  detail::PropositionalScorer scorer(prediction, reference);
  const auto& pa = scorer.prediction_atoms();
  const auto& ra = scorer.reference_atoms();
  const CandidateGraph graph = build_candidate_graph(pa, ra, config);
  const DistanceTable d = distances(pa, ra, &graph.edges);
  const std::size_t cap = config.limits.component_cap;

  std::vector<int> target(pa.size(), -1);
  bool truncated = false;
  std::vector<std::vector<Assignment>> choices;
  for (const auto& c : graph.components) {
    if (!c.one_to_many()) {
      target[c.prediction.front()] = static_cast<int>(c.reference.front());
      continue;
    }
    choices.push_back(component_assignments(c, cap, truncated));
  }

  BestTracker best(scorer, d, config.limits.max_atoms);
  std::vector<std::size_t> pick(choices.size(), 0);
  for (;;) {
    if (best.explored() >= cap) {
      truncated = true;
      break;
    }
    for (std::size_t k = 0; k < choices.size(); ++k) {
      for (const auto& [i, j] : choices[k][pick[k]]) target[i] = j;
    }
    best.offer(target);
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  return best.result(truncated);
}

}  // namespace folreward
