#pragma once
// Fibers, thick/thin classification, condition (I) and the layer-by-layer
// thin-fiber deletion process over symbolic index sets.
//
// Harmonic sums always run over positive integers: a zero coordinate never
// contributes to a projection's sum 1/k.

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rt/index_set.hpp"

namespace rt {

/// E(a_1, ..., a_j): the points of E whose first j coordinates are pinned.
inline IndexSet fiber(const IndexSet& set, std::span<const Index> prefix) {
  if (prefix.size() >= set.dim()) throw ConfigError("fiber prefix must be shorter than the dimension");
  std::vector<Product> terms;
  for (const auto& t : set.terms()) {
    bool active = true;
    for (std::size_t i = 0; i < prefix.size() && active; ++i) active = t[i].contains(prefix[i]);
    if (!active) continue;
    Product p = t;
    for (std::size_t i = 0; i < prefix.size(); ++i) p[i] = Generator::finite({prefix[i]});
    terms.push_back(std::move(p));
  }
  return IndexSet(set.dim(), std::move(terms));
}

/// Thickness of the fiber at `prefix` along the next coordinate: the projection
/// onto coordinate prefix.size() meets N and has divergent harmonic sum.
inline bool is_thick(const IndexSet& set, std::span<const Index> prefix) {
  const std::size_t j = prefix.size();
  if (j >= set.dim()) throw ConfigError("fiber prefix must be shorter than the dimension");
  for (const auto& t : set.terms()) {
    bool active = true;
    for (std::size_t i = 0; i < j && active; ++i) active = t[i].contains(prefix[i]);
    if (!active || !classify(t[j]).divergent) continue;
    bool tail_nonempty = true;
    for (std::size_t i = j + 1; i < set.dim() && tail_nonempty; ++i) tail_nonempty = !classify(t[i]).empty;
    if (tail_nonempty) return true;
  }
  return false;
}

/// Layers E_n ⊇ ... ⊇ E_1 ⊇ E_0 and deleted parts F_j = E_j \ E_{j-1}.
struct Decomposition {
  std::size_t n = 0;
  std::vector<IndexSet> layers;   // layers[j] = E_j, j = 0..n
  std::vector<IndexSet> deleted;  // deleted[j - 1] = F_j, j = 1..n

  const IndexSet& E(std::size_t j) const { return layers.at(j); }
  const IndexSet& F(std::size_t j) const { return deleted.at(j - 1); }
  /// Condition (I) holds exactly when E_0 is non-empty.
  bool condition_holds = false;
};

/// Runs the thin-fiber deletion process on `set`.
inline Decomposition deletion_process(const IndexSet& set, std::size_t budget = kDefaultSymbolicBudget) {
  const std::size_t n = set.dim();
  const IndexSet one[] = {set};
  Atomization atz(one, budget);
  using TupleSet = Atomization::TupleSet;

  std::vector<TupleSet> layer(n + 1);
  layer[n] = atz.tuples(set);
  for (std::size_t j = n - 1; j >= 1; --j) {
    // Prefixes of length j whose fiber has a divergent atom at coordinate j.
    std::set<Atomization::Tuple> thick;
    for (const auto& t : layer[j + 1])
      if (atz.divergent(j, t[j])) thick.emplace(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(j));
    for (const auto& t : layer[j + 1])
      if (thick.count(Atomization::Tuple(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(j))))
        layer[j].insert(t);
  }
  bool first_divergent = false;
  for (const auto& t : layer[1]) first_divergent |= atz.divergent(0, t[0]);
  if (first_divergent) layer[0] = layer[1];

  Decomposition d;
  d.n = n;
  for (std::size_t j = 0; j <= n; ++j) d.layers.push_back(atz.to_set(layer[j]));
  for (std::size_t j = 1; j <= n; ++j) {
    TupleSet diff;
    std::set_difference(layer[j].begin(), layer[j].end(), layer[j - 1].begin(), layer[j - 1].end(),
                        std::inserter(diff, diff.end()));
    d.deleted.push_back(atz.to_set(diff));
  }
  d.condition_holds = !layer[0].empty();
  return d;
}

struct ConditionIResult {
  bool holds = false;
  /// A subset of E ∩ N^n with divergent first projection and only thick
  /// non-empty fibers; present when `holds`.
  std::optional<IndexSet> witness;
  /// The deletion process; E_0 is empty when condition (I) fails.
  Decomposition certificate;
};

inline ConditionIResult satisfies_condition_I(const IndexSet& set, std::size_t budget = kDefaultSymbolicBudget) {
  ConditionIResult r;
  r.certificate = deletion_process(set, budget);
  r.holds = r.certificate.condition_holds;
  if (r.holds) r.witness = positive_part(r.certificate.E(0));
  return r;
}

/// Checks that `witness` is contained in `set` ∩ N^n and that every non-empty
/// fiber of it is thick with divergent first projection.
inline bool verify_witness(const IndexSet& witness, const IndexSet& set,
                           std::size_t budget = kDefaultSymbolicBudget) {
  if (witness.dim() != set.dim()) return false;
  if (!is_subset(witness, set, budget)) return false;
  for (std::size_t j = 0; j < witness.dim(); ++j) {
    Product axis(witness.dim(), CoordSet::full());
    axis[j] = Generator::finite({0});
    if (!is_empty(intersect(witness, IndexSet(witness.dim(), {axis}), budget), budget)) return false;
  }
  const auto d = deletion_process(witness, budget);
  return d.condition_holds && same_set(d.E(0), witness, budget);
}

struct LocatedSet {
  std::size_t index = 0;  // 0-based position in the input list
  IndexSet witness;
};

/// Given sets whose union satisfies condition (I), returns the first one that
/// satisfies it on its own together with a witness.
inline LocatedSet locate_condition_I(std::span<const IndexSet> sets, std::size_t budget = kDefaultSymbolicBudget) {
  if (sets.empty()) throw ConfigError("locate_condition_I needs at least one set");
  IndexSet all = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) {
    std::vector<Product> terms = all.terms();
    if (sets[i].dim() != all.dim()) throw ConfigError("index sets have different dimensions");
    terms.insert(terms.end(), sets[i].terms().begin(), sets[i].terms().end());
    all = IndexSet(all.dim(), std::move(terms));
  }
  if (!satisfies_condition_I(all, budget).holds)
    throw ConfigError("precondition failed: the union does not satisfy condition (I)");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto r = satisfies_condition_I(sets[i], budget);
    if (r.holds) return {i, *r.witness};
  }
  throw NumericError("no member satisfies condition (I) although the union does");
}

}  // namespace rt
