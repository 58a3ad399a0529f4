#pragma once
// Decidable subsets of N_0^n: finite unions of products whose coordinate sets
// are intersections of basic generators and their complements.
//
// Basic generators (all subsets of N_0 = {0,1,2,...}):
//   FIN(a,b,...)  finite list
//   AP(s,d)       {s + i d : i >= 0}, s >= 1, d >= 1
//   GEO(b)        {b^i : i >= 0},     b >= 2
//   POW(e)        {i^e : i >= 1},     e >= 2
//   FULL          N_0
// Divergence of sum 1/k over a generator is fixed by its class: FULL and AP
// diverge, FIN, GEO and POW converge. Emptiness and divergence of any
// intersection of literals is decided exactly by `classify`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rt/error.hpp"
#include "rt/multi_index.hpp"

namespace rt {

namespace detail {

using u128 = unsigned __int128;

/// Hard cap on residue scans and moduli in the decision procedures.
inline constexpr Index kScanLimit = 20'000'000;

inline Index checked_lcm(Index a, Index b) {
  const Index g = std::gcd(a, b);
  const __int128 l = static_cast<__int128>(a / g) * b;
  if (l > kScanLimit) throw SymbolicBudgetExceeded("period of index-set literals exceeds scan limit");
  return static_cast<Index>(l);
}

/// base^exp, saturating at `cap` (returns cap when the true value is >= cap).
inline Index saturating_pow(Index base, Index exp, Index cap = std::numeric_limits<Index>::max()) {
  __int128 r = 1;
  for (Index i = 0; i < exp; ++i) {
    r *= base;
    if (r >= cap) return cap;
  }
  return static_cast<Index>(r);
}

inline Index mod_pow(Index base, Index exp, Index mod) {
  if (mod == 1) return 0;
  u128 result = 1;
  u128 b = static_cast<u128>(base % mod);
  while (exp > 0) {
    if (exp & 1) result = result * b % static_cast<u128>(mod);
    b = b * b % static_cast<u128>(mod);
    exp >>= 1;
  }
  return static_cast<Index>(result);
}

/// Largest r with r^e <= x (x >= 0, e >= 1).
inline Index integer_root(Index x, Index e) {
  if (x < 2 || e == 1) return x;
  Index r = static_cast<Index>(std::llround(std::pow(static_cast<double>(x), 1.0 / static_cast<double>(e))));
  while (r > 0 && saturating_pow(r, e) > x) --r;
  while (saturating_pow(r + 1, e) <= x) ++r;
  return r;
}

inline std::map<Index, Index> factorize(Index x) {
  std::map<Index, Index> f;
  for (Index p = 2; p * p <= x; ++p)
    while (x % p == 0) {
      ++f[p];
      x /= p;
    }
  if (x > 1) ++f[x];
  return f;
}

/// Inverse of a modulo mod (gcd(a, mod) == 1, mod >= 1).
inline Index mod_inverse(Index a, Index mod) {
  if (mod == 1) return 0;
  __int128 r0 = mod, r1 = ((a % mod) + mod) % mod, x0 = 0, x1 = 1;
  while (r1 != 0) {
    const __int128 q = r0 / r1;
    __int128 t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
  }
  return static_cast<Index>(((x0 % mod) + mod) % mod);
}

/// Least x >= floor with x = s1 (mod m1) and x = s2 (mod m2); false when none.
inline bool crt_merge(Index s1, Index m1, Index s2, Index m2, Index floor, Index& s_out, Index& m_out) {
  const Index g = std::gcd(m1, m2);
  if ((s2 - s1) % g != 0) return false;
  const Index mod = m2 / g;
  const Index rhs = (((s2 - s1) / g) % mod + mod) % mod;
  const Index t = static_cast<Index>(static_cast<__int128>(rhs) * mod_inverse(m1 / g, mod) % mod);
  const Index l = checked_lcm(m1, m2);
  __int128 x = (static_cast<__int128>(s1) + static_cast<__int128>(m1) * t) % l;
  if (x < 0) x += l;
  if (x < floor) x += ((floor - x + l - 1) / l) * l;
  s_out = static_cast<Index>(x);
  m_out = l;
  return true;
}

}  // namespace detail

enum class GeneratorKind { Finite, Arithmetic, Geometric, Power, Full };

/// One of the basic per-coordinate generator sets.
class Generator {
 public:
  static Generator finite(std::vector<Index> values) {
    for (Index v : values)
      if (v < 0) throw ConfigError("FIN entries must be non-negative");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    Generator g(GeneratorKind::Finite);
    g.values_ = std::move(values);
    return g;
  }
  static Generator arithmetic(Index start, Index step) {
    if (start < 1 || step < 1) throw ConfigError("AP requires start >= 1 and step >= 1");
    Generator g(GeneratorKind::Arithmetic);
    g.a_ = start;
    g.b_ = step;
    return g;
  }
  static Generator geometric(Index base) {
    if (base < 2) throw ConfigError("GEO requires base >= 2");
    Generator g(GeneratorKind::Geometric);
    g.a_ = base;
    return g;
  }
  static Generator power(Index exponent) {
    if (exponent < 2) throw ConfigError("POW requires exponent >= 2");
    Generator g(GeneratorKind::Power);
    g.a_ = exponent;
    return g;
  }
  static Generator full() { return Generator(GeneratorKind::Full); }

  GeneratorKind kind() const noexcept { return kind_; }
  const std::vector<Index>& values() const noexcept { return values_; }
  Index start() const noexcept { return a_; }
  Index step() const noexcept { return b_; }
  Index base() const noexcept { return a_; }
  Index exponent() const noexcept { return a_; }

  /// Divergence of sum 1/k over the generator's positive elements.
  bool divergent() const noexcept {
    return kind_ == GeneratorKind::Full || kind_ == GeneratorKind::Arithmetic;
  }

  bool contains(Index x) const {
    if (x < 0) return false;
    switch (kind_) {
      case GeneratorKind::Finite:
        return std::binary_search(values_.begin(), values_.end(), x);
      case GeneratorKind::Arithmetic:
        return x >= a_ && (x - a_) % b_ == 0;
      case GeneratorKind::Geometric:
        if (x < 1) return false;
        while (x % a_ == 0) x /= a_;
        return x == 1;
      case GeneratorKind::Power: {
        if (x < 1) return false;
        const Index r = detail::integer_root(x, a_);
        return detail::saturating_pow(r, a_) == x;
      }
      case GeneratorKind::Full:
        return true;
    }
    return false;
  }

  std::string to_string() const {
    switch (kind_) {
      case GeneratorKind::Finite: {
        std::string s = "FIN(";
        for (std::size_t i = 0; i < values_.size(); ++i) s += (i ? "," : "") + std::to_string(values_[i]);
        return s + ")";
      }
      case GeneratorKind::Arithmetic:
        return "AP(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
      case GeneratorKind::Geometric:
        return "GEO(" + std::to_string(a_) + ")";
      case GeneratorKind::Power:
        return "POW(" + std::to_string(a_) + ")";
      case GeneratorKind::Full:
        return "FULL";
    }
    return "?";
  }

  friend bool operator==(const Generator&, const Generator&) = default;
  friend auto operator<=>(const Generator&, const Generator&) = default;

 private:
  explicit Generator(GeneratorKind k) : kind_(k) {}
  GeneratorKind kind_;
  Index a_ = 0;
  Index b_ = 0;
  std::vector<Index> values_;
};

/// Intersection of generators and complements of generators, inside N_0.
class CoordSet {
 public:
  CoordSet() = default;
  /* implicit */ CoordSet(Generator g) { include_.push_back(std::move(g)); }
  CoordSet(std::vector<Generator> include, std::vector<Generator> exclude)
      : include_(std::move(include)), exclude_(std::move(exclude)) {
    normalize();
  }

  static CoordSet full() { return CoordSet(Generator::full()); }

  const std::vector<Generator>& include() const noexcept { return include_; }
  const std::vector<Generator>& exclude() const noexcept { return exclude_; }

  bool contains(Index x) const {
    if (x < 0) return false;
    for (const auto& g : include_)
      if (!g.contains(x)) return false;
    for (const auto& g : exclude_)
      if (g.contains(x)) return false;
    return true;
  }

  CoordSet intersect(const CoordSet& o) const {
    auto inc = include_;
    auto exc = exclude_;
    inc.insert(inc.end(), o.include_.begin(), o.include_.end());
    exc.insert(exc.end(), o.exclude_.begin(), o.exclude_.end());
    return CoordSet(std::move(inc), std::move(exc));
  }

  std::string to_string() const {
    std::string s;
    for (const auto& g : include_) s += (s.empty() ? "" : " & ") + g.to_string();
    for (const auto& g : exclude_) s += (s.empty() ? "!" : " & !") + g.to_string();
    if (s.empty()) return "FULL";
    return s;
  }

  friend bool operator==(const CoordSet&, const CoordSet&) = default;
  friend auto operator<=>(const CoordSet&, const CoordSet&) = default;

 private:
  void normalize() {
    auto tidy = [](std::vector<Generator>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    tidy(include_);
    tidy(exclude_);
    if (include_.size() > 1)
      std::erase_if(include_, [](const Generator& g) { return g.kind() == GeneratorKind::Full; });
  }

  std::vector<Generator> include_;
  std::vector<Generator> exclude_;
};

struct CoordClass {
  bool empty = true;
  bool divergent = false;  // sum of 1/k over the positive elements is infinite
};

namespace detail {

struct Literal {
  const Generator* gen;
  bool positive;
};

/// Truth of "b^i in literal" is eventually periodic in i; describes it.
struct GeoLiteralPattern {
  Index preperiod = 0;
  Index period = 1;
  bool only_zero = false;  // holds for i == 0 only
};

inline CoordClass enumerate_below(const CoordSet& cube, Index limit) {
  if (limit > kScanLimit) throw SymbolicBudgetExceeded("index-set enumeration exceeds scan limit");
  for (Index x = 0; x < limit; ++x)
    if (cube.contains(x)) return {false, false};
  return {true, false};
}

// Positive literals are AP/FULL only.
inline CoordClass classify_periodic(const CoordSet& cube) {
  Index s = 0, m = 1;
  for (const auto& g : cube.include()) {
    if (g.kind() == GeneratorKind::Full) continue;
    Index ns, nm;
    if (!crt_merge(s, m, g.start(), g.step(), std::max(s, g.start()), ns, nm)) return {true, false};
    s = ns;
    m = nm;
  }
  Index floor = s, period = m;
  for (const auto& g : cube.exclude())
    if (g.kind() == GeneratorKind::Arithmetic) {
      floor = std::max(floor, g.start());
      period = checked_lcm(period, g.step());
    }
  for (Index x = floor; x < floor + period; ++x) {
    if (x < s || (x - s) % m != 0) continue;
    bool hit = true;
    for (const auto& g : cube.exclude())
      if (g.kind() == GeneratorKind::Arithmetic && g.contains(x)) {
        hit = false;
        break;
      }
    // Remaining exclusions (FIN/GEO/POW) have density zero and convergent
    // reciprocal sums, so an infinite residue class survives them.
    if (hit) return {false, true};
  }
  return enumerate_below(cube, floor);
}

// Positive POW literals present, no FIN/GEO positives.
inline CoordClass classify_power(const CoordSet& cube) {
  Index L = 1;
  for (const auto& g : cube.include())
    if (g.kind() == GeneratorKind::Power) L = checked_lcm(L, g.exponent());
  for (const auto& g : cube.exclude())
    if (g.kind() == GeneratorKind::Power && L % g.exponent() == 0) return {true, false};
  Index max_start = 0, period = 1;
  auto note_ap = [&](const Generator& g) {
    max_start = std::max(max_start, g.start());
    period = checked_lcm(period, g.step());
  };
  for (const auto& g : cube.include())
    if (g.kind() == GeneratorKind::Arithmetic) note_ap(g);
  for (const auto& g : cube.exclude())
    if (g.kind() == GeneratorKind::Arithmetic) note_ap(g);
  Index j0 = 1;
  while (saturating_pow(j0, L, max_start + 1) < max_start) ++j0;
  auto ap_ok = [&](Index j) {
    for (const auto& g : cube.include())
      if (g.kind() == GeneratorKind::Arithmetic &&
          mod_pow(j, L, g.step()) != ((g.start() % g.step())))
        return false;
    for (const auto& g : cube.exclude())
      if (g.kind() == GeneratorKind::Arithmetic && mod_pow(j, L, g.step()) == (g.start() % g.step()))
        return false;
    return true;
  };
  for (Index j = j0; j < j0 + period; ++j)
    if (ap_ok(j)) return {false, false};
  for (Index j = 1; j < j0; ++j)
    if (cube.contains(saturating_pow(j, L))) return {false, false};
  return {true, false};
}

inline GeoLiteralPattern geo_pattern(Index b, const Generator& g, const std::map<Index, Index>& fb) {
  switch (g.kind()) {
    case GeneratorKind::Full:
      return {0, 1};
    case GeneratorKind::Finite: {
      Index i = 0;
      const Index hi = g.values().empty() ? 0 : g.values().back();
      while (saturating_pow(b, i, hi + 1) <= hi) ++i;
      return {i + 1, 1};
    }
    case GeneratorKind::Arithmetic: {
      Index threshold = 0;
      while (saturating_pow(b, threshold, g.start() + 1) < g.start()) ++threshold;
      std::map<Index, Index> seen;
      Index r = 1 % g.step();
      for (Index i = 0;; ++i) {
        auto [it, inserted] = seen.emplace(r, i);
        if (!inserted) return {std::max(it->second, threshold), i - it->second};
        if (i > kScanLimit) throw SymbolicBudgetExceeded("residue cycle exceeds scan limit");
        r = static_cast<Index>(static_cast<__int128>(r) * b % g.step());
      }
    }
    case GeneratorKind::Geometric: {
      const auto fc = factorize(g.base());
      // b^i = c^j needs proportional exponent vectors: q v(b) = p v(c).
      if (fb.size() != fc.size()) return {1, 1, true};
      Index p = 0, q = 0;
      for (const auto& [prime, vb] : fb) {
        auto it = fc.find(prime);
        if (it == fc.end()) return {1, 1, true};
        const Index vc = it->second;
        const Index gg = std::gcd(vb, vc);
        if (p == 0) {
          p = vb / gg;
          q = vc / gg;
        } else if (p != vb / gg || q != vc / gg) {
          return {1, 1, true};
        }
      }
      // b^i = c^j with j = i p / q: period q.
      return {0, q};
    }
    case GeneratorKind::Power: {
      Index G = 0;
      for (const auto& [prime, v] : fb) G = std::gcd(G, v);
      return {0, g.exponent() / std::gcd(g.exponent(), G)};
    }
  }
  return {0, 1};
}

inline bool geo_literal_holds(Index b, Index i, const Generator& g, const GeoLiteralPattern& pat) {
  switch (g.kind()) {
    case GeneratorKind::Full:
      return true;
    case GeneratorKind::Finite: {
      const Index hi = g.values().empty() ? 0 : g.values().back();
      const Index v = saturating_pow(b, i, hi + 1);
      return v <= hi && g.contains(v);
    }
    case GeneratorKind::Arithmetic:
      return saturating_pow(b, i, g.start() + 1) >= g.start() &&
             mod_pow(b, i, g.step()) == g.start() % g.step();
    case GeneratorKind::Geometric:
    case GeneratorKind::Power:
      return pat.only_zero ? i == 0 : i % pat.period == 0;
  }
  return false;
}

// A positive GEO literal is present: scan exponents i of b^i.
inline CoordClass classify_geometric(const CoordSet& cube) {
  const Generator* chosen = nullptr;
  for (const auto& g : cube.include())
    if (g.kind() == GeneratorKind::Geometric) {
      chosen = &g;
      break;
    }
  const Index b = chosen->base();
  const auto fb = factorize(b);
  std::vector<Literal> lits;
  for (const auto& g : cube.include())
    if (&g != chosen) lits.push_back({&g, true});
  for (const auto& g : cube.exclude()) lits.push_back({&g, false});
  Index pre = 0, period = 1;
  std::vector<GeoLiteralPattern> pats;
  for (const auto& l : lits) {
    pats.push_back(geo_pattern(b, *l.gen, fb));
    pre = std::max(pre, pats.back().preperiod);
    period = checked_lcm(period, pats.back().period);
  }
  if (pre + period > kScanLimit) throw SymbolicBudgetExceeded("geometric scan exceeds scan limit");
  for (Index i = 0; i < pre + period; ++i) {
    bool ok = true;
    for (std::size_t q = 0; q < lits.size(); ++q)
      if (geo_literal_holds(b, i, *lits[q].gen, pats[q]) != lits[q].positive) {
        ok = false;
        break;
      }
    if (ok) return {false, false};
  }
  return {true, false};
}

}  // namespace detail

/// Exact emptiness and harmonic divergence of a coordinate set.
inline CoordClass classify(const CoordSet& cube) {
  for (const auto& g : cube.exclude())
    if (g.kind() == GeneratorKind::Full) return {true, false};
  const Generator* finite = nullptr;
  bool has_geo = false, has_pow = false;
  for (const auto& g : cube.include()) {
    if (g.kind() == GeneratorKind::Finite && (!finite || g.values().size() < finite->values().size()))
      finite = &g;
    has_geo |= g.kind() == GeneratorKind::Geometric;
    has_pow |= g.kind() == GeneratorKind::Power;
  }
  if (finite) {
    for (Index v : finite->values())
      if (cube.contains(v)) return {false, false};
    return {true, false};
  }
  if (has_geo) return detail::classify_geometric(cube);
  if (has_pow) return detail::classify_power(cube);
  return detail::classify_periodic(cube);
}

using Product = std::vector<CoordSet>;

/// Finite union of product sets in N_0^n.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::size_t n) : n_(n) {
    if (n == 0) throw ConfigError("index set dimension must be at least 1");
  }
  IndexSet(std::size_t n, std::vector<Product> terms) : n_(n), terms_(std::move(terms)) {
    if (n == 0) throw ConfigError("index set dimension must be at least 1");
    for (const auto& t : terms_)
      if (t.size() != n_) throw ConfigError("product term has wrong dimension");
  }

  static IndexSet full(std::size_t n) { return IndexSet(n, {Product(n, CoordSet::full())}); }
  static IndexSet empty_set(std::size_t n) { return IndexSet(n); }

  std::size_t dim() const noexcept { return n_; }
  const std::vector<Product>& terms() const noexcept { return terms_; }

  bool contains(std::span<const Index> point) const {
    if (point.size() != n_) throw ConfigError("membership query has wrong dimension");
    for (const auto& t : terms_) {
      bool in = true;
      for (std::size_t j = 0; j < n_ && in; ++j) in = t[j].contains(point[j]);
      if (in) return true;
    }
    return false;
  }
  bool contains(const MultiIndex& k) const { return contains(k.entries()); }

  /// Textual form accepted by parse_index_set.
  std::string to_string() const {
    if (terms_.empty()) return "EMPTY(" + std::to_string(n_) + ")";
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) s += " | ";
      for (std::size_t j = 0; j < n_; ++j) {
        if (j) s += " x ";
        const auto& c = terms_[i][j];
        const bool compound = c.include().size() + c.exclude().size() > 1;
        s += compound ? "(" + c.to_string() + ")" : c.to_string();
      }
    }
    return s;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Product> terms_;
};

inline constexpr std::size_t kDefaultSymbolicBudget = 4096;

/// Partition of each coordinate into the atoms of the Boolean algebra spanned
/// by every generator that appears there. Sets become finite sets of atom
/// tuples, on which union, intersection and difference are exact.
class Atomization {
 public:
  using Tuple = std::vector<std::uint32_t>;
  using TupleSet = std::set<Tuple>;

  struct Atom {
    std::uint32_t mask = 0;  // bit i set: inside generator i of this coordinate
    CoordSet cube;
    CoordClass cls;
  };

  Atomization(std::span<const IndexSet> sets, std::size_t budget = kDefaultSymbolicBudget)
      : budget_(budget) {
    if (sets.empty()) throw ConfigError("atomization needs at least one set");
    n_ = sets.front().dim();
    gens_.resize(n_);
    for (const auto& s : sets) {
      if (s.dim() != n_) throw ConfigError("index sets have different dimensions");
      for (const auto& t : s.terms())
        for (std::size_t j = 0; j < n_; ++j) {
          for (const auto& g : t[j].include()) add_generator(j, g);
          for (const auto& g : t[j].exclude()) add_generator(j, g);
        }
    }
    atoms_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t k = gens_[j].size();
      if (k > 12) throw SymbolicBudgetExceeded("decomposition exceeds symbolic budget");
      for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<Generator> inc, exc;
        for (std::size_t i = 0; i < k; ++i) ((mask >> i) & 1u ? inc : exc).push_back(gens_[j][i]);
        CoordSet cube(inc, exc);
        const CoordClass cls = classify(cube);
        if (!cls.empty) atoms_[j].push_back({mask, std::move(cube), cls});
      }
    }
  }

  std::size_t dim() const noexcept { return n_; }
  const std::vector<Atom>& atoms(std::size_t coord) const { return atoms_.at(coord); }
  bool divergent(std::size_t coord, std::uint32_t atom) const { return atoms_[coord][atom].cls.divergent; }

  TupleSet tuples(const IndexSet& s) const {
    TupleSet out;
    for (const auto& term : s.terms()) {
      std::vector<std::vector<std::uint32_t>> covered(n_);
      std::size_t count = 1;
      for (std::size_t j = 0; j < n_; ++j) {
        for (std::uint32_t a = 0; a < atoms_[j].size(); ++a)
          if (covers(j, term[j], atoms_[j][a].mask)) covered[j].push_back(a);
        count *= covered[j].size();
        if (count > budget_) throw SymbolicBudgetExceeded("decomposition exceeds symbolic budget");
      }
      if (count == 0) continue;
      Tuple t(n_, 0);
      std::vector<std::size_t> pos(n_, 0);
      while (true) {
        for (std::size_t j = 0; j < n_; ++j) t[j] = covered[j][pos[j]];
        out.insert(t);
        if (out.size() > budget_) throw SymbolicBudgetExceeded("decomposition exceeds symbolic budget");
        std::size_t j = n_;
        bool done = true;
        while (j > 0) {
          --j;
          if (++pos[j] < covered[j].size()) {
            done = false;
            break;
          }
          pos[j] = 0;
        }
        if (done) break;
      }
    }
    return out;
  }

  TupleSet universe() const { return tuples(IndexSet::full(n_)); }

  IndexSet to_set(const TupleSet& ts) const {
    std::vector<Product> terms;
    terms.reserve(ts.size());
    for (const auto& t : ts) {
      Product p(n_);
      for (std::size_t j = 0; j < n_; ++j) p[j] = display_cube(j, t[j]);
      terms.push_back(std::move(p));
    }
    return IndexSet(n_, std::move(terms));
  }

 private:
  void add_generator(std::size_t j, const Generator& g) {
    if (std::find(gens_[j].begin(), gens_[j].end(), g) == gens_[j].end()) gens_[j].push_back(g);
  }

  std::size_t gen_index(std::size_t j, const Generator& g) const {
    return static_cast<std::size_t>(std::find(gens_[j].begin(), gens_[j].end(), g) - gens_[j].begin());
  }

  bool covers(std::size_t j, const CoordSet& c, std::uint32_t mask) const {
    for (const auto& g : c.include())
      if (!((mask >> gen_index(j, g)) & 1u)) return false;
    for (const auto& g : c.exclude())
      if ((mask >> gen_index(j, g)) & 1u) return false;
    return true;
  }

  // Atom cube with literals dropped when they do not change the set.
  CoordSet display_cube(std::size_t j, std::uint32_t a) const {
    const CoordSet& cube = atoms_[j][a].cube;
    std::vector<Generator> inc = cube.include();
    std::vector<Generator> kept;
    for (const auto& g : cube.exclude()) {
      // g matters only if it meets the included part.
      auto probe = inc;
      probe.push_back(g);
      if (!classify(CoordSet(probe, {})).empty) kept.push_back(g);
    }
    return CoordSet(std::move(inc), std::move(kept));
  }

  std::size_t n_ = 0;
  std::size_t budget_;
  std::vector<std::vector<Generator>> gens_;
  std::vector<std::vector<Atom>> atoms_;
};

namespace detail {

template <class Op>
IndexSet combine(const IndexSet& a, const IndexSet& b, Op op, std::size_t budget) {
  const IndexSet both[] = {a, b};
  Atomization atz(both, budget);
  const auto ta = atz.tuples(a);
  const auto tb = atz.tuples(b);
  Atomization::TupleSet out;
  op(ta, tb, out);
  return atz.to_set(out);
}

}  // namespace detail

inline IndexSet unite(const IndexSet& a, const IndexSet& b, std::size_t budget = kDefaultSymbolicBudget) {
  return detail::combine(a, b, [](const auto& x, const auto& y, auto& out) {
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::inserter(out, out.end()));
  }, budget);
}

inline IndexSet intersect(const IndexSet& a, const IndexSet& b, std::size_t budget = kDefaultSymbolicBudget) {
  return detail::combine(a, b, [](const auto& x, const auto& y, auto& out) {
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::inserter(out, out.end()));
  }, budget);
}

inline IndexSet subtract(const IndexSet& a, const IndexSet& b, std::size_t budget = kDefaultSymbolicBudget) {
  return detail::combine(a, b, [](const auto& x, const auto& y, auto& out) {
    std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::inserter(out, out.end()));
  }, budget);
}

/// N_0^n minus a.
inline IndexSet complement(const IndexSet& a, std::size_t budget = kDefaultSymbolicBudget) {
  return subtract(IndexSet::full(a.dim()), a, budget);
}

inline bool is_empty(const IndexSet& a, std::size_t budget = kDefaultSymbolicBudget) {
  const IndexSet one[] = {a};
  return Atomization(one, budget).tuples(a).empty();
}

inline bool is_subset(const IndexSet& a, const IndexSet& b, std::size_t budget = kDefaultSymbolicBudget) {
  return is_empty(subtract(a, b, budget), budget);
}

inline bool same_set(const IndexSet& a, const IndexSet& b, std::size_t budget = kDefaultSymbolicBudget) {
  const IndexSet both[] = {a, b};
  Atomization atz(both, budget);
  return atz.tuples(a) == atz.tuples(b);
}

/// a intersected with N^n (every coordinate >= 1).
inline IndexSet positive_part(const IndexSet& a) {
  std::vector<Product> terms;
  for (auto t : a.terms()) {
    for (auto& c : t)
      if (c.contains(0)) c = c.intersect(CoordSet({}, {Generator::finite({0})}));
    terms.push_back(std::move(t));
  }
  return IndexSet(a.dim(), std::move(terms));
}

}  // namespace rt
