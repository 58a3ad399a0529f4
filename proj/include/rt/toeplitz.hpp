#pragma once
// Toeplitz operators on the truncated monomial lattice.
//
// A factor with twist κ sends z^a to
//     π^n c_{a+κ} ∫_{Ω̃⁺} f(√t) t^{(2a+κ)/2} dt · z^{a+κ},
// and the weight depends on a alone. A product T_{φ_m}⋯T_{φ_1} is therefore
// evaluated by pushing every source through the factors in turn over all of
// N^n; truncated matrices only appear in the cross-check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rt/moments.hpp"
#include "rt/multi_index.hpp"
#include "rt/symbol.hpp"

namespace rt {

struct Target {
  MultiIndex index;
  Complex weight;
};

struct LatticeOperator {
  TruncationLattice input;
  TruncationLattice output;
  std::vector<MultiIndex> sources;
  /// rows[i] lists z^{sources[i]} ↦ Σ weight · z^index, sorted by index.
  std::vector<std::vector<Target>> rows;
  /// Componentwise max over every intermediate index reached from sources[i].
  std::vector<MultiIndex> extent;
  MultiIndex k0;
  /// Tuples killed because an intermediate index left N^n or had c = 0.
  std::size_t killed_tuples = 0;
  /// Tuples dropped for an unbounded profile.
  std::size_t skipped_tuples = 0;
  std::vector<std::string> warnings;
  std::optional<double> slice_residual;

  std::size_t position(const MultiIndex& k) const {
    if (!input.contains(k)) throw ConfigError("index " + k.to_string() + " is outside the input lattice");
    std::size_t pos = 0;
    for (std::size_t j = 0; j < k.size(); ++j)
      pos = pos * static_cast<std::size_t>(input.max_index()[j] + 1) + static_cast<std::size_t>(k[j]);
    return pos;
  }

  const std::vector<Target>& row(const MultiIndex& k) const { return rows[position(k)]; }

  Complex weight(const MultiIndex& k, const MultiIndex& target) const {
    for (const auto& t : row(k))
      if (t.index == target) return t.weight;
    return 0;
  }
};

/// One factor of a product: a list of twisted channels whose radial parts are
/// evaluated together at each node.
struct Factor {
  std::vector<MultiIndex> twists;
  std::vector<bool> zero;
  ChannelFn radial;
  double sup_bound = 0;
  /// Componentwise range of twists the factor may use (its box).
  MultiIndex min_twist, max_twist;
  std::string label;
};

inline Factor factor_of(const SymbolSum& s) {
  Factor f;
  f.min_twist = s.box().lower();
  f.max_twist = s.box().upper() - MultiIndex(s.dim(), 1);
  std::vector<PointFn> fns;
  for (const auto& [k, t] : s.terms()) {
    f.twists.push_back(k);
    f.zero.push_back(t.is_zero());
    fns.push_back(t.radial());
    f.label += (f.label.empty() ? "" : " + ") + t.label();
  }
  f.sup_bound = s.sup_bound();
  f.radial = [fns](std::span<const double> r, std::span<Complex> v) {
    for (std::size_t c = 0; c < fns.size(); ++c) v[c] = fns[c] ? fns[c](r) : Complex(0);
  };
  return f;
}

inline Factor factor_of(const QhSymbol& s) { return factor_of(SymbolSum::single(s)); }

inline Factor factor_of(const SlicedSymbol& s) {
  Factor f;
  f.twists = s.frequencies();
  f.zero.assign(f.twists.size(), s.sup_bound() == 0);
  f.min_twist = MultiIndex(s.dim(), -s.p_max());
  f.max_twist = MultiIndex(s.dim(), s.p_max());
  f.sup_bound = s.sup_bound();
  f.label = s.label();
  f.radial = [s](std::span<const double> r, std::span<Complex> v) {
    const auto all = s.slices_at(r);
    std::copy(all.begin(), all.end(), v.begin());
  };
  return f;
}

/// The single slice p of a sliced symbol, as a one-channel factor.
inline Factor slice_factor(const SlicedSymbol& s, const MultiIndex& p) { return factor_of(s.slice_symbol(p)); }

/// Componentwise max(0, -min over j of the smallest prefix twist sum).
inline MultiIndex k0_for(std::span<const Factor> factors, std::size_t n) {
  MultiIndex prefix(n, 0), low(n, 0);
  for (const auto& f : factors) {
    prefix += f.min_twist;
    low = componentwise_min(low, prefix);
  }
  return componentwise_max(MultiIndex(n, 0), -low);
}

struct EngineOptions {
  /// 1 runs factors sequentially; anything else integrates them concurrently.
  unsigned threads = 0;
};

namespace detail {

/// Live transitions a ↦ (a + κ_c, weight) of one factor.
using Steps = std::map<MultiIndex, std::vector<std::pair<MultiIndex, Complex>>>;

inline Steps factor_steps(const MomentTable& T, const Factor& f, const std::set<MultiIndex>& from,
                          const std::set<MultiIndex>& live) {
  std::map<std::pair<std::size_t, MultiIndex>, std::size_t> slot;
  std::vector<HalfMoment> comps;
  for (const auto& a : from)
    for (std::size_t c = 0; c < f.twists.size(); ++c) {
      if (f.zero[c]) continue;
      const MultiIndex to = a + f.twists[c];
      if (!live.count(to)) continue;
      auto key = std::make_pair(c, a + to);
      if (slot.emplace(key, comps.size()).second) comps.push_back({c, key.second});
    }
  quad::Options opt;
  opt.tolerance = T.tolerance();
  const auto res = channel_half_moments(T.region(), f.radial, f.twists.size(), comps, opt);
  const double pin = pi_power(T.dim());
  Steps steps;
  for (const auto& a : from) {
    auto& out = steps[a];
    for (std::size_t c = 0; c < f.twists.size(); ++c) {
      const MultiIndex to = a + f.twists[c];
      if (!live.count(to)) continue;
      const Complex w = f.zero[c] ? Complex(0) : pin * T.coefficient(to) * res.values[slot.at({c, a + to})];
      out.emplace_back(to, w);
    }
  }
  return steps;
}

}  // namespace detail

/// T_{φ_m}⋯T_{φ_1} on the sources of L; factors[0] is applied first.
inline LatticeOperator compose(const MomentTable& T, const std::vector<Factor>& factors, const TruncationLattice& L,
                               const EngineOptions& opt = {}) {
  const std::size_t n = T.dim();
  if (L.dim() != n) throw ConfigError("lattice dimension does not match the domain");
  for (const auto& f : factors)
    for (const auto& k : f.twists)
      if (k.size() != n) throw ConfigError("twist " + k.to_string() + " does not match the domain dimension");
  LatticeOperator op;
  op.input = L;
  op.sources = L.points();
  op.k0 = k0_for(factors, n);

  // Reachable intermediate indices: natural with c > 0.
  std::vector<std::set<MultiIndex>> reach(factors.size() + 1);
  reach[0].insert(op.sources.begin(), op.sources.end());
  for (std::size_t j = 0; j < factors.size(); ++j) {
    std::vector<MultiIndex> cand;
    std::set<MultiIndex> seen;
    for (const auto& a : reach[j])
      for (const auto& k : factors[j].twists) {
        const MultiIndex to = a + k;
        if (to.is_natural() && seen.insert(to).second) cand.push_back(to);
      }
    T.precompute(cand);
    for (const auto& to : cand)
      if (T.coefficient(to) > 0) reach[j + 1].insert(to);
  }

  std::vector<detail::Steps> steps(factors.size());
  if (opt.threads == 1 || factors.size() < 2) {
    for (std::size_t j = 0; j < factors.size(); ++j)
      steps[j] = detail::factor_steps(T, factors[j], reach[j], reach[j + 1]);
  } else {
    std::vector<std::future<detail::Steps>> jobs;
    for (std::size_t j = 0; j < factors.size(); ++j)
      jobs.push_back(std::async(std::launch::async, [&, j] {
        return detail::factor_steps(T, factors[j], reach[j], reach[j + 1]);
      }));
    for (std::size_t j = 0; j < factors.size(); ++j) steps[j] = jobs[j].get();
  }

  // Number of complete tuples below each level, for the killed-tuple count.
  std::vector<std::size_t> tail(factors.size() + 1, 1);
  for (std::size_t j = factors.size(); j-- > 0;) tail[j] = tail[j + 1] * factors[j].twists.size();

  MultiIndex out_max = L.max_index();
  for (const auto& k : op.sources) {
    struct State {
      Complex w;
      std::size_t paths;
    };
    std::map<MultiIndex, State> cur{{k, {1.0, 1}}};
    MultiIndex ext = k;
    for (std::size_t j = 0; j < factors.size(); ++j) {
      std::map<MultiIndex, State> next;
      for (const auto& [a, st] : cur) {
        const auto& moves = steps[j].at(a);
        op.killed_tuples += st.paths * (factors[j].twists.size() - moves.size()) * tail[j + 1];
        for (const auto& [to, w] : moves) {
          auto& s = next[to];
          s.w += st.w * w;
          s.paths += st.paths;
          ext = componentwise_max(ext, to);
        }
      }
      cur = std::move(next);
    }
    std::vector<Target> row;
    for (const auto& [to, st] : cur) {
      row.push_back({to, st.w});
      out_max = componentwise_max(out_max, to);
    }
    op.rows.push_back(std::move(row));
    op.extent.push_back(ext);
  }
  op.output = TruncationLattice(out_max);
  for (std::size_t j = 0; j < n; ++j)
    if (!T.region().touches_axis(j)) {
      op.warnings.push_back("domain avoids the coordinate hyperplanes; sources with negative entries are not checked");
      break;
    }
  return op;
}

/// (target, weight) of T_φ z^k.
inline std::pair<MultiIndex, Complex> toeplitz_apply(const MomentTable& T, const QhSymbol& phi, const MultiIndex& k) {
  if (k.size() != T.dim() || phi.dim() != T.dim()) throw ConfigError("dimension mismatch in toeplitz_apply");
  if (!k.is_natural()) throw ConfigError("source index must lie in N^n: " + k.to_string());
  const MultiIndex target = k + phi.twist();
  if (phi.is_zero() || !target.is_natural()) return {target, 0};
  const double c = T.coefficient(target);
  if (c == 0) return {target, 0};
  const MultiIndex doubled = k + target;
  for (std::size_t j = 0; j < doubled.size(); ++j)
    if (doubled[j] < 0 && T.region().touches_axis(j))
      throw UnboundedProfile("unbounded profile at k = " + k.to_string() + "; raise the starting index k0");
  quad::Options opt;
  opt.tolerance = T.tolerance();
  const MultiIndex ds[] = {doubled};
  const Complex I = half_moments(T.region(), phi.radial(), ds, opt).values[0];
  return {target, pi_power(T.dim()) * c * I};
}

inline LatticeOperator product_apply(const MomentTable& T, const std::vector<SymbolSum>& symbols,
                                     const TruncationLattice& L, const EngineOptions& opt = {}) {
  std::vector<Factor> factors;
  for (const auto& s : symbols) factors.push_back(factor_of(s));
  return compose(T, factors, L, opt);
}

/// T_head T_{φ_{m-1}}⋯T_{φ_1} with the head split into its Fourier slices.
inline LatticeOperator product_apply_sliced(const MomentTable& T, const SlicedSymbol& head,
                                            const std::vector<QhSymbol>& tail, const TruncationLattice& L,
                                            const EngineOptions& opt = {}) {
  if (head.dim() != T.dim()) throw ConfigError("sliced symbol dimension does not match the domain");
  std::vector<Factor> factors;
  for (const auto& s : tail) factors.push_back(factor_of(s));
  factors.push_back(factor_of(head));
  auto op = compose(T, factors, L, opt);
  op.slice_residual = head.residual(T.domain());
  return op;
}

struct ProductReport {
  double operator_norm_estimate = 0;
  double max_abs_weight = 0;
  bool zero_flag = false;
  double zero_tolerance = 0;
  MultiIndex witness_source, witness_target;
  Complex witness_weight;
  MultiIndex k0_used;
  std::size_t sources_checked = 0;
  std::size_t skipped_tuples = 0;
  std::size_t killed_tuples = 0;
  std::optional<double> slice_residual;
};

/// zero_tolerance default: 1e-6 times the product of the factors' sup bounds.
inline double default_zero_tolerance(std::span<const Factor> factors) {
  double p = 1e-6;
  for (const auto& f : factors) p *= f.sup_bound;
  return p > 0 ? p : 1e-6;
}

/// Verdict over sources k >= k0: zero_flag iff max_k ‖op z^k‖ / ‖z^k‖ < zero_tolerance.
inline ProductReport zero_product_verdict(const LatticeOperator& op, const MomentTable& T, double zero_tolerance) {
  ProductReport rep;
  rep.zero_tolerance = zero_tolerance;
  rep.k0_used = op.k0;
  rep.skipped_tuples = op.skipped_tuples;
  rep.killed_tuples = op.killed_tuples;
  rep.slice_residual = op.slice_residual;
  bool have_witness = false;
  for (std::size_t i = 0; i < op.sources.size(); ++i) {
    const MultiIndex& k = op.sources[i];
    if (!all_leq(op.k0, k)) continue;
    ++rep.sources_checked;
    double out_sq = 0;
    for (const auto& t : op.rows[i]) {
      out_sq += std::norm(t.weight) * T.norm(t.index);
      const double a = std::abs(t.weight);
      if (!have_witness || a > rep.max_abs_weight) {
        rep.max_abs_weight = a;
        rep.witness_source = k;
        rep.witness_target = t.index;
        rep.witness_weight = t.weight;
        have_witness = true;
      }
    }
    rep.operator_norm_estimate = std::max(rep.operator_norm_estimate, std::sqrt(out_sq / T.norm(k)));
    if (!have_witness) {
      rep.witness_source = rep.witness_target = k;
      have_witness = true;
    }
  }
  if (rep.sources_checked == 0)
    throw NumericError("lattice too small for twists: no source k <= " + op.input.max_index().to_string() +
                       " satisfies k >= k0 = " + op.k0.to_string());
  rep.zero_flag = rep.operator_norm_estimate < zero_tolerance;
  return rep;
}

inline nlohmann::json to_json(const ProductReport& r) {
  nlohmann::json j = {{"zero_flag", r.zero_flag},
                      {"zero_tolerance", r.zero_tolerance},
                      {"norm_estimate", r.operator_norm_estimate},
                      {"max_abs_weight", r.max_abs_weight},
                      {"witness",
                       {{"source", r.witness_source.to_string()},
                        {"target", r.witness_target.to_string()},
                        {"weight", {r.witness_weight.real(), r.witness_weight.imag()}}}},
                      {"k0_used", r.k0_used.to_string()},
                      {"sources_checked", r.sources_checked},
                      {"skipped_tuples", r.skipped_tuples},
                      {"killed_tuples", r.killed_tuples}};
  j["slice_residual"] = r.slice_residual ? nlohmann::json(*r.slice_residual) : nlohmann::json(nullptr);
  return j;
}

struct CrossCheck {
  double max_deviation = 0;
  std::size_t interior_sources = 0;
};

/// Multiplies the factors' truncated N×N matrices on L and compares with the
/// factored operator on sources whose intermediates all stay inside L.
inline CrossCheck matrix_cross_check(const MomentTable& T, const std::vector<Factor>& factors,
                                     const TruncationLattice& L, const LatticeOperator& factored,
                                     const EngineOptions& opt = {}) {
  const auto pts = L.points();
  const auto N = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(N, N);
  for (const auto& f : factors) {
    const auto single = compose(T, {f}, L, opt);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (const auto& t : single.rows[i])
        if (L.contains(t.index))
          M(static_cast<Eigen::Index>(single.position(t.index)), static_cast<Eigen::Index>(i)) = t.weight;
    product = M * product;
  }
  CrossCheck cc;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t fi = factored.position(pts[i]);
    if (!L.contains(factored.extent[fi])) continue;
    ++cc.interior_sources;
    Eigen::VectorXcd col = product.col(static_cast<Eigen::Index>(i));
    for (const auto& t : factored.rows[fi]) col(static_cast<Eigen::Index>(factored.position(t.index))) -= t.weight;
    cc.max_deviation = std::max(cc.max_deviation, col.cwiseAbs().maxCoeff());
  }
  return cc;
}

/// Coordinate-format CSV: source,target,weight_re,weight_im.
inline void write_operator_csv(const LatticeOperator& op, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "source,target,weight_re,weight_im\n";
  for (std::size_t i = 0; i < op.sources.size(); ++i)
    for (const auto& t : op.rows[i])
      out << '"' << op.sources[i].to_string() << "\",\"" << t.index.to_string() << "\"," << format_real(t.weight.real())
          << ',' << format_real(t.weight.imag()) << '\n';
}

}  // namespace rt
