#pragma once
// Monomial norms ‖z^α‖² = π^n ∫_{Ω̃⁺} t^α dt, Bergman coefficients, weighted
// moments and the moment transform h(z) = ∫ g(t) t^z dt.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rt/domain.hpp"
#include "rt/multi_index.hpp"
#include "rt/quadrature.hpp"
#include "rt/text.hpp"

namespace rt {

using Complex = std::complex<double>;
inline constexpr double kInfiniteNorm = std::numeric_limits<double>::infinity();

/// A function of r ∈ Ω⁺ (or of t ∈ Ω̃⁺, depending on context).
using PointFn = std::function<Complex(std::span<const double>)>;

/// An integrand on Ω̃⁺ with a declared bound |g| <= sup_bound. An empty fn is g ≡ 0.
struct RadialIntegrand {
  PointFn fn;
  double sup_bound = 0;
};

inline double default_tolerance(const DomainProfile& d) {
  return d.kind() == DomainKind::Generic || d.kind() == DomainKind::Table ? 1e-7 : 1e-10;
}

inline double pi_power(std::size_t n) { return std::pow(std::numbers::pi, static_cast<double>(n)); }

/// Closed form of ‖z^α‖² for polydisks and balls given by their base spec, α ∈ N^n.
inline std::optional<double> closed_form_norm(const DomainProfile& d, const MultiIndex& alpha) {
  if (!d.is_base() || !alpha.is_natural()) return std::nullopt;
  const std::size_t n = d.dim();
  if (d.kind() == DomainKind::Polydisk) {
    double v = 1;
    for (std::size_t j = 0; j < n; ++j) {
      const double R = d.parameters()[j];
      v *= std::numbers::pi * std::pow(R, 2.0 * static_cast<double>(alpha[j]) + 2) / static_cast<double>(alpha[j] + 1);
    }
    return v;
  }
  if (d.kind() == DomainKind::Ball) {
    // π^n α! R^{2|α|+2n} / (|α|+n)!
    const double R = d.parameters()[0];
    double log_ratio = -std::lgamma(static_cast<double>(alpha.total() + static_cast<Index>(n)) + 1);
    for (std::size_t j = 0; j < n; ++j) log_ratio += std::lgamma(static_cast<double>(alpha[j]) + 1);
    return pi_power(n) * std::exp(log_ratio) * std::pow(R, 2.0 * static_cast<double>(alpha.total() + static_cast<Index>(n)));
  }
  return std::nullopt;
}

/// The integral of t^α diverges: a negative entry against a coordinate hyperplane the closure meets.
inline bool divergent_monomial(const DomainProfile& d, const MultiIndex& alpha) {
  for (std::size_t j = 0; j < alpha.size(); ++j)
    if (alpha[j] < 0 && d.touches_axis(j)) return true;
  return false;
}

/// Radial values of several functions at one point s ∈ Ω⁺, written into `values`.
using ChannelFn = std::function<void(std::span<const double> s, std::span<Complex> values)>;

/// Component of a channel integral: ∫ f_channel(√t) ∏_j t_j^{D_j / 2} dt.
struct HalfMoment {
  std::size_t channel = 0;
  MultiIndex doubled;
};

/// All components over one set of nodes. Integrands vanish on coordinate hyperplanes.
inline quad::Result channel_half_moments(const DomainProfile& region, const ChannelFn& f, std::size_t channels,
                                         std::span<const HalfMoment> comps, const quad::Options& opt) {
  const std::size_t n = region.dim();
  const std::size_t m = comps.size();
  if (m == 0) return {};
  std::vector<Index> lo(n, 0), hi(n, 0);
  for (const auto& c : comps) {
    if (c.doubled.size() != n) throw ConfigError("exponent " + c.doubled.to_string() + " has the wrong dimension");
    if (c.channel >= channels) throw ConfigError("channel out of range");
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = std::min(lo[j], c.doubled[j]);
      hi[j] = std::max(hi[j], c.doubled[j]);
    }
  }
  std::vector<std::vector<double>> pw(n);
  for (std::size_t j = 0; j < n; ++j) pw[j].resize(static_cast<std::size_t>(hi[j] - lo[j] + 1));
  std::vector<double> s(n);
  std::vector<Complex> fv(channels, Complex(1));
  const quad::BatchIntegrand batch = [&](std::span<const double> t, std::span<Complex> out) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(t[j] > 0)) {
        std::fill(out.begin(), out.end(), Complex(0));
        return;
      }
      s[j] = std::sqrt(t[j]);
      auto& row = pw[j];
      const std::size_t zero = static_cast<std::size_t>(-lo[j]);
      row[zero] = 1;
      for (std::size_t e = zero + 1; e < row.size(); ++e) row[e] = row[e - 1] * s[j];
      for (std::size_t e = zero; e-- > 0;) row[e] = row[e + 1] / s[j];
    }
    if (f) f(s, fv);
    for (std::size_t i = 0; i < m; ++i) {
      double p = 1;
      for (std::size_t j = 0; j < n; ++j) p *= pw[j][static_cast<std::size_t>(comps[i].doubled[j] - lo[j])];
      out[i] = fv[comps[i].channel] * p;
    }
  };
  return quad::integrate(region, m, batch, opt);
}

/// For each doubled exponent D_i: ∫_{region} f(√t) ∏_j t_j^{D_ij / 2} dt, with f ≡ 1 when
/// `f` is empty.
inline quad::Result half_moments(const DomainProfile& region, const PointFn& f, std::span<const MultiIndex> doubled,
                                 const quad::Options& opt) {
  std::vector<HalfMoment> comps;
  comps.reserve(doubled.size());
  for (const auto& d : doubled) comps.push_back({0, d});
  ChannelFn one;
  if (f) one = [&f](std::span<const double> s, std::span<Complex> v) { v[0] = f(s); };
  return channel_half_moments(region, one, 1, comps, opt);
}

/// ‖z^α‖² on D; +infinity when the integral diverges.
inline double monomial_norm(const DomainProfile& d, const MultiIndex& alpha, std::optional<double> tol = std::nullopt) {
  if (alpha.size() != d.dim()) throw ConfigError("index " + alpha.to_string() + " has the wrong dimension");
  if (divergent_monomial(d, alpha)) return kInfiniteNorm;
  if (auto c = closed_form_norm(d, alpha)) return *c;
  quad::Options opt;
  opt.tolerance = tol.value_or(default_tolerance(d));
  const MultiIndex doubled[] = {alpha + alpha};
  return pi_power(d.dim()) * half_moments(squared_region(d), {}, doubled, opt).values[0].real();
}

/// Quadrature path for many indices at once; closed forms are not consulted.
inline std::vector<double> monomial_norms_by_quadrature(const DomainProfile& d, std::span<const MultiIndex> alphas,
                                                        double tol) {
  std::vector<double> out(alphas.size(), kInfiniteNorm);
  std::vector<MultiIndex> doubled;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (divergent_monomial(d, alphas[i])) continue;
    doubled.push_back(alphas[i] + alphas[i]);
    where.push_back(i);
  }
  quad::Options opt;
  opt.tolerance = tol;
  const auto r = half_moments(squared_region(d), {}, doubled, opt);
  for (std::size_t i = 0; i < where.size(); ++i) out[where[i]] = pi_power(d.dim()) * r.values[i].real();
  return out;
}

/// ∫_{Ω̃⁺} g(t) t^k dt for each k.
inline std::vector<Complex> weighted_moments(const DomainProfile& d, const RadialIntegrand& g,
                                             std::span<const MultiIndex> ks, std::optional<double> tol = std::nullopt) {
  std::vector<Complex> out(ks.size(), Complex(0));
  if (!g.fn || ks.empty()) return out;
  for (const auto& k : ks)
    if (k.size() != d.dim() || !k.is_natural()) throw ConfigError("moment index must lie in N^n: " + k.to_string());
  const std::size_t n = d.dim();
  std::vector<Index> hi(n, 0);
  for (const auto& k : ks)
    for (std::size_t j = 0; j < n; ++j) hi[j] = std::max(hi[j], k[j]);
  std::vector<std::vector<double>> pw(n);
  for (std::size_t j = 0; j < n; ++j) pw[j].resize(static_cast<std::size_t>(hi[j] + 1));
  const quad::BatchIntegrand batch = [&](std::span<const double> t, std::span<Complex> o) {
    for (std::size_t j = 0; j < n; ++j) {
      pw[j][0] = 1;
      for (std::size_t e = 1; e < pw[j].size(); ++e) pw[j][e] = pw[j][e - 1] * t[j];
    }
    const Complex gv = g.fn(t);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      double p = 1;
      for (std::size_t j = 0; j < n; ++j) p *= pw[j][static_cast<std::size_t>(ks[i][j])];
      o[i] = gv * p;
    }
  };
  quad::Options opt;
  opt.tolerance = tol.value_or(default_tolerance(d));
  return quad::integrate(squared_region(d), ks.size(), batch, opt).values;
}

inline Complex weighted_moment(const DomainProfile& d, const RadialIntegrand& g, const MultiIndex& k,
                               std::optional<double> tol = std::nullopt) {
  const MultiIndex ks[] = {k};
  return weighted_moments(d, g, ks, tol)[0];
}

struct TransformResult {
  Complex value;
  double bound = 0;   // sup|g| · vol of the integration region
  double volume = 0;
  std::vector<double> scale;  // non-empty when Ω̃⁺ had to be rescaled into [0,1)^n
};

/// h(z) = ∫ g(t) t^z dt over Ω̃⁺, or over its rescaled copy (g evaluated at c·x)
/// when Ω̃⁺ is not inside the unit box. Asserts |h(z)| <= sup|g| · vol.
inline TransformResult moment_transform_detailed(const DomainProfile& d, const RadialIntegrand& g,
                                                 std::span<const Complex> z, std::optional<double> tol = std::nullopt) {
  const std::size_t n = d.dim();
  if (z.size() != n) throw ConfigError("transform point has the wrong dimension");
  for (const auto& zj : z)
    if (!(zj.real() > 0)) throw ConfigError("moment transform needs Re z_j > 0");
  DomainProfile region = squared_region(d);
  TransformResult r;
  const auto bound = region.bounding_radius();
  if (std::any_of(bound.begin(), bound.end(), [](double b) { return b > 1; })) {
    auto rs = rescale_into_unit_box(region);
    region = rs.profile;
    r.scale = rs.scale;
  }
  std::vector<double> y(n);
  const quad::BatchIntegrand batch = [&](std::span<const double> t, std::span<Complex> o) {
    o[1] = 1;
    Complex log_sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(t[j] > 0)) {
        o[0] = 0;
        return;
      }
      log_sum += z[j] * std::log(t[j]);
      y[j] = r.scale.empty() ? t[j] : r.scale[j] * t[j];
    }
    o[0] = g.fn ? g.fn(y) * std::exp(log_sum) : Complex(0);
  };
  quad::Options opt;
  opt.tolerance = tol.value_or(default_tolerance(d));
  const auto res = quad::integrate(region, 2, batch, opt);
  r.value = res.values[0];
  r.volume = res.values[1].real();
  r.bound = g.sup_bound * r.volume;
  if (std::abs(r.value) > r.bound * (1 + 1e-9) + 1e-300)
    throw NumericError("moment transform exceeds sup|g|*vol: " + format_real(std::abs(r.value)) + " > " +
                       format_real(r.bound));
  return r;
}

inline Complex moment_transform(const DomainProfile& d, const RadialIntegrand& g, std::span<const Complex> z,
                                std::optional<double> tol = std::nullopt) {
  return moment_transform_detailed(d, g, z, tol).value;
}

/// Cache of ‖z^α‖² and c_α for one domain and tolerance. Reads are concurrent;
/// fills take the writer lock only to insert finished values.
class MomentTable {
 public:
  explicit MomentTable(DomainProfile d, std::optional<double> tol = std::nullopt)
      : domain_(std::move(d)), region_(squared_region(domain_)), tol_(tol.value_or(default_tolerance(domain_))),
        state_(std::make_unique<State>()) {
    if (auto dir = cache_dir()) load_from(*dir / key());
  }

  const DomainProfile& domain() const { return domain_; }
  /// Ω̃⁺, where every moment integral lives.
  const DomainProfile& region() const { return region_; }
  double tolerance() const { return tol_; }
  std::size_t dim() const { return domain_.dim(); }

  double norm(const MultiIndex& alpha) const {
    {
      std::shared_lock lock(state_->mu);
      if (auto it = state_->norms.find(alpha); it != state_->norms.end()) return it->second;
    }
    const double v = monomial_norm(domain_, alpha, tol_);
    std::unique_lock lock(state_->mu);
    return state_->norms.emplace(alpha, v).first->second;
  }

  /// c_α = ‖z^α‖^{-2}, or exactly 0 for an infinite norm.
  double coefficient(const MultiIndex& alpha) const {
    const double v = norm(alpha);
    return std::isinf(v) ? 0.0 : 1.0 / v;
  }

  /// Fills every missing index of `alphas` in one batched quadrature.
  void precompute(std::span<const MultiIndex> alphas) const {
    std::vector<MultiIndex> missing;
    {
      std::shared_lock lock(state_->mu);
      for (const auto& a : alphas)
        if (!state_->norms.count(a)) missing.push_back(a);
    }
    if (missing.empty()) return;
    std::vector<double> values(missing.size());
    std::vector<MultiIndex> numeric;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < missing.size(); ++i) {
      if (missing[i].size() != dim()) throw ConfigError("index " + missing[i].to_string() + " has the wrong dimension");
      if (divergent_monomial(domain_, missing[i])) {
        values[i] = kInfiniteNorm;
      } else if (auto c = closed_form_norm(domain_, missing[i])) {
        values[i] = *c;
      } else {
        numeric.push_back(missing[i]);
        where.push_back(i);
      }
    }
    const auto q = monomial_norms_by_quadrature(domain_, numeric, tol_);
    for (std::size_t i = 0; i < where.size(); ++i) values[where[i]] = q[i];
    std::unique_lock lock(state_->mu);
    for (std::size_t i = 0; i < missing.size(); ++i) state_->norms.emplace(missing[i], values[i]);
  }

  void precompute(const IndexBox& box) const { precompute(box.points()); }

  std::size_t size() const {
    std::shared_lock lock(state_->mu);
    return state_->norms.size();
  }

  std::map<MultiIndex, double> snapshot() const {
    std::shared_lock lock(state_->mu);
    return state_->norms;
  }

  /// Directory name for this (domain, tolerance) pair inside a cache root.
  std::string key() const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : domain_.id() + "|" + format_real(tol_)) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
  }

  static std::optional<std::filesystem::path> cache_dir() {
    const char* env = std::getenv("RT_CACHE_DIR");
    if (!env || !*env) return std::nullopt;
    return std::filesystem::path(env);
  }

  /// Writes norms.csv and manifest.json into `dir`.
  void save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    const auto norms = snapshot();
    std::ofstream csv(dir / "norms.csv");
    csv << "alpha,norm_sq,coefficient\n";
    for (const auto& [a, v] : norms)
      csv << '"' << a.to_string() << "\"," << format_real(v) << ',' << format_real(std::isinf(v) ? 0.0 : 1.0 / v)
          << '\n';
    nlohmann::json manifest = {{"domain", domain_.id()}, {"tolerance", tol_}, {"entries", norms.size()}};
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  }

  /// Saves into RT_CACHE_DIR when it is set.
  void persist() const {
    if (auto dir = cache_dir()) save(*dir / key());
  }

  /// Merges a saved table; ignored when the manifest names another domain or tolerance.
  bool load_from(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) return false;
    const auto manifest = nlohmann::json::parse(mf, nullptr, false);
    if (manifest.is_discarded() || manifest.value("domain", "") != domain_.id() ||
        manifest.value("tolerance", 0.0) != tol_)
      return false;
    std::ifstream csv(dir / "norms.csv");
    std::string line;
    std::getline(csv, line);
    std::unique_lock lock(state_->mu);
    while (std::getline(csv, line)) {
      const auto close = line.find("\",");
      if (line.size() < 2 || line[0] != '"' || close == std::string::npos) continue;
      const MultiIndex a = text::parse_tuple(line.substr(1, close - 1));
      const std::string rest = line.substr(close + 2);
      const double v = std::stod(rest.substr(0, rest.find(',')));
      state_->norms.emplace(a, v);
    }
    return true;
  }

 private:
  struct State {
    mutable std::shared_mutex mu;
    std::map<MultiIndex, double> norms;
  };

  DomainProfile domain_;
  DomainProfile region_;
  double tol_;
  std::unique_ptr<State> state_;
};

inline double bergman_coefficient(const MomentTable& table, const MultiIndex& alpha) {
  return table.coefficient(alpha);
}

}  // namespace rt
