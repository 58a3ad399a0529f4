#pragma once
// Quasi-homogeneous symbols f(r) e^{ik·θ}, finite sums of them over index
// boxes, and Fourier slicing of a general bounded symbol on the torus.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rt/domain.hpp"
#include "rt/moments.hpp"
#include "rt/multi_index.hpp"

namespace rt {

/// φ as a function of radii and angles.
using PolarFn = std::function<Complex(std::span<const double> r, std::span<const double> theta)>;

class QhSymbol {
 public:
  QhSymbol() = default;
  /// An empty radial function is the zero symbol.
  QhSymbol(PointFn radial, MultiIndex twist, double sup_bound, std::string label = {})
      : radial_(std::move(radial)), twist_(std::move(twist)), sup_(sup_bound), label_(std::move(label)) {
    if (!(sup_ >= 0) || !std::isfinite(sup_)) throw ConfigError("sup bound must be finite and nonnegative");
    if (!radial_) sup_ = 0;
  }

  static QhSymbol zero(MultiIndex twist) { return QhSymbol({}, std::move(twist), 0, "0"); }

  const PointFn& radial() const { return radial_; }
  const MultiIndex& twist() const { return twist_; }
  double sup_bound() const { return sup_; }
  const std::string& label() const { return label_; }
  std::size_t dim() const { return twist_.size(); }
  bool is_zero() const { return !radial_; }

  Complex radial_at(std::span<const double> r) const { return radial_ ? radial_(r) : Complex(0); }

  Complex operator()(std::span<const double> r, std::span<const double> theta) const {
    double phase = 0;
    for (std::size_t j = 0; j < dim(); ++j) phase += static_cast<double>(twist_[j]) * theta[j];
    return radial_at(r) * std::polar(1.0, phase);
  }

  /// Samples Ω⁺ and throws ConfigError when |f| exceeds the declared bound.
  void spot_check(const DomainProfile& d, std::uint64_t seed = 0, int samples = 256) const {
    if (!radial_) return;
    if (d.dim() != dim()) throw ConfigError("symbol dimension does not match the domain");
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s) {
      const auto r = sample_point(d, rng);
      const double v = std::abs(radial_(r));
      if (!std::isfinite(v) || v > sup_ * (1 + 1e-12))
        throw ConfigError("radial part '" + label_ + "' reaches " + format_real(v) + " > declared sup " +
                          format_real(sup_) + " at " + quad::detail::point_text(r));
    }
  }

 private:
  PointFn radial_;
  MultiIndex twist_;
  double sup_ = 0;
  std::string label_;
};

/// Largest |f| over random points of Ω⁺, used when a spec omits the bound.
inline double estimate_sup(const PointFn& f, const DomainProfile& d, std::uint64_t seed = 0, int samples = 4096) {
  std::mt19937_64 rng(seed);
  double m = 0;
  for (int s = 0; s < samples; ++s) m = std::max(m, std::abs(f(sample_point(d, rng))));
  return m;
}

/// Σ_{k ∈ R} φ_k with φ_k of twist k. Missing keys are zero terms.
class SymbolSum {
 public:
  SymbolSum() = default;
  explicit SymbolSum(IndexBox box) : box_(std::move(box)) {}

  static SymbolSum single(QhSymbol s) {
    SymbolSum out(IndexBox::singleton(s.twist()));
    out.add(std::move(s));
    return out;
  }

  void add(QhSymbol term) {
    if (!box_.contains(term.twist()))
      throw ConfigError("twist " + term.twist().to_string() + " lies outside the box " + box_.to_string());
    const MultiIndex key = term.twist();
    if (!terms_.emplace(key, std::move(term)).second) throw ConfigError("duplicate term " + key.to_string());
  }

  const IndexBox& box() const { return box_; }
  const std::map<MultiIndex, QhSymbol>& terms() const { return terms_; }
  std::size_t dim() const { return box_.dim(); }

  double sup_bound() const {
    double s = 0;
    for (const auto& [k, t] : terms_) s += t.sup_bound();
    return s;
  }

  bool is_zero() const {
    for (const auto& [k, t] : terms_)
      if (!t.is_zero()) return false;
    return true;
  }

  Complex operator()(std::span<const double> r, std::span<const double> theta) const {
    Complex acc = 0;
    for (const auto& [k, t] : terms_) acc += t(r, theta);
    return acc;
  }

  /// Terms on the top slice R¹ = {k ∈ R : k_axis = b_axis - 1}.
  SymbolSum top_slice(std::size_t axis) const { return restricted(box_top_slice(box_, axis, 0)); }

  /// Terms on R \ R¹ along the axis.
  SymbolSum without_top_slice(std::size_t axis) const {
    MultiIndex hi = box_.upper();
    hi.at(axis) -= 1;
    return restricted(IndexBox(box_.lower(), hi));
  }

  SymbolSum restricted(const IndexBox& sub) const {
    SymbolSum out(sub);
    for (const auto& [k, t] : terms_)
      if (sub.contains(k)) out.terms_.emplace(k, t);
    return out;
  }

 private:
  IndexBox box_;
  std::map<MultiIndex, QhSymbol> terms_;
};

namespace detail {

/// Row-column trapezoid DFT of samples on the M^n torus grid, keeping
/// frequencies -P..P per axis. `data` is row-major with the last axis fastest.
inline std::vector<Complex> torus_dft(std::vector<Complex> data, std::size_t n, int M, Index P) {
  const std::size_t F = static_cast<std::size_t>(2 * P + 1);
  std::vector<Complex> w(F * static_cast<std::size_t>(M));
  for (std::size_t f = 0; f < F; ++f)
    for (int s = 0; s < M; ++s)
      w[f * static_cast<std::size_t>(M) + static_cast<std::size_t>(s)] =
          std::polar(1.0 / M, -2 * std::numbers::pi * static_cast<double>(static_cast<Index>(f) - P) * s / M);
  std::vector<std::size_t> shape(n, static_cast<std::size_t>(M));
  for (std::size_t axis = 0; axis < n; ++axis) {
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
    for (std::size_t i = axis + 1; i < n; ++i) inner *= shape[i];
    const std::size_t len = shape[axis];
    std::vector<Complex> next(outer * F * inner, Complex(0));
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t f = 0; f < F; ++f)
        for (std::size_t s = 0; s < len; ++s) {
          const Complex ws = w[f * len + s];
          const Complex* src = &data[(o * len + s) * inner];
          Complex* dst = &next[(o * F + f) * inner];
          for (std::size_t in = 0; in < inner; ++in) dst[in] += ws * src[in];
        }
    data = std::move(next);
    shape[axis] = F;
  }
  return data;
}

inline std::vector<Complex> torus_samples(const PolarFn& phi, std::span<const double> r, std::size_t n, int M) {
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= static_cast<std::size_t>(M);
  std::vector<Complex> data(total);
  std::vector<double> th(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t j = n; j-- > 0;) {
      th[j] = 2 * std::numbers::pi * static_cast<double>(rest % static_cast<std::size_t>(M)) / M;
      rest /= static_cast<std::size_t>(M);
    }
    data[idx] = phi(r, th);
  }
  return data;
}

}  // namespace detail

/// (2π)^{-n} ∫ φ(r, θ) e^{-ip·θ} dθ by the M-point trapezoid rule per axis.
inline Complex fourier_slice(const PolarFn& phi, const MultiIndex& p, std::span<const double> r, int theta_samples) {
  const std::size_t n = p.size();
  Index P = 0;
  for (std::size_t j = 0; j < n; ++j) P = std::max(P, p[j] < 0 ? -p[j] : p[j]);
  const auto all = detail::torus_dft(detail::torus_samples(phi, r, n, theta_samples), n, theta_samples, P);
  std::size_t flat = 0;
  for (std::size_t j = 0; j < n; ++j) flat = flat * static_cast<std::size_t>(2 * P + 1) + static_cast<std::size_t>(p[j] + P);
  return all[flat];
}

/// A bounded symbol together with its Fourier slices f_p, |p_j| <= p_max.
class SlicedSymbol {
 public:
  SlicedSymbol(PolarFn source, std::size_t n, Index p_max, double sup_bound, int theta_samples = 0,
               std::string label = {})
      : source_(std::move(source)), n_(n), p_max_(p_max), sup_(sup_bound),
        samples_(theta_samples > 0 ? theta_samples : static_cast<int>(4 * (p_max + 4))), label_(std::move(label)) {
    if (p_max_ < 0) throw ConfigError("p_max must be nonnegative");
    if (!(sup_ >= 0) || !std::isfinite(sup_)) throw ConfigError("sup bound must be finite and nonnegative");
    if (samples_ <= 2 * p_max_) throw ConfigError("theta_samples must exceed 2*p_max");
    IndexBox(MultiIndex(n_, -p_max_), MultiIndex(n_, p_max_ + 1)).for_each([&](const MultiIndex& p) {
      freqs_.push_back(p);
    });
  }

  std::size_t dim() const { return n_; }
  Index p_max() const { return p_max_; }
  int theta_samples() const { return samples_; }
  double sup_bound() const { return sup_; }
  const std::string& label() const { return label_; }
  const PolarFn& source() const { return source_; }
  /// All slice frequencies in lexicographic order; slices_at fills them in this order.
  const std::vector<MultiIndex>& frequencies() const { return freqs_; }

  std::vector<Complex> slices_at(std::span<const double> r) const {
    return detail::torus_dft(detail::torus_samples(source_, r, n_, samples_), n_, samples_, p_max_);
  }

  Complex slice(const MultiIndex& p, std::span<const double> r) const {
    for (std::size_t j = 0; j < n_; ++j)
      if (p[j] < -p_max_ || p[j] > p_max_) return 0;
    return fourier_slice(source_, p, r, samples_);
  }

  /// f_p as a quasi-homogeneous symbol of twist p; its bound is sup|φ|.
  QhSymbol slice_symbol(const MultiIndex& p) const {
    const SlicedSymbol self = *this;
    return QhSymbol([self, p](std::span<const double> r) { return self.slice(p, r); }, p, sup_,
                    label_ + "[p=" + p.to_string() + "]");
  }

  Complex reconstruct(std::span<const double> r, std::span<const double> theta) const {
    const auto s = slices_at(r);
    Complex acc = 0;
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
      double phase = 0;
      for (std::size_t j = 0; j < n_; ++j) phase += static_cast<double>(freqs_[i][j]) * theta[j];
      acc += s[i] * std::polar(1.0, phase);
    }
    return acc;
  }

  /// sup over random (r, θ) of |φ - Σ_p f_p e^{ip·θ}|: the truncation error at p_max.
  double residual(const DomainProfile& d, std::uint64_t seed = 0, int samples = 64) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
    double worst = 0;
    std::vector<double> th(n_);
    for (int s = 0; s < samples; ++s) {
      const auto r = sample_point(d, rng);
      for (auto& t : th) t = angle(rng);
      worst = std::max(worst, std::abs(source_(r, th) - reconstruct(r, th)));
    }
    return worst;
  }

 private:
  PolarFn source_;
  std::size_t n_;
  Index p_max_;
  double sup_;
  int samples_;
  std::string label_;
  std::vector<MultiIndex> freqs_;
};

/// t ↦ f(√t) t^e with e = k_1 + ... + k_{j-1} + k_j/2, kept as the doubled exponent 2e.
struct Profile {
  PointFn radial;
  MultiIndex doubled;
  double sup_bound = 0;

  Complex operator()(std::span<const double> t) const {
    if (!radial) return 0;
    thread_local std::vector<double> s;
    s.resize(t.size());
    double p = 1;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (!(t[j] > 0)) return 0;
      s[j] = std::sqrt(t[j]);
      p *= std::pow(s[j], static_cast<double>(doubled[j]));
    }
    return radial(s) * p;
  }

  RadialIntegrand integrand() const {
    if (!radial) return {};
    const Profile self = *this;
    return {[self](std::span<const double> t) { return self(t); }, sup_bound};
  }
};

inline Profile g_profile(const DomainProfile& d, std::span<const MultiIndex> prior, const MultiIndex& kj,
                         const PointFn& f, double sup_bound) {
  MultiIndex e = kj;
  for (const auto& k : prior) e += k + k;
  for (std::size_t j = 0; j < e.size(); ++j)
    if (e[j] < 0 && d.touches_axis(j))
      throw UnboundedProfile("unbounded profile: exponent " + e.to_string() + "/2 is negative on axis " +
                             std::to_string(j) + "; raise the starting index k0");
  return {f, e, f ? sup_bound : 0.0};
}

}  // namespace rt
