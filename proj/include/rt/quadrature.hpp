#pragma once
// Batched quadrature over a radial region R ⊂ [0, B]^n.
//
// Integrands are vector valued: one call at a node fills every component, so
// a whole lattice of moments shares the nodes and the (expensive) radial
// function evaluations.
//
//   separable or downward closed regions  iterated tanh-sinh, section limits
//                                         from the separable form or bisection
//   tables                                cell-exact tensor Gauss-Legendre
//   other indicators                      dyadic subdivision (corner + centre
//                                         test, Gauss-Legendre inside,
//                                         midpoint rule on boundary leaves)

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rt/domain.hpp"
#include "rt/error.hpp"

namespace rt::quad {

using Complex = std::complex<double>;
using BatchIntegrand = std::function<void(std::span<const double> t, std::span<Complex> out)>;

struct Options {
  double tolerance = 1e-10;
  int min_level = 3;
  int max_level = 8;
  /// Dyadic leaf depth; 0 picks 14 for n <= 2, 8 for n = 3 and 6 above.
  int dyadic_depth = 0;
  bool quadratic_stop = true;
  double stop_factor = 0.1;
};

/// Below this an inner integral counts as settled; keeps subnormal tails near
/// the axes from forcing every refinement level.
inline constexpr double kAbsoluteFloor = 1e-250;

struct Result {
  std::vector<Complex> values;
  /// Estimates of the integral of |f_i|, the scale used by the stopping rule.
  std::vector<double> magnitude;
  bool converged = true;
  std::size_t evaluations = 0;
};

enum class Scheme { TanhSinh, TableCells, Dyadic };

inline Scheme scheme_for(const DomainProfile& region) {
  if (region.separable()) return Scheme::TanhSinh;
  if (region.kind() == DomainKind::Table) return Scheme::TableCells;
  return region.downward_closed() ? Scheme::TanhSinh : Scheme::Dyadic;
}

namespace detail {

struct TsNode {
  double c;  // distance of the node from the nearer endpoint, unit interval
  double w;  // weight per unit step and unit width
};

/// Tanh-sinh abscissae: level 0 holds tau = 0, ±1, ±2, ...; level l > 0 the
/// odd multiples of 2^-l. The centre node is stored with c = 0.5 and is not mirrored.
inline const std::vector<std::vector<TsNode>>& ts_levels() {
  static const std::vector<std::vector<TsNode>> levels = [] {
    constexpr double half_pi = std::numbers::pi / 2;
    std::vector<std::vector<TsNode>> out;
    for (int l = 0; l <= 12; ++l) {
      std::vector<TsNode> nodes;
      const double h = std::ldexp(1.0, -l);
      for (long i = (l == 0 ? 0 : 1);; i += (l == 0 ? 1 : 2)) {
        const double tau = static_cast<double>(i) * h;
        const double u = half_pi * std::sinh(tau);
        const double c = 1.0 / (1.0 + std::exp(2 * u));
        const double ch = std::cosh(u);
        const double w = half_pi * std::cosh(tau) / (2 * ch * ch);
        if (w < 1e-22 || c < 1e-300) break;
        nodes.push_back({tau == 0 ? 0.5 : c, w});
      }
      out.push_back(std::move(nodes));
    }
    return out;
  }();
  return levels;
}

inline constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                                   -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                                   0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                     0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                     0.2223810344533745, 0.1012285362903763};

inline std::string point_text(std::span<const double> t) {
  std::string s = "(";
  for (std::size_t j = 0; j < t.size(); ++j) s += (j ? "," : "") + format_real(t[j]);
  return s + ")";
}

class Integrator {
 public:
  Integrator(const DomainProfile& region, std::size_t m, const BatchIntegrand& f, const Options& opt)
      : region_(region), m_(m), f_(f), opt_(opt), n_(region.dim()), form_(region.separable()),
        bound_(region.bounding_radius()), t_(n_, 0.0), leaf_(m) {
    work_.resize(n_);
    for (auto& w : work_) {
      w.sum.assign(m, 0);
      w.abs.assign(m, 0);
      w.prev.assign(m, 0);
      w.child.assign(m, 0);
      w.child_abs.assign(m, 0);
    }
  }

  Result run() {
    Result r;
    r.values.assign(m_, 0);
    r.magnitude.assign(m_, 0);
    switch (scheme_for(region_)) {
      case Scheme::TanhSinh:
        axis(0, r.values, r.magnitude);
        break;
      case Scheme::TableCells:
        table_cells(r.values, r.magnitude);
        break;
      case Scheme::Dyadic:
        dyadic(r.values, r.magnitude);
        break;
    }
    r.converged = converged_;
    r.evaluations = evaluations_;
    return r;
  }

 private:
  struct Work {
    std::vector<Complex> sum, prev, child;
    std::vector<double> abs, child_abs;
  };

  void eval(std::span<Complex> out, std::span<double> out_abs) {
    f_(t_, out);
    ++evaluations_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag()))
        throw NumericError("non-finite integrand at t=" + point_text(t_));
      out_abs[i] = std::abs(out[i].real()) + std::abs(out[i].imag());
    }
  }

  double section_limit(std::size_t j) {
    if (form_) return std::min(form_->limit(j, t_), bound_[j]);
    // Downward closed: the section at the current prefix is an interval [0, u).
    for (std::size_t i = j; i < n_; ++i) t_[i] = 0;
    if (!region_.indicator(t_)) return 0;
    double lo = 0, hi = bound_[j];
    t_[j] = hi;
    if (region_.indicator(t_)) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * bound_[j]; ++it) {
      t_[j] = 0.5 * (lo + hi);
      (region_.indicator(t_) ? lo : hi) = t_[j];
    }
    t_[j] = 0;
    return 0.5 * (lo + hi);
  }

  /// Integral over axis j (and, recursively, the later axes) at the current prefix.
  void axis(std::size_t j, std::span<Complex> out, std::span<double> out_abs) {
    const double u = section_limit(j);
    std::fill(out.begin(), out.end(), Complex(0));
    std::fill(out_abs.begin(), out_abs.end(), 0.0);
    if (!(u > 0)) return;
    Work& w = work_[j];
    std::fill(w.sum.begin(), w.sum.end(), Complex(0));
    std::fill(w.abs.begin(), w.abs.end(), 0.0);
    const auto& levels = ts_levels();
    const int max_level = std::min<int>(opt_.max_level, static_cast<int>(levels.size()) - 1);
    auto add_node = [&](double x, double weight) {
      t_[j] = x;
      if (j + 1 == n_) {
        eval(w.child, w.child_abs);
      } else {
        axis(j + 1, w.child, w.child_abs);
      }
      for (std::size_t i = 0; i < m_; ++i) {
        w.sum[i] += weight * w.child[i];
        w.abs[i] += weight * w.child_abs[i];
      }
    };
    for (int l = 0; l <= max_level; ++l) {
      for (const auto& node : levels[l]) {
        if (node.c == 0.5) {
          add_node(0.5 * u, node.w);
        } else {
          add_node(u * node.c, node.w);
          add_node(u - u * node.c, node.w);
        }
      }
      const double h = std::ldexp(u, -l);
      // Each level roughly squares the relative error, so the last difference
      // bounds the error of the previous level and its square that of this one.
      const double accept = opt_.quadratic_stop ? std::sqrt(opt_.tolerance) * opt_.stop_factor : opt_.tolerance;
      bool done = l >= opt_.min_level;
      for (std::size_t i = 0; i < m_; ++i) {
        out[i] = h * w.sum[i];
        out_abs[i] = h * w.abs[i];
        if (done && std::abs(out[i] - w.prev[i]) > accept * out_abs[i] + kAbsoluteFloor) done = false;
        w.prev[i] = out[i];
      }
      if (done) break;
      if (l == max_level) converged_ = false;
    }
    t_[j] = 0;
  }

  /// Tensor Gauss-Legendre of order 8 over the box [lo, hi], accumulated into out.
  void gauss_box(std::span<const double> lo, std::span<const double> hi, std::span<Complex> out,
                 std::span<double> out_abs) {
    double vol = 1;
    for (std::size_t j = 0; j < n_; ++j) vol *= (hi[j] - lo[j]) / 2;
    if (!(vol > 0)) return;
    std::vector<std::size_t> idx(n_, 0);
    for (;;) {
      double weight = vol;
      for (std::size_t j = 0; j < n_; ++j) {
        t_[j] = 0.5 * (lo[j] + hi[j]) + 0.5 * (hi[j] - lo[j]) * kGlNodes[idx[j]];
        weight *= kGlWeights[idx[j]];
      }
      eval(leaf_, leaf_abs());
      for (std::size_t i = 0; i < m_; ++i) {
        out[i] += weight * leaf_[i];
        out_abs[i] += weight * leaf_abs_[i];
      }
      std::size_t j = n_;
      while (j > 0 && ++idx[j - 1] == kGlNodes.size()) idx[--j] = 0;
      if (j == 0) break;
    }
  }

  std::span<double> leaf_abs() {
    leaf_abs_.resize(m_);
    return leaf_abs_;
  }

  void table_cells(std::span<Complex> out, std::span<double> out_abs) {
    std::vector<double> lo(n_), hi(n_);
    region_.grid()->for_each_cell([&](std::span<const double> ylo, std::span<const double> yhi) {
      for (std::size_t j = 0; j < n_; ++j) {
        lo[j] = region_.from_base(j, ylo[j]);
        hi[j] = region_.from_base(j, yhi[j]);
      }
      gauss_box(lo, hi, out, out_abs);
    });
  }

  void dyadic(std::span<Complex> out, std::span<double> out_abs) {
    int depth = opt_.dyadic_depth;
    if (depth <= 0) depth = n_ <= 2 ? 14 : (n_ == 3 ? 8 : 6);
    std::vector<double> lo(n_, 0.0), hi = bound_;
    dyadic_cell(lo, hi, depth, out, out_abs);
  }

  void dyadic_cell(std::vector<double>& lo, std::vector<double>& hi, int depth, std::span<Complex> out,
                   std::span<double> out_abs) {
    std::size_t inside = 0;
    const std::size_t corners = std::size_t{1} << n_;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      for (std::size_t j = 0; j < n_; ++j) t_[j] = (mask >> j & 1) ? hi[j] : lo[j];
      inside += region_.indicator(t_);
    }
    for (std::size_t j = 0; j < n_; ++j) t_[j] = 0.5 * (lo[j] + hi[j]);
    const bool centre = region_.indicator(t_);
    inside += centre;
    if (inside == 0) return;
    if (inside == corners + 1) {
      gauss_box(lo, hi, out, out_abs);
      return;
    }
    if (depth == 0) {
      if (!centre) return;
      double vol = 1;
      for (std::size_t j = 0; j < n_; ++j) vol *= hi[j] - lo[j];
      eval(leaf_, leaf_abs());
      for (std::size_t i = 0; i < m_; ++i) {
        out[i] += vol * leaf_[i];
        out_abs[i] += vol * leaf_abs_[i];
      }
      return;
    }
    std::vector<double> clo(n_), chi(n_);
    for (std::size_t mask = 0; mask < corners; ++mask) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double mid = 0.5 * (lo[j] + hi[j]);
        clo[j] = (mask >> j & 1) ? mid : lo[j];
        chi[j] = (mask >> j & 1) ? hi[j] : mid;
      }
      dyadic_cell(clo, chi, depth - 1, out, out_abs);
    }
  }

  const DomainProfile& region_;
  std::size_t m_;
  const BatchIntegrand& f_;
  Options opt_;
  std::size_t n_;
  std::optional<SeparableForm> form_;
  std::vector<double> bound_;
  std::vector<double> t_;
  std::vector<Work> work_;
  std::vector<Complex> leaf_;
  std::vector<double> leaf_abs_;
  bool converged_ = true;
  std::size_t evaluations_ = 0;
};

}  // namespace detail

/// ∫_R f(t) dt for an m-component integrand.
inline Result integrate(const DomainProfile& region, std::size_t m, const BatchIntegrand& f, const Options& opt = {}) {
  if (m == 0) return {};
  return detail::Integrator(region, m, f, opt).run();
}

inline Complex integrate_scalar(const DomainProfile& region, const std::function<Complex(std::span<const double>)>& f,
                                const Options& opt = {}) {
  const BatchIntegrand batch = [&](std::span<const double> t, std::span<Complex> out) { out[0] = f(t); };
  return integrate(region, 1, batch, opt).values[0];
}

}  // namespace rt::quad
