#pragma once
// Radial profiles of bounded Reinhardt domains.
//
// A profile stores a base region B ⊂ R^n_{>=0} and a coordinate map: the
// indicator at x is B(y) with y_j = (s_j x_j)^p. Squaring (t ↦ √t) and
// rescaling (x ↦ c x) only update (s, p), so every derived profile keeps the
// base description needed for exact section limits and closed forms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rt/error.hpp"
#include "rt/text.hpp"

namespace rt {

enum class DomainKind { Polydisk, Ball, Ellipsoid, Generic, Table };

inline constexpr double kRescaleMargin = 0x1p-10;

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Region { combine_j (a_j x_j)^{e_j} < 1 } with combine = max or sum.
struct SeparableForm {
  enum class Combiner { Max, Sum };
  Combiner combiner = Combiner::Max;
  std::vector<double> a, e;

  double level(std::size_t j, double x) const { return std::pow(a[j] * x, e[j]); }
  /// Largest x with level(j, x) < budget.
  double section(std::size_t j, double budget) const {
    return budget <= 0 ? 0.0 : std::pow(budget, 1.0 / e[j]) / a[j];
  }
  /// Section limit of coordinate j given the earlier coordinates.
  double limit(std::size_t j, std::span<const double> prefix) const {
    if (combiner == Combiner::Max) return section(j, 1.0);
    double budget = 1.0;
    for (std::size_t i = 0; i < j; ++i) budget -= level(i, prefix[i]);
    return section(j, budget);
  }
  bool contains(std::span<const double> x) const {
    double acc = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double l = level(j, x[j]);
      acc = combiner == Combiner::Max ? std::max(acc, l) : acc + l;
    }
    return acc < 1.0;
  }
};

/// Regular grid of 0/1 flags read from CSV rows "x_1,...,x_n,flag".
class GridTable {
 public:
  static std::shared_ptr<const GridTable> load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open table '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      bool numeric = true;
      while (std::getline(ss, cell, ',')) {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(cell, &used));
        } catch (const std::exception&) {
          numeric = false;
          break;
        }
      }
      if (!numeric) {
        if (rows.empty()) continue;  // header
        throw ConfigError("table '" + path + "': non-numeric row '" + line + "'");
      }
      if (!rows.empty() && row.size() != rows.front().size())
        throw ConfigError("table '" + path + "': ragged row '" + line + "'");
      rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().size() < 2) throw ConfigError("table '" + path + "' has no grid rows");
    return std::make_shared<const GridTable>(rows, path);
  }

  GridTable(const std::vector<std::vector<double>>& rows, std::string source) : source_(std::move(source)) {
    n_ = rows.front().size() - 1;
    axes_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      for (const auto& r : rows) axes_[j].push_back(r[j]);
      std::sort(axes_[j].begin(), axes_[j].end());
      axes_[j].erase(std::unique(axes_[j].begin(), axes_[j].end()), axes_[j].end());
      const auto& ax = axes_[j];
      if (ax.front() < 0) throw ConfigError("table grid has negative coordinates");
      step_.push_back(ax.size() > 1 ? (ax.back() - ax.front()) / static_cast<double>(ax.size() - 1) : 1.0);
      for (std::size_t i = 1; i < ax.size(); ++i)
        if (std::abs(ax[i] - ax[i - 1] - step_[j]) > 1e-9 * std::max(1.0, step_[j]))
          throw ConfigError("table grid is not regular along axis " + std::to_string(j + 1));
    }
    std::size_t total = 1;
    for (const auto& ax : axes_) total *= ax.size();
    flags_.assign(total, 2);
    for (const auto& r : rows) {
      std::size_t flat = 0;
      for (std::size_t j = 0; j < n_; ++j) flat = flat * axes_[j].size() + nearest(j, r[j]).value();
      flags_[flat] = r[n_] != 0 ? 1 : 0;
    }
    if (std::count(flags_.begin(), flags_.end(), 2) != 0) throw ConfigError("table grid has missing cells");
  }

  std::size_t dim() const { return n_; }
  const std::string& source() const { return source_; }
  const std::vector<double>& axis(std::size_t j) const { return axes_[j]; }
  double step(std::size_t j) const { return step_[j]; }
  double upper(std::size_t j) const { return axes_[j].back() + step_[j] / 2; }

  std::optional<std::size_t> nearest(std::size_t j, double y) const {
    const double u = (y - axes_[j].front()) / step_[j];
    if (u < -0.5 || u >= static_cast<double>(axes_[j].size()) - 0.5) return std::nullopt;
    return static_cast<std::size_t>(std::clamp<long long>(std::llround(u), 0, static_cast<long long>(axes_[j].size() - 1)));
  }

  bool contains(std::span<const double> y) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      const auto i = nearest(j, y[j]);
      if (!i) return false;
      flat = flat * axes_[j].size() + *i;
    }
    return flags_[flat] == 1;
  }

  /// Calls fn(lower, upper) for every cell flagged 1, cells clipped to y >= 0.
  template <class Fn>
  void for_each_cell(Fn&& fn) const {
    std::vector<std::size_t> idx(n_, 0);
    std::vector<double> lo(n_), hi(n_);
    for (std::size_t flat = 0; flat < flags_.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t j = n_; j-- > 0;) {
        idx[j] = rem % axes_[j].size();
        rem /= axes_[j].size();
      }
      if (flags_[flat] != 1) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        lo[j] = lower_edge(j, idx[j]);
        hi[j] = axes_[j][idx[j]] + step_[j] / 2;
      }
      fn(std::span<const double>(lo), std::span<const double>(hi));
    }
  }

  /// Lower cell edge, snapped to 0 when it lies within rounding of the axis.
  double lower_edge(std::size_t j, std::size_t i) const {
    const double lo = axes_[j][i] - step_[j] / 2;
    return lo <= 1e-9 * step_[j] ? 0.0 : lo;
  }

  /// The closure of the on-cells meets {y_j = 0}.
  bool touches_axis(std::size_t j) const {
    if (lower_edge(j, 0) > 0) return false;
    bool hit = false;
    for_each_cell([&](std::span<const double> lo, std::span<const double>) { hit = hit || lo[j] <= 0; });
    return hit;
  }

 private:
  std::size_t n_ = 0;
  std::string source_;
  std::vector<std::vector<double>> axes_;
  std::vector<double> step_;
  std::vector<std::uint8_t> flags_;
};

using RadialPredicate = std::function<bool(std::span<const double>)>;

struct GenericOptions {
  std::string name = "generic";
  /// Declared downward closed: x inside and 0 <= y <= x imply y inside.
  bool downward_closed = false;
  /// Per-coordinate: the closure meets {x_j = 0}. Empty means all true.
  std::vector<bool> touches_axis;
};

class DomainProfile {
 public:
  static DomainProfile polydisk(std::vector<double> radii) {
    check_positive(radii, "polydisk radius");
    DomainProfile d(DomainKind::Polydisk, radii.size());
    d.base_bound_ = radii;
    d.params_ = radii;
    d.base_form_ = SeparableForm{SeparableForm::Combiner::Max, inverse(radii), std::vector<double>(radii.size(), 1.0)};
    d.downward_closed_ = true;
    return d;
  }

  static DomainProfile ball(std::size_t n, double radius) {
    if (n == 0) throw ConfigError("ball needs a positive dimension");
    check_positive({radius}, "ball radius");
    DomainProfile d(DomainKind::Ball, n);
    d.base_bound_.assign(n, radius);
    d.params_ = {radius};
    d.base_form_ = SeparableForm{SeparableForm::Combiner::Sum, std::vector<double>(n, 1.0 / radius),
                                 std::vector<double>(n, 2.0)};
    d.downward_closed_ = true;
    return d;
  }

  /// Σ (x_j / radius)^{p_j} < 1.
  static DomainProfile ellipsoid(std::vector<double> exponents, double radius) {
    if (exponents.empty()) throw ConfigError("ellipsoid needs exponents");
    check_positive(exponents, "ellipsoid exponent");
    check_positive({radius}, "ellipsoid radius");
    DomainProfile d(DomainKind::Ellipsoid, exponents.size());
    d.base_bound_.assign(exponents.size(), radius);
    d.params_ = exponents;
    d.params_.push_back(radius);
    d.base_form_ = SeparableForm{SeparableForm::Combiner::Sum, std::vector<double>(exponents.size(), 1.0 / radius),
                                 exponents};
    d.downward_closed_ = true;
    return d;
  }

  static DomainProfile generic(RadialPredicate pred, std::vector<double> bound, GenericOptions opts = {}) {
    if (!pred) throw ConfigError("generic domain needs a predicate");
    if (bound.empty()) throw ConfigError("generic domain needs a bounding radius");
    DomainProfile d(DomainKind::Generic, bound.size());
    d.base_bound_ = std::move(bound);
    d.predicate_ = std::make_shared<const RadialPredicate>(std::move(pred));
    d.downward_closed_ = opts.downward_closed;
    d.name_ = opts.name;
    if (!opts.touches_axis.empty()) {
      if (opts.touches_axis.size() != d.n_) throw ConfigError("touches_axis has the wrong length");
      d.touches_ = opts.touches_axis;
    }
    return d;
  }

  static DomainProfile table(std::shared_ptr<const GridTable> grid) {
    DomainProfile d(DomainKind::Table, grid->dim());
    for (std::size_t j = 0; j < d.n_; ++j) {
      d.base_bound_.push_back(grid->upper(j));
      d.touches_[j] = grid->touches_axis(j);
    }
    d.table_ = std::move(grid);
    return d;
  }

  std::size_t dim() const { return n_; }
  DomainKind kind() const { return kind_; }
  /// Polydisk: radii. Ball: {R}. Ellipsoid: exponents followed by the radius.
  const std::vector<double>& parameters() const { return params_; }
  const std::vector<double>& map_scale() const { return s_; }
  double map_power() const { return p_; }
  bool is_base() const {
    return p_ == 1.0 && std::all_of(s_.begin(), s_.end(), [](double v) { return v == 1.0; });
  }
  bool downward_closed() const { return downward_closed_; }
  bool touches_axis(std::size_t j) const { return touches_.at(j); }
  /// The closure meets every coordinate hyperplane, so only α ∈ N^n have finite norm.
  bool contains_origin() const { return std::all_of(touches_.begin(), touches_.end(), [](bool b) { return b; }); }
  const GridTable* grid() const { return table_.get(); }

  /// Per-coordinate bound: the indicator is false beyond it.
  std::vector<double> bounding_radius() const {
    std::vector<double> b(n_);
    for (std::size_t j = 0; j < n_; ++j) b[j] = std::pow(base_bound_[j], 1.0 / p_) / s_[j];
    return b;
  }

  /// Separable description in the profile's own coordinates, when the kind has one.
  std::optional<SeparableForm> separable() const {
    if (!base_form_) return std::nullopt;
    SeparableForm f = *base_form_;
    for (std::size_t j = 0; j < n_; ++j) {
      f.a[j] = std::pow(f.a[j], 1.0 / p_) * s_[j];
      f.e[j] *= p_;
    }
    return f;
  }

  /// Base coordinates y_j = (s_j x_j)^p.
  void to_base(std::span<const double> x, std::span<double> y) const {
    for (std::size_t j = 0; j < n_; ++j) y[j] = p_ == 1.0 ? s_[j] * x[j] : std::pow(s_[j] * x[j], p_);
  }
  /// Inverse of to_base for one coordinate.
  double from_base(std::size_t j, double y) const { return std::pow(y, 1.0 / p_) / s_[j]; }

  bool indicator(std::span<const double> x) const {
    if (x.size() != n_) throw ConfigError("point has the wrong dimension");
    const auto bound = bounding_radius();
    for (std::size_t j = 0; j < n_; ++j)
      if (!(x[j] >= 0) || x[j] > bound[j]) return false;
    double buf[16];
    std::vector<double> heap;
    std::span<double> y;
    if (n_ <= 16) {
      y = std::span<double>(buf, n_);
    } else {
      heap.resize(n_);
      y = heap;
    }
    to_base(x, y);
    switch (kind_) {
      case DomainKind::Generic:
        return (*predicate_)(std::span<const double>(y.data(), n_));
      case DomainKind::Table:
        return table_->contains(std::span<const double>(y.data(), n_));
      default:
        return base_form_->contains(std::span<const double>(y.data(), n_));
    }
  }

  /// Profile whose indicator at x is this->indicator((c·x)^q), componentwise.
  DomainProfile composed(std::span<const double> c, double q) const {
    DomainProfile d = *this;
    for (std::size_t j = 0; j < n_; ++j) d.s_[j] = std::pow(s_[j], 1.0 / q) * c[j];
    d.p_ = p_ * q;
    return d;
  }

  /// Canonical text: the base spec plus the coordinate map when it is not the identity.
  std::string id() const {
    std::string out = base_spec();
    if (!is_base()) {
      out += "|map(s=(";
      for (std::size_t j = 0; j < n_; ++j) out += (j ? "," : "") + format_real(s_[j]);
      out += "),p=" + format_real(p_) + ")";
    }
    return out;
  }

  std::string base_spec() const {
    auto list = [](const std::vector<double>& v, std::size_t count) {
      std::string s;
      for (std::size_t i = 0; i < count; ++i) s += (i ? "," : "") + format_real(v[i]);
      return s;
    };
    switch (kind_) {
      case DomainKind::Polydisk:
        return "polydisk(" + list(params_, n_) + ")";
      case DomainKind::Ball:
        return "ball(" + format_real(params_[0]) + ", n=" + std::to_string(n_) + ")";
      case DomainKind::Ellipsoid:
        return "ellipsoid(p=(" + list(params_, n_) + "), r=" + format_real(params_[n_]) + ")";
      case DomainKind::Table:
        return "table(" + table_->source() + ")";
      case DomainKind::Generic:
        return "generic(" + name_ + ")";
    }
    return "?";
  }

 private:
  DomainProfile(DomainKind k, std::size_t n) : kind_(k), n_(n), s_(n, 1.0), touches_(n, true) {}

  static void check_positive(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw ConfigError(std::string(what) + " list is empty");
    for (double x : v)
      if (!(x > 0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be positive and finite");
  }
  static std::vector<double> inverse(const std::vector<double>& v) {
    std::vector<double> r;
    for (double x : v) r.push_back(1.0 / x);
    return r;
  }

  DomainKind kind_;
  std::size_t n_;
  std::vector<double> base_bound_;
  std::vector<double> params_;
  std::optional<SeparableForm> base_form_;
  std::shared_ptr<const RadialPredicate> predicate_;
  std::shared_ptr<const GridTable> table_;
  std::string name_;
  std::vector<double> s_;
  double p_ = 1.0;
  bool downward_closed_ = false;
  std::vector<bool> touches_;
};

/// Ω̃⁺: indicator at t is D.indicator(√t).
inline DomainProfile squared_region(const DomainProfile& d) {
  const std::vector<double> ones(d.dim(), 1.0);
  return d.composed(ones, 0.5);
}

struct Rescaled {
  DomainProfile profile;
  std::vector<double> scale;
};

/// Returns D' with D'.indicator(x) = D.indicator(scale·x) and D' ⊂ [0,1)^n.
inline Rescaled rescale_into_unit_box(const DomainProfile& d) {
  auto bound = d.bounding_radius();
  for (double& b : bound) {
    if (!std::isfinite(b) || !(b > 0)) throw ConfigError("unbounded profile cannot be rescaled");
    b *= 1.0 + kRescaleMargin;
  }
  return {d.composed(bound, 1.0), bound};
}

/// Uniform sample from the profile by rejection in its bounding box.
template <class Rng>
std::vector<double> sample_point(const DomainProfile& d, Rng& rng) {
  const auto bound = d.bounding_radius();
  std::vector<double> x(d.dim());
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    for (std::size_t j = 0; j < d.dim(); ++j) x[j] = std::uniform_real_distribution<double>(0.0, bound[j])(rng);
    if (d.indicator(x)) return x;
  }
  throw NumericError("could not sample a point inside " + d.id());
}

/// Parses "polydisk(1,1)", "ball(1)", "ball(1, n=3)", "ellipsoid(p=(2,4), r=1)"
/// or "table(file.csv)". `dim` supplies the dimension of a ball when the spec omits it.
inline DomainProfile parse_domain(std::string_view spec, std::optional<std::size_t> dim = std::nullopt) {
  text::Cursor c(spec);
  const std::string kind = c.identifier();
  c.expect('(');
  DomainProfile d = [&] {
    if (kind == "polydisk") {
      std::vector<double> radii;
      do radii.push_back(c.number());
      while (c.accept(','));
      return DomainProfile::polydisk(radii);
    }
    if (kind == "ball") {
      if (c.accept_word("r")) c.expect('=');
      const double r = c.number();
      std::optional<std::size_t> n = dim;
      if (c.accept(',')) {
        if (!c.accept_word("n")) c.fail("'n='");
        c.expect('=');
        n = static_cast<std::size_t>(c.integer());
      }
      if (!n) throw ConfigError("ball needs a dimension: write ball(r, n=N)");
      return DomainProfile::ball(*n, r);
    }
    if (kind == "ellipsoid") {
      if (!c.accept_word("p")) c.fail("'p='");
      c.expect('=');
      const auto p = c.real_tuple();
      c.expect(',');
      if (!c.accept_word("r")) c.fail("'r='");
      c.expect('=');
      return DomainProfile::ellipsoid(p, c.number());
    }
    if (kind == "table") {
      std::string path;
      if (c.peek() == '"') {
        path = c.quoted();
      } else {
        const std::string rest = c.rest();
        const auto close = rest.rfind(')');
        if (close == std::string::npos) c.fail("')'");
        path = rest.substr(0, close);
        while (!path.empty() && std::isspace(static_cast<unsigned char>(path.back()))) path.pop_back();
        return DomainProfile::table(GridTable::load(path));
      }
      return DomainProfile::table(GridTable::load(path));
    }
    throw ParseError(0, "polydisk, ball, ellipsoid or table", kind);
  }();
  if (kind != "table" || c.peek() == ')') {
    c.expect(')');
    if (!c.at_end()) c.fail("end of domain spec");
  }
  if (dim && *dim != d.dim())
    throw ConfigError("domain " + d.id() + " has dimension " + std::to_string(d.dim()) + ", expected " +
                      std::to_string(*dim));
  return d;
}

}  // namespace rt
