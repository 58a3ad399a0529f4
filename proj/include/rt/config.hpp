#pragma once
// Configuration files and symbol specs.
//
// File grammar (one item per line):
//   [section]
//   key = value        # comment
// Keys may repeat; repeated values keep their order. Blank lines and lines
// starting with '#' are ignored. A '#' inside double quotes is kept.
//
// Symbol specs:
//   qh(twist=(1,0), radial="r1^2 - 0.5" [, sup=1])
//   sum(box=[(0,0),(2,2)), terms=[(0,0):"r1", (1,1):"0.5*r2"] [, sup=...])
//   linf("z1 + conj(z2)" [, p_max=2] [, sup=2])
// Radial parts are expressions in r1..rn (t_j = r_j^2); linf symbols may also
// use z_j, th_j. A radial part that is the constant 0 is the zero symbol. A
// missing sup is estimated by sampling the domain.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "rt/domain.hpp"
#include "rt/error.hpp"
#include "rt/expression.hpp"
#include "rt/symbol.hpp"
#include "rt/text.hpp"

namespace rt {

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct ConfigSection {
  std::string name;
  std::size_t line = 0;
  std::vector<ConfigEntry> entries;
};

class Config {
 public:
  static Config parse(std::string_view src, std::string origin = "<config>") {
    Config cfg;
    cfg.origin_ = std::move(origin);
    std::size_t lineno = 0;
    std::istringstream in{std::string(src)};
    std::string raw;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = trim(strip_comment(raw));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') cfg.fail(lineno, "section header must end with ']'");
        std::string name = trim(line.substr(1, line.size() - 2));
        if (name.empty()) cfg.fail(lineno, "empty section name");
        cfg.sections_.push_back({name, lineno, {}});
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) cfg.fail(lineno, "expected 'key = value'");
      if (cfg.sections_.empty()) cfg.fail(lineno, "entry outside of any section");
      std::string key = trim(line.substr(0, eq));
      if (key.empty()) cfg.fail(lineno, "empty key");
      cfg.sections_.back().entries.push_back({key, trim(line.substr(eq + 1)), lineno});
    }
    return cfg;
  }

  static Config load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
  }

  const std::vector<ConfigSection>& sections() const { return sections_; }
  const std::string& origin() const { return origin_; }

  bool has_section(std::string_view name) const {
    for (const auto& s : sections_)
      if (s.name == name) return true;
    return false;
  }

  /// Every value of `key` across all sections named `section`, in file order.
  std::vector<ConfigEntry> all(std::string_view section, std::string_view key) const {
    std::vector<ConfigEntry> out;
    for (const auto& s : sections_)
      if (s.name == section)
        for (const auto& e : s.entries)
          if (e.key == key) out.push_back(e);
    return out;
  }

  std::optional<ConfigEntry> entry(std::string_view section, std::string_view key) const {
    auto v = all(section, key);
    if (v.empty()) return std::nullopt;
    if (v.size() > 1) fail(v[1].line, "key '" + std::string(key) + "' given more than once");
    return v.front();
  }

  std::optional<std::string> get(std::string_view section, std::string_view key) const {
    auto e = entry(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::string require(std::string_view section, std::string_view key) const {
    auto v = get(section, key);
    if (!v) throw ConfigError(origin_ + ": missing [" + std::string(section) + "] " + std::string(key));
    return *v;
  }

  std::optional<double> get_real(std::string_view section, std::string_view key) const {
    auto e = entry(section, key);
    if (!e) return std::nullopt;
    return checked(*e, [](text::Cursor& c) { return c.number(); });
  }

  std::optional<Index> get_int(std::string_view section, std::string_view key) const {
    auto e = entry(section, key);
    if (!e) return std::nullopt;
    return checked(*e, [](text::Cursor& c) { return c.integer(); });
  }

  std::optional<MultiIndex> get_tuple(std::string_view section, std::string_view key) const {
    auto e = entry(section, key);
    if (!e) return std::nullopt;
    try {
      return text::parse_tuple(e->value);
    } catch (const ConfigError& err) {
      fail(e->line, err.what());
    }
  }

  /// Rejects keys outside `known` in the given section.
  void allow_only(std::string_view section, std::initializer_list<std::string_view> known) const {
    for (const auto& s : sections_) {
      if (s.name != section) continue;
      for (const auto& e : s.entries)
        if (std::find(known.begin(), known.end(), e.key) == known.end())
          fail(e.line, "unknown key '" + e.key + "' in [" + s.name + "]");
    }
  }

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }

  static std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
  }

 private:
  template <class Fn>
  std::invoke_result_t<Fn, text::Cursor&> checked(const ConfigEntry& e, Fn&& read) const {
    try {
      text::Cursor c(e.value);
      auto v = read(c);
      if (!c.at_end()) c.fail("end of value");
      return v;
    } catch (const ConfigError& err) {
      fail(e.line, "[" + e.key + "] " + err.what());
    }
  }

  static std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }

  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  std::string origin_;
  std::vector<ConfigSection> sections_;
};

enum class SymbolKind { Qh, Sum, Linf };

/// A parsed symbol spec. Qh symbols are stored as one-term sums.
struct SymbolSpec {
  SymbolKind kind = SymbolKind::Qh;
  std::string source;
  SymbolSum sum;
  std::optional<SlicedSymbol> sliced;
  bool sup_estimated = false;

  /// The single term of a qh spec (the zero symbol when the term is absent).
  QhSymbol qh() const {
    if (kind != SymbolKind::Qh) throw ConfigError("symbol '" + source + "' is not quasi-homogeneous");
    if (sum.terms().empty()) return QhSymbol::zero(sum.box().lower());
    return sum.terms().begin()->second;
  }
};

namespace detail {

inline PointFn radial_fn(const Expression& e) {
  return [e](std::span<const double> r) { return e(r); };
}

inline bool is_zero_expression(const Expression& e) { return e.is_constant() && e({}) == Complex(0); }

/// sup |φ(r e^{iθ})| over random samples of Ω⁺ × T^n, inflated slightly.
inline double estimate_polar_sup(const PolarFn& phi, const DomainProfile& d, std::uint64_t seed, int samples = 4096) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
  std::vector<double> th(d.dim());
  double m = 0;
  for (int s = 0; s < samples; ++s) {
    const auto r = sample_point(d, rng);
    for (auto& t : th) t = angle(rng);
    m = std::max(m, std::abs(phi(r, th)));
  }
  return m;
}

inline QhSymbol make_qh(const std::string& src, const MultiIndex& twist, std::optional<double> sup,
                        const DomainProfile& d, std::uint64_t seed, bool& estimated) {
  const auto e = Expression::parse(src);
  e.require_dim(d.dim());
  if (e.uses_angles()) throw ConfigError("radial part '" + src + "' depends on angles; use linf(...) instead");
  if (twist.size() != d.dim())
    throw ConfigError("twist " + twist.to_string() + " does not match the domain dimension " +
                      std::to_string(d.dim()));
  if (is_zero_expression(e)) return QhSymbol({}, twist, 0, src);
  const PointFn f = radial_fn(e);
  if (sup) {
    QhSymbol s(f, twist, *sup, src);
    s.spot_check(d, seed);
    return s;
  }
  estimated = true;
  return QhSymbol(f, twist, estimate_sup(f, d, seed) * (1 + 1e-3), src);
}

inline std::optional<double> optional_sup(text::Cursor& c) {
  if (!c.accept(',')) return std::nullopt;
  if (!c.accept_word("sup")) c.fail("'sup='");
  c.expect('=');
  return c.number();
}

}  // namespace detail

inline SymbolSpec parse_symbol_spec(std::string_view spec, const DomainProfile& d, std::uint64_t seed = 0) {
  text::Cursor c(spec);
  SymbolSpec out;
  out.source = std::string(spec);
  const std::string kind = c.identifier();
  c.expect('(');
  if (kind == "qh") {
    out.kind = SymbolKind::Qh;
    if (!c.accept_word("twist")) c.fail("'twist='");
    c.expect('=');
    const MultiIndex twist = c.tuple();
    c.expect(',');
    if (!c.accept_word("radial")) c.fail("'radial='");
    c.expect('=');
    const std::string radial = c.quoted();
    const auto sup = detail::optional_sup(c);
    auto s = detail::make_qh(radial, twist, sup, d, seed, out.sup_estimated);
    out.sum = SymbolSum(IndexBox::singleton(twist));
    if (!s.is_zero()) out.sum.add(std::move(s));
  } else if (kind == "sum") {
    out.kind = SymbolKind::Sum;
    if (!c.accept_word("box")) c.fail("'box='");
    c.expect('=');
    c.expect('[');
    const MultiIndex lo = c.tuple();
    c.expect(',');
    const MultiIndex hi = c.tuple();
    c.expect(')');
    if (lo.size() != d.dim() || hi.size() != d.dim()) throw ConfigError("box does not match the domain dimension");
    out.sum = SymbolSum(IndexBox(lo, hi));
    c.expect(',');
    if (!c.accept_word("terms")) c.fail("'terms='");
    c.expect('=');
    c.expect('[');
    if (!c.accept(']')) {
      do {
        const MultiIndex k = c.tuple();
        c.expect(':');
        const std::string radial = c.quoted();
        auto term = detail::make_qh(radial, k, std::nullopt, d, seed, out.sup_estimated);
        if (!term.is_zero()) out.sum.add(std::move(term));
      } while (c.accept(','));
      c.expect(']');
    }
    if (auto sup = detail::optional_sup(c)) {
      // A declared bound for the whole sum replaces the per-term estimates.
      SymbolSum rescaled(out.sum.box());
      const double total = out.sum.sup_bound();
      for (const auto& [k, t] : out.sum.terms())
        rescaled.add(QhSymbol(t.radial(), k, total > 0 ? *sup * t.sup_bound() / total : 0, t.label()));
      out.sum = std::move(rescaled);
      out.sup_estimated = false;
    }
  } else if (kind == "linf") {
    out.kind = SymbolKind::Linf;
    const std::string src = c.quoted();
    const auto e = Expression::parse(src);
    e.require_dim(d.dim());
    Index p_max = 2;
    std::optional<double> sup;
    while (c.accept(',')) {
      if (c.accept_word("p_max")) {
        c.expect('=');
        p_max = c.integer();
      } else if (c.accept_word("sup")) {
        c.expect('=');
        sup = c.number();
      } else {
        c.fail("'p_max=' or 'sup='");
      }
    }
    const PolarFn phi = [e](std::span<const double> r, std::span<const double> th) { return e(r, th); };
    if (!sup) {
      out.sup_estimated = true;
      sup = detail::estimate_polar_sup(phi, d, seed) * (1 + 1e-3);
    }
    out.sliced.emplace(phi, d.dim(), p_max, *sup, 0, src);
  } else {
    throw ParseError(0, "qh, sum or linf", kind);
  }
  c.expect(')');
  if (!c.at_end()) c.fail("end of symbol spec");
  return out;
}

/// A symbols file: one spec per non-empty line, '#' comments, φ₁ first.
inline std::vector<std::string> read_symbols_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open symbols file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto b = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(a, b - a + 1));
  }
  if (out.empty()) throw ConfigError("symbols file " + path.string() + " lists no symbols");
  return out;
}

}  // namespace rt
