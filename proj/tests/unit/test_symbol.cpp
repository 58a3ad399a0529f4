#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rt/expression.hpp"
#include "rt/symbol.hpp"

using rt::Complex;
using rt::DomainProfile;
using rt::MultiIndex;
using rt::QhSymbol;
using rt::SlicedSymbol;

namespace {

rt::PolarFn polar(const std::string& src) {
  const auto e = rt::Expression::parse(src);
  return [e](std::span<const double> r, std::span<const double> th) { return e(r, th); };
}

/// Random trigonometric polynomial Σ a_p(r) e^{ip·θ}, |p_j| <= deg, a_p = c_p r1^{u} r2^{v}.
struct TrigPoly {
  std::vector<std::pair<MultiIndex, Complex>> terms;
  std::vector<std::pair<int, int>> powers;

  Complex operator()(std::span<const double> r, std::span<const double> th) const {
    Complex acc = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& [p, c] = terms[i];
      acc += c * std::pow(r[0], powers[i].first) * std::pow(r[1], powers[i].second) *
             std::polar(1.0, static_cast<double>(p[0]) * th[0] + static_cast<double>(p[1]) * th[1]);
    }
    return acc;
  }
};

TrigPoly random_trig_poly(std::mt19937_64& rng, int deg) {
  TrigPoly t;
  std::uniform_int_distribution<int> freq(-deg, deg), pw(0, 3), count(1, 6);
  std::uniform_real_distribution<double> c(-1, 1);
  for (int i = count(rng); i > 0; --i) {
    t.terms.push_back({MultiIndex{freq(rng), freq(rng)}, Complex(c(rng), c(rng))});
    t.powers.push_back({pw(rng), pw(rng)});
  }
  return t;
}

}  // namespace

TEST(FourierSlice, Examples) {
  const std::vector<double> r{0.5, 0.3};
  EXPECT_NEAR(std::abs(rt::fourier_slice(polar("z1"), {1, 0}, r, 16) - 0.5), 0, 1e-15);
  EXPECT_NEAR(std::abs(rt::fourier_slice(polar("abs(z1)^2"), {0, 0}, r, 16) - 0.25), 0, 1e-15);
  EXPECT_NEAR(std::abs(rt::fourier_slice(polar("z1 + conj(z2)"), {0, -1}, r, 16) - 0.3), 0, 1e-15);
  // Frequencies absent from the symbol.
  EXPECT_LT(std::abs(rt::fourier_slice(polar("z1 + conj(z2)"), {0, 1}, r, 16)), 1e-16);
}

TEST(FourierSlice, QhSymbolSlicesToItsRadialPart) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> tw(-2, 2);
  std::uniform_real_distribution<double> u(0.05, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const MultiIndex k{tw(rng), tw(rng)};
    const double a = u(rng), b = u(rng);
    const QhSymbol phi([a, b](std::span<const double> r) { return Complex(a + b * r[0] * r[1], a * r[1]); }, k,
                       a + b + a);
    const SlicedSymbol sliced([phi](auto r, auto th) { return phi(r, th); }, 2, 3, phi.sup_bound());
    const std::vector<double> r{u(rng), u(rng)};
    const auto s = sliced.slices_at(r);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& p = sliced.frequencies()[i];
      if (p == k)
        EXPECT_NEAR(std::abs(s[i] - phi.radial_at(r)), 0, 1e-14);
      else
        EXPECT_LE(std::abs(s[i]), 1e-12 * phi.sup_bound()) << p;
    }
  }
}

TEST(FourierSlice, ReconstructsTrigonometricPolynomials) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1), ang(0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 20; ++trial) {
    const auto poly = random_trig_poly(rng, 2);
    const SlicedSymbol sliced(poly, 2, 2, 10.0);
    for (int s = 0; s < 10; ++s) {
      const std::vector<double> r{u(rng), u(rng)}, th{ang(rng), ang(rng)};
      EXPECT_NEAR(std::abs(sliced.reconstruct(r, th) - poly(r, th)), 0, 1e-10);
    }
    EXPECT_LT(sliced.residual(DomainProfile::polydisk({1, 1}), 5, 20), 1e-10);
  }
}

TEST(FourierSlice, TruncationShowsInResidual) {
  const SlicedSymbol sliced(polar("z1^3"), 2, 2, 1.0);
  EXPECT_GT(sliced.residual(DomainProfile::polydisk({1, 1})), 0.1);
}

TEST(FourierSlice, RealSymbolsHaveConjugateSymmetricSlices) {
  const SlicedSymbol sliced(polar("re(z1*conj(z2)) + abs(z1)*cos(th2) + r1^2"), 2, 2, 3.0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  for (int s = 0; s < 20; ++s) {
    const std::vector<double> r{u(rng), u(rng)};
    for (const auto& p : sliced.frequencies())
      EXPECT_NEAR(std::abs(sliced.slice(-p, r) - std::conj(sliced.slice(p, r))), 0, 1e-14);
  }
}

TEST(FourierSlice, SlicesAreBoundedBySup) {
  // |f_p| <= sup|φ| for φ = sign-like bounded symbol with infinitely many slices.
  const SlicedSymbol sliced(polar("exp(i*3*re(z1))*r2"), 2, 3, 1.0);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0, 1);
  for (int s = 0; s < 30; ++s) {
    const std::vector<double> r{u(rng), u(rng)};
    for (const auto v : sliced.slices_at(r)) EXPECT_LE(std::abs(v), 1.0 + 1e-12);
  }
}

TEST(QhSymbol, SpotCheckRejectsFalseBound) {
  const QhSymbol ok([](std::span<const double> r) { return Complex(r[0] * r[0]); }, {1, 0}, 1.0);
  EXPECT_NO_THROW(ok.spot_check(DomainProfile::polydisk({1, 1})));
  const QhSymbol bad([](std::span<const double> r) { return Complex(1 + r[0]); }, {1, 0}, 1.5);
  EXPECT_THROW(bad.spot_check(DomainProfile::polydisk({1, 1})), rt::ConfigError);
  EXPECT_THROW(QhSymbol({}, {0}, -1.0), rt::ConfigError);
  EXPECT_TRUE(QhSymbol::zero({1, 1}).is_zero());
}

TEST(QhSymbol, EvaluatesTwist) {
  const QhSymbol phi([](std::span<const double> r) { return Complex(r[0]); }, {2, -1}, 1.0);
  const std::vector<double> r{0.4, 0.2}, th{0.3, 0.5};
  EXPECT_NEAR(std::abs(phi(r, th) - 0.4 * std::polar(1.0, 0.6 - 0.5)), 0, 1e-16);
}

TEST(SymbolSum, BoxesAndSlices) {
  rt::SymbolSum s(rt::IndexBox({0, 0}, {3, 2}));
  auto term = [](MultiIndex k, double c) {
    return QhSymbol([c](std::span<const double>) { return Complex(c); }, k, c);
  };
  s.add(term({0, 0}, 1));
  s.add(term({2, 1}, 0.5));
  s.add(term({2, 0}, 0.25));
  EXPECT_THROW(s.add(term({3, 0}, 1)), rt::ConfigError);
  EXPECT_THROW(s.add(term({0, 0}, 1)), rt::ConfigError);
  EXPECT_DOUBLE_EQ(s.sup_bound(), 1.75);

  const auto top = s.top_slice(0);
  EXPECT_EQ(top.box(), rt::IndexBox({2, 0}, {3, 2}));
  EXPECT_EQ(top.terms().size(), 2u);
  const auto rest = s.without_top_slice(0);
  EXPECT_EQ(rest.box(), rt::IndexBox({0, 0}, {2, 2}));
  EXPECT_EQ(rest.terms().size(), 1u);
  EXPECT_TRUE(s.restricted(rt::IndexBox({1, 0}, {2, 2})).is_zero());
  EXPECT_FALSE(s.without_top_slice(1).top_slice(1).is_zero());

  const std::vector<double> r{0.5, 0.5}, th{0.1, 0.2};
  EXPECT_NEAR(std::abs(s(r, th) - (1.0 + 0.5 * std::polar(1.0, 0.4) + 0.25 * std::polar(1.0, 0.2))), 0, 1e-15);
}

TEST(GProfile, Examples) {
  const auto d = DomainProfile::polydisk({1, 1});
  const rt::PointFn one = [](std::span<const double>) { return Complex(1); };
  const std::vector<double> t{0.36, 0.49};
  const auto a = rt::g_profile(d, {}, {2, 0}, one, 1);
  EXPECT_EQ(a.doubled, (MultiIndex{2, 0}));
  EXPECT_NEAR(a(t).real(), 0.36, 1e-15);
  const MultiIndex prior[] = {{1, 0}};
  EXPECT_NEAR(rt::g_profile(d, prior, {0, 0}, one, 1)(t).real(), 0.36, 1e-15);
  const rt::PointFn r1 = [](std::span<const double> r) { return Complex(r[0]); };
  EXPECT_NEAR(rt::g_profile(d, {}, {1, 0}, r1, 1)(t).real(), 0.36, 1e-15);
  // Hyperplane convention.
  EXPECT_EQ(a(std::vector<double>{0.0, 0.5}), Complex(0));
}

TEST(GProfile, NegativeExponentOnAxisTouchingDomainIsUnbounded) {
  const rt::PointFn one = [](std::span<const double>) { return Complex(1); };
  EXPECT_THROW(rt::g_profile(DomainProfile::polydisk({1}), {}, {-1}, one, 1), rt::UnboundedProfile);
  const MultiIndex prior[] = {{1}};
  EXPECT_NO_THROW(rt::g_profile(DomainProfile::polydisk({1}), prior, {-2}, one, 1));
  rt::GenericOptions shell;
  shell.touches_axis = {false};
  const auto annulus = DomainProfile::generic([](std::span<const double> x) { return x[0] > 0.5; }, {1}, shell);
  EXPECT_NO_THROW(rt::g_profile(annulus, {}, {-3}, one, 1));
}

TEST(GProfile, LinearInTheRadialPart) {
  const auto d = DomainProfile::polydisk({1, 1});
  const rt::PointFn f = [](std::span<const double> r) { return Complex(r[0] * r[1], r[0]); };
  const rt::PointFn g = [](std::span<const double> r) { return Complex(std::exp(-r[1]), 0); };
  const Complex a(0.3, -1.2), b(2.0, 0.5);
  const rt::PointFn mix = [&](std::span<const double> r) { return a * f(r) + b * g(r); };
  const MultiIndex prior[] = {{1, -1}, {0, 2}};
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.01, 1);
  const auto pf = rt::g_profile(d, prior, {1, -1}, f, 1.5);
  const auto pg = rt::g_profile(d, prior, {1, -1}, g, 1);
  const auto pm = rt::g_profile(d, prior, {1, -1}, mix, 5);
  for (int s = 0; s < 100; ++s) {
    const std::vector<double> t{u(rng), u(rng)};
    EXPECT_NEAR(std::abs(pm(t) - (a * pf(t) + b * pg(t))), 0, 1e-13);
  }
}
