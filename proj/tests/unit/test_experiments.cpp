#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "rt/experiments.hpp"
#include "support/oracles.hpp"

using rt::Complex;
using rt::ExperimentSpec;
using rt::json;
using rt::MultiIndex;

namespace {

ExperimentSpec spec_of(std::string kind, std::string domain, MultiIndex kmax, std::vector<std::string> symbols = {}) {
  ExperimentSpec s;
  s.kind = std::move(kind);
  s.domain = std::move(domain);
  s.kmax = std::move(kmax);
  s.symbols = std::move(symbols);
  return s;
}

Complex cx(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

std::vector<std::string> strings(const json& a) {
  std::vector<std::string> out;
  for (const auto& v : a) out.push_back(v.get<std::string>());
  return out;
}

}  // namespace

TEST(Proposition1, RadialSymbolsOnTheDisk) {
  const auto rep = rt::run_proposition1(spec_of("proposition1", "polydisk(1)", {10},
                                                {R"(qh(twist=(0,), radial="r1^2", sup=1))",
                                                 R"(qh(twist=(0,), radial="1", sup=1))"}));
  EXPECT_EQ(rep["verdict"], "no zero factor");
  EXPECT_EQ(rep["schema_version"], rt::kSchemaVersion);
  EXPECT_TRUE(rep["product_zero_set"].empty());
  // ∫ t·t^k dt = 1/(k+2) and ∫ t^k dt = 1/(k+1).
  for (int j = 0; j < 2; ++j) {
    const auto& f = rep["factors"][j];
    EXPECT_TRUE(f["zero_set"].empty());
    ASSERT_EQ(f["moments"].size(), 11u);
    for (int k = 0; k <= 10; ++k)
      EXPECT_NEAR(std::abs(cx(f["moments"][k]["moment"]) - 1.0 / (k + 2 - j)), 0, 1e-12) << j << ' ' << k;
  }
}

TEST(Proposition1, ZeroFactorFillsTheLattice) {
  const auto rep = rt::run_proposition1(spec_of("proposition1", "polydisk(1)", {10},
                                                {R"(qh(twist=(0,), radial="r1^2", sup=1))",
                                                 R"(qh(twist=(0,), radial="0"))"}));
  EXPECT_EQ(rep["verdict"], "factor 2 ≡ 0");
  EXPECT_EQ(rep["zero_factor"], 2);
  EXPECT_EQ(rep["factors"][1]["zero_set"].size(), 11u);
  EXPECT_TRUE(rep["factors"][1]["identically_zero"].get<bool>());
}

TEST(Proposition1, SingleVanishingMoment) {
  for (int kstar = 0; kstar <= 7; ++kstar) {
    const double c = (kstar + 1.0) / (kstar + 2.0);
    // Exact moments 1/(k+2) - c/(k+1) vanish only at k*.
    std::vector<std::string> oracle;
    for (int k = 0; k <= 10; ++k)
      if (std::abs(1.0 / (k + 2) - c / (k + 1)) < 1e-14) oracle.push_back(MultiIndex{k}.to_string());
    ASSERT_EQ(oracle.size(), 1u);
    auto spec = spec_of("proposition1", "polydisk(1)", {10},
                        {"qh(twist=(0,), radial=\"r1^2 - " + rt::format_real(c) + "\", sup=1)"});
    spec.hulls[1] = "FIN(" + std::to_string(kstar) + ")";
    const auto rep = rt::run_proposition1(spec);
    EXPECT_EQ(strings(rep["factors"][0]["zero_set"]), oracle) << kstar;
    EXPECT_EQ(rep["verdict"], "no zero factor");
    EXPECT_TRUE(rep["factors"][0]["hull"]["covers_zero_set"].get<bool>() || kstar == 0);
    EXPECT_FALSE(rep["factors"][0]["hull"]["condition_I"].get<bool>());
  }
}

TEST(Proposition1, TwistedMomentsMatchClosedForms) {
  // φ1 = r e^{-iθ}, φ2 = (1 + r²) e^{2iθ}: k0 = 1,
  // factor 1: ∫ t^{1/2} t^{(2k-1)/2} dt = 1/(k+1); factor 2: ∫ (1+t) t^k dt.
  const auto rep = rt::run_proposition1(spec_of("proposition1", "polydisk(1)", {8},
                                                {R"(qh(twist=(-1,), radial="r1", sup=1))",
                                                 R"(qh(twist=(2,), radial="1 + r1^2", sup=2))"}));
  EXPECT_EQ(rep["k0_used"], MultiIndex{1}.to_string());
  EXPECT_EQ(rep["points_checked"], 8);
  for (std::size_t i = 0; i < 8; ++i) {
    const double k = static_cast<double>(i + 1);
    EXPECT_NEAR(std::abs(cx(rep["factors"][0]["moments"][i]["moment"]) - 1 / (k + 1)), 0, 1e-12);
    EXPECT_NEAR(std::abs(cx(rep["factors"][1]["moments"][i]["moment"]) - (1 / (k + 1) + 1 / (k + 2))), 0, 1e-12);
  }
}

TEST(Proposition1, MomentsReproduceOperatorWeights) {
  // π^n c_{k+P_j} × moment_j(k), multiplied over j, is the product operator's weight.
  std::mt19937_64 rng(31);
  const auto d = rt::DomainProfile::polydisk({1, 1});
  const rt::MomentTable T(d);
  for (int trial = 0; trial < 5; ++trial) {
    const auto syms = rt::random_qh_symbols(rng, 2, 3, 1);
    const auto rep = rt::run_proposition1(spec_of("proposition1", "polydisk(1,1)", {4, 4}, syms));
    std::vector<rt::SymbolSum> sums;
    for (const auto& s : syms) sums.push_back(rt::parse_symbol_spec(s, d).sum);
    const auto op = rt::product_apply(T, sums, rt::TruncationLattice(MultiIndex{4, 4}));
    const auto& f0 = rep["factors"][0]["moments"];
    for (std::size_t i = 0; i < f0.size(); ++i) {
      const auto k = rt::text::parse_tuple(f0[i]["k"].get<std::string>());
      MultiIndex a = k;
      Complex w = 1;
      for (std::size_t j = 0; j < sums.size(); ++j) {
        a += sums[j].box().lower();
        w *= rt::pi_power(2) * T.coefficient(a) * cx(rep["factors"][j]["moments"][i]["moment"]);
      }
      EXPECT_NEAR(std::abs(w - op.weight(k, a)), 0, 1e-9 * std::max(1.0, std::abs(w))) << k;
    }
  }
}

TEST(Proposition1, LatticeTooSmall) {
  EXPECT_THROW(rt::run_proposition1(spec_of("proposition1", "polydisk(1)", {3},
                                            {R"(qh(twist=(-5,), radial="1", sup=1))"})),
               rt::NumericError);
  EXPECT_THROW(rt::run_proposition1(spec_of("proposition1", "polydisk(1)", {3}, {R"(linf("z1"))"})),
               rt::ConfigError);
}

TEST(Corollary1, SlicedProductMatchesProjectionOracle) {
  const auto rep = rt::run_corollary1(spec_of("corollary1", "polydisk(1)", {6},
                                              {R"(qh(twist=(1,), radial="r1", sup=1))",
                                               R"(linf("z1 + conj(z1)^2 + 0.5", p_max=2, sup=2.5))"}));
  EXPECT_EQ(rep["verdict"], "nonzero product");
  EXPECT_EQ(rep["dichotomy"], "vacuous");
  EXPECT_LT(rep["recombination_deviation"].get<double>(), 1e-12);
  EXPECT_LT(rep["product"]["slice_residual"].get<double>(), 1e-12);
  ASSERT_EQ(rep["slices"].size(), 5u);
  // p = -2, 0, 1 present (0 through the constant), ±... p = -1, 2 absent.
  const std::vector<bool> expect_zero{false, true, false, false, true};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(rep["slices"][i]["zero_flag"].get<bool>(), expect_zero[i]) << i;
}

TEST(Corollary1, DichotomyWithAZeroInnerSymbol) {
  const auto rep = rt::run_corollary1(spec_of("corollary1", "polydisk(1)", {6},
                                              {R"(qh(twist=(1,), radial="0"))", R"(linf("z1", sup=1))"}));
  EXPECT_TRUE(rep["product"]["zero_flag"].get<bool>());
  EXPECT_EQ(rep["dichotomy"], "holds");
  EXPECT_TRUE(rep["tail"][0]["zero_flag"].get<bool>());
}

TEST(Corollary1, SlicedSymbolMustBeOutermost) {
  EXPECT_THROW(rt::run_corollary1(spec_of("corollary1", "polydisk(1)", {6},
                                          {R"(linf("z1", sup=1))", R"(qh(twist=(1,), radial="1"))"})),
               rt::ConfigError);
  EXPECT_THROW(rt::run_corollary1(spec_of("corollary1", "polydisk(1)", {6}, {R"(qh(twist=(1,), radial="1"))"})),
               rt::ConfigError);
}

TEST(BoxReduction, OneDimensionalTwoFactorExample) {
  // R1 = [0,2), R2 = [0,1): the top power k+1 comes from the tuple (1, 0) alone.
  const auto rep = rt::run_theorem1_box_reduction(
      spec_of("theorem1_box_reduction", "polydisk(1)", {6},
              {R"(sum(box=[(0,),(2,)), terms=[(0,):"1", (1,):"0.5 + r1"], sup=2.5))",
               R"(sum(box=[(0,),(1,)), terms=[(0,):"r1^2"], sup=1))"}));
  EXPECT_EQ(rep["reduction"], "top-slice");
  EXPECT_TRUE(rep["coefficient_match"].get<bool>());
  EXPECT_LT(rep["max_deviation"].get<double>(), 1e-12);
  EXPECT_EQ(rep["verdict"], "nonzero product");

  const rt::MomentTable T(rt::DomainProfile::polydisk({1}));
  const rt::QhSymbol a([](std::span<const double> r) { return Complex(0.5 + r[0]); }, {1}, 1.5);
  const rt::QhSymbol b([](std::span<const double> r) { return Complex(r[0] * r[0]); }, {0}, 1);
  const auto d = rt::DomainProfile::polydisk({1});
  std::vector<rt::SymbolSum> sums;
  sums.push_back(rt::parse_symbol_spec(R"(sum(box=[(0,),(2,)), terms=[(0,):"1", (1,):"0.5 + r1"], sup=2.5))", d).sum);
  sums.push_back(rt::SymbolSum::single(b));
  const auto op = rt::product_apply(T, sums, rt::TruncationLattice(MultiIndex{6}));
  for (rt::Index k = 0; k <= 6; ++k) {
    const auto [t1, w1] = rt::toeplitz_apply(T, a, {k});
    const auto [t2, w2] = rt::toeplitz_apply(T, b, t1);
    EXPECT_NEAR(std::abs(op.weight({k}, t2) - w1 * w2), 0, 1e-10);
  }
}

TEST(BoxReduction, ZeroTopSliceShrinksTheBox) {
  const auto rep = rt::run_theorem1_box_reduction(
      spec_of("theorem1_box_reduction", "polydisk(1,1)", {3, 3},
              {R"(sum(box=[(0,0),(2,2)), terms=[(0,0):"1", (0,1):"r2"], sup=2))",
               R"(qh(twist=(1,0), radial="r1", sup=1))"}));
  ASSERT_GE(rep["steps"].size(), 2u);
  EXPECT_EQ(rep["steps"][0]["shrunk"][0]["symbol"], 1);
  EXPECT_EQ(rep["steps"][0]["shrunk"][0]["box"], rt::IndexBox({0, 0}, {1, 2}).to_string());
  EXPECT_TRUE(rep["coefficient_match"].get<bool>());
  EXPECT_EQ(rep["verdict"], "nonzero product");
}

TEST(BoxReduction, EmptiedBoxFlagsZeroSymbol) {
  const auto rep = rt::run_theorem1_box_reduction(
      spec_of("theorem1_box_reduction", "polydisk(1,1)", {3, 3},
              {R"(qh(twist=(1,0), radial="r1", sup=1))", R"(sum(box=[(0,0),(2,1)), terms=[]))"}));
  EXPECT_EQ(rep["verdict"], "symbol 2 ≡ 0 (box emptied)");
  EXPECT_EQ(rep["zero_symbol"], 2);
}

TEST(BoxReduction, SingletonBoxesDeferToProposition1) {
  const auto rep = rt::run_theorem1_box_reduction(
      spec_of("theorem1_box_reduction", "polydisk(1)", {5},
              {R"(qh(twist=(0,), radial="r1^2", sup=1))", R"(qh(twist=(1,), radial="1", sup=1))"}));
  EXPECT_EQ(rep["reduction"], "no-op");
  EXPECT_EQ(rep["verdict"], "no zero factor");
  EXPECT_THROW(rt::run_theorem1_box_reduction(spec_of("theorem1_box_reduction", "polydisk(1)", {5},
                                                      {R"(linf("z1", sup=1))"})),
               rt::ConfigError);
}

TEST(BoxReduction, TopCoefficientEqualsSumOverTopTuples) {
  // Independent of the composition engine: enumerate tuples on the top slices and
  // chain single-symbol weights.
  std::mt19937_64 rng(41);
  const auto d = rt::DomainProfile::polydisk({1, 1});
  const rt::MomentTable T(d);
  for (int trial = 0; trial < 4; ++trial) {
    const auto syms = rt::random_box_symbols(rng, 2, 2, 2);
    auto spec = spec_of("theorem1_box_reduction", "polydisk(1,1)", {3, 3}, syms);
    spec.axis = static_cast<std::size_t>(trial % 2);
    const auto rep = rt::run_theorem1_box_reduction(spec);
    EXPECT_TRUE(rep["coefficient_match"].get<bool>());

    std::vector<rt::SymbolSum> tops, full;
    for (const auto& s : syms) {
      full.push_back(rt::parse_symbol_spec(s, d).sum);
      tops.push_back(full.back().top_slice(spec.axis));
    }
    const auto op = rt::product_apply(T, full, rt::TruncationLattice(MultiIndex{3, 3}));
    rt::TruncationLattice(MultiIndex{3, 3}).for_each([&](const MultiIndex& k) {
      std::map<MultiIndex, Complex> cur{{k, 1.0}};
      for (const auto& s : tops) {
        std::map<MultiIndex, Complex> next;
        for (const auto& [a, w] : cur)
          for (const auto& [tw, term] : s.terms()) {
            if (!(a + tw).is_natural()) continue;
            const auto [to, v] = rt::toeplitz_apply(T, term, a);
            next[to] += w * v;
          }
        cur = std::move(next);
      }
      for (const auto& [to, w] : cur) EXPECT_NEAR(std::abs(op.weight(k, to) - w), 0, 1e-9) << k << ' ' << to;
    });
  }
}

TEST(MomentVanishing, ConstantIntegrand) {
  auto spec = spec_of("moment_vanishing", "polydisk(1)", {10});
  spec.g = "1";
  spec.set = "FULL";
  const auto rep = rt::run_moment_vanishing(spec);
  ASSERT_EQ(rep["probes"].size(), 20u);
  for (const auto& p : rep["probes"]) {
    const Complex z = cx(p["z"][0]);
    EXPECT_NEAR(std::abs(cx(p["h"]) - 1.0 / (z + 1.0)), 0, 1e-8) << z;
    EXPECT_LE(p["abs_h"].get<double>(), p["bound"].get<double>());
  }
  EXPECT_EQ(rep["e_points"].size(), 10u);
  EXPECT_EQ(rep["verdict"], "nonvanishing on E");
}

TEST(MomentVanishing, LinearIntegrandAndZero) {
  auto spec = spec_of("moment_vanishing", "polydisk(1)", {10});
  spec.g = "t1 - 0.5";
  spec.g_sup = 0.5;
  spec.set = "FIN(1)";
  auto rep = rt::run_moment_vanishing(spec);
  ASSERT_EQ(rep["e_points"].size(), 1u);
  EXPECT_NEAR(std::abs(cx(rep["e_points"][0]["h"]) - 1.0 / 12), 0, 1e-12);
  EXPECT_EQ(rep["verdict"], "nonvanishing on E");

  spec.g = "0";
  spec.g_sup.reset();
  rep = rt::run_moment_vanishing(spec);
  EXPECT_EQ(rep["max_abs_h_on_probes"], 0.0);
  EXPECT_EQ(rep["verdict"], "vanishes on E");
}

TEST(Reports, DeterministicAcrossRunsAndThreads) {
  auto spec = spec_of("theorem1_box_reduction", "polydisk(1,1)", {3, 3},
                      {R"(sum(box=[(0,0),(2,2)), terms=[(0,0):"1", (1,1):"r1*r2"]))",
                       R"(qh(twist=(1,-1), radial="r2"))"});
  const auto a = rt::run_experiment(spec).dump();
  spec.threads = 1;
  const auto b = rt::run_experiment(spec).dump();
  EXPECT_EQ(a, b);
  spec.kind = "proposition1";
  spec.symbols = {R"(qh(twist=(1,0), radial="r1"))", R"(qh(twist=(1,-1), radial="r2"))"};
  EXPECT_EQ(rt::run_experiment(spec).dump(), rt::run_experiment(spec).dump());
}

TEST(ProductCheck, ZeroSlotAndPlacement) {
  const auto d = rt::DomainProfile::polydisk({1, 1});
  const rt::MomentTable T(d);
  const rt::TruncationLattice L(MultiIndex{4, 4});
  std::vector<rt::SymbolSpec> syms{rt::parse_symbol_spec(R"(qh(twist=(1,0), radial="1 + r1", sup=2))", d),
                                   rt::parse_symbol_spec(R"(qh(twist=(0,0), radial="0"))", d)};
  auto pc = rt::product_check(T, syms, L, std::nullopt);
  EXPECT_TRUE(pc.verdict.zero_flag);
  EXPECT_EQ(pc.verdict.max_abs_weight, 0.0);
  for (const char* key : {"zero_flag", "norm_estimate", "witness", "k0_used", "skipped_tuples", "slice_residual"})
    EXPECT_TRUE(pc.report.contains(key)) << key;
  syms.insert(syms.begin(), rt::parse_symbol_spec(R"(linf("z1", sup=1))", d));
  EXPECT_THROW(rt::product_check(T, syms, L, std::nullopt), rt::ConfigError);
}
