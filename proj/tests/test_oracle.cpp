#include <gtest/gtest.h>

#include <set>

#include "boxed_pp/oracle.hpp"

using namespace boxed_pp;

namespace {
// Independent count: recursion over slices without memoization.
std::uint64_t naive_count(const HexagonDims& d, Config X, int t) {
  if (t == d.T()) return 1;
  std::uint64_t n = 0;
  const int N = d.N();
  for (int mask = 0; mask < (1 << N); ++mask) {
    Config Y(N);
    bool ok = true;
    for (int i = 0; i < N && ok; ++i) {
      Y[i] = X[i] + ((mask >> i) & 1);
      ok = Y[i] >= d.lo(t + 1) && Y[i] <= d.hi(t + 1) && (i == 0 || Y[i] > Y[i - 1]);
    }
    if (ok) n += naive_count(d, Y, t + 1);
  }
  return n;
}
}  // namespace

TEST(Enumerate, DegenerateHexagon) {
  EXPECT_EQ(all_tilings(HexagonDims(3, 4, 0)).size(), 1u);
  EXPECT_EQ(all_tilings(HexagonDims(1, 5, 0)).size(), 1u);
}

TEST(Enumerate, SmallCounts) {
  EXPECT_EQ(all_tilings(HexagonDims(1, 1, 1)).size(), 2u);
  EXPECT_EQ(all_tilings(HexagonDims(2, 2, 2)).size(), 20u);
}

TEST(Enumerate, MatchesNaiveRecursion) {
  for (int a = 1; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (int c = 0; c <= 3; ++c) {
        HexagonDims d(a, b, c);
        Config X(a);
        for (int i = 0; i < a; ++i) X[i] = i;
        EXPECT_EQ(count_tilings(d), naive_count(d, X, 0));
      }
}

TEST(Enumerate, MacMahonProduct) {
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= 4; ++b)
      for (int c = 1; c <= 4; ++c) EXPECT_EQ(count_tilings(HexagonDims(a, b, c)), macmahon_count(a, b, c));
  EXPECT_EQ(macmahon_count(4, 4, 4), 232848u);
}

TEST(Enumerate, EachTilingOnceAndValid) {
  HexagonDims d(2, 3, 2);
  std::set<Tiling> seen;
  auto n = enumerate_tilings(d, [&](const Tiling& t) {
    validate_tiling(t, d);
    EXPECT_TRUE(seen.insert(t).second);
  });
  EXPECT_EQ(n, seen.size());
}

TEST(Enumerate, CapEnforced) { EXPECT_THROW(enumerate_tilings(HexagonDims(3, 3, 3), [](const Tiling&) {}, 100), too_large); }

TEST(Enumerate, CapFromEnvironment) {
  setenv("BOXED_PP_ORACLE_CAP", "10", 1);
  EXPECT_EQ(oracle_cap(), 10u);
  EXPECT_THROW(all_tilings(HexagonDims(2, 2, 2)), too_large);
  unsetenv("BOXED_PP_ORACLE_CAP");
  EXPECT_EQ(oracle_cap(), 10'000'000u);
}

TEST(ExactDistribution, HahnUniform) {
  auto d = exact_distribution(HexagonDims(2, 2, 2), Hahn{});
  for (double p : d.probs) EXPECT_NEAR(p, 1.0 / 20, 1e-15);
}

TEST(ExactDistribution, Normalized) {
  for (WeightParams p : {WeightParams(QRacah{0.8, -1.0}), WeightParams(Racah{5.0}), WeightParams(QRacahTrig{0.2, 1.2})}) {
    auto d = exact_distribution(HexagonDims(2, 2, 2), p);
    double s = 0;
    for (double v : d.probs) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(ExactDistribution, QHahnOneCube) {
  auto d = exact_distribution(HexagonDims(1, 1, 1), QHahn{0.5});
  Tiling late{{{0}, {0}, {1}}}, early{{{0}, {1}, {1}}};
  EXPECT_NEAR(d.prob(early), 1.0 / 3, 1e-14);
  EXPECT_NEAR(d.prob(late), 2.0 / 3, 1e-14);
}

TEST(PartialSums, TrivialRatio) {
  HexagonDims d(2, 2, 2);
  auto fm = make_real_model(QRacah{0.8, -1.0});
  auto s = partial_weight_sums(fm, d, 0, {0, 1});
  EXPECT_NEAR((s.L / s.L).value(), 1.0, 1e-15);
}

TEST(PartialSums, ProductMatchesMarginal) {
  HexagonDims d(2, 2, 2);
  WeightParams p = QRacah{0.8, -1.0};
  auto fm = make_real_model(p);
  auto dist = exact_distribution(d, p);
  for (int t = 0; t <= d.T(); ++t) {
    auto m = slice_marginal(dist, t);
    std::vector<LogValue<double>> vals;
    auto cfgs = section_configs(d, d.S(), t);
    for (auto& X : cfgs) {
      auto s = partial_weight_sums(fm, d, t, X);
      vals.push_back(s.L * s.C * s.R);
    }
    auto pr = normalize_log_values(vals);
    for (std::size_t i = 0; i < cfgs.size(); ++i) EXPECT_NEAR(pr[i], m[cfgs[i]], 1e-10) << t;
  }
}

TEST(PartialSums, LeftAndRightAreSideWeights) {
  // |L(X)| is proportional to the summed weight of left halves ending at X
  // (holes on lines < t); R likewise for right halves. The closed forms
  // carry a sign (-1)^(sum x) from the inverse-base factorials.
  HexagonDims d(2, 3, 2);
  WeightParams p = QRacah{0.7, -0.5};
  auto fm = make_real_model(p);
  const int t = 2;
  std::map<Config, double> L, R;
  {
    std::set<std::vector<Config>> lefts, rights;
    for (auto& til : all_tilings(d)) {
      std::vector<Config> lh(til.slices.begin(), til.slices.begin() + t + 1);
      std::vector<Config> rh(til.slices.begin() + t, til.slices.end());
      if (lefts.insert(lh).second) {
        double w = 0;
        for_each_hole(til, d, [&](HoleCoord c) {
          if (c.t < t) w += hole_weight(p, d, c).log_abs;
        });
        L[til.slices[t]] += std::exp(w);
      }
      if (rights.insert(rh).second) {
        double w = 0;
        for_each_hole(til, d, [&](HoleCoord c) {
          if (c.t > t) w += hole_weight(p, d, c).log_abs;
        });
        R[til.slices[t]] += std::exp(w);
      }
    }
  }
  auto cfgs = section_configs(d, d.S(), t);
  std::vector<double> rl, rr, el, er;
  for (auto& X : cfgs) {
    auto s = partial_weight_sums(fm, d, t, X);
    rl.push_back(std::fabs(s.L.value()));
    rr.push_back(std::fabs(s.R.value()));
    el.push_back(L[X]);
    er.push_back(R[X]);
  }
  for (std::size_t i = 1; i < cfgs.size(); ++i) {
    EXPECT_NEAR((rl[i] / rl[0]) / (el[i] / el[0]), 1.0, 1e-10);
    EXPECT_NEAR((rr[i] / rr[0]) / (er[i] / er[0]), 1.0, 1e-10);
  }
}

TEST(PartialSums, CentralSingleParticle) {
  HexagonDims d(1, 2, 1);
  const double q = 0.8, k2 = -1.0;
  auto fm = make_real_model(QRacah{q, k2});
  const int t = 1, S = 1;
  for (int x = d.lo(t); x < d.hi(t); ++x) {
    double r = (partial_weight_sums(fm, d, t, {x + 1}).C / partial_weight_sums(fm, d, t, {x}).C).value();
    double e = q * (1 - k2 * std::pow(q, 2 * x - S - t + 1)) / (1 - k2 * std::pow(q, 2 * x + 2 - S - t + 1));
    EXPECT_NEAR(r, e, 1e-13);
  }
}

TEST(Correlation, FirstOrderSumsToN) {
  HexagonDims d(2, 2, 2);
  auto dist = exact_distribution(d, QRacah{0.8, -1.0});
  for (int t = 0; t <= d.T(); ++t) {
    double s = 0;
    for (int x = d.lo(t); x <= d.hi(t); ++x) s += particle_correlation(dist, {{t, x}});
    EXPECT_NEAR(s, 2.0, 1e-12);
  }
}
