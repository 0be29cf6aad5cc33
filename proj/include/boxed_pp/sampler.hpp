#pragma once

#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "chains.hpp"

namespace boxed_pp {

enum class Direction { Up, Down };

struct JumpDistribution {
  int x = 0, t = 0, S = 0, n = 0;
  std::vector<double> probs;
};

// Numerator and denominator of the jump ratio at position x for the up
// (p) and down (p-hat) laws; S is the level before the step.
template <class Scalar>
std::pair<LogValue<Scalar>, LogValue<Scalar>> jump_ratio_parts(const FactorModel<Scalar>& fm, int N, int T, int S,
                                                               int t, int x, Direction dir) {
  if (dir == Direction::Up)
    return {fm.qfac(x + T - t - S - 1) * fm.kfac(x - S - t - 1) * fm.kfac(2 * x - t - S + 1),
            fm.qpow(T - t - S - 1) * fm.qfac(x + 1) * fm.kfac(x - T + 1) * fm.kfac(2 * x - t - S - 1)};
  return {fm.qpow(t + 1 - S) * fm.qfac(x - t - N - 1) * fm.kfac(x + N - t - 1) * fm.kfac(2 * x - t - S + 1),
          fm.qfac(x - S - N + 1) * fm.kfac(x + N - S + 1) * fm.kfac(2 * x - t - S - 1)};
}

// Law on {0..n}: probs[k] proportional to prod_{i<k} num(x+i) prod_{k<=i<n} den(x+i),
// i.e. to prod_{i<k} p(x+i) whenever the denominators are nonzero.
template <class Scalar>
std::vector<double> jump_law(const FactorModel<Scalar>& fm, int N, int T, int S, int t, int x, int n, Direction dir) {
  if (n < 0) throw domain_error("jump_law: negative n");
  std::vector<LogValue<Scalar>> num(n), den(n);
  for (int i = 0; i < n; ++i) std::tie(num[i], den[i]) = jump_ratio_parts(fm, N, T, S, t, x + i, dir);
  // suffix products of den, prefix products of num
  std::vector<LogValue<Scalar>> suf(n + 1);
  for (int i = n - 1; i >= 0; --i) suf[i] = suf[i + 1] * den[i];
  std::vector<LogValue<Scalar>> w(n + 1);
  LogValue<Scalar> pre;
  for (int k = 0; k <= n; ++k) {
    w[k] = pre * suf[k];
    if (k < n) pre *= num[k];
  }
  try {
    return normalize_log_values(w);
  } catch (const domain_error& e) {
    throw inadmissible_parameters(std::string("jump law: ") + e.what());
  }
}

inline JumpDistribution jump_D(int x, int t, int S, int n, const HexagonDims& dims, const WeightParams& params) {
  JumpDistribution d{x, t, S, n, {}};
  with_factor_model(params, [&](const auto& fm) { d.probs = jump_law(fm, dims.N(), dims.T(), S, t, x, n, Direction::Up); });
  return d;
}

inline JumpDistribution jump_Dhat(int x, int t, int S, int n, const HexagonDims& dims, const WeightParams& params) {
  JumpDistribution d{x, t, S, n, {}};
  with_factor_model(params,
                    [&](const auto& fm) { d.probs = jump_law(fm, dims.N(), dims.T(), S, t, x, n, Direction::Down); });
  return d;
}

// One free block of a slice update: members (particle indices) and the law
// of xi, the number of members taking the low option.
struct UpdateBlock {
  int k = 0;  // x of the first member
  std::vector<int> members;
  std::vector<double> probs;
};

struct SliceUpdate {
  Config z;  // forced coordinates; block members filled by apply()
  std::vector<UpdateBlock> blocks;
  Direction dir = Direction::Up;
  Config x, y;

  Config apply(const std::vector<int>& xi) const {
    Config out = z;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (std::size_t m = 0; m < blocks[b].members.size(); ++m) {
        const int i = blocks[b].members[m];
        const bool low = static_cast<int>(m) < xi[b];
        if (dir == Direction::Up)
          out[i] = low ? x[i] : x[i] + 1;
        else
          out[i] = low ? y[i] : y[i] + 1;
      }
    return out;
  }
};

// Jump laws keyed by (t, k, n); valid for one fixed (dims, params, direction).
using JumpLawCache = std::map<std::tuple<int, int, int>, std::vector<double>>;

// Update rule producing Y(t+1) from Y(t) = y (new level) and X(t+1) = x
// (old level S = dims.S()).
template <class Scalar>
SliceUpdate slice_update(const FactorModel<Scalar>& fm, const HexagonDims& dims, Direction dir, int t, const Config& x,
                         const Config& y, JumpLawCache* cache = nullptr) {
  const int N = dims.N(), T = dims.T(), S = dims.S();
  SliceUpdate u;
  u.dir = dir;
  u.x = x;
  u.y = y;
  u.z.assign(N, 0);
  std::vector<int> free;
  for (int i = 0; i < N; ++i) {
    const int d = x[i] - y[i];
    if (dir == Direction::Up) {
      if (d == -1)
        u.z[i] = y[i];
      else if (d == 1)
        u.z[i] = x[i];
      else if (d == 0)
        free.push_back(i);
      else
        throw structural_error("step_S: interlacing violated (up)");
    } else {
      if (d == 0)
        u.z[i] = y[i];
      else if (d == 2)
        u.z[i] = y[i] + 1;
      else if (d == 1)
        free.push_back(i);
      else
        throw structural_error("step_S: interlacing violated (down)");
    }
  }
  // maximal runs of free indices with consecutive coordinates
  const Config& key = dir == Direction::Up ? x : y;
  for (std::size_t a = 0; a < free.size();) {
    std::size_t b = a + 1;
    while (b < free.size() && key[free[b]] == key[free[b - 1]] + 1) ++b;
    UpdateBlock blk;
    blk.members.assign(free.begin() + a, free.begin() + b);
    blk.k = x[blk.members.front()];
    const int n = static_cast<int>(blk.members.size());
    if (cache) {
      auto [it, fresh] = cache->try_emplace({t, blk.k, n});
      if (fresh) it->second = jump_law(fm, N, T, S, t, blk.k, n, dir);
      blk.probs = it->second;
    } else {
      blk.probs = jump_law(fm, N, T, S, t, blk.k, n, dir);
    }
    u.blocks.push_back(std::move(blk));
    a = b;
  }
  return u;
}

struct TraceRecord {
  int S, t, k, l, xi;
};

struct StepOptions {
  bool reverse = false;  // sweep t = T .. 0 (composite-kernel route)
  std::vector<TraceRecord>* trace = nullptr;
};

struct SamplerState {
  Tiling current;
  HexagonDims dims;  // dims.S() is the level of current
  CounterRng rng;
};

inline Tiling unique_tiling_S0(const HexagonDims& dims) {
  Tiling til;
  Config c(dims.N());
  for (int i = 0; i < dims.N(); ++i) c[i] = i;
  til.slices.assign(dims.T() + 1, c);
  return til;
}

inline SamplerState initial_state(const HexagonDims& dims, std::uint64_t seed, std::uint64_t stream = 0) {
  auto d0 = dims.with_S(0);
  return {unique_tiling_S0(d0), d0, CounterRng(seed, stream)};
}

// Candidate Y(t +- 1) from the composite-kernel definition, with weights.
// Forward: Z ~ P^{S',t}_{t+}(Y(t),Z) P^{S',t+1}_{back}(Z,X(t+1)); reverse uses
// t- and X(t-1). S' is the new level, back = S- for up and S+ for down.
inline std::vector<std::pair<Config, double>> composite_candidates(const HexagonDims& dims, const WeightParams& params,
                                                                   Direction dir, bool reverse, int t,
                                                                   const Config& yt, const Config& xnext) {
  const int Snew = dims.S() + (dir == Direction::Up ? 1 : -1);
  const auto dnew = dims.with_S(Snew);
  const Move tm = reverse ? Move::TMinus : Move::TPlus;
  const Move back = dir == Direction::Up ? Move::SMinus : Move::SPlus;
  auto row = transition_row(tm, PathConfig{t, yt}, dnew, params);
  std::vector<std::pair<Config, double>> cand;
  double tot = 0.0;
  for (auto& [Z, p] : row.targets) {
    auto r2 = transition_row(back, Z, dnew, params);
    for (auto& [W, p2] : r2.targets)
      if (W.xs == xnext) {
        cand.push_back({Z.xs, p * p2});
        tot += p * p2;
      }
  }
  if (!(tot > 0.0)) throw structural_error("composite step: no admissible continuation");
  for (auto& c : cand) c.second /= tot;
  return cand;
}

// Applies one S -> S +- 1 step in place.
inline void step_S(SamplerState& st, const WeightParams& params, Direction dir, const StepOptions& opt = {}) {
  const auto& dims = st.dims;
  const int S = dims.S(), T = dims.T(), N = dims.N();
  const int Snew = S + (dir == Direction::Up ? 1 : -1);
  if (Snew < 0 || Snew > T) throw domain_error("step_S: level leaves [0, T]");
  validate_tiling(st.current, dims);
  const auto& X = st.current.slices;
  Tiling Y;
  Y.slices.resize(T + 1);
  if (!opt.reverse) {
    Config y0(N);
    for (int i = 0; i < N; ++i) y0[i] = i;
    Y.slices[0] = y0;
    with_factor_model(params, [&](const auto& fm) {
      for (int t = 0; t < T; ++t) {
        auto u = slice_update(fm, dims, dir, t, X[t + 1], Y.slices[t]);
        std::vector<int> xi;
        for (auto& b : u.blocks) {
          int v = sample_inverse_cdf(b.probs, st.rng.uniform());
          xi.push_back(v);
          if (opt.trace) opt.trace->push_back({S, t, b.k, static_cast<int>(b.members.size()), v});
        }
        Y.slices[t + 1] = u.apply(xi);
      }
    });
  } else {
    Config yT(N);
    for (int i = 0; i < N; ++i) yT[i] = Snew + i;
    Y.slices[T] = yT;
    for (int t = T; t > 0; --t) {
      auto cand = composite_candidates(dims, params, dir, true, t, Y.slices[t], X[t - 1]);
      std::vector<double> pr;
      for (auto& c : cand) pr.push_back(c.second);
      int v = sample_inverse_cdf(pr, st.rng.uniform());
      if (opt.trace) opt.trace->push_back({S, t, -1, static_cast<int>(cand.size()), v});
      Y.slices[t - 1] = cand[v].first;
    }
  }
  st.dims = dims.with_S(Snew);
  validate_tiling(Y, st.dims);
  st.current = std::move(Y);
}

namespace detail {

// Adds weight * P(X -> Y) to out[Y] for every step output Y.
template <class Acc>
void accumulate_step(Acc& out, double weight, const Tiling& X, const HexagonDims& dims, const WeightParams& params,
                     Direction dir, bool composite, bool reverse, JumpLawCache* cache) {
  const int T = dims.T(), N = dims.N();
  const int Snew = dims.S() + (dir == Direction::Up ? 1 : -1);
  Tiling Y;
  Y.slices.resize(T + 1);
  std::function<void(int, double)> rec;
  if (reverse) {
    Config yT(N);
    for (int i = 0; i < N; ++i) yT[i] = Snew + i;
    Y.slices[T] = yT;
    rec = [&](int t, double p) {
      if (t == 0) {
        out[Y] += p;
        return;
      }
      for (auto& [Z, pz] : composite_candidates(dims, params, dir, true, t, Y.slices[t], X.slices[t - 1])) {
        Y.slices[t - 1] = Z;
        rec(t - 1, p * pz);
      }
    };
    rec(T, weight);
    return;
  }
  Config y0(N);
  for (int i = 0; i < N; ++i) y0[i] = i;
  Y.slices[0] = y0;
  with_factor_model(params, [&](const auto& fm) {
    rec = [&](int t, double p) {
      if (t == T) {
        out[Y] += p;
        return;
      }
      if (composite) {
        for (auto& [Z, pz] : composite_candidates(dims, params, dir, false, t, Y.slices[t], X.slices[t + 1])) {
          Y.slices[t + 1] = Z;
          rec(t + 1, p * pz);
        }
        return;
      }
      auto u = slice_update(fm, dims, dir, t, X.slices[t + 1], Y.slices[t], cache);
      std::vector<int> xi(u.blocks.size(), 0);
      while (true) {
        double pp = p;
        for (std::size_t b = 0; b < xi.size(); ++b) pp *= u.blocks[b].probs[xi[b]];
        if (pp > 0.0) {
          Y.slices[t + 1] = u.apply(xi);
          rec(t + 1, pp);
        }
        std::size_t b = 0;
        while (b < xi.size() && ++xi[b] == static_cast<int>(u.blocks[b].probs.size())) xi[b++] = 0;
        if (b == xi.size()) break;
      }
    };
    rec(0, weight);
  });
}

}  // namespace detail

// Exact law of the step output from a fixed input tiling (all xi choices).
// method: block rule (default) or the composite-kernel definition.
inline std::map<Tiling, double> step_distribution(const Tiling& X, const HexagonDims& dims, const WeightParams& params,
                                                  Direction dir, bool composite = false, bool reverse = false,
                                                  JumpLawCache* cache = nullptr) {
  std::map<Tiling, double> out;
  detail::accumulate_step(out, 1.0, X, dims, params, dir, composite, reverse, cache);
  return out;
}

// Exact push-forward of a law on Omega(N,T,S) through one step.
inline std::map<Tiling, double> push_forward_step(const ExactDistribution& d, const WeightParams& params, Direction dir,
                                                  bool composite = false, bool reverse = false) {
  std::unordered_map<Tiling, double, TilingHash> acc;
  JumpLawCache cache;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.probs[i] != 0.0)
      detail::accumulate_step(acc, d.probs[i], d.tilings[i], d.dims, params, dir, composite, reverse, &cache);
  return {acc.begin(), acc.end()};
}

inline double total_variation(const std::map<Tiling, double>& a, const ExactDistribution& b) {
  double s = 0.0;
  for (auto& [k, v] : a) s += std::fabs(v - b.prob(k));
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!a.count(b.tilings[i])) s += b.probs[i];
  return 0.5 * s;
}

// Perfect sample: the unique tiling at S = 0 followed by c up-steps.
inline Tiling sample_tiling(const HexagonDims& dims, const WeightParams& params, std::uint64_t seed,
                            std::uint64_t stream = 0, std::vector<TraceRecord>* trace = nullptr,
                            std::vector<Tiling>* history = nullptr) {
  positivity_case(params, dims);
  auto st = initial_state(dims, seed, stream);
  if (history) history->push_back(st.current);
  StepOptions opt;
  opt.trace = trace;
  for (int s = 0; s < dims.S(); ++s) {
    step_S(st, params, Direction::Up, opt);
    if (history) history->push_back(st.current);
  }
  return st.current;
}

// u_t for t = 1..T: topmost hole of line t at or below the section when t <= S,
// N + t - 1 otherwise. Entry t - 1 of the result.
inline std::vector<int> extract_top_path(const Tiling& til, const HexagonDims& dims) {
  std::vector<int> u;
  for (int t = 1; t <= dims.T(); ++t) {
    if (t > dims.S()) {
      u.push_back(dims.N() + t - 1);
      continue;
    }
    // a full section leaves the first hole just below it
    int best = dims.lo(t) - 1;
    for (int x = dims.hi(t); x >= dims.lo(t); --x)
      if (!has_particle(til, t, x)) {
        best = x;
        break;
      }
    u.push_back(best);
  }
  return u;
}

inline std::vector<std::vector<int>> extract_top_path(const std::vector<Tiling>& history, const HexagonDims& dims) {
  std::vector<std::vector<int>> out;
  for (std::size_t s = 0; s < history.size(); ++s) out.push_back(extract_top_path(history[s], dims.with_S(int(s))));
  return out;
}

// Largest deviation between the exact conditional law of the jump
// u_t^S - u_t^{S+1} given (u_{t-1}^{S+1}, u_t^S) and the stated jump law
// D(u_{t-1}^{S+1}+1, t, S; u_t^S - u_{t-1}^{S+1} - 1); u_0 := -1.
inline double top_path_law_residual(const HexagonDims& dims, const WeightParams& params) {
  auto d = exact_distribution(dims, params);
  const auto dn = dims.with_S(dims.S() + 1);
  std::map<std::tuple<int, int, int>, std::map<int, double>> cond;
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto u0 = extract_top_path(d.tilings[i], dims);
    for (auto& [Y, p] : step_distribution(d.tilings[i], dims, params, Direction::Up)) {
      auto u1 = extract_top_path(Y, dn);
      for (int t = 1; t <= dims.T(); ++t) {
        int prev = t == 1 ? -1 : u1[t - 2];
        cond[{t, prev, u0[t - 1]}][u0[t - 1] - u1[t - 1]] += d.probs[i] * p;
      }
    }
  }
  double err = 0.0;
  for (auto& [key, law] : cond) {
    auto [t, prev, cur] = key;
    const int n = cur - prev - 1;
    if (n < 0) continue;
    double tot = 0.0;
    for (auto& kv : law) tot += kv.second;
    auto D = jump_D(prev + 1, t, dims.S(), n, dims, params);
    for (int k = 0; k <= n; ++k) {
      double emp = law.count(k) ? law[k] / tot : 0.0;
      err = std::max(err, std::fabs(emp - D.probs[k]));
    }
  }
  return err;
}

}  // namespace boxed_pp
