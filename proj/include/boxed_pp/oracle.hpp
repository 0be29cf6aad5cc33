#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "weights.hpp"

namespace boxed_pp {

struct too_large : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Config = std::vector<int>;

// Enumeration cap; BOXED_PP_ORACLE_CAP overrides the default of 1e7.
inline std::uint64_t oracle_cap() {
  if (const char* s = std::getenv("BOXED_PP_ORACLE_CAP")) {
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s && v >= 1.0) return static_cast<std::uint64_t>(v);
  }
  return 10'000'000ULL;
}

// All strictly increasing N-tuples in the section at (t, S).
inline std::vector<Config> section_configs(const HexagonDims& dims, int S, int t) {
  const int N = dims.N(), lo = dims.lo(t, S), hi = dims.hi(t, S);
  std::vector<Config> out;
  if (hi - lo + 1 < N) return out;
  Config c(N);
  for (int i = 0; i < N; ++i) c[i] = lo + i;
  while (true) {
    out.push_back(c);
    int i = N - 1;
    while (i >= 0 && c[i] == hi - (N - 1 - i)) --i;
    if (i < 0) break;
    ++c[i];
    for (int k = i + 1; k < N; ++k) c[k] = c[k - 1] + 1;
  }
  return out;
}

// Configurations Y with Y_i - X_i in {lo_off, lo_off+1}, strictly increasing
// and inside [lo, hi].
inline std::vector<Config> shifted_configs(const Config& X, int lo_off, int lo, int hi) {
  std::vector<Config> out;
  const int N = static_cast<int>(X.size());
  Config y(N);
  std::function<void(int)> rec = [&](int i) {
    if (i == N) {
      out.push_back(y);
      return;
    }
    for (int d = lo_off; d <= lo_off + 1; ++d) {
      int v = X[i] + d;
      if (v < lo || v > hi) continue;
      if (i > 0 && v <= y[i - 1]) continue;
      y[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

inline std::vector<Config> successors(const Config& X, int t, const HexagonDims& dims) {
  return shifted_configs(X, 0, dims.lo(t + 1), dims.hi(t + 1));
}

// Number of tilings by a forward sweep over slice configurations.
inline std::uint64_t count_tilings(const HexagonDims& dims) {
  std::map<Config, std::uint64_t> cur;
  Config start(dims.N());
  for (int i = 0; i < dims.N(); ++i) start[i] = i;
  cur[start] = 1;
  for (int t = 0; t < dims.T(); ++t) {
    std::map<Config, std::uint64_t> nxt;
    for (const auto& [X, n] : cur)
      for (const auto& Y : successors(X, t, dims)) nxt[Y] += n;
    cur.swap(nxt);
  }
  std::uint64_t total = 0;
  for (const auto& kv : cur) total += kv.second;
  return total;
}

// Product formula prod_{i,j,k} (i+j+k-1)/(i+j+k-2), computed exactly by
// prime-factor bookkeeping.
inline std::uint64_t macmahon_count(int a, int b, int c) {
  std::map<int, int> exps;
  auto add = [&](int n, int s) {
    for (int p = 2; n > 1; ++p)
      while (n % p == 0) {
        exps[p] += s;
        n /= p;
      }
  };
  for (int i = 1; i <= a; ++i)
    for (int j = 1; j <= b; ++j)
      for (int k = 1; k <= c; ++k) {
        add(i + j + k - 1, 1);
        add(i + j + k - 2, -1);
      }
  std::uint64_t r = 1;
  for (auto [p, e] : exps) {
    if (e < 0) throw std::logic_error("macmahon_count: non-integer product");
    for (int k = 0; k < e; ++k) r *= static_cast<std::uint64_t>(p);
  }
  return r;
}

// Streams every tiling of the hexagon exactly once through f. Throws
// too_large when the count exceeds the cap.
inline std::uint64_t enumerate_tilings(const HexagonDims& dims, const std::function<void(const Tiling&)>& f,
                                       std::uint64_t cap = oracle_cap()) {
  const std::uint64_t n = count_tilings(dims);
  if (n > cap) throw too_large("enumerate_tilings: " + std::to_string(n) + " tilings exceed cap " + std::to_string(cap));
  Tiling til;
  til.slices.resize(dims.T() + 1);
  Config start(dims.N());
  for (int i = 0; i < dims.N(); ++i) start[i] = i;
  til.slices[0] = start;
  std::function<void(int)> rec = [&](int t) {
    if (t == dims.T()) {
      f(til);
      return;
    }
    for (auto& Y : successors(til.slices[t], t, dims)) {
      til.slices[t + 1] = std::move(Y);
      rec(t + 1);
    }
  };
  rec(0);
  return n;
}

inline std::vector<Tiling> all_tilings(const HexagonDims& dims, std::uint64_t cap = oracle_cap()) {
  std::vector<Tiling> out;
  enumerate_tilings(dims, [&](const Tiling& t) { out.push_back(t); }, cap);
  return out;
}

struct ExactDistribution {
  HexagonDims dims;
  std::vector<Tiling> tilings;
  std::vector<double> probs;
  std::unordered_map<Tiling, std::size_t, TilingHash> index;

  double prob(const Tiling& t) const {
    auto it = index.find(t);
    return it == index.end() ? 0.0 : probs[it->second];
  }
  std::size_t size() const { return tilings.size(); }
};

// Probability of each tiling proportional to its weight.
inline ExactDistribution exact_distribution(const HexagonDims& dims, const WeightParams& params,
                                            std::uint64_t cap = oracle_cap()) {
  positivity_case(params, dims);
  ExactDistribution d;
  d.dims = dims;
  std::vector<LogValue<double>> ws;
  enumerate_tilings(
      dims,
      [&](const Tiling& t) {
        d.tilings.push_back(t);
        auto w = tiling_weight(t, params, dims);
        ws.push_back({w.log_abs, static_cast<double>(w.sign)});
      },
      cap);
  d.probs = normalize_log_values(ws);
  for (std::size_t i = 0; i < d.tilings.size(); ++i) d.index.emplace(d.tilings[i], i);
  return d;
}

// Law of X(t) under d.
inline std::map<Config, double> slice_marginal(const ExactDistribution& d, int t) {
  std::map<Config, double> m;
  for (std::size_t i = 0; i < d.size(); ++i) m[d.tilings[i].slices[t]] += d.probs[i];
  return m;
}

inline bool has_particle(const Tiling& til, int t, int x) {
  const auto& X = til.slices[t];
  return std::binary_search(X.begin(), X.end(), x);
}

// Probability that every listed (t, x) carries a particle.
inline double particle_correlation(const ExactDistribution& d, const std::vector<std::pair<int, int>>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    bool all = true;
    for (auto [t, x] : pts)
      if (!has_particle(d.tilings[i], t, x)) {
        all = false;
        break;
      }
    if (all) s += d.probs[i];
  }
  return s;
}

// Left, central and right partial weight sums at slice t for configuration X,
// each up to an X-independent constant. Their product is proportional to the
// probability of X(t) = X.
template <class Scalar>
struct PartialSums {
  LogValue<Scalar> L, C, R;
};

template <class Scalar>
PartialSums<Scalar> partial_weight_sums(const FactorModel<Scalar>& fm, const HexagonDims& dims, int t, const Config& X) {
  const int N = dims.N(), T = dims.T(), S = dims.S();
  LogValue<Scalar> vdm;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      auto d = fm.mu_diff(X[j], X[i], t, S);
      if (d.is_zero()) throw degenerate_parameters("partial_weight_sums: equal mu values");
      vdm *= d;
    }
  PartialSums<Scalar> r{vdm, {}, vdm};
  for (int x : X) {
    auto k = fm.kfac(2 * x - S - t + 1);
    r.L *= fm.qpow(double(x) * (t + N - 1)) * k;
    r.L /= fm.qinvfact(t + N - 1 - x) * fm.qfact(x) * fm.kpoch(x - t - S + 1, t + N);
    r.R *= k * fm.qpow(double(x) * (T - t + N - 1));
    r.R /= fm.qinvfact(S + N - 1 - x) * fm.qfact(x + T - t - S) * fm.kpoch(x - T + 1, N + T - t);
    r.C *= fm.qpow(x);
    r.C /= k;
  }
  return r;
}

// Line format: one line per slice, space-separated coordinates.
inline void write_tiling(std::ostream& os, const Tiling& til) {
  for (const auto& s : til.slices) {
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
    os << '\n';
  }
}

inline std::string tiling_to_string(const Tiling& til) {
  std::ostringstream os;
  write_tiling(os, til);
  return os.str();
}

// Reads T+1 lines of N integers.
inline Tiling read_tiling(std::istream& is, const HexagonDims& dims) {
  Tiling til;
  std::string line;
  while (static_cast<int>(til.slices.size()) < dims.T() + 1 && std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Config c;
    int v;
    while (ls >> v) c.push_back(v);
    til.slices.push_back(c);
  }
  validate_tiling(til, dims);
  return til;
}

}  // namespace boxed_pp
