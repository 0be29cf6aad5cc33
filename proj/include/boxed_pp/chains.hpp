#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oracle.hpp"

namespace boxed_pp {

enum class Move { TPlus, TMinus, SPlus, SMinus };

inline const char* to_string(Move m) {
  switch (m) {
    case Move::TPlus: return "t+";
    case Move::TMinus: return "t-";
    case Move::SPlus: return "S+";
    case Move::SMinus: return "S-";
  }
  return "?";
}

// (dt, dS) of a move.
inline std::pair<int, int> move_shift(Move m) {
  switch (m) {
    case Move::TPlus: return {1, 0};
    case Move::TMinus: return {-1, 0};
    case Move::SPlus: return {0, 1};
    case Move::SMinus: return {0, -1};
  }
  return {0, 0};
}
inline bool move_up(Move m) { return m == Move::TPlus || m == Move::SPlus; }

// mu_{t,S}(x) = q^{-x} + kappa^2 q^{x-S-t+1}; x and x(x+2K-S-t+1) for the
// linear families.
template <class Scalar>
Scalar mu_value(const FactorModel<Scalar>& fm, int t, int S, int x) {
  using K = typename FactorModel<Scalar>::Kind;
  if (fm.kind == K::Hahn) return Scalar(x);
  if (fm.kind == K::Racah) return Scalar(double(x) * (x + 2 * fm.K - S - t + 1));
  Scalar v = fm.qpow(-x).value();
  if (!fm.k2_zero) v += fm.k2_unit * std::exp(fm.k2_log) * fm.qpow(x - S - t + 1).value();
  return v;
}

inline double mu(int t, int S, int x, const QRacah& p) {
  return std::pow(p.q, -x) + p.kappa_sq * std::pow(p.q, x - S - t + 1);
}

// Slice weight w_{t,S}(x) of the one-dimensional law; S = dims.S().
template <class Scalar>
LogValue<Scalar> slice_weight_w(const FactorModel<Scalar>& fm, const HexagonDims& dims, int t, int x) {
  const int N = dims.N(), T = dims.T(), S = dims.S();
  LogValue<Scalar> num = fm.qpow(double(x) * (2 * N + T - 1)) * fm.kfac(2 * x - t - S + 1);
  if ((t + S) % 2) num.unit = -num.unit;
  LogValue<Scalar> den = fm.qfact(x) * fm.qfact(T - S - t + x) * fm.qinvfact(t + N - x - 1) *
                         fm.qinvfact(S + N - x - 1) * fm.kpoch(x - T + 1, T + N - t) * fm.kpoch(x - t - S + 1, N + t);
  return num / den;
}

// Real families: weight made positive by the sign at the lowest point of
// the section; a sign change along the section is inadmissible.
inline LogSignedValue slice_weight_w(int t, int x, const HexagonDims& dims, const WeightParams& params) {
  auto fm = make_real_model(params);
  auto v = to_signed(slice_weight_w(fm, dims, t, x));
  v.sign *= to_signed(slice_weight_w(fm, dims, t, dims.lo(t))).sign;
  if (v.sign <= 0) throw inadmissible_parameters("slice weight is not positive");
  return v;
}

template <class Scalar>
LogValue<Scalar> vandermonde(const FactorModel<Scalar>& fm, int t, int S, const Config& X) {
  LogValue<Scalar> v;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) v *= fm.mu_diff(X[j], X[i], t, S);
  return v;
}

struct SliceMeasure {
  int t = 0;
  int S = 0;
  std::map<Config, double> probs;
};

// rho_{S,t}(X) proportional to prod (mu(x_i)-mu(x_j))^2 prod w_{t,S}(x_i).
inline SliceMeasure slice_measure(const HexagonDims& dims, const WeightParams& params, int t) {
  SliceMeasure m{t, dims.S(), {}};
  auto cfgs = section_configs(dims, dims.S(), t);
  with_factor_model(params, [&](const auto& fm) {
    using Scalar = std::decay_t<decltype(fm.qpow(0).unit)>;
    std::vector<LogValue<Scalar>> ws;
    std::vector<LogValue<Scalar>> w1;
    for (int x = dims.lo(t); x <= dims.hi(t); ++x) w1.push_back(slice_weight_w(fm, dims, t, x));
    for (const auto& X : cfgs) {
      auto v = vandermonde(fm, t, dims.S(), X);
      v *= v;
      for (int x : X) v *= w1[x - dims.lo(t)];
      ws.push_back(v);
    }
    auto p = normalize_log_values(ws);
    for (std::size_t i = 0; i < cfgs.size(); ++i) m.probs[cfgs[i]] = p[i];
  });
  return m;
}

// Per-particle factors (w0 for staying, w1 for moving) of each move at
// level S = dims.S(), time t.
template <class Scalar>
std::pair<LogValue<Scalar>, LogValue<Scalar>> move_factors(const FactorModel<Scalar>& fm, const HexagonDims& dims,
                                                           int t, int x, Move kind) {
  const int N = dims.N(), T = dims.T(), S = dims.S();
  const auto D = fm.kfac(2 * x - t - S + 1);
  LogValue<Scalar> w0, w1;
  switch (kind) {
    case Move::TPlus:
      w0 = fm.qfac(x + T - t - S) * fm.kfac(x + N - t);
      w1 = fm.qpow(T + N - 1 - t) * fm.qfac(x - S - N + 1) * fm.kfac(x - T + 1);
      break;
    case Move::SPlus:
      w0 = fm.qfac(x + T - t - S) * fm.kfac(x + N - S);
      w1 = fm.qpow(T + N - 1 - S) * fm.qfac(x - t - N + 1) * fm.kfac(x - T + 1);
      break;
    case Move::TMinus:
      w0 = fm.qfac(x - t - N + 1) * fm.kfac(x - S - t + 1);
      w1 = fm.qpow(-(t + N - 1)) * fm.qfac(x) * fm.kfac(x + N - S);
      break;
    case Move::SMinus:
      w0 = fm.qfac(x - S - N + 1) * fm.kfac(x - S - t + 1);
      w1 = fm.qpow(-(S + N - 1)) * fm.qfac(x) * fm.kfac(x + N - t);
      break;
  }
  w0.unit = -w0.unit;
  return {w0 / D, w1 / D};
}

// Target slice (t', S') of a move from (t, S).
inline std::pair<int, int> move_target(Move kind, int t, int S) {
  auto [dt, dS] = move_shift(kind);
  return {t + dt, S + dS};
}

inline void check_move_defined(Move kind, const HexagonDims& dims, int t) {
  auto [nt, nS] = move_target(kind, t, dims.S());
  if (nt < 0 || nt > dims.T() || nS < 0 || nS > dims.T())
    throw domain_error(std::string("move ") + to_string(kind) + " leaves the admissible range");
}

struct TransitionRow {
  PathConfig source;
  Move kind = Move::TPlus;
  std::vector<std::pair<PathConfig, double>> targets;
};

// Unnormalized log weights of all admissible targets of X under a move.
template <class Scalar>
std::vector<std::pair<Config, LogValue<Scalar>>> transition_weights(const FactorModel<Scalar>& fm, Move kind,
                                                                    const Config& X, int t, const HexagonDims& dims) {
  check_move_defined(kind, dims, t);
  auto [nt, nS] = move_target(kind, t, dims.S());
  const int off = move_up(kind) ? 0 : -1;
  auto targets = shifted_configs(X, off, dims.lo(nt, nS), dims.hi(nt, nS));
  if (targets.empty()) throw structural_error("transition_row: empty target set");
  std::vector<std::pair<LogValue<Scalar>, LogValue<Scalar>>> f;
  for (int x : X) f.push_back(move_factors(fm, dims, t, x, kind));
  const auto v0 = vandermonde(fm, t, dims.S(), X);
  std::vector<std::pair<Config, LogValue<Scalar>>> out;
  for (auto& Y : targets) {
    LogValue<Scalar> w = vandermonde(fm, nt, nS, Y) / v0;
    for (std::size_t i = 0; i < X.size(); ++i) w *= (Y[i] == X[i]) ? f[i].first : f[i].second;
    out.emplace_back(std::move(Y), w);
  }
  return out;
}

// Row of P^{S,t}_{kind} at X (S = dims.S(), t = X.t), normalized by summation.
inline TransitionRow transition_row(Move kind, const PathConfig& X, const HexagonDims& dims, const WeightParams& params) {
  TransitionRow row{X, kind, {}};
  auto nt = move_target(kind, X.t, dims.S()).first;
  with_factor_model(params, [&](const auto& fm) {
    auto ws = transition_weights(fm, kind, X.xs, X.t, dims);
    using LV = typename decltype(ws)::value_type::second_type;
    std::vector<LV> vals;
    for (auto& p : ws) vals.push_back(p.second);
    auto pr = normalize_log_values(vals);
    for (std::size_t i = 0; i < ws.size(); ++i)
      if (pr[i] > 0.0) row.targets.push_back({PathConfig{nt, ws[i].first}, pr[i]});
  });
  return row;
}

// Push a slice law through a move.
inline std::map<Config, double> push_forward(const std::map<Config, double>& law, Move kind, int t,
                                             const HexagonDims& dims, const WeightParams& params) {
  std::map<Config, double> out;
  for (const auto& [X, p] : law) {
    if (p == 0.0) continue;
    auto row = transition_row(kind, PathConfig{t, X}, dims, params);
    for (auto& [Y, pp] : row.targets) out[Y.xs] += p * pp;
  }
  return out;
}

inline double total_variation(const std::map<Config, double>& a, const std::map<Config, double>& b) {
  double s = 0.0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    s += std::fabs(v - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : b)
    if (!a.count(k)) s += std::fabs(v);
  return 0.5 * s;
}

// Two-diagonal matrix U^{S,t}_{kind}; rows over the section at (t,S), columns
// over the target section.
template <class Scalar>
struct UMatrixEntry {
  Move kind;
  int x, y;
  Scalar value;
};

template <class Scalar>
struct UMatrix {
  Move kind = Move::TPlus;
  std::map<std::pair<int, int>, Scalar> entries;
  Scalar at(int x, int y) const {
    auto it = entries.find({x, y});
    return it == entries.end() ? Scalar(0.0) : it->second;
  }
  std::vector<UMatrixEntry<Scalar>> list() const {
    std::vector<UMatrixEntry<Scalar>> out;
    for (auto& [k, v] : entries) out.push_back({kind, k.first, k.second, v});
    return out;
  }
};

template <class Scalar>
UMatrix<Scalar> u_matrix(const FactorModel<Scalar>& fm, Move kind, const HexagonDims& dims, int t) {
  check_move_defined(kind, dims, t);
  auto [nt, nS] = move_target(kind, t, dims.S());
  UMatrix<Scalar> U;
  U.kind = kind;
  for (int x = dims.lo(t); x <= dims.hi(t); ++x) {
    auto [w0, w1] = move_factors(fm, dims, t, x, kind);
    const int ydiag = x, yoff = move_up(kind) ? x + 1 : x - 1;
    const Scalar s = move_up(kind) ? Scalar(-1.0) : Scalar(1.0);
    if (ydiag >= dims.lo(nt, nS) && ydiag <= dims.hi(nt, nS)) U.entries[{x, ydiag}] = s * w0.value();
    if (yoff >= dims.lo(nt, nS) && yoff <= dims.hi(nt, nS)) U.entries[{x, yoff}] = s * w1.value();
  }
  return U;
}

template <class Scalar>
std::map<std::pair<int, int>, Scalar> u_product(const UMatrix<Scalar>& A, const UMatrix<Scalar>& B) {
  std::map<std::pair<int, int>, Scalar> C;
  for (auto& [ka, a] : A.entries)
    for (auto& [kb, b] : B.entries)
      if (ka.second == kb.first) C[{ka.first, kb.second}] += a * b;
  return C;
}

template <class Scalar>
double relative_residual(const std::map<std::pair<int, int>, Scalar>& A, const std::map<std::pair<int, int>, Scalar>& B) {
  double scale = 0.0, err = 0.0;
  std::map<std::pair<int, int>, std::pair<Scalar, Scalar>> all;
  for (auto& [k, v] : A) all[k].first = v;
  for (auto& [k, v] : B) all[k].second = v;
  for (auto& [k, v] : all) {
    double m = std::max(std::abs(v.first), std::abs(v.second));
    scale = std::max(scale, m);
  }
  for (auto& [k, v] : all) {
    double m = std::max(std::abs(v.first), std::abs(v.second));
    double d = std::abs(v.first - v.second);
    // relative per entry, with a floor so that cancelled zeros compare absolutely
    err = std::max(err, d / std::max(m, 1e-12 * scale));
  }
  return err;
}

// Determinant of the minor U(x_i, y_j); the two-diagonal structure makes
// it a product of entries, evaluated here by direct expansion.
template <class Scalar>
Scalar u_minor_det(const UMatrix<Scalar>& U, const Config& X, const Config& Y) {
  const std::size_t n = X.size();
  std::vector<std::vector<Scalar>> M(n, std::vector<Scalar>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M[i][j] = U.at(X[i], Y[j]);
  Scalar det(1.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    if (std::abs(M[piv][c]) == 0.0) return Scalar(0.0);
    if (piv != c) {
      std::swap(M[piv], M[c]);
      det = -det;
    }
    det *= M[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      Scalar f = M[r][c] / M[c][c];
      for (std::size_t k = c; k < n; ++k) M[r][k] -= f * M[c][k];
    }
  }
  return det;
}

// Closed-form entries of U^{S,t}_{t+} U^{S,t+1}_{S-} on its three diagonals.
template <class Scalar>
Scalar u_tplus_sminus_closed(const FactorModel<Scalar>& fm, const HexagonDims& dims, int t, int x, int diag) {
  const int N = dims.N(), T = dims.T(), S = dims.S();
  auto v = [](const LogValue<Scalar>& a) { return a.value(); };
  if (diag == 1)
    return v(fm.qpow(T + N - 1 - t) * fm.qfac(x - S - N + 1) * fm.qfac(x - S - N + 2) * fm.kfac(x - S - t + 1) *
             fm.kfac(x - T + 1) / (fm.kfac(2 * x - t - S + 2) * fm.kfac(2 * x - t - S + 1)));
  if (diag == -1)
    return v(fm.qpow(-(S + N - 1)) * fm.qfac(x + T - t - S) * fm.qfac(x) * fm.kfac(x + N - t) *
             fm.kfac(x + N - t - 1) / (fm.kfac(2 * x - t - S + 1) * fm.kfac(2 * x - t - S)));
  Scalar a = v(fm.qpow(T - S - t) * fm.qfac(x + 1) * fm.kfac(x - T + 1) / fm.kfac(2 * x - t - S + 2));
  Scalar b = v(fm.qfac(x + T - t - S) * fm.kfac(x - S - t) / fm.kfac(2 * x - t - S));
  return -v(fm.qfac(x - S - N + 1) * fm.kfac(x + N - t) / fm.kfac(2 * x - t - S + 1)) * (a + b);
}

struct CommutationReport {
  double u_identities = 0.0;  // max relative residual over the four U identities
  double closed_form = 0.0;   // u_1, u_0, u_{-1} closed forms
  int identities_checked = 0;
};

// U^{S,t}_{a} U^{S',t'}_{b} = U^{S,t}_{b} U^{S'',t''}_{a} for (a,b) in
// {(t+,S-), (t-,S-), (t+,S+), (t-,S+)} where defined.
template <class Scalar>
CommutationReport commutation_check(const FactorModel<Scalar>& fm, const HexagonDims& dims, int t) {
  CommutationReport rep;
  const int S = dims.S(), T = dims.T();
  const std::pair<Move, Move> pairs[] = {
      {Move::TPlus, Move::SMinus}, {Move::TMinus, Move::SMinus}, {Move::TPlus, Move::SPlus}, {Move::TMinus, Move::SPlus}};
  auto ok = [&](Move m, int tt, int SS) {
    auto [nt, nS] = move_target(m, tt, SS);
    return tt >= 0 && tt <= T && SS >= 0 && SS <= T && nt >= 0 && nt <= T && nS >= 0 && nS <= T;
  };
  for (auto [a, b] : pairs) {
    auto [ta, Sa] = move_target(a, t, S);
    auto [tb, Sb] = move_target(b, t, S);
    if (!ok(a, t, S) || !ok(b, t, S) || !ok(b, ta, Sa) || !ok(a, tb, Sb)) continue;
    auto L = u_product(u_matrix(fm, a, dims, t), u_matrix(fm, b, dims.with_S(Sa), ta));
    auto R = u_product(u_matrix(fm, b, dims, t), u_matrix(fm, a, dims.with_S(Sb), tb));
    rep.u_identities = std::max(rep.u_identities, relative_residual(L, R));
    ++rep.identities_checked;
    if (a == Move::TPlus && b == Move::SMinus) {
      std::map<std::pair<int, int>, Scalar> C;
      for (auto& [k, v] : L) C[k] = u_tplus_sminus_closed(fm, dims, t, k.first, k.second - k.first);
      rep.closed_form = std::max(rep.closed_form, relative_residual(L, C));
    }
  }
  return rep;
}

// Dense P^{S,t}_{kind} over full configuration spaces (oracle scale).
inline std::map<std::pair<Config, Config>, double> dense_transition(Move kind, int t, const HexagonDims& dims,
                                                                    const WeightParams& params) {
  std::map<std::pair<Config, Config>, double> P;
  for (const auto& X : section_configs(dims, dims.S(), t)) {
    auto row = transition_row(kind, PathConfig{t, X}, dims, params);
    for (auto& [Y, p] : row.targets) P[{X, Y.xs}] = p;
  }
  return P;
}

inline std::map<std::pair<Config, Config>, double> dense_product(const std::map<std::pair<Config, Config>, double>& A,
                                                                 const std::map<std::pair<Config, Config>, double>& B) {
  std::map<Config, std::vector<std::pair<Config, double>>> rowsB;
  for (auto& [k, v] : B) rowsB[k.first].push_back({k.second, v});
  std::map<std::pair<Config, Config>, double> C;
  for (auto& [k, a] : A) {
    auto it = rowsB.find(k.second);
    if (it == rowsB.end()) continue;
    for (auto& [z, b] : it->second) C[{k.first, z}] += a * b;
  }
  return C;
}

// Max entrywise difference of P_a P_b and P_b P_a (with shifted indices).
inline double p_commutation_check(Move a, Move b, int t, const HexagonDims& dims, const WeightParams& params) {
  const int S = dims.S();
  auto [ta, Sa] = move_target(a, t, S);
  auto [tb, Sb] = move_target(b, t, S);
  auto L = dense_product(dense_transition(a, t, dims, params), dense_transition(b, ta, dims.with_S(Sa), params));
  auto R = dense_product(dense_transition(b, t, dims, params), dense_transition(a, tb, dims.with_S(Sb), params));
  double err = 0.0;
  for (auto& [k, v] : L) {
    auto it = R.find(k);
    err = std::max(err, std::fabs(v - (it == R.end() ? 0.0 : it->second)));
  }
  for (auto& [k, v] : R)
    if (!L.count(k)) err = std::max(err, std::fabs(v));
  return err;
}

}  // namespace boxed_pp
