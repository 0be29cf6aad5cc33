#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oracle.hpp"
#include "weights.hpp"

namespace boxed_pp {

// Elliptic weight parameters with gauge C(i) = 1; u3 is derived so that u1 u2 u3 = 1.
struct EllipticWeightCtx {
  double p = 0.0;
  double q = 0.5;
  cplx u1{1.0, 0.0};
  cplx u2{1.0, 0.0};

  EllipticWeightCtx() = default;
  EllipticWeightCtx(double p_, double q_, cplx u1_, cplx u2_) : p(p_), q(q_), u1(u1_), u2(u2_) {
    EllipticNome check(p);
    if (!(q > 0.0)) throw domain_error("EllipticWeightCtx: require q > 0");
    if (std::abs(u1) == 0.0 || std::abs(u2) == 0.0) throw domain_error("EllipticWeightCtx: u1, u2 must be nonzero");
  }
  explicit EllipticWeightCtx(const Elliptic& e) : EllipticWeightCtx(e.p, e.q, e.u1, e.u2) {}
  cplx u3() const { return 1.0 / (u1 * u2); }
  Elliptic as_weights() const { return Elliptic{p, q, u1, u2}; }

  cplx qp(double e) const { return cplx(std::pow(q, e), 0.0); }
  cplx th(cplx x) const {
    if (std::abs(x) == 0.0) throw degenerate_parameters("elliptic: zero theta argument");
    return theta_p(x, EllipticNome(p));
  }
  cplx thp(cplx x, int k) const { return theta_pochhammer(x, EllipticNome(p), q, k); }
};

// Lattice point (i, j) with j stored doubled.
struct ELPoint {
  int i = 0;
  int j2 = 0;
  double j() const { return 0.5 * j2; }
  bool operator<(const ELPoint& o) const { return std::pair(i, j2) < std::pair(o.i, o.j2); }
  bool operator==(const ELPoint&) const = default;
};

inline cplx elliptic_lozenge_weight(const EllipticWeightCtx& ctx, int i, int j2) {
  cplx w = elliptic_lozenge_weight_j2(ctx.as_weights(), i, j2);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w) == 0.0)
    throw degenerate_parameters("elliptic_lozenge_weight: theta zero or pole");
  return w;
}

// Closed-form recurrence for w(i, j+1) / w(i, j).
inline cplx lozenge_weight_recurrence(const EllipticWeightCtx& ctx, int i, int j2) {
  const double j = 0.5 * j2;
  const cplx uu = ctx.u1 * ctx.u2;
  return ctx.q * ctx.th(ctx.qp(j - 1.5 * i - 1) * ctx.u1) * ctx.th(ctx.qp(j + 1.5 * i - 1) * ctx.u2) *
         ctx.th(ctx.qp(2 * j + 1) * uu) /
         (ctx.th(ctx.qp(j - 1.5 * i + 1) * ctx.u1) * ctx.th(ctx.qp(j + 1.5 * i + 1) * ctx.u2) *
          ctx.th(ctx.qp(2 * j - 1) * uu));
}

// Weight of the unit cube at (x, y, z).
inline cplx cube_weight(const EllipticWeightCtx& ctx, int x, int y, int z) {
  const cplx u3 = ctx.u3();
  return std::pow(ctx.q, 3) * ctx.th(ctx.qp(y + z - 2 * x - 1) * ctx.u1) * ctx.th(ctx.qp(x + z - 2 * y - 1) * ctx.u2) *
         ctx.th(ctx.qp(x + y - 2 * z - 1) * u3) /
         (ctx.th(ctx.qp(y + z - 2 * x + 1) * ctx.u1) * ctx.th(ctx.qp(x + z - 2 * y + 1) * ctx.u2) *
          ctx.th(ctx.qp(x + y - 2 * z + 1) * u3));
}

// Trigonometric limit shape zeta q^j - 1/(zeta q^j) of the lozenge weight as p -> 0
// with u1 u2 = p q zeta^2.
inline double zeta_limit_weight(double q, double zeta, double j) {
  const double a = zeta * std::pow(q, j);
  return a - 1.0 / a;
}

// Explicit inverse transpose of the lozenge weight matrix: W(a, b) for a right
// triangle a and left triangle b, coordinatized by upper corners.
inline cplx kasteleyn_inverse_W(const EllipticWeightCtx& ctx, ELPoint a, ELPoint b) {
  const int i0 = a.i, i1 = b.i;
  if (i0 >= i1) return 0.0;
  // j1 + i1/2 <= j0 + i0/2 in doubled units
  if (b.j2 + i1 > a.j2 + i0) return 0.0;
  const double j0 = a.j(), j1 = b.j();
  const int n = i1 - i0 - 1;
  const int sexp2 = a.j2 - i0 - b.j2 + i1 - 2;  // twice the sign exponent
  if (sexp2 % 2 != 0) throw domain_error("kasteleyn_inverse_W: points not on the triangle lattice");
  const double sgn = (sexp2 / 2) % 2 == 0 ? 1.0 : -1.0;
  const cplx uu = ctx.u1 * ctx.u2;
  cplx v = std::pow(uu, 0.5 * n) * sgn * std::pow(ctx.q, n * (i1 - i0 + 4 * j1 - 2) / 4.0);
  const cplx num = ctx.thp(ctx.qp(j0 + i0 / 2.0 - j1 - i1 / 2.0 + 1), n) * ctx.thp(ctx.qp(j0 + i0 / 2.0 + j1 - i1 / 2.0) * uu, n);
  const cplx den = ctx.thp(ctx.qp(1), n) * ctx.thp(ctx.qp(j0 - i0 / 2.0 - i1) * ctx.u1, n) *
                   ctx.thp(ctx.qp(j1 - 1.5 * i1 + 1) * ctx.u1, n) * ctx.thp(ctx.qp(j1 + i0 + i1 / 2.0) * ctx.u2, n) *
                   ctx.thp(ctx.qp(j0 + 1.5 * i0 + 1) * ctx.u2, n);
  if (std::abs(den) == 0.0) throw degenerate_parameters("kasteleyn_inverse_W: theta zero in denominator");
  return v * num / den;
}

// Triangles of the parallelogram x0 <= i <= x1, y0 < j + i/2 <= y1, indexed by
// (i, s) with s = j + i/2. Right triangles have i < x1, left triangles i > x0.
struct Parallelogram {
  int x0, x1, y0, y1;
  std::vector<ELPoint> rights() const {
    std::vector<ELPoint> r;
    for (int i = x0; i < x1; ++i)
      for (int s = y0 + 1; s <= y1; ++s) r.push_back({i, 2 * s - i});
    return r;
  }
  std::vector<ELPoint> lefts() const {
    std::vector<ELPoint> r;
    for (int i = x0 + 1; i <= x1; ++i)
      for (int s = y0 + 1; s <= y1; ++s) r.push_back({i, 2 * s - i});
    return r;
  }
};

// Lozenge weight matrix M(r, l): w on the horizontal lozenge, 1 on the two others.
inline Eigen::MatrixXcd lozenge_matrix(const EllipticWeightCtx& ctx, const Parallelogram& P) {
  auto R = P.rights(), L = P.lefts();
  std::map<ELPoint, int> li;
  for (std::size_t k = 0; k < L.size(); ++k) li[L[k]] = static_cast<int>(k);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(R.size(), L.size());
  for (std::size_t r = 0; r < R.size(); ++r) {
    const ELPoint a = R[r];
    if (auto it = li.find(a); it != li.end()) M(r, it->second) = elliptic_lozenge_weight(ctx, a.i, a.j2);
    for (ELPoint b : {ELPoint{a.i + 1, a.j2 - 1}, ELPoint{a.i + 1, a.j2 + 1}})
      if (auto it = li.find(b); it != li.end()) M(r, it->second) = 1.0;
  }
  return M;
}

// Numeric inverse transpose of the lozenge matrix, indexed like the matrix.
inline Eigen::MatrixXcd numeric_inverse_W(const EllipticWeightCtx& ctx, const Parallelogram& P) {
  Eigen::MatrixXcd M = lozenge_matrix(ctx, P);
  return M.fullPivLu().inverse().transpose();
}

struct WCheck {
  double identity_residual = 0;  // max |sum_b W(a,b) M(c,b) - delta|, relative to max |W|
  double inverse_residual = 0;   // closed form vs numeric inverse, relative to max |W|
};

inline WCheck check_inverse_W(const EllipticWeightCtx& ctx, const Parallelogram& P) {
  auto R = P.rights(), L = P.lefts();
  Eigen::MatrixXcd M = lozenge_matrix(ctx, P);
  Eigen::MatrixXcd W(R.size(), L.size());
  for (std::size_t a = 0; a < R.size(); ++a)
    for (std::size_t b = 0; b < L.size(); ++b) W(a, b) = kasteleyn_inverse_W(ctx, R[a], L[b]);
  const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
  WCheck c;
  Eigen::MatrixXcd I = W * M.transpose() - Eigen::MatrixXcd::Identity(R.size(), R.size());
  c.identity_residual = I.cwiseAbs().maxCoeff() / scale;
  Eigen::MatrixXcd Wn = M.fullPivLu().inverse().transpose();
  c.inverse_residual = (Wn - W).cwiseAbs().maxCoeff() / scale;
  return c;
}

// Largest difference between numeric inverses of two parallelograms on shared
// triangle pairs, relative to the largest shared entry.
inline double parallelogram_independence(const EllipticWeightCtx& ctx, const Parallelogram& P, const Parallelogram& Q) {
  auto load = [&](const Parallelogram& X) {
    auto R = X.rights(), L = X.lefts();
    Eigen::MatrixXcd Wn = numeric_inverse_W(ctx, X);
    std::map<std::pair<ELPoint, ELPoint>, cplx> m;
    for (std::size_t a = 0; a < R.size(); ++a)
      for (std::size_t b = 0; b < L.size(); ++b) m[{R[a], L[b]}] = Wn(a, b);
    return m;
  };
  auto A = load(P), B = load(Q);
  double diff = 0, scale = 1.0;
  int shared = 0;
  for (auto& [k, v] : A)
    if (auto it = B.find(k); it != B.end()) {
      diff = std::max(diff, std::abs(v - it->second));
      scale = std::max(scale, std::abs(v));
      ++shared;
    }
  if (shared == 0) throw domain_error("parallelogram_independence: no shared triangle pairs");
  return diff / scale;
}

// Three-term theta addition law evaluated at the substitution that reduces the
// inverse identity for i0 < i1, relative to the largest term.
inline double addition_law_residual(const EllipticWeightCtx& ctx, ELPoint a, ELPoint b) {
  const double i0 = a.i, i1 = b.i, j0 = a.j(), j1 = b.j();
  const cplx a0 = ctx.qp(-j0 / 2 - 3 * i0 / 4 + j1 / 2 + 3 * i1 / 4);
  const cplx a1 = ctx.qp(j0 / 2 - i0 / 4 + j1 / 2 - 5 * i1 / 4 - 1) * ctx.u1;
  const cplx a2 = ctx.qp(j0 / 2 + 3 * i0 / 4 + j1 / 2 + 3 * i1 / 4) * ctx.u2;
  const cplx z = ctx.qp(j0 / 2 - i0 / 4 - j1 / 2 + i1 / 4);
  auto T = [&](cplx x, cplx y, cplx u, cplx v) { return ctx.th(x) * ctx.th(y) * ctx.th(u) * ctx.th(v); };
  const cplx t1 = T(a0 * z, a1 * z, a2 * z, a0 * a1 * a2 / z);
  const cplx t2 = T(a0 * a1, a0 * a2, a1 * a2, z * z);
  const cplx t3 = T(z / a0, a1 / z, a2 / z, a0 * a1 * a2 * z) * z * a0;
  return std::abs(t1 - t2 + t3) / std::max({std::abs(t1), std::abs(t2), std::abs(t3), 1e-300});
}

// Ratio W(a, (i1, j1 - 1)) / W(a, (i1, j1)) predicted by the closed-form theta ratio for
// the left trapezoid with base point (i0, j0), a = (i0 - 1, j0 + 1/2), i1 = i0 + I
// and j1 = j0 - I/2 - x.
inline cplx left_hole_step_ratio(const EllipticWeightCtx& ctx, int I, int i0, int j0_2, int x) {
  const double j0 = 0.5 * j0_2;
  const cplx uu = ctx.u1 * ctx.u2;
  const cplx qx = ctx.qp(x);
  return -ctx.th(qx * ctx.qp(I + 1)) * ctx.th(qx * ctx.qp(I - j0 + 1.5 * i0) / ctx.u1) *
         ctx.th(qx * ctx.qp(-I + 2 - j0 - 1.5 * i0) / ctx.u2) * ctx.th(qx * ctx.qp(I + 1 - 2 * j0) / uu) /
         (ctx.th(qx * ctx.q) * ctx.th(qx * ctx.qp(2 * I - j0 + 1.5 * i0) / ctx.u1) *
          ctx.th(qx * ctx.qp(2 - j0 - 1.5 * i0) / ctx.u2) * ctx.th(qx * ctx.qp(1 - 2 * j0) / uu));
}

enum class TrapezoidSide { Left, Right };

// Left trapezoid: I, i0, j0 and c holes; right trapezoid additionally a, b.
struct TrapezoidGeometry {
  int I = 1, i0 = 0, j0_2 = 2, a = 0, b = 0, c = 1;
  double j0() const { return 0.5 * j0_2; }
  int s0() const {
    if ((j0_2 + i0) % 2 != 0) throw domain_error("TrapezoidGeometry: j0 + i0/2 must be an integer");
    return (j0_2 + i0) / 2;
  }
};

inline cplx trapezoid_cross_term(const EllipticWeightCtx& ctx, const TrapezoidGeometry& g, const std::vector<int>& xs) {
  const cplx uu = ctx.u1 * ctx.u2;
  cplx v = 1.0;
  for (std::size_t k = 0; k < xs.size(); ++k)
    for (std::size_t l = k + 1; l < xs.size(); ++l)
      v *= ctx.qp(-xs[k]) * ctx.th(ctx.qp(xs[k] - xs[l])) * ctx.th(ctx.qp(xs[k] + xs[l] + g.I - 2 * g.j0() + 1) / uu);
  return v;
}

// Closed-form tiling sum of a trapezoid with holes at x_1 < ... < x_c, up to an
// x-independent constant.
inline cplx trapezoid_weight_sum(const EllipticWeightCtx& ctx, TrapezoidSide side, const TrapezoidGeometry& g,
                                 const std::vector<int>& xs) {
  if (static_cast<int>(xs.size()) != g.c) throw domain_error("trapezoid_weight_sum: need c hole positions");
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (xs[k] < 0 || (k > 0 && xs[k] <= xs[k - 1])) throw domain_error("trapezoid_weight_sum: holes must increase from 0");
  const cplx u1 = ctx.u1, u2 = ctx.u2, uu = u1 * u2;
  const double I = g.I, i0 = g.i0, j0 = g.j0(), a = g.a, b = g.b;
  const int c = g.c;
  auto Q = [&](double e) { return ctx.qp(e); };
  cplx v = 1.0;
  for (int x : xs) {
    const double sg = x % 2 == 0 ? 1.0 : -1.0;
    if (side == TrapezoidSide::Left) {
      v *= sg * ctx.thp(Q(I + 1), x) * ctx.thp(Q(I - j0 + 1.5 * i0) / u1, x) * ctx.thp(Q(-I + 2 - j0 - 1.5 * i0) / u2, x) *
           ctx.thp(Q(I + 1 - 2 * j0) / uu, x);
      v /= ctx.thp(Q(1), x) * ctx.thp(Q(2 * I - j0 + 1.5 * i0) / u1, x) * ctx.thp(Q(2 - j0 - 1.5 * i0) / u2, x) *
           ctx.thp(Q(1 - 2 * j0) / uu, x);
      v /= ctx.thp(Q(1 - I + j0 - 1.5 * i0 - x) * u1, c - 1) * ctx.thp(Q(x - j0 - 1.5 * i0 + 2) / u2, c - 1);
    } else {
      v *= sg * ctx.thp(Q(1 - b - c), x) * ctx.thp(Q(2 * I - j0 + 2 + 1.5 * i0) / u1, x) *
           ctx.thp(Q(-a + c - j0 - 1.5 * i0) / u2, x) * ctx.thp(Q(-2 * j0 + a + b + 1) / uu, x);
      v /= ctx.thp(Q(I - a - b + 1), x) * ctx.thp(Q(I + 2 - j0 + 1.5 * i0 + a - c) / u1, x) *
           ctx.thp(Q(-I - j0 - 1.5 * i0) / u2, x) * ctx.thp(Q(I - 2 * j0 + b + c + 1) / uu, x);
      v /= ctx.thp(Q(x + I - j0 + 1.5 * i0 + 2 + a - c) / u1, c - 1) * ctx.thp(Q(j0 + 1.5 * i0 + a + 1 - c - x) * u2, c - 1);
    }
  }
  return v * trapezoid_cross_term(ctx, g, xs);
}

struct TilingSum {
  cplx weight{0.0, 0.0};
  std::uint64_t count = 0;
};

// Exhaustive weighted count of lozenge tilings of a parallelogram with some
// right and left triangles removed.
inline TilingSum parallelogram_tiling_sum(const EllipticWeightCtx& ctx, const Parallelogram& P,
                                          const std::set<ELPoint>& removed_rights, const std::set<ELPoint>& removed_lefts) {
  std::vector<ELPoint> R;
  for (auto r : P.rights())
    if (!removed_rights.count(r)) R.push_back(r);
  std::set<ELPoint> L;
  for (auto l : P.lefts())
    if (!removed_lefts.count(l)) L.insert(l);
  TilingSum out;
  if (R.size() != L.size()) return out;
  std::set<ELPoint> used;
  std::function<void(std::size_t, cplx)> rec = [&](std::size_t k, cplx w) {
    if (k == R.size()) {
      out.weight += w;
      ++out.count;
      return;
    }
    const ELPoint a = R[k];
    const std::pair<ELPoint, bool> opts[3] = {{a, true}, {{a.i + 1, a.j2 - 1}, false}, {{a.i + 1, a.j2 + 1}, false}};
    for (auto& [b, horizontal] : opts) {
      if (!L.count(b) || used.count(b)) continue;
      used.insert(b);
      rec(k + 1, horizontal ? w * elliptic_lozenge_weight(ctx, a.i, a.j2) : w);
      used.erase(b);
    }
  };
  rec(0, cplx(1.0, 0.0));
  return out;
}

// Exhaustive tiling sum of the trapezoid with holes xs, as a region of the
// smallest enclosing parallelogram.
inline TilingSum trapezoid_tiling_sum(const EllipticWeightCtx& ctx, TrapezoidSide side, const TrapezoidGeometry& g,
                                      const std::vector<int>& xs) {
  const int s0 = g.s0();
  const int xmax = *std::max_element(xs.begin(), xs.end());
  std::set<ELPoint> rr, rl;
  auto pt = [](int i, int s) { return ELPoint{i, 2 * s - i}; };
  if (side == TrapezoidSide::Left) {
    for (int k = 1; k <= g.c; ++k) rr.insert(pt(g.i0 - k, s0 + 1 - k));
    for (int x : xs) rl.insert(pt(g.i0 + g.I, s0 - x));
    return parallelogram_tiling_sum(ctx, {g.i0 - g.c, g.i0 + g.I, s0 - xmax - 2, s0 + 1}, rr, rl);
  }
  for (int x : xs) rr.insert(pt(g.i0 + g.I, s0 - x));
  for (int l = 1; l <= g.c; ++l) rl.insert(pt(g.i0 + g.a - g.c + l, s0 - g.b - g.c + l));
  const int lo = std::min(s0 - xmax, s0 - g.b - g.c + 1);
  return parallelogram_tiling_sum(ctx, {g.i0 + g.I, g.i0 + g.a, lo - 1, s0}, rr, rl);
}

// Plane partitions in an a x b x c box: a x b matrices, entries in [0, c],
// weakly decreasing along rows and columns.
using PlanePartition = std::vector<std::vector<int>>;

inline bool is_plane_partition(const PlanePartition& P, int a, int b, int c) {
  if (static_cast<int>(P.size()) != a) return false;
  for (int i = 0; i < a; ++i) {
    if (static_cast<int>(P[i].size()) != b) return false;
    for (int j = 0; j < b; ++j) {
      if (P[i][j] < 0 || P[i][j] > c) return false;
      if (i > 0 && P[i][j] > P[i - 1][j]) return false;
      if (j > 0 && P[i][j] > P[i][j - 1]) return false;
    }
  }
  return true;
}

inline std::vector<PlanePartition> plane_partitions(int a, int b, int c, std::uint64_t cap = oracle_cap()) {
  if (a < 0 || b < 0 || c < 0) throw domain_error("plane_partitions: negative box side");
  std::vector<PlanePartition> out;
  PlanePartition cur(a, std::vector<int>(b, 0));
  std::function<void(int, int)> rec = [&](int i, int j) {
    if (i == a || b == 0) {
      if (out.size() >= cap) throw too_large("plane_partitions: enumeration cap exceeded");
      out.push_back(cur);
      return;
    }
    const int ni = j + 1 < b ? i : i + 1, nj = j + 1 < b ? j + 1 : 0;
    int hi = c;
    if (i > 0) hi = std::min(hi, cur[i - 1][j]);
    if (j > 0) hi = std::min(hi, cur[i][j - 1]);
    for (int v = 0; v <= hi; ++v) {
      cur[i][j] = v;
      rec(ni, nj);
    }
    cur[i][j] = 0;
  };
  rec(0, 0);
  return out;
}

struct MacMahonResult {
  cplx lhs, rhs;
  double rel_err = 0;
  std::size_t terms = 0;
};

inline MacMahonResult finish(cplx lhs, cplx rhs, std::size_t n) {
  return {lhs, rhs, std::abs(lhs - rhs) / std::abs(rhs), n};
}

// Product of cube weights over the cubes of a plane partition.
inline cplx partition_term(const EllipticWeightCtx& ctx, const PlanePartition& P) {
  cplx v = 1.0;
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = 0; j < P[i].size(); ++j)
      for (int k = 1; k <= P[i][j]; ++k) v *= cube_weight(ctx, static_cast<int>(i) + 1, static_cast<int>(j) + 1, k);
  return v;
}

inline MacMahonResult macmahon_check(const EllipticWeightCtx& ctx, int a, int b, int c) {
  auto pps = plane_partitions(a, b, c);
  cplx lhs = 0.0;
  for (auto& P : pps) lhs += partition_term(ctx, P);
  const cplx u3 = ctx.u3();
  cplx rhs = std::pow(ctx.q, a * b * c);
  auto Q = [&](int e) { return ctx.qp(e); };
  for (int i = 1; i <= a; ++i)
    for (int j = 1; j <= b; ++j)
      for (int k = 1; k <= c; ++k)
        rhs *= ctx.th(Q(i + j + k - 1)) * ctx.th(Q(j + k - i - 1) * ctx.u1) * ctx.th(Q(i + k - j - 1) * ctx.u2) *
               ctx.th(Q(i + j - k - 1) * u3) /
               (ctx.th(Q(i + j + k - 2)) * ctx.th(Q(j + k - i) * ctx.u1) * ctx.th(Q(i + k - j) * ctx.u2) *
                ctx.th(Q(i + j - k) * u3));
  return finish(lhs, rhs, pps.size());
}

// Degeneration p -> 0 with u1 u2 = p q zeta^2, summed form.
inline MacMahonResult macmahon_zeta_check(double q, double zeta, int a, int b, int c) {
  auto pps = plane_partitions(a, b, c);
  const double z2 = zeta * zeta;
  double lhs = 0.0;
  for (auto& P : pps) {
    double v = 1.0;
    int size = 0;
    for (int i = 1; i <= a; ++i)
      for (int j = 1; j <= b; ++j) {
        const int h = P[i - 1][j - 1];
        size += h;
        v *= (z2 - std::pow(q, i + j - 2 * h - 2)) / (z2 - std::pow(q, i + j - c - 2));
      }
    lhs += std::pow(q, size) * v;
  }
  double rhs = 1.0;
  for (int i = 1; i <= a; ++i)
    for (int j = 1; j <= b; ++j) rhs *= (1 - std::pow(q, i + j + c - 1)) / (1 - std::pow(q, i + j - 1));
  return finish(lhs, rhs, pps.size());
}

// Same degeneration in the per-cube product form.
inline MacMahonResult macmahon_zeta_cube_check(double q, double zeta, int a, int b, int c) {
  auto pps = plane_partitions(a, b, c);
  const double z2 = zeta * zeta;
  double lhs = 0.0;
  for (auto& P : pps) {
    double v = 1.0;
    for (int i = 1; i <= a; ++i)
      for (int j = 1; j <= b; ++j)
        for (int k = 1; k <= P[i - 1][j - 1]; ++k)
          v *= (std::pow(q, 2 * k + 1) * z2 - std::pow(q, i + j - 1)) / (std::pow(q, 2 * k) * z2 - std::pow(q, i + j));
    lhs += v;
  }
  double rhs = 1.0;
  for (int i = 1; i <= a; ++i)
    for (int j = 1; j <= b; ++j)
      for (int k = 1; k <= c; ++k)
        rhs *= (1 - std::pow(q, i + j + k - 1)) * (z2 - std::pow(q, i + j - k - 2)) /
               ((1 - std::pow(q, i + j + k - 2)) * (z2 - std::pow(q, i + j - k - 1)));
  return finish(lhs, rhs, pps.size());
}

// Tiling of the hexagon (N, T, S) = (a, b + c, c) whose paths take all up-steps first;
// it corresponds to the empty plane partition.
inline Tiling empty_partition_tiling(const HexagonDims& d) {
  Tiling til;
  for (int t = 0; t <= d.T(); ++t) {
    Config X;
    for (int i = 0; i < d.N(); ++i) X.push_back(i + std::min(t, d.S()));
    til.slices.push_back(X);
  }
  return til;
}

// Ratios of elliptic tiling weights to the empty-partition tiling, over all tilings.
inline std::vector<cplx> tiling_weight_ratios(const EllipticWeightCtx& ctx, const HexagonDims& d) {
  const WeightParams params = ctx.as_weights();
  const LogValue<cplx> ref = tiling_weight_complex(empty_partition_tiling(d), params, d);
  std::vector<cplx> out;
  enumerate_tilings(d, [&](const Tiling& t) { out.push_back((tiling_weight_complex(t, params, d) / ref).value()); });
  return out;
}

struct IdentityRow {
  std::string identity, parameters;
  cplx lhs, rhs;
  double rel_err;
};

inline void write_identity_table(std::ostream& os, const std::vector<IdentityRow>& rows) {
  os.precision(15);
  os << "identity\tparameters\tlhs\trhs\trel_err\n";
  for (auto& r : rows) os << r.identity << '\t' << r.parameters << '\t' << r.lhs << '\t' << r.rhs << '\t' << r.rel_err << '\n';
}

}  // namespace boxed_pp
