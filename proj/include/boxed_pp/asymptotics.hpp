#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "weights.hpp"

namespace boxed_pp {

// Macroscopic hexagon with sides scaled by 1/L. The base is stored through its
// logarithm so that trigonometric bases e^{ia} have unambiguous real powers.
struct ScaledGeometry {
  double S = 1.0, T = 2.0, N = 1.0;
  cplx log_q{std::log(0.5), 0.0};
  cplx kappa_sq{0.0, 0.0};

  static ScaledGeometry real(double S, double T, double N, double q, double kappa_sq) {
    if (!(q > 0.0) || q == 1.0) throw domain_error("ScaledGeometry: q must be positive and different from 1");
    return make(S, T, N, cplx(std::log(q), 0.0), cplx(kappa_sq, 0.0));
  }
  // Base e^{ia}, kappa^2 = e^{2ib}.
  static ScaledGeometry trig(double S, double T, double N, double a, double b) {
    if (a == 0.0) throw domain_error("ScaledGeometry: trigonometric angle must be nonzero");
    return make(S, T, N, cplx(0.0, a), std::polar(1.0, 2.0 * b));
  }
  // Limit geometry of a finite hexagon at scale L (sides divided by L, base q^L).
  static ScaledGeometry from_finite(const HexagonDims& d, const WeightParams& params, double L) {
    const double S = d.S() / L, T = d.T() / L, N = d.N() / L;
    if (auto* p = std::get_if<QHahn>(&params)) return real(S, T, N, std::pow(p->q, L), 0.0);
    if (auto* p = std::get_if<QRacah>(&params)) return real(S, T, N, std::pow(p->q, L), p->kappa_sq);
    if (auto* p = std::get_if<QRacahTrig>(&params)) return trig(S, T, N, p->alpha * L, p->beta);
    throw domain_error("ScaledGeometry: family " + family_name(params) + " has no q-deformed limit");
  }

  cplx qp(double e) const { return std::exp(e * log_q); }
  bool is_real() const { return log_q.imag() == 0.0 && kappa_sq.imag() == 0.0; }
  // Hexagon vertices in (t,x), counterclockwise from the origin.
  std::array<std::pair<double, double>, 6> vertices() const {
    return {{{0, 0}, {T - S, 0}, {T, S}, {T, S + N}, {S, S + N}, {0, N}}};
  }
  double lo(double t) const { return std::max(0.0, t + S - T); }
  double hi(double t) const { return std::min(t + N, S + N); }
  bool inside(double t, double x) const { return t > 0 && t < T && x > lo(t) && x < hi(t); }

 private:
  static ScaledGeometry make(double S, double T, double N, cplx lq, cplx k2) {
    if (!(S > 0 && S < T && N > 0)) throw domain_error("ScaledGeometry: require 0 < S < T and N > 0");
    ScaledGeometry g;
    g.S = S;
    g.T = T;
    g.N = N;
    g.log_q = lq;
    g.kappa_sq = k2;
    return g;
  }
};

// Q(u,v) = uu u^2 + vv v^2 + uv u v + u1 u + v1 v + c.
struct QPoly {
  cplx uu, vv, uv, u1, v1, c;
  cplx operator()(cplx u, cplx v) const { return uu * u * u + vv * v * v + uv * u * v + u1 * u + v1 * v + c; }
};

inline QPoly q_polynomial(const ScaledGeometry& g) {
  const double S = g.S, T = g.T, N = g.N;
  const cplx k2 = g.kappa_sq;
  auto Q = [&](double e) { return g.qp(e); };
  QPoly p;
  p.uu = 1.0;
  p.vv = Q(T - S - N) + k2 * (1.0 + Q(-S + N + T) + Q(-2 * S + T) + Q(-S - N) - Q(-S) - Q(-S + T)) + k2 * k2 * Q(-S + N);
  p.uv = Q(T - S) + Q(-N) + k2 * (Q(N) + Q(-S));
  p.v1 = -(Q(T) + Q(T - S - N) + k2 * (1.0 + Q(N - S + T)));
  p.u1 = -(1.0 + Q(T));
  p.c = Q(T);
  return p;
}

// First integrals as u = U(z)/d(z), v = V(z)/d(z); each entry is {constant, linear}.
struct FirstIntegrals {
  std::array<cplx, 2> U, V, d;
};

inline FirstIntegrals first_integrals(const ScaledGeometry& g, double t, double x) {
  const cplx k2 = g.kappa_sq;
  FirstIntegrals f;
  f.d = {1.0, -k2 * g.qp(-g.S + 2 * x - t)};
  f.U = {-k2 * g.qp(-g.S + 2 * x), g.qp(t)};
  f.V = {g.qp(x), -g.qp(x)};
  return f;
}

// Coefficients {c0, c1, c2} of d(z)^2 Q(u(z), v(z)).
inline std::array<cplx, 3> z_quadratic(const ScaledGeometry& g, double t, double x) {
  const QPoly Q = q_polynomial(g);
  const FirstIntegrals f = first_integrals(g, t, x);
  auto mul = [](const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
    return std::array<cplx, 3>{a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1]};
  };
  std::array<cplx, 3> r{};
  auto add = [&](cplx s, const std::array<cplx, 3>& p) {
    for (int i = 0; i < 3; ++i) r[i] += s * p[i];
  };
  add(Q.uu, mul(f.U, f.U));
  add(Q.vv, mul(f.V, f.V));
  add(Q.uv, mul(f.U, f.V));
  add(Q.v1, mul(f.V, f.d));
  add(Q.u1, mul(f.U, f.d));
  add(Q.c, mul(f.d, f.d));
  return r;
}

// Coefficients divided by the phase of the leading one, so that they are real
// whenever the quadratic has a conjugate-invariant root set.
inline std::array<cplx, 3> normalized_z_quadratic(const ScaledGeometry& g, double t, double x) {
  auto c = z_quadratic(g, t, x);
  const double a = std::abs(c[2]);
  if (a < 1e-14 * (std::abs(c[0]) + std::abs(c[1]) + a))
    throw degenerate_parameters("z-quadratic: leading coefficient vanishes at this point");
  const cplx ph = c[2] / a;
  for (auto& v : c) v /= ph;
  return c;
}

// Negative in the liquid region, positive in frozen regions.
inline double discriminant(const ScaledGeometry& g, double t, double x) {
  auto c = normalized_z_quadratic(g, t, x);
  return (c[1] * c[1] - 4.0 * c[2] * c[0]).real();
}

struct LocalSlope {
  double t = 0, x = 0;
  bool frozen = true;
  cplx z{0.0, 0.0};
  // p1: horizontal lozenges (holes), p2: particles moving up, p3: particles staying level.
  double p1 = 0, p2 = 0, p3 = 0;
  double phi = 0, c = 0;
};

// Triangle (0,1,z): p1 = angle at 0, p2 = angle at 1, p3 = angle at z, all over pi.
// Im z <= 0 gives the degenerate triple of the nearest real limit.
inline std::array<double, 3> slope_from_z(cplx z) {
  const double pi = std::numbers::pi;
  if (!(z.imag() > 0.0)) {
    const double r = z.real();
    if (r < 0) return {1, 0, 0};
    if (r > 1) return {0, 1, 0};
    return {0, 0, 1};
  }
  const double a0 = std::arg(z);
  const double a1 = pi - std::arg(z - 1.0);
  return {a0 / pi, a1 / pi, 1.0 - a0 / pi - a1 / pi};
}

inline LocalSlope local_z(const ScaledGeometry& g, double t, double x) {
  if (!g.inside(t, x)) throw domain_error("local_z: point outside the scaled hexagon");
  auto c = normalized_z_quadratic(g, t, x);
  const cplx D = c[1] * c[1] - 4.0 * c[2] * c[0];
  LocalSlope s;
  s.t = t;
  s.x = x;
  if (D.real() >= 0.0) {
    s.frozen = true;
    const cplx r = (-c[1] + std::sqrt(D)) / (2.0 * c[2]);
    auto p = slope_from_z(cplx(r.real(), 0.0));
    s.z = cplx(r.real(), 0.0);
    s.p1 = p[0], s.p2 = p[1], s.p3 = p[2];
    s.phi = std::numbers::pi * (1.0 - s.p1);
    return s;
  }
  cplx z = (-c[1] + std::sqrt(D)) / (2.0 * c[2]);
  if (z.imag() < 0) z = (-c[1] - std::sqrt(D)) / (2.0 * c[2]);
  s.frozen = false;
  s.z = z;
  auto p = slope_from_z(z);
  s.p1 = p[0], s.p2 = p[1], s.p3 = p[2];
  s.phi = std::numbers::pi - std::arg(z);
  s.c = std::abs(z);
  return s;
}

struct PhiC {
  double phi = 0, c = 0;
  cplx A, B, E;
  bool frozen = true;
};

// Density angle from the A, B, E products. A*B <= 0 is frozen with phi = 0 when
// E + A + B >= 0 and phi = pi otherwise.
inline PhiC phi_and_c(const ScaledGeometry& g, double t, double x) {
  const double S = g.S, T = g.T, N = g.N;
  const cplx k2 = g.kappa_sq;
  auto Q = [&](double e) { return g.qp(e); };
  PhiC r;
  r.A = (1.0 - Q(-S - N + x)) * (1.0 - k2 * Q(-T + x)) * (1.0 - Q(-t - N + x)) * (1.0 - k2 * Q(-t - S + x));
  r.B = Q(-2 * N - T) * (1.0 - Q(x)) * (1.0 - k2 * Q(-t + N + x)) * (1.0 - Q(-t - S + T + x)) * (1.0 - k2 * Q(-S + N + x));
  const cplx m = 1.0 - k2 * Q(-t - S + 2 * x);
  r.E = Q(-N) * (1.0 - Q(N)) * (1.0 - Q(-T - N)) * m * m;
  const cplx AB = r.A * r.B;
  const cplx num = r.E + r.A + r.B;
  if (AB.real() <= 0.0) {
    r.phi = num.real() >= 0 ? 0.0 : std::numbers::pi;
  } else {
    const double arg = (num / (2.0 * std::sqrt(AB))).real();
    r.phi = std::acos(std::clamp(arg, -1.0, 1.0));
    r.frozen = arg >= 1.0 || arg <= -1.0;
  }
  const cplx c2 = Q(T - 2 * t) * (1.0 - Q(-(S + N - x))) * (1.0 - Q(x)) * (1.0 - k2 * Q(x + N - S)) *
                  (1.0 - k2 * Q(x - T)) /
                  ((1.0 - Q(x + T - t - S)) * (1.0 - Q(-t - N + x)) * (1.0 - k2 * Q(x + N - t)) * (1.0 - k2 * Q(x - t - S)));
  r.c = std::sqrt(std::abs(c2));
  return r;
}

// Upper-half-plane root predicted by the closed form: the conjugate of -c e^{i phi}.
inline cplx closed_form_z(const PhiC& r) { return std::conj(-r.c * std::polar(1.0, r.phi)); }

// (1/2 pi) int_a^b (1+c e^{i th})^{dt} e^{i th dx} d th by panelled Gauss-Kronrod,
// with at least (|dt| + |dx| + 1) panels per half radian of arc.
inline cplx bulk_arc_integral(int dx, int dt, double a, double b, double c) {
  if (b <= a) return 0.0;
  auto integrand = [&](double th) {
    const cplx w = std::polar(1.0, th);
    return std::pow(1.0 + c * w, dt) * std::pow(w, dx);
  };
  const int panels = std::max(4, (std::abs(dt) + std::abs(dx) + 1) * static_cast<int>(std::ceil((b - a) / 0.5)));
  const double h = (b - a) / panels;
  double re = 0, im = 0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h, hi = lo + h;
    re += GK::integrate([&](double th) { return integrand(th).real(); }, lo, hi, 8, 1e-13);
    im += GK::integrate([&](double th) { return integrand(th).imag(); }, lo, hi, 8, 1e-13);
  }
  return cplx(re, im) / (2 * std::numbers::pi);
}

// Limit kernel (1/2 pi i) int (1+cw)^{dt} w^{dx-1} dw from e^{-i phi} to e^{i phi},
// through w = 1 when dt <= 0 and through w = -1 (clockwise) when dt > 0.
// dx is the first position minus the second, dt the second time minus the first.
inline cplx bulk_kernel(int dx, int dt, double phi, double c) {
  const double pi = std::numbers::pi;
  if (dt == 0) {
    if (dx == 0) return phi / pi;
    return std::sin(phi * dx) / (pi * dx);
  }
  if (dt < 0) return bulk_arc_integral(dx, dt, -phi, phi, c);
  return -bulk_arc_integral(dx, dt, phi, 2 * pi - phi, c);
}

inline cplx bulk_kernel(int dx, int dt, const LocalSlope& s) { return bulk_kernel(dx, dt, s.phi, s.c); }

struct Point2 {
  double t, x;
};

struct tracer_error : domain_error {
  std::vector<Point2> partial;
  tracer_error(const std::string& what, std::vector<Point2> p) : domain_error(what), partial(std::move(p)) {}
};

struct SideTangency {
  double distance = 0;  // curve to side
  Point2 nearest{0, 0};
};

struct FrozenBoundary {
  std::vector<Point2> curve;  // closed: last point equals first
  std::array<SideTangency, 6> sides{};
  double grid_step = 0;
  double max_tangency_residual() const {
    double m = 0;
    for (auto& s : sides) m = std::max(m, s.distance);
    return m;
  }
};

namespace detail {

inline double seg_point_distance(Point2 p, Point2 a, Point2 b) {
  const double vt = b.t - a.t, vx = b.x - a.x;
  const double L2 = vt * vt + vx * vx;
  double s = L2 > 0 ? ((p.t - a.t) * vt + (p.x - a.x) * vx) / L2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(p.t - a.t - s * vt, p.x - a.x - s * vx);
}

// Grid step dividing S, T and N when they are commensurate with small denominators.
inline double aligned_step(const ScaledGeometry& g, int resolution) {
  const double span = std::max(g.T, g.S + g.N);
  for (int m = 1; m <= 1000; ++m) {
    auto ok = [&](double v) { return std::fabs(v * m - std::round(v * m)) < 1e-9; };
    if (ok(g.S) && ok(g.T) && ok(g.N)) {
      const int k = std::max(1, static_cast<int>(std::ceil(resolution / (span * m))));
      return 1.0 / (m * k);
    }
  }
  return span / resolution;
}

}  // namespace detail

// Traces the zero set of the discriminant inside the hexagon by marching
// triangles on a grid whose lines contain all six sides (when commensurate).
// Values outside the hexagon are treated as frozen. Edge crossings are polished
// by bisection.
inline FrozenBoundary frozen_boundary(const ScaledGeometry& g, int resolution = 400) {
  const double h = detail::aligned_step(g, resolution);
  const int nt = static_cast<int>(std::llround(g.T / h));
  const int nx = static_cast<int>(std::llround((g.S + g.N) / h));
  const double eps = 1e-9 * h;
  auto in_closed = [&](double t, double x) {
    return t >= -eps && t <= g.T + eps && x >= g.lo(t) - eps && x <= g.hi(t) + eps;
  };
  auto on_side = [&](double t, double x) { return in_closed(t, x) && !g.inside(t, x); };
  auto D = [&](double t, double x) {
    if (!in_closed(t, x)) return 1.0;
    double v;
    try {
      v = discriminant(g, t, x);
    } catch (const degenerate_parameters&) {
      return 1.0;
    }
    if (!std::isfinite(v)) return 1.0;
    if (on_side(t, x)) v = std::max(v, 1e-300);
    return v;
  };
  std::vector<double> val((nt + 1) * (nx + 1));
  auto id = [&](int i, int j) { return i * (nx + 1) + j; };
  for (int i = 0; i <= nt; ++i)
    for (int j = 0; j <= nx; ++j) val[id(i, j)] = D(i * h, j * h);

  std::map<std::pair<int, int>, Point2> crossing;
  auto cross = [&](int a, int b) -> Point2 {
    auto key = std::minmax(a, b);
    auto it = crossing.find(key);
    if (it != crossing.end()) return it->second;
    Point2 pa{(a / (nx + 1)) * h, (a % (nx + 1)) * h}, pb{(b / (nx + 1)) * h, (b % (nx + 1)) * h};
    double fa = val[a];
    double lo = 0, hi = 1;
    for (int it2 = 0; it2 < 60; ++it2) {
      const double m = 0.5 * (lo + hi);
      const double fm = D(pa.t + m * (pb.t - pa.t), pa.x + m * (pb.x - pa.x));
      if ((fm < 0) == (fa < 0)) lo = m;
      else hi = m;
    }
    const double m = 0.5 * (lo + hi);
    Point2 p{pa.t + m * (pb.t - pa.t), pa.x + m * (pb.x - pa.x)};
    crossing[key] = p;
    return p;
  };

  using Key = std::pair<int, int>;
  std::map<Key, std::vector<Key>> adj;
  auto add_triangle = [&](int a, int b, int c) {
    std::array<int, 3> v{a, b, c};
    std::vector<Key> ks;
    for (int e = 0; e < 3; ++e) {
      int p = v[e], q = v[(e + 1) % 3];
      if ((val[p] < 0) != (val[q] < 0)) {
        ks.push_back(std::minmax(p, q));
        cross(p, q);
      }
    }
    if (ks.size() == 2) {
      adj[ks[0]].push_back(ks[1]);
      adj[ks[1]].push_back(ks[0]);
    }
  };
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nx; ++j) {
      // split along the (1,1) diagonal, parallel to two hexagon sides
      add_triangle(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      add_triangle(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }

  std::map<Key, bool> used;
  std::vector<Point2> best, longest_open;
  for (auto& [start, nb] : adj) {
    if (used[start]) continue;
    std::vector<Key> chain{start};
    used[start] = true;
    Key prev = start, cur = start;
    bool closed = false;
    while (true) {
      Key next{-1, -1};
      for (auto& k : adj[cur])
        if (k != prev && !used[k]) {
          next = k;
          break;
        }
      if (next.first < 0) {
        for (auto& k : adj[cur])
          if (k == start && chain.size() > 2) closed = true;
        break;
      }
      used[next] = true;
      chain.push_back(next);
      prev = cur;
      cur = next;
    }
    std::vector<Point2> pts;
    for (auto& k : chain) pts.push_back(crossing[k]);
    if (closed) {
      pts.push_back(pts.front());
      if (pts.size() > best.size()) best = pts;
    } else if (pts.size() > longest_open.size()) {
      longest_open = pts;
    }
  }
  if (best.empty()) throw tracer_error("frozen_boundary: no closed curve found", longest_open);

  FrozenBoundary fb;
  fb.curve = best;
  fb.grid_step = h;
  auto V = g.vertices();
  for (int s = 0; s < 6; ++s) {
    Point2 a{V[s].first, V[s].second}, b{V[(s + 1) % 6].first, V[(s + 1) % 6].second};
    SideTangency st;
    st.distance = std::numeric_limits<double>::infinity();
    for (auto& p : best) {
      double d = detail::seg_point_distance(p, a, b);
      if (d < st.distance) st.distance = d, st.nearest = p;
    }
    fb.sides[s] = st;
  }
  return fb;
}

// Hexagon vertices at which the liquid region reaches the vertex: on small arcs
// around the vertex inside the hexagon, a positive fraction of points is liquid
// at every radius in {0.2, 0.1, 0.05, 0.02, 0.01} times the hexagon size.
inline std::vector<int> detect_nodes(const ScaledGeometry& g, double min_fraction = 0.05) {
  std::vector<int> nodes;
  const double scale = std::min({g.T - g.S, g.S, g.N});
  auto V = g.vertices();
  for (int v = 0; v < 6; ++v) {
    bool node = true;
    for (double r : {0.2, 0.1, 0.05, 0.02, 0.01}) {
      int inside = 0, liquid = 0;
      for (int k = 0; k < 720; ++k) {
        const double th = 2 * std::numbers::pi * k / 720;
        const double t = V[v].first + r * scale * std::cos(th), x = V[v].second + r * scale * std::sin(th);
        if (!g.inside(t, x)) continue;
        ++inside;
        try {
          if (discriminant(g, t, x) < 0) ++liquid;
        } catch (const degenerate_parameters&) {
        }
      }
      if (inside == 0 || liquid < min_fraction * inside) {
        node = false;
        break;
      }
    }
    if (node) nodes.push_back(v);
  }
  return nodes;
}

inline void write_boundary_csv(std::ostream& os, const FrozenBoundary& fb) {
  os.precision(12);
  os << "t,x\n";
  for (auto& p : fb.curve) os << p.t << ',' << p.x << '\n';
}

// Density map on an n x n grid of interior points.
inline void write_density_csv(std::ostream& os, const ScaledGeometry& g, int n) {
  os.precision(12);
  os << "t,x,p1,p2,p3,phi\n";
  for (int i = 1; i < n; ++i) {
    const double t = g.T * i / n;
    for (int j = 1; j < n; ++j) {
      const double x = g.lo(t) + (g.hi(t) - g.lo(t)) * j / n;
      if (!g.inside(t, x)) continue;
      LocalSlope s;
      try {
        s = local_z(g, t, x);
      } catch (const degenerate_parameters&) {
        continue;
      }
      os << t << ',' << x << ',' << s.p1 << ',' << s.p2 << ',' << s.p3 << ',' << s.phi << '\n';
    }
  }
}

}  // namespace boxed_pp
