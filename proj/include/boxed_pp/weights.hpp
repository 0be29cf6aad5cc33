#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "numerics.hpp"

namespace boxed_pp {

struct inadmissible_parameters : domain_error {
  using domain_error::domain_error;
};
struct degenerate_parameters : domain_error {
  using domain_error::domain_error;
};
struct structural_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Box sides a,b,c; derived N = a, T = b + c, S = c.
struct HexagonDims {
  int a = 1, b = 1, c = 1;

  HexagonDims() = default;
  HexagonDims(int a_, int b_, int c_) : a(a_), b(b_), c(c_) {
    if (a < 1 || b < 0 || c < 0) throw domain_error("HexagonDims: require a >= 1, b >= 0, c >= 0");
  }
  // Same (N,T) with S replaced; b absorbs the change so that T is fixed.
  static HexagonDims from_NTS(int N, int T, int S) {
    if (S < 0 || S > T) throw domain_error("HexagonDims: require 0 <= S <= T");
    return HexagonDims(N, T - S, S);
  }
  int N() const { return a; }
  int T() const { return b + c; }
  int S() const { return c; }
  HexagonDims with_S(int S) const { return from_NTS(N(), T(), S); }

  // Section lattice at time t for level S (defaults to this hexagon's S).
  int lo(int t) const { return lo(t, S()); }
  int hi(int t) const { return hi(t, S()); }
  int lo(int t, int S_) const { return std::max(0, t + S_ - T()); }
  int hi(int t, int S_) const { return std::min(t + N() - 1, S_ + N() - 1); }
  bool contains(int t, int x) const { return t >= 0 && t <= T() && x >= lo(t) && x <= hi(t); }
  bool operator==(const HexagonDims&) const = default;
};

struct Hahn {};
struct Racah {
  double K = 0.0;
};
struct QHahn {
  double q = 0.5;
};
struct QRacah {
  double q = 0.5;
  double kappa_sq = -1.0;
};
struct QRacahTrig {
  double alpha = 0.1;
  double beta = 1.0;
};
struct Elliptic {
  double p = 0.0;
  double q = 0.5;
  cplx u1{1.0, 0.0};
  cplx u2{1.0, 0.0};
};

using WeightParams = std::variant<Hahn, Racah, QHahn, QRacah, QRacahTrig, Elliptic>;

inline std::string family_name(const WeightParams& p) {
  static const char* names[] = {"hahn", "racah", "qhahn", "qracah", "trig", "elliptic"};
  return names[p.index()];
}

inline std::string describe(const WeightParams& p) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        os << family_name(p);
        if constexpr (std::is_same_v<V, Racah>) os << " K=" << v.K;
        if constexpr (std::is_same_v<V, QHahn>) os << " q=" << v.q;
        if constexpr (std::is_same_v<V, QRacah>) os << " q=" << v.q << " kappa_sq=" << v.kappa_sq;
        if constexpr (std::is_same_v<V, QRacahTrig>) os << " alpha=" << v.alpha << " beta=" << v.beta;
        if constexpr (std::is_same_v<V, Elliptic>) os << " p=" << v.p << " q=" << v.q << " u1=" << v.u1 << " u2=" << v.u2;
      },
      p);
  return os.str();
}

// Site on the hexagon lattice: time t, vertical position x. The doubled
// second coordinate 2j = 2x - t + 2 keeps half-integers exact.
struct HoleCoord {
  int t = 0;
  int x = 0;
  int i() const { return t; }
  int j2() const { return 2 * x - t + 2; }
  double j() const { return 0.5 * j2(); }
};

// Evaluates the three families of factors q^m, 1 - q^m and 1 - kappa^2 q^m
// in log form. Linear families (q = 1) substitute 1, m and 1 or 2K + m.
template <class Scalar>
struct FactorModel {
  enum class Kind { QGeneric, Hahn, Racah };
  Kind kind = Kind::QGeneric;
  double logq = 0.0;   // log|q|
  double angle = 0.0;  // arg q (nonzero only for the trigonometric family)
  bool k2_zero = true;
  double k2_log = 0.0;  // log|kappa^2|
  Scalar k2_unit = Scalar(1.0);
  double K = 0.0;

  static Scalar unit_angle(double theta) {
    if constexpr (is_complex_v<Scalar>) {
      return std::polar(1.0, theta);
    } else {
      (void)theta;
      return 1.0;
    }
  }
  bool linear() const { return kind != Kind::QGeneric; }

  LogValue<Scalar> qpow(double m) const {
    if (linear()) return {0.0, Scalar(1.0)};
    return {m * logq, unit_angle(m * angle)};
  }
  // 1 - u e^{L}, kept accurate when e^{L} is huge.
  static LogValue<Scalar> one_minus(double L, Scalar u) {
    if (L > 30.0) {
      LogValue<Scalar> big{L, -u};
      return big * LogValue<Scalar>::from(Scalar(1.0) - Scalar(1.0) / u * std::exp(-L));
    }
    return LogValue<Scalar>::from(Scalar(1.0) - u * std::exp(L));
  }
  LogValue<Scalar> qfac(double m) const {
    if (linear()) return LogValue<Scalar>::from(Scalar(m));
    if (m == 0.0) return LogValue<Scalar>::zero();
    return one_minus(m * logq, unit_angle(m * angle));
  }
  LogValue<Scalar> kfac(double m) const {
    switch (kind) {
      case Kind::Hahn:
        return {0.0, Scalar(1.0)};
      case Kind::Racah:
        return LogValue<Scalar>::from(Scalar(2.0 * K + m));
      default:
        if (k2_zero) return {0.0, Scalar(1.0)};
        return one_minus(k2_log + m * logq, k2_unit * unit_angle(m * angle));
    }
  }
  // (q;q)_n and (q^{-1};q^{-1})_n.
  LogValue<Scalar> qfact(int n) const {
    LogValue<Scalar> r;
    for (int i = 1; i <= n; ++i) r *= qfac(i);
    return r;
  }
  LogValue<Scalar> qinvfact(int n) const {
    LogValue<Scalar> r;
    for (int i = 1; i <= n; ++i) r *= qfac(-i);
    return r;
  }
  // (kappa^2 q^m; q)_n.
  LogValue<Scalar> kpoch(int m, int n) const {
    LogValue<Scalar> r;
    for (int i = 0; i < n; ++i) r *= kfac(m + i);
    return r;
  }
  // Difference mu_{t,S}(x) - mu_{t,S}(y), up to a global constant for the
  // linear families.
  LogValue<Scalar> mu_diff(int x, int y, int t, int S) const {
    return qpow(-x) * qfac(x - y) * kfac(x + y - S - t + 1);
  }
};

inline void require_q(double q, const char* fam) {
  if (!(q > 0.0) || q == 1.0 || !std::isfinite(q))
    throw inadmissible_parameters(std::string(fam) + ": require q > 0 and q != 1 (use the q = 1 family instead)");
}

inline FactorModel<double> make_real_model(const WeightParams& params) {
  FactorModel<double> fm;
  if (std::holds_alternative<Hahn>(params)) {
    fm.kind = FactorModel<double>::Kind::Hahn;
  } else if (auto r = std::get_if<Racah>(&params)) {
    fm.kind = FactorModel<double>::Kind::Racah;
    fm.K = r->K;
  } else if (auto h = std::get_if<QHahn>(&params)) {
    require_q(h->q, "qhahn");
    fm.logq = std::log(h->q);
  } else if (auto qr = std::get_if<QRacah>(&params)) {
    require_q(qr->q, "qracah");
    fm.logq = std::log(qr->q);
    if (qr->kappa_sq != 0.0) {
      fm.k2_zero = false;
      fm.k2_log = std::log(std::fabs(qr->kappa_sq));
      fm.k2_unit = qr->kappa_sq > 0 ? 1.0 : -1.0;
    }
  } else {
    throw domain_error("make_real_model: family " + family_name(params) + " has no real factor model");
  }
  return fm;
}

inline FactorModel<cplx> make_complex_model(const WeightParams& params) {
  FactorModel<cplx> fm;
  if (auto tr = std::get_if<QRacahTrig>(&params)) {
    fm.angle = tr->alpha;
    fm.k2_zero = false;
    fm.k2_log = 0.0;
    fm.k2_unit = std::polar(1.0, 2.0 * tr->beta);
    return fm;
  }
  auto r = make_real_model(params);
  fm.kind = static_cast<FactorModel<cplx>::Kind>(static_cast<int>(r.kind));
  fm.logq = r.logq;
  fm.k2_zero = r.k2_zero;
  fm.k2_log = r.k2_log;
  fm.k2_unit = r.k2_unit;
  fm.K = r.K;
  return fm;
}

// Calls f with FactorModel<double> for real families and FactorModel<cplx>
// for the trigonometric family.
template <class F>
decltype(auto) with_factor_model(const WeightParams& params, F&& f) {
  if (std::holds_alternative<QRacahTrig>(params)) return f(make_complex_model(params));
  return f(make_real_model(params));
}

// ---------------------------------------------------------------------------
// Elliptic lozenge weight with gauge C(i) = 1, at lattice point (i, j),
// j given doubled.
inline cplx qe(double q, double e) { return cplx(std::pow(q, e), 0.0); }

inline cplx elliptic_lozenge_weight_j2(const Elliptic& e, int i, int j2) {
  const EllipticNome nome(e.p);
  const double j = 0.5 * j2;
  const double q = e.q;
  const cplx uu = e.u1 * e.u2;
  auto th = [&](cplx x) {
    if (std::abs(x) == 0.0) throw degenerate_parameters("elliptic weight: zero theta argument");
    return theta_p(x, nome);
  };
  cplx num = std::sqrt(uu) * std::pow(q, j - 0.5) * th(std::pow(q, 2 * j - 1) * uu);
  cplx den = th(std::pow(q, j - 1.5 * i - 1) * e.u1) * th(std::pow(q, j - 1.5 * i) * e.u1) *
             th(std::pow(q, j + 1.5 * i - 1) * e.u2) * th(std::pow(q, j + 1.5 * i) * e.u2);
  if (std::abs(den) == 0.0) throw degenerate_parameters("elliptic weight: theta pole");
  return num / den;
}

// Hexagon site (t,x) maps to elliptic lattice point i = t - S, j = x - t/2 + 1 - S/2.
inline cplx elliptic_hole_weight(const Elliptic& e, const HexagonDims& dims, const HoleCoord& c) {
  const int S = dims.S();
  return elliptic_lozenge_weight_j2(e, c.t - S, c.j2() - S);
}

enum class PositivityCase { Imaginary, Real, Trigonometric, DegenerateFamily, Elliptic };

inline const char* to_string(PositivityCase c) {
  switch (c) {
    case PositivityCase::Imaginary: return "imaginary";
    case PositivityCase::Real: return "real";
    case PositivityCase::Trigonometric: return "trigonometric";
    case PositivityCase::DegenerateFamily: return "degenerate-family";
    case PositivityCase::Elliptic: return "elliptic";
  }
  return "?";
}

namespace detail {

// Raw (sign-carrying) hole weight for non-elliptic families; hexagon-wide
// constants removed. m = 2x - t - S + 1.
inline LogSignedValue raw_hole_weight(const WeightParams& params, const HexagonDims& dims, const HoleCoord& c) {
  const int m = 2 * c.x - c.t - dims.S() + 1;
  if (std::holds_alternative<Hahn>(params)) return {0.0, 1};
  if (auto r = std::get_if<Racah>(&params)) return LogSignedValue::from(r->K + 0.5 * m);
  if (auto h = std::get_if<QHahn>(&params)) return {-c.j() * std::log(h->q), 1};
  if (auto qr = std::get_if<QRacah>(&params)) {
    const double lq = std::log(qr->q);
    LogSignedValue v{-c.j() * lq, 1};
    auto k = FactorModel<double>::one_minus(
        qr->kappa_sq == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(qr->kappa_sq)) + m * lq,
        qr->kappa_sq >= 0 ? 1.0 : -1.0);
    return v * to_signed(k);
  }
  if (auto tr = std::get_if<QRacahTrig>(&params)) return LogSignedValue::from(std::sin(tr->alpha * m / 2.0 + tr->beta));
  throw domain_error("raw_hole_weight: elliptic weights are complex");
}

template <class F>
void for_each_site(const HexagonDims& dims, F&& f) {
  for (int t = 0; t <= dims.T(); ++t)
    for (int x = dims.lo(t); x <= dims.hi(t); ++x) f(HoleCoord{t, x});
}

}  // namespace detail

// Validates parameters against the admissibility constraints and returns
// the case label. Throws inadmissible_parameters naming the violated rule.
inline PositivityCase positivity_case(const WeightParams& params, const HexagonDims& dims) {
  const int N = dims.N(), T = dims.T();
  PositivityCase label = PositivityCase::DegenerateFamily;
  if (auto e = std::get_if<Elliptic>(&params)) {
    if (!(e->p >= 0.0 && e->p < 1.0)) throw inadmissible_parameters("elliptic: require 0 <= p < 1");
    if (!(e->q > 0.0) || e->q == 1.0) throw inadmissible_parameters("elliptic: require q > 0, q != 1");
    if (std::abs(e->u1) == 0.0 || std::abs(e->u2) == 0.0) throw inadmissible_parameters("elliptic: u1, u2 must be nonzero");
    detail::for_each_site(dims, [&](HoleCoord c) {
      if (std::abs(elliptic_hole_weight(*e, dims, c)) == 0.0)
        throw inadmissible_parameters("elliptic: hole weight vanishes at a hexagon site");
    });
    return PositivityCase::Elliptic;
  }
  if (auto r = std::get_if<Racah>(&params)) {
    if (r->K >= -N + 0.5 && r->K <= (T - 1) / 2.0)
      throw inadmissible_parameters("racah: K must not lie in [-N+1/2, (T-1)/2]");
  } else if (auto h = std::get_if<QHahn>(&params)) {
    require_q(h->q, "qhahn");
  } else if (auto qr = std::get_if<QRacah>(&params)) {
    require_q(qr->q, "qracah");
    if (qr->kappa_sq < 0.0) {
      label = PositivityCase::Imaginary;
    } else if (qr->kappa_sq > 0.0) {
      label = PositivityCase::Real;
      const double kappa = std::sqrt(qr->kappa_sq);
      const double e1 = std::pow(qr->q, -N + 0.5), e2 = std::pow(qr->q, (T - 1) / 2.0);
      const double lo = std::min(e1, e2), hi = std::max(e1, e2);
      const double tol = 1e-12 * hi;
      if (kappa >= lo - tol && kappa <= hi + tol)
        throw inadmissible_parameters("qracah real case: kappa must not lie between q^{-N+1/2} and q^{(T-1)/2}");
    }
  } else if (auto tr = std::get_if<QRacahTrig>(&params)) {
    label = PositivityCase::Trigonometric;
    const double e1 = -tr->alpha * (T - 1) / 2.0 + tr->beta;
    const double e2 = tr->alpha * (N - 0.5) + tr->beta;
    const double lo = std::min(e1, e2), hi = std::max(e1, e2);
    const double k = std::floor(lo / std::numbers::pi + 1e-12);
    if (hi > std::numbers::pi * (k + 1) + 1e-12)
      throw inadmissible_parameters(
          "trig: -alpha(T-1)/2+beta and alpha(N-1/2)+beta must lie in one interval [pi k, pi (k+1)]");
  }
  int sign = 0;
  detail::for_each_site(dims, [&](HoleCoord c) {
    auto v = detail::raw_hole_weight(params, dims, c);
    if (v.is_zero()) throw degenerate_parameters("hole weight vanishes at site (" + std::to_string(c.t) + "," + std::to_string(c.x) + ")");
    if (sign == 0) sign = v.sign;
    if (v.sign != sign) throw inadmissible_parameters("hole weights change sign across the hexagon");
  });
  return label;
}

// Positive hole weight (hexagon-wide constant stripped).
inline LogSignedValue hole_weight(const WeightParams& params, const HexagonDims& dims, const HoleCoord& c) {
  if (auto e = std::get_if<Elliptic>(&params)) {
    cplx v = elliptic_hole_weight(*e, dims, c);
    if (std::abs(v) == 0.0) throw degenerate_parameters("hole weight vanishes");
    if (std::fabs(v.imag()) > 1e-12 * std::abs(v))
      throw domain_error("hole_weight: elliptic weight is complex here, use hole_weight_complex");
    return LogSignedValue::from(v.real());
  }
  auto v = detail::raw_hole_weight(params, dims, c);
  if (v.is_zero()) throw degenerate_parameters("hole weight vanishes");
  v.sign = 1;
  return v;
}

inline LogValue<cplx> hole_weight_complex(const WeightParams& params, const HexagonDims& dims, const HoleCoord& c) {
  if (auto e = std::get_if<Elliptic>(&params)) return LogValue<cplx>::from(elliptic_hole_weight(*e, dims, c));
  auto v = hole_weight(params, dims, c);
  return {v.log_abs, cplx(1.0)};
}


// N-point configuration on the vertical line t.
struct PathConfig {
  int t = 0;
  std::vector<int> xs;
  bool operator==(const PathConfig&) const = default;
};

// Nonintersecting path family: slices[t] for t = 0..T.
struct Tiling {
  std::vector<std::vector<int>> slices;
  bool operator==(const Tiling&) const = default;
  bool operator<(const Tiling& o) const { return slices < o.slices; }
  PathConfig config(int t) const { return {t, slices.at(t)}; }
};

struct TilingHash {
  std::size_t operator()(const Tiling& til) const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (const auto& s : til.slices)
      for (int x : s) h = CounterRng::mix(h ^ static_cast<std::uint64_t>(x + 0x9e37));
    return static_cast<std::size_t>(h);
  }
};

// Throws structural_error unless til is an element of Omega(N,T,S).
inline void validate_tiling(const Tiling& til, const HexagonDims& dims) {
  const int N = dims.N(), T = dims.T(), S = dims.S();
  if (static_cast<int>(til.slices.size()) != T + 1) throw structural_error("tiling: wrong number of slices");
  for (int t = 0; t <= T; ++t) {
    const auto& X = til.slices[t];
    if (static_cast<int>(X.size()) != N) throw structural_error("tiling: slice size differs from N");
    for (int i = 0; i < N; ++i) {
      if (X[i] < dims.lo(t) || X[i] > dims.hi(t)) throw structural_error("tiling: point outside section");
      if (i > 0 && X[i] <= X[i - 1]) throw structural_error("tiling: slice not strictly increasing");
      if (t == 0 && X[i] != i) throw structural_error("tiling: bottom boundary violated");
      if (t == T && X[i] != S + i) throw structural_error("tiling: top boundary violated");
      if (t > 0) {
        int d = X[i] - til.slices[t - 1][i];
        if (d != 0 && d != 1) throw structural_error("tiling: interlacing violated");
      }
    }
  }
}

template <class F>
void for_each_hole(const Tiling& til, const HexagonDims& dims, F&& f) {
  for (int t = 0; t <= dims.T(); ++t) {
    const auto& X = til.slices[t];
    std::size_t k = 0;
    for (int x = dims.lo(t); x <= dims.hi(t); ++x) {
      if (k < X.size() && X[k] == x) {
        ++k;
        continue;
      }
      f(HoleCoord{t, x});
    }
  }
}

// Product of hole weights over all horizontal lozenges.
inline LogSignedValue tiling_weight(const Tiling& til, const WeightParams& params, const HexagonDims& dims) {
  LogSignedValue w;
  for_each_hole(til, dims, [&](HoleCoord c) { w *= hole_weight(params, dims, c); });
  return w;
}

inline LogValue<cplx> tiling_weight_complex(const Tiling& til, const WeightParams& params, const HexagonDims& dims) {
  LogValue<cplx> w;
  for_each_hole(til, dims, [&](HoleCoord c) { w *= hole_weight_complex(params, dims, c); });
  return w;
}

// log w(til) computed twice: directly from holes, and through the height
// representation sum_v h(v) log(w(j)/w(j-1)) with h(t,x) the number of
// particles below x on line t. Returns the difference of the two after
// subtracting the same difference for the reference tiling.
inline double height_ratio_identity(const Tiling& til, const Tiling& ref, const WeightParams& params,
                                    const HexagonDims& dims) {
  if (!std::holds_alternative<QRacah>(params) && !std::holds_alternative<QHahn>(params))
    throw domain_error("height_ratio_identity: q-Racah or q-Hahn parameters required");
  auto via_heights = [&](const Tiling& tl) {
    double s = 0.0;
    for (int t = 0; t <= dims.T(); ++t) {
      const auto& X = tl.slices[t];
      int h = 0;
      std::size_t k = 0;
      for (int x = dims.lo(t); x <= dims.hi(t); ++x) {
        while (k < X.size() && X[k] < x) {
          ++h;
          ++k;
        }
        if (x > dims.lo(t))
          s += h * (hole_weight(params, dims, {t, x}).log_abs - hole_weight(params, dims, {t, x - 1}).log_abs);
      }
    }
    return s;
  };
  auto direct = [&](const Tiling& tl) { return tiling_weight(tl, params, dims).log_abs; };
  return (direct(til) - via_heights(til)) - (direct(ref) - via_heights(ref));
}

}  // namespace boxed_pp
