#pragma once

#include <Eigen/Dense>
#include <array>
#include <ostream>
#include <utility>
#include <vector>

#include "chains.hpp"

namespace boxed_pp {

// ---------------------------------------------------------------------------
// Terminating basic hypergeometric series and q-Racah polynomials

// 4phi3(a; b | q; q) summed over k = 0..terms, term by term through ratios.
// abs_sum, when given, receives the sum of |terms| (the cancellation scale).
inline double phi43(const std::array<double, 4>& a, const std::array<double, 3>& b, double q, int terms,
                    double* abs_sum = nullptr) {
  double sum = 1.0, term = 1.0, qk = 1.0, asum = 1.0;
  for (int k = 0; k < terms; ++k) {
    // factors within rounding of zero count as exact zeros
    auto fac = [qk](double v) {
      const double f = 1.0 - v * qk;
      return std::fabs(f) < 1e-12 * std::max(1.0, std::fabs(v * qk)) ? 0.0 : f;
    };
    double num = 1.0, den = fac(q);
    for (double ai : a) num *= fac(ai);
    for (double bi : b) den *= fac(bi);
    if (num == 0.0) break;
    if (den == 0.0) throw degenerate_parameters("phi43: vanishing lower Pochhammer before termination");
    term *= num / den * q;
    sum += term;
    asum += std::fabs(term);
    qk *= q;
  }
  if (abs_sum) *abs_sum = asum;
  return sum;
}

struct QRacahParams {
  double alpha = 0, beta = 0, gamma = 0, delta = 0;
  int M = 0;        // support {0..M}
  int x_shift = 0;  // polynomial variable = hexagon x - x_shift
  bool reflected = false;
};

// R_n(mu(x); alpha, beta, gamma, delta | q) with x the polynomial variable.
inline double qracah_poly(int n, int x, const QRacahParams& p, double q, double* abs_sum = nullptr) {
  if (n < 0 || x < 0) throw domain_error("qracah_poly: negative index");
  const double a = p.alpha, b = p.beta, g = p.gamma, d = p.delta;
  // the sum is cut at min(n, x) by q^{-n} and q^{-x}
  return phi43({std::pow(q, -n), a * b * std::pow(q, n + 1), std::pow(q, -x), g * d * std::pow(q, x + 1)},
               {a * q, b * d * q, g * q}, q, std::min(n, x), abs_sum);
}

// Regime 1..4 of the slice t (which polynomial parametrization applies).
inline int qracah_regime(int t, const HexagonDims& dims) {
  const int T = dims.T(), S = dims.S();
  if (t < S && t < T - S) return 1;
  if (t >= S && t <= T - S) return 2;
  if (t >= T - S && t < S) return 3;
  return 4;
}

inline QRacahParams qracah_case_params(int t, const HexagonDims& dims, double q, double kappa_sq) {
  const int N = dims.N(), T = dims.T(), S = dims.S();
  auto Q = [q](double e) { return std::pow(q, e); };
  QRacahParams p;
  p.M = dims.hi(t) - dims.lo(t);
  switch (qracah_regime(t, dims)) {
    case 1:
      p = {Q(-S - N), Q(S - T - N), Q(-t - N), kappa_sq * Q(-S + N), p.M, 0, false};
      break;
    case 2:
      p = {Q(-t - N), Q(t - T - N), Q(-S - N), kappa_sq * Q(-t + N), p.M, 0, false};
      break;
    case 3:
      p = {Q(-T + t - N), Q(-t - N), Q(-T - N + S), kappa_sq * Q(-T + t + N), p.M, t + S - T, true};
      break;
    default:
      p = {Q(-T - N + S), Q(-S - N), Q(-T + t - N), kappa_sq * Q(-T + N + S), p.M, t + S - T, true};
      break;
  }
  return p;
}

// Squared norms sum_x w_{t,S}(x) R_n(x)^2 with the signed slice weight, n = 0..M.
inline std::vector<double> qracah_norms(int t, const HexagonDims& dims, const QRacah& params) {
  auto fm = make_real_model(params);
  auto p = qracah_case_params(t, dims, params.q, params.kappa_sq);
  std::vector<double> out(p.M + 1, 0.0);
  for (int x = dims.lo(t); x <= dims.hi(t); ++x) {
    const double w = slice_weight_w(fm, dims, t, x).value();
    for (int n = 0; n <= p.M; ++n) {
      const double r = qracah_poly(n, x - p.x_shift, p, params.q);
      out[n] += w * r * r;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hypergeometric contiguous relations

namespace detail {
// Series value with its cancellation scale.
struct Series {
  double v = 0, scale = 0;
};

// |sum c_i s_i - c_r s_r| relative to sum |c_i| scale_i + |c_r| scale_r.
inline double relation_residual(std::initializer_list<std::pair<double, Series>> lhs, std::pair<double, Series> rhs) {
  double l = 0, sc = std::fabs(rhs.first) * rhs.second.scale;
  for (auto& [c, s] : lhs) {
    l += c * s.v;
    sc += std::fabs(c) * s.scale;
  }
  return std::fabs(l - rhs.first * rhs.second.v) / std::max(sc, 1e-300);
}

inline Series phi(const std::array<double, 4>& a, const std::array<double, 3>& b, double q, int terms) {
  Series s;
  s.v = phi43(a, b, q, terms, &s.scale);
  return s;
}
}  // namespace detail

// Residual of the three-term relation in (c, d, w) for a terminating series
// with upper parameter a = q^{-n}.
inline double phi_relation_first(int n, double b, double c, double d, double u, double v, double w, double q) {
  using detail::phi;
  const double a = std::pow(q, -n);
  return detail::relation_residual({{(c - w) * (1 - d), phi({a, b, c, q * d}, {u, v, q * w}, q, n)},
                                    {(w - d) * (1 - c), phi({a, b, q * c, d}, {u, v, q * w}, q, n)}},
                                   {(c - d) * (1 - w), phi({a, b, c, d}, {u, v, w}, q, n)});
}

// Residual of the relation for a balanced terminating series; w is fixed by
// the balance condition q a b c d = u v w.
inline double phi_relation_second(int n, double b, double c, double d, double u, double v, double q) {
  using detail::phi;
  const double a = std::pow(q, -n);
  const double w = q * a * b * c * d / (u * v);
  return detail::relation_residual({{(c - u) * (1 - v / c) * (w / q - 1), phi({a, b, c / q, d}, {u, v, w / q}, q, n)},
                                    {(u - d) * (1 - v / d) * (w / q - 1), phi({a, b, c, d / q}, {u, v, w / q}, q, n)}},
                                   {(c - d) * (w / q - b) * (1 - a * q / w), phi({a, b, c, d}, {u, v, w}, q, n)});
}

// Residuals of the four polynomial forms of the relations at (n, x).
inline std::array<double, 4> qracah_relation_residuals(int n, int x, const QRacahParams& p, double q) {
  const double a = p.alpha, b = p.beta, g = p.gamma, d = p.delta;
  auto R = [&](int xx, double aa, double bb, double gg, double dd) {
    detail::Series s;
    if (xx < 0) return s;
    QRacahParams r{aa, bb, gg, dd, 0, 0, false};
    s.v = qracah_poly(n, xx, r, q, &s.scale);
    return s;
  };
  const double qx = std::pow(q, -x), gdx = g * d * std::pow(q, x + 1), bdx = b * d * std::pow(q, x + 1);
  const double qn = std::pow(q, n + 1), qmn = std::pow(q, -n);
  using detail::relation_residual;
  return {
      relation_residual({{(qx - q * g) * (1 - gdx), R(x, a, b, q * g, d)},
                         {(q * g - gdx) * (1 - qx), R(x - 1, a, b, q * g, d)}},
                        {(qx - gdx) * (1 - q * g), R(x, a, b, g, d)}),
      relation_residual({{(qx - q * a) * (1 - gdx), R(x, q * a, b / q, g, q * d)},
                         {(q * a - gdx) * (1 - qx), R(x - 1, q * a, b / q, g, q * d)}},
                        {(qx - gdx) * (1 - q * a), R(x, a, b, g, d)}),
      relation_residual({{(qx - q * g) * (1 - bdx) * (a - 1), R(x + 1, a / q, q * b, g, d / q)},
                         {(q * g - gdx) * (1 - qx * b / g) * (a - 1), R(x, a / q, q * b, g, d / q)}},
                        {(qx - gdx) * (a - a * b * qn) * (1 - qmn / a), R(x, a, b, g, d)}),
      relation_residual({{(qx - q * a) * (1 - bdx) * (g - 1), R(x + 1, a, b, g / q, d)},
                         {(q * a - gdx) * (1 - qx * b / g) * (g - 1), R(x, a, b, g / q, d)}},
                        {(qx - gdx) * (g - a * b * qn) * (1 - qmn / g), R(x, a, b, g, d)}),
  };
}

// Largest residual of all relations over n, x in {0..max_index}; points
// where a shifted parameter set has a vanishing lower Pochhammer are skipped.
inline double hypergeometric_relation_check(const QRacahParams& p, double q, int max_index = 4) {
  double err = 0.0;
  for (int n = 0; n <= max_index; ++n)
    for (int x = 0; x <= max_index; ++x) {
      try {
        for (double r : qracah_relation_residuals(n, x, p, q)) err = std::max(err, r);
      } catch (const degenerate_parameters&) {
      }
      const double b = p.alpha * p.beta * std::pow(q, n + 1), c = std::pow(q, -x), d = p.gamma * p.delta * std::pow(q, x + 1);
      const double u = p.alpha * q, v = p.beta * p.delta * q, w = p.gamma * q;
      try {
        err = std::max(err, phi_relation_first(n, b, c, d, u, v, w, q));
        if (d != 0.0) err = std::max(err, phi_relation_second(n, b, c, d, u, v, q));
      } catch (const degenerate_parameters&) {
      }
    }
  return err;
}

// ---------------------------------------------------------------------------
// Orthonormal basis on one slice

struct OrthoBasis {
  int t = 0;
  std::vector<int> xs;
  Eigen::MatrixXd f;                  // f(i, n) = f_n^t(xs[i])
  std::vector<LogValue<cplx>> w;      // slice weight w_{t,S}(x)
  cplx phase = 1.0;                   // common phase of w on the slice
  std::vector<double> wr;             // w / phase, normalized to max 1
  std::vector<double> c;              // c_n^t (to slice t+1), n < min(dim_t, dim_{t+1})

  int dim() const { return static_cast<int>(xs.size()); }
  int index(int x) const {
    const int i = x - (xs.empty() ? 0 : xs.front());
    if (i < 0 || i >= dim()) throw domain_error("OrthoBasis: point outside the section");
    return i;
  }
  // |w(x)| relative to the phase, in the log domain
  double log_wr(int x) const { return w[index(x)].log_abs; }
};

namespace detail {
inline double real_part_checked(cplx v, double scale, const char* what) {
  if (std::fabs(v.imag()) > 1e-8 * std::max(scale, std::fabs(v.real())))
    throw inadmissible_parameters(std::string(what) + ": value is not real after phase removal");
  return v.real();
}
}  // namespace detail

// f_n^t: orthonormalized mu-powers times sqrt(w) (Lanczos with full
// reorthogonalization, positive leading coefficient).
inline OrthoBasis build_basis(int t, const HexagonDims& dims, const WeightParams& params) {
  auto fm = make_complex_model(params);
  OrthoBasis B;
  B.t = t;
  const int lo = dims.lo(t), hi = dims.hi(t), M = hi - lo + 1;
  for (int x = lo; x <= hi; ++x) {
    B.xs.push_back(x);
    B.w.push_back(slice_weight_w(fm, dims, t, x));
  }
  B.phase = B.w[0].unit;
  double lmax = -std::numeric_limits<double>::infinity();
  for (auto& v : B.w) lmax = std::max(lmax, v.log_abs);
  Eigen::VectorXd sw(M), m(M);
  cplx mph = 1.0;
  for (int i = 0; i < M; ++i) {
    const cplx u = B.w[i].unit / B.phase;
    if (std::abs(u.imag()) > 1e-8 || u.real() <= 0) throw inadmissible_parameters("build_basis: slice weight changes sign");
    B.wr.push_back(std::exp(B.w[i].log_abs - lmax));
    sw(i) = std::sqrt(B.wr.back());
    cplx mu = fm.mu_diff(B.xs[i], lo, t, dims.S()).value();
    if (i == 1) mph = mu / std::abs(mu);
    m(i) = 0.0;
    if (i > 0) m(i) = detail::real_part_checked(mu / mph, std::abs(mu), "build_basis: mu");
  }
  // rescale mu to unit range for conditioning
  const double ms = m.cwiseAbs().maxCoeff();
  if (ms > 0) m /= ms;
  B.f.resize(M, M);
  Eigen::VectorXd v = sw / sw.norm();
  for (int n = 0; n < M; ++n) {
    B.f.col(n) = v;
    if (n + 1 == M) break;
    Eigen::VectorXd u = m.cwiseProduct(v);
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k <= n; ++k) u -= B.f.col(k).dot(u) * B.f.col(k);
    const double nu = u.norm();
    if (!(nu > 1e-300)) throw degenerate_parameters("build_basis: repeated mu values");
    v = u / nu;
  }
  return B;
}

// ---------------------------------------------------------------------------
// Correlation kernel

class CorrelationKernel {
 public:
  CorrelationKernel(const HexagonDims& dims, const WeightParams& params) : dims_(dims), params_(params) {
    positivity_case(params, dims);
    auto fm = make_complex_model(params);
    const int T = dims.T();
    for (int t = 0; t <= T; ++t) bases_.push_back(build_basis(t, dims, params));
    lambda_.assign(T, 1.0);
    transfer_.resize(T);
    for (int t = 0; t < T; ++t) {
      auto& B0 = bases_[t];
      auto& B1 = bases_[t + 1];
      Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(B0.dim(), B1.dim());
      for (int i = 0; i < B0.dim(); ++i) {
        const int x = B0.xs[i];
        auto [w0, w1] = move_factors(fm, dims, t, x, Move::TPlus);
        for (int y : {x, x + 1}) {
          if (y < B1.xs.front() || y > B1.xs.back()) continue;
          const int j = B1.index(y);
          LogValue<cplx> s{0.5 * (B0.w[i].log_abs - B1.w[j].log_abs), 1.0};
          V(i, j) = (s * (y == x ? w0 : w1)).value();
        }
      }
      Eigen::Index bi = 0, bj = 0;
      V.cwiseAbs().maxCoeff(&bi, &bj);
      const cplx psi = V(bi, bj) / std::abs(V(bi, bj));
      V /= psi;
      Eigen::MatrixXd Vr(V.rows(), V.cols());
      const double vs = V.cwiseAbs().maxCoeff();
      for (Eigen::Index i = 0; i < V.rows(); ++i)
        for (Eigen::Index j = 0; j < V.cols(); ++j) Vr(i, j) = detail::real_part_checked(V(i, j), vs, "transfer matrix");
      transfer_[t] = Vr;
      Eigen::MatrixXd G = B0.f.transpose() * Vr;
      const int nm = std::min(B0.dim(), B1.dim());
      B0.c.resize(nm);
      for (int n = 0; n < nm; ++n) B0.c[n] = G.row(n).dot(B1.f.col(n));
      lambda_[t] = std::sqrt(B0.phase) / std::sqrt(B1.phase) * psi;
    }
  }

  const HexagonDims& dims() const { return dims_; }
  const WeightParams& params() const { return params_; }
  const OrthoBasis& basis(int t) const { return bases_.at(t); }
  cplx lambda(int t) const { return lambda_.at(t); }
  const Eigen::MatrixXd& transfer(int t) const { return transfer_.at(t); }

  cplx operator()(int k, int x, int l, int y) const {
    const auto& Bk = bases_.at(k);
    const auto& Bl = bases_.at(l);
    const int i = Bk.index(x), j = Bl.index(y);
    const int N = dims_.N();
    cplx s = 0.0;
    if (k >= l) {
      cplx lam = 1.0;
      for (int s_ = l; s_ < k; ++s_) lam *= lambda_[s_];
      for (int n = 0; n < N; ++n) {
        double cc = 1.0;
        for (int s_ = l; s_ < k; ++s_) cc *= bases_[s_].c[n];
        if (cc == 0.0) throw degenerate_parameters("kernel: vanishing c_n");
        s += Bk.f(i, n) * Bl.f(j, n) / cc;
      }
      return s / lam;
    }
    cplx lam = 1.0;
    for (int s_ = k; s_ < l; ++s_) lam *= lambda_[s_];
    const int nmax = std::min(Bk.dim(), Bl.dim());
    for (int n = N; n < nmax; ++n) {
      double cc = 1.0;
      for (int s_ = k; s_ < l && cc != 0.0; ++s_) cc *= n < static_cast<int>(bases_[s_].c.size()) ? bases_[s_].c[n] : 0.0;
      s -= cc * Bk.f(i, n) * Bl.f(j, n);
    }
    return s * lam;
  }

  Eigen::MatrixXcd matrix(const std::vector<std::pair<int, int>>& pts) const {
    const auto m = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXcd K(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) K(a, b) = (*this)(pts[a].first, pts[a].second, pts[b].first, pts[b].second);
    return K;
  }

  // det[K(p_i; p_j)]: probability that every point carries a particle.
  double correlation(const std::vector<std::pair<int, int>>& pts) const {
    if (pts.empty()) return 1.0;
    return matrix(pts).determinant().real();
  }

  double rho1(int t, int x) const { return (*this)(t, x, t, x).real(); }

  // max over (n, y) of |c_n f_n^{t+1}(y) - sum_x f_n^t(x) V_t(x, y)|
  double three_point_residual(int t) const {
    const auto& B0 = bases_.at(t);
    const auto& B1 = bases_.at(t + 1);
    Eigen::MatrixXd G = B0.f.transpose() * transfer_[t];
    double err = 0.0;
    for (int n = 0; n < B0.dim(); ++n)
      for (int j = 0; j < B1.dim(); ++j) {
        const double pred = n < B1.dim() ? B0.c[n] * B1.f(j, n) : 0.0;
        err = std::max(err, std::fabs(G(n, j) - pred));
      }
    return err;
  }

 private:
  HexagonDims dims_;
  WeightParams params_;
  std::vector<OrthoBasis> bases_;
  std::vector<cplx> lambda_;
  std::vector<Eigen::MatrixXd> transfer_;
};

// Closed-form magnitude sqrt|(1-q^{n-N-t})(1-q^{T+N-t-n-1})| of c_n^t.
inline double closed_form_c_abs(int n, int t, const HexagonDims& dims, double q) {
  const int N = dims.N(), T = dims.T();
  return std::sqrt(std::fabs((1 - std::pow(q, -N - t + n)) * (1 - std::pow(q, T + N - t - n - 1))));
}

// Residual of the q-Racah difference equation for f_n^t (real q-families),
// relative to the largest term.
inline double difference_operator_residual(const CorrelationKernel& K, int t, int n) {
  const auto& par = K.params();
  double q = 0, k2 = 0;
  if (auto p = std::get_if<QRacah>(&par)) {
    q = p->q;
    k2 = p->kappa_sq;
  } else if (auto h = std::get_if<QHahn>(&par)) {
    q = h->q;
  } else {
    throw domain_error("difference_operator_residual: q-Racah or q-Hahn family required");
  }
  const auto& B = K.basis(t);
  const auto p = qracah_case_params(t, K.dims(), q, k2);
  const double a = p.alpha, b = p.beta, g = p.gamma, d = p.delta;
  auto Bf = [&](double x) {
    return (1 - a * std::pow(q, x + 1)) * (1 - b * d * std::pow(q, x + 1)) * (1 - g * std::pow(q, x + 1)) *
           (1 - g * d * std::pow(q, x + 1)) / ((1 - g * d * std::pow(q, 2 * x + 1)) * (1 - g * d * std::pow(q, 2 * x + 2)));
  };
  auto Df = [&](double x) {
    return q * (1 - std::pow(q, x)) * (a - g * d * std::pow(q, x)) * (b - g * std::pow(q, x)) * (1 - d * std::pow(q, x)) /
           ((1 - g * d * std::pow(q, 2 * x)) * (1 - g * d * std::pow(q, 2 * x + 1)));
  };
  const double eig = std::pow(q, -n) * (1 - std::pow(q, n)) * (1 - a * b * std::pow(q, n + 1));
  double err = 0.0;
  for (int i = 0; i < B.dim(); ++i) {
    const double xq = B.xs[i] - p.x_shift;
    const double f0 = B.f(i, n);
    double up = 0.0, dn = 0.0;
    const double bx = Bf(xq), dx = Df(xq);
    if (i + 1 < B.dim()) up = bx * B.f(i + 1, n) * std::sqrt(B.wr[i] / B.wr[i + 1]);
    if (i > 0) dn = dx * B.f(i - 1, n) * std::sqrt(B.wr[i] / B.wr[i - 1]);
    const double lhs = eig * f0, rhs = up - (bx + dx) * f0 + dn;
    const double scale = std::fabs(up) + std::fabs((bx + dx) * f0) + std::fabs(dn) + std::fabs(lhs);
    err = std::max(err, std::fabs(lhs - rhs) / std::max(scale, 1e-300));
  }
  return err;
}

// CSV rows "t,x,rho1" over every site of the hexagon.
inline void write_rho1_csv(std::ostream& os, const CorrelationKernel& K) {
  os << "t,x,rho1\n";
  os.precision(17);
  for (int t = 0; t <= K.dims().T(); ++t)
    for (int x = K.dims().lo(t); x <= K.dims().hi(t); ++x) os << t << ',' << x << ',' << K.rho1(t, x) << '\n';
}

// ---------------------------------------------------------------------------
// Inverse Kasteleyn matrix

// White triangles (t, x) for t < T, black triangles (t, x) for t >= 1, both
// over the section points. White (t,x) is adjacent to black (t,x) (the
// horizontal lozenge, weight = hole weight) and to blacks (t+1,x), (t+1,x+1).
class InverseKasteleyn {
 public:
  using Site = std::pair<int, int>;

  explicit InverseKasteleyn(const CorrelationKernel& K) : K_(K), fm_(make_complex_model(K.params())) {}

  const CorrelationKernel& kernel() const { return K_; }

  cplx kast(const Site& white, const Site& black) const {
    auto [t, x] = white;
    auto [r, y] = black;
    if (r == t && y == x) return hole_factor(r, y).value();
    if (r == t + 1 && (y == x || y == x + 1)) return 1.0;
    return 0.0;
  }

  cplx operator()(const Site& black, const Site& white) const {
    auto [r, y] = black;
    auto [t, x] = white;
    const cplx delta = (r == t && y == x) ? 1.0 : 0.0;
    const cplx k = delta - K_(r, y, t, x);
    auto ratio = conj_factor(r, y) / conj_factor(t, x) / hole_factor(r, y);
    return ratio.value() * k;
  }

  // Probability that every (white, black) pair is a lozenge of the tiling.
  double lozenge_probability(const std::vector<std::pair<Site, Site>>& lozenges) const {
    const auto m = static_cast<Eigen::Index>(lozenges.size());
    if (m == 0) return 1.0;
    cplx prod = 1.0;
    Eigen::MatrixXcd A(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      prod *= kast(lozenges[i].first, lozenges[i].second);
      for (Eigen::Index j = 0; j < m; ++j) A(i, j) = (*this)(lozenges[i].second, lozenges[j].first);
    }
    return (prod * A.determinant()).real();
  }

  std::vector<Site> whites() const {
    std::vector<Site> s;
    for (int t = 0; t < K_.dims().T(); ++t)
      for (int x = K_.dims().lo(t); x <= K_.dims().hi(t); ++x) s.push_back({t, x});
    return s;
  }
  std::vector<Site> blacks() const {
    std::vector<Site> s;
    for (int t = 1; t <= K_.dims().T(); ++t)
      for (int x = K_.dims().lo(t); x <= K_.dims().hi(t); ++x) s.push_back({t, x});
    return s;
  }

  // max |(Kast * Kinv) - I| over all whites.
  double identity_residual() const {
    const auto W = whites();
    const auto& dims = K_.dims();
    double err = 0.0;
    for (const auto& w : W)
      for (const auto& w2 : W) {
        cplx s = 0.0;
        auto [t, x] = w;
        for (const Site& b : {Site{t, x}, Site{t + 1, x}, Site{t + 1, x + 1}}) {
          if (b.first < 1 || b.first > dims.T() || !dims.contains(b.first, b.second)) continue;
          s += kast(w, b) * (*this)(b, w2);
        }
        err = std::max(err, std::abs(s - (w == w2 ? 1.0 : 0.0)));
      }
    return err;
  }

 private:
  LogValue<cplx> hole_factor(int t, int x) const {
    const int m = 2 * x - t - K_.dims().S() + 1;
    return fm_.qpow(-m / 2.0) * fm_.kfac(m);
  }

  LogValue<cplx> conj_factor(int t, int x) const {
    const auto& d = K_.dims();
    const int N = d.N(), T = d.T(), S = d.S();
    const auto& B = K_.basis(t);
    const auto& w = B.w[B.index(x)];
    // 1 / (sqrt(phase) sqrt(w / phase))
    LogValue<cplx> g{-0.5 * w.log_abs, 1.0 / std::sqrt(B.phase)};
    if (x % 2) g.unit = -g.unit;
    g *= fm_.qpow(double(x) * (T + N - t - 1)) * fm_.kfac(2 * x - t - S + 1);
    g *= fm_.qpow(t * (S / 2.0 - 0.5) + t * (t + 1) / 4.0);
    g /= fm_.qinvfact(S + N - 1 - x) * fm_.qfact(T - S + x - t) * fm_.kpoch(x - T + 1, T + N - t);
    return g;
  }

  const CorrelationKernel& K_;
  FactorModel<cplx> fm_;
};

}  // namespace boxed_pp
