#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace boxed_pp {

using cplx = std::complex<double>;

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

// Magnitude stored as a natural log plus a sign in {+1,-1,0}.
struct LogSignedValue {
  double log_abs = 0.0;
  int sign = 1;

  static LogSignedValue zero() { return {-std::numeric_limits<double>::infinity(), 0}; }
  static LogSignedValue from(double v) {
    if (v == 0.0) return zero();
    return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
  }
  bool is_zero() const { return sign == 0; }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  LogSignedValue& operator*=(const LogSignedValue& o) {
    if (sign == 0 || o.sign == 0) return *this = zero();
    log_abs += o.log_abs;
    sign *= o.sign;
    return *this;
  }
  LogSignedValue& operator/=(const LogSignedValue& o) {
    if (o.sign == 0) throw domain_error("LogSignedValue: division by zero");
    if (sign == 0) return *this;
    log_abs -= o.log_abs;
    sign *= o.sign;
    return *this;
  }
  LogSignedValue& operator*=(double v) { return *this *= from(v); }
  LogSignedValue& operator/=(double v) { return *this /= from(v); }
  friend LogSignedValue operator*(LogSignedValue a, const LogSignedValue& b) { return a *= b; }
  friend LogSignedValue operator/(LogSignedValue a, const LogSignedValue& b) { return a /= b; }
  LogSignedValue pow(double e) const {
    if (sign == 0) return e > 0 ? zero() : throw domain_error("LogSignedValue: 0^e with e <= 0");
    if (sign < 0 && e != std::floor(e)) throw domain_error("LogSignedValue: fractional power of negative");
    int s = (sign < 0 && static_cast<long long>(e) % 2 != 0) ? -1 : 1;
    return {log_abs * e, s};
  }
};

// Same idea for real or complex scalars: log magnitude plus a unit factor
// (a sign for reals, a phase for complex values).
template <class Scalar>
struct LogValue {
  double log_abs = 0.0;
  Scalar unit = Scalar(1.0);

  static LogValue zero() { return {-std::numeric_limits<double>::infinity(), Scalar(0.0)}; }
  static LogValue from(Scalar v) {
    double a = std::abs(v);
    if (a == 0.0) return zero();
    return {std::log(a), v / a};
  }
  bool is_zero() const { return unit == Scalar(0.0); }
  Scalar value() const { return is_zero() ? Scalar(0.0) : unit * std::exp(log_abs); }

  LogValue& operator*=(const LogValue& o) {
    if (is_zero() || o.is_zero()) return *this = zero();
    log_abs += o.log_abs;
    unit *= o.unit;
    return *this;
  }
  LogValue& operator/=(const LogValue& o) {
    if (o.is_zero()) throw domain_error("LogValue: division by zero");
    if (is_zero()) return *this;
    log_abs -= o.log_abs;
    unit /= o.unit;
    return *this;
  }
  LogValue& operator*=(Scalar v) { return *this *= from(v); }
  LogValue& operator/=(Scalar v) { return *this /= from(v); }
  friend LogValue operator*(LogValue a, const LogValue& b) { return a *= b; }
  friend LogValue operator/(LogValue a, const LogValue& b) { return a /= b; }
};

inline LogSignedValue to_signed(const LogValue<double>& v) {
  if (v.is_zero()) return LogSignedValue::zero();
  return {v.log_abs, v.unit > 0 ? 1 : -1};
}

// Turns a list of log-domain values sharing a common unit factor into
// probabilities. Throws when the values do not share that factor (up to
// sign) or when a normalized entry is negative beyond `tol`.
template <class Scalar>
std::vector<double> normalize_log_values(const std::vector<LogValue<Scalar>>& vals, double tol = 1e-9) {
  std::vector<double> out(vals.size(), 0.0);
  double mx = -std::numeric_limits<double>::infinity();
  Scalar ref(0.0);
  for (const auto& v : vals) {
    if (v.is_zero()) continue;
    if (v.log_abs > mx) {
      mx = v.log_abs;
      ref = v.unit;
    }
  }
  if (ref == Scalar(0.0)) throw domain_error("normalize_log_values: all weights vanish");
  double total = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].is_zero()) continue;
    Scalar rel = vals[i].unit / ref;
    double mag = std::exp(vals[i].log_abs - mx);
    if constexpr (is_complex_v<Scalar>) {
      if (std::fabs(rel.imag()) > 1e-7) throw domain_error("normalize_log_values: weights do not share a common phase");
      out[i] = rel.real() * mag;
    } else {
      out[i] = rel * mag;
    }
    total += out[i];
  }
  if (!(total > 0.0)) {
    for (auto& o : out) o = -o;
    total = -total;
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw domain_error("normalize_log_values: nonpositive total weight");
  for (auto& o : out) {
    o /= total;
    if (o < 0.0) {
      if (o < -tol) throw domain_error("normalize_log_values: negative probability " + std::to_string(o));
      o = 0.0;
    }
  }
  return out;
}

// (a;q)_n = prod_{i<n} (1 - a q^i).
template <class Scalar>
Scalar q_pochhammer(Scalar a, Scalar q, int n) {
  if (n < 0) throw domain_error("q_pochhammer: negative length");
  Scalar r(1.0), qi(1.0);
  for (int i = 0; i < n; ++i) {
    r *= Scalar(1.0) - a * qi;
    qi *= q;
  }
  return r;
}
inline double q_pochhammer(double a, double q, int n) { return q_pochhammer<double>(a, q, n); }

// Nome of an elliptic theta function, 0 <= p < 1.
struct EllipticNome {
  double p = 0.0;
  explicit EllipticNome(double p_ = 0.0) : p(p_) {
    if (!(p_ >= 0.0 && p_ < 1.0)) throw domain_error("EllipticNome: require 0 <= p < 1");
  }
};

// theta_p(x) = prod_{i>=0} (1 - p^i x)(1 - p^{i+1}/x), truncated once
// p^k * max(|x|, 1/|x|) < 1e-17.
template <class X>
X theta_p(X x, EllipticNome nome) {
  if (std::abs(x) == 0.0) throw domain_error("theta_p: zero argument");
  const double p = nome.p;
  X r = X(1.0) - x;
  if (p == 0.0) return r;
  const double big = std::max(std::abs(x), 1.0 / std::abs(x));
  double pk = p;  // p^k for the k-th factor pair
  X inv = X(1.0) / x;
  r *= X(1.0) - pk * inv;
  for (int k = 1; k < 100000; ++k) {
    if (pk * big < 1e-17) break;
    r *= (X(1.0) - pk * x) * (X(1.0) - pk * p * inv);
    pk *= p;
  }
  return r;
}
template <class X>
X theta_p(X x, double p) {
  return theta_p(x, EllipticNome(p));
}

// theta_p(x;q)_k = prod_{i<k} theta_p(q^i x).
template <class X, class Q>
X theta_pochhammer(X x, EllipticNome nome, Q q, int k) {
  if (k < 0) throw domain_error("theta_pochhammer: negative length");
  X r(1.0), arg = x;
  for (int i = 0; i < k; ++i) {
    r *= theta_p(arg, nome);
    arg *= q;
  }
  return r;
}
template <class X, class Q>
X theta_pochhammer(X x, double p, Q q, int k) {
  return theta_pochhammer(x, EllipticNome(p), q, k);
}

// Counter-based generator: output i of stream (seed, stream) is a fixed
// mixing function of (seed, stream, i), so draws are reproducible and
// independent of scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }
  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Index drawn from a discrete law by inverse CDF.
inline int sample_inverse_cdf(const std::vector<double>& probs, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return static_cast<int>(k);
  }
  for (std::size_t k = probs.size(); k-- > 0;)
    if (probs[k] > 0.0) return static_cast<int>(k);
  return 0;
}

}  // namespace boxed_pp
