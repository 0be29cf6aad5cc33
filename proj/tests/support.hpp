#pragma once

#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "boxed_pp/weights.hpp"

namespace boxed_pp::testing {

enum class Family { Hahn, Racah, QHahn, QRacahImaginary, QRacahReal, Trig };

inline const std::vector<Family>& all_families() {
  static const std::vector<Family> f = {Family::Hahn,          Family::Racah,           Family::QHahn,
                                        Family::QRacahImaginary, Family::QRacahReal, Family::Trig};
  return f;
}

inline std::string family_label(Family f) {
  static const char* n[] = {"hahn", "racah", "qhahn", "qracah-imaginary", "qracah-real", "trig"};
  return n[static_cast<int>(f)];
}

// Random admissible parameters of a family for the given hexagon.
inline WeightParams random_params(Family fam, const HexagonDims& d, std::mt19937_64& g) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int N = d.N(), T = d.T();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    WeightParams p;
    auto rq = [&] {
      double q = 0.35 + 0.6 * U(g);
      return U(g) < 0.3 ? 1.0 / q : q;
    };
    switch (fam) {
      case Family::Hahn:
        p = Hahn{};
        break;
      case Family::Racah:
        p = Racah{U(g) < 0.5 ? (T - 1) / 2.0 + 0.3 + 3 * U(g) : -N + 0.5 - 0.3 - 3 * U(g)};
        break;
      case Family::QHahn:
        p = QHahn{rq()};
        break;
      case Family::QRacahImaginary:
        p = QRacah{rq(), -(0.1 + 3 * U(g))};
        break;
      case Family::QRacahReal: {
        double q = rq();
        double e1 = std::pow(q, -N + 0.5), e2 = std::pow(q, (T - 1) / 2.0);
        double lo = std::min(e1, e2), hi = std::max(e1, e2);
        double kappa = U(g) < 0.5 ? lo * (0.1 + 0.7 * U(g)) : hi * (1.3 + 3 * U(g));
        p = QRacah{q, kappa * kappa};
        break;
      }
      case Family::Trig: {
        double alpha = (0.1 + 0.8 * U(g)) * std::numbers::pi / (N + T);
        double blo = alpha * (T - 1) / 2.0 + 0.05, bhi = std::numbers::pi - 0.05 - alpha * (N - 0.5);
        p = QRacahTrig{alpha, blo + (bhi - blo) * U(g)};
        break;
      }
    }
    try {
      positivity_case(p, d);
      return p;
    } catch (const domain_error&) {
    }
  }
  throw std::runtime_error("random_params: no admissible draw");
}

}  // namespace boxed_pp::testing
