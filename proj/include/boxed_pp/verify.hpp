#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "boxed_pp/chains.hpp"
#include "boxed_pp/elliptic.hpp"
#include "boxed_pp/kernel.hpp"
#include "boxed_pp/oracle.hpp"
#include "boxed_pp/sampler.hpp"

namespace boxed_pp {

struct CheckResult {
  std::string name;
  double value = 0;  // worst residual observed
  double tol = 0;
  bool pass = false;
  std::string note;  // error message when the check could not run
};

struct BatteryReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> f;
    for (auto& c : checks)
      if (!c.pass) f.push_back(c.name);
    return f;
  }
};

inline void write_report(std::ostream& os, const BatteryReport& r) {
  const auto old = os.precision(3);
  for (auto& c : r.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual=" << std::scientific << c.value << " tol=" << c.tol
       << std::defaultfloat;
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << '\n';
  }
  const auto f = r.failures();
  if (f.empty()) {
    os << "all " << r.checks.size() << " checks passed\n";
  } else {
    os << f.size() << " failed:";
    for (auto& n : f) os << ' ' << n;
    os << '\n';
  }
  os.precision(old);
}

namespace detail {

// Runs body, which returns the worst residual; exceptions count as failure.
inline void run_check(BatteryReport& r, const std::string& name, double tol, const std::function<double()>& body) {
  CheckResult c{name, 0, tol, false, {}};
  try {
    c.value = body();
    c.pass = std::isfinite(c.value) && c.value <= tol;
  } catch (const std::exception& e) {
    c.value = std::numeric_limits<double>::infinity();
    c.note = e.what();
  }
  r.checks.push_back(std::move(c));
}

}  // namespace detail

struct BatteryTolerances {
  double push_forward = 1e-10;
  double commutation = 1e-11;
  double slice_law = 1e-10;
  double kernel = 1e-8;
  double trace = 1e-10;
  double kasteleyn = 1e-9;
  double macmahon = 1e-10;
};

// Oracle-backed checks on one hexagon plus the elliptic MacMahon identity on
// the 2x2x2 box. Hexagon checks need non-elliptic params.
inline BatteryReport run_battery(const HexagonDims& d, const WeightParams& params, const EllipticWeightCtx& ell,
                                 const BatteryTolerances& tol = {}) {
  BatteryReport r;
  const bool elliptic = std::holds_alternative<Elliptic>(params);
  const int T = d.T(), S = d.S();

  detail::run_check(r, "tiling count", 0.0, [&] {
    return std::fabs(static_cast<double>(count_tilings(d)) - static_cast<double>(macmahon_count(d.a, d.b, d.c)));
  });

  if (!elliptic) {
    std::vector<ExactDistribution> exact;
    for (int s = 0; s <= T; ++s) exact.push_back(exact_distribution(d.with_S(s), params));

    detail::run_check(r, "sampler push-forward (S up/down)", tol.push_forward, [&] {
      double worst = 0;
      for (int s = 0; s < T; ++s) {
        worst = std::max(worst, total_variation(push_forward_step(exact[s], params, Direction::Up), exact[s + 1]));
        worst = std::max(worst, total_variation(push_forward_step(exact[s + 1], params, Direction::Down), exact[s]));
      }
      return worst;
    });

    detail::run_check(r, "slice chain push-forward", tol.push_forward, [&] {
      double worst = 0;
      for (int s = 0; s <= T; ++s)
        for (int t = 0; t <= T; ++t)
          for (Move m : {Move::TPlus, Move::TMinus, Move::SPlus, Move::SMinus}) {
            auto [nt, nS] = move_target(m, t, s);
            if (nt < 0 || nt > T || nS < 0 || nS > T) continue;
            auto out = push_forward(slice_marginal(exact[s], t), m, t, d.with_S(s), params);
            worst = std::max(worst, total_variation(out, slice_marginal(exact[nS], nt)));
          }
      return worst;
    });

    detail::run_check(r, "transition commutation", tol.commutation, [&] {
      double worst = 0;
      with_factor_model(params, [&](const auto& fm) {
        for (int s = 0; s <= T; ++s)
          for (int t = 0; t <= T; ++t) {
            auto rep = commutation_check(fm, d.with_S(s), t);
            worst = std::max({worst, rep.u_identities, rep.closed_form});
          }
      });
      return worst;
    });

    detail::run_check(r, "one-slice law", tol.slice_law, [&] {
      double worst = 0;
      for (int t = 0; t <= T; ++t)
        worst = std::max(worst, total_variation(slice_measure(d, params, t).probs, slice_marginal(exact[S], t)));
      return worst;
    });

    if (S > 0 && S < T) {
      const CorrelationKernel K(d, params);
      const auto& ex = exact[S];
      detail::run_check(r, "kernel rho1", tol.kernel, [&] {
        double worst = 0;
        for (int t = 0; t <= T; ++t)
          for (int x = d.lo(t); x <= d.hi(t); ++x)
            worst = std::max(worst, std::fabs(K.rho1(t, x) - particle_correlation(ex, {{t, x}})));
        return worst;
      });
      detail::run_check(r, "kernel rho2", tol.kernel, [&] {
        double worst = 0;
        for (int t1 = 0; t1 <= T; ++t1)
          for (int t2 = t1; t2 <= std::min(T, t1 + 1); ++t2)
            for (int x1 = d.lo(t1); x1 <= d.hi(t1); ++x1)
              for (int x2 = d.lo(t2); x2 <= d.hi(t2); ++x2) {
                if (t1 == t2 && x1 == x2) continue;
                std::vector<std::pair<int, int>> pts = {{t1, x1}, {t2, x2}};
                worst = std::max(worst, std::fabs(K.correlation(pts) - particle_correlation(ex, pts)));
              }
        return worst;
      });
      detail::run_check(r, "kernel trace", tol.trace, [&] {
        double worst = 0;
        for (int t = 0; t <= T; ++t) {
          double s = 0;
          for (int x = d.lo(t); x <= d.hi(t); ++x) s += K.rho1(t, x);
          worst = std::max(worst, std::fabs(s - d.N()));
        }
        return worst;
      });
      detail::run_check(r, "inverse Kasteleyn identity", tol.kasteleyn,
                        [&] { return InverseKasteleyn(K).identity_residual(); });
    }
  }

  detail::run_check(r, "elliptic MacMahon 2x2x2", tol.macmahon, [&] { return macmahon_check(ell, 2, 2, 2).rel_err; });
  if (elliptic && d.a <= 3 && d.b <= 3 && d.c <= 3)
    detail::run_check(r, "elliptic MacMahon on given box", tol.macmahon,
                      [&] { return macmahon_check(ell, d.a, d.b, d.c).rel_err; });
  return r;
}

}  // namespace boxed_pp
