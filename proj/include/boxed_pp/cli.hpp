#pragma once

#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "boxed_pp/asymptotics.hpp"
#include "boxed_pp/elliptic.hpp"
#include "boxed_pp/oracle.hpp"
#include "boxed_pp/sampler.hpp"
#include "boxed_pp/verify.hpp"

namespace boxed_pp::cli {

enum ExitCode : int { Ok = 0, Failure = 1, BadInput = 2, TracerFailure = 3, IoFailure = 4 };

struct RunConfig {
  std::string subcommand;
  int a = 2, b = 2, c = 2;
  std::string family = "qracah";
  double q = 0.5;
  double kappa_sq = -1.0;
  double K = 5.0;
  double alpha = 0.1;
  double beta = 1.0;
  double p = 0.2;
  std::string u1 = "0.7,0.1";
  std::string u2 = "1.3,-0.2";
  std::uint64_t seed = 1;
  int samples = 1;
  int threads = 0;  // 0: hardware concurrency
  double scale = 1.0;
  int grid = 200;
  std::string in, out, svg;

  HexagonDims dims() const { return HexagonDims(a, b, c); }
};

// "re" or "re,im".
inline cplx parse_complex(const std::string& s) {
  std::istringstream is(s);
  double re = 0, im = 0;
  char comma = 0;
  if (!(is >> re)) throw domain_error("cannot parse complex value '" + s + "'");
  if (is >> comma) {
    if (comma != ',' || !(is >> im)) throw domain_error("cannot parse complex value '" + s + "'");
  }
  std::string rest;
  if (is >> rest) throw domain_error("cannot parse complex value '" + s + "'");
  return {re, im};
}

inline WeightParams make_params(const RunConfig& c) {
  if (c.family == "hahn") return Hahn{};
  if (c.family == "racah") return Racah{c.K};
  if (c.family == "qhahn") return QHahn{c.q};
  if (c.family == "qracah") return QRacah{c.q, c.kappa_sq};
  if (c.family == "trig") return QRacahTrig{c.alpha, c.beta};
  if (c.family == "elliptic") return Elliptic{c.p, c.q, parse_complex(c.u1), parse_complex(c.u2)};
  throw domain_error("unknown family '" + c.family + "' (hahn, racah, qhahn, qracah, trig, elliptic)");
}

inline EllipticWeightCtx make_elliptic_ctx(const RunConfig& c) {
  return EllipticWeightCtx(c.p, c.q, parse_complex(c.u1), parse_complex(c.u2));
}

// Lozenge classes in the sheared picture where line t is the column X = t and
// site (t, x) is the unit segment [x, x + 1] of that column.
enum class LozengeKind { Level, Up, Hole };

struct Lozenge {
  LozengeKind kind;
  std::array<std::pair<double, double>, 4> corners;
};

inline std::vector<Lozenge> lozenges(const Tiling& til, const HexagonDims& d) {
  std::vector<Lozenge> out;
  const int T = d.T();
  for (int t = 0; t <= T; ++t) {
    const auto& X = til.slices[t];
    if (t < T) {
      const auto& Y = til.slices[t + 1];
      for (std::size_t i = 0; i < X.size(); ++i) {
        const double x = X[i];
        if (Y[i] == X[i])
          out.push_back({LozengeKind::Level, {{{t, x}, {t + 1, x}, {t + 1, x + 1}, {t, x + 1}}}});
        else
          out.push_back({LozengeKind::Up, {{{t, x}, {t + 1, x + 1}, {t + 1, x + 2}, {t, x + 1}}}});
      }
    }
    for (int x = d.lo(t); x <= d.hi(t); ++x) {
      if (std::binary_search(X.begin(), X.end(), x)) continue;
      const double xx = x;
      out.push_back({LozengeKind::Hole, {{{t - 1.0, xx}, {t, xx}, {t + 1.0, xx + 1}, {t, xx + 1}}}});
    }
  }
  return out;
}

namespace detail {

struct SvgFrame {
  double unit, margin, height;
  double X(double t) const { return margin + unit * t; }
  double Y(double x) const { return margin + unit * (height - x); }
};

inline void svg_polygon(std::ostream& os, const SvgFrame& f, const std::vector<std::pair<double, double>>& pts,
                        const std::string& style) {
  os << "<polygon points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    os << (i ? " " : "") << f.X(pts[i].first) << ',' << f.Y(pts[i].second);
  os << "\" " << style << "/>\n";
}

inline void svg_open(std::ostream& os, double w, double h) {
  os << std::fixed << std::setprecision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
}

inline std::vector<std::pair<double, double>> hexagon_outline(double S, double T, double N) {
  return {{0, 0}, {T - S, 0}, {T, S}, {T, S + N}, {S, S + N}, {0, N}};
}

}  // namespace detail

inline const char* lozenge_color(LozengeKind k) {
  switch (k) {
    case LozengeKind::Level: return "#4f7cac";
    case LozengeKind::Up: return "#f2c14e";
    case LozengeKind::Hole: return "#d1495b";
  }
  return "#000000";
}

inline void write_tiling_svg(std::ostream& os, const Tiling& til, const HexagonDims& d, double target_px = 800) {
  const double extent = std::max<double>(d.T(), d.S() + d.N());
  detail::SvgFrame f{target_px / extent, 10, static_cast<double>(d.S() + d.N())};
  detail::svg_open(os, 2 * f.margin + f.unit * d.T(), 2 * f.margin + f.unit * f.height);
  for (auto& L : lozenges(til, d)) {
    std::string style = std::string("fill=\"") + lozenge_color(L.kind) + "\" stroke=\"#222222\" stroke-width=\"" +
                        std::to_string(std::min(1.0, f.unit / 20)) + "\"";
    detail::svg_polygon(os, f, {L.corners.begin(), L.corners.end()}, style);
  }
  os << "</svg>\n";
}

inline void write_boundary_svg(std::ostream& os, const ScaledGeometry& g, const std::vector<Point2>& curve,
                               double target_px = 800) {
  const double extent = std::max(g.T, g.S + g.N);
  detail::SvgFrame f{target_px / extent, 10, g.S + g.N};
  detail::svg_open(os, 2 * f.margin + f.unit * g.T, 2 * f.margin + f.unit * f.height);
  detail::svg_polygon(os, f, detail::hexagon_outline(g.S, g.T, g.N), "fill=\"#f4f1ea\" stroke=\"#222222\" stroke-width=\"2\"");
  std::vector<std::pair<double, double>> pts;
  for (auto& p : curve) pts.push_back({p.t, p.x});
  if (!pts.empty())
    detail::svg_polygon(os, f, pts, "fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"#d1495b\" stroke-width=\"1.5\"");
  os << "</svg>\n";
}

namespace detail {

template <class F>
bool write_file(const std::string& path, std::ostream& err, F&& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot open '" << path << "' for writing\n";
    return false;
  }
  body(f);
  f.flush();
  if (!f) {
    err << "error: write to '" << path << "' failed\n";
    return false;
  }
  return true;
}

// Validates dims and parameters; prints the error and returns false on rejection.
inline bool admissible(const RunConfig& c, HexagonDims& d, WeightParams& p, std::ostream& err) {
  try {
    d = c.dims();
    p = make_params(c);
    positivity_case(p, d);
    return true;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return false;
  }
}

}  // namespace detail

// Writes `samples` tilings (blank-line separated) to cfg.out or `out`; sample
// i uses stream i of the seed, so output is independent of the thread count.
inline int cmd_sample(const RunConfig& c, std::ostream& out, std::ostream& err) {
  HexagonDims d;
  WeightParams p;
  if (!detail::admissible(c, d, p, err)) return BadInput;
  if (std::holds_alternative<Elliptic>(p)) {
    err << "error: sampling supports the real families only (hahn, racah, qhahn, qracah, trig)\n";
    return BadInput;
  }
  if (c.samples < 1) {
    err << "error: --samples must be at least 1\n";
    return BadInput;
  }
  std::vector<Tiling> result(c.samples);
  const int nthreads = std::max(1, std::min(c.samples, c.threads > 0 ? c.threads
                                                                       : static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next{0};
  std::vector<std::string> errors(nthreads);
  auto worker = [&](int w) {
    try {
      for (int i = next++; i < c.samples; i = next++) result[i] = sample_tiling(d, p, c.seed, static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      errors[w] = e.what();
      next = c.samples;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (!e.empty()) {
      err << "error: " << e << '\n';
      return Failure;
    }

  auto emit = [&](std::ostream& os) {
    for (int i = 0; i < c.samples; ++i) {
      if (i) os << '\n';
      write_tiling(os, result[i]);
    }
  };
  if (c.out.empty())
    emit(out);
  else if (!detail::write_file(c.out, err, emit))
    return IoFailure;
  if (!c.svg.empty() && !detail::write_file(c.svg, err, [&](std::ostream& os) { write_tiling_svg(os, result[0], d); }))
    return IoFailure;
  return Ok;
}

// Reads the first tiling of cfg.in and writes its SVG to cfg.svg (or `out`).
inline int cmd_render(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Tiling til;
  HexagonDims d;
  try {
    d = c.dims();
    std::ifstream f(c.in);
    if (!f) {
      err << "error: cannot open '" << c.in << "'\n";
      return IoFailure;
    }
    til = read_tiling(f, d);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return BadInput;
  }
  auto emit = [&](std::ostream& os) { write_tiling_svg(os, til, d); };
  if (c.svg.empty()) {
    emit(out);
    return Ok;
  }
  return detail::write_file(c.svg, err, emit) ? Ok : IoFailure;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  HexagonDims d;
  WeightParams p;
  if (!detail::admissible(c, d, p, err)) return BadInput;
  EllipticWeightCtx ell;
  try {
    ell = make_elliptic_ctx(c);
    const auto cap = oracle_cap();
    if (count_tilings(d) > cap) {
      err << "error: hexagon " << d.a << 'x' << d.b << 'x' << d.c << " exceeds the enumeration cap " << cap << '\n';
      return BadInput;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return BadInput;
  }
  out << "verify " << d.a << 'x' << d.b << 'x' << d.c << ' ' << describe(p) << '\n';
  const auto rep = run_battery(d, p, ell);
  write_report(out, rep);
  return rep.all_pass() ? Ok : Failure;
}

inline ScaledGeometry scaled_geometry(const RunConfig& c) {
  if (!(c.scale > 0)) throw domain_error("--scale must be positive");
  return ScaledGeometry::from_finite(c.dims(), make_params(c), c.scale);
}

inline int cmd_boundary(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ScaledGeometry g;
  try {
    g = scaled_geometry(c);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return BadInput;
  }
  auto write_curve = [&](const std::vector<Point2>& curve) {
    FrozenBoundary fb;
    fb.curve = curve;
    auto csv = [&](std::ostream& os) { write_boundary_csv(os, fb); };
    bool ok = c.out.empty() ? (csv(out), true) : detail::write_file(c.out, err, csv);
    if (ok && !c.svg.empty())
      ok = detail::write_file(c.svg, err, [&](std::ostream& os) { write_boundary_svg(os, g, curve); });
    return ok;
  };
  FrozenBoundary fb;
  try {
    fb = frozen_boundary(g, c.grid);
  } catch (const tracer_error& e) {
    err << "error: " << e.what() << "; partial trace of " << e.partial.size() << " points";
    if (!c.out.empty()) err << " written to " << c.out;
    err << '\n';
    write_curve(e.partial);
    return TracerFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return BadInput;
  }
  if (!write_curve(fb.curve)) return IoFailure;
  std::ostream& rep = c.out.empty() ? err : out;
  rep << std::setprecision(6);
  rep << "frozen boundary: closed curve, " << fb.curve.size() << " points, grid step " << fb.grid_step << '\n';
  for (int s = 0; s < 6; ++s)
    rep << "tangency side " << s << ": distance " << fb.sides[s].distance << " at (" << fb.sides[s].nearest.t << ", "
        << fb.sides[s].nearest.x << ")\n";
  rep << "max tangency residual " << fb.max_tangency_residual() << '\n';
  const auto nodes = detect_nodes(g);
  rep << "nodes:";
  if (nodes.empty()) rep << " none";
  const auto V = g.vertices();
  for (int v : nodes) rep << " vertex " << v << " (" << V[v].first << ", " << V[v].second << ")";
  rep << '\n';
  return Ok;
}

inline int cmd_density(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ScaledGeometry g;
  try {
    g = scaled_geometry(c);
    if (c.grid < 2) throw domain_error("--grid must be at least 2");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return BadInput;
  }
  auto emit = [&](std::ostream& os) { write_density_csv(os, g, c.grid); };
  if (c.out.empty()) {
    emit(out);
    return Ok;
  }
  return detail::write_file(c.out, err, emit) ? Ok : IoFailure;
}

inline int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.subcommand == "sample") return cmd_sample(c, out, err);
  if (c.subcommand == "render") return cmd_render(c, out, err);
  if (c.subcommand == "verify") return cmd_verify(c, out, err);
  if (c.subcommand == "boundary") return cmd_boundary(c, out, err);
  if (c.subcommand == "density") return cmd_density(c, out, err);
  err << "error: unknown subcommand '" << c.subcommand << "'\n";
  return BadInput;
}

}  // namespace boxed_pp::cli
