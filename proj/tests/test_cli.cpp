#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "boxed_pp/cli.hpp"

using namespace boxed_pp;
using namespace boxed_pp::cli;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("boxed_pp_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  RunResult run(const std::string& args) const {
    const auto o = path("stdout.txt"), e = path("stderr.txt");
    const std::string cmd = std::string(BOXED_PP_CLI_PATH) + " " + args + " >" + o.string() + " 2>" + e.string();
    const int st = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
  }

  fs::path dir_;
};

// Count of lozenges covering each unit-triangle centroid of the hexagon.
bool point_in_parallelogram(const Lozenge& L, double t, double x) {
  double sgn = 0;
  for (int k = 0; k < 4; ++k) {
    auto [t0, x0] = L.corners[k];
    auto [t1, x1] = L.corners[(k + 1) % 4];
    const double cr = (t1 - t0) * (x - x0) - (x1 - x0) * (t - t0);
    if (std::fabs(cr) < 1e-12) return false;
    if (sgn == 0) sgn = cr;
    if (cr * sgn < 0) return false;
  }
  return true;
}

}  // namespace

TEST(CliParse, ComplexValues) {
  EXPECT_EQ(parse_complex("1.5"), cplx(1.5, 0));
  EXPECT_EQ(parse_complex("0.7,-0.2"), cplx(0.7, -0.2));
  EXPECT_THROW(parse_complex("abc"), domain_error);
  EXPECT_THROW(parse_complex("1;2"), domain_error);
  EXPECT_THROW(parse_complex("1,2,3"), domain_error);
}

TEST(CliParse, FamilySelection) {
  RunConfig c;
  for (std::string f : {"hahn", "racah", "qhahn", "qracah", "trig", "elliptic"}) {
    c.family = f;
    EXPECT_EQ(family_name(make_params(c)), f);
  }
  c.family = "bogus";
  EXPECT_THROW(make_params(c), domain_error);
  c.family = "qracah";
  c.q = 0.3;
  c.kappa_sq = -2;
  auto p = std::get<QRacah>(make_params(c));
  EXPECT_EQ(p.q, 0.3);
  EXPECT_EQ(p.kappa_sq, -2);
}

TEST(CliRender, LozengesTileTheHexagonExactlyOnce) {
  for (auto d : {HexagonDims(2, 2, 2), HexagonDims(3, 1, 2), HexagonDims(1, 3, 2), HexagonDims(2, 3, 0)}) {
    for (const auto& til : all_tilings(d)) {
      const auto L = lozenges(til, d);
      std::map<LozengeKind, int> kinds;
      for (auto& l : L) ++kinds[l.kind];
      std::multiset<int> counts = {kinds[LozengeKind::Level], kinds[LozengeKind::Up], kinds[LozengeKind::Hole]};
      EXPECT_EQ(counts, (std::multiset<int>{d.a * d.b, d.b * d.c, d.c * d.a}));
      for (int t = 0; t < d.T(); ++t)
        for (int x = -1; x <= d.S() + d.N(); ++x)
          for (auto [ct, cx] : {std::pair{t + 2.0 / 3, x + 1.0 / 3}, std::pair{t + 1.0 / 3, x + 2.0 / 3}}) {
            const bool inside = cx > std::max(0.0, ct + d.S() - d.T()) && cx < std::min(ct + d.N(), 1.0 * d.S() + d.N());
            int cover = 0;
            for (auto& l : L) cover += point_in_parallelogram(l, ct, cx);
            EXPECT_EQ(cover, inside ? 1 : 0) << "triangle centroid (" << ct << ", " << cx << ")";
          }
    }
  }
}

TEST(CliRender, SvgUsesPolygonsOnly) {
  HexagonDims d(2, 3, 2);
  std::ostringstream os;
  write_tiling_svg(os, all_tilings(d).front(), d);
  const std::string s = os.str();
  std::regex tag("<([a-zA-Z/][a-zA-Z]*)");
  std::set<std::string> tags;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), tag); it != std::sregex_iterator(); ++it) tags.insert((*it)[1]);
  EXPECT_EQ(tags, (std::set<std::string>{"svg", "polygon", "/svg"}));
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2 + d.a * d.b + d.b * d.c + d.c * d.a);
}

TEST_F(CliRun, DegenerateHexagonGivesTheUniqueTiling) {
  auto r1 = run("sample --a 3 --b 2 --c 0 --family qhahn --q 0.4 --seed 5 --out " + path("a.txt").string());
  auto r2 = run("sample --a 3 --b 2 --c 0 --family qhahn --q 0.4 --seed 6 --out " + path("b.txt").string());
  ASSERT_EQ(r1.code, 0) << r1.err;
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(slurp(path("a.txt")), "0 1 2\n0 1 2\n0 1 2\n");
  EXPECT_EQ(slurp(path("a.txt")), slurp(path("b.txt")));
}

TEST_F(CliRun, FixedSeedIsByteIdentical) {
  const std::string base = "sample --a 4 --b 3 --c 3 --family qracah --q 0.6 --kappa-sq -1 --samples 6";
  auto r1 = run(base + " --seed 11 --threads 1 --out " + path("a.txt").string() + " --svg " + path("a.svg").string());
  auto r2 = run(base + " --seed 11 --threads 4 --out " + path("b.txt").string() + " --svg " + path("b.svg").string());
  ASSERT_EQ(r1.code, 0) << r1.err;
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(slurp(path("a.txt")), slurp(path("b.txt")));
  EXPECT_EQ(slurp(path("a.svg")), slurp(path("b.svg")));

  std::ifstream f(path("a.txt"));
  HexagonDims d(4, 3, 3);
  for (int i = 0; i < 6; ++i) EXPECT_NO_THROW(read_tiling(f, d));

  auto r3 = run(base + " --seed 12");
  EXPECT_EQ(r3.code, 0);
  EXPECT_NE(r3.out, slurp(path("a.txt")));
}

TEST_F(CliRun, ConfigFilePrecedence) {
  {
    std::ofstream f(path("run.cfg"));
    f << "# sampler settings\nfamily = qhahn\nq = 0.7\nseed = 9\nsamples = 2\na = 3\n";
  }
  const std::string dims = " --b 2 --c 2";
  auto from_file = run("sample --config " + path("run.cfg").string() + dims);
  auto explicit_flags = run("sample --family qhahn --q 0.7 --seed 9 --samples 2 --a 3" + dims);
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, explicit_flags.out);

  auto overridden = run("sample --config " + path("run.cfg").string() + dims + " --seed 4 --q 1.5");
  auto expected = run("sample --family qhahn --q 1.5 --seed 4 --samples 2 --a 3" + dims);
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(overridden.out, expected.out);

  {
    std::ofstream f(path("bad.cfg"));
    f << "kappa_squared = 3\n";
  }
  EXPECT_NE(run("verify --config " + path("bad.cfg").string()).code, 0);
}

TEST_F(CliRun, InadmissibleParametersRejected) {
  auto r = run("verify --family qracah --q 0.5 --kappa-sq 0.5");
  EXPECT_EQ(r.code, BadInput);
  EXPECT_NE(r.err.find("kappa must not lie between"), std::string::npos) << r.err;
  EXPECT_EQ(r.out, "");

  auto s = run("sample --family racah --K 0 --a 2 --b 2 --c 2");
  EXPECT_EQ(s.code, BadInput);
  EXPECT_NE(s.err.find("racah: K must not lie"), std::string::npos) << s.err;

  EXPECT_EQ(run("sample --family elliptic").code, BadInput);
}

TEST_F(CliRun, IoFailureIsReported) {
  auto r = run("sample --out " + (dir_ / "missing" / "x.txt").string());
  EXPECT_EQ(r.code, IoFailure);
  EXPECT_EQ(run("render --a 2 --b 2 --c 2 --in " + (dir_ / "none.txt").string()).code, IoFailure);
}

TEST_F(CliRun, VerifyDefaultBatteryPasses) {
  auto r = run("verify");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("all "), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(r.out, m, std::regex("PASS elliptic MacMahon 2x2x2  residual=([0-9.e+-]+)")));
  EXPECT_LT(std::stod(m[1]), 1e-10);
}

TEST_F(CliRun, VerifyAcrossFamilies) {
  for (std::string args : {"--family hahn", "--family racah --K 4", "--family qhahn --q 1.3",
                           "--family trig --alpha 0.2 --beta 1.2", "--family elliptic --p 0.3 --u1 0.8,0.2 --a 3"}) {
    auto r = run("verify " + args);
    EXPECT_EQ(r.code, 0) << args << "\n" << r.out << r.err;
  }
}

TEST_F(CliRun, VerifyReportsFailures) {
  BatteryTolerances strict;
  strict.kasteleyn = 0;
  strict.kernel = 0;
  auto rep = run_battery(HexagonDims(2, 2, 2), QRacah{0.5, -1}, EllipticWeightCtx(0.2, 0.5, {0.7, 0.1}, {1.3, -0.2}), strict);
  EXPECT_FALSE(rep.all_pass());
  std::ostringstream os;
  write_report(os, rep);
  EXPECT_NE(os.str().find("failed:"), std::string::npos);
  EXPECT_NE(os.str().find("inverse Kasteleyn identity"), std::string::npos);

  auto big = run("verify --a 9 --b 9 --c 9");
  EXPECT_EQ(big.code, BadInput);
  EXPECT_NE(big.err.find("enumeration cap"), std::string::npos);
}

TEST_F(CliRun, RenderRoundTrip) {
  ASSERT_EQ(run("sample --a 3 --b 2 --c 2 --seed 3 --out " + path("t.txt").string() + " --svg " + path("s.svg").string()).code, 0);
  auto r = run("render --a 3 --b 2 --c 2 --in " + path("t.txt").string() + " --svg " + path("r.svg").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("s.svg")), slurp(path("r.svg")));
  EXPECT_NE(run("render --a 3 --b 3 --c 2 --in " + path("t.txt").string()).code, 0);
}

TEST_F(CliRun, BoundaryQHahnSixTangencies) {
  auto r = run("boundary --family qhahn --q 0.5 --a 1 --b 1 --c 1 --out " + path("b.csv").string() + " --svg " +
               path("b.svg").string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::smatch m;
  std::string rest = r.out;
  int sides = 0;
  while (std::regex_search(rest, m, std::regex("tangency side (\\d): distance ([0-9.e+-]+)"))) {
    EXPECT_LT(std::stod(m[2]), 1e-3);
    ++sides;
    rest = m.suffix();
  }
  EXPECT_EQ(sides, 6);
  EXPECT_NE(r.out.find("nodes: none"), std::string::npos);
  const auto csv = slurp(path("b.csv"));
  EXPECT_EQ(csv.rfind("t,x\n", 0), 0u);
  std::istringstream ls(csv);
  std::string line, first, last;
  std::getline(ls, line);
  while (std::getline(ls, line)) {
    if (first.empty()) first = line;
    last = line;
  }
  EXPECT_EQ(first, last) << "curve must be closed";
  EXPECT_NE(slurp(path("b.svg")).find("<polygon"), std::string::npos);
}

TEST_F(CliRun, BoundaryFlagsNode) {
  auto r = run("boundary --family qracah --q 0.6 --kappa-sq 0.36 --a 1 --b 1 --c 1 --out " + path("b.csv").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("nodes: vertex 1"), std::string::npos) << r.out;
}

TEST_F(CliRun, BoundaryRejectsZeroS) {
  auto r = run("boundary --family qhahn --q 0.5 --a 1 --b 1 --c 0");
  EXPECT_EQ(r.code, BadInput);
  EXPECT_NE(r.err.find("0 < S < T"), std::string::npos);
  EXPECT_EQ(run("boundary --family hahn --a 1 --b 1 --c 1").code, BadInput);
}

TEST_F(CliRun, DensityGrid) {
  auto r = run("density --family qhahn --q 0.5 --a 1 --b 1 --c 1 --grid 5");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream ls(r.out);
  std::string line;
  std::getline(ls, line);
  EXPECT_EQ(line, "t,x,p1,p2,p3,phi");
  int rows = 0;
  while (std::getline(ls, line)) {
    double v[6];
    char comma;
    std::istringstream f(line);
    f >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4] >> comma >> v[5];
    EXPECT_NEAR(v[2] + v[3] + v[4], 1.0, 1e-10);
    ++rows;
  }
  EXPECT_EQ(rows, 16);
}

// Large-box run with the base of the published large example. kappa^2 = 1
// itself makes hole weights vanish on this hexagon and is rejected.
TEST_F(CliRun, LargeBoxSmoke) {
  auto bad = run("sample --a 70 --b 90 --c 70 --family qracah --q 0.97 --kappa-sq 1");
  EXPECT_EQ(bad.code, BadInput);
  auto r = run("sample --a 70 --b 90 --c 70 --family qracah --q 0.97 --kappa-sq -1 --seed 1 --out " +
               path("big.txt").string() + " --svg " + path("big.svg").string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(path("big.txt"));
  EXPECT_NO_THROW(read_tiling(f, HexagonDims(70, 90, 70)));
  EXPECT_GT(fs::file_size(path("big.svg")), 100000u);
}
