// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "reflector/directrix.hpp"
#include "reflector/optics.hpp"
#include "reflector/validity.hpp"

using namespace refl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vec3 gaussian(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), dim == 2 ? n(rng) : 0.0);
}

// The seeded random families shared by criteria 2, 3 and 9.
std::vector<FocalField> random_families(GridPtr g, int count) {
  std::vector<FocalField> out;
  for (int k = 0; k < count; ++k) {
    std::mt19937_64 rng(1000 + k);
    out.push_back(oracle::random_family(g, rng));
  }
  return out;
}

FocalField perpendicular_axes(int level) {
  auto g = make_shared_grid(2, level);
  std::vector<double> v(g->size(), kInf);
  v[g->nearest(Vec3::UnitX())] = 1.0;
  v[g->nearest(Vec3::UnitY())] = 1.0;
  return FocalField(g, v);
}

Outcome sphere_fixed_point() {
  Outcome o;
  const auto t0 = Clock::now();
  const FocalField p = oracle::constant(2, 3, 2.0);
  const Reflector R = build_reflector(p, 3);
  double rho = 0.0;
  double h = 0.0;
  for (std::size_t i = 0; i < R.grid().size(); ++i) {
    rho = std::max(rho, std::abs(R.radial().values[i] - 1.0));
    h = std::max(h, std::abs(R.support()[i] - 1.0));
  }
  // The reflector already carries p*, so the closure gap needs no second closure.
  double gap = 0.0;
  for (std::size_t i = 0; i < p.grid().size(); ++i) gap = std::max(gap, std::abs(p[i] - R.closed_focal()[i]) / p[i]);
  const DirectrixSurface D = directrix_from_support(R, R.grid_ptr());
  double radius = 0.0;
  for (const Vec3& z : D.points) radius = std::max(radius, std::abs(z.norm() - 2.0));
  const double t = seconds_since(t0);
  o.require(rho <= 1e-9, "|rho-1| " + fmt("%.2e", rho));
  o.require(h <= 1e-9, "|h-1| " + fmt("%.2e", h));
  o.require(gap <= 1e-9, "gap " + fmt("%.2e", gap));
  o.require(radius <= 1e-6, "|r_D-2| " + fmt("%.2e", radius));
  o.require(t < 5.0, "time " + fmt("%.2fs", t));
  return o;
}

struct ClosureData {
  std::vector<FocalField> fields;
  std::vector<FocalField> closed;
  double closed_seconds = 0.0;  // time spent computing `closed`
};

Outcome closure_laws(const ClosureData& c) {
  Outcome o;
  const auto t0 = Clock::now();
  double dominated = 0.0;
  double homogeneous = 0.0;
  double idempotent = 0.0;
  for (std::size_t k = 0; k < c.fields.size(); ++k) {
    const FocalField& p = c.fields[k];
    const FocalField& ps = c.closed[k];
    const FocalField cs = closure(p.scaled(2.5), 3);
    const FocalField pss = closure(ps, 3);
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < p.grid().size(); ++i) {
      if (std::isfinite(p[i])) dominated = std::max(dominated, ps[i] - p[i]);
      homogeneous = std::max(homogeneous, std::abs(cs[i] - 2.5 * ps[i]) / cs[i]);
      diff = std::max(diff, std::abs(pss[i] - ps[i]));
      norm = std::max(norm, std::abs(ps[i]));
    }
    idempotent = std::max(idempotent, diff / norm);
  }
  double monotone = 0.0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> bump(1.0, 1.5);
  for (std::size_t k = 0; k < 20; ++k) {
    std::vector<double> v(c.fields[k].values().begin(), c.fields[k].values().end());
    for (double& x : v) {
      if (std::isfinite(x)) x *= bump(rng);
    }
    const FocalField qs = closure(FocalField(c.fields[k].grid_ptr(), v), 3);
    for (std::size_t i = 0; i < qs.grid().size(); ++i) {
      monotone = std::max(monotone, c.closed[k][i] - qs[i]);
    }
  }
  const double t = c.closed_seconds + seconds_since(t0);
  o.require(dominated <= 1e-9, "max(p*-p) " + fmt("%.2e", dominated));
  o.require(monotone <= 1e-9, "max(p1*-p2*) " + fmt("%.2e", monotone));
  o.require(homogeneous <= 1e-9, "homogeneity " + fmt("%.2e", homogeneous));
  o.require(idempotent <= 1e-6, "idempotence " + fmt("%.2e", idempotent));
  o.require(t < 60.0, "time " + fmt("%.1fs", t));
  return o;
}

Outcome necessity(const ClosureData& c) {
  Outcome o;
  double residual = 0.0;
  double minkg = kInf;
  int malformed = 0;
  int failures = 0;
  for (std::size_t k = 0; k < c.fields.size(); ++k) {
    const Reflector R = build_reflector(c.fields[k], 3);
    const int n = R.dim();
    std::mt19937_64 rng(2000 + k);
    std::vector<Direction> xs(R.grid().points().begin(), R.grid().points().end());
    const std::size_t grid_count = xs.size();
    xs.insert(xs.end(), R.skeleton().begin(), R.skeleton().end());
    std::uniform_int_distribution<std::size_t> pick_x(0, xs.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_edge(grid_count, xs.size() - 1);
    for (int s = 0; s < 10; ++s) {
      const bool edge = s % 2 == 1 && xs.size() > grid_count;
      const Direction& x = xs[edge ? pick_edge(rng) : pick_x(rng)];
      const auto axes = supporting_axes(R, x);
      std::uniform_int_distribution<std::size_t> pick_y(0, axes.size() - 1);
      try {
        const Decomposition d = find_decomposition(R, x, axes[pick_y(rng)]);
        residual = std::max(residual, d.residual);
        if (d.terms.empty() || d.terms.size() > static_cast<std::size_t>(n + 1)) ++malformed;
        for (const auto& t : d.terms) {
          if (t.alpha < 0.0) ++malformed;
        }
        minkg = std::min(minkg, check_minkg(c.closed[k], d, &R));
      } catch (const Error&) {
        ++failures;
      }
    }
  }
  o.require(failures == 0, "decomposition failures " + std::to_string(failures));
  o.require(residual <= 1e-7, "max residual " + fmt("%.2e", residual));
  o.require(malformed == 0, "malformed " + std::to_string(malformed));
  o.require(minkg >= -1e-6, "min minkg " + fmt("%.2e", minkg));
  return o;
}

Outcome lens_closed_forms() {
  Outcome o;
  const Reflector R = build_reflector(oracle::lens(2, 3), 3);
  const double rho = R.radius(Vec3::UnitZ());
  const double h = support_function(R, Direction(0, 0, 1)).h;
  const double pm = R.closed_focal()[R.grid().nearest(-Vec3::UnitX())];
  const Decomposition d = find_decomposition(R, Direction(1, 0, 0), Direction(-1, 0, 0));
  double coeff = 0.0;
  bool up = false;
  bool down = false;
  for (const auto& t : d.terms) {
    coeff = std::max(coeff, std::abs(t.alpha - 1.0));
    up = up || (t.axis.vec() - Vec3::UnitZ()).norm() <= 1e-6;
    down = down || (t.axis.vec() + Vec3::UnitZ()).norm() <= 1e-6;
  }
  o.require(std::abs(rho - 0.5) <= 1e-9, "rho(e3) " + fmt("%.17g", rho));
  o.require(std::abs(h - 0.5) <= 1e-9, "h(e3) " + fmt("%.17g", h));
  o.require(std::abs(pm - 2.0) <= 1e-9, "p*(-e1) " + fmt("%.17g", pm));
  o.require(d.terms.size() == 2 && up && down && coeff <= 1e-6, "alpha error " + fmt("%.2e", coeff));
  return o;
}

Outcome dual_construction(const std::vector<const Reflector*>& rs) {
  Outcome o;
  double worst_hd = 0.0;
  double worst_id = 0.0;
  for (const Reflector* R : rs) {
    const double bound = 5.0 * R->grid().resolution() * R->diameter();
    const DirectrixSurface D = directrix_from_support(*R, R->grid_ptr());
    const double hd = hausdorff_distance(directrix_map_cloud(*R), D.points);
    double id = 0.0;
    for (const auto& c : D.support_check) id = std::max(id, std::abs(c.H - c.p));
    worst_hd = std::max(worst_hd, hd / bound);
    worst_id = std::max(worst_id, id / bound);
  }
  o.require(worst_hd <= 1.0, std::to_string(rs.size()) + " reflectors, Hausdorff/bound " + fmt("%.3f", worst_hd));
  o.require(worst_id <= 1.0, "support identity/bound " + fmt("%.3f", worst_id));
  return o;
}

Outcome optics(const Reflector& lens) {
  Outcome o;
  std::vector<Vec3> xs = oracle::dense_directions(2, 20000);
  xs.insert(xs.end(), lens.grid().points().begin(), lens.grid().points().end());
  double beam = 0.0;
  int rays = 0;
  for (const Vec3& x : xs) {
    if (!(x.z() > 0.0)) continue;
    const ReflectionRecord rec = trace(lens, Direction(x));
    for (const Direction& out : rec.outgoing) beam = std::max(beam, (out.vec() + Vec3::UnitZ()).norm());
    if (rec.outgoing.empty()) beam = kInf;
    ++rays;
  }
  std::mt19937_64 rng(6);
  double involution = 0.0;
  double unit = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const Direction x(gaussian(rng, 2));
    Direction u(gaussian(rng, 2));
    if (x.dot(u.vec()) < 0.0) u = -u;
    if (x.dot(u.vec()) == 0.0) continue;
    const Direction y = reflect(x, u);
    involution = std::max(involution, (reflect(y, -u).vec() - x.vec()).norm());
    unit = std::max(unit, std::abs(y.vec().norm() - 1.0));
  }
  o.require(beam <= 1e-9, std::to_string(rays) + " upper-cap rays, max |out+e3| " + fmt("%.2e", beam));
  o.require(involution <= 1e-12, "involution " + fmt("%.2e", involution));
  o.require(unit <= 1e-12, "unit norm " + fmt("%.2e", unit));
  return o;
}

Outcome smoothness(const std::vector<const Reflector*>& lenses) {
  Outcome o;
  std::vector<DirectrixSurface> ds;
  for (const Reflector* R : lenses) ds.push_back(directrix_from_support(*R, R->grid_ptr()));
  const LevelProbe jumps = gradient_probe(lenses);
  const LevelProbe turning = smoothness_probe(ds);
  for (double r : jumps.ratios) o.require(r < 0.7, "grad h jump ratio " + fmt("%.3f", r));
  for (double r : turning.ratios) o.require(r < 0.7, "turning angle ratio " + fmt("%.3f", r));
  return o;
}

Outcome perpendicular_counterexample() {
  Outcome o;
  const Reflector R = build_reflector(perpendicular_axes(3), 3);
  const Direction x(-1, -1, 1);
  double worst = 0.0;
  for (const Direction& y : supporting_axes(R, x)) {
    // Least-squares projection onto span{e1, e2} drops the third coordinate.
    const Vec3 proj(y[0], y[1], 0.0);
    worst = std::max(worst, (y.vec() - proj).norm());
  }
  const double gap = std::abs(R.family().face_radius(0, x.vec()) - R.family().face_radius(1, x.vec()));
  o.require(gap <= 1e-12, "edge point, face gap " + fmt("%.1e", gap));
  o.require(worst > 0.1, "max distance from span " + fmt("%.4f", worst));
  return o;
}

Outcome refined(const std::vector<const Reflector*>& rs) {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> weight(0.0, 2.0);
  std::exponential_distribution<double> length(1.0);
  std::uniform_int_distribution<std::size_t> pick(0, rs.size() - 1);
  double forward = kInf;
  double reverse = -kInf;
  for (int k = 0; k < 1000; ++k) {
    const Reflector& R = *rs[pick(rng)];
    std::vector<RefinedTerm> pos;
    std::vector<RefinedTerm> neg;
    for (int t = count(rng); t > 0; --t) {
      const double a = weight(rng);
      const Vec3 Y = length(rng) * gaussian(rng, R.dim()).normalized();
      pos.push_back({a, Y});
      neg.push_back({-a, Y});
    }
    forward = std::min(forward, check_refined_inequality(R, pos).residual);
    reverse = std::max(reverse, check_refined_inequality(R, neg).residual);
  }
  double sub = kInf;
  for (const Reflector* R : rs) {
    for (int k = 0; k < 10000; ++k) {
      sub = std::min(sub, check_subadditivity(*R, gaussian(rng, R->dim()), gaussian(rng, R->dim())));
    }
  }
  o.require(forward >= -1e-8, "min residual (alpha >= 0) " + fmt("%.2e", forward));
  o.require(reverse <= 1e-8, "max residual (alpha <= 0) " + fmt("%.2e", reverse));
  o.require(sub >= -1e-9, std::to_string(rs.size()) + " reflectors x 1e4 pairs, min subadditivity " + fmt("%.2e", sub));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "reflector_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "field.json") << R"({
  "dim": 2,
  "entries": [
    {"axis": [0, 0, 1], "p": 1},
    {"axis": [0, 0, -1], "p": 1},
    {"axis": [1, 1, 0], "p": 1.7}
  ]
}
)";
  int codes[2];
  for (int run = 0; run < 2; ++run) {
    const std::string cmd = std::string(REFLECTOR_CLI) + " report --in " + (dir / "field.json").string() +
                            " --out " + (dir / ("run" + std::to_string(run))).string() +
                            " --level 3 --seed 42 >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    codes[run] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  const std::string a = slurp(dir / "run0" / "report.json");
  const std::string b = slurp(dir / "run1" / "report.json");
  o.require(codes[0] == 0 && codes[1] == 0, "exit codes " + std::to_string(codes[0]) + "," + std::to_string(codes[1]));
  o.require(!a.empty() && a == b, std::to_string(a.size()) + " bytes, identical: " + (a == b ? "yes" : "no"));
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.passed) ++failed;
    std::printf("%s criterion %d: %s (%s) [%.1fs]\n", o.passed ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "sphere fixed point", sphere_fixed_point);

  auto g3 = make_shared_grid(2, 3);
  ClosureData data;
  data.fields = random_families(g3, 100);
  const auto t_closure = Clock::now();
  for (const FocalField& p : data.fields) data.closed.push_back(closure(p, 3));
  data.closed_seconds = seconds_since(t_closure);
  report(2, "closure operator laws", [&] { return closure_laws(data); });
  report(3, "necessity of the decomposition inequality", [&] { return necessity(data); });
  report(4, "lens closed forms", lens_closed_forms);

  std::vector<Reflector> level4;
  std::vector<Reflector> lenses;
  report(5, "directrix dual construction at level 4", [&] {
    auto g4 = make_shared_grid(2, 4);
    level4.push_back(build_reflector(oracle::constant(2, 4, 2.0), 4));
    level4.push_back(build_reflector(oracle::lens(2, 4), 4));
    level4.push_back(build_reflector(perpendicular_axes(4), 4));
    std::mt19937_64 rng(55);
    for (int k = 0; k < 5; ++k) level4.push_back(build_reflector(oracle::random_family(g4, rng), 4));
    std::vector<const Reflector*> rs;
    for (const auto& R : level4) rs.push_back(&R);
    return dual_construction(rs);
  });

  report(6, "optical verification", [&] {
    lenses.push_back(build_reflector(oracle::lens(2, 3), 3));
    return optics(lenses.front());
  });
  report(7, "smoothness probes on the lens, levels 3 to 5", [&] {
    if (lenses.empty()) lenses.push_back(build_reflector(oracle::lens(2, 3), 3));
    lenses.push_back(build_reflector(oracle::lens(2, 4), 4));
    lenses.push_back(build_reflector(oracle::lens(2, 5), 5));
    return smoothness({&lenses[0], &lenses[1], &lenses[2]});
  });
  report(8, "perpendicular axes leave their span", perpendicular_counterexample);
  report(9, "refined subadditivity", [&] {
    std::vector<Reflector> own;
    own.push_back(build_reflector(oracle::lens(2, 3), 3));
    own.push_back(build_reflector(perpendicular_axes(3), 3));
    for (int k = 0; k < 6; ++k) own.push_back(build_reflector(data.fields[k], 3));
    std::vector<const Reflector*> rs;
    for (const auto& R : own) rs.push_back(&R);
    return refined(rs);
  });
  report(10, "report determinism", determinism);

  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
