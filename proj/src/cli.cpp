#include "reflector/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "reflector/directrix.hpp"
#include "reflector/io.hpp"
#include "reflector/optics.hpp"
#include "reflector/properties.hpp"
#include "reflector/validity.hpp"

namespace refl::cli {

namespace {

using io::format_double;
using io::JsonWriter;
namespace fs = std::filesystem;

struct Context {
  const JobSpec& spec;
  io::Ingested in;
  std::ostream& out;
};

void write(const JobSpec& spec, const std::string& name, const std::string& content) {
  io::write_atomic(spec.output / name, content);
}

void header(JsonWriter& w, const JobSpec& spec, const FocalField& p) {
  w.field("command", command_name(spec.command))
      .field("dim", p.dim())
      .field("level", spec.level)
      .field("tol", spec.tol)
      .field("seed", static_cast<long long>(spec.seed));
}

std::string csv_vec(const Vec3& v, int dim) {
  std::string s = format_double(v.x()) + "," + format_double(v.y());
  if (dim == 2) s += "," + format_double(v.z());
  return s;
}

std::string csv_axes(const char* name, int dim) {
  std::string s = std::string(name) + "_x," + name + "_y";
  if (dim == 2) s += std::string(",") + name + "_z";
  return s;
}

// Surface mesh (n = 2) or polar polyline with a drawing (n = 1).
void write_shape(const JobSpec& spec, const std::string& stem, const std::vector<Vec3>& pts, const SphereGrid& g) {
  if (g.dim() == 2) {
    write(spec, stem + ".obj", io::obj_mesh(pts, g));
  } else {
    write(spec, stem + ".csv", io::polar_csv(pts));
    write(spec, stem + ".svg", io::polyline_svg(pts));
  }
}

int build(Context& c) {
  const FocalField& p = c.in.field;
  const Reflector R = build_reflector(p, c.spec.level);
  const SphereGrid& g = R.grid();
  const auto rho = R.radial().values;
  const auto h = R.support();
  std::vector<Vec3> surface(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) surface[i] = rho[i] * g[i];

  JsonWriter w;
  w.begin_object();
  header(w, c.spec, p);
  w.key("grid").begin_object().field("points", g.size()).field("resolution", g.resolution()).end_object();
  w.field("members", R.family().size()).field("max_snap_angle", c.in.max_snap_angle);
  w.key("rho").begin_object()
      .field("min", *std::min_element(rho.begin(), rho.end()))
      .field("max", *std::max_element(rho.begin(), rho.end()))
      .end_object();
  w.key("h").begin_object()
      .field("min", *std::min_element(h.begin(), h.end()))
      .field("max", *std::max_element(h.begin(), h.end()))
      .end_object();
  w.field("diameter", R.diameter()).field("skeleton_points", R.skeleton().size());
  w.end_object();

  write(c.spec, "summary.json", w.str());
  write_shape(c.spec, "reflector", surface, g);
  write(c.spec, "focal.json", io::field_to_json(p));
  c.out << "built reflector: " << R.family().size() << " members, diameter " << format_double(R.diameter()) << "\n";
  return kExitOk;
}

int closure_job(Context& c) {
  const FocalField& p = c.in.field;
  const FocalField q = closure(p, c.spec.level);
  const int dim = p.dim();
  std::string csv = csv_axes("axis", dim) + ",p,closure,relative_gap\n";
  for (std::size_t i = 0; i < p.grid().size(); ++i) {
    const double gap = std::isfinite(p[i]) ? (p[i] - q[i]) / p[i] : kInf;
    csv += csv_vec(p.grid()[i], dim) + "," + format_double(p[i]) + "," + format_double(q[i]) + "," +
           format_double(gap) + "\n";
  }
  write(c.spec, "closure.json", io::field_to_json(q));
  write(c.spec, "gaps.csv", csv);
  c.out << "closure written for " << p.grid().size() << " directions\n";
  return kExitOk;
}

int check(Context& c) {
  const FocalField& p = c.in.field;
  const ValidityVerdict v = is_focal_function(p, c.spec.tol);
  JsonWriter w;
  w.begin_object();
  header(w, c.spec, p);
  w.field("valid", v.valid).field("max_relative_gap", v.max_relative_gap).key("witness");
  if (v.witness) {
    w.begin_object()
        .key("axis").value(v.witness->y.vec(), p.dim())
        .field("p", v.witness->p)
        .field("closure", v.witness->closure)
        .end_object();
  } else {
    w.value(nullptr);
  }
  w.end_object();
  write(c.spec, "verdict.json", w.str());
  c.out << (v.valid ? "valid" : "invalid") << " (max relative gap " << format_double(v.max_relative_gap) << ")\n";
  return kExitOk;
}

int directrix(Context& c) {
  const FocalField& p = c.in.field;
  const Reflector R = build_reflector(p, c.spec.level);
  const SphereGrid& g = R.grid();
  const DirectrixSurface D = directrix_from_support(R, R.grid_ptr());
  const double hd = hausdorff_distance(directrix_map_cloud(R), D.points);
  const double bound = 5.0 * g.resolution() * R.diameter();
  const int dim = p.dim();

  std::string csv = csv_axes("y", dim) + ",H,p,residual\n";
  double identity = 0.0;
  for (const SupportCheck& s : D.support_check) {
    identity = std::max(identity, std::abs(s.H - s.p));
    csv += csv_vec(s.y.vec(), dim) + "," + format_double(s.H) + "," + format_double(s.p) + "," +
           format_double(s.H - s.p) + "\n";
  }

  JsonWriter w;
  w.begin_object();
  header(w, c.spec, p);
  w.field("hausdorff", hd)
      .field("bound", bound)
      .field("support_identity_max", identity)
      .field("pedal_residual", pedal_residual(R, D))
      .field("convexity_violation", convexity_violation(R, D))
      .end_object();
  write(c.spec, "directrix.json", w.str());
  write(c.spec, "support_identity.csv", csv);
  write_shape(c.spec, "directrix", D.points, g);
  c.out << "directrix: Hausdorff " << format_double(hd) << " (bound " << format_double(bound) << ")\n";
  return kExitOk;
}

int trace_job(Context& c) {
  const FocalField& p = c.in.field;
  const Reflector R = build_reflector(p, c.spec.level);
  const SphereGrid& g = R.grid();
  const int dim = p.dim();
  std::string csv = csv_axes("x", dim) + "," + csv_axes("hit", dim) + "," + csv_axes("normal", dim) + "," +
                    csv_axes("outgoing", dim) + ",max_deviation\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const ReflectionRecord rec = trace(R, g.point(i));
    worst = std::max(worst, rec.max_deviation);
    for (std::size_t k = 0; k < rec.normals.size(); ++k) {
      csv += csv_vec(rec.x.vec(), dim) + "," + csv_vec(rec.hit, dim) + "," + csv_vec(rec.normals[k].vec(), dim) +
             "," + csv_vec(rec.outgoing[k].vec(), dim) + "," + format_double(rec.max_deviation) + "\n";
    }
  }
  write(c.spec, "trace.csv", csv);
  c.out << "traced " << g.size() << " directions, max deviation " << format_double(worst) << "\n";
  return kExitOk;
}

int report(Context& c) {
  const FocalField& p = c.in.field;
  SuiteOptions opt;
  opt.level = c.spec.level;
  opt.tol = c.spec.tol;
  opt.seed = c.spec.seed;
  const auto results = run_property_suite(p, opt);
  const auto passed = std::count_if(results.begin(), results.end(), [](const PropertyResult& r) { return r.passed; });

  JsonWriter w;
  w.begin_object();
  header(w, c.spec, p);
  w.field("members", p.finite_count()).key("properties").begin_array();
  for (const auto& r : results) {
    w.begin_object()
        .field("name", r.name)
        .field("passed", r.passed)
        .field("value", r.value)
        .field("threshold", r.threshold)
        .end_object();
  }
  w.end_array();
  w.field("passed", static_cast<long long>(passed)).field("total", results.size());
  w.end_object();
  write(c.spec, "report.json", w.str());
  c.out << passed << "/" << results.size() << " properties passed (seed " << c.spec.seed << ")\n";
  return kExitOk;
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::Build, Command::Closure, Command::Check, Command::Directrix, Command::Trace,
                    Command::Report}) {
    if (name == command_name(c)) return c;
  }
  return std::nullopt;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Build: return "build";
    case Command::Closure: return "closure";
    case Command::Check: return "check";
    case Command::Directrix: return "directrix";
    case Command::Trace: return "trace";
    case Command::Report: return "report";
  }
  return "?";
}

int run(const JobSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.level < 0) throw io::SchemaError(0, "--level", "level must be >= 0");
    if (!(spec.tol > 0.0)) throw io::SchemaError(0, "--tol", "tol must be > 0");
    if (spec.dim && *spec.dim != 1 && *spec.dim != 2) throw io::SchemaError(0, "--dim", "dim must be 1 or 2");

    const io::FieldSpec fs = io::read_field_spec(spec.input);
    if (spec.dim && *spec.dim != fs.dim) {
      throw io::SchemaError(fs.dim_line, "/dim", "input has dim " + std::to_string(fs.dim) + " but --dim " +
                                           std::to_string(*spec.dim) + " was requested");
    }
    if (spec.level > (fs.dim == 1 ? 24 : 8)) throw io::SchemaError(0, "--level", "level too large for this dimension");
    Context c{spec, io::ingest(fs, spec.level), out};
    std::error_code ec;
    fs::create_directories(spec.output, ec);
    if (ec) {
      err << "error: cannot create output directory " << spec.output << ": " << ec.message() << "\n";
      return kExitSchema;
    }

    switch (spec.command) {
      case Command::Build: return build(c);
      case Command::Closure: return closure_job(c);
      case Command::Check: return check(c);
      case Command::Directrix: return directrix(c);
      case Command::Trace: return trace_job(c);
      case Command::Report: return report(c);
    }
    return kExitOk;
  } catch (const io::SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const Error& e) {
    err << "error: " << error_name(e.kind()) << "\n" << e.what() << "\n";
    return kExitMath;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSchema;
  }
}

}  // namespace refl::cli
