#include "reflector/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <unistd.h>

namespace refl::io {

using nlohmann::json;

SchemaError::SchemaError(int line, std::string field, const std::string& msg)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + (field.empty() ? "" : ", ") : "") +
                         (field.empty() ? "" : "field " + field) + (line > 0 || !field.empty() ? ": " : "") + msg),
      line_(line),
      field_(std::move(field)) {}

namespace {

// Input iterator that publishes how many characters the lexer has consumed.
struct CountingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p;
  std::size_t* consumed;

  reference operator*() const { return *p; }
  CountingIterator& operator++() {
    ++p;
    ++*consumed;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const CountingIterator& o) const { return p == o.p; }
  bool operator!=(const CountingIterator& o) const { return p != o.p; }
};

int line_at(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Records the source line of every value, keyed by JSON pointer.
class LineRecorder : public nlohmann::json_sax<json> {
 public:
  LineRecorder(std::string_view text, const std::size_t& consumed) : text_(text), consumed_(consumed) {}

  std::map<std::string, int> lines;
  int error_line = 0;
  std::string error;

  bool null() override { return scalar(); }
  bool boolean(bool) override { return scalar(); }
  bool number_integer(number_integer_t) override { return scalar(); }
  bool number_unsigned(number_unsigned_t) override { return scalar(); }
  bool number_float(number_float_t, const string_t&) override { return scalar(); }
  bool string(string_t&) override { return scalar(); }
  bool binary(binary_t&) override { return scalar(); }
  bool start_object(std::size_t) override { return open(false); }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_array() override { return close(); }
  bool key(string_t& k) override {
    stack_.back().key = k;
    lines[stack_.back().path + "/" + escape(k)] = line();
    return true;
  }
  bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) override {
    error_line = line_at(text_, position == 0 ? 0 : position - 1);
    error = ex.what();
    return false;
  }

 private:
  struct Frame {
    bool array;
    std::size_t index;
    std::string key;
    std::string path;
  };

  static std::string escape(const std::string& k) {
    std::string out;
    for (char c : k) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }

  int line() const {
    // The lexer may have read one delimiter past the token.
    std::size_t pos = consumed_ == 0 ? 0 : consumed_ - 1;
    while (pos > 0 && std::string_view(" \t\r\n,]}:").find(text_[pos]) != std::string_view::npos) --pos;
    return line_at(text_, pos);
  }

  std::string next_path() {
    if (stack_.empty()) return "";
    Frame& top = stack_.back();
    if (top.array) return top.path + "/" + std::to_string(top.index++);
    return top.path + "/" + escape(top.key);
  }

  bool scalar() {
    const std::string path = next_path();
    lines.emplace(path, line());
    return true;
  }
  bool open(bool array) {
    const std::string path = next_path();
    lines[path] = line();
    stack_.push_back({array, 0, "", path});
    return true;
  }
  bool close() {
    stack_.pop_back();
    return true;
  }

  std::string_view text_;
  const std::size_t& consumed_;
  std::vector<Frame> stack_;
};

class Validator {
 public:
  explicit Validator(const std::map<std::string, int>& lines) : lines_(lines) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    std::string p = path;
    while (true) {
      if (auto it = lines_.find(p); it != lines_.end()) throw SchemaError(it->second, path.empty() ? "/" : path, msg);
      if (p.empty()) break;
      p = p.substr(0, p.rfind('/'));
    }
    throw SchemaError(1, path.empty() ? "/" : path, msg);
  }

  double positive(const json& v, const std::string& path) const {
    if (v.is_string() && v.get<std::string>() == "inf") return kInf;
    if (!v.is_number()) fail(path, "expected a positive number or \"inf\"");
    const double d = v.get<double>();
    if (!(d > 0.0) || !std::isfinite(d)) fail(path, "expected a positive finite number");
    return d;
  }

 private:
  const std::map<std::string, int>& lines_;
};

}  // namespace

FieldSpec parse_field_spec(std::string_view text) {
  std::size_t consumed = 0;
  LineRecorder rec(text, consumed);
  CountingIterator first{text.data(), &consumed};
  CountingIterator last{text.data() + text.size(), &consumed};
  if (!json::sax_parse(first, last, &rec)) throw SchemaError(rec.error_line, "", rec.error);

  const json doc = json::parse(text);
  const Validator v(rec.lines);
  if (!doc.is_object()) v.fail("", "expected a JSON object");
  for (const auto& [k, _] : doc.items()) {
    if (k != "dim" && k != "entries" && k != "default") v.fail("/" + k, "unknown field");
  }

  FieldSpec spec;
  if (!doc.contains("dim")) v.fail("", "missing field \"dim\"");
  const json& dim = doc["dim"];
  if (!dim.is_number_integer() || (dim.get<long long>() != 1 && dim.get<long long>() != 2)) {
    v.fail("/dim", "expected 1 or 2");
  }
  spec.dim = static_cast<int>(dim.get<long long>());
  if (auto it = rec.lines.find("/dim"); it != rec.lines.end()) spec.dim_line = it->second;

  if (doc.contains("default")) spec.default_value = v.positive(doc["default"], "/default");

  if (!doc.contains("entries")) v.fail("", "missing field \"entries\"");
  const json& entries = doc["entries"];
  if (!entries.is_array()) v.fail("/entries", "expected an array");
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string base = "/entries/" + std::to_string(k);
    const json& e = entries[k];
    if (!e.is_object()) v.fail(base, "expected an object with \"axis\" and \"p\"");
    for (const auto& [key, _] : e.items()) {
      if (key != "axis" && key != "p") v.fail(base + "/" + key, "unknown field");
    }
    if (!e.contains("axis")) v.fail(base, "missing field \"axis\"");
    if (!e.contains("p")) v.fail(base, "missing field \"p\"");
    const json& axis = e["axis"];
    const std::size_t want = static_cast<std::size_t>(spec.dim) + 1;
    if (!axis.is_array() || axis.size() != want) {
      v.fail(base + "/axis", "expected an array of " + std::to_string(want) + " numbers");
    }
    Vec3 a = Vec3::Zero();
    for (std::size_t c = 0; c < want; ++c) {
      if (!axis[c].is_number()) v.fail(base + "/axis/" + std::to_string(c), "expected a number");
      a[static_cast<Eigen::Index>(c)] = axis[c].get<double>();
    }
    const double n = a.norm();
    if (!(n > 0.0) || !std::isfinite(n)) v.fail(base + "/axis", "axis must be a nonzero finite vector");
    spec.axes.push_back(a / n);
    spec.params.push_back(v.positive(e["p"], base + "/p"));
    auto it = rec.lines.find(base);
    spec.lines.push_back(it == rec.lines.end() ? 1 : it->second);
  }
  return spec;
}

FieldSpec read_field_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(0, "", "cannot open input file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_field_spec(ss.str());
}

Ingested ingest(const FieldSpec& spec, int level) {
  GridPtr grid = make_shared_grid(spec.dim, level);
  std::vector<double> values(grid->size(), spec.default_value);
  std::vector<int> owner(grid->size(), -1);
  double snap = 0.0;
  for (std::size_t k = 0; k < spec.axes.size(); ++k) {
    const std::size_t i = grid->nearest(spec.axes[k]);
    if (owner[i] >= 0) {
      throw SchemaError(spec.lines[k], "/entries/" + std::to_string(k) + "/axis",
                        "maps to the same level-" + std::to_string(level) + " grid direction as entry " +
                            std::to_string(owner[i]));
    }
    owner[i] = static_cast<int>(k);
    values[i] = spec.params[k];
    snap = std::max(snap, geodesic_distance((*grid)[i], spec.axes[k]));
  }
  return {FocalField(std::move(grid), std::move(values)), snap};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field_to_json(const FocalField& p) {
  JsonWriter w;
  w.begin_object().field("dim", p.dim()).key("entries").begin_array();
  for (std::size_t i = 0; i < p.grid().size(); ++i) {
    if (!std::isfinite(p[i])) continue;
    w.begin_object().key("axis").value(p.grid()[i], p.dim()).field("p", p[i]).end_object();
  }
  w.end_array().field("default", "inf").end_object();
  return w.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string obj_mesh(const std::vector<Vec3>& vertices, const SphereGrid& grid) {
  std::string out;
  for (const Vec3& v : vertices) {
    out += "v " + format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z()) + "\n";
  }
  for (const auto& [a, b, c] : grid.faces()) {
    out += "f " + std::to_string(a + 1) + " " + std::to_string(b + 1) + " " + std::to_string(c + 1) + "\n";
  }
  return out;
}

std::string polar_csv(const std::vector<Vec3>& points) {
  std::string out = "angle,rho\n";
  for (const Vec3& v : points) out += format_double(std::atan2(v.y(), v.x())) + "," + format_double(v.norm()) + "\n";
  return out;
}

std::string polyline_svg(const std::vector<Vec3>& points) {
  double extent = 0.0;
  for (const Vec3& v : points) extent = std::max({extent, std::abs(v.x()), std::abs(v.y())});
  extent = extent > 0.0 ? 1.1 * extent : 1.0;
  const double scale = 200.0 / extent;
  std::string pts;
  for (const Vec3& v : points) {
    pts += format_double(200.0 + scale * v.x()) + "," + format_double(200.0 - scale * v.y()) + " ";
  }
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n"
         "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"" + pts + "\"/>\n"
         "<circle cx=\"200\" cy=\"200\" r=\"2\" fill=\"red\"/>\n</svg>\n";
}

// ---------------------------------------------------------------------------------------------

void JsonWriter::separate() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ += ",";
    first_.back() = false;
    out_ += "\n" + std::string(2 * first_.size(), ' ');
  }
}

JsonWriter& JsonWriter::begin_object() {
  separate();
  out_ += "{";
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::close(char bracket) {
  const bool empty = first_.back();
  first_.pop_back();
  if (!empty) out_ += "\n" + std::string(2 * first_.size(), ' ');
  out_ += bracket;
  return *this;
}

JsonWriter& JsonWriter::end_object() { return close('}'); }

JsonWriter& JsonWriter::begin_array() {
  separate();
  out_ += "[";
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() { return close(']'); }

JsonWriter& JsonWriter::key(std::string_view k) {
  separate();
  out_ += json(std::string(k)).dump() + ": ";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separate();
  out_ += std::isfinite(v) ? format_double(v) : "\"" + format_double(v) + "\"";
  return *this;
}

JsonWriter& JsonWriter::value(long long v) {
  separate();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separate();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
  separate();
  out_ += json(std::string(v)).dump();
  return *this;
}

JsonWriter& JsonWriter::value(std::nullptr_t) {
  separate();
  out_ += "null";
  return *this;
}

JsonWriter& JsonWriter::value(const Vec3& v, int dim) {
  separate();
  out_ += "[";
  for (int c = 0; c <= dim; ++c) out_ += (c ? ", " : "") + format_double(v[c]);
  out_ += "]";
  return *this;
}

}  // namespace refl::io
