#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reflector/reflector.hpp"

namespace refl::io {

/// Input that does not match the focal-field schema. what() carries line and field
/// (line 0 when the problem is not tied to a line of the input).
class SchemaError : public std::runtime_error {
 public:
  SchemaError(int line, std::string field, const std::string& msg);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// {"dim": 1|2, "entries": [{"axis": [..], "p": number}], "default": "inf" | number}
struct FieldSpec {
  int dim = 2;
  std::vector<Vec3> axes;  // normalized
  std::vector<double> params;
  std::vector<int> lines;  // source line of each entry
  double default_value = kInf;
  int dim_line = 1;
};

FieldSpec parse_field_spec(std::string_view text);
FieldSpec read_field_spec(const std::filesystem::path& path);

struct Ingested {
  FocalField field;
  double max_snap_angle;  // largest angle between an entry axis and its grid direction
};

/// Places the entries on make_grid(dim, level): each axis goes to its nearest grid direction,
/// unlisted directions get the default. Two entries on one direction are a schema error.
Ingested ingest(const FieldSpec& spec, int level);

/// Finite entries of a field in the input schema (default "inf").
std::string field_to_json(const FocalField& p);

/// 17 significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_double(double v);

/// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string obj_mesh(const std::vector<Vec3>& vertices, const SphereGrid& grid);
/// angle,rho per circle direction.
std::string polar_csv(const std::vector<Vec3>& points);
std::string polyline_svg(const std::vector<Vec3>& points);

/// Minimal JSON emitter with fixed float formatting. Keys are written in call order.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double v);
  JsonWriter& value(long long v);
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(std::size_t v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& value(const Vec3& v, int dim);
  JsonWriter& value(std::nullptr_t);
  template <class T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }
  std::string str() const { return out_ + "\n"; }

 private:
  void separate();
  JsonWriter& close(char bracket);
  std::string out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

}  // namespace refl::io
