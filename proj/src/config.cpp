#include "pauli/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "pauli/errors.hpp"
#include "pauli/io.hpp"

namespace pauli {

namespace {

using nlohmann::json;
constexpr const char* kModule = "config";

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::ConfigError, kModule, "field '" + path + "': " + msg);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& j, const std::string& path, const std::string& key, std::optional<double> dflt = {}) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    fail(join(path, key), "missing");
  }
  const json& v = j.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(join(path, key), "not finite");
  return x;
}

int integer(const json& j, const std::string& path, const std::string& key, int dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<int>();
}

Point point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) fail(path, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Point center(const json& j, const std::string& path) {
  return j.contains("center") ? point(j.at("center"), join(path, "center")) : Point{};
}

DomainSpec parse_domain(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) fail(join(path, "type"), "missing string");
  const std::string t = j.at("type").get<std::string>();
  try {
    if (t == "disk") {
      only_keys(j, path, {"type", "radius", "center"});
      return DomainSpec::disk(number(j, path, "radius"), center(j, path));
    }
    if (t == "ellipse") {
      only_keys(j, path, {"type", "a", "b", "center"});
      return DomainSpec::ellipse(number(j, path, "a"), number(j, path, "b"), center(j, path));
    }
    if (t == "rectangle") {
      only_keys(j, path, {"type", "a", "b", "center"});
      return DomainSpec::rectangle(number(j, path, "a"), number(j, path, "b"), center(j, path));
    }
    if (t == "triangle") {
      only_keys(j, path, {"type", "height", "center"});
      return DomainSpec::equilateral_triangle(number(j, path, "height"), center(j, path));
    }
    if (t == "polygon") {
      only_keys(j, path, {"type", "vertices"});
      const std::string vp = join(path, "vertices");
      if (!j.contains("vertices") || !j.at("vertices").is_array()) fail(vp, "expected a list of [x, y]");
      std::vector<Point> v;
      for (std::size_t k = 0; k < j.at("vertices").size(); ++k) {
        v.push_back(point(j.at("vertices")[k], vp + "[" + std::to_string(k) + "]"));
      }
      return DomainSpec::polygon(std::move(v));
    }
    if (t == "dumbbell") {
      only_keys(j, path, {"type", "radius", "half_separation", "neck_width"});
      return DomainSpec::dumbbell(number(j, path, "radius"), number(j, path, "half_separation"),
                                  number(j, path, "neck_width"));
    }
    if (t == "union") {
      only_keys(j, path, {"type", "members"});
      const std::string mp = join(path, "members");
      if (!j.contains("members") || !j.at("members").is_array()) fail(mp, "expected a list of domains");
      std::vector<DomainSpec> m;
      for (std::size_t k = 0; k < j.at("members").size(); ++k) {
        m.push_back(parse_domain(j.at("members")[k], mp + "[" + std::to_string(k) + "]"));
      }
      return DomainSpec::union_of(std::move(m));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    fail(path, e.what());
  }
  fail(join(path, "type"), "unknown domain type '" + t + "'");
}

FieldSpec parse_field(const json& j, const std::string& path) {
  FieldSpec f;
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) fail(join(path, "type"), "missing string");
  f.type = j.at("type").get<std::string>();
  if (f.type == "constant") {
    only_keys(j, path, {"type", "value"});
  } else if (f.type == "gaussian") {
    only_keys(j, path, {"type", "value", "k"});
    f.k = number(j, path, "k");
  } else if (f.type == "affine") {
    only_keys(j, path, {"type", "value", "gx", "gy"});
    f.gx = number(j, path, "gx", 0.0);
    f.gy = number(j, path, "gy", 0.0);
  } else {
    fail(join(path, "type"), "unknown field type '" + f.type + "'");
  }
  f.value = number(j, path, "value");
  return f;
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) fail(path + "[" + std::to_string(k) + "]", "expected a number");
    out.push_back(j[k].get<double>());
  }
  return out;
}

}  // namespace

MagneticField FieldSpec::make() const {
  if (type == "constant") return MagneticField::constant(value);
  const double v = value, kk = k, a = gx, b = gy;
  if (type == "gaussian") {
    return MagneticField::formula([v, kk](Point p) { return v * std::exp(-kk * (p.x * p.x + p.y * p.y)); }, describe());
  }
  if (type == "affine") return MagneticField::formula([v, a, b](Point p) { return v + a * p.x + b * p.y; }, describe());
  throw Error(ErrorKind::ConfigError, kModule, "unknown field type '" + type + "'");
}

std::string FieldSpec::describe() const {
  if (type == "constant") return "constant " + fmt17(value);
  if (type == "gaussian") return fmt17(value) + " exp(-" + fmt17(k) + " |x|^2)";
  return fmt17(value) + " + " + fmt17(gx) + " x + " + fmt17(gy) + " y";
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character
    const std::size_t at = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    int line = 1, col = 1;
    for (std::size_t k = 0; k < at; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto p = msg.find("syntax error");
    if (p != std::string::npos) msg = msg.substr(p);
    throw Error(ErrorKind::ConfigError, kModule,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
  only_keys(j, "", {"name", "domain", "field", "spacing", "h_list", "formulations", "output_dir", "disk", "tolerance",
                    "contours", "psi_tolerance"});
  RunConfig c;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) fail("name", "expected a string");
    c.name = j.at("name").get<std::string>();
  }
  if (!j.contains("domain")) fail("domain", "missing");
  c.domain = parse_domain(j.at("domain"), "domain");
  if (j.contains("field")) c.field = parse_field(j.at("field"), "field");
  c.spacing = number(j, "", "spacing", c.spacing);
  if (j.contains("h_list")) c.h_list = number_list(j.at("h_list"), "h_list");
  if (j.contains("formulations")) {
    const json& f = j.at("formulations");
    if (!f.is_array()) fail("formulations", "expected a list of names");
    c.formulations.clear();
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::string p = "formulations[" + std::to_string(k) + "]";
      if (!f[k].is_string()) fail(p, "expected a string");
      try {
        c.formulations.push_back(formulation_from_string(f[k].get<std::string>()));
      } catch (const Error& e) {
        fail(p, e.what());
      }
    }
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) fail("output_dir", "expected a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("disk")) {
    only_keys(j.at("disk"), "disk", {"m_max", "k_max"});
    c.m_max = integer(j.at("disk"), "disk", "m_max", c.m_max);
    c.k_max = integer(j.at("disk"), "disk", "k_max", c.k_max);
  }
  c.tolerance = number(j, "", "tolerance", c.tolerance);
  c.psi_tolerance = number(j, "", "psi_tolerance", c.psi_tolerance);
  if (j.contains("contours")) {
    const json& ct = j.at("contours");
    if (ct.is_number_integer()) {
      c.contour_count = ct.get<int>();
    } else if (ct.is_array()) {
      c.contour_levels = number_list(ct, "contours");
    } else {
      fail("contours", "expected a level count or a list of levels");
    }
  }
  c.hash = fnv1a_hex(text);
  validate_config(c, false);
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path), path); }

void validate_config(const RunConfig& c, bool check_output_dir) {
  if (!(c.spacing > 0)) fail("spacing", "must be positive");
  if (c.h_list.empty()) fail("h_list", "must not be empty");
  for (std::size_t k = 0; k < c.h_list.size(); ++k) {
    if (!(c.h_list[k] > 0) || !std::isfinite(c.h_list[k])) fail("h_list[" + std::to_string(k) + "]", "must be positive");
  }
  if (c.formulations.empty()) fail("formulations", "must not be empty");
  if (c.m_max < 0) fail("disk.m_max", "must be non-negative");
  if (c.k_max < 0) fail("disk.k_max", "must be non-negative");
  if (!(c.tolerance > 0)) fail("tolerance", "must be positive");
  if (!(c.psi_tolerance >= 0)) fail("psi_tolerance", "must be non-negative");
  if (c.contour_levels.empty() && c.contour_count < 1) fail("contours", "need at least one level");
  if (check_output_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    const fs::path probe = fs::path(c.output_dir) / ".write_probe";
    std::ofstream f(probe);
    if (ec || !f) fail("output_dir", "'" + c.output_dir + "' is not writable");
    f.close();
    fs::remove(probe, ec);
  }
}

}  // namespace pauli
