#include "torsionlab/scene.hpp"

namespace torsionlab {

Pattern pattern_from_string(const std::string& s, const std::string& pointer) {
  if (s == "12") return Pattern::Alternating12;
  if (s == "21") return Pattern::Alternating21;
  throw SchemaError(pointer, "pattern must be \"12\" or \"21\"");
}

std::string pattern_label(Pattern p) { return p == Pattern::Alternating12 ? "12" : "21"; }

Scene scene_from_json(const Json& j, const std::string& source) {
  if (!j.is_object()) throw SchemaError("", "scene must be an object");
  Scene s;
  s.source = source;
  s.raw = j;
  int kinds = int(j.contains("moment")) + int(j.contains("planar_power")) + int(j.contains("curve")) +
              int(j.contains("pi1"));
  if (kinds != 1) throw SchemaError("", "scene needs exactly one of \"moment\", \"planar_power\", \"curve\", \"pi1\"");
  if (j.contains("moment")) {
    auto d = int_from_json(j["moment"], "/moment");
    if (d < 1 || d > 8) throw SchemaError("/moment", "moment curve dimension must lie in 1..8");
    s.pair = moment_curve(static_cast<unsigned>(d));
  } else if (j.contains("planar_power")) {
    auto k = int_from_json(j["planar_power"], "/planar_power");
    if (k < 1 || k > 32) throw SchemaError("/planar_power", "power must lie in 1..32");
    s.pair = planar_power(static_cast<unsigned>(k));
  } else if (j.contains("curve")) {
    const auto& c = j["curve"];
    if (!c.is_array() || c.empty()) throw SchemaError("/curve", "expected a nonempty array of polynomials in t");
    std::vector<RatPoly> gamma;
    for (std::size_t i = 0; i < c.size(); ++i) gamma.push_back(poly_from_json(c[i], {"t"}, child("/curve", i)));
    s.pair = curve_pair(gamma, "curve");
  } else {
    const auto& p1 = require(j, "pi1", "");
    const auto& p2 = require(j, "pi2", "");
    if (!p1.is_array() || p1.empty()) throw SchemaError("/pi1", "expected a nonempty array of polynomials");
    if (!p2.is_array() || p2.size() != p1.size()) throw SchemaError("/pi2", "expected an array as long as pi1");
    std::vector<std::string> names;
    if (j.contains("vars")) {
      const auto& v = j["vars"];
      if (!v.is_array()) throw SchemaError("/vars", "expected an array of names");
      for (std::size_t i = 0; i < v.size(); ++i) names.push_back(string_from_json(v[i], child("/vars", i)));
      if (names.size() != p1.size() + 1)
        throw SchemaError("/vars", "need " + std::to_string(p1.size() + 1) + " variable names");
    } else {
      names = default_names(p1.size() + 1);
    }
    for (std::size_t i = 0; i < p1.size(); ++i) {
      s.pair.pi1.comps.push_back(poly_from_json(p1[i], names, child("/pi1", i)));
      s.pair.pi2.comps.push_back(poly_from_json(p2[i], names, child("/pi2", i)));
    }
    s.pair.name = "custom";
    s.names = names;
  }
  const std::size_t n = s.pair.dim();
  if (s.names.empty()) {
    if (j.contains("curve") || j.contains("moment")) {
      s.names = default_names(n - 1);
      s.names.push_back("t");
    } else {
      s.names = default_names(n);
    }
  }
  if (j.contains("name")) s.name = string_from_json(j["name"], "/name");
  if (s.name.empty()) s.name = s.pair.name;
  s.cap = j.contains("cap") ? static_cast<int>(int_from_json(j["cap"], "/cap")) : static_cast<int>(2 * n);
  if (s.cap < 1 || s.cap > 24) throw SchemaError("/cap", "word length budget must lie in 1..24");
  if (j.contains("beta")) {
    const auto& b = j["beta"];
    if (!b.is_array() || b.size() != n) throw SchemaError("/beta", "beta needs " + std::to_string(n) + " entries");
    std::vector<unsigned> beta;
    for (std::size_t i = 0; i < b.size(); ++i) {
      auto v = int_from_json(b[i], child("/beta", i));
      if (v < 0) throw SchemaError(child("/beta", i), "beta entries must be nonnegative");
      beta.push_back(static_cast<unsigned>(v));
    }
    s.beta = beta;
  }
  if (j.contains("pattern")) s.pattern = pattern_from_string(string_from_json(j["pattern"], "/pattern"), "/pattern");
  if (j.contains("point")) {
    auto p = rats_from_json(j["point"], "/point");
    if (p.size() != n) throw SchemaError("/point", "point needs " + std::to_string(n) + " coordinates");
    s.point = p;
  }
  try {
    s.pair.pi1.validate();
    s.pair.pi2.validate();
  } catch (const ValidationError& e) {
    throw SchemaError("/pi1", e.what());
  }
  return s;
}

Scene load_scene(const std::string& path) { return scene_from_json(read_json_file(path), path); }

}  // namespace torsionlab
