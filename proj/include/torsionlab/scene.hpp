#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torsionlab/catalog.hpp"
#include "torsionlab/json_io.hpp"
#include "torsionlab/torsion.hpp"

namespace torsionlab {

// A projection pair with optional experiment settings. Geometry is one of
//   "moment": d, "planar_power": k, "curve": ["t", "t^2"],
//   "pi1": [...], "pi2": [...] with optional "vars".
// Sections such as "ball" or "verify" are kept in `raw` for the commands that
// read them.
struct Scene {
  std::string source;
  std::string name;
  ProjectionPair pair;
  std::vector<std::string> names;  // variable names, x1..xn by default
  int cap = 0;                     // word length budget, default 2n
  std::optional<std::vector<unsigned>> beta;
  Pattern pattern = Pattern::Alternating12;
  std::optional<std::vector<Rat>> point;
  Json raw;

  std::size_t dim() const { return pair.dim(); }
};

Scene scene_from_json(const Json& j, const std::string& source);
Scene load_scene(const std::string& path);

Pattern pattern_from_string(const std::string& s, const std::string& pointer);
std::string pattern_label(Pattern p);

}  // namespace torsionlab
