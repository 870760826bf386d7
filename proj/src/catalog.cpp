#include "torsionlab/catalog.hpp"

#include "torsionlab/errors.hpp"

namespace torsionlab {

ProjectionPair curve_pair(const std::vector<RatPoly>& gamma, std::string name) {
  const std::size_t d = gamma.size();
  if (d == 0) throw ValidationError("curve needs at least one component");
  const std::size_t n = d + 1;
  ProjectionPair pair;
  pair.name = std::move(name);
  std::vector<RatPoly> tmap{RatPoly::variable(n, d)};
  for (std::size_t i = 0; i < d; ++i) {
    if (gamma[i].nvars() != 1) throw DimensionMismatch("curve components must be univariate");
    pair.pi1.comps.push_back(RatPoly::variable(n, i));
    pair.pi2.comps.push_back(RatPoly::variable(n, i) - gamma[i].compose(tmap));
  }
  return pair;
}

ProjectionPair moment_curve(unsigned d) {
  std::vector<RatPoly> gamma;
  for (unsigned i = 1; i <= d; ++i) gamma.push_back(RatPoly::monomial({i}, 1));
  return curve_pair(gamma, "moment" + std::to_string(d));
}

ProjectionPair planar_power(unsigned k) {
  ProjectionPair pair;
  pair.name = "planar" + std::to_string(k);
  pair.pi1.comps.push_back(RatPoly::variable(2, 0));
  pair.pi2.comps.push_back(RatPoly::variable(2, 1).pow(k));
  return pair;
}

std::vector<RatPoly> parse_curve(const std::vector<std::string>& components) {
  std::vector<RatPoly> out;
  for (const auto& c : components) out.push_back(RatPoly::parse(c, std::vector<std::string>{"t"}));
  return out;
}

}  // namespace torsionlab
