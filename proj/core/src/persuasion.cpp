#include "polrhet/persuasion.hpp"

#include <cmath>

#include "polrhet/errors.hpp"

namespace polrhet::persuasion {

double persuasion_rate(const PersuasionInputs& inputs) {
  auto check_share = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw DomainError(std::string(name) + " must lie in [0, 1]");
  };
  check_share(inputs.y_control, "y_control");
  check_share(inputs.e_treat, "e_treat");
  check_share(inputs.e_control, "e_control");
  if (!(inputs.receptive > 0.0 && inputs.receptive <= 1.0))
    throw DomainError("receptive share must lie in (0, 1]");
  if (!std::isfinite(inputs.effect)) throw DomainError("effect must be finite");

  double y0 = inputs.y0 < 0.0 ? inputs.y_control : inputs.y0;
  check_share(y0, "y0");
  if (y0 >= 1.0) throw DomainError("baseline share y0 must be below 1");

  double exposure_gain = inputs.receptive * inputs.e_treat - inputs.e_control;
  if (exposure_gain <= 0.0)
    throw DomainError("effective exposure gain receptive*e_treat - e_control must be positive");

  return std::abs(inputs.effect) * inputs.y_control / exposure_gain / (1.0 - y0);
}

std::vector<std::pair<double, double>> persuasion_sweep(const PersuasionInputs& inputs,
                                                        std::span<const double> receptive_grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(receptive_grid.size());
  for (double r : receptive_grid) {
    PersuasionInputs point = inputs;
    point.receptive = r;
    out.emplace_back(r, persuasion_rate(point));
  }
  return out;
}

}  // namespace polrhet::persuasion
