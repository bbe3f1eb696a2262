#pragma once

#include <span>
#include <vector>

namespace polrhet::persuasion {

// Back-of-envelope conversion from a reduced-form exposure effect to the rate
// at which exposed-and-receptive people change behavior.
//
//   f = |effect| * y_control / (receptive * e_treat - e_control) / (1 - y0)
//
// where `effect` is the estimated change in the outcome (as a fraction of the
// control mean y_control) produced by moving exposure from e_control to
// e_treat, `receptive` is the share of the treated audience actually open to
// the message, and y0 is the pre-existing behavior share (defaults to
// y_control when NaN).

struct PersuasionInputs {
  double effect = 0;       // relative outcome change at observed exposure
  double y_control = 0;    // outcome share among the unexposed, in [0, 1]
  double e_treat = 0;      // exposure share among the treated, in [0, 1]
  double e_control = 0;    // exposure share among the controls, in [0, 1]
  double receptive = 1.0;  // receptive share r, in (0, 1]
  double y0 = -1.0;        // prior behavior share; negative means "use y_control"
};

// Throws DomainError when shares leave [0, 1], receptive leaves (0, 1],
// effective exposure receptive * e_treat - e_control is not positive, or the
// baseline share reaches 1.
double persuasion_rate(const PersuasionInputs& inputs);

// The same rate across a grid of receptive shares; each entry is (r, f).
std::vector<std::pair<double, double>> persuasion_sweep(const PersuasionInputs& inputs,
                                                        std::span<const double> receptive_grid);

}  // namespace polrhet::persuasion
