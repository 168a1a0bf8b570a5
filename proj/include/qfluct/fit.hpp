#pragma once

#include <vector>

namespace qfluct {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms_residual = 0.0;
  int points = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs two distinct x.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

/// y = amplitude * x^exponent fitted on logs; points with x <= 0 or y <= 0
/// are skipped. rms_residual is in log units.
struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double rms_residual = 0.0;
  int points = 0;
};

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qfluct
