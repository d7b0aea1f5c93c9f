#pragma once

#include <iosfwd>

#include "saddle/model.hpp"

namespace saddle {

enum class LateralClosure {
  far_field,  // Dirichlet (2/pi) atan(x/(lambda + 1/|f'(1)|)) on x = x_max and the top
  neumann     // dv/dx = 0 on x = x_max, top (2/pi) atan(x/Lambda)
};

struct LayerOptions {
  double damping = 1.0;
  int max_iter = 5000;
  LateralClosure lateral = LateralClosure::far_field;
};

double pn_closed_form(double x, double lambda);
double layer_far_field(double x, double lambda, double c);

LayerProfile solve_layer(const Nonlinearity& nl, const GridSpec2& grid, double tol, const LayerOptions& opt = {});

// Bilinear in (|z|, lambda), odd in z. Outside the box the nearest boundary value is used,
// except on lambda = 0 beyond x_max where the limit sign(z) is returned.
double layer_value(const LayerProfile& p, double z, double lambda);
// u0'(0) by centered difference through the odd extension
double layer_slope_at_zero(const LayerProfile& p);

void write_layer_csv(std::ostream& os, const LayerProfile& p);

}  // namespace saddle
