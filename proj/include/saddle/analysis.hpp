#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "saddle/model.hpp"

namespace saddle {

struct SignedCheck {
  std::string name;
  double worst = 0;  // largest violation of the sign condition, 0 if none
  double s = 0, t = 0, lambda = 0;
};

struct MonotonicityReport {
  SignedCheck ds_nonneg{"d_s >= 0"}, dt_nonpos{"d_t <= 0"}, dz_nonneg{"d_z >= 0"}, dy_nonneg{"d_y >= 0"};
  double dz_min = 0;  // min d_z over interior wedge nodes off the origin
  double bc_s0 = 0;   // max |d_s v| at s = 0 off the outer faces (second-order one-sided, odd-reflected field)
  double bc_t0 = 0;   // max |d_t v| at t = 0 off the outer faces
  double scale = 0;   // max |v|
};

// Centered differences at nodes with t < s off the outer faces. v is a wedge field or an odd full field.
// The axis checks use levels lambda <= bc_lambda_max.
MonotonicityReport monotonicity_report(const Field3& v, double bc_lambda_max = 1e300);

struct AsymptoticRow {
  double R, sup_u_dev, sup_grad_dev;
  int nodes;
};

// Bottom nodes with R <= |x| <= R + band of the full (odd) field; band <= 0 means two cells.
std::vector<AsymptoticRow> asymptotic_report(const Field3& v, const LayerProfile& layer,
                                             const std::vector<double>& radii, double band = 0);
void write_asymptotic_csv(std::ostream& os, const std::vector<AsymptoticRow>& rows);

struct GradientProfile {
  std::vector<double> lambda, sup_grad;
  double C = 0;           // max over levels of sup_grad (1 + lambda)
  double C0 = 0;          // sup_grad at lambda = 0
  double worst_ratio = 0; // max sup_grad (1 + lambda) / C
  bool nonincreasing = false;
  bool decaying = false;  // last level at most half of the first
};

GradientProfile gradient_decay_check(const Field3& v);
void write_gradient_csv(std::ostream& os, const GradientProfile& p);

}  // namespace saddle
