#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "saddle/model.hpp"
#include "saddle/saddle.hpp"

namespace saddle {

// u_b(z) = min{1, K |u0(z)|} with the sign of z; extension(z, lambda) uses v0 instead of u0.
struct Barrier {
  const LayerProfile* layer = nullptr;
  double K = 1;
  std::string id;

  double value(double z) const;
  double extension(double z, double lambda) const;
};

Barrier barrier(const LayerProfile& layer, double K);
double choose_K(const LayerProfile& layer, double C_grad);
// max |grad_{s,t} u| on the bottom plane of the odd-reflected field
double fit_C_grad(const Field3& saddle_v);

// Layer grid matched to a 3D grid: h_x = h_s/sqrt2, same h_lambda and height, x_max >= max(x_min, s_max/sqrt2).
GridSpec2 layer_grid_for(const GridSpec3& g, double x_min = 20);

// min{1, K v0(z, lambda)} on the wedge t < s, zero elsewhere
Field3 barrier_field(const GridSpec3& g, const Barrier& b);

struct MaximalState {
  Field3 v;  // wedge t <= s
  std::vector<double> sup_diff, min, max, violation;  // per step j >= 1
  double a = 0, K = 1;
  std::string barrier_id;
  int iterations = 0;
  int linear_iterations = 0;
  double max_violation = 0;
};

struct MonotoneOptions {
  double a = -1;          // shift; negative means sup|f'| + 0.5
  double tol = 1e-10;     // sup |v_{j+1} - v_j|
  int max_iter = 5000;
  double inner_rtol = 1e-12;
};

MaximalState monotone_iterate(const Nonlinearity& nl, const GridSpec3& grid, const Barrier& b,
                              const MonotoneOptions& opt = {});
void write_monotone_csv(std::ostream& os, const MaximalState& st);

struct MaximalityReport {
  double min_gap = 0;
  double s = 0, t = 0, lambda = 0;
};
MaximalityReport maximality_check(const MaximalState& maximal, const Field3& candidate);

struct NestedRow {
  double R_prev, R, box, sup_diff;
};

struct NestedResult {
  MaximalState state;
  std::vector<NestedRow> table;
};

// Maximal states on make_grid3(m, R, L, h) for each R, compared on the boxes [0,b]^2 x [0,min(b,L)].
NestedResult nested_limit(const Nonlinearity& nl, int m, const std::vector<double>& R_list, double L, double h,
                          const std::vector<double>& boxes, double C_grad = 2, const MonotoneOptions& opt = {});

}  // namespace saddle
