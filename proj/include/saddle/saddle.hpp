#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "saddle/model.hpp"

namespace saddle {

struct SaddleState {
  Field3 v;  // wedge {t <= s} is authoritative; t > s holds zeros unless reflected
  int m = 1;
  std::string nonlinearity;
  std::vector<double> energy_history;
  bool reflected = false;
  int sweeps = 0;
};

// Region for energies. cylinder: s^2 + t^2 < S^2, lambda < H. box: s,t < S, lambda < H.
// wedge_only counts the closed wedge with diagonal bottom nodes at half weight, so that
// the energy of an odd field equals twice the wedge energy.
struct EnergyRegion {
  enum Kind { box, cylinder } kind = box;
  double S = 0, H = 0;
  bool wedge_only = false;

  static EnergyRegion whole(const GridSpec3& g, bool wedge) { return {box, std::max(g.s_max, g.t_max), g.lambda_max, wedge}; }
};

double discrete_energy(const Field3& v, const Nonlinearity& nl, const EnergyRegion& region);

struct DescentParams {
  double omega = 0;          // interior over-relaxation; 0 picks a grid-based value
  double tol = 1e-8;          // projected Euler-Lagrange residual, (A v)/mass inside and (A v)/B - f(v) at the bottom
  double energy_tol = 1e-12;  // energy decrease per sweep
  int max_sweeps = 200000;
  const Field3* initial = nullptr;
};

// min{1, (s-t)/sqrt2, R - s, L - lambda} on the wedge, zero elsewhere
Field3 distance_candidate(const GridSpec3& g);

SaddleState minimize_energy(const Nonlinearity& nl, const GridSpec3& grid, const DescentParams& dp = {});

struct ElResiduals {
  double interior = 0;  // max |(A v)/mass| at free interior nodes
  double bottom = 0;    // max |(A v)/B - f(v)| at free bottom nodes
};
ElResiduals euler_lagrange_residuals(const SaddleState& st, const Nonlinearity& nl);

Field3 odd_reflect(const Field3& v);
SaddleState odd_reflect(const SaddleState& st);

Field3 comparison_candidate(const Field3& v_ref, double S, double gamma, double beta);

// Q_v(xi) for xi vanishing on the cone, on the outer faces and outside the wedge
double cone_stability_form(const SaddleState& st, const Nonlinearity& nl, const Field3& xi);

}  // namespace saddle
