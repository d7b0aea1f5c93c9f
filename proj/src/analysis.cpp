#include "saddle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "saddle/extension.hpp"
#include "saddle/layer.hpp"
#include "saddle/saddle.hpp"

namespace saddle {

namespace {

void record(SignedCheck& c, double violation, double s, double t, double l) {
  if (violation > c.worst) c.worst = violation, c.s = s, c.t = t, c.lambda = l;
}

// centered in the interior, second-order one-sided at the ends
double diff(const Field3& v, int axis, int i, int j, int k) {
  const GridSpec3& g = v.grid;
  const int n = axis == 0 ? g.ns() : axis == 1 ? g.nt() : g.nl();
  const double h = axis == 0 ? g.h_s : axis == 1 ? g.h_t : g.h_lambda;
  const int q = axis == 0 ? i : axis == 1 ? j : k;
  auto at = [&](int p) {
    return axis == 0 ? v.at(p, j, k) : axis == 1 ? v.at(i, p, k) : v.at(i, j, p);
  };
  if (n < 3) return 0.0;
  if (q == 0) return (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
  if (q == n - 1) return (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h);
  return (at(q + 1) - at(q - 1)) / (2 * h);
}

}  // namespace

MonotonicityReport monotonicity_report(const Field3& v, double bc_lambda_max) {
  const GridSpec3& g = v.grid;
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();
  MonotonicityReport r;
  r.scale = v.max_abs();
  r.dz_min = 1e300;
  const double rt2 = std::sqrt(2.0);
  for (int k = 0; k < nl; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = j + 1; i + 1 < ns; ++i) {
        const double s = g.s(i), t = g.t(j), l = g.lambda(k);
        const double ds = (v.at(i + 1, j, k) - v.at(i - 1, j, k)) / (2 * g.h_s);
        const double dt = j == 0 ? 0.0 : (v.at(i, j + 1, k) - v.at(i, j - 1, k)) / (2 * g.h_t);
        const double dz = (ds - dt) / rt2, dy = (ds + dt) / rt2;
        record(r.ds_nonneg, -ds, s, t, l);
        record(r.dt_nonpos, dt, s, t, l);
        record(r.dz_nonneg, -dz, s, t, l);
        record(r.dy_nonneg, -dy, s, t, l);
        if (k + 1 < nl) r.dz_min = std::min(r.dz_min, dz);
      }
  if (r.dz_min == 1e300) r.dz_min = 0;
  const Field3 full = odd_reflect(v);
  for (int k = 0; k + 1 < nl && g.lambda(k) <= bc_lambda_max + 1e-12; ++k) {
    for (int j = 0; j + 1 < nt; ++j) r.bc_s0 = std::max(r.bc_s0, std::abs(diff(full, 0, 0, j, k)));
    for (int i = 0; i + 1 < ns; ++i) r.bc_t0 = std::max(r.bc_t0, std::abs(diff(full, 1, i, 0, k)));
  }
  return r;
}

std::vector<AsymptoticRow> asymptotic_report(const Field3& v, const LayerProfile& layer,
                                             const std::vector<double>& radii, double band) {
  const GridSpec3& g = v.grid;
  if (band <= 0) band = 2 * g.h_s;
  const int ns = g.ns(), nt = g.nt();
  const double rt2 = std::sqrt(2.0);
  Field3 U(g, 0.0);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < ns; ++i) U.at(i, j, 0) = layer_value(layer, (g.s(i) - g.t(j)) / rt2, 0.0);
  std::vector<AsymptoticRow> rows;
  for (double R : radii) {
    if (!(R >= 0) || R + band > std::min(g.s_max, g.t_max) + 1e-9) {
      throw DomainError("asymptotic_report: annulus [" + format_number(R) + ", " + format_number(R + band) +
                        "] exceeds the grid");
    }
    AsymptoticRow row{R, 0, 0, 0};
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        const double r = std::hypot(g.s(i), g.t(j));
        if (r < R - 1e-9 || r > R + band + 1e-9) continue;
        row.sup_u_dev = std::max(row.sup_u_dev, std::abs(v.at(i, j, 0) - U.at(i, j, 0)));
        const double gs = diff(v, 0, i, j, 0) - diff(U, 0, i, j, 0);
        const double gt = diff(v, 1, i, j, 0) - diff(U, 1, i, j, 0);
        row.sup_grad_dev = std::max(row.sup_grad_dev, std::hypot(gs, gt));
        ++row.nodes;
      }
    rows.push_back(row);
  }
  return rows;
}

void write_asymptotic_csv(std::ostream& os, const std::vector<AsymptoticRow>& rows) {
  os << "R,sup_u_dev,sup_grad_dev\n";
  for (const auto& r : rows)
    os << format_number(r.R) << ',' << format_number(r.sup_u_dev) << ',' << format_number(r.sup_grad_dev) << '\n';
}

GradientProfile gradient_decay_check(const Field3& v) {
  const GridSpec3& g = v.grid;
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();
  GradientProfile p;
  for (int k = 0; k < nl; ++k) {
    double sup = 0;
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        const double a = diff(v, 0, i, j, k), b = diff(v, 1, i, j, k), c = diff(v, 2, i, j, k);
        sup = std::max(sup, std::sqrt(a * a + b * b + c * c));
      }
    p.lambda.push_back(g.lambda(k));
    p.sup_grad.push_back(sup);
    p.C = std::max(p.C, sup * (1 + g.lambda(k)));
  }
  p.C0 = p.sup_grad.front();
  p.nonincreasing = true;
  for (int k = 0; k < nl; ++k) {
    if (p.C > 0) p.worst_ratio = std::max(p.worst_ratio, p.sup_grad[k] * (1 + p.lambda[k]) / p.C);
    if (k > 0 && p.sup_grad[k] > p.sup_grad[k - 1] * (1 + 1e-12) + 1e-14) p.nonincreasing = false;
  }
  p.decaying = p.sup_grad.back() <= 0.5 * p.sup_grad.front();
  return p;
}

void write_gradient_csv(std::ostream& os, const GradientProfile& p) {
  os << "lambda,sup_grad\n";
  for (std::size_t k = 0; k < p.lambda.size(); ++k)
    os << format_number(p.lambda[k]) << ',' << format_number(p.sup_grad[k]) << '\n';
}

}  // namespace saddle
