#include "saddle/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "saddle/extension.hpp"
#include "saddle/layer.hpp"
#include "saddle/stencil.hpp"

namespace saddle {

double Barrier::value(double z) const { return extension(z, 0.0); }

double Barrier::extension(double z, double lambda) const {
  if (z == 0) return 0.0;
  const double u = std::abs(layer_value(*layer, z, lambda));
  return (z > 0 ? 1.0 : -1.0) * std::min(1.0, K * u);
}

Barrier barrier(const LayerProfile& layer, double K) {
  if (!(K >= 1)) throw PreconditionError("barrier: K must be at least 1");
  return Barrier{&layer, K, "min(1,K*u0) K=" + format_number(K)};
}

double choose_K(const LayerProfile& layer, double C_grad) {
  if (!(C_grad > 0)) throw PreconditionError("choose_K: C_grad must be positive");
  const double slope = layer_slope_at_zero(layer);
  const double u = layer_value(layer, 1.0 / C_grad, 0.0);
  if (!(u > 0) || !(slope > 0)) throw PreconditionError("choose_K: degenerate layer");
  return std::max({1.0, C_grad / slope, 1.0 / u});
}

double fit_C_grad(const Field3& saddle_v) {
  const Field3 v = odd_reflect(saddle_v);
  const GridSpec3& g = v.grid;
  const int ns = g.ns(), nt = g.nt();
  double c = 0;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < ns; ++i) {
      double ds = 0, dt = 0;
      if (i == ns - 1) ds = (v.at(i, j, 0) - v.at(i - 1, j, 0)) / g.h_s;
      else if (i > 0) ds = (v.at(i + 1, j, 0) - v.at(i - 1, j, 0)) / (2 * g.h_s);
      if (j == nt - 1) dt = (v.at(i, j, 0) - v.at(i, j - 1, 0)) / g.h_t;
      else if (j > 0) dt = (v.at(i, j + 1, 0) - v.at(i, j - 1, 0)) / (2 * g.h_t);
      c = std::max(c, std::hypot(ds, dt));
    }
  return c;
}

GridSpec2 layer_grid_for(const GridSpec3& g, double x_min) {
  GridSpec2 lg;
  lg.h_x = g.h_s / std::sqrt(2.0);
  lg.h_lambda = g.h_lambda;
  lg.lambda_max = g.lambda_max;
  const int cells = int(std::ceil(std::max(x_min, g.s_max / std::sqrt(2.0)) / lg.h_x - 1e-9));
  lg.x_max = cells * lg.h_x;
  return lg;
}

Field3 barrier_field(const GridSpec3& g, const Barrier& b) {
  Field3 f(g, 0.0);
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = j + 1; i < g.ns(); ++i) f.at(i, j, k) = b.extension((g.s(i) - g.t(j)) / std::sqrt(2.0), g.lambda(k));
  return f;
}

MaximalState monotone_iterate(const Nonlinearity& nl, const GridSpec3& grid, const Barrier& b,
                              const MonotoneOptions& opt) {
  grid.validate();
  if (grid.ns() != grid.nt()) throw PreconditionError("monotone_iterate: grid must cover the square T_R");
  if (!b.layer) throw PreconditionError("monotone_iterate: barrier without layer");
  const double a = opt.a < 0 ? nl.sup_abs_f_prime + 0.5 : opt.a;
  for (int q = 0; q <= 2000; ++q) {
    const double u = -1 + q / 1000.0;
    if (!(nl.f_prime(u) + a > 0)) {
      throw PreconditionError("monotone_iterate: a = " + format_number(a) + " leaves f(w) + a w decreasing at w = " +
                              format_number(u));
    }
  }
  const int ns = grid.ns(), nt = grid.nt(), nl_ = grid.nl();

  MaximalState st;
  st.a = a;
  st.K = b.K;
  st.barrier_id = b.id;
  st.v = barrier_field(grid, b);
  std::vector<double>& v = st.v.values;

  System sys;
  sys.op = make_stencil(grid);
  sys.fixed.assign(grid.size(), 0);
  sys.shift.assign(grid.size(), 0.0);
  for (int k = 0; k < nl_; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        const auto id = grid.index(i, j, k);
        sys.fixed[id] = j >= i || i == ns - 1 || k == nl_ - 1;
        if (k == 0 && !sys.fixed[id]) sys.shift[id] = a * sys.op.bottom(i, j);
      }
  const Multigrid mg(sys);

  std::vector<double> rhs(grid.size(), 0.0), x;
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (int j = 0; j < nt; ++j)
      for (int i = j + 1; i < ns; ++i) {
        const auto id = grid.index(i, j, 0);
        rhs[id] = sys.fixed[id] ? 0.0 : sys.op.bottom(i, j) * (nl.f(v[id]) + a * v[id]);
      }
    x = v;
    const SolveStats ss = mg.solve(rhs, x, opt.inner_rtol, 500);
    st.linear_iterations += ss.iterations;
    double diff = 0, viol = 0, lo = 1e300, hi = -1e300;
    for (int k = 0; k < nl_; ++k)
      for (int j = 0; j < nt; ++j)
        for (int i = j + 1; i < ns; ++i) {
          const auto id = grid.index(i, j, k);
          viol = std::max(viol, x[id] - v[id]);
          const double xn = std::min(v[id], x[id]);
          diff = std::max(diff, v[id] - xn);
          v[id] = xn;
          lo = std::min(lo, xn), hi = std::max(hi, xn);
        }
    st.sup_diff.push_back(diff);
    st.violation.push_back(viol);
    st.min.push_back(lo);
    st.max.push_back(hi);
    st.max_violation = std::max(st.max_violation, viol);
    st.iterations = it;
    if (diff < opt.tol) return st;
  }
  throw ConvergenceError("monotone_iterate: sup difference " + format_number(st.sup_diff.back()) +
                             " above tolerance after " + std::to_string(opt.max_iter) + " steps",
                         st.sup_diff);
}

void write_monotone_csv(std::ostream& os, const MaximalState& st) {
  os << "j,sup_diff,min,max\n";
  for (std::size_t j = 0; j < st.sup_diff.size(); ++j) {
    os << j + 1 << ',' << format_number(st.sup_diff[j]) << ',' << format_number(st.min[j]) << ','
       << format_number(st.max[j]) << '\n';
  }
}

MaximalityReport maximality_check(const MaximalState& maximal, const Field3& candidate) {
  const GridSpec3& g = maximal.v.grid;
  if (!g.same_as(candidate.grid)) throw PreconditionError("maximality_check: grid mismatch");
  MaximalityReport r;
  r.min_gap = 1e300;
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = j; i < g.ns(); ++i) {
        const double gap = maximal.v.at(i, j, k) - candidate.at(i, j, k);
        if (gap < r.min_gap) r = {gap, g.s(i), g.t(j), g.lambda(k)};
      }
  return r;
}

NestedResult nested_limit(const Nonlinearity& nl, int m, const std::vector<double>& R_list, double L, double h,
                          const std::vector<double>& boxes, double C_grad, const MonotoneOptions& opt) {
  if (R_list.empty()) throw PreconditionError("nested_limit: empty radius list");
  for (std::size_t q = 1; q < R_list.size(); ++q)
    if (!(R_list[q] > R_list[q - 1])) throw PreconditionError("nested_limit: radii must increase");
  NestedResult res;
  Field3 prev;
  for (std::size_t q = 0; q < R_list.size(); ++q) {
    const GridSpec3 g = make_grid3(m, R_list[q], L, h);
    const LayerProfile layer = solve_layer(nl, layer_grid_for(g), 1e-10);
    const Barrier b = barrier(layer, choose_K(layer, C_grad));
    MaximalState st = monotone_iterate(nl, g, b, opt);
    if (q > 0) {
      const GridSpec3& gp = prev.grid;
      if (std::abs(gp.h_s - g.h_s) > 1e-12 || std::abs(gp.h_lambda - g.h_lambda) > 1e-12) {
        throw PreconditionError("nested_limit: successive grids do not share spacings");
      }
      for (double box : boxes) {
        double d = 0;
        const double top = std::min({box, gp.lambda_max, g.lambda_max});
        for (int k = 0; g.lambda(k) <= top + 1e-9; ++k)
          for (int j = 0; g.t(j) <= box + 1e-9 && j < gp.nt(); ++j)
            for (int i = j; g.s(i) <= box + 1e-9 && i < gp.ns(); ++i)
              d = std::max(d, std::abs(st.v.at(i, j, k) - prev.at(i, j, k)));
        res.table.push_back({R_list[q - 1], R_list[q], box, d});
      }
    }
    prev = st.v;
    res.state = std::move(st);
  }
  return res;
}

}  // namespace saddle
