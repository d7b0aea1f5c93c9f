#include "saddle/layer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "saddle/extension.hpp"

namespace saddle {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double pn_closed_form(double x, double lambda) {
  return 2.0 / kPi * std::atan(x / (lambda + 1.0 / kPi));
}

double layer_far_field(double x, double lambda, double c) {
  const double d = lambda + c;
  if (d <= 0) return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
  return 2.0 / kPi * std::atan(x / d);
}

LayerProfile solve_layer(const Nonlinearity& nl, const GridSpec2& grid, double tol, const LayerOptions& opt) {
  if (!nl.odd.value || !nl.G_double_well.value) {
    throw PreconditionError("solve_layer: nonlinearity must be odd with a double-well potential");
  }
  grid.validate();
  const int nx = grid.nx(), nlam = grid.nl();
  if (nx < 3 || nlam < 3) throw ValidationError("solve_layer: grid too small");
  const double c = 1.0 / std::abs(nl.fp1());

  System sys;
  sys.op = make_stencil(grid);
  sys.fixed.assign(grid.size(), 0);
  sys.shift.assign(grid.size(), 0.0);
  std::vector<double> x(grid.size(), 0.0);
  for (int k = 0; k < nlam; ++k)
    for (int i = 0; i < nx; ++i) {
      const std::size_t id = std::size_t(k) * nx + i;
      const double xi = grid.x(i), lam = grid.lambda(k);
      const bool top = k == nlam - 1;
      if (opt.lateral == LateralClosure::far_field) {
        x[id] = layer_far_field(xi, lam, c);
        sys.fixed[id] = i == 0 || top || (i == nx - 1 && k > 0);
      } else {
        x[id] = layer_far_field(xi, lam, 0.0);
        if (k == 0) x[id] = layer_far_field(xi, 0.0, c);
        sys.fixed[id] = i == 0 || top;
      }
      if (i == 0) x[id] = 0.0;
    }

  BottomIterationOptions bo;
  bo.tol = tol;
  bo.damping = opt.damping;
  bo.max_iter = opt.max_iter;
  bo.inner_rtol = std::min(1e-10, tol);
  FillStats st;
  LayerProfile p;
  try {
    nonlinear_bottom_solve(sys, nl, x, bo, &st);
  } catch (ConvergenceError& e) {
    throw ConvergenceError(std::string("solve_layer: ") + e.what(), e.history);
  }
  p.grid = grid;
  p.v0 = Field2(grid);
  p.v0.values = std::move(x);
  p.u0.resize(nx);
  for (int i = 0; i < nx; ++i) p.u0[i] = p.v0.at(i, 0);
  p.nonlinearity = nl.name;
  p.iterations = st.outer_iterations;
  p.history = st.history;
  return p;
}

double layer_value(const LayerProfile& p, double z, double lambda) {
  const GridSpec2& g = p.grid;
  const double sgn = z < 0 ? -1.0 : 1.0;
  const double az = std::abs(z);
  const int nx = g.nx(), nl = g.nl();
  if (az > g.x_max && lambda <= 0) return sgn;
  const double xq = std::clamp(az / g.h_x, 0.0, double(nx - 1));
  const double lq = std::clamp(lambda / g.h_lambda, 0.0, double(nl - 1));
  const int i = std::min(int(xq), nx - 2), k = std::min(int(lq), nl - 2);
  const double a = xq - i, b = lq - k;
  const double v = (1 - a) * (1 - b) * p.v0.at(i, k) + a * (1 - b) * p.v0.at(i + 1, k) +
                   (1 - a) * b * p.v0.at(i, k + 1) + a * b * p.v0.at(i + 1, k + 1);
  return sgn * v;
}

double layer_slope_at_zero(const LayerProfile& p) {
  // odd extension: (u0(h) - u0(-h)) / 2h = u0(h)/h
  return p.u0.at(1) / p.grid.h_x;
}

void write_layer_csv(std::ostream& os, const LayerProfile& p) {
  const GridSpec2& g = p.grid;
  os << "# nonlinearity=" << p.nonlinearity << " x_max=" << format_number(g.x_max)
     << " lambda_max=" << format_number(g.lambda_max) << " h_x=" << format_number(g.h_x)
     << " h_lambda=" << format_number(g.h_lambda) << " iterations=" << p.iterations << "\n";
  os << "x,u0\n";
  const int nx = g.nx();
  for (int i = nx - 1; i > 0; --i) os << format_number(-g.x(i)) << ',' << format_number(-p.u0[i]) << '\n';
  for (int i = 0; i < nx; ++i) os << format_number(g.x(i)) << ',' << format_number(p.u0[i]) << '\n';
}

}  // namespace saddle
