#include "saddle/extension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace saddle {

Stencil make_stencil(const GridSpec3& g) {
  g.validate();
  Stencil op;
  op.ax = {make_axis(g.ns(), g.h_s, g.m - 1), make_axis(g.nt(), g.h_t, g.m - 1), make_axis(g.nl(), g.h_lambda, 0)};
  return op;
}

Stencil make_stencil(const GridSpec2& g) {
  g.validate();
  Stencil op;
  op.ax = {make_axis(g.nx(), g.h_x, 0), trivial_axis(), make_axis(g.nl(), g.h_lambda, 0)};
  return op;
}

std::vector<std::uint8_t> fixed_mask(const CylinderProblem& p) {
  const GridSpec3& g = p.grid;
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();
  std::vector<std::uint8_t> fixed(g.size(), 0);
  for (int k = 0; k < nl; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        bool f = false;
        if (p.region == Region::full_box) {
          f = i == ns - 1 || j == nt - 1;
        } else {
          f = j >= i || i == ns - 1;
        }
        if (p.top == TopCondition::dirichlet && k == nl - 1) f = true;
        fixed[g.index(i, j, k)] = f;
      }
  return fixed;
}

void nonlinear_bottom_solve(const System& base, const Nonlinearity& nl, std::vector<double>& x,
                            const BottomIterationOptions& opt, FillStats* stats) {
  const Stencil& op = base.op;
  const int n0 = op.ax[0].n, n1 = op.ax[1].n;
  const double a = opt.a >= 0 ? opt.a : nl.sup_abs_f_prime + 0.5;
  if (!(opt.damping > 0 && opt.damping <= 1)) throw PreconditionError("damping must lie in (0,1]");
  System sys = base;
  sys.shift.assign(op.size(), 0.0);
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < n0; ++i) {
      auto id = op.index(i, j, 0);
      if (!sys.fixed[id]) sys.shift[id] = a * op.bottom(i, j);
    }
  Multigrid mg(sys);
  std::vector<double> b(op.size(), 0.0), y;
  std::vector<double> hist;
  int lin = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n0; ++i) {
        auto id = op.index(i, j, 0);
        if (!sys.fixed[id]) b[id] = op.bottom(i, j) * (nl.f(x[id]) + a * x[id]);
      }
    y = x;
    auto st = mg.solve(b, y, opt.inner_rtol);
    lin += st.iterations;
    double d = 0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      if (sys.fixed[n]) continue;
      double step = y[n] - x[n];
      d = std::max(d, std::abs(step));
      x[n] += opt.damping * step;
    }
    hist.push_back(d);
    if (stats) {
      stats->outer_iterations = it;
      stats->linear_iterations = lin;
      stats->history = hist;
    }
    if (!std::isfinite(d)) break;
    if (d < opt.tol) return;
  }
  throw ConvergenceError("nonlinear bottom iteration did not converge", hist);
}

Field3 harmonic_fill(const CylinderProblem& p, double tol, FillStats* stats) {
  const GridSpec3& g = p.grid;
  g.validate();
  if (!p.lateral) throw PreconditionError("harmonic_fill: lateral data missing");
  if (p.top == TopCondition::dirichlet && !p.top_data) throw PreconditionError("harmonic_fill: top data missing");
  System sys;
  sys.op = make_stencil(g);
  sys.fixed = fixed_mask(p);
  sys.shift.assign(g.size(), 0.0);
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();

  Field3 v(g, 0.0);
  for (int k = 0; k < nl; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        auto id = g.index(i, j, k);
        const double s = g.s(i), t = g.t(j), lam = g.lambda(k);
        const bool outside = p.region == Region::wedge && j > i;
        const bool lateral = p.region == Region::full_box ? (i == ns - 1 || j == nt - 1) : (j == i || i == ns - 1);
        double val;
        if (outside) {
          val = 0.0;
        } else if (lateral) {
          val = p.lateral(s, t, lam);
        } else if (p.top == TopCondition::dirichlet && k == nl - 1) {
          val = p.top_data(s, t, lam);
        } else {
          val = p.initial ? p.initial(s, t, lam) : 0.0;
        }
        if (!std::isfinite(val)) throw PreconditionError("harmonic_fill: boundary data not finite");
        v.values[id] = val;
      }

  if (auto* rb = std::get_if<RobinBottom>(&p.bottom)) {
    if (rb->a < 0) throw PreconditionError("harmonic_fill: Robin coefficient must be nonnegative");
    if (rb->rhs.size() != std::size_t(ns) * nt) throw DimensionError("harmonic_fill: Robin rhs size mismatch");
    std::vector<double> b(g.size(), 0.0);
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        auto id = g.index(i, j, 0);
        if (sys.fixed[id]) continue;
        sys.shift[id] = rb->a * sys.op.bottom(i, j);
        b[id] = sys.op.bottom(i, j) * rb->rhs[std::size_t(j) * ns + i];
      }
    Multigrid mg(sys);
    auto st = mg.solve(b, v.values, tol, 500);
    if (stats) {
      stats->outer_iterations = 1;
      stats->linear_iterations = st.iterations;
      stats->history = {st.residual};
    }
    if (!st.converged) throw ConvergenceError("harmonic_fill: linear solve did not converge", {st.residual});
    return v;
  }
  const auto& nb = std::get<NonlinearBottom>(p.bottom);
  if (!nb.nl) throw PreconditionError("harmonic_fill: nonlinear bottom without a nonlinearity");
  BottomIterationOptions opt;
  opt.tol = tol;
  opt.inner_rtol = std::min(1e-10, tol);
  nonlinear_bottom_solve(sys, *nb.nl, v.values, opt, stats);
  return v;
}

std::vector<double> dirichlet_to_neumann(const Field3& v) {
  const GridSpec3& g = v.grid;
  if (g.nl() < 3) throw PreconditionError("dirichlet_to_neumann: need at least 3 lambda levels");
  Stencil op = make_stencil(g);
  std::vector<double> Av;
  op.apply(v.values, Av);
  const int ns = g.ns(), nt = g.nt();
  std::vector<double> out(std::size_t(ns) * nt);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < ns; ++i) out[std::size_t(j) * ns + i] = Av[g.index(i, j, 0)] / op.bottom(i, j);
  return out;
}

// Bottom row of the finite-volume operator on the odd field. For harmonic v the
// (h_lambda/2) d_xx v term cancels the first-order error of the one-sided difference.
std::vector<double> dirichlet_to_neumann(const Field2& v) {
  const GridSpec2& g = v.grid;
  if (g.nl() < 3) throw PreconditionError("dirichlet_to_neumann: need at least 3 lambda levels");
  const int nx = g.nx();
  const double hx2 = g.h_x * g.h_x;
  std::vector<double> out(nx);
  for (int i = 0; i < nx; ++i) {
    const double left = i > 0 ? v.at(i - 1, 0) : -v.at(1, 0);
    const double right = i + 1 < nx ? v.at(i + 1, 0) : left;
    out[i] = (v.at(i, 0) - v.at(i, 1)) / g.h_lambda - 0.5 * g.h_lambda * (left - 2 * v.at(i, 0) + right) / hx2;
  }
  return out;
}

Field3 pde_residual(const Field3& v, int m) {
  GridSpec3 g = v.grid;
  g.m = m;
  Stencil op = make_stencil(g);
  std::vector<double> Av;
  op.apply(v.values, Av);
  Field3 r(g, 0.0);
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();
  for (int k = 1; k + 1 < nl; ++k)
    for (int j = 0; j + 1 < nt; ++j)
      for (int i = 0; i + 1 < ns; ++i) {
        auto id = g.index(i, j, k);
        r.values[id] = Av[id] / op.mass(i, j, k);
      }
  return r;
}

std::vector<double> bottom_residual(const Field3& v, const Nonlinearity& nl) {
  const GridSpec3& g = v.grid;
  Stencil op = make_stencil(g);
  std::vector<double> Av;
  op.apply(v.values, Av);
  const int ns = g.ns(), nt = g.nt();
  std::vector<double> out(std::size_t(ns) * nt);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < ns; ++i) {
      auto id = g.index(i, j, 0);
      out[std::size_t(j) * ns + i] = Av[id] / op.bottom(i, j) - nl.f(v.values[id]);
    }
  return out;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_field_csv(std::ostream& os, const Field3& v, const std::string& label) {
  const GridSpec3& g = v.grid;
  os << "# m=" << g.m << " s_max=" << format_number(g.s_max) << " t_max=" << format_number(g.t_max)
     << " lambda_max=" << format_number(g.lambda_max) << " h_s=" << format_number(g.h_s)
     << " h_t=" << format_number(g.h_t) << " h_lambda=" << format_number(g.h_lambda) << "\n";
  os << "s,t,lambda," << label << "\n";
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = 0; i < g.ns(); ++i)
        os << format_number(g.s(i)) << ',' << format_number(g.t(j)) << ',' << format_number(g.lambda(k)) << ','
           << format_number(v.at(i, j, k)) << '\n';
}

}  // namespace saddle
