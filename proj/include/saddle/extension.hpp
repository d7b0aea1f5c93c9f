#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "saddle/model.hpp"
#include "saddle/stencil.hpp"

namespace saddle {

enum class Region { full_box, wedge };

// -dv/dlambda + a v = rhs at lambda = 0; rhs holds ns*nt values (i fastest).
struct RobinBottom {
  double a = 0;
  std::vector<double> rhs;
};

// -dv/dlambda = f(v) at lambda = 0
struct NonlinearBottom {
  const Nonlinearity* nl = nullptr;
};

enum class TopCondition { neumann_zero, dirichlet };

using PointFn = std::function<double(double s, double t, double lambda)>;

struct CylinderProblem {
  GridSpec3 grid;
  Region region = Region::full_box;
  PointFn lateral;  // outer faces s=s_max, t=t_max; for the wedge also the cone s=t
  std::variant<RobinBottom, NonlinearBottom> bottom;
  TopCondition top = TopCondition::neumann_zero;
  PointFn top_data;
  PointFn initial;  // optional starting guess for the nonlinear case
};

struct FillStats {
  int outer_iterations = 0;
  int linear_iterations = 0;
  std::vector<double> history;  // sup update per outer step
};

Stencil make_stencil(const GridSpec3& g);
Stencil make_stencil(const GridSpec2& g);

// Lateral/top/outside-wedge masks for a problem on its grid.
std::vector<std::uint8_t> fixed_mask(const CylinderProblem& p);

Field3 harmonic_fill(const CylinderProblem& p, double tol, FillStats* stats = nullptr);

struct BottomIterationOptions {
  double a = -1;          // shift; negative means sup|f'| + 0.5
  double damping = 1.0;   // v <- v + damping * (T v - v)
  double tol = 1e-10;     // sup update
  int max_iter = 5000;
  double inner_rtol = 1e-10;
};

// Shifted fixed point for A v = B f(v) on the free bottom nodes; x carries Dirichlet data
// and the initial guess. Throws ConvergenceError with the update history.
void nonlinear_bottom_solve(const System& base, const Nonlinearity& nl, std::vector<double>& x,
                            const BottomIterationOptions& opt, FillStats* stats = nullptr);

// (A v)/B on the bottom plane: the discrete normal derivative used by the bottom equation.
std::vector<double> dirichlet_to_neumann(const Field3& v);
std::vector<double> dirichlet_to_neumann(const Field2& v);

// (A v)/mass at nodes off the outer faces and the bottom; zero elsewhere.
Field3 pde_residual(const Field3& v, int m);
// (A v)/B - f(v) at bottom nodes (ns*nt values); entries on fixed nodes are meaningless.
std::vector<double> bottom_residual(const Field3& v, const Nonlinearity& nl);

void write_field_csv(std::ostream& os, const Field3& v, const std::string& label = "v");
std::string format_number(double x);

}  // namespace saddle
