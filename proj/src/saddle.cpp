#include "saddle/saddle.hpp"

#include <algorithm>
#include <cmath>

#include "saddle/extension.hpp"
#include "saddle/stability.hpp"

namespace saddle {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool in_region(const EnergyRegion& r, double s, double t, double lam) {
  const double eps = 1e-9;
  if (lam > r.H + eps) return false;
  if (r.kind == EnergyRegion::box) return s <= r.S + eps && t <= r.S + eps;
  return s * s + t * t <= r.S * r.S * (1 + eps);
}

void require_square(const GridSpec3& g, const char* who) {
  if (g.ns() != g.nt() || std::abs(g.h_s - g.h_t) > 1e-12 * g.h_s) {
    throw PreconditionError(std::string(who) + ": grid is not aligned with the cone diagonal");
  }
}

// minimizer of 0.5 d x^2 - S x + B G(x) on [0,1]
double bottom_minimize(double d, double S, double B, const Nonlinearity& nl, double x0, bool convex) {
  auto phi = [&](double x) { return 0.5 * d * x * x - S * x + B * nl.G(x); };
  auto dphi = [&](double x) { return d * x - S - B * nl.f(x); };
  auto refine = [&](double lo, double hi) {
    // dphi(lo) < 0 < dphi(hi)
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
      const double g = dphi(x);
      if (g < 0) lo = x; else hi = x;
      const double dd = d - B * nl.f_prime(x);
      double xn = dd > 0 ? x - g / dd : 0.5 * (lo + hi);
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      if (std::abs(xn - x) < 1e-15 || hi - lo < 1e-15) return xn;
      x = xn;
    }
    return x;
  };
  if (convex) {
    if (dphi(0.0) >= 0) return 0.0;
    if (dphi(1.0) <= 0) return 1.0;
    return refine(0.0, 1.0);
  }
  double best = x0, pbest = phi(x0);
  for (double e : {0.0, 1.0}) {
    if (phi(e) < pbest) best = e, pbest = phi(e);
  }
  const int n = 32;
  double xl = 0, gl = dphi(0.0);
  for (int q = 1; q <= n; ++q) {
    const double xr = double(q) / n, gr = dphi(xr);
    if (gl < 0 && gr > 0) {
      const double x = refine(xl, xr);
      if (phi(x) < pbest) best = x, pbest = phi(x);
    }
    xl = xr, gl = gr;
  }
  return best;
}

}  // namespace

double discrete_energy(const Field3& v, const Nonlinearity& nl, const EnergyRegion& region) {
  const GridSpec3& g = v.grid;
  if (!(region.S > 0) || !(region.H >= 0)) throw DomainError("discrete_energy: empty region");
  if (region.wedge_only) require_square(g, "discrete_energy");
  const Stencil op = make_stencil(g);
  const int ns = g.ns(), nt = g.nt(), nlam = g.nl();
  auto inside = [&](int i, int j, int k) {
    if (region.wedge_only && j > i) return false;
    return in_region(region, g.s(i), g.t(j), g.lambda(k));
  };
  double dir = 0, pot = 0;
  for (int k = 0; k < nlam; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        if (!inside(i, j, k)) continue;
        const double x = v.at(i, j, k);
        if (i + 1 < ns && inside(i + 1, j, k)) {
          const double d = v.at(i + 1, j, k) - x;
          dir += op.cx(i, j, k) * d * d;
        }
        if (j + 1 < nt && inside(i, j + 1, k)) {
          const double d = v.at(i, j + 1, k) - x;
          dir += op.cy(i, j, k) * d * d;
        }
        if (k + 1 < nlam && inside(i, j, k + 1)) {
          const double d = v.at(i, j, k + 1) - x;
          dir += op.cz(i, j, k) * d * d;
        }
        if (k == 0) {
          const double w = region.wedge_only && i == j ? 0.5 : 1.0;
          pot += w * op.bottom(i, j) * nl.G(x);
        }
      }
  return 0.5 * dir + pot;
}

Field3 distance_candidate(const GridSpec3& g) {
  Field3 c(g, 0.0);
  const double R = g.s_max, L = g.lambda_max;
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = j + 1; i < g.ns(); ++i) {
        const double s = g.s(i), t = g.t(j), lam = g.lambda(k);
        c.at(i, j, k) = std::max(0.0, std::min({1.0, (s - t) / std::sqrt(2.0), R - s, L - lam}));
      }
  return c;
}

SaddleState minimize_energy(const Nonlinearity& nl, const GridSpec3& grid, const DescentParams& dp) {
  if (!nl.odd.value || !nl.G_double_well.value) {
    throw PreconditionError("minimize_energy: nonlinearity must be odd with a double-well potential");
  }
  grid.validate();
  require_square(grid, "minimize_energy");
  const int ns = grid.ns(), nt = grid.nt(), nl_ = grid.nl();
  if (ns < 3 || nl_ < 3) throw ValidationError("minimize_energy: grid too small");

  SaddleState st;
  st.m = grid.m;
  st.nonlinearity = nl.name;
  if (dp.initial) {
    if (!dp.initial->grid.same_as(grid)) throw PreconditionError("minimize_energy: initial field on another grid");
    st.v = *dp.initial;
    for (double& x : st.v.values) x = std::clamp(x, 0.0, 1.0);
  } else {
    st.v = distance_candidate(grid);
  }
  std::vector<double>& v = st.v.values;
  for (int k = 0; k < nl_; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i)
        if (j >= i || i == ns - 1 || k == nl_ - 1) st.v.at(i, j, k) = 0.0;

  const Stencil op = make_stencil(grid);
  double omega = dp.omega;
  if (omega <= 0) omega = std::min(1.95, 2.0 / (1.0 + std::sin(kPi / std::max(ns - 1, nl_ - 1))));
  const double fp_max = nl.sup_abs_f_prime;

  double E = discrete_energy(st.v, nl, EnergyRegion::whole(grid, true));
  st.energy_history.push_back(E);
  const std::size_t sx = 1, sy = std::size_t(ns), sz = std::size_t(ns) * nt;
  double last_res = 0;
  for (int sweep = 1; sweep <= dp.max_sweeps; ++sweep) {
    double res = 0;
    const double E_start = E;
    for (int k = 0; k + 1 < nl_; ++k)
      for (int j = 0; j < nt; ++j)
        for (int i = j + 1; i + 1 < ns; ++i) {
          const std::size_t id = grid.index(i, j, k);
          double S = 0, d = 0, c;
          c = op.cx(i, j, k), S += c * v[id + sx], d += c;
          if (i > 0) c = op.cx(i - 1, j, k), S += c * v[id - sx], d += c;
          c = op.cy(i, j, k), S += c * v[id + sy], d += c;
          if (j > 0) c = op.cy(i, j - 1, k), S += c * v[id - sy], d += c;
          c = op.cz(i, j, k), S += c * v[id + sz], d += c;
          if (k > 0) c = op.cz(i, j, k - 1), S += c * v[id - sz], d += c;
          const double x = v[id];
          // projected gradient before the update
          double pg = k > 0 ? (d * x - S) / op.mass(i, j, k)
                            : (d * x - S) / op.bottom(i, j) - nl.f(x);
          if ((x <= 0 && pg > 0) || (x >= 1 && pg < 0)) pg = 0;
          res = std::max(res, std::abs(pg));
          const double grad = d * x - S;
          double xn, dE;
          if (k > 0) {
            xn = std::clamp(x - omega * grad / d, 0.0, 1.0);
          } else {
            xn = bottom_minimize(d, S, op.bottom(i, j), nl, x, d > op.bottom(i, j) * fp_max);
          }
          const double dx = xn - x;
          // sign-stable form of 0.5 d (xn^2 - x^2) - S (xn - x)
          dE = dx * (grad + 0.5 * d * dx);
          if (k == 0) {
            dE += op.bottom(i, j) * (nl.G(xn) - nl.G(x));
            if (dE > 1e-14 * (std::abs(S * x) + op.bottom(i, j))) continue;
          }
          v[id] = xn;
          E += std::min(dE, 0.0);
        }
    st.energy_history.push_back(E);
    st.sweeps = sweep;
    last_res = res;
    if (res < dp.tol && E_start - E < dp.energy_tol) return st;
  }
  throw ConvergenceError("minimize_energy: residual " + format_number(last_res) + " above tolerance after " +
                             std::to_string(dp.max_sweeps) + " sweeps",
                         st.energy_history);
}

ElResiduals euler_lagrange_residuals(const SaddleState& st, const Nonlinearity& nl) {
  const GridSpec3& g = st.v.grid;
  const Stencil op = make_stencil(g);
  std::vector<double> Av;
  op.apply(st.v.values, Av);
  ElResiduals r;
  for (int k = 0; k + 1 < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = j + 1; i + 1 < g.ns(); ++i) {
        const std::size_t id = g.index(i, j, k);
        const double x = st.v.values[id];
        if (x <= 0 || x >= 1) continue;  // constraint active
        if (k > 0) r.interior = std::max(r.interior, std::abs(Av[id] / op.mass(i, j, k)));
        else r.bottom = std::max(r.bottom, std::abs(Av[id] / op.bottom(i, j) - nl.f(x)));
      }
  return r;
}

Field3 odd_reflect(const Field3& v) {
  const GridSpec3& g = v.grid;
  require_square(g, "odd_reflect");
  Field3 out = v;
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = 0; i <= j; ++i) out.at(i, j, k) = i == j ? 0.0 : -v.at(j, i, k);
  return out;
}

SaddleState odd_reflect(const SaddleState& st) {
  if (st.reflected) throw PreconditionError("odd_reflect: state already reflected");
  SaddleState out = st;
  out.v = odd_reflect(st.v);
  out.reflected = true;
  return out;
}

Field3 comparison_candidate(const Field3& v_ref, double S, double gamma, double beta) {
  const GridSpec3& g = v_ref.grid;
  if (!(0.5 <= beta && beta < gamma && gamma < 1)) {
    throw PreconditionError("comparison_candidate: need 1/2 <= beta < gamma < 1");
  }
  if (!(S + 2 < g.s_max)) throw PreconditionError("comparison_candidate: need S + 2 < R");
  const double top = std::pow(S, gamma), plateau = top - std::pow(S, beta);
  if (top > g.lambda_max) throw PreconditionError("comparison_candidate: S^gamma exceeds the grid height");
  if (plateau <= 0) throw PreconditionError("comparison_candidate: S^gamma - S^beta must be positive");
  auto xi = [&](double lam) {
    if (lam <= plateau) return 1.0;
    if (lam >= top) return 0.0;
    return (std::log(top) - std::log(lam)) / (std::log(top) - std::log(plateau));
  };
  Field3 w = v_ref;
  for (int k = 0; k < g.nl(); ++k) {
    const double x = xi(g.lambda(k));
    if (x == 0) continue;
    for (int j = 0; j < g.nt(); ++j)
      for (int i = j; i < g.ns(); ++i) {
        const double s = g.s(i), t = g.t(j);
        const double eta = std::clamp(S - std::hypot(s, t), 0.0, 1.0);
        const double vr = v_ref.at(i, j, k);
        // xi g + (1 - xi) v_ref with g = eta min{1, z} + (1 - eta) v_ref
        w.at(i, j, k) = vr + x * eta * (std::min(1.0, (s - t) / std::sqrt(2.0)) - vr);
      }
  }
  return w;
}

double cone_stability_form(const SaddleState& st, const Nonlinearity& nl, const Field3& xi) {
  const GridSpec3& g = st.v.grid;
  if (!xi.grid.same_as(g)) throw PreconditionError("cone_stability_form: xi on another grid");
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = 0; i <= std::min(j, g.ns() - 1); ++i)
        if (xi.at(i, j, k) != 0.0) {
          throw PreconditionError("cone_stability_form: xi must vanish on the cone and outside the wedge");
        }
  return quadratic_form(st.v, xi, nl);
}

}  // namespace saddle
