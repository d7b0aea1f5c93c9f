#include "saddle/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <ostream>
#include <random>
#include <thread>
#include <tuple>

#include "saddle/extension.hpp"
#include "saddle/saddle.hpp"

namespace saddle {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_zero_outer(const Field3& xi, const char* who) {
  const GridSpec3& g = xi.grid;
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();
  for (int k = 0; k < nl; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        if (i != ns - 1 && j != nt - 1 && k != nl - 1) continue;
        if (xi.at(i, j, k) != 0.0) throw PreconditionError(std::string(who) + ": xi must vanish on the outer faces");
      }
}

// Gauss-Legendre nodes and weights on [-1, 1]
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1, p1 = p2;
      }
      if (n == 1) p0 = 1, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
}

double phi_interp(const std::vector<double>& rho, const std::vector<double>& phi, double r) {
  if (r <= rho.front() || r >= rho.back()) return 0.0;
  const auto it = std::upper_bound(rho.begin(), rho.end(), r);
  const std::size_t i = std::size_t(it - rho.begin()) - 1;
  const double a = (r - rho[i]) / (rho[i + 1] - rho[i]);
  return (1 - a) * phi[i] + a * phi[i + 1];
}

// d_z v on the odd-reflected field by centered differences; d_s = 0 at s = 0 and d_t = 0 at t = 0
Field3 dz_field(const Field3& vbar) {
  const Field3 v = odd_reflect(vbar);
  const GridSpec3& g = v.grid;
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();
  Field3 dz(g, 0.0);
  const double hs = g.h_s, ht = g.h_t;
  for (int k = 0; k < nl; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        double ds = 0, dt = 0;
        if (i == ns - 1) ds = (v.at(i, j, k) - v.at(i - 1, j, k)) / hs;
        else if (i > 0) ds = (v.at(i + 1, j, k) - v.at(i - 1, j, k)) / (2 * hs);
        if (j == nt - 1) dt = (v.at(i, j, k) - v.at(i, j - 1, k)) / ht;
        else if (j > 0) dt = (v.at(i, j + 1, k) - v.at(i, j - 1, k)) / (2 * ht);
        dz.at(i, j, k) = (ds - dt) / std::sqrt(2.0);
      }
  return dz;
}

Field3 test_function_from_dz(const Field3& dz, const TestFunctionSpec& spec) {
  spec.validate();
  const GridSpec3& g = dz.grid;
  const double y_need = std::sqrt(2.0) * spec.a * spec.rho2, l_need = spec.N + 1;
  if (y_need > g.s_max + 1e-12 || y_need > g.t_max + 1e-12 || l_need > g.lambda_max + 1e-12) {
    throw DomainError("build_test_function: support needs s,t extent " + format_number(y_need) +
                      " and lambda extent " + format_number(l_need));
  }
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();
  Field3 xi(g, 0.0);
  for (int k = 0; k + 1 < nl; ++k) {
    const double e = eta2(g.lambda(k), spec.N);
    if (e == 0) continue;
    for (int j = 0; j + 1 < nt; ++j)
      for (int i = 0; i + 1 < ns; ++i) {
        const double y = (g.s(i) + g.t(j)) / std::sqrt(2.0);
        const double p = spec.phi(y / spec.a);
        if (p != 0) xi.at(i, j, k) = p * e * dz.at(i, j, k);
      }
  }
  return xi;
}

}  // namespace

double quadratic_form(const Field3& v, const Field3& xi, const Nonlinearity& nl) {
  if (!v.grid.same_as(xi.grid)) throw PreconditionError("quadratic_form: v and xi on different grids");
  require_zero_outer(xi, "quadratic_form");
  const GridSpec3& g = xi.grid;
  const Stencil op = make_stencil(g);
  double q = op.energy(xi.values);
  for (int j = 0; j < g.nt(); ++j)
    for (int i = 0; i < g.ns(); ++i) {
      const double x = xi.at(i, j, 0);
      if (x != 0) q -= op.bottom(i, j) * nl.f_prime(v.at(i, j, 0)) * x * x;
    }
  return q;
}

double discrete_norm2(const Field3& xi) {
  const GridSpec3& g = xi.grid;
  const Stencil op = make_stencil(g);
  double n = 0;
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        const double x = xi.at(i, j, k);
        n += op.mass(i, j, k) * x * x;
      }
  return n;
}

double quadratic_form_yz(const YZFormInput& in) {
  if (in.m < 1 || !in.xi || !in.potential) throw PreconditionError("quadratic_form_yz: incomplete input");
  std::vector<double> gx, gw;
  gauss_legendre(in.order, gx, gw);
  const double hy = in.y_max / in.cells_y, htau = 2.0 / in.cells_tau, hl = in.lambda_max / in.cells_lambda;
  const double c = std::pow(2.0, 1 - in.m);
  const double d = 1e-5;
  auto grad2 = [&](double y, double z, double l) {
    const double gy = (in.xi(y + d, z, l) - in.xi(y - d, z, l)) / (2 * d);
    const double gz = (in.xi(y, z + d, l) - in.xi(y, z - d, l)) / (2 * d);
    const double gl = (in.xi(y, z, l + d) - in.xi(y, z, std::max(0.0, l - d))) / (d + std::min(l, d));
    return gy * gy + gz * gz + gl * gl;
  };
  double vol = 0, bot = 0;
  for (int cy = 0; cy < in.cells_y; ++cy)
    for (int qy = 0; qy < in.order; ++qy) {
      const double y = (cy + 0.5 * (gx[qy] + 1)) * hy, wy = 0.5 * hy * gw[qy];
      for (int ct = 0; ct < in.cells_tau; ++ct)
        for (int qt = 0; qt < in.order; ++qt) {
          const double tau = -1 + (ct + 0.5 * (gx[qt] + 1)) * htau, wt = 0.5 * htau * gw[qt];
          const double z = y * tau;
          const double wgt = c * std::pow(y * y - z * z, in.m - 1) * y * wy * wt;
          const double x0 = in.xi(y, z, 0.0);
          bot += wgt * in.potential(y, z) * x0 * x0;
          for (int cl = 0; cl < in.cells_lambda; ++cl)
            for (int ql = 0; ql < in.order; ++ql) {
              const double l = (cl + 0.5 * (gx[ql] + 1)) * hl, wl = 0.5 * hl * gw[ql];
              vol += wgt * wl * grad2(y, z, l);
            }
        }
    }
  return vol - bot;
}

ComparisonReport comparison_monotonicity(const Field3& v, const Field3& w, const Nonlinearity& nl,
                                         const std::vector<Field3>& xi_samples, double tol) {
  if (!v.grid.same_as(w.grid)) throw PreconditionError("comparison_monotonicity: v and w on different grids");
  if (!nl.f_prime_decreasing.value) {
    throw PreconditionError("comparison_monotonicity: f' must be nonincreasing on [0,1]");
  }
  for (std::size_t n = 0; n < v.values.size(); ++n) {
    const double a = std::abs(v.values[n]), b = std::abs(w.values[n]);
    if (a > b + 1e-12 || b > 1 + 1e-12) throw PreconditionError("comparison_monotonicity: need |v| <= |w| <= 1");
  }
  ComparisonReport r;
  r.worst_excess = -1e300;
  for (const Field3& xi : xi_samples) {
    r.q_v.push_back(quadratic_form(v, xi, nl));
    r.q_w.push_back(quadratic_form(w, xi, nl));
    r.worst_excess = std::max(r.worst_excess, r.q_v.back() - r.q_w.back());
  }
  if (xi_samples.empty()) r.worst_excess = 0;
  r.holds = r.worst_excess <= tol;
  return r;
}

Field3 random_test_field(const GridSpec3& g, std::uint64_t seed, bool wedge_only, double smooth_cells) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double kmax = kPi / (smooth_cells * std::max({g.h_s, g.h_t, g.h_lambda}));
  struct Mode {
    double c, ks, kt, kl, ps, pt, pl;
  };
  std::vector<Mode> modes(8);
  for (Mode& md : modes) {
    md = {U(rng), kmax * std::abs(U(rng)), kmax * std::abs(U(rng)), kmax * std::abs(U(rng)),
          kPi * U(rng), kPi * U(rng), kPi * U(rng)};
  }
  Field3 xi(g, 0.0);
  const int ns = g.ns(), nt = g.nt(), nl = g.nl();
  for (int k = 0; k + 1 < nl; ++k)
    for (int j = 0; j + 1 < nt; ++j)
      for (int i = 0; i + 1 < ns; ++i) {
        if (wedge_only && j >= i) continue;
        const double s = g.s(i), t = g.t(j), l = g.lambda(k);
        double x = 0;
        for (const Mode& md : modes)
          x += md.c * std::cos(md.ks * s + md.ps) * std::cos(md.kt * t + md.pt) * std::cos(md.kl * l + md.pl);
        x *= (1 - s / g.s_max) * (1 - t / g.t_max) * (1 - l / g.lambda_max);
        if (wedge_only) x *= std::min(1.0, (s - t) / std::sqrt(2.0));
        xi.at(i, j, k) = x;
      }
  return xi;
}

double eta2(double lambda, double N) { return std::clamp(N + 1 - lambda, 0.0, 1.0); }

void TestFunctionSpec::validate() const {
  if (!(a > 0) || !(N > 0)) throw PreconditionError("TestFunctionSpec: a and N must be positive");
  if (!(0 < rho1 && rho1 < rho2 && std::isfinite(rho2))) throw PreconditionError("TestFunctionSpec: need 0 < rho1 < rho2");
  if (!phi) throw PreconditionError("TestFunctionSpec: phi missing");
}

TestFunctionSpec sin_bump_spec(double a, double N, double rho1, double rho2) {
  TestFunctionSpec s{a, N, rho1, rho2, nullptr, "sin"};
  s.phi = [rho1, rho2](double r) {
    if (r <= rho1 || r >= rho2) return 0.0;
    return std::sin(kPi * (r - rho1) / (rho2 - rho1));
  };
  return s;
}

TestFunctionSpec hardy_spec(int m, double a, double N, double rho1, double rho2) {
  TestFunctionSpec s{a, N, rho1, rho2, nullptr, "hardy"};
  auto h = std::make_shared<HardyResult>(hardy_rayleigh(m, rho1, rho2, 801));
  s.phi = [h](double r) { return phi_interp(h->rho, h->phi, r); };
  return s;
}

Field3 build_test_function(const Field3& vbar, const TestFunctionSpec& spec) {
  return test_function_from_dz(dz_field(vbar), spec);
}

std::string to_string(Verdict v) {
  return v == Verdict::instability_certificate ? "instability_certificate" : "inconclusive";
}

StabilityReport instability_search(const Field3& vbar, const Nonlinearity& nl, const std::vector<double>& a_list,
                                   const std::vector<double>& N_list, const SearchOptions& opt) {
  const int m = vbar.grid.m;
  if (m < 2 || m > 4) throw PreconditionError("instability_search: m must be 2, 3 or 4");
  if (a_list.empty() || N_list.empty() || opt.windows.empty() || opt.families.empty()) {
    throw PreconditionError("instability_search: empty parameter list");
  }
  struct Job {
    std::string fam;
    double rho1, rho2, a, N;
  };
  std::vector<Job> jobs;
  for (const auto& fam : opt.families) {
    if (fam != "hardy" && fam != "sin") throw ValidationError("instability_search: unknown phi family " + fam);
    for (const auto& w : opt.windows)
      for (double a : a_list)
        for (double N : N_list) jobs.push_back({fam, w.rho1, w.rho2, a, N});
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& x, const Job& y) {
    return std::tie(x.fam, x.rho1, x.rho2, x.a, x.N) < std::tie(y.fam, y.rho1, y.rho2, y.a, y.N);
  });

  const Field3 dz = dz_field(vbar);
  const Field3 v = odd_reflect(vbar);
  std::vector<StabilityRow> rows(jobs.size());
  std::vector<std::exception_ptr> errs(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n; (n = next++) < jobs.size();) {
      const Job& jb = jobs[n];
      try {
        TestFunctionSpec spec = jb.fam == "hardy" ? hardy_spec(m, jb.a, jb.N, jb.rho1, jb.rho2)
                                                  : sin_bump_spec(jb.a, jb.N, jb.rho1, jb.rho2);
        const Field3 xi = test_function_from_dz(dz, spec);
        const double q = quadratic_form(v, xi, nl), n2 = discrete_norm2(xi);
        rows[n] = {jb.a, jb.N, jb.rho1, jb.rho2, jb.fam, q, q / (std::pow(jb.a, 2 * m - 3) * jb.N), n2};
      } catch (...) {
        errs[n] = std::current_exception();
      }
    }
  };
  const int nth = std::max(1, std::min<int>(opt.threads, int(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nth; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  StabilityReport r;
  r.rows = rows;
  r.certificate_margin = opt.certificate_margin;
  std::size_t best = 0;
  double best_ratio = 1e300;
  r.q_scaled = 1e300;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const double ratio = rows[n].norm2 > 0 ? rows[n].q / rows[n].norm2 : 0.0;
    if (ratio < best_ratio) best_ratio = ratio, best = n;
    r.q_scaled = std::min(r.q_scaled, rows[n].q_scaled);
  }
  r.best = rows[best];
  r.q = rows[best].q;
  r.norm2 = rows[best].norm2;
  r.verdict = r.norm2 > 0 && r.q < -opt.certificate_margin * r.norm2 ? Verdict::instability_certificate
                                                                      : Verdict::inconclusive;
  return r;
}

void write_stability_csv(std::ostream& os, const StabilityReport& r) {
  os << "a,N,phi_id,rho1,rho2,Q,Q_scaled,norm2\n";
  for (const auto& row : r.rows) {
    os << format_number(row.a) << ',' << format_number(row.N) << ',' << row.phi_id << ',' << format_number(row.rho1)
       << ',' << format_number(row.rho2) << ',' << format_number(row.q) << ',' << format_number(row.q_scaled) << ','
       << format_number(row.norm2) << '\n';
  }
}

double hardy_integral(int m, const std::vector<double>& rho, const std::vector<double>& phi) {
  const std::size_t n = rho.size();
  if (n < 3 || phi.size() != n) throw DimensionError("hardy_integral: need matching samples, at least 3");
  if (!(rho.front() > 0)) throw PreconditionError("hardy_integral: support touches rho = 0");
  for (std::size_t i = 1; i < n; ++i)
    if (!(rho[i] > rho[i - 1])) throw PreconditionError("hardy_integral: rho must increase");
  double scale = 0;
  for (double p : phi) scale = std::max(scale, std::abs(p));
  if (std::abs(phi.front()) > 1e-12 * scale || std::abs(phi.back()) > 1e-12 * scale) {
    throw PreconditionError("hardy_integral: phi must vanish at both ends of the sampled range");
  }
  std::vector<double> F(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d;
    if (i == 0) d = (phi[1] - phi[0]) / (rho[1] - rho[0]);
    else if (i == n - 1) d = (phi[n - 1] - phi[n - 2]) / (rho[n - 1] - rho[n - 2]);
    else {
      const double h0 = rho[i] - rho[i - 1], h1 = rho[i + 1] - rho[i];
      d = (h0 * h0 * (phi[i + 1] - phi[i]) + h1 * h1 * (phi[i] - phi[i - 1])) / (h0 * h1 * (h0 + h1));
    }
    const double r = rho[i];
    F[i] = std::pow(r, 2 * (m - 1)) * (d * d - 2.0 * (m - 1) / (r * r) * phi[i] * phi[i]);
  }
  double s = 0;
  for (std::size_t i = 1; i < n; ++i) s += 0.5 * (F[i] + F[i - 1]) * (rho[i] - rho[i - 1]);
  return s;
}

HardyResult hardy_rayleigh(int m, double rho_min, double rho_max, int nodes, double tol, int max_iter) {
  if (!(0 < rho_min && rho_min < rho_max)) throw PreconditionError("hardy_rayleigh_min: need 0 < rho_min < rho_max");
  if (nodes < 4) throw PreconditionError("hardy_rayleigh_min: need at least 4 nodes");
  const int n = nodes;
  HardyResult res;
  res.rho.resize(n);
  const double lr = std::log(rho_max / rho_min);
  for (int i = 0; i < n; ++i) res.rho[i] = rho_min * std::exp(lr * i / (n - 1));
  res.rho.back() = rho_max;
  const std::vector<double>& r = res.rho;
  const int p = 2 * (m - 1);
  // stiffness: exact element integrals of rho^p; mass: lumped rho^{p-2}
  std::vector<double> ke(n - 1), M(n, 0.0);
  for (int e = 0; e + 1 < n; ++e) {
    const double h = r[e + 1] - r[e];
    ke[e] = (std::pow(r[e + 1], p + 1) - std::pow(r[e], p + 1)) / (p + 1) / (h * h);
    M[e] += 0.5 * h * std::pow(r[e], p - 2);
    M[e + 1] += 0.5 * h * std::pow(r[e + 1], p - 2);
  }
  // unknowns 1..n-2
  const int u = n - 2;
  std::vector<double> diag(u), off(u > 0 ? u - 1 : 0);
  for (int q = 0; q < u; ++q) diag[q] = ke[q] + ke[q + 1];
  for (int q = 0; q + 1 < u; ++q) off[q] = -ke[q + 1];
  // Thomas factorization
  std::vector<double> cp(u), dp(u);
  auto solve = [&](const std::vector<double>& b, std::vector<double>& x) {
    cp[0] = u > 1 ? off[0] / diag[0] : 0;
    dp[0] = b[0] / diag[0];
    for (int q = 1; q < u; ++q) {
      const double den = diag[q] - off[q - 1] * cp[q - 1];
      cp[q] = q + 1 < u ? off[q] / den : 0;
      dp[q] = (b[q] - off[q - 1] * dp[q - 1]) / den;
    }
    x[u - 1] = dp[u - 1];
    for (int q = u - 2; q >= 0; --q) x[q] = dp[q] - cp[q] * x[q + 1];
  };
  auto rayleigh = [&](const std::vector<double>& x) {
    double num = 0, den = 0;
    for (int q = 0; q < u; ++q) {
      double Kx = diag[q] * x[q];
      if (q > 0) Kx += off[q - 1] * x[q - 1];
      if (q + 1 < u) Kx += off[q] * x[q + 1];
      num += x[q] * Kx;
      den += M[q + 1] * x[q] * x[q];
    }
    return num / den;
  };
  std::vector<double> x(u), b(u);
  for (int q = 0; q < u; ++q) x[q] = std::sin(kPi * (q + 1) / (n - 1));
  double mu = rayleigh(x);
  for (int it = 1; it <= max_iter; ++it) {
    for (int q = 0; q < u; ++q) b[q] = M[q + 1] * x[q];
    solve(b, x);
    double mx = 0;
    for (double y : x) mx = std::max(mx, std::abs(y));
    for (double& y : x) y /= mx;
    const double mu_new = rayleigh(x);
    res.iterations = it;
    if (std::abs(mu_new - mu) <= tol * std::abs(mu_new)) {
      mu = mu_new;
      res.value = mu;
      res.phi.assign(n, 0.0);
      double sg = 0;
      for (double y : x) sg += y;
      for (int q = 0; q < u; ++q) res.phi[q + 1] = sg < 0 ? -x[q] : x[q];
      return res;
    }
    mu = mu_new;
  }
  throw ConvergenceError("hardy_rayleigh_min: inverse iteration did not converge", {mu});
}

double hardy_rayleigh_min(int m, double rho_min, double rho_max, int nodes) {
  return hardy_rayleigh(m, rho_min, rho_max, nodes).value;
}

std::string to_string(DimensionVerdict d) {
  return d == DimensionVerdict::hardy_nonnegative ? "hardy_nonnegative" : "negative_direction_exists";
}

DimensionVerdict dimension_criterion(int n) {
  if (n < 2 || n % 2 != 0) throw PreconditionError("dimension_criterion: n must be an even integer >= 2");
  return n * n - 10 * n + 17 >= 0 ? DimensionVerdict::hardy_nonnegative : DimensionVerdict::negative_direction_exists;
}

}  // namespace saddle
