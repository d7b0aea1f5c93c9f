#include "saddle/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace saddle {

namespace {

int cells(double extent, double h, const char* what) {
  if (!(extent > 0) || !(h > 0)) {
    throw ValidationError(std::string(what) + ": extent and spacing must be positive");
  }
  double q = extent / h;
  double r = std::round(q);
  if (r < 1 || std::abs(q - r) > 1e-9 * std::max(1.0, q)) {
    std::ostringstream os;
    os << what << ": extent " << extent << " is not an integer multiple of spacing " << h;
    throw ValidationError(os.str());
  }
  return int(r);
}

}  // namespace

int GridSpec2::nx() const { return cells(x_max, h_x, "x") + 1; }
int GridSpec2::nl() const { return cells(lambda_max, h_lambda, "lambda") + 1; }

void GridSpec2::validate() const {
  nx();
  nl();
}

int GridSpec3::ns() const { return cells(s_max, h_s, "s") + 1; }
int GridSpec3::nt() const { return cells(t_max, h_t, "t") + 1; }
int GridSpec3::nl() const { return cells(lambda_max, h_lambda, "lambda") + 1; }

void GridSpec3::validate() const {
  if (m < 1) throw ValidationError("m must be a positive integer");
  ns();
  nt();
  nl();
  if (std::abs(h_s - h_t) > 1e-14 * h_s) {
    throw ValidationError("h_s must equal h_t so the cone s=t passes through nodes");
  }
}

bool GridSpec3::same_as(const GridSpec3& o) const {
  auto eq = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
  return m == o.m && eq(s_max, o.s_max) && eq(t_max, o.t_max) && eq(lambda_max, o.lambda_max) &&
         eq(h_s, o.h_s) && eq(h_t, o.h_t) && eq(h_lambda, o.h_lambda);
}

GridSpec3 make_grid3(int m, double R, double L, double h) {
  if (!(R > 0) || !(L > 0) || !(h > 0)) throw ValidationError("make_grid3: R, L, h must be positive");
  GridSpec3 g;
  g.m = m;
  int n = std::max(1, int(std::lround(R / h)));
  g.h_s = g.h_t = R / n;
  g.s_max = g.t_max = R;
  int nl = std::max(1, int(std::lround(L / h)));
  int q = nl >= 32 ? 8 : (nl >= 8 ? 4 : 1);
  nl = ((nl + q - 1) / q) * q;
  g.lambda_max = L;
  g.h_lambda = L / nl;
  g.validate();
  return g;
}

Field2::Field2(const GridSpec2& g, double fill) : grid(g), values(g.size(), fill) {}

bool Field2::finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Field3::Field3(const GridSpec3& g, double fill) : grid(g), values(g.size(), fill) {}

bool Field3::finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double Field3::max_abs() const {
  double r = 0;
  for (double v : values) r = std::max(r, std::abs(v));
  return r;
}

std::string to_string(NonlinearityKind k) {
  switch (k) {
    case NonlinearityKind::allen_cahn: return "allen_cahn";
    case NonlinearityKind::peierls_nabarro: return "peierls_nabarro";
    default: return "custom";
  }
}

namespace {

constexpr int kSamples = 1000;
constexpr double kFlagTol = 1e-10;

double sample(int i) { return -1.0 + 2.0 * (i + 0.5) / kSamples; }

void validate_flags(Nonlinearity& nl) {
  nl.odd = {true, 0, 0};
  nl.G_double_well = {true, 0, 0};
  nl.f_prime_decreasing = {true, 0, 0};
  nl.consistent = {true, 0, 0};
  // viol is a signed violation; the flag fails once it exceeds tol
  auto note = [](FlagRecord& r, double viol, double u, double tol) {
    if (viol > r.worst) {
      r.worst = viol;
      r.worst_at = u;
    }
    if (viol > tol) r.value = false;
  };
  note(nl.G_double_well, std::abs(nl.G(1.0)), 1.0, kFlagTol);
  note(nl.G_double_well, std::abs(nl.G(-1.0)), -1.0, kFlagTol);
  double prev_fp = 0;
  bool have_prev = false;
  nl.sup_abs_f_prime = 0;
  for (int i = 0; i < kSamples; ++i) {
    double u = sample(i);
    note(nl.odd, std::abs(nl.f(-u) + nl.f(u)), u, kFlagTol);
    // G > 0 strictly inside (-1,1)
    note(nl.G_double_well, -nl.G(u), u, -kFlagTol);
    // G' = -f by a fourth-order central difference
    const double d = 1e-3;
    double dG = (-nl.G(u + 2 * d) + 8 * nl.G(u + d) - 8 * nl.G(u - d) + nl.G(u - 2 * d)) / (12 * d);
    note(nl.consistent, std::abs(dG + nl.f(u)) / (1.0 + std::abs(nl.f(u))), u, 1e-8);
    nl.sup_abs_f_prime = std::max(nl.sup_abs_f_prime, std::abs(nl.f_prime(u)));
    if (u > 0) {
      double fp = nl.f_prime(u);
      if (have_prev) note(nl.f_prime_decreasing, fp - prev_fp, u, -kFlagTol);
      prev_fp = fp;
      have_prev = true;
    }
  }
  for (double u : {-1.0, 0.0, 1.0}) nl.sup_abs_f_prime = std::max(nl.sup_abs_f_prime, std::abs(nl.f_prime(u)));
}

}  // namespace

Nonlinearity make_nonlinearity(NonlinearityKind kind, const CustomFunctions& custom) {
  Nonlinearity nl;
  nl.kind = kind;
  nl.name = to_string(kind);
  constexpr double pi = 3.14159265358979323846;
  switch (kind) {
    case NonlinearityKind::allen_cahn:
      nl.f = [](double u) { return u - u * u * u; };
      nl.f_prime = [](double u) { return 1.0 - 3.0 * u * u; };
      nl.G = [](double u) { return 0.25 * (1 - u * u) * (1 - u * u); };
      break;
    case NonlinearityKind::peierls_nabarro:
      nl.f = [](double u) { return std::sin(pi * u); };
      nl.f_prime = [](double u) { return pi * std::cos(pi * u); };
      nl.G = [](double u) { return (1.0 + std::cos(pi * u)) / pi; };
      break;
    case NonlinearityKind::custom:
      if (!custom.f || !custom.f_prime || !custom.G) {
        throw PreconditionError("custom nonlinearity needs f, f_prime and G");
      }
      nl.f = custom.f;
      nl.f_prime = custom.f_prime;
      nl.G = custom.G;
      break;
  }
  validate_flags(nl);
  if (!nl.consistent.value) {
    std::ostringstream os;
    os << "nonlinearity '" << nl.name << "': G' != -f, worst relative mismatch " << nl.consistent.worst
       << " at u = " << nl.consistent.worst_at;
    throw ValidationError(os.str());
  }
  return nl;
}

Nonlinearity make_nonlinearity(const std::string& name) {
  if (name == "allen_cahn" || name == "ac") return make_nonlinearity(NonlinearityKind::allen_cahn);
  if (name == "peierls_nabarro" || name == "pn") return make_nonlinearity(NonlinearityKind::peierls_nabarro);
  throw ValidationError("unknown nonlinearity '" + name + "'");
}

std::pair<double, double> st_coordinates(const std::vector<double>& point) {
  if (point.empty() || point.size() % 2 != 0) {
    throw DimensionError("point must have 2m components, got " + std::to_string(point.size()));
  }
  std::size_t m = point.size() / 2;
  double s2 = 0, t2 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    s2 += point[i] * point[i];
    t2 += point[m + i] * point[m + i];
  }
  return {std::sqrt(s2), std::sqrt(t2)};
}

std::pair<double, double> yz_coordinates(double s, double t) {
  if (s < 0 || t < 0) throw DomainError("yz_coordinates: s and t must be nonnegative");
  const double r = 1.0 / std::sqrt(2.0);
  return {(s + t) * r, (s - t) * r};
}

std::pair<double, double> st_from_yz(double y, double z) {
  const double r = 1.0 / std::sqrt(2.0);
  return {(y + z) * r, (y - z) * r};
}

double cone_distance(double s, double t) {
  if (s < 0 || t < 0) throw DomainError("cone_distance: s and t must be nonnegative");
  return std::abs(s - t) / std::sqrt(2.0);
}

}  // namespace saddle
