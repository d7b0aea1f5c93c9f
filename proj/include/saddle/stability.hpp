#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "saddle/model.hpp"

namespace saddle {

// sum over edges c (d xi)^2 - sum over bottom nodes B f'(v) xi^2, on the grid of xi.
// xi must vanish on the outer faces s = s_max, t = t_max, lambda = lambda_max.
double quadratic_form(const Field3& v, const Field3& xi, const Nonlinearity& nl);
// sum mass xi^2
double discrete_norm2(const Field3& xi);

// Same form in (y, z, lambda) with weight 2^{1-m} (y^2 - z^2)^{m-1} over |z| < y, by
// Gauss-Legendre quadrature in (y, z/y, lambda) and centered differences of xi.
struct YZFormInput {
  int m = 1;
  std::function<double(double y, double z, double lambda)> xi;
  std::function<double(double y, double z)> potential;  // f'(v) at lambda = 0
  double y_max = 0, lambda_max = 0;
  int cells_y = 64, cells_tau = 32, cells_lambda = 64;
  int order = 4;
};
double quadratic_form_yz(const YZFormInput& in);

struct ComparisonReport {
  std::vector<double> q_v, q_w;
  double worst_excess = 0;  // max (Q_v - Q_w)
  bool holds = false;
};
ComparisonReport comparison_monotonicity(const Field3& v, const Field3& w, const Nonlinearity& nl,
                                         const std::vector<Field3>& xi_samples, double tol = 1e-8);

// Random xi with zero outer faces; wedge_only also zeroes t >= s.
Field3 random_test_field(const GridSpec3& g, std::uint64_t seed, bool wedge_only, double smooth_cells = 4);

double eta2(double lambda, double N);

struct TestFunctionSpec {
  double a = 1, N = 1;
  double rho1 = 1, rho2 = 2;
  std::function<double(double)> phi;  // supported in [rho1, rho2]
  std::string phi_id;

  void validate() const;
};

TestFunctionSpec sin_bump_spec(double a, double N, double rho1, double rho2);
// discrete Hardy minimizer on [rho1, rho2]
TestFunctionSpec hardy_spec(int m, double a, double N, double rho1, double rho2);

// phi(y/a) eta2(lambda) d_z v on the odd-reflected field, zero on the outer faces.
Field3 build_test_function(const Field3& vbar, const TestFunctionSpec& spec);

enum class Verdict { instability_certificate, inconclusive };
std::string to_string(Verdict v);

struct StabilityRow {
  double a, N, rho1, rho2;
  std::string phi_id;
  double q, q_scaled, norm2;
};

struct StabilityReport {
  double q = 0, q_scaled = 0, norm2 = 0;
  StabilityRow best{};
  std::vector<StabilityRow> rows;  // lexicographic in (phi_id, rho1, rho2, a, N)
  double certificate_margin = 1e-4;
  Verdict verdict = Verdict::inconclusive;
};

struct SupportWindow {
  double rho1, rho2;
};

struct SearchOptions {
  std::vector<std::string> families{"hardy", "sin"};
  std::vector<SupportWindow> windows;
  double certificate_margin = 1e-4;
  int threads = 1;
};

StabilityReport instability_search(const Field3& vbar, const Nonlinearity& nl, const std::vector<double>& a_list,
                                   const std::vector<double>& N_list, const SearchOptions& opt);
void write_stability_csv(std::ostream& os, const StabilityReport& r);

double hardy_integral(int m, const std::vector<double>& rho, const std::vector<double>& phi);

struct HardyResult {
  double value = 0;
  std::vector<double> rho, phi;  // eigenvector, max-normalized, zero at the ends
  int iterations = 0;
};
HardyResult hardy_rayleigh(int m, double rho_min, double rho_max, int nodes, double tol = 1e-12, int max_iter = 10000);
double hardy_rayleigh_min(int m, double rho_min, double rho_max, int nodes);

enum class DimensionVerdict { hardy_nonnegative, negative_direction_exists };
std::string to_string(DimensionVerdict d);
DimensionVerdict dimension_criterion(int n);

}  // namespace saddle
