#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "saddle/errors.hpp"

namespace saddle {

// (x, lambda) half-plane box. Fields store only x >= 0; the odd extension in x is implied.
struct GridSpec2 {
  double x_max = 0, lambda_max = 0;
  double h_x = 0, h_lambda = 0;

  int nx() const;  // nodes on [0, x_max]
  int nl() const;
  double x(int i) const { return i * h_x; }
  double lambda(int k) const { return k * h_lambda; }
  std::size_t size() const { return std::size_t(nx()) * nl(); }
  void validate() const;
};

// (s, t, lambda) box [0,s_max] x [0,t_max] x [0,lambda_max].
struct GridSpec3 {
  int m = 1;
  double s_max = 0, t_max = 0, lambda_max = 0;
  double h_s = 0, h_t = 0, h_lambda = 0;

  int ns() const;
  int nt() const;
  int nl() const;
  double s(int i) const { return i * h_s; }
  double t(int j) const { return j * h_t; }
  double lambda(int k) const { return k * h_lambda; }
  std::size_t size() const { return std::size_t(ns()) * nt() * nl(); }
  std::size_t index(int i, int j, int k) const {
    return (std::size_t(k) * nt() + j) * ns() + i;
  }
  void validate() const;
  bool same_as(const GridSpec3& o) const;
};

// Square box of radius R and height L with spacing close to h. The lambda
// spacing is adjusted so the number of cells is a multiple of 4.
GridSpec3 make_grid3(int m, double R, double L, double h);

struct Field2 {
  GridSpec2 grid;
  std::vector<double> values;

  Field2() = default;
  explicit Field2(const GridSpec2& g, double fill = 0.0);
  double& at(int i, int k) { return values[std::size_t(k) * grid.nx() + i]; }
  double at(int i, int k) const { return values[std::size_t(k) * grid.nx() + i]; }
  bool finite() const;
};

struct Field3 {
  GridSpec3 grid;
  std::vector<double> values;

  Field3() = default;
  explicit Field3(const GridSpec3& g, double fill = 0.0);
  double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
  bool finite() const;
  double max_abs() const;
};

enum class NonlinearityKind { allen_cahn, peierls_nabarro, custom };

struct FlagRecord {
  bool value = false;
  double worst = 0;        // largest violation seen
  double worst_at = 0;     // sample where it occurred
};

struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::custom;
  std::string name;
  std::function<double(double)> f, f_prime, G;
  FlagRecord odd, G_double_well, f_prime_decreasing, consistent;
  double sup_abs_f_prime = 0;  // over sampled [-1,1]

  double fp1() const { return f_prime(1.0); }
};

struct CustomFunctions {
  std::function<double(double)> f, f_prime, G;
};

Nonlinearity make_nonlinearity(NonlinearityKind kind, const CustomFunctions& custom = {});
Nonlinearity make_nonlinearity(const std::string& name);
std::string to_string(NonlinearityKind k);

std::pair<double, double> st_coordinates(const std::vector<double>& point);
std::pair<double, double> yz_coordinates(double s, double t);
std::pair<double, double> st_from_yz(double y, double z);
double cone_distance(double s, double t);

struct LayerProfile {
  GridSpec2 grid;
  Field2 v0;                // x >= 0 half of the extension
  std::vector<double> u0;   // trace at lambda = 0, x >= 0
  std::string nonlinearity;
  bool normalized = true;   // u0(0) = 0
  int iterations = 0;
  std::vector<double> history;
};

}  // namespace saddle
