#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace saddle {

// One factor of the separable weighted operator: weight x^p on a uniform axis.
// edge[i] couples nodes i and i+1, mass[i] integrates x^p over the dual cell of node i.
struct Axis {
  int n = 1;
  double h = 1;
  int p = 0;
  std::vector<double> edge, mass;
};

Axis make_axis(int n, double h, int p);
Axis trivial_axis();

// Weighted Laplacian on a tensor grid, axis 0 fastest, axis 2 is lambda.
// v^T A v is the discrete Dirichlet energy (times 2); A is an M-matrix.
struct Stencil {
  std::array<Axis, 3> ax;

  std::size_t size() const { return std::size_t(ax[0].n) * ax[1].n * ax[2].n; }
  std::size_t index(int i, int j, int k) const { return (std::size_t(k) * ax[1].n + j) * ax[0].n + i; }
  double cx(int i, int j, int k) const { return ax[0].edge[i] * ax[1].mass[j] * ax[2].mass[k]; }
  double cy(int i, int j, int k) const { return ax[0].mass[i] * ax[1].edge[j] * ax[2].mass[k]; }
  double cz(int i, int j, int k) const { return ax[0].mass[i] * ax[1].mass[j] * ax[2].edge[k]; }
  double mass(int i, int j, int k) const { return ax[0].mass[i] * ax[1].mass[j] * ax[2].mass[k]; }
  double bottom(int i, int j) const { return ax[0].mass[i] * ax[1].mass[j]; }

  void apply(const std::vector<double>& v, std::vector<double>& out) const;
  std::vector<double> diagonal() const;
  double energy(const std::vector<double>& v) const;  // v^T A v
};

// (A + diag(shift)) x = b on free nodes, x fixed where fixed[n] != 0.
struct System {
  Stencil op;
  std::vector<std::uint8_t> fixed;
  std::vector<double> shift;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0;  // final relative residual
  bool converged = false;
};

struct MultigridOptions {
  int pre = 2, post = 2;
  std::size_t coarse_limit = 2000;
  int coarse_sweeps = 60;
};

class Multigrid {
 public:
  explicit Multigrid(const System& sys, MultigridOptions opt = {});

  // x carries Dirichlet values on fixed nodes and the initial guess elsewhere.
  SolveStats solve(const std::vector<double>& b, std::vector<double>& x, double rtol, int max_iter = 200) const;
  // residual b - (A+D)x, zeroed on fixed nodes
  void residual(const std::vector<double>& b, const std::vector<double>& x, std::vector<double>& r) const;
  void precondition(const std::vector<double>& r, std::vector<double>& z) const;
  int levels() const { return int(levels_.size()); }

 private:
  struct Level {
    System sys;
    std::vector<double> diag;
    std::array<bool, 3> coarsened{false, false, false};
    // dense Cholesky of the coarsest free block
    std::vector<std::size_t> free_nodes;
    std::vector<double> chol;
  };
  void vcycle(std::size_t l, const std::vector<double>& b, std::vector<double>& x) const;
  void smooth(const Level& lv, const std::vector<double>& b, std::vector<double>& x, bool forward) const;
  void coarse_solve(const Level& lv, const std::vector<double>& b, std::vector<double>& x) const;
  void restrict_to(std::size_t l, const std::vector<double>& fine, std::vector<double>& coarse) const;
  void prolong_add(std::size_t l, const std::vector<double>& coarse, std::vector<double>& fine) const;
  void apply_full(const Level& lv, const std::vector<double>& x, std::vector<double>& out) const;

  std::vector<Level> levels_;
  MultigridOptions opt_;
};

}  // namespace saddle
