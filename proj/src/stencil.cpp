#include "saddle/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "saddle/errors.hpp"

namespace saddle {

namespace {

double ipow(double x, int p) {
  double r = 1;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

Axis make_axis(int n, double h, int p) {
  if (n < 1 || !(h > 0) || p < 0) throw ValidationError("make_axis: bad axis");
  if (n == 1) return trivial_axis();
  Axis a;
  a.n = n;
  a.h = h;
  a.p = p;
  a.edge.resize(n - 1);
  a.mass.resize(n);
  const double L = (n - 1) * h;
  for (int i = 0; i + 1 < n; ++i) a.edge[i] = ipow((i + 0.5) * h, p) / h;
  for (int i = 0; i < n; ++i) {
    double lo = std::max(0.0, (i - 0.5) * h), hi = std::min(L, (i + 0.5) * h);
    a.mass[i] = (ipow(hi, p + 1) - ipow(lo, p + 1)) / (p + 1);
  }
  return a;
}

Axis trivial_axis() {
  Axis a;
  a.n = 1;
  a.h = 1;
  a.mass = {1.0};
  return a;
}

void Stencil::apply(const std::vector<double>& v, std::vector<double>& out) const {
  const int n0 = ax[0].n, n1 = ax[1].n, n2 = ax[2].n;
  const std::size_t s1 = n0, s2 = std::size_t(n0) * n1;
  out.assign(size(), 0.0);
  for (int k = 0; k < n2; ++k) {
    for (int j = 0; j < n1; ++j) {
      const double mjk = ax[1].mass[j] * ax[2].mass[k];
      std::size_t id = index(0, j, k);
      for (int i = 0; i < n0; ++i, ++id) {
        const double vi = v[id];
        double acc = 0;
        if (i > 0) acc += ax[0].edge[i - 1] * mjk * (vi - v[id - 1]);
        if (i + 1 < n0) acc += ax[0].edge[i] * mjk * (vi - v[id + 1]);
        if (n1 > 1) {
          const double mik = ax[0].mass[i] * ax[2].mass[k];
          if (j > 0) acc += ax[1].edge[j - 1] * mik * (vi - v[id - s1]);
          if (j + 1 < n1) acc += ax[1].edge[j] * mik * (vi - v[id + s1]);
        }
        if (n2 > 1) {
          const double mij = ax[0].mass[i] * ax[1].mass[j];
          if (k > 0) acc += ax[2].edge[k - 1] * mij * (vi - v[id - s2]);
          if (k + 1 < n2) acc += ax[2].edge[k] * mij * (vi - v[id + s2]);
        }
        out[id] = acc;
      }
    }
  }
}

std::vector<double> Stencil::diagonal() const {
  const int n0 = ax[0].n, n1 = ax[1].n, n2 = ax[2].n;
  std::vector<double> d(size(), 0.0);
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n0; ++i) {
        double acc = 0;
        if (i > 0) acc += cx(i - 1, j, k);
        if (i + 1 < n0) acc += cx(i, j, k);
        if (j > 0) acc += cy(i, j - 1, k);
        if (j + 1 < n1) acc += cy(i, j, k);
        if (k > 0) acc += cz(i, j, k - 1);
        if (k + 1 < n2) acc += cz(i, j, k);
        d[index(i, j, k)] = acc;
      }
  return d;
}

double Stencil::energy(const std::vector<double>& v) const {
  const int n0 = ax[0].n, n1 = ax[1].n, n2 = ax[2].n;
  double e = 0;
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n0; ++i) {
        const std::size_t id = index(i, j, k);
        if (i + 1 < n0) e += cx(i, j, k) * std::pow(v[id + 1] - v[id], 2);
        if (j + 1 < n1) e += cy(i, j, k) * std::pow(v[index(i, j + 1, k)] - v[id], 2);
        if (k + 1 < n2) e += cz(i, j, k) * std::pow(v[index(i, j, k + 1)] - v[id], 2);
      }
  return e;
}

Multigrid::Multigrid(const System& sys, MultigridOptions opt) : opt_(opt) {
  if (sys.fixed.size() != sys.op.size() || sys.shift.size() != sys.op.size()) {
    throw DimensionError("Multigrid: mask or shift size does not match the stencil");
  }
  for (double a : sys.shift)
    if (a < 0) throw PreconditionError("Multigrid: negative diagonal shift");
  Level top;
  top.sys = sys;
  levels_.push_back(std::move(top));
  while (true) {
    Level& f = levels_.back();
    f.diag = f.sys.op.diagonal();
    for (std::size_t n = 0; n < f.diag.size(); ++n) f.diag[n] += f.sys.shift[n];
    std::size_t nfree = std::count(f.sys.fixed.begin(), f.sys.fixed.end(), 0);
    bool any = false;
    for (int d = 0; d < 3; ++d) {
      const Axis& a = f.sys.op.ax[d];
      f.coarsened[d] = a.n >= 5 && (a.n - 1) % 2 == 0;
      any = any || f.coarsened[d];
    }
    if (!any || nfree <= opt_.coarse_limit) {
      f.coarsened = {false, false, false};
      break;
    }
    Level c;
    for (int d = 0; d < 3; ++d) {
      const Axis& a = f.sys.op.ax[d];
      c.sys.op.ax[d] = f.coarsened[d] ? make_axis((a.n - 1) / 2 + 1, 2 * a.h, a.p) : a;
    }
    const Stencil& cs = c.sys.op;
    c.sys.fixed.assign(cs.size(), 0);
    for (int k = 0; k < cs.ax[2].n; ++k)
      for (int j = 0; j < cs.ax[1].n; ++j)
        for (int i = 0; i < cs.ax[0].n; ++i) {
          int fi = f.coarsened[0] ? 2 * i : i, fj = f.coarsened[1] ? 2 * j : j, fk = f.coarsened[2] ? 2 * k : k;
          c.sys.fixed[cs.index(i, j, k)] = f.sys.fixed[f.sys.op.index(fi, fj, fk)];
        }
    levels_.push_back(std::move(c));
    std::size_t l = levels_.size() - 2;
    restrict_to(l, levels_[l].sys.shift, levels_[l + 1].sys.shift);
  }
  Level& last = levels_.back();
  for (std::size_t n = 0; n < last.sys.fixed.size(); ++n)
    if (!last.sys.fixed[n]) last.free_nodes.push_back(n);
  const std::size_t nf = last.free_nodes.size();
  if (nf > 0 && nf <= opt_.coarse_limit) {
    const Stencil& op = last.sys.op;
    std::vector<long> pos(op.size(), -1);
    for (std::size_t a = 0; a < nf; ++a) pos[last.free_nodes[a]] = long(a);
    std::vector<double>& M = last.chol;
    M.assign(nf * nf, 0.0);
    for (int k = 0; k < op.ax[2].n; ++k)
      for (int j = 0; j < op.ax[1].n; ++j)
        for (int i = 0; i < op.ax[0].n; ++i) {
          long a = pos[op.index(i, j, k)];
          if (a < 0) continue;
          M[a * nf + a] = last.diag[op.index(i, j, k)];
          auto couple = [&](int ii, int jj, int kk, double c) {
            long b = pos[op.index(ii, jj, kk)];
            if (b >= 0) M[a * nf + b] -= c;
          };
          if (i > 0) couple(i - 1, j, k, op.cx(i - 1, j, k));
          if (i + 1 < op.ax[0].n) couple(i + 1, j, k, op.cx(i, j, k));
          if (j > 0) couple(i, j - 1, k, op.cy(i, j - 1, k));
          if (j + 1 < op.ax[1].n) couple(i, j + 1, k, op.cy(i, j, k));
          if (k > 0) couple(i, j, k - 1, op.cz(i, j, k - 1));
          if (k + 1 < op.ax[2].n) couple(i, j, k + 1, op.cz(i, j, k));
        }
    double dmax = 0;
    for (std::size_t a = 0; a < nf; ++a) dmax = std::max(dmax, M[a * nf + a]);
    // in-place lower Cholesky
    for (std::size_t c = 0; c < nf; ++c) {
      double d = M[c * nf + c];
      for (std::size_t q = 0; q < c; ++q) d -= M[c * nf + q] * M[c * nf + q];
      if (!(d > 1e-13 * dmax)) {
        throw PreconditionError("singular system: no Dirichlet nodes and no Robin term");
      }
      d = std::sqrt(d);
      M[c * nf + c] = d;
      for (std::size_t r = c + 1; r < nf; ++r) {
        double v = M[r * nf + c];
        for (std::size_t q = 0; q < c; ++q) v -= M[r * nf + q] * M[c * nf + q];
        M[r * nf + c] = v / d;
      }
    }
  }
}

void Multigrid::apply_full(const Level& lv, const std::vector<double>& x, std::vector<double>& out) const {
  lv.sys.op.apply(x, out);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = lv.sys.fixed[n] ? 0.0 : out[n] + lv.sys.shift[n] * x[n];
}

void Multigrid::residual(const std::vector<double>& b, const std::vector<double>& x, std::vector<double>& r) const {
  const Level& lv = levels_.front();
  apply_full(lv, x, r);
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = lv.sys.fixed[n] ? 0.0 : b[n] - r[n];
}

void Multigrid::smooth(const Level& lv, const std::vector<double>& b, std::vector<double>& x, bool forward) const {
  const Stencil& op = lv.sys.op;
  const int n0 = op.ax[0].n, n1 = op.ax[1].n, n2 = op.ax[2].n;
  const std::size_t s1 = n0, s2 = std::size_t(n0) * n1;
  for (int pass = 0; pass < 2; ++pass) {
    const int color = forward ? pass : 1 - pass;
    for (int k = 0; k < n2; ++k)
      for (int j = 0; j < n1; ++j) {
        const double mjk = op.ax[1].mass[j] * op.ax[2].mass[k];
        int i0 = (color + j + k) & 1;
        for (int i = i0; i < n0; i += 2) {
          const std::size_t id = op.index(i, j, k);
          if (lv.sys.fixed[id]) continue;
          double acc = b[id];
          if (i > 0) acc += op.ax[0].edge[i - 1] * mjk * x[id - 1];
          if (i + 1 < n0) acc += op.ax[0].edge[i] * mjk * x[id + 1];
          if (n1 > 1) {
            const double mik = op.ax[0].mass[i] * op.ax[2].mass[k];
            if (j > 0) acc += op.ax[1].edge[j - 1] * mik * x[id - s1];
            if (j + 1 < n1) acc += op.ax[1].edge[j] * mik * x[id + s1];
          }
          if (n2 > 1) {
            const double mij = op.ax[0].mass[i] * op.ax[1].mass[j];
            if (k > 0) acc += op.ax[2].edge[k - 1] * mij * x[id - s2];
            if (k + 1 < n2) acc += op.ax[2].edge[k] * mij * x[id + s2];
          }
          x[id] = acc / lv.diag[id];
        }
      }
  }
}

void Multigrid::coarse_solve(const Level& lv, const std::vector<double>& b, std::vector<double>& x) const {
  const std::size_t nf = lv.free_nodes.size();
  if (!lv.chol.empty()) {
    std::vector<double> y(nf);
    for (std::size_t a = 0; a < nf; ++a) {
      double v = b[lv.free_nodes[a]];
      for (std::size_t q = 0; q < a; ++q) v -= lv.chol[a * nf + q] * y[q];
      y[a] = v / lv.chol[a * nf + a];
    }
    for (std::size_t a = nf; a-- > 0;) {
      double v = y[a];
      for (std::size_t q = a + 1; q < nf; ++q) v -= lv.chol[q * nf + a] * y[q];
      y[a] = v / lv.chol[a * nf + a];
    }
    for (std::size_t a = 0; a < nf; ++a) x[lv.free_nodes[a]] = y[a];
    return;
  }
  for (int s = 0; s < opt_.coarse_sweeps; ++s) smooth(lv, b, x, true);
  for (int s = 0; s < opt_.coarse_sweeps; ++s) smooth(lv, b, x, false);
}

namespace {

// fine index -> (coarse index, weight) pairs along one axis
struct Taps {
  int c[2];
  double w[2];
  int n;
};

Taps taps(int i, bool coarsened) {
  if (!coarsened) return {{i, 0}, {1.0, 0.0}, 1};
  if (i % 2 == 0) return {{i / 2, 0}, {1.0, 0.0}, 1};
  return {{i / 2, i / 2 + 1}, {0.5, 0.5}, 2};
}

}  // namespace

void Multigrid::restrict_to(std::size_t l, const std::vector<double>& fine, std::vector<double>& coarse) const {
  const Level& f = levels_[l];
  const Level& c = levels_[l + 1];
  const Stencil& fo = f.sys.op;
  const Stencil& co = c.sys.op;
  coarse.assign(co.size(), 0.0);
  for (int k = 0; k < fo.ax[2].n; ++k) {
    Taps tk = taps(k, f.coarsened[2]);
    for (int j = 0; j < fo.ax[1].n; ++j) {
      Taps tj = taps(j, f.coarsened[1]);
      for (int i = 0; i < fo.ax[0].n; ++i) {
        const double v = fine[fo.index(i, j, k)];
        if (v == 0.0) continue;
        Taps ti = taps(i, f.coarsened[0]);
        for (int a = 0; a < tk.n; ++a)
          for (int b = 0; b < tj.n; ++b)
            for (int d = 0; d < ti.n; ++d)
              coarse[co.index(ti.c[d], tj.c[b], tk.c[a])] += ti.w[d] * tj.w[b] * tk.w[a] * v;
      }
    }
  }
}

void Multigrid::prolong_add(std::size_t l, const std::vector<double>& coarse, std::vector<double>& fine) const {
  const Level& f = levels_[l];
  const Level& c = levels_[l + 1];
  const Stencil& fo = f.sys.op;
  const Stencil& co = c.sys.op;
  for (int k = 0; k < fo.ax[2].n; ++k) {
    Taps tk = taps(k, f.coarsened[2]);
    for (int j = 0; j < fo.ax[1].n; ++j) {
      Taps tj = taps(j, f.coarsened[1]);
      for (int i = 0; i < fo.ax[0].n; ++i) {
        const std::size_t id = fo.index(i, j, k);
        if (f.sys.fixed[id]) continue;
        Taps ti = taps(i, f.coarsened[0]);
        double acc = 0;
        for (int a = 0; a < tk.n; ++a)
          for (int b = 0; b < tj.n; ++b)
            for (int d = 0; d < ti.n; ++d) acc += ti.w[d] * tj.w[b] * tk.w[a] * coarse[co.index(ti.c[d], tj.c[b], tk.c[a])];
        fine[id] += acc;
      }
    }
  }
}

void Multigrid::vcycle(std::size_t l, const std::vector<double>& b, std::vector<double>& x) const {
  const Level& lv = levels_[l];
  if (l + 1 == levels_.size()) {
    coarse_solve(lv, b, x);
    return;
  }
  for (int s = 0; s < opt_.pre; ++s) smooth(lv, b, x, true);
  std::vector<double> r;
  apply_full(lv, x, r);
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = lv.sys.fixed[n] ? 0.0 : b[n] - r[n];
  std::vector<double> rc, xc;
  restrict_to(l, r, rc);
  const Level& c = levels_[l + 1];
  for (std::size_t n = 0; n < rc.size(); ++n)
    if (c.sys.fixed[n]) rc[n] = 0.0;
  xc.assign(rc.size(), 0.0);
  vcycle(l + 1, rc, xc);
  prolong_add(l, xc, x);
  for (int s = 0; s < opt_.post; ++s) smooth(lv, b, x, false);
}

void Multigrid::precondition(const std::vector<double>& r, std::vector<double>& z) const {
  z.assign(r.size(), 0.0);
  vcycle(0, r, z);
}

SolveStats Multigrid::solve(const std::vector<double>& b, std::vector<double>& x, double rtol, int max_iter) const {
  const Level& lv = levels_.front();
  SolveStats st;
  std::vector<double> r, z, p, q;
  residual(b, x, r);
  double bn = 0;
  for (std::size_t n = 0; n < b.size(); ++n)
    if (!lv.sys.fixed[n]) bn += b[n] * b[n];
  bn = std::sqrt(bn);
  const double r0 = std::sqrt(dot(r, r));
  const double ref = std::max(bn, r0);
  if (ref == 0.0 || r0 <= rtol * ref) {
    st.converged = true;
    st.residual = ref == 0.0 ? 0.0 : r0 / ref;
    return st;
  }
  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    apply_full(lv, p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t n = 0; n < x.size(); ++n) {
      x[n] += alpha * p[n];
      r[n] -= alpha * q[n];
    }
    const double rn = std::sqrt(dot(r, r));
    st.iterations = it;
    st.residual = rn / ref;
    if (rn <= rtol * ref) {
      st.converged = true;
      return st;
    }
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t n = 0; n < p.size(); ++n) p[n] = z[n] + beta * p[n];
  }
  return st;
}

}  // namespace saddle
