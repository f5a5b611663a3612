#pragma once

// Independent numerical reference: a direct transcription of the energy
// problem solved as a banded convex QP, and a brute-force scan over
// junction times of each case's arc template.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ecotraj/trajectory.hpp"

namespace ecotraj {

struct TranscriptionGrid {
  std::size_t n_steps = 0;
  double dt = 0.0;
  std::vector<double> controls;  // one per step, held constant
};

struct DiscreteTrajectory {
  TranscriptionGrid grid;
  std::vector<double> t;  // n_steps + 1 nodes
  std::vector<double> p;
  std::vector<double> v;
  double cost = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct OracleOptions {
  int max_iterations = 200;
  double tolerance = 1e-9;
};

namespace detail {

// One inequality row c_i x_i + c_j x_j <= h (j < 0 when absent).
struct QpRow {
  int i;
  double ci;
  int j;
  double cj;
  double h;
};

// LDL^T of a symmetric tridiagonal matrix; solves in O(n).
class Tridiagonal {
 public:
  void Factor(const std::vector<double>& diag, const std::vector<double>& off) {
    const std::size_t n = diag.size();
    d_.assign(n, 0.0);
    l_.assign(n, 0.0);
    d_[0] = diag[0];
    for (std::size_t k = 1; k < n; ++k) {
      l_[k] = off[k - 1] / d_[k - 1];
      d_[k] = diag[k] - l_[k] * off[k - 1];
    }
  }

  std::vector<double> Solve(std::vector<double> r) const {
    const std::size_t n = r.size();
    for (std::size_t k = 1; k < n; ++k) r[k] -= l_[k] * r[k - 1];
    for (std::size_t k = 0; k < n; ++k) r[k] /= d_[k];
    for (std::size_t k = n - 1; k-- > 0;) r[k] -= l_[k + 1] * r[k + 1];
    return r;
  }

 private:
  std::vector<double> d_;
  std::vector<double> l_;
};

inline double MaxStep(const std::vector<double>& w, const std::vector<double>& dw) {
  double alpha = 1.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (dw[k] < 0.0) alpha = std::min(alpha, -w[k] / dw[k]);
  }
  return alpha;
}

inline double InfNorm(const std::vector<double>& x) {
  double m = 0.0;
  for (double e : x) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace detail

/// Minimizes sum(u_k^2/2) dt over piecewise-constant controls on n_steps
/// equal steps. Node speeds are the unknowns, so speed bounds and control
/// bounds are linear rows and the terminal position (exact trapezoid of the
/// piecewise-linear speed) is a single equality row.
inline DiscreteTrajectory SolveNumeric(const BoundaryConditions& bc, const Limits& lim,
                                       std::size_t n_steps, const OracleOptions& opt = {}) {
  if (n_steps < 100) throw Error(ErrorCode::kDomain, "transcription needs at least 100 steps");
  RequireFeasible(bc, lim);

  const std::size_t n = n_steps;
  const double T = bc.horizon();
  const double L = bc.distance();
  const double dt = T / static_cast<double>(n);
  const double v0 = bc.v0;

  std::vector<detail::QpRow> rows;
  for (std::size_t k = 0; k < n; ++k) {
    const int x = static_cast<int>(k);
    if (std::isfinite(lim.vmax)) rows.push_back({x, 1.0, -1, 0.0, lim.vmax});
    rows.push_back({x, -1.0, -1, 0.0, -lim.vmin});
    if (std::isfinite(lim.umax)) {
      if (k == 0) rows.push_back({0, 1.0, -1, 0.0, lim.umax * dt + v0});
      else rows.push_back({x, 1.0, x - 1, -1.0, lim.umax * dt});
    }
    if (std::isfinite(lim.umin)) {
      if (k == 0) rows.push_back({0, -1.0, -1, 0.0, -lim.umin * dt - v0});
      else rows.push_back({x, -1.0, x - 1, 1.0, -lim.umin * dt});
    }
  }
  const std::size_t m = rows.size();

  // Objective (1/2dt) sum (x_k - x_{k-1})^2 with x_{-1} = v0.
  std::vector<double> h_diag(n, 2.0 / dt), h_off(n > 0 ? n - 1 : 0, -1.0 / dt);
  h_diag[n - 1] = 1.0 / dt;
  std::vector<double> g(n, 0.0);
  g[0] = -v0 / dt;
  std::vector<double> a(n, dt);
  a[n - 1] = dt / 2.0;
  const double beq = L - dt * v0 / 2.0;

  auto hess_times = [&](const std::vector<double>& x) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      double s = h_diag[k] * x[k];
      if (k > 0) s += h_off[k - 1] * x[k - 1];
      if (k + 1 < n) s += h_off[k] * x[k + 1];
      out[k] = s;
    }
    return out;
  };
  auto row_times = [&](const detail::QpRow& r, const std::vector<double>& x) {
    double s = r.ci * x[r.i];
    if (r.j >= 0) s += r.cj * x[r.j];
    return s;
  };
  auto add_transpose = [&](std::vector<double>& out, const std::vector<double>& w) {
    for (std::size_t r = 0; r < m; ++r) {
      out[rows[r].i] += rows[r].ci * w[r];
      if (rows[r].j >= 0) out[rows[r].j] += rows[r].cj * w[r];
    }
  };

  // Start from the unconstrained cubic, clipped into the speed box.
  std::vector<double> x(n);
  {
    const double ca = 3.0 * (v0 * T - L) / (T * T * T);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = dt * static_cast<double>(k + 1);
      const double v = ca * t * t / 2.0 - ca * T * t + v0;
      x[k] = std::clamp(v, lim.vmin, lim.vmax);
    }
  }
  double y = 0.0;
  std::vector<double> s(m), z(m, 1.0);
  for (std::size_t r = 0; r < m; ++r) {
    s[r] = std::max(rows[r].h - row_times(rows[r], x), 1e-3 * (1.0 + std::abs(rows[r].h)));
  }

  const double g_scale = 1.0 + detail::InfNorm(g) * dt;
  double h_scale = 1.0;
  for (const auto& r : rows) h_scale = std::max(h_scale, std::abs(r.h));

  detail::Tridiagonal kfact;
  std::vector<double> rd(n), rc(m), dx(n), ds(m), dz(m);
  double rp = 0.0;
  double residual = kInf;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    rd = hess_times(x);
    for (std::size_t k = 0; k < n; ++k) rd[k] += g[k] + a[k] * y;
    add_transpose(rd, z);
    rp = -beq;
    for (std::size_t k = 0; k < n; ++k) rp += a[k] * x[k];
    for (std::size_t r = 0; r < m; ++r) rc[r] = row_times(rows[r], x) + s[r] - rows[r].h;
    double mu = 0.0;
    for (std::size_t r = 0; r < m; ++r) mu += s[r] * z[r];
    mu /= static_cast<double>(std::max<std::size_t>(m, 1));

    residual = std::max({detail::InfNorm(rd) / g_scale, std::abs(rp) / (1.0 + std::abs(beq)),
                         detail::InfNorm(rc) / h_scale, mu});
    if (residual <= opt.tolerance) break;

    std::vector<double> k_diag = h_diag, k_off = h_off;
    for (std::size_t r = 0; r < m; ++r) {
      const detail::QpRow& q = rows[r];
      const double w = z[r] / s[r];
      k_diag[q.i] += w * q.ci * q.ci;
      if (q.j >= 0) {
        k_diag[q.j] += w * q.cj * q.cj;
        k_off[std::min(q.i, q.j)] += w * q.ci * q.cj;
      }
    }
    kfact.Factor(k_diag, k_off);
    const std::vector<double> ka = kfact.Solve(a);
    double a_ka = 0.0;
    for (std::size_t k = 0; k < n; ++k) a_ka += a[k] * ka[k];

    auto newton = [&](const std::vector<double>& rsz) {
      std::vector<double> tmp(m);
      for (std::size_t r = 0; r < m; ++r) tmp[r] = (z[r] * rc[r] - rsz[r]) / s[r];
      std::vector<double> rhs(n);
      for (std::size_t k = 0; k < n; ++k) rhs[k] = -rd[k];
      std::vector<double> ct(n, 0.0);
      add_transpose(ct, tmp);
      for (std::size_t k = 0; k < n; ++k) rhs[k] -= ct[k];
      const std::vector<double> x1 = kfact.Solve(rhs);
      double a_x1 = 0.0;
      for (std::size_t k = 0; k < n; ++k) a_x1 += a[k] * x1[k];
      const double dy = (a_x1 + rp) / a_ka;
      for (std::size_t k = 0; k < n; ++k) dx[k] = x1[k] - dy * ka[k];
      for (std::size_t r = 0; r < m; ++r) {
        ds[r] = -rc[r] - row_times(rows[r], dx);
        dz[r] = (-rsz[r] - z[r] * ds[r]) / s[r];
      }
      return dy;
    };

    std::vector<double> rsz(m);
    for (std::size_t r = 0; r < m; ++r) rsz[r] = s[r] * z[r];
    newton(rsz);
    const double alpha_aff = std::min(detail::MaxStep(s, ds), detail::MaxStep(z, dz));
    double mu_aff = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      mu_aff += (s[r] + alpha_aff * ds[r]) * (z[r] + alpha_aff * dz[r]);
    }
    mu_aff /= static_cast<double>(std::max<std::size_t>(m, 1));
    const double sigma = std::pow(mu_aff / mu, 3.0);
    for (std::size_t r = 0; r < m; ++r) rsz[r] += ds[r] * dz[r] - sigma * mu;
    const double dy = newton(rsz);
    const double alpha =
        std::min(1.0, 0.995 * std::min(detail::MaxStep(s, ds), detail::MaxStep(z, dz)));
    for (std::size_t k = 0; k < n; ++k) x[k] += alpha * dx[k];
    y += alpha * dy;
    for (std::size_t r = 0; r < m; ++r) {
      s[r] += alpha * ds[r];
      z[r] += alpha * dz[r];
    }
  }
  if (!(residual <= opt.tolerance)) {
    throw Error(ErrorCode::kNonConverged,
                "transcription stopped after " + std::to_string(iter) +
                    " iterations with residual " + std::to_string(residual));
  }

  DiscreteTrajectory out;
  out.iterations = iter;
  out.residual = residual;
  out.grid.n_steps = n;
  out.grid.dt = dt;
  out.grid.controls.resize(n);
  out.t.resize(n + 1);
  out.p.resize(n + 1);
  out.v.resize(n + 1);
  out.t[0] = bc.t0;
  out.p[0] = bc.p0;
  out.v[0] = v0;
  for (std::size_t k = 0; k < n; ++k) {
    out.v[k + 1] = x[k];
    out.t[k + 1] = bc.t0 + dt * static_cast<double>(k + 1);
    out.p[k + 1] = out.p[k] + dt * (out.v[k] + out.v[k + 1]) / 2.0;
    const double u = (out.v[k + 1] - out.v[k]) / dt;
    out.grid.controls[k] = u;
    out.cost += 0.5 * u * u * dt;
  }
  out.t[n] = bc.tm;
  return out;
}

/// Bounds binding at the discrete optimum, within `tol` native units.
struct ActiveBounds {
  bool vmax = false;
  bool umax = false;
  bool vmin = false;
  bool umin = false;

  bool operator==(const ActiveBounds&) const = default;
};

inline ActiveBounds DetectActiveBounds(const DiscreteTrajectory& d, const Limits& lim,
                                       double tol = 1e-3) {
  ActiveBounds out;
  for (std::size_t k = 1; k < d.v.size(); ++k) {
    out.vmax = out.vmax || d.v[k] >= lim.vmax - tol;
    out.vmin = out.vmin || d.v[k] <= lim.vmin + tol;
  }
  for (double u : d.grid.controls) {
    out.umax = out.umax || u >= lim.umax - tol;
    out.umin = out.umin || u <= lim.umin + tol;
  }
  return out;
}

inline ActiveBounds BoundsOfCase(ConstraintCase c) {
  ActiveBounds b;
  b.vmax = c == ConstraintCase::kVmaxOnly || c == ConstraintCase::kUmaxAndVmax;
  b.umax = c == ConstraintCase::kUmaxOnly || c == ConstraintCase::kUmaxAndVmax;
  b.vmin = c == ConstraintCase::kVminOnly || c == ConstraintCase::kUminAndVmin;
  b.umin = c == ConstraintCase::kUminOnly || c == ConstraintCase::kUminAndVmin;
  return b;
}

struct JunctionEstimate {
  std::optional<double> tau_c;  // absolute
  std::optional<double> tau_s;  // absolute
  double cost = 0.0;
  std::size_t candidates = 0;  // feasible tuples examined
};

namespace detail {

struct ArcTemplate {
  double u_start;
  double u_end;
  double duration;
};

// Checks one affine-control arc against the box.
inline bool ArcWithinBox(double v_start, double u_start, double u_end, double h,
                         const Limits& lim, double tol) {
  if (u_start > lim.umax + tol || u_end > lim.umax + tol) return false;
  if (u_start < lim.umin - tol || u_end < lim.umin - tol) return false;
  const double slope = (u_end - u_start) / h;
  double v_hi = std::max(v_start, v_start + (u_start + u_end) / 2.0 * h);
  double v_lo = std::min(v_start, v_start + (u_start + u_end) / 2.0 * h);
  if (slope != 0.0) {
    const double s_star = -u_start / slope;
    if (s_star > 0.0 && s_star < h) {
      const double v_star = v_start + u_start * s_star + slope * s_star * s_star / 2.0;
      v_hi = std::max(v_hi, v_star);
      v_lo = std::min(v_lo, v_star);
    }
  }
  return v_hi <= lim.vmax + tol && v_lo >= lim.vmin - tol;
}

inline double AffineCost(double u1, double u2, double h) {
  return h / 6.0 * (u1 * u1 + u1 * u2 + u2 * u2);
}

// Arc joining (p0, v0) to (p1, v1) over h with affine control.
inline ArcTemplate Hermite(double p0, double v0, double p1, double v1, double h) {
  const double dv = v1 - v0;
  const double dp = p1 - p0 - v0 * h;
  const double slope = (6.0 * dv * h - 12.0 * dp) / (h * h * h);
  const double start = (dv - slope * h * h / 2.0) / h;
  return {start, start + slope * h, h};
}

// Arc from (p0, v0) covering `dist` over h and ending with zero control.
inline ArcTemplate FreeEnd(double p0, double v0, double p1, double h) {
  const double slope = 3.0 * (v0 * h - (p1 - p0)) / (h * h * h);
  return {-slope * h, 0.0, h};
}

struct TemplateCost {
  bool feasible = false;
  double cost = 0.0;
};

inline TemplateCost SpeedTemplate(const BoundaryConditions& bc, const Limits& lim, double V,
                                  double tau_s, double tol) {
  const double T = bc.horizon();
  const double L = bc.distance();
  const ArcTemplate arc = Hermite(0.0, bc.v0, L - V * (T - tau_s), V, tau_s);
  if (!ArcWithinBox(bc.v0, arc.u_start, arc.u_end, tau_s, lim, tol)) return {};
  return {true, AffineCost(arc.u_start, arc.u_end, tau_s)};
}

inline TemplateCost ControlTemplate(const BoundaryConditions& bc, const Limits& lim, double U,
                                    double tau_c, double tol) {
  const double T = bc.horizon();
  const double L = bc.distance();
  const double v1 = bc.v0 + U * tau_c;
  if (v1 > lim.vmax + tol || v1 < lim.vmin - tol) return {};
  const double p1 = bc.v0 * tau_c + U * tau_c * tau_c / 2.0;
  const ArcTemplate arc = FreeEnd(p1, v1, L, T - tau_c);
  if (!ArcWithinBox(v1, arc.u_start, arc.u_end, T - tau_c, lim, tol)) return {};
  return {true, 0.5 * U * U * tau_c + AffineCost(arc.u_start, arc.u_end, T - tau_c)};
}

inline TemplateCost DualTemplate(const BoundaryConditions& bc, const Limits& lim, double U,
                                 double V, double tau_c, double tau_s, double tol) {
  const double T = bc.horizon();
  const double L = bc.distance();
  const double v1 = bc.v0 + U * tau_c;
  if (v1 > lim.vmax + tol || v1 < lim.vmin - tol) return {};
  const double p1 = bc.v0 * tau_c + U * tau_c * tau_c / 2.0;
  const double h = tau_s - tau_c;
  const ArcTemplate arc = Hermite(p1, v1, L - V * (T - tau_s), V, h);
  if (!ArcWithinBox(v1, arc.u_start, arc.u_end, h, lim, tol)) return {};
  return {true, 0.5 * U * U * tau_c + AffineCost(arc.u_start, arc.u_end, h)};
}

}  // namespace detail

/// Scans junction times of the case's arc template and returns the cheapest
/// feasible tuple. One-junction cases are scanned exhaustively at
/// `resolution`; two-junction cases are scanned on a 20x coarser lattice,
/// then exhaustively at `resolution` in a +-50-step box around the coarse best.
inline JunctionEstimate JunctionGridSearch(const BoundaryConditions& bc, const Limits& lim,
                                           ConstraintCase c, double resolution = 1e-3) {
  RequireFeasible(bc, lim);
  if (!(resolution > 0.0)) throw Error(ErrorCode::kDomain, "resolution must be positive");
  const double T = bc.horizon();
  const double tol = 1e-9;
  const long steps = static_cast<long>(std::floor(T / resolution + 1e-9));
  JunctionEstimate best;
  best.cost = kInf;

  const bool upper = IsMaxSide(c);
  const double U = upper ? lim.umax : lim.umin;
  const double V = upper ? lim.vmax : lim.vmin;

  switch (c) {
    case ConstraintCase::kUnconstrained: {
      const double a = 3.0 * (bc.v0 * T - bc.distance()) / (T * T * T);
      best.cost = detail::AffineCost(-a * T, 0.0, T);
      best.candidates = 1;
      return best;
    }
    case ConstraintCase::kVmaxOnly:
    case ConstraintCase::kVminOnly:
      for (long k = 1; k < steps; ++k) {
        const double tau = resolution * static_cast<double>(k);
        const detail::TemplateCost tc = detail::SpeedTemplate(bc, lim, V, tau, tol);
        if (!tc.feasible) continue;
        ++best.candidates;
        if (tc.cost < best.cost) {
          best.cost = tc.cost;
          best.tau_s = bc.t0 + tau;
        }
      }
      break;
    case ConstraintCase::kUmaxOnly:
    case ConstraintCase::kUminOnly:
      for (long k = 1; k < steps; ++k) {
        const double tau = resolution * static_cast<double>(k);
        const detail::TemplateCost tc = detail::ControlTemplate(bc, lim, U, tau, tol);
        if (!tc.feasible) continue;
        ++best.candidates;
        if (tc.cost < best.cost) {
          best.cost = tc.cost;
          best.tau_c = bc.t0 + tau;
        }
      }
      break;
    case ConstraintCase::kUmaxAndVmax:
    case ConstraintCase::kUminAndVmin: {
      auto scan = [&](long i_lo, long i_hi, long j_lo, long j_hi, long stride) {
        long bi = -1, bj = -1;
        for (long i = std::max(i_lo, 1L); i <= std::min(i_hi, steps - 2); i += stride) {
          for (long j = std::max(j_lo, i + 1); j <= std::min(j_hi, steps - 1); j += stride) {
            const double tc_local = resolution * static_cast<double>(i);
            const double ts_local = resolution * static_cast<double>(j);
            const detail::TemplateCost tc =
                detail::DualTemplate(bc, lim, U, V, tc_local, ts_local, tol);
            if (!tc.feasible) continue;
            ++best.candidates;
            if (tc.cost < best.cost) {
              best.cost = tc.cost;
              bi = i;
              bj = j;
            }
          }
        }
        return std::pair<long, long>{bi, bj};
      };
      constexpr long kCoarse = 20;
      const auto [ci, cj] = scan(1, steps, 1, steps, kCoarse);
      if (ci >= 0) {
        best.cost = kInf;
        const auto [fi, fj] = scan(ci - 50, ci + 50, cj - 50, cj + 50, 1);
        best.tau_c = bc.t0 + resolution * static_cast<double>(fi);
        best.tau_s = bc.t0 + resolution * static_cast<double>(fj);
      }
      break;
    }
  }
  if (best.candidates == 0 || !std::isfinite(best.cost)) {
    throw Error(ErrorCode::kEmptyFeasibleSet,
                std::string("no feasible junction candidate for case ") + ToString(c));
  }
  return best;
}

}  // namespace ecotraj
