#pragma once

// The implicit anchor path. For a contraction f with certificate L < 1 and a
// nonexpansive T, the map G(z) = t f(z) + (1 - t) T z contracts with factor
// kappa = 1 - t(1 - L), so plain fixed-point iteration on G has a provable
// iteration budget. Following the path t -> 0 with mandatory warm starts
// yields the limit-point estimate q_hat, which is accepted only when the path
// increment test converges and the variational inequality
// <(I - f) q_hat, J(q_hat - p)> <= 0 holds on the available fixed-point
// sample.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixlab/operators.hpp"
#include "fixlab/schedules.hpp"
#include "fixlab/space.hpp"

namespace fixlab {

struct NoConvergenceError : std::runtime_error {
  Vector best;
  std::int64_t iters = 0;
  double residual = 0.0;
  NoConvergenceError(std::string msg, Vector best_iterate, std::int64_t it, double res)
      : std::runtime_error(std::move(msg)),
        best(std::move(best_iterate)),
        iters(it),
        residual(res) {}
};

struct SolveStats {
  Vector z;
  std::int64_t iters = 0;
  double residual = 0.0;   // upper bound on ||z - G(z)|| at return
  std::int64_t budget = 0; // provable iteration budget from kappa
};

namespace detail {

template <typename FEval>
SolveStats solve_implicit_impl(const OperatorSpec& T, FEval&& f_eval, double L, double t,
                               const Vector& z_init, double inner_tol, std::int64_t max_inner,
                               std::vector<double>* step_norms) {
  if (!(L >= 0.0 && L < 1.0))
    throw std::invalid_argument("solve_implicit: contraction certificate L must lie in [0,1)");
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("solve_implicit: t must lie in (0,1]");
  if (!(inner_tol > 0.0))
    throw std::invalid_argument("solve_implicit: inner_tol must be > 0");

  const SpaceSpec space = T.space;
  const auto d = static_cast<std::size_t>(space.dim);
  OpWorkspace ws;
  std::vector<double> z = z_init.coords, tz(d), fz(d), gz(d);

  // first application: residual r0 decides the budget
  apply_into(T, z, tz, ws);
  f_eval(std::span<const double>(z), std::span<double>(fz), ws);
  comb_into(tz, fz, t, gz);
  double res = dist_span(gz, z, space.p);
  const double r0 = res;

  std::int64_t budget = 0;
  if (r0 > inner_tol) {
    const double log_kappa = std::log1p(-t * (1.0 - L));
    const double raw = std::ceil(std::log(inner_tol / r0) / log_kappa);
    budget = (std::isfinite(raw) && raw > 0.0 && raw < 9.0e18)
                 ? static_cast<std::int64_t>(raw)
                 : std::numeric_limits<std::int64_t>::max() / 4;
  }
  std::int64_t cap = max_inner > 0 ? max_inner
                                   : std::max<std::int64_t>(16, 2 * budget);

  std::int64_t iters = 0;
  while (res > inner_tol) {
    if (iters >= cap) {
      throw NoConvergenceError(
          "implicit solve: iteration cap " + std::to_string(cap) +
              " exhausted at t = " + std::to_string(t) +
              " with residual " + std::to_string(res),
          Vector{space, gz}, iters, res);
    }
    z.swap(gz);
    apply_into(T, z, tz, ws);
    f_eval(std::span<const double>(z), std::span<double>(fz), ws);
    comb_into(tz, fz, t, gz);
    res = dist_span(gz, z, space.p);
    if (step_norms) step_norms->push_back(res);
    ++iters;
  }
  // gz = G(z) with ||G(z) - z|| <= inner_tol; return gz, whose own residual
  // is at most kappa * inner_tol <= inner_tol by the contraction.
  SolveStats out{Vector{space, gz}, iters, res, budget};
  return out;
}

}  // namespace detail

/// Solve z = t f(z) + (1 - t) T z by fixed-point iteration on G. The
/// contraction certificate is taken from f's claimed bound. max_inner = 0
/// uses twice the provable kappa budget.
inline SolveStats solve_implicit(const OperatorSpec& T, const OperatorSpec& f, double t,
                                 const Vector& z_init, double inner_tol = 1e-12,
                                 std::int64_t max_inner = 0,
                                 std::vector<double>* step_norms = nullptr) {
  if (!f.lipschitz_claim || !(*f.lipschitz_claim < 1.0))
    throw std::invalid_argument("solve_implicit: f requires a contraction certificate L < 1");
  auto f_eval = [&f](std::span<const double> in, std::span<double> out, OpWorkspace& ws) {
    apply_into(f, in, out, ws);
  };
  return detail::solve_implicit_impl(T, f_eval, *f.lipschitz_claim, t, z_init, inner_tol,
                                     max_inner, step_norms);
}

struct PathEntry {
  double t = 0.0;
  Vector z;
  std::int64_t inner_iters = 0;
  double inner_residual = 0.0;
};

struct AnchorParams {
  double t0 = 0.5;
  double sigma = 0.5;
  double path_tol = 1e-8;
  double inner_tol = 1e-12;
  int max_stages = 60;
  std::int64_t max_inner = 0;  // 0 = kappa budget x 2
};

struct AnchorResult {
  Vector q_hat;
  std::vector<PathEntry> path;
  bool converged = false;
  double t_last = 0.0;
  double eps_t_last = 0.0;          // ||T(q_hat) - q_hat||, reported not assumed
  double residual_ratio_max = 0.0;  // max over stages of ||T z - z|| / t
  double vi_tolerance = 0.0;        // see below
  std::optional<double> vi_residual_max;
};

/// Follow the path t_j = t0 * sigma^j with warm starts until consecutive
/// solutions differ by at most path_tol. diameter_hint scales the reported
/// variational-inequality tolerance
///   vi_tolerance = 4 (path_tol + inner_tol / (t_last (1 - L))) (1 + diam)^2
/// which dominates the first-order sensitivity of the pairing to the q_hat
/// error.
inline AnchorResult estimate_Q(const OperatorSpec& T, const OperatorSpec& f,
                               const Vector& z_init, const AnchorParams& params = {},
                               double diameter_hint = 1.0) {
  if (!(params.t0 > 0.0 && params.t0 < 1.0))
    throw std::invalid_argument("estimate_Q: t0 must lie in (0,1)");
  if (!(params.sigma > 0.0 && params.sigma < 1.0))
    throw std::invalid_argument("estimate_Q: sigma must lie in (0,1)");
  if (!f.lipschitz_claim || !(*f.lipschitz_claim < 1.0))
    throw std::invalid_argument("estimate_Q: f requires a contraction certificate L < 1");
  const double L = *f.lipschitz_claim;

  AnchorResult result;
  Vector z = z_init;
  double t = params.t0;
  for (int stage = 0; stage < params.max_stages; ++stage) {
    const SolveStats st = solve_implicit(T, f, t, z, params.inner_tol, params.max_inner);
    result.path.push_back({t, st.z, st.iters, st.residual});
    const double tz_res = dist(apply_op(T, st.z), st.z);
    result.residual_ratio_max = std::max(result.residual_ratio_max, tz_res / t);
    if (stage > 0 && dist(st.z, z) <= params.path_tol) {
      z = st.z;
      result.converged = true;
      break;
    }
    z = st.z;
    t *= params.sigma;
  }
  result.q_hat = z;
  result.t_last = result.path.back().t;
  result.eps_t_last = dist(apply_op(T, result.q_hat), result.q_hat);
  result.vi_tolerance = 4.0 *
                        (params.path_tol + params.inner_tol / (result.t_last * (1.0 - L))) *
                        (1.0 + diameter_hint) * (1.0 + diameter_hint);
  return result;
}

/// max over the supplied fixed points p of <q_hat - f(q_hat), J(q_hat - p)>.
/// The limit point satisfies <= 0; positive values beyond the solver
/// tolerance disqualify the estimate.
inline double vi_residual(const Vector& q_hat, const OperatorSpec& f,
                          const std::vector<Vector>& fixed_points) {
  if (fixed_points.empty())
    throw std::invalid_argument("vi_residual: fixed point sample must be nonempty");
  const Vector lhs = sub(q_hat, apply_op(f, q_hat));
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vector& p : fixed_points)
    worst = std::max(worst, pairing(lhs, duality_map(sub(q_hat, p))));
  return worst;
}

/// Grid over a fixed-set descriptor, re-verified against T.
inline std::vector<Vector> verified_fixed_grid(const OperatorSpec& T,
                                               const FixedSetDescriptor& desc, int count = 101,
                                               double tol = 1e-9) {
  std::vector<Vector> pts = fixed_set_grid(desc, count);
  for (const Vector& p : pts)
    if (dist(apply_op(T, p), p) > tol)
      throw std::invalid_argument("verified_fixed_grid: descriptor point fails the fixed-point residual bound");
  return pts;
}

struct FamilyPathEntry {
  std::int64_t n = 0;
  double t = 0.0;
  Vector z_n;        // solution with f_n
  Vector z_prime;    // solution with the limit f
  double gap = 0.0;  // ||z_n - z_prime||
  double family_gap_at_z = 0.0;  // ||f_n(z_n) - f(z_n)||
  bool bound_ok = false;         // (1-L) gap <= family_gap + 4 inner_tol
};

/// Solve both z = t_n f_n(z) + (1-t_n) T z and the limit equation at each
/// requested index, and check the bound (1-L)||z_n - z'_n|| <= ||f_n(z_n) -
/// f(z_n)|| with solver slack. Requires a common contraction certificate for
/// the family and its limit.
inline std::vector<FamilyPathEntry> solve_implicit_family(
    const OperatorSpec& T, const FamilySpec& fam, const OperatorSpec& limit,
    const ScheduleSpec& t_sched, const std::vector<std::int64_t>& n_list,
    const Vector& z_init, double inner_tol = 1e-12) {
  const auto famL = family_contraction_certificate(fam);
  if (!famL || !(*famL < 1.0) || !limit.lipschitz_claim || !(*limit.lipschitz_claim < 1.0))
    throw std::invalid_argument(
        "solve_implicit_family: family and limit need contraction certificates L < 1");
  const double L = std::max(*famL, *limit.lipschitz_claim);

  std::vector<FamilyPathEntry> out;
  Vector warm_n = z_init, warm_lim = z_init;
  for (std::int64_t n : n_list) {
    const double t = eval(t_sched, n);
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("solve_implicit_family: t_n must lie in (0,1)");
    auto fn_eval = [&fam, n](std::span<const double> in, std::span<double> out_span,
                             OpWorkspace&) {
      Vector x{fam.space, {in.begin(), in.end()}};
      const Vector v = family_eval(fam, n, x);
      std::copy(v.coords.begin(), v.coords.end(), out_span.begin());
    };
    const SolveStats sn =
        detail::solve_implicit_impl(T, fn_eval, L, t, warm_n, inner_tol, 0, nullptr);
    const SolveStats sl = solve_implicit(T, limit, t, warm_lim, inner_tol);
    warm_n = sn.z;
    warm_lim = sl.z;

    FamilyPathEntry e;
    e.n = n;
    e.t = t;
    e.z_n = sn.z;
    e.z_prime = sl.z;
    e.gap = dist(sn.z, sl.z);
    e.family_gap_at_z = dist(family_eval(fam, n, sn.z), apply_op(limit, sn.z));
    e.bound_ok = (1.0 - L) * e.gap <= e.family_gap_at_z + 4.0 * inner_tol;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace fixlab
