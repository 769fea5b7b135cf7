#pragma once

// The extended two-step averaged iteration
//
//   y_n     = beta_n g_n(x_n) + (1 - beta_n) T x_n
//   x_{n+1} = alpha_n f_n(x_n) + (1 - alpha_n) T y_n
//
// as a step/run engine, together with exact reduction constructors for the
// classical schemes (anchored/inertial one-step and two-step averaging, the
// with-errors variants, the viscosity scheme, and the three-term anchored
// scheme). Convex combinations are always computed as a + s*(b - a) so that
// reduction-equivalence claims can be made bitwise.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fixlab/operators.hpp"
#include "fixlab/schedules.hpp"
#include "fixlab/space.hpp"

namespace fixlab {

struct StopRule {
  std::int64_t max_iters = 10000;
  double residual_tol = 0.0;        // fires when ||T x_n - x_n|| <= tol; < 0 disables
  double divergence_radius = 1e6;   // fires when ||x_n|| > radius
};

enum class StopReason { MaxIters, ResidualBelowTol, Diverged };

enum class Scheme { Extended, Mann, Ishikawa, MannErrors, IshikawaErrors, Viscosity, Yao };

/// The raw weight sequences of a source recursion, kept alongside the engine
/// weights so theorem validators can inspect them.
struct RawSchedules {
  std::optional<ScheduleSpec> alpha, beta, gamma, delta;
};

struct ProcessConfig {
  SpaceSpec space;
  DomainSpec domain;
  OperatorSpec T;
  FamilySpec f_family;
  FamilySpec g_family;
  ScheduleSpec alpha;
  ScheduleSpec beta;
  Vector x0;
  StopRule stop;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Extended;
  bool inertial = false;  // the "alpha_n x_n" variant of the averaged schemes
  RawSchedules raw;
};

/// Shared run-shell parameters for the reduction constructors.
struct RunParams {
  DomainSpec domain;
  Vector x0;
  StopRule stop;
  std::uint64_t seed = 0;
};

struct TrajectoryRecord {
  int dim = 0;
  // row-major, rows() x dim
  std::vector<double> xs, ys;
  std::vector<double> residuals, alphas, betas;
  std::vector<double> dists;  // empty when no reference point was supplied
  StopReason terminal = StopReason::MaxIters;
  std::optional<double> min_perturbation_margin;  // monitored when derivable

  std::size_t rows() const { return residuals.size(); }
  std::span<const double> x_row(std::size_t i) const {
    return {xs.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<const double> y_row(std::size_t i) const {
    return {ys.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  Vector x_at(const SpaceSpec& space, std::size_t i) const {
    auto r = x_row(i);
    return Vector{space, {r.begin(), r.end()}};
  }
};

namespace detail {

inline void validate_config(const ProcessConfig& cfg) {
  if (!(cfg.x0.space == cfg.space) || !(cfg.T.space == cfg.space) ||
      !(cfg.f_family.space == cfg.space) || !(cfg.g_family.space == cfg.space) ||
      !(cfg.domain.space == cfg.space))
    throw std::invalid_argument("process config: all parts must share one space");
  if (!contains(cfg.domain, cfg.x0))
    throw std::invalid_argument("process config: x0 must lie in the domain");
  if (!in_unit_interval(cfg.alpha))
    throw std::invalid_argument("process config: alpha values must lie in [0,1]");
  if (!in_unit_interval(cfg.beta))
    throw std::invalid_argument("process config: beta values must lie in [0,1]");
  if (!maps_into(cfg.T, cfg.domain))
    throw std::invalid_argument("process config: T must map the domain into itself");
}

}  // namespace detail

/// One step. Evaluation order is fixed: g_n(x_n), T(x_n), combine, T(y_n),
/// f_n(x_n), combine.
inline std::pair<Vector, Vector> step_extended(const ProcessConfig& cfg, std::int64_t n,
                                               const Vector& x_n) {
  const double beta_n = eval(cfg.beta, n);
  const double alpha_n = eval(cfg.alpha, n);
  const Vector g = family_eval(cfg.g_family, n, x_n);
  const Vector tx = apply_op(cfg.T, x_n);
  // y = beta*g + (1-beta)*Tx, written g + (1-beta)*(Tx - g)
  const Vector y = comb(g, tx, 1.0 - beta_n);
  const Vector ty = apply_op(cfg.T, y);
  const Vector f = family_eval(cfg.f_family, n, x_n);
  // x' = alpha*f + (1-alpha)*Ty, written Ty + alpha*(f - Ty)
  const Vector x_next = comb(ty, f, alpha_n);
  return {x_next, y};
}

/// Iterate until a stop rule fires. Rows cover x_0 .. x_N inclusive; the
/// terminal row's y is evaluated with the same formula even though no further
/// step is taken, so every row is fully populated.
inline TrajectoryRecord run(const ProcessConfig& cfg,
                            const std::optional<Vector>& reference = std::nullopt) {
  detail::validate_config(cfg);
  if (reference && !(reference->space == cfg.space))
    throw std::invalid_argument("run: reference point space mismatch");

  TrajectoryRecord rec;
  rec.dim = cfg.space.dim;

  // perturbation-bound monitoring is possible when the config carries the
  // raw delta sequence and the g-family has a norm-bound certificate
  const bool monitor = cfg.raw.delta.has_value() &&
                       cfg.g_family.kind == FamilyKind::ErrorsStateFamily;
  const double monitor_M = monitor ? seq_bound(cfg.g_family.seq) : 0.0;
  double min_margin = std::numeric_limits<double>::infinity();

  Vector x = cfg.x0;
  for (std::int64_t n = 0;; ++n) {
    const double alpha_n = eval(cfg.alpha, n);
    const double beta_n = eval(cfg.beta, n);
    const Vector g = family_eval(cfg.g_family, n, x);
    const Vector tx = apply_op(cfg.T, x);
    const Vector y = comb(g, tx, 1.0 - beta_n);
    const double residual = dist(tx, x);

    rec.xs.insert(rec.xs.end(), x.coords.begin(), x.coords.end());
    rec.ys.insert(rec.ys.end(), y.coords.begin(), y.coords.end());
    rec.residuals.push_back(residual);
    rec.alphas.push_back(alpha_n);
    rec.betas.push_back(beta_n);
    if (reference) rec.dists.push_back(dist(x, *reference));

    if (monitor) {
      const double dn = eval(*cfg.raw.delta, n);
      min_margin = std::min(min_margin,
                            dn * (norm(x) + monitor_M) - beta_n * dist(g, x));
    }

    if (norm(x) > cfg.stop.divergence_radius) {
      rec.terminal = StopReason::Diverged;
      break;
    }
    if (cfg.stop.residual_tol >= 0.0 && residual <= cfg.stop.residual_tol) {
      rec.terminal = StopReason::ResidualBelowTol;
      break;
    }
    if (n == cfg.stop.max_iters) {
      rec.terminal = StopReason::MaxIters;
      break;
    }

    const Vector ty = apply_op(cfg.T, y);
    const Vector f = family_eval(cfg.f_family, n, x);
    x = comb(ty, f, alpha_n);
  }
  if (monitor) rec.min_perturbation_margin = min_margin;
  return rec;
}

// ---------------------------------------------------------------------------
// Reduction constructors
// ---------------------------------------------------------------------------

namespace detail {

inline void require_in_domain(const DomainSpec& domain, const Vector& v, const char* what) {
  if (!contains(domain, v))
    throw std::invalid_argument(std::string(what) + " must lie in the domain");
}

inline ProcessConfig base_config(const OperatorSpec& T, const RunParams& params) {
  ProcessConfig cfg;
  cfg.space = T.space;
  cfg.domain = params.domain;
  cfg.T = T;
  cfg.x0 = params.x0;
  cfg.stop = params.stop;
  cfg.seed = params.seed;
  cfg.f_family = identity_family(T.space);
  cfg.g_family = identity_family(T.space);
  cfg.beta = constant_schedule(1.0);
  return cfg;
}

}  // namespace detail

/// x_{n+1} = alpha_n u + (1 - alpha_n) T x_n.
inline ProcessConfig make_mann_anchored(const OperatorSpec& T, const Vector& u,
                                        const ScheduleSpec& alpha, const RunParams& params) {
  detail::require_in_domain(params.domain, u, "anchor u");
  ProcessConfig cfg = detail::base_config(T, params);
  cfg.scheme = Scheme::Mann;
  cfg.f_family = constant_family(constant_op(u));
  cfg.alpha = alpha;
  cfg.raw.alpha = alpha;
  cfg.raw.beta = constant_schedule(1.0);
  detail::validate_config(cfg);
  return cfg;
}

/// x_{n+1} = alpha_n x_n + (1 - alpha_n) T x_n. The state family is not a
/// contraction; theorem validators flag it, running is allowed.
inline ProcessConfig make_mann_inertial(const OperatorSpec& T, const ScheduleSpec& alpha,
                                        const RunParams& params) {
  ProcessConfig cfg = detail::base_config(T, params);
  cfg.scheme = Scheme::Mann;
  cfg.inertial = true;
  cfg.alpha = alpha;
  cfg.raw.alpha = alpha;
  cfg.raw.beta = constant_schedule(1.0);
  detail::validate_config(cfg);
  return cfg;
}

/// Two-step averaged scheme: y_n = beta_n x_n + (1 - beta_n) T x_n.
inline ProcessConfig make_ishikawa_anchored(const OperatorSpec& T, const Vector& u,
                                            const ScheduleSpec& alpha, const ScheduleSpec& beta,
                                            const RunParams& params) {
  ProcessConfig cfg = make_mann_anchored(T, u, alpha, params);
  cfg.scheme = Scheme::Ishikawa;
  cfg.beta = beta;
  cfg.raw.beta = beta;
  detail::validate_config(cfg);
  return cfg;
}

inline ProcessConfig make_ishikawa_inertial(const OperatorSpec& T, const ScheduleSpec& alpha,
                                            const ScheduleSpec& beta, const RunParams& params) {
  ProcessConfig cfg = make_mann_inertial(T, alpha, params);
  cfg.scheme = Scheme::Ishikawa;
  cfg.beta = beta;
  cfg.raw.beta = beta;
  detail::validate_config(cfg);
  return cfg;
}

/// x_{n+1} = alpha_n u + (1 - alpha_n - gamma_n) T x_n + gamma_n u_n,
/// realized with engine weight alpha_n + gamma_n and the weighted-anchor
/// family (alpha_n u + gamma_n u_n)/(alpha_n + gamma_n).
inline ProcessConfig make_mann_with_errors(const OperatorSpec& T, const Vector& u,
                                           const BoundedSeq& u_seq, const ScheduleSpec& alpha,
                                           const ScheduleSpec& gamma, const RunParams& params) {
  detail::require_in_domain(params.domain, u, "anchor u");
  if (schedule_max(alpha) + schedule_max(gamma) > 1.0)
    throw std::invalid_argument("mann with errors: alpha_n + gamma_n must stay <= 1");
  ProcessConfig cfg = detail::base_config(T, params);
  cfg.scheme = Scheme::MannErrors;
  cfg.f_family = errors_family(u, u_seq, alpha, gamma);  // throws when degenerate
  cfg.alpha = sum_schedule(alpha, gamma);
  cfg.raw.alpha = alpha;
  cfg.raw.beta = constant_schedule(1.0);
  cfg.raw.gamma = gamma;
  detail::validate_config(cfg);
  return cfg;
}

/// The two-step with-errors scheme; engine weights are alpha_n + gamma_n and
/// beta_n + delta_n.
inline ProcessConfig make_ishikawa_with_errors(const OperatorSpec& T, const Vector& u,
                                               const BoundedSeq& u_seq, const BoundedSeq& v_seq,
                                               const ScheduleSpec& alpha, const ScheduleSpec& beta,
                                               const ScheduleSpec& gamma, const ScheduleSpec& delta,
                                               const RunParams& params) {
  detail::require_in_domain(params.domain, u, "anchor u");
  if (schedule_max(alpha) + schedule_max(gamma) > 1.0)
    throw std::invalid_argument("ishikawa with errors: alpha_n + gamma_n must stay <= 1");
  if (schedule_max(beta) + schedule_max(delta) > 1.0)
    throw std::invalid_argument("ishikawa with errors: beta_n + delta_n must stay <= 1");
  ProcessConfig cfg = detail::base_config(T, params);
  cfg.scheme = Scheme::IshikawaErrors;
  cfg.f_family = errors_family(u, u_seq, alpha, gamma);
  cfg.g_family = errors_state_family(v_seq, beta, delta);
  cfg.alpha = sum_schedule(alpha, gamma);
  cfg.beta = sum_schedule(beta, delta);
  cfg.raw = RawSchedules{alpha, beta, gamma, delta};
  detail::validate_config(cfg);
  return cfg;
}

/// x_{n+1} = alpha_n f(x_n) + (1 - alpha_n) T x_n with a certified
/// contraction f.
inline ProcessConfig make_viscosity(const OperatorSpec& T, const OperatorSpec& f,
                                    const ScheduleSpec& alpha, const RunParams& params) {
  if (!f.lipschitz_claim || !(*f.lipschitz_claim < 1.0))
    throw std::invalid_argument("viscosity: f requires a contraction certificate L < 1");
  ProcessConfig cfg = detail::base_config(T, params);
  cfg.scheme = Scheme::Viscosity;
  cfg.f_family = constant_family(f);
  cfg.alpha = alpha;
  cfg.raw.alpha = alpha;
  cfg.raw.beta = constant_schedule(1.0);
  detail::validate_config(cfg);
  return cfg;
}

/// Three-term anchored scheme x_{n+1} = alpha_n u + beta_n x_n + gamma_n T x_n
/// with alpha_n + beta_n + gamma_n = 1, realized with engine weight
/// alpha_n + beta_n and the family (beta_n x + alpha_n u)/(alpha_n + beta_n).
inline ProcessConfig make_yao_three_term(const OperatorSpec& T, const Vector& u,
                                         const ScheduleSpec& alpha, const ScheduleSpec& beta,
                                         const RunParams& params) {
  detail::require_in_domain(params.domain, u, "anchor u");
  if (schedule_max(alpha) + schedule_max(beta) > 1.0)
    throw std::invalid_argument("three-term scheme: alpha_n + beta_n must stay <= 1");
  ProcessConfig cfg = detail::base_config(T, params);
  cfg.scheme = Scheme::Yao;
  // (beta_n x + alpha_n u)/(beta_n + alpha_n) is the state-weighted family
  // with a zero-radius sequence pinned at u
  cfg.f_family = errors_state_family(make_bounded_seq(u, 0.0, 0), beta, alpha);
  cfg.alpha = sum_schedule(alpha, beta);
  cfg.raw.alpha = alpha;
  cfg.raw.beta = beta;
  detail::validate_config(cfg);
  return cfg;
}

}  // namespace fixlab
