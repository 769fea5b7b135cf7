#pragma once

// Named property suites behind the `check` command. Each suite reports its
// worst observed violation against a fixed threshold; seeds are part of the
// report because sampled passes are falsification failures, not proofs.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fixlab/analysis.hpp"
#include "fixlab/anchor.hpp"
#include "fixlab/engine.hpp"
#include "fixlab/reference.hpp"
#include "fixlab/space.hpp"

namespace fixlab::suites {

struct SuiteResult {
  std::string name;
  double max_violation = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
  std::uint64_t seed = 0;
};

/// Duality identities <x, J(x)> = ||x||^2 and ||J(x)||_q = ||x||, sampled
/// over (p, d) in {1.5, 2, 3, 4} x {2, 10}.
inline SuiteResult duality_suite(std::uint64_t seed, int samples_per_combo = 10000) {
  SuiteResult res{"duality", 0.0, 1e-10, false, "", seed};
  const double ps[] = {1.5, 2.0, 3.0, 4.0};
  const int dims[] = {2, 10};
  int combo = 0;
  for (double p : ps) {
    for (int d : dims) {
      const SpaceSpec space = make_space(d, p);
      Rng rng(seed + static_cast<std::uint64_t>(combo++));
      for (int k = 0; k < samples_per_combo; ++k) {
        Vector x = zero_vector(space);
        for (double& c : x.coords) c = rng.uniform(-10.0, 10.0);
        if (k % 17 == 0) x.coords[0] = 0.0;  // exercise zero coordinates
        const Vector j = duality_map(x);
        const double n = norm(x);
        const double v1 = std::fabs(pairing(x, j) - n * n) / std::max(1.0, n * n);
        const double v2 = std::fabs(dual_norm(j) - n) / std::max(1.0, n);
        res.max_violation = std::max({res.max_violation, v1, v2});
      }
    }
  }
  res.pass = res.max_violation <= res.threshold;
  res.detail = "8 (p,d) combos x " + std::to_string(samples_per_combo) + " samples";
  return res;
}

/// ||x+y||^pi <= ||x||^pi + pi <y, J_pi(x+y)> over (p, pi) in
/// {(2,2), (2,3), (3,3), (1.5,2)}, radius-10 samples.
inline SuiteResult lemma12_suite(std::uint64_t seed, int samples_per_combo = 10000) {
  const double radius = 10.0;
  SuiteResult res{"lemma12", 0.0, 0.0, false, "", seed};
  const std::pair<double, double> combos[] = {{2.0, 2.0}, {2.0, 3.0}, {3.0, 3.0}, {1.5, 2.0}};
  double worst_scaled = -std::numeric_limits<double>::infinity();
  int combo = 0;
  for (const auto& [p, pi] : combos) {
    const SpaceSpec space = make_space(2, p);
    const double v = check_lemma_1_2(space, pi, samples_per_combo,
                                     seed + static_cast<std::uint64_t>(combo++), radius);
    worst_scaled = std::max(worst_scaled, v / (1e-9 * std::max(1.0, std::pow(radius, pi))));
  }
  res.max_violation = worst_scaled;  // violation scaled by its threshold
  res.threshold = 1.0;
  res.pass = worst_scaled <= 1.0;
  res.detail = "4 (p,pi) combos x " + std::to_string(samples_per_combo) +
               " pairs, radius 10, threshold 1e-9 * max(1, radius^pi)";
  return res;
}

/// The dominating recursion with t_n = 1/(n+2), b_n = 1/(n+1)^2, c_n = 2^-n
/// must fall below 1e-2 by N = 1e5.
inline SuiteResult lemma13_suite() {
  SuiteResult res{"lemma13", 0.0, 1e-2, false, "", 0};
  const std::vector<double> a =
      scalar_recursion(1.0, power_schedule(1.0, 1.0, 2), power_schedule(1.0, 2.0, 1),
                       geometric_schedule(1.0, 0.5), 100000);
  res.max_violation = a.back();
  res.pass = a.back() <= res.threshold;
  res.detail = "a_0 = 1, N = 1e5, final value " + std::to_string(a.back());
  return res;
}

/// Catalog claims: sampled Lipschitz ratios never exceed the claimed bound,
/// closure under convex combination and composition, fixed-set descriptors
/// verify their residual bound, affine certificates survive the power
/// iteration cross-check.
inline SuiteResult operators_suite(std::uint64_t seed, int samples = 10000) {
  SuiteResult res{"operators", 0.0, 1e-9, false, "", seed};
  const SpaceSpec l2 = make_space(2, 2.0);
  const SpaceSpec l3 = make_space(2, 3.0);
  const SpaceSpec l15 = make_space(2, 1.5);

  const Vector zero2{l2, {0.0, 0.0}};
  const Vector lo2{l2, {0.0, 0.0}}, hi2{l2, {1.0, 1.0}};
  const Vector lo3{l3, {-1.0, -0.5}}, hi3{l3, {1.0, 2.0}};
  const Vector lo15{l15, {-1.0, -1.0}}, hi15{l15, {1.0, 1.0}};

  struct Case {
    OperatorSpec op;
    DomainSpec domain;
  };
  const OperatorSpec rot = rotation2d_op(1.0, zero2);
  const OperatorSpec clamp2 = box_clamp_op(lo2, hi2);
  const OperatorSpec proj = segment_projection_op(Vector{l2, {0.0, 0.0}}, Vector{l2, {1.0, 0.0}});
  const OperatorSpec aff = affine_op({0.6, 0.2, -0.1, 0.5}, Vector{l2, {0.1, -0.2}}, 0.9);
  std::vector<Case> cases;
  cases.push_back({rot, make_ball_domain(zero2, 3.0)});
  cases.push_back({clamp2, make_whole_space(l2)});
  cases.push_back({box_clamp_op(lo3, hi3), make_whole_space(l3)});
  cases.push_back({box_clamp_op(lo15, hi15), make_whole_space(l15)});
  cases.push_back({proj, make_whole_space(l2)});
  cases.push_back({aff, make_whole_space(l2)});
  cases.push_back({convex_combination_op(0.3, rot, clamp2), make_ball_domain(zero2, 2.0)});
  cases.push_back({composition_op(proj, clamp2), make_whole_space(l2)});
  cases.push_back({constant_op(Vector{l2, {0.4, 0.4}}), make_whole_space(l2)});

  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    const double claim = c.op.lipschitz_claim.value();
    const double ratio = check_nonexpansive(c.op, c.domain, samples, seed + i);
    res.max_violation = std::max(res.max_violation, ratio - claim);
  }

  // affine certificate cross-check (power iteration in l_2)
  const CertificateCheck cc = certificate_check(aff, make_whole_space(l2), 2000, seed);
  if (!cc.consistent) res.max_violation = std::max(res.max_violation, 1.0);

  // fixed-set descriptors
  const OperatorSpec ops_with_sets[] = {rot, clamp2, proj, aff, composition_op(proj, clamp2)};
  for (const OperatorSpec& op : ops_with_sets) {
    const FixedSetDescriptor desc = fixed_set(op);
    if (desc.kind == FixedSetKind::Unknown) {
      res.max_violation = std::max(res.max_violation, 1.0);
      continue;
    }
    for (const Vector& pnt : fixed_set_grid(desc, 101)) {
      const double r = dist(apply_op(op, pnt), pnt);
      if (r > 1e-12) res.max_violation = std::max(res.max_violation, r);
    }
  }

  res.pass = res.max_violation <= res.threshold;
  res.detail = std::to_string(cases.size()) + " catalog claims x " + std::to_string(samples) +
               " pairs; fixed-set residual bound 1e-12";
  return res;
}

namespace detail {

inline double compare_trajectories(const TrajectoryRecord& rec,
                                   const std::vector<Vector>& ref) {
  double worst = 0.0;
  const std::size_t rows = std::min(rec.rows(), ref.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const auto xr = rec.x_row(i);
    double diff = 0.0;
    for (std::size_t j = 0; j < xr.size(); ++j)
      diff = std::max(diff, std::fabs(xr[j] - ref[i].coords[j]));
    worst = std::max(worst, diff / std::max(1.0, norm(ref[i])));
  }
  return worst;
}

}  // namespace detail

/// Every reduction constructor against its literal source recursion:
/// per-step relative gap over 1e3 steps.
inline SuiteResult reductions_suite(std::uint64_t seed, std::int64_t steps = 1000) {
  SuiteResult res{"reductions", 0.0, 1e-12, false, "", seed};
  const SpaceSpec l2 = make_space(2, 2.0);
  const SpaceSpec l3 = make_space(3, 3.0);
  const SpaceSpec l15 = make_space(2, 1.5);
  const StopRule no_stop{steps, -1.0, 1e12};

  {  // anchored one-step averaging, rotation in l_2
    const OperatorSpec T = rotation2d_op(1.0, Vector{l2, {0.2, 0.1}});
    const Vector u{l2, {0.3, 0.7}}, x0{l2, {1.5, -0.4}};
    const ScheduleSpec alpha = power_schedule(0.7, 1.0, 1);
    const RunParams params{make_whole_space(l2), x0, no_stop, seed};
    const auto cfg = make_mann_anchored(T, u, alpha, params);
    res.max_violation =
        std::max(res.max_violation,
                 detail::compare_trajectories(run(cfg), reference::mann_anchored(T, u, alpha, x0, steps)));
  }
  {  // two-step averaging, clamp in l_3 (3-dimensional)
    const Vector lo{l3, {0.0, 0.0, 0.0}}, hi{l3, {1.0, 1.0, 1.0}};
    const OperatorSpec T = box_clamp_op(lo, hi);
    const Vector u{l3, {0.25, 0.5, 0.75}}, x0{l3, {2.0, -1.0, 0.4}};
    const ScheduleSpec alpha = power_schedule(0.9, 1.0, 1);
    const ScheduleSpec beta = constant_schedule(0.6);
    const RunParams params{make_whole_space(l3), x0, no_stop, seed};
    const auto cfg = make_ishikawa_anchored(T, u, alpha, beta, params);
    res.max_violation = std::max(
        res.max_violation,
        detail::compare_trajectories(run(cfg),
                                     reference::ishikawa_anchored(T, u, alpha, beta, x0, steps)));
  }
  {  // one-step with errors, affine contraction in l_2
    const OperatorSpec T =
        affine_op({0.6, 0.2, -0.1, 0.5}, Vector{l2, {0.1, -0.2}}, 0.9);
    const Vector u{l2, {0.5, 0.5}}, x0{l2, {0.0, 1.0}};
    const BoundedSeq u_seq = make_bounded_seq(Vector{l2, {0.0, 0.0}}, 1.0, seed + 42);
    const ScheduleSpec alpha = power_schedule(0.5, 1.0, 1);
    const ScheduleSpec gamma = geometric_schedule(0.25, 0.5);
    const RunParams params{make_whole_space(l2), x0, no_stop, seed};
    const auto cfg = make_mann_with_errors(T, u, u_seq, alpha, gamma, params);
    res.max_violation = std::max(
        res.max_violation,
        detail::compare_trajectories(
            run(cfg), reference::mann_with_errors(T, u, u_seq, alpha, gamma, x0, steps)));
  }
  {  // two-step with errors, clamp in l_1.5
    const Vector lo{l15, {-1.0, -1.0}}, hi{l15, {1.0, 1.0}};
    const OperatorSpec T = box_clamp_op(lo, hi);
    const Vector u{l15, {0.1, 0.2}}, x0{l15, {0.9, -0.9}};
    const BoundedSeq u_seq = make_bounded_seq(zero_vector(l15), 0.5, seed + 7);
    const BoundedSeq v_seq = make_bounded_seq(zero_vector(l15), 0.5, seed + 8);
    const ScheduleSpec alpha = power_schedule(0.5, 1.0, 1);
    const ScheduleSpec beta = constant_schedule(0.5);
    const ScheduleSpec gamma = power_schedule(0.25, 2.0, 1);
    const ScheduleSpec delta = geometric_schedule(0.25, 0.7);
    const RunParams params{make_whole_space(l15), x0, no_stop, seed};
    const auto cfg =
        make_ishikawa_with_errors(T, u, u_seq, v_seq, alpha, beta, gamma, delta, params);
    res.max_violation =
        std::max(res.max_violation,
                 detail::compare_trajectories(
                     run(cfg), reference::ishikawa_with_errors(T, u, u_seq, v_seq, alpha, beta,
                                                               gamma, delta, x0, steps)));
  }
  {  // viscosity, projection-after-clamp in l_2
    const Vector lo{l2, {0.0, 0.0}}, hi{l2, {1.0, 1.0}};
    const OperatorSpec T =
        composition_op(segment_projection_op(Vector{l2, {0.0, 0.0}}, Vector{l2, {1.0, 0.0}}),
                       box_clamp_op(lo, hi));
    const OperatorSpec f = affine_op({0.5, 0.0, 0.0, 0.5}, Vector{l2, {0.5, 0.5}}, 0.5);
    const ScheduleSpec alpha = power_schedule(1.0, 1.0, 1);
    const Vector x0{l2, {0.3, 0.8}};
    const RunParams params{make_box_domain(lo, hi), x0, no_stop, seed};
    const auto cfg = make_viscosity(T, f, alpha, params);
    res.max_violation =
        std::max(res.max_violation,
                 detail::compare_trajectories(run(cfg), reference::viscosity(T, f, alpha, x0, steps)));
  }
  {  // three-term anchored scheme, rotation in l_2
    const Vector c{l2, {0.5, 0.5}};
    const OperatorSpec T = rotation2d_op(1.5707963267948966, c);
    const Vector u{l2, {1.0, 0.5}}, x0{l2, {1.0, 0.5}};
    const ScheduleSpec alpha = power_schedule(0.5, 1.0, 1);
    const ScheduleSpec beta = power_schedule(0.5, 1.0, 2);
    const RunParams params{make_whole_space(l2), x0, no_stop, seed};
    const auto cfg = make_yao_three_term(T, u, alpha, beta, params);
    res.max_violation = std::max(
        res.max_violation,
        detail::compare_trajectories(run(cfg),
                                     reference::yao_three_term(T, u, alpha, beta, x0, steps)));
  }

  res.pass = res.max_violation <= res.threshold;
  res.detail = "6 reduction constructors x " + std::to_string(steps) + " steps";
  return res;
}

inline std::vector<SuiteResult> run_suite(const std::string& which, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  if (which == "duality" || which == "all") out.push_back(duality_suite(seed));
  if (which == "lemma12" || which == "all") out.push_back(lemma12_suite(seed));
  if (which == "lemma13" || which == "all") out.push_back(lemma13_suite());
  if (which == "operators" || which == "all") out.push_back(operators_suite(seed));
  if (which == "reductions" || which == "all") out.push_back(reductions_suite(seed));
  if (out.empty())
    throw std::invalid_argument("unknown suite '" + which +
                                "' (expected duality|lemma12|lemma13|operators|reductions|all)");
  return out;
}

}  // namespace fixlab::suites
