#pragma once

// Itemized hypothesis validation for the convergence theorems the engine is
// meant to witness. Series predicates are decided analytically from the
// schedule families; operator properties are checked against catalog
// certificates and sampled falsifiers; trajectory assumptions (boundedness,
// vanishing residual) are marked runtime-monitored because they cannot be
// decided before a run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "fixlab/engine.hpp"
#include "fixlab/operators.hpp"
#include "fixlab/schedules.hpp"

namespace fixlab {

enum class CheckStatus { Pass, Fail, EmpiricalPass, EmpiricalFail, RuntimeMonitored };

inline const char* status_marker(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
    case CheckStatus::Fail:
      return "analytic";
    case CheckStatus::EmpiricalPass:
    case CheckStatus::EmpiricalFail:
      return "sampled";
    case CheckStatus::RuntimeMonitored:
      return "runtime-monitored";
  }
  return "?";
}

inline const char* status_word(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
    case CheckStatus::EmpiricalPass:
      return "pass";
    case CheckStatus::Fail:
    case CheckStatus::EmpiricalFail:
      return "FAIL";
    case CheckStatus::RuntimeMonitored:
      return "monitored";
  }
  return "?";
}

struct HypothesisItem {
  std::string id;
  std::string description;
  CheckStatus status = CheckStatus::RuntimeMonitored;
  std::string detail;
};

struct HypothesisReport {
  std::string theorem;
  std::vector<HypothesisItem> items;
  int samples = 0;
  std::uint64_t seed = 0;

  bool all_non_runtime_pass() const {
    for (const HypothesisItem& it : items)
      if (it.status == CheckStatus::Fail || it.status == CheckStatus::EmpiricalFail)
        return false;
    return true;
  }
};

namespace detail {

inline std::vector<std::int64_t> default_sample_indices() {
  return {0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
}

inline double sampled_family_lipschitz(const FamilySpec& fam, const DomainSpec& domain,
                                       const std::vector<std::int64_t>& sample_n, int samples,
                                       std::uint64_t seed) {
  double worst = 0.0;
  for (std::int64_t n : sample_n) {
    Rng rng(seed);
    for (int k = 0; k < samples; ++k) {
      const Vector x = sample_point(domain, rng);
      const Vector y = sample_point(domain, rng);
      const double dxy = dist(x, y);
      if (dxy == 0.0) continue;
      worst = std::max(worst, dist(family_eval(fam, n, x), family_eval(fam, n, y)) / dxy);
    }
  }
  return worst;
}

/// Does the analytic envelope of ||f_n - f||_sup vanish?
inline bool envelope_vanishes(const FamilySpec& fam) {
  switch (fam.kind) {
    case FamilyKind::ConstantFamily:
    case FamilyKind::IdentityFamily:
      return true;
    case FamilyKind::DecayingPerturbation:
      return predicate_report(fam.rate).tends_to_zero;
    case FamilyKind::ErrorsFamily: {
      const auto rl = ratio_limit(fam.w_noise, fam.w_anchor);
      return rl && *rl == 0.0;
    }
    case FamilyKind::ErrorsStateFamily:
      return ratio_limit(fam.w_noise, fam.w_anchor).has_value();
  }
  return false;
}

struct PerturbationData {
  ScheduleSpec delta;
  double M = 1.0;
};

/// (delta, M) pair for the perturbation bound, when derivable from the
/// g-family structure.
inline std::optional<PerturbationData> derive_perturbation_data(const FamilySpec& g) {
  switch (g.kind) {
    case FamilyKind::IdentityFamily:
      return PerturbationData{zero_schedule(), 1.0};
    case FamilyKind::ErrorsStateFamily:
      return PerturbationData{g.w_noise, std::max(seq_bound(g.seq), 1e-6)};
    default:
      return std::nullopt;
  }
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

/// Hypotheses of the master convergence theorem for the extended two-step
/// process: schedule conditions on alpha/beta/delta, a uniform contraction
/// family converging uniformly to f, and the perturbation bound
/// beta_n ||g_n(x) - x|| <= delta_n (||x|| + M).
inline HypothesisReport validate_theorem_2_1(const ProcessConfig& cfg, int samples = 512,
                                             std::uint64_t seed = 0xA11CEull) {
  HypothesisReport rep;
  rep.theorem = "2.1";
  rep.samples = samples;
  rep.seed = seed;
  const auto sample_n = detail::default_sample_indices();

  {  // (a) alpha -> 0, sum alpha = inf, alpha in [0,1]
    const PredicateReport pr = predicate_report(cfg.alpha);
    const bool in01 = in_unit_interval(cfg.alpha);
    HypothesisItem it{"a", "alpha_n -> 0, sum alpha_n = inf, alpha_n in [0,1]",
                      CheckStatus::Pass, ""};
    if (!pr.tends_to_zero || !pr.sum_diverges || !in01) {
      it.status = CheckStatus::Fail;
      if (!pr.tends_to_zero) it.detail += "alpha does not tend to 0; ";
      if (!pr.sum_diverges) it.detail += "sum alpha_n < inf; ";
      if (!in01) it.detail += "alpha exits [0,1]; ";
    }
    rep.items.push_back(it);
  }

  {  // (b) beta in (0,1]
    HypothesisItem it{"b", "beta_n in (0,1]", CheckStatus::Pass, ""};
    if (!is_strictly_positive(cfg.beta) || !in_unit_interval(cfg.beta)) {
      it.status = CheckStatus::Fail;
      it.detail = "beta must be positive for every n and bounded by 1";
    }
    rep.items.push_back(it);
  }

  const auto pdata = detail::derive_perturbation_data(cfg.g_family);

  {  // (c) sum delta < inf
    HypothesisItem it{"c", "sum delta_n < inf", CheckStatus::Pass, ""};
    if (pdata) {
      const PredicateReport pr = predicate_report(pdata->delta);
      if (!pr.sum_converges) {
        it.status = CheckStatus::Fail;
        it.detail = "sum delta_n diverges";
      }
    } else {
      it.status = CheckStatus::RuntimeMonitored;
      it.detail = "no delta certificate derivable from the g-family";
    }
    rep.items.push_back(it);
  }

  {  // (d) uniform contraction family
    HypothesisItem it{"d", "{f_n} uniform contractions with common L < 1",
                      CheckStatus::Pass, ""};
    const auto L = family_contraction_certificate(cfg.f_family);
    if (!L || !(*L < 1.0)) {
      it.status = CheckStatus::Fail;
      it.detail = L ? "certificate L = " + detail::fmt(*L) + " >= 1"
                    : "no contraction certificate derivable";
    } else {
      const double emp =
          detail::sampled_family_lipschitz(cfg.f_family, cfg.domain, sample_n, samples, seed);
      if (emp > *L + 1e-9) {
        it.status = CheckStatus::EmpiricalFail;
        it.detail = "sampled Lipschitz " + detail::fmt(emp) + " exceeds certificate " +
                    detail::fmt(*L);
      } else {
        it.detail = "L = " + detail::fmt(*L) + ", sampled " + detail::fmt(emp);
      }
    }
    rep.items.push_back(it);
  }

  {  // (e) f_n -> f uniformly
    HypothesisItem it{"e", "{f_n} converges uniformly to f", CheckStatus::EmpiricalPass, ""};
    const auto limit = family_uniform_limit(cfg.f_family);
    if (!limit) {
      it.status = CheckStatus::Fail;
      it.detail = "no derivable uniform limit";
    } else if (!detail::envelope_vanishes(cfg.f_family)) {
      it.status = CheckStatus::Fail;
      it.detail = "analytic envelope of ||f_n - f|| does not vanish";
    } else {
      const std::vector<double> sups = check_uniform_convergence(
          cfg.f_family, *limit, cfg.domain, sample_n, samples, seed);
      bool monotone = true;
      for (std::size_t i = 1; i < sups.size(); ++i)
        if (sups[i] > sups[i - 1] + 1e-12) monotone = false;
      if (!monotone) {
        it.status = CheckStatus::EmpiricalFail;
        it.detail = "sampled sup ||f_n - f|| is not non-increasing";
      } else {
        it.detail = "sup at n=0: " + detail::fmt(sups.front()) +
                    ", at n=1024: " + detail::fmt(sups.back());
      }
    }
    rep.items.push_back(it);
  }

  {  // (f) perturbation bound
    HypothesisItem it{"f", "beta_n ||g_n(x) - x|| <= delta_n (||x|| + M)",
                      CheckStatus::EmpiricalPass, ""};
    if (!pdata) {
      it.status = CheckStatus::RuntimeMonitored;
      it.detail = "no (delta, M) certificate; bound monitored along trajectories";
    } else {
      const PerturbationReport pr = check_perturbation_bound(
          cfg.g_family, cfg.beta, pdata->delta, pdata->M, cfg.domain, sample_n, samples, seed);
      if (!pr.pass) {
        it.status = CheckStatus::EmpiricalFail;
        it.detail = "min margin " + detail::fmt(pr.min_margin);
      } else {
        it.detail = "min margin " + detail::fmt(pr.min_margin) +
                    " with M = " + detail::fmt(pdata->M);
      }
    }
    rep.items.push_back(it);
  }

  rep.items.push_back({"g", "{x_n} bounded and ||T x_n - x_n|| -> 0",
                       CheckStatus::RuntimeMonitored,
                       "trajectory assumptions; guarded by the divergence radius and the "
                       "reported residual tail"});
  return rep;
}

/// Viscosity-scheme hypotheses: certified contraction f, vanishing
/// divergent-sum alpha, nonexpansive T with nonempty fixed set.
inline HypothesisReport validate_theorem_3_1(const ProcessConfig& cfg, int samples = 512,
                                             std::uint64_t seed = 0xA11CEull) {
  if (!(cfg.scheme == Scheme::Viscosity || (cfg.scheme == Scheme::Mann && !cfg.inertial)))
    throw std::invalid_argument(
        "theorem 3.1 applies to the viscosity scheme (or its constant-anchor special case)");
  HypothesisReport rep;
  rep.theorem = "3.1";
  rep.samples = samples;
  rep.seed = seed;

  {
    HypothesisItem it{"a", "T nonexpansive", CheckStatus::Pass, ""};
    const CertificateCheck cc = certificate_check(cfg.T, cfg.domain, samples, seed);
    if (!cc.claimed || !(*cc.claimed <= 1.0)) {
      it.status = CheckStatus::Fail;
      it.detail = "no nonexpansiveness claim";
    } else if (!cc.consistent) {
      it.status = CheckStatus::EmpiricalFail;
      it.detail = "sampled ratio " + detail::fmt(cc.empirical) + " contradicts the claim";
    } else {
      it.detail = "sampled ratio " + detail::fmt(cc.empirical);
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"b", "F(T) nonempty", CheckStatus::Pass, ""};
    const FixedSetDescriptor desc = fixed_set(cfg.T);
    if (desc.kind == FixedSetKind::Unknown) {
      it.status = CheckStatus::RuntimeMonitored;
      it.detail = "no analytic fixed-set descriptor; existence not certified";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"c", "f is a contraction on D", CheckStatus::Pass, ""};
    const auto L = family_contraction_certificate(cfg.f_family);
    if (!L || !(*L < 1.0)) {
      it.status = CheckStatus::Fail;
      it.detail = "no contraction certificate with L < 1";
    } else {
      it.detail = "L = " + detail::fmt(*L);
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"d", "alpha_n -> 0 and sum alpha_n = inf", CheckStatus::Pass, ""};
    const PredicateReport pr = predicate_report(cfg.alpha);
    if (!pr.tends_to_zero || !pr.sum_diverges) {
      it.status = CheckStatus::Fail;
      it.detail = !pr.tends_to_zero ? "alpha does not tend to 0" : "sum alpha_n < inf";
    }
    rep.items.push_back(it);
  }

  rep.items.push_back({"e", "||T x_n - x_n|| -> 0", CheckStatus::RuntimeMonitored,
                       "trajectory assumption; reported residual tail"});
  return rep;
}

/// Two-step with-errors hypotheses, stated on the raw weight sequences.
inline HypothesisReport validate_theorem_3_2(const ProcessConfig& cfg, int samples = 512,
                                             std::uint64_t seed = 0xA11CEull) {
  if (cfg.scheme != Scheme::IshikawaErrors || !cfg.raw.alpha || !cfg.raw.beta ||
      !cfg.raw.gamma || !cfg.raw.delta)
    throw std::invalid_argument(
        "theorem 3.2 applies to the two-step with-errors scheme with raw alpha, beta, "
        "gamma, delta");
  const ScheduleSpec& alpha = *cfg.raw.alpha;
  const ScheduleSpec& beta = *cfg.raw.beta;
  const ScheduleSpec& gamma = *cfg.raw.gamma;
  const ScheduleSpec& delta = *cfg.raw.delta;

  HypothesisReport rep;
  rep.theorem = "3.2";
  rep.samples = samples;
  rep.seed = seed;

  {
    HypothesisItem it{"a", "0 <= alpha_n + gamma_n <= 1", CheckStatus::Pass, ""};
    if (schedule_max(alpha) + schedule_max(gamma) > 1.0) {
      it.status = CheckStatus::Fail;
      it.detail = "max alpha_n + gamma_n = " +
                  detail::fmt(schedule_max(alpha) + schedule_max(gamma));
    }
    if (is_identically_zero(alpha) && is_identically_zero(gamma)) {
      it.status = CheckStatus::Fail;
      it.detail = "alpha_n + gamma_n = 0 at every n (degenerate)";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"b", "0 < beta_n + delta_n <= 1", CheckStatus::Pass, ""};
    const bool positive = is_strictly_positive(beta) || is_strictly_positive(delta);
    if (!positive || schedule_max(beta) + schedule_max(delta) > 1.0) {
      it.status = CheckStatus::Fail;
      it.detail = positive ? "beta_n + delta_n exceeds 1" : "beta_n + delta_n vanishes";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"c", "alpha_n -> 0 and sum alpha_n = inf", CheckStatus::Pass, ""};
    const PredicateReport pr = predicate_report(alpha);
    if (!pr.tends_to_zero || !pr.sum_diverges) {
      it.status = CheckStatus::Fail;
      it.detail = !pr.tends_to_zero ? "alpha does not tend to 0" : "sum alpha_n < inf";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"d", "sum gamma_n < inf", CheckStatus::Pass, ""};
    if (!predicate_report(gamma).sum_converges) {
      it.status = CheckStatus::Fail;
      it.detail = "sum gamma_n diverges";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"e", "sum delta_n < inf", CheckStatus::Pass, ""};
    if (!predicate_report(delta).sum_converges) {
      it.status = CheckStatus::Fail;
      it.detail = "sum delta_n diverges";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"f", "{u_n} and {v_n} bounded in D", CheckStatus::Pass, ""};
    if (cfg.f_family.kind == FamilyKind::ErrorsFamily &&
        cfg.g_family.kind == FamilyKind::ErrorsStateFamily) {
      it.detail = "||u_n|| <= " + detail::fmt(seq_bound(cfg.f_family.seq)) +
                  ", ||v_n|| <= " + detail::fmt(seq_bound(cfg.g_family.seq));
    } else {
      it.status = CheckStatus::Fail;
      it.detail = "config does not carry bounded error sequences";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"g", "gamma_n / (alpha_n + gamma_n) -> 0", CheckStatus::Pass, ""};
    const auto rl = ratio_limit(gamma, alpha);
    if (!rl) {
      it.status = CheckStatus::Fail;
      it.detail = "ratio undefined (both sequences vanish)";
    } else if (*rl != 0.0) {
      it.status = CheckStatus::Fail;
      it.detail = "ratio limit = " + detail::fmt(*rl);
    }
    rep.items.push_back(it);
  }

  rep.items.push_back({"h", "{x_n} bounded and ||T x_n - x_n|| -> 0",
                       CheckStatus::RuntimeMonitored,
                       "trajectory assumptions; guarded by the divergence radius and the "
                       "reported residual tail"});
  return rep;
}

/// Three-term anchored scheme hypotheses. The induced per-index contraction
/// constant beta_n/(alpha_n + beta_n) is reported; when its supremum reaches
/// 1 no uniform certificate exists and the item is only monitored, not
/// declared false.
inline HypothesisReport validate_theorem_3_3(const ProcessConfig& cfg, int samples = 512,
                                             std::uint64_t seed = 0xA11CEull) {
  if (cfg.scheme != Scheme::Yao || !cfg.raw.alpha || !cfg.raw.beta)
    throw std::invalid_argument(
        "theorem 3.3 applies to the three-term anchored scheme with raw alpha, beta");
  const ScheduleSpec& alpha = *cfg.raw.alpha;
  const ScheduleSpec& beta = *cfg.raw.beta;

  HypothesisReport rep;
  rep.theorem = "3.3";
  rep.samples = samples;
  rep.seed = seed;

  {
    HypothesisItem it{"a", "alpha_n, beta_n, gamma_n >= 0 with gamma_n = 1 - alpha_n - beta_n",
                      CheckStatus::Pass, ""};
    if (schedule_max(alpha) + schedule_max(beta) > 1.0) {
      it.status = CheckStatus::Fail;
      it.detail =
          "max alpha_n + beta_n = " + detail::fmt(schedule_max(alpha) + schedule_max(beta));
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"b", "alpha_n -> 0 and sum alpha_n = inf", CheckStatus::Pass, ""};
    const PredicateReport pr = predicate_report(alpha);
    if (!pr.tends_to_zero || !pr.sum_diverges) {
      it.status = CheckStatus::Fail;
      it.detail = !pr.tends_to_zero ? "alpha does not tend to 0" : "sum alpha_n < inf";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"c", "beta_n -> 0", CheckStatus::Pass, ""};
    if (!predicate_report(beta).tends_to_zero) {
      it.status = CheckStatus::Fail;
      it.detail = "beta does not tend to 0";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"d", "induced family constants L_n = beta_n/(alpha_n + beta_n)",
                      CheckStatus::Pass, ""};
    const auto L = family_contraction_certificate(cfg.f_family);
    if (L && *L < 1.0) {
      it.detail = "sup L_n = " + detail::fmt(*L);
    } else {
      it.status = CheckStatus::RuntimeMonitored;
      it.detail = "sup L_n = 1: no uniform contraction certificate; the conclusion is "
                  "not asserted false";
    }
    rep.items.push_back(it);
  }

  {
    HypothesisItem it{"e", "T nonexpansive with F(T) nonempty", CheckStatus::Pass, ""};
    const CertificateCheck cc = certificate_check(cfg.T, cfg.domain, samples, seed);
    const FixedSetDescriptor desc = fixed_set(cfg.T);
    if (!cc.claimed || !(*cc.claimed <= 1.0) || !cc.consistent) {
      it.status = CheckStatus::Fail;
      it.detail = "nonexpansiveness claim missing or contradicted";
    } else if (desc.kind == FixedSetKind::Unknown) {
      it.status = CheckStatus::RuntimeMonitored;
      it.detail = "no analytic fixed-set descriptor";
    }
    rep.items.push_back(it);
  }

  rep.items.push_back({"f", "{x_n} bounded and ||T x_n - x_n|| -> 0",
                       CheckStatus::RuntimeMonitored,
                       "trajectory assumptions; guarded by the divergence radius and the "
                       "reported residual tail"});
  return rep;
}

inline HypothesisReport validate_theorem(const ProcessConfig& cfg, const std::string& theorem,
                                         int samples = 512, std::uint64_t seed = 0xA11CEull) {
  if (theorem == "2.1") return validate_theorem_2_1(cfg, samples, seed);
  if (theorem == "3.1") return validate_theorem_3_1(cfg, samples, seed);
  if (theorem == "3.2") return validate_theorem_3_2(cfg, samples, seed);
  if (theorem == "3.3") return validate_theorem_3_3(cfg, samples, seed);
  throw std::invalid_argument("unknown theorem '" + theorem + "' (expected 2.1, 3.1, 3.2 or 3.3)");
}

}  // namespace fixlab
