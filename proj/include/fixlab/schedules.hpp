#pragma once

// Parametric scalar sequences for the iteration weights alpha_n, beta_n,
// gamma_n, delta_n, t_n. Only closed-form families are admitted so that the
// series predicates (sum diverges / converges, tends to zero) are decided
// analytically from the parameters, never from finite numerical evidence.
// All families are nonnegative and non-increasing in n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fixlab {

enum class ScheduleFamily { Power, Constant, Geometric, Zero, Sum };

struct ScheduleSpec {
  ScheduleFamily family = ScheduleFamily::Zero;
  double c = 0.0;    // leading coefficient (Power, Constant, Geometric)
  double rho = 0.0;  // Power decay exponent, >= 0
  double r = 0.0;    // Geometric ratio, in (0,1)
  int offset = 1;    // Power: value c/(n+offset)^rho, offset >= 1
  std::optional<std::pair<double, double>> clamp;  // [lo,hi] within [0,1]
  std::vector<ScheduleSpec> terms;  // Sum

  bool operator==(const ScheduleSpec&) const = default;
};

namespace detail {
inline void check_clamp(const std::optional<std::pair<double, double>>& cl) {
  if (!cl) return;
  if (!(0.0 <= cl->first && cl->first <= cl->second && cl->second <= 1.0))
    throw std::invalid_argument("schedule: clamp range must satisfy 0 <= lo <= hi <= 1");
}
}  // namespace detail

/// c/(n+offset)^rho.
inline ScheduleSpec power_schedule(double c, double rho, int offset = 1,
                                   std::optional<std::pair<double, double>> clamp = {}) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("power schedule: c must be > 0");
  if (!(rho >= 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("power schedule: rho must be >= 0");
  if (offset < 1) throw std::invalid_argument("power schedule: offset must be >= 1");
  detail::check_clamp(clamp);
  ScheduleSpec s;
  s.family = ScheduleFamily::Power;
  s.c = c;
  s.rho = rho;
  s.offset = offset;
  s.clamp = clamp;
  return s;
}

inline ScheduleSpec constant_schedule(double c,
                                      std::optional<std::pair<double, double>> clamp = {}) {
  if (!(c >= 0.0) || !std::isfinite(c))
    throw std::invalid_argument("constant schedule: c must be >= 0");
  detail::check_clamp(clamp);
  ScheduleSpec s;
  s.family = ScheduleFamily::Constant;
  s.c = c;
  s.clamp = clamp;
  return s;
}

/// c * r^n.
inline ScheduleSpec geometric_schedule(double c, double r,
                                       std::optional<std::pair<double, double>> clamp = {}) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("geometric schedule: c must be > 0");
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("geometric schedule: r must lie in (0,1)");
  detail::check_clamp(clamp);
  ScheduleSpec s;
  s.family = ScheduleFamily::Geometric;
  s.c = c;
  s.r = r;
  s.clamp = clamp;
  return s;
}

inline ScheduleSpec zero_schedule() { return ScheduleSpec{}; }

/// Pointwise sum of two families (used by the scheme reductions, where the
/// engine weight is e.g. alpha_n + gamma_n).
inline ScheduleSpec sum_schedule(const ScheduleSpec& a, const ScheduleSpec& b) {
  ScheduleSpec s;
  s.family = ScheduleFamily::Sum;
  s.terms = {a, b};
  return s;
}

inline double eval(const ScheduleSpec& s, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("schedule eval: n must be >= 0");
  double v = 0.0;
  switch (s.family) {
    case ScheduleFamily::Power:
      v = s.c / std::pow(static_cast<double>(n + s.offset), s.rho);
      break;
    case ScheduleFamily::Constant:
      v = s.c;
      break;
    case ScheduleFamily::Geometric:
      v = s.c * std::pow(s.r, static_cast<double>(n));
      break;
    case ScheduleFamily::Zero:
      v = 0.0;
      break;
    case ScheduleFamily::Sum:
      for (const ScheduleSpec& t : s.terms) v += eval(t, n);
      break;
  }
  if (s.clamp) v = std::clamp(v, s.clamp->first, s.clamp->second);
  return v;
}

/// Largest value of the sequence. Every family is non-increasing, so this is
/// the value at n = 0.
inline double schedule_max(const ScheduleSpec& s) { return eval(s, 0); }

/// Mathematical limit of the sequence as n -> inf.
inline double schedule_limit(const ScheduleSpec& s) {
  double v = 0.0;
  switch (s.family) {
    case ScheduleFamily::Power:
      v = s.rho > 0.0 ? 0.0 : s.c;
      break;
    case ScheduleFamily::Constant:
      v = s.c;
      break;
    case ScheduleFamily::Geometric:
    case ScheduleFamily::Zero:
      v = 0.0;
      break;
    case ScheduleFamily::Sum:
      for (const ScheduleSpec& t : s.terms) v += schedule_limit(t);
      break;
  }
  if (s.clamp) v = std::clamp(v, s.clamp->first, s.clamp->second);
  return v;
}

/// True when the sequence is 0 for every n.
inline bool is_identically_zero(const ScheduleSpec& s) {
  return schedule_max(s) == 0.0;
}

/// True when the mathematical value is > 0 for every n (floating-point
/// underflow of geometric tails notwithstanding).
inline bool is_strictly_positive(const ScheduleSpec& s) {
  switch (s.family) {
    case ScheduleFamily::Power:
    case ScheduleFamily::Geometric:
      return true;  // c > 0 enforced at construction
    case ScheduleFamily::Constant:
      return s.c > 0.0;
    case ScheduleFamily::Zero:
      return false;
    case ScheduleFamily::Sum:
      for (const ScheduleSpec& t : s.terms)
        if (is_strictly_positive(t)) return true;
      return false;
  }
  return false;
}

/// All values within [0,1]: max at n=0 <= 1 and nonnegativity by family.
inline bool in_unit_interval(const ScheduleSpec& s) {
  return schedule_max(s) <= 1.0;
}

struct PredicateReport {
  bool tends_to_zero = false;
  bool sum_diverges = false;
  bool sum_converges = false;
  bool indeterminate = false;
};

namespace detail {

// Tail decay classification, used both for the series predicates and for
// limits of quotients gamma_n / (alpha_n + gamma_n).
struct TailClass {
  enum Kind { Null, Geom, Power, Const } kind = Null;
  double coeff = 0.0;  // limit of a_n (Const), or of a_n * n^rho (Power), or c (Geom)
  double rate = 0.0;   // rho for Power, r for Geom
};

inline TailClass tail_class(const ScheduleSpec& s) {
  TailClass t;
  switch (s.family) {
    case ScheduleFamily::Zero:
      t.kind = TailClass::Null;
      break;
    case ScheduleFamily::Constant:
      if (s.c == 0.0) {
        t.kind = TailClass::Null;
      } else {
        t.kind = TailClass::Const;
        t.coeff = s.c;
      }
      break;
    case ScheduleFamily::Power:
      if (s.rho == 0.0) {
        t.kind = TailClass::Const;
        t.coeff = s.c;
      } else {
        t.kind = TailClass::Power;
        t.coeff = s.c;
        t.rate = s.rho;
      }
      break;
    case ScheduleFamily::Geometric:
      t.kind = TailClass::Geom;
      t.coeff = s.c;
      t.rate = s.r;
      break;
    case ScheduleFamily::Sum: {
      // The slowest-decaying term dominates; equal classes add coefficients.
      for (const ScheduleSpec& term : s.terms) {
        TailClass u = tail_class(term);
        if (u.kind == TailClass::Null) continue;
        if (t.kind == TailClass::Null) {
          t = u;
          continue;
        }
        auto slower = [](const TailClass& a, const TailClass& b) {
          if (a.kind != b.kind) return a.kind > b.kind;  // Const > Power > Geom
          if (a.kind == TailClass::Power) return a.rate < b.rate;
          if (a.kind == TailClass::Geom) return a.rate > b.rate;
          return false;
        };
        if (slower(u, t)) {
          t = u;
        } else if (u.kind == t.kind &&
                   (t.kind == TailClass::Const ||
                    (t.kind == TailClass::Power && u.rate == t.rate) ||
                    (t.kind == TailClass::Geom && u.rate == t.rate))) {
          t.coeff += u.coeff;
        }
      }
      break;
    }
  }
  // A lower clamp bound above the raw limit turns the tail into a constant;
  // any other clamp only edits finitely many leading terms.
  if (s.clamp) {
    const double lim = schedule_limit(s);
    if (lim > 0.0 && (t.kind == TailClass::Power || t.kind == TailClass::Geom ||
                      t.kind == TailClass::Null)) {
      t.kind = TailClass::Const;
      t.coeff = lim;
      t.rate = 0.0;
    }
    if (lim == 0.0 && t.kind == TailClass::Const) t.kind = TailClass::Null;
  }
  return t;
}

}  // namespace detail

/// Series behavior computed from the family parameters alone.
inline PredicateReport predicate_report(const ScheduleSpec& s) {
  PredicateReport r;
  const detail::TailClass t = detail::tail_class(s);
  switch (t.kind) {
    case detail::TailClass::Null:
      r.tends_to_zero = true;
      r.sum_diverges = false;
      r.sum_converges = true;
      break;
    case detail::TailClass::Const:
      r.tends_to_zero = false;
      r.sum_diverges = true;
      r.sum_converges = false;
      break;
    case detail::TailClass::Geom:
      r.tends_to_zero = true;
      r.sum_diverges = false;
      r.sum_converges = true;
      break;
    case detail::TailClass::Power:
      r.tends_to_zero = true;
      r.sum_diverges = t.rate <= 1.0;
      r.sum_converges = t.rate > 1.0;
      break;
  }
  return r;
}

/// lim_n a_n / (a_n + b_n), for a, b from the supported families. Returns
/// nullopt when both sequences are identically zero (the quotient is
/// undefined at every index).
inline std::optional<double> ratio_limit(const ScheduleSpec& a, const ScheduleSpec& b) {
  const detail::TailClass ta = detail::tail_class(a);
  const detail::TailClass tb = detail::tail_class(b);
  using TC = detail::TailClass;
  if (ta.kind == TC::Null && tb.kind == TC::Null) return std::nullopt;
  if (ta.kind == TC::Null) return 0.0;
  if (tb.kind == TC::Null) return 1.0;
  auto slowness_rank = [](const TC& t) {
    // higher rank decays slower
    if (t.kind == TC::Const) return 2;
    if (t.kind == TC::Power) return 1;
    return 0;  // Geom
  };
  const int ra = slowness_rank(ta), rb = slowness_rank(tb);
  if (ra != rb) return ra > rb ? 1.0 : 0.0;
  if (ta.kind == TC::Power) {
    if (ta.rate < tb.rate) return 1.0;
    if (ta.rate > tb.rate) return 0.0;
    return ta.coeff / (ta.coeff + tb.coeff);
  }
  if (ta.kind == TC::Geom) {
    if (ta.rate > tb.rate) return 1.0;
    if (ta.rate < tb.rate) return 0.0;
    return ta.coeff / (ta.coeff + tb.coeff);
  }
  return ta.coeff / (ta.coeff + tb.coeff);  // Const vs Const
}

}  // namespace fixlab
