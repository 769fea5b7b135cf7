#pragma once

// JSON experiment configs. The schema is strict: unknown keys are rejected
// anywhere in the document, every referenced vector must have length
// space.dim, and anchor points / error sequences must stay inside the
// declared domain.

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixlab/anchor.hpp"
#include "fixlab/analysis.hpp"
#include "fixlab/engine.hpp"
#include "fixlab/validate.hpp"

namespace fixlab::config {

using nlohmann::json;
using nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Experiment {
  std::string scheme_name;
  ProcessConfig cfg;
  AnchorParams anchor;
  std::optional<Vector> reference;
  std::optional<ScheduleSpec> t_schedule;  // for implicit-family diagnostics
};

namespace detail {

inline void check_keys(const json& j, const std::string& ctx,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError(ctx + ": unknown key '" + key + "'");
  }
}

inline const json& require(const json& j, const std::string& ctx, const char* key) {
  if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + std::string(key) + "'");
  return j.at(key);
}

inline double get_number(const json& j, const std::string& ctx, const char* key) {
  const json& v = require(j, ctx, key);
  if (!v.is_number()) throw ConfigError(ctx + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline double get_number_or(const json& j, const std::string& ctx, const char* key,
                            double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(ctx + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::int64_t get_int(const json& j, const std::string& ctx, const char* key) {
  const json& v = require(j, ctx, key);
  if (!v.is_number_integer()) throw ConfigError(ctx + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::string get_string(const json& j, const std::string& ctx, const char* key) {
  const json& v = require(j, ctx, key);
  if (!v.is_string()) throw ConfigError(ctx + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline Vector parse_vector(const json& j, const SpaceSpec& space, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array of numbers");
  std::vector<double> coords;
  for (const json& v : j) {
    if (!v.is_number()) throw ConfigError(ctx + ": expected numeric entries");
    coords.push_back(v.get<double>());
  }
  if (static_cast<int>(coords.size()) != space.dim)
    throw ConfigError(ctx + ": expected " + std::to_string(space.dim) + " entries, got " +
                      std::to_string(coords.size()));
  try {
    return make_vector(space, std::move(coords));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

inline SpaceSpec parse_space(const json& j) {
  check_keys(j, "space", {"dim", "p"});
  try {
    return make_space(static_cast<int>(get_int(j, "space", "dim")),
                      get_number(j, "space", "p"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("space: ") + e.what());
  }
}

inline DomainSpec parse_domain(const json& j, const SpaceSpec& space) {
  const std::string kind = get_string(j, "domain", "kind");
  try {
    if (kind == "box") {
      check_keys(j, "domain", {"kind", "lo", "hi"});
      return make_box_domain(parse_vector(require(j, "domain", "lo"), space, "domain.lo"),
                             parse_vector(require(j, "domain", "hi"), space, "domain.hi"));
    }
    if (kind == "ball") {
      check_keys(j, "domain", {"kind", "center", "radius"});
      return make_ball_domain(
          parse_vector(require(j, "domain", "center"), space, "domain.center"),
          get_number(j, "domain", "radius"));
    }
    if (kind == "whole_space") {
      check_keys(j, "domain", {"kind"});
      return make_whole_space(space);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  throw ConfigError("domain: unknown kind '" + kind + "'");
}

inline ScheduleSpec parse_schedule(const json& j, const std::string& ctx) {
  const std::string family = get_string(j, ctx, "family");
  std::optional<std::pair<double, double>> clamp;
  if (j.contains("clamp")) {
    const json& cl = j.at("clamp");
    if (!cl.is_array() || cl.size() != 2 || !cl[0].is_number() || !cl[1].is_number())
      throw ConfigError(ctx + ": clamp must be [lo, hi]");
    clamp = {cl[0].get<double>(), cl[1].get<double>()};
  }
  try {
    if (family == "power") {
      check_keys(j, ctx, {"family", "c", "rho", "offset", "clamp"});
      return power_schedule(get_number(j, ctx, "c"), get_number(j, ctx, "rho"),
                            static_cast<int>(get_int(j, ctx, "offset")), clamp);
    }
    if (family == "constant") {
      check_keys(j, ctx, {"family", "c", "clamp"});
      return constant_schedule(get_number(j, ctx, "c"), clamp);
    }
    if (family == "geometric") {
      check_keys(j, ctx, {"family", "c", "r", "clamp"});
      return geometric_schedule(get_number(j, ctx, "c"), get_number(j, ctx, "r"), clamp);
    }
    if (family == "zero") {
      check_keys(j, ctx, {"family"});
      return zero_schedule();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  throw ConfigError(ctx + ": unknown family '" + family + "'");
}

inline OperatorSpec parse_operator(const json& j, const SpaceSpec& space, const std::string& ctx);

inline OperatorSpec parse_operator(const json& j, const SpaceSpec& space,
                                   const std::string& ctx) {
  const std::string kind = get_string(j, ctx, "kind");
  try {
    if (kind == "identity") {
      check_keys(j, ctx, {"kind"});
      return identity_op(space);
    }
    if (kind == "constant") {
      check_keys(j, ctx, {"kind", "u"});
      return constant_op(parse_vector(require(j, ctx, "u"), space, ctx + ".u"));
    }
    if (kind == "rotation2d") {
      check_keys(j, ctx, {"kind", "theta", "center", "axes"});
      int a1 = 0, a2 = 1;
      if (j.contains("axes")) {
        const json& ax = j.at("axes");
        if (!ax.is_array() || ax.size() != 2) throw ConfigError(ctx + ": axes must be [i, j]");
        a1 = ax[0].get<int>();
        a2 = ax[1].get<int>();
      }
      return rotation2d_op(get_number(j, ctx, "theta"),
                           parse_vector(require(j, ctx, "center"), space, ctx + ".center"),
                           a1, a2);
    }
    if (kind == "box_clamp") {
      check_keys(j, ctx, {"kind", "lo", "hi"});
      return box_clamp_op(parse_vector(require(j, ctx, "lo"), space, ctx + ".lo"),
                          parse_vector(require(j, ctx, "hi"), space, ctx + ".hi"));
    }
    if (kind == "segment_projection") {
      check_keys(j, ctx, {"kind", "a", "b"});
      return segment_projection_op(parse_vector(require(j, ctx, "a"), space, ctx + ".a"),
                                   parse_vector(require(j, ctx, "b"), space, ctx + ".b"));
    }
    if (kind == "affine") {
      check_keys(j, ctx, {"kind", "matrix", "offset", "norm_certificate"});
      const json& m = require(j, ctx, "matrix");
      if (!m.is_array() || static_cast<int>(m.size()) != space.dim)
        throw ConfigError(ctx + ": matrix must be dim rows");
      std::vector<double> matrix;
      for (const json& row : m) {
        if (!row.is_array() || static_cast<int>(row.size()) != space.dim)
          throw ConfigError(ctx + ": matrix rows must have dim entries");
        for (const json& v : row) matrix.push_back(v.get<double>());
      }
      return affine_op(std::move(matrix),
                       parse_vector(require(j, ctx, "offset"), space, ctx + ".offset"),
                       get_number(j, ctx, "norm_certificate"));
    }
    if (kind == "convex_combination") {
      check_keys(j, ctx, {"kind", "weight", "op1", "op2"});
      return convex_combination_op(get_number(j, ctx, "weight"),
                                   parse_operator(require(j, ctx, "op1"), space, ctx + ".op1"),
                                   parse_operator(require(j, ctx, "op2"), space, ctx + ".op2"));
    }
    if (kind == "composition") {
      check_keys(j, ctx, {"kind", "outer", "inner"});
      return composition_op(parse_operator(require(j, ctx, "outer"), space, ctx + ".outer"),
                            parse_operator(require(j, ctx, "inner"), space, ctx + ".inner"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  throw ConfigError(ctx + ": unknown operator kind '" + kind + "'");
}

inline BoundedSeq parse_bounded_seq(const json& j, const SpaceSpec& space,
                                    const std::string& ctx) {
  check_keys(j, ctx, {"center", "radius", "seed"});
  try {
    return make_bounded_seq(parse_vector(require(j, ctx, "center"), space, ctx + ".center"),
                            get_number(j, ctx, "radius"),
                            static_cast<std::uint64_t>(get_int(j, ctx, "seed")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

inline FamilySpec parse_family(const json& j, const SpaceSpec& space, const std::string& ctx) {
  const std::string kind = get_string(j, ctx, "kind");
  try {
    if (kind == "constant_family") {
      check_keys(j, ctx, {"kind", "op"});
      return constant_family(parse_operator(require(j, ctx, "op"), space, ctx + ".op"));
    }
    if (kind == "identity_family") {
      check_keys(j, ctx, {"kind"});
      return identity_family(space);
    }
    if (kind == "decaying_perturbation") {
      check_keys(j, ctx, {"kind", "base", "direction", "rate"});
      return decaying_perturbation_family(
          parse_operator(require(j, ctx, "base"), space, ctx + ".base"),
          parse_operator(require(j, ctx, "direction"), space, ctx + ".direction"),
          parse_schedule(require(j, ctx, "rate"), ctx + ".rate"));
    }
    if (kind == "errors_family") {
      check_keys(j, ctx, {"kind", "u", "u_seq", "alpha", "gamma"});
      return errors_family(parse_vector(require(j, ctx, "u"), space, ctx + ".u"),
                           parse_bounded_seq(require(j, ctx, "u_seq"), space, ctx + ".u_seq"),
                           parse_schedule(require(j, ctx, "alpha"), ctx + ".alpha"),
                           parse_schedule(require(j, ctx, "gamma"), ctx + ".gamma"));
    }
    if (kind == "errors_state_family") {
      check_keys(j, ctx, {"kind", "v_seq", "beta", "delta"});
      return errors_state_family(
          parse_bounded_seq(require(j, ctx, "v_seq"), space, ctx + ".v_seq"),
          parse_schedule(require(j, ctx, "beta"), ctx + ".beta"),
          parse_schedule(require(j, ctx, "delta"), ctx + ".delta"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  } catch (const DegenerateIndexError& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  throw ConfigError(ctx + ": unknown family kind '" + kind + "'");
}

inline StopRule parse_stop(const json& j) {
  check_keys(j, "stop", {"max_iters", "residual_tol", "divergence_radius"});
  StopRule s;
  s.max_iters = get_int(j, "stop", "max_iters");
  if (s.max_iters < 0) throw ConfigError("stop: max_iters must be >= 0");
  s.residual_tol = get_number_or(j, "stop", "residual_tol", -1.0);
  s.divergence_radius = get_number_or(j, "stop", "divergence_radius", 1e6);
  return s;
}

inline AnchorParams parse_anchor(const json& j) {
  check_keys(j, "anchor",
             {"t0", "sigma", "path_tol", "inner_tol", "max_stages", "max_inner"});
  AnchorParams a;
  a.t0 = get_number_or(j, "anchor", "t0", a.t0);
  a.sigma = get_number_or(j, "anchor", "sigma", a.sigma);
  a.path_tol = get_number_or(j, "anchor", "path_tol", a.path_tol);
  a.inner_tol = get_number_or(j, "anchor", "inner_tol", a.inner_tol);
  if (j.contains("max_stages")) a.max_stages = static_cast<int>(get_int(j, "anchor", "max_stages"));
  if (j.contains("max_inner")) a.max_inner = get_int(j, "anchor", "max_inner");
  return a;
}

inline void require_seq_in_domain(const BoundedSeq& seq, const DomainSpec& domain,
                                  const std::string& ctx) {
  for (std::int64_t n = 0; n < 64; ++n)
    if (!contains(domain, seq_at(seq, n), 1e-9))
      throw ConfigError(ctx + ": sequence values must stay inside the domain");
}

inline ScheduleSpec schedule_section(const json& schedules, const char* key) {
  return parse_schedule(require(schedules, "schedules", key),
                        std::string("schedules.") + key);
}

}  // namespace detail

inline Experiment parse_experiment(const json& doc) {
  detail::check_keys(doc, "config",
                     {"scheme", "space", "domain", "operator_T", "f_family", "g_family", "f",
                      "u", "variant", "u_seq", "v_seq", "schedules", "x0", "stop", "seed",
                      "reference", "anchor"});
  Experiment exp;
  exp.scheme_name = detail::get_string(doc, "config", "scheme");
  const SpaceSpec space = detail::parse_space(detail::require(doc, "config", "space"));
  const DomainSpec domain =
      detail::parse_domain(detail::require(doc, "config", "domain"), space);
  const OperatorSpec T =
      detail::parse_operator(detail::require(doc, "config", "operator_T"), space, "operator_T");
  const Vector x0 = detail::parse_vector(detail::require(doc, "config", "x0"), space, "x0");
  const StopRule stop = detail::parse_stop(detail::require(doc, "config", "stop"));
  const auto seed = static_cast<std::uint64_t>(detail::get_int(doc, "config", "seed"));
  const json& schedules = detail::require(doc, "config", "schedules");
  detail::check_keys(schedules, "schedules", {"alpha", "beta", "gamma", "delta", "t"});
  const RunParams params{domain, x0, stop, seed};

  const std::string& scheme = exp.scheme_name;
  auto forbid = [&](const char* key, const char* why) {
    if (doc.contains(key))
      throw ConfigError("config: key '" + std::string(key) + "' is not used by scheme '" +
                        scheme + "' (" + why + ")");
  };

  try {
    if (scheme == "extended") {
      forbid("f", "extended configs specify f_family");
      forbid("u", "extended configs specify f_family");
      forbid("u_seq", "extended configs specify f_family");
      forbid("v_seq", "extended configs specify g_family");
      forbid("variant", "extended configs specify families directly");
      ProcessConfig cfg;
      cfg.space = space;
      cfg.domain = domain;
      cfg.T = T;
      cfg.x0 = x0;
      cfg.stop = stop;
      cfg.seed = seed;
      cfg.scheme = Scheme::Extended;
      cfg.f_family = detail::parse_family(detail::require(doc, "config", "f_family"), space,
                                          "f_family");
      cfg.g_family = detail::parse_family(detail::require(doc, "config", "g_family"), space,
                                          "g_family");
      cfg.alpha = detail::schedule_section(schedules, "alpha");
      cfg.beta = detail::schedule_section(schedules, "beta");
      cfg.raw.alpha = cfg.alpha;
      cfg.raw.beta = cfg.beta;
      fixlab::detail::validate_config(cfg);
      exp.cfg = cfg;
    } else if (scheme == "mann" || scheme == "ishikawa") {
      forbid("f", "averaged schemes use the anchor u");
      forbid("u_seq", "no error sequence in this scheme");
      forbid("v_seq", "no error sequence in this scheme");
      forbid("f_family", "derived from the scheme");
      forbid("g_family", "derived from the scheme");
      std::string variant = "anchored";
      if (doc.contains("variant")) variant = detail::get_string(doc, "config", "variant");
      if (variant != "anchored" && variant != "inertial")
        throw ConfigError("config: variant must be 'anchored' or 'inertial'");
      const ScheduleSpec alpha = detail::schedule_section(schedules, "alpha");
      if (scheme == "mann") {
        exp.cfg = variant == "anchored"
                      ? make_mann_anchored(
                            T,
                            detail::parse_vector(detail::require(doc, "config", "u"), space, "u"),
                            alpha, params)
                      : make_mann_inertial(T, alpha, params);
      } else {
        const ScheduleSpec beta = detail::schedule_section(schedules, "beta");
        exp.cfg = variant == "anchored"
                      ? make_ishikawa_anchored(
                            T,
                            detail::parse_vector(detail::require(doc, "config", "u"), space, "u"),
                            alpha, beta, params)
                      : make_ishikawa_inertial(T, alpha, beta, params);
      }
    } else if (scheme == "mann_errors") {
      forbid("f", "with-errors schemes use the anchor u");
      forbid("v_seq", "one-step scheme has no v sequence");
      forbid("f_family", "derived from the scheme");
      forbid("g_family", "derived from the scheme");
      forbid("variant", "with-errors schemes are anchored");
      const BoundedSeq u_seq =
          detail::parse_bounded_seq(detail::require(doc, "config", "u_seq"), space, "u_seq");
      detail::require_seq_in_domain(u_seq, domain, "u_seq");
      exp.cfg = make_mann_with_errors(
          T, detail::parse_vector(detail::require(doc, "config", "u"), space, "u"), u_seq,
          detail::schedule_section(schedules, "alpha"),
          detail::schedule_section(schedules, "gamma"), params);
    } else if (scheme == "ishikawa_errors") {
      forbid("f", "with-errors schemes use the anchor u");
      forbid("f_family", "derived from the scheme");
      forbid("g_family", "derived from the scheme");
      forbid("variant", "with-errors schemes are anchored");
      const BoundedSeq u_seq =
          detail::parse_bounded_seq(detail::require(doc, "config", "u_seq"), space, "u_seq");
      const BoundedSeq v_seq =
          detail::parse_bounded_seq(detail::require(doc, "config", "v_seq"), space, "v_seq");
      detail::require_seq_in_domain(u_seq, domain, "u_seq");
      detail::require_seq_in_domain(v_seq, domain, "v_seq");
      exp.cfg = make_ishikawa_with_errors(
          T, detail::parse_vector(detail::require(doc, "config", "u"), space, "u"), u_seq,
          v_seq, detail::schedule_section(schedules, "alpha"),
          detail::schedule_section(schedules, "beta"),
          detail::schedule_section(schedules, "gamma"),
          detail::schedule_section(schedules, "delta"), params);
    } else if (scheme == "viscosity") {
      forbid("u", "the viscosity scheme uses a contraction f");
      forbid("u_seq", "no error sequence in this scheme");
      forbid("v_seq", "no error sequence in this scheme");
      forbid("f_family", "derived from the scheme");
      forbid("g_family", "derived from the scheme");
      forbid("variant", "not applicable");
      exp.cfg = make_viscosity(
          T, detail::parse_operator(detail::require(doc, "config", "f"), space, "f"),
          detail::schedule_section(schedules, "alpha"), params);
    } else if (scheme == "yao") {
      forbid("f", "the three-term scheme uses the anchor u");
      forbid("u_seq", "no error sequence in this scheme");
      forbid("v_seq", "no error sequence in this scheme");
      forbid("f_family", "derived from the scheme");
      forbid("g_family", "derived from the scheme");
      forbid("variant", "not applicable");
      exp.cfg = make_yao_three_term(
          T, detail::parse_vector(detail::require(doc, "config", "u"), space, "u"),
          detail::schedule_section(schedules, "alpha"),
          detail::schedule_section(schedules, "beta"), params);
    } else {
      throw ConfigError("config: unknown scheme '" + scheme + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DegenerateIndexError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (doc.contains("reference"))
    exp.reference = detail::parse_vector(doc.at("reference"), space, "reference");
  if (doc.contains("anchor")) exp.anchor = detail::parse_anchor(doc.at("anchor"));
  if (schedules.contains("t"))
    exp.t_schedule = detail::schedule_section(schedules, "t");
  return exp;
}

inline Experiment load_experiment(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_experiment(doc);
}

// ---------------------------------------------------------------------------
// Report serialization (fixed key order)
// ---------------------------------------------------------------------------

inline const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::MaxIters:
      return "max_iters";
    case StopReason::ResidualBelowTol:
      return "residual_below_tol";
    case StopReason::Diverged:
      return "diverged";
  }
  return "?";
}

inline ordered_json report_to_json(const ConvergenceReport& rep,
                                   const HypothesisReport* hyp = nullptr) {
  ordered_json j;
  j["stop"] = stop_reason_name(rep.stop);
  j["iterations"] = rep.iterations;
  j["final_residual"] = rep.final_residual;
  j["final_dist"] = rep.final_dist ? json(*rep.final_dist) : json(nullptr);
  j["tail_slope"] = rep.tail_slope ? json(*rep.tail_slope) : json(nullptr);
  j["min_perturbation_margin"] = rep.min_perturbation_margin
                                     ? json(*rep.min_perturbation_margin)
                                     : json(nullptr);
  if (hyp) {
    ordered_json items = ordered_json::array();
    for (const HypothesisItem& it : hyp->items) {
      ordered_json o;
      o["id"] = it.id;
      o["description"] = it.description;
      o["status"] = status_word(it.status);
      o["kind"] = status_marker(it.status);
      o["detail"] = it.detail;
      items.push_back(o);
    }
    ordered_json h;
    h["theorem"] = hyp->theorem;
    h["samples"] = hyp->samples;
    h["seed"] = hyp->seed;
    h["items"] = items;
    j["hypothesis_report"] = h;
  } else {
    j["hypothesis_report"] = nullptr;
  }
  return j;
}

}  // namespace fixlab::config
