#pragma once

// Literal implementations of the classical recursions, written exactly as
// their defining formulas (scalar-weighted sums, no shared combination
// helper). They exist to cross-check the reduction constructors: an engine
// trajectory and the matching direct recursion must agree step by step.

#include <cstdint>
#include <vector>

#include "fixlab/operators.hpp"
#include "fixlab/schedules.hpp"
#include "fixlab/space.hpp"

namespace fixlab::reference {

namespace detail {

inline Vector weighted_sum2(double w1, const Vector& v1, double w2, const Vector& v2) {
  Vector r = zero_vector(v1.space);
  for (std::size_t i = 0; i < r.coords.size(); ++i)
    r.coords[i] = w1 * v1.coords[i] + w2 * v2.coords[i];
  return r;
}

inline Vector weighted_sum3(double w1, const Vector& v1, double w2, const Vector& v2,
                            double w3, const Vector& v3) {
  Vector r = zero_vector(v1.space);
  for (std::size_t i = 0; i < r.coords.size(); ++i)
    r.coords[i] = w1 * v1.coords[i] + w2 * v2.coords[i] + w3 * v3.coords[i];
  return r;
}

}  // namespace detail

/// x_{n+1} = alpha_n u + (1 - alpha_n) T x_n; returns x_0 .. x_N.
inline std::vector<Vector> mann_anchored(const OperatorSpec& T, const Vector& u,
                                         const ScheduleSpec& alpha, const Vector& x0,
                                         std::int64_t N) {
  std::vector<Vector> xs{x0};
  for (std::int64_t n = 0; n < N; ++n) {
    const double a = eval(alpha, n);
    xs.push_back(detail::weighted_sum2(a, u, 1.0 - a, apply_op(T, xs.back())));
  }
  return xs;
}

/// x_{n+1} = alpha_n x_n + (1 - alpha_n) T x_n.
inline std::vector<Vector> mann_inertial(const OperatorSpec& T, const ScheduleSpec& alpha,
                                         const Vector& x0, std::int64_t N) {
  std::vector<Vector> xs{x0};
  for (std::int64_t n = 0; n < N; ++n) {
    const double a = eval(alpha, n);
    xs.push_back(detail::weighted_sum2(a, xs.back(), 1.0 - a, apply_op(T, xs.back())));
  }
  return xs;
}

/// y_n = beta_n x_n + (1 - beta_n) T x_n; x_{n+1} = alpha_n u + (1 - alpha_n) T y_n.
inline std::vector<Vector> ishikawa_anchored(const OperatorSpec& T, const Vector& u,
                                             const ScheduleSpec& alpha, const ScheduleSpec& beta,
                                             const Vector& x0, std::int64_t N) {
  std::vector<Vector> xs{x0};
  for (std::int64_t n = 0; n < N; ++n) {
    const double a = eval(alpha, n);
    const double b = eval(beta, n);
    const Vector y = detail::weighted_sum2(b, xs.back(), 1.0 - b, apply_op(T, xs.back()));
    xs.push_back(detail::weighted_sum2(a, u, 1.0 - a, apply_op(T, y)));
  }
  return xs;
}

/// x_{n+1} = alpha_n u + (1 - alpha_n - gamma_n) T x_n + gamma_n u_n.
inline std::vector<Vector> mann_with_errors(const OperatorSpec& T, const Vector& u,
                                            const BoundedSeq& u_seq, const ScheduleSpec& alpha,
                                            const ScheduleSpec& gamma, const Vector& x0,
                                            std::int64_t N) {
  std::vector<Vector> xs{x0};
  for (std::int64_t n = 0; n < N; ++n) {
    const double a = eval(alpha, n);
    const double g = eval(gamma, n);
    xs.push_back(detail::weighted_sum3(a, u, 1.0 - a - g, apply_op(T, xs.back()), g,
                                       seq_at(u_seq, n)));
  }
  return xs;
}

/// y_n = beta_n x_n + (1 - beta_n - delta_n) T x_n + delta_n v_n;
/// x_{n+1} = alpha_n u + (1 - alpha_n - gamma_n) T y_n + gamma_n u_n.
inline std::vector<Vector> ishikawa_with_errors(const OperatorSpec& T, const Vector& u,
                                                const BoundedSeq& u_seq, const BoundedSeq& v_seq,
                                                const ScheduleSpec& alpha, const ScheduleSpec& beta,
                                                const ScheduleSpec& gamma, const ScheduleSpec& delta,
                                                const Vector& x0, std::int64_t N) {
  std::vector<Vector> xs{x0};
  for (std::int64_t n = 0; n < N; ++n) {
    const double a = eval(alpha, n);
    const double b = eval(beta, n);
    const double g = eval(gamma, n);
    const double dl = eval(delta, n);
    const Vector y = detail::weighted_sum3(b, xs.back(), 1.0 - b - dl,
                                           apply_op(T, xs.back()), dl, seq_at(v_seq, n));
    xs.push_back(
        detail::weighted_sum3(a, u, 1.0 - a - g, apply_op(T, y), g, seq_at(u_seq, n)));
  }
  return xs;
}

/// x_{n+1} = alpha_n f(x_n) + (1 - alpha_n) T x_n.
inline std::vector<Vector> viscosity(const OperatorSpec& T, const OperatorSpec& f,
                                     const ScheduleSpec& alpha, const Vector& x0,
                                     std::int64_t N) {
  std::vector<Vector> xs{x0};
  for (std::int64_t n = 0; n < N; ++n) {
    const double a = eval(alpha, n);
    xs.push_back(detail::weighted_sum2(a, apply_op(f, xs.back()), 1.0 - a,
                                       apply_op(T, xs.back())));
  }
  return xs;
}

/// x_{n+1} = alpha_n u + beta_n x_n + gamma_n T x_n with gamma_n = 1 - alpha_n - beta_n.
inline std::vector<Vector> yao_three_term(const OperatorSpec& T, const Vector& u,
                                          const ScheduleSpec& alpha, const ScheduleSpec& beta,
                                          const Vector& x0, std::int64_t N) {
  std::vector<Vector> xs{x0};
  for (std::int64_t n = 0; n < N; ++n) {
    const double a = eval(alpha, n);
    const double b = eval(beta, n);
    xs.push_back(
        detail::weighted_sum3(a, u, b, xs.back(), 1.0 - a - b, apply_op(T, xs.back())));
  }
  return xs;
}

}  // namespace fixlab::reference
