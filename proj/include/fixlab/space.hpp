#pragma once

// Finite-dimensional real l_p spaces: p-norm, dual pairing, and the
// normalized / generalized duality mappings. The exponent is restricted to
// 1 < p < inf, where the space is uniformly smooth and the duality mapping
// is single-valued; p = 1 and p = inf are rejected at construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixlab/rng.hpp"

namespace fixlab {

struct SpaceSpec {
  int dim = 0;
  double p = 2.0;

  /// Dual exponent q with 1/p + 1/q = 1.
  double q() const { return p / (p - 1.0); }

  bool operator==(const SpaceSpec&) const = default;
};

inline SpaceSpec make_space(int dim, double p) {
  if (dim < 1) throw std::invalid_argument("space: dim must be >= 1");
  if (!std::isfinite(p) || !(p > 1.0)) {
    throw std::invalid_argument(
        "space: exponent p must lie in (1, inf); p = 1 and p = inf are "
        "rejected because l_p is uniformly smooth only for 1 < p < inf");
  }
  return SpaceSpec{dim, p};
}

struct Vector {
  SpaceSpec space;
  std::vector<double> coords;

  bool operator==(const Vector&) const = default;
};

inline Vector make_vector(const SpaceSpec& space, std::vector<double> coords) {
  if (static_cast<int>(coords.size()) != space.dim)
    throw std::invalid_argument("vector: coordinate count != space.dim");
  for (double c : coords)
    if (!std::isfinite(c))
      throw std::invalid_argument("vector: coordinates must be finite");
  return Vector{space, std::move(coords)};
}

inline Vector zero_vector(const SpaceSpec& space) {
  return Vector{space, std::vector<double>(static_cast<std::size_t>(space.dim), 0.0)};
}

inline void check_same_space(const Vector& a, const Vector& b) {
  if (!(a.space == b.space))
    throw std::invalid_argument("vector arithmetic requires identical spaces");
}

// ---- span-level kernels (no allocation; used by the iteration hot loops) ----

inline double pnorm(std::span<const double> v, double p) {
  if (p == 2.0) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double c : v) s += std::pow(std::fabs(c), p);
  return std::pow(s, 1.0 / p);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// out = a + s*(b - a), the one convex-combination form used everywhere.
/// Endpoints are exact: s == 0 copies a, s == 1 copies b.
inline void comb_into(std::span<const double> a, std::span<const double> b,
                      double s, std::span<double> out) {
  if (s == 0.0) {
    std::copy(a.begin(), a.end(), out.begin());
  } else if (s == 1.0) {
    std::copy(b.begin(), b.end(), out.begin());
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * (b[i] - a[i]);
  }
}

inline double dist_span(std::span<const double> a, std::span<const double> b, double p) {
  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += std::pow(std::fabs(a[i] - b[i]), p);
  return std::pow(s, 1.0 / p);
}

// ---- vector-level operations ----

/// (sum_i |x_i|^p)^(1/p) for the space's p.
inline double norm(const Vector& x) { return pnorm(x.coords, x.space.p); }

/// q-norm of a dual-side vector, q = p/(p-1).
inline double dual_norm(const Vector& f) { return pnorm(f.coords, f.space.q()); }

/// Dual pair <x, f> = sum_i x_i * f_i.
inline double pairing(const Vector& x, const Vector& f) {
  if (x.space.dim != f.space.dim)
    throw std::invalid_argument("pairing: dimension mismatch");
  return dot(x.coords, f.coords);
}

inline Vector add(const Vector& a, const Vector& b) {
  check_same_space(a, b);
  Vector r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
  return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
  check_same_space(a, b);
  Vector r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
  return r;
}

inline Vector scale(const Vector& x, double s) {
  Vector r = x;
  for (double& c : r.coords) c *= s;
  return r;
}

/// a + s*(b - a); see comb_into for the endpoint guarantees.
inline Vector comb(const Vector& a, const Vector& b, double s) {
  check_same_space(a, b);
  Vector r = zero_vector(a.space);
  comb_into(a.coords, b.coords, s, r.coords);
  return r;
}

inline double dist(const Vector& a, const Vector& b) {
  check_same_space(a, b);
  return dist_span(a.coords, b.coords, a.space.p);
}

/// Generalized duality map J_pi: f_i = ||x||^(pi-p) |x_i|^(p-1) sign(x_i),
/// J_pi(0) = 0. Satisfies <x, f> = ||x||^pi and ||f||_q = ||x||^(pi-1).
inline Vector generalized_duality_map(const Vector& x, double pi) {
  if (!std::isfinite(pi) || !(pi > 1.0))
    throw std::invalid_argument("generalized_duality_map: pi must be > 1");
  const double p = x.space.p;
  const double nx = norm(x);
  Vector f = zero_vector(x.space);
  if (nx == 0.0) return f;
  if (p == 2.0 && pi == 2.0) {
    f.coords = x.coords;  // J is the identity in l_2
    return f;
  }
  const double lead = std::pow(nx, pi - p);
  for (std::size_t i = 0; i < f.coords.size(); ++i) {
    const double xi = x.coords[i];
    if (xi == 0.0) continue;
    const double mag = lead * std::pow(std::fabs(xi), p - 1.0);
    f.coords[i] = xi > 0.0 ? mag : -mag;
  }
  return f;
}

/// Normalized duality map J = J_2: <x, J(x)> = ||x||^2, ||J(x)||_q = ||x||.
inline Vector duality_map(const Vector& x) {
  return generalized_duality_map(x, 2.0);
}

namespace detail {

/// Point in the closed p-ball of the given radius around the origin.
inline std::vector<double> ball_point(const SpaceSpec& space, double radius, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(space.dim));
  for (double& c : v) c = rng.uniform(-1.0, 1.0);
  const double n = pnorm(v, space.p);
  if (n > 1.0)
    for (double& c : v) c /= n;
  const double shrink = rng.uniform01();
  for (double& c : v) c *= radius * shrink;
  return v;
}

/// Direction of unit p-norm.
inline std::vector<double> unit_direction(const SpaceSpec& space, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(space.dim));
  double n = 0.0;
  do {
    for (double& c : v) c = rng.uniform(-1.0, 1.0);
    n = pnorm(v, space.p);
  } while (n < 1e-8);
  for (double& c : v) c /= n;
  return v;
}

}  // namespace detail

/// Empirical modulus of continuity of J on the radius-R ball: the max of
/// ||J(x) - J(y)||_q over a seeded pool of pairs with ||x||,||y|| <= R,
/// restricted to pairs with ||x - y|| <= delta. The pool depends only on
/// (space, R, samples, seed), so at a fixed seed the result is
/// non-decreasing in delta by construction.
inline double continuity_probe(const SpaceSpec& space, double radius,
                               double delta, int samples, std::uint64_t seed) {
  if (!(radius > 0.0)) throw std::invalid_argument("continuity_probe: radius must be > 0");
  if (delta < 0.0) throw std::invalid_argument("continuity_probe: delta must be >= 0");
  if (samples < 1) throw std::invalid_argument("continuity_probe: samples must be >= 1");
  Rng rng(seed);
  const double q = space.q();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    std::vector<double> xc = detail::ball_point(space, radius, rng);
    std::vector<double> dir = detail::unit_direction(space, rng);
    // Separation scales drawn log-uniformly over nine decades so that small
    // deltas still admit pairs.
    double s = radius * std::pow(10.0, -9.0 * rng.uniform01());
    s = std::min(s, radius - pnorm(xc, space.p));
    if (s < 0.0) s = 0.0;
    if (s > delta) continue;
    Vector x{space, xc};
    Vector y{space, xc};
    for (std::size_t i = 0; i < y.coords.size(); ++i) y.coords[i] += s * dir[i];
    const Vector jd = sub(duality_map(x), duality_map(y));
    worst = std::max(worst, pnorm(jd.coords, q));
  }
  return worst;
}

}  // namespace fixlab
