#pragma once

// Catalog of constructible mappings: nonexpansive candidates T, contractions
// f, indexed families {f_n}, {g_n}, closed convex domains, and the sampled
// falsifiers for their claimed properties. A claimed Lipschitz bound is only
// attached where it is analytically justified (rotations only in l_2, clamps
// in any l_p, affine maps only with a caller-supplied operator-norm
// certificate). Sampled checks are falsifiers, not proofs: a pass means no
// violation was found at the reported seed and sample count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixlab/rng.hpp"
#include "fixlab/schedules.hpp"
#include "fixlab/space.hpp"

namespace fixlab {

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

enum class DomainKind { Box, Ball, WholeSpace };

struct DomainSpec {
  DomainKind kind = DomainKind::WholeSpace;
  SpaceSpec space;
  Vector lo, hi;       // Box
  Vector center;       // Ball
  double radius = 0.0; // Ball
};

inline DomainSpec make_box_domain(const Vector& lo, const Vector& hi) {
  check_same_space(lo, hi);
  for (std::size_t i = 0; i < lo.coords.size(); ++i)
    if (!(lo.coords[i] <= hi.coords[i]))
      throw std::invalid_argument("box domain: lo <= hi must hold componentwise");
  DomainSpec d;
  d.kind = DomainKind::Box;
  d.space = lo.space;
  d.lo = lo;
  d.hi = hi;
  return d;
}

inline DomainSpec make_ball_domain(const Vector& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball domain: radius must be > 0");
  DomainSpec d;
  d.kind = DomainKind::Ball;
  d.space = center.space;
  d.center = center;
  d.radius = radius;
  return d;
}

inline DomainSpec make_whole_space(const SpaceSpec& space) {
  DomainSpec d;
  d.kind = DomainKind::WholeSpace;
  d.space = space;
  return d;
}

inline bool contains(const DomainSpec& d, const Vector& x, double tol = 1e-12) {
  switch (d.kind) {
    case DomainKind::WholeSpace:
      return true;
    case DomainKind::Box:
      for (std::size_t i = 0; i < x.coords.size(); ++i)
        if (x.coords[i] < d.lo.coords[i] - tol || x.coords[i] > d.hi.coords[i] + tol)
          return false;
      return true;
    case DomainKind::Ball:
      return dist(x, d.center) <= d.radius + tol;
  }
  return false;
}

inline Vector sample_point(const DomainSpec& d, Rng& rng) {
  Vector x = zero_vector(d.space);
  switch (d.kind) {
    case DomainKind::Box:
      for (std::size_t i = 0; i < x.coords.size(); ++i)
        x.coords[i] = rng.uniform(d.lo.coords[i], d.hi.coords[i]);
      break;
    case DomainKind::Ball: {
      x.coords = detail::ball_point(d.space, d.radius, rng);
      for (std::size_t i = 0; i < x.coords.size(); ++i)
        x.coords[i] += d.center.coords[i];
      break;
    }
    case DomainKind::WholeSpace:
      // sampling window for unbounded domains
      for (double& c : x.coords) c = rng.uniform(-10.0, 10.0);
      break;
  }
  return x;
}

inline double domain_diameter_hint(const DomainSpec& d) {
  switch (d.kind) {
    case DomainKind::Box:
      return dist(d.lo, d.hi);
    case DomainKind::Ball:
      return 2.0 * d.radius;
    case DomainKind::WholeSpace:
      return 20.0;  // matches the sampling window
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

enum class OpKind {
  Identity,
  Constant,
  Rotation2d,
  BoxClamp,
  SegmentProjection,
  Affine,
  ConvexCombination,
  Composition
};

struct OperatorSpec {
  OpKind kind = OpKind::Identity;
  SpaceSpec space;

  /// Analytic Lipschitz bound, present only when justified by construction.
  std::optional<double> lipschitz_claim;

  Vector u;                    // Constant
  double theta = 0.0;          // Rotation2d
  Vector center;               // Rotation2d
  int axis1 = 0, axis2 = 1;    // Rotation2d plane
  Vector lo, hi;               // BoxClamp
  Vector a, b;                 // SegmentProjection
  std::vector<double> matrix;  // Affine, row-major dim x dim
  Vector offset;               // Affine
  double weight = 0.0;         // ConvexCombination
  std::shared_ptr<const OperatorSpec> op1, op2;  // children
};

inline OperatorSpec identity_op(const SpaceSpec& space) {
  OperatorSpec op;
  op.kind = OpKind::Identity;
  op.space = space;
  op.lipschitz_claim = 1.0;
  return op;
}

inline OperatorSpec constant_op(const Vector& u) {
  OperatorSpec op;
  op.kind = OpKind::Constant;
  op.space = u.space;
  op.u = u;
  op.lipschitz_claim = 0.0;
  return op;
}

/// Rotation by theta in the (axis1, axis2) coordinate plane about `center`,
/// identity on the remaining coordinates. An isometry of l_2; in any other
/// l_p it is constructible but carries no nonexpansiveness claim.
inline OperatorSpec rotation2d_op(double theta, const Vector& center,
                                  int axis1 = 0, int axis2 = 1) {
  if (center.space.dim < 2)
    throw std::invalid_argument("rotation2d: space dim must be >= 2");
  if (axis1 == axis2 || axis1 < 0 || axis2 < 0 || axis1 >= center.space.dim ||
      axis2 >= center.space.dim)
    throw std::invalid_argument("rotation2d: invalid plane axes");
  if (!std::isfinite(theta)) throw std::invalid_argument("rotation2d: theta must be finite");
  OperatorSpec op;
  op.kind = OpKind::Rotation2d;
  op.space = center.space;
  op.theta = theta;
  op.center = center;
  op.axis1 = axis1;
  op.axis2 = axis2;
  if (center.space.p == 2.0) op.lipschitz_claim = 1.0;
  return op;
}

/// Componentwise clamp onto the box [lo, hi]; 1-Lipschitz in every l_p.
inline OperatorSpec box_clamp_op(const Vector& lo, const Vector& hi) {
  check_same_space(lo, hi);
  for (std::size_t i = 0; i < lo.coords.size(); ++i)
    if (!(lo.coords[i] <= hi.coords[i]))
      throw std::invalid_argument("box_clamp: lo <= hi must hold componentwise");
  OperatorSpec op;
  op.kind = OpKind::BoxClamp;
  op.space = lo.space;
  op.lo = lo;
  op.hi = hi;
  op.lipschitz_claim = 1.0;
  return op;
}

/// Euclidean projection onto the segment [a, b]; nonexpansive in l_2 only.
inline OperatorSpec segment_projection_op(const Vector& a, const Vector& b) {
  check_same_space(a, b);
  OperatorSpec op;
  op.kind = OpKind::SegmentProjection;
  op.space = a.space;
  op.a = a;
  op.b = b;
  if (a.space.p == 2.0) op.lipschitz_claim = a.coords == b.coords ? 0.0 : 1.0;
  return op;
}

/// x -> M x + offset. The caller supplies the operator-norm certificate; it
/// is recorded as the claim and cross-checked by the catalog validators, not
/// at construction.
inline OperatorSpec affine_op(std::vector<double> matrix, const Vector& offset,
                              double norm_certificate) {
  const auto d = static_cast<std::size_t>(offset.space.dim);
  if (matrix.size() != d * d)
    throw std::invalid_argument("affine: matrix must be dim x dim, row-major");
  for (double m : matrix)
    if (!std::isfinite(m)) throw std::invalid_argument("affine: matrix entries must be finite");
  if (!(norm_certificate >= 0.0) || !std::isfinite(norm_certificate))
    throw std::invalid_argument("affine: norm certificate must be a finite value >= 0");
  OperatorSpec op;
  op.kind = OpKind::Affine;
  op.space = offset.space;
  op.matrix = std::move(matrix);
  op.offset = offset;
  op.lipschitz_claim = norm_certificate;
  return op;
}

/// weight * op1 + (1 - weight) * op2.
inline OperatorSpec convex_combination_op(double weight, OperatorSpec op1, OperatorSpec op2) {
  if (!(weight >= 0.0 && weight <= 1.0))
    throw std::invalid_argument("convex_combination: weight must lie in [0,1]");
  if (!(op1.space == op2.space))
    throw std::invalid_argument("convex_combination: operands live in different spaces");
  OperatorSpec op;
  op.kind = OpKind::ConvexCombination;
  op.space = op1.space;
  op.weight = weight;
  if (op1.lipschitz_claim && op2.lipschitz_claim)
    op.lipschitz_claim = weight * *op1.lipschitz_claim + (1.0 - weight) * *op2.lipschitz_claim;
  op.op1 = std::make_shared<const OperatorSpec>(std::move(op1));
  op.op2 = std::make_shared<const OperatorSpec>(std::move(op2));
  return op;
}

/// outer(inner(x)).
inline OperatorSpec composition_op(OperatorSpec outer, OperatorSpec inner) {
  if (!(outer.space == inner.space))
    throw std::invalid_argument("composition: operands live in different spaces");
  OperatorSpec op;
  op.kind = OpKind::Composition;
  op.space = outer.space;
  if (outer.lipschitz_claim && inner.lipschitz_claim)
    op.lipschitz_claim = *outer.lipschitz_claim * *inner.lipschitz_claim;
  op.op1 = std::make_shared<const OperatorSpec>(std::move(outer));
  op.op2 = std::make_shared<const OperatorSpec>(std::move(inner));
  return op;
}

/// Scratch buffers for allocation-free nested evaluation.
struct OpWorkspace {
  std::vector<std::vector<double>> bufs;
  std::span<double> buffer(std::size_t level, std::size_t dim) {
    if (bufs.size() <= level) bufs.resize(level + 1);
    if (bufs[level].size() != dim) bufs[level].assign(dim, 0.0);
    return bufs[level];
  }
};

/// Evaluate op at x into out. out must not alias x.
inline void apply_into(const OperatorSpec& op, std::span<const double> x,
                       std::span<double> out, OpWorkspace& ws, std::size_t level = 0) {
  const std::size_t d = x.size();
  switch (op.kind) {
    case OpKind::Identity:
      std::copy(x.begin(), x.end(), out.begin());
      break;
    case OpKind::Constant:
      std::copy(op.u.coords.begin(), op.u.coords.end(), out.begin());
      break;
    case OpKind::Rotation2d: {
      std::copy(x.begin(), x.end(), out.begin());
      const double ci = op.center.coords[static_cast<std::size_t>(op.axis1)];
      const double cj = op.center.coords[static_cast<std::size_t>(op.axis2)];
      const double vi = x[static_cast<std::size_t>(op.axis1)] - ci;
      const double vj = x[static_cast<std::size_t>(op.axis2)] - cj;
      const double c = std::cos(op.theta), s = std::sin(op.theta);
      out[static_cast<std::size_t>(op.axis1)] = ci + c * vi - s * vj;
      out[static_cast<std::size_t>(op.axis2)] = cj + s * vi + c * vj;
      break;
    }
    case OpKind::BoxClamp:
      for (std::size_t i = 0; i < d; ++i)
        out[i] = std::clamp(x[i], op.lo.coords[i], op.hi.coords[i]);
      break;
    case OpKind::SegmentProjection: {
      double len2 = 0.0, proj = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double e = op.b.coords[i] - op.a.coords[i];
        len2 += e * e;
        proj += (x[i] - op.a.coords[i]) * e;
      }
      const double tstar = len2 > 0.0 ? std::clamp(proj / len2, 0.0, 1.0) : 0.0;
      for (std::size_t i = 0; i < d; ++i)
        out[i] = op.a.coords[i] + tstar * (op.b.coords[i] - op.a.coords[i]);
      break;
    }
    case OpKind::Affine:
      for (std::size_t i = 0; i < d; ++i) {
        double s = op.offset.coords[i];
        const double* row = op.matrix.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) s += row[j] * x[j];
        out[i] = s;
      }
      break;
    case OpKind::ConvexCombination: {
      std::span<double> tmp = ws.buffer(level, d);
      apply_into(*op.op1, x, tmp, ws, level + 1);
      apply_into(*op.op2, x, out, ws, level + 1);
      // weight*op1 + (1-weight)*op2 as op2 + w*(op1 - op2)
      comb_into(out, tmp, op.weight, out);
      break;
    }
    case OpKind::Composition: {
      std::span<double> tmp = ws.buffer(level, d);
      apply_into(*op.op2, x, tmp, ws, level + 1);
      apply_into(*op.op1, tmp, out, ws, level + 1);
      break;
    }
  }
}

inline Vector apply_op(const OperatorSpec& op, const Vector& x) {
  if (!(x.space == op.space))
    throw std::invalid_argument("apply_op: vector space does not match operator space");
  Vector out = zero_vector(x.space);
  OpWorkspace ws;
  apply_into(op, x.coords, out.coords, ws);
  return out;
}

// ---------------------------------------------------------------------------
// Sampled property checks
// ---------------------------------------------------------------------------

/// Max over sampled pairs x != y of ||T(x)-T(y)|| / ||x-y||.
inline double check_nonexpansive(const OperatorSpec& op, const DomainSpec& domain,
                                 int samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("check_nonexpansive: samples must be >= 2");
  Rng rng(seed);
  OpWorkspace ws;
  Vector tx = zero_vector(op.space), ty = zero_vector(op.space);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vector x = sample_point(domain, rng);
    const Vector y = sample_point(domain, rng);
    const double dxy = dist(x, y);
    if (dxy == 0.0) continue;
    apply_into(op, x.coords, tx.coords, ws);
    apply_into(op, y.coords, ty.coords, ws);
    worst = std::max(worst, dist_span(tx.coords, ty.coords, op.space.p) / dxy);
  }
  return worst;
}

/// Same sampling as check_nonexpansive; the result is read as an empirical
/// Lipschitz constant.
inline double check_contraction(const OperatorSpec& op, const DomainSpec& domain,
                                int samples, std::uint64_t seed) {
  return check_nonexpansive(op, domain, samples, seed);
}

/// Sampled check that op maps the domain into itself.
inline bool maps_into(const OperatorSpec& op, const DomainSpec& domain,
                      int samples = 128, std::uint64_t seed = 0x5eedull,
                      double tol = 1e-9) {
  if (domain.kind == DomainKind::WholeSpace) return true;
  Rng rng(seed);
  for (int k = 0; k < samples; ++k) {
    const Vector x = sample_point(domain, rng);
    if (!contains(domain, apply_op(op, x), tol)) return false;
  }
  return true;
}

/// Power iteration estimate of the l_2 operator norm of a matrix.
inline double operator_norm_p2(const std::vector<double>& matrix, int dim, int iters = 200) {
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> v(d, 0.0), mv(d), mtmv(d);
  Rng rng(0x90A7ull);
  for (double& c : v) c = rng.uniform(-1.0, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += matrix[i * d + j] * v[j];
      mv[i] = s;
    }
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += matrix[i * d + j] * mv[i];
      mtmv[j] = s;
    }
    lambda = std::sqrt(dot(v, mtmv) / std::max(dot(v, v), 1e-300));
    const double n = pnorm(mtmv, 2.0);
    if (n == 0.0) return 0.0;
    for (std::size_t j = 0; j < d; ++j) v[j] = mtmv[j] / n;
  }
  return lambda;
}

struct CertificateCheck {
  std::optional<double> claimed;
  double empirical = 0.0;
  bool consistent = true;  // claimed absent, or claimed >= empirical - tol
};

/// Cross-check a claimed Lipschitz bound: power iteration for affine maps in
/// l_2, sampled ratios otherwise.
inline CertificateCheck certificate_check(const OperatorSpec& op, const DomainSpec& domain,
                                          int samples, std::uint64_t seed) {
  CertificateCheck c;
  c.claimed = op.lipschitz_claim;
  c.empirical = check_nonexpansive(op, domain, samples, seed);
  if (op.kind == OpKind::Affine && op.space.p == 2.0)
    c.empirical = std::max(c.empirical, operator_norm_p2(op.matrix, op.space.dim));
  if (c.claimed) c.consistent = *c.claimed >= c.empirical - 1e-9;
  return c;
}

// ---------------------------------------------------------------------------
// Fixed-point sets
// ---------------------------------------------------------------------------

enum class FixedSetKind { Point, Segment, Box, AffineSubspace, Unknown };

struct FixedSetDescriptor {
  FixedSetKind kind = FixedSetKind::Unknown;
  Vector point;                // Point
  Vector a, b;                 // Segment
  Vector lo, hi;               // Box
  Vector origin;               // AffineSubspace
  std::vector<Vector> basis;   // AffineSubspace directions
};

/// Evenly spread sample of a fixed-set descriptor (101 points per segment by
/// default; small lattices for boxes and subspaces).
inline std::vector<Vector> fixed_set_grid(const FixedSetDescriptor& desc, int count = 101) {
  std::vector<Vector> pts;
  switch (desc.kind) {
    case FixedSetKind::Point:
      pts.push_back(desc.point);
      break;
    case FixedSetKind::Segment: {
      const int n = std::max(2, count);
      for (int i = 0; i < n; ++i)
        pts.push_back(comb(desc.a, desc.b, static_cast<double>(i) / (n - 1)));
      break;
    }
    case FixedSetKind::Box: {
      const int d = desc.lo.space.dim;
      int per_dim = std::max(2, static_cast<int>(std::floor(
                                     std::pow(static_cast<double>(count),
                                              1.0 / static_cast<double>(d)))));
      per_dim = std::min(per_dim, 11);
      std::vector<int> idx(static_cast<std::size_t>(d), 0);
      while (true) {
        Vector x = desc.lo;
        for (int i = 0; i < d; ++i) {
          const double t = static_cast<double>(idx[static_cast<std::size_t>(i)]) / (per_dim - 1);
          x.coords[static_cast<std::size_t>(i)] =
              desc.lo.coords[static_cast<std::size_t>(i)] +
              t * (desc.hi.coords[static_cast<std::size_t>(i)] -
                   desc.lo.coords[static_cast<std::size_t>(i)]);
        }
        pts.push_back(x);
        int k = 0;
        while (k < d && ++idx[static_cast<std::size_t>(k)] == per_dim) {
          idx[static_cast<std::size_t>(k)] = 0;
          ++k;
        }
        if (k == d) break;
      }
      break;
    }
    case FixedSetKind::AffineSubspace: {
      pts.push_back(desc.origin);
      for (const Vector& e : desc.basis) {
        pts.push_back(add(desc.origin, e));
        pts.push_back(sub(desc.origin, e));
      }
      break;
    }
    case FixedSetKind::Unknown:
      break;
  }
  return pts;
}

namespace detail {

inline bool descriptor_verifies(const OperatorSpec& op, const FixedSetDescriptor& desc,
                                double tol = 1e-12) {
  const std::vector<Vector> pts = fixed_set_grid(desc, 33);
  if (pts.empty()) return desc.kind == FixedSetKind::Unknown;
  for (const Vector& p : pts)
    if (dist(apply_op(op, p), p) > tol) return false;
  return true;
}

inline std::optional<Vector> affine_fixed_point(const OperatorSpec& op) {
  // Solve (I - M) q = offset by Gaussian elimination; valid when the
  // certificate guarantees ||M|| < 1.
  const auto d = static_cast<std::size_t>(op.space.dim);
  std::vector<double> A(d * d);
  std::vector<double> rhs(op.offset.coords);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      A[i * d + j] = (i == j ? 1.0 : 0.0) - op.matrix[i * d + j];
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::fabs(A[r * d + col]) > std::fabs(A[piv * d + col])) piv = r;
    if (std::fabs(A[piv * d + col]) < 1e-14) return std::nullopt;
    if (piv != col) {
      for (std::size_t j = 0; j < d; ++j) std::swap(A[piv * d + j], A[col * d + j]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double m = A[r * d + col] / A[col * d + col];
      if (m == 0.0) continue;
      for (std::size_t j = col; j < d; ++j) A[r * d + j] -= m * A[col * d + j];
      rhs[r] -= m * rhs[col];
    }
  }
  Vector q = zero_vector(op.space);
  for (std::size_t i = 0; i < d; ++i) q.coords[i] = rhs[i] / A[i * d + i];
  return q;
}

}  // namespace detail

/// Analytic fixed-set descriptor where the catalog knows one, Unknown
/// otherwise. Every descriptor is verified on a sample grid before being
/// returned, so listed elements always satisfy ||T(p) - p|| <= 1e-12.
inline FixedSetDescriptor fixed_set(const OperatorSpec& op) {
  FixedSetDescriptor desc;
  switch (op.kind) {
    case OpKind::Constant:
      desc.kind = FixedSetKind::Point;
      desc.point = op.u;
      break;
    case OpKind::BoxClamp:
      desc.kind = FixedSetKind::Box;
      desc.lo = op.lo;
      desc.hi = op.hi;
      break;
    case OpKind::SegmentProjection:
      if (op.a.coords == op.b.coords) {
        desc.kind = FixedSetKind::Point;
        desc.point = op.a;
      } else {
        desc.kind = FixedSetKind::Segment;
        desc.a = op.a;
        desc.b = op.b;
      }
      break;
    case OpKind::Rotation2d: {
      const double two_pi = 8.0 * std::atan(1.0);
      const double frac = std::fabs(std::remainder(op.theta, two_pi));
      if (frac < 1e-15) break;  // whole space fixed; report Unknown
      if (op.space.dim == 2) {
        desc.kind = FixedSetKind::Point;
        desc.point = op.center;
      } else {
        desc.kind = FixedSetKind::AffineSubspace;
        desc.origin = op.center;
        for (int k = 0; k < op.space.dim; ++k) {
          if (k == op.axis1 || k == op.axis2) continue;
          Vector e = zero_vector(op.space);
          e.coords[static_cast<std::size_t>(k)] = 1.0;
          desc.basis.push_back(e);
        }
      }
      break;
    }
    case OpKind::Affine:
      if (op.lipschitz_claim && *op.lipschitz_claim < 1.0) {
        if (auto q = detail::affine_fixed_point(op)) {
          desc.kind = FixedSetKind::Point;
          desc.point = *q;
        }
      }
      break;
    case OpKind::Composition: {
      // Candidate: the outer operator's fixed set, kept only if the whole
      // composition verifies on it (covers projection-after-clamp chains).
      FixedSetDescriptor cand = fixed_set(*op.op1);
      if (cand.kind != FixedSetKind::Unknown && detail::descriptor_verifies(op, cand))
        return cand;
      break;
    }
    case OpKind::ConvexCombination: {
      FixedSetDescriptor c1 = fixed_set(*op.op1);
      FixedSetDescriptor c2 = fixed_set(*op.op2);
      if (c1.kind == FixedSetKind::Point && c2.kind == FixedSetKind::Point &&
          c1.point.coords == c2.point.coords && detail::descriptor_verifies(op, c1))
        return c1;
      break;
    }
    case OpKind::Identity:
      break;  // everything is fixed; no finite descriptor
  }
  if (desc.kind != FixedSetKind::Unknown && !detail::descriptor_verifies(op, desc))
    desc = FixedSetDescriptor{};
  return desc;
}

// ---------------------------------------------------------------------------
// Indexed families {f_n}, {g_n}
// ---------------------------------------------------------------------------

struct DegenerateIndexError : std::runtime_error {
  std::int64_t index;
  explicit DegenerateIndexError(std::int64_t n)
      : std::runtime_error("family weights sum to zero at index n = " + std::to_string(n)),
        index(n) {}
};

/// Seeded sequence confined to the stated ball; element n is a pure function
/// of (seed, n). The bound ||center|| + radius is the boundedness certificate.
struct BoundedSeq {
  Vector center;
  double radius = 0.0;
  std::uint64_t seed = 0;
};

inline BoundedSeq make_bounded_seq(const Vector& center, double radius, std::uint64_t seed) {
  if (!(radius >= 0.0)) throw std::invalid_argument("bounded sequence: radius must be >= 0");
  return BoundedSeq{center, radius, seed};
}

inline Vector seq_at(const BoundedSeq& seq, std::int64_t n) {
  Vector v = seq.center;
  if (seq.radius == 0.0) return v;
  Rng rng = Rng::indexed(seq.seed, static_cast<std::uint64_t>(n));
  const std::vector<double> b = detail::ball_point(v.space, seq.radius, rng);
  for (std::size_t i = 0; i < v.coords.size(); ++i) v.coords[i] += b[i];
  return v;
}

/// Norm bound certificate for the sequence.
inline double seq_bound(const BoundedSeq& seq) {
  return norm(seq.center) + seq.radius;
}

enum class FamilyKind {
  ConstantFamily,      // f_n = f
  IdentityFamily,      // f_n = id
  DecayingPerturbation,  // f_n(x) = f(x) + rate(n) * h(x)
  ErrorsFamily,        // f_n(x) = (alpha_n u + gamma_n u_n) / (alpha_n + gamma_n)
  ErrorsStateFamily    // g_n(x) = (beta_n x + delta_n v_n) / (beta_n + delta_n)
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::IdentityFamily;
  SpaceSpec space;
  std::shared_ptr<const OperatorSpec> base;       // ConstantFamily / DecayingPerturbation
  std::shared_ptr<const OperatorSpec> direction;  // DecayingPerturbation
  ScheduleSpec rate;                              // DecayingPerturbation
  Vector u;                                       // ErrorsFamily anchor
  BoundedSeq seq;                                 // ErrorsFamily u_n / ErrorsStateFamily v_n
  ScheduleSpec w_anchor;  // ErrorsFamily alpha / ErrorsStateFamily beta
  ScheduleSpec w_noise;   // ErrorsFamily gamma / ErrorsStateFamily delta
};

inline FamilySpec constant_family(const OperatorSpec& f) {
  FamilySpec fam;
  fam.kind = FamilyKind::ConstantFamily;
  fam.space = f.space;
  fam.base = std::make_shared<const OperatorSpec>(f);
  return fam;
}

inline FamilySpec identity_family(const SpaceSpec& space) {
  FamilySpec fam;
  fam.kind = FamilyKind::IdentityFamily;
  fam.space = space;
  return fam;
}

inline FamilySpec decaying_perturbation_family(const OperatorSpec& base,
                                               const OperatorSpec& direction,
                                               const ScheduleSpec& rate) {
  if (!(base.space == direction.space))
    throw std::invalid_argument("decaying_perturbation: operands live in different spaces");
  FamilySpec fam;
  fam.kind = FamilyKind::DecayingPerturbation;
  fam.space = base.space;
  fam.base = std::make_shared<const OperatorSpec>(base);
  fam.direction = std::make_shared<const OperatorSpec>(direction);
  fam.rate = rate;
  return fam;
}

inline FamilySpec errors_family(const Vector& u, const BoundedSeq& u_seq,
                                const ScheduleSpec& alpha, const ScheduleSpec& gamma) {
  if (!(u.space == u_seq.center.space))
    throw std::invalid_argument("errors_family: u and u_seq live in different spaces");
  if (is_identically_zero(alpha) && is_identically_zero(gamma))
    throw DegenerateIndexError(0);
  FamilySpec fam;
  fam.kind = FamilyKind::ErrorsFamily;
  fam.space = u.space;
  fam.u = u;
  fam.seq = u_seq;
  fam.w_anchor = alpha;
  fam.w_noise = gamma;
  return fam;
}

inline FamilySpec errors_state_family(const BoundedSeq& v_seq, const ScheduleSpec& beta,
                                      const ScheduleSpec& delta) {
  if (is_identically_zero(beta) && is_identically_zero(delta))
    throw DegenerateIndexError(0);
  FamilySpec fam;
  fam.kind = FamilyKind::ErrorsStateFamily;
  fam.space = v_seq.center.space;
  fam.seq = v_seq;
  fam.w_anchor = beta;
  fam.w_noise = delta;
  return fam;
}

/// f_n(x) (or g_n(x)). Zero-weight components are short-circuited so that
/// e.g. an errors family with gamma identically zero reproduces the constant
/// anchor bitwise.
inline Vector family_eval(const FamilySpec& fam, std::int64_t n, const Vector& x) {
  if (n < 0) throw std::invalid_argument("family_eval: n must be >= 0");
  if (!(x.space == fam.space))
    throw std::invalid_argument("family_eval: vector space does not match family space");
  switch (fam.kind) {
    case FamilyKind::ConstantFamily:
      return apply_op(*fam.base, x);
    case FamilyKind::IdentityFamily:
      return x;
    case FamilyKind::DecayingPerturbation: {
      Vector v = apply_op(*fam.base, x);
      const double rate = eval(fam.rate, n);
      if (rate != 0.0) {
        const Vector h = apply_op(*fam.direction, x);
        for (std::size_t i = 0; i < v.coords.size(); ++i) v.coords[i] += rate * h.coords[i];
      }
      return v;
    }
    case FamilyKind::ErrorsFamily: {
      const double a = eval(fam.w_anchor, n);
      const double g = eval(fam.w_noise, n);
      if (a + g == 0.0) throw DegenerateIndexError(n);
      if (g == 0.0) return fam.u;
      const Vector un = seq_at(fam.seq, n);
      if (a == 0.0) return un;
      Vector v = zero_vector(fam.space);
      const double wsum = a + g;
      for (std::size_t i = 0; i < v.coords.size(); ++i)
        v.coords[i] = (a * fam.u.coords[i] + g * un.coords[i]) / wsum;
      return v;
    }
    case FamilyKind::ErrorsStateFamily: {
      const double b = eval(fam.w_anchor, n);
      const double dl = eval(fam.w_noise, n);
      if (b + dl == 0.0) throw DegenerateIndexError(n);
      if (dl == 0.0) return x;
      const Vector vn = seq_at(fam.seq, n);
      if (b == 0.0) return vn;
      Vector v = zero_vector(fam.space);
      const double wsum = b + dl;
      for (std::size_t i = 0; i < v.coords.size(); ++i)
        v.coords[i] = (b * x.coords[i] + dl * vn.coords[i]) / wsum;
      return v;
    }
  }
  return x;
}

/// Uniform limit operator of the family, when one is derivable from the
/// parameters.
inline std::optional<OperatorSpec> family_uniform_limit(const FamilySpec& fam) {
  switch (fam.kind) {
    case FamilyKind::ConstantFamily:
      return *fam.base;
    case FamilyKind::IdentityFamily:
      return identity_op(fam.space);
    case FamilyKind::DecayingPerturbation:
      if (predicate_report(fam.rate).tends_to_zero) return *fam.base;
      return std::nullopt;
    case FamilyKind::ErrorsFamily: {
      const auto rl = ratio_limit(fam.w_noise, fam.w_anchor);
      if (rl && *rl == 0.0) return constant_op(fam.u);
      return std::nullopt;
    }
    case FamilyKind::ErrorsStateFamily: {
      const auto rl = ratio_limit(fam.w_noise, fam.w_anchor);
      if (!rl) return std::nullopt;
      if (*rl == 0.0) return identity_op(fam.space);
      if (fam.seq.radius == 0.0)
        // limit is x -> (1 - rl) x + rl * v
        return convex_combination_op(1.0 - *rl, identity_op(fam.space),
                                     constant_op(fam.seq.center));
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Uniform Lipschitz bound across all indices, when derivable. For the
/// errors-state family the per-index constant is beta_n/(beta_n+delta_n);
/// its supremum is taken over a sampled index range together with the
/// analytic limit.
inline std::optional<double> family_contraction_certificate(const FamilySpec& fam) {
  switch (fam.kind) {
    case FamilyKind::ConstantFamily:
      return fam.base->lipschitz_claim;
    case FamilyKind::IdentityFamily:
      return 1.0;
    case FamilyKind::DecayingPerturbation:
      if (fam.base->lipschitz_claim && fam.direction->lipschitz_claim)
        return *fam.base->lipschitz_claim +
               schedule_max(fam.rate) * *fam.direction->lipschitz_claim;
      return std::nullopt;
    case FamilyKind::ErrorsFamily:
      return 0.0;  // constant maps at every index
    case FamilyKind::ErrorsStateFamily: {
      double sup = 0.0;
      for (std::int64_t n = 0; n <= 4096; ++n) {
        const double b = eval(fam.w_anchor, n);
        const double dl = eval(fam.w_noise, n);
        if (b + dl > 0.0) sup = std::max(sup, b / (b + dl));
      }
      if (const auto rl = ratio_limit(fam.w_anchor, fam.w_noise)) sup = std::max(sup, *rl);
      return sup;
    }
  }
  return std::nullopt;
}

/// For each n in sample_n: sampled sup_x ||f_n(x) - f(x)|| over the domain.
inline std::vector<double> check_uniform_convergence(const FamilySpec& fam,
                                                     const OperatorSpec& limit,
                                                     const DomainSpec& domain,
                                                     const std::vector<std::int64_t>& sample_n,
                                                     int samples, std::uint64_t seed) {
  if (sample_n.empty())
    throw std::invalid_argument("check_uniform_convergence: sample_n must be nonempty");
  std::vector<double> out;
  out.reserve(sample_n.size());
  for (std::int64_t n : sample_n) {
    Rng rng(seed);  // same points at every index, so the list is comparable
    double sup = 0.0;
    for (int k = 0; k < samples; ++k) {
      const Vector x = sample_point(domain, rng);
      sup = std::max(sup, dist(family_eval(fam, n, x), apply_op(limit, x)));
    }
    out.push_back(sup);
  }
  return out;
}

struct PerturbationEntry {
  std::int64_t n = 0;
  double min_margin = 0.0;
};

struct PerturbationReport {
  std::vector<PerturbationEntry> entries;
  double min_margin = 0.0;
  bool pass = false;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Margins delta_n(||x|| + M) - beta_n ||g_n(x) - x|| over sampled (n, x);
/// pass iff every margin >= -1e-12.
inline PerturbationReport check_perturbation_bound(const FamilySpec& g,
                                                   const ScheduleSpec& beta,
                                                   const ScheduleSpec& delta, double M,
                                                   const DomainSpec& domain,
                                                   const std::vector<std::int64_t>& sample_n,
                                                   int samples, std::uint64_t seed) {
  if (!(M > 0.0)) throw std::invalid_argument("check_perturbation_bound: M must be > 0");
  PerturbationReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::int64_t n : sample_n) {
    Rng rng(seed);
    const double bn = eval(beta, n);
    const double dn = eval(delta, n);
    double mn = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
      const Vector x = sample_point(domain, rng);
      const double lhs = bn * dist(family_eval(g, n, x), x);
      const double rhs = dn * (norm(x) + M);
      mn = std::min(mn, rhs - lhs);
    }
    rep.entries.push_back({n, mn});
    rep.min_margin = std::min(rep.min_margin, mn);
  }
  rep.pass = rep.min_margin >= -1e-12;
  return rep;
}

}  // namespace fixlab
