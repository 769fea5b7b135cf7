#pragma once

// Trajectory diagnostics and the two reusable scalar tools: the dominating
// recursion a_{n+1} = (1 - t_n) a_n + b_n + c_n (the extremal equality case,
// which upper-bounds any sequence satisfying the inequality) and the sampled
// duality-map norm inequality ||x+y||^pi <= ||x||^pi + pi <y, J_pi(x+y)>.
// CSV output renders floats as shortest round-trip decimals so equality
// checks can be byte-level.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixlab/engine.hpp"
#include "fixlab/schedules.hpp"
#include "fixlab/space.hpp"

namespace fixlab {

/// Equality recursion a_{n+1} = (1 - t_n) a_n + b_n + c_n; returns a_0 .. a_N.
inline std::vector<double> scalar_recursion(double a0, const ScheduleSpec& t,
                                            const ScheduleSpec& b, const ScheduleSpec& c,
                                            std::int64_t N) {
  if (!(a0 >= 0.0)) throw std::invalid_argument("scalar_recursion: a0 must be >= 0");
  if (N < 0) throw std::invalid_argument("scalar_recursion: N must be >= 0");
  if (!in_unit_interval(t))
    throw std::invalid_argument("scalar_recursion: t_n must lie in [0,1]");
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(N) + 1);
  a.push_back(a0);
  double cur = a0;
  for (std::int64_t n = 0; n < N; ++n) {
    cur = (1.0 - eval(t, n)) * cur + eval(b, n) + eval(c, n);
    a.push_back(cur);
  }
  return a;
}

/// Max over seeded pairs (x, y) in the radius ball of
///   ||x+y||^pi - ||x||^pi - pi * <y, J_pi(x+y)>.
/// The inequality predicts <= 0; any positive value beyond rounding is a
/// defect in the duality map.
inline double check_lemma_1_2(const SpaceSpec& space, double pi, int samples,
                              std::uint64_t seed, double radius) {
  if (samples < 1) throw std::invalid_argument("check_lemma_1_2: samples must be >= 1");
  if (!(pi > 1.0)) throw std::invalid_argument("check_lemma_1_2: pi must be > 1");
  if (!(radius > 0.0)) throw std::invalid_argument("check_lemma_1_2: radius must be > 0");
  Rng rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vector x{space, detail::ball_point(space, radius, rng)};
    const Vector y{space, detail::ball_point(space, radius, rng)};
    const Vector xy = add(x, y);
    const double lhs = std::pow(norm(xy), pi);
    const double rhs = std::pow(norm(x), pi) +
                       pi * pairing(y, generalized_duality_map(xy, pi));
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

struct ConvergenceReport {
  double final_residual = 0.0;
  std::optional<double> final_dist;
  std::optional<double> tail_slope;  // LS slope of log r_n vs log n, last half
  StopReason stop = StopReason::MaxIters;
  std::optional<double> min_perturbation_margin;
  std::size_t iterations = 0;
};

/// Measured decay only; never asserts convergence.
inline ConvergenceReport convergence_report(const TrajectoryRecord& traj,
                                            bool has_reference = false) {
  if (traj.rows() == 0) throw std::invalid_argument("convergence_report: empty trajectory");
  ConvergenceReport rep;
  rep.stop = traj.terminal;
  rep.iterations = traj.rows() - 1;
  rep.final_residual = traj.residuals.back();
  if (has_reference && !traj.dists.empty()) rep.final_dist = traj.dists.back();
  rep.min_perturbation_margin = traj.min_perturbation_margin;

  // slope over the last half, n >= 1 and r_n > 0 required throughout
  const std::size_t rows = traj.rows();
  if (rows >= 10) {
    const std::size_t start = std::max<std::size_t>(1, rows / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    bool ok = true;
    for (std::size_t i = start; i < rows; ++i) {
      if (!(traj.residuals[i] > 0.0)) {
        ok = false;
        break;
      }
      const double lx = std::log(static_cast<double>(i));
      const double ly = std::log(traj.residuals[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    if (ok && m >= 10) {
      const double denom = m * sxx - sx * sx;
      if (denom > 0.0) rep.tail_slope = (m * sxy - sx * sy) / denom;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace detail

/// Exact schema: n,alpha,beta,residual,dist,x_0,...,x_{d-1},y_0,...,y_{d-1}
/// with LF line endings; dist is empty when no reference was supplied.
inline std::string render_csv(const TrajectoryRecord& traj) {
  std::string out = "n,alpha,beta,residual,dist";
  for (int i = 0; i < traj.dim; ++i) out += ",x_" + std::to_string(i);
  for (int i = 0; i < traj.dim; ++i) out += ",y_" + std::to_string(i);
  out += '\n';
  const bool has_dist = !traj.dists.empty();
  for (std::size_t row = 0; row < traj.rows(); ++row) {
    out += std::to_string(row);
    out += ',';
    detail::append_double(out, traj.alphas[row]);
    out += ',';
    detail::append_double(out, traj.betas[row]);
    out += ',';
    detail::append_double(out, traj.residuals[row]);
    out += ',';
    if (has_dist) detail::append_double(out, traj.dists[row]);
    for (double v : traj.x_row(row)) {
      out += ',';
      detail::append_double(out, v);
    }
    for (double v : traj.y_row(row)) {
      out += ',';
      detail::append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

inline void export_csv(const TrajectoryRecord& traj, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("export_csv: cannot open " + path);
  const std::string body = render_csv(traj);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw std::runtime_error("export_csv: write failed for " + path);
}

namespace detail {

inline double parse_double_field(const std::string& field, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw std::runtime_error(std::string("csv parse: bad ") + what + " field '" + field + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

/// Inverse of render_csv; the stop reason is not part of the file format.
inline TrajectoryRecord parse_csv(const std::string& body) {
  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv parse: empty input");
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.size() < 7 || (header.size() - 5) % 2 != 0 || header[0] != "n" ||
      header[1] != "alpha" || header[2] != "beta" || header[3] != "residual" ||
      header[4] != "dist")
    throw std::runtime_error("csv parse: unexpected header");
  const int dim = static_cast<int>((header.size() - 5) / 2);
  TrajectoryRecord rec;
  rec.dim = dim;
  bool has_dist = false;
  bool first_row = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = detail::split_csv_line(line);
    if (f.size() != header.size()) throw std::runtime_error("csv parse: ragged row");
    rec.alphas.push_back(detail::parse_double_field(f[1], "alpha"));
    rec.betas.push_back(detail::parse_double_field(f[2], "beta"));
    rec.residuals.push_back(detail::parse_double_field(f[3], "residual"));
    if (first_row) {
      has_dist = !f[4].empty();
      first_row = false;
    }
    if (has_dist != !f[4].empty()) throw std::runtime_error("csv parse: mixed dist column");
    if (has_dist) rec.dists.push_back(detail::parse_double_field(f[4], "dist"));
    for (int i = 0; i < dim; ++i)
      rec.xs.push_back(detail::parse_double_field(f[5 + static_cast<std::size_t>(i)], "x"));
    for (int i = 0; i < dim; ++i)
      rec.ys.push_back(
          detail::parse_double_field(f[5 + static_cast<std::size_t>(dim + i)], "y"));
  }
  return rec;
}

}  // namespace fixlab
