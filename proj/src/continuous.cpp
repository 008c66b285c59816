#include "thermo/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

#include "thermo/errors.hpp"

namespace thermo {

namespace {

constexpr double kPi = std::numbers::pi;

struct Squares {
  cdouble big, small;  // a^2 and b^2 under the documented convention
  cdouble D, sqrtD;
};

Squares quartic_squares(cdouble lambda, double gamma) {
  const cdouble s = lambda * (lambda + 1.0);
  const cdouble p = lambda * (lambda * lambda + gamma * gamma);
  const cdouble D = s * s - 4.0 * p;
  cdouble r = std::sqrt(D);
  const cdouble target = lambda * (lambda - 1.0);
  if (std::abs(-r - target) < std::abs(r - target)) r = -r;
  cdouble a2 = 0.5 * (s + r);
  cdouble b2 = 0.5 * (s - r);
  // Recover whichever square lost digits to cancellation from the product.
  if (std::abs(a2) >= std::abs(b2)) {
    if (a2 != 0.0) b2 = p / a2;
  } else {
    a2 = p / b2;
  }
  return {a2, b2, D, r};
}

}  // namespace

QuarticRoots roots_ab(cdouble lambda, double gamma) {
  const Squares q = quartic_squares(lambda, gamma);
  return {lambda, gamma, std::sqrt(q.big), std::sqrt(q.small), q.D, q.sqrtD};
}

QuarticRoots roots_ab_continued(cdouble lambda, double gamma, const QuarticRoots& ref) {
  const Squares q = quartic_squares(lambda, gamma);
  const cdouble r1 = std::sqrt(q.big), r2 = std::sqrt(q.small);
  QuarticRoots best{lambda, gamma, r1, r2, q.D, q.sqrtD};
  double best_dist = std::numeric_limits<double>::infinity();
  for (int swap = 0; swap < 2; ++swap) {
    const cdouble x = swap ? r2 : r1, y = swap ? r1 : r2;
    for (double sa : {1.0, -1.0}) {
      for (double sb : {1.0, -1.0}) {
        const double d = std::abs(sa * x - ref.a) + std::abs(sb * y - ref.b);
        if (d < best_dist) {
          best_dist = d;
          best.a = sa * x;
          best.b = sb * y;
        }
      }
    }
  }
  return best;
}

double quartic_residual(const QuarticRoots& r) {
  const cdouble s = r.lambda * (r.lambda + 1.0);
  const cdouble p = r.lambda * (r.lambda * r.lambda + r.gamma * r.gamma);
  const double scale = std::max(1.0, std::pow(std::abs(r.lambda), 4));
  double worst = 0.0;
  for (cdouble x : {r.a, -r.a, r.b, -r.b}) {
    const cdouble x2 = x * x;
    worst = std::max(worst, std::abs(x2 * x2 - s * x2 + p) / scale);
  }
  return worst;
}

double default_log_scale(const QuarticRoots& r) {
  return kPi * (std::abs(r.a.real()) + std::abs(r.b.real()));
}

namespace {

// Column c carries exp(z_c x) with z = (a, -a, b, -b). Each column is divided by
// exp(pi max(0, Re z_c)), shifted evenly so the total equals log_scale.
struct ColumnScale {
  cdouble z[4];
  double shift[4];
};

ColumnScale column_scale(const QuarticRoots& r, double log_scale) {
  ColumnScale cs{{r.a, -r.a, r.b, -r.b}, {}};
  double natural = 0.0;
  for (int c = 0; c < 4; ++c) {
    cs.shift[c] = kPi * std::max(0.0, cs.z[c].real());
    natural += cs.shift[c];
  }
  const double extra = (log_scale - natural) / 4.0;
  for (double& s : cs.shift) s += extra;
  return cs;
}

}  // namespace

Eigen::Matrix4cd boundary_matrix(const QuarticRoots& r, BoundaryCase bc,
                                 std::optional<double> log_scale) {
  const ColumnScale cs = column_scale(r, log_scale.value_or(default_log_scale(r)));
  const cdouble a = r.a, b = r.b, lam2 = r.lambda * r.lambda;

  // Coefficient of each column in the x = 0 condition row (top) and in the
  // second condition row (bottom); the x = pi rows repeat them times exp(z pi).
  cdouble top[4], bottom[4];
  switch (bc) {
    case BoundaryCase::DD:
      top[0] = top[1] = top[2] = top[3] = 1.0;
      bottom[0] = bottom[1] = a * a;
      bottom[2] = bottom[3] = b * b;
      break;
    case BoundaryCase::DN: {
      const cdouble l = a * (a * a - lam2), m = b * (b * b - lam2);
      top[0] = top[1] = top[2] = top[3] = 1.0;
      bottom[0] = l, bottom[1] = -l, bottom[2] = m, bottom[3] = -m;
      break;
    }
    case BoundaryCase::ND: {
      const cdouble ls = a * a - lam2, ms = b * b - lam2;
      top[0] = a, top[1] = -a, top[2] = b, top[3] = -b;
      bottom[0] = bottom[1] = ls;
      bottom[2] = bottom[3] = ms;
      break;
    }
    case BoundaryCase::NN: {
      const cdouble l = a * (a * a - lam2), m = b * (b * b - lam2);
      top[0] = a, top[1] = -a, top[2] = b, top[3] = -b;
      bottom[0] = l, bottom[1] = -l, bottom[2] = m, bottom[3] = -m;
      break;
    }
  }
  Eigen::Matrix4cd M;
  for (int c = 0; c < 4; ++c) {
    const cdouble at0 = std::exp(cdouble(-cs.shift[c], 0.0));
    const cdouble atpi = std::exp(cs.z[c] * kPi - cs.shift[c]);
    M(0, c) = top[c] * at0;
    M(1, c) = top[c] * atpi;
    M(2, c) = bottom[c] * at0;
    M(3, c) = bottom[c] * atpi;
  }
  return M;
}

double closed_form_orientation(BoundaryCase bc) {
  return (bc == BoundaryCase::DN || bc == BoundaryCase::ND) ? -1.0 : 1.0;
}

BoundaryDeterminant char_det(const QuarticRoots& r, BoundaryCase bc,
                             std::optional<double> log_scale) {
  BoundaryDeterminant out;
  out.bc = bc;
  out.log_scale = log_scale.value_or(default_log_scale(r));
  out.matrix = boundary_matrix(r, bc, out.log_scale);
  out.det_direct = out.matrix.partialPivLu().determinant();
  out.hadamard = 1.0;
  for (int i = 0; i < 4; ++i) out.hadamard *= out.matrix.row(i).norm();

  const cdouble a = r.a, b = r.b, lam2 = r.lambda * r.lambda;
  out.l = a * (a * a - lam2);
  out.m = b * (b * b - lam2);
  out.l_star = a * a - lam2;
  out.m_star = b * b - lam2;

  // Every exponential carries the common factor exp(-log_scale).
  const double L = out.log_scale;
  auto E = [&](cdouble z) { return std::exp(z * kPi - L); };
  const cdouble plus = E(a + b) + E(-(a + b));
  const cdouble minus = E(a - b) + E(b - a);
  const double e0 = std::exp(-L);

  switch (bc) {
    case BoundaryCase::DD: {
      const double ha = kPi * std::abs(a.real()), hb = L - ha;
      const cdouble sa = std::exp(a * kPi - ha) - std::exp(-a * kPi - ha);
      const cdouble sb = std::exp(b * kPi - hb) - std::exp(-b * kPi - hb);
      out.det_closed = (a - b) * (a - b) * (a + b) * (a + b) * sa * sb;
      break;
    }
    case BoundaryCase::DN: {
      const cdouble l = out.l, m = out.m;
      out.det_closed = 8.0 * l * m * e0 + (l - m) * (l - m) * plus - (l + m) * (l + m) * minus;
      break;
    }
    case BoundaryCase::ND: {
      const cdouble ls = out.l_star, ms = out.m_star;
      const cdouble u = b * ls - a * ms, v = b * ls + a * ms;
      out.det_closed = 8.0 * a * b * ls * ms * e0 + u * u * plus - v * v * minus;
      break;
    }
    case BoundaryCase::NN: {
      const cdouble w = a * out.m - b * out.l;
      out.det_closed = w * w * (plus - minus);
      break;
    }
  }
  return out;
}

BoundaryDeterminant char_det(cdouble lambda, double gamma, BoundaryCase bc) {
  return char_det(roots_ab(lambda, gamma), bc);
}

RootResult find_eigen_near(cdouble seed, double gamma, BoundaryCase bc, double tol,
                           int max_iterations) {
  if (!(tol > 0)) throw ValidationError("find_eigen_near: tol must be > 0");
  if (!(gamma > 0)) throw ValidationError("find_eigen_near: gamma must be > 0");

  cdouble lam = seed;
  QuarticRoots roots = roots_ab(lam, gamma);
  RootResult best{lam, false, 0, std::numeric_limits<double>::infinity()};

  for (int it = 1; it <= max_iterations; ++it) {
    // Scale frozen for this iteration so f, f(+h), f(-h) are comparable.
    const double s = default_log_scale(roots);
    const BoundaryDeterminant here = char_det(roots, bc, s);
    const cdouble f = here.det_direct;
    const double rel = std::abs(f) / here.hadamard;
    if (rel < best.residual) best = {lam, false, it - 1, rel};
    if (rel < tol) {
      best = {lam, true, it - 1, rel};
      return best;
    }

    const double h = 1e-6 * std::max(1.0, std::abs(lam));
    auto eval = [&](cdouble z) {
      return char_det(roots_ab_continued(z, gamma, roots), bc, s).det_direct;
    };
    const cdouble df = (eval(lam + h) - eval(lam - h)) / (2.0 * h);
    if (df == 0.0 || !std::isfinite(std::abs(df))) break;
    cdouble step = -f / df;

    // Halve the step until |f| decreases.
    bool moved = false;
    for (int k = 0; k < 40; ++k) {
      const cdouble trial = lam + step;
      const QuarticRoots tr = roots_ab_continued(trial, gamma, roots);
      const cdouble ft = char_det(tr, bc, s).det_direct;
      if (std::isfinite(std::abs(ft)) && std::abs(ft) < std::abs(f)) {
        lam = trial;
        roots = tr;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      // Step too small to make progress: accept if already at round-off level.
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(lam))) {
        best.converged = rel < std::sqrt(tol);
        best.iterations = it;
      }
      return best;
    }
    best.iterations = it;
  }
  // Final check of the last iterate.
  const BoundaryDeterminant last = char_det(roots, bc);
  const double rel = std::abs(last.det_direct) / last.hadamard;
  if (rel <= best.residual) best = {lam, rel < tol, max_iterations, rel};
  return best;
}

std::vector<BranchRow> branch_asymptotics_check(double gamma, BoundaryCase bc, int k_min,
                                                int k_max, int workers) {
  if (k_min < 5 || k_max > 60 || k_min > k_max)
    throw ValidationError("branch_asymptotics_check: k range must lie within [5, 60]");
  const int count = k_max - k_min + 1;
  std::vector<BranchRow> rows(count);
  auto solve = [&](int idx) {
    const int k = k_min + idx;
    const RootResult r = find_eigen_near(cdouble(0.0, k), gamma, bc);
    rows[idx] = {k, r.lambda, std::abs(r.lambda.real()) * k * k, r.converged};
  };
  int w = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  w = std::min(w, count);
  if (w <= 1) {
    for (int i = 0; i < count; ++i) solve(i);
  } else {
    std::vector<std::future<void>> futs;
    for (int t = 0; t < w; ++t)
      futs.push_back(std::async(std::launch::async, [&, t] {
        for (int i = t; i < count; i += w) solve(i);
      }));
    for (auto& f : futs) f.get();
  }
  return rows;
}

}  // namespace thermo
