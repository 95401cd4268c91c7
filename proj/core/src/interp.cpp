#include "scalelaw/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scalelaw {

namespace {

// Akima slope from four consecutive secants (extended at the ends).
double akima_slope(double m_mm, double m_m, double m_p, double m_pp) {
  double w_p = std::abs(m_pp - m_p);
  double w_m = std::abs(m_m - m_mm);
  if (w_p + w_m == 0.0) return 0.5 * (m_m + m_p);
  return (w_p * m_m + w_m * m_p) / (w_p + w_m);
}

}  // namespace

AkimaSpline::AkimaSpline(std::span<const double> x, std::span<const double> y,
                         InterpMode mode)
    : mode_(mode) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("akima: x/y length mismatch");
  }
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("akima: need at least 2 points");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  xs_.resize(n);
  ys_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double xi = x[order[i]];
    double yi = y[order[i]];
    if (mode_ == InterpMode::LogXLogY) {
      if (xi <= 0.0 || yi <= 0.0) {
        throw std::invalid_argument("akima: nonpositive value in log mode");
      }
      xi = std::log(xi);
      yi = std::log(yi);
    }
    xs_[i] = xi;
    ys_[i] = yi;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(xs_[i] > xs_[i - 1])) {
      throw std::invalid_argument("akima: duplicate x values");
    }
  }

  // Secants, extended two intervals past each end by quadratic
  // extrapolation (the original endpoint rule). m[i+2] spans knots
  // i..i+1.
  std::vector<double> m(n + 3);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m[i + 2] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
  }
  if (n == 2) {
    m[0] = m[1] = m[3] = m[4] = m[2];
  } else {
    m[1] = 2.0 * m[2] - m[3];
    m[0] = 2.0 * m[1] - m[2];
    m[n + 1] = 2.0 * m[n] - m[n - 1];
    m[n + 2] = 2.0 * m[n + 1] - m[n];
  }

  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = akima_slope(m[i], m[i + 1], m[i + 2], m[i + 3]);
  }

  c1_.resize(n - 1);
  c2_.resize(n - 1);
  c3_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double h = xs_[i + 1] - xs_[i];
    double sec = m[i + 2];
    c1_[i] = t[i];
    c2_[i] = (3.0 * sec - 2.0 * t[i] - t[i + 1]) / h;
    c3_[i] = (t[i] + t[i + 1] - 2.0 * sec) / (h * h);
  }
}

AkimaSpline AkimaSpline::from_points(
    std::vector<std::pair<double, double>> pts, InterpMode mode) {
  std::vector<double> x(pts.size()), y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x[i] = pts[i].first;
    y[i] = pts[i].second;
  }
  return AkimaSpline(x, y, mode);
}

double AkimaSpline::x_min() const {
  return mode_ == InterpMode::LogXLogY ? std::exp(xs_.front()) : xs_.front();
}

double AkimaSpline::x_max() const {
  return mode_ == InterpMode::LogXLogY ? std::exp(xs_.back()) : xs_.back();
}

double AkimaSpline::native_to_x(double t) const {
  return mode_ == InterpMode::LogXLogY ? std::exp(t) : t;
}

double AkimaSpline::eval_native(double t) const {
  double lo = xs_.front(), hi = xs_.back();
  double tol = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (t < lo - tol || t > hi + tol) {
    throw std::domain_error("akima: evaluation outside knot hull");
  }
  t = std::clamp(t, lo, hi);
  auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
  std::size_t i = std::size_t(std::distance(xs_.begin(), it));
  i = (i == 0) ? 0 : std::min(i - 1, xs_.size() - 2);
  double dx = t - xs_[i];
  double v = ys_[i] + dx * (c1_[i] + dx * (c2_[i] + dx * c3_[i]));
  return mode_ == InterpMode::LogXLogY ? std::exp(v) : v;
}

double AkimaSpline::operator()(double x) const {
  if (mode_ == InterpMode::LogXLogY) {
    if (x <= 0.0) throw std::domain_error("akima: x must be positive");
    return eval_native(std::log(x));
  }
  return eval_native(x);
}

MinimizeResult minimize_interpolant(const AkimaSpline& f, int resolution) {
  if (resolution < 2) {
    throw std::invalid_argument("minimize_interpolant: resolution >= 2");
  }
  const double lo = f.native_min();
  const double hi = f.native_max();
  const double h = (hi - lo) / (resolution - 1);

  // Coarse scan; strict comparison keeps the smallest-x tie.
  int best = 0;
  double best_v = f.eval_native(lo);
  for (int i = 1; i < resolution; ++i) {
    double v = f.eval_native(lo + i * h);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }

  // Golden-section refinement inside the bracketing cells.
  double a = std::max(lo, lo + (best - 1) * h);
  double b = std::min(hi, lo + (best + 1) * h);
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f.eval_native(x1);
  double f2 = f.eval_native(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-14 * (hi - lo); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f.eval_native(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f.eval_native(x2);
    }
  }
  double t = 0.5 * (a + b);
  double v = f.eval_native(t);
  // Endpoint values can beat the refined interior point on monotone data.
  if (best_v < v) {
    t = lo + best * h;
    v = best_v;
  }
  // Snap to a knot when one attains the minimum (the spline passes
  // through knots exactly, so this also returns vertex knots exactly).
  // The tolerance absorbs golden-section stopping error when the true
  // minimizer is a knot itself.
  std::size_t best_knot = 0;
  double best_kv = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    double kv = f.mode() == InterpMode::LogXLogY
                    ? std::exp(f.native_knot_value(i))
                    : f.native_knot_value(i);
    if (kv < best_kv) {
      best_kv = kv;
      best_knot = i;
    }
  }
  if (best_kv <= v + 1e-12 * (1.0 + std::abs(best_kv))) {
    v = best_kv;
    t = f.native_knot(best_knot);
  }

  MinimizeResult result;
  result.x = f.native_to_x(t);
  result.value = v;
  result.at_edge = (t - lo) < 0.5 * f.first_gap() ||
                   (hi - t) < 0.5 * f.last_gap();
  return result;
}

}  // namespace scalelaw
