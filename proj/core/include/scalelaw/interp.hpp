#pragma once

#include <span>
#include <utility>
#include <vector>

namespace scalelaw {

enum class InterpMode { LinearSpace, LogXLogY };

/// Akima piecewise-cubic interpolant. In LogXLogY mode the fit runs on
/// (log x, log y) and evaluation maps back, so all coordinates must be
/// positive. Endpoints use Akima's original quadratic secant
/// extrapolation; the tie rule averages the adjacent secants.
class AkimaSpline {
 public:
  AkimaSpline(std::span<const double> x, std::span<const double> y,
              InterpMode mode = InterpMode::LinearSpace);

  static AkimaSpline from_points(std::vector<std::pair<double, double>> pts,
                                 InterpMode mode = InterpMode::LinearSpace);

  /// Evaluation in external coordinates; x must lie within the knot hull
  /// (a tiny relative tolerance is forgiven, anything further throws).
  double operator()(double x) const;

  /// Evaluation in the native fitting coordinate (log x in log mode).
  double eval_native(double t) const;

  InterpMode mode() const { return mode_; }
  std::size_t size() const { return xs_.size(); }
  double x_min() const;
  double x_max() const;
  double native_min() const { return xs_.front(); }
  double native_max() const { return xs_.back(); }
  double native_knot(std::size_t i) const { return xs_[i]; }
  double native_knot_value(std::size_t i) const { return ys_[i]; }
  double native_to_x(double t) const;

  /// Native-space knot spacing adjacent to an endpoint (used by edge
  /// detection in the estimator).
  double first_gap() const { return xs_[1] - xs_[0]; }
  double last_gap() const { return xs_[xs_.size() - 1] - xs_[xs_.size() - 2]; }

 private:
  InterpMode mode_;
  std::vector<double> xs_, ys_;          // native coordinates
  std::vector<double> c1_, c2_, c3_;     // per-interval cubic coefficients
};

struct MinimizeResult {
  double x = 0.0;        // external coordinate of the minimum
  double value = 0.0;    // interpolant value there
  bool at_edge = false;  // within half a knot gap of the hull boundary
};

/// Scans a uniform grid of `resolution` points in the interpolant's
/// native coordinate, then refines the bracketing cell with golden
/// section search. Ties break toward smaller x.
MinimizeResult minimize_interpolant(const AkimaSpline& f, int resolution);

}  // namespace scalelaw
