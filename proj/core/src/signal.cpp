#include "scalelaw/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scalelaw {

LossSeries series_from_steps(const TrainingRun& run) {
  LossSeries series;
  series.entries.reserve(run.steps.size());
  for (const auto& s : run.steps) {
    series.entries.push_back(
        {double(s.step), double(s.tokens), s.train_loss});
  }
  return series;
}

LossSeries smooth_loss(const LossSeries& series, double window_fraction,
                       int log_interval, double tokens_per_step) {
  if (series.smoothed) {
    throw std::invalid_argument("smooth_loss: series already smoothed");
  }
  if (series.entries.empty()) {
    throw std::invalid_argument("smooth_loss: empty series");
  }
  if (window_fraction < 0.0 || window_fraction >= 1.0) {
    throw std::invalid_argument("smooth_loss: window fraction in [0,1)");
  }
  if (log_interval < 1) {
    throw std::invalid_argument("smooth_loss: log interval >= 1");
  }

  const auto& e = series.entries;
  const std::ptrdiff_t n = std::ptrdiff_t(e.size());
  const double lag_steps = 0.5 * log_interval;
  const double lag_tokens = lag_steps * tokens_per_step;

  LossSeries out;
  out.smoothed = true;
  out.entries.reserve(e.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto half = std::ptrdiff_t(window_fraction * double(i));
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += e[j].loss;
    out.entries.push_back({e[i].step - lag_steps, e[i].tokens - lag_tokens,
                           sum / double(hi - lo + 1)});
  }
  return out;
}

double interpolate_log_loss(double s_target, double s0, double loss0,
                            double s1, double loss1) {
  if (s0 == s1) return loss0;
  double t = (s_target - s0) / (s1 - s0);
  return std::exp(std::log(loss0) + t * (std::log(loss1) - std::log(loss0)));
}

std::optional<double> loss_at_flops(const TrainingRun& run, double flops,
                                    SizeScheme scheme, LossSource source,
                                    double window_fraction) {
  if (flops <= 0.0) throw std::invalid_argument("loss_at_flops: flops > 0");

  const double n = model_size(run.arch, scheme);
  const double batch_tokens = double(run.batch_tokens());
  const double target_step = flops / (6.0 * n * batch_tokens);

  // Samples as (step coordinate, loss), ascending in step.
  std::vector<std::pair<double, double>> samples;
  if (source == LossSource::Validation) {
    samples.reserve(run.vals.size());
    for (const auto& v : run.vals) {
      samples.emplace_back(double(v.tokens) / batch_tokens, v.loss);
    }
  } else {
    LossSeries smoothed = smooth_loss(series_from_steps(run), window_fraction,
                                      run.log_interval, batch_tokens);
    samples.reserve(smoothed.entries.size());
    for (const auto& entry : smoothed.entries) {
      samples.emplace_back(entry.step, entry.loss);
    }
  }
  if (samples.empty()) {
    throw std::runtime_error("loss_at_flops: run '" + run.run_id +
                             "' has no samples of the requested source");
  }

  auto it = std::lower_bound(
      samples.begin(), samples.end(), target_step,
      [](const auto& s, double t) { return s.first < t; });
  std::size_t hi = std::size_t(std::distance(samples.begin(), it));
  std::size_t lo = hi > 0 ? hi - 1 : 0;
  if (hi == samples.size()) {
    hi = samples.size() - 1;
    lo = hi > 0 ? hi - 1 : 0;
  }

  const auto nearer = std::abs(samples[lo].first - target_step) <=
                              std::abs(samples[hi].first - target_step)
                          ? samples[lo]
                          : samples[hi];
  if (std::abs(nearer.first - target_step) > 0.10 * target_step) {
    return std::nullopt;
  }
  if (nearer.first == target_step) return nearer.second;
  if (lo == hi) return nearer.second;
  return interpolate_log_loss(target_step, samples[lo].first,
                              samples[lo].second, samples[hi].first,
                              samples[hi].second);
}

}  // namespace scalelaw
