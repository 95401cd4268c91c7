#include "scalelaw/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scalelaw/rng.hpp"

namespace scalelaw {

namespace {

void check_spec(const SynthSpec& spec) {
  if (spec.irreducible < 0.0 || spec.size_coeff <= 0.0 ||
      spec.size_exp <= 0.0 || spec.data_coeff <= 0.0 || spec.data_exp <= 0.0) {
    throw std::invalid_argument("synth: invalid surface parameters");
  }
}

}  // namespace

double surface_loss(const SynthSpec& spec, double n, double d) {
  check_spec(spec);
  if (n <= 0.0 || d <= 0.0) {
    throw std::invalid_argument("surface_loss: n, d must be positive");
  }
  return spec.irreducible + spec.size_coeff * std::pow(n, -spec.size_exp) +
         spec.data_coeff * std::pow(d, -spec.data_exp);
}

AnalyticOptimum analytic_optimum(const SynthSpec& spec, double flops) {
  check_spec(spec);
  if (spec.warmup_penalty) {
    throw std::invalid_argument(
        "analytic_optimum: undefined with a warmup penalty");
  }
  const double alpha = spec.size_exp;
  const double beta = spec.data_exp;
  AnalyticOptimum opt;
  opt.a_true = beta / (alpha + beta);
  opt.coeff_true =
      std::pow(alpha * spec.size_coeff /
                   (beta * spec.data_coeff * std::pow(6.0, beta)),
               1.0 / (alpha + beta));
  opt.n_star = opt.coeff_true * std::pow(flops, opt.a_true);
  opt.d_star = flops / (6.0 * opt.n_star);
  return opt;
}

std::vector<TrainingRun> generate_runs(const SynthSpec& spec,
                                       const ExperimentPlan& plan,
                                       const GenConfig& config) {
  check_spec(spec);
  const double tokens_per_step =
      double(config.batch_size_seqs) * 2048.0;  // seq_len fixed at 2048

  std::vector<TrainingRun> runs;
  int run_index = 0;
  for (const auto& planned : plan.runs) {
    if (planned.target_flops.empty()) continue;
    const double n_scheme = model_size(planned.arch, plan.scheme);
    const double n_surface = model_size(planned.arch, SizeScheme::Linear);
    const double max_c = *std::max_element(planned.target_flops.begin(),
                                           planned.target_flops.end());
    const double total_tokens = tokens_for_budget(n_scheme, max_c);
    const std::int64_t total_steps = std::max<std::int64_t>(
        1, std::int64_t(std::ceil(total_tokens / tokens_per_step)));

    TrainingRun run;
    run.run_id = "synth-" + std::to_string(run_index++) + "-d" +
                 std::to_string(planned.arch.depth) + "-w" +
                 std::to_string(planned.arch.width);
    run.dataset = config.dataset;
    run.arch = planned.arch;
    run.hparams.learning_rate = config.learning_rate;
    run.hparams.batch_size_seqs = config.batch_size_seqs;
    run.hparams.beta2 = config.beta2;
    run.schedule = planned.schedule;
    run.log_interval = config.log_interval;

    const rng::Stream stream(spec.seed, rng::hash_string(run.run_id));
    const double warmup = double(planned.schedule.warmup_tokens);

    auto clean_loss = [&](double tokens) {
      double loss = surface_loss(spec, n_surface, std::max(tokens, 1.0));
      if (spec.warmup_penalty && warmup > 0.0 && tokens < warmup) {
        loss *= 1.0 + *spec.warmup_penalty * (1.0 - tokens / warmup);
      }
      return loss;
    };
    auto noised = [&](double loss, std::uint64_t counter) {
      if (!spec.noise) return loss;
      double sigma = noise_sigma(loss, *spec.noise);
      return std::max(loss + sigma * stream.normal(counter), 1e-6 * loss);
    };

    // Step records every log_interval steps: the logged value is the
    // average of per-step losses over the interval, like a real logger.
    const std::int64_t k = config.log_interval;
    std::uint64_t counter = 0;
    for (std::int64_t s = k; s <= total_steps; s += k) {
      double sum = 0.0;
      for (std::int64_t j = s - k + 1; j <= s; ++j) {
        sum += clean_loss(double(j) * tokens_per_step);
      }
      StepRecord rec;
      rec.step = s;
      rec.tokens = s * std::int64_t(tokens_per_step);
      rec.train_loss = noised(sum / double(k), counter++);
      run.steps.push_back(rec);
    }
    if (run.steps.empty() || run.steps.back().step != total_steps) {
      std::int64_t s0 = run.steps.empty() ? 0 : run.steps.back().step;
      double sum = 0.0;
      for (std::int64_t j = s0 + 1; j <= total_steps; ++j) {
        sum += clean_loss(double(j) * tokens_per_step);
      }
      StepRecord rec;
      rec.step = total_steps;
      rec.tokens = total_steps * std::int64_t(tokens_per_step);
      rec.train_loss = noised(sum / double(total_steps - s0), counter++);
      run.steps.push_back(rec);
    }

    // Validation records on the run's FLOP-grid crossings.
    counter = std::uint64_t(1) << 32;
    for (double c : planned.target_flops) {
      double d_tokens = tokens_for_budget(n_scheme, c);
      std::int64_t tokens = std::llround(d_tokens);
      tokens = std::min(tokens, run.steps.back().tokens);
      if (tokens < 1) continue;
      if (!run.vals.empty() && tokens <= run.vals.back().tokens) continue;
      ValRecord rec;
      rec.tokens = tokens;
      rec.loss = noised(clean_loss(double(tokens)), counter++);
      run.vals.push_back(rec);
    }

    validate_run(run);
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace scalelaw
