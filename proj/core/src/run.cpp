#include "scalelaw/run.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scalelaw {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("run validation: " + what);
}

}  // namespace

void validate_run(const TrainingRun& run) {
  if (run.run_id.empty()) fail("empty run_id");
  const auto& a = run.arch;
  if (a.depth < 1 || a.width < 1 || a.vocab < 1 || a.seq_len < 1 ||
      a.heads < 1) {
    fail("architecture dimensions must be positive");
  }
  if (a.width % a.heads != 0) fail("width not divisible by heads");
  if (run.hparams.learning_rate <= 0.0) fail("learning_rate must be positive");
  if (run.hparams.batch_size_seqs < 1) fail("batch_size_seqs must be positive");
  if (run.hparams.beta2 <= 0.0 || run.hparams.beta2 >= 1.0) {
    fail("beta2 must lie in (0,1)");
  }
  if (run.schedule.warmup_tokens < 0) fail("warmup_tokens must be >= 0");
  if (run.schedule.kind == ScheduleKind::Cosine) {
    if (run.schedule.decay_end_tokens <= 0) {
      fail("cosine schedule requires positive decay_end_tokens");
    }
    if (run.schedule.warmup_tokens >= run.schedule.decay_end_tokens) {
      fail("cosine schedule requires warmup_tokens < decay_end_tokens");
    }
    if (run.schedule.final_lr_fraction < 0.0 ||
        run.schedule.final_lr_fraction > 1.0) {
      fail("final_lr_fraction must lie in [0,1]");
    }
  }
  if (run.log_interval < 1) fail("log_interval must be positive");
  if (run.steps.empty()) fail("run has no step records");

  const std::int64_t tokens_per_step = run.batch_tokens();
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const auto& s = run.steps[i];
    if (s.step < 0 || s.tokens < 0) {
      fail("negative step/tokens at record " + std::to_string(i));
    }
    if (!std::isfinite(s.train_loss) || s.train_loss < 0.0) {
      fail("invalid train_loss at record " + std::to_string(i));
    }
    if (i > 0) {
      const auto& p = run.steps[i - 1];
      if (s.tokens <= p.tokens) {
        fail("non-monotone tokens at record " + std::to_string(i));
      }
      if (s.step <= p.step) {
        fail("non-monotone step at record " + std::to_string(i));
      }
      // Interior deltas must match the logging cadence; the first and
      // last interval may be ragged.
      if (i > 1 && i + 1 < run.steps.size() &&
          s.step - p.step != run.log_interval) {
        fail("step delta != log_interval at record " + std::to_string(i));
      }
      if (s.tokens - p.tokens != tokens_per_step * (s.step - p.step)) {
        fail("tokens inconsistent with batch size at record " +
             std::to_string(i));
      }
    }
  }

  const std::int64_t last_tokens = run.steps.back().tokens;
  for (std::size_t i = 0; i < run.vals.size(); ++i) {
    const auto& v = run.vals[i];
    if (v.tokens < 0 || v.tokens > last_tokens) {
      fail("validation tokens outside run duration at record " +
           std::to_string(i));
    }
    if (!std::isfinite(v.loss) || v.loss < 0.0) {
      fail("invalid validation loss at record " + std::to_string(i));
    }
    if (i > 0 && v.tokens <= run.vals[i - 1].tokens) {
      fail("non-monotone validation tokens at record " + std::to_string(i));
    }
  }
}

}  // namespace scalelaw
