#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scalelaw {

/// Transformer shape as used throughout the analysis. Width must be
/// divisible by the head count.
struct ModelArch {
  int depth = 0;          // transformer blocks
  int width = 0;          // model dimension
  int vocab = 50432;
  int seq_len = 2048;
  int heads = 4;
};

enum class ScheduleKind { Constant, Cosine };

struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  std::int64_t warmup_tokens = 0;
  std::int64_t decay_end_tokens = 0;   // Cosine only
  double final_lr_fraction = 0.0;      // Cosine only, in [0,1]
};

struct HyperParams {
  double learning_rate = 0.0;
  int batch_size_seqs = 0;   // sequences per step
  double beta2 = 0.95;
  std::int64_t seed = 0;
};

struct StepRecord {
  std::int64_t step = 0;
  std::int64_t tokens = 0;   // cumulative
  double train_loss = 0.0;   // nats/token, averaged over the logging interval
};

struct ValRecord {
  std::int64_t tokens = 0;
  double loss = 0.0;
  double subsample_std = -1.0;   // <0 means absent
  bool has_subsample_std() const { return subsample_std >= 0.0; }
};

/// One training run: immutable after loading, safe for shared reads.
struct TrainingRun {
  std::string run_id;
  std::string dataset;
  ModelArch arch;
  HyperParams hparams;
  Schedule schedule;
  std::vector<StepRecord> steps;
  std::vector<ValRecord> vals;
  int log_interval = 20;

  std::int64_t batch_tokens() const {
    return std::int64_t(hparams.batch_size_seqs) * arch.seq_len;
  }
};

/// Checks every invariant of the run record; throws std::runtime_error
/// naming the offending record index on failure.
void validate_run(const TrainingRun& run);

}  // namespace scalelaw
