#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "scalelaw/ingest.hpp"

using namespace scalelaw;
namespace fs = std::filesystem;

namespace {

TrainingRun make_run(const std::string& id, int n_records = 5) {
  TrainingRun run;
  run.run_id = id;
  run.dataset = "fixture";
  run.arch = {3, 96};
  run.hparams = {3e-3, 8, 0.95, 0};
  run.schedule.kind = ScheduleKind::Constant;
  run.schedule.warmup_tokens = 0;
  run.log_interval = 20;
  const std::int64_t bt = run.batch_tokens();
  for (int i = 1; i <= n_records; ++i) {
    run.steps.push_back({i * 20, i * 20 * bt, 4.0 - 0.1 * i});
  }
  run.vals.push_back({run.steps.back().tokens / 2, 3.6, 0.01});
  run.vals.push_back({run.steps.back().tokens, 3.4, -1.0});
  return run;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("write/load round-trip preserves every field") {
  fs::path dir = fresh_dir("scalelaw_ingest_rt");
  TrainingRun run = make_run("rt-1");
  fs::path manifest = write_run(run, dir);
  TrainingRun back = load_run(manifest);

  CHECK(back.run_id == run.run_id);
  CHECK(back.dataset == run.dataset);
  CHECK(back.arch.depth == run.arch.depth);
  CHECK(back.arch.width == run.arch.width);
  CHECK(back.arch.vocab == run.arch.vocab);
  CHECK(back.hparams.learning_rate == run.hparams.learning_rate);
  CHECK(back.hparams.batch_size_seqs == run.hparams.batch_size_seqs);
  CHECK(back.hparams.beta2 == run.hparams.beta2);
  CHECK(back.log_interval == run.log_interval);
  REQUIRE(back.steps.size() == run.steps.size());
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    CHECK(back.steps[i].step == run.steps[i].step);
    CHECK(back.steps[i].tokens == run.steps[i].tokens);
    CHECK(back.steps[i].train_loss == run.steps[i].train_loss);
  }
  REQUIRE(back.vals.size() == 2);
  CHECK(back.vals[0].subsample_std == 0.01);
  CHECK_FALSE(back.vals[1].has_subsample_std());

  // Second write is byte-identical: loading is lossless.
  fs::path dir2 = fresh_dir("scalelaw_ingest_rt2");
  fs::path manifest2 = write_run(back, dir2);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(manifest) == slurp(manifest2));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("minimal manifest with one step record") {
  fs::path dir = fresh_dir("scalelaw_ingest_min");
  TrainingRun run = make_run("min-1", 1);
  run.vals.clear();
  TrainingRun back = load_run(write_run(run, dir));
  CHECK(back.steps.size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("non-monotone tokens are rejected naming the record") {
  TrainingRun run = make_run("bad-1", 3);
  run.steps[1].tokens = run.steps[0].tokens;  // [t, t, ...]
  try {
    validate_run(run);
    FAIL("expected validation error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("non-monotone tokens at record 1") !=
          std::string::npos);
  }
}

TEST_CASE("tokens must track batch size times step delta") {
  TrainingRun run = make_run("bad-2", 3);
  run.steps[2].tokens += 1;
  CHECK_THROWS(validate_run(run));
}

TEST_CASE("load_sweep loads all runs and rejects duplicates") {
  fs::path dir = fresh_dir("scalelaw_ingest_sweep");
  write_run(make_run("a"), dir);
  write_run(make_run("b"), dir);
  CHECK(load_sweep(dir).size() == 2);

  // A second manifest with the same run_id under a different file name.
  TrainingRun dup = make_run("a");
  fs::path alias_dir = fresh_dir("scalelaw_ingest_alias");
  fs::path m = write_run(dup, alias_dir);
  fs::copy_file(m, dir / "copy.json");
  fs::copy_file(alias_dir / "a.steps.csv", dir / "a.steps.csv",
                fs::copy_options::overwrite_existing);
  try {
    load_sweep(dir);
    FAIL("expected duplicate-id error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("a") != std::string::npos);
  }
  fs::remove_all(dir);
  fs::remove_all(alias_dir);
}

TEST_CASE("empty directory is an error") {
  fs::path dir = fresh_dir("scalelaw_ingest_empty");
  CHECK_THROWS(load_sweep(dir));
  fs::remove_all(dir);
}

TEST_CASE("a 642-manifest sweep loads completely") {
  fs::path dir = fresh_dir("scalelaw_ingest_642");
  for (int i = 0; i < 642; ++i) {
    write_run(make_run("sweep-" + std::to_string(i), 2), dir);
  }
  CHECK(load_sweep(dir).size() == 642);
  fs::remove_all(dir);
}
