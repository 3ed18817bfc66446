#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"

using testutil::TempDir;

namespace {

const std::string kCli = NADEGSN_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args, const TempDir& tmp) {
  const std::string out_file = tmp.path("cmd_output.txt");
  const std::string cmd = kCli + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = testutil::read_text(out_file);
  return r;
}

// CSV text with the named column dropped from every row (timing columns vary
// between otherwise identical runs).
std::string drop_column(const std::string& csv, const std::string& column) {
  std::istringstream in(csv);
  std::string line, out;
  int drop_idx = -1;
  bool first = true;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    int idx = 0;
    bool wrote = false;
    while (std::getline(row, cell, ',')) {
      if (first && cell == column) drop_idx = idx;
      if (idx != drop_idx) {
        if (wrote) out += ',';
        out += cell;
        wrote = true;
      }
      ++idx;
    }
    out += '\n';
    first = false;
  }
  return out;
}

}  // namespace

TEST_CASE("full pipeline: ingest, train, sample, eval, bench, oracle") {
  TempDir tmp("cli");
  auto p = [&tmp](const std::string& name) { return tmp.path(name); };

  const RunResult ingest = run(
      "ingest --synthetic --dim 16 --n-prototypes 3 --flip-prob 0.05 --n-train 200 "
      "--n-valid 50 --seed 1 --out-prefix " + p("data"), tmp);
  CHECK(ingest.exit_code == 0);
  CHECK(ingest.output.find("train=200 valid=50 D=16") != std::string::npos);

  const RunResult train = run(
      "train --data " + p("data_train.txt") + " --valid " + p("data_valid.txt") +
      " --hidden 12 --layers 2 --epochs 4 --lr-start 0.02 --lr-end 0.002 --batch-size 20 "
      "--seed 2 --ckpt-prefix " + p("model") + " --log " + p("log.csv"), tmp);
  CHECK(train.exit_code == 0);
  CHECK(train.output.find("config: D=16 H=12 L=2") != std::string::npos);
  CHECK(std::filesystem::exists(p("model_best.nade")));
  CHECK(std::filesystem::exists(p("model_final.nade")));

  const RunResult anc = run("sample --ckpt " + p("model_best.nade") +
                            " --mode ancestral --n 40 --seed 3 --out-prefix " + p("anc") +
                            " --pgm " + p("anc.pgm") + " --img-rows 4 --img-cols 4", tmp);
  CHECK(anc.exit_code == 0);
  CHECK(std::filesystem::exists(p("anc.txt")));
  CHECK(std::filesystem::exists(p("anc_meta.csv")));
  CHECK(std::filesystem::exists(p("anc.pgm")));

  const RunResult fixed = run("sample --ckpt " + p("model_best.nade") +
                              " --mode fixed --p 0.5 --chains 4 --per-chain 10 --thin 5 "
                              "--seed 3 --out-prefix " + p("fx"), tmp);
  CHECK(fixed.exit_code == 0);
  CHECK(fixed.output.find("samples=40") != std::string::npos);

  const RunResult annealed = run("sample --ckpt " + p("model_best.nade") +
                                 " --mode annealed --p-max 0.9 --p-min 0.1 --alpha 0.7 "
                                 "--steps-per-run 20 --chains 4 --per-chain 5 --seed 3 "
                                 "--out-prefix " + p("ann"), tmp);
  CHECK(annealed.exit_code == 0);

  const RunResult gibbs = run("sample --ckpt " + p("model_best.nade") +
                              " --mode gibbs --chains 2 --per-chain 5 --thin 16 --seed 3 "
                              "--out-prefix " + p("gb"), tmp);
  CHECK(gibbs.exit_code == 0);

  const RunResult eval = run("eval --ckpt " + p("model_best.nade") + " --samples " + p("anc.txt") +
                             " " + p("fx.txt") + " --n-orderings 2 --seed 4 --out " +
                             p("eval.csv"), tmp);
  CHECK(eval.exit_code == 0);
  CHECK(eval.output.find("mean_log_prob=") != std::string::npos);
  const std::string eval_csv = testutil::read_text(p("eval.csv"));
  CHECK(eval_csv.find("file,n_samples,n_orderings,mean_log_prob") == 0);

  const RunResult bench = run("bench --ckpt " + p("model_best.nade") +
                              " --reps 20 --alphas 0.5 1.0 --bench-samples 30 --seed 5 --out " +
                              p("bench.csv"), tmp);
  CHECK(bench.exit_code == 0);
  const std::string bench_csv = testutil::read_text(p("bench.csv"));
  CHECK(bench_csv.find("raw_factor,effective_factor,t_ancestral_seconds") != std::string::npos);
  CHECK(std::count(bench_csv.begin(), bench_csv.end(), '\n') == 3);  // header + 2 alphas

  const RunResult oracle = run("oracle --dim 3 --hidden 5 --layers 2 --model-seed 7 "
                               "--steps 60000 --seed 8", tmp);
  CHECK(oracle.exit_code == 0);
  CHECK(oracle.output.find("PASS normalization") != std::string::npos);
  CHECK(oracle.output.find("PASS stationarity") != std::string::npos);
  CHECK(oracle.output.find("PASS gradient-check") != std::string::npos);
  CHECK(oracle.output.find("FAIL") == std::string::npos);
}

TEST_CASE("training and sampling are bit-identical across reruns") {
  TempDir tmp("det");
  auto p = [&tmp](const std::string& name) { return tmp.path(name); };

  CHECK(run("ingest --synthetic --dim 12 --n-prototypes 2 --flip-prob 0.05 --n-train 120 "
            "--n-valid 40 --seed 9 --out-prefix " + p("d"), tmp).exit_code == 0);

  for (int attempt = 1; attempt <= 2; ++attempt) {
    const std::string tag = std::to_string(attempt);
    CHECK(run("train --data " + p("d_train.txt") + " --valid " + p("d_valid.txt") +
              " --hidden 8 --layers 2 --epochs 3 --lr-start 0.02 --lr-end 0 --batch-size 30 "
              "--seed 7 --ckpt-prefix " + p("m" + tag) + " --log " + p("log" + tag + ".csv"),
              tmp).exit_code == 0);
    CHECK(run("sample --ckpt " + p("m" + tag + "_final.nade") +
              " --mode fixed --p 0.4 --chains 3 --per-chain 5 --thin 4 --seed 11 "
              "--out-prefix " + p("s" + tag), tmp).exit_code == 0);
  }

  // checkpoints and sample artifacts byte-identical
  CHECK(testutil::read_bytes(p("m1_final.nade")) == testutil::read_bytes(p("m2_final.nade")));
  CHECK(testutil::read_bytes(p("m1_best.nade")) == testutil::read_bytes(p("m2_best.nade")));
  CHECK(testutil::read_bytes(p("s1.txt")) == testutil::read_bytes(p("s2.txt")));
  CHECK(testutil::read_bytes(p("s1_meta.csv")) == testutil::read_bytes(p("s2_meta.csv")));

  // training logs identical once the wall-clock column is dropped
  const std::string log1 = drop_column(testutil::read_text(p("log1.csv")), "wall_seconds");
  const std::string log2 = drop_column(testutil::read_text(p("log2.csv")), "wall_seconds");
  CHECK(log1 == log2);
  CHECK(log1.find("wall_seconds") == std::string::npos);
}

TEST_CASE("config file drives subcommands and flags override it") {
  TempDir tmp("cfg");
  auto p = [&tmp](const std::string& name) { return tmp.path(name); };
  {
    std::ofstream cfg(p("run.cfg"));
    cfg << "[ingest]\n"
        << "synthetic = true\n"
        << "dim = 10\n"
        << "n-prototypes = 2\n"
        << "flip-prob = 0.05\n"
        << "n-train = 50\n"
        << "n-valid = 20\n"
        << "seed = 4\n"
        << "out-prefix = " << p("c") << "\n";
  }
  const RunResult base = run("--config " + p("run.cfg") + " ingest", tmp);
  CHECK(base.exit_code == 0);
  CHECK(base.output.find("train=50 valid=20 D=10") != std::string::npos);

  // command line overrides the file
  const RunResult over = run("--config " + p("run.cfg") + " ingest --n-train 30", tmp);
  CHECK(over.exit_code == 0);
  CHECK(over.output.find("train=30 valid=20 D=10") != std::string::npos);

  // unknown keys are rejected
  {
    std::ofstream cfg(p("bad.cfg"));
    cfg << "[ingest]\n"
        << "synthetic = true\n"
        << "n-train = 50\n"
        << "out-prefix = " << p("c") << "\n"
        << "no-such-key = 1\n";
  }
  CHECK(run("--config " + p("bad.cfg") + " ingest", tmp).exit_code != 0);
}

TEST_CASE("invalid inputs exit nonzero with a message") {
  TempDir tmp("err");
  auto p = [&tmp](const std::string& name) { return tmp.path(name); };

  const RunResult missing = run("ingest --images /nonexistent.idx --n-train 5 --out-prefix " +
                                p("x"), tmp);
  CHECK(missing.exit_code != 0);
  CHECK(missing.output.find("NotFound") != std::string::npos);

  // epochs=0 fails option validation before any computation
  CHECK(run("train --data x --valid y --epochs 0 --ckpt-prefix z", tmp).exit_code != 0);

  // oracle dimension guard
  CHECK(run("oracle --dim 13", tmp).exit_code != 0);

  // corrupted checkpoint
  CHECK(run("ingest --synthetic --dim 8 --n-prototypes 2 --n-train 40 --n-valid 10 --seed 1 "
            "--out-prefix " + p("d"), tmp).exit_code == 0);
  {
    std::ofstream bad(p("bad.nade"), std::ios::binary);
    bad << "NADE????garbage";
  }
  const RunResult corrupt = run("sample --ckpt " + p("bad.nade") +
                                " --mode ancestral --n 5 --out-prefix " + p("s"), tmp);
  CHECK(corrupt.exit_code != 0);

  // eval with a sample file whose D mismatches the model
  CHECK(run("train --data " + p("d_train.txt") + " --valid " + p("d_valid.txt") +
            " --hidden 4 --layers 1 --epochs 1 --ckpt-prefix " + p("m"), tmp).exit_code == 0);
  {
    std::ofstream wrong(p("wrong.txt"));
    wrong << "5 1\n10101\n";
  }
  const RunResult mism = run("eval --ckpt " + p("m_final.nade") + " --samples " + p("wrong.txt"),
                             tmp);
  CHECK(mism.exit_code != 0);
  CHECK(mism.output.find("ShapeMismatch") != std::string::npos);

  // empty sample file
  {
    std::ofstream empty(p("empty.txt"));
    empty << "8 0\n";
  }
  const RunResult es = run("eval --ckpt " + p("m_final.nade") + " --samples " + p("empty.txt"),
                           tmp);
  CHECK(es.exit_code != 0);
  CHECK(es.output.find("EmptySet") != std::string::npos);
}

TEST_CASE("paper-scale training flags are accepted and echoed") {
  TempDir tmp("echo");
  auto p = [&tmp](const std::string& name) { return tmp.path(name); };
  CHECK(run("ingest --synthetic --dim 8 --n-prototypes 2 --n-train 30 --n-valid 10 --seed 2 "
            "--out-prefix " + p("d"), tmp).exit_code == 0);
  // the full-scale hyperparameters parse, echo, and run (one epoch on a tiny set)
  const RunResult r = run("train --data " + p("d_train.txt") + " --valid " + p("d_valid.txt") +
                          " --hidden 2000 --layers 2 --epochs 1 --lr-start 0.001 --lr-end 0 "
                          "--batch-size 100 --seed 1 --ckpt-prefix " + p("m"), tmp);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("H=2000 L=2") != std::string::npos);
  CHECK(r.output.find("lr=0.001->0") != std::string::npos);
}
