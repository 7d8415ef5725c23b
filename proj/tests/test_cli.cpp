#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kCli = RECEPTIVE_CLI_PATH;
const fs::path kWork = fs::path(RECEPTIVE_TEST_WORKDIR) / "cli";

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs the tool with the given arguments, capturing exit code and streams.
RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out_path = kWork / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err_path = kWork / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  fs::create_directories(kWork);
  const std::string cmd =
      kCli.string() + " " + args + " >" + out_path.string() + " 2>" + err_path.string();
  const int status = std::system(cmd.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
}

// One shared tiny pipeline so the expensive steps run once.
struct Pipeline {
  fs::path dir = kWork / "pipeline";
  fs::path dataset = dir / "data.csv";
  fs::path model = dir / "static.model";
  fs::path config = dir / "study.json";
  fs::path sim_dir = dir / "sim";
  fs::path report_dir = dir / "report";

  Pipeline() {
    fs::create_directories(dir);
    write_text(config,
               "{\"n_participants\": 12, \"study_days\": 10, \"warm_up_days\": 7,\n"
               " \"seed\": 3, \"replicates\": 2}\n");
  }
};

Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

}  // namespace

TEST_CASE("the version flag reports and exits cleanly") {
  const RunResult r = run("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find('.') != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("").exit_code == 2);                       // a subcommand is required
  CHECK(run("gen-dataset").exit_code == 2);            // --out is required
  CHECK(run("frobnicate").exit_code == 2);             // unknown subcommand
  CHECK(run("cv missing.csv --groups 1").exit_code == 2);  // out-of-range option
  const RunResult help = run("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(help.out.find("evaluate") != std::string::npos);
}

TEST_CASE("data errors exit with code 3 and name the problem") {
  const RunResult missing = run("train-static /nonexistent/data.csv --out " +
                                (kWork / "never.model").string());
  CHECK(missing.exit_code == 3);
  CHECK(missing.err.find("error:") != std::string::npos);

  const fs::path bad_config = kWork / "bad_config.json";
  write_text(bad_config, "{\"cohort_size\": 5}\n");
  const RunResult unknown =
      run("simulate --config " + bad_config.string() + " --out " + (kWork / "never").string());
  CHECK(unknown.exit_code == 3);
  CHECK(unknown.err.find("cohort_size") != std::string::npos);

  // A config with no model paths and no training table to build them from.
  const fs::path no_models = kWork / "no_models.json";
  write_text(no_models, "{\"n_participants\": 4, \"study_days\": 9, \"replicates\": 1}\n");
  const RunResult stuck =
      run("simulate --config " + no_models.string() + " --out " + (kWork / "never2").string());
  CHECK(stuck.exit_code == 3);
  CHECK(stuck.err.find("train-static-from") != std::string::npos);

  // A typo in the log directory path is user input error, not an internal fault.
  const RunResult no_dir =
      run("evaluate /nonexistent/logs --out " + (kWork / "never3").string());
  CHECK(no_dir.exit_code == 3);
  CHECK(no_dir.err.find("log directory not found") != std::string::npos);
}

TEST_CASE("the pipeline runs end to end: generate, train, compare, simulate, report") {
  Pipeline& p = pipeline();

  const RunResult gen = run("gen-dataset --out " + p.dataset.string() +
                            " --participants 30 --per-participant 20 --seed 3");
  CHECK(gen.exit_code == 0);
  CHECK(gen.out.find("600 rows") != std::string::npos);
  CHECK(fs::exists(p.dataset));
  CHECK(fs::exists(p.dataset.string() + ".manifest.json"));

  const RunResult train = run("train-static " + p.dataset.string() + " --out " + p.model.string());
  CHECK(train.exit_code == 0);
  CHECK(fs::exists(p.model));

  const RunResult cv = run("cv " + p.dataset.string() + " --groups 3 --seed 2 --out " +
                           (p.dir / "cv.csv").string());
  CHECK(cv.exit_code == 0);
  CHECK(cv.out.find("model,fold,precision,recall,f1") == 0);
  for (const char* model : {"biased_random", "static_svm", "p1_lr", "adaptive"}) {
    CHECK(cv.out.find(std::string(model) + ",mean,") != std::string::npos);
  }
  CHECK(slurp(p.dir / "cv.csv") == cv.out);

  const RunResult sim = run("simulate --config " + p.config.string() + " --train-static-from " +
                            p.dataset.string() + " --out " + p.sim_dir.string() + " --jobs 2");
  CHECK(sim.exit_code == 0);
  CHECK(fs::exists(p.sim_dir / "replicate_000.jsonl"));
  CHECK(fs::exists(p.sim_dir / "replicate_001.jsonl"));
  CHECK(fs::exists(p.sim_dir / "static.model"));
  CHECK(fs::exists(p.sim_dir / "p1.model"));
  CHECK(fs::exists(p.sim_dir / "run_manifest.json"));
  CHECK(sim.out.find("replicate 0:") != std::string::npos);
  CHECK(sim.out.find("replicate 1:") != std::string::npos);

  const RunResult eval = run("evaluate " + p.sim_dir.string() + " --out " +
                             p.report_dir.string() + " --seed 4 --resamples 200");
  CHECK(eval.exit_code == 0);
  for (const char* name : {"table2.csv", "table3.csv", "trends.csv", "summary.csv",
                           "fig4_jit_response.csv", "fig4_overall_response.csv",
                           "fig4_conversation_engagement.csv", "fig4_response_delay.csv",
                           "run_manifest.json"}) {
    CHECK(fs::exists(p.report_dir / name));
  }
  const std::string table2 = slurp(p.report_dir / "table2.csv");
  CHECK(table2.find("metric,comparison,") == 0);
  CHECK(table2.find("static - control") != std::string::npos);
  CHECK(table2.find("adaptive - control") != std::string::npos);
  const std::string trends = slurp(p.report_dir / "trends.csv");
  CHECK(trends.find("metric,model,days_used,slope,intercept,p_value") == 0);
  CHECK(eval.out.find("jit_response static - control:") != std::string::npos);

  const std::string manifest = slurp(p.report_dir / "run_manifest.json");
  CHECK(manifest.find("\"command\": \"evaluate\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 4") != std::string::npos);
}

TEST_CASE("simulation logs are byte-identical across reruns and worker counts") {
  Pipeline& p = pipeline();
  REQUIRE(fs::exists(p.dataset));  // produced by the pipeline case above

  const fs::path serial = kWork / "sim_serial";
  const fs::path threaded = kWork / "sim_threaded";
  const std::string base = "simulate --config " + p.config.string() + " --train-static-from " +
                           p.dataset.string() + " --out ";
  CHECK(run(base + serial.string() + " --jobs 1").exit_code == 0);
  CHECK(run(base + threaded.string() + " --jobs 4").exit_code == 0);
  for (const char* name : {"replicate_000.jsonl", "replicate_001.jsonl"}) {
    const std::string a = slurp(serial / name);
    const std::string b = slurp(threaded / name);
    REQUIRE(!a.empty());
    CHECK(a == b);
    if (fs::exists(p.sim_dir / name)) CHECK(a == slurp(p.sim_dir / name));
  }

  // The seed override changes the logs.
  const fs::path reseeded = kWork / "sim_reseeded";
  CHECK(run(base + reseeded.string() + " --jobs 1 --seed 99").exit_code == 0);
  CHECK(slurp(reseeded / "replicate_000.jsonl") != slurp(serial / "replicate_000.jsonl"));
}

TEST_CASE("evaluation is deterministic in its seed") {
  Pipeline& p = pipeline();
  REQUIRE(fs::exists(p.sim_dir / "replicate_000.jsonl"));
  const fs::path again = kWork / "report_again";
  const RunResult eval = run("evaluate " + p.sim_dir.string() + " --out " + again.string() +
                             " --seed 4 --resamples 200");
  CHECK(eval.exit_code == 0);
  for (const char* name : {"table2.csv", "table3.csv", "trends.csv", "summary.csv"}) {
    CHECK(slurp(again / name) == slurp(p.report_dir / name));
  }
}
