#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <spuridium/runner.hpp>

using namespace spuridium;

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("spuridium_cli_" + std::to_string(static_cast<long>(::getpid())));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err = work_dir() / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(SPURIDIUM_CLI_PATH) + " " + args + " >" +
                          out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  if (raw != -1 && WIFEXITED(raw))
    r.exit_code = WEXITSTATUS(raw);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("solve writes a csv report", "[cli]") {
  const fs::path path = work_dir() / "solve_basic.csv";
  const CliResult r = run_cli("solve --problem harmonic --omega 1 --n 60 --box 20 --out " +
                              path.string());
  REQUIRE(r.exit_code == 0);
  REQUIRE(fs::exists(path));
  const std::string text = slurp(path);
  REQUIRE(text.rfind("# spuridium-report-v1\n", 0) == 0);

  const Report rep = read_report(path.string());
  REQUIRE(!rep.rows.empty());
  double lowest = 1e300;
  for (const ReportRow& row : rep.rows)
    lowest = std::min(lowest, row.energy);
  REQUIRE(std::abs(lowest - 0.5) < 1e-6);
}

TEST_CASE("help exits zero", "[cli]") {
  REQUIRE(run_cli("--help").exit_code == 0);
  REQUIRE(run_cli("solve --help").exit_code == 0);
}

TEST_CASE("invalid invocations exit 2 and write nothing", "[cli]") {
  const fs::path path = work_dir() / "never_written.csv";

  CliResult r = run_cli("solve --problem harmonic --n 40 --box -5 --out " + path.string());
  REQUIRE(r.exit_code == 2);
  REQUIRE(!fs::exists(path));
  REQUIRE(r.err.find("error") != std::string::npos);

  REQUIRE(run_cli("frobnicate").exit_code == 2);
  REQUIRE(run_cli("solve --no-such-flag 1").exit_code == 2);
  REQUIRE(run_cli("solve --problem harmonic --scan 20,40 --n 30").exit_code == 2);
  REQUIRE(run_cli("solve --problem harmonic --n 40 --box 20 --scan 30,20").exit_code == 2);
  REQUIRE(run_cli("classify").exit_code == 2);
  REQUIRE(run_cli("classify " + (work_dir() / "does_not_exist.csv").string()).exit_code == 2);
  REQUIRE(run_cli("solve --config " + (work_dir() / "no_config.json").string()).exit_code == 2);
}

TEST_CASE("repeated runs produce identical bytes", "[cli]") {
  const fs::path path = work_dir() / "determinism.csv";
  const std::string args =
      "solve --problem square_well --v0 5 --width 2 --scan 20,30,40 --box 20 --out " +
      path.string();
  REQUIRE(run_cli(args).exit_code == 0);
  const std::string first = slurp(path);
  REQUIRE(run_cli(args).exit_code == 0);
  const std::string second = slurp(path);
  REQUIRE(!first.empty());
  REQUIRE(first == second);
}

TEST_CASE("reports go to stdout without --out", "[cli]") {
  const CliResult r = run_cli("solve --problem harmonic --n 30 --box 20");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.rfind("# spuridium-report-v1\n", 0) == 0);
}

TEST_CASE("json output is valid json", "[cli]") {
  const fs::path path = work_dir() / "solve.json";
  const CliResult r = run_cli("solve --problem harmonic --n 30 --box 20 --format json --out " +
                              path.string());
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(path));
  REQUIRE(j.at("schema").get<std::string>() == "spuridium-report-v1");
  REQUIRE(j.at("config").at("problem").get<std::string>() == "harmonic");
  REQUIRE(!j.at("rows").empty());
}

TEST_CASE("classify round trip is stable", "[cli]") {
  const fs::path solved = work_dir() / "classify_in.csv";
  REQUIRE(run_cli("solve --problem harmonic --scan 20,30,40 --box 20 --out " +
                  solved.string())
              .exit_code == 0);

  const fs::path once = work_dir() / "classify_out.csv";
  REQUIRE(run_cli("classify " + solved.string() + " --out " + once.string()).exit_code == 0);
  const std::string before = slurp(once);

  // reclassifying a classified report in place must not change a byte
  REQUIRE(run_cli("classify " + once.string() + " --out " + once.string()).exit_code == 0);
  REQUIRE(slurp(once) == before);

  const Report a = read_report(solved.string());
  const Report b = report_from_csv_text(before);
  REQUIRE(a.rows.size() == b.rows.size());
  bool any_bound = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].verdict == b.rows[i].verdict);
    any_bound = any_bound || a.rows[i].verdict == Verdict::GenuineBound;
  }
  REQUIRE(any_bound);

  const fs::path strict = work_dir() / "classify_strict.csv";
  REQUIRE(run_cli("classify " + solved.string() + " --tol-bound 1e-300 --out " +
                  strict.string())
              .exit_code == 0);
  for (const ReportRow& row : read_report(strict.string()).rows)
    REQUIRE(row.verdict != Verdict::GenuineBound);
}

TEST_CASE("sumrule prints the saturation table", "[cli]") {
  const CliResult r = run_cli("sumrule --problem harmonic --scan 20,60 --box 20");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.rfind("# spuridium-sumrule-v1\n", 0) == 0);
  REQUIRE(r.out.find("n,s,deviation\n") != std::string::npos);
}

TEST_CASE("sumrule refuses relativistic problems", "[cli]") {
  const CliResult r =
      run_cli("sumrule --problem dirac_coulomb --z 1 --kappa -1 --n 40 --box 60");
  REQUIRE(r.exit_code == 2);
  REQUIRE(r.err.find("error") != std::string::npos);
}

TEST_CASE("flags override config file values", "[cli]") {
  RunConfig base;
  base.problem = ProblemKind::Harmonic;
  base.omega = 1.5;
  base.scan = {30};
  base.box_length = 20.0;
  const fs::path cfg_path = work_dir() / "base.json";
  atomic_write_file(cfg_path.string(), to_json(base).dump(2) + "\n");

  const fs::path out = work_dir() / "override.csv";
  REQUIRE(run_cli("solve --config " + cfg_path.string() + " --n 40 --out " + out.string())
              .exit_code == 0);
  const Report rep = read_report(out.string());
  REQUIRE(rep.config.scan == std::vector<std::size_t>{40});  // flag beats file
  REQUIRE(rep.config.omega == 1.5);                          // file beats default
  REQUIRE(rep.config.out_path == out.string());
}

TEST_CASE("relativistic solve works end to end", "[cli]") {
  const fs::path path = work_dir() / "dirac.csv";
  const CliResult r = run_cli(
      "solve --problem dirac_coulomb --z 1 --kappa -1 --scan 20,30 --box 60 --out " +
      path.string());
  REQUIRE(r.exit_code == 0);
  const Report rep = read_report(path.string());
  REQUIRE(!rep.rows.empty());
  for (const ReportRow& row : rep.rows)
    REQUIRE(!row.forbidden_fraction.has_value());
}
