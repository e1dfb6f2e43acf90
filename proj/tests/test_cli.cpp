#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

extern const char* g_numaperf_binary;

namespace {

namespace fs = std::filesystem;

struct Run {
  int exit_code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  REQUIRE(g_numaperf_binary != nullptr);
  const fs::path out_path = fs::temp_directory_path() / "numaperf_cli_out.txt";
  const std::string cmd = std::string(g_numaperf_binary) + " " + args + " > " +
                          out_path.string() + " 2> " + out_path.string() + ".err";
  const int status = std::system(cmd.c_str());
  Run run;
  run.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_path);
  std::stringstream buf;
  buf << in.rdbuf();
  run.out = buf.str();
  return run;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("gen, validate, and analyze round-trip through the binary") {
  const fs::path trace = fs::temp_directory_path() / "numaperf_cli_fs.trace";
  Run gen = run_cli("gen false-sharing --out " + trace.string() +
                    " --threads 2 --events 4000 --span-ns 1000000 --seed 3");
  REQUIRE(gen.exit_code == 0);
  CHECK(fs::exists(trace));
  CHECK(fs::exists(trace.string() + ".manifest.json"));

  Run validate = run_cli("validate " + trace.string());
  CHECK(validate.exit_code == 0);
  CHECK(validate.out.find("OK:") != std::string::npos);

  Run analyze = run_cli("analyze " + trace.string());
  CHECK(analyze.exit_code == 0);
  CHECK(analyze.out.find("false sharing") != std::string::npos);
  CHECK(analyze.out.find("padding") != std::string::npos);

  Run structured = run_cli("analyze --output=structured " + trace.string());
  CHECK(structured.exit_code == 0);
  auto json = nlohmann::json::parse(structured.out);
  CHECK(json["schema_version"] == 1);
  bool has_false_sharing = false;
  for (const auto& issue : json["issues"]) {
    if (issue["kind"] == "false_sharing" && issue["tier"] == "reported") {
      has_false_sharing = true;
      CHECK(issue["fix"] == "padding");
    }
  }
  CHECK(has_false_sharing);

  // Determinism: byte-identical structured output on a second run.
  Run again = run_cli("analyze --output=structured " + trace.string());
  CHECK(again.out == structured.out);
}

TEST_CASE("single-thread traces report no issues") {
  const fs::path trace = fs::temp_directory_path() / "numaperf_cli_st.trace";
  REQUIRE(run_cli("gen single-thread --out " + trace.string() + " --events 1000").exit_code ==
          0);
  Run analyze = run_cli("analyze --output=structured " + trace.string());
  CHECK(analyze.exit_code == 0);
  auto json = nlohmann::json::parse(analyze.out);
  CHECK(json["issues"].empty());
}

TEST_CASE("a header-only trace analyzes to an empty report") {
  const fs::path empty = fs::temp_directory_path() / "numaperf_cli_empty.trace";
  std::ofstream(empty) << "NPTRACE 1\n";
  Run analyze = run_cli("analyze --output=structured " + empty.string());
  CHECK(analyze.exit_code == 0);
  auto json = nlohmann::json::parse(analyze.out);
  CHECK(json["issues"].empty());
  CHECK(json["trace"]["events"] == 0);
}

TEST_CASE("malformed traces exit with code 2") {
  const fs::path bad = fs::temp_directory_path() / "numaperf_cli_bad.trace";
  std::ofstream(bad) << "NPTRACE 1\nMA 1 5 R 0x10 4\n";  // thread 5 never created
  CHECK(run_cli("analyze " + bad.string()).exit_code == 2);
  CHECK(run_cli("validate " + bad.string()).exit_code == 2);

  std::ofstream(bad) << "not a trace\n";
  CHECK(run_cli("validate " + bad.string()).exit_code == 2);
}

TEST_CASE("config validation names the offending flag") {
  const fs::path trace = fs::temp_directory_path() / "numaperf_cli_cfg.trace";
  REQUIRE(run_cli("gen single-thread --out " + trace.string() + " --events 10").exit_code == 0);
  Run bad = run_cli("analyze --page-size=1000 " + trace.string());
  CHECK(bad.exit_code == 1);
  const std::string err = read_file(fs::temp_directory_path() / "numaperf_cli_out.txt.err");
  CHECK(err.find("--page-size") != std::string::npos);
}

TEST_CASE("environment variables configure defaults, flags win") {
  const fs::path trace = fs::temp_directory_path() / "numaperf_cli_env.trace";
  REQUIRE(run_cli("gen single-thread --out " + trace.string() + " --events 10").exit_code == 0);

  Run env_run = run_cli("analyze --output=structured " + trace.string());
  auto base = nlohmann::json::parse(env_run.out);
  CHECK(base["config"]["page_size"] == 4096);

  const std::string with_env = "NUMAPERF_PAGE_SIZE=8192 " + std::string(g_numaperf_binary);
  const fs::path out_path = fs::temp_directory_path() / "numaperf_cli_env_out.txt";
  REQUIRE(std::system((with_env + " analyze --output=structured " + trace.string() + " > " +
                       out_path.string() + " 2>/dev/null").c_str()) == 0);
  auto from_env = nlohmann::json::parse(read_file(out_path));
  CHECK(from_env["config"]["page_size"] == 8192);

  REQUIRE(std::system((with_env + " analyze --output=structured --page-size=16384 " +
                       trace.string() + " > " + out_path.string() + " 2>/dev/null")
                          .c_str()) == 0);
  auto flag_wins = nlohmann::json::parse(read_file(out_path));
  CHECK(flag_wins["config"]["page_size"] == 16384);
}

TEST_CASE("out-of-order input needs --sort") {
  const fs::path trace = fs::temp_directory_path() / "numaperf_cli_unsorted.trace";
  std::ofstream(trace) << "NPTRACE 1\nMA 100 0 R 0x10 4\nMA 5 0 R 0x20 4\n";
  CHECK(run_cli("analyze " + trace.string()).exit_code == 2);
  CHECK(run_cli("analyze --sort " + trace.string()).exit_code == 0);
}
