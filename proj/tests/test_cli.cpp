#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the installed binary: the harness passes its path
// through the CAUSALBOOT_CLI environment variable.

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

const std::string& work_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/causalboot_cli_XXXXXX";
    char* made = mkdtemp(tmpl);
    REQUIRE(made != nullptr);
    return std::string(made);
  }();
  return dir;
}

std::string cli_path() {
  const char* env = std::getenv("CAUSALBOOT_CLI");
  REQUIRE(env != nullptr);
  return env;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string err_path =
      work_dir() + "/stderr_" + std::to_string(counter++) + ".txt";
  const std::string cmd =
      "\"" + cli_path() + "\" " + args + " 2>" + err_path;

  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  return r;
}

std::string good_csv() {
  return
      "y,w\n"
      "0.10,0\n1.25,0\n-0.40,0\n0.85,0\n0.30,0\n"
      "1.10,1\n2.05,1\n0.95,1\n1.70,1\n1.40,1\n";
}

}  // namespace

TEST_CASE("interval subcommand happy path", "[cli]") {
  const std::string data = work_dir() + "/good.csv";
  write_file(data, good_csv());

  RunResult r = run_cli("ci --data " + data + " --B 199 --seed 7");
  INFO(r.err);
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("\"method\": \"cboot-pivotal-agl\"") != std::string::npos);
  REQUIRE(r.out.find("\"n\": 10") != std::string::npos);
  REQUIRE(r.out.find("\"n0\": 5") != std::string::npos);
  REQUIRE(r.out.find("\"ci_lo\":") != std::string::npos);
  REQUIRE(r.out.find("\"ci_hi\":") != std::string::npos);
  REQUIRE(r.out.find("\"degenerate\": false") != std::string::npos);

  SECTION("reruns are byte-identical") {
    RunResult again = run_cli("ci --data " + data + " --B 199 --seed 7");
    REQUIRE(again.code == 0);
    REQUIRE(again.out == r.out);
  }

  SECTION("the seed matters") {
    RunResult other = run_cli("ci --data " + data + " --B 199 --seed 8");
    REQUIRE(other.code == 0);
    REQUIRE(other.out != r.out);
  }

  SECTION("other method tokens") {
    RunResult g = run_cli("ci --data " + data + " --method neyman-gauss");
    REQUIRE(g.code == 0);
    REQUIRE(g.out.find("\"method\": \"neyman-gauss\"") != std::string::npos);
    REQUIRE(g.out.find("\"skipped\": 0") != std::string::npos);

    RunResult f =
        run_cli("ci --data " + data + " --method fisher --B 499 --seed 3");
    REQUIRE(f.code == 0);
    REQUIRE(f.out.find("\"method\": \"fisher\"") != std::string::npos);

    RunResult big = run_cli("ci --data " + data +
                            " --method cboot-pivotal-neyman --B 199 --N 40");
    REQUIRE(big.code == 0);
    REQUIRE(big.out.find("\"N\": 40") != std::string::npos);
  }
}

TEST_CASE("interval subcommand failure modes", "[cli]") {
  SECTION("missing file") {
    RunResult r = run_cli("ci --data " + work_dir() + "/absent.csv");
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("cannot open") != std::string::npos);
  }

  SECTION("malformed data names the line") {
    const std::string data = work_dir() + "/broken.csv";
    write_file(data, "y,w\n1.0,0\nnot-a-number,1\n2.0,1\n");
    RunResult r = run_cli("ci --data " + data);
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("line 3") != std::string::npos);
  }

  SECTION("stratum too small to analyze") {
    const std::string data = work_dir() + "/thin.csv";
    write_file(data, "y,w\n1.0,0\n2.0,0\n3.0,0\n4.0,1\n");
    RunResult r = run_cli("ci --data " + data);
    REQUIRE(r.code == 3);
    REQUIRE(r.err.find("two units") != std::string::npos);
  }

  SECTION("constant outcomes cannot be resampled") {
    const std::string data = work_dir() + "/flat.csv";
    write_file(data, "y,w\n1.0,0\n1.0,0\n1.0,1\n1.0,1\n");
    RunResult r = run_cli("ci --data " + data + " --B 99");
    REQUIRE(r.code == 3);
    REQUIRE(r.err.find("degenerate") != std::string::npos);
  }

  SECTION("bad configuration") {
    const std::string data = work_dir() + "/good2.csv";
    write_file(data, good_csv());
    REQUIRE(run_cli("ci --data " + data + " --level 1.5").code == 4);
    REQUIRE(run_cli("ci --data " + data + " --method what").code == 4);
    REQUIRE(run_cli("ci --data " + data + " --N 4").code == 4);
    REQUIRE(run_cli("ci --data " + data + " --assignment sideways").code == 4);
  }
}

TEST_CASE("simulation subcommand", "[cli]") {
  const std::string prefix = work_dir() + "/sim1";
  const std::string args =
      "simulate --design 3 --methods neyman-gauss,cboot-pivotal-agl"
      " --reps 5 --B 29 --seed 42 --out " + prefix;

  RunResult r = run_cli(args + " --threads 2");
  INFO(r.err);
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("method,coverage") != std::string::npos);
  REQUIRE(r.out.find("cboot-pivotal-agl") != std::string::npos);

  // echoed table equals the file artifact
  REQUIRE(slurp(prefix + ".csv") == r.out);
  const std::string json = slurp(prefix + ".json");
  REQUIRE(json.find("\"design\": \"3\"") != std::string::npos);
  REQUIRE(json.find("\"reps\": 5") != std::string::npos);

  SECTION("scheduling does not change the artifact") {
    const std::string prefix1 = work_dir() + "/sim_t1";
    const std::string args1 =
        "simulate --design 3 --methods neyman-gauss,cboot-pivotal-agl"
        " --reps 5 --B 29 --seed 42 --out " + prefix1;
    RunResult one = run_cli(args1 + " --threads 1");
    REQUIRE(one.code == 0);
    REQUIRE(one.out == r.out);
    REQUIRE(slurp(prefix1 + ".json") == json);
  }

  SECTION("failure modes") {
    REQUIRE(run_cli("simulate --design 9 --reps 5 --B 29 --out " +
                    work_dir() + "/x").code == 4);
    REQUIRE(run_cli("simulate --design 3 --methods nope --reps 5 --B 29 --out " +
                    work_dir() + "/x").code == 4);
    REQUIRE(run_cli("simulate --design 3 --reps 0 --B 29 --out " +
                    work_dir() + "/x").code == 4);
  }
}
