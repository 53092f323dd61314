// Drives the built bsq binary (path in BSQ_CLI) on small grids.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {
struct Run {
  int code = -1;
  std::string out;
};

const fs::path& root() {
  static fs::path r = [] {
    char tmpl[] = "/tmp/bsq_cli_XXXXXX";
    fs::path p = mkdtemp(tmpl);
    setenv("BSQ_OUTPUT_ROOT", p.c_str(), 1);
    return p;
  }();
  return r;
}

Run run(const std::string& args) {
  const char* cli = std::getenv("BSQ_CLI");
  REQUIRE_MESSAGE(cli, "BSQ_CLI must point at the bsq binary");
  root();
  std::string cmd = std::string(cli) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const std::string kSmall = " --alpha 0.1 --n-r 48 --n-beta 32";
}  // namespace

TEST_CASE("elliptic-test") {
  Run r = run("elliptic-test --alpha 0.1 --n-r 48 --n-beta 64 -o ell");
  CHECK(r.code == 0);
  CHECK(r.out.find("n=4") != std::string::npos);
  CHECK(fs::exists(root() / "ell" / "elliptic.txt"));
  CHECK(fs::exists(root() / "ell" / "elliptic-test.config"));
}

TEST_CASE("verify-profile") {
  Run r = run("verify-profile" + kSmall + " -o vp");
  CHECK(r.code == 0);
  CHECK(r.out.find("status=pass") != std::string::npos);
  CHECK(fs::exists(root() / "vp" / "profile_residual.txt"));
}

TEST_CASE("spectrum") {
  Run z = run("spectrum" + kSmall + " --T 1 --zero -o spz");
  CHECK(z.code == 0);
  CHECK(z.out.find("zero state") != std::string::npos);
  Run r = run("spectrum" + kSmall + " --T 1 --seeds 2 -o sp");
  CHECK(r.code == 0);
  CHECK(r.out.find("seed 2") != std::string::npos);
  CHECK(fs::exists(root() / "sp" / "spectrum_rates.txt"));
}

TEST_CASE("evolve is deterministic") {
  std::string a = " --alpha 0.05 --n-r 48 --n-beta 32 --T 0.5";
  Run r1 = run("evolve" + a + " -o ev1");
  Run r2 = run("evolve" + a + " -o ev2");
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(r1.out.find("T_star=") != std::string::npos);
  std::string t1 = slurp(root() / "ev1" / "trajectory.txt");
  CHECK(!t1.empty());
  CHECK(t1 == slurp(root() / "ev2" / "trajectory.txt"));
  CHECK(t1.find("tau") != std::string::npos);
}

TEST_CASE("toy") {
  Run r = run("toy --T 2 -o toy");
  CHECK(r.code == 0);
  CHECK(r.out.find("bounded=yes") != std::string::npos);
  std::string t = slurp(root() / "toy" / "toy.txt");
  CHECK(t.rfind("# t mu I J", 0) == 0);
  CHECK(run("toy --T 2 --sample zero -o toyz").code == 0);
}

TEST_CASE("verify-inequalities") {
  Run r = run("verify --alpha 0.1 -o vi");
  CHECK(r.code == 0);
  for (const char* n : {"damping_coefficients", "D_bounds", "integrals", "lemma_one", "cancellation_lemma.k=2"})
    CHECK_MESSAGE(r.out.find(n) != std::string::npos, n);
  CHECK(r.out.find("failed") == std::string::npos);
  CHECK(fs::exists(root() / "vi" / "certificates.txt"));
}

TEST_CASE("configuration errors exit with code 2") {
  std::ofstream(root() / "noalpha.cfg") << "n_r = 48\n";
  CHECK(run("evolve --config " + (root() / "noalpha.cfg").string()).code == 2);
  CHECK(run("evolve --alpha 0.1 --set bogus=1").code == 2);
  CHECK(run("evolve --alpha 1.5").code == 2);
  std::ofstream(root() / "ok.cfg") << "alpha = 0.1\nn_r = 48\nn_beta = 64\n";
  CHECK(run("elliptic-test --config " + (root() / "ok.cfg").string() + " -o cfg").code == 0);
  CHECK(slurp(root() / "cfg" / "elliptic-test.config").find("n_beta") != std::string::npos);
}
