#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kLazyKernel = R"({"d":1,"support":[{"offset":[0],"prob":0.5},{"offset":[1],"prob":0.5}]})";

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("harnesslab_cli_" + std::to_string(::getpid()) + "_" +
                                       std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path write(const std::string& name, const std::string& text) {
    fs::path p = dir / name;
    std::ofstream f(p);
    f << text;
    return p;
  }
  std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
};

int run(const std::string& args, const fs::path& stdout_to) {
  std::string cmd = std::string(HARNESSLAB_BIN) + " " + args + " > " + stdout_to.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate accepts the lazy kernel") {
  Sandbox sb;
  sb.write("kernel.json", kLazyKernel);
  int rc = run("validate --config " + (sb.dir / "kernel.json").string() + " --out " +
                   (sb.dir / "out").string(),
               sb.dir / "stdout.txt");
  CHECK(rc == 0);
  CHECK(fs::exists(sb.dir / "out" / "analysis.json"));
  CHECK(fs::exists(sb.dir / "out" / "meta.json"));
  std::string body = sb.slurp(sb.dir / "stdout.txt");
  CHECK(body.find("\"accepted\": true") != std::string::npos);
}

TEST_CASE("validate rejects the span-2 kernel with a machine-readable reason") {
  Sandbox sb;
  sb.write("kernel.json",
           R"({"d":1,"support":[{"offset":[-1],"prob":0.5},{"offset":[1],"prob":0.5}]})");
  int rc = run("validate --config " + (sb.dir / "kernel.json").string() + " --out " +
                   (sb.dir / "out").string(),
               sb.dir / "stdout.txt");
  CHECK(rc == 2);
  std::string body = sb.slurp(sb.dir / "stdout.txt");
  CHECK(body.find("not-strongly-aperiodic") != std::string::npos);
  // Partial outputs are removed on failure.
  CHECK(!fs::exists(sb.dir / "out" / "analysis.json"));
}

TEST_CASE("limits emits the kernel table") {
  Sandbox sb;
  sb.write("cfg.json", R"({"sigma1_sq":0.25,"sigma_xi_sq":1.0})");
  int rc = run("limits --config " + (sb.dir / "cfg.json").string() + " --out " +
                   (sb.dir / "out").string(),
               sb.dir / "stdout.txt");
  CHECK(rc == 0);
  std::string csv = sb.slurp(sb.dir / "out" / "limits.csv");
  CHECK(csv.rfind("s,q,t,r,gamma1,gamma2,zcov\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);
}

TEST_CASE("fluct outputs are byte-identical across thread counts") {
  Sandbox sb;
  std::string cfg = std::string("{") + "\"kernel\":" + kLazyKernel +
                    ",\"noise\":{\"family\":\"gaussian\",\"variance\":1.0}" +
                    ",\"initial\":{\"variant\":\"iid\",\"mu0\":0.0}" +
                    ",\"n\":64,\"replicas\":60" +
                    ",\"points\":[{\"t\":0.5,\"r\":0.0},{\"t\":1.0,\"r\":0.5}]}";
  sb.write("cfg.json", cfg);
  int rc1 = run("fluct --config " + (sb.dir / "cfg.json").string() + " --seed 9 --threads 1 --out " +
                    (sb.dir / "out1").string(),
                sb.dir / "s1.txt");
  int rc2 = run("fluct --config " + (sb.dir / "cfg.json").string() + " --seed 9 --threads 2 --out " +
                    (sb.dir / "out2").string(),
                sb.dir / "s2.txt");
  CHECK(rc1 == 0);
  CHECK(rc2 == 0);
  CHECK(sb.slurp(sb.dir / "out1" / "cov_estimate.csv") ==
        sb.slurp(sb.dir / "out2" / "cov_estimate.csv"));
  CHECK(sb.slurp(sb.dir / "out1" / "points.csv") == sb.slurp(sb.dir / "out2" / "points.csv"));
}

TEST_CASE("scaling with --assert passes at desk scale") {
  Sandbox sb;
  std::string cfg = std::string("{") + "\"kernel\":" + kLazyKernel +
                    ",\"noise\":{\"family\":\"gaussian\",\"variance\":1.0}" +
                    ",\"t_list\":[64,128,256,512,1024,2048,4096],\"replicas\":200}";
  sb.write("cfg.json", cfg);
  int rc = run("scaling --config " + (sb.dir / "cfg.json").string() +
                   " --seed 4 --threads 2 --assert --out " + (sb.dir / "out").string(),
               sb.dir / "stdout.txt");
  CHECK(rc == 0);
  std::string csv = sb.slurp(sb.dir / "out" / "scaling.csv");
  CHECK(csv.rfind("t,var_mc,stderr,var_exact\n", 0) == 0);
}

TEST_CASE("missing config file is a config rejection") {
  Sandbox sb;
  int rc = run("fluct --config " + (sb.dir / "nope.json").string() + " --out " +
                   (sb.dir / "out").string(),
               sb.dir / "stdout.txt");
  CHECK(rc == 2);
  CHECK(sb.slurp(sb.dir / "stdout.txt").find("config-error") != std::string::npos);
}

}  // TEST_SUITE
