#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Output {
  int status;
  std::string text;
};

Output Run(const std::string& args) {
  const std::string cmd = std::string(NFSP_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string text;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, text};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("encode-check") {
  auto out = Run("encode-check leduc");
  CHECK(out.status == 0);
  CHECK(out.text == "30\ncards=6 (2x3) betting=24\n");
  out = Run("encode-check lhe");
  CHECK(out.status == 0);
  CHECK(out.text == "288\ncards=208 (4x52) betting=80\n");
}

TEST_CASE("unknown game fails cleanly") {
  const auto out = Run("encode-check foo");
  CHECK(out.status != 0);
  CHECK(out.text.find("unknown game") != std::string::npos);
  CHECK(Run("xfp --game foo").status != 0);
}

TEST_CASE("xfp csv is byte-identical across runs") {
  const fs::path dir = fs::temp_directory_path() / "nfsp_cli_test";
  fs::create_directories(dir);
  const auto a = dir / "a.csv", b = dir / "b.csv", s = dir / "s.json";
  const std::string args = "xfp --game leduc --iterations 40 --eval-every 10 --br-noise 0.1 --seed 3";
  REQUIRE(Run(args + " --csv " + a.string() + " --strategy " + s.string()).status == 0);
  REQUIRE(Run(args + " --csv " + b.string()).status == 0);
  const std::string csv = Slurp(a);
  CHECK(csv == Slurp(b));
  CHECK(csv.rfind("episode,exploitability_or_mbbh", 0) == 0);

  const auto e = Run("exploit --game leduc " + s.string());
  CHECK(e.status == 0);
  // The last csv row and the saved strategy agree.
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  const double from_csv = std::stod(last.substr(last.find(',') + 1));
  CHECK(std::stod(e.text) == doctest::Approx(from_csv).epsilon(1e-6));
  fs::remove_all(dir);
}

TEST_CASE("match between scripted bots") {
  const auto out = Run("match --game lhe --a always_fold --b always_call --hands 1000");
  CHECK(out.status == 0);
  CHECK(out.text == "hands,mean_mbbh,std_error\n1000,-750,0\n");
}
