#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / ("nodallab_cli_" + std::to_string(::getpid()));

struct Cleanup {
  ~Cleanup() {
    std::error_code ec;
    fs::remove_all(kRoot, ec);
  }
} cleanup;

fs::path scratch(const std::string& name) {
  const auto dir = kRoot / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(NODALLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("construct writes the profile and the matching report") {
  const auto out = scratch("construct");
  REQUIRE(run("construct --q 1.5 --lambda-plus 2 --lambda-minus 3 --k 9 --arc-nodes 512 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "profile.txt"));
  const auto m = read_json(out / "matching.json");
  CHECK(m["k"] == 9);
  CHECK(m["zeros"] == 18);
  const auto r = read_json(out / "run.json");
  CHECK(r["command"] == "construct");
  CHECK(r["exit_code"] == 0);
}

TEST_CASE("construct exit codes") {
  const auto out = scratch("codes");
  CHECK(run("construct --q 1 --lp 1 --lm 1 --k 4 --out " + out.string()) == 2);
  CHECK(read_json(out / "error.json")["error"] == "precondition");
  CHECK(run("construct --q 2.5 --lp 1 --lm 1 --k 9 --out " + out.string()) == 2);
  CHECK(run("construct --out " + out.string()) == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("analyze --input " + (out / "missing.txt").string() + " --out " + out.string()) == 3);
}

TEST_CASE("config file supplies options the command line leaves out") {
  const auto out = scratch("config");
  std::ofstream(out / "run.cfg") << "# u_5\nq=1\nlambda-plus=1\nlambda-minus=4\nk=5\narc-nodes=256\n";
  REQUIRE(run("construct --config " + (out / "run.cfg").string() + " --k 6 --out " + out.string()) == 0);
  CHECK(read_json(out / "matching.json")["k"] == 6);
}

TEST_CASE("analyze and plot a constructed solution") {
  const auto out = scratch("plot");
  REQUIRE(run("construct --q 1 --lp 1 --lm 1 --k 5 --arc-nodes 512 --out " + out.string()) == 0);
  REQUIRE(run("analyze --input " + (out / "profile.txt").string() + " --grid 256 --out " + out.string()) == 0);
  const auto a = read_json(out / "analysis.json");
  CHECK(a["order"]["snapped"] == 2.0);
  CHECK(a["singular_points"] == 1);
  REQUIRE(run("plot --nodal " + (out / "nodal.csv").string() + " --singular " + (out / "nodal.json").string() +
              " --out " + out.string()) == 0);
  const auto svg = slurp(out / "plot.svg");
  CHECK(count(svg, "<polyline") == 10);
  CHECK(count(svg, "class=\"singular\"") == 1);

  REQUIRE(run("plot --trace " + (out / "H.csv").string() + " --output " + (out / "H.svg").string() + " --out " +
              out.string()) == 0);
  CHECK(count(slurp(out / "H.svg"), "<polyline") == 1);
}

TEST_CASE("plot of an empty nodal set draws only the outline") {
  const auto out = scratch("empty");
  REQUIRE(run("analyze --field constant:1 --q 1 --lp 1 --lm 1 --mu 0 --x0 0.5 0.5 --r-max 0.25 --out " + out.string()) ==
          2);  // x0 is not a zero
  std::ofstream(out / "empty.csv") << "x1,y1,x2,y2\n";
  REQUIRE(run("plot --nodal " + (out / "empty.csv").string() + " --out " + out.string()) == 0);
  const auto svg = slurp(out / "plot.svg");
  CHECK(count(svg, "<polyline") == 0);
  CHECK(count(svg, "<circle") == 1);
}

TEST_CASE("verify suites and fault injection") {
  const auto out = scratch("verify");
  CHECK(run("verify --suite recurrences --out " + out.string()) == 0);
  const auto v = read_json(out / "verify.json");
  CHECK(v["all_pass"] == true);
  CHECK(v["criteria"].size() == 1);
  CHECK(run("verify --suite conservation --perturb 1e-2 --out " + out.string()) == 1);
  CHECK(read_json(out / "verify.json")["all_pass"] == false);
}

TEST_CASE("sweep") {
  const auto out = scratch("sweep");
  REQUIRE(run("sweep --q 1 --lp 1 --lm 1 --k-min 4 --k-max 6 --arc-nodes 256 --grid 128 --out " + out.string()) == 0);
  const auto csv = slurp(out / "sweep.csv");
  CHECK(count(csv, "\n") == 4);
  CHECK(csv.find("error") != std::string::npos);  // k = 4 is not above k_bar
  REQUIRE(run("sweep --q 1 --lp 1 --lm 1 --k-min 7 --k-max 6 --out " + out.string()) == 0);
  CHECK(count(slurp(out / "sweep.csv"), "\n") == 1);
}

TEST_CASE("outputs are reproducible apart from timings") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string args = "construct --q 1.5 --lp 1 --lm 2 --k 9 --arc-nodes 256 --jobs 2 --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename();
    if (name == "run.json") continue;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / name), name.string());
  }
  auto ra = read_json(a / "run.json"), rb = read_json(b / "run.json");
  ra.erase("timings");
  rb.erase("timings");
  auto strip_out = [](json& j) { j["options"].erase("out"); };
  strip_out(ra);
  strip_out(rb);
  CHECK(ra == rb);
}
