#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "qwalk_cli_test";

int run(const std::string& args) {
  const std::string cmd = "QWALK_WORKERS=1 " + std::string(QWALK_CLI_PATH) + " " + args + " >" +
                          (kDir / "stdout.txt").string() + " 2>" + (kDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

struct Scratch {
  Scratch() {
    fs::remove_all(kDir);
    fs::create_directories(kDir);
  }
  ~Scratch() { fs::remove_all(kDir); }
};

}  // namespace

TEST_CASE("fig1 csv schema and manifest") {
  Scratch s;
  REQUIRE(run("fig1 --dims 19,5 --out " + (kDir / "fig1.csv").string()) == 0);
  CHECK(first_line(kDir / "fig1.csv") == "T,quantum_return,classical_return,uniform_level");
  const auto text = slurp(kDir / "fig1.csv");
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find("0,1,1,0.010526315789473684\n") != std::string::npos);
  const auto m = nlohmann::json::parse(slurp(kDir / "fig1.csv.manifest.json"));
  CHECK(m["schema_version"] == 1);
  CHECK(m["command"] == "fig1");
  CHECK(m["config"]["dims"] == "19,5");
  CHECK(m["status"] == "ok");
  CHECK(m["rerun"][1] == "fig1");
}

TEST_CASE("lemma2 json report") {
  Scratch s;
  REQUIRE(run("lemma2 --n 19 --T 100 --offset 0") == 0);
  const auto j = nlohmann::json::parse(slurp(kDir / "stdout.txt"));
  CHECK(j["rhs"].get<double>() == doctest::Approx(100152.7).epsilon(1e-6));
  CHECK(j["satisfied"] == true);
  CHECK(j["lhs"].get<double>() <= j["rhs"].get<double>());
}

TEST_CASE("conjecture csv schema") {
  Scratch s;
  const auto out = (kDir / "conj.csv").string();
  REQUIRE(run("conjecture --range 10,30 --pairs 3 --seed 3 --T-max 500 --T-points 2 --out " + out) == 0);
  CHECK(first_line(out) == "n1,n2,T,lhs,rhs,satisfied");
  const auto text = slurp(out);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 2);
}

TEST_CASE("config file merges under flags") {
  Scratch s;
  {
    std::ofstream cfg(kDir / "job.cfg");
    cfg << "# fig1 job\ndims = 19,5\nt-max=50\n";
  }
  const auto out = (kDir / "a.json").string();
  REQUIRE(run("fig1 --config " + (kDir / "job.cfg").string() + " --out " + out) == 0);
  auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["n1"] == 19);
  CHECK(j["T"].size() == 51);
  REQUIRE(run("fig1 --config " + (kDir / "job.cfg").string() + " --t-max 10 --out " + out) == 0);
  j = nlohmann::json::parse(slurp(out));
  CHECK(j["T"].size() == 11);

  std::ofstream(kDir / "bad.cfg") << "no-such-key=1\n";
  CHECK(run("fig1 --config " + (kDir / "bad.cfg").string()) == 1);
  std::ofstream(kDir / "broken.cfg") << "just words\n";
  CHECK(run("fig1 --config " + (kDir / "broken.cfg").string()) == 1);
}

TEST_CASE("usage errors exit with 1") {
  Scratch s;
  CHECK(run("") == 1);
  CHECK(run("nonsense") == 1);
  CHECK(run("fig1 --bogus 3") == 1);
  CHECK(run("fig1 --dims 19") == 1);
  CHECK(run("lemma2 --n 20") == 1);
  CHECK(run("spectrum --format svg") == 1);
  CHECK(run("kernel --kind quadrature --dt 0.5") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("slow tier gate") {
  Scratch s;
  CHECK(run("theorem3") == 1);
  CHECK(slurp(kDir / "stderr.txt").find("--tier slow") != std::string::npos);
  CHECK(run("conjecture --pairs 0") == 1);
  CHECK(run("theorem3 --tier slow --relaxed --n1 19 --n2 5 --format csv") == 0);
  CHECK(first_line(kDir / "stdout.txt") == "case,lhs,rhs,satisfied");
}

TEST_CASE("bound violation exits with 2 and still writes the report") {
  Scratch s;
  // With automatic rounds the 1e-3 target is met.
  CHECK(run("mix-repeated --dims 19,5 --T 24 --epsilon 1e-3 --format json") == 0);
  // One round at a time far outside [n/3, n/2] leaves the walk unmixed.
  const auto out = (kDir / "coord.json").string();
  CHECK(run("mix-coordinate --dims 19,5 --times 0.1,0.1 --rounds 1 --out " + out) == 2);
  CHECK(fs::exists(out));
  const auto m = nlohmann::json::parse(slurp(out + ".manifest.json"));
  CHECK(m["status"] == "violation");
}

TEST_CASE("svg output") {
  Scratch s;
  const auto out = (kDir / "fig1.svg").string();
  REQUIRE(run("fig1 --dims 19,5 --out " + out) == 0);
  const auto svg = slurp(out);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("quantum") != std::string::npos);
}

TEST_CASE("identical config reproduces identical bytes") {
  Scratch s;
  const std::string job = "mix-repeated --dims 7,5 --T 6 --mode sampled --seed 5 --trajectories 5000 --out ";
  const auto out = kDir / "r.csv";
  REQUIRE(run(job + out.string()) == 0);
  const auto first = slurp(out), first_manifest = slurp(out.string() + ".manifest.json");
  REQUIRE(run(job + out.string()) == 0);
  CHECK(slurp(out) == first);
  CHECK(slurp(out.string() + ".manifest.json") == first_manifest);
  REQUIRE(run(job + out.string() + " --seed 6") == 0);
  CHECK(slurp(out) != first);
}
