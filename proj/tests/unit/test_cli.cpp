#include <doctest.h>

#include <cstdlib>

#include "cstar/cli.hpp"
#include "support.hpp"

using cstar::cli::run;

namespace {

const std::string kExp = "n=0; g=1z; h=-1w";

int run_in(const std::filesystem::path& dir, std::vector<std::string> args) {
  args.insert(args.begin(), "cstar");
  args.push_back("--out-dir");
  args.push_back(dir.string());
  return run(args);
}

std::string manifest_value(const std::filesystem::path& manifest, const std::string& key) {
  std::istringstream in(testing::slurp(manifest));
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  }
  return {};
}

}  // namespace

TEST_CASE("cli usage errors exit 1") {
  CHECK(run({"cstar"}) == 1);
  CHECK(run({"cstar", "explode"}) == 1);
  CHECK(run({"cstar", "modulus", "--radii", "2"}) == 1);                  // no map
  CHECK(run({"cstar", "modulus", "--map", "n=0; g=1", "--radii", "2"}) == 1);
  CHECK(run({"cstar", "modulus", "--map", kExp, "--radii", "2", "--log-r", "1"}) == 1);
  CHECK(run({"cstar", "construct", "--map", kExp, "--itinerary", "1,2", "--eps", "0.3", "--delta", "5"}) == 1);
  CHECK(run({"cstar", "render", "--map", kExp, "--width", "x"}) == 1);
}

TEST_CASE("cli verify-lemmas example") {
  const auto dir = testing::scratch_dir("verify");
  CHECK(run_in(dir, {"verify-lemmas", "--map", kExp, "--radii", "2,4,8", "--k", "2"}) == 0);
  const std::string report = testing::slurp(dir / "verify-lemmas.json");
  CHECK(report.find("\"power_M\"") != std::string::npos);
  CHECK(report.find("\"passed\": true") != std::string::npos);
  CHECK(run_in(dir, {"verify-lemmas", "--map", kExp, "--relaxed-log-r", "0.1", "--relaxed-eps", "0.1"}) == 3);
}

TEST_CASE("cli modulus output and horizon exit code") {
  const auto dir = testing::scratch_dir("modulus");
  CHECK(run_in(dir, {"modulus", "--map", kExp, "--radii", "2"}) == 0);
  const std::string csv = testing::slurp(dir / "modulus.csv");
  CHECK(csv.rfind("log_r,log_M,theta_max,log_m,theta_min,n_probes\n", 0) == 0);
  CHECK(csv.find(",1.5,") != std::string::npos);
  const std::string hash = manifest_value(dir / "modulus.manifest", "sha256.modulus.csv");
  CHECK(hash == cstar::cli::sha256_hex(csv));
  CHECK(run_in(dir, {"modulus", "--map", kExp, "--log-r", "400"}) == 4);
  CHECK(run_in(dir, {"modulus", "--map", kExp, "--log-r", "400", "--eps", "0.1"}) == 0);
}

TEST_CASE("sha256 reference digests") {
  CHECK(cstar::cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(cstar::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cli config file: flags override, manifests reproduce") {
  const auto dir = testing::scratch_dir("config");
  {
    std::ofstream cfg(dir / "render.cfg");
    cfg << "# small window\nmap = \"" << kExp << "\"\nwidth = 12\nheight = 10  # rows\nbudget = 16\n";
  }
  CHECK(run_in(dir / "a", {"render", "--config", (dir / "render.cfg").string(), "--width", "14"}) == 0);
  CHECK(manifest_value(dir / "a" / "render.manifest", "width") == "14");
  CHECK(manifest_value(dir / "a" / "render.manifest", "height") == "10");
  CHECK(manifest_value(dir / "a" / "render.manifest", "budget") == "16");

  // Re-running from the manifest alone gives the same bytes.
  CHECK(run_in(dir / "b", {"render", "--config", (dir / "a" / "render.manifest").string()}) == 0);
  CHECK(testing::slurp(dir / "a" / "render.ppm") == testing::slurp(dir / "b" / "render.ppm"));
  CHECK(testing::slurp(dir / "a" / "render.manifest") == testing::slurp(dir / "b" / "render.manifest"));

  std::ofstream(dir / "bad.cfg") << "map = " << kExp << "\nzoom = 3\n";
  CHECK(run_in(dir / "c", {"render", "--config", (dir / "bad.cfg").string()}) == 1);
  std::ofstream(dir / "dup.cfg") << "map = " << kExp << "\nwidth = 3\nwidth = 4\n";
  CHECK(run_in(dir / "c", {"render", "--config", (dir / "dup.cfg").string()}) == 1);
  std::ofstream(dir / "both.cfg") << "map = " << kExp << "\nitinerary = 1,2\neps = 0.3\ndelta = 5\n";
  CHECK(run_in(dir / "c", {"construct", "--config", (dir / "both.cfg").string()}) == 1);
  // A flag for one of an exclusive pair silences the file's other half.
  CHECK(run_in(dir / "d", {"construct", "--config", (dir / "both.cfg").string(), "--eps", "0.36787944117144233",
                           "--oracle-targets", "2"}) == 0);
  std::ofstream(dir / "wrong.cfg") << "subcommand = render\nmap = " << kExp << "\n";
  CHECK(run_in(dir / "c", {"modulus", "--config", (dir / "wrong.cfg").string(), "--radii", "2"}) == 1);
}

TEST_CASE("cli threads fall back to CSTAR_THREADS") {
  const auto dir = testing::scratch_dir("threads");
  setenv("CSTAR_THREADS", "3", 1);
  CHECK(run_in(dir, {"render", "--map", kExp, "--width", "8", "--height", "8"}) == 0);
  unsetenv("CSTAR_THREADS");
  CHECK(manifest_value(dir / "render.manifest", "threads") == "3");
  CHECK(run_in(dir, {"render", "--map", kExp, "--width", "8", "--height", "8", "--threads", "0"}) == 1);
}

TEST_CASE("cli construct and classify") {
  const auto dir = testing::scratch_dir("construct");
  CHECK(run_in(dir, {"construct", "--map", kExp, "--itinerary", "1,2,3", "--oracle-targets", "4"}) == 0);
  const std::string report = testing::slurp(dir / "construct.json");
  CHECK(report.find("\"verified_depth\": 2") != std::string::npos);
  CHECK(manifest_value(dir / "construct.manifest", "log-r-plus") != "auto");
  CHECK(run_in(dir, {"construct", "--map", kExp, "--itinerary", "0,1"}) == 2);
  CHECK(run_in(dir, {"construct", "--map", "arnold(0,2)", "--itinerary", "1,2,3", "--depth", "3"}) == 0);

  std::ofstream(dir / "seeds.csv") << "L,theta\n1,0\n1,3.141592653589793\n";
  CHECK(run_in(dir, {"classify", "--map", kExp, "--input", (dir / "seeds.csv").string()}) == 0);
  const std::string csv = testing::slurp(dir / "classify.csv");
  CHECK(csv.find("1,0,escapes_to_infinity,") != std::string::npos);
  CHECK(csv.find("escapes_to_zero") != std::string::npos);
}
