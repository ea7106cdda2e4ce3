#include "cli.hpp"
#include "manifest.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lrcast::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lrcast_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("solve prints V(0,0) and writes the table") {
  const auto r = invoke({"solve", "--file-size", "1", "--window", "1", "--p", "0.5"});
  CHECK(r.code == kOk);
  CHECK(r.out == "V(0,0) = 2.666666667\n");

  const auto path = scratch("solve.csv");
  const auto r2 = invoke({"solve", "--file-size", "12", "--window", "4", "--p", "0.5", "--out", path.string()});
  CHECK(r2.code == kOk);
  const auto csv = slurp(path);
  CHECK(csv.rfind("x0,x1,value,action\n", 0) == 0);
  CHECK(csv.find("\n10,12,4,0\n") != std::string::npos);
  CHECK(std::filesystem::exists(manifest_path_for(path.string())));
}

TEST_CASE("configuration errors exit with status 2") {
  const auto r = invoke({"solve", "--file-size", "10", "--window", "3", "--p", "0.5"});
  CHECK(r.code == kUsageError);
  CHECK(r.err.find("does not divide") != std::string::npos);
  CHECK(invoke({"solve", "--p", "0"}).code == kUsageError);
  CHECK(invoke({"simulate", "--policy", "fifo"}).code == kUsageError);
  CHECK(invoke({"simulate", "--mode", "turbo", "--trials", "4"}).code == kUsageError);
  CHECK(invoke({"bogus"}).code == kUsageError);
  CHECK(invoke({}).code == kUsageError);
  CHECK(invoke({"--help"}).code == kOk);
}

TEST_CASE("check-lr over a grid") {
  const auto path = scratch("check.csv");
  const auto r = invoke({"check-lr", "--file-size", "8,12", "--window", "2,4,12", "--p", "0.1,0.9", "--out",
                         path.string()});
  // K=12 does not divide F=8: reported, not fatal.
  CHECK(r.code == kUsageError);
  CHECK(r.err.find("skipped") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("F=12 K=12 p=0.1: PASS (no decision states)") != std::string::npos);
  const auto csv = slurp(path);
  CHECK(csv.find("8,12,0.1,config,0,0,0,error") != std::string::npos);
  CHECK(csv.find(",fail\n") == std::string::npos);

  CHECK(invoke({"check-lr", "--file-size", "12", "--window", "4", "--p", "0.5"}).code == kOk);
}

TEST_CASE("oracle command") {
  auto r = invoke({"oracle", "--file-size", "4", "--window", "2", "--p", "0.5"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("256 policies; LR optimal") != std::string::npos);

  r = invoke({"oracle", "--file-size", "2", "--window", "1", "--p", "0.5"});
  CHECK(r.out.find("4 policies; LR optimal") != std::string::npos);

  r = invoke({"oracle", "--file-size", "100", "--window", "2", "--p", "0.5"});
  CHECK(r.code == kUsageError);
  CHECK(r.err.find("9800 decision states") != std::string::npos);
  CHECK(r.err.find("1048576") != std::string::npos);
}

TEST_CASE("simulate and sweep emit the stats CSV") {
  auto r = invoke({"simulate", "--policy", "lr,rs", "--N", "2", "--file-size", "12", "--window", "4", "--p",
                   "0.5", "--trials", "200", "--seed", "42", "--threads", "2"});
  CHECK(r.code == kOk);
  CHECK(r.out.rfind("policy,N,F,K,p,n_trials,mean_slots,stddev,ci95_half_width\nlr,2,12,4,0.5,200,", 0) == 0);
  CHECK(r.out.find("\nrs,2,12,4,0.5,200,") != std::string::npos);

  r = invoke({"sweep", "--policies", "lr,rrnc,rs", "--N", "3", "--file-size", "30", "--p", "0.6", "--windows",
              "5,30,7", "--trials", "50"});
  CHECK(r.code == kUsageError);  // K=7 skipped
  CHECK(r.err.find("K=7") != std::string::npos);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> whole_file;
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    if (line.find(",3,30,30,") != std::string::npos) whole_file.push_back(line.substr(line.find(',')));
  }
  CHECK(rows == 7);
  REQUIRE(whole_file.size() == 3);
  CHECK(whole_file[0] == whole_file[1]);
  CHECK(whole_file[0] == whole_file[2]);
}

TEST_CASE("codec-validate") {
  auto r = invoke({"codec-validate", "--window", "4", "--payload", "8", "--batches", "500"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("round_trip_success=1.000000") != std::string::npos);
  r = invoke({"codec-validate", "--batches", "0"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("batches=0") != std::string::npos);
  CHECK(invoke({"codec-validate", "--window", "0"}).code == kUsageError);
}

TEST_CASE("manifests replay to byte-identical output") {
  const auto first = scratch("sim.csv");
  const auto second = scratch("sim_replayed.csv");
  std::filesystem::remove(second);
  REQUIRE(invoke({"simulate", "--policy", "lr,rrnc,rs", "--N", "3", "--file-size", "24", "--window", "4",
                  "--trials", "100", "--seed", "9", "--mode", "codec", "--out", first.string()})
              .code == kOk);
  const auto manifest_path = manifest_path_for(first.string());
  const auto r = invoke({"replay", "--manifest", manifest_path, "--out", second.string()});
  CHECK(r.code == kOk);
  CHECK(slurp(first) == slurp(second));

  std::ifstream in(manifest_path);
  const auto m = RunManifest::read(in);
  CHECK(m.command == "simulate");
  CHECK(m.tool_version == kToolVersion);
  CHECK(m.params.at("mode") == "codec");
  CHECK(m.params.at("seed") == "9");

  const auto sweep_out = scratch("sweep.csv");
  const auto sweep_replay = scratch("sweep_replayed.csv");
  REQUIRE(invoke({"sweep", "--N", "3", "--file-size", "20", "--windows", "5,10,20", "--trials", "20", "--out",
                  sweep_out.string()})
              .code == kOk);
  CHECK(invoke({"replay", "--manifest", manifest_path_for(sweep_out.string()), "--out", sweep_replay.string()})
            .code == kOk);
  CHECK(slurp(sweep_out) == slurp(sweep_replay));
}

TEST_CASE("manifest parsing") {
  RunManifest m{"solve", kToolVersion, {{"file-size", "12"}, {"p", "0.5"}}};
  std::stringstream s;
  m.write(s);
  const auto back = RunManifest::read(s);
  CHECK(back.command == "solve");
  CHECK(back.params == m.params);
  CHECK(back.to_args() == std::vector<std::string>{"solve", "--file-size", "12", "--p", "0.5"});

  std::istringstream broken("command=solve\nthis line is wrong\n");
  CHECK_THROWS(RunManifest::read(broken));
  std::istringstream nameless("p=0.5\n");
  CHECK_THROWS(RunManifest::read(nameless));
  CHECK(invoke({"replay", "--manifest", "/nonexistent/file"}).code == kUsageError);
}
