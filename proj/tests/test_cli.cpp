#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qmi/cli.hpp"
#include "qmi/io.hpp"
#include "support.hpp"

using namespace qmi;
using qmi::io::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& command, const std::string& text, cli::JobConfig job = {}) {
  job.command = command;
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_text(job, text, "cfg.json", out, err);
  return {code, out.str(), err.str()};
}

Run run_args(std::vector<std::string> args) {
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kMutual = R"({"state":{"diagonal":[0.7,0.3]},"channel":{"kind":"identity","dim":2}})";

}  // namespace

TEST_CASE("sha256_hex matches the FIPS test vector") {
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("mutual report") {
  const auto r = run("mutual", kMutual);
  REQUIRE(r.code == cli::kOk);
  const Json j = Json::parse(r.out);
  CHECK(std::abs(j["result"]["value"].get<double>() - 0.610864) < 1e-6);
  // Independent arithmetic: -0.7 ln 0.7 - 0.3 ln 0.3.
  CHECK(j["result"]["value"].get<double>() == doctest::Approx(-0.7 * std::log(0.7) - 0.3 * std::log(0.3)).epsilon(1e-12));
  CHECK(j["input_hash"] == cli::sha256_hex(kMutual));
  CHECK(j["seed"] == 1234);
  CHECK(j["converged"] == true);
  CHECK(j["budget"]["restarts"].is_number());
  CHECK(j["units"] == "nats");
}

TEST_CASE("seed precedence") {
  CHECK(Json::parse(run("mutual", R"({"seed":9,"state":{"diagonal":[0.7,0.3]},"channel":{"kind":"identity","dim":2}})").out)["seed"] == 9);
  cli::JobConfig job;
  job.seed = 42;
  const Json j = Json::parse(run("mutual", kMutual, job).out);
  CHECK(j["seed"] == 42);
  CHECK(j["budget"]["seed"] == 42);
}

TEST_CASE("entropy units and csv") {
  const auto nats = run("entropy", R"({"state":{"maximally_mixed":2}})");
  CHECK(Json::parse(nats.out)["result"]["nats"].get<double>() == doctest::Approx(std::numbers::ln2).epsilon(1e-14));
  cli::JobConfig job;
  job.bits = true;
  const auto bits = run("entropy", R"({"state":{"maximally_mixed":2}})", job);
  CHECK(Json::parse(bits.out)["result"]["bits"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
  job.csv = true;
  const auto csv = run("entropy", R"({"state":{"maximally_mixed":4}})", job);
  CHECK(csv.out.rfind("key,value\n", 0) == 0);
  CHECK(csv.out.find("result.bits,2.0") != std::string::npos);
}

TEST_CASE("infinity is the string inf") {
  const auto r = run("relent", R"({"rho":{"diagonal":[1,0]},"sigma":{"diagonal":[0,1]}})");
  REQUIRE(r.code == cli::kOk);
  CHECK(Json::parse(r.out)["result"]["nats"] == "inf");
}

TEST_CASE("parse failures exit 1 with a position") {
  const auto r = run("entropy", "{\n  \"state\": {\"diagonal\": [0.5, 0.5]\n,,}");
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(r.err.find("cfg.json") != std::string::npos);
  CHECK(r.out.empty());

  const auto missing = run("mutual", R"({"state":{"maximally_mixed":2}})");
  CHECK(missing.code == cli::kUsage);
  CHECK(missing.err.find("channel") != std::string::npos);

  CHECK(run("entropy", R"({"state":{"diagonal":[0.5,0.6]}})").code == cli::kUsage);
  CHECK(run("mutual", R"({"state":{"maximally_mixed":3},"channel":{"kind":"identity","dim":2}})").code == cli::kUsage);
  CHECK(run("entropy", "[1, 2]").code == cli::kUsage);
  CHECK(run("entropy", R"({"state":{"rows":2,"cols":2,"data":[1,2,3]}})").code == cli::kUsage);
}

TEST_CASE("non-convergence is reported, not an error") {
  const auto r = run("mutual",
                     R"({"state":{"maximally_mixed":2},"channel":{"kind":"amplitude_damping","gamma":0.3},)"
                     R"("budget":{"restarts":1,"max_evals":5}})");
  REQUIRE(r.code == cli::kOk);
  CHECK(Json::parse(r.out)["converged"] == false);
}

TEST_CASE("identical config and seed give identical bytes") {
  const std::string cfg =
      R"({"state":{"maximally_mixed":2},"channel":{"kind":"depolarizing","dim":2,"p":0.2},"n_components":3,)"
      R"("budget":{"restarts":3,"max_evals":200}})";
  const auto a = run("pseudo-mutual", cfg);
  const auto b = run("pseudo-mutual", cfg);
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
}

TEST_CASE("every command runs on a small problem") {
  const std::string qubit_channel = R"("channel":{"kind":"amplitude_damping","gamma":0.2})";
  const std::string small = R"("budget":{"restarts":2,"max_evals":150})";
  const std::pair<const char*, std::string> jobs[] = {
      {"holevo", R"({"lambda":[0.5,0.5],"coding":[{"pure":[1,0]},{"pure":[1,1]}],)" + qubit_channel + "}"},
      {"capacity", "{" + qubit_channel + "," + small + R"(,"family":{"kind":"rank","rank":1}})"},
      {"cqc", R"({"lambda":[0.5,0.5],"coding":[{"pure":[1,0]},{"pure":[0,1]}],"decoding":{"kind":"computational","dim":2},)" +
                  qubit_channel + "," + small + "}"},
      {"entangle", R"({"sigma":{"diagonal":[0.5,0.5]}})"},
      {"qdc", R"({"state":{"diagonal":[0.6,0.4]},)" + qubit_channel + "," + small + "}"},
      {"verify", R"({"suites":["operator-core","cli"]})"},
  };
  for (const auto& [command, cfg] : jobs) {
    CAPTURE(command);
    const auto r = run(command, cfg);
    CHECK(r.code == cli::kOk);
    CHECK(Json::parse(r.out)["command"] == command);
  }
  const Json bell = Json::parse(run("entangle", R"({"sigma":{"diagonal":[0.5,0.5]}})").out);
  CHECK(bell["result"]["classification"]["class"] == "q");
  CHECK(bell["result"]["mutual_entropy"].get<double>() == doctest::Approx(2 * std::numbers::ln2));
  CHECK(run("verify", R"({"suites":["nope"]})").code == cli::kUsage);
}

TEST_CASE("command line") {
  CHECK(run_args({"qmi", "nope", "--config", "x.json"}).code == cli::kUsage);
  CHECK(run_args({"qmi", "entropy"}).code == cli::kUsage);
  CHECK(run_args({"qmi", "entropy", "--config", "/nonexistent/file.json"}).code == cli::kUsage);
  CHECK(run_args({"qmi", "--help"}).code == cli::kOk);

  const std::string in = "test_cli_input.json";
  const std::string out = "test_cli_output.json";
  std::ofstream(in) << kMutual;
  const auto r = run_args({"qmi", "mutual", "--config", in, "--seed", "77", "--out", out});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.empty());
  std::ifstream f(out);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(Json::parse(buf.str())["seed"] == 77);
  std::remove(in.c_str());
  std::remove(out.c_str());
}

TEST_CASE("io round trips") {
  Rng rng = derived_rng(31, 0);
  const ComplexMatrix m = random_ginibre(3, 2, rng);
  CHECK(testing::frob(io::matrix_from_json(io::matrix_to_json(m)), m) == 0.0);
  const auto ch = io::channel_from_json(Json::parse(R"({"kind":"kraus","ops":[
      {"rows":2,"cols":2,"data":[1,0,0,0]}, {"rows":2,"cols":2,"data":[0,0,0,1]}]})"));
  CHECK(ch.in_dim() == 2);
  CHECK(ch.trace_preservation_defect() < 1e-15);
  CHECK_THROWS_AS(io::channel_from_json(Json::parse(R"({"kind":"kraus","ops":[{"rows":2,"cols":2,"data":[1,0,0,0]}]})")),
                  io::ParseError);
  const auto cmp = io::compound_from_json(Json::parse(R"({"d_G":2,"d_K":1,"theta":{"diagonal":[0.5,0.5]}})"));
  CHECK(cmp.d_g == 2);
  CHECK_THROWS_AS(io::compound_from_json(Json::parse(R"({"d_G":2,"d_K":2,"theta":{"diagonal":[0.5,0.5]}})")),
                  io::ParseError);
  CHECK(io::entropy_to_json(EntropyValue::infinity()) == "inf");
}
