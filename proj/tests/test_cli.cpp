#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relaxpath/commands.hpp"
#include "support.hpp"

using namespace relaxpath;
using namespace relaxpath::cli;
using doctest::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("relaxpath_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto file = workdir() / name;
  std::ofstream(file) << text;
  return file.string();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  const auto out = workdir() / "stdout.txt";
  const auto err = workdir() / "stderr.txt";
  const std::string cmd =
      std::string("\"") + RELAXPATH_TOOL + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_file(out.string()), io::read_file(err.string())};
}

const char* kToy =
    R"({"u": [0.5, 0.125, 0.083333333333333333], "q": [0.25, 0.33333333333333333, 0.027777777777777778],
        "m": [1, 2, 3], "r": [2, 1, 1]})";
const char* kPair = R"({"u": [0.5, 0.5], "q": [0.7, 0.3], "r": [2, 1]})";
const char* kThirds = R"({"u": [0.33333333333333333, 0.33333333333333333, 0.33333333333333333],
                         "q": [0.5, 0.3, 0.2]})";

}  // namespace

TEST_CASE("path command reproduces the toy table with every applicable tracker") {
  const auto in = write_temp("toy.json", kToy);
  for (const char* tracker : {"local", "sparse", "global", "auto"}) {
    const auto r = run(std::string("path --input ") + in + " --tracker " + tracker);
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["objective"] == "entropy");
    CHECK(doc["kappa"] == 4);
    const double nus[] = {4, 36. / 7, 12, 84};
    for (int k = 0; k < 4; ++k) CHECK(doc["breakpoints"][k]["nu"].get<double>() == Approx(nus[k]));
    CHECK(doc["breakpoints"][3]["transitions"][0]["j"] == 1);
    CHECK(doc["breakpoints"][3]["transitions"][0]["direction"] == "to_minus");
    CHECK(doc["nu_inf"].get<double>() == Approx(84));
  }
  CHECK(run(std::string("path --input ") + in + " --tracker uniform").code == 3);
  CHECK(run(std::string("path --input ") + in + " --objective squared --tracker sparse").code == 3);
}

TEST_CASE("path output round-trips and is deterministic") {
  const auto in = write_temp("toy.json", kToy);
  const auto file = (workdir() / "toy_path.json").string();
  REQUIRE(run("path --input " + in + " --out " + file).code == 0);
  const std::string text = io::read_file(file);
  const auto path = io::path_from_json(text);
  CHECK(io::path_to_json(path) == text);
  CHECK(testing::same_breakpoints(path, track_local(testing::toy()), 1e-12));
  CHECK(run("path --input " + in).out == text);
}

TEST_CASE("squared objective and infinite terminal values") {
  const auto in = write_temp("thirds.json", kThirds);
  auto r = run("path --input " + in + " --objective squared");
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["objective"] == "squared");
  CHECK(doc["kappa"] == 2);
  CHECK(doc["breakpoints"][1]["mu"].get<double>() == Approx(-1. / 3));
  CHECK(doc["nu_inf"] == "inf");

  r = run("solve --input " + in + " --objective squared --nu 8");
  REQUIRE(r.code == 0);
  doc = json::parse(r.out);
  CHECK(doc["p"][0].get<double>() == Approx(0.375));
  CHECK(doc["p"][1].get<double>() == Approx(0.3125));
  CHECK(doc["mu"].get<double>() == Approx(-1. / 6));
  CHECK(run("path --input " + in + " --tracker uniform").code == 0);
}

TEST_CASE("solve command") {
  const auto in = write_temp("toy.json", kToy);
  const auto r = run("solve --input " + in + " --nu 8");
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["mu"].get<double>() == Approx(20. / 3));
  CHECK(doc["Z"].get<double>() == Approx(1.2));
  CHECK(doc["p"][0].get<double>() == Approx(3. / 8));
  CHECK(doc["alpha"][1].get<double>() == Approx(std::log(2.0)));
  CHECK(doc["partition"] == json::array({1, -1, 0}));

  CHECK(run("solve --input " + in + " --nu 0").code == 2);
  CHECK(run("solve --input " + in + " --nu -3").code == 2);
  const auto tiny = write_temp("tiny.json", R"({"u": [1, 1e-20], "q": [0.5, 0.5]})");
  const auto bad = run("solve --input " + tiny + " --nu 1");
  CHECK(bad.code == 4);
  CHECK(bad.err.find("error") != std::string::npos);
}

TEST_CASE("coordinate weights") {
  const auto in = write_temp("delta.json", R"({"u": [0.5, 0.5], "q": [0.7, 0.3], "delta": [0.5, 0.5]})");
  const auto r = run("solve --input " + in + " --nu 4");
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  double total = 0;
  for (const auto& x : doc["p_original"]) total += x.get<double>();
  CHECK(total == Approx(1));
  const auto both = write_temp("both.json", R"({"u": [0.5, 0.5], "q": [0.7, 0.3], "m": [1, 1], "delta": [1, 1]})");
  CHECK(run("solve --input " + both + " --nu 4").code == 2);
}

TEST_CASE("select command") {
  const auto in = write_temp("pair.json", kPair);
  const auto r = run("select --input " + in);
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  REQUIRE(doc["rows"].size() == 2);
  CHECK(doc["rows"][0]["support"] == 0);
  CHECK(doc["rows"][1]["support"] == 2);
  CHECK(doc["rows"][1]["nu_star"].get<double>() == Approx(30));
  CHECK(doc["rows"][1]["loss_star"].get<double>() == Approx(3 * std::log(3.0) - 2 * std::log(2.0)));
  CHECK(doc["rows"][1]["open_infimum"] == false);

  const auto pathfile = (workdir() / "pair_path.json").string();
  REQUIRE(run("path --input " + in + " --out " + pathfile).code == 0);
  CHECK(run("select --input " + in + " --path " + pathfile).out == r.out);

  const auto nor = write_temp("nor.json", kThirds);
  CHECK(run("select --input " + nor).code == 2);
  CHECK(run("select --input " + in + " --lambda-min 2").code == 2);
}

TEST_CASE("cascade command") {
  const auto in = write_temp("cascade.json", R"({"u": [0.5, 0.125, 0.083333333333333333], "m": [1, 2, 3],
      "stages": [{"q": [0.25, 0.33333333333333333, 0.027777777777777778], "nu": 8},
                 {"q": [0.1, 0.3, 0.1], "nu": 5},
                 {"q": [0.4, 0.1, 0.13333333333333333], "nu": 20}]})");
  const auto r = run("cascade --input " + in);
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  REQUIRE(doc["stages"].size() == 3);
  CHECK(doc["stages"][0]["Z"].get<double>() == Approx(1.2));
  CHECK(doc["stages"][0]["support"] == 2);
  CHECK(doc["max_abs_difference"].get<double>() < 1e-9);
}

TEST_CASE("sweep command is seeded and deterministic") {
  const std::string args = "sweep --n 300 --samples 75,150,300 --repeats 2 --seed 7";
  const auto a = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == run(args).out);
  CHECK(a.out.rfind("# generator=mt19937_64", 0) == 0);
  CHECK(a.out.find("sample_size,mean_kappa,kappa_over_n\n") != std::string::npos);
  std::istringstream lines(a.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) ++rows;
  CHECK(rows == 3);
  CHECK(run("sweep --n 300 --samples 75 --repeats 2 --seed 8").out != run("sweep --n 300 --samples 75 --repeats 2 --seed 7").out);
  CHECK(run("sweep --n 300 --samples 0").code == 2);
}

TEST_CASE("argument and input errors exit with 2") {
  const auto in = write_temp("toy.json", kToy);
  CHECK(run("path --input " + in + " --tracker bogus").code == 2);
  CHECK(run("path").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("path --input /nonexistent/file.json").code == 2);
  const auto unnormalized = write_temp("bad.json", R"({"u": [0.6, 0.5], "q": [0.5, 0.5]})");
  CHECK(run("path --input " + unnormalized).code == 2);
  const auto garbage = write_temp("garbage.json", "{ not json");
  CHECK(run("path --input " + garbage).code == 2);
  const auto uniform = write_temp("uniform_bad.json", kPair);
  CHECK(run("path --input " + uniform + " --tracker uniform").code == 0);
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code(Errc::NotNormalized) == 2);
  CHECK(exit_code(Errc::InvalidNu) == 2);
  CHECK(exit_code(Errc::NonUniformPrior) == 3);
  CHECK(exit_code(Errc::IncompatibleTracker) == 3);
  CHECK(exit_code(Errc::ZeroPrimal) == 4);
  CHECK(exit_code(Errc::ZeroProbability) == 5);
}

TEST_CASE("numbers carry 17 significant digits") {
  CHECK(io::format_number(36. / 7) == "5.1428571428571432");
  CHECK(io::format_number(0.1) == "0.10000000000000001");
  CHECK(io::format_number(4) == "4");
  CHECK(io::format_number(std::numeric_limits<double>::infinity()) == "\"inf\"");
}
