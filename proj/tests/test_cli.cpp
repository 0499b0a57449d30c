#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("mvnabs_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout";
  const auto err = scratch() / "stderr";
  const std::string cmd = std::string(MVN_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = mvn::read_text_file(out);
  r.err = mvn::read_text_file(err);
  return r;
}

std::string fx(const std::string& file) { return support::fixture(file); }

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_CASE("check exit codes") {
  auto r = run("check " + fx("apl2.mvn") + " " + fx("pl2.mvn") + " " + fx("cro.map"));
  CHECK(r.code == 0);
  CHECK(r.out.find("APL2 is an asynchronous abstraction of PL2") != std::string::npos);

  const auto dir = scratch() / "cands";
  r = run("candidates " + fx("mtrp.mvn") + " " + fx("trp.map") + " --out-dir " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("4 candidate(s), 2 ambiguous row(s)", 0) == 0);
  REQUIRE(fs::exists(dir / "MTRP_cand3.mvn"));
  CHECK(mvn::read_text_file(dir / "MTRP_cand3.mvn").rfind("# candidate 3 of MTRP", 0) == 0);

  r = run("check " + (dir / "MTRP_cand0.mvn").string() + " " + fx("mtrp.mvn") + " " + fx("trp.map"));
  CHECK(r.code == 0);
  r = run("check " + (dir / "MTRP_cand3.mvn").string() + " " + fx("mtrp.mvn") + " " + fx("trp.map") + " --witness");
  CHECK(r.code == 1);
  CHECK(r.out.find("no step term survives") != std::string::npos);
  CHECK(r.out.find("point-attractor-escapes") != std::string::npos);
}

TEST_CASE("oracle-check exit codes") {
  CHECK(run("oracle-check " + fx("apl2.mvn") + " " + fx("pl2.mvn") + " " + fx("cro.map")).code == 0);
  const auto dir = scratch() / "cands";
  run("candidates " + fx("mtrp.mvn") + " " + fx("trp.map") + " --out-dir " + dir.string());
  CHECK(run("oracle-check " + (dir / "MTRP_cand1.mvn").string() + " " + fx("mtrp.mvn") + " " + fx("trp.map")).code == 1);
  auto r = run("oracle-check " + (dir / "MTRP_cand2.mvn").string() + " " + fx("mtrp.mvn") + " " + fx("trp.map"));
  CHECK(r.code == 2);
  CHECK(r.err.find("infinitely many") != std::string::npos);
  CHECK(lines(r.err) == 1);
}

TEST_CASE("input errors exit 2 with one line") {
  const auto bad = scratch() / "bad.mvn";
  {
    std::ofstream(bad) << "mvn Bad\nentity A : 0..1\nneighbourhood A = [A]\ntable A:\n  0 -> 1\n";
  }
  for (const std::string& args : {"validate " + bad.string(), "check " + bad.string() + " " + fx("pl2.mvn") + " " + fx("cro.map"),
                                 std::string("validate /nonexistent/x.mvn"), std::string("frobnicate"),
                                 std::string("check only-one-arg"), "graph " + fx("pl2.mvn") + " --semantics both",
                                 "check " + fx("pl2.mvn") + " " + fx("pl2.mvn") + " " + fx("cro.map")}) {
    CAPTURE(args);
    auto r = run(args);
    CHECK(r.code == 2);
    CHECK(lines(r.err) == 1);
  }
  auto r = run("validate " + bad.string());
  CHECK(r.out.find("missing row") != std::string::npos);
  CHECK(run("--help").code == 0);
}

TEST_CASE("traces of an infinite model") {
  const auto osc = scratch() / "osc.mvn";
  {
    std::ofstream(osc) << "mvn Osc\nentity A : 0..1\nentity B : 0..1\nneighbourhood A = [A]\nneighbourhood B = [B]\n"
                          "table A:\n  0 -> 1\n  1 -> 0\ntable B:\n  0 -> 1\n  1 -> 0\n";
  }
  auto r = run("traces " + osc.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("infinite") != std::string::npos);
  CHECK(run("traces " + osc.string() + " --semantics sync").code == 0);
}

TEST_CASE("graph, attractors and traces output") {
  auto r = run("graph " + fx("pl2.mvn"));
  CHECK(r.code == 0);
  CHECK(lines(r.out) == 8);
  CHECK(r.out.find("12 -> 02\n") != std::string::npos);

  const auto dot = scratch() / "pl2.dot";
  CHECK(run("graph " + fx("pl2.mvn") + " --semantics sync --dot " + dot.string()).code == 0);
  const auto text = mvn::read_text_file(dot);
  CHECK(text.rfind("digraph \"PL2\" {", 0) == 0);
  CHECK(text.find("\"10\" -> \"10\";") != std::string::npos);

  r = run("attractors " + fx("mtrp.mvn"));
  CHECK(r.out == "scc 0000 0001 1000 1001\npoint 0011\npoint 0122\n");
  r = run("--labels attractors " + fx("pl2.mvn") + " --semantics sync");
  CHECK(r.out.find("cycle CI=0,Cro=0 CI=1,Cro=1") != std::string::npos);

  r = run("traces " + fx("pl2.mvn"));
  CHECK(lines(r.out) == 10);
  CHECK(r.out.find("12 11 (01 02)^w\n") != std::string::npos);

  r = run("abstract " + fx("pl2.mvn") + " " + fx("cro.map") + " --traces");
  CHECK(r.out == "00 01\n00 10\n01\n10\n11 01\n11 10\n");
  r = run("abstract " + fx("pl2.mvn") + " " + fx("cro.map") + " --states");
  CHECK(r.out.find("02 -> 01\n") != std::string::npos);
}

TEST_CASE("json output is stable") {
  const std::string check = "check " + fx("atrp.mvn") + " " + fx("mtrp.mvn") + " " + fx("trp.map") + " --json";
  auto a = run(check);
  auto b = run(check);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["holds"] == true);
  CHECK(j["rule"] == "stuck-run");
  CHECK(j["witness"].is_null());
  CHECK(j["statistics"]["concrete_states"] == 36);
  CHECK(j["surviving"]["0000"]["count"] == 1);

  auto t = nlohmann::json::parse(run("traces " + fx("pl2.mvn") + " --json").out);
  CHECK(t["count"] == 10);
  CHECK(t["traces"][0].contains("prefix"));

  auto at = nlohmann::json::parse(run("attractors " + fx("pl2.mvn") + " --json").out);
  CHECK(at["semantics"] == "async");
  CHECK(at["attractors"].size() == 2);

  auto f = run("fuzz --seed 5 --count 60 --json");
  CHECK(f.code == 0);
  auto fj = nlohmann::json::parse(f.out);
  CHECK(fj["divergences"].empty());
  CHECK(fj["count"] == 60);
}

TEST_CASE("closed-class flag") {
  auto r = run("check " + fx("atrp.mvn") + " " + fx("mtrp.mvn") + " " + fx("trp.map") + " --closed-class --json");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["rule"] == "closed-class");
}
