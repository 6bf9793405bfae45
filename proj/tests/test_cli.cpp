// Runs the maxdet executable end to end.
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "maxdet/io.hpp"
#include "maxdet/linalg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("maxdet_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args, const std::string& env = "") {
  const auto err_path = scratch() / "stderr.txt";
  const std::string cmd = env + " '" MAXDET_CLI "' " + args + " 2>'" + err_path.string() + "'";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = maxdet::io::read_file(err_path);
  return r;
}

std::string write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  maxdet::io::write_file(p, text);
  return p.string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("lambert: three-point grid starts at the branch point") {
  const auto r = run("lambert --points 3");
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "x,w0,wm1,lower,upper,sandwich_ok");
  CHECK(rows[1] == "-0.36787944117144233,-1,-1,-1,-1,true");
}

TEST_CASE("lambert: no sandwich violations on a 10^4-point grid") {
  for (const char* spacing : {"linear", "log"}) {
    const auto r = run(std::string("lambert --points 10000 --spacing ") + spacing);
    REQUIRE(r.status == 0);
    const auto rows = lines(r.out);
    CHECK(rows.size() == 10001);
    CHECK(r.out.find(",false") == std::string::npos);
  }
}

TEST_CASE("lambert: empty range gives the header only") {
  const std::string header = "x,w0,wm1,lower,upper,sandwich_ok\n";
  CHECK(run("lambert --from -0.1 --to -0.2").out == header);
  CHECK(run("lambert --points 0").out == header);
}

TEST_CASE("lambert: JSON format and --out") {
  const auto path = (scratch() / "lambert.json").string();
  const auto r = run("--format json --out '" + path + "' lambert --points 5");
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  const auto doc = json::parse(maxdet::io::read_file(path));
  CHECK(doc.size() == 5);
  CHECK(doc[0]["w0"] == -1.0);
}

TEST_CASE("lambert: out-of-domain range") {
  const auto r = run("lambert --from -0.5 --to -0.1");
  CHECK(r.status != 0);
  const auto doc = json::parse(r.err);
  CHECK(doc["error"] == "OutOfDomain");
}

TEST_CASE("certify: identity with zero gap") {
  const auto xf = write("id.json", R"({"dim": 3, "rows": [[1,0,0],[0,1,0],[0,0,1]]})");
  const auto r = run("certify --xf '" + xf + "' --epsilon 0");
  REQUIRE(r.status == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["frobenius_bound"] == 0.0);
  CHECK(doc["vacuous"] == false);
  CHECK(doc["lambda_star"] == 0.0);
}

TEST_CASE("certify: non-SPD input is a structured error") {
  const auto xf = write("bad.json", R"({"dim": 2, "rows": [[1,2],[2,1]]})");
  const auto r = run("certify --xf '" + xf + "' --epsilon 0.1");
  CHECK(r.status != 0);
  CHECK(r.out.empty());
  const auto doc = json::parse(r.err);
  CHECK(doc["error"] == "NotPositiveDefinite");
}

TEST_CASE("certify: malformed and asymmetric files") {
  const auto broken = write("broken.json", "{\"dim\": 2, ");
  CHECK(json::parse(run("certify --xf '" + broken + "' --epsilon 0.1").err)["error"] == "ParseError");
  const auto skew = write("skew.json", R"({"dim": 2, "rows": [[1,0.2],[0.3,1]]})");
  CHECK(json::parse(run("certify --xf '" + skew + "' --epsilon 0.1").err)["error"] == "InvalidInput");
  const auto id = write("id2.json", R"({"dim": 2, "rows": [[1,0],[0,1]]})");
  CHECK(json::parse(run("certify --xf '" + id + "' --epsilon -1").err)["error"] == "InvalidGap");
  // Exactly one of --epsilon / --xstar.
  CHECK(run("certify --xf '" + id + "'").status != 0);
  CHECK(run("certify --xf '" + id + "' --epsilon 1 --xstar '" + id + "'").status != 0);
}

TEST_CASE("mvee + certify: the certificate covers the actual squared error of a ladder pair") {
  const auto pts = (scratch() / "pts.csv").string();
  const auto f = (scratch() / "xf.json").string();
  const auto star = (scratch() / "xstar.json").string();
  REQUIRE(run("--seed 3 --out '" + f + "' mvee --dim 5 --count 30 --delta 1e-2 --points-out '" + pts + "'").status == 0);
  REQUIRE(run("--out '" + star + "' mvee --points-file '" + pts + "' --delta 1e-8").status == 0);

  const auto r = run("certify --xf '" + f + "' --xstar '" + star + "'");
  REQUIRE(r.status == 0);
  const auto c = json::parse(r.out);
  const auto x_f = maxdet::io::load_matrix(f);
  const auto x_star = maxdet::io::load_matrix(star);
  const double err = maxdet::linalg::frobenius_norm(x_star - x_f);
  const double eps = json::parse(maxdet::io::read_file(star))["logdet_x"].get<double>() -
                     json::parse(maxdet::io::read_file(f))["logdet_x"].get<double>();
  CHECK(c["epsilon"].get<double>() == doctest::Approx(eps).epsilon(1e-9));
  CHECK(c["epsilon"].get<double>() > 0.0);
  CHECK(err * err <= c["frobenius_bound"].get<double>());
}

TEST_CASE("mvee: report JSON and input errors") {
  const auto cross = write("cross.csv", "2,0\n-2,0\n0,1\n0,-1\n");
  const auto r = run("mvee --points-file '" + cross + "' --delta 1e-8");
  REQUIRE(r.status == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["x"]["rows"][0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(doc["x"]["rows"][1][1].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(doc["converged"] == true);

  const auto line = write("line.csv", "0,0\n1,1\n2,2\n3,3\n");
  CHECK(json::parse(run("mvee --points-file '" + line + "'").err)["error"] == "DegeneratePoints");
  CHECK(json::parse(run("mvee --dim 4 --count 3").err)["error"] == "InvalidShape");
  CHECK(run("mvee").status != 0);
}

TEST_CASE("experiment: deterministic CSV and worker independence") {
  const auto a = run("--seed 11 experiment --dim 4 --count 20");
  const auto b = run("--seed 11 experiment --dim 4 --count 20", "MAXDET_CERTIFY_THREADS=4");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  const auto rows = lines(a.out);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == "delta,epsilon,normalized_error,bound_exact,bound_closed,holds");
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].ends_with(",true"));
  CHECK(rows[1].starts_with("1,"));
}

TEST_CASE("experiment: explicit ladder, points file and JSON output") {
  const auto cross = write("cross8.csv", "2,0\n-2,0\n0,1\n0,-1\n1,0.5\n-1,0.3\n0.5,-0.6\n-0.2,0.1\n");
  const auto r = run("--format json experiment --points-file '" + cross + "' --tolerances 1e-1,1e-8");
  REQUIRE(r.status == 0);
  const auto doc = json::parse(r.out);
  REQUIRE(doc["rows"].size() == 1);
  CHECK(doc["rows"][0]["holds"] == true);
  CHECK(doc["failure"].is_null());
}

TEST_CASE("experiment: shape errors before solving") {
  const auto r = run("experiment --dim 5 --count 4");
  CHECK(r.status != 0);
  CHECK(json::parse(r.err)["error"] == "InvalidShape");
  CHECK(json::parse(run("experiment --dim 2 --count 8 --tolerances 1e-8,1e-1").err)["error"] == "InvalidInput");
}
