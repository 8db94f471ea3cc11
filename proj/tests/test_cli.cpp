#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "ldpkit/format.hpp"
#include "ldpkit/path.hpp"

using namespace ldp;

namespace {
struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / ("ldpkit_test_" + name);
  std::ofstream(p) << content;
  return p;
}
}  // namespace

TEST_CASE("rate: Gaussian row") {
  const Run r = run({"rate", "--model", "gaussian:mu=0,sigma=1", "--kernel", "affine:0,1", "--x", "1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "x,i_f_conjugate,i_f_explicit,branch,lambda_star");
  const auto cells = split(ls[1], ',');
  REQUIRE(cells.size() == 5);
  CHECK(parse_double(cells[1]) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(parse_double(cells[2]) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(cells[3] == "interior");
  CHECK(parse_double(cells[4]) == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("rate: mean of cexp and several x values") {
  const Run r = run({"rate", "--model", "cexp", "--kernel", "const:1", "--x", "0,-1.5"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  CHECK(std::abs(parse_double(split(ls[1], ',')[1])) < 1e-12);
  CHECK(split(ls[2], ',')[1] == "inf");
}

TEST_CASE("csv and json carry the same numbers") {
  const std::vector<std::string> base{"rate", "--model", "synthetic-boundary", "--kernel", "affine:0,1", "--x", "0.1,1"};
  const Run c = run(base);
  auto args = base;
  args.insert(args.end(), {"--format", "json"});
  const Run j = run(args);
  REQUIRE(c.code == 0);
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  const auto ls = lines(c.out);
  REQUIRE(doc.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto cells = split(ls[i + 1], ',');
    CHECK(parse_double(cells[1]) == doctest::Approx(doc[i]["i_f_conjugate"].get<double>()).epsilon(1e-12));
    CHECK(parse_double(cells[2]) == doctest::Approx(doc[i]["i_f_explicit"].get<double>()).epsilon(1e-12));
    CHECK(cells[3] == doc[i]["branch"].get<std::string>());
  }
  CHECK(doc[1]["branch"] == "singular_plus");
}

TEST_CASE("metric rhostar on the indicator pair") {
  const auto a = temp_file("zero.txt", to_text(CadlagPath(1)));
  const auto b = temp_file("ind.txt", to_text(CadlagPath::scalar({0.0, 1.0}, {0.0}, {{0.5, 1.0}})));
  const Run r = run({"metric", "rhostar", a.string(), b.string()});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(1) == "rhostar,1.5");
}

TEST_CASE("minimizer output re-parses and matches idcost") {
  const auto out = std::filesystem::temp_directory_path() / "ldpkit_test_min.json";
  Run r = run({"minimizer", "--model", "gaussian:mu=0,sigma=1", "--kernel", "affine:0,1", "--x", "1", "--cells",
               "256", "--format", "json", "--output", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  const CadlagPath h = parse_path(buf.str());
  CHECK(parse_path(to_json(h)) == h);
  r = run({"idcost", "--model", "gaussian:mu=0,sigma=1", "--kernel", "affine:0,1", "--path", out.string()});
  REQUIRE(r.code == 0);
  const auto cells = split(lines(r.out).at(1), ',');
  CHECK(lines(r.out).at(0) == "i_d,var,pair");
  CHECK(parse_double(cells[0]) == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(parse_double(cells[2]) == doctest::Approx(1.0).epsilon(1e-10));

  r = run({"minimizer", "--model", "cexp", "--kernel", "const:1", "--x", "1", "--plot", "4"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).size() == 6);
  CHECK(lines(r.out).at(0) == "t,h");
}

TEST_CASE("mc columns") {
  const Run r = run({"mc", "--model", "gaussian:mu=0,sigma=1", "--kernel", "affine:0,1", "--n", "50", "--a", "0.5",
                     "--samples", "2000"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(0) == "n,a,rate_estimate,std_error,i_f,exact_rate");
  const auto cells = split(lines(r.out).at(1), ',');
  CHECK(cells[0] == "50");
  CHECK(parse_double(cells[4]) == doctest::Approx(0.375).epsilon(1e-10));
  const Run s = run({"sweep", "--model", "rademacher", "--kernel", "const:1", "--n", "20,40", "--a", "0.2,0.4",
                     "--samples", "1000"});
  REQUIRE(s.code == 0);
  CHECK(lines(s.out).size() == 5);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kConfig);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"rate", "--model", "nosuch", "--kernel", "const:1", "--x", "0"}).code == cli::kConfig);
  CHECK(run({"rate", "--model", "cexp", "--kernel", "const:1", "--x", "0", "--bogus", "1"}).code == cli::kConfig);
  CHECK(run({"rate", "--model", "cexp", "--kernel", "const:1", "--x", "0", "--format", "xml"}).code == cli::kConfig);
  CHECK(run({"idcost", "--model", "cexp", "--path", "/nonexistent/file"}).code == cli::kConfig);
  CHECK(run({"ef", "--model", "gaussian:d=2", "--kernel", "const:1", "--lambda", "1"}).code == cli::kConfig);
  // A non-unit direction is a domain error.
  CHECK(run({"mc", "--model", "gaussian:d=2", "--kernel", "const:1", "--n", "5", "--a", "0.1", "--l", "1/1",
             "--samples", "200"})
            .code == cli::kDomain);
}

TEST_CASE("ef table") {
  const Run r = run({"ef", "--model", "gaussian:mu=0,sigma=1", "--kernel", "affine:0,1", "--lambda", "3,0"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls[0] == "lambda,e_f,e_f_grad");
  CHECK(parse_double(split(ls[1], ',')[1]) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(parse_double(split(ls[1], ',')[2]) == doctest::Approx(1.0).epsilon(1e-12));
  const Run inf = run({"ef", "--model", "cexp", "--kernel", "affine:0,1", "--lambda", "2"});
  CHECK(lines(inf.out).at(1) == "2,inf,");
}
