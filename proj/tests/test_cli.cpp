#include "cli.hpp"
#include "twc/error.hpp"
#include "twc/io.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

using namespace twc;
using Catch::Approx;

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  RunResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct Csv {
  Json manifest;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> parts;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) parts.push_back(cell);
  return parts;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  REQUIRE(std::getline(in, line));
  const std::string prefix = "# manifest: ";
  REQUIRE(line.rfind(prefix, 0) == 0);
  csv.manifest = Json::parse(line.substr(prefix.size()));
  REQUIRE(std::getline(in, line));
  csv.header = split_commas(line);
  while (std::getline(in, line)) {
    auto row = split_commas(line);
    REQUIRE(row.size() == csv.header.size());
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

double num(const std::string& s) {
  if (s == "inf") return kInf;
  return std::stod(s);
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "twc_test_cli";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_text(const std::string& name, const std::string& text) {
  const auto path = (scratch_dir() / name).string();
  std::ofstream(path) << text;
  return path;
}

/// Exit status of the real binary; skipped when TWC_BIN is not set.
int run_binary(const std::string& args) {
  const char* bin = std::getenv("TWC_BIN");
  if (bin == nullptr) SKIP("TWC_BIN not set");
  const std::string cmd = std::string("\"") + bin + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("grid and list parsing") {
  const auto g = cli::parse_grid("0:1:5").values();
  CHECK(g == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(cli::parse_grid("0.3").values() == std::vector<double>{0.3});
  const auto third = cli::parse_grid("0:1:4").values();
  CHECK(third.back() == 1.0);
  CHECK(third[1] == 1.0 / 3.0);
  CHECK_THROWS_AS(cli::parse_grid("0:1"), IoError);
  CHECK_THROWS_AS(cli::parse_grid("0:1:zero"), IoError);
  CHECK_THROWS_AS(cli::parse_grid("0:1:0"), PreconditionError);
  CHECK(cli::parse_int_list("2,4:6,9") == std::vector<long>{2, 4, 5, 6, 9});
  CHECK_THROWS_AS(cli::parse_int_list("3:1"), PreconditionError);
  CHECK_THROWS_AS(cli::parse_int_list("a"), IoError);
}

TEST_CASE("worker pool keeps grid order and propagates failures") {
  for (unsigned threads : {1u, 2u, 7u}) {
    const auto v = cli::parallel_map<long>(1000, threads, [](std::size_t i) { return static_cast<long>(i * i); });
    for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(v[i] == static_cast<long>(i * i));
  }
  CHECK(cli::parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
  CHECK_THROWS_AS(cli::parallel_map<int>(100, 4,
                                         [](std::size_t i) -> int {
                                           if (i == 37) throw NumericalError("boom");
                                           return 0;
                                         }),
                  NumericalError);
}

TEST_CASE("mountains") {
  const auto r = run({"mountains", "--grid", "0:1:21", "--delta-grid", "0:2.5:26", "--threads", "3"});
  REQUIRE(r.code == 0);
  const Csv csv = parse_csv(r.out);
  CHECK(csv.manifest.at("command") == "mountains");
  CHECK(csv.header == std::vector<std::string>{"alpha", "delta", "certified_dim", "source"});
  const auto ia = csv.col("alpha");
  const auto id = csv.col("delta");
  const auto ic = csv.col("certified_dim");
  const auto is = csv.col("source");

  bool example = false;
  int threshold_rows = 0;
  std::map<double, std::vector<std::pair<double, long>>> columns;
  for (const auto& row : csv.rows) {
    const double a = num(row[ia]);
    const double d = num(row[id]);
    const long dim = std::stol(row[ic]);
    if (a == 0.25 && d == 0.5 && dim == 3) example = true;
    if (row[is] == "threshold") {
      ++threshold_rows;
      CHECK(dim >= std::lround(1.0 / a));
    }
    if (row[is] != "grid") continue;
    if (d >= 2.0) CHECK(dim == 1);
    columns[a].emplace_back(d, dim);
  }
  CHECK(example);
  CHECK(threshold_rows == 7);
  CHECK(columns.size() == 21);
  for (auto& [a, col] : columns) {
    std::sort(col.begin(), col.end());
    for (std::size_t i = 1; i < col.size(); ++i) REQUIRE(col[i].second <= col[i - 1].second);
  }

  // identical manifests give identical output, whatever the thread count
  const auto again = run({"mountains", "--grid", "0:1:21", "--delta-grid", "0:2.5:26", "--threads", "1"});
  CHECK(again.out == r.out);
  const auto json = run({"mountains", "--grid", "0.25", "--delta-grid", "0.5", "--format", "json", "--slack"});
  REQUIRE(json.code == 0);
  const Json doc = Json::parse(json.out);
  CHECK(doc.at("rows").at(0).at("certified_dim") == 3);
  CHECK(doc.at("rows").at(0).contains("slack"));
}

TEST_CASE("minima") {
  const auto r = run({"minima", "--g", "2:10", "--grid", "0:1:201"});
  REQUIRE(r.code == 0);
  const Csv csv = parse_csv(r.out);
  CHECK(csv.header == std::vector<std::string>{"g", "alpha", "p", "k", "lambda"});
  REQUIRE(csv.rows.size() == 9 * 201);
  for (const auto& row : csv.rows) {
    const long g = std::stol(row[0]);
    const double a = num(row[1]);
    const double lam = num(row[4]);
    CHECK(row[2] == "inf");
    CHECK(row[3] == "1");
    REQUIRE(lam <= 2.0 * std::sin(kPi / (2.0 * g)) + 1e-15);
    const double x = g * a;
    if (std::abs(x - std::round(x)) < 1e-12) REQUIRE(lam < 1e-12);
    if (g == 4 && a == 0.25) CHECK(lam == 0.0);
    if (g == 5) {
      // written out directly: 2 sin(pi |round(5a) - 5a| / 5)
      const double expected = 2.0 * std::sin(kPi * std::abs(std::floor(5.0 * a + 0.5) - 5.0 * a) / 5.0);
      REQUIRE(lam == Approx(expected).margin(1e-9));
    }
    // 17 significant digits round-trip
    REQUIRE(format_double(lam) == row[4]);
  }

  const auto pk = run({"minima", "--g", "3", "--grid", "0.5", "--norm", "pk", "--p", "2", "--k", "0"});
  REQUIRE(pk.code == 0);
  const Csv c2 = parse_csv(pk.out);
  CHECK(c2.rows.at(0).at(3) == "3");
  CHECK(num(c2.rows.at(0).at(4)) == Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(run({"minima", "--norm", "pk", "--p", "1.5"}).code == 2);
}

TEST_CASE("certify from a model manifest") {
  const auto dir = scratch_dir();
  SECTION("exact g = 3 model") {
    const auto gen = run({"generate", "--g", "3", "--n-excited", "6", "--out", (dir / "exact.json").string()});
    REQUIRE(gen.code == 0);
    const auto r = run({"certify", "--manifest", (dir / "exact.json").string()});
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    CHECK(doc.at("certificate").at("d_min") == 3);
    CHECK(doc.at("manifest").at("seed") == 1);
  }
  SECTION("perturbed model below the thresholds") {
    for (const char* g : {"2", "3", "4"}) {
      const auto path = (dir / (std::string("pert") + g + ".json")).string();
      REQUIRE(run({"generate", "--g", g, "--n-excited", "12", "--perturbation", "0.002", "--unitary-perturbation",
                   "0.002", "--rotate", "--seed", "11", "--out", path})
                  .code == 0);
      const auto r = run({"certify", "--manifest", path});
      REQUIRE(r.code == 0);
      const Json doc = Json::parse(r.out);
      CHECK(doc.at("certificate").at("d_min") == std::stoi(g));
      CHECK(doc.at("restriction").at("all_hold") == true);
      CHECK(doc.at("measured").at("xi").get<double>() < 1.0);

      // the written certificate document re-validates
      const auto out = write_text("cert.json", r.out);
      CHECK(run({"certify", "--check", out}).code == 0);
    }
  }
  SECTION("matrix files give the same certificate as the manifest") {
    const auto mdir = (dir / "mats").string();
    const auto path = (dir / "files.json").string();
    REQUIRE(run({"generate", "--g", "3", "--n-excited", "6", "--perturbation", "0.01", "--rotate", "--matrices", mdir,
                 "--binary", "--out", path})
                .code == 0);
    const auto from_manifest = Json::parse(run({"certify", "--manifest", path}).out);
    const auto r = run({"certify", "-H", mdir + "/H.bin", "-P", mdir + "/P.bin", "-U", mdir + "/U.bin", "-V",
                        mdir + "/V.bin", "--alpha", "0.33333333333333331"});
    REQUIRE(r.code == 0);
    const auto from_files = Json::parse(r.out);
    CHECK(from_files.at("certificate") == from_manifest.at("certificate"));
  }
  SECTION("tensor-double model") {
    const auto path = (dir / "tensor.json").string();
    REQUIRE(run({"generate", "--kind", "tensor-double", "--g", "2", "--g2", "2", "--n-excited", "4", "--out", path})
                .code == 0);
    const Json doc = Json::parse(run({"certify", "--manifest", path}).out);
    CHECK(doc.at("certificate").at("method") == "double-pair");
    CHECK(doc.at("certificate").at("d_min") == 4);
  }
}

TEST_CASE("certify error paths") {
  // 2x2 rotation by pi/2 against H = diag(0, 1): xi = 1
  const auto h = write_text("h.txt", "2 2\n0 0 0 0\n0 0 1 0\n");
  const auto p = write_text("p.txt", "2 2\n1 0 0 0\n0 0 0 0\n");
  const auto u = write_text("u.txt", "2 2\n0 0 -1 0\n1 0 0 0\n");
  const auto v = write_text("v.txt", "2 2\n1 0 0 0\n0 0 1 0\n");
  CHECK(run({"certify", "-H", h, "-P", p, "-U", u, "-V", v, "--alpha", "0.5"}).code == 2);
  CHECK(run({"certify", "-H", h, "--band-size", "1", "-U", v, "-V", v, "--alpha", "0.5"}).code == 0);

  const auto bad = write_text("bad.txt", "2 2\n1 0 0\n");
  CHECK(run({"certify", "-H", bad, "-P", p, "-U", u, "-V", v, "--alpha", "0.5"}).code == 1);
  CHECK(run({"certify", "-H", (scratch_dir() / "missing.txt").string(), "-P", p, "-U", u, "-V", v, "--alpha", "0.5"})
            .code == 1);
  CHECK(run({"certify", "-H", h, "-P", p, "-U", u, "-V", v}).code == 2);
  CHECK(run({"certify", "--check", write_text("junk.json", "{not json")}).code == 1);

  // a tampered certificate fails the check with the precondition code
  const auto good = run({"certify", "--alpha", "0.25", "--delta", "0.5"});
  REQUIRE(good.code == 0);
  Json doc = Json::parse(good.out);
  CHECK(run({"certify", "--check", write_text("good.json", doc.dump())}).code == 0);
  doc["certificate"]["d_min"] = 4;
  const auto tampered = run({"certify", "--check", write_text("tampered.json", doc.dump())});
  CHECK(tampered.code == 2);
  CHECK(Json::parse(tampered.out).at("check").at("valid") == false);
  doc = Json::parse(good.out);
  doc["certificate"]["witness"]["stabs"] = Json::array({0.1, 0.2});
  CHECK(run({"certify", "--check", write_text("stabs.json", doc.dump())}).code == 2);
}

TEST_CASE("restrict and eigshare reports") {
  const auto dir = scratch_dir();
  for (const char* s : {"0", "0.005", "0.02"}) {
    const auto path = (dir / (std::string("r") + s + ".json")).string();
    REQUIRE(run({"generate", "--g", "3", "--n-excited", "6", "--perturbation", s, "--unitary-perturbation", s,
                 "--width", s, "--rotate", "--out", path})
                .code == 0);
    for (const char* norm : {"op", "fro"}) {
      const auto r = run({"restrict", "--manifest", path, "--norm", norm});
      REQUIRE(r.code == 0);
      const Json doc = Json::parse(r.out);
      CHECK(doc.at("all_hold") == true);
      CHECK(doc.at("gibbs").at("gap").get<double>() > 0.0);
    }
    const auto e = run({"eigshare", "--manifest", path});
    REQUIRE(e.code == 0);
    const Json doc = Json::parse(e.out);
    CHECK(doc.at("general").at("all_hold") == true);
    CHECK(doc.at("normal").at("all_hold") == true);
  }
  const auto tpath = (dir / "et.json").string();
  REQUIRE(run({"generate", "--kind", "tensor-double", "--g", "2", "--g2", "3", "--n-excited", "6",
               "--unitary-perturbation", "1e-6", "--out", tpath})
              .code == 0);
  const Json t = Json::parse(run({"eigshare", "--manifest", tpath}).out);
  CHECK(t.at("pair") == "U1, U2");
  CHECK(t.at("normal").at("all_hold") == true);

  // non-normal B: only the general variant applies
  const auto a = write_text("a.txt", "2 2\n1 0 0 0\n0 0 -1 0\n");
  const auto b = write_text("b.txt", "2 2\n1 0 1e-3 0\n0 0 -1 0\n");
  const Json g = Json::parse(run({"eigshare", "-A", a, "-B", b}).out);
  CHECK(g.at("normal").is_null());
  CHECK(g.at("general").at("all_hold") == true);
}

TEST_CASE("generate is deterministic") {
  const auto a = run({"generate", "--g", "4", "--n-excited", "8", "--perturbation", "0.1", "--seed", "5"});
  const auto b = run({"generate", "--g", "4", "--n-excited", "8", "--perturbation", "0.1", "--seed", "5"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(run({"generate", "--g", "4", "--n-excited", "6"}).code == 2);
  CHECK(run({"generate", "--kind", "cube"}).code == 2);
}

TEST_CASE("binary exit codes") {
  CHECK(run_binary("--version") == 0);
  CHECK(run_binary("") == 1);
  CHECK(run_binary("minima --nope") == 1);
  CHECK(run_binary("certify --alpha 0.25 --delta 0.5") == 0);
  CHECK(run_binary("certify --alpha 0.25 --delta -1") == 2);
  CHECK(run_binary("certify --check /nonexistent/cert.json") == 1);
  const auto out = (scratch_dir() / "bin_out.csv").string();
  CHECK(run_binary("minima --g 5 --grid 0:1:11 --out " + out) == 0);
  std::ifstream in(out);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("# manifest: ", 0) == 0);
}
