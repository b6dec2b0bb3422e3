#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rtp_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(RTP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Reads the "predicted" column of a prediction CSV.
std::vector<std::string> predicted(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string row, label;
    std::getline(f, row, ',');
    std::getline(f, label, ',');
    out.push_back(label);
  }
  return out;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("") == 1);
  CHECK(run("bogus") == 1);
  CHECK(run("draw") == 1);
  const auto dir = scratch("usage");
  const std::string out = (dir / "a.svg").string();
  CHECK(run("draw --out " + out + " --variant nope") == 1);
  CHECK(run("draw --out " + out + " --domain 0,1,0") == 1);
  CHECK(run("draw --out " + out + " --domain 1,0,0,1") == 1);
  CHECK(run("draw --out " + out + " --variant wmrtp --weights 1,2,3") == 1);
  CHECK(run("draw --out " + out + " --budget inf") == 1);
  CHECK(run("draw --out " + out + " --rate-mode approx") == 1);
}

TEST_CASE("draw writes deterministic SVG and CSV") {
  const auto dir = scratch("draw");
  const std::string a = (dir / "a.svg").string();
  const std::string b = (dir / "b.svg").string();
  REQUIRE(run("draw --variant wurtp --weights 3,1 --budget 4 --seed 7 --out " + a) == 0);
  REQUIRE(run("draw --variant wurtp --weights 3,1 --budget 4 --seed 7 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(a).find("<polygon") != std::string::npos);
  REQUIRE(run("draw --variant wurtp --weights 3,1 --budget 4 --seed 8 --out " + b) == 0);
  CHECK(slurp(a) != slurp(b));
}

TEST_CASE("wMRTP with weights (14,1) cuts mostly across the x axis") {
  const auto dir = scratch("wmrtp");
  long vertical = 0;
  long horizontal = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const fs::path svg = dir / ("d" + std::to_string(seed) + ".svg");
    REQUIRE(run("draw --variant wmrtp --weights 14,1 --budget 3 --seed " +
                std::to_string(seed) + " --out " + svg.string()) == 0);
    std::istringstream in(slurp(dir / ("d" + std::to_string(seed) + ".csv")));
    std::string line;
    std::getline(in, line);
    std::map<int, std::vector<std::pair<double, double>>> cells;
    while (std::getline(in, line)) {
      std::vector<double> v;
      std::istringstream f(line);
      std::string field;
      while (std::getline(f, field, ',')) v.push_back(std::stod(field));
      cells[static_cast<int>(v[0])].emplace_back(v[2], v[3]);
    }
    // Each cut line contributes one new vertex coordinate on its axis.
    std::set<double> xs, ys;
    for (const auto& [id, verts] : cells) {
      for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto [x0, y0] = verts[i];
        const auto [x1, y1] = verts[(i + 1) % verts.size()];
        REQUIRE(std::min(std::abs(x1 - x0), std::abs(y1 - y0)) < 1e-12);
        xs.insert(x0);
        ys.insert(y0);
      }
    }
    vertical += static_cast<long>(xs.size()) - 2;
    horizontal += static_cast<long>(ys.size()) - 2;
  }
  CHECK(vertical > horizontal);
}

TEST_CASE("XOR fit and predict") {
  const auto dir = scratch("xor");
  write(dir / "train.csv", "x,y,label\n0,0,a\n1,1,a\n0,1,b\n1,0,b\n");
  write(dir / "test.csv", "x,y,label\n0,0,a\n1,1,a\n0,1,b\n1,0,b\n");
  const std::string model = (dir / "model").string();
  REQUIRE(run("fit --train " + (dir / "train.csv").string() + " --test " +
              (dir / "test.csv").string() + " --trees 10 --seed 3 --model-dir " + model) == 0);
  REQUIRE(run("predict --model-dir " + model + " --test " + (dir / "test.csv").string() +
              " --out " + (dir / "pred.csv").string()) == 0);
  CHECK(predicted(dir / "pred.csv") == std::vector<std::string>{"a", "a", "b", "b"});
  CHECK(slurp(dir / "pred.csv").rfind("row,predicted,p_a,p_b\n", 0) == 0);
}

TEST_CASE("fit, reload and predict are reproducible") {
  const auto dir = scratch("roundtrip");
  std::ostringstream train, test;
  train << "u,v,label\n";
  test << "u,v,label\n";
  for (int i = 0; i < 60; ++i) {
    const double x = (i * 37 % 101) / 101.0;
    const double y = (i * 53 % 97) / 97.0;
    (i < 40 ? train : test) << x << ',' << y << ',' << (x > y ? "hi" : "lo") << '\n';
  }
  write(dir / "train.csv", train.str());
  write(dir / "test.csv", test.str());
  const std::string common = " --train " + (dir / "train.csv").string() + " --test " +
                             (dir / "test.csv").string() +
                             " --variant wurtf --trees 5 --seed 11 --model-dir ";
  REQUIRE(run("fit" + common + (dir / "m1").string()) == 0);
  REQUIRE(run("fit" + common + (dir / "m2").string()) == 0);
  for (const auto& entry : fs::directory_iterator(dir / "m1")) {
    CHECK(slurp(entry.path()) == slurp(dir / "m2" / entry.path().filename()));
  }
  REQUIRE(run("predict --model-dir " + (dir / "m1").string() + " --test " +
              (dir / "test.csv").string() + " --out " + (dir / "p1.csv").string()) == 0);
  REQUIRE(run("predict --model-dir " + (dir / "m1").string() + " --test " +
              (dir / "test.csv").string() + " --out " + (dir / "p2.csv").string()) == 0);
  CHECK(slurp(dir / "p1.csv") == slurp(dir / "p2.csv"));
  CHECK(predicted(dir / "p1.csv").size() == 20);

  // Test file without labels is accepted.
  std::istringstream in(test.str());
  std::ostringstream unlabeled;
  std::string line;
  while (std::getline(in, line)) unlabeled << line.substr(0, line.rfind(',')) << '\n';
  write(dir / "nolabel.csv", unlabeled.str());
  REQUIRE(run("predict --model-dir " + (dir / "m1").string() + " --test " +
              (dir / "nolabel.csv").string() + " --out " + (dir / "p3.csv").string()) == 0);
  CHECK(predicted(dir / "p3.csv") == predicted(dir / "p1.csv"));
}

TEST_CASE("prediction errors") {
  const auto dir = scratch("errors");
  write(dir / "train.csv", "x,y,label\n0,0,a\n1,1,a\n0,1,b\n1,0,b\n");
  write(dir / "test.csv", "x,y,label\n0.5,0.5,a\n");
  write(dir / "other.csv", "x,y,label\n0.25,0.75,a\n");
  CHECK(run("predict --model-dir " + (dir / "none").string() + " --test " +
            (dir / "test.csv").string()) == 1);
  REQUIRE(run("fit --train " + (dir / "train.csv").string() + " --test " +
              (dir / "test.csv").string() + " --trees 2 --model-dir " +
              (dir / "m").string()) == 0);
  CHECK(run("predict --model-dir " + (dir / "m").string() + " --test " +
            (dir / "other.csv").string()) == 2);
  write(dir / "bad.csv", "x,y,label\n0,zero,a\n");
  CHECK(run("fit --train " + (dir / "bad.csv").string() + " --model-dir " +
            (dir / "m2").string()) == 2);
  CHECK(run("fit --train " + (dir / "train.csv").string() + " --label cls --model-dir " +
            (dir / "m3").string()) == 2);
  CHECK(run("fit --train " + (dir / "train.csv").string() + " --variant wurtf --weights 1,2,3 " +
            "--model-dir " + (dir / "m4").string()) == 1);
}

TEST_CASE("cube and experiment commands are deterministic") {
  const auto dir = scratch("commands");
  const std::string cube = "cube --n 150 --splits 2 --trees 2 --particles 5 --cuts 8 --seed 5 ";
  REQUIRE(run(cube + "--out " + (dir / "c1.json").string() + " --csv " +
              (dir / "c1.csv").string()) == 0);
  REQUIRE(run(cube + "--out " + (dir / "c2.json").string() + " --csv " +
              (dir / "c2.csv").string()) == 0);
  CHECK(slurp(dir / "c1.json") == slurp(dir / "c2.json"));
  CHECK(slurp(dir / "c1.csv") == slurp(dir / "c2.csv"));
  CHECK(fs::exists(dir / "c1.runtime.json"));

  REQUIRE(run("synth-pc --rows 30 --cols 6 --minority 12 --out " + (dir / "pc.csv").string()) ==
          0);
  write(dir / "exp.json",
        R"({"datasets": [{"name": "pc", "path": "pc.csv"}], "splits": 2, "trees": 2, "particles": 4, "seed": 1})");
  REQUIRE(run("experiment --config " + (dir / "exp.json").string() + " --out " +
              (dir / "r1.json").string()) == 0);
  REQUIRE(run("experiment --config " + (dir / "exp.json").string() + " --out " +
              (dir / "r2.json").string()) == 0);
  CHECK(slurp(dir / "r1.json") == slurp(dir / "r2.json"));
  CHECK(slurp(dir / "r1.json").find("\"wuRTF\"") != std::string::npos);
  write(dir / "bad.json", R"({"datasets": [{"path": "pc.csv"}], "tress": 3})");
  CHECK(run("experiment --config " + (dir / "bad.json").string()) == 1);
}
