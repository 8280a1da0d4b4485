// Drives the installed binary end to end through temp files.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lakern/gram.hpp"
#include "lakern/substitution.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = 0;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

class Workspace {
 public:
  Workspace() {
    dir_ = fs::temp_directory_path() /
           ("lakern_cli_test_" + std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  fs::path file(const std::string& name, const std::string& content) const {
    spit(dir_ / name, content);
    return dir_ / name;
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

  CliRun run(const std::string& args) const {
    const fs::path out = dir_ / "_stdout";
    const fs::path err = dir_ / "_stderr";
    const std::string cmd = std::string(LAKERN_CLI_PATH) + " " + args +
                            " > " + out.string() + " 2> " + err.string();
    CliRun r;
    const int status = std::system(cmd.c_str());
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path dir_;
  static inline int counter_ = 0;
};

const char* kSeparable =
    "p0\t1\talpha >nsubj target\n"
    "p1\t1\talpha >nsubj target\n"
    "p2\t1\talpha >nsubj target\n"
    "p3\t1\talpha >nsubj target\n"
    "p4\t1\talpha >nsubj target\n"
    "p5\t1\talpha >nsubj target\n"
    "n0\t0\tbeta <dobj other\n"
    "n1\t0\tbeta <dobj other\n"
    "n2\t0\tbeta <dobj other\n"
    "n3\t0\tbeta <dobj other\n"
    "n4\t0\tbeta <dobj other\n"
    "n5\t0\tbeta <dobj other\n";

const char* kEmptyMatrix = "#subst-matrix v1\n";

}  // namespace

TEST_CASE("build-subst random is reproducible per seed") {
  Workspace ws;
  const auto inst = ws.file("d.tsv", "p1\t1\ta b c\np2\t0\tc d\n");
  const auto a = ws.run("build-subst --source random --seed 7 --instances " +
                        inst.string() + " --out " + ws.path("m1.tsv").string());
  REQUIRE(a.exit_code == 0);
  const auto b = ws.run("build-subst --source random --seed 7 --instances " +
                        inst.string() + " --out " + ws.path("m2.tsv").string());
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(ws.path("m1.tsv")) == slurp(ws.path("m2.tsv")));

  const auto c = ws.run("build-subst --source random --seed 8 --instances " +
                        inst.string() + " --out " + ws.path("m3.tsv").string());
  REQUIRE(c.exit_code == 0);
  CHECK(slurp(ws.path("m1.tsv")) != slurp(ws.path("m3.tsv")));

  // manifest records the command and the input digest
  const auto manifest =
      nlohmann::json::parse(slurp(ws.path("m1.tsv.manifest.json")));
  CHECK(manifest["command"] == "build-subst");
  CHECK(manifest["inputs"].contains("instances"));
  CHECK(manifest["parameters"]["seed"] == 7);
}

TEST_CASE("build-subst distributional computes dataset-vocabulary scores") {
  Workspace ws;
  const auto inst = ws.file("d.tsv", "p1\t1\tcat >nsubj dog\n");
  const auto corpus = ws.file("c.txt",
                              "the cat sat here\n"
                              "the dog sat here\n");
  const auto r = ws.run(
      "build-subst --source distributional --measure dice --corpus " +
      corpus.string() + " --instances " + inst.string() + " --out " +
      ws.path("m.tsv").string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(ws.path("m.tsv"));
  const auto m = lakern::SubstitutionMatrix::load(in);
  CHECK(m.word_score("cat", "dog") == 1.0);  // identical context sets
}

TEST_CASE("build-subst taxonomy scores annotated pairs only") {
  Workspace ws;
  const auto inst =
      ws.file("d.tsv", "p1\t1\tjoy%a1 >nsubj come <prep_from awareness%a2\n");
  const auto taxo =
      ws.file("t.tsv", "R\t-\t1\nA\tR\t1\nB\tR\t2\na1\tA\t2\na2\tA\t2\n");
  const auto r = ws.run("build-subst --source taxonomy --measure wup "
                        "--taxonomy " +
                        taxo.string() + " --instances " + inst.string() +
                        " --out " + ws.path("m.tsv").string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(ws.path("m.tsv"));
  const auto m = lakern::SubstitutionMatrix::load(in);
  CHECK(m.word_score("joy%a1", "awareness%a2") ==
        Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.word_score("come", "joy%a1") == 0.0);
}

TEST_CASE("gram fixtures through the CLI") {
  Workspace ws;
  const auto subst = ws.file("m.tsv", kEmptyMatrix);

  SECTION("identical paths normalize to an all-ones matrix") {
    const auto inst = ws.file("d.tsv", "p1\t1\ta b\np2\t0\ta b\n");
    const auto r = ws.run("gram --instances " + inst.string() +
                          " --kernel la --subst " + subst.string() +
                          " --normalize --out " + ws.path("g.tsv").string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(ws.path("g.tsv"));
    const auto g = lakern::GramMatrix::load(in);
    CHECK(g.normalized());
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(g.at(i, j) == Catch::Approx(1.0).epsilon(1e-12));
  }
  SECTION("shortest-path kernel reproduces the worked product") {
    const auto inst = ws.file(
        "sp.tsv",
        "p1\t1\this|PRP|PERSON >arc actions|NNS|Noun <arc in|IN <arc "
        "Brcko|NNP|Noun|LOCATION\n"
        "p2\t1\this|PRP|PERSON >arc arrival|NN|Noun <arc in|IN <arc "
        "Beijing|NNP|Noun|LOCATION\n");
    const auto r = ws.run("gram --instances " + inst.string() +
                          " --kernel shortest-path --out " +
                          ws.path("g.tsv").string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(ws.path("g.tsv"));
    const auto g = lakern::GramMatrix::load(in);
    CHECK(g.at(0, 1) == 18.0);
  }
  SECTION("la diagonal is at least 1 without normalization") {
    const auto inst = ws.file("d.tsv", "p1\t1\ta b c\np2\t0\td\n");
    const auto r = ws.run("gram --instances " + inst.string() +
                          " --kernel la --subst " + subst.string() +
                          " --out " + ws.path("g.tsv").string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(ws.path("g.tsv"));
    const auto g = lakern::GramMatrix::load(in);
    CHECK_FALSE(g.normalized());
    CHECK(g.at(0, 0) >= 1.0);
    CHECK(g.at(1, 1) >= 1.0);
  }
  SECTION("la without a substitution matrix fails") {
    const auto inst = ws.file("d.tsv", "p1\t1\ta\np2\t0\tb\n");
    const auto r = ws.run("gram --instances " + inst.string() +
                          " --kernel la --out " + ws.path("g.tsv").string());
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("--subst") != std::string::npos);
  }
  SECTION("gram bytes are identical across thread counts") {
    const auto inst = ws.file("d.tsv", kSeparable);
    REQUIRE(ws.run("gram --instances " + inst.string() +
                   " --kernel la --subst " + subst.string() +
                   " --threads 1 --out " + ws.path("g1.tsv").string())
                .exit_code == 0);
    REQUIRE(ws.run("gram --instances " + inst.string() +
                   " --kernel la --subst " + subst.string() +
                   " --threads 4 --out " + ws.path("g4.tsv").string())
                .exit_code == 0);
    CHECK(slurp(ws.path("g1.tsv")) == slurp(ws.path("g4.tsv")));
  }
}

TEST_CASE("cv on a separable fixture reaches F=1") {
  Workspace ws;
  const auto inst = ws.file("d.tsv", kSeparable);
  const auto subst = ws.file("m.tsv", kEmptyMatrix);
  const auto r = ws.run("cv --instances " + inst.string() +
                        " --kernel la --subst " + subst.string() +
                        " --normalize --folds 4 --seed 1 --c-grid 1 --out " +
                        ws.path("report.tsv").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("report.tsv") != std::string::npos);
  const std::string report = slurp(ws.path("report.tsv"));
  CHECK(report.find("aggregate\t1.000000\t1.000000\t1.000000") !=
        std::string::npos);
  const auto manifest =
      nlohmann::json::parse(slurp(ws.path("report.tsv.manifest.json")));
  CHECK(manifest["fold_plan_digest"].is_number());

  SECTION("repeated runs with one seed are byte-identical") {
    const auto again = ws.run(
        "cv --instances " + inst.string() + " --kernel la --subst " +
        subst.string() +
        " --normalize --folds 4 --seed 1 --c-grid 1 --threads 2 --out " +
        ws.path("report2.tsv").string());
    REQUIRE(again.exit_code == 0);
    CHECK(slurp(ws.path("report2.tsv")) == slurp(ws.path("report.tsv")));
  }
}

TEST_CASE("sweep emits one row per grid cell") {
  Workspace ws;
  const auto inst = ws.file("d.tsv", kSeparable);
  const auto subst = ws.file("m.tsv", kEmptyMatrix);
  const auto r = ws.run("sweep --instances " + inst.string() + " --subst " +
                        subst.string() +
                        " --beta 0.125,0.25,0.5,1 --gaps 1.2/0.2,1/1 "
                        "--folds 3 --seed 2 --c-grid 1 --out " +
                        ws.path("sweep.tsv").string());
  REQUIRE(r.exit_code == 0);
  std::istringstream report(slurp(ws.path("sweep.tsv")));
  std::string line;
  std::size_t rows = 0;
  std::getline(report, line);
  CHECK(line == "cell\tprecision\trecall\tf_score");
  while (std::getline(report, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 8);
}

TEST_CASE("curve reports one row per size") {
  Workspace ws;
  const auto train = ws.file("train.tsv", kSeparable);
  const auto test = ws.file("test.tsv",
                            "t0\t1\talpha >nsubj target\n"
                            "t1\t0\tbeta <dobj other\n"
                            "t2\t0\tgamma <dobj thing\n");
  const auto subst = ws.file("m.tsv", kEmptyMatrix);
  const auto r = ws.run("curve --train " + train.string() + " --test " +
                        test.string() + " --kernel la --subst " +
                        subst.string() +
                        " --sizes 4,8,12 --seed 3 --c-grid 1 --out " +
                        ws.path("curve.tsv").string());
  REQUIRE(r.exit_code == 0);
  const std::string report = slurp(ws.path("curve.tsv"));
  CHECK(report.find("size=4\t") != std::string::npos);
  CHECK(report.find("size=8\t") != std::string::npos);
  CHECK(report.find("size=12\t") != std::string::npos);
}

TEST_CASE("train, predict and export round-trip") {
  Workspace ws;
  const auto inst = ws.file("d.tsv", kSeparable);
  const auto subst = ws.file("m.tsv", kEmptyMatrix);
  REQUIRE(ws.run("gram --instances " + inst.string() +
                 " --kernel la --subst " + subst.string() +
                 " --normalize --out " + ws.path("g.tsv").string())
              .exit_code == 0);
  REQUIRE(ws.run("train --gram " + ws.path("g.tsv").string() +
                 " --instances " + inst.string() + " --c 10 --out " +
                 ws.path("model.tsv").string())
              .exit_code == 0);

  const auto pr = ws.run("predict --model " + ws.path("model.tsv").string() +
                         " --train-instances " + inst.string() +
                         " --instances " + inst.string() +
                         " --kernel la --subst " + subst.string() +
                         " --normalize --out " + ws.path("pred.tsv").string());
  REQUIRE(pr.exit_code == 0);
  std::istringstream pred(slurp(ws.path("pred.tsv")));
  std::string line;
  std::getline(pred, line);  // header
  CHECK(line == "id\tlabel\tdecision");
  std::size_t correct = 0, total = 0;
  while (std::getline(pred, line)) {
    if (line.empty()) continue;
    ++total;
    const bool expect_pos = line[0] == 'p';
    const bool got_pos = line.find("\t1\t") != std::string::npos;
    correct += expect_pos == got_pos;
  }
  CHECK(total == 12);
  CHECK(correct == 12);

  const auto ex = ws.run("export --gram " + ws.path("g.tsv").string() +
                         " --instances " + inst.string() +
                         " --format precomputed --out " +
                         ws.path("k.svm").string());
  REQUIRE(ex.exit_code == 0);
  const std::string exported = slurp(ws.path("k.svm"));
  CHECK(exported.starts_with("+1 0:1 1:1"));
  CHECK(exported.find("\n-1 0:7") != std::string::npos);
}

TEST_CASE("psd-check prints the smallest eigenvalue") {
  Workspace ws;
  const auto inst = ws.file("d.tsv", kSeparable);
  const auto subst = ws.file("m.tsv", kEmptyMatrix);
  REQUIRE(ws.run("gram --instances " + inst.string() +
                 " --kernel la --subst " + subst.string() +
                 " --normalize --out " + ws.path("g.tsv").string())
              .exit_code == 0);
  const auto r = ws.run("psd-check --gram " + ws.path("g.tsv").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.starts_with("min_eigenvalue\t"));
}

TEST_CASE("errors reach stderr with a nonzero status") {
  Workspace ws;
  const auto r = ws.run("gram --instances /nonexistent.tsv --kernel "
                        "shortest-path --out " +
                        ws.path("g.tsv").string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);

  const auto usage = ws.run("not-a-command");
  CHECK(usage.exit_code != 0);
}
