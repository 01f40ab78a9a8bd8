#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "pec/corpus.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace pec;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

unsigned next_id() {
  static unsigned n = 0;
  return ++n;
}

// Scratch directory holding a small corpus and its label file.
struct Workspace {
  fs::path root;
  std::string dataset;
  std::string labels;

  Workspace() {
    root = fs::temp_directory_path() / ("pec-cli-test-" + std::to_string(std::random_device{}()) + "-" +
                                        std::to_string(next_id()));
    fs::remove_all(root);
    fs::create_directories(root);
    const auto corpus = testing::self_dependent_corpus(3, {.conversations = 20, .length = 6, .num_labels = 3});
    dataset = (root / "corpus.jsonl").string();
    std::ofstream(dataset) << [&] {
      std::ostringstream s;
      serialize_corpus(corpus, s);
      return s.str();
    }();
    labels = (root / "labels.json").string();
    std::ofstream(labels) << nlohmann::json(corpus.label_set.names()).dump();
  }
  ~Workspace() { fs::remove_all(root); }

  std::string dir(const std::string& name) const { return (root / name).string(); }
};

std::vector<std::string> quick_train(const Workspace& ws) {
  return {"--dataset", ws.dataset, "--labels", ws.labels, "--epochs", "2", "--hidden", "4", "--graph-hidden", "4"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("stats prints the class distribution") {
  Workspace ws;
  const auto r = run({"stats", "--dataset", ws.dataset, "--labels", ws.labels, "--lookbacks", "1-2", "--output",
                      ws.dir("stats")});
  CHECK(r.code == 0);
  CHECK(r.out.find("label,count,percent,targets_1LB,targets_2LB") != std::string::npos);
  CHECK(r.out.find("\ne0,") != std::string::npos);
  CHECK(r.out.find("total,120,100.00") != std::string::npos);
  CHECK(fs::exists(ws.dir("stats") + "/stats.json"));
  CHECK(fs::exists(ws.dir("stats") + "/config.json"));
}

TEST_CASE("dgcn with lookback 1 is a validation error") {
  Workspace ws;
  const auto r = run(concat({"train", "--model", "dgcn", "--lookback", "1", "--output", ws.dir("t")}, quick_train(ws)));
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("--lookback") != std::string::npos);
  CHECK(r.err.find("--model dgcn") != std::string::npos);
}

TEST_CASE("usage errors") {
  Workspace ws;
  CHECK(run({"stats", "--dataset", ws.dataset, "--bogus"}).code == cli::kExitValidation);
  CHECK(run({"frobnicate"}).code == cli::kExitValidation);
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"stats", "--labels", ws.labels}).code == cli::kExitValidation);
  CHECK(run({"train", "--dataset", ws.dataset, "--labels", ws.labels, "--balance", "focal"}).code ==
        cli::kExitValidation);
  CHECK(run({"stats", "--dataset", ws.dir("missing.jsonl"), "--labels", ws.labels}).code == cli::kExitRuntime);
  CHECK(run({"stats", "--dataset", ws.dataset, "--labels", "dailydialog"}).code == cli::kExitValidation);
}

TEST_CASE("train writes its artefacts and evaluate reloads them") {
  Workspace ws;
  const auto out = ws.dir("train");
  const auto r = run(concat({"train", "--model", "dgcn", "--lookback", "2", "--output", out}, quick_train(ws)));
  REQUIRE(r.code == 0);
  for (const char* f : {"config.json", "history.csv", "report.json", "checkpoint.json"})
    CHECK(fs::exists(fs::path(out) / f));

  const auto config = nlohmann::json::parse(slurp(fs::path(out) / "config.json"));
  CHECK(config["run"]["model"] == "dgcn");
  CHECK(config["run"]["lookback"] == 2);
  CHECK(config["run"]["epochs"] == 2);

  const auto report = nlohmann::json::parse(slurp(fs::path(out) / "report.json"));
  const auto e = run({"evaluate", "--checkpoint", out + "/checkpoint.json", "--output", ws.dir("eval")});
  CHECK(e.code == 0);
  const auto again = nlohmann::json::parse(slurp(fs::path(ws.dir("eval")) / "report.json"));
  CHECK(again["report"]["macro_f1"] == report["final_epoch"]["macro_f1"]);
}

TEST_CASE("grid twice gives identical files") {
  Workspace ws;
  const auto spec = ws.dir("grid.json");
  std::ofstream(spec) << R"({"models": ["bilstm", "dgcn"], "lookbacks": [2, 3], "epochs": 2, "hidden": 4,
                             "graph_hidden": 4, "dataset": ")"
                      << ws.dataset << R"(", "labels": ")" << ws.labels << "\"}";
  const auto a = run({"grid", "--spec", spec, "--seed", "7", "--output", ws.dir("g1")});
  const auto b = run({"grid", "--spec", spec, "--seed", "7", "--output", ws.dir("g2"), "--jobs", "2"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(ws.dir("g1"))) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), ws.dir("g1"));
    if (rel == "config.json") continue;
    ++files;
    CHECK(slurp(entry.path()) == slurp(fs::path(ws.dir("g2")) / rel));
  }
  CHECK(files == 2 + 4 * 2);

  const auto config = nlohmann::json::parse(slurp(fs::path(ws.dir("g1")) / "config.json"));
  CHECK(config["grid"]["seed"] == 7);
  CHECK(config["grid"]["lookbacks"] == nlohmann::json::array({2, 3}));
}

TEST_CASE("extract, transitions, import and profile") {
  Workspace ws;
  CHECK(run({"extract", "--dataset", ws.dataset, "--labels", ws.labels, "--lookback", "2", "--dependency", "self",
             "--output", ws.dir("x")})
            .code == 0);
  CHECK(fs::exists(ws.dir("x") + "/samples.jsonl"));

  CHECK(run({"transitions", "--dataset", ws.dataset, "--labels", ws.labels, "--gap", "2", "--output", ws.dir("tr")})
            .code == 0);
  CHECK(fs::exists(ws.dir("tr") + "/transitions.csv"));

  const auto text = ws.dir("dd_text.txt");
  const auto emo = ws.dir("dd_emo.txt");
  std::ofstream(text) << "Hi . __eou__ Hello . __eou__\n";
  std::ofstream(emo) << "0 4\n";
  CHECK(run({"import", "--format", "dailydialog", "--input", text, "--emotions", emo, "--output", ws.dir("imp")})
            .code == 0);
  CHECK(slurp(ws.dir("imp") + "/corpus.jsonl").find("happiness") != std::string::npos);

  const auto p = run(concat({"profile", "--speakers", "A,Ghost", "--output", ws.dir("p")}, quick_train(ws)));
  CHECK(p.code == 0);
  const auto js = nlohmann::json::parse(slurp(ws.dir("p") + "/profiles.json"));
  CHECK(js["speakers"].size() == 2);
}
