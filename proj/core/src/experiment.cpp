#include "pec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "pec/error.hpp"

namespace pec {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ModelKind m) { return m == ModelKind::bilstm ? "bilstm" : "dgcn"; }

ModelKind parse_model_kind(std::string_view text) {
  if (text == "bilstm") return ModelKind::bilstm;
  if (text == "dgcn") return ModelKind::dgcn;
  throw ConfigError("model must be bilstm or dgcn; got \"" + std::string(text) + "\"");
}

void RunConfig::validate() const {
  if (labels.empty()) throw ConfigError("--labels must name a preset or a label file");
  if (lookback == 0) throw ConfigError("--lookback must be >= 1");
  if (model == ModelKind::dgcn) {
    if (lookback < 2) {
      throw ConfigError("--model dgcn requires --lookback >= 2 to build a graph (got --lookback " +
                        std::to_string(lookback) + ")");
    }
    if (pw + fw == 0) throw ConfigError("--pw and --fw cannot both be 0 with --model dgcn");
  } else if (same_speaker_edges) {
    throw ConfigError("--same-speaker-edges requires --model dgcn (got --model bilstm)");
  }
  if (uses_text(seq_type) && embeddings.empty()) {
    throw ConfigError("--seq-type " + std::string(to_string(seq_type)) + " requires --embeddings");
  }
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("--split must be in (0, 1)");
  if (epochs == 0) throw ConfigError("--epochs must be >= 1");
  if (batch == 0) throw ConfigError("--batch must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("--lr must be a positive number");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("--mu must be a positive number");
  if (embedding_dim == 0) throw ConfigError("--embedding-dim must be >= 1");
  if (max_tokens == 0) throw ConfigError("--max-tokens must be >= 1");
  if (metric == MetricMode::best_val && !(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("--metric best-val requires --validation-fraction in (0, 1)");
  }
}

std::string RunConfig::cell_name() const {
  const std::string window = std::to_string(lookback) + std::string(model_suffix(dependency));
  if (model == ModelKind::bilstm) return window;
  return std::string(same_speaker_edges ? "DGCN-PEC-S " : "DGCN-PEC ") + window;
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["dataset"] = dataset;
  j["labels"] = labels;
  j["model"] = to_string(model);
  j["seq_type"] = to_string(seq_type);
  j["lookback"] = lookback;
  j["dependency"] = to_string(dependency);
  j["balance"] = to_string(balance);
  j["mu"] = mu;
  j["weight_basis"] = to_string(weight_basis);
  j["pw"] = pw;
  j["fw"] = fw;
  j["same_speaker_edges"] = same_speaker_edges;
  j["pooling"] = to_string(pooling);
  j["attention"] = attention ? json(*attention) : json(nullptr);
  j["hidden"] = hidden;
  j["graph_hidden"] = graph_hidden;
  j["epochs"] = epochs;
  j["lr"] = lr;
  j["batch"] = batch;
  j["seed"] = seed;
  j["split"] = split;
  j["split_mode"] = to_string(split_mode);
  j["metric"] = to_string(metric);
  j["validation_fraction"] = validation_fraction;
  j["embeddings"] = embeddings;
  j["embedding_dim"] = embedding_dim;
  j["oov"] = to_string(oov);
  j["max_tokens"] = max_tokens;
  j["speaker"] = speaker;
  j["output"] = output;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  using Setter = std::function<void(const json&)>;
  auto str = [](const json& v) { return v.get<std::string>(); };
  const std::map<std::string, Setter> setters{
      {"dataset", [&](const json& v) { c.dataset = str(v); }},
      {"labels", [&](const json& v) { c.labels = str(v); }},
      {"model", [&](const json& v) { c.model = parse_model_kind(str(v)); }},
      {"seq_type", [&](const json& v) { c.seq_type = parse_seq_type(str(v)); }},
      {"lookback", [&](const json& v) { c.lookback = v.get<std::size_t>(); }},
      {"dependency", [&](const json& v) { c.dependency = parse_dependency(str(v)); }},
      {"balance", [&](const json& v) { c.balance = parse_balance(str(v)); }},
      {"mu", [&](const json& v) { c.mu = v.get<double>(); }},
      {"weight_basis", [&](const json& v) { c.weight_basis = parse_weight_basis(str(v)); }},
      {"pw", [&](const json& v) { c.pw = v.get<std::size_t>(); }},
      {"fw", [&](const json& v) { c.fw = v.get<std::size_t>(); }},
      {"same_speaker_edges", [&](const json& v) { c.same_speaker_edges = v.get<bool>(); }},
      {"pooling", [&](const json& v) { c.pooling = parse_pooling_mode(str(v)); }},
      {"attention",
       [&](const json& v) { c.attention = v.is_null() ? std::nullopt : std::optional<bool>(v.get<bool>()); }},
      {"hidden", [&](const json& v) { c.hidden = v.get<std::size_t>(); }},
      {"graph_hidden", [&](const json& v) { c.graph_hidden = v.get<std::size_t>(); }},
      {"epochs", [&](const json& v) { c.epochs = v.get<std::size_t>(); }},
      {"lr", [&](const json& v) { c.lr = v.get<double>(); }},
      {"batch", [&](const json& v) { c.batch = v.get<std::size_t>(); }},
      {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"split", [&](const json& v) { c.split = v.get<double>(); }},
      {"split_mode", [&](const json& v) { c.split_mode = parse_split_mode(str(v)); }},
      {"metric", [&](const json& v) { c.metric = parse_metric_mode(str(v)); }},
      {"validation_fraction", [&](const json& v) { c.validation_fraction = v.get<double>(); }},
      {"embeddings", [&](const json& v) { c.embeddings = str(v); }},
      {"embedding_dim", [&](const json& v) { c.embedding_dim = v.get<std::size_t>(); }},
      {"oov", [&](const json& v) { c.oov = parse_oov_policy(str(v)); }},
      {"max_tokens", [&](const json& v) { c.max_tokens = v.get<std::size_t>(); }},
      {"speaker", [&](const json& v) { c.speaker = str(v); }},
      {"output", [&](const json& v) { c.output = str(v); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key \"" + key + "\"");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError("config key \"" + key + "\": " + e.what());
    }
  }
  return c;
}

EmotionLabelSet resolve_labels(const std::string& name_or_path) {
  for (const auto& name : EmotionLabelSet::preset_names())
    if (name == name_or_path) return EmotionLabelSet::preset(name);
  std::ifstream in(name_or_path);
  if (!in) throw ConfigError("--labels \"" + name_or_path + "\" is neither a preset nor a readable label file");
  return EmotionLabelSet::from_json(in);
}

Corpus load_corpus(const std::string& path, const EmotionLabelSet& labels, Diagnostics* diagnostics) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset \"" + path + "\"");
  Corpus corpus = parse_corpus(in, labels, CorpusKind::group, diagnostics);
  corpus.kind = infer_kind(corpus);
  return corpus;
}

std::optional<EmbeddingTable> load_embedding_file(const RunConfig& config, Diagnostics* diagnostics) {
  if (config.embeddings.empty()) return std::nullopt;
  std::ifstream in(config.embeddings);
  if (!in) throw Error("cannot open embeddings \"" + config.embeddings + "\"");
  return load_embeddings(in, config.embedding_dim, config.oov, diagnostics);
}

RunSeeds derive_seeds(std::uint64_t seed) {
  return {Rng::derive(seed, 1), Rng::derive(seed, 2), Rng::derive(seed, 3), Rng::derive(seed, 4)};
}

SampleSet build_samples(const Corpus& corpus, const RunConfig& config) {
  SampleSet set = config.model == ModelKind::dgcn ? filter_poolable(extract_wlb(corpus, config.lookback), config.dependency)
                                                  : extract(corpus, config.lookback, config.dependency);
  if (config.speaker.empty()) return set;
  const auto id = corpus.speakers.find(config.speaker);
  if (!id) throw ConfigError("--speaker \"" + config.speaker + "\" does not occur in --dataset");
  SampleSet out = set.like();
  for (auto& s : set.samples)
    if (s.target_speaker == *id) out.samples.push_back(std::move(s));
  return out;
}

PreparedData prepare_data(const SampleSet& samples, const RunConfig& config) {
  const auto seeds = derive_seeds(config.seed);
  auto [train, test] = split(samples, config.split, seeds.split, config.split_mode);
  if (train.empty() || test.empty()) throw ConfigError("--split leaves an empty train or test set");
  PreparedData data;
  data.weights = weights_for(config.balance, label_distribution(train), config.mu, config.weight_basis);
  data.train = config.balance == BalanceStrategy::os ? oversample(train, seeds.oversample) : std::move(train);
  data.test = std::move(test);
  return data;
}

namespace {

TokenPipeline pipeline_for(const RunConfig& config) {
  TokenPipeline p;
  p.max_tokens = config.max_tokens;
  return p;
}

std::unique_ptr<Classifier> build_model(const RunConfig& config, std::size_t num_labels, const EmbeddingTable* table,
                                        std::optional<RelationRegistry> relations) {
  const auto seeds = derive_seeds(config.seed);
  if (config.model == ModelKind::bilstm) {
    SeqModelConfig mc;
    mc.seq_type = config.seq_type;
    mc.w = config.lookback;
    mc.num_labels = num_labels;
    mc.hidden = config.hidden;
    mc.attention = config.attention;
    mc.text = {table, pipeline_for(config)};
    mc.seed = seeds.init;
    return std::make_unique<SeqModel>(mc);
  }
  GraphModelConfig gc;
  gc.seq_type = config.seq_type;
  gc.w = config.lookback;
  gc.num_labels = num_labels;
  gc.pw = config.pw;
  gc.fw = config.fw;
  gc.same_speaker_edges_only = config.same_speaker_edges;
  gc.dependency = config.dependency;
  gc.pooling = config.pooling;
  gc.hidden = config.hidden;
  gc.graph_hidden = config.graph_hidden;
  gc.text = {table, pipeline_for(config)};
  gc.seed = seeds.init;
  return std::make_unique<GraphModel>(gc, std::move(*relations));
}

}  // namespace

std::unique_ptr<Classifier> make_model(const RunConfig& config, const SampleSet& train, std::size_t num_labels,
                                       const EmbeddingTable* table) {
  std::optional<RelationRegistry> relations;
  if (config.model == ModelKind::dgcn) relations = build_relation_registry(train, config.pw, config.fw);
  return build_model(config, num_labels, table, std::move(relations));
}

CellResult run_cell(const Corpus& corpus, const RunConfig& config, const EmbeddingTable* table) {
  config.validate();
  if (uses_text(config.seq_type) && table == nullptr) {
    throw ConfigError("--seq-type " + std::string(to_string(config.seq_type)) + " requires --embeddings");
  }
  const SampleSet samples = build_samples(corpus, config);
  if (samples.size() < 2) {
    throw ConfigError("only " + std::to_string(samples.size()) + " samples for " + config.cell_name() +
                      "; need at least 2");
  }
  auto data = prepare_data(samples, config);
  const auto seeds = derive_seeds(config.seed);

  CellResult cell;
  cell.config = config;
  cell.train_size = data.train.size();
  cell.test_size = data.test.size();
  cell.weights = data.weights;
  cell.model = make_model(config, data.train, corpus.label_set.size(), table);

  TrainOptions opts;
  opts.epochs = config.epochs;
  opts.lr = config.lr;
  opts.batch = config.batch;
  opts.seed = seeds.train;
  opts.weights = data.weights;
  opts.metric = config.metric;
  opts.validation_fraction = config.validation_fraction;
  cell.fit = fit(*cell.model, data.train, data.test, opts);

  const std::string fingerprint = nn::config_hash(config.to_json());
  for (auto* r : {&cell.fit.headline, &cell.fit.max_report, &cell.fit.final_report}) r->fingerprint = fingerprint;
  return cell;
}

std::string cell_id(const RunConfig& config) {
  std::string model(to_string(config.model));
  if (config.model == ModelKind::dgcn && config.same_speaker_edges) model += "-s";
  return model + "_" + std::string(to_string(config.seq_type)) + "_" + std::to_string(config.lookback) +
         std::string(model_suffix(config.dependency)) + "_" + std::string(to_string(config.balance));
}

GridCell summarize(const CellResult& cell) {
  GridCell g;
  g.config = cell.config;
  g.ok = true;
  g.train_size = cell.train_size;
  g.test_size = cell.test_size;
  g.headline = cell.fit.headline;
  g.max_report = cell.fit.max_report;
  g.final_report = cell.fit.final_report;
  g.history = cell.fit.history;
  return g;
}

ordered_json cell_report(const GridCell& cell, const EmotionLabelSet& labels) {
  ordered_json j;
  j["cell"] = cell_id(cell.config);
  j["name"] = cell.config.cell_name();
  j["config"] = cell.config.to_json();
  j["status"] = cell.ok ? "ok" : "error";
  if (!cell.ok) {
    j["error"] = cell.error;
    return j;
  }
  j["train_size"] = cell.train_size;
  j["test_size"] = cell.test_size;
  j["metric"] = to_string(cell.config.metric);
  if (cell.config.metric == MetricMode::max_test) {
    j["metric_note"] = "maximum test macro-F1 over epochs; optimistically biased";
  }
  j["headline"] = to_json(cell.headline, labels);
  j["max_epoch"] = to_json(cell.max_report, labels);
  j["final_epoch"] = to_json(cell.final_report, labels);
  return j;
}

nn::Checkpoint make_checkpoint(const RunConfig& config, const Classifier& model, const SampleSet& samples) {
  nn::Checkpoint ckpt;
  ckpt.config["run"] = config.to_json();
  if (const auto* g = dynamic_cast<const GraphModel*>(&model)) {
    ckpt.config["relations"] = g->relations().to_json(samples.speakers);
  }
  ckpt.labels = samples.label_set.names();
  ckpt.state = model.state();
  return ckpt;
}

std::unique_ptr<Classifier> restore_model(const nn::Checkpoint& ckpt, const SampleSet& samples,
                                          const EmbeddingTable* table) {
  if (!ckpt.config.contains("run")) throw ConfigError("checkpoint has no run config");
  const RunConfig config = RunConfig::from_json(ckpt.config.at("run"));
  if (ckpt.labels != samples.label_set.names()) throw ConfigError("checkpoint label set does not match --labels");
  std::optional<RelationRegistry> relations;
  if (config.model == ModelKind::dgcn) {
    if (!ckpt.config.contains("relations")) throw ConfigError("dgcn checkpoint has no relation registry");
    relations = RelationRegistry::from_json(ckpt.config.at("relations"), samples.speakers);
  }
  auto model = build_model(config, samples.label_set.size(), table, std::move(relations));
  nn::assign_parameters(model->state(), ckpt.state);
  return model;
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_axis(const json& v, const char* key, Parse parse) {
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("grid axis \"") + key + "\" must be a non-empty list");
  std::vector<T> out;
  for (const auto& item : v) out.push_back(parse(item));
  return out;
}

std::vector<std::size_t> parse_lookbacks(const json& v) {
  if (v.is_object()) {
    const auto from = v.at("from").get<std::size_t>();
    const auto to = v.at("to").get<std::size_t>();
    if (from == 0 || to < from) throw ConfigError("grid lookbacks range must satisfy 1 <= from <= to");
    std::vector<std::size_t> out;
    for (std::size_t w = from; w <= to; ++w) out.push_back(w);
    return out;
  }
  return parse_axis<std::size_t>(v, "lookbacks", [](const json& x) { return x.get<std::size_t>(); });
}

}  // namespace

GridSpec GridSpec::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("grid spec must be a JSON object");
  GridSpec spec;
  json base = json::object();
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "models") {
        spec.models = parse_axis<ModelKind>(v, "models", [](const json& x) { return parse_model_kind(x.get<std::string>()); });
      } else if (key == "seq_types") {
        spec.seq_types =
            parse_axis<SeqType>(v, "seq_types", [](const json& x) { return parse_seq_type(x.get<std::string>()); });
      } else if (key == "lookbacks") {
        spec.lookbacks = parse_lookbacks(v);
      } else if (key == "dependencies") {
        spec.dependencies = parse_axis<Dependency>(
            v, "dependencies", [](const json& x) { return parse_dependency(x.get<std::string>()); });
      } else if (key == "balances") {
        spec.balances =
            parse_axis<BalanceStrategy>(v, "balances", [](const json& x) { return parse_balance(x.get<std::string>()); });
      } else if (key == "same_speaker_edges") {
        spec.same_speaker_edges = parse_axis<bool>(v, "same_speaker_edges", [](const json& x) { return x.get<bool>(); });
      } else {
        base[key] = v;
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid spec: ") + e.what());
  }
  spec.base = RunConfig::from_json(base);
  return spec;
}

ordered_json GridSpec::to_json() const {
  ordered_json j = base.to_json();
  auto list = [](const auto& values) {
    ordered_json a = ordered_json::array();
    for (const auto& v : values) a.push_back(std::string(to_string(v)));
    return a;
  };
  j["models"] = list(models);
  j["seq_types"] = list(seq_types);
  j["lookbacks"] = lookbacks;
  j["dependencies"] = list(dependencies);
  j["balances"] = list(balances);
  ordered_json sse = ordered_json::array();
  for (bool b : same_speaker_edges) sse.push_back(b);
  j["same_speaker_edges"] = sse;
  return j;
}

std::vector<RunConfig> GridSpec::cells() const {
  std::vector<RunConfig> out;
  for (auto model : models) {
    const std::vector<bool> variants = model == ModelKind::dgcn ? same_speaker_edges : std::vector<bool>{false};
    for (bool sse : variants)
      for (auto seq : seq_types)
        for (auto w : lookbacks)
          for (auto dep : dependencies)
            for (auto bal : balances) {
              RunConfig c = base;
              c.model = model;
              c.same_speaker_edges = sse;
              c.seq_type = seq;
              c.lookback = w;
              c.dependency = dep;
              c.balance = bal;
              out.push_back(std::move(c));
            }
  }
  return out;
}

GridResult run_grid(const Corpus& corpus, const GridSpec& spec, const EmbeddingTable* table, std::size_t jobs) {
  const auto configs = spec.cells();
  GridResult grid;
  grid.cells.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        grid.cells[i] = summarize(run_cell(corpus, configs[i], table));
      } catch (const std::exception& e) {
        GridCell failed;
        failed.config = configs[i];
        failed.error = e.what();
        grid.cells[i] = std::move(failed);
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, configs.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return grid;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string model_column(const RunConfig& c) {
  std::string model(to_string(c.model));
  if (c.model == ModelKind::dgcn && c.same_speaker_edges) model += "-s";
  return model + "/" + std::string(to_string(c.seq_type)) + "/" + std::string(to_string(c.balance));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

void write_grid_csv(const GridResult& grid, std::ostream& out) {
  out << "cell,model,variant,seq_type,lookback,dependency,balance,train_size,test_size,macro_f1,epoch,"
         "macro_f1_max,macro_f1_final,accuracy,status,error\n";
  for (const auto& cell : grid.cells) {
    const auto& c = cell.config;
    out << cell_id(c) << ',' << to_string(c.model) << ',' << csv_field(c.cell_name()) << ',' << to_string(c.seq_type)
        << ',' << c.lookback << ',' << to_string(c.dependency) << ',' << to_string(c.balance) << ',';
    if (cell.ok) {
      out << cell.train_size << ',' << cell.test_size << ',' << fixed6(cell.headline.macro_f1) << ','
          << cell.headline.epoch << ',' << fixed6(cell.max_report.macro_f1) << ','
          << fixed6(cell.final_report.macro_f1) << ',' << fixed6(cell.headline.accuracy) << ",ok,\n";
    } else {
      out << ",,,,,,,error," << csv_field(cell.error) << '\n';
    }
  }
}

void write_grid_table(const GridResult& grid, Dependency dependency, std::ostream& out) {
  std::vector<std::string> columns;
  std::vector<std::size_t> rows;
  std::map<std::pair<std::size_t, std::string>, const GridCell*> index;
  for (const auto& cell : grid.cells) {
    if (cell.config.dependency != dependency) continue;
    const auto col = model_column(cell.config);
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    if (std::find(rows.begin(), rows.end(), cell.config.lookback) == rows.end()) rows.push_back(cell.config.lookback);
    index[{cell.config.lookback, col}] = &cell;
  }
  std::sort(rows.begin(), rows.end());
  out << "window";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (auto w : rows) {
    out << w << model_suffix(dependency);
    for (const auto& c : columns) {
      out << ',';
      const auto it = index.find({w, c});
      if (it != index.end() && it->second->ok) out << fixed6(it->second->headline.macro_f1);
    }
    out << '\n';
  }
}

void write_grid_outputs(const GridResult& grid, const EmotionLabelSet& labels, const std::string& directory) {
  const fs::path root(directory);
  fs::create_directories(root / "cells");
  {
    std::ostringstream csv;
    write_grid_csv(grid, csv);
    write_text(root / "grid.csv", csv.str());
  }
  for (auto dep : {Dependency::all, Dependency::self, Dependency::other}) {
    const bool present = std::any_of(grid.cells.begin(), grid.cells.end(),
                                     [&](const GridCell& c) { return c.config.dependency == dep; });
    if (!present) continue;
    std::ostringstream table;
    write_grid_table(grid, dep, table);
    write_text(root / ("table_" + std::string(to_string(dep)) + ".csv"), table.str());
  }
  for (const auto& cell : grid.cells) {
    const fs::path dir = root / "cells" / cell_id(cell.config);
    fs::create_directories(dir);
    write_text(dir / "report.json", cell_report(cell, labels).dump(2) + "\n");
    if (cell.ok) {
      std::ostringstream history;
      write_history_csv(cell.history, history);
      write_text(dir / "history.csv", history.str());
    }
  }
}

std::vector<SpeakerProfile> speaker_profiles(const Corpus& corpus, const ProfileSpec& spec,
                                             const EmbeddingTable* table) {
  std::vector<SpeakerProfile> out;
  for (const auto& name : spec.speakers) {
    SpeakerProfile profile;
    profile.speaker = name;
    if (!corpus.speakers.find(name)) {
      profile.warnings.push_back("speaker \"" + name + "\" does not occur in the dataset");
      out.push_back(std::move(profile));
      continue;
    }
    for (auto w : spec.lookbacks) {
      for (auto dep : spec.dependencies) {
        RunConfig c = spec.base;
        c.lookback = w;
        c.dependency = dep;
        c.speaker = name;
        const std::string label = c.cell_name();
        try {
          const auto cell = run_cell(corpus, c, table);
          SpeakerProfile::Entry e;
          e.model = label;
          e.lookback = w;
          e.dependency = dep;
          e.macro_f1 = cell.fit.headline.macro_f1;
          for (const auto& m : cell.fit.headline.per_class) e.f1.push_back(m.f1);
          e.train_size = cell.train_size;
          e.test_size = cell.test_size;
          profile.entries.push_back(std::move(e));
        } catch (const ConfigError& err) {
          profile.warnings.push_back(label + ": " + err.what());
        }
      }
    }
    if (profile.entries.empty()) profile.warnings.push_back("speaker \"" + name + "\" has no usable targets");
    out.push_back(std::move(profile));
  }
  return out;
}

ordered_json profiles_to_json(const std::vector<SpeakerProfile>& profiles, const EmotionLabelSet& labels) {
  ordered_json j;
  j["labels"] = labels.names();
  ordered_json speakers = ordered_json::array();
  for (const auto& p : profiles) {
    ordered_json s;
    s["speaker"] = p.speaker;
    ordered_json models = ordered_json::array();
    for (const auto& e : p.entries) {
      ordered_json m;
      m["model"] = e.model;
      m["lookback"] = e.lookback;
      m["dependency"] = to_string(e.dependency);
      m["macro_f1"] = e.macro_f1;
      m["f1"] = e.f1;
      m["train_size"] = e.train_size;
      m["test_size"] = e.test_size;
      models.push_back(std::move(m));
    }
    s["models"] = std::move(models);
    s["warnings"] = p.warnings;
    speakers.push_back(std::move(s));
  }
  j["speakers"] = std::move(speakers);
  return j;
}

}  // namespace pec
