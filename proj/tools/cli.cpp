#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pec/analytics.hpp"
#include "pec/error.hpp"
#include "pec/experiment.hpp"
#include "pec/importers.hpp"

namespace pec::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

using Copier = std::function<void(RunConfig&, const RunConfig&)>;

// Binds RunConfig fields to flags. Enum-valued flags are read as strings and
// converted in resolve(); apply_passed() copies only the flags given on the
// command line onto another config (used to override a grid spec).
class RunFlags {
 public:
  void attach_data(CLI::App& app) {
    add(app, "--dataset", &RunConfig::dataset, "Corpus in JSONL form");
    add(app, "--labels", &RunConfig::labels, "Label-set preset (" + presets() + ") or JSON label file");
  }

  void attach_model(CLI::App& app) {
    add_enum(app, "--model", model_, &RunConfig::model, "Model family: bilstm | dgcn");
    add_enum(app, "--seq-type", seq_type_, &RunConfig::seq_type, "Input sequence: E | T | ET");
    add(app, "--lookback", &RunConfig::lookback, "Window length w");
    add_enum(app, "--dependency", dependency_, &RunConfig::dependency, "Window dependency: all | self | other");
    add_enum(app, "--balance", balance_, &RunConfig::balance, "Imbalance handling: none | cw | sw | os");
    add(app, "--mu", &RunConfig::mu, "Smooth-weight constant mu");
    add_enum(app, "--weight-basis", weight_basis_, &RunConfig::weight_basis,
             "Meaning of |L| in the weight formulas: total | classes");
    add(app, "--pw", &RunConfig::pw, "Past window for graph edges (dgcn)");
    add(app, "--fw", &RunConfig::fw, "Future window for graph edges (dgcn)");
    auto* sse = app.add_flag("--same-speaker-edges", c_.same_speaker_edges,
                             "Keep only edges between turns of the same speaker (DGCN-PEC-S)");
    copiers_.push_back({sse, [](RunConfig& d, const RunConfig& s) { d.same_speaker_edges = s.same_speaker_edges; }});
    add_enum(app, "--pooling", pooling_, &RunConfig::pooling, "Node pooling for self/other (dgcn): mean | most-recent");
    add_enum(app, "--attention", attention_, &RunConfig::attention,
             "Attention pooling: auto (off for E, on for T/ET) | on | off");
    add(app, "--hidden", &RunConfig::hidden, "Hidden size; 0 = 64 for E, 300 for T/ET");
    add(app, "--graph-hidden", &RunConfig::graph_hidden, "RGCN output size; 0 = hidden size");
    add(app, "--epochs", &RunConfig::epochs, "Training epochs");
    add(app, "--lr", &RunConfig::lr, "Adam learning rate");
    add(app, "--batch", &RunConfig::batch, "Minibatch size");
    add(app, "--seed", &RunConfig::seed, "Seed for split, initialisation, shuffling and oversampling");
    add(app, "--split", &RunConfig::split, "Training fraction");
    add_enum(app, "--split-mode", split_mode_, &RunConfig::split_mode, "Split unit: sample | conversation");
    add_enum(app, "--metric", metric_, &RunConfig::metric,
             "Headline epoch: max (max test macro-F1, optimistic) | final | best-val");
    add(app, "--validation-fraction", &RunConfig::validation_fraction, "Validation share for --metric best-val");
    add(app, "--embeddings", &RunConfig::embeddings, "Word vectors in text format (required for T/ET)");
    add(app, "--embedding-dim", &RunConfig::embedding_dim, "Word vector dimension");
    add_enum(app, "--oov", oov_, &RunConfig::oov, "Out-of-vocabulary vector: zero | mean");
    add(app, "--max-tokens", &RunConfig::max_tokens, "Tokens kept per utterance");
    add(app, "--speaker", &RunConfig::speaker, "Restrict to targets uttered by this speaker");
  }

  RunConfig resolve() const {
    RunConfig c = c_;
    c.model = parse_model_kind(model_);
    c.seq_type = parse_seq_type(seq_type_);
    c.dependency = parse_dependency(dependency_);
    c.balance = parse_balance(balance_);
    c.weight_basis = parse_weight_basis(weight_basis_);
    c.pooling = parse_pooling_mode(pooling_);
    c.split_mode = parse_split_mode(split_mode_);
    c.metric = parse_metric_mode(metric_);
    c.oov = parse_oov_policy(oov_);
    if (attention_ == "auto") {
      c.attention.reset();
    } else if (attention_ == "on" || attention_ == "off") {
      c.attention = attention_ == "on";
    } else {
      throw ConfigError("--attention must be auto, on or off; got \"" + attention_ + "\"");
    }
    return c;
  }

  void apply_passed(RunConfig& target) const {
    const RunConfig resolved = resolve();
    for (const auto& [opt, copy] : copiers_)
      if (opt->count() > 0) copy(target, resolved);
  }

 private:
  static std::string presets() {
    std::string out;
    for (const auto& n : EmotionLabelSet::preset_names()) out += (out.empty() ? "" : ", ") + n;
    return out;
  }

  template <typename T>
  void add(CLI::App& app, const std::string& flag, T RunConfig::*field, const std::string& desc) {
    auto* opt = app.add_option(flag, c_.*field, desc)->capture_default_str();
    copiers_.push_back({opt, [field](RunConfig& d, const RunConfig& s) { d.*field = s.*field; }});
  }

  template <typename T>
  void add_enum(CLI::App& app, const std::string& flag, std::string& holder, T RunConfig::*field,
                const std::string& desc) {
    auto* opt = app.add_option(flag, holder, desc)->capture_default_str();
    copiers_.push_back({opt, [field](RunConfig& d, const RunConfig& s) { d.*field = s.*field; }});
  }

  RunConfig c_;
  std::string model_ = "bilstm";
  std::string seq_type_ = "E";
  std::string dependency_ = "all";
  std::string balance_ = "sw";
  std::string weight_basis_ = "total";
  std::string pooling_ = "mean";
  std::string attention_ = "auto";
  std::string split_mode_ = "sample";
  std::string metric_ = "max";
  std::string oov_ = "zero";
  std::vector<std::pair<CLI::Option*, Copier>> copiers_;
};

std::vector<std::size_t> parse_lookback_list(const std::vector<std::string>& items, const char* flag) {
  std::vector<std::size_t> out;
  for (const auto& item : items) {
    try {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoul(item));
        continue;
      }
      const auto from = std::stoul(item.substr(0, dash));
      const auto to = std::stoul(item.substr(dash + 1));
      if (to < from) throw ConfigError(std::string(flag) + " range \"" + item + "\" is empty");
      for (auto w = from; w <= to; ++w) out.push_back(w);
    } catch (const std::logic_error&) {
      throw ConfigError(std::string(flag) + " expects integers or ranges like 1-4; got \"" + item + "\"");
    }
  }
  for (auto w : out)
    if (w == 0) throw ConfigError(std::string(flag) + " values must be >= 1");
  return out;
}

ordered_json echo_options(const CLI::App& cmd) {
  ordered_json j;
  j["subcommand"] = cmd.get_name();
  ordered_json flags;
  for (const auto* opt : cmd.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_type_size() == 0) {
      flags[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto& r = opt->results();
      flags[name] = r.size() == 1 ? ordered_json(r.front()) : ordered_json(r);
    } else {
      flags[name] = opt->get_default_str();
    }
  }
  j["flags"] = flags;
  return j;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_config(const fs::path& dir, ordered_json config) {
  write_file(dir / "config.json", config.dump(2) + "\n");
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_warnings(const Diagnostics& d, std::ostream& err) {
  for (const auto& w : d.warnings) err << "warning: " << w << '\n';
}

std::ifstream open_input(const std::string& path, const char* flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(std::string("cannot open ") + flag + " \"" + path + "\"");
  return in;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
};

// --- import ---------------------------------------------------------------

struct ImportArgs {
  std::string format;
  std::string input;
  std::string emotions;
  std::string labels;
  std::string output = "pec-run";
};

void cmd_import(const ImportArgs& a, const CLI::App& cmd, Context& ctx) {
  Corpus corpus;
  if (a.format == "dailydialog") {
    if (a.emotions.empty()) throw ConfigError("--format dailydialog requires --emotions");
    auto text = open_input(a.input, "--input");
    auto emo = open_input(a.emotions, "--emotions");
    corpus = importers::dailydialog(text, emo);
  } else if (a.format == "meld") {
    auto in = open_input(a.input, "--input");
    corpus = importers::meld_csv(in, resolve_labels(a.labels.empty() ? "meld" : a.labels));
  } else if (a.format == "emotionlines") {
    auto in = open_input(a.input, "--input");
    corpus = importers::emotionlines_json(in, resolve_labels(a.labels.empty() ? "friends" : a.labels));
  } else {
    throw ConfigError("--format must be dailydialog, meld or emotionlines; got \"" + a.format + "\"");
  }
  const fs::path dir(a.output);
  std::ostringstream body;
  serialize_corpus(corpus, body);
  write_file(dir / "corpus.jsonl", body.str());
  write_config(dir, echo_options(cmd));

  const auto report = validate(corpus);
  for (const auto& v : report.violations) ctx.err << "warning: " << v.conversation_id << ": " << v.message << '\n';
  ctx.out << "imported " << corpus.conversations.size() << " conversations, " << corpus.utterance_count()
          << " utterances, " << corpus.speakers.size() << " speakers (" << to_string(corpus.kind) << ") -> "
          << (dir / "corpus.jsonl").string() << '\n';
}

// --- stats ----------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> lookbacks;
  std::string output = "pec-run";
};

void cmd_stats(const RunConfig& rc, const StatsArgs& a, const CLI::App& cmd, Context& ctx) {
  const auto labels = resolve_labels(rc.labels);
  Diagnostics diag;
  const auto corpus = load_corpus(rc.dataset, labels, &diag);
  print_warnings(diag, ctx.err);
  const auto dist = class_distribution(corpus);
  const auto ws = parse_lookback_list(a.lookbacks, "--lookbacks");

  ordered_json j;
  j["conversations"] = corpus.conversations.size();
  j["utterances"] = corpus.utterance_count();
  j["speakers"] = corpus.speakers.size();
  j["kind"] = to_string(corpus.kind);
  ordered_json classes;
  for (std::size_t l = 0; l < labels.size(); ++l) classes[labels.name(static_cast<LabelId>(l))] = dist.counts[l];
  j["classes"] = classes;

  ctx.out << "conversations: " << corpus.conversations.size() << "\nutterances: " << corpus.utterance_count()
          << "\nspeakers: " << corpus.speakers.size() << "\nkind: " << to_string(corpus.kind) << "\n\n";
  std::vector<LabelDistribution> targets;
  for (auto w : ws) targets.push_back(label_distribution(extract_wlb(corpus, w)));
  ctx.out << "label,count,percent";
  for (auto w : ws) ctx.out << ",targets_" << w << "LB";
  ctx.out << '\n';
  const double total = static_cast<double>(std::max<std::int64_t>(1, dist.total()));
  for (std::size_t l = 0; l < labels.size(); ++l) {
    ctx.out << labels.name(static_cast<LabelId>(l)) << ',' << dist.counts[l] << ','
            << fixed(100.0 * static_cast<double>(dist.counts[l]) / total, 2);
    for (const auto& t : targets) ctx.out << ',' << t.counts[l];
    ctx.out << '\n';
  }
  ctx.out << "total," << dist.total() << ",100.00";
  for (const auto& t : targets) ctx.out << ',' << t.total();
  ctx.out << '\n';

  ordered_json tj;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    ordered_json row;
    for (std::size_t l = 0; l < labels.size(); ++l) row[labels.name(static_cast<LabelId>(l))] = targets[i].counts[l];
    tj[std::to_string(ws[i]) + "LB"] = row;
  }
  if (!ws.empty()) j["targets"] = tj;

  const fs::path dir(a.output);
  write_file(dir / "stats.json", j.dump(2) + "\n");
  auto config = echo_options(cmd);
  config["run"] = rc.to_json();
  write_config(dir, config);
}

// --- transitions ----------------------------------------------------------

struct TransitionArgs {
  std::size_t gap = 1;
  std::string pairing = "positional";
  bool alternating_only = false;
  std::string output = "pec-run";
};

void cmd_transitions(const RunConfig& rc, const TransitionArgs& a, const CLI::App& cmd, Context& ctx) {
  const auto labels = resolve_labels(rc.labels);
  Diagnostics diag;
  const auto corpus = load_corpus(rc.dataset, labels, &diag);
  print_warnings(diag, ctx.err);
  TransitionOptions opts;
  opts.gap = a.gap;
  opts.pairing = parse_pairing(a.pairing);
  opts.alternating_dyadic_only = a.alternating_only;
  const auto m = transition_matrix(corpus, opts);

  std::ostringstream csv;
  write_transition_csv(m, labels, csv);
  std::ostringstream js;
  write_transition_json(m, labels, opts, js);
  const fs::path dir(a.output);
  write_file(dir / "transitions.csv", csv.str());
  write_file(dir / "transitions.json", js.str());
  write_config(dir, echo_options(cmd));
  ctx.out << csv.str();
}

// --- extract --------------------------------------------------------------

struct ExtractArgs {
  std::size_t lookback = 1;
  std::string dependency = "all";
  std::string output = "pec-run";
};

void cmd_extract(const RunConfig& rc, const ExtractArgs& a, const CLI::App& cmd, Context& ctx) {
  const auto dep = parse_dependency(a.dependency);
  if (a.lookback == 0) throw ConfigError("--lookback must be >= 1");
  const auto labels = resolve_labels(rc.labels);
  Diagnostics diag;
  const auto corpus = load_corpus(rc.dataset, labels, &diag);
  print_warnings(diag, ctx.err);
  const auto set = extract(corpus, a.lookback, dep);

  std::ostringstream body;
  serialize_samples(set, body);
  const fs::path dir(a.output);
  write_file(dir / "samples.jsonl", body.str());
  write_config(dir, echo_options(cmd));

  const auto dist = label_distribution(set);
  ctx.out << set.size() << " samples (" << a.lookback << model_suffix(dep) << ")\n";
  for (std::size_t l = 0; l < labels.size(); ++l)
    ctx.out << labels.name(static_cast<LabelId>(l)) << ',' << dist.counts[l] << '\n';
}

// --- train ----------------------------------------------------------------

void cmd_train(RunConfig rc, const std::string& output, const CLI::App& cmd, Context& ctx) {
  rc.output = output;
  rc.validate();
  const auto labels = resolve_labels(rc.labels);
  Diagnostics diag;
  const auto corpus = load_corpus(rc.dataset, labels, &diag);
  const auto table = load_embedding_file(rc, &diag);
  print_warnings(diag, ctx.err);

  const fs::path dir(output);
  auto config = echo_options(cmd);
  config["run"] = rc.to_json();
  write_config(dir, config);

  const auto cell = run_cell(corpus, rc, table ? &*table : nullptr);
  for (auto l : cell.weights.zero_count)
    ctx.err << "warning: label " << labels.name(l) << " has no training samples\n";
  const auto summary = summarize(cell);

  std::ostringstream history;
  write_history_csv(cell.fit.history, history);
  write_file(dir / "history.csv", history.str());
  write_file(dir / "report.json", cell_report(summary, labels).dump(2) + "\n");
  std::ostringstream ckpt;
  nn::save_checkpoint(make_checkpoint(rc, *cell.model, build_samples(corpus, rc)), ckpt);
  write_file(dir / "checkpoint.json", ckpt.str());

  ctx.out << rc.cell_name() << " " << to_string(rc.seq_type) << " " << to_string(rc.balance) << ": macro-F1 ("
          << to_string(rc.metric) << ") " << fixed(summary.headline.macro_f1) << " at epoch "
          << summary.headline.epoch << ", final " << fixed(summary.final_report.macro_f1) << " [train "
          << cell.train_size << ", test " << cell.test_size << "]\n";
  if (rc.metric == MetricMode::max_test) {
    ctx.out << "note: the max-epoch metric selects on test data and is optimistically biased\n";
  }
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint;
  std::string dataset;
  std::string labels;
  std::string embeddings;
  bool all = false;
  std::string output = "pec-run";
};

void cmd_evaluate(const EvaluateArgs& a, const CLI::App& cmd, Context& ctx) {
  auto in = open_input(a.checkpoint, "--checkpoint");
  const auto ckpt = nn::load_checkpoint(in);
  RunConfig rc = RunConfig::from_json(ckpt.config.at("run"));
  if (!a.dataset.empty()) rc.dataset = a.dataset;
  if (!a.labels.empty()) rc.labels = a.labels;
  if (!a.embeddings.empty()) rc.embeddings = a.embeddings;

  const auto labels = resolve_labels(rc.labels);
  Diagnostics diag;
  const auto corpus = load_corpus(rc.dataset, labels, &diag);
  const auto table = load_embedding_file(rc, &diag);
  print_warnings(diag, ctx.err);

  const auto samples = build_samples(corpus, rc);
  if (samples.empty()) throw ConfigError("no samples to evaluate for " + rc.cell_name());
  const SampleSet test = a.all ? samples : prepare_data(samples, rc).test;
  const auto model = restore_model(ckpt, samples, table ? &*table : nullptr);
  auto report = evaluate([&](const Sample& s) { return model->predict(s).label; }, test);
  report.fingerprint = nn::config_hash(rc.to_json());

  const fs::path dir(a.output);
  auto config = echo_options(cmd);
  config["run"] = rc.to_json();
  write_config(dir, config);
  ordered_json j;
  j["checkpoint"] = a.checkpoint;
  j["scope"] = a.all ? "all" : "test";
  j["samples"] = test.size();
  j["report"] = to_json(report, labels);
  write_file(dir / "report.json", j.dump(2) + "\n");
  ctx.out << rc.cell_name() << ": macro-F1 " << fixed(report.macro_f1) << ", accuracy " << fixed(report.accuracy)
          << " on " << test.size() << " samples\n";
}

// --- grid -----------------------------------------------------------------

struct GridArgs {
  std::string spec;
  std::vector<std::string> models;
  std::vector<std::string> seq_types;
  std::vector<std::string> lookbacks;
  std::vector<std::string> dependencies;
  std::vector<std::string> balances;
  std::vector<std::string> variants;
  std::size_t jobs = 1;
  std::string output = "pec-run";
};

template <typename T, typename Parse>
void override_axis(std::vector<T>& axis, const std::vector<std::string>& values, Parse parse) {
  if (values.empty()) return;
  axis.clear();
  for (const auto& v : values) axis.push_back(parse(v));
}

void cmd_grid(const RunFlags& flags, const GridArgs& a, const CLI::App& cmd, Context& ctx) {
  GridSpec spec;
  if (!a.spec.empty()) {
    auto in = open_input(a.spec, "--spec");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("--spec: " + std::string(e.what()));
    }
    spec = GridSpec::from_json(j);
    flags.apply_passed(spec.base);
  } else {
    spec.base = flags.resolve();
  }
  override_axis(spec.models, a.models, [](const std::string& s) { return parse_model_kind(s); });
  override_axis(spec.seq_types, a.seq_types, [](const std::string& s) { return parse_seq_type(s); });
  if (!a.lookbacks.empty()) spec.lookbacks = parse_lookback_list(a.lookbacks, "--lookbacks");
  override_axis(spec.dependencies, a.dependencies, [](const std::string& s) { return parse_dependency(s); });
  override_axis(spec.balances, a.balances, [](const std::string& s) { return parse_balance(s); });
  override_axis(spec.same_speaker_edges, a.variants, [](const std::string& s) {
    if (s == "full") return false;
    if (s == "s") return true;
    throw ConfigError("--dgcn-variants must list full and/or s; got \"" + s + "\"");
  });
  if (a.jobs == 0) throw ConfigError("--jobs must be >= 1");
  if (spec.base.dataset.empty()) throw ConfigError("grid requires --dataset (flag or spec key \"dataset\")");

  const auto labels = resolve_labels(spec.base.labels);
  Diagnostics diag;
  const auto corpus = load_corpus(spec.base.dataset, labels, &diag);
  const auto table = load_embedding_file(spec.base, &diag);
  print_warnings(diag, ctx.err);

  const fs::path dir(a.output);
  auto config = echo_options(cmd);
  config["grid"] = spec.to_json();
  write_config(dir, config);

  const auto grid = run_grid(corpus, spec, table ? &*table : nullptr, a.jobs);
  write_grid_outputs(grid, labels, a.output);
  std::size_t failed = 0;
  for (const auto& cell : grid.cells) {
    ctx.out << cell_id(cell.config) << ": ";
    if (cell.ok) {
      ctx.out << fixed(cell.headline.macro_f1) << '\n';
    } else {
      ++failed;
      ctx.out << "error: " << cell.error << '\n';
    }
  }
  ctx.out << grid.cells.size() << " cells, " << failed << " failed -> " << (dir / "grid.csv").string() << '\n';
}

// --- profile --------------------------------------------------------------

struct ProfileArgs {
  std::vector<std::string> speakers;
  std::vector<std::string> lookbacks{"1"};
  std::vector<std::string> dependencies{"self", "other"};
  std::string output = "pec-run";
};

void cmd_profile(RunConfig rc, const ProfileArgs& a, const CLI::App& cmd, Context& ctx) {
  rc.output = a.output;
  ProfileSpec spec;
  spec.base = rc;
  spec.speakers = a.speakers;
  spec.lookbacks = parse_lookback_list(a.lookbacks, "--lookbacks");
  spec.dependencies.clear();
  for (const auto& d : a.dependencies) spec.dependencies.push_back(parse_dependency(d));
  for (auto w : spec.lookbacks) {
    RunConfig probe = rc;
    probe.lookback = w;
    probe.validate();
  }

  const auto labels = resolve_labels(rc.labels);
  Diagnostics diag;
  const auto corpus = load_corpus(rc.dataset, labels, &diag);
  const auto table = load_embedding_file(rc, &diag);
  print_warnings(diag, ctx.err);

  const fs::path dir(a.output);
  auto config = echo_options(cmd);
  config["run"] = rc.to_json();
  write_config(dir, config);

  const auto profiles = speaker_profiles(corpus, spec, table ? &*table : nullptr);
  write_file(dir / "profiles.json", profiles_to_json(profiles, labels).dump(2) + "\n");
  for (const auto& p : profiles) {
    for (const auto& w : p.warnings) ctx.err << "warning: " << p.speaker << ": " << w << '\n';
    for (const auto& e : p.entries) ctx.out << p.speaker << ' ' << e.model << ": " << fixed(e.macro_f1) << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Next-turn emotion forecasting in conversations", "pec"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto* import_cmd = app.add_subcommand("import", "Convert a public corpus release to JSONL");
  ImportArgs import_args;
  import_cmd->add_option("--format", import_args.format, "dailydialog | meld | emotionlines")->required();
  import_cmd->add_option("--input", import_args.input, "Dialogue text (dailydialog), csv (meld) or json")->required();
  import_cmd->add_option("--emotions", import_args.emotions, "dialogues_emotion.txt (dailydialog)");
  import_cmd->add_option("--labels", import_args.labels, "Label set; defaults to meld or friends by format");
  import_cmd->add_option("--output", import_args.output, "Output directory")->capture_default_str();

  RunFlags stats_flags;
  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Class distribution of a corpus");
  stats_flags.attach_data(*stats_cmd);
  stats_cmd->add_option("--lookbacks", stats_args.lookbacks, "Also count wLB targets for these w (e.g. 1-4)")
      ->delimiter(',');
  stats_cmd->add_option("--output", stats_args.output, "Output directory")->capture_default_str();

  RunFlags trans_flags;
  TransitionArgs trans_args;
  auto* trans_cmd = app.add_subcommand("transitions", "Emotion transition matrix at a turn gap");
  trans_flags.attach_data(*trans_cmd);
  trans_cmd->add_option("--gap", trans_args.gap, "Turn distance g")->capture_default_str();
  trans_cmd->add_option("--pairing", trans_args.pairing, "positional | same-speaker")->capture_default_str();
  trans_cmd->add_flag("--alternating-only", trans_args.alternating_only,
                      "Only strictly alternating two-speaker conversations");
  trans_cmd->add_option("--output", trans_args.output, "Output directory")->capture_default_str();

  RunFlags extract_flags;
  ExtractArgs extract_args;
  auto* extract_cmd = app.add_subcommand("extract", "Write lookback samples as JSONL");
  extract_flags.attach_data(*extract_cmd);
  extract_cmd->add_option("--lookback", extract_args.lookback, "Window length w")->capture_default_str();
  extract_cmd->add_option("--dependency", extract_args.dependency, "all | self | other")->capture_default_str();
  extract_cmd->add_option("--output", extract_args.output, "Output directory")->capture_default_str();

  RunFlags train_flags;
  std::string train_output = "pec-run";
  auto* train_cmd = app.add_subcommand("train", "Train and evaluate one model");
  train_flags.attach_data(*train_cmd);
  train_flags.attach_model(*train_cmd);
  train_cmd->add_option("--output", train_output, "Output directory")->capture_default_str();

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a saved checkpoint");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint.json written by train")->required();
  eval_cmd->add_option("--dataset", eval_args.dataset, "Corpus (default: the one in the checkpoint)");
  eval_cmd->add_option("--labels", eval_args.labels, "Label set (default: the one in the checkpoint)");
  eval_cmd->add_option("--embeddings", eval_args.embeddings, "Word vectors (default: the checkpoint's)");
  eval_cmd->add_flag("--all", eval_args.all, "Evaluate on every sample instead of the test split");
  eval_cmd->add_option("--output", eval_args.output, "Output directory")->capture_default_str();

  RunFlags grid_flags;
  GridArgs grid_args;
  auto* grid_cmd = app.add_subcommand("grid", "Run an experiment grid");
  grid_flags.attach_data(*grid_cmd);
  grid_flags.attach_model(*grid_cmd);
  grid_cmd->add_option("--spec", grid_args.spec, "Grid spec JSON; flags given explicitly override it");
  grid_cmd->add_option("--models", grid_args.models, "Axis: bilstm,dgcn")->delimiter(',');
  grid_cmd->add_option("--seq-types", grid_args.seq_types, "Axis: E,T,ET")->delimiter(',');
  grid_cmd->add_option("--lookbacks", grid_args.lookbacks, "Axis: list or ranges, e.g. 1-5")->delimiter(',');
  grid_cmd->add_option("--dependencies", grid_args.dependencies, "Axis: all,self,other")->delimiter(',');
  grid_cmd->add_option("--balances", grid_args.balances, "Axis: none,cw,sw,os")->delimiter(',');
  grid_cmd->add_option("--dgcn-variants", grid_args.variants, "Axis for dgcn cells: full,s")->delimiter(',');
  grid_cmd->add_option("--jobs", grid_args.jobs, "Cells run in parallel")->capture_default_str();
  grid_cmd->add_option("--output", grid_args.output, "Output directory")->capture_default_str();

  RunFlags profile_flags;
  ProfileArgs profile_args;
  auto* profile_cmd = app.add_subcommand("profile", "Per-speaker wSLB/wOLB F1 profiles");
  profile_flags.attach_data(*profile_cmd);
  profile_flags.attach_model(*profile_cmd);
  profile_cmd->add_option("--speakers", profile_args.speakers, "Speaker names")->delimiter(',')->required();
  profile_cmd->add_option("--lookbacks", profile_args.lookbacks, "Window lengths")
      ->delimiter(',')
      ->capture_default_str();
  profile_cmd->add_option("--dependencies", profile_args.dependencies, "self,other")
      ->delimiter(',')
      ->capture_default_str();
  profile_cmd->add_option("--output", profile_args.output, "Output directory")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  Context ctx{out, err};
  auto require_dataset = [](const RunConfig& rc) {
    if (rc.dataset.empty()) throw ConfigError("--dataset is required");
    return rc;
  };
  try {
    if (import_cmd->parsed()) cmd_import(import_args, *import_cmd, ctx);
    if (stats_cmd->parsed()) cmd_stats(require_dataset(stats_flags.resolve()), stats_args, *stats_cmd, ctx);
    if (trans_cmd->parsed()) cmd_transitions(require_dataset(trans_flags.resolve()), trans_args, *trans_cmd, ctx);
    if (extract_cmd->parsed())
      cmd_extract(require_dataset(extract_flags.resolve()), extract_args, *extract_cmd, ctx);
    if (train_cmd->parsed()) cmd_train(require_dataset(train_flags.resolve()), train_output, *train_cmd, ctx);
    if (eval_cmd->parsed()) cmd_evaluate(eval_args, *eval_cmd, ctx);
    if (grid_cmd->parsed()) cmd_grid(grid_flags, grid_args, *grid_cmd, ctx);
    if (profile_cmd->parsed())
      cmd_profile(require_dataset(profile_flags.resolve()), profile_args, *profile_cmd, ctx);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const UnknownLabelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace pec::cli
