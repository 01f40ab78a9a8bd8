#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pec/balance.hpp"
#include "pec/corpus.hpp"
#include "pec/embed.hpp"
#include "pec/graphmodel.hpp"
#include "pec/nn/checkpoint.hpp"
#include "pec/seqmodel.hpp"
#include "pec/training.hpp"

namespace pec {

enum class ModelKind { bilstm, dgcn };

std::string_view to_string(ModelKind m);
ModelKind parse_model_kind(std::string_view text);

/// Everything needed to reproduce one train/evaluate run.
struct RunConfig {
  std::string dataset;
  std::string labels = "dailydialog";
  ModelKind model = ModelKind::bilstm;
  SeqType seq_type = SeqType::E;
  std::size_t lookback = 1;
  Dependency dependency = Dependency::all;
  BalanceStrategy balance = BalanceStrategy::sw;
  double mu = 0.15;
  WeightBasis weight_basis = WeightBasis::total_samples;
  std::size_t pw = 3;
  std::size_t fw = 0;
  bool same_speaker_edges = false;
  PoolingMode pooling = PoolingMode::mean;
  /// Unset: off for E, on for T/ET.
  std::optional<bool> attention;
  /// 0 picks the per-seq-type default.
  std::size_t hidden = 0;
  std::size_t graph_hidden = 0;
  std::size_t epochs = 30;
  double lr = 1e-3;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  double split = 0.8;
  SplitMode split_mode = SplitMode::sample;
  MetricMode metric = MetricMode::max_test;
  double validation_fraction = 0.1;
  std::string embeddings;
  std::size_t embedding_dim = 300;
  OovPolicy oov = OovPolicy::zero;
  std::size_t max_tokens = 20;
  /// Restricts samples to targets uttered by this speaker.
  std::string speaker;
  std::string output;

  /// Throws ConfigError; cross-field messages name both fields.
  void validate() const;
  /// Label of the model variant, e.g. "2SLB" or "DGCN-PEC-S 3LB".
  std::string cell_name() const;

  nlohmann::ordered_json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j);
};

/// Loads the label set: a preset name or a path to a JSON label file.
EmotionLabelSet resolve_labels(const std::string& name_or_path);
/// Reads a JSONL corpus from disk and infers dyadic/group.
Corpus load_corpus(const std::string& path, const EmotionLabelSet& labels, Diagnostics* diagnostics = nullptr);
/// Empty path -> nullopt.
std::optional<EmbeddingTable> load_embedding_file(const RunConfig& config, Diagnostics* diagnostics = nullptr);

/// Seeds derived from RunConfig::seed for independent random streams.
struct RunSeeds {
  std::uint64_t split;
  std::uint64_t init;
  std::uint64_t train;
  std::uint64_t oversample;
};
RunSeeds derive_seeds(std::uint64_t seed);

/// The samples a config trains and evaluates on: wLB windows for dgcn
/// (filtered to samples the dependency can pool over), the dependency's own
/// windows for bilstm; then the optional speaker restriction.
SampleSet build_samples(const Corpus& corpus, const RunConfig& config);

struct PreparedData {
  SampleSet train;  // after oversampling when balance == os
  SampleSet test;
  ClassWeights weights;
};
PreparedData prepare_data(const SampleSet& samples, const RunConfig& config);

/// Builds an untrained model. dgcn needs `train` for its relation registry.
std::unique_ptr<Classifier> make_model(const RunConfig& config, const SampleSet& train, std::size_t num_labels,
                                       const EmbeddingTable* table);

struct CellResult {
  RunConfig config;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  ClassWeights weights;
  FitResult fit;
  std::unique_ptr<Classifier> model;
};

/// extraction -> split -> balance -> fit -> evaluate.
CellResult run_cell(const Corpus& corpus, const RunConfig& config, const EmbeddingTable* table);

nn::Checkpoint make_checkpoint(const RunConfig& config, const Classifier& model, const SampleSet& samples);
/// Rebuilds the model described by a checkpoint and loads its parameters.
/// `samples` supplies the speaker names for dgcn relations.
std::unique_ptr<Classifier> restore_model(const nn::Checkpoint& ckpt, const SampleSet& samples,
                                          const EmbeddingTable* table);

/// Cartesian grid over the axes; every other setting comes from `base`.
struct GridSpec {
  RunConfig base;
  std::vector<ModelKind> models{ModelKind::bilstm};
  std::vector<SeqType> seq_types{SeqType::E};
  std::vector<std::size_t> lookbacks{1};
  std::vector<Dependency> dependencies{Dependency::all};
  std::vector<BalanceStrategy> balances{BalanceStrategy::sw};
  /// Applies to dgcn cells only; bilstm cells run once.
  std::vector<bool> same_speaker_edges{false};

  /// Axis keys: models, seq_types, lookbacks (list or {"from","to"}),
  /// dependencies, balances, same_speaker_edges. Remaining keys are
  /// RunConfig fields for the base config.
  static GridSpec from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  /// Cells in axis order: model, same_speaker_edges, seq_type, lookback,
  /// dependency, balance.
  std::vector<RunConfig> cells() const;
};

struct GridCell {
  RunConfig config;
  bool ok = false;
  std::string error;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  EvalReport headline;
  EvalReport max_report;
  EvalReport final_report;
  EpochHistory history;
};

/// Directory-safe identifier, e.g. "bilstm_E_2SLB_sw" or "dgcn-s_ET_3LB_cw".
std::string cell_id(const RunConfig& config);

GridCell summarize(const CellResult& cell);
/// report.json body: config, sizes, headline/max/final reports.
nlohmann::ordered_json cell_report(const GridCell& cell, const EmotionLabelSet& labels);

struct GridResult {
  std::vector<GridCell> cells;
};

/// Runs every cell; a failing cell is recorded and the grid continues.
/// jobs > 1 runs cells concurrently; results stay in cell order.
GridResult run_grid(const Corpus& corpus, const GridSpec& spec, const EmbeddingTable* table, std::size_t jobs = 1);

/// Columns: cell,model,variant,seq_type,lookback,dependency,balance,
/// train_size,test_size,macro_f1,epoch,macro_f1_max,macro_f1_final,
/// accuracy,status,error
void write_grid_csv(const GridResult& grid, std::ostream& out);
/// One table per dependency: rows are lookbacks, columns model/seq_type/balance.
void write_grid_table(const GridResult& grid, Dependency dependency, std::ostream& out);
/// Writes grid.csv, table_<dependency>.csv, cells/<cell>/{report.json,history.csv}.
void write_grid_outputs(const GridResult& grid, const EmotionLabelSet& labels, const std::string& directory);

struct ProfileSpec {
  RunConfig base;
  std::vector<std::string> speakers;
  std::vector<std::size_t> lookbacks{1};
  std::vector<Dependency> dependencies{Dependency::self, Dependency::other};
};

struct SpeakerProfile {
  struct Entry {
    std::string model;  // e.g. "1SLB"
    std::size_t lookback = 0;
    Dependency dependency = Dependency::self;
    double macro_f1 = 0.0;
    std::vector<double> f1;  // one per label
    std::size_t train_size = 0;
    std::size_t test_size = 0;
  };
  std::string speaker;
  std::vector<Entry> entries;
  std::vector<std::string> warnings;
};

/// One model per speaker and variant, trained and evaluated on that
/// speaker's targets only. Speakers with too few targets get an empty
/// profile and a warning.
std::vector<SpeakerProfile> speaker_profiles(const Corpus& corpus, const ProfileSpec& spec,
                                             const EmbeddingTable* table);

nlohmann::ordered_json profiles_to_json(const std::vector<SpeakerProfile>& profiles, const EmotionLabelSet& labels);

}  // namespace pec
