#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nehs/alignment.hpp"
#include "nehs/tagger.hpp"

namespace nehs::cli {

using std::filesystem::path;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  path out_dir = ".";
  bool lowercase = false;

  // `p` if absolute, else out_dir / p.
  path output(const path& p) const;
};

struct FitOptions {
  path embeddings;
  path dictionary;
  std::vector<std::string> types{"Per", "Loc", "Org"};
  std::string center = "mean";
  std::optional<std::size_t> limit;
  path output = "spheres.json";
  path report = "fit_report.json";
};

struct AlignOptions {
  path source;
  path target;
  std::string mode = "adversarial";
  std::optional<path> lexicon;
  std::optional<path> eval_lexicon;
  std::size_t k = 1;
  std::optional<std::size_t> limit;
  AdversarialConfig adversarial;
  std::string init = "identity";
  std::size_t progress_every = 0;
  path output = "alignment.json";
  path report = "align_report.json";
};

struct TransferOptions {
  path map;
  path spheres;
  path source;
  path target;
  path target_dictionary;
  std::string center = "mean";
  std::optional<std::size_t> limit;
  path output = "transferred_spheres.json";
  path report = "transfer_report.json";
};

struct FeaturizeOptions {
  path embeddings;
  path spheres;
  path corpus;
  std::optional<std::size_t> limit;
  path output = "features.tsv";
  path report = "featurize_report.json";
};

struct TagTrainOptions {
  path train;
  std::optional<path> embeddings;
  std::optional<path> features;
  bool no_lexical = false;
  TrainConfig config;
  bool no_shuffle = false;
  std::optional<std::size_t> limit;
  path output = "crf.json";
  path report = "tag_train_report.json";
};

struct TagEvalOptions {
  path test;
  path baseline;
  std::optional<path> hypersphere;
  std::optional<path> embeddings;
  std::optional<path> features;
  std::optional<std::size_t> limit;
  path report = "tag_eval_report.json";
};

struct ProjectOptions {
  path embeddings;
  std::optional<path> dictionary;
  std::size_t vocabulary = 0;
  std::size_t dim = 2;
  std::optional<std::size_t> limit;
  path output = "projection.csv";
};

void cmd_fit(const GlobalOptions& g, const FitOptions& o, std::ostream& out);
void cmd_align(const GlobalOptions& g, const AlignOptions& o, std::ostream& out, std::ostream& err);
void cmd_transfer(const GlobalOptions& g, const TransferOptions& o, std::ostream& out);
void cmd_featurize(const GlobalOptions& g, const FeaturizeOptions& o, std::ostream& out);
void cmd_tag_train(const GlobalOptions& g, const TagTrainOptions& o, std::ostream& out);
void cmd_tag_eval(const GlobalOptions& g, const TagEvalOptions& o, std::ostream& out);
void cmd_project(const GlobalOptions& g, const ProjectOptions& o, std::ostream& out);

}  // namespace nehs::cli
