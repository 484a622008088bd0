#include "nehs/commands.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "nehs/corpus.hpp"
#include "nehs/dictionary.hpp"
#include "nehs/embeddings.hpp"
#include "nehs/error.hpp"
#include "nehs/features.hpp"
#include "nehs/hypersphere.hpp"
#include "nehs/numeric.hpp"
#include "nehs/pipeline.hpp"
#include "nehs/prf.hpp"
#include "nehs/text_io.hpp"

namespace nehs::cli {

using nlohmann::json;
using nlohmann::ordered_json;

path GlobalOptions::output(const path& p) const { return p.is_absolute() ? p : out_dir / p; }

namespace {

LookupPolicy policy_of(const GlobalOptions& g) { return LookupPolicy{g.lowercase}; }

CenterMethod center_method(const std::string& name) {
  if (name == "mean") return CenterMethod::Mean;
  if (name == "median") return CenterMethod::Median;
  throw UsageError("unknown center method '" + name + "' (expected mean or median)");
}

NeType ne_type(const std::string& name) {
  auto t = parse_ne_type(name);
  if (!t) throw UsageError("unknown entity type '" + name + "' (expected Per, Loc, Org or All)");
  return *t;
}

ordered_json prf_json(const PrfReport& r) {
  return {{"true_count", r.true_count}, {"predicted_count", r.predicted_count}, {"hit_count", r.hit_count},
          {"precision", r.precision},   {"recall", r.recall},                   {"f1", r.f1}};
}

void write_report(const GlobalOptions& g, const path& p, const ordered_json& report) {
  io::write_file(g.output(p), report.dump(2) + "\n");
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// Aligned plain-text table.
class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width(rows_.front().size(), 0);
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c > 0) out << "  ";
        out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      }
      out << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

void check_map_shape(const AlignmentMap& map, const EmbeddingSpace& source, const EmbeddingSpace& target) {
  if (map.source_dim() != source.dim() || map.target_dim() != target.dim()) {
    throw UsageError("alignment map is " + std::to_string(map.target_dim()) + "x" + std::to_string(map.source_dim()) +
                     " but the spaces have dimensions " + std::to_string(source.dim()) + " (source) and " +
                     std::to_string(target.dim()) + " (target)");
  }
}

// Hypersphere features for `corpus`, checked token by token against the table.
std::vector<std::vector<HsFeatureVector>> corpus_features(const TaggedCorpus& corpus, const path& table_path) {
  const FeatureTable table = load_feature_table(table_path);
  for (const auto& row : table) {
    if (row.sentence < corpus.sentences.size() && row.token_index < corpus.sentences[row.sentence].size() &&
        corpus.sentences[row.sentence][row.token_index] != row.token) {
      throw FormatError(table_path.string() + ": token '" + row.token + "' at (" + std::to_string(row.sentence) +
                        ", " + std::to_string(row.token_index) + ") does not match the corpus");
    }
  }
  return group_by_sentence(table, corpus.sentence_lengths());
}

}  // namespace

void cmd_fit(const GlobalOptions& g, const FitOptions& o, std::ostream& out) {
  const CenterMethod method = center_method(o.center);
  std::vector<NeType> types;
  for (const auto& t : o.types) types.push_back(ne_type(t));
  const EmbeddingSpace space = load_embeddings(o.embeddings, o.limit);
  const NeDictionary dict = load_dictionary(o.dictionary);
  const ResolvedEntities resolved = resolve(dict, space, policy_of(g));

  std::vector<Hypersphere> spheres;
  ordered_json rows = ordered_json::array();
  Table table({"type", "entries", "oov", "radius", "precision", "recall", "F1"});
  for (NeType type : types) {
    const FittedSphere fit = fit_hypersphere(space, resolved, type, method, policy_of(g), g.threads);
    spheres.push_back(fit.sphere);
    ordered_json row = {{"ne_type", to_string(type)}, {"resolved", fit.resolved}, {"oov", fit.oov},
                        {"radius", fit.sphere.radius}};
    row.update(prf_json(fit.report));
    rows.push_back(row);
    table.add({std::string(to_string(type)), std::to_string(fit.resolved), std::to_string(fit.oov),
               fixed(fit.sphere.radius), fixed(fit.report.precision), fixed(fit.report.recall),
               fixed(fit.report.f1)});
  }
  save_spheres(spheres, g.output(o.output));
  write_report(g, o.report,
               {{"vocabulary", space.size()},
                {"dictionary_entries", dict.entries.size()},
                {"dictionary_duplicates", dict.duplicate_count},
                {"embedding_duplicates", space.duplicate_count()},
                {"center", o.center},
                {"types", rows}});
  table.print(out);
}

void cmd_align(const GlobalOptions& g, const AlignOptions& o, std::ostream& out, std::ostream& err) {
  if (o.k == 0) throw UsageError("--k must be positive");
  const EmbeddingSpace source = load_embeddings(o.source, o.limit);
  const EmbeddingSpace target = load_embeddings(o.target, o.limit);
  std::vector<LexiconEntry> lexicon;
  if (o.lexicon) lexicon = load_lexicon(*o.lexicon);

  AlignmentMap map;
  if (o.mode == "procrustes") {
    if (!o.lexicon) throw UsageError("procrustes mode needs --lexicon");
    std::vector<Vector> src;
    std::vector<Vector> tgt;
    for (const auto& entry : lexicon) {
      auto s = lookup(source, entry.source, policy_of(g));
      auto t = lookup(target, entry.target, policy_of(g));
      if (!s || !t) continue;
      src.push_back(std::move(*s));
      tgt.push_back(std::move(*t));
    }
    if (source.dim() != target.dim()) throw UsageError("procrustes mode needs spaces of equal dimension");
    map = procrustes(src, tgt);
  } else if (o.mode == "adversarial") {
    AdversarialConfig cfg = o.adversarial;
    cfg.seed = g.seed;
    if (o.init == "identity") {
      cfg.init = GeneratorInit::Identity;
    } else if (o.init == "moments") {
      cfg.init = GeneratorInit::Moments;
    } else {
      throw UsageError("unknown --init '" + o.init + "' (expected identity or moments)");
    }
    std::function<void(const AdversarialProgress&)> progress;
    if (o.progress_every > 0) {
      progress = [&](const AdversarialProgress& p) {
        err << "step " << p.step << "  critic estimate " << format_double(p.critic_estimate) << '\n';
      };
    }
    map = train_adversarial(source, target, cfg, progress, o.progress_every);
  } else {
    throw UsageError("unknown mode '" + o.mode + "' (expected adversarial or procrustes)");
  }
  map.source_tag = source.language_tag();
  map.target_tag = target.language_tag();
  save_alignment(map, g.output(o.output));

  ordered_json report = {{"mode", o.mode},
                         {"source_tag", map.source_tag},
                         {"target_tag", map.target_tag},
                         {"rows", map.matrix.rows()},
                         {"cols", map.matrix.cols()},
                         {"iterations", map.iterations},
                         {"final_critic_loss", map.final_critic_loss}};
  Table table({"mode", "rows", "cols", "iterations", "accuracy@k", "evaluated", "skipped"});
  std::vector<LexiconEntry> eval = o.eval_lexicon ? load_lexicon(*o.eval_lexicon) : lexicon;
  std::string acc_text = "-";
  std::string evaluated = "-";
  std::string skipped = "-";
  if (!eval.empty()) {
    const auto acc = translation_accuracy(map, eval, source, target, o.k, policy_of(g), g.threads);
    report["accuracy"] = {{"k", o.k}, {"accuracy", acc.accuracy}, {"evaluated", acc.evaluated},
                          {"skipped", acc.skipped}};
    acc_text = fixed(acc.accuracy);
    evaluated = std::to_string(acc.evaluated);
    skipped = std::to_string(acc.skipped);
  } else {
    report["accuracy"] = nullptr;
  }
  write_report(g, o.report, report);
  table.add({o.mode, std::to_string(map.matrix.rows()), std::to_string(map.matrix.cols()),
             std::to_string(map.iterations), acc_text, evaluated, skipped});
  table.print(out);
}

void cmd_transfer(const GlobalOptions& g, const TransferOptions& o, std::ostream& out) {
  const CenterMethod method = center_method(o.center);
  const AlignmentMap map = load_alignment(o.map);
  const std::vector<Hypersphere> spheres = load_spheres(o.spheres);
  const EmbeddingSpace source = load_embeddings(o.source, o.limit);
  const EmbeddingSpace target = load_embeddings(o.target, o.limit);
  check_map_shape(map, source, target);
  const NeDictionary dict = load_dictionary(o.target_dictionary);
  const ResolvedEntities resolved = resolve(dict, target, policy_of(g));

  std::vector<Hypersphere> transferred;
  ordered_json rows = ordered_json::array();
  Table table({"type", "R_source", "R_transfer", "R_native", "F1_transfer", "F1_native", "F-ratio"});
  for (const auto& sphere : spheres) {
    if (static_cast<std::size_t>(sphere.center.size()) != source.dim()) {
      throw UsageError("sphere dimension " + std::to_string(sphere.center.size()) +
                       " does not match the source space (" + std::to_string(source.dim()) + ")");
    }
    const Hypersphere moved = transform_hypersphere(map, sphere, sphere_sample(source, sphere));
    const Universe universe = build_universe(target, resolved, sphere.type, policy_of(g));
    const PrfReport moved_report = evaluate(moved, universe, g.threads);
    const FittedSphere native = fit_hypersphere(target, resolved, sphere.type, method, policy_of(g), g.threads);
    transferred.push_back(moved);

    ordered_json row = {{"ne_type", to_string(sphere.type)},
                        {"source_radius", sphere.radius},
                        {"transferred_radius", moved.radius},
                        {"native_radius", native.sphere.radius},
                        {"transferred", prf_json(moved_report)},
                        {"native", prf_json(native.report)}};
    std::string ratio_text = "-";
    if (native.report.f1 > 0.0) {
      const double ratio = moved_report.f1 / native.report.f1;
      row["f_ratio"] = ratio;
      ratio_text = fixed(ratio);
    } else {
      row["f_ratio"] = nullptr;
    }
    rows.push_back(row);
    table.add({std::string(to_string(sphere.type)), fixed(sphere.radius), fixed(moved.radius),
               fixed(native.sphere.radius), fixed(moved_report.f1), fixed(native.report.f1), ratio_text});
  }
  save_spheres(transferred, g.output(o.output));
  write_report(g, o.report, {{"source_tag", map.source_tag}, {"target_tag", map.target_tag}, {"types", rows}});
  table.print(out);
}

void cmd_featurize(const GlobalOptions& g, const FeaturizeOptions& o, std::ostream& out) {
  const EmbeddingSpace space = load_embeddings(o.embeddings, o.limit);
  const SphereSet spheres = SphereSet::from(load_spheres(o.spheres));
  const TaggedCorpus corpus = load_conll(o.corpus);
  const HypersphereStats stats = compute_stats(space, spheres, g.threads);
  const FeatureTable table = featurize_corpus(corpus.sentences, space, spheres, stats, policy_of(g));
  save_feature_table(table, g.output(o.output));

  std::size_t oov = 0;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s) oov += find_token(space, t, policy_of(g)) ? 0 : 1;
  }
  ordered_json stats_json;
  Table text({"type", "mean", "stddev"});
  for (NeType t : kEntityTypes) {
    stats_json[std::string(to_string(t))] = {{"mean", stats.of(t).mean}, {"stddev", stats.of(t).stddev}};
    text.add({std::string(to_string(t)), fixed(stats.of(t).mean), fixed(stats.of(t).stddev)});
  }
  write_report(g, o.report,
               {{"sentences", corpus.sentences.size()}, {"tokens", table.size()}, {"oov_tokens", oov},
                {"stats", stats_json}});
  text.print(out);
  out << "tokens " << table.size() << "  oov " << oov << '\n';
}

void cmd_tag_train(const GlobalOptions& g, const TagTrainOptions& o, std::ostream& out) {
  const TaggedCorpus corpus = load_conll(o.train);
  if (corpus.sentences.empty()) throw UsageError(o.train.string() + ": corpus has no sentences");
  std::optional<EmbeddingSpace> space;
  if (o.embeddings) space = load_embeddings(*o.embeddings, o.limit);
  std::vector<std::vector<HsFeatureVector>> hs;
  if (o.features) hs = corpus_features(corpus, *o.features);

  FeatureSpec spec;
  spec.embedding = space.has_value();
  spec.embedding_dim = space ? space->dim() : 0;
  spec.hypersphere = o.features.has_value();
  spec.lexical = !o.no_lexical;

  TrainConfig cfg = o.config;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.shuffle = !o.no_shuffle;
  CrfModel model(corpus.tag_set, spec);
  const auto instances = make_instances(model, corpus, space ? &*space : nullptr, hs, policy_of(g));
  TrainReport progress;
  model = train(std::move(model), instances, cfg, &progress);
  save_crf(model, g.output(o.output));

  write_report(g, o.report,
               {{"sentences", corpus.sentences.size()},
                {"tokens", corpus.token_count()},
                {"bio_repairs", corpus.repairs},
                {"tags", corpus.tag_set},
                {"feature_spec",
                 {{"embedding", spec.embedding},
                  {"embedding_dim", spec.embedding_dim},
                  {"hypersphere", spec.hypersphere},
                  {"lexical", spec.lexical}}},
                {"parameters", model.parameter_count()},
                {"epoch_mean_log_likelihood", progress.epoch_mean_log_likelihood}});
  Table table({"epoch", "mean log-likelihood"});
  for (std::size_t e = 0; e < progress.epoch_mean_log_likelihood.size(); ++e) {
    table.add({std::to_string(e + 1), fixed(progress.epoch_mean_log_likelihood[e], 6)});
  }
  table.print(out);
  out << "sentences " << corpus.sentences.size() << "  tags " << corpus.tag_set.size() << "  features "
      << spec.size() << "  bio repairs " << corpus.repairs << '\n';
}

void cmd_tag_eval(const GlobalOptions& g, const TagEvalOptions& o, std::ostream& out) {
  const TaggedCorpus corpus = load_conll(o.test);
  std::optional<EmbeddingSpace> space;
  if (o.embeddings) space = load_embeddings(*o.embeddings, o.limit);
  std::vector<std::vector<HsFeatureVector>> hs;
  if (o.features) hs = corpus_features(corpus, *o.features);

  auto score = [&](const path& model_path) {
    const CrfModel model = load_crf(model_path);
    const auto& spec = model.feature_spec();
    if (spec.embedding && spec.embedding_dim > 0 && !space) {
      throw UsageError(model_path.string() + " uses word embeddings; pass --embeddings");
    }
    if (spec.hypersphere && !o.features) {
      throw UsageError(model_path.string() + " uses hypersphere features; pass --features");
    }
    std::vector<FeatureMatrix> features;
    features.reserve(corpus.sentences.size());
    for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
      std::span<const HsFeatureVector> rows;
      if (spec.hypersphere) rows = hs[s];
      features.push_back(build_features(corpus.sentences[s], space ? &*space : nullptr, spec, rows, policy_of(g)));
    }
    return evaluate_ner(model, features, corpus.tags);
  };

  const PrfReport base = score(o.baseline);
  ordered_json report = {{"sentences", corpus.sentences.size()}, {"baseline", prf_json(base)}};
  Table table({"model", "precision", "recall", "F1"});
  table.add({"baseline", fixed(100.0 * base.precision, 2), fixed(100.0 * base.recall, 2), fixed(100.0 * base.f1, 2)});
  std::optional<double> err_value;
  if (o.hypersphere) {
    const PrfReport enhanced = score(*o.hypersphere);
    report["hypersphere"] = prf_json(enhanced);
    err_value = relative_error_reduction(100.0 * base.f1, 100.0 * enhanced.f1);
    report["err"] = *err_value;
    table.add({"+hypersphere", fixed(100.0 * enhanced.precision, 2), fixed(100.0 * enhanced.recall, 2),
               fixed(100.0 * enhanced.f1, 2) + " (" + fixed(*err_value, 1) + ")"});
  }
  write_report(g, o.report, report);
  table.print(out);
  if (err_value) out << "ERR " << fixed(*err_value, 2) << '\n';
}

void cmd_project(const GlobalOptions& g, const ProjectOptions& o, std::ostream& out) {
  const EmbeddingSpace space = load_embeddings(o.embeddings, o.limit);
  std::vector<LabeledPoint> points;
  if (o.dictionary) {
    const ResolvedEntities resolved = resolve(load_dictionary(*o.dictionary), space, policy_of(g));
    for (NeType t : kEntityTypes) {
      for (const auto& e : resolved.of(t)) points.push_back({e.surface, std::string(to_string(t)), e.vector});
    }
    for (std::size_t i = 0; i < std::min(o.vocabulary, space.size()); ++i) {
      points.push_back({space.token(i), "word", space.vector(i)});
    }
  } else {
    for (std::size_t i = 0; i < space.size(); ++i) points.push_back({space.token(i), "word", space.vector(i)});
  }
  const ProjectedPoints projected = project(points, o.dim);
  auto file = io::open_output(g.output(o.output));
  write_projection_csv(projected, file);
  if (!file) throw IoError("failed writing " + g.output(o.output).string());
  out << "projected " << projected.rows.size() << " points to " << projected.dim << "-D\n";
}

}  // namespace nehs::cli
