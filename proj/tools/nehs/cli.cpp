#include "nehs/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <memory>

#include <CLI11.hpp>

#include "nehs/commands.hpp"
#include "nehs/error.hpp"

namespace nehs::cli {

namespace {

void add_limit(CLI::App* cmd, std::optional<std::size_t>& limit) {
  cmd->add_option("--limit", limit, "Read at most this many embedding rows per file")->check(CLI::PositiveNumber);
}

// CLI11 does not run validators on environment values, so NEHS_THREADS is
// read and checked here.
std::size_t threads_from_env(std::size_t fallback) {
  const char* value = std::getenv("NEHS_THREADS");
  if (value == nullptr || *value == '\0') return fallback;
  std::size_t threads = 0;
  const std::string_view text(value);
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), threads);
  if (ec != std::errc{} || end != text.data() + text.size() || threads == 0) {
    throw UsageError("NEHS_THREADS must be a positive integer, got '" + std::string(text) + "'");
  }
  return threads;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Named-entity hyperspheres in word-embedding spaces", "nehs"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "Read options from a key = value file; command-line flags take precedence");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for every random choice")->capture_default_str();
  auto* threads_opt = app.add_option("--threads", global.threads, "Worker threads (default from NEHS_THREADS, else 1)")
                          ->check(CLI::PositiveNumber)
                          ->capture_default_str();
  app.add_option("--out-dir", global.out_dir, "Directory for relative output paths")->capture_default_str();
  app.add_flag("--lowercase", global.lowercase, "Retry lookups with the lowercased token");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one hypersphere per entity type");
  fit_cmd->add_option("--embeddings", fit.embeddings, "Text embedding file")->required();
  fit_cmd->add_option("--dictionary", fit.dictionary, "Typed dictionary TSV")->required();
  fit_cmd->add_option("--types", fit.types, "Entity types to fit")
      ->check(CLI::IsMember({"Per", "Loc", "Org", "All"}))
      ->delimiter(',')
      ->capture_default_str();
  fit_cmd->add_option("--center", fit.center, "Center estimate")
      ->check(CLI::IsMember({"mean", "median"}))
      ->capture_default_str();
  add_limit(fit_cmd, fit.limit);
  fit_cmd->add_option("--output", fit.output, "Hypersphere JSON")->capture_default_str();
  fit_cmd->add_option("--report", fit.report, "Report JSON")->capture_default_str();

  AlignOptions align;
  auto* align_cmd = app.add_subcommand("align", "Learn a linear map between two embedding spaces");
  align_cmd->add_option("--source", align.source, "Source embedding file")->required();
  align_cmd->add_option("--target", align.target, "Target embedding file")->required();
  align_cmd->add_option("--mode", align.mode, "Training method")
      ->check(CLI::IsMember({"adversarial", "procrustes"}))
      ->capture_default_str();
  align_cmd->add_option("--lexicon", align.lexicon, "Seed lexicon TSV (procrustes pairs, and evaluation)");
  align_cmd->add_option("--eval-lexicon", align.eval_lexicon, "Lexicon TSV used only for accuracy");
  align_cmd->add_option("--k", align.k, "Neighbours counted by accuracy@k")->check(CLI::PositiveNumber)
      ->capture_default_str();
  align_cmd->add_option("--steps", align.adversarial.steps, "Generator steps")->capture_default_str();
  align_cmd->add_option("--critic-hidden", align.adversarial.critic_hidden_size, "Critic hidden units")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  align_cmd->add_option("--clip", align.adversarial.clip_value, "Critic weight clip")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  align_cmd->add_option("--critic-steps", align.adversarial.critic_steps_per_generator_step,
                        "Critic steps per generator step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  align_cmd->add_option("--learning-rate", align.adversarial.learning_rate, "RMSProp step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  align_cmd->add_option("--batch", align.adversarial.batch_size, "Minibatch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  align_cmd->add_flag("--normalize", align.adversarial.normalize_inputs, "Length-normalize vectors for training");
  align_cmd->add_option("--orthogonality", align.adversarial.orthogonality, "Orthogonalization strength")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  align_cmd->add_option("--init", align.init, "Generator initialization")
      ->check(CLI::IsMember({"identity", "moments"}))
      ->capture_default_str();
  align_cmd->add_option("--progress", align.progress_every, "Log the critic estimate every N steps (0: off)");
  add_limit(align_cmd, align.limit);
  align_cmd->add_option("--output", align.output, "Alignment map JSON")->capture_default_str();
  align_cmd->add_option("--report", align.report, "Report JSON")->capture_default_str();

  TransferOptions transfer;
  auto* transfer_cmd = app.add_subcommand("transfer", "Carry hyperspheres through an alignment map");
  transfer_cmd->add_option("--map", transfer.map, "Alignment map JSON")->required();
  transfer_cmd->add_option("--spheres", transfer.spheres, "Source hypersphere JSON")->required();
  transfer_cmd->add_option("--source", transfer.source, "Source embedding file")->required();
  transfer_cmd->add_option("--target", transfer.target, "Target embedding file")->required();
  transfer_cmd->add_option("--target-dictionary", transfer.target_dictionary, "Target dictionary TSV")->required();
  transfer_cmd->add_option("--center", transfer.center, "Center estimate for the native fit")
      ->check(CLI::IsMember({"mean", "median"}))
      ->capture_default_str();
  add_limit(transfer_cmd, transfer.limit);
  transfer_cmd->add_option("--output", transfer.output, "Transferred hypersphere JSON")->capture_default_str();
  transfer_cmd->add_option("--report", transfer.report, "Report JSON")->capture_default_str();

  FeaturizeOptions featurize;
  auto* featurize_cmd = app.add_subcommand("featurize", "Write per-token hypersphere z-scores");
  featurize_cmd->add_option("--embeddings", featurize.embeddings, "Text embedding file")->required();
  featurize_cmd->add_option("--spheres", featurize.spheres, "Per, Loc and Org hypersphere JSON")->required();
  featurize_cmd->add_option("--corpus", featurize.corpus, "CoNLL corpus")->required();
  add_limit(featurize_cmd, featurize.limit);
  featurize_cmd->add_option("--output", featurize.output, "Feature table TSV")->capture_default_str();
  featurize_cmd->add_option("--report", featurize.report, "Report JSON")->capture_default_str();

  TagTrainOptions tag_train;
  auto* train_cmd = app.add_subcommand("tag-train", "Train a CRF tagger");
  train_cmd->add_option("--train", tag_train.train, "CoNLL training corpus")->required();
  train_cmd->add_option("--embeddings", tag_train.embeddings, "Text embedding file (enables the embedding block)");
  train_cmd->add_option("--features", tag_train.features, "Feature table TSV (enables the hypersphere block)");
  train_cmd->add_flag("--no-lexical", tag_train.no_lexical, "Drop the lexical indicator block");
  train_cmd->add_option("--epochs", tag_train.config.epochs, "Passes over the corpus")->capture_default_str();
  train_cmd->add_option("--learning-rate", tag_train.config.learning_rate, "Gradient step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--l2", tag_train.config.l2_strength, "L2 penalty strength")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--batch", tag_train.config.batch_size, "Sentences per update")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_flag("--no-shuffle", tag_train.no_shuffle, "Keep corpus order in every epoch");
  add_limit(train_cmd, tag_train.limit);
  train_cmd->add_option("--output", tag_train.output, "Model JSON")->capture_default_str();
  train_cmd->add_option("--report", tag_train.report, "Report JSON")->capture_default_str();

  TagEvalOptions tag_eval;
  auto* eval_cmd = app.add_subcommand("tag-eval", "Score taggers on a gold corpus");
  eval_cmd->add_option("--test", tag_eval.test, "CoNLL gold corpus")->required();
  eval_cmd->add_option("--baseline", tag_eval.baseline, "Baseline model JSON")->required();
  eval_cmd->add_option("--hypersphere", tag_eval.hypersphere, "Model JSON trained with the hypersphere block");
  eval_cmd->add_option("--embeddings", tag_eval.embeddings, "Text embedding file");
  eval_cmd->add_option("--features", tag_eval.features, "Feature table TSV for the test corpus");
  add_limit(eval_cmd, tag_eval.limit);
  eval_cmd->add_option("--report", tag_eval.report, "Report JSON")->capture_default_str();

  ProjectOptions proj;
  auto* project_cmd = app.add_subcommand("project", "PCA projection of entity vectors to 2-D or 3-D");
  project_cmd->add_option("--embeddings", proj.embeddings, "Text embedding file")->required();
  project_cmd->add_option("--dictionary", proj.dictionary, "Dictionary TSV whose entries are projected");
  project_cmd->add_option("--vocabulary", proj.vocabulary, "Also project the first N vocabulary words")
      ->capture_default_str();
  project_cmd->add_option("--dim", proj.dim, "Output dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
  add_limit(project_cmd, proj.limit);
  project_cmd->add_option("--output", proj.output, "Projection CSV")->capture_default_str();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads_opt->count() == 0) global.threads = threads_from_env(global.threads);
    if (*fit_cmd) cmd_fit(global, fit, out);
    if (*align_cmd) cmd_align(global, align, out, err);
    if (*transfer_cmd) cmd_transfer(global, transfer, out);
    if (*featurize_cmd) cmd_featurize(global, featurize, out);
    if (*train_cmd) cmd_tag_train(global, tag_train, out);
    if (*eval_cmd) cmd_tag_eval(global, tag_eval, out);
    if (*project_cmd) cmd_project(global, proj, out);
  } catch (const UsageError& e) {
    err << "nehs: error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "nehs: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "nehs: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace nehs::cli
