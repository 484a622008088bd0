#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "nehs/alignment.hpp"
#include "nehs/error.hpp"

namespace nehs {

void AdversarialConfig::validate() const {
  if (critic_hidden_size == 0) throw UsageError("critic_hidden_size must be positive");
  if (!(clip_value > 0.0)) throw UsageError("clip_value must be positive");
  if (critic_steps_per_generator_step == 0) throw UsageError("critic_steps_per_generator_step must be positive");
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (batch_size == 0) throw UsageError("batch_size must be positive");
  if (!(orthogonality >= 0.0)) throw UsageError("orthogonality must be non-negative");
}

namespace {

// RMSProp: v <- rho v + (1 - rho) g^2;  theta <- theta - lr g / (sqrt(v) + eps).
class RmsProp {
 public:
  RmsProp(Eigen::Index rows, Eigen::Index cols, double lr) : mean_square_(Matrix::Zero(rows, cols)), lr_(lr) {}

  void step(Matrix& param, const Matrix& grad) {
    mean_square_.array() = kDecay * mean_square_.array() + (1.0 - kDecay) * grad.array().square();
    param.array() -= lr_ * grad.array() / (mean_square_.array().sqrt() + kEpsilon);
  }

 private:
  static constexpr double kDecay = 0.99;
  static constexpr double kEpsilon = 1e-8;
  Matrix mean_square_;
  double lr_;
};

Matrix prepared_data(const EmbeddingSpace& space, bool normalize) {
  Matrix data = space.matrix();
  if (normalize) {
    for (Eigen::Index i = 0; i < data.cols(); ++i) {
      const double norm = data.col(i).norm();
      if (norm > 0.0) data.col(i) /= norm;
    }
  }
  return data;
}

// Principal axes (columns, by decreasing variance) with each sign chosen so
// the third moment of the projected data is non-negative.
Matrix oriented_principal_axes(const Matrix& data) {
  const Vector mean = data.rowwise().mean();
  const Matrix centered = data.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / static_cast<double>(data.cols());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw DegenerateDataError("covariance eigendecomposition failed");
  const Eigen::Index dim = data.rows();
  Matrix axes(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Vector axis = solver.eigenvectors().col(dim - 1 - c);
    const Eigen::VectorXd proj = centered.transpose() * axis;
    if (proj.array().cube().sum() < 0.0) axis = -axis;
    axes.col(c) = axis;
  }
  return axes;
}

void gather(const Matrix& data, std::uniform_int_distribution<Eigen::Index>& pick, std::mt19937_64& rng,
            Eigen::Ref<Matrix> batch) {
  for (Eigen::Index b = 0; b < batch.cols(); ++b) batch.col(b) = data.col(pick(rng));
}

struct Critic {
  Matrix w1;  // hidden x dim
  Matrix b1;  // hidden x 1
  Matrix w2;  // hidden x 1

  // Hidden pre-activations for each column of z.
  void pre_activations(const Matrix& z, Matrix& pre) const {
    pre.noalias() = w1 * z;
    pre.colwise() += b1.col(0);
  }

  void clip(double c) {
    w1 = w1.cwiseMax(-c).cwiseMin(c);
    b1 = b1.cwiseMax(-c).cwiseMin(c);
    w2 = w2.cwiseMax(-c).cwiseMin(c);
  }
};

}  // namespace

Matrix initial_generator(const EmbeddingSpace& source, const EmbeddingSpace& target,
                         const AdversarialConfig& config) {
  const auto rows = static_cast<Eigen::Index>(target.dim());
  const auto cols = static_cast<Eigen::Index>(source.dim());
  if (config.init == GeneratorInit::Identity) return Matrix::Identity(rows, cols);

  if (source.size() < 2 || target.size() < 2) {
    throw DegenerateDataError("moment initialization needs at least two vectors per space");
  }
  const Matrix src_axes = oriented_principal_axes(prepared_data(source, config.normalize_inputs));
  const Matrix tgt_axes = oriented_principal_axes(prepared_data(target, config.normalize_inputs));
  const Eigen::Index k = std::min(rows, cols);
  return tgt_axes.leftCols(k) * src_axes.leftCols(k).transpose();
}

AlignmentMap train_adversarial(const EmbeddingSpace& source, const EmbeddingSpace& target,
                               const AdversarialConfig& config,
                               const std::function<void(const AdversarialProgress&)>& on_progress,
                               std::size_t progress_every) {
  config.validate();
  if (source.empty() || target.empty()) throw UsageError("train_adversarial: both spaces must be non-empty");

  const Matrix src = prepared_data(source, config.normalize_inputs);
  const Matrix tgt = prepared_data(target, config.normalize_inputs);
  const Eigen::Index src_dim = src.rows();
  const Eigen::Index tgt_dim = tgt.rows();
  const auto hidden = static_cast<Eigen::Index>(config.critic_hidden_size);
  const auto batch = static_cast<Eigen::Index>(config.batch_size);
  const double inv_batch = 1.0 / static_cast<double>(batch);

  AlignmentMap map;
  map.source_tag = source.language_tag();
  map.target_tag = target.language_tag();
  map.method = "adversarial";
  map.matrix = initial_generator(source, target, config);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(-config.clip_value, config.clip_value);
  Critic critic{Matrix(hidden, tgt_dim), Matrix(hidden, 1), Matrix(hidden, 1)};
  for (Matrix* m : {&critic.w1, &critic.b1, &critic.w2}) {
    for (Eigen::Index j = 0; j < m->cols(); ++j) {
      for (Eigen::Index i = 0; i < m->rows(); ++i) (*m)(i, j) = init(rng);
    }
  }

  RmsProp opt_w1(hidden, tgt_dim, config.learning_rate);
  RmsProp opt_b1(hidden, 1, config.learning_rate);
  RmsProp opt_w2(hidden, 1, config.learning_rate);
  RmsProp opt_gen(tgt_dim, src_dim, config.learning_rate);

  std::uniform_int_distribution<Eigen::Index> pick_src(0, src.cols() - 1);
  std::uniform_int_distribution<Eigen::Index> pick_tgt(0, tgt.cols() - 1);

  // Critic minibatches hold the real samples in the first `batch` columns and
  // the mapped source samples in the rest, so each layer is one product.
  Matrix src_batch(src_dim, batch);
  Matrix joint(tgt_dim, 2 * batch);
  Matrix pre(hidden, 2 * batch);
  Matrix act(hidden, 2 * batch);
  Matrix delta(hidden, 2 * batch);
  Eigen::RowVectorXd scores(2 * batch);
  // d(-E[D(real)] + E[D(fake)]) / dD per column.
  Vector sign(2 * batch);
  sign.head(batch).setConstant(-inv_batch);
  sign.tail(batch).setConstant(inv_batch);
  Matrix grad_w1(hidden, tgt_dim);
  Matrix grad_b1(hidden, 1);
  Matrix grad_w2(hidden, 1);
  Matrix fake(tgt_dim, batch);
  Matrix pre_gen(hidden, batch);
  Matrix delta_gen(hidden, batch);
  Matrix grad_fake(tgt_dim, batch);
  Matrix grad_gen(tgt_dim, src_dim);
  double estimate = 0.0;

  for (std::size_t step = 0; step < config.steps; ++step) {
    // Critic ascends E[D(real)] - E[D(fake)]; we descend its negation.
    for (std::size_t c = 0; c < config.critic_steps_per_generator_step; ++c) {
      gather(tgt, pick_tgt, rng, joint.leftCols(batch));
      gather(src, pick_src, rng, src_batch);
      joint.rightCols(batch).noalias() = map.matrix * src_batch;
      critic.pre_activations(joint, pre);
      act = pre.cwiseMax(0.0);
      scores.noalias() = critic.w2.transpose() * act;
      estimate = scores.head(batch).mean() - scores.tail(batch).mean();
      if (!std::isfinite(estimate)) {
        throw TrainingError("adversarial training diverged at generator step " + std::to_string(step));
      }

      grad_w2.noalias() = act * sign;
      // dLoss/dpre = w2 * relu'(pre) * sign
      delta = (pre.array() > 0.0).cast<double>().matrix();
      delta.array().colwise() *= critic.w2.col(0).array();
      delta.array().rowwise() *= sign.transpose().array();
      grad_w1.noalias() = delta * joint.transpose();
      grad_b1 = delta.rowwise().sum();

      opt_w1.step(critic.w1, grad_w1);
      opt_b1.step(critic.b1, grad_b1);
      opt_w2.step(critic.w2, grad_w2);
      critic.clip(config.clip_value);
    }

    // Generator descends -E[D(G x)].
    gather(src, pick_src, rng, src_batch);
    fake.noalias() = map.matrix * src_batch;
    critic.pre_activations(fake, pre_gen);
    delta_gen = (pre_gen.array() > 0.0).cast<double>().matrix();
    delta_gen.array().colwise() *= critic.w2.col(0).array() * -inv_batch;
    grad_fake.noalias() = critic.w1.transpose() * delta_gen;
    grad_gen.noalias() = grad_fake * src_batch.transpose();
    opt_gen.step(map.matrix, grad_gen);
    if (config.orthogonality > 0.0) {
      const double beta = config.orthogonality;
      map.matrix = (1.0 + beta) * map.matrix - beta * (map.matrix * map.matrix.transpose()) * map.matrix;
    }
    if (!map.matrix.allFinite()) {
      throw TrainingError("adversarial training diverged at generator step " + std::to_string(step));
    }

    if (on_progress && progress_every > 0 && (step + 1) % progress_every == 0) {
      on_progress({step + 1, estimate});
    }
  }

  map.iterations = config.steps;
  map.final_critic_loss = -estimate;
  return map;
}

}  // namespace nehs
