#pragma once

#include <Eigen/Dense>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace fidget {

struct DdaeGroup {
  std::string name;
  int dim = 0;
  double weight = 0.1;  // loss weight
};

// Fidget 0.35, every other group 0.1.
double default_group_weight(const std::string& name);

// Layer widths: per-group encoder ceil(0.5 d), shared bottleneck
// ceil(0.25 D) with D the total input width, per-group decoder ceil(0.5 d).
struct DdaeArchitecture {
  std::vector<int> input_dims;
  std::vector<int> encoder_dims;
  int latent_dim = 0;
  std::vector<int> decoder_dims;
};
DdaeArchitecture ddae_architecture(const std::vector<int>& input_dims);

struct DdaeConfig {
  double noise = 0.1;  // Gaussian corruption, in standardized units
  int max_epochs = 40;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int patience = 10;
  double holdout_fraction = 0.1;
  std::size_t max_frames = 20000;  // training frames are subsampled above this
  std::uint64_t seed = 0;
};

// Per-group frame matrices, frames as rows (N x d_g).
using GroupFrames = std::vector<Eigen::MatrixXd>;

struct DdaeHistory {
  double initial_loss = 0.0;       // weighted MSE of the clean training frames before training
  double final_loss = 0.0;         // same frames after training
  std::vector<double> train_loss;  // per epoch, on corrupted inputs
  std::vector<double> holdout_loss;
  int best_epoch = -1;
};

// Multi-input denoising auto-encoder. Each group has a tanh encoder layer;
// the encodings are concatenated into a shared tanh bottleneck, decoded by
// per-group tanh layers and linear output layers. Inputs are z-scored with
// statistics from the training frames.
class DdaeModel {
 public:
  DdaeModel() = default;
  DdaeModel(std::vector<DdaeGroup> groups, std::uint64_t seed);

  const std::vector<DdaeGroup>& groups() const { return groups_; }
  const DdaeArchitecture& architecture() const { return arch_; }
  int latent_dim() const { return arch_.latent_dim; }

  // Bottleneck activations of raw (unstandardized) frames, N x latent.
  Eigen::MatrixXd encode(const GroupFrames& frames) const;
  // Reconstruction of raw frames, in standardized units.
  GroupFrames reconstruct(const GroupFrames& frames) const;

  // Weighted sum of per-group mean squared errors between the reconstruction
  // of `input` and `target`, both already standardized. Fills the gradient
  // with respect to parameters() when `gradient` is non-null.
  double loss(const GroupFrames& input, const GroupFrames& target, std::vector<double>* gradient = nullptr) const;

  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& p);
  std::size_t parameter_count() const;

  GroupFrames standardize(const GroupFrames& frames) const;
  void fit_standardizer(const GroupFrames& frames);

  nlohmann::json to_json() const;
  static DdaeModel from_json(const nlohmann::json& j);

  // Throws DataError for non-finite inputs or mismatched group widths.
  void check_frames(const GroupFrames& frames) const;

 private:
  struct Forward {
    std::vector<Eigen::MatrixXd> hidden;  // per group encoder activations
    Eigen::MatrixXd joint;                // concatenated encoder activations
    Eigen::MatrixXd latent;
    std::vector<Eigen::MatrixXd> decoded;  // per group decoder activations
    std::vector<Eigen::MatrixXd> output;
  };
  Forward forward(const GroupFrames& input) const;

  std::size_t enc_w(std::size_t g) const { return 2 * g; }
  std::size_t enc_b(std::size_t g) const { return 2 * g + 1; }
  std::size_t shared_w() const { return 2 * groups_.size(); }
  std::size_t shared_b() const { return 2 * groups_.size() + 1; }
  std::size_t dec_w(std::size_t g) const { return 2 * groups_.size() + 2 + 4 * g; }
  std::size_t dec_b(std::size_t g) const { return dec_w(g) + 1; }
  std::size_t out_w(std::size_t g) const { return dec_w(g) + 2; }
  std::size_t out_b(std::size_t g) const { return dec_w(g) + 3; }

  std::vector<DdaeGroup> groups_;
  DdaeArchitecture arch_;
  std::vector<Eigen::MatrixXd> params_;  // weights (out x in) and biases (1 x out)
  std::vector<Eigen::RowVectorXd> mean_, scale_;

  friend DdaeModel train_ddae(const std::vector<DdaeGroup>&, const GroupFrames&, const DdaeConfig&, DdaeHistory*);
};

// Adam on mini-batches of corrupted inputs with early stopping on the
// held-out frames' clean reconstruction loss. Deterministic for a seed.
DdaeModel train_ddae(const std::vector<DdaeGroup>& groups, const GroupFrames& frames, const DdaeConfig& config,
                     DdaeHistory* history = nullptr);

}  // namespace fidget
