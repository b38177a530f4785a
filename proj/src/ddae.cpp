#include "fidget/ddae.hpp"

#include "fidget/errors.hpp"
#include "fidget/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fidget {

double default_group_weight(const std::string& name) {
  return name.rfind("Fidget", 0) == 0 ? 0.35 : 0.1;
}

namespace {

int half_up(int d, double f) { return std::max(1, static_cast<int>(std::ceil(f * d - 1e-9))); }

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  return out;
}

GroupFrames rows_of(const GroupFrames& g, const std::vector<Eigen::Index>& idx) {
  GroupFrames out;
  out.reserve(g.size());
  for (const auto& m : g) out.push_back(rows_of(m, idx));
  return out;
}

Eigen::MatrixXd json_matrix(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ModelError(std::string("ddae: '") + what + "' must be a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ModelError(std::string("ddae: ragged '") + what + "'");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(std::move(row));
  }
  return j;
}

}  // namespace

DdaeArchitecture ddae_architecture(const std::vector<int>& input_dims) {
  if (input_dims.empty()) throw std::invalid_argument("ddae needs at least one group");
  DdaeArchitecture a;
  a.input_dims = input_dims;
  int total = 0;
  for (int d : input_dims) {
    if (d <= 0) throw std::invalid_argument("ddae group width must be positive");
    a.encoder_dims.push_back(half_up(d, 0.5));
    a.decoder_dims.push_back(half_up(d, 0.5));
    total += d;
  }
  a.latent_dim = half_up(total, 0.25);
  return a;
}

DdaeModel::DdaeModel(std::vector<DdaeGroup> groups, std::uint64_t seed) : groups_(std::move(groups)) {
  std::vector<int> dims;
  for (const auto& g : groups_) dims.push_back(g.dim);
  arch_ = ddae_architecture(dims);
  Rng rng(seed);
  const auto xavier = [&rng](int out, int in) {
    const double limit = std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    return w;
  };
  const std::size_t ng = groups_.size();
  params_.resize(6 * ng + 2);
  int joint = 0;
  for (std::size_t g = 0; g < ng; ++g) {
    params_[enc_w(g)] = xavier(arch_.encoder_dims[g], arch_.input_dims[g]);
    params_[enc_b(g)] = Eigen::MatrixXd::Zero(1, arch_.encoder_dims[g]);
    joint += arch_.encoder_dims[g];
  }
  params_[shared_w()] = xavier(arch_.latent_dim, joint);
  params_[shared_b()] = Eigen::MatrixXd::Zero(1, arch_.latent_dim);
  for (std::size_t g = 0; g < ng; ++g) {
    params_[dec_w(g)] = xavier(arch_.decoder_dims[g], arch_.latent_dim);
    params_[dec_b(g)] = Eigen::MatrixXd::Zero(1, arch_.decoder_dims[g]);
    params_[out_w(g)] = xavier(arch_.input_dims[g], arch_.decoder_dims[g]);
    params_[out_b(g)] = Eigen::MatrixXd::Zero(1, arch_.input_dims[g]);
  }
  for (const auto& g : groups_) {
    mean_.push_back(Eigen::RowVectorXd::Zero(g.dim));
    scale_.push_back(Eigen::RowVectorXd::Ones(g.dim));
  }
}

void DdaeModel::check_frames(const GroupFrames& frames) const {
  if (frames.size() != groups_.size()) {
    throw DataError("ddae expects " + std::to_string(groups_.size()) + " feature groups, got " +
                    std::to_string(frames.size()));
  }
  for (std::size_t g = 0; g < frames.size(); ++g) {
    if (frames[g].cols() != groups_[g].dim) {
      throw DataError("ddae group " + groups_[g].name + " expects width " + std::to_string(groups_[g].dim) +
                      ", got " + std::to_string(frames[g].cols()));
    }
    if (frames[g].rows() != frames[0].rows()) throw DataError("ddae groups differ in frame count");
    if (!frames[g].allFinite()) throw DataError("ddae group " + groups_[g].name + " contains non-finite values");
  }
}

void DdaeModel::fit_standardizer(const GroupFrames& frames) {
  for (std::size_t g = 0; g < frames.size(); ++g) {
    const auto n = static_cast<double>(frames[g].rows());
    mean_[g] = frames[g].colwise().mean();
    const Eigen::RowVectorXd var = (frames[g].rowwise() - mean_[g]).array().square().colwise().sum() / n;
    scale_[g] = var.array().sqrt().max(1e-6).matrix();
  }
}

GroupFrames DdaeModel::standardize(const GroupFrames& frames) const {
  GroupFrames out;
  out.reserve(frames.size());
  for (std::size_t g = 0; g < frames.size(); ++g)
    out.push_back(((frames[g].rowwise() - mean_[g]).array().rowwise() / scale_[g].array()).matrix());
  return out;
}

DdaeModel::Forward DdaeModel::forward(const GroupFrames& input) const {
  const std::size_t ng = groups_.size();
  Forward f;
  const Eigen::Index n = input.front().rows();
  int joint = 0;
  for (int e : arch_.encoder_dims) joint += e;
  f.joint.resize(n, joint);
  Eigen::Index col = 0;
  for (std::size_t g = 0; g < ng; ++g) {
    Eigen::MatrixXd h = input[g] * params_[enc_w(g)].transpose();
    h.rowwise() += params_[enc_b(g)].row(0);
    h = h.array().tanh();
    f.joint.middleCols(col, h.cols()) = h;
    col += h.cols();
    f.hidden.push_back(std::move(h));
  }
  f.latent = f.joint * params_[shared_w()].transpose();
  f.latent.rowwise() += params_[shared_b()].row(0);
  f.latent = f.latent.array().tanh();
  for (std::size_t g = 0; g < ng; ++g) {
    Eigen::MatrixXd u = f.latent * params_[dec_w(g)].transpose();
    u.rowwise() += params_[dec_b(g)].row(0);
    u = u.array().tanh();
    Eigen::MatrixXd y = u * params_[out_w(g)].transpose();
    y.rowwise() += params_[out_b(g)].row(0);
    f.decoded.push_back(std::move(u));
    f.output.push_back(std::move(y));
  }
  return f;
}

Eigen::MatrixXd DdaeModel::encode(const GroupFrames& frames) const {
  check_frames(frames);
  if (frames.front().rows() == 0) return Eigen::MatrixXd(0, arch_.latent_dim);
  return forward(standardize(frames)).latent;
}

GroupFrames DdaeModel::reconstruct(const GroupFrames& frames) const {
  check_frames(frames);
  return forward(standardize(frames)).output;
}

double DdaeModel::loss(const GroupFrames& input, const GroupFrames& target, std::vector<double>* gradient) const {
  const std::size_t ng = groups_.size();
  const Forward f = forward(input);
  const auto n = static_cast<double>(input.front().rows());
  double total = 0.0;
  std::vector<Eigen::MatrixXd> dy(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    const Eigen::MatrixXd diff = f.output[g] - target[g];
    const double denom = n * static_cast<double>(groups_[g].dim);
    total += groups_[g].weight * diff.squaredNorm() / denom;
    if (gradient) dy[g] = (2.0 * groups_[g].weight / denom) * diff;
  }
  if (!gradient) return total;

  std::vector<Eigen::MatrixXd> grads(params_.size());
  Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(f.latent.rows(), f.latent.cols());
  for (std::size_t g = 0; g < ng; ++g) {
    grads[out_w(g)] = dy[g].transpose() * f.decoded[g];
    grads[out_b(g)] = dy[g].colwise().sum();
    const Eigen::MatrixXd du =
        ((dy[g] * params_[out_w(g)]).array() * (1.0 - f.decoded[g].array().square())).matrix();
    grads[dec_w(g)] = du.transpose() * f.latent;
    grads[dec_b(g)] = du.colwise().sum();
    dz += du * params_[dec_w(g)];
  }
  const Eigen::MatrixXd dzp = (dz.array() * (1.0 - f.latent.array().square())).matrix();
  grads[shared_w()] = dzp.transpose() * f.joint;
  grads[shared_b()] = dzp.colwise().sum();
  const Eigen::MatrixXd djoint = dzp * params_[shared_w()];
  Eigen::Index col = 0;
  for (std::size_t g = 0; g < ng; ++g) {
    const auto w = f.hidden[g].cols();
    const Eigen::MatrixXd dh =
        (djoint.middleCols(col, w).array() * (1.0 - f.hidden[g].array().square())).matrix();
    col += w;
    grads[enc_w(g)] = dh.transpose() * input[g];
    grads[enc_b(g)] = dh.colwise().sum();
  }
  gradient->clear();
  gradient->reserve(parameter_count());
  for (const auto& m : grads)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) gradient->push_back(m(r, c));
  return total;
}

std::size_t DdaeModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& m : params_) n += static_cast<std::size_t>(m.size());
  return n;
}

std::vector<double> DdaeModel::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (const auto& m : params_)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) p.push_back(m(r, c));
  return p;
}

void DdaeModel::set_parameters(const std::vector<double>& p) {
  if (p.size() != parameter_count()) throw ModelError("ddae parameter vector has the wrong length");
  std::size_t i = 0;
  for (auto& m : params_)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = p[i++];
}

nlohmann::json DdaeModel::to_json() const {
  nlohmann::json j;
  j["groups"] = nlohmann::json::array();
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    nlohmann::json gj;
    gj["name"] = groups_[g].name;
    gj["dim"] = groups_[g].dim;
    gj["weight"] = groups_[g].weight;
    gj["mean"] = std::vector<double>(mean_[g].data(), mean_[g].data() + mean_[g].size());
    gj["scale"] = std::vector<double>(scale_[g].data(), scale_[g].data() + scale_[g].size());
    j["groups"].push_back(std::move(gj));
  }
  j["latent_dim"] = arch_.latent_dim;
  j["parameters"] = nlohmann::json::array();
  for (const auto& m : params_) j["parameters"].push_back(matrix_json(m));
  return j;
}

DdaeModel DdaeModel::from_json(const nlohmann::json& j) {
  try {
    std::vector<DdaeGroup> groups;
    for (const auto& gj : j.at("groups"))
      groups.push_back({gj.at("name").get<std::string>(), gj.at("dim").get<int>(), gj.at("weight").get<double>()});
    DdaeModel m(groups, 0);
    if (j.at("latent_dim").get<int>() != m.arch_.latent_dim) throw ModelError("ddae latent width mismatch");
    const auto& pj = j.at("parameters");
    if (pj.size() != m.params_.size()) throw ModelError("ddae parameter block count mismatch");
    for (std::size_t i = 0; i < m.params_.size(); ++i) {
      Eigen::MatrixXd p = json_matrix(pj[i], "parameters");
      if (p.rows() != m.params_[i].rows() || p.cols() != m.params_[i].cols())
        throw ModelError("ddae parameter block " + std::to_string(i) + " has the wrong shape");
      m.params_[i] = std::move(p);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto mean = j.at("groups")[g].at("mean").get<std::vector<double>>();
      const auto scale = j.at("groups")[g].at("scale").get<std::vector<double>>();
      if (static_cast<int>(mean.size()) != groups[g].dim || static_cast<int>(scale.size()) != groups[g].dim)
        throw ModelError("ddae standardizer width mismatch for group " + groups[g].name);
      m.mean_[g] = Eigen::Map<const Eigen::RowVectorXd>(mean.data(), groups[g].dim);
      m.scale_[g] = Eigen::Map<const Eigen::RowVectorXd>(scale.data(), groups[g].dim);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("ddae model: ") + e.what());
  }
}

DdaeModel train_ddae(const std::vector<DdaeGroup>& groups, const GroupFrames& frames, const DdaeConfig& config,
                     DdaeHistory* history) {
  DdaeModel model(groups, config.seed);
  model.check_frames(frames);
  const Eigen::Index total = frames.front().rows();
  if (total < 2) throw DataError("ddae needs at least two training frames");
  if (config.batch_size <= 0 || config.max_epochs < 0 || !(config.learning_rate > 0.0))
    throw std::invalid_argument("ddae: invalid optimizer settings");

  Rng rng(config.seed ^ 0x5DDAE5EEDULL);
  std::vector<Eigen::Index> all(static_cast<std::size_t>(total));
  std::iota(all.begin(), all.end(), 0);
  if (all.size() > config.max_frames) {
    rng.shuffle(all);
    all.resize(config.max_frames);
    std::sort(all.begin(), all.end());
  }
  const GroupFrames raw = rows_of(frames, all);
  model.fit_standardizer(raw);
  const GroupFrames data = model.standardize(raw);

  std::vector<Eigen::Index> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  auto n_hold = static_cast<std::size_t>(std::floor(config.holdout_fraction * static_cast<double>(order.size())));
  if (order.size() - n_hold < 1) n_hold = 0;
  std::vector<Eigen::Index> hold(order.begin(), order.begin() + static_cast<long>(n_hold));
  std::vector<Eigen::Index> train(order.begin() + static_cast<long>(n_hold), order.end());
  std::sort(hold.begin(), hold.end());
  const GroupFrames hold_data = rows_of(data, hold);

  DdaeHistory hist;
  hist.initial_loss = model.loss(data, data);

  std::vector<double> p = model.parameters();
  std::vector<double> m1(p.size(), 0.0), m2(p.size(), 0.0), grad;
  std::vector<double> best = p;
  double best_loss = hold.empty() ? hist.initial_loss : model.loss(hold_data, hold_data);
  int since_best = 0;
  long step = 0;
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(train);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < train.size(); b += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t e = std::min(train.size(), b + static_cast<std::size_t>(config.batch_size));
      std::vector<Eigen::Index> idx(train.begin() + static_cast<long>(b), train.begin() + static_cast<long>(e));
      const GroupFrames clean = rows_of(data, idx);
      GroupFrames noisy = clean;
      if (config.noise > 0.0)
        for (auto& m : noisy)
          for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) += config.noise * rng.normal();
      epoch_loss += model.loss(noisy, clean, &grad);
      ++batches;
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t i = 0; i < p.size(); ++i) {
        m1[i] = kBeta1 * m1[i] + (1.0 - kBeta1) * grad[i];
        m2[i] = kBeta2 * m2[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        p[i] -= config.learning_rate * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + kEps);
      }
      model.set_parameters(p);
    }
    hist.train_loss.push_back(batches ? epoch_loss / static_cast<double>(batches) : 0.0);
    const double h = hold.empty() ? hist.train_loss.back() : model.loss(hold_data, hold_data);
    hist.holdout_loss.push_back(h);
    if (h < best_loss) {
      best_loss = h;
      best = p;
      hist.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  model.set_parameters(best);
  hist.final_loss = model.loss(data, data);
  if (history) *history = std::move(hist);
  return model;
}

}  // namespace fidget
