#include "wavefield/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "wavefield/nn/adam.hpp"

namespace wavefield {

double rms_gain(const Dataset& data) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : data.records) {
    sum += r.channel.squaredNorm();
    n += static_cast<std::size_t>(r.channel.size());
  }
  if (n == 0 || !(sum > 0)) throw std::invalid_argument("cannot derive an output gain from an empty or zero dataset");
  return std::sqrt(sum / static_cast<double>(n));
}

TrainingData to_training_data(const Dataset& data, double gain, std::size_t subcarriers) {
  const auto Na = static_cast<Eigen::Index>(data.header.antennas);
  const auto Ns = static_cast<Eigen::Index>(subcarriers ? subcarriers : data.header.subcarriers);
  if (Ns > static_cast<Eigen::Index>(data.header.subcarriers)) throw std::invalid_argument("too many subcarriers");
  const auto N = static_cast<Eigen::Index>(data.records.size());
  TrainingData td;
  td.x.resize(2, N);
  td.h.resize(Na * Ns, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const auto& r = data.records[static_cast<std::size_t>(n)];
    td.x.col(n) = r.location;
    td.h.col(n) = r.channel.leftCols(Ns).reshaped() / gain;
  }
  return td;
}

double frobenius_loss(const Eigen::MatrixXcd& prediction, const Eigen::MatrixXcd& target, Eigen::MatrixXcd* grad) {
  const auto B = static_cast<double>(prediction.cols());
  const Eigen::MatrixXcd diff = prediction - target;
  if (grad) *grad = diff * (2.0 / B);
  return diff.squaredNorm() / B;
}

TrainResult train(ChannelModel& model, const TrainingData& data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  if (data.x.cols() == 0) throw std::invalid_argument("empty training set");
  if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (data.h.rows() != static_cast<Eigen::Index>(model.antennas() * model.subcarriers()))
    throw std::invalid_argument("training targets do not match the model output size");

  const auto start = std::chrono::steady_clock::now();
  auto params = model.parameters();
  nn::Adam adam(params, {cfg.lr});
  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(data.x.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  TrainResult result;
  std::vector<nn::Storage> snapshot;
  auto save = [&] {
    snapshot.clear();
    for (const auto* p : params) snapshot.push_back(p->value.values);
  };
  auto rollback = [&](const std::string& why) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value.values = snapshot[i];
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    throw TrainingDiverged(why + " at epoch " + std::to_string(result.loss_curve.size() + 1) +
                               "; parameters restored to the last complete epoch",
                           result);
  };
  save();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const auto B = static_cast<Eigen::Index>(end - begin);
      Eigen::Matrix2Xd xb(2, B);
      Eigen::MatrixXcd hb(data.h.rows(), B);
      for (Eigen::Index i = 0; i < B; ++i) {
        xb.col(i) = data.x.col(order[begin + static_cast<std::size_t>(i)]);
        hb.col(i) = data.h.col(order[begin + static_cast<std::size_t>(i)]);
      }
      model.zero_grad();
      Eigen::MatrixXcd grad;
      double loss = 0.0;
      try {
        loss = frobenius_loss(model.forward(xb), hb, &grad);
      } catch (const std::runtime_error& e) {
        rollback(e.what());
      }
      if (!std::isfinite(loss)) rollback("non-finite loss");
      model.backward(grad);
      try {
        adam.step();
      } catch (const nn::NonFiniteGradient& e) {
        rollback(e.what());
      }
      ++result.steps;
      total += loss * static_cast<double>(B);
    }
    result.loss_curve.push_back(total / static_cast<double>(order.size()));
    save();
    if (on_epoch) on_epoch(epoch, result.loss_curve.back());
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Eigen::MatrixXcd predict(ChannelModel& model, const Eigen::Matrix2Xd& x, double gain, std::size_t chunk) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(model.antennas() * model.subcarriers()), x.cols());
  const auto step = static_cast<Eigen::Index>(std::max<std::size_t>(chunk, 1));
  for (Eigen::Index b = 0; b < x.cols(); b += step) {
    const Eigen::Index n = std::min(step, x.cols() - b);
    out.middleCols(b, n) = model.forward(x.middleCols(b, n)) * gain;
  }
  return out;
}

}  // namespace wavefield
