#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavefield/dataset.hpp"
#include "wavefield/models.hpp"

namespace wavefield {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 512;
  double lr = 1e-3;
  std::uint64_t seed = 1;
};

/// Locations (2 x N) and flattened channels ((Na Ns) x N, row j + Na k)
/// divided by the output gain.
struct TrainingData {
  Eigen::Matrix2Xd x;
  Eigen::MatrixXcd h;
};

/// sqrt of the mean |h|^2 over all entries of the dataset.
double rms_gain(const Dataset& data);

/// Keeps the first `subcarriers` frequencies of every record.
TrainingData to_training_data(const Dataset& data, double gain, std::size_t subcarriers = 0);

struct TrainResult {
  std::vector<double> loss_curve;  // epoch means of ||H - f(x)||_F^2 in gain units
  std::uint64_t steps = 0;
  double seconds = 0.0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, TrainResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const TrainResult& partial() const { return partial_; }

 private:
  TrainResult partial_;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Adam over shuffled mini-batches of the mean Frobenius loss. On a NaN
/// loss or gradient the parameters are rolled back to the end of the last
/// complete epoch and TrainingDiverged is thrown.
TrainResult train(ChannelModel& model, const TrainingData& data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Loss (1/|B|) sum ||H - f(x)||_F^2 and its output cotangent 2 (f - H) / |B|.
double frobenius_loss(const Eigen::MatrixXcd& prediction, const Eigen::MatrixXcd& target, Eigen::MatrixXcd* grad);

/// Model output scaled back to physical units, in chunks of `chunk` columns.
Eigen::MatrixXcd predict(ChannelModel& model, const Eigen::Matrix2Xd& x, double gain, std::size_t chunk = 512);

}  // namespace wavefield
