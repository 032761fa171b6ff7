#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wavefield/geometry.hpp"
#include "wavefield/nn/layers.hpp"

namespace wavefield {

enum class ModelKind { MBPsiA, MBU, MLP, RFFGaussian, RFFMB };

/// Weighting applied to the raw weight-net output z.
enum class Ponderation {
  ScaledSoftmax,  // w = D softmax_C(z) . z
  Softmax,        // w = softmax_C(z) . z
  None,           // w = z
};

struct MBConfig {
  std::size_t atoms = 1000;  // D
  std::size_t t1 = 256, t2 = 64, t3 = 64, t4 = 1024, t5 = 64, t6 = 64;
  Ponderation ponderation = Ponderation::ScaledSoftmax;
};

struct BaselineConfig {
  std::size_t width = 256;
  std::size_t atoms = 1000;  // embedding size of the RFF variants
  double sigma = 0.0;        // gaussian frequency std (cycles/m); 0 means 1 / lambda_r
};

/// Everything needed to rebuild a model besides the scene geometry.
struct ModelConfig {
  ModelKind kind = ModelKind::MBPsiA;
  MBConfig mb;
  BaselineConfig baseline;
  std::uint64_t seed = 1;
  /// Networks predict H / output_gain; set from the training set RMS.
  double output_gain = 1.0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
std::string to_string(Ponderation p);
Ponderation parse_ponderation(const std::string& name);

/// Text key-value format, one `key = value` per line, `#` comments.
std::string format_model_config(const ModelConfig& cfg);
ModelConfig parse_model_config(const std::string& text);
ModelConfig load_model_config(const std::string& path);
void save_model_config(const std::string& path, const ModelConfig& cfg);

/// exp(-j 2 pi / lambda_r u_i^T x) for each column of U and each location
/// column of x: D x batch.
Eigen::MatrixXcd ff_layer(const Eigen::Matrix2Xd& x, const Eigen::Matrix2Xd& U, double reference_wavelength);

/// Location -> channel map. Outputs are (Na Ns) x batch with entry (j, k) of
/// each channel stored at row j + Na k, in units of output_gain.
class ChannelModel {
 public:
  virtual ~ChannelModel() = default;

  virtual Eigen::MatrixXcd forward(const Eigen::Matrix2Xd& x) = 0;
  /// `grad` holds dL/dRe + j dL/dIm of the last forward output.
  virtual void backward(const Eigen::MatrixXcd& grad) = 0;
  virtual std::vector<nn::ParamBlock*> parameters() = 0;
  virtual ModelKind kind() const = 0;

  /// MB models rebuild their frequency dictionary on a new grid sharing
  /// the reference frequency; baselines throw.
  virtual void set_frequencies(const FrequencyGrid& grid);

  std::size_t antennas() const { return antennas_; }
  std::size_t subcarriers() const { return subcarriers_; }
  std::size_t parameter_count();
  void zero_grad();

 protected:
  std::size_t antennas_ = 0;
  std::size_t subcarriers_ = 0;
};

class MBModel : public ChannelModel {
 public:
  MBModel(ModelKind variant, const MBConfig& cfg, const AntennaArray& array, const FrequencyGrid& grid,
          std::uint64_t seed);

  Eigen::MatrixXcd forward(const Eigen::Matrix2Xd& x) override;
  void backward(const Eigen::MatrixXcd& grad) override;
  std::vector<nn::ParamBlock*> parameters() override;
  ModelKind kind() const override { return variant_; }
  void set_frequencies(const FrequencyGrid& grid) override;

  const Eigen::Matrix2Xd& spatial_frequencies() const { return U_; }
  /// w(x) of the last forward pass, D x batch.
  const Eigen::MatrixXcd& last_weights() const { return w_; }

  nn::ComplexMlp& weight_net() { return weight_net_; }
  nn::RealMlp& delay_net() { return delay_net_; }
  nn::ComplexMlp& steering_net() { return sv_net_; }  // MB-Psi_a
  nn::RealMlp& angle_net() { return angle_net_; }     // MB-u

 private:
  Eigen::MatrixXcd steering(Eigen::Index b) const;

  ModelKind variant_;
  MBConfig cfg_;
  Eigen::Index D_;
  double k_;  // 2 pi / lambda_r
  double bandwidth_;  // delay scale, fixed at construction
  Eigen::Matrix2Xd U_;
  Eigen::Matrix2Xd deltas_;      // a_j - a_r
  Eigen::VectorXd freq_offsets_;  // f_k - f_r

  nn::ComplexMlp weight_net_;
  nn::RealMlp delay_net_;
  nn::ComplexMlp sv_net_;
  nn::RealMlp angle_net_;

  // forward cache
  Eigen::MatrixXcd z_, w_, psix_, sv_raw_;
  Eigen::MatrixXd p_, t_, theta_;
};

class BaselineModel : public ChannelModel {
 public:
  BaselineModel(ModelKind kind, const BaselineConfig& cfg, const AntennaArray& array, const FrequencyGrid& grid,
                std::uint64_t seed);

  Eigen::MatrixXcd forward(const Eigen::Matrix2Xd& x) override;
  void backward(const Eigen::MatrixXcd& grad) override;
  std::vector<nn::ParamBlock*> parameters() override;
  ModelKind kind() const override { return kind_; }

  /// Embedding frequencies (cycles/m), D x 2; empty for the MLP.
  const Eigen::MatrixX2d& embedding() const { return B_; }

 private:
  ModelKind kind_;
  Eigen::MatrixX2d B_;
  nn::ComplexMlp net_;
};

std::unique_ptr<ChannelModel> make_model(const ModelConfig& cfg, const AntennaArray& array,
                                         const FrequencyGrid& grid);

/// Smallest number of entries holding `fraction` of sum |w_i|.
std::size_t effective_support(const Eigen::VectorXcd& w, double fraction = 0.99);

}  // namespace wavefield
