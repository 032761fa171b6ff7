#include "wavefield/models.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "wavefield/approximation.hpp"

namespace wavefield {

namespace {

const std::map<std::string, ModelKind>& kind_names() {
  static const std::map<std::string, ModelKind> names{{"mb-psia", ModelKind::MBPsiA},
                                                      {"mb-u", ModelKind::MBU},
                                                      {"mlp", ModelKind::MLP},
                                                      {"rff-gaussian", ModelKind::RFFGaussian},
                                                      {"rff-mb", ModelKind::RFFMB}};
  return names;
}

const std::map<std::string, Ponderation>& ponderation_names() {
  static const std::map<std::string, Ponderation> names{
      {"scaled-softmax", Ponderation::ScaledSoftmax}, {"softmax", Ponderation::Softmax}, {"none", Ponderation::None}};
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  in.imbue(std::locale::classic());
  T v{};
  if (!(in >> v) || !(in >> std::ws).eof()) throw ConfigError("bad value for " + key + ": " + value);
  return v;
}

Eigen::MatrixXcd as_complex(const Eigen::Matrix2Xd& x) { return x.cast<Complex>(); }

}  // namespace

std::string to_string(ModelKind kind) {
  for (const auto& [name, k] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  auto it = kind_names().find(name);
  if (it == kind_names().end()) throw ConfigError("unknown model kind: " + name);
  return it->second;
}

std::string to_string(Ponderation p) {
  for (const auto& [name, v] : ponderation_names())
    if (v == p) return name;
  return "unknown";
}

Ponderation parse_ponderation(const std::string& name) {
  auto it = ponderation_names().find(name);
  if (it == ponderation_names().end()) throw ConfigError("unknown ponderation: " + name);
  return it->second;
}

std::string format_model_config(const ModelConfig& cfg) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "model = " << to_string(cfg.kind) << "\n"
      << "seed = " << cfg.seed << "\n"
      << "output_gain = " << cfg.output_gain << "\n"
      << "atoms = " << cfg.mb.atoms << "\n"
      << "t1 = " << cfg.mb.t1 << "\nt2 = " << cfg.mb.t2 << "\nt3 = " << cfg.mb.t3 << "\n"
      << "t4 = " << cfg.mb.t4 << "\nt5 = " << cfg.mb.t5 << "\nt6 = " << cfg.mb.t6 << "\n"
      << "ponderation = " << to_string(cfg.mb.ponderation) << "\n"
      << "width = " << cfg.baseline.width << "\n"
      << "rff_atoms = " << cfg.baseline.atoms << "\n"
      << "sigma = " << cfg.baseline.sigma << "\n";
  return out.str();
}

ModelConfig parse_model_config(const std::string& text) {
  ModelConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "model") cfg.kind = parse_model_kind(value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "output_gain") cfg.output_gain = parse_number<double>(key, value);
    else if (key == "atoms") cfg.mb.atoms = parse_number<std::size_t>(key, value);
    else if (key == "t1") cfg.mb.t1 = parse_number<std::size_t>(key, value);
    else if (key == "t2") cfg.mb.t2 = parse_number<std::size_t>(key, value);
    else if (key == "t3") cfg.mb.t3 = parse_number<std::size_t>(key, value);
    else if (key == "t4") cfg.mb.t4 = parse_number<std::size_t>(key, value);
    else if (key == "t5") cfg.mb.t5 = parse_number<std::size_t>(key, value);
    else if (key == "t6") cfg.mb.t6 = parse_number<std::size_t>(key, value);
    else if (key == "ponderation") cfg.mb.ponderation = parse_ponderation(value);
    else if (key == "width") cfg.baseline.width = parse_number<std::size_t>(key, value);
    else if (key == "rff_atoms") cfg.baseline.atoms = parse_number<std::size_t>(key, value);
    else if (key == "sigma") cfg.baseline.sigma = parse_number<double>(key, value);
    else throw ConfigError("unknown key: " + key);
  }
  const auto& m = cfg.mb;
  if (!m.atoms || !m.t1 || !m.t2 || !m.t3 || !m.t4 || !m.t5 || !m.t6 || !cfg.baseline.width || !cfg.baseline.atoms)
    throw ConfigError("widths and atom counts must be positive");
  if (!(cfg.output_gain > 0)) throw ConfigError("output_gain must be positive");
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_config(ss.str());
}

void save_model_config(const std::string& path, const ModelConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << format_model_config(cfg);
}

Eigen::MatrixXcd ff_layer(const Eigen::Matrix2Xd& x, const Eigen::Matrix2Xd& U, double reference_wavelength) {
  const double k = 2.0 * kPi / reference_wavelength;
  const Eigen::MatrixXd phase = (U.transpose() * x) * (-k);
  return phase.unaryExpr([](double a) { return std::polar(1.0, a); });
}

void ChannelModel::set_frequencies(const FrequencyGrid&) {
  throw std::logic_error(to_string(kind()) + " has a fixed frequency grid");
}

std::size_t ChannelModel::parameter_count() {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.real_count();
  return n;
}

void ChannelModel::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

MBModel::MBModel(ModelKind variant, const MBConfig& cfg, const AntennaArray& array, const FrequencyGrid& grid,
                 std::uint64_t seed)
    : variant_(variant), cfg_(cfg), D_(static_cast<Eigen::Index>(cfg.atoms)) {
  if (variant != ModelKind::MBPsiA && variant != ModelKind::MBU)
    throw std::invalid_argument("MBModel needs an MB variant");
  if (!cfg.atoms || !cfg.t1 || !cfg.t2 || !cfg.t3 || !cfg.t4 || !cfg.t5 || !cfg.t6)
    throw std::invalid_argument("MB widths must be positive");
  antennas_ = array.size();
  k_ = 2.0 * kPi / array.reference_wavelength();
  U_ = unit_circle(D_);
  deltas_.resize(2, static_cast<Eigen::Index>(antennas_));
  for (std::size_t j = 0; j < antennas_; ++j)
    deltas_.col(static_cast<Eigen::Index>(j)) = array.element(j) - array.reference_position();
  bandwidth_ = grid.bandwidth_hz;
  set_frequencies(grid);

  nn::Rng rng(seed);
  weight_net_ = nn::ComplexMlp("weight", 2, cfg.t1, cfg.t1, cfg.atoms, rng);
  delay_net_ = nn::RealMlp("delay", 2, cfg.t2, cfg.t3, cfg.atoms, rng);
  delay_net_.last().bias().value.real_matrix() = Eigen::VectorXd::LinSpaced(D_, 0.0, 1.0);
  if (variant_ == ModelKind::MBPsiA) {
    sv_net_ = nn::ComplexMlp("steering", 2, cfg.t4, cfg.t4, antennas_ * cfg.atoms, rng, 0.1);
  } else {
    angle_net_ = nn::RealMlp("angle", 2, cfg.t5, cfg.t6, cfg.atoms, rng);
    angle_net_.last().bias().value.real_matrix() =
        Eigen::VectorXd::LinSpaced(D_, 0.0, 2.0 * kPi * static_cast<double>(D_ - 1) / static_cast<double>(D_));
  }
}

void MBModel::set_frequencies(const FrequencyGrid& grid) {
  if (grid.size() == 0) throw std::invalid_argument("empty frequency grid");
  if (!(grid.bandwidth_hz > 0)) throw std::invalid_argument("MB models need a positive bandwidth");
  if (std::abs(2.0 * kPi * grid.reference_hz / kSpeedOfLight - k_) > 1e-9 * k_)
    throw std::invalid_argument("frequency grid changes the reference frequency");
  subcarriers_ = grid.size();
  freq_offsets_.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k)
    freq_offsets_(static_cast<Eigen::Index>(k)) = grid.frequencies[k] - grid.reference_hz;
}

std::vector<nn::ParamBlock*> MBModel::parameters() {
  auto out = weight_net_.parameters();
  for (auto* p : delay_net_.parameters()) out.push_back(p);
  for (auto* p : (variant_ == ModelKind::MBPsiA ? sv_net_.parameters() : angle_net_.parameters())) out.push_back(p);
  return out;
}

Eigen::MatrixXcd MBModel::steering(Eigen::Index b) const {
  const auto Na = static_cast<Eigen::Index>(antennas_);
  if (variant_ == ModelKind::MBPsiA) return sv_raw_.col(b).reshaped(Na, D_);
  Eigen::MatrixXcd A(Na, D_);
  for (Eigen::Index i = 0; i < D_; ++i) {
    const double c = std::cos(theta_(i, b)), s = std::sin(theta_(i, b));
    for (Eigen::Index j = 0; j < Na; ++j) A(j, i) = std::polar(1.0, k_ * (c * deltas_(0, j) + s * deltas_(1, j)));
  }
  return A;
}

Eigen::MatrixXcd MBModel::forward(const Eigen::Matrix2Xd& x) {
  const Eigen::Index B = x.cols();
  const auto Na = static_cast<Eigen::Index>(antennas_);
  const auto Ns = static_cast<Eigen::Index>(subcarriers_);
  const Eigen::MatrixXcd xc = as_complex(x);

  z_ = weight_net_.forward(xc);
  p_.resize(D_, B);
  w_.resize(D_, B);
  for (Eigen::Index b = 0; b < B; ++b) {
    if (cfg_.ponderation == Ponderation::None) {
      w_.col(b) = z_.col(b);
      continue;
    }
    p_.col(b) = nn::softmax_c(z_.col(b));
    const double scale = cfg_.ponderation == Ponderation::ScaledSoftmax ? static_cast<double>(D_) : 1.0;
    w_.col(b) = scale * p_.col(b).cast<Complex>().cwiseProduct(z_.col(b));
  }
  psix_ = ff_layer(x, U_, 2.0 * kPi / k_);
  t_ = delay_net_.forward(x);
  if (variant_ == ModelKind::MBPsiA) sv_raw_ = sv_net_.forward(xc);
  else theta_ = angle_net_.forward(x);

  Eigen::MatrixXcd out(Na * Ns, B);
  Eigen::MatrixXcd F(Ns, D_);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (Eigen::Index i = 0; i < D_; ++i) {
      const double tau = std::abs(t_(i, b)) / bandwidth_;
      for (Eigen::Index k = 0; k < Ns; ++k) F(k, i) = std::polar(1.0, -2.0 * kPi * freq_offsets_(k) * tau);
    }
    const Eigen::VectorXcd varpi = w_.col(b).cwiseProduct(psix_.col(b));
    const Eigen::MatrixXcd H = steering(b) * varpi.asDiagonal() * F.transpose();
    out.col(b) = H.reshaped();
  }
  for (const auto& v : out.reshaped())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::runtime_error("non-finite activation in MB forward pass");
  return out;
}

void MBModel::backward(const Eigen::MatrixXcd& grad) {
  const Eigen::Index B = grad.cols();
  const auto Na = static_cast<Eigen::Index>(antennas_);
  const auto Ns = static_cast<Eigen::Index>(subcarriers_);
  if (B != z_.cols() || grad.rows() != Na * Ns) throw std::invalid_argument("MB backward: gradient shape mismatch");

  Eigen::MatrixXcd gz(D_, B);
  Eigen::MatrixXd gt(D_, B);
  Eigen::MatrixXcd gsv;
  Eigen::MatrixXd gtheta;
  if (variant_ == ModelKind::MBPsiA) gsv.resize(Na * D_, B);
  else gtheta.resize(D_, B);

  Eigen::MatrixXcd F(Ns, D_);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (Eigen::Index i = 0; i < D_; ++i) {
      const double tau = std::abs(t_(i, b)) / bandwidth_;
      for (Eigen::Index k = 0; k < Ns; ++k) F(k, i) = std::polar(1.0, -2.0 * kPi * freq_offsets_(k) * tau);
    }
    const Eigen::MatrixXcd A = steering(b);
    const Eigen::VectorXcd varpi = w_.col(b).cwiseProduct(psix_.col(b));
    const Eigen::MatrixXcd G = grad.col(b).reshaped(Na, Ns);

    const Eigen::MatrixXcd M = G * F.conjugate();  // Na x D
    const Eigen::VectorXcd g_varpi = A.conjugate().cwiseProduct(M).colwise().sum().transpose();
    const Eigen::MatrixXcd gA = M * varpi.conjugate().asDiagonal();
    const Eigen::MatrixXcd gF = (G.transpose() * A.conjugate()) * varpi.conjugate().asDiagonal();

    // delays
    for (Eigen::Index i = 0; i < D_; ++i) {
      double g_tau = 0.0;
      for (Eigen::Index k = 0; k < Ns; ++k) {
        const Complex dF = Complex(0.0, -2.0 * kPi * freq_offsets_(k)) * F(k, i);
        g_tau += (std::conj(gF(k, i)) * dF).real();
      }
      const double t = t_(i, b);
      gt(i, b) = t > 0 ? g_tau / bandwidth_ : (t < 0 ? -g_tau / bandwidth_ : 0.0);
    }

    // steering dictionary
    if (variant_ == ModelKind::MBPsiA) {
      gsv.col(b) = gA.reshaped();
    } else {
      for (Eigen::Index i = 0; i < D_; ++i) {
        const double c = std::cos(theta_(i, b)), s = std::sin(theta_(i, b));
        double g = 0.0;
        for (Eigen::Index j = 0; j < Na; ++j) {
          const Complex dA = Complex(0.0, k_ * (-s * deltas_(0, j) + c * deltas_(1, j))) * A(j, i);
          g += (std::conj(gA(j, i)) * dA).real();
        }
        gtheta(i, b) = g;
      }
    }

    // weights and ponderation
    const Eigen::VectorXcd gw = g_varpi.cwiseProduct(psix_.col(b).conjugate());
    if (cfg_.ponderation == Ponderation::None) {
      gz.col(b) = gw;
    } else {
      const double scale = cfg_.ponderation == Ponderation::ScaledSoftmax ? static_cast<double>(D_) : 1.0;
      Eigen::VectorXd gp(D_);
      for (Eigen::Index i = 0; i < D_; ++i) gp(i) = (std::conj(gw(i)) * scale * z_(i, b)).real();
      gz.col(b) = scale * p_.col(b).cast<Complex>().cwiseProduct(gw) +
                  nn::softmax_c_backward(z_.col(b), p_.col(b), gp);
    }
  }

  weight_net_.backward(gz);
  delay_net_.backward(gt);
  if (variant_ == ModelKind::MBPsiA) sv_net_.backward(gsv);
  else angle_net_.backward(gtheta);
}

BaselineModel::BaselineModel(ModelKind kind, const BaselineConfig& cfg, const AntennaArray& array,
                             const FrequencyGrid& grid, std::uint64_t seed)
    : kind_(kind) {
  if (kind != ModelKind::MLP && kind != ModelKind::RFFGaussian && kind != ModelKind::RFFMB)
    throw std::invalid_argument("BaselineModel needs a baseline kind");
  if (!cfg.width || !cfg.atoms) throw std::invalid_argument("baseline widths must be positive");
  antennas_ = array.size();
  subcarriers_ = grid.size();
  const double lambda = array.reference_wavelength();
  const std::size_t out = antennas_ * subcarriers_;
  nn::Rng rng(seed);
  if (kind == ModelKind::MLP) {
    net_ = nn::ComplexMlp("trunk", 2, cfg.width, cfg.width, out, rng);
    return;
  }
  const auto D = static_cast<Eigen::Index>(cfg.atoms);
  if (kind == ModelKind::RFFMB) {
    B_ = unit_circle(D).transpose() / lambda;
  } else {
    std::normal_distribution<double> normal(0.0, cfg.sigma > 0 ? cfg.sigma : 1.0 / lambda);
    B_.resize(D, 2);
    for (Eigen::Index i = 0; i < D; ++i) {
      B_(i, 0) = normal(rng);
      B_(i, 1) = normal(rng);
    }
  }
  net_ = nn::ComplexMlp("trunk", cfg.atoms, cfg.width, cfg.width, out, rng);
}

Eigen::MatrixXcd BaselineModel::forward(const Eigen::Matrix2Xd& x) {
  if (kind_ == ModelKind::MLP) return net_.forward(as_complex(x));
  const Eigen::MatrixXd phase = (B_ * x) * (-2.0 * kPi);
  return net_.forward(phase.unaryExpr([](double a) { return std::polar(1.0, a); }));
}

void BaselineModel::backward(const Eigen::MatrixXcd& grad) { net_.backward(grad); }

std::vector<nn::ParamBlock*> BaselineModel::parameters() { return net_.parameters(); }

std::unique_ptr<ChannelModel> make_model(const ModelConfig& cfg, const AntennaArray& array,
                                         const FrequencyGrid& grid) {
  if (cfg.kind == ModelKind::MBPsiA || cfg.kind == ModelKind::MBU)
    return std::make_unique<MBModel>(cfg.kind, cfg.mb, array, grid, cfg.seed);
  return std::make_unique<BaselineModel>(cfg.kind, cfg.baseline, array, grid, cfg.seed);
}

std::size_t effective_support(const Eigen::VectorXcd& w, double fraction) {
  std::vector<double> mags(static_cast<std::size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(w(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double total = std::accumulate(mags.begin(), mags.end(), 0.0);
  if (total == 0.0) return 0;
  double acc = 0.0;
  for (std::size_t n = 0; n < mags.size(); ++n) {
    acc += mags[n];
    if (acc >= fraction * total) return n + 1;
  }
  return mags.size();
}

}  // namespace wavefield
