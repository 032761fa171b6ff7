#include <cmath>
#include <random>

#include "doctest.h"
#include "wavefield/approximation.hpp"
#include "wavefield/models.hpp"

using namespace wavefield;

namespace {

constexpr double kFc = 3.5e9;
const double kLambda = wavelength(kFc);

AntennaArray small_array() { return AntennaArray::ula(4, Location(0, -3), kLambda); }
FrequencyGrid small_grid() { return FrequencyGrid::uniform(kFc, 50e6, 3); }

ModelConfig small_config(ModelKind kind, Ponderation pond = Ponderation::ScaledSoftmax) {
  ModelConfig cfg;
  cfg.kind = kind;
  cfg.mb = {6, 5, 4, 4, 7, 4, 5, pond};
  cfg.baseline = {5, 6, 0.0};
  cfg.seed = 3;
  return cfg;
}

Eigen::Matrix2Xd random_locations(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::Matrix2Xd x(2, n);
  for (auto& v : x.reshaped()) v = u(rng);
  return x;
}

Eigen::MatrixXcd random_c(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXcd m(r, c);
  for (auto& v : m.reshaped()) v = Complex(n(rng), n(rng));
  return m;
}

}  // namespace

TEST_CASE("ff layer") {
  const Eigen::Matrix2Xd U = unit_circle(12);
  const Eigen::MatrixXcd at0 = ff_layer(Eigen::Matrix2Xd::Zero(2, 1), U, kLambda);
  CHECK((at0.array() - Complex(1, 0)).abs().maxCoeff() < 1e-15);

  const Location x(0.3, -0.7);
  Eigen::Matrix2Xd pair(2, 2);
  pair.col(0) = x;
  pair.col(1) = x + kLambda * U.col(1);
  const Eigen::MatrixXcd f = ff_layer(pair, U, kLambda);
  CHECK(std::abs(f(1, 0) - f(1, 1)) < 1e-12);
  CHECK((f.col(0) - planar_wavefronts(U, x, kLambda)).norm() < 1e-13);
}

TEST_CASE("untrained models produce finite outputs of the right shape") {
  std::mt19937_64 rng(1);
  const Eigen::Matrix2Xd x = random_locations(5, rng);
  for (auto kind : {ModelKind::MBPsiA, ModelKind::MBU, ModelKind::MLP, ModelKind::RFFGaussian, ModelKind::RFFMB}) {
    auto m = make_model(small_config(kind), small_array(), small_grid());
    const Eigen::MatrixXcd out = m->forward(x);
    CHECK(out.rows() == 12);
    CHECK(out.cols() == 5);
    CHECK(out.allFinite());
    CHECK(m->kind() == kind);
  }
}

TEST_CASE("full-model gradients match finite differences") {
  for (auto kind : {ModelKind::MBPsiA, ModelKind::MBU, ModelKind::MLP, ModelKind::RFFGaussian, ModelKind::RFFMB}) {
    for (auto pond : {Ponderation::ScaledSoftmax, Ponderation::Softmax, Ponderation::None}) {
      if (pond != Ponderation::ScaledSoftmax && (kind != ModelKind::MBPsiA && kind != ModelKind::MBU)) continue;
      CAPTURE(to_string(kind));
      CAPTURE(to_string(pond));
      auto m = make_model(small_config(kind, pond), small_array(), small_grid());
      std::mt19937_64 rng(7);
      const Eigen::Matrix2Xd x = random_locations(4, rng);
      const Eigen::MatrixXcd cot = random_c(12, 4, rng);
      auto loss = [&] { return (cot.conjugate().cwiseProduct(m->forward(x))).real().sum(); };
      m->zero_grad();
      loss();
      m->backward(cot);
      auto params = m->parameters();
      std::normal_distribution<double> n;
      const double h = 1e-5;
      int good = 0;
      for (int dir = 0; dir < 20; ++dir) {
        std::vector<nn::Storage> v;
        double analytic = 0;
        for (auto* p : params) {
          nn::Storage d(p->value.values.size());
          for (std::size_t i = 0; i < d.size(); ++i) {
            d[i] = n(rng);
            analytic += d[i] * p->grad.values[i];
          }
          v.push_back(std::move(d));
        }
        auto shift = [&](double s) {
          for (std::size_t b = 0; b < params.size(); ++b)
            for (std::size_t i = 0; i < v[b].size(); ++i) params[b]->value.values[i] += s * v[b][i];
        };
        shift(h);
        const double up = loss();
        shift(-2 * h);
        const double down = loss();
        shift(h);
        const double fd = (up - down) / (2 * h);
        const double rel = std::abs(fd - analytic) / std::max(std::abs(fd), 1e-8);
        CAPTURE(rel);
        CHECK(rel < 1e-4);
        good += rel < 1e-4;
      }
      CHECK(good == 20);
    }
  }
}

TEST_CASE("oracle-stuffed MB models reproduce a dictionary atom") {
  const AntennaArray array = small_array();
  const FrequencyGrid grid = small_grid();
  const Eigen::Index D = 6, atom = 2;
  const Complex c(0.7, -1.3);
  const DictionaryBank bank = build_dictionary_bank(array, grid, D, {0.0, 80e-9});

  for (auto kind : {ModelKind::MBU, ModelKind::MBPsiA}) {
    MBModel m(kind, small_config(kind, Ponderation::None).mb, array, grid, 5);
    m.weight_net().last().weight().value.complex_matrix().setZero();
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(D);
    z(atom) = c;
    m.weight_net().last().bias().value.complex_matrix() = z;
    m.delay_net().last().weight().value.real_matrix().setZero();
    m.delay_net().last().bias().value.real_matrix() = bank.tau * grid.bandwidth_hz;
    if (kind == ModelKind::MBU) {
      m.angle_net().last().weight().value.real_matrix().setZero();
    } else {
      m.steering_net().last().weight().value.complex_matrix().setZero();
      m.steering_net().last().bias().value.complex_matrix() = bank.Psi_a.reshaped();
    }
    std::mt19937_64 rng(2);
    const Eigen::Matrix2Xd x = random_locations(3, rng);
    const Eigen::MatrixXcd out = m.forward(x);
    for (Eigen::Index b = 0; b < 3; ++b) {
      const Eigen::MatrixXcd expected = assemble_channel(z, x.col(b), bank);
      CHECK((out.col(b).reshaped(4, 3) - expected).norm() < 1e-12 * expected.norm());
    }
    CHECK((m.spatial_frequencies() - bank.U).norm() < 1e-15);
  }
}

TEST_CASE("output is linear in the weights") {
  MBModel m(ModelKind::MBU, small_config(ModelKind::MBU, Ponderation::None).mb, small_array(), small_grid(), 5);
  std::mt19937_64 rng(3);
  const Eigen::Matrix2Xd x = random_locations(4, rng);
  const Eigen::MatrixXcd once = m.forward(x);
  m.weight_net().last().weight().value.complex_matrix() *= 2.0;
  m.weight_net().last().bias().value.complex_matrix() *= 2.0;
  const Eigen::MatrixXcd twice = m.forward(x);
  CHECK(twice == 2.0 * once);
}

TEST_CASE("softmax ponderation concentrates the weights") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXcd z = random_c(50, 1, rng).col(0);
    const Eigen::VectorXd p = nn::softmax_c(z);
    const double entropy = -(p.array() * p.array().log()).sum();
    CHECK(entropy < std::log(50.0));
  }
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(10);
  w(3) = 5;
  w(7) = Complex(0, 4);
  w(1) = 0.05;
  CHECK(effective_support(w) == 2);
  CHECK(effective_support(Eigen::VectorXcd::Ones(10)) == 10);
}

TEST_CASE("parameter counts") {
  ModelConfig cfg;
  cfg.mb = {256, 128, 64, 64, 32, 64, 64, Ponderation::ScaledSoftmax};
  const AntennaArray array = AntennaArray::ula(8, Location(0, -3), kLambda);
  const FrequencyGrid grid = FrequencyGrid::uniform(kFc, 50e6, 8);
  cfg.kind = ModelKind::MBPsiA;
  const std::size_t psia = make_model(cfg, array, grid)->parameter_count();
  cfg.kind = ModelKind::MBU;
  const std::size_t u = make_model(cfg, array, grid)->parameter_count();
  CHECK(psia > u);
  // weight net 2->128->128->256 complex, delay net 2->64->64->256 real, angle net 2->64->64->256 real
  const std::size_t weight = 2 * (2 * 128 + 128 + 128 * 128 + 128 + 128 * 256 + 256);
  const std::size_t real_net = 2 * 64 + 64 + 64 * 64 + 64 + 64 * 256 + 256;
  CHECK(u == weight + 2 * real_net);
  CHECK(psia == weight + real_net + 2 * (2 * 32 + 32 + 32 * 32 + 32 + 32 * 8 * 256 + 8 * 256));
}

TEST_CASE("frequency changes") {
  auto mb = make_model(small_config(ModelKind::MBU), small_array(), FrequencyGrid::uniform(kFc, 50e6, 6));
  std::mt19937_64 rng(5);
  const Eigen::Matrix2Xd x = random_locations(2, rng);
  const Eigen::MatrixXcd full = mb->forward(x);
  mb->set_frequencies(FrequencyGrid::uniform(kFc, 50e6, 6).lower(3));
  const Eigen::MatrixXcd low = mb->forward(x);
  CHECK(low.rows() == 12);
  CHECK((low - full.topRows(12)).norm() < 1e-12 * full.norm());
  CHECK_THROWS(mb->set_frequencies(FrequencyGrid::uniform(3.6e9, 50e6, 6)));
  auto mlp = make_model(small_config(ModelKind::MLP), small_array(), small_grid());
  CHECK_THROWS_AS(mlp->set_frequencies(small_grid()), std::logic_error);
}

TEST_CASE("baseline embeddings") {
  auto rff = make_model(small_config(ModelKind::RFFMB), small_array(), small_grid());
  const auto& B = dynamic_cast<BaselineModel&>(*rff).embedding();
  CHECK((B.transpose() * kLambda - unit_circle(6)).norm() < 1e-12);
  auto g = make_model(small_config(ModelKind::RFFGaussian), small_array(), small_grid());
  CHECK(dynamic_cast<BaselineModel&>(*g).embedding().rows() == 6);
  auto mlp = make_model(small_config(ModelKind::MLP), small_array(), small_grid());
  CHECK(dynamic_cast<BaselineModel&>(*mlp).embedding().size() == 0);
}

TEST_CASE("config round trip") {
  ModelConfig cfg = small_config(ModelKind::RFFGaussian, Ponderation::Softmax);
  cfg.baseline.sigma = 12.5;
  cfg.output_gain = 0.0123456789012345;
  const ModelConfig back = parse_model_config(format_model_config(cfg));
  CHECK(back.kind == cfg.kind);
  CHECK(back.mb.ponderation == Ponderation::Softmax);
  CHECK(back.mb.t4 == 7);
  CHECK(back.baseline.sigma == 12.5);
  CHECK(back.output_gain == cfg.output_gain);
  CHECK(back.seed == 3);
  CHECK_THROWS_AS(parse_model_config("model = nope\n"), ConfigError);
  CHECK_THROWS_AS(parse_model_config("model = mlp\nunknown = 1\n"), ConfigError);
  for (auto k : {ModelKind::MBPsiA, ModelKind::MBU, ModelKind::MLP, ModelKind::RFFGaussian, ModelKind::RFFMB})
    CHECK(parse_model_kind(to_string(k)) == k);
}

TEST_CASE("same seed gives identical models") {
  auto a = make_model(small_config(ModelKind::MBPsiA), small_array(), small_grid());
  auto b = make_model(small_config(ModelKind::MBPsiA), small_array(), small_grid());
  std::mt19937_64 rng(6);
  const Eigen::Matrix2Xd x = random_locations(3, rng);
  CHECK(a->forward(x) == b->forward(x));
}
