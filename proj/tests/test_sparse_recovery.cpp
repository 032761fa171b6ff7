#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "wavefield/sparse_recovery.hpp"

using namespace wavefield;

namespace {

constexpr double kFc = 3.5e9;

DictionaryBank small_bank(Eigen::Index atoms = 48) {
  const double lambda = wavelength(kFc);
  return build_dictionary_bank(AntennaArray::ula(8, Location(0, -3), lambda), FrequencyGrid::uniform(kFc, 50e6, 8),
                               atoms, default_delay_range(4.0));
}

double coherence(const DictionaryBank& b, Eigen::Index i, Eigen::Index j, const Location& x) {
  const Eigen::MatrixXcd ai = dictionary_atom(b, i, x), aj = dictionary_atom(b, j, x);
  return std::abs((ai.conjugate().cwiseProduct(aj)).sum()) / (ai.norm() * aj.norm());
}

}  // namespace

TEST_CASE("single planted atom") {
  const DictionaryBank b = small_bank();
  const Location x(0.4, -0.2);
  const SparseSolution s = omp_decompose(3.0 * dictionary_atom(b, 5, x), x, b, 4);
  REQUIRE(s.support.size() == 1);
  CHECK(s.support[0] == 5);
  CHECK(std::abs(s.coefficients[0] - Complex(3.0, 0.0)) < 1e-12);
  CHECK(s.residual_norm < 1e-10);
  CHECK(s.iterations == 1);
}

TEST_CASE("zero channel") {
  const DictionaryBank b = small_bank();
  const SparseSolution s = omp_decompose(Eigen::MatrixXcd::Zero(8, 8), Location(0, 0), b, 4);
  CHECK(s.support.empty());
  CHECK(s.residual_norm == 0.0);
}

TEST_CASE("factored correlations equal Frobenius inner products") {
  const DictionaryBank b = small_bank(16);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd R(8, 8);
  for (auto& v : R.reshaped()) v = Complex(n(rng), n(rng));
  const Location x(0.3, 0.9);
  const Eigen::VectorXcd c = atom_correlations(R, x, b);
  for (Eigen::Index i = 0; i < 16; ++i)
    CHECK(std::abs(c(i) - (dictionary_atom(b, i, x).conjugate().cwiseProduct(R)).sum()) < 1e-10);
}

TEST_CASE("planted three-atom combinations are recovered") {
  const DictionaryBank b = small_bank(16);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<Eigen::Index> pick(0, b.atoms() - 1);
  std::uniform_real_distribution<double> mag(0.5, 1.5), ph(0, 2 * kPi), loc(-2, 2);
  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    const Location x(loc(rng), loc(rng));
    std::vector<Eigen::Index> sup;
    while (sup.size() < 3) {
      const Eigen::Index c = pick(rng);
      if (std::all_of(sup.begin(), sup.end(), [&](Eigen::Index s) { return s != c && coherence(b, s, c, x) < 0.5; }))
        sup.push_back(c);
    }
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(8, 8);
    for (auto i : sup) H += std::polar(mag(rng), ph(rng)) * dictionary_atom(b, i, x);
    const SparseSolution s = omp_decompose(H, x, b, 3);
    CHECK(std::is_sorted(s.residual_history.rbegin(), s.residual_history.rend()));
    // residual orthogonal to every selected atom
    const Eigen::MatrixXcd R = H - reconstruct(s, x, b);
    for (auto i : s.support) CHECK(std::abs((dictionary_atom(b, i, x).conjugate().cwiseProduct(R)).sum()) < 1e-9);
    exact += std::set<Eigen::Index>(sup.begin(), sup.end()) ==
             std::set<Eigen::Index>(s.support.begin(), s.support.end());
  }
  CHECK(exact >= 97);
}

TEST_CASE("plain matching pursuit reduces the residual") {
  const DictionaryBank b = small_bank();
  const Location x(0.1, 0.2);
  const Eigen::MatrixXcd H = dictionary_atom(b, 3, x) + 0.5 * dictionary_atom(b, 20, x);
  const SparseSolution s = omp_decompose(H, x, b, 10, PursuitMode::Plain);
  CHECK(s.residual_norm < H.norm());
  for (std::size_t i = 1; i < s.residual_history.size(); ++i)
    CHECK(s.residual_history[i] <= s.residual_history[i - 1] + 1e-12);
}

TEST_CASE("two-stage estimate") {
  const DictionaryBank b = small_bank(64);
  const Location x_r(0.2, 0.1);
  const Eigen::MatrixXcd H = 2.0 * dictionary_atom(b, 7, x_r) + Complex(0, 1) * dictionary_atom(b, 40, x_r);
  const std::vector<ReferenceSolution> refs{{x_r, omp_decompose(H, x_r, b, 2)}, {Location(5, 5), SparseSolution{}}};
  CHECK((two_stage_estimate(x_r, refs, b) - reconstruct(refs[0].solution, x_r, b)).norm() == 0.0);
  CHECK((two_stage_estimate(x_r, refs, b) - H).norm() < 1e-10);
  CHECK_THROWS(two_stage_estimate(x_r, {}, b));
}

TEST_CASE("two-stage estimate on a single LoS path") {
  const double lambda = wavelength(kFc);
  const AntennaArray ula = AntennaArray::ula(8, Location(0, -3), lambda);
  const FrequencyGrid grid = FrequencyGrid::uniform(kFc, 50e6, 8);
  // atom 180 points at broadside with the true delay
  const DictionaryBank b = build_dictionary_bank(ula, grid, 720, {0.0, 3.0 / kSpeedOfLight * 719.0 / 180.0});
  Scene scene;
  scene.array = ula;
  scene.bounds.side = 10.0;
  const Location x_r(0.0, 0.0);
  const ChannelMatrix Hr = simulate_channel(scene, x_r, grid);
  const std::vector<ReferenceSolution> refs{{x_r, omp_decompose(Hr.entries, x_r, b, 12)}};
  auto nmse = [&](const Location& x) {
    const Eigen::MatrixXcd truth = simulate_channel(scene, x, grid).entries;
    return 10 * std::log10((two_stage_estimate(x, refs, b) - truth).squaredNorm() / truth.squaredNorm());
  };
  CHECK(nmse(Location(lambda / 8, 0)) < -15.0);
  CHECK(nmse(Location(0, lambda / 8)) < -15.0);
  CHECK(nmse(Location(5 * lambda, 0)) > -5.0);
}

TEST_CASE("argument checks") {
  const DictionaryBank b = small_bank(8);
  CHECK_THROWS(omp_decompose(Eigen::MatrixXcd::Zero(3, 3), Location(0, 0), b, 2));
  CHECK_THROWS(omp_decompose(Eigen::MatrixXcd::Zero(8, 8), Location(0, 0), b, 9));
}
