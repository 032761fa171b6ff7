#include "wavefield/approximation.hpp"

#include <cmath>
#include <stdexcept>

namespace wavefield {

ReferenceFrame ReferenceFrame::make(const Location& x_r, const Location& a_r) {
  ReferenceFrame f;
  f.x_r = x_r;
  f.a_r = a_r;
  f.d_r = (x_r - a_r).norm();
  if (!(f.d_r > 0.0)) throw std::invalid_argument("reference location coincides with reference antenna");
  f.tau_r = f.d_r / kSpeedOfLight;
  f.u_r = (x_r - a_r) / f.d_r;
  return f;
}

double taylor_distance(const Location& x, const Location& a, const ReferenceFrame& frame) {
  const Location to_ref = frame.x_r - a;
  const double n = to_ref.norm();
  if (!(n > 0.0)) throw std::invalid_argument("antenna coincides with the reference location");
  return frame.d_r + (to_ref / n).dot(x - frame.x_r) - frame.u_r.dot(a - frame.a_r);
}

double taylor_error_estimate(const Location& x, const Location& a, const ReferenceFrame& frame) {
  const double dj = (frame.x_r - a).norm();
  if (!(dj > 0.0) || !(frame.d_r > 0.0)) throw std::invalid_argument("zero reference distance");
  return 0.5 * ((x - frame.x_r).squaredNorm() / dj + (a - frame.a_r).squaredNorm() / frame.d_r);
}

Complex approx_channel_entry(const Location& x, std::span<const Location> antennas,
                             std::span<const ReferenceFrame> frames, std::span<const Complex> gammas,
                             double frequency_hz, double reference_hz) {
  if (antennas.size() != frames.size() || gammas.size() != frames.size())
    throw std::invalid_argument("per-path inputs must have the same length");
  const double k_r = 2.0 * kPi / wavelength(reference_hz);
  Complex h{0.0, 0.0};
  for (std::size_t l = 0; l < frames.size(); ++l) {
    const auto& f = frames[l];
    const Complex reference = std::polar(1.0 / f.d_r, -k_r * f.d_r);
    const Complex location = std::polar(1.0, -k_r * f.u_r.dot(x - f.x_r));
    const Complex frequency = std::polar(1.0, -2.0 * kPi * (frequency_hz - reference_hz) * f.tau_r);
    const Complex antenna = std::polar(1.0, k_r * f.u_r.dot(antennas[l] - f.a_r));
    h += gammas[l] * reference * location * frequency * antenna;
  }
  return h;
}

Eigen::Matrix2Xd unit_circle(Eigen::Index count) {
  Eigen::Matrix2Xd U(2, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double angle = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
    U(0, i) = std::cos(angle);
    U(1, i) = std::sin(angle);
  }
  return U;
}

Eigen::VectorXcd steering_vector(const AntennaArray& array, const Location& dod) {
  const double k_r = 2.0 * kPi / array.reference_wavelength();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(array.size()));
  for (std::size_t j = 0; j < array.size(); ++j)
    v(j) = std::polar(1.0, k_r * dod.dot(array.element(j) - array.reference_position()));
  return v;
}

Eigen::VectorXcd frequency_response(const FrequencyGrid& grid, double tau) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k)
    v(k) = std::polar(1.0, -2.0 * kPi * (grid.frequencies[k] - grid.reference_hz) * tau);
  return v;
}

Eigen::VectorXcd planar_wavefronts(const Eigen::Matrix2Xd& U, const Location& x, double reference_wavelength) {
  const double k_r = 2.0 * kPi / reference_wavelength;
  Eigen::VectorXcd v(U.cols());
  for (Eigen::Index i = 0; i < U.cols(); ++i) v(i) = std::polar(1.0, -k_r * U.col(i).dot(x));
  return v;
}

DictionaryBank build_dictionary_bank(const AntennaArray& array, const FrequencyGrid& grid, Eigen::Index atoms,
                                     std::pair<double, double> delay_range) {
  if (atoms <= 0) throw std::invalid_argument("dictionary needs at least one atom");
  const auto [tau_min, tau_max] = delay_range;
  if (!(tau_min >= 0.0) || !(tau_max > tau_min)) throw std::invalid_argument("empty or negative delay range");

  DictionaryBank bank;
  bank.reference_wavelength = array.reference_wavelength();
  bank.U = unit_circle(atoms);
  bank.U_dod = bank.U;
  bank.tau.resize(atoms);
  for (Eigen::Index i = 0; i < atoms; ++i)
    bank.tau(i) = atoms == 1 ? tau_min
                             : tau_min + (tau_max - tau_min) * static_cast<double>(i) / static_cast<double>(atoms - 1);
  bank.Psi_a.resize(static_cast<Eigen::Index>(array.size()), atoms);
  bank.Psi_f.resize(static_cast<Eigen::Index>(grid.size()), atoms);
  for (Eigen::Index i = 0; i < atoms; ++i) {
    bank.Psi_a.col(i) = steering_vector(array, bank.U_dod.col(i));
    bank.Psi_f.col(i) = frequency_response(grid, bank.tau(i));
  }
  return bank;
}

std::pair<double, double> default_delay_range(double side) {
  const double diagonal = std::sqrt(2.0) * side;
  return {0.0, 1.5 * (diagonal + 2.0 * side) / kSpeedOfLight};
}

Eigen::MatrixXcd assemble_channel(const Eigen::VectorXcd& weights, const Location& x, const DictionaryBank& bank) {
  if (weights.size() != bank.atoms()) throw std::invalid_argument("weight vector length differs from atom count");
  const Eigen::VectorXcd varpi = weights.cwiseProduct(planar_wavefronts(bank.U, x, bank.reference_wavelength));
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(bank.Psi_a.rows(), bank.Psi_f.rows());
  for (Eigen::Index i = 0; i < bank.atoms(); ++i)
    if (varpi(i) != Complex(0.0, 0.0)) H += varpi(i) * bank.Psi_a.col(i) * bank.Psi_f.col(i).transpose();
  return H;
}

Eigen::MatrixXcd assemble_channel_kronecker(const Eigen::VectorXcd& weights, const Location& x,
                                            const DictionaryBank& bank) {
  if (weights.size() != bank.atoms()) throw std::invalid_argument("weight vector length differs from atom count");
  const Eigen::Index D = bank.atoms(), Na = bank.Psi_a.rows(), Ns = bank.Psi_f.rows();
  const Eigen::VectorXcd varpi = weights.cwiseProduct(planar_wavefronts(bank.U, x, bank.reference_wavelength));

  Eigen::MatrixXcd kron(Na * Ns, D * D);
  for (Eigen::Index k = 0; k < Ns; ++k)
    for (Eigen::Index i = 0; i < D; ++i) kron.block(k * Na, i * D, Na, D) = bank.Psi_f(k, i) * bank.Psi_a;

  // vec(diag(varpi)): column-major, so entry (i, i) sits at i * D + i.
  Eigen::VectorXcd vec_diag = Eigen::VectorXcd::Zero(D * D);
  for (Eigen::Index i = 0; i < D; ++i) vec_diag(i * D + i) = varpi(i);

  const Eigen::VectorXcd vec_h = kron * vec_diag;
  return Eigen::Map<const Eigen::MatrixXcd>(vec_h.data(), Na, Ns);
}

bool rotation_equivariance_check(const Location& u, const Eigen::Matrix2d& R, std::span<const Location> deltas) {
  if (!(R.transpose() * R).isApprox(Eigen::Matrix2d::Identity(), 1e-10) || std::abs(R.determinant() - 1.0) > 1e-10)
    throw std::invalid_argument("matrix is not a rotation");
  const Location rotated_u = R.transpose() * u;
  for (const auto& delta : deltas) {
    const double lhs = u.dot(R * delta);
    const double rhs = rotated_u.dot(delta);
    if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(lhs))) return false;
  }
  return true;
}

}  // namespace wavefield
