#pragma once

#include <span>
#include <utility>
#include <vector>

#include "wavefield/geometry.hpp"

namespace wavefield {

/// Expansion point of one path: reference receiver location and reference
/// (possibly virtual) antenna.
struct ReferenceFrame {
  Location x_r;
  Location a_r;
  double d_r = 0.0;    // ||x_r - a_r||
  double tau_r = 0.0;  // d_r / c
  Location u_r;        // (x_r - a_r) / d_r

  static ReferenceFrame make(const Location& x_r, const Location& a_r);
};

/// First-order expansion of ||x - a|| around (x_r, a_r):
/// d_r + u(x_r, a)^T (x - x_r) - u_r^T (a - a_r).
double taylor_distance(const Location& x, const Location& a, const ReferenceFrame& frame);

/// Leading second-order terms of the expansion error:
/// (||x - x_r||^2 / ||x_r - a|| + ||a - a_r||^2 / ||x_r - a_r||) / 2.
double taylor_error_estimate(const Location& x, const Location& a, const ReferenceFrame& frame);

/// Approximated coefficient h_{j,k}(x). For path l, `antennas[l]` is the
/// (virtual) element a_{l,j}, `frames[l]` its expansion point and `gammas[l]`
/// its complex gain. Reference channel x location, frequency and antenna
/// corrections, summed over paths.
Complex approx_channel_entry(const Location& x, std::span<const Location> antennas,
                             std::span<const ReferenceFrame> frames, std::span<const Complex> gammas,
                             double frequency_hz, double reference_hz);

/// Global dictionaries: spatial frequencies U, DoDs, delays and the derived
/// SV (Na x D) and FRV (Ns x D) atoms.
struct DictionaryBank {
  Eigen::Matrix2Xd U;
  Eigen::Matrix2Xd U_dod;
  Eigen::VectorXd tau;
  Eigen::MatrixXcd Psi_a;
  Eigen::MatrixXcd Psi_f;
  double reference_wavelength = 0.0;

  Eigen::Index atoms() const { return U.cols(); }
};

/// Unit vectors at angles i 2 pi / D.
Eigen::Matrix2Xd unit_circle(Eigen::Index count);

/// Steering-vector atom: exp(+j 2 pi / lambda_r u^T (a_j - a_r)) for every element.
Eigen::VectorXcd steering_vector(const AntennaArray& array, const Location& dod);

/// Frequency-response atom: exp(-j 2 pi (f_k - f_r) tau).
Eigen::VectorXcd frequency_response(const FrequencyGrid& grid, double tau);

/// Planar wavefronts exp(-j 2 pi / lambda_r u_i^T x) for every column of U.
Eigen::VectorXcd planar_wavefronts(const Eigen::Matrix2Xd& U, const Location& x, double reference_wavelength);

DictionaryBank build_dictionary_bank(const AntennaArray& array, const FrequencyGrid& grid, Eigen::Index atoms,
                                     std::pair<double, double> delay_range);

/// Default delay range [0, 1.5 (diagonal + 2-bounce margin) / c] for a
/// square scene of the given side. The margin accounts for two reflections
/// on walls up to one side away.
std::pair<double, double> default_delay_range(double side);

/// H = sum_i w_i psi_x,i(x) psi_a,i psi_f,i^T, as a sum of rank-one terms.
Eigen::MatrixXcd assemble_channel(const Eigen::VectorXcd& weights, const Location& x, const DictionaryBank& bank);

/// Same quantity through vec(H) = (Psi_f kron Psi_a) vec(diag(varpi)).
/// Materializes the Kronecker product; meant for small dictionaries.
Eigen::MatrixXcd assemble_channel_kronecker(const Eigen::VectorXcd& weights, const Location& x,
                                            const DictionaryBank& bank);

/// Checks u^T R delta == (R^T u)^T delta for all deltas (1e-12).
/// Throws std::invalid_argument when R is not a rotation.
bool rotation_equivariance_check(const Location& u, const Eigen::Matrix2d& R, std::span<const Location> deltas);

}  // namespace wavefield
