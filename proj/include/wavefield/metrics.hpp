#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavefield/dataset.hpp"

namespace wavefield {

inline constexpr double kNmseFloorDb = -300.0;

struct EvalReport {
  double nmse_db = 0.0;
  std::vector<double> per_frequency_db;  // central antenna
  std::vector<double> per_antenna_db;    // central frequency
  std::size_t param_count = 0;
  double compression_ratio = 0.0;
  double seconds = 0.0;
};

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// 10 log10 of a mean normalized error, clamped at kNmseFloorDb.
double to_db(double ratio);

/// NMSE over matching columns of flattened Na x Ns channels (row j + Na k).
/// `subcarriers`, when given, restricts the norm to those frequency columns.
double nmse_db(const Eigen::MatrixXcd& truth, const Eigen::MatrixXcd& prediction, std::size_t antennas,
               const std::vector<std::size_t>& subcarriers = {});

/// Full report with per-frequency and per-antenna slices. Throws MetricError
/// on an empty test set, a shape mismatch or a zero-norm truth record.
EvalReport nmse_report(const Eigen::MatrixXcd& truth, const Eigen::MatrixXcd& prediction, std::size_t antennas);

/// R = 2 Na Ns N_l / N_b as an exact fraction.
struct CompressionRatio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};
CompressionRatio compression_ratio(std::uint64_t antennas, std::uint64_t subcarriers, std::uint64_t locations,
                                   std::uint64_t learnable);

/// A complete n_y x n_x grid of complex samples with square spacing;
/// field(iy, ix) sits at (origin.x + ix spacing, origin.y + iy spacing).
struct GridField {
  Eigen::MatrixXcd field;
  double spacing = 0.0;
  Location origin = Location::Zero();
};

/// Arranges entry (antenna, subcarrier) of grid-ordered channels into a
/// field. Throws MetricError when the locations do not form a full grid.
GridField to_grid_field(const Eigen::Matrix2Xd& locations, const Eigen::MatrixXcd& channels, std::size_t antennas,
                        std::size_t antenna, std::size_t subcarrier);

struct Spectrum {
  Eigen::MatrixXd magnitude;     // fftshifted |DFT|, rows follow f_y
  Eigen::MatrixXd log_magnitude;  // 20 log10 of the above (floor at -300 dB relative to the peak)
  double low_frequency_ratio = 0.0;
  Eigen::Vector2d peak_frequency = Eigen::Vector2d::Zero();  // cycles/m
  double bin_x = 0.0, bin_y = 0.0;                           // cycles/m per bin
};

/// 2D spectrum with kernel exp(+j 2 pi f^T x), so the planar wavefront
/// exp(-j 2 pi / lambda u^T x) peaks at u / lambda. The low-frequency ratio is
/// the energy within radius 1 / (2 lambda_r) over the total.
Spectrum spatial_spectrum(const GridField& grid, double reference_wavelength);

/// 8-bit binary PGM, linearly scaled between the min and max of `values`.
/// Row 0 of `values` is written at the bottom.
void write_pgm(const std::string& path, const Eigen::MatrixXd& values);

/// Number formatted in the classic locale with 10 significant digits.
std::string format_number(double v);

/// CSV with a header line. Cells are written verbatim.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace wavefield
