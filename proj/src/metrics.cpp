#include "wavefield/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace wavefield {

double to_db(double ratio) {
  if (!(ratio > 0)) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(ratio));
}

double nmse_db(const Eigen::MatrixXcd& truth, const Eigen::MatrixXcd& prediction, std::size_t antennas,
               const std::vector<std::size_t>& subcarriers) {
  if (truth.cols() == 0) throw MetricError("empty test set");
  if (truth.rows() != prediction.rows() || truth.cols() != prediction.cols())
    throw MetricError("truth and prediction shapes differ");
  const auto Na = static_cast<Eigen::Index>(antennas);
  if (Na == 0 || truth.rows() % Na != 0) throw MetricError("row count is not a multiple of Na");
  std::vector<Eigen::Index> rows;
  if (subcarriers.empty()) {
    rows.resize(static_cast<std::size_t>(truth.rows()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  } else {
    for (auto k : subcarriers) {
      if (static_cast<Eigen::Index>(k) >= truth.rows() / Na) throw MetricError("subcarrier index out of range");
      for (Eigen::Index j = 0; j < Na; ++j) rows.push_back(j + Na * static_cast<Eigen::Index>(k));
    }
  }
  double sum = 0.0;
  for (Eigen::Index n = 0; n < truth.cols(); ++n) {
    double err = 0.0, ref = 0.0;
    for (auto r : rows) {
      err += std::norm(truth(r, n) - prediction(r, n));
      ref += std::norm(truth(r, n));
    }
    if (!(ref > 0)) throw MetricError("zero-norm truth record at index " + std::to_string(n));
    sum += err / ref;
  }
  return to_db(sum / static_cast<double>(truth.cols()));
}

EvalReport nmse_report(const Eigen::MatrixXcd& truth, const Eigen::MatrixXcd& prediction, std::size_t antennas) {
  EvalReport r;
  r.nmse_db = nmse_db(truth, prediction, antennas);
  const auto Na = static_cast<Eigen::Index>(antennas);
  const Eigen::Index Ns = truth.rows() / Na;
  auto slice = [&](Eigen::Index row) {
    double sum = 0.0;
    for (Eigen::Index n = 0; n < truth.cols(); ++n) {
      const double ref = std::norm(truth(row, n));
      if (!(ref > 0)) throw MetricError("zero truth entry in a per-slice NMSE");
      sum += std::norm(truth(row, n) - prediction(row, n)) / ref;
    }
    return to_db(sum / static_cast<double>(truth.cols()));
  };
  const Eigen::Index jc = Na / 2, kc = Ns / 2;
  for (Eigen::Index k = 0; k < Ns; ++k) r.per_frequency_db.push_back(slice(jc + Na * k));
  for (Eigen::Index j = 0; j < Na; ++j) r.per_antenna_db.push_back(slice(j + Na * kc));
  return r;
}

CompressionRatio compression_ratio(std::uint64_t antennas, std::uint64_t subcarriers, std::uint64_t locations,
                                   std::uint64_t learnable) {
  if (learnable == 0) throw MetricError("compression ratio needs at least one learnable parameter");
  CompressionRatio r{2 * antennas * subcarriers * locations, learnable};
  const auto g = std::gcd(r.numerator, r.denominator);
  if (g > 1) {
    r.numerator /= g;
    r.denominator /= g;
  }
  return r;
}

GridField to_grid_field(const Eigen::Matrix2Xd& locations, const Eigen::MatrixXcd& channels, std::size_t antennas,
                        std::size_t antenna, std::size_t subcarrier) {
  const Eigen::Index N = locations.cols();
  if (N < 4 || channels.cols() != N) throw MetricError("grid field needs matching locations and channels");
  Eigen::Index nx = 1;
  while (nx < N && locations(1, nx) == locations(1, 0)) ++nx;
  if (nx < 2 || N % nx != 0) throw MetricError("locations do not form a rectangular grid");
  const Eigen::Index ny = N / nx;
  GridField g;
  g.origin = locations.col(0);
  g.spacing = locations(0, 1) - locations(0, 0);
  if (!(g.spacing > 0)) throw MetricError("locations do not form a rectangular grid");
  const double tol = 1e-6 * g.spacing;
  const auto row = static_cast<Eigen::Index>(antenna + antennas * subcarrier);
  if (row >= channels.rows()) throw MetricError("antenna/subcarrier outside the channel");
  g.field.resize(ny, nx);
  for (Eigen::Index iy = 0; iy < ny; ++iy) {
    for (Eigen::Index ix = 0; ix < nx; ++ix) {
      const Eigen::Index n = ix + nx * iy;
      const Location expect = g.origin + g.spacing * Location(static_cast<double>(ix), static_cast<double>(iy));
      if ((locations.col(n) - expect).cwiseAbs().maxCoeff() > tol)
        throw MetricError("locations do not form a rectangular grid");
      g.field(iy, ix) = channels(row, n);
    }
  }
  return g;
}

Spectrum spatial_spectrum(const GridField& grid, double reference_wavelength) {
  const Eigen::Index ny = grid.field.rows(), nx = grid.field.cols();
  if (ny == 0 || nx == 0) throw MetricError("empty field");
  if (!(grid.spacing > 0)) throw MetricError("grid spacing must be positive");

  // Eigen is column-major, so the buffer is a row-major [nx][ny] array.
  std::vector<fftw_complex> buf(static_cast<std::size_t>(nx * ny));
  for (Eigen::Index i = 0; i < nx * ny; ++i) {
    buf[static_cast<std::size_t>(i)][0] = grid.field.data()[i].real();
    buf[static_cast<std::size_t>(i)][1] = grid.field.data()[i].imag();
  }
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), buf.data(), buf.data(),
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Spectrum s;
  s.bin_x = 1.0 / (static_cast<double>(nx) * grid.spacing);
  s.bin_y = 1.0 / (static_cast<double>(ny) * grid.spacing);
  s.magnitude.resize(ny, nx);
  const double radius = 1.0 / (2.0 * reference_wavelength);
  double total = 0.0, low = 0.0, peak = -1.0;
  for (Eigen::Index ix = 0; ix < nx; ++ix) {
    for (Eigen::Index iy = 0; iy < ny; ++iy) {
      const auto& v = buf[static_cast<std::size_t>(iy + ny * ix)];
      const double mag = std::hypot(v[0], v[1]);
      const Eigen::Index sx = (ix + nx / 2) % nx, sy = (iy + ny / 2) % ny;  // fftshift
      s.magnitude(sy, sx) = mag;
      const double fx = static_cast<double>(ix < (nx + 1) / 2 ? ix : ix - nx) * s.bin_x;
      const double fy = static_cast<double>(iy < (ny + 1) / 2 ? iy : iy - ny) * s.bin_y;
      total += mag * mag;
      if (std::hypot(fx, fy) <= radius) low += mag * mag;
      if (mag > peak) {
        peak = mag;
        s.peak_frequency = {fx, fy};
      }
    }
  }
  s.low_frequency_ratio = total > 0 ? low / total : 0.0;
  const double floor = peak > 0 ? peak * 1e-15 : 1e-300;
  s.log_magnitude = s.magnitude.unaryExpr([floor](double m) { return 20.0 * std::log10(std::max(m, floor)); });
  return s;
}

void write_pgm(const std::string& path, const Eigen::MatrixXd& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  const double lo = values.minCoeff(), hi = values.maxCoeff();
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  out << "P5\n" << values.cols() << " " << values.rows() << "\n255\n";
  for (Eigen::Index r = values.rows(); r-- > 0;)
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround((values(r, c) - lo) * scale))));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_number(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(10);
  out << v;
  return out.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace wavefield
