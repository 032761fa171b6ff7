#include "wavefield/sparse_recovery.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace wavefield {

Eigen::MatrixXcd dictionary_atom(const DictionaryBank& bank, Eigen::Index i, const Location& x) {
  const double k_r = 2.0 * kPi / bank.reference_wavelength;
  const Complex wave = std::polar(1.0, -k_r * bank.U.col(i).dot(x));
  return wave * bank.Psi_a.col(i) * bank.Psi_f.col(i).transpose();
}

Eigen::VectorXcd atom_correlations(const Eigen::MatrixXcd& R, const Location& x, const DictionaryBank& bank) {
  const Eigen::VectorXcd waves = planar_wavefronts(bank.U, x, bank.reference_wavelength);
  // (Psi_a^H R conj(Psi_f)) diagonal, one column at a time to stay O(D Na Ns).
  const Eigen::MatrixXcd projected = R * bank.Psi_f.conjugate();  // Na x D
  Eigen::VectorXcd c(bank.atoms());
  for (Eigen::Index i = 0; i < bank.atoms(); ++i)
    c(i) = std::conj(waves(i)) * bank.Psi_a.col(i).dot(projected.col(i));
  return c;
}

SparseSolution omp_decompose(const Eigen::MatrixXcd& H, const Location& x_r, const DictionaryBank& bank,
                             std::size_t sparsity, PursuitMode mode) {
  if (H.rows() != bank.Psi_a.rows() || H.cols() != bank.Psi_f.rows())
    throw std::invalid_argument("channel shape does not match the dictionary");
  if (sparsity > static_cast<std::size_t>(bank.atoms())) throw std::invalid_argument("sparsity exceeds atom count");

  SparseSolution sol;
  const double h_norm = H.norm();
  const double tol = 1e-10 * std::max(h_norm, std::numeric_limits<double>::min());
  const double atom_energy = static_cast<double>(H.size());  // unit-modulus entries

  Eigen::MatrixXcd residual = H;
  sol.residual_norm = h_norm;
  sol.residual_history.push_back(h_norm);
  std::vector<bool> excluded(static_cast<std::size_t>(bank.atoms()), false);
  Eigen::MatrixXcd basis(H.size(), 0);  // vec of selected atoms
  const Eigen::Map<const Eigen::VectorXcd> vec_h(H.data(), H.size());

  while (sol.support.size() < sparsity && sol.residual_norm > tol) {
    const Eigen::VectorXcd corr = atom_correlations(residual, x_r, bank);
    Eigen::Index best = -1;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < corr.size(); ++i) {
      if (excluded[static_cast<std::size_t>(i)]) continue;
      if (std::abs(corr(i)) > best_mag) {
        best_mag = std::abs(corr(i));
        best = i;
      }
    }
    if (best < 0 || best_mag <= tol * 1e-3) break;
    ++sol.iterations;

    const Eigen::MatrixXcd atom = dictionary_atom(bank, best, x_r);
    if (mode == PursuitMode::Plain) {
      const Complex c = corr(best) / atom_energy;
      auto it = std::find(sol.support.begin(), sol.support.end(), best);
      if (it == sol.support.end()) {
        sol.support.push_back(best);
        sol.coefficients.push_back(c);
      } else {
        sol.coefficients[static_cast<std::size_t>(it - sol.support.begin())] += c;
      }
      residual -= c * atom;
    } else {
      Eigen::MatrixXcd candidate(H.size(), basis.cols() + 1);
      candidate << basis, Eigen::Map<const Eigen::VectorXcd>(atom.data(), atom.size());
      Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(candidate);
      qr.setThreshold(1e-10);
      if (qr.rank() < candidate.cols()) {
        excluded[static_cast<std::size_t>(best)] = true;
        sol.dropped.push_back(best);
        continue;
      }
      basis = std::move(candidate);
      sol.support.push_back(best);
      const Eigen::VectorXcd coef = qr.solve(vec_h);
      sol.coefficients.assign(coef.data(), coef.data() + coef.size());
      const Eigen::VectorXcd r = vec_h - basis * coef;
      residual = Eigen::Map<const Eigen::MatrixXcd>(r.data(), H.rows(), H.cols());
    }
    excluded[static_cast<std::size_t>(best)] = mode == PursuitMode::Orthogonal;
    sol.residual_norm = residual.norm();
    sol.residual_history.push_back(sol.residual_norm);
  }
  return sol;
}

Eigen::MatrixXcd reconstruct(const SparseSolution& solution, const Location& x, const DictionaryBank& bank) {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(bank.Psi_a.rows(), bank.Psi_f.rows());
  for (std::size_t n = 0; n < solution.support.size(); ++n)
    H += solution.coefficients[n] * dictionary_atom(bank, solution.support[n], x);
  return H;
}

Eigen::MatrixXcd two_stage_estimate(const Location& x, const std::vector<ReferenceSolution>& references,
                                    const DictionaryBank& bank) {
  if (references.empty()) throw std::invalid_argument("no solved reference location");
  const ReferenceSolution* closest = &references.front();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ref : references) {
    const double d = (x - ref.x_r).norm();
    if (d < best) {
      best = d;
      closest = &ref;
    }
  }
  return reconstruct(closest->solution, x, bank);
}

}  // namespace wavefield
