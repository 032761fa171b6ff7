#pragma once

#include <vector>

#include "wavefield/approximation.hpp"

namespace wavefield {

struct SparseSolution {
  std::vector<Eigen::Index> support;
  std::vector<Complex> coefficients;  // aligned with support
  double residual_norm = 0.0;
  int iterations = 0;
  /// Frobenius residual after each iteration (index 0 = ||H||).
  std::vector<double> residual_history;
  /// Atoms rejected because they were linearly dependent on the selection.
  std::vector<Eigen::Index> dropped;
};

enum class PursuitMode { Orthogonal, Plain };

/// Rank-one atom A_i(x) = psi_x,i(x) psi_a,i psi_f,i^T.
Eigen::MatrixXcd dictionary_atom(const DictionaryBank& bank, Eigen::Index i, const Location& x);

/// <R, A_i(x)>_F for every atom, computed in factored form conj(psi_x,i) psi_a,i^H R conj(psi_f,i).
Eigen::VectorXcd atom_correlations(const Eigen::MatrixXcd& R, const Location& x, const DictionaryBank& bank);

/// Greedy decomposition of H(x_r) on the composite dictionary. Stops after
/// `sparsity` atoms or once the residual falls below 1e-10 ||H||.
SparseSolution omp_decompose(const Eigen::MatrixXcd& H, const Location& x_r, const DictionaryBank& bank,
                             std::size_t sparsity, PursuitMode mode = PursuitMode::Orthogonal);

/// Reconstruction of a solved reference, evaluated at location x.
Eigen::MatrixXcd reconstruct(const SparseSolution& solution, const Location& x, const DictionaryBank& bank);

struct ReferenceSolution {
  Location x_r;
  SparseSolution solution;
};

/// Picks the closest solved reference and re-evaluates its planar wavefronts at x.
Eigen::MatrixXcd two_stage_estimate(const Location& x, const std::vector<ReferenceSolution>& references,
                                    const DictionaryBank& bank);

}  // namespace wavefield
