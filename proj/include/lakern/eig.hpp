#pragma once

// Smallest eigenvalue of a symmetric Gram matrix, as a positive
// semi-definiteness diagnostic. Backed by Eigen's self-adjoint solver;
// kept in its own header so only the PSD check pulls Eigen in.

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "lakern/gram.hpp"

namespace lakern {

inline double min_eigenvalue(const GramMatrix& g,
                             std::size_t dense_bound = 2000) {
  const std::size_t n = g.size();
  if (n == 0) throw std::invalid_argument("empty matrix");
  if (n > dense_bound)
    throw std::invalid_argument(
        "matrix size " + std::to_string(n) +
        " exceeds dense eigensolver bound " + std::to_string(dense_bound));
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          g.at(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation failed");
  return solver.eigenvalues().minCoeff();
}

}  // namespace lakern
