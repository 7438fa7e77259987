#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "scorelens/provenance/training_corpus.hpp"

namespace scorelens::provenance {

struct SymmetricEigen {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i], unit length
};

/// Cyclic Jacobi eigendecomposition of a dense symmetric n x n matrix
/// (row-major).
SymmetricEigen symmetric_eigen(const std::vector<double>& matrix, std::size_t n);

struct ComponentScores {
  std::vector<double> content;
  std::vector<double> wording;
  Rubric content_loading{};  // unit eigenvectors after sign alignment
  Rubric wording_loading{};
  std::array<double, 2> explained_variance{};  // eigenvalues of the two kept components, content first
};

/// Principal components of the mean-centered rubric columns. The top two
/// components are kept, each flipped to correlate positively with the row
/// mean and z-scored with the sample standard deviation. The one with the
/// larger absolute loading on the first four criteria is content.
/// Throws InvalidArgument for fewer than 3 rows or a constant column
/// ("degenerate rubric criterion").
ComponentScores derive_component_scores(const std::vector<Rubric>& rubric);

}  // namespace scorelens::provenance
