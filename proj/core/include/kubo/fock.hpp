#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace kubo {

using SparseC = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;

inline constexpr int kMaxModes = 28;

// Occupation-number basis over M modes, optionally restricted to a fixed particle
// number. States are bitstrings (bit m = mode m) in increasing numeric order.
class FockSpace {
 public:
  static FockSpace full(int modes);
  static FockSpace sector(int modes, int particles);

  int modes() const { return modes_; }
  std::optional<int> particles() const { return particles_; }
  std::size_t dim() const { return states_.size(); }
  const std::vector<std::uint32_t>& states() const { return states_; }
  std::uint32_t state(std::size_t i) const { return states_[i]; }
  // Position of a bitstring in the basis, or −1.
  std::ptrdiff_t index_of(std::uint32_t s) const;

 private:
  int modes_ = 0;
  std::optional<int> particles_;
  std::vector<std::uint32_t> states_;
};

// Fermionic sign of applying ψ_m or ψ⁺_m to s: (−1)^(occupied modes below m).
int jw_sign(std::uint32_t s, int m);

struct QuadraticTerm {
  int dest = 0;
  int src = 0;
  std::complex<double> amp;  // amp ψ⁺_dest ψ⁻_src
};

struct DensityTerm {
  int a = 0;
  int b = 0;
  double v = 0.0;  // v (n_a − shift)(n_b − shift)
};

class FockOperator {
 public:
  FockOperator() = default;
  // When `hermitian` is claimed it is verified to 1e-12.
  FockOperator(const FockSpace& space, SparseC matrix, bool hermitian);

  static FockOperator quadratic(const FockSpace& space, const std::vector<QuadraticTerm>& terms,
                                bool hermitian);
  static FockOperator density(const FockSpace& space, const std::vector<DensityTerm>& terms,
                              double shift);
  // Σ_m c_m n_m.
  static FockOperator diagonal_number(const FockSpace& space, const std::vector<double>& coeff);

  const FockSpace& space() const { return space_; }
  const SparseC& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }
  std::size_t dim() const { return space_.dim(); }

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }
  FockOperator operator+(const FockOperator& o) const;
  FockOperator operator-(const FockOperator& o) const;
  FockOperator operator*(std::complex<double> c) const;
  FockOperator commutator(const FockOperator& o) const;
  // Largest entry modulus.
  double max_abs() const;
  double hermiticity_defect() const;

 private:
  FockSpace space_;
  SparseC matrix_;
  bool hermitian_ = false;
};

}  // namespace kubo
