#include "kubo/fock.hpp"

#include "kubo/error.hpp"

#include <algorithm>
#include <bit>

namespace kubo {

namespace {

void check_modes(int modes) {
  if (modes < 1 || modes > kMaxModes) {
    throw InvalidArgument("Fock space needs 1 <= modes <= " + std::to_string(kMaxModes) + ", got " +
                          std::to_string(modes));
  }
}

void require_same(const FockSpace& a, const FockSpace& b) {
  if (a.modes() != b.modes() || a.particles() != b.particles()) {
    throw InvalidArgument("Fock operators act on different spaces");
  }
}

}  // namespace

FockSpace FockSpace::full(int modes) {
  check_modes(modes);
  FockSpace f;
  f.modes_ = modes;
  const std::uint64_t n = std::uint64_t{1} << modes;
  f.states_.resize(n);
  for (std::uint64_t s = 0; s < n; ++s) f.states_[s] = static_cast<std::uint32_t>(s);
  return f;
}

FockSpace FockSpace::sector(int modes, int particles) {
  check_modes(modes);
  if (particles < 0 || particles > modes) throw InvalidArgument("particle number out of range");
  FockSpace f;
  f.modes_ = modes;
  f.particles_ = particles;
  if (particles == 0) {
    f.states_.push_back(0);
    return f;
  }
  // Gosper's hack enumerates fixed-popcount words in increasing order.
  std::uint64_t s = (std::uint64_t{1} << particles) - 1;
  const std::uint64_t end = std::uint64_t{1} << modes;
  while (s < end) {
    f.states_.push_back(static_cast<std::uint32_t>(s));
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
  return f;
}

std::ptrdiff_t FockSpace::index_of(std::uint32_t s) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), s);
  if (it == states_.end() || *it != s) return -1;
  return it - states_.begin();
}

int jw_sign(std::uint32_t s, int m) {
  const std::uint32_t below = m == 0 ? 0u : (s & ((1u << m) - 1u));
  return (std::popcount(below) & 1) ? -1 : 1;
}

FockOperator::FockOperator(const FockSpace& space, SparseC matrix, bool hermitian)
    : space_(space), matrix_(std::move(matrix)), hermitian_(hermitian) {
  const auto n = static_cast<Eigen::Index>(space_.dim());
  if (matrix_.rows() != n || matrix_.cols() != n) throw InvalidArgument("operator dimension mismatch");
  if (hermitian_) {
    const double defect = hermiticity_defect();
    if (defect > 1e-12) {
      throw ComputationError("operator claimed Hermitian has defect " + std::to_string(defect));
    }
  }
}

FockOperator FockOperator::quadratic(const FockSpace& space, const std::vector<QuadraticTerm>& terms,
                                     bool hermitian) {
  std::vector<Eigen::Triplet<std::complex<double>>> trip;
  for (const QuadraticTerm& t : terms) {
    if (t.dest < 0 || t.dest >= space.modes() || t.src < 0 || t.src >= space.modes()) {
      throw InvalidArgument("quadratic term mode out of range");
    }
  }
  for (std::size_t col = 0; col < space.dim(); ++col) {
    const std::uint32_t s = space.state(col);
    for (const QuadraticTerm& t : terms) {
      if (t.amp == std::complex<double>(0.0)) continue;
      const std::uint32_t src_bit = 1u << t.src;
      const std::uint32_t dest_bit = 1u << t.dest;
      if (!(s & src_bit)) continue;
      const std::uint32_t mid = s ^ src_bit;
      if (mid & dest_bit) continue;
      const std::uint32_t out = mid | dest_bit;
      const int sign = jw_sign(s, t.src) * jw_sign(mid, t.dest);
      const std::ptrdiff_t row = space.index_of(out);
      if (row < 0) continue;
      trip.emplace_back(row, static_cast<Eigen::Index>(col), static_cast<double>(sign) * t.amp);
    }
  }
  const auto n = static_cast<Eigen::Index>(space.dim());
  SparseC m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return FockOperator(space, std::move(m), hermitian);
}

FockOperator FockOperator::density(const FockSpace& space, const std::vector<DensityTerm>& terms,
                                   double shift) {
  for (const DensityTerm& t : terms) {
    if (t.a < 0 || t.a >= space.modes() || t.b < 0 || t.b >= space.modes()) {
      throw InvalidArgument("density term mode out of range");
    }
  }
  std::vector<Eigen::Triplet<std::complex<double>>> trip;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const std::uint32_t s = space.state(i);
    double d = 0.0;
    for (const DensityTerm& t : terms) {
      const double na = (s >> t.a) & 1u;
      const double nb = (s >> t.b) & 1u;
      d += t.v * (na - shift) * (nb - shift);
    }
    if (d != 0.0) trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), d);
  }
  const auto n = static_cast<Eigen::Index>(space.dim());
  SparseC m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return FockOperator(space, std::move(m), true);
}

FockOperator FockOperator::diagonal_number(const FockSpace& space, const std::vector<double>& coeff) {
  if (static_cast<int>(coeff.size()) != space.modes()) throw InvalidArgument("one coefficient per mode");
  std::vector<Eigen::Triplet<std::complex<double>>> trip;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const std::uint32_t s = space.state(i);
    double d = 0.0;
    for (int m = 0; m < space.modes(); ++m) {
      if ((s >> m) & 1u) d += coeff[static_cast<std::size_t>(m)];
    }
    if (d != 0.0) trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), d);
  }
  const auto n = static_cast<Eigen::Index>(space.dim());
  SparseC m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return FockOperator(space, std::move(m), true);
}

FockOperator FockOperator::operator+(const FockOperator& o) const {
  require_same(space_, o.space_);
  return FockOperator(space_, SparseC(matrix_ + o.matrix_), false);
}

FockOperator FockOperator::operator-(const FockOperator& o) const {
  require_same(space_, o.space_);
  return FockOperator(space_, SparseC(matrix_ - o.matrix_), false);
}

FockOperator FockOperator::operator*(std::complex<double> c) const {
  return FockOperator(space_, SparseC(matrix_ * c), false);
}

FockOperator FockOperator::commutator(const FockOperator& o) const {
  require_same(space_, o.space_);
  SparseC ab = matrix_ * o.matrix_;
  SparseC ba = o.matrix_ * matrix_;
  return FockOperator(space_, SparseC(ab - ba), false);
}

double FockOperator::max_abs() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseC::InnerIterator it(matrix_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double FockOperator::hermiticity_defect() const {
  const SparseC adj = matrix_.adjoint();
  const SparseC diff = matrix_ - adj;
  double m = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseC::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

}  // namespace kubo
