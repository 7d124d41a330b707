#ifndef FUZZYSTAB_ALGEBRA_HPP
#define FUZZYSTAB_ALGEBRA_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fuzzystab {

enum class CrispNormKind { SupCoefficient, EuclideanCoefficient, OperatorLeftRegular };

class FiniteAlgebra;
using AlgebraPtr = std::shared_ptr<const FiniteAlgebra>;

/// Element of a finite-dimensional real algebra: a coefficient vector over
/// the algebra's distinguished basis.
class Element {
 public:
  Element() = default;
  Element(AlgebraPtr algebra, std::vector<double> coeffs);

  const std::vector<double>& coeffs() const { return coeffs_; }
  const AlgebraPtr& algebra() const { return algebra_; }
  std::size_t dim() const { return coeffs_.size(); }
  bool is_zero() const;

  Element operator+(const Element& rhs) const;
  Element operator-(const Element& rhs) const;
  Element operator-() const;
  Element operator*(const Element& rhs) const;  // ring product

 private:
  AlgebraPtr algebra_;
  std::vector<double> coeffs_;
};

Element operator*(double s, const Element& x);

/// Real associative algebra of dimension m presented by structure constants
/// c[i][j][k] with e_i e_j = sum_k c[i][j][k] e_k, together with a crisp norm
/// on the coefficient space. Immutable after construction; shared read access
/// from any number of threads is safe.
class FiniteAlgebra : public std::enable_shared_from_this<FiniteAlgebra> {
 public:
  /// structure has row-major layout c[(i*m + j)*m + k]. Validates shape and
  /// finiteness only; associativity is measured by check_associativity so
  /// that deliberately corrupted tables remain constructible for diagnostics.
  FiniteAlgebra(std::size_t dim, std::vector<double> structure, CrispNormKind norm_kind,
                std::string label);

  std::size_t dim() const { return dim_; }
  CrispNormKind norm_kind() const { return norm_kind_; }
  const std::string& label() const { return label_; }
  const std::vector<double>& structure() const { return structure_; }
  double structure_constant(std::size_t i, std::size_t j, std::size_t k) const {
    return structure_[(i * dim_ + j) * dim_ + k];
  }

  Element element(std::vector<double> coeffs) const;
  Element basis_element(std::size_t i) const;
  Element zero() const;

  /// Bilinear product via the structure constants.
  std::vector<double> multiply(std::span<const double> a, std::span<const double> b) const;

  double crisp_norm(std::span<const double> coeffs) const;

  /// Spectral norm of left multiplication on the coefficient space, by power
  /// iteration (tolerance 1e-10, 500 iteration cap). Exactly submultiplicative
  /// and faithful on unital algebras.
  double operator_norm(std::span<const double> coeffs) const;

  /// Upper bound C with ||xy|| <= C ||x|| ||y|| for the chosen norm kind.
  double submult_constant() const;

 private:
  std::size_t dim_;
  std::vector<double> structure_;
  CrispNormKind norm_kind_;
  std::string label_;
};

double crisp_norm(const Element& x);

AlgebraPtr make_matrix_algebra(std::size_t k,
                               CrispNormKind norm_kind = CrispNormKind::SupCoefficient);
AlgebraPtr make_poly_trunc_algebra(std::size_t deg,
                                   CrispNormKind norm_kind = CrispNormKind::SupCoefficient);
AlgebraPtr make_custom_algebra(std::size_t dim, std::vector<double> structure,
                               CrispNormKind norm_kind, std::string label);

/// Max over basis triples of ||(e_i e_j) e_k - e_i (e_j e_k)||.
double check_associativity(const FiniteAlgebra& alg);

/// Linear map between algebras, tabulated on the domain basis and extended
/// linearly. Columns of the matrix are the images of the basis vectors.
class LinearMap {
 public:
  LinearMap() = default;
  LinearMap(AlgebraPtr domain, AlgebraPtr codomain, std::vector<double> matrix);

  static LinearMap identity(const AlgebraPtr& alg);
  /// t^k -> k t^k on a truncated polynomial algebra (an exact derivation).
  static LinearMap euler_derivation(const AlgebraPtr& poly_alg);
  /// y -> xy - yx (an exact derivation of any associative algebra).
  static LinearMap inner_derivation(const AlgebraPtr& alg, const Element& x);

  Element apply(const Element& a) const;
  const AlgebraPtr& domain() const { return domain_; }
  const AlgebraPtr& codomain() const { return codomain_; }

 private:
  AlgebraPtr domain_;
  AlgebraPtr codomain_;
  std::vector<double> matrix_;  // row-major, codomain.dim x domain.dim
};

}  // namespace fuzzystab

#endif
