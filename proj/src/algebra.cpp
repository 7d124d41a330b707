#include "fuzzystab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fuzzystab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_same_algebra(const Element& a, const Element& b) {
  require(a.algebra() && b.algebra() && a.algebra().get() == b.algebra().get(),
          "elements belong to different algebras");
}

}  // namespace

Element::Element(AlgebraPtr algebra, std::vector<double> coeffs)
    : algebra_(std::move(algebra)), coeffs_(std::move(coeffs)) {
  require(algebra_ != nullptr, "element requires an algebra");
  require(coeffs_.size() == algebra_->dim(), "coefficient count does not match algebra dimension");
  for (double c : coeffs_) require(std::isfinite(c), "element coefficients must be finite");
}

bool Element::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

Element Element::operator+(const Element& rhs) const {
  require_same_algebra(*this, rhs);
  std::vector<double> out(coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeffs_[i] + rhs.coeffs_[i];
  return Element(algebra_, std::move(out));
}

Element Element::operator-(const Element& rhs) const {
  require_same_algebra(*this, rhs);
  std::vector<double> out(coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeffs_[i] - rhs.coeffs_[i];
  return Element(algebra_, std::move(out));
}

Element Element::operator-() const { return -1.0 * *this; }

Element Element::operator*(const Element& rhs) const {
  require_same_algebra(*this, rhs);
  return Element(algebra_, algebra_->multiply(coeffs_, rhs.coeffs_));
}

Element operator*(double s, const Element& x) {
  std::vector<double> out(x.coeffs().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * x.coeffs()[i];
  return Element(x.algebra(), std::move(out));
}

FiniteAlgebra::FiniteAlgebra(std::size_t dim, std::vector<double> structure,
                             CrispNormKind norm_kind, std::string label)
    : dim_(dim), structure_(std::move(structure)), norm_kind_(norm_kind), label_(std::move(label)) {
  require(dim_ >= 1, "algebra dimension must be positive");
  require(structure_.size() == dim_ * dim_ * dim_,
          "structure constant array must have dim^3 entries");
  for (double c : structure_) require(std::isfinite(c), "structure constants must be finite");
}

Element FiniteAlgebra::element(std::vector<double> coeffs) const {
  return Element(shared_from_this(), std::move(coeffs));
}

Element FiniteAlgebra::basis_element(std::size_t i) const {
  require(i < dim_, "basis index out of range");
  std::vector<double> c(dim_, 0.0);
  c[i] = 1.0;
  return element(std::move(c));
}

Element FiniteAlgebra::zero() const { return element(std::vector<double>(dim_, 0.0)); }

std::vector<double> FiniteAlgebra::multiply(std::span<const double> a,
                                            std::span<const double> b) const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double w = a[i] * b[j];
      if (w == 0.0) continue;
      const double* row = &structure_[(i * dim_ + j) * dim_];
      for (std::size_t k = 0; k < dim_; ++k) out[k] += w * row[k];
    }
  }
  return out;
}

double FiniteAlgebra::crisp_norm(std::span<const double> coeffs) const {
  switch (norm_kind_) {
    case CrispNormKind::SupCoefficient: {
      double m = 0.0;
      for (double c : coeffs) m = std::max(m, std::abs(c));
      return m;
    }
    case CrispNormKind::EuclideanCoefficient: {
      double s = 0.0;
      for (double c : coeffs) s += c * c;
      return std::sqrt(s);
    }
    case CrispNormKind::OperatorLeftRegular:
      return operator_norm(coeffs);
  }
  return 0.0;
}

double FiniteAlgebra::operator_norm(std::span<const double> coeffs) const {
  const std::size_t m = dim_;
  // L[k][j] = (x e_j)_k, left multiplication by x on the coefficient space.
  std::vector<double> L(m * m, 0.0);
  double frob2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (coeffs[i] == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      const double* row = &structure_[(i * m + j) * m];
      for (std::size_t k = 0; k < m; ++k) L[k * m + j] += coeffs[i] * row[k];
    }
  }
  for (double v : L) frob2 += v * v;
  if (frob2 == 0.0) return 0.0;

  // Power iteration on L^T L; the Rayleigh quotient converges to the squared
  // spectral norm.
  std::vector<double> v(m), Lv(m), w(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = 1.0 + static_cast<double>(i) / static_cast<double>(m);
  double vnorm = 0.0;
  for (double c : v) vnorm += c * c;
  vnorm = std::sqrt(vnorm);
  for (double& c : v) c /= vnorm;

  double lambda = 0.0;
  constexpr int kMaxIters = 500;
  constexpr double kTol = 1e-10;
  for (int it = 0; it < kMaxIters; ++it) {
    for (std::size_t k = 0; k < m; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += L[k * m + j] * v[j];
      Lv[k] = s;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += L[k * m + j] * Lv[k];
      w[j] = s;
    }
    double next = 0.0;
    for (std::size_t j = 0; j < m; ++j) next += v[j] * w[j];
    double wnorm = 0.0;
    for (double c : w) wnorm += c * c;
    wnorm = std::sqrt(wnorm);
    if (wnorm == 0.0) return 0.0;  // v landed in the kernel
    for (std::size_t j = 0; j < m; ++j) v[j] = w[j] / wnorm;
    if (std::abs(next - lambda) <= kTol * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double FiniteAlgebra::submult_constant() const {
  const std::size_t m = dim_;
  switch (norm_kind_) {
    case CrispNormKind::SupCoefficient: {
      // |(xy)_k| <= ||x|| ||y|| sum_{ij} |c_ijk|
      double worst = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) s += std::abs(structure_constant(i, j, k));
        worst = std::max(worst, s);
      }
      return worst;
    }
    case CrispNormKind::EuclideanCoefficient: {
      // Cauchy-Schwarz on the m^2 vector (x_i y_j) per output coordinate.
      double total = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            const double c = structure_constant(i, j, k);
            s += c * c;
          }
        total += s;
      }
      return std::sqrt(total);
    }
    case CrispNormKind::OperatorLeftRegular:
      return 1.0;
  }
  return 1.0;
}

double crisp_norm(const Element& x) { return x.algebra()->crisp_norm(x.coeffs()); }

AlgebraPtr make_matrix_algebra(std::size_t k, CrispNormKind norm_kind) {
  if (k < 1 || k > 8) throw std::invalid_argument("matrix algebra size must be in 1..8");
  const std::size_t m = k * k;
  std::vector<double> c(m * m * m, 0.0);
  // Basis E_{rs}, index r*k+s; E_{rs} E_{uv} = delta_{su} E_{rv}.
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t s = 0; s < k; ++s)
      for (std::size_t u = 0; u < k; ++u)
        for (std::size_t v = 0; v < k; ++v)
          if (s == u) {
            const std::size_t i = r * k + s, j = u * k + v, out = r * k + v;
            c[(i * m + j) * m + out] = 1.0;
          }
  return std::make_shared<const FiniteAlgebra>(m, std::move(c), norm_kind,
                                               "matrix:" + std::to_string(k));
}

AlgebraPtr make_poly_trunc_algebra(std::size_t deg, CrispNormKind norm_kind) {
  if (deg < 1 || deg > 16) throw std::invalid_argument("truncation degree must be in 1..16");
  const std::size_t m = deg + 1;
  std::vector<double> c(m * m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i + j < m) c[(i * m + j) * m + (i + j)] = 1.0;
  return std::make_shared<const FiniteAlgebra>(m, std::move(c), norm_kind,
                                               "poly_trunc:" + std::to_string(deg));
}

AlgebraPtr make_custom_algebra(std::size_t dim, std::vector<double> structure,
                               CrispNormKind norm_kind, std::string label) {
  return std::make_shared<const FiniteAlgebra>(dim, std::move(structure), norm_kind,
                                               std::move(label));
}

double check_associativity(const FiniteAlgebra& alg) {
  const std::size_t m = alg.dim();
  double worst = 0.0;
  std::vector<double> ei(m), ej(m), ek(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(ei.begin(), ei.end(), 0.0);
    ei[i] = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      std::fill(ej.begin(), ej.end(), 0.0);
      ej[j] = 1.0;
      const std::vector<double> eij = alg.multiply(ei, ej);
      for (std::size_t k = 0; k < m; ++k) {
        std::fill(ek.begin(), ek.end(), 0.0);
        ek[k] = 1.0;
        const std::vector<double> left = alg.multiply(eij, ek);
        const std::vector<double> jk = alg.multiply(ej, ek);
        const std::vector<double> right = alg.multiply(ei, jk);
        std::vector<double> diff(m);
        for (std::size_t t = 0; t < m; ++t) diff[t] = left[t] - right[t];
        worst = std::max(worst, alg.crisp_norm(diff));
      }
    }
  }
  return worst;
}

LinearMap::LinearMap(AlgebraPtr domain, AlgebraPtr codomain, std::vector<double> matrix)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
  require(domain_ && codomain_, "linear map requires domain and codomain");
  require(matrix_.size() == domain_->dim() * codomain_->dim(),
          "linear map matrix must be codomain.dim x domain.dim");
  for (double v : matrix_) require(std::isfinite(v), "linear map entries must be finite");
}

LinearMap LinearMap::identity(const AlgebraPtr& alg) {
  const std::size_t m = alg->dim();
  std::vector<double> mat(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) mat[i * m + i] = 1.0;
  return LinearMap(alg, alg, std::move(mat));
}

LinearMap LinearMap::euler_derivation(const AlgebraPtr& poly_alg) {
  const std::size_t m = poly_alg->dim();
  std::vector<double> mat(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) mat[i * m + i] = static_cast<double>(i);
  return LinearMap(poly_alg, poly_alg, std::move(mat));
}

LinearMap LinearMap::inner_derivation(const AlgebraPtr& alg, const Element& x) {
  require(x.algebra().get() == alg.get(), "inner derivation generator must live in the algebra");
  const std::size_t m = alg->dim();
  std::vector<double> mat(m * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const Element ej = alg->basis_element(j);
    const Element img = x * ej - ej * x;
    for (std::size_t i = 0; i < m; ++i) mat[i * m + j] = img.coeffs()[i];
  }
  return LinearMap(alg, alg, std::move(mat));
}

Element LinearMap::apply(const Element& a) const {
  require(a.algebra().get() == domain_.get(), "linear map applied outside its domain");
  const std::size_t rows = codomain_->dim(), cols = domain_->dim();
  std::vector<double> out(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += matrix_[i * cols + j] * a.coeffs()[j];
    out[i] = s;
  }
  return codomain_->element(std::move(out));
}

}  // namespace fuzzystab
