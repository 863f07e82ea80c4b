#ifndef SPURIDIUM_BASIS_HPP
#define SPURIDIUM_BASIS_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spuridium {

/** Kind of finite basis on the interval (0, L). */
enum class BasisKind { SineBox, MappedSine };

/** Kind of coordinate transformation u -> r. */
enum class MapKind { Identity, Rational };

/**
 * Describes a finite orthonormal basis on (0, L) in the working coordinate u.
 *
 * The basis functions are phi_k(u) = sqrt(2/L) sin(k pi u / L), k = 1..N.
 * For MappedSine the physical coordinate is r = r(u) with Jacobian J = r'(u),
 * and a physical wavefunction psi(r) is represented as phi(u)/sqrt(J) so that
 * orthonormality holds in plain du measure.
 */
struct BasisSpec {
  BasisKind kind = BasisKind::SineBox;
  std::size_t n_basis = 0;
  double box_length = 0.0;
  double map_strength = 0.0;  ///< gamma; 0 means identity map
};

inline void validate(const BasisSpec& spec) {
  if (spec.n_basis < 1)
    throw std::invalid_argument("BasisSpec: n_basis must be >= 1");
  if (!(spec.box_length > 0.0))
    throw std::invalid_argument("BasisSpec: box_length must be positive");
  if (spec.map_strength < 0.0)
    throw std::invalid_argument("BasisSpec: map_strength must be nonnegative");
  if (spec.kind == BasisKind::SineBox && spec.map_strength != 0.0)
    throw std::invalid_argument("BasisSpec: SineBox requires map_strength = 0");
}

/** Build a plain sine basis on (0, box_length). */
inline BasisSpec build_sine_basis(std::size_t n_basis, double box_length) {
  BasisSpec spec{BasisKind::SineBox, n_basis, box_length, 0.0};
  validate(spec);
  return spec;
}

/** Build a coordinate-mapped sine basis; map_strength = 0 degrades to SineBox. */
inline BasisSpec build_mapped_basis(std::size_t n_basis, double box_length, double map_strength) {
  BasisSpec spec{map_strength == 0.0 ? BasisKind::SineBox : BasisKind::MappedSine, n_basis,
                 box_length, map_strength};
  validate(spec);
  return spec;
}

/**
 * Endpoint-preserving coordinate map u in (0, L) -> r.
 *
 * Rational form: r(u) = u (1 + gamma) / (1 + gamma u / L), which keeps
 * r(0) = 0 and r(L) = L while concentrating resolution near the origin for
 * gamma > 0. Jacobian and its first two derivatives are analytic; they feed
 * the symmetrized kinetic operator and the pointwise operator images.
 */
struct CoordinateMap {
  MapKind kind = MapKind::Identity;
  double length = 0.0;
  double gamma = 0.0;

  double forward(double u) const {
    if (kind == MapKind::Identity)
      return u;
    return u * (1.0 + gamma) / (1.0 + gamma * u / length);
  }

  double jacobian(double u) const {
    if (kind == MapKind::Identity)
      return 1.0;
    const double q = 1.0 + gamma * u / length;
    return (1.0 + gamma) / (q * q);
  }

  double jacobian_d1(double u) const {
    if (kind == MapKind::Identity)
      return 0.0;
    const double q = 1.0 + gamma * u / length;
    return -2.0 * (gamma / length) * (1.0 + gamma) / (q * q * q);
  }

  double jacobian_d2(double u) const {
    if (kind == MapKind::Identity)
      return 0.0;
    const double q = 1.0 + gamma * u / length;
    return 6.0 * (gamma / length) * (gamma / length) * (1.0 + gamma) / (q * q * q * q);
  }
};

inline CoordinateMap build_coordinate_map(MapKind kind, double box_length, double map_strength) {
  if (map_strength < 0.0)
    throw std::invalid_argument("build_coordinate_map: negative map_strength");
  if (!(box_length > 0.0))
    throw std::invalid_argument("build_coordinate_map: box_length must be positive");
  if (kind == MapKind::Identity)
    return CoordinateMap{MapKind::Identity, box_length, 0.0};
  return CoordinateMap{MapKind::Rational, box_length, map_strength};
}

/** The map implied by a BasisSpec. */
inline CoordinateMap map_for(const BasisSpec& spec) {
  return build_coordinate_map(spec.kind == BasisKind::MappedSine ? MapKind::Rational
                                                                 : MapKind::Identity,
                              spec.box_length, spec.map_strength);
}

/**
 * Quadrature rule on (0, L): strictly interior nodes with positive weights.
 * Interior nodes matter: Coulomb-type 1/r and 1/r^2 integrands stay finite
 * because they are never evaluated at the endpoints.
 */
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/**
 * Gauss-Legendre rule with n nodes on (a, b). Newton iteration on the
 * Legendre recurrence; exact for polynomials of degree < 2n.
 */
inline QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: need at least one node");
  if (!(b > a))
    throw std::invalid_argument("gauss_legendre: empty interval");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  const double xm = 0.5 * (b + a);
  const double xl = 0.5 * (b - a);
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15)
        break;
    }
    rule.nodes[i] = xm - xl * z;
    rule.nodes[n - 1 - i] = xm + xl * z;
    rule.weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

/**
 * Default quadrature for a basis: Gauss-Legendre with oversampling * N nodes
 * on (0, L). Oversampling >= 2 required; 6 is the default used by operator
 * assembly, sized for squared-operator integrands (second derivatives times
 * potentials need more accuracy than the plain operator).
 */
inline QuadratureRule quadrature_rule(const BasisSpec& spec, std::size_t oversampling = 6) {
  validate(spec);
  if (oversampling < 2)
    throw std::invalid_argument("quadrature_rule: oversampling must be >= 2");
  return gauss_legendre(oversampling * spec.n_basis, 0.0, spec.box_length);
}

namespace detail {
inline void check_basis_args(const BasisSpec& spec, std::size_t k, double u) {
  if (k < 1 || k > spec.n_basis)
    throw std::out_of_range("eval_basis: index k out of range");
  if (u < 0.0 || u > spec.box_length)
    throw std::out_of_range("eval_basis: coordinate outside [0, L]");
}
}  // namespace detail

/** phi_k(u) = sqrt(2/L) sin(k pi u / L). Exactly zero at both endpoints. */
inline double eval_basis(const BasisSpec& spec, std::size_t k, double u) {
  detail::check_basis_args(spec, k, u);
  const double L = spec.box_length;
  if (u == 0.0 || u == L)
    return 0.0;
  return std::sqrt(2.0 / L) * std::sin(k * std::numbers::pi * u / L);
}

/** First u-derivative of phi_k. */
inline double eval_basis_d1(const BasisSpec& spec, std::size_t k, double u) {
  detail::check_basis_args(spec, k, u);
  const double L = spec.box_length;
  const double kk = k * std::numbers::pi / L;
  return std::sqrt(2.0 / L) * kk * std::cos(kk * u);
}

/** Second u-derivative: -(k pi / L)^2 phi_k. */
inline double eval_basis_d2(const BasisSpec& spec, std::size_t k, double u) {
  detail::check_basis_args(spec, k, u);
  const double kk = k * std::numbers::pi / spec.box_length;
  return -kk * kk * eval_basis(spec, k, u);
}

}  // namespace spuridium

#endif  // SPURIDIUM_BASIS_HPP
