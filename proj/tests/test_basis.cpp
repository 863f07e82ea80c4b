#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <spuridium/basis.hpp>

using namespace spuridium;

namespace {

// Composite trapezoid on [0, L]; independent of the Gauss-Legendre code
// under test.
template <class F>
double trapezoid(const F& f, double lo, double hi, std::size_t intervals) {
  const double h = (hi - lo) / static_cast<double>(intervals);
  double sum = 0.5 * (f(lo) + f(hi));
  for (std::size_t i = 1; i < intervals; ++i)
    sum += f(lo + h * static_cast<double>(i));
  return sum * h;
}

}  // namespace

TEST_CASE("sine basis is orthonormal on (0, L)", "[basis]") {
  const BasisSpec spec = build_sine_basis(6, 13.7);
  for (std::size_t i = 1; i <= spec.n_basis; ++i)
    for (std::size_t j = i; j <= spec.n_basis; ++j) {
      const double overlap = trapezoid(
          [&](double u) { return eval_basis(spec, i, u) * eval_basis(spec, j, u); }, 0.0,
          spec.box_length, 200000);
      REQUIRE(std::abs(overlap - (i == j ? 1.0 : 0.0)) < 1e-9);
    }
}

TEST_CASE("basis functions vanish exactly at the endpoints", "[basis]") {
  const BasisSpec spec = build_sine_basis(9, 10.0);
  for (std::size_t k = 1; k <= spec.n_basis; ++k) {
    REQUIRE(eval_basis(spec, k, 0.0) == 0.0);
    REQUIRE(eval_basis(spec, k, spec.box_length) == 0.0);
  }
}

TEST_CASE("first derivative matches central differences", "[basis]") {
  const BasisSpec spec = build_sine_basis(8, 10.0);
  const double h = 1e-6;
  for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{8}})
    for (double u : {0.31, 2.7, 5.0, 9.43}) {
      const double fd =
          (eval_basis(spec, k, u + h) - eval_basis(spec, k, u - h)) / (2.0 * h);
      REQUIRE(std::abs(eval_basis_d1(spec, k, u) - fd) < 1e-6);
    }
}

TEST_CASE("second derivative equals -(k pi / L)^2 phi", "[basis]") {
  const BasisSpec spec = build_sine_basis(8, 10.0);
  const double h = 1e-4;
  for (std::size_t k : {std::size_t{2}, std::size_t{7}})
    for (double u : {0.5, 4.2, 8.8}) {
      const double lambda = k * std::numbers::pi / spec.box_length;
      REQUIRE(std::abs(eval_basis_d2(spec, k, u) +
                       lambda * lambda * eval_basis(spec, k, u)) < 1e-14);
      const double fd = (eval_basis(spec, k, u + h) - 2.0 * eval_basis(spec, k, u) +
                         eval_basis(spec, k, u - h)) /
                        (h * h);
      REQUIRE(std::abs(eval_basis_d2(spec, k, u) - fd) < 1e-4);
    }
}

TEST_CASE("gauss_legendre integrates polynomials of degree < 2n exactly", "[basis]") {
  const QuadratureRule rule = gauss_legendre(8, 0.0, 3.0);
  // x^14 has degree 14 < 16; exact value 3^15 / 15
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    sum += rule.weights[q] * std::pow(rule.nodes[q], 14);
  const double exact = std::pow(3.0, 15) / 15.0;
  REQUIRE(std::abs(sum - exact) / exact < 1e-13);

  double wsum = 0.0;
  for (double w : rule.weights) {
    REQUIRE(w > 0.0);
    wsum += w;
  }
  REQUIRE(std::abs(wsum - 3.0) < 1e-13);

  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    REQUIRE(rule.nodes[q] > 0.0);
    REQUIRE(rule.nodes[q] < 3.0);
    if (q > 0)
      REQUIRE(rule.nodes[q] > rule.nodes[q - 1]);
  }
}

TEST_CASE("gauss_legendre handles a smooth transcendental integrand", "[basis]") {
  const QuadratureRule rule = gauss_legendre(20, 0.0, 2.0);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    sum += rule.weights[q] * std::exp(rule.nodes[q]);
  REQUIRE(std::abs(sum - (std::exp(2.0) - 1.0)) < 1e-12);
}

TEST_CASE("quadrature_rule sizing and validation", "[basis]") {
  const BasisSpec spec = build_sine_basis(30, 20.0);
  REQUIRE(quadrature_rule(spec).nodes.size() == 180);
  REQUIRE(quadrature_rule(spec, 3).nodes.size() == 90);
  REQUIRE_THROWS_AS(quadrature_rule(spec, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(gauss_legendre(4, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("rational map keeps endpoints and has consistent derivatives", "[basis]") {
  const CoordinateMap map = build_coordinate_map(MapKind::Rational, 20.0, 2.5);
  REQUIRE(map.forward(0.0) == 0.0);
  REQUIRE(std::abs(map.forward(20.0) - 20.0) < 1e-14);

  const double h = 1e-5;
  for (double u : {0.7, 4.0, 11.3, 18.0}) {
    const double j_fd = (map.forward(u + h) - map.forward(u - h)) / (2.0 * h);
    REQUIRE(std::abs(map.jacobian(u) - j_fd) < 1e-8);
    const double j1_fd = (map.jacobian(u + h) - map.jacobian(u - h)) / (2.0 * h);
    REQUIRE(std::abs(map.jacobian_d1(u) - j1_fd) < 1e-8);
    const double j2_fd = (map.jacobian_d1(u + h) - map.jacobian_d1(u - h)) / (2.0 * h);
    REQUIRE(std::abs(map.jacobian_d2(u) - j2_fd) < 1e-8);
  }

  // gamma > 0 concentrates resolution near the origin
  REQUIRE(map.forward(10.0) > 10.0);
  REQUIRE(map.jacobian(0.0) > map.jacobian(20.0));
}

TEST_CASE("identity map is the identity", "[basis]") {
  const CoordinateMap map = build_coordinate_map(MapKind::Identity, 5.0, 0.0);
  for (double u : {0.0, 1.3, 5.0}) {
    REQUIRE(map.forward(u) == u);
    REQUIRE(map.jacobian(u) == 1.0);
    REQUIRE(map.jacobian_d1(u) == 0.0);
    REQUIRE(map.jacobian_d2(u) == 0.0);
  }
}

TEST_CASE("zero map strength degrades to the plain sine basis", "[basis]") {
  const BasisSpec spec = build_mapped_basis(10, 15.0, 0.0);
  REQUIRE(spec.kind == BasisKind::SineBox);
  REQUIRE(map_for(spec).kind == MapKind::Identity);
  const BasisSpec mapped = build_mapped_basis(10, 15.0, 1.0);
  REQUIRE(mapped.kind == BasisKind::MappedSine);
  REQUIRE(map_for(mapped).kind == MapKind::Rational);
}

TEST_CASE("basis argument validation", "[basis]") {
  const BasisSpec spec = build_sine_basis(4, 10.0);
  REQUIRE_THROWS_AS(eval_basis(spec, 0, 1.0), std::out_of_range);
  REQUIRE_THROWS_AS(eval_basis(spec, 5, 1.0), std::out_of_range);
  REQUIRE_THROWS_AS(eval_basis(spec, 1, -0.001), std::out_of_range);
  REQUIRE_THROWS_AS(eval_basis(spec, 1, 10.001), std::out_of_range);
  REQUIRE_THROWS_AS(build_sine_basis(0, 10.0), std::invalid_argument);
  REQUIRE_THROWS_AS(build_sine_basis(5, -1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(build_coordinate_map(MapKind::Rational, 10.0, -0.5), std::invalid_argument);
}
