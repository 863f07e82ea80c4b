#ifndef SPURIDIUM_HAMILTONIANS_HPP
#define SPURIDIUM_HAMILTONIANS_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "spuridium/basis.hpp"
#include "spuridium/linalg.hpp"

namespace spuridium {

enum class PotentialKind { HarmonicOscillator, CoulombRadial, PoschlTeller, SquareWell };

// Model potential catalog. All four kinds have closed-form bound spectra,
// which is what makes them usable as oracles. CoulombRadial includes the
// centrifugal term; HarmonicOscillator and PoschlTeller carry a center so a
// whole-line well can be placed mid-box, away from the Dirichlet walls.
struct Potential {
  PotentialKind kind = PotentialKind::HarmonicOscillator;
  double omega = 1.0;      // HarmonicOscillator
  double z = 1.0;          // CoulombRadial charge
  unsigned ell = 0;        // CoulombRadial angular momentum
  double lambda = 2.0;     // PoschlTeller depth parameter (> 1)
  double a = 1.0;          // PoschlTeller inverse width
  double v0 = 1.0;         // SquareWell depth (> 0)
  double width = 1.0;      // SquareWell radius
  double center = 0.0;     // well position for HO / PT
  double soft_core = 0.0;  // optional Coulomb regularization radius (experiments only)

  double operator()(double r) const {
    switch (kind) {
      case PotentialKind::HarmonicOscillator: {
        const double x = r - center;
        return 0.5 * omega * omega * x * x;
      }
      case PotentialKind::CoulombRadial: {
        double v = -z / (r + soft_core);
        if (ell > 0)
          v += 0.5 * ell * (ell + 1.0) / (r * r);
        return v;
      }
      case PotentialKind::PoschlTeller: {
        const double ch = std::cosh(a * (r - center));
        return -lambda * (lambda - 1.0) * a * a / (2.0 * ch * ch);
      }
      case PotentialKind::SquareWell:
        return r < width ? -v0 : 0.0;
    }
    return 0.0;
  }
};

inline Potential harmonic_oscillator(double omega, double center = 0.0) {
  if (!(omega > 0.0))
    throw std::invalid_argument("harmonic_oscillator: omega must be positive");
  Potential p;
  p.kind = PotentialKind::HarmonicOscillator;
  p.omega = omega;
  p.center = center;
  return p;
}

inline Potential coulomb_radial(double z, unsigned ell = 0, double soft_core = 0.0) {
  if (!(z > 0.0))
    throw std::invalid_argument("coulomb_radial: charge must be positive");
  if (soft_core < 0.0)
    throw std::invalid_argument("coulomb_radial: negative soft-core radius");
  Potential p;
  p.kind = PotentialKind::CoulombRadial;
  p.z = z;
  p.ell = ell;
  p.soft_core = soft_core;
  return p;
}

inline Potential poschl_teller(double lambda, double a, double center = 0.0) {
  if (!(lambda > 1.0))
    throw std::invalid_argument("poschl_teller: lambda must exceed 1");
  if (!(a > 0.0))
    throw std::invalid_argument("poschl_teller: a must be positive");
  Potential p;
  p.kind = PotentialKind::PoschlTeller;
  p.lambda = lambda;
  p.a = a;
  p.center = center;
  return p;
}

inline Potential square_well(double v0, double width) {
  if (!(v0 > 0.0) || !(width > 0.0))
    throw std::invalid_argument("square_well: depth and width must be positive");
  Potential p;
  p.kind = PotentialKind::SquareWell;
  p.v0 = v0;
  p.width = width;
  return p;
}

// Radial Dirac-Coulomb parameters, atomic units.
struct DiracParams {
  double z = 1.0;
  int kappa = -1;
  double c = 137.035999;
};

inline void validate(const DiracParams& params) {
  if (params.kappa == 0)
    throw std::invalid_argument("DiracParams: kappa must be nonzero");
  if (!(params.z > 0.0) || !(params.c > 0.0))
    throw std::invalid_argument("DiracParams: Z and c must be positive");
  if (params.z / params.c >= std::abs(static_cast<double>(params.kappa)))
    throw std::domain_error("DiracParams: supercritical coupling (Z/c >= |kappa|)");
}

// The projected operator and the projected square, assembled in one basis.
// The two are NOT related by h2 = h*h: the difference h2 - h*h is the
// positive-semidefinite leakage operator, and that gap is exactly what the
// squared-operator diagnostic measures.
struct OperatorPair {
  Matrix h;
  Matrix h2;
  BasisSpec basis;
  std::string problem_tag;
};

namespace detail {

inline void check_quad(const BasisSpec& spec, const QuadratureRule& quad) {
  if (quad.nodes.empty() || quad.nodes.size() != quad.weights.size())
    throw std::invalid_argument("assemble: malformed quadrature rule");
  for (double u : quad.nodes)
    if (!(u > 0.0) || !(u < spec.box_length))
      throw std::invalid_argument("assemble: quadrature node outside (0, L)");
}

// Basis tables evaluated on the quadrature nodes: phi, phi', phi'' by row.
struct BasisTables {
  std::vector<std::vector<double>> phi, d1, d2;
};

inline BasisTables tabulate(const BasisSpec& spec, const QuadratureRule& quad) {
  const std::size_t n = spec.n_basis;
  const std::size_t nq = quad.nodes.size();
  BasisTables t;
  t.phi.assign(n, std::vector<double>(nq));
  t.d1.assign(n, std::vector<double>(nq));
  t.d2.assign(n, std::vector<double>(nq));
  for (std::size_t k = 1; k <= n; ++k)
    for (std::size_t q = 0; q < nq; ++q) {
      t.phi[k - 1][q] = eval_basis(spec, k, quad.nodes[q]);
      t.d1[k - 1][q] = eval_basis_d1(spec, k, quad.nodes[q]);
      t.d2[k - 1][q] = eval_basis_d2(spec, k, quad.nodes[q]);
    }
  return t;
}

// out[i][j] = sum_q a[i][q] * a[j][q], rows already carrying sqrt(weight).
inline Matrix gram(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = dot(a[i], a[j]);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

inline Matrix gram2(const std::vector<std::vector<double>>& up,
                    const std::vector<std::vector<double>>& lo) {
  const std::size_t n = up.size();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = dot(up[i], up[j]) + dot(lo[i], lo[j]);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

}  // namespace detail

/**
 * Assemble H and H^2 for the radial/1D Schroedinger problem
 * H = -1/2 d^2/dr^2 + V(r) in the given basis.
 *
 * SineBox: the kinetic term is exactly diagonal, (k pi / L)^2 / 2, because
 * the second derivative maps the sine span into itself; only the potential
 * is integrated numerically. MappedSine: the kinetic operator is taken in
 * the symmetrized form (1/sqrt(J)) d/du (1/J) d/du (1/sqrt(J)), assembled by
 * parts as 1/2 Int g_i' g_j' / J du with g = phi / sqrt(J), which keeps h
 * symmetric without a generalized eigenproblem.
 *
 * h2 is the Gram matrix of the pointwise images H phi_k under quadrature,
 * never a symbolic expansion of H^2, so no derivatives of V are needed.
 */
inline OperatorPair assemble_schrodinger(const Potential& potential, const BasisSpec& basis,
                                         const QuadratureRule& quad) {
  validate(basis);
  detail::check_quad(basis, quad);
  const CoordinateMap map = map_for(basis);
  const std::size_t n = basis.n_basis;
  const std::size_t nq = quad.nodes.size();

  std::vector<double> v(nq), sw(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const double r = map.forward(quad.nodes[q]);
    v[q] = potential(r);
    if (!std::isfinite(v[q]))
      throw std::domain_error("assemble_schrodinger: potential singular at a quadrature node");
    sw[q] = std::sqrt(quad.weights[q]);
  }

  const detail::BasisTables tab = detail::tabulate(basis, quad);
  Matrix h(n, n);
  std::vector<std::vector<double>> img(n, std::vector<double>(nq));

  if (basis.kind == BasisKind::SineBox) {
    std::vector<std::vector<double>> pw(n, std::vector<double>(nq));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t q = 0; q < nq; ++q)
        pw[k][q] = tab.phi[k][q] * sw[q];
    // Potential part by quadrature, with the weight split symmetrically.
    std::vector<std::vector<double>> pv(n, std::vector<double>(nq));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t q = 0; q < nq; ++q)
        pv[k][q] = pw[k][q] * v[q];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double s = dot(pw[i], pv[j]);
        h(i, j) = s;
        h(j, i) = s;
      }
    for (std::size_t k = 0; k < n; ++k) {
      const double kk = (k + 1) * std::numbers::pi / basis.box_length;
      h(k, k) += 0.5 * kk * kk;
    }
    // H phi_k at the nodes; the kinetic action is analytic.
    for (std::size_t k = 0; k < n; ++k) {
      const double kk = (k + 1) * std::numbers::pi / basis.box_length;
      const double lam = 0.5 * kk * kk;
      for (std::size_t q = 0; q < nq; ++q)
        img[k][q] = (lam + v[q]) * tab.phi[k][q] * sw[q];
    }
  } else {
    std::vector<double> jac(nq), jd1(nq), jd2(nq);
    for (std::size_t q = 0; q < nq; ++q) {
      jac[q] = map.jacobian(quad.nodes[q]);
      jd1[q] = map.jacobian_d1(quad.nodes[q]);
      jd2[q] = map.jacobian_d2(quad.nodes[q]);
    }
    // g = phi / sqrt(J) and its u-derivatives.
    std::vector<std::vector<double>> gp(n, std::vector<double>(nq));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t q = 0; q < nq; ++q) {
        const double sj = std::sqrt(jac[q]);
        gp[k][q] = (tab.d1[k][q] - 0.5 * tab.phi[k][q] * jd1[q] / jac[q]) / sj;
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < nq; ++q)
          s += quad.weights[q] * gp[i][q] * gp[j][q] / jac[q];
        s *= 0.5;
        double sv = 0.0;
        for (std::size_t q = 0; q < nq; ++q)
          sv += quad.weights[q] * tab.phi[i][q] * tab.phi[j][q] * v[q];
        h(i, j) = s + sv;
        h(j, i) = h(i, j);
      }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t q = 0; q < nq; ++q) {
        const double J = jac[q];
        const double sj = std::sqrt(J);
        const double g1 = gp[k][q];
        const double g2 = tab.d2[k][q] / sj - tab.d1[k][q] * jd1[q] / (J * sj) +
                          tab.phi[k][q] * (0.75 * jd1[q] * jd1[q] / (J * J * sj) -
                                           0.5 * jd2[q] / (J * sj));
        const double inner = g2 / J - g1 * jd1[q] / (J * J);
        img[k][q] = (-0.5 * inner / sj + v[q] * tab.phi[k][q]) * sw[q];
      }
  }

  OperatorPair pair;
  pair.h = std::move(h);
  pair.h2 = detail::gram(img);
  pair.basis = basis;
  switch (potential.kind) {
    case PotentialKind::HarmonicOscillator: pair.problem_tag = "harmonic"; break;
    case PotentialKind::CoulombRadial: pair.problem_tag = "hydrogen"; break;
    case PotentialKind::PoschlTeller: pair.problem_tag = "poschl_teller"; break;
    case PotentialKind::SquareWell: pair.problem_tag = "square_well"; break;
  }
  symmetrize(pair.h);
  symmetrize(pair.h2);
  return pair;
}

/**
 * Assemble the 2N x 2N radial Dirac-Coulomb matrix and its squared-operator
 * partner, both components expanded in the same N sine functions. That
 * shared-basis construction is the one known to admit spurious solutions,
 * deliberately so; no kinetic-balance relation is imposed.
 *
 * Block structure (large/small):
 *   [  c^2 I + V      c(-d/dr + kappa/r) ]
 *   [ c(d/dr + kappa/r)   -c^2 I + V     ]
 * with V = -Z/r. h2 is the Gram matrix of the two-component images H chi_a
 * for all 2N single-component spinors chi_a.
 */
inline OperatorPair assemble_dirac(const DiracParams& params, const BasisSpec& basis,
                                   const QuadratureRule& quad) {
  validate(params);
  validate(basis);
  detail::check_quad(basis, quad);
  const CoordinateMap map = map_for(basis);
  const std::size_t n = basis.n_basis;
  const std::size_t nq = quad.nodes.size();
  const double c = params.c;
  const double kap = static_cast<double>(params.kappa);

  std::vector<double> v(nq), invr(nq), sw(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const double r = map.forward(quad.nodes[q]);
    if (!(r > 0.0))
      throw std::domain_error("assemble_dirac: nonpositive radius at a quadrature node");
    invr[q] = 1.0 / r;
    v[q] = -params.z * invr[q];
    if (!std::isfinite(v[q]))
      throw std::domain_error("assemble_dirac: potential singular at a quadrature node");
    sw[q] = std::sqrt(quad.weights[q]);
  }

  const detail::BasisTables tab = detail::tabulate(basis, quad);

  // u-representation image of d/dr acting on phi_k / sqrt(J), re-expressed
  // with the sqrt(J) factor absorbed; reduces to phi' for the identity map.
  std::vector<std::vector<double>> dr(n, std::vector<double>(nq));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t q = 0; q < nq; ++q) {
      const double J = map.jacobian(quad.nodes[q]);
      const double jd = map.jacobian_d1(quad.nodes[q]);
      dr[k][q] = (tab.d1[k][q] - 0.5 * tab.phi[k][q] * jd / J) / J;
    }

  Matrix h(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double pot = 0.0, der = 0.0, cen = 0.0;
      for (std::size_t q = 0; q < nq; ++q) {
        const double wphi = quad.weights[q] * tab.phi[i][q];
        pot += wphi * tab.phi[j][q] * v[q];
        der += wphi * dr[j][q];
        cen += wphi * tab.phi[j][q] * invr[q];
      }
      const double b = c * (-der + kap * cen);
      h(i, j) = pot;
      h(n + i, n + j) = pot;
      h(i, n + j) = b;
      h(n + j, i) = b;
    }
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) += c * c;
    h(n + i, n + i) -= c * c;
  }

  // Two-component images of the 2N basis spinors.
  std::vector<std::vector<double>> up(2 * n, std::vector<double>(nq));
  std::vector<std::vector<double>> lo(2 * n, std::vector<double>(nq));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t q = 0; q < nq; ++q) {
      const double phi = tab.phi[k][q];
      up[k][q] = (c * c + v[q]) * phi * sw[q];
      lo[k][q] = c * (dr[k][q] + kap * phi * invr[q]) * sw[q];
      up[n + k][q] = c * (-dr[k][q] + kap * phi * invr[q]) * sw[q];
      lo[n + k][q] = (-c * c + v[q]) * phi * sw[q];
    }

  OperatorPair pair;
  pair.h = std::move(h);
  pair.h2 = detail::gram2(up, lo);
  pair.basis = basis;
  pair.problem_tag = "dirac_coulomb";
  symmetrize(pair.h);
  symmetrize(pair.h2);
  return pair;
}

/**
 * Analytic bound-state energies for the potential catalog.
 *
 * Quantum-number conventions follow the standard closed forms:
 *   HarmonicOscillator  n = 0, 1, 2, ...      E = omega (n + 1/2)
 *   CoulombRadial       principal n >= ell+1  E = -Z^2 / (2 n^2)
 *   PoschlTeller        0 <= n < lambda - 1   E = -a^2 (lambda - 1 - n)^2 / 2
 *   SquareWell          n-th root (0-based) of the transcendental matching
 *                       condition k cot(k w) = -sqrt(-2E), k = sqrt(2(E+V0)),
 *                       located by bisection.
 */
inline double schrodinger_energy_oracle(const Potential& potential, unsigned n) {
  switch (potential.kind) {
    case PotentialKind::HarmonicOscillator:
      return potential.omega * (n + 0.5);
    case PotentialKind::CoulombRadial: {
      if (potential.soft_core != 0.0)
        throw std::invalid_argument("schrodinger_energy_oracle: no closed form with soft core");
      if (n < potential.ell + 1)
        throw std::domain_error("schrodinger_energy_oracle: principal n must exceed ell");
      return -potential.z * potential.z / (2.0 * n * n);
    }
    case PotentialKind::PoschlTeller: {
      if (n + 1.0 >= potential.lambda)
        throw std::domain_error("schrodinger_energy_oracle: no such bound state");
      const double m = potential.lambda - 1.0 - n;
      return -potential.a * potential.a * m * m / 2.0;
    }
    case PotentialKind::SquareWell: {
      // Roots of k cos(k w) + kap sin(k w) = 0 in E, continuous in E so a
      // sign-scan plus bisection is safe.
      const double v0 = potential.v0;
      const double w = potential.width;
      auto f = [&](double e) {
        const double k = std::sqrt(2.0 * (e + v0));
        const double kapp = std::sqrt(-2.0 * e);
        return k * std::cos(k * w) + kapp * std::sin(k * w);
      };
      const int grid = 20000;
      std::vector<double> roots;
      double e0 = -v0 * (1.0 - 1e-12);
      double f0 = f(e0);
      for (int i = 1; i <= grid; ++i) {
        const double e1 = -v0 + (v0 - 1e-12) * static_cast<double>(i) / grid;
        const double f1 = f(e1);
        if (f0 == 0.0)
          roots.push_back(e0);
        else if (f0 * f1 < 0.0) {
          double lo_e = e0, hi_e = e1, lo_f = f0;
          for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo_e + hi_e);
            const double fm = f(mid);
            if (lo_f * fm <= 0.0)
              hi_e = mid;
            else {
              lo_e = mid;
              lo_f = fm;
            }
          }
          roots.push_back(0.5 * (lo_e + hi_e));
        }
        e0 = e1;
        f0 = f1;
      }
      if (n >= roots.size())
        throw std::domain_error("schrodinger_energy_oracle: no such bound state");
      return roots[n];
    }
  }
  throw std::logic_error("schrodinger_energy_oracle: unhandled potential kind");
}

/**
 * Sommerfeld energy of the hydrogenic Dirac problem:
 *   E = c^2 [1 + (Z alpha)^2 / (n_r + sqrt(kappa^2 - (Z alpha)^2))^2]^(-1/2)
 * with alpha = 1/c. Rest energy included. kappa > 0 requires n_r >= 1.
 */
inline double dirac_energy_oracle(const DiracParams& params, unsigned n_r) {
  validate(params);
  if (params.kappa > 0 && n_r == 0)
    throw std::domain_error("dirac_energy_oracle: n_r = 0 requires kappa < 0");
  const double za = params.z / params.c;
  const double kap = static_cast<double>(params.kappa);
  const double g = std::sqrt(kap * kap - za * za);
  const double denom = static_cast<double>(n_r) + g;
  return params.c * params.c / std::sqrt(1.0 + za * za / (denom * denom));
}

}  // namespace spuridium

#endif  // SPURIDIUM_HAMILTONIANS_HPP
