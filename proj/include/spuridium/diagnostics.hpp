#ifndef SPURIDIUM_DIAGNOSTICS_HPP
#define SPURIDIUM_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "spuridium/basis.hpp"
#include "spuridium/eigensolve.hpp"
#include "spuridium/hamiltonians.hpp"

namespace spuridium {

/**
 * One evaluation of the squared-operator residual
 *   delta = | e^2 - <v| H^2 |v> |,   e = <v| H |v>.
 *
 * For an exact eigenvector of the projected operator h this equals
 * v^T (h2 - h h) v, the squared norm of the component of H v that leaves the
 * approximation space. States whose exact eigenfunctions live inside the
 * span drive it to zero; states manufactured by the projection cannot.
 *
 * delta is energy-squared and useless as an absolute threshold across
 * problems (relativistic eigenvalues sit at +-c^2), so the dimensionless
 * delta_rel = delta / (1 + e^2) is carried alongside the raw value.
 */
struct DeltaRecord {
  int track_id = -1;
  std::size_t iteration = 0;  // Lanczos step l or basis size N
  double value = 0.0;         // e
  double delta = 0.0;
  double delta_rel = 0.0;
};

inline DeltaRecord delta_diagnostic(const RitzPair& pair, const OperatorPair& ops) {
  if (pair.vector.size() != ops.h.rows)
    throw std::invalid_argument("delta_diagnostic: vector/operator dimension mismatch");
  const std::vector<double> hv = matvec(ops.h, pair.vector);
  const std::vector<double> h2v = matvec(ops.h2, pair.vector);
  const double e = dot(pair.vector, hv);
  const double q2 = dot(pair.vector, h2v);
  DeltaRecord rec;
  rec.track_id = pair.track_id;
  rec.iteration = pair.iteration;
  rec.value = e;
  rec.delta = std::max(0.0, std::abs(e * e - q2));
  rec.delta_rel = rec.delta / (1.0 + e * e);
  return rec;
}

/** Per-tracked-state history of the squared-operator residual. */
struct DeltaSeries {
  int track_id = -1;
  std::vector<DeltaRecord> records;  // ordered by iteration
};

enum class Verdict { GenuineBound, Spurious, ContinuumLike, Undecided };
enum class Trend { Decreasing, Plateau, Increasing };

struct Classification {
  int track_id = -1;
  Verdict verdict = Verdict::Undecided;
  double final_delta_rel = 0.0;
  Trend trend = Trend::Plateau;
};

namespace detail {

// A residual series parked at the numerical floor wobbles instead of
// shrinking by a clean factor, so the decreasing test accepts any step that
// lands at or below the floor. The floor sits far under tol_bound; nothing
// that plateaus at a genuinely nonzero residual can ride this clause.
constexpr double kDeltaRelFloor = 1e-12;

inline Trend trend_of(const std::vector<DeltaRecord>& records, double plateau_factor) {
  const std::size_t n = records.size();
  const double r0 = records[n - 3].delta_rel;
  const double r1 = records[n - 2].delta_rel;
  const double r2 = records[n - 1].delta_rel;
  const bool decreasing = r1 <= std::max(0.9 * r0, kDeltaRelFloor) &&
                          r2 <= std::max(0.9 * r1, kDeltaRelFloor);
  if (decreasing)
    return Trend::Decreasing;
  const double lo = std::min({r0, r1, r2});
  const double hi = std::max({r0, r1, r2});
  if (hi <= plateau_factor * lo)
    return Trend::Plateau;
  return Trend::Increasing;
}

}  // namespace detail

/**
 * Classify every tracked series by the convergence behaviour of delta_rel.
 *
 * Trend over the last 3 records: Decreasing if each drops to <= 0.9 of the
 * previous (or to the numerical floor); Plateau if all three lie within
 * plateau_factor of each other; else Increasing.
 *
 * Verdicts:
 *   GenuineBound   Decreasing and final delta_rel < tol_bound.
 *   Spurious       Plateau/Increasing, final delta_rel >= tol_bound, and
 *                  isolated: every energy-adjacent neighbor's final
 *                  delta_rel is at least 10x smaller.
 *   ContinuumLike  Plateau, final delta_rel >= tol_bound, not isolated.
 *   Undecided      everything else, including series shorter than 3.
 *
 * Isolation needs the whole ensemble (a lone bad state among clean
 * neighbors is the suspicious one; a whole band of comparable residuals is
 * just a discretized continuum), hence the list-in, list-out signature.
 */
inline std::vector<Classification> classify(const std::vector<DeltaSeries>& tracks,
                                            double tol_bound = 1e-6,
                                            double plateau_factor = 2.0) {
  if (!(tol_bound > 0.0) || !(plateau_factor > 0.0))
    throw std::invalid_argument("classify: tolerances must be positive");
  const std::size_t n = tracks.size();
  std::vector<Classification> out(n);
  std::vector<double> final_rel(n, 0.0), final_energy(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].track_id = tracks[i].track_id;
    if (!tracks[i].records.empty()) {
      final_rel[i] = tracks[i].records.back().delta_rel;
      final_energy[i] = tracks[i].records.back().value;
      out[i].final_delta_rel = final_rel[i];
    }
  }

  // Energy-sorted order for the isolation test.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&final_energy](std::size_t a, std::size_t b) {
    return final_energy[a] < final_energy[b];
  });
  std::vector<std::size_t> pos(n);
  for (std::size_t p = 0; p < n; ++p)
    pos[order[p]] = p;

  auto isolated = [&](std::size_t i) {
    if (tracks[i].records.empty())
      return false;
    const std::size_t p = pos[i];
    bool has_neighbor = false;
    if (p > 0) {
      has_neighbor = true;
      if (final_rel[order[p - 1]] > final_rel[i] / 10.0)
        return false;
    }
    if (p + 1 < n) {
      has_neighbor = true;
      if (final_rel[order[p + 1]] > final_rel[i] / 10.0)
        return false;
    }
    return has_neighbor;
  };

  for (std::size_t i = 0; i < n; ++i) {
    Classification& cl = out[i];
    const std::vector<DeltaRecord>& rec = tracks[i].records;
    if (rec.size() < 3) {
      cl.verdict = Verdict::Undecided;
      continue;
    }
    cl.trend = detail::trend_of(rec, plateau_factor);
    const double fin = final_rel[i];
    if (cl.trend == Trend::Decreasing && fin < tol_bound)
      cl.verdict = Verdict::GenuineBound;
    else if (cl.trend != Trend::Decreasing && fin >= tol_bound && isolated(i))
      cl.verdict = Verdict::Spurious;
    else if (cl.trend == Trend::Plateau && fin >= tol_bound)
      cl.verdict = Verdict::ContinuumLike;
    else
      cl.verdict = Verdict::Undecided;
  }
  return out;
}

/**
 * Fraction of the state's probability residing where V(r) > e, the
 * classically forbidden region. Genuine bound states keep only a tunneling
 * tail there; projection artifacts need not. Schroedinger-only: the notion
 * of a classical turning point has no unambiguous meaning for a
 * two-component operator unbounded below, so pairs of the wrong dimension
 * are refused outright rather than approximated.
 */
inline double forbidden_fraction(const RitzPair& pair, const Potential& potential,
                                 const BasisSpec& basis, const QuadratureRule& quad) {
  validate(basis);
  if (pair.vector.size() != basis.n_basis)
    throw std::invalid_argument(
        "forbidden_fraction: pair dimension does not match a single-component basis");
  const CoordinateMap map = map_for(basis);
  const double e = pair.value;
  double inside = 0.0, total = 0.0;
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double u = quad.nodes[q];
    double psi = 0.0;
    for (std::size_t k = 1; k <= basis.n_basis; ++k)
      psi += pair.vector[k - 1] * eval_basis(basis, k, u);
    const double contrib = quad.weights[q] * psi * psi;
    total += contrib;
    if (potential(map.forward(u)) > e)
      inside += contrib;
  }
  if (!(total > 0.0))
    throw std::domain_error("forbidden_fraction: zero-norm reconstruction");
  return inside / total;
}

/**
 * Thomas-Reiche-Kuhn adequacy check: S = sum_k (E_k - E_g) |<k| x |g>|^2,
 * which equals 1/2 for a complete basis (unit mass, atomic units). The
 * deviation |S - 1/2| measures how much of the dipole strength the truncated
 * basis fails to carry; it is a basis-quality metric, not a per-state one.
 */
inline double trk_sum_rule(const EigenDecomposition& decomp, const BasisSpec& basis,
                           const QuadratureRule& quad, std::size_t ground_index = 0) {
  validate(basis);
  const std::size_t m = decomp.values.size();
  if (ground_index >= m)
    throw std::invalid_argument("trk_sum_rule: ground_index out of range");
  if (decomp.vectors.rows != basis.n_basis)
    throw std::invalid_argument("trk_sum_rule: decomposition does not match basis dimension");
  const CoordinateMap map = map_for(basis);
  const std::size_t nq = quad.nodes.size();

  // Position-space reconstructions on the quadrature grid.
  std::vector<std::vector<double>> wave(m, std::vector<double>(nq, 0.0));
  for (std::size_t q = 0; q < nq; ++q) {
    const double u = quad.nodes[q];
    for (std::size_t k = 1; k <= basis.n_basis; ++k) {
      const double ph = eval_basis(basis, k, u);
      for (std::size_t s = 0; s < m; ++s)
        wave[s][q] += decomp.vectors(k - 1, s) * ph;
    }
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    if (s == ground_index)
      continue;
    double x = 0.0;
    for (std::size_t q = 0; q < nq; ++q)
      x += quad.weights[q] * wave[s][q] * map.forward(quad.nodes[q]) * wave[ground_index][q];
    sum += (decomp.values[s] - decomp.values[ground_index]) * x * x;
  }
  return sum;
}

}  // namespace spuridium

#endif  // SPURIDIUM_DIAGNOSTICS_HPP
