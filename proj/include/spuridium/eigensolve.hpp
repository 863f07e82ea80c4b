#ifndef SPURIDIUM_EIGENSOLVE_HPP
#define SPURIDIUM_EIGENSOLVE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "spuridium/linalg.hpp"

namespace spuridium {

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // orthonormal columns, vectors(:,k) <-> values[k]
};

// Full symmetric eigendecomposition: Householder reduction to tridiagonal
// form followed by implicit-shift QL with accumulated rotations.
inline EigenDecomposition eigh_dense(const Matrix& a) {
  if (a.rows != a.cols)
    throw std::invalid_argument("eigh_dense: matrix must be square");
  if (max_asymmetry(a) > 1e-10 * (1.0 + max_abs(a)))
    throw std::invalid_argument("eigh_dense: matrix not symmetric");
  EigenDecomposition dec;
  dec.vectors = a;
  std::vector<double> e;
  detail::householder_tridiag(dec.vectors, dec.values, e);
  detail::tridiag_ql(dec.values, e, dec.vectors);
  detail::sort_eigenpairs(dec.values, dec.vectors);
  return dec;
}

struct RitzPair {
  double value = 0.0;
  std::vector<double> vector;  // unit norm, full M-dimensional space
  std::size_t iteration = 0;   // Lanczos step l, or basis size N for dense scans
  int track_id = -1;
};

struct LanczosState {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::vector<double>> krylov_vectors;
  std::size_t iteration = 0;
  bool broke_down = false;
  double op_scale = 0.0;  // running |A|-scale estimate for the breakdown test
};

inline LanczosState lanczos_init(std::vector<double> start) {
  const double nrm = norm2(start);
  if (!(nrm > 0.0))
    throw std::invalid_argument("lanczos_init: zero start vector");
  for (double& x : start)
    x /= nrm;
  LanczosState st;
  st.krylov_vectors.push_back(std::move(start));
  return st;
}

// One Lanczos recurrence step with full two-pass reorthogonalization against
// every stored Krylov vector. Breakdown (new beta below 1e-13 on the scale
// of the operator) marks an invariant subspace: exact convergence, reported
// as successful early termination rather than failure.
template <class Apply>
inline void lanczos_step(const Apply& apply, LanczosState& state) {
  if (state.broke_down)
    throw std::logic_error("lanczos_step: iteration already terminated by breakdown");
  const std::vector<double>& q = state.krylov_vectors.back();
  std::vector<double> w = apply(q);
  if (w.size() != q.size())
    throw std::invalid_argument("lanczos_step: operator changed vector dimension");
  const double a = dot(q, w);
  state.alpha.push_back(a);
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] -= a * q[i];
  if (state.krylov_vectors.size() > 1) {
    const std::vector<double>& qp = state.krylov_vectors[state.krylov_vectors.size() - 2];
    const double b = state.beta.back();
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] -= b * qp[i];
  }
  for (int pass = 0; pass < 2; ++pass)
    for (const std::vector<double>& qi : state.krylov_vectors) {
      const double c = dot(qi, w);
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] -= c * qi[i];
    }
  state.op_scale = std::max(state.op_scale, std::abs(a));
  if (!state.beta.empty())
    state.op_scale = std::max(state.op_scale, state.beta.back());
  ++state.iteration;

  const double b = norm2(w);
  if (b <= 1e-13 * std::max(state.op_scale, 1.0)) {
    state.broke_down = true;
    return;
  }
  if (state.alpha.size() == q.size()) {
    // Krylov space exhausted the full space; no further vector exists.
    state.broke_down = true;
    return;
  }
  state.beta.push_back(b);
  for (double& x : w)
    x /= b;
  state.krylov_vectors.push_back(std::move(w));
}

// Convenience driver: run up to max_steps Lanczos steps or until breakdown.
template <class Apply>
inline LanczosState run_lanczos(const Apply& apply, std::vector<double> start,
                                std::size_t max_steps) {
  LanczosState st = lanczos_init(std::move(start));
  for (std::size_t l = 0; l < max_steps && !st.broke_down; ++l)
    lanczos_step(apply, st);
  return st;
}

// Diagonalize the current l x l tridiagonal matrix and lift the eigenvectors
// back through the Krylov basis. Values ascend; iteration stamps carry l.
inline std::vector<RitzPair> ritz_pairs(const LanczosState& state) {
  const std::size_t l = state.alpha.size();
  if (l == 0)
    throw std::invalid_argument("ritz_pairs: no iterations taken");
  const std::size_t m = state.krylov_vectors.front().size();
  auto [values, z] = tridiag_eigh(
      state.alpha, std::vector<double>(state.beta.begin(),
                                       state.beta.begin() + static_cast<std::ptrdiff_t>(l - 1)));
  std::vector<RitzPair> out(l);
  for (std::size_t j = 0; j < l; ++j) {
    RitzPair& rp = out[j];
    rp.value = values[j];
    rp.iteration = l;
    rp.vector.assign(m, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
      const double zij = z(i, j);
      const std::vector<double>& qi = state.krylov_vectors[i];
      for (std::size_t k = 0; k < m; ++k)
        rp.vector[k] += zij * qi[k];
    }
    const double nrm = norm2(rp.vector);
    for (double& x : rp.vector)
      x /= nrm;
  }
  return out;
}

struct TrackedSeries {
  int track_id = -1;
  std::vector<RitzPair> points;
};

// Associate states across successive iterations (or basis sizes) by greedy
// nearest-eigenvalue matching with acceptance window
// w = max(1e-6, 1e-3 |value|); closest distances claim first, ties resolved
// by lower index. Unmatched incoming states open new tracks; tracks that
// miss one round stay closed.
inline std::vector<TrackedSeries> track_states(std::vector<std::vector<RitzPair>> histories) {
  std::vector<TrackedSeries> tracks;
  std::vector<std::size_t> active;  // indices into tracks matched at the previous list
  int next_id = 0;
  for (std::size_t t = 0; t < histories.size(); ++t) {
    std::vector<RitzPair>& current = histories[t];
    std::vector<std::size_t> matched_track(current.size(), static_cast<std::size_t>(-1));
    if (!active.empty()) {
      struct Cand {
        double dist;
        std::size_t prev;  // position within active
        std::size_t cur;
      };
      std::vector<Cand> cands;
      for (std::size_t p = 0; p < active.size(); ++p) {
        const double pv = tracks[active[p]].points.back().value;
        for (std::size_t cidx = 0; cidx < current.size(); ++cidx) {
          const double cv = current[cidx].value;
          const double w = std::max(1e-6, 1e-3 * std::abs(cv));
          const double d = std::abs(cv - pv);
          if (d <= w)
            cands.push_back({d, p, cidx});
        }
      }
      std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return std::tie(a.dist, a.prev, a.cur) < std::tie(b.dist, b.prev, b.cur);
      });
      std::vector<bool> prev_used(active.size(), false);
      std::vector<bool> cur_used(current.size(), false);
      for (const Cand& c : cands) {
        if (prev_used[c.prev] || cur_used[c.cur])
          continue;
        prev_used[c.prev] = true;
        cur_used[c.cur] = true;
        matched_track[c.cur] = active[c.prev];
      }
    }
    std::vector<std::size_t> next_active;
    for (std::size_t cidx = 0; cidx < current.size(); ++cidx) {
      std::size_t tk = matched_track[cidx];
      if (tk == static_cast<std::size_t>(-1)) {
        tracks.push_back(TrackedSeries{next_id++, {}});
        tk = tracks.size() - 1;
      }
      current[cidx].track_id = tracks[tk].track_id;
      tracks[tk].points.push_back(std::move(current[cidx]));
      next_active.push_back(tk);
    }
    active = std::move(next_active);
  }
  return tracks;
}

}  // namespace spuridium

#endif  // SPURIDIUM_EIGENSOLVE_HPP
