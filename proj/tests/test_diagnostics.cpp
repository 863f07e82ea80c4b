#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <spuridium/diagnostics.hpp>
#include <spuridium/eigensolve.hpp>
#include <spuridium/hamiltonians.hpp>

using namespace spuridium;

namespace {

Potential zero_potential() {
  Potential p;
  p.kind = PotentialKind::SquareWell;
  p.v0 = 0.0;
  p.width = 1.0;
  return p;
}

RitzPair pair_from(const EigenDecomposition& dec, std::size_t k, std::size_t iteration) {
  RitzPair p;
  p.value = dec.values[k];
  p.iteration = iteration;
  p.vector.resize(dec.vectors.rows);
  for (std::size_t i = 0; i < dec.vectors.rows; ++i)
    p.vector[i] = dec.vectors(i, k);
  return p;
}

DeltaSeries series_of(int id, std::initializer_list<double> rels) {
  DeltaSeries s;
  s.track_id = id;
  std::size_t it = 1;
  for (double r : rels) {
    DeltaRecord rec;
    rec.track_id = id;
    rec.iteration = it++;
    rec.value = static_cast<double>(id);  // spread tracks out in energy
    rec.delta = r;
    rec.delta_rel = r;
    s.records.push_back(rec);
  }
  return s;
}

Verdict verdict_of(const std::vector<Classification>& cls, int id) {
  for (const Classification& c : cls)
    if (c.track_id == id)
      return c.verdict;
  throw std::logic_error("no such track in classification output");
}

}  // namespace

TEST_CASE("delta vanishes on exact invariant subspaces", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(30, 10.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops = assemble_schrodinger(zero_potential(), spec, quad);
  const EigenDecomposition dec = eigh_dense(ops.h);
  const double h2norm = max_abs(ops.h) * max_abs(ops.h);
  for (std::size_t k = 0; k < spec.n_basis; ++k) {
    const DeltaRecord rec = delta_diagnostic(pair_from(dec, k, 30), ops);
    REQUIRE(rec.delta >= 0.0);
    REQUIRE(rec.delta <= 1e-12 * h2norm);
  }
}

TEST_CASE("delta equals the leakage quadratic form on eigenvectors", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(50, 20.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops =
      assemble_schrodinger(harmonic_oscillator(1.0, 10.0), spec, quad);
  const EigenDecomposition dec = eigh_dense(ops.h);
  const Matrix hh = matmul(ops.h, ops.h);
  const double scale = max_abs(ops.h2);
  for (std::size_t k : {std::size_t{0}, std::size_t{10}, std::size_t{30}}) {
    const RitzPair pair = pair_from(dec, k, 50);
    const DeltaRecord rec = delta_diagnostic(pair, ops);
    // independent route: v' (h2 - h h) v
    double quad_form = 0.0;
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t j = 0; j < 50; ++j)
        quad_form += pair.vector[i] * (ops.h2(i, j) - hh(i, j)) * pair.vector[j];
    REQUIRE(std::abs(rec.delta - quad_form) < 1e-10 * (1.0 + scale));
    REQUIRE(std::abs(rec.delta_rel - rec.delta / (1.0 + rec.value * rec.value)) < 1e-14);
    REQUIRE(rec.track_id == pair.track_id);
    REQUIRE(rec.iteration == 50);
  }
}

TEST_CASE("oscillator ground state delta_rel is tiny", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(200, 20.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops =
      assemble_schrodinger(harmonic_oscillator(1.0, 10.0), spec, quad);
  const EigenDecomposition dec = eigh_dense(ops.h);
  const DeltaRecord rec = delta_diagnostic(pair_from(dec, 0, 200), ops);
  REQUIRE(std::abs(rec.value - 0.5) < 1e-6);
  REQUIRE(rec.delta_rel < 1e-8);
}

TEST_CASE("bound-state delta_rel falls as the basis grows", "[diagnostics]") {
  double prev = -1.0;
  for (std::size_t n : {100, 200}) {
    const BasisSpec spec = build_sine_basis(n, 40.0);
    const QuadratureRule quad = quadrature_rule(spec);
    const OperatorPair ops = assemble_schrodinger(coulomb_radial(1.0), spec, quad);
    const EigenDecomposition dec = eigh_dense(ops.h);
    const DeltaRecord rec = delta_diagnostic(pair_from(dec, 0, n), ops);
    if (prev >= 0.0)
      REQUIRE(rec.delta_rel < prev);
    prev = rec.delta_rel;
  }
}

TEST_CASE("delta_diagnostic rejects mismatched dimensions", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(10, 10.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops = assemble_schrodinger(harmonic_oscillator(1.0, 5.0), spec, quad);
  RitzPair bad;
  bad.vector.assign(7, 0.5);
  REQUIRE_THROWS_AS(delta_diagnostic(bad, ops), std::invalid_argument);
}

TEST_CASE("delta_rel follows its definition on a hand-built operator pair", "[diagnostics]") {
  OperatorPair ops;
  ops.h = Matrix(2, 2);
  ops.h(0, 0) = 2.0;
  ops.h(1, 1) = 3.0;
  ops.h2 = Matrix(2, 2);
  ops.h2(0, 0) = 5.0;   // vs e^2 = 4: delta = 1
  ops.h2(1, 1) = 9.5;   // vs e^2 = 9: delta = 0.5
  RitzPair p;
  p.vector = {1.0, 0.0};
  const DeltaRecord r0 = delta_diagnostic(p, ops);
  REQUIRE(r0.value == 2.0);
  REQUIRE(r0.delta == 1.0);
  REQUIRE(r0.delta_rel == 0.2);
  p.vector = {0.0, 1.0};
  const DeltaRecord r1 = delta_diagnostic(p, ops);
  REQUIRE(r1.delta == 0.5);
  REQUIRE(r1.delta_rel == 0.05);
}

TEST_CASE("classifier follows the stated rules on synthetic series", "[diagnostics]") {
  SECTION("decreasing below tolerance is a genuine bound state") {
    const std::vector<DeltaSeries> tracks{series_of(0, {1e-3, 1e-5, 1e-9})};
    REQUIRE(verdict_of(classify(tracks), 0) == Verdict::GenuineBound);
  }
  SECTION("an isolated plateau is spurious") {
    // one track stuck at percent level among clean neighbors
    const std::vector<DeltaSeries> tracks{
        series_of(0, {1.1e-3, 1.0e-3, 0.9e-3}),
        series_of(1, {0.04, 0.05, 0.045}),
        series_of(2, {1.2e-3, 1.1e-3, 1.0e-3}),
    };
    const std::vector<Classification> cls = classify(tracks);
    REQUIRE(verdict_of(cls, 1) == Verdict::Spurious);
  }
  SECTION("a plateau with comparable neighbors is continuum-like") {
    const std::vector<DeltaSeries> tracks{
        series_of(0, {0.03, 0.035, 0.032}),
        series_of(1, {0.04, 0.05, 0.045}),
        series_of(2, {0.05, 0.045, 0.05}),
    };
    const std::vector<Classification> cls = classify(tracks);
    REQUIRE(verdict_of(cls, 0) == Verdict::ContinuumLike);
    REQUIRE(verdict_of(cls, 1) == Verdict::ContinuumLike);
    REQUIRE(verdict_of(cls, 2) == Verdict::ContinuumLike);
  }
  SECTION("short series stay undecided") {
    const std::vector<DeltaSeries> tracks{series_of(0, {1e-9, 1e-10})};
    REQUIRE(verdict_of(classify(tracks), 0) == Verdict::Undecided);
  }
  SECTION("decreasing but above tolerance stays undecided") {
    const std::vector<DeltaSeries> tracks{series_of(0, {1e-1, 1e-2, 1e-3})};
    REQUIRE(verdict_of(classify(tracks), 0) == Verdict::Undecided);
  }
  SECTION("increasing without isolation stays undecided") {
    const std::vector<DeltaSeries> tracks{
        series_of(0, {1e-3, 1e-2, 1e-1}),
        series_of(1, {1e-3, 1e-2, 1e-1}),
    };
    const std::vector<Classification> cls = classify(tracks);
    REQUIRE(verdict_of(cls, 0) == Verdict::Undecided);
    REQUIRE(verdict_of(cls, 1) == Verdict::Undecided);
  }
  SECTION("series resting on the numerical floor still count as decreasing") {
    const std::vector<DeltaSeries> tracks{series_of(0, {1e-3, 1e-13, 1e-13})};
    REQUIRE(verdict_of(classify(tracks), 0) == Verdict::GenuineBound);
  }
  SECTION("tiny tolerance turns every nonzero track non-genuine") {
    const std::vector<DeltaSeries> tracks{
        series_of(0, {1e-3, 1e-5, 1e-9}),
        series_of(1, {0.04, 0.05, 0.045}),
    };
    const std::vector<Classification> cls = classify(tracks, 1e-300);
    REQUIRE(verdict_of(cls, 0) != Verdict::GenuineBound);
    REQUIRE(verdict_of(cls, 1) != Verdict::GenuineBound);
  }
  SECTION("a strict plateau factor reclassifies flat series") {
    const std::vector<DeltaSeries> tracks{
        series_of(0, {1.0e-3, 1.00005e-3, 1.0001e-3}),
        series_of(1, {1.0e-3, 1.00005e-3, 1.0001e-3}),
    };
    // default factor: a plateau, shared by a neighbor, so continuum-like
    REQUIRE(verdict_of(classify(tracks), 0) == Verdict::ContinuumLike);
    // factor 1.00001: the same spread now counts as increasing
    const std::vector<Classification> strict = classify(tracks, 1e-6, 1.00001);
    for (const Classification& c : strict) {
      REQUIRE(c.trend == Trend::Increasing);
      REQUIRE(c.verdict == Verdict::Undecided);
    }
  }
  SECTION("tolerances must be positive") {
    const std::vector<DeltaSeries> tracks{series_of(0, {1e-3, 1e-5, 1e-9})};
    REQUIRE_THROWS_AS(classify(tracks, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(classify(tracks, 1e-6, -1.0), std::invalid_argument);
  }
}

TEST_CASE("forbidden fraction of the oscillator ground state matches erfc(1)", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(200, 20.0);
  const Potential pot = harmonic_oscillator(1.0, 10.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops = assemble_schrodinger(pot, spec, quad);
  const EigenDecomposition dec = eigh_dense(ops.h);
  const RitzPair ground = pair_from(dec, 0, 200);

  const double oracle = std::erfc(1.0);
  const double f6 = forbidden_fraction(ground, pot, spec, quad);
  REQUIRE(std::abs(f6 - oracle) < 5e-3);
  // the error is quadrature resolution at the turning points, so a finer
  // rule must do better
  const double f40 = forbidden_fraction(ground, pot, spec, quadrature_rule(spec, 40));
  REQUIRE(std::abs(f40 - oracle) < 2e-3);
}

TEST_CASE("free states carry no forbidden weight", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(40, 10.0);
  const Potential pot = zero_potential();
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops = assemble_schrodinger(pot, spec, quad);
  const EigenDecomposition dec = eigh_dense(ops.h);
  for (std::size_t k : {std::size_t{0}, std::size_t{20}})
    REQUIRE(forbidden_fraction(pair_from(dec, k, 40), pot, spec, quad) == 0.0);
}

TEST_CASE("deep square-well ground state has only a tunneling tail", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(120, 20.0);
  const Potential pot = square_well(5.0, 2.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops = assemble_schrodinger(pot, spec, quad);
  const EigenDecomposition dec = eigh_dense(ops.h);
  const double f = forbidden_fraction(pair_from(dec, 0, 120), pot, spec, quad);
  REQUIRE(f > 0.0);
  REQUIRE(f < 0.05);
}

TEST_CASE("forbidden fraction refuses two-component pairs", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(20, 60.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops = assemble_dirac(DiracParams{1.0, -1}, spec, quad);
  const EigenDecomposition dec = eigh_dense(ops.h);
  RitzPair p;
  p.value = dec.values[0];
  p.vector.resize(2 * spec.n_basis);
  for (std::size_t i = 0; i < p.vector.size(); ++i)
    p.vector[i] = dec.vectors(i, 0);
  REQUIRE_THROWS_AS(forbidden_fraction(p, coulomb_radial(1.0), spec, quad),
                    std::invalid_argument);
}

TEST_CASE("forbidden fraction rejects a zero reconstruction", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(10, 10.0);
  const QuadratureRule quad = quadrature_rule(spec);
  RitzPair p;
  p.value = 1.0;
  p.vector.assign(10, 0.0);
  REQUIRE_THROWS_AS(forbidden_fraction(p, harmonic_oscillator(1.0, 5.0), spec, quad),
                    std::domain_error);
}

TEST_CASE("TRK sum approaches one half", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(120, 30.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const OperatorPair ops =
      assemble_schrodinger(harmonic_oscillator(1.0, 15.0), spec, quad);
  const EigenDecomposition dec = eigh_dense(ops.h);
  const double s = trk_sum_rule(dec, spec, quad);
  REQUIRE(std::abs(s - 0.5) < 1e-5);
}

TEST_CASE("TRK truncation error shrinks with basis size", "[diagnostics]") {
  const Potential pot = harmonic_oscillator(1.0, 10.0);
  double dev5 = 0.0, dev120 = 0.0;
  {
    const BasisSpec spec = build_sine_basis(5, 20.0);
    const QuadratureRule quad = quadrature_rule(spec);
    const EigenDecomposition dec = eigh_dense(assemble_schrodinger(pot, spec, quad).h);
    dev5 = std::abs(trk_sum_rule(dec, spec, quad) - 0.5);
  }
  {
    const BasisSpec spec = build_sine_basis(120, 20.0);
    const QuadratureRule quad = quadrature_rule(spec);
    const EigenDecomposition dec = eigh_dense(assemble_schrodinger(pot, spec, quad).h);
    dev120 = std::abs(trk_sum_rule(dec, spec, quad) - 0.5);
  }
  REQUIRE(dev5 > 10.0 * dev120);
}

TEST_CASE("TRK edge cases", "[diagnostics]") {
  const BasisSpec spec = build_sine_basis(1, 20.0);
  const QuadratureRule quad = quadrature_rule(spec);
  const EigenDecomposition dec =
      eigh_dense(assemble_schrodinger(harmonic_oscillator(1.0, 10.0), spec, quad).h);
  REQUIRE(trk_sum_rule(dec, spec, quad) == 0.0);
  REQUIRE_THROWS_AS(trk_sum_rule(dec, spec, quad, 5), std::invalid_argument);
}
