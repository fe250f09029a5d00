#include <gtest/gtest.h>

#include <random>

#include "framelab/corpus.hpp"
#include "framelab/erasure.hpp"
#include "framelab/frame.hpp"
#include "framelab/graph.hpp"
#include "test_support.hpp"

using namespace framelab;
using namespace framelab::testing;

namespace {

Graph spec(const std::string& s) { return parse_generator_spec(s); }

ErasureSet lambda1(std::vector<std::size_t> one_based, std::size_t n) {
  for (auto& i : one_based) --i;
  return ErasureSet(std::move(one_based), n);
}

std::vector<std::pair<double, std::size_t>> entries(const PredictedSpectrum& p) {
  std::vector<std::pair<double, std::size_t>> out;
  for (const auto& e : p.entries) out.emplace_back(e.value, e.multiplicity);
  return out;
}

void expect_entries(const PredictedSpectrum& p, const std::vector<std::pair<double, std::size_t>>& want) {
  const auto got = entries(p);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].first, want[i].first, 1e-14);
    EXPECT_EQ(got[i].second, want[i].second);
  }
}

}  // namespace

TEST(ErasureSetType, Validation) {
  EXPECT_THROW(ErasureSet({}, 3), InputError);
  EXPECT_THROW(ErasureSet({1, 1}, 3), InputError);
  EXPECT_THROW(ErasureSet({3}, 3), InputError);
  EXPECT_EQ(ErasureSet({2, 0}, 3).indices(), (std::vector<std::size_t>{0, 2}));
}

TEST(ErrorOperator, FullSetIsIdentity) {
  const Frame f = build_frame_global(spec("cycle:5"));
  EXPECT_LT(max_abs_diff(error_operator(f, canonical_dual(f), ErasureSet({0, 1, 2, 3, 4}, 5)), Matrix::identity(4)),
            1e-10);
}

TEST(ErrorOperator, SingletonIsRankOneWithTrace) {
  const Frame f = build_frame_global(spec("star:5"));
  for (std::size_t i = 0; i < 5; ++i) {
    const Matrix e = error_operator(f, canonical_dual(f), ErasureSet({i}, 5));
    EXPECT_EQ(rank(e, 1e-9), 1u);
    EXPECT_NEAR(trace(e), 1.0 - 1.0 / 5.0, 1e-12);
  }
}

TEST(ErrorOperator, P2SingleErasure) {
  const Frame f = build_frame_global(spec("path:2"));
  const Matrix e = error_operator(f, canonical_dual(f), ErasureSet({0}, 2));
  ASSERT_EQ(e.rows(), 1u);
  EXPECT_NEAR(e(0, 0), 0.5, 1e-12);
}

TEST(ErrorOperator, LinearityWitness) {
  std::mt19937_64 rng(6);
  const Frame f = build_frame_blockwise(spec("union:complete:3,star:4"));
  const DualFrame d = alternate_dual(f);
  for (const auto& s : detail::all_subsets(f.size(), 3)) {
    const Matrix e = error_operator(f, d, ErasureSet(s, f.size()));
    const Vector x = random_matrix(f.dim(), 1, rng).column(0);
    Vector sum(f.dim(), 0.0);
    for (auto i : s) sum = axpy(dot(x, f.vector(i)), d.vector(i), sum);
    EXPECT_LT(norm_inf(axpy(-1.0, sum, e * x)), 1e-9);
  }
}

TEST(ErrorOperator, ComplementIdentity) {
  const Frame f = build_frame_global(spec("path:5"));
  const DualFrame d = canonical_dual(f);
  for (std::size_t r = 1; r < 5; ++r)
    for (const auto& s : detail::all_subsets(5, r)) {
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < 5; ++i)
        if (std::find(s.begin(), s.end(), i) == s.end()) rest.push_back(i);
      const Matrix sum = error_operator(f, d, ErasureSet(s, 5)) + error_operator(f, d, ErasureSet(rest, 5));
      EXPECT_LT(max_abs_diff(sum, Matrix::identity(4)), 1e-9);
    }
}

TEST(ErrorOperator, RankBounds) {
  const Frame f = build_frame_global(spec("cycle:6"));
  const DualFrame d = canonical_dual(f);
  for (std::size_t r = 1; r <= 6; ++r)
    for (const auto& s : detail::all_subsets(6, r)) {
      const std::size_t rk = rank(error_operator(f, d, ErasureSet(s, 6)), 1e-9);
      EXPECT_EQ(rk, r < 6 ? r : 5u);
    }
  const Frame b = build_frame_blockwise(spec("union:path:3,path:3"));
  const DualFrame alt = alternate_dual(b);
  for (std::size_t r = 1; r <= 6; ++r)
    for (const auto& s : detail::all_subsets(6, r)) EXPECT_LE(rank(error_operator(b, alt, ErasureSet(s, 6)), 1e-9), r);
}

TEST(ErrorOperator, WitnessEigenvectors) {
  for (const char* g : {"path:6", "complete:5", "star:6", "cycle:7"}) {
    const Frame f = build_frame_global(spec(g));
    const DualFrame d = canonical_dual(f);
    const std::size_t n = f.size();
    for (std::size_t r = 2; r <= n; ++r)
      for (const auto& s : detail::all_subsets(n, r)) {
        const Matrix e = error_operator(f, d, ErasureSet(s, n));
        for (std::size_t i = 1; i < r; ++i) {
          const Vector v = axpy(-1.0, d.vector(s[i]), d.vector(s[0]));
          EXPECT_LT(norm_inf(axpy(-1.0, v, e * v)), 1e-8) << g;
        }
        if (r < n) {
          Vector w(f.dim(), 0.0);
          for (auto i : s) w = axpy(1.0, d.vector(i), w);
          const double mu = 1.0 - static_cast<double>(r) / static_cast<double>(n);
          EXPECT_LT(norm_inf(axpy(-mu, w, e * w)), 1e-8) << g;
        }
      }
  }
}

TEST(Rho, ConnectedProfile) {
  for (const char* g : {"path:4", "cycle:6", "complete:5", "star:7"}) {
    const Frame f = build_frame_global(spec(g));
    const DualFrame d = canonical_dual(f);
    const double n = static_cast<double>(f.size());
    EXPECT_NEAR(rho_r(f, d, 1).rho, 1.0 - 1.0 / n, 1e-9) << g;
    for (std::size_t r = 2; r < f.size(); ++r) EXPECT_NEAR(rho_r(f, d, r).rho, 1.0, 1e-8) << g;
  }
}

TEST(Rho, DisconnectedCanonicalReachesOne) {
  const Frame f = build_frame_blockwise(spec("union:path:3,complete:3"));
  const DualFrame d = canonical_dual(f);
  for (std::size_t r = 2; r < 6; ++r) EXPECT_NEAR(rho_r(f, d, r).rho, 1.0, 1e-8);
}

TEST(Rho, ArgmaxIsLexicographicallySmallest) {
  const Frame f = build_frame_global(spec("complete:4"));
  const auto v = rho_r(f, canonical_dual(f), 2);
  EXPECT_EQ(v.argmax.indices(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(v.r, 2u);
}

TEST(Rho, DiagonalFormulaMatchesEnumeration) {
  const Frame f = build_frame_global(spec("cycle:5"));
  std::vector<Vector> off{{0.3, -0.2, 0.1, 0.5}};
  const DualFrame d = dual_from_offsets(f, off);
  EXPECT_NEAR(rho_one_by_diagonal(f, d.vectors), rho_r(f, d, 1).rho, 1e-12);
}

TEST(Rho, RangeAndCap) {
  const Frame f = build_frame_global(spec("path:4"));
  EXPECT_THROW(rho_r(f, canonical_dual(f), 0), InputError);
  EXPECT_THROW(rho_r(f, canonical_dual(f), 5), InputError);
  EXPECT_NO_THROW(rho_r(f, canonical_dual(f), 4));
  const Frame big = build_frame_global(spec("path:17"));
  EXPECT_THROW(rho_r(big, canonical_dual(big), 1), ScaleCapError);
}

TEST(Rho, ThreadCountDoesNotChangeResult) {
  const Frame f = build_frame_global(spec("cycle:12"));
  const DualFrame d = dual_from_offsets(f, {Vector(f.dim(), 0.25)});
  setenv("FRAMELAB_THREADS", "1", 1);
  const auto a = rho_r(f, d, 4);
  setenv("FRAMELAB_THREADS", "4", 1);
  const auto b = rho_r(f, d, 4);
  unsetenv("FRAMELAB_THREADS");
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.argmax, b.argmax);
}

TEST(PredictedConnected, Examples) {
  expect_entries(predicted_spectrum_connected(4, 2), {{1.0, 1}, {0.5, 1}, {0.0, 1}});
  expect_entries(predicted_spectrum_connected(5, 5), {{1.0, 4}});
  expect_entries(predicted_spectrum_connected(3, 2), {{1.0, 1}, {1.0 / 3.0, 1}});
  EXPECT_THROW(predicted_spectrum_connected(4, 1), InputError);
  EXPECT_THROW(predicted_spectrum_connected(4, 5), InputError);
}

TEST(PredictedDisconnected, Examples) {
  const auto a = predicted_spectrum_disconnected(spec("union:path:2,path:2"), lambda1({1, 2}, 4));
  expect_entries(a, {{1.0, 1}, {0.0, 1}});
  ASSERT_EQ(a.classification.size(), 1u);
  EXPECT_EQ(a.classification[0].cls, ErasureClass::whole_component);

  const auto b = predicted_spectrum_disconnected(spec("union:path:2,complete:3"), lambda1({1, 3}, 5));
  expect_entries(b, {{2.0 / 3.0, 1}, {0.5, 1}, {0.0, 1}});
  EXPECT_EQ(b.classification[0].cls, ErasureClass::single_of_many);
  EXPECT_EQ(b.classification[1].cls, ErasureClass::single_of_many);

  const auto c = predicted_spectrum_disconnected(spec("union:complete:3,complete:3"), lambda1({1, 2, 4, 5}, 6));
  expect_entries(c, {{1.0, 2}, {1.0 / 3.0, 2}});
  EXPECT_EQ(c.classification[0].cls, ErasureClass::partial);
}

TEST(PredictedDisconnected, IsolatedVertexContributesNothing) {
  const Graph g = spec("union:path:3,empty:1");
  const auto p = predicted_spectrum_disconnected(g, lambda1({4}, 4));
  expect_entries(p, {{0.0, 2}});
  EXPECT_EQ(p.classification[0].cls, ErasureClass::single_isolated);
}

TEST(PredictedDisconnected, ConnectedReducesToFormula) {
  const Graph g = spec("cycle:6");
  for (std::size_t r = 2; r < 6; ++r) {
    std::vector<std::size_t> s(r);
    std::iota(s.begin(), s.end(), 0);
    EXPECT_EQ(predicted_spectrum_disconnected(g, ErasureSet(s, 6)).expanded(), predicted_spectrum_connected(6, r).expanded());
  }
}

TEST(PredictedDisconnected, MultiplicitiesFillDimension) {
  const Graph g = spec("union:path:2,path:2,complete:3");
  for (std::size_t r = 1; r <= 7; ++r)
    for (const auto& s : detail::all_subsets(7, r))
      EXPECT_EQ(predicted_spectrum_disconnected(g, ErasureSet(s, 7)).total_multiplicity(), 4u);
}

TEST(SpectrumMatch, DistanceConventions) {
  EXPECT_EQ(spectrum_distance(as_complex({1, 2}), as_complex({1})), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(spectrum_distance(as_complex({2, 1}), as_complex({1, 2 + 1e-9})), 1e-9, 1e-15);
}

TEST(CheckSpectrum, K3PairsMatch) {
  const Frame f = build_frame_global(spec("complete:3"));
  for (const auto& s : detail::all_subsets(3, 2)) {
    const auto rep = check_spectrum(f, canonical_dual(f), ErasureSet(s, 3));
    ASSERT_TRUE(rep.prediction_match.has_value());
    EXPECT_TRUE(*rep.prediction_match);
    EXPECT_LT(spectrum_distance(rep.spectrum.values, as_complex({1.0, 1.0 / 3.0})), 1e-7);
    EXPECT_EQ(rep.radius, rep.spectrum.radius);
  }
}

TEST(CheckSpectrum, AlternateDualOmitsPrediction) {
  const Frame f = build_frame_blockwise(spec("union:path:2,path:2"));
  const auto rep = check_spectrum(f, alternate_dual(f), ErasureSet({0, 2}, 4));
  EXPECT_FALSE(rep.predicted.has_value());
  EXPECT_FALSE(rep.prediction_match.has_value());
}

TEST(CheckSpectrum, GlobalFrameOfDisconnectedGraphHasNoPrediction) {
  const Frame f = build_frame_global(spec("union:path:2,path:3"));
  EXPECT_FALSE(check_spectrum(f, canonical_dual(f), ErasureSet({0, 2}, 5)).predicted.has_value());
}

class CorpusSpectra : public ::testing::TestWithParam<std::size_t> {};

TEST_P(CorpusSpectra, EveryErasureMatchesPrediction) {
  const auto entry = builtin_corpus()[GetParam()];
  const Frame f = build_frame_auto(entry.graph);
  const DualFrame d = canonical_dual(f);
  const std::size_t n = f.size();
  for (std::size_t r = 2; r < n; ++r)
    for (const auto& s : detail::all_subsets(n, r)) {
      const auto rep = check_spectrum(f, d, ErasureSet(s, n));
      ASSERT_TRUE(rep.prediction_match.has_value());
      EXPECT_TRUE(*rep.prediction_match) << entry.label << " r = " << r;
    }
}

TEST_P(CorpusSpectra, RhoInvariantUnderTransport) {
  const auto entry = builtin_corpus()[GetParam()];
  const Frame f = build_frame_auto(entry.graph);
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const auto res = verify_rho_invariance(f, random_orthogonal(f.dim(), seed), 3);
    EXPECT_TRUE(res.passed) << entry.label << " deviation " << res.max_deviation;
  }
}

INSTANTIATE_TEST_SUITE_P(Builtin, CorpusSpectra, ::testing::Range<std::size_t>(0, builtin_corpus().size()));

TEST(Invariance, IdentityTransport) {
  const Frame f = build_frame_global(spec("path:5"));
  const auto res = verify_rho_invariance(f, UnitaryMatrix{Matrix::identity(f.dim())}, 4);
  EXPECT_TRUE(res.passed);
  EXPECT_EQ(res.max_deviation, 0.0);
  EXPECT_EQ(res.rho_pairs.size(), 4u);
}

TEST(Uniqueness, PathWithSeed) {
  const auto rep = verify_uniqueness_connected(spec("path:3"), 2, 50, 7);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.duals_checked, 150u);
  EXPECT_NEAR(rep.baseline_rho1, 2.0 / 3.0, 1e-12);
  EXPECT_GT(rep.min_rho1_excess, 1e-9);
  EXPECT_GE(rep.min_rho_r, 1.0 - 1e-8);
  EXPECT_LT(rep.max_witness_residual, 1e-7);
}

TEST(Uniqueness, Preconditions) {
  EXPECT_THROW(verify_uniqueness_connected(spec("union:path:2,path:2"), 1, 1, 0), InputError);
  EXPECT_THROW(verify_uniqueness_connected(spec("path:4"), 4, 1, 0), InputError);
}

TEST(Nonuniqueness, P2P2) {
  const auto rep = verify_nonuniqueness_disconnected(spec("union:path:2,path:2"), 3);
  EXPECT_TRUE(rep.passed);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_NEAR(rep.rows[0].rho_alternate, rep.rows[0].rho_canonical, 1e-12);
  EXPECT_LT(rep.max_charpoly_gap, 1e-7);
}

TEST(Nonuniqueness, CharpolyEqualForEveryErasure) {
  const Graph g = spec("union:complete:3,star:4");
  const Frame f = build_frame_blockwise(g);
  const DualFrame c = canonical_dual(f), a = alternate_dual(f);
  for (std::size_t r = 1; r < 7; ++r)
    for (const auto& s : detail::all_subsets(7, r)) {
      const ErasureSet e(s, 7);
      EXPECT_LT(max_coeff_gap(characteristic_polynomial(error_operator(f, c, e)),
                              characteristic_polynomial(error_operator(f, a, e))),
                1e-9);
    }
}

TEST(Nonuniqueness, Preconditions) {
  EXPECT_THROW(verify_nonuniqueness_disconnected(spec("path:4"), 2), InputError);
  EXPECT_THROW(verify_nonuniqueness_disconnected(spec("empty:3"), 2), InputError);
}

TEST(Search, ConnectedCanonicalIsUnique) {
  const Frame f = build_frame_global(spec("star:4"));
  const auto rep = sod_search(f, 2, SearchConfig{200, 1, default_perturbation_scales()});
  EXPECT_TRUE(rep.canonical_optimal);
  EXPECT_TRUE(rep.canonical_unique);
  EXPECT_EQ(rep.levels[0].survivors, (std::vector<std::string>{"canonical"}));
  EXPECT_EQ(rep.candidates, 201u);
}

TEST(Search, DisconnectedHasTies) {
  const Frame f = build_frame_blockwise(spec("union:complete:3,path:2"));
  const auto rep = sod_search(f, 3, SearchConfig{200, 0, default_perturbation_scales()});
  EXPECT_TRUE(rep.canonical_optimal);
  EXPECT_GE(rep.optimal.size(), 2u);
  EXPECT_NE(std::find(rep.optimal.begin(), rep.optimal.end(), "alternate"), rep.optimal.end());
}

TEST(Search, ZeroSamplesIsBaseline) {
  const Frame f = build_frame_blockwise(spec("union:complete:3,path:2"));
  const auto rep = sod_search(f, 2, SearchConfig{0, 0, {}});
  EXPECT_EQ(rep.candidates, 1u);
  EXPECT_EQ(rep.optimal, (std::vector<std::string>{"canonical"}));
}

TEST(Search, CapAndRange) {
  EXPECT_THROW(sod_search(build_frame_global(spec("path:13")), 1, {}), ScaleCapError);
  EXPECT_THROW(sod_search(build_frame_global(spec("path:4")), 4, {}), InputError);
}
