#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/frame.hpp"
#include "framelab/graph.hpp"
#include "framelab/linalg.hpp"
#include "framelab/matrix.hpp"
#include "framelab/parallel.hpp"

namespace framelab {

inline constexpr std::size_t kRhoEnumerationCap = 16;
inline constexpr std::size_t kSearchEnumerationCap = 12;
inline constexpr double kSpectrumMatchTol = 1e-7;

/// Sorted set of erased frame indices (0-based), non-empty.
class ErasureSet {
 public:
  ErasureSet() = default;
  /// Throws InputError when the set is empty, repeats an index, or an index
  /// is not below n.
  ErasureSet(std::vector<std::size_t> indices, std::size_t n) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (indices_.empty()) throw InputError("erasure set must be non-empty");
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
      throw InputError("erasure set repeats an index");
    if (indices_.back() >= n) throw InputError("erasure index out of range");
  }

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }

  friend bool operator==(const ErasureSet&, const ErasureSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// E_Λ = Σ_{i∈Λ} ψ_i φ_iᵀ.
inline Matrix error_operator(const Frame& f, const Matrix& dual_vectors, const ErasureSet& e) {
  const std::size_t k = f.dim();
  Matrix out(k, k);
  for (std::size_t i : e.indices()) {
    if (i >= f.size()) throw InputError("erasure index out of range");
    for (std::size_t a = 0; a < k; ++a) {
      const double psi = dual_vectors(a, i);
      if (psi == 0.0) continue;
      for (std::size_t b = 0; b < k; ++b) out(a, b) += psi * f.synthesis()(b, i);
    }
  }
  return out;
}

inline Matrix error_operator(const Frame& f, const DualFrame& d, const ErasureSet& e) {
  return error_operator(f, d.vectors, e);
}

struct RhoValue {
  std::size_t r = 0;
  double rho = 0.0;
  ErasureSet argmax;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t r) {
  std::vector<std::vector<std::size_t>> out;
  for_each_subset(n, r, [&](const std::vector<std::size_t>& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

}  // namespace detail

/// ρ^(r): the largest spectral radius of E_Λ over all |Λ| = r, found by
/// exhaustive enumeration. Radii within 1e-12 of the maximum count as tied
/// and the lexicographically smallest Λ among them is reported.
inline RhoValue rho_r(const Frame& f, const Matrix& dual_vectors, std::size_t r) {
  const std::size_t n = f.size();
  if (n > kRhoEnumerationCap)
    throw ScaleCapError("rho enumeration is capped at n = " + std::to_string(kRhoEnumerationCap));
  if (r < 1 || r > n) throw InputError("r must lie in [1, " + std::to_string(n) + "]");
  const auto subsets = detail::all_subsets(n, r);
  const auto radii = parallel_map<double>(subsets.size(), [&](std::size_t i) {
    return spectral_radius(error_operator(f, dual_vectors, ErasureSet(subsets[i], n)));
  });
  const double best = *std::max_element(radii.begin(), radii.end());
  std::size_t arg = 0;
  while (radii[arg] < best - 1e-12) ++arg;
  return {r, best, ErasureSet(subsets[arg], n)};
}

inline RhoValue rho_r(const Frame& f, const DualFrame& d, std::size_t r) { return rho_r(f, d.vectors, r); }

/// ρ^(1) through the diagonal shortcut max_i |⟨ψ_i, φ_i⟩|, used as a cheap
/// cross-check of the enumerated value.
inline double rho_one_by_diagonal(const Frame& f, const Matrix& dual_vectors) {
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0.0;
    for (std::size_t a = 0; a < f.dim(); ++a) s += dual_vectors(a, i) * f.synthesis()(a, i);
    best = std::max(best, std::abs(s));
  }
  return best;
}

struct RhoProfile {
  std::vector<RhoValue> rows;
};

inline RhoProfile rho_profile(const Frame& f, const DualFrame& d, std::size_t r_lo, std::size_t r_hi) {
  RhoProfile p;
  for (std::size_t r = r_lo; r <= r_hi; ++r) p.rows.push_back(rho_r(f, d, r));
  return p;
}

// ---------------------------------------------------------------------------
// Predicted spectra

enum class ErasureClass { single_of_many, single_isolated, whole_component, partial };

inline std::string to_string(ErasureClass c) {
  switch (c) {
    case ErasureClass::single_of_many: return "L0";
    case ErasureClass::single_isolated: return "L1";
    case ErasureClass::whole_component: return "L2";
    case ErasureClass::partial: return "L3";
  }
  return "?";
}

/// How an erasure set meets one component: m of its n_l vertices erased.
struct ComponentErasure {
  std::size_t component = 0;
  std::size_t erased = 0;
  std::size_t size = 0;
  ErasureClass cls = ErasureClass::single_of_many;
};

struct SpectrumEntry {
  double value = 0.0;
  std::size_t multiplicity = 0;
};

struct PredictedSpectrum {
  std::vector<SpectrumEntry> entries;          // descending by value
  std::vector<ComponentErasure> classification;  // touched components only

  std::size_t total_multiplicity() const {
    std::size_t s = 0;
    for (const auto& e : entries) s += e.multiplicity;
    return s;
  }
  /// Ascending list with every value repeated by its multiplicity.
  std::vector<double> expanded() const {
    std::vector<double> out;
    for (const auto& e : entries) out.insert(out.end(), e.multiplicity, e.value);
    std::sort(out.begin(), out.end());
    return out;
  }
};

namespace detail {

inline void add_entry(std::vector<SpectrumEntry>& entries, double value, std::size_t mult) {
  if (mult == 0) return;
  for (auto& e : entries)
    if (std::abs(e.value - value) < 1e-12) {
      e.multiplicity += mult;
      return;
    }
  entries.push_back({value, mult});
}

inline void sort_entries(std::vector<SpectrumEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
}

}  // namespace detail

/// Spectrum of the canonical-dual error operator of a connected graph's
/// frame when r ≥ 2 vertices are erased: 1 (r−1 times), 1 − r/n, and zeros
/// up to dimension n − 1; for r = n, 1 with multiplicity n − 1.
inline PredictedSpectrum predicted_spectrum_connected(std::size_t n, std::size_t r) {
  if (r < 2) throw InputError("connected spectrum prediction needs r >= 2");
  if (r > n) throw InputError("r exceeds the vertex count");
  const std::size_t k = n - 1;
  PredictedSpectrum p;
  if (r < n) {
    detail::add_entry(p.entries, 1.0, r - 1);
    detail::add_entry(p.entries, 1.0 - static_cast<double>(r) / static_cast<double>(n), 1);
    detail::add_entry(p.entries, 0.0, k - r);
  } else {
    detail::add_entry(p.entries, 1.0, n - 1);
  }
  detail::sort_entries(p.entries);
  p.classification.push_back(
      {0, r, n, r == n ? ErasureClass::whole_component : (r == 1 ? ErasureClass::single_of_many : ErasureClass::partial)});
  return p;
}

/// Spectrum of the canonical-dual error operator for the blockwise frame of
/// an arbitrary graph. Each component touched by Λ, with m of its n_l
/// vertices erased, contributes
///   m = 1 < n_l      : 1 − 1/n_l
///   m = 1 = n_l      : nothing (zero column)
///   m = n_l > 1      : 1 with multiplicity n_l − 1
///   1 < m < n_l      : 1 − m/n_l, and 1 with multiplicity m − 1
/// and the rest of the n − c dimensions are zeros.
inline PredictedSpectrum predicted_spectrum_disconnected(const Graph& g, const ErasureSet& e) {
  if (e.indices().back() >= g.vertex_count()) throw InputError("erasure index out of range");
  std::vector<std::size_t> erased(g.component_count(), 0);
  for (std::size_t v : e.indices()) ++erased[g.component_of(v)];
  PredictedSpectrum p;
  std::size_t nonzero = 0;
  for (std::size_t c = 0; c < g.component_count(); ++c) {
    const std::size_t m = erased[c];
    if (m == 0) continue;
    const std::size_t nl = g.components()[c].size();
    const double ratio = static_cast<double>(m) / static_cast<double>(nl);
    ComponentErasure ce{c, m, nl, ErasureClass::partial};
    if (m == 1 && nl > 1) {
      ce.cls = ErasureClass::single_of_many;
      detail::add_entry(p.entries, 1.0 - ratio, 1);
      nonzero += 1;
    } else if (m == 1) {
      ce.cls = ErasureClass::single_isolated;
    } else if (m == nl) {
      ce.cls = ErasureClass::whole_component;
      detail::add_entry(p.entries, 1.0, m - 1);
      nonzero += m - 1;
    } else {
      detail::add_entry(p.entries, 1.0 - ratio, 1);
      detail::add_entry(p.entries, 1.0, m - 1);
      nonzero += m;
    }
    p.classification.push_back(ce);
  }
  const std::size_t k = g.vertex_count() - g.component_count();
  if (nonzero > k) throw NumericalError("predicted spectrum exceeds the frame dimension");
  detail::add_entry(p.entries, 0.0, k - nonzero);
  detail::sort_entries(p.entries);
  return p;
}

/// Multiset comparison: both sides sorted by (real, imaginary) and paired in
/// order; every pair must agree within tol. Returns the worst pair distance,
/// or +inf when the sizes differ.
inline double spectrum_distance(std::vector<Complex> computed, std::vector<Complex> expected) {
  if (computed.size() != expected.size()) return std::numeric_limits<double>::infinity();
  auto by_parts = [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  };
  std::sort(computed.begin(), computed.end(), by_parts);
  std::sort(expected.begin(), expected.end(), by_parts);
  double worst = 0.0;
  for (std::size_t i = 0; i < computed.size(); ++i) worst = std::max(worst, std::abs(computed[i] - expected[i]));
  return worst;
}

inline bool spectra_match(const std::vector<Complex>& computed, const PredictedSpectrum& p,
                          double tol = kSpectrumMatchTol) {
  const auto values = p.expanded();
  return spectrum_distance(computed, std::vector<Complex>(values.begin(), values.end())) <= tol;
}

struct ErasureReport {
  ErasureSet erasure;
  Matrix op;
  ComplexSpectrum spectrum;
  double radius = 0.0;
  std::optional<PredictedSpectrum> predicted;
  std::optional<bool> prediction_match;
};

/// Whether a closed-form spectrum is claimed for this frame: graph frames of
/// connected graphs in any construction; disconnected graphs only for the
/// blockwise construction.
inline bool prediction_applies(const Frame& f) {
  if (!f.source_graph()) return false;
  return f.source_graph()->connected() || f.construction() == Construction::block_per_component;
}

inline std::optional<PredictedSpectrum> predicted_spectrum(const Frame& f, const ErasureSet& e) {
  if (!prediction_applies(f)) return std::nullopt;
  const Graph& g = *f.source_graph();
  if (g.connected() && e.size() >= 2) return predicted_spectrum_connected(g.vertex_count(), e.size());
  return predicted_spectrum_disconnected(g, e);
}

/// Error operator, its spectrum, and for canonical duals the predicted
/// spectrum with a match flag.
inline ErasureReport check_spectrum(const Frame& f, const DualFrame& d, const ErasureSet& e,
                                    double tol = kSpectrumMatchTol) {
  ErasureReport rep;
  rep.erasure = e;
  rep.op = error_operator(f, d, e);
  rep.spectrum = general_eigenvalues(rep.op);
  rep.radius = rep.spectrum.radius;
  if (d.canonical()) {
    rep.predicted = predicted_spectrum(f, e);
    if (rep.predicted) rep.prediction_match = spectra_match(rep.spectrum.values, *rep.predicted, tol);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Property verification

struct InvarianceResult {
  bool passed = true;
  double max_deviation = 0.0;
  std::vector<std::pair<double, double>> rho_pairs;  // (original, transported) per r
};

/// ρ^(r) of the canonical dual is unchanged by an orthogonal transport, for
/// r = 1..r_max (clamped to n − 1), within 1e-7.
inline InvarianceResult verify_rho_invariance(const Frame& f, const UnitaryMatrix& u, std::size_t r_max) {
  const Frame moved = apply_unitary(f, u);
  const auto d0 = canonical_dual(f);
  const auto d1 = canonical_dual(moved);
  InvarianceResult res;
  const std::size_t top = std::min(r_max, f.size() - 1);
  for (std::size_t r = 1; r <= top; ++r) {
    const double a = rho_r(f, d0, r).rho, b = rho_r(moved, d1, r).rho;
    res.rho_pairs.emplace_back(a, b);
    res.max_deviation = std::max(res.max_deviation, std::abs(a - b));
  }
  res.passed = res.max_deviation < 1e-7;
  return res;
}

inline const std::vector<double>& default_perturbation_scales() {
  static const std::vector<double> scales{1e-3, 1.0, 1e3};
  return scales;
}

struct UniquenessViolation {
  std::size_t trial = 0;
  double scale = 0.0;
  std::size_t r = 0;
  std::string what;
  double value = 0.0;
};

struct UniquenessReport {
  std::size_t n = 0;
  std::size_t r = 0;
  double baseline_rho1 = 0.0;            // canonical ρ^(1)
  double min_rho1_excess = 0.0;          // min over perturbations of ρ^(1) − (1 − 1/n)
  double min_rho_r = 0.0;                // min over perturbations and r' ≥ 2 of ρ^(r')
  double max_witness_residual = 0.0;     // max ‖E v − v‖∞ / max(1, ‖v‖∞)
  std::size_t duals_checked = 0;
  std::vector<UniquenessViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Perturbs the canonical dual of a connected graph's frame by seeded
/// nonzero offsets at several scales and checks that each perturbed dual
/// loses at r = 1 (ρ^(1) > 1 − 1/n) while still reaching ρ^(r') = 1 for
/// 2 ≤ r' ≤ r, the latter witnessed by E(ψ_p − ψ_q) = ψ_p − ψ_q.
inline UniquenessReport verify_uniqueness_connected(const Graph& g, std::size_t r, std::size_t trials,
                                                    std::uint64_t seed,
                                                    const std::vector<double>& scales = default_perturbation_scales()) {
  if (!g.connected()) throw InputError("uniqueness check needs a connected graph");
  const std::size_t n = g.vertex_count();
  if (n < 2) throw InputError("uniqueness check needs n >= 2");
  if (r < 1 || r > n - 1) throw InputError("r must lie in [1, n-1]");
  const Frame f = build_frame_global(g);
  const double floor1 = 1.0 - 1.0 / static_cast<double>(n);

  UniquenessReport rep;
  rep.n = n;
  rep.r = r;
  rep.baseline_rho1 = rho_r(f, canonical_dual(f), 1).rho;
  if (std::abs(rep.baseline_rho1 - floor1) > 1e-9)
    rep.violations.push_back({0, 0.0, 1, "canonical rho1 differs from 1 - 1/n", rep.baseline_rho1});
  rep.min_rho1_excess = std::numeric_limits<double>::infinity();
  rep.min_rho_r = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    Vector nu(f.dim());
    do {
      for (auto& x : nu) x = normal(rng);
    } while (norm_inf(nu) == 0.0);
    for (double scale : scales) {
      Vector offset = nu;
      for (auto& x : offset) x *= scale;
      const DualFrame d = dual_from_offsets(f, {offset});
      ++rep.duals_checked;
      const double rho1 = rho_r(f, d, 1).rho;
      rep.min_rho1_excess = std::min(rep.min_rho1_excess, rho1 - floor1);
      if (!(rho1 > floor1 + 1e-9)) rep.violations.push_back({t, scale, 1, "rho1 not above 1 - 1/n", rho1});
      for (std::size_t rr = 2; rr <= r; ++rr) {
        const double rho = rho_r(f, d, rr).rho;
        rep.min_rho_r = std::min(rep.min_rho_r, rho);
        if (rho < 1.0 - 1e-8) rep.violations.push_back({t, scale, rr, "rho below 1", rho});
        // Λ = {0..rr-1} holds p = 0 and q = 1.
        std::vector<std::size_t> lambda(rr);
        for (std::size_t i = 0; i < rr; ++i) lambda[i] = i;
        const Matrix e = error_operator(f, d, ErasureSet(lambda, n));
        const Vector v = axpy(-1.0, d.vector(1), d.vector(0));
        const Vector ev = e * v;
        const double resid = norm_inf(axpy(-1.0, v, ev)) / std::max(1.0, norm_inf(v));
        rep.max_witness_residual = std::max(rep.max_witness_residual, resid);
        if (resid > 1e-7) rep.violations.push_back({t, scale, rr, "witness psi_p - psi_q is not fixed by E", resid});
      }
    }
  }
  if (rep.duals_checked == 0) rep.min_rho1_excess = 0.0;
  if (rep.min_rho_r == std::numeric_limits<double>::infinity()) rep.min_rho_r = 1.0;
  return rep;
}

struct NonuniquenessRow {
  std::size_t r = 0;
  double rho_canonical = 0.0;
  double rho_alternate = 0.0;
};

struct NonuniquenessReport {
  std::size_t alternate_component = 0;
  Vector alternate_offset;
  std::vector<NonuniquenessRow> rows;
  double max_rho_gap = 0.0;
  double max_charpoly_gap = 0.0;  // over every Λ of every checked size
  bool passed = false;
};

/// Builds the blockwise frame of a disconnected graph and its alternate dual
/// (an offset orthogonal to the first non-null component), then checks that
/// the alternate ties the canonical ρ^(r') for r' = 1..min(r, n−1) and that
/// both error operators share their characteristic polynomial for every Λ.
inline NonuniquenessReport verify_nonuniqueness_disconnected(const Graph& g, std::size_t r) {
  if (g.connected()) throw InputError("non-uniqueness check needs a disconnected graph");
  if (g.edge_count() == 0) throw InputError("graph has no edges");
  const Frame f = build_frame_blockwise(g);
  const DualFrame canon = canonical_dual(f);
  const DualFrame alt = alternate_dual(f);
  const std::size_t n = g.vertex_count();
  if (n > kRhoEnumerationCap)
    throw ScaleCapError("rho enumeration is capped at n = " + std::to_string(kRhoEnumerationCap));

  NonuniquenessReport rep;
  rep.alternate_component = alternate_component(g);
  rep.alternate_offset = alt.offsets[rep.alternate_component];
  const std::size_t top = std::min(r, n - 1);
  for (std::size_t rr = 1; rr <= top; ++rr) {
    const double a = rho_r(f, canon, rr).rho, b = rho_r(f, alt, rr).rho;
    rep.rows.push_back({rr, a, b});
    rep.max_rho_gap = std::max(rep.max_rho_gap, std::abs(a - b));
    const auto subsets = detail::all_subsets(n, rr);
    const auto gaps = parallel_map<double>(subsets.size(), [&](std::size_t i) {
      const ErasureSet e(subsets[i], n);
      const auto pc = characteristic_polynomial(error_operator(f, canon, e));
      const auto pa = characteristic_polynomial(error_operator(f, alt, e));
      double gap = 0.0;
      for (std::size_t j = 0; j < pc.size(); ++j) gap = std::max(gap, std::abs(pc[j] - pa[j]));
      return gap;
    });
    for (double gap : gaps) rep.max_charpoly_gap = std::max(rep.max_charpoly_gap, gap);
  }
  rep.passed = rep.max_rho_gap < 1e-7 && rep.max_charpoly_gap < 1e-7;
  return rep;
}

// ---------------------------------------------------------------------------
// Empirical SOD search

struct SearchConfig {
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  std::vector<double> scales = default_perturbation_scales();
};

struct SearchCandidate {
  std::string id;
  DualFrame dual;
  std::vector<double> rho;  // ρ^(1), ρ^(2), ... for as long as it survived
};

struct SearchLevel {
  std::size_t r = 0;
  double min_rho = 0.0;
  std::vector<std::string> survivors;
  bool canonical_survives = false;
};

struct SearchReport {
  std::size_t r = 0;
  std::size_t candidates = 0;
  std::vector<SearchLevel> levels;
  bool canonical_optimal = false;  // canonical survives every level
  bool canonical_unique = false;   // ... and is the only survivor at the last level
  std::vector<std::string> optimal;
};

/// Samples duals from the per-component offset family, then applies the
/// inductive SOD filter: at each r' = 1..r only candidates within 1e-7 of the
/// running minimum of ρ^(r') survive to be scored at r' + 1. The pool holds
/// the canonical dual, the alternate dual (disconnected graphs, when
/// samples > 0), and `samples` random offset tuples cycling through `scales`.
inline SearchReport sod_search(const Frame& f, std::size_t r, const SearchConfig& cfg) {
  const Graph& g = detail::require_graph(f);
  const std::size_t n = f.size();
  if (n > kSearchEnumerationCap)
    throw ScaleCapError("search enumeration is capped at n = " + std::to_string(kSearchEnumerationCap));
  if (r < 1 || r > n - 1) throw InputError("r must lie in [1, n-1]");
  if (cfg.samples > 0 && cfg.scales.empty()) throw InputError("search needs at least one scale");

  std::vector<SearchCandidate> pool;
  pool.push_back({"canonical", canonical_dual(f), {}});
  if (cfg.samples > 0) {
    if (!g.connected()) pool.push_back({"alternate", alternate_dual(f), {}});
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
      const double scale = cfg.scales[s % cfg.scales.size()];
      std::vector<Vector> offsets(g.component_count(), Vector(f.dim()));
      for (auto& nu : offsets)
        for (auto& x : nu) x = scale * normal(rng);
      pool.push_back({"sample-" + std::to_string(s), dual_from_offsets(f, std::move(offsets)), {}});
    }
  }

  SearchReport rep;
  rep.r = r;
  rep.candidates = pool.size();
  std::vector<std::size_t> alive(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) alive[i] = i;
  for (std::size_t level = 1; level <= r; ++level) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : alive) {
      const double rho = rho_r(f, pool[i].dual, level).rho;
      pool[i].rho.push_back(rho);
      best = std::min(best, rho);
    }
    std::vector<std::size_t> next;
    for (std::size_t i : alive)
      if (pool[i].rho.back() <= best + 1e-7) next.push_back(i);
    alive = std::move(next);
    SearchLevel lv{level, best, {}, false};
    for (std::size_t i : alive) {
      lv.survivors.push_back(pool[i].id);
      if (i == 0) lv.canonical_survives = true;
    }
    rep.levels.push_back(std::move(lv));
  }
  rep.canonical_optimal = std::all_of(rep.levels.begin(), rep.levels.end(),
                                      [](const SearchLevel& l) { return l.canonical_survives; });
  rep.optimal = rep.levels.back().survivors;
  rep.canonical_unique = rep.canonical_optimal && rep.optimal.size() == 1;
  return rep;
}

}  // namespace framelab
