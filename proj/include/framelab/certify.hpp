#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "framelab/erasure.hpp"
#include "framelab/frame.hpp"
#include "framelab/graph.hpp"
#include "framelab/linalg.hpp"

namespace framelab {

enum class CheckStatus { pass, fail, skip };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skip: return "skip";
  }
  return "?";
}

/// Outcome of one theorem check on one graph. Residuals are kept in
/// insertion order for stable output.
struct Certificate {
  std::string theorem;
  std::string graph;
  CheckStatus status = CheckStatus::skip;
  std::vector<std::pair<std::string, double>> residuals;
  std::string note;
};

struct VerifyOptions {
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::size_t transports = 5;
  std::size_t invariance_r_max = 4;
};

inline const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids{"gramian",   "diagonal", "innerproducts", "fullspark",
                                            "duality",   "transport", "rho",          "spectrum",
                                            "invariance", "uniqueness", "nonuniqueness"};
  return ids;
}

namespace detail {

inline Certificate make_cert(std::string theorem, std::string graph) {
  return Certificate{std::move(theorem), std::move(graph), CheckStatus::pass, {}, {}};
}

inline void require(Certificate& c, bool ok, std::string_view why = {}) {
  if (!ok) {
    c.status = CheckStatus::fail;
    if (!why.empty() && c.note.empty()) c.note = std::string(why);
  }
}

inline std::vector<Frame> frames_for(const Graph& g) {
  std::vector<Frame> out;
  out.push_back(build_frame_global(g));
  if (!g.connected()) out.push_back(build_frame_blockwise(g));
  return out;
}

// Expected ⟨S⁻¹φ_j, φ_i⟩ for a graph frame: δ_ij − 1/n_l inside a component
// of size n_l, zero across components.
inline Matrix expected_inner_products(const Graph& g) {
  const std::size_t n = g.vertex_count();
  Matrix m(n, n);
  for (const auto& comp : g.components()) {
    const double inv = 1.0 / static_cast<double>(comp.size());
    for (std::size_t a : comp)
      for (std::size_t b : comp) m(a, b) = (a == b ? 1.0 : 0.0) - inv;
  }
  return m;
}

inline double largest_component_rho1(const Graph& g) {
  double best = 0.0;
  for (const auto& comp : g.components()) best = std::max(best, 1.0 - 1.0 / static_cast<double>(comp.size()));
  return best;
}

}  // namespace detail

/// Gramian of both constructions equals the Laplacian.
inline Certificate check_gramian(const Graph& g, const std::string& label) {
  auto c = detail::make_cert("gramian", label);
  const Matrix lap = laplacian_matrix(g);
  double worst = 0.0;
  worst = std::max(worst, max_abs_diff(build_frame_global(g).gramian(), lap));
  worst = std::max(worst, max_abs_diff(build_frame_blockwise(g).gramian(), lap));
  c.residuals.emplace_back("gramian_minus_laplacian", worst);
  detail::require(c, worst < 1e-8, "Gramian differs from the Laplacian");
  return c;
}

/// Frame operator is diagonal and carries the nonzero Laplacian spectrum.
inline Certificate check_diagonal(const Graph& g, const std::string& label) {
  auto c = detail::make_cert("diagonal", label);
  auto lap_spec = sym_eig(laplacian_matrix(g)).values;
  lap_spec.erase(std::remove(lap_spec.begin(), lap_spec.end(), 0.0), lap_spec.end());
  std::sort(lap_spec.begin(), lap_spec.end());
  double off = 0.0, diag = 0.0;
  for (const Frame& f : {build_frame_global(g), build_frame_blockwise(g)}) {
    const Matrix& s = f.frame_operator();
    std::vector<double> d;
    for (std::size_t i = 0; i < s.rows(); ++i) {
      d.push_back(s(i, i));
      for (std::size_t j = 0; j < s.cols(); ++j)
        if (i != j) off = std::max(off, std::abs(s(i, j)));
    }
    std::sort(d.begin(), d.end());
    if (d.size() != lap_spec.size()) {
      diag = std::numeric_limits<double>::infinity();
      continue;
    }
    for (std::size_t i = 0; i < d.size(); ++i) diag = std::max(diag, std::abs(d[i] - lap_spec[i]));
  }
  c.residuals.emplace_back("offdiagonal", off);
  c.residuals.emplace_back("diagonal_vs_spectrum", diag);
  detail::require(c, off < 1e-8, "frame operator is not diagonal");
  detail::require(c, diag < 1e-8, "diagonal differs from the nonzero Laplacian spectrum");
  return c;
}

/// ⟨S⁻¹φ_i, φ_i⟩ = 1 − 1/n_l and ⟨S⁻¹φ_i, φ_j⟩ = −1/n_l within a component.
/// Uses the global frame when connected, the blockwise one otherwise.
inline Certificate check_inner_products(const Graph& g, const std::string& label) {
  auto c = detail::make_cert("innerproducts", label);
  const Frame f = build_frame_auto(g);
  const double dev = max_abs_diff(canonical_inner_products(f), detail::expected_inner_products(g));
  c.residuals.emplace_back("inner_product_deviation", dev);
  detail::require(c, dev < 1e-9, "canonical inner products deviate from 1 - 1/n and -1/n");
  return c;
}

/// Connected: full spark. Disconnected blockwise: not full spark.
inline Certificate check_fullspark(const Graph& g, const std::string& label) {
  auto c = detail::make_cert("fullspark", label);
  const bool fs = is_full_spark(build_frame_auto(g));
  c.residuals.emplace_back("full_spark", fs ? 1.0 : 0.0);
  detail::require(c, fs == g.connected(),
                  g.connected() ? "connected-graph frame is not full spark" : "disconnected frame is full spark");
  return c;
}

/// Every member of the per-component offset family is a dual.
inline Certificate check_duality(const Graph& g, const std::string& label, const VerifyOptions& opt) {
  auto c = detail::make_cert("duality", label);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0, sums = 0.0;
  for (const Frame& f : detail::frames_for(g)) {
    worst = std::max(worst, duality_defect(f, canonical_dual(f).vectors));
    if (!g.connected()) worst = std::max(worst, duality_defect(f, alternate_dual(f).vectors));
    for (std::size_t t = 0; t < 5; ++t) {
      std::vector<Vector> offs(g.component_count(), Vector(f.dim()));
      for (auto& v : offs)
        for (auto& x : v) x = normal(rng);
      worst = std::max(worst, duality_defect(f, dual_from_offsets(f, offs).vectors));
    }
    for (const auto& comp : g.components()) sums = std::max(sums, norm_inf(component_vector_sum(f, comp)));
  }
  c.residuals.emplace_back("duality_defect", worst);
  c.residuals.emplace_back("component_sum", sums);
  detail::require(c, worst < 1e-8, "offset family member fails the duality identity");
  detail::require(c, sums < 1e-9, "frame vectors of a component do not sum to zero");
  return c;
}

/// Global and blockwise frames are related by an orthogonal map.
inline Certificate check_transport(const Graph& g, const std::string& label) {
  auto c = detail::make_cert("transport", label);
  const auto pr = procrustes(build_frame_blockwise(g).synthesis(), build_frame_global(g).synthesis());
  c.residuals.emplace_back("procrustes_residual", pr.residual);
  c.residuals.emplace_back("orthogonality_defect", orthogonality_defect(pr.rotation.matrix));
  detail::require(c, pr.residual < 1e-7, "frames are not unitarily equivalent");
  return c;
}

/// ρ^(1) = max_l (1 − 1/n_l) (1 − 1/n when connected) and ρ^(r) = 1 for
/// 2 ≤ r ≤ n − 1, for every construction.
inline Certificate check_rho(const Graph& g, const std::string& label) {
  auto c = detail::make_cert("rho", label);
  const std::size_t n = g.vertex_count();
  const double want1 = detail::largest_component_rho1(g);
  double dev1 = 0.0, devr = 0.0;
  for (const Frame& f : detail::frames_for(g)) {
    const auto d = canonical_dual(f);
    dev1 = std::max(dev1, std::abs(rho_r(f, d, 1).rho - want1));
    for (std::size_t r = 2; r + 1 <= n; ++r) devr = std::max(devr, std::abs(rho_r(f, d, r).rho - 1.0));
  }
  c.residuals.emplace_back("rho1_deviation", dev1);
  c.residuals.emplace_back("rho_r_deviation", devr);
  detail::require(c, dev1 < 1e-9, "rho1 differs from 1 - 1/n");
  detail::require(c, devr < 1e-8, "rho_r differs from 1");
  return c;
}

/// Brute-force spectra of the canonical error operators match the closed
/// forms for every Λ with 2 ≤ |Λ| ≤ n − 1 (and |Λ| = n when connected).
inline Certificate check_spectrum_theorem(const Graph& g, const std::string& label) {
  auto c = detail::make_cert("spectrum", label);
  const Frame f = build_frame_auto(g);
  const auto d = canonical_dual(f);
  const std::size_t n = g.vertex_count();
  const std::size_t top = g.connected() ? n : n - 1;
  std::size_t checked = 0, mismatched = 0;
  double worst = 0.0;
  for (std::size_t r = 2; r <= top; ++r) {
    const auto subsets = detail::all_subsets(n, r);
    const auto dist = parallel_map<double>(subsets.size(), [&](std::size_t i) {
      const ErasureSet e(subsets[i], n);
      const auto pred = *predicted_spectrum(f, e);
      const auto values = pred.expanded();
      return spectrum_distance(general_eigenvalues(error_operator(f, d, e)).values,
                               std::vector<Complex>(values.begin(), values.end()));
    });
    for (double x : dist) {
      ++checked;
      worst = std::max(worst, x);
      if (!(x <= kSpectrumMatchTol)) ++mismatched;
    }
  }
  c.residuals.emplace_back("erasure_sets", static_cast<double>(checked));
  c.residuals.emplace_back("max_spectrum_distance", worst);
  detail::require(c, mismatched == 0, std::to_string(mismatched) + " erasure sets disagree with the prediction");
  return c;
}

/// ρ^(r) of the canonical dual survives seeded orthogonal transports.
inline Certificate check_invariance(const Graph& g, const std::string& label, const VerifyOptions& opt) {
  auto c = detail::make_cert("invariance", label);
  double worst = 0.0;
  for (const Frame& f : detail::frames_for(g)) {
    for (std::size_t t = 0; t < opt.transports; ++t) {
      const auto u = random_orthogonal(f.dim(), opt.seed * 1000003ULL + t);
      worst = std::max(worst, verify_rho_invariance(f, u, opt.invariance_r_max).max_deviation);
    }
  }
  c.residuals.emplace_back("max_rho_deviation", worst);
  detail::require(c, worst < 1e-7, "rho changed under an orthogonal transport");
  return c;
}

inline Certificate check_uniqueness(const Graph& g, const std::string& label, const VerifyOptions& opt) {
  auto c = detail::make_cert("uniqueness", label);
  if (!g.connected() || g.vertex_count() < 2) {
    c.status = CheckStatus::skip;
    c.note = "applies to connected graphs only";
    return c;
  }
  const auto rep = verify_uniqueness_connected(g, g.vertex_count() - 1, opt.trials, opt.seed);
  c.residuals.emplace_back("duals_checked", static_cast<double>(rep.duals_checked));
  c.residuals.emplace_back("baseline_rho1", rep.baseline_rho1);
  c.residuals.emplace_back("min_rho1_excess", rep.min_rho1_excess);
  c.residuals.emplace_back("min_rho_r", rep.min_rho_r);
  c.residuals.emplace_back("max_witness_residual", rep.max_witness_residual);
  if (!rep.passed()) {
    const auto& v = rep.violations.front();
    detail::require(c, false, v.what + " (trial " + std::to_string(v.trial) + ", r = " + std::to_string(v.r) + ")");
  }
  return c;
}

inline Certificate check_nonuniqueness(const Graph& g, const std::string& label) {
  auto c = detail::make_cert("nonuniqueness", label);
  if (g.connected()) {
    c.status = CheckStatus::skip;
    c.note = "applies to disconnected graphs only";
    return c;
  }
  const auto rep = verify_nonuniqueness_disconnected(g, g.vertex_count() - 1);
  c.residuals.emplace_back("max_rho_gap", rep.max_rho_gap);
  c.residuals.emplace_back("max_charpoly_gap", rep.max_charpoly_gap);
  detail::require(c, rep.passed, "alternate dual does not tie the canonical profile");
  return c;
}

/// Runs one named check. Graphs without edges yield a failing certificate
/// only through the exceptions of the underlying constructions.
inline Certificate run_check(const std::string& theorem, const Graph& g, const std::string& label,
                             const VerifyOptions& opt) {
  if (theorem == "gramian") return check_gramian(g, label);
  if (theorem == "diagonal") return check_diagonal(g, label);
  if (theorem == "innerproducts") return check_inner_products(g, label);
  if (theorem == "fullspark") return check_fullspark(g, label);
  if (theorem == "duality") return check_duality(g, label, opt);
  if (theorem == "transport") return check_transport(g, label);
  if (theorem == "rho") return check_rho(g, label);
  if (theorem == "spectrum") return check_spectrum_theorem(g, label);
  if (theorem == "invariance") return check_invariance(g, label, opt);
  if (theorem == "uniqueness") return check_uniqueness(g, label, opt);
  if (theorem == "nonuniqueness") return check_nonuniqueness(g, label);
  throw InputError("unknown theorem '" + theorem + "'");
}

inline std::vector<Certificate> run_all_checks(const Graph& g, const std::string& label, const VerifyOptions& opt) {
  std::vector<Certificate> out;
  for (const auto& id : theorem_ids()) out.push_back(run_check(id, g, label, opt));
  return out;
}

}  // namespace framelab
