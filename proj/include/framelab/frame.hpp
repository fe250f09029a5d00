#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/graph.hpp"
#include "framelab/linalg.hpp"
#include "framelab/matrix.hpp"

namespace framelab {

enum class Construction { global_eig, block_per_component, transported, explicit_matrix };

inline std::string to_string(Construction c) {
  switch (c) {
    case Construction::global_eig: return "global_eig";
    case Construction::block_per_component: return "block_per_component";
    case Construction::transported: return "transported";
    case Construction::explicit_matrix: return "explicit";
  }
  return "?";
}

/// Row range [offset, offset + size) owned by one graph component in a
/// blockwise synthesis matrix.
struct RowBlock {
  std::size_t offset = 0;
  std::size_t size = 0;
};

inline Matrix gramian(const Matrix& synthesis) { return synthesis.transpose() * synthesis; }

/// A finite frame {φ_i} in ℝ^k held as its k×n synthesis matrix.
class Frame {
 public:
  /// Throws InputError when the columns fail to span ℝ^k.
  Frame(Matrix synthesis, Construction construction, std::optional<Graph> source = std::nullopt,
        std::vector<RowBlock> row_blocks = {})
      : synthesis_(std::move(synthesis)),
        construction_(construction),
        source_(std::move(source)),
        row_blocks_(std::move(row_blocks)) {
    if (synthesis_.rows() == 0) throw InputError("frame has dimension 0");
    if (rank(synthesis_, 1e-9) != synthesis_.rows())
      throw InputError("frame vectors do not span R^" + std::to_string(synthesis_.rows()));
    if (source_ && source_->vertex_count() != synthesis_.cols())
      throw InputError("source graph size does not match the frame vector count");
    operator_ = synthesis_ * synthesis_.transpose();
    gramian_ = framelab::gramian(synthesis_);
  }

  std::size_t dim() const noexcept { return synthesis_.rows(); }
  std::size_t size() const noexcept { return synthesis_.cols(); }
  const Matrix& synthesis() const noexcept { return synthesis_; }
  Vector vector(std::size_t i) const { return synthesis_.column(i); }
  Construction construction() const noexcept { return construction_; }
  const std::optional<Graph>& source_graph() const noexcept { return source_; }
  const std::vector<RowBlock>& row_blocks() const noexcept { return row_blocks_; }

  /// S = Φ·Φᵀ (k×k).
  const Matrix& frame_operator() const noexcept { return operator_; }
  /// Φᵀ·Φ (n×n).
  const Matrix& gramian() const noexcept { return gramian_; }

 private:
  Matrix synthesis_;
  Construction construction_;
  std::optional<Graph> source_;
  std::vector<RowBlock> row_blocks_;
  Matrix operator_;
  Matrix gramian_;
};

struct FrameOperator {
  Matrix matrix;
  Matrix inverse;
};

inline FrameOperator frame_operator(const Frame& f) { return {f.frame_operator(), spd_inverse(f.frame_operator())}; }

namespace detail {

inline const Graph& require_graph(const Frame& f) {
  if (!f.source_graph()) throw InputError("operation requires a graph-generated frame");
  return *f.source_graph();
}

}  // namespace detail

/// L_G(n, n-c) frame from the eigendecomposition of the whole Laplacian:
/// synthesis = diag(√λ)·M1ᵀ over the nonzero eigenpairs.
inline Frame build_frame_global(const Graph& g) {
  if (g.edge_count() == 0) throw InputError("graph has no edges");
  const auto decomposition = sym_eig(laplacian_matrix(g));
  const std::size_t k = decomposition.nonzero_count();
  if (k != g.vertex_count() - g.component_count())
    throw NumericalError("Laplacian rank " + std::to_string(k) + " disagrees with component count");
  Matrix synthesis(k, g.vertex_count());
  for (std::size_t r = 0; r < k; ++r) {
    const double scale = std::sqrt(decomposition.values[r]);
    for (std::size_t i = 0; i < g.vertex_count(); ++i) synthesis(r, i) = scale * decomposition.vectors(i, r);
  }
  return Frame(std::move(synthesis), Construction::global_eig, g);
}

/// Block-diagonal L_G(n, n-c) frame: one frame per component, placed in its
/// own row block; isolated vertices contribute zero columns.
inline Frame build_frame_blockwise(const Graph& g) {
  if (g.edge_count() == 0) throw InputError("graph has no edges");
  const std::size_t k = g.vertex_count() - g.component_count();
  const Matrix laplacian = laplacian_matrix(g);
  Matrix synthesis(k, g.vertex_count());
  std::vector<RowBlock> blocks;
  std::size_t offset = 0;
  for (const auto& comp : g.components()) {
    const std::size_t kc = comp.size() - 1;
    blocks.push_back({offset, kc});
    if (kc == 0) continue;
    Matrix sub(comp.size(), comp.size());
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (std::size_t b = 0; b < comp.size(); ++b) sub(a, b) = laplacian(comp[a], comp[b]);
    const auto d = sym_eig(sub);
    if (d.nonzero_count() != kc) throw NumericalError("component Laplacian has unexpected rank");
    for (std::size_t r = 0; r < kc; ++r) {
      const double scale = std::sqrt(d.values[r]);
      for (std::size_t a = 0; a < comp.size(); ++a) synthesis(offset + r, comp[a]) = scale * d.vectors(a, r);
    }
    offset += kc;
  }
  return Frame(std::move(synthesis), Construction::block_per_component, g, std::move(blocks));
}

/// Blockwise for disconnected graphs, global otherwise.
inline Frame build_frame_auto(const Graph& g) {
  return g.connected() ? build_frame_global(g) : build_frame_blockwise(g);
}

/// A dual frame {ψ_i} of a graph frame, parametrized by one offset vector per
/// graph component: ψ_i = S⁻¹φ_i + ν_{c(i)}.
struct DualFrame {
  std::vector<Vector> offsets;
  Matrix vectors;  // k×n, column i is ψ_i

  bool canonical() const {
    return std::all_of(offsets.begin(), offsets.end(),
                       [](const Vector& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }); });
  }
  Vector vector(std::size_t i) const { return vectors.column(i); }
};

/// Max entrywise deviation of Σ ψ_i φ_iᵀ from I.
inline double duality_defect(const Frame& f, const Matrix& dual_vectors) {
  return max_abs_diff(dual_vectors * f.synthesis().transpose(), Matrix::identity(f.dim()));
}

/// ψ_i = S⁻¹φ_i. Works for any frame; offsets are filled only when the frame
/// carries a source graph.
inline DualFrame canonical_dual(const Frame& f) {
  const auto op = frame_operator(f);
  DualFrame d;
  d.vectors = op.inverse * f.synthesis();
  if (f.source_graph()) d.offsets.assign(f.source_graph()->component_count(), Vector(f.dim(), 0.0));
  return d;
}

/// Dual from per-component offsets. Throws InputError on a wrong offset
/// count or dimension, and when the result fails the duality identity.
inline DualFrame dual_from_offsets(const Frame& f, std::vector<Vector> offsets) {
  const Graph& g = detail::require_graph(f);
  if (offsets.size() != g.component_count())
    throw InputError("expected " + std::to_string(g.component_count()) + " offset vectors, got " +
                     std::to_string(offsets.size()));
  double scale = 1.0;
  for (const auto& v : offsets) {
    if (v.size() != f.dim()) throw InputError("offset vector has dimension " + std::to_string(v.size()) +
                                              ", frame dimension is " + std::to_string(f.dim()));
    scale = std::max(scale, norm_inf(v));
  }
  DualFrame d = canonical_dual(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& nu = offsets[g.component_of(i)];
    for (std::size_t r = 0; r < f.dim(); ++r) d.vectors(r, i) += nu[r];
  }
  d.offsets = std::move(offsets);
  if (duality_defect(f, d.vectors) > 1e-8 * scale)
    throw InputError("offsets do not produce a dual frame (is the frame graph-generated?)");
  return d;
}

/// Index of the component that carries the non-canonical offset in the
/// alternate dual: the first component with at least one edge.
inline std::size_t alternate_component(const Graph& g) {
  for (std::size_t c = 0; c < g.component_count(); ++c)
    if (g.components()[c].size() > 1) return c;
  throw InputError("graph has no edges");
}

/// Unit vector orthogonal to every φ_i of the given component. For blockwise
/// frames this is the first standard basis vector past the component's row
/// block (e_α with α = |V(G_1)| when the component comes first).
inline Vector alternate_offset(const Frame& f, std::size_t component) {
  const Graph& g = detail::require_graph(f);
  const std::size_t k = f.dim();
  if (!f.row_blocks().empty()) {
    const auto block = f.row_blocks().at(component);
    std::size_t j = 0;
    if (block.offset + block.size < k)
      j = block.offset + block.size;
    else if (block.offset == 0)
      throw InputError("no direction orthogonal to the component exists (all other components are isolated vertices)");
    Vector e(k, 0.0);
    e[j] = 1.0;
    return e;
  }
  // General frame: Gram-Schmidt basis of the component span, then project
  // standard basis vectors until one leaves a residual.
  std::vector<Vector> basis;
  for (std::size_t v : g.components().at(component)) {
    Vector x = f.vector(v);
    for (const auto& b : basis) x = axpy(-dot(x, b), b, x);
    const double nx = norm2(x);
    if (nx > 1e-9) {
      for (auto& t : x) t /= nx;
      basis.push_back(std::move(x));
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    Vector x(k, 0.0);
    x[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) x = axpy(-dot(x, b), b, x);
    const double nx = norm2(x);
    if (nx > 1e-6) {
      for (auto& t : x) t /= nx;
      return x;
    }
  }
  throw InputError("no direction orthogonal to the component exists (all other components are isolated vertices)");
}

/// The non-canonical SOD dual for disconnected graphs: offset on the first
/// non-null component, zero elsewhere.
inline DualFrame alternate_dual(const Frame& f) {
  const Graph& g = detail::require_graph(f);
  if (g.connected()) throw InputError("the alternate dual needs a disconnected graph");
  const std::size_t c = alternate_component(g);
  std::vector<Vector> offsets(g.component_count(), Vector(f.dim(), 0.0));
  offsets[c] = alternate_offset(f, c);
  return dual_from_offsets(f, std::move(offsets));
}

inline constexpr std::size_t kFullSparkCap = 16;

namespace detail {

// Calls visit(subset) for every size-r subset of {0..n-1} in lexicographic
// order; stops early when visit returns false.
template <typename Visit>
void for_each_subset(std::size_t n, std::size_t r, Visit&& visit) {
  if (r > n) return;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    if (!visit(std::as_const(idx))) return;
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// True iff every subset of at most k frame vectors is linearly independent,
/// decided by checking all C(n, k) column subsets. Throws ScaleCapError past
/// n = 16.
inline bool is_full_spark(const Frame& f) {
  const std::size_t n = f.size(), k = f.dim();
  if (n > kFullSparkCap)
    throw ScaleCapError("full-spark test enumerates subsets only up to n = " + std::to_string(kFullSparkCap));
  for (std::size_t i = 0; i < n; ++i)
    if (norm_inf(f.vector(i)) <= 1e-12) return false;
  bool full = true;
  detail::for_each_subset(n, std::min(n, k), [&](const std::vector<std::size_t>& cols) {
    if (rank(f.synthesis().select_columns(cols), 1e-9) < cols.size()) full = false;
    return full;
  });
  return full;
}

/// Real orthogonal k×k matrix.
struct UnitaryMatrix {
  Matrix matrix;
};

/// Orthogonal factor of the QR decomposition of a seeded standard-normal
/// matrix, with R's diagonal made positive. Deterministic per seed.
inline UnitaryMatrix random_orthogonal(std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InputError("random_orthogonal: k must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) a(i, j) = normal(rng);
  Matrix q(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    Vector v = a.column(j);
    // Modified Gram-Schmidt, applied twice.
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t p = 0; p < j; ++p) {
        const Vector qp = q.column(p);
        v = axpy(-dot(v, qp), qp, v);
      }
    const double nv = norm2(v);
    if (nv < 1e-12) throw NumericalError("random_orthogonal: degenerate Gaussian draw");
    // Sign choice makes R_jj = <a_j, q_j> positive.
    const double sign = dot(a.column(j), v) < 0 ? -1.0 : 1.0;
    for (auto& x : v) x *= sign / nv;
    q.set_column(j, v);
  }
  return {std::move(q)};
}

/// The frame {Uφ_i}. Throws InputError when U is not orthogonal to 1e-8.
inline Frame apply_unitary(const Frame& f, const UnitaryMatrix& u) {
  if (u.matrix.rows() != f.dim() || !u.matrix.square())
    throw InputError("unitary has the wrong size for this frame");
  if (orthogonality_defect(u.matrix) > 1e-8) throw InputError("matrix is not orthogonal");
  return Frame(u.matrix * f.synthesis(), Construction::transported, f.source_graph());
}

inline Vector component_vector_sum(const Frame& f, const std::vector<std::size_t>& vertices) {
  Vector s(f.dim(), 0.0);
  for (std::size_t v : vertices) {
    if (v >= f.size()) throw InputError("vertex index out of range");
    for (std::size_t r = 0; r < f.dim(); ++r) s[r] += f.synthesis()(r, v);
  }
  return s;
}

/// n×n matrix of ⟨S⁻¹φ_j, φ_i⟩. For a connected graph this is I − J/n.
inline Matrix canonical_inner_products(const Frame& f) {
  const auto op = frame_operator(f);
  return f.synthesis().transpose() * op.inverse * f.synthesis();
}

struct ProcrustesResult {
  UnitaryMatrix rotation;
  double residual = 0.0;  // max |U·from − to|
};

/// Orthogonal U minimizing ‖U·from − to‖_F, via the polar factor of
/// to·fromᵀ. Throws NumericalError if that product is singular.
inline ProcrustesResult procrustes(const Matrix& from, const Matrix& to) {
  if (from.rows() != to.rows() || from.cols() != to.cols())
    throw InputError("procrustes: synthesis matrices have different shapes");
  const Matrix m = to * from.transpose();
  const auto d = sym_eig(m.transpose() * m);
  if (d.nonzero_count() != d.values.size())
    throw NumericalError("procrustes: frames are not related by an invertible map");
  Matrix u = m * symmetric_function(d, [](double x) { return 1.0 / std::sqrt(x); });
  const double residual = max_abs_diff(u * from, to);
  return {{std::move(u)}, residual};
}

}  // namespace framelab
