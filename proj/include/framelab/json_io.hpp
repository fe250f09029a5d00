#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "framelab/erasure.hpp"
#include "framelab/frame.hpp"
#include "framelab/graph.hpp"
#include "framelab/matrix.hpp"

namespace framelab {

using json = nlohmann::ordered_json;

/// Decimal rendering with 17 significant digits; non-finite values become null.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep integral values recognisably floating point.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void write_json(std::ostringstream& os, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_json(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& x) { return x.is_structured(); });
      if (flat || indent == 0) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << (indent > 0 ? ", " : ",");
          write_json(os, j[i], indent, depth + 1);
        }
        os << ']';
        return;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',' << nl;
        os << pad;
        write_json(os, j[i], indent, depth + 1);
      }
      os << nl << close_pad << ']';
      return;
    }
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Serializes with floats at 17 significant digits.
inline std::string dump(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  return os.str();
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(json(std::vector<double>(m.row(i).begin(), m.row(i).end())));
  return rows;
}

inline json to_json(const Graph& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u + 1, v + 1});
  return {{"n", g.vertex_count()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
  try {
    std::vector<Edge> edges;
    const auto n = j.at("n").get<std::size_t>();
    for (const auto& e : j.at("edges")) {
      const auto u = e.at(0).get<std::size_t>(), v = e.at(1).get<std::size_t>();
      if (u < 1 || v < 1) throw InputError("edge endpoints are 1-indexed");
      edges.emplace_back(u - 1, v - 1);
    }
    return Graph(n, edges);
  } catch (const json::exception& ex) {
    throw InputError(std::string("malformed graph JSON: ") + ex.what());
  }
}

inline json to_json(const Frame& f) {
  json j = {{"dim", f.dim()},
            {"n", f.size()},
            {"synthesis", to_json(f.synthesis())},
            {"construction", to_string(f.construction())}};
  j["graph"] = f.source_graph() ? to_json(*f.source_graph()) : json(nullptr);
  return j;
}

/// Inverse of to_json(Frame). The construction tag is kept; the frame is
/// re-validated on load.
inline Frame frame_from_json(const json& j) {
  try {
    const auto dim = j.at("dim").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    Matrix s(dim, n);
    const auto& rows = j.at("synthesis");
    if (rows.size() != dim) throw InputError("synthesis row count does not match dim");
    for (std::size_t i = 0; i < dim; ++i) {
      if (rows[i].size() != n) throw InputError("synthesis row length does not match n");
      for (std::size_t c = 0; c < n; ++c) s(i, c) = rows[i][c].get<double>();
    }
    const auto tag = j.at("construction").get<std::string>();
    Construction c = Construction::explicit_matrix;
    for (auto cand : {Construction::global_eig, Construction::block_per_component, Construction::transported})
      if (tag == to_string(cand)) c = cand;
    std::optional<Graph> g;
    if (j.contains("graph") && !j["graph"].is_null()) g = graph_from_json(j["graph"]);
    return Frame(std::move(s), c, std::move(g));
  } catch (const json::exception& ex) {
    throw InputError(std::string("malformed frame JSON: ") + ex.what());
  }
}

inline json indices_to_json(const ErasureSet& e) {
  json a = json::array();
  for (auto i : e.indices()) a.push_back(i + 1);
  return a;
}

inline json to_json(const std::vector<Complex>& values) {
  json a = json::array();
  for (const auto& z : values) a.push_back({z.real(), z.imag()});
  return a;
}

inline json to_json(const PredictedSpectrum& p) {
  json a = json::array();
  for (const auto& e : p.entries) a.push_back({e.value, e.multiplicity});
  return a;
}

inline json dual_to_json(const std::string& kind, const DualFrame& d) {
  json offs = json::array();
  for (const auto& v : d.offsets) offs.push_back(json(v));
  return {{"kind", kind}, {"offsets", offs}};
}

/// Offsets file: either {"offsets": [[...], ...]} or a bare array of arrays.
inline std::vector<Vector> offsets_from_json(const json& j) {
  try {
    const json& arr = j.is_object() ? j.at("offsets") : j;
    std::vector<Vector> out;
    for (const auto& v : arr) out.push_back(v.get<Vector>());
    return out;
  } catch (const json::exception& ex) {
    throw InputError(std::string("malformed offsets JSON: ") + ex.what());
  }
}

inline json to_json(const ErasureReport& rep) {
  json j = {{"lambda", indices_to_json(rep.erasure)},
            {"r", rep.erasure.size()},
            {"rho", rep.radius},
            {"spectrum", to_json(rep.spectrum.values)}};
  j["predicted"] = rep.predicted ? to_json(*rep.predicted) : json(nullptr);
  j["match"] = rep.prediction_match ? json(*rep.prediction_match) : json(nullptr);
  return j;
}

inline json to_json(const RhoProfile& p) {
  json rows = json::array();
  for (const auto& row : p.rows)
    rows.push_back({{"r", row.r}, {"rho", row.rho}, {"argmax_lambda", indices_to_json(row.argmax)}});
  return rows;
}

/// CSV rows "r,rho,argmax" with argmax indices joined by ';'.
inline std::string to_csv(const RhoProfile& p) {
  std::string out = "r,rho,argmax\n";
  for (const auto& row : p.rows) {
    out += std::to_string(row.r) + "," + format_double(row.rho) + ",";
    for (std::size_t i = 0; i < row.argmax.size(); ++i)
      out += (i ? ";" : "") + std::to_string(row.argmax.indices()[i] + 1);
    out += "\n";
  }
  return out;
}

}  // namespace framelab
