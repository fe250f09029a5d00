#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "framelab/certify.hpp"
#include "framelab/corpus.hpp"
#include "framelab/erasure.hpp"
#include "framelab/frame.hpp"
#include "framelab/graph.hpp"
#include "framelab/json_io.hpp"

namespace framelab::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kNumericalFailure = 3,
  kScaleCap = 4,
  kVerificationFailure = 5,
};

struct RunConfig {
  std::string gen;
  std::string edges_file;
  std::string construction = "auto";
  std::string r_range;
  std::string dual = "canonical";
  std::string format = "json";
  std::string theorem = "all";
  std::uint64_t seed = 0;
  std::size_t trials = 50;
  std::size_t samples = 200;
  std::size_t max_n = 8;
  std::string scales;
  double tol = kSpectrumMatchTol;
  bool full = false;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::pair<Graph, std::string> load_graph(const RunConfig& cfg) {
  if (cfg.gen.empty() == cfg.edges_file.empty()) throw InputError("give exactly one of --gen or --edges");
  if (!cfg.gen.empty()) return {parse_generator_spec(cfg.gen), cfg.gen};
  return {parse_edge_list(read_file(cfg.edges_file)), cfg.edges_file};
}

inline Frame make_frame(const Graph& g, const std::string& construction) {
  if (construction == "auto") return build_frame_auto(g);
  if (construction == "global") return build_frame_global(g);
  if (construction == "blockwise") return build_frame_blockwise(g);
  throw InputError("construction must be auto, global or blockwise");
}

/// "a..b" or a single "r"; the result must lie in [1, n−1].
inline std::pair<std::size_t, std::size_t> parse_r_range(const std::string& text, std::size_t n) {
  if (n < 2) throw InputError("graph needs at least 2 vertices for erasure analysis");
  std::size_t lo = 1, hi = n - 1;
  if (!text.empty()) {
    auto parse = [&](const std::string& s) {
      std::size_t pos = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(s, &pos);
      } catch (const std::exception&) {
        throw InputError("bad r value '" + s + "'");
      }
      if (pos != s.size()) throw InputError("bad r value '" + s + "'");
      return static_cast<std::size_t>(v);
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
      lo = hi = parse(text);
    } else {
      lo = parse(text.substr(0, dots));
      hi = parse(text.substr(dots + 2));
    }
  }
  if (lo < 1 || hi > n - 1 || lo > hi)
    throw InputError("r range must lie within [1, " + std::to_string(n - 1) + "]");
  return {lo, hi};
}

inline std::pair<DualFrame, std::string> make_dual(const Frame& f, const std::string& spec) {
  if (spec == "canonical") return {canonical_dual(f), "canonical"};
  if (spec == "alternate") return {alternate_dual(f), "alternate"};
  const json j = [&] {
    try {
      return json::parse(read_file(spec));
    } catch (const json::parse_error& ex) {
      throw InputError(std::string("offsets file is not valid JSON: ") + ex.what());
    }
  }();
  return {dual_from_offsets(f, offsets_from_json(j)), "offsets"};
}

inline std::vector<double> parse_scales(const std::string& text) {
  if (text.empty()) return default_perturbation_scales();
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("bad scale '" + tok + "'");
    }
  }
  return out;
}

inline void check_format(const std::string& format) {
  if (format != "json" && format != "csv" && format != "text")
    throw InputError("format must be json, csv or text");
}

inline json certificate_json(const Certificate& c) {
  json res = json::object();
  for (const auto& [k, v] : c.residuals) res[k] = v;
  json j = {{"theorem", c.theorem}, {"graph", c.graph}, {"status", to_string(c.status)}, {"residuals", res}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline std::string residual_summary(const Certificate& c) {
  std::string s;
  for (const auto& [k, v] : c.residuals) s += (s.empty() ? "" : ";") + k + "=" + format_double(v);
  return s;
}

// ---------------------------------------------------------------------------

inline int cmd_frame(const RunConfig& cfg, std::ostream& out) {
  check_format(cfg.format);
  const auto [g, label] = load_graph(cfg);
  const Frame f = make_frame(g, cfg.construction);
  const double gram = max_abs_diff(f.gramian(), laplacian_matrix(g));
  double off = 0.0;
  const Matrix& s = f.frame_operator();
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (i != j) off = std::max(off, std::abs(s(i, j)));
  if (cfg.format == "json") {
    json j = {{"frame", to_json(f)},
              {"diagnostics", {{"gramian_residual", gram}, {"frame_operator_offdiagonal", off}}}};
    out << dump(j) << "\n";
  } else if (cfg.format == "csv") {
    out << "row";
    for (std::size_t i = 0; i < f.size(); ++i) out << ",phi" << i + 1;
    out << "\n";
    for (std::size_t r = 0; r < f.dim(); ++r) {
      out << r + 1;
      for (std::size_t i = 0; i < f.size(); ++i) out << "," << format_double(f.synthesis()(r, i));
      out << "\n";
    }
  } else {
    out << "graph " << label << ": n = " << f.size() << ", dim = " << f.dim() << ", construction "
        << to_string(f.construction()) << "\n";
    for (std::size_t r = 0; r < f.dim(); ++r) {
      for (std::size_t i = 0; i < f.size(); ++i) out << (i ? " " : "") << std::setw(12) << f.synthesis()(r, i);
      out << "\n";
    }
    out << "gramian residual " << format_double(gram) << ", frame operator off-diagonal " << format_double(off)
        << "\n";
  }
  return kSuccess;
}

inline int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  check_format(cfg.format);
  const auto [g, label] = load_graph(cfg);
  if (g.vertex_count() > kRhoEnumerationCap)
    throw ScaleCapError("rho enumeration is capped at n = " + std::to_string(kRhoEnumerationCap));
  const Frame f = make_frame(g, cfg.construction);
  const auto [lo, hi] = parse_r_range(cfg.r_range, g.vertex_count());
  const auto [dual, kind] = make_dual(f, cfg.dual);
  const RhoProfile profile = rho_profile(f, dual, lo, hi);

  std::vector<ErasureReport> reports;
  if (cfg.full)
    for (std::size_t r = lo; r <= hi; ++r)
      for (const auto& s : detail::all_subsets(g.vertex_count(), r))
        reports.push_back(check_spectrum(f, dual, ErasureSet(s, g.vertex_count()), cfg.tol));

  if (cfg.format == "json") {
    json j = {{"graph", to_json(g)},
              {"construction", to_string(f.construction())},
              {"dual", dual_to_json(kind, dual)},
              {"profile", to_json(profile)}};
    if (cfg.full) {
      json reps = json::array();
      for (const auto& rep : reports) reps.push_back(to_json(rep));
      j["reports"] = reps;
    }
    out << dump(j) << "\n";
  } else if (cfg.format == "csv") {
    out << to_csv(profile);
  } else {
    out << "graph " << label << ", construction " << to_string(f.construction()) << ", dual " << kind << "\n";
    for (const auto& row : profile.rows) {
      out << "r = " << row.r << "  rho = " << format_double(row.rho) << "  at {";
      for (std::size_t i = 0; i < row.argmax.size(); ++i) out << (i ? "," : "") << row.argmax.indices()[i] + 1;
      out << "}\n";
    }
    for (const auto& rep : reports) {
      out << "  lambda {";
      for (std::size_t i = 0; i < rep.erasure.size(); ++i) out << (i ? "," : "") << rep.erasure.indices()[i] + 1;
      out << "}  rho " << format_double(rep.radius);
      if (rep.prediction_match) out << "  match " << (*rep.prediction_match ? "yes" : "no");
      out << "\n";
    }
  }
  return kSuccess;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  check_format(cfg.format);
  const auto [g, label] = load_graph(cfg);
  if (g.edge_count() == 0) throw InputError("graph has no edges");
  if (g.vertex_count() > kRhoEnumerationCap)
    throw ScaleCapError("verification enumerates subsets only up to n = " + std::to_string(kRhoEnumerationCap));
  VerifyOptions opt;
  opt.trials = cfg.trials;
  opt.seed = cfg.seed;
  std::vector<Certificate> certs;
  if (cfg.theorem == "all")
    certs = run_all_checks(g, label, opt);
  else
    certs.push_back(run_check(cfg.theorem, g, label, opt));
  const bool ok = std::none_of(certs.begin(), certs.end(), [](const auto& c) { return c.status == CheckStatus::fail; });
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& c : certs) arr.push_back(certificate_json(c));
    out << dump(json{{"graph", to_json(g)}, {"label", label}, {"certificates", arr}, {"passed", ok}}) << "\n";
  } else if (cfg.format == "csv") {
    out << "graph,theorem,status,residuals\n";
    for (const auto& c : certs) out << c.graph << "," << c.theorem << "," << to_string(c.status) << "," << residual_summary(c) << "\n";
  } else {
    for (const auto& c : certs)
      out << std::left << std::setw(15) << c.theorem << to_string(c.status) << (c.note.empty() ? "" : "  " + c.note)
          << "\n";
  }
  return ok ? kSuccess : kVerificationFailure;
}

inline int cmd_search(const RunConfig& cfg, std::ostream& out) {
  check_format(cfg.format);
  const auto [g, label] = load_graph(cfg);
  if (g.vertex_count() > kSearchEnumerationCap)
    throw ScaleCapError("search enumeration is capped at n = " + std::to_string(kSearchEnumerationCap));
  const Frame f = make_frame(g, cfg.construction);
  const auto [lo, hi] = parse_r_range(cfg.r_range, g.vertex_count());
  (void)lo;
  SearchConfig sc{cfg.samples, cfg.seed, parse_scales(cfg.scales)};
  const SearchReport rep = sod_search(f, hi, sc);
  if (cfg.format == "json") {
    json levels = json::array();
    for (const auto& lv : rep.levels)
      levels.push_back({{"r", lv.r},
                        {"min_rho", lv.min_rho},
                        {"survivor_count", lv.survivors.size()},
                        {"survivors", lv.survivors},
                        {"canonical_survives", lv.canonical_survives}});
    json j = {{"graph", to_json(g)},
              {"construction", to_string(f.construction())},
              {"r", rep.r},
              {"samples", cfg.samples},
              {"seed", cfg.seed},
              {"candidates", rep.candidates},
              {"levels", levels},
              {"canonical_optimal", rep.canonical_optimal},
              {"canonical_unique", rep.canonical_unique},
              {"optimal", rep.optimal}};
    out << dump(j) << "\n";
  } else if (cfg.format == "csv") {
    out << "r,min_rho,survivor_count,canonical_survives\n";
    for (const auto& lv : rep.levels)
      out << lv.r << "," << format_double(lv.min_rho) << "," << lv.survivors.size() << ","
          << (lv.canonical_survives ? "true" : "false") << "\n";
  } else {
    out << "graph " << label << ", " << rep.candidates << " candidate duals\n";
    for (const auto& lv : rep.levels)
      out << "r = " << lv.r << "  min rho = " << format_double(lv.min_rho) << "  survivors " << lv.survivors.size()
          << (lv.canonical_survives ? "  (canonical among them)" : "") << "\n";
    out << "canonical optimal: " << (rep.canonical_optimal ? "yes" : "no")
        << ", unique: " << (rep.canonical_unique ? "yes" : "no") << "\n";
  }
  return kSuccess;
}

inline int cmd_corpus(const RunConfig& cfg, std::ostream& out) {
  check_format(cfg.format);
  VerifyOptions opt;
  opt.trials = cfg.trials;
  opt.seed = cfg.seed;
  std::vector<Certificate> certs;
  for (const auto& entry : builtin_corpus(cfg.max_n)) {
    auto part = run_all_checks(entry.graph, entry.label, opt);
    certs.insert(certs.end(), part.begin(), part.end());
  }
  std::size_t pass = 0, fail = 0, skip = 0;
  for (const auto& c : certs) {
    if (c.status == CheckStatus::pass) ++pass;
    if (c.status == CheckStatus::fail) ++fail;
    if (c.status == CheckStatus::skip) ++skip;
  }
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& c : certs) arr.push_back(certificate_json(c));
    out << dump(json{{"max_n", cfg.max_n},
                     {"seed", cfg.seed},
                     {"trials", cfg.trials},
                     {"results", arr},
                     {"summary", {{"pass", pass}, {"fail", fail}, {"skip", skip}}}})
        << "\n";
  } else if (cfg.format == "csv") {
    out << "graph,theorem,status,residuals\n";
    for (const auto& c : certs) out << c.graph << "," << c.theorem << "," << to_string(c.status) << "," << residual_summary(c) << "\n";
  } else {
    out << std::left << std::setw(34) << "graph" << std::setw(15) << "theorem" << "status\n";
    for (const auto& c : certs) out << std::setw(34) << c.graph << std::setw(15) << c.theorem << to_string(c.status) << "\n";
    out << pass << " passed, " << fail << " failed, " << skip << " skipped\n";
  }
  return fail == 0 ? kSuccess : kVerificationFailure;
}

// ---------------------------------------------------------------------------

/// Parses and dispatches; maps library exceptions onto exit codes.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (const char* env = std::getenv("FRAMELAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) {
      err << "error: FRAMELAB_THREADS must be a positive integer\n";
      return kInputError;
    }
  }

  RunConfig cfg;
  CLI::App app{"Graph-generated frames and spectrally optimal duals under erasures", "framelab"};
  app.require_subcommand(1);

  auto add_source = [&](CLI::App* sub) {
    auto* gen = sub->add_option("--gen", cfg.gen, "generator spec, e.g. path:4 or union:path:2,complete:3");
    auto* edges = sub->add_option("--edges", cfg.edges_file, "edge-list file");
    gen->excludes(edges);
    sub->add_option("--construction", cfg.construction, "auto | global | blockwise")
        ->check(CLI::IsMember({"auto", "global", "blockwise"}));
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  };

  auto* frame = app.add_subcommand("frame", "build a frame and report its diagnostics");
  add_source(frame);
  add_format(frame);

  auto* analyze = app.add_subcommand("analyze", "rho profile of a dual frame");
  add_source(analyze);
  add_format(analyze);
  analyze->add_option("--r", cfg.r_range, "r or a..b (default 1..n-1)");
  analyze->add_option("--dual", cfg.dual, "canonical | alternate | offsets JSON file");
  analyze->add_flag("--full", cfg.full, "include every erasure report");
  analyze->add_option("--tol", cfg.tol, "spectrum match tolerance");

  auto* verify = app.add_subcommand("verify", "check theorems on one graph");
  add_source(verify);
  add_format(verify);
  verify->add_option("--theorem", cfg.theorem, "all or one check id");
  verify->add_option("--trials", cfg.trials, "perturbations for the uniqueness check");
  verify->add_option("--seed", cfg.seed);

  auto* search = app.add_subcommand("search", "empirical SOD search over sampled duals");
  add_source(search);
  add_format(search);
  search->add_option("--r", cfg.r_range, "deepest erasure level (default n-1)");
  search->add_option("--samples", cfg.samples);
  search->add_option("--seed", cfg.seed);
  search->add_option("--scales", cfg.scales, "comma-separated offset scales");

  auto* corpus = app.add_subcommand("corpus", "run every check over the built-in corpus");
  add_format(corpus);
  corpus->add_option("--max-n", cfg.max_n, "largest graph to include");
  corpus->add_option("--trials", cfg.trials);
  corpus->add_option("--seed", cfg.seed);

  std::vector<const char*> argv{"framelab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (frame->parsed()) return cmd_frame(cfg, out);
    if (analyze->parsed()) return cmd_analyze(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (search->parsed()) return cmd_search(cfg, out);
    if (corpus->parsed()) return cmd_corpus(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const ScaleCapError& e) {
    err << "scale cap: " << e.what() << "\n";
    return kScaleCap;
  }
  return kInputError;
}

}  // namespace framelab::cli
