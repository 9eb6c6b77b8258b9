#include "qkalman/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qkalman/golden.hpp"
#include "qkalman/numerics.hpp"

namespace qkalman {

namespace {

using nlohmann::json;

// Pass bound for the subspace-law verification (eigenvalue clustering,
// completeness, membership, intersection agreement).
constexpr double kSubspaceLawTol = 1e-7;
// Pass bound for the standalone realizability check command.
constexpr double kCheckTol = 1e-10;

// --- deterministic JSON output ---------------------------------------------
//
// nlohmann's dump() prints doubles with shortest round-trip formatting, which
// is fine for re-reading but unstable across minor library versions. The
// report format pins every float to 17 significant digits instead, so files
// are byte-identical across runs and still round-trip exactly.

void append_double(std::string& out, double x) {
  if (!std::isfinite(x))
    throw std::logic_error("refusing to serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  out += buf;
}

bool is_flat_array(const json& v) {
  for (const auto& item : v)
    if (item.is_structured()) return false;
  return true;
}

void dump_value(const json& v, std::string& out, int level) {
  const std::string pad(2 * static_cast<size_t>(level), ' ');
  const std::string pad_in(2 * static_cast<size_t>(level) + 2, ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, val] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        out += json(key).dump();
        out += ": ";
        dump_value(val, out, level + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      const bool flat = is_flat_array(v);
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad_in;
        dump_value(item, out, level + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      append_double(out, v.get<double>());
      return;
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      out += std::to_string(v.get<long long>());
      return;
    default:
      out += v.dump();
      return;
  }
}

std::string dump_document(const json& doc) {
  std::string out;
  dump_value(doc, out, 0);
  out += "\n";
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- input parsing ----------------------------------------------------------

struct ParsedMatrix {
  Eigen::MatrixXd value;
  bool ok = false;
};

ParsedMatrix read_matrix(const json& doc, const std::string& key,
                         std::vector<std::string>& errors) {
  ParsedMatrix out;
  if (!doc.contains(key)) {
    errors.push_back("missing field '" + key + "'");
    return out;
  }
  const json& v = doc.at(key);
  if (!v.is_array()) {
    errors.push_back("'" + key + "' must be an array of rows");
    return out;
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  for (const auto& row : v) {
    if (!row.is_array()) {
      errors.push_back("'" + key + "' rows must be arrays");
      return out;
    }
    if (cols < 0)
      cols = static_cast<Eigen::Index>(row.size());
    else if (cols != static_cast<Eigen::Index>(row.size())) {
      errors.push_back("'" + key + "' rows have inconsistent lengths");
      return out;
    }
    for (const auto& x : row) {
      if (!x.is_number()) {
        errors.push_back("'" + key + "' entries must be numbers");
        return out;
      }
      if (!std::isfinite(x.get<double>())) {
        errors.push_back("'" + key + "' contains a non-finite entry");
        return out;
      }
    }
  }
  if (cols < 0) cols = 0;
  out.value.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) out.value(i, k) = v[i][k].get<double>();
  out.ok = true;
  return out;
}

void check_shape(const ParsedMatrix& m, const std::string& key, Eigen::Index rows,
                 Eigen::Index cols, std::vector<std::string>& errors) {
  if (!m.ok) return;
  // "[]" is the only spelling of a 0-row matrix; its column count is vacuous.
  if (rows == 0 && m.value.rows() == 0) return;
  if (m.value.rows() != rows || m.value.cols() != cols)
    errors.push_back("'" + key + "' must be " + std::to_string(rows) + " x " +
                     std::to_string(cols) + ", got " + std::to_string(m.value.rows()) +
                     " x " + std::to_string(m.value.cols()));
}

std::string ordering_name(BlockOrdering ordering) {
  return ordering == BlockOrdering::Ttilde ? "Ttilde" : "T";
}

}  // namespace

SystemFile parse_system_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    // Covers both malformed text and numeric overflow while reading a value.
    throw std::invalid_argument(std::string("input is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("input must be a JSON object");

  std::vector<std::string> errors;
  for (const auto& [key, val] : doc.items()) {
    (void)val;
    if (key != "n" && key != "m" && key != "hamiltonian" && key != "coupling_re" &&
        key != "coupling_im" && key != "options")
      errors.push_back("unknown field '" + key + "'");
  }

  Eigen::Index n = -1, m = -1;
  for (const auto* field : {"n", "m"}) {
    if (!doc.contains(field)) {
      errors.push_back(std::string("missing field '") + field + "'");
      continue;
    }
    const json& v = doc.at(field);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      errors.push_back(std::string("'") + field + "' must be an integer");
      continue;
    }
    const long long x = v.get<long long>();
    if (x < 0) {
      errors.push_back(std::string("'") + field + "' must be nonnegative");
      continue;
    }
    (field[0] == 'n' ? n : m) = static_cast<Eigen::Index>(x);
  }
  if (n == 0) errors.push_back("'n' must be positive");

  ParsedMatrix h = read_matrix(doc, "hamiltonian", errors);
  ParsedMatrix cre = read_matrix(doc, "coupling_re", errors);
  ParsedMatrix cim = read_matrix(doc, "coupling_im", errors);
  if (n > 0 && m >= 0) {
    check_shape(h, "hamiltonian", 2 * n, 2 * n, errors);
    check_shape(cre, "coupling_re", m, 2 * n, errors);
    check_shape(cim, "coupling_im", m, 2 * n, errors);
  }
  if (h.ok && h.value.rows() == h.value.cols() && h.value.size() > 0) {
    const double asym = (h.value - h.value.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9)
      errors.push_back("'hamiltonian' asymmetry " + std::to_string(asym) +
                       " exceeds tolerance 1e-9");
  }

  SolveOptions options;
  if (doc.contains("options")) {
    const json& opt = doc.at("options");
    if (!opt.is_object()) {
      errors.push_back("'options' must be an object");
    } else {
      for (const auto& [key, val] : opt.items()) {
        if (key == "horizon") {
          if (!val.is_array() || val.size() != 2 || !val[0].is_number() ||
              !val[1].is_number()) {
            errors.push_back("'options.horizon' must be [t, s]");
            continue;
          }
          options.horizon_t = val[0].get<double>();
          options.horizon_s = val[1].get<double>();
          if (!std::isfinite(options.horizon_t) || !std::isfinite(options.horizon_s) ||
              !(options.horizon_t < options.horizon_s))
            errors.push_back("'options.horizon' must satisfy t < s");
        } else if (key == "rank_tol") {
          if (!val.is_number() || !(val.get<double>() > 0.0))
            errors.push_back("'options.rank_tol' must be a positive number");
          else
            options.rank_tol = val.get<double>();
        } else if (key == "ordering") {
          if (val == "T")
            options.ordering = BlockOrdering::T;
          else if (val == "Ttilde")
            options.ordering = BlockOrdering::Ttilde;
          else
            errors.push_back("'options.ordering' must be \"T\" or \"Ttilde\"");
        } else {
          errors.push_back("unknown field 'options." + key + "'");
        }
      }
    }
  }

  if (!errors.empty()) {
    std::string msg = "invalid system description:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }

  Eigen::MatrixXcd coupling(m, 2 * n);
  if (m > 0) {
    coupling.real() = cre.value;
    coupling.imag() = cim.value;
  }
  SystemFile file;
  file.model = make_model(std::move(h.value), std::move(coupling));
  file.options = options;
  return file;
}

SystemFile parse_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_json(buf.str());
}

std::string system_file_to_json(const SystemFile& file) {
  json doc;
  doc["n"] = static_cast<long long>(file.model.n);
  doc["m"] = static_cast<long long>(file.model.m);
  doc["hamiltonian"] = matrix_to_json(file.model.hamiltonian);
  doc["coupling_re"] = matrix_to_json(file.model.coupling.real());
  doc["coupling_im"] = matrix_to_json(file.model.coupling.imag());
  json opt;
  opt["horizon"] = json::array({file.options.horizon_t, file.options.horizon_s});
  if (file.options.rank_tol) opt["rank_tol"] = *file.options.rank_tol;
  opt["ordering"] = ordering_name(file.options.ordering);
  doc["options"] = std::move(opt);
  return dump_document(doc);
}

void write_system_file(const SystemFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << system_file_to_json(file);
  if (!out.good()) throw std::runtime_error("failed writing output file '" + path + "'");
}

bool DecompositionReport::all_pass(const ReportThresholds& th) const {
  return residual_physical_realizability <= th.physical_realizability &&
         residual_gramian_duality <= th.gramian_duality &&
         residual_orthogonality <= th.orthogonality &&
         residual_block_symplectic <= th.block_symplectic &&
         residual_structural_zeros <= th.structural_zeros &&
         residual_hamiltonian_block <= th.hamiltonian_block &&
         residual_transfer_invariance <= th.transfer_invariance;
}

std::string DecompositionReport::to_json() const {
  json doc;
  json dims;
  dims["n"] = static_cast<long long>(n);
  dims["m"] = static_cast<long long>(m);
  dims["n1"] = static_cast<long long>(n1);
  dims["n2"] = static_cast<long long>(n2);
  dims["n3"] = static_cast<long long>(n3);
  doc["dims"] = std::move(dims);

  json mats;
  mats["ordering"] = ordering;
  mats["T"] = matrix_to_json(t);
  mats["T_tilde"] = matrix_to_json(t_tilde);
  mats["A_bar_raw"] = matrix_to_json(a_bar_raw);
  mats["A_bar_clean"] = matrix_to_json(a_bar_clean);
  mats["B_bar"] = matrix_to_json(b_bar);
  mats["C_bar"] = matrix_to_json(c_bar);
  mats["H_bar"] = matrix_to_json(h_bar);
  mats["Lambda_bar_re"] = matrix_to_json(lambda_bar_re);
  mats["Lambda_bar_im"] = matrix_to_json(lambda_bar_im);
  doc["matrices"] = std::move(mats);

  json proj;
  proj["P_co"] = matrix_to_json(p_co);
  proj["P_cobar"] = matrix_to_json(p_cobar);
  proj["P_cbaro"] = matrix_to_json(p_cbaro);
  proj["P_cbarobar"] = matrix_to_json(p_cbarobar);
  doc["projectors"] = std::move(proj);

  json res;
  res["physical_realizability"] = residual_physical_realizability;
  res["gramian_duality"] = residual_gramian_duality;
  res["orthogonality"] = residual_orthogonality;
  res["block_symplectic"] = residual_block_symplectic;
  res["structural_zeros"] = residual_structural_zeros;
  res["hamiltonian_block"] = residual_hamiltonian_block;
  res["transfer_invariance"] = residual_transfer_invariance;
  doc["residuals"] = std::move(res);

  doc["warnings"] = json(warnings);
  return dump_document(doc);
}

PipelineResult run_pipeline(const SystemFile& input, const ReportThresholds& thresholds) {
  PipelineResult r;
  const SLHModel& model = input.model;
  ToleranceConfig cfg;
  if (input.options.rank_tol) cfg.rank_rel_tol = *input.options.rank_tol;
  cfg.validate();

  std::vector<std::string> warnings;

  r.sys = build_quadrature(model);
  r.realizability = check_physical_realizability(r.sys, thresholds.physical_realizability);

  const Horizon hor = effective_horizon(model, input.options.horizon_t,
                                        input.options.horizon_s);
  if (hor.shrunk) {
    std::ostringstream msg;
    msg << "horizon end moved from " << input.options.horizon_s << " to " << hor.s
        << " to keep the flow exponential well conditioned";
    warnings.push_back(msg.str());
  }
  r.gramians = compute_gramians(r.sys, model, hor.t, hor.s);

  ToleranceConfig duality_cfg = cfg;
  duality_cfg.residual_tol = thresholds.gramian_duality;
  r.duality = verify_duality(r.gramians, duality_cfg);

  r.svd = svd_split(r.gramians.wo, cfg);
  if (r.svd.gap_warning) {
    std::ostringstream msg;
    msg << "singular-value gap at the rank cut is only " << r.svd.gap
        << "; the block dimensions may be sensitive to rank_tol";
    warnings.push_back(msg.str());
  }
  r.subspaces = extract_subspaces(r.svd, cfg);
  r.laws = verify_subspace_laws(r.subspaces, r.svd, kSubspaceLawTol, cfg);
  if (!r.laws.pass)
    warnings.push_back("subspace-law verification failed; see residuals");

  const TransformationParts parts = build_transformation(r.subspaces);
  r.decomposition =
      apply_transformation(r.sys, model, parts, input.options.ordering, cfg);
  r.structure = verify_canonical_structure(r.decomposition, r.sys, r.gramians,
                                           thresholds.structural_zeros);

  const auto samples = default_sample_points(r.sys.a, r.decomposition.a_co);
  r.transfer = transfer_function_invariance(r.sys, r.decomposition, samples,
                                            thresholds.transfer_invariance);

  DecompositionReport& rep = r.report;
  rep.n = model.n;
  rep.m = model.m;
  rep.n1 = r.subspaces.n1;
  rep.n2 = r.subspaces.n2;
  rep.n3 = r.subspaces.n3;
  rep.ordering = ordering_name(input.options.ordering);
  rep.t = r.decomposition.t;
  rep.t_tilde = r.decomposition.t_tilde;
  rep.a_bar_raw = r.decomposition.a_bar_raw;
  rep.a_bar_clean = r.decomposition.a_bar_clean;
  rep.b_bar = r.decomposition.b_bar_raw;
  rep.c_bar = r.decomposition.c_bar_raw;
  rep.h_bar = r.decomposition.h_bar;
  rep.lambda_bar_re = r.decomposition.lambda_bar.real();
  rep.lambda_bar_im = r.decomposition.lambda_bar.imag();

  const Eigen::Index d = 2 * model.n;
  const auto projector = [d](const Eigen::MatrixXd& basis) -> Eigen::MatrixXd {
    if (basis.cols() == 0) return Eigen::MatrixXd::Zero(d, d);
    return basis * basis.transpose();
  };
  rep.p_co = projector(parts.t_co);
  rep.p_cobar = projector(parts.t_cobar);
  rep.p_cbaro = projector(parts.t_cbaro);
  rep.p_cbarobar = projector(parts.t_cbarobar);

  rep.residual_physical_realizability =
      std::max(r.realizability.residual_state, r.realizability.residual_io);
  rep.residual_gramian_duality = r.duality.residual;
  rep.residual_orthogonality = r.decomposition.diagnostics.orthogonality;
  rep.residual_block_symplectic = r.decomposition.diagnostics.block_symplectic;
  rep.residual_structural_zeros =
      std::max({r.structure.structural_zeros, r.structure.gramian_pattern,
                r.structure.invariance_residual});
  rep.residual_hamiltonian_block = r.structure.hamiltonian_residual;
  rep.residual_transfer_invariance = r.transfer.max_mismatch;
  rep.warnings = warnings;

  r.all_pass = rep.all_pass(thresholds) && r.realizability.pass && r.duality.pass &&
               r.laws.pass && r.structure.pass && r.transfer.pass;
  return r;
}

namespace {

void print_residual_line(const char* name, double value, double threshold) {
  std::printf("%-24s %.3e (%s)\n", name, value, value <= threshold ? "pass" : "FAIL");
}

}  // namespace

int run_decompose(const std::string& input_path, const std::string& output_path,
                  const CliOverrides& overrides) {
  SystemFile file;
  try {
    file = parse_system_file(input_path);
    if (overrides.rank_tol) {
      if (!(*overrides.rank_tol > 0.0))
        throw std::invalid_argument("--tol must be positive");
      file.options.rank_tol = overrides.rank_tol;
    }
    if (overrides.horizon) {
      if (!(overrides.horizon->first < overrides.horizon->second))
        throw std::invalid_argument("--horizon must satisfy t < s");
      file.options.horizon_t = overrides.horizon->first;
      file.options.horizon_s = overrides.horizon->second;
    }
    if (overrides.ordering) file.options.ordering = *overrides.ordering;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  const ReportThresholds th;
  PipelineResult r;
  try {
    r = run_pipeline(file, th);
  } catch (const std::exception& e) {
    std::cerr << "verification error: " << e.what() << '\n';
    return 2;
  }

  try {
    std::ofstream out(output_path);
    if (!out) throw std::runtime_error("cannot open output file '" + output_path + "'");
    out << r.report.to_json();
    if (!out.good())
      throw std::runtime_error("failed writing output file '" + output_path + "'");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  std::printf("block dimensions: n1=%lld n2=%lld n3=%lld\n",
              static_cast<long long>(r.report.n1), static_cast<long long>(r.report.n2),
              static_cast<long long>(r.report.n3));
  print_residual_line("physical_realizability",
                      r.report.residual_physical_realizability,
                      th.physical_realizability);
  print_residual_line("gramian_duality", r.report.residual_gramian_duality,
                      th.gramian_duality);
  print_residual_line("orthogonality", r.report.residual_orthogonality,
                      th.orthogonality);
  print_residual_line("block_symplectic", r.report.residual_block_symplectic,
                      th.block_symplectic);
  print_residual_line("structural_zeros", r.report.residual_structural_zeros,
                      th.structural_zeros);
  print_residual_line("hamiltonian_block", r.report.residual_hamiltonian_block,
                      th.hamiltonian_block);
  print_residual_line("transfer_invariance", r.report.residual_transfer_invariance,
                      th.transfer_invariance);
  for (const auto& w : r.report.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("report written to %s\n", output_path.c_str());
  std::printf("result: %s\n", r.all_pass ? "PASS" : "FAIL");
  return r.all_pass ? 0 : 2;
}

int run_check(const std::string& input_path, bool inject_nonrealizable) {
  QuadratureSystem sys;
  try {
    const SystemFile file = parse_system_file(input_path);
    sys = build_quadrature(file.model);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (inject_nonrealizable) {
    // Classical triple with no quantum counterpart; exercises the failure path.
    sys.n = 1;
    sys.m = 1;
    sys.a = Eigen::MatrixXd::Identity(2, 2);
    sys.b = Eigen::MatrixXd::Identity(2, 2);
    sys.c = Eigen::MatrixXd::Identity(2, 2);
    sys.d = Eigen::MatrixXd::Identity(2, 2);
  }

  const RealizabilityReport report = check_physical_realizability(sys, kCheckTol);
  print_residual_line("realizability_state", report.residual_state, kCheckTol);
  print_residual_line("realizability_io", report.residual_io, kCheckTol);
  std::printf("result: %s\n", report.pass ? "PASS" : "FAIL");
  return report.pass ? 0 : 2;
}

int run_example(const std::string& name, double omega, double lambda, double gamma,
                const std::string& output_path) {
  try {
    const SystemFile file = builtin_example(name, omega, lambda, gamma);
    write_system_file(file, output_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::printf("wrote %s\n", output_path.c_str());
  return 0;
}

SystemFile builtin_example(const std::string& name, double omega, double lambda,
                           double gamma) {
  if (name != "gzpg17")
    throw std::invalid_argument("unknown example '" + name + "' (available: gzpg17)");
  SystemFile file;
  file.model = gzpg17_model(omega, lambda, gamma);
  file.options = SolveOptions{};
  return file;
}

}  // namespace qkalman
