#ifndef QEX_CLI_HPP
#define QEX_CLI_HPP

#include <json.hpp>

#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qex/common.hpp"
#include "qex/extremal.hpp"
#include "qex/fixtures.hpp"
#include "qex/oracle.hpp"

namespace qex::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kSchemaVersion = 1;

// Accepts integers, decimals, and exact fractions ("29/100").
inline double parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double value = std::stod(text, &used);
      if (used != text.size()) throw ValidationError("parse_rational: trailing characters in '" + text + "'");
      return value;
    }
    const double num = std::stod(text.substr(0, slash), &used);
    if (used != slash) throw ValidationError("parse_rational: bad numerator in '" + text + "'");
    const std::string den_text = text.substr(slash + 1);
    const double den = std::stod(den_text, &used);
    if (used != den_text.size()) throw ValidationError("parse_rational: bad denominator in '" + text + "'");
    if (den == 0.0) throw ValidationError("parse_rational: zero denominator in '" + text + "'");
    return num / den;
  } catch (const std::invalid_argument&) {
    throw ValidationError("parse_rational: cannot parse '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ValidationError("parse_rational: value out of range in '" + text + "'");
  }
}

inline double number_from_json(const json& j, const std::string& context) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ValidationError("operator file: " + context + " must be a number or a rational string");
}

struct OperatorFile {
  int d = 0;
  std::string name;
  std::string family;
  std::map<std::string, double> parameters;
  CMatrix matrix;
  std::string digest;

  bool has_parameter(const std::string& key) const { return parameters.count(key) > 0; }
};

inline CMatrix build_family_matrix(const std::string& family,
                                   const std::map<std::string, double>& parameters) {
  const auto& families = fixtures::registry();
  const auto it = families.find(family);
  if (it == families.end())
    throw ValidationError("operator file: unknown family '" + family + "'");
  std::map<std::string, double> merged = it->second.defaults;
  for (const auto& [key, value] : parameters) {
    if (merged.find(key) == merged.end())
      throw ValidationError("operator file: family '" + family + "' has no parameter '" + key + "'");
    merged[key] = value;
  }
  return it->second.build(merged);
}

inline OperatorFile parse_operator_file(const json& doc, const std::string& digest_source) {
  OperatorFile out;
  if (!doc.is_object()) throw ValidationError("operator file: top level must be an object");
  if (!doc.contains("d") || !doc["d"].is_number_integer())
    throw ValidationError("operator file: missing integer field 'd'");
  out.d = doc["d"].get<int>();
  if (out.d < kMinDim || out.d > kMaxDim)
    throw ValidationError("operator file: dimension " + std::to_string(out.d) + " unsupported");
  if (doc.contains("name")) out.name = doc["name"].get<std::string>();
  if (doc.contains("parameters")) {
    for (const auto& [key, value] : doc["parameters"].items())
      out.parameters[key] = number_from_json(value, "parameter '" + key + "'");
  }
  if (doc.contains("family")) {
    out.family = doc["family"].get<std::string>();
    out.matrix = build_family_matrix(out.family, out.parameters);
    if (out.matrix.rows() != out.d)
      throw ValidationError("operator file: family dimension disagrees with 'd'");
  } else if (doc.contains("matrix")) {
    const json& rows = doc["matrix"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != out.d)
      throw ValidationError("operator file: 'matrix' must be a d x d array");
    out.matrix = CMatrix::Zero(out.d, out.d);
    for (int i = 0; i < out.d; ++i) {
      const json& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != out.d)
        throw ValidationError("operator file: matrix row has wrong length");
      for (int j = 0; j < out.d; ++j) {
        const json& cell = row[static_cast<std::size_t>(j)];
        if (!cell.is_object() || !cell.contains("re"))
          throw ValidationError("operator file: matrix entries must be {re, im} objects");
        const double re = number_from_json(cell["re"], "matrix entry re");
        const double im = cell.contains("im") ? number_from_json(cell["im"], "matrix entry im") : 0.0;
        out.matrix(i, j) = cxd(re, im);
      }
    }
  } else {
    throw ValidationError("operator file: needs either 'family' or 'matrix'");
  }
  const double defect = hermiticity_defect(out.matrix);
  const double budget = tol::herm_rel * std::max(1.0, inf_norm(out.matrix));
  if (defect > budget)
    throw ValidationError("operator file: matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  out.digest = lowercase_hex(fnv1a64(digest_source.data(), digest_source.size()));
  return out;
}

inline OperatorFile load_operator_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open operator file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw IoError("cannot parse operator file '" + path + "': " + err.what());
  }
  return parse_operator_file(doc, text);
}

// Constants requested on the command line; values are rational strings.
struct ConstantSpec {
  bool pure = false;
  std::optional<std::string> c2, c3, c4;
};

inline PurityConstraints resolve_constants(int d, const ConstantSpec& spec) {
  if (spec.pure) {
    if (spec.c2 || spec.c3 || spec.c4)
      throw ValidationError("constants: --pure cannot be combined with --c2/--c3/--c4");
    return pure_constraints(d);
  }
  RVector c = RVector::Zero(d - 1);
  const std::array<const std::optional<std::string>*, 3> given = {&spec.c2, &spec.c3, &spec.c4};
  for (int k = 2; k <= 4; ++k) {
    const auto& opt = *given[static_cast<std::size_t>(k - 2)];
    if (k <= d) {
      if (!opt)
        throw ValidationError("constants: --c" + std::to_string(k) + " is required for d=" +
                              std::to_string(d) + " (or pass --pure)");
      c(k - 2) = parse_rational(*opt);
    } else if (opt) {
      throw ValidationError("constants: --c" + std::to_string(k) + " does not apply to d=" +
                            std::to_string(d));
    }
  }
  return make_purity_constraints(d, c);
}

inline int thread_budget() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("QEX_THREADS");
  if (!env) return static_cast<int>(hw);
  const int requested = std::atoi(env);
  if (requested < 1) return 1;
  return std::min<int>(requested, static_cast<int>(hw));
}

// Order-deterministic parallel map over [0, count); exceptions from workers
// re-throw on the calling thread after the join.
template <typename Fn>
inline void parallel_for(int count, Fn&& fn) {
  const int threads = std::min(thread_budget(), std::max(1, count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

inline json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(json{{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const RVector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json solution_to_json(const CriticalSolution& sol) {
  json purity;
  for (int k = 2; k <= sol.purity.d; ++k)
    purity["c" + std::to_string(k)] = sol.purity.value(k);
  return json{{"label", sol.label},
              {"mean_value", sol.mean_value},
              {"bloch", vector_to_json(sol.bloch.lambda)},
              {"rho", matrix_to_json(sol.rho)},
              {"commutator_residual", sol.commutator_residual},
              {"purity", std::move(purity)}};
}

inline json input_block(const OperatorFile& file) {
  json block{{"digest", file.digest}, {"d", file.d}};
  if (!file.name.empty()) block["name"] = file.name;
  if (!file.family.empty()) block["family"] = file.family;
  if (!file.parameters.empty()) {
    json params;
    for (const auto& [key, value] : file.parameters) params[key] = value;
    block["parameters"] = std::move(params);
  }
  return block;
}

inline json constants_block(const PurityConstraints& constants) {
  json block{{"kind", constants.is_pure() ? "pure" : "mixed"},
             {"admissibility", to_string(constants.admissibility.status)}};
  for (int k = 2; k <= constants.d; ++k)
    block["c" + std::to_string(k)] = constants.value(k);
  return block;
}

inline json orbit_block(const HermitianOperator& op) {
  const CommutantMatrix commutant = build_commutant(op, structure_tensor(op.d));
  const NullSpaceParametrization param = rank_and_nullspace(commutant);
  json block{{"rank", param.r},
             {"free_variables", param.n()},
             {"nondegenerate", param.r == op.d * (op.d - 1)}};
  try {
    const OrbitInfo orbit = classify_orbit(param.r, op.d);
    json patterns = json::array();
    for (const auto& pattern : orbit.degeneracy_patterns) patterns.push_back(pattern);
    block["degeneracy_patterns"] = std::move(patterns);
  } catch (const ValidationError&) {
    // Leave patterns out for ranks the classification does not cover.
  }
  return block;
}

inline json spectrum_report(const OperatorFile& file, int seed, bool verify) {
  const HermitianOperator op = decompose(file.matrix);
  const SpectralResult spectrum = extremal_spectrum(op, seed);
  json report{{"schema_version", kSchemaVersion},
              {"mode", "spectrum"},
              {"seed", seed},
              {"input", input_block(file)},
              {"orbit", orbit_block(op)}};
  json solutions = json::array();
  for (const auto& sol : spectrum.projectors) solutions.push_back(solution_to_json(sol));
  report["solutions"] = std::move(solutions);
  report["spectrum"] = json{{"eigenvalues", vector_to_json(spectrum.eigenvalues)},
                            {"completeness_residual", spectrum.completeness_residual},
                            {"rounds", spectrum.rounds}};
  if (verify) {
    const OracleSpectrum oracle = eigen_oracle(file.matrix);
    double deviation = 0.0;
    for (int i = 0; i < op.d; ++i)
      deviation = std::max(deviation, std::abs(oracle.eigenvalues(i) - spectrum.eigenvalues(i)));
    report["oracle"] = json{{"eigenvalues", vector_to_json(oracle.eigenvalues)},
                            {"max_deviation", deviation},
                            {"residual", oracle.residual}};
  }
  return report;
}

inline json extremal_report(const OperatorFile& file, const PurityConstraints& constants, int seed,
                            bool verify) {
  const HermitianOperator op = decompose(file.matrix);
  if (constants.admissibility.status == Admissibility::inadmissible)
    throw ValidationError("constants are inadmissible (violated " +
                          constants.admissibility.violated_condition + ")");
  const std::vector<CriticalSolution> solutions = extremal_states(op, constants, seed);
  json report{{"schema_version", kSchemaVersion},
              {"mode", constants.is_pure() ? "pure" : "mixed"},
              {"seed", seed},
              {"input", input_block(file)},
              {"constants", constants_block(constants)},
              {"orbit", orbit_block(op)}};
  json sol_json = json::array();
  for (const auto& sol : solutions) sol_json.push_back(solution_to_json(sol));
  report["solutions"] = std::move(sol_json);

  if (!constants.is_pure()) {
    // Decompose each mixed extremal against the pure projector basis.
    const SpectralResult pure = extremal_spectrum(op, seed);
    report["pure_spectrum"] = json{{"eigenvalues", vector_to_json(pure.eigenvalues)},
                                   {"completeness_residual", pure.completeness_residual}};
    json decompositions = json::array();
    for (const auto& sol : solutions) {
      const ConvexDecomposition decomposition = convex_decomposition(sol, pure);
      decompositions.push_back(json{{"label", sol.label},
                                    {"weights", vector_to_json(decomposition.weights)}});
    }
    report["decompositions"] = std::move(decompositions);
  }
  if (verify) {
    const OracleSpectrum oracle = eigen_oracle(file.matrix);
    json block{{"eigenvalues", vector_to_json(oracle.eigenvalues)}, {"residual", oracle.residual}};
    double worst = 0.0;
    for (const auto& sol : solutions) {
      const auto bounds = trace_bounds(oracle.eigenvalues, eigen_oracle(sol.rho).eigenvalues);
      worst = std::max(worst, std::max(bounds.first - sol.mean_value - 1e-15,
                                       sol.mean_value - bounds.second - 1e-15));
    }
    block["max_sandwich_violation"] = std::max(0.0, worst);
    report["oracle"] = std::move(block);
  }
  return report;
}

// CSV sweep of a named fixture parameter; branch ids follow solutions
// across grid points by nearest-neighbor matching.
inline std::string sweep_csv(const OperatorFile& file, const std::string& parameter, double from,
                             double to, int steps, const ConstantSpec& spec, int seed) {
  if (file.family.empty())
    throw ValidationError("sweep: operator file has no parametrized family");
  const auto& family = fixtures::registry().at(file.family);
  if (family.defaults.find(parameter) == family.defaults.end())
    throw ValidationError("sweep: unknown parameter '" + parameter + "' for family '" +
                          file.family + "'");
  if (steps < 1) throw ValidationError("sweep: steps must be at least 1");
  const int points = (from == to) ? 1 : steps;

  struct PointResult {
    double value = 0.0;
    std::vector<double> means;
    std::vector<double> purity2;
  };
  std::vector<PointResult> grid(static_cast<std::size_t>(points));
  parallel_for(points, [&](int i) {
    const double value =
        points == 1 ? from : from + (to - from) * static_cast<double>(i) / (points - 1);
    std::map<std::string, double> params = file.parameters;
    params[parameter] = value;
    const CMatrix matrix = build_family_matrix(file.family, params);
    const HermitianOperator op = decompose(matrix);
    PointResult& result = grid[static_cast<std::size_t>(i)];
    result.value = value;
    if (spec.pure) {
      const SpectralResult spectrum = extremal_spectrum(op, seed);
      for (const auto& sol : spectrum.projectors) {
        result.means.push_back(sol.mean_value);
        result.purity2.push_back(power_sums(sol.rho, 2).value(2));
      }
    } else {
      const PurityConstraints constants = resolve_constants(op.d, spec);
      const std::vector<CriticalSolution> sols = extremal_states(op, constants, seed);
      for (const auto& sol : sols) {
        result.means.push_back(sol.mean_value);
        result.purity2.push_back(power_sums(sol.rho, 2).value(2));
      }
    }
  });

  std::ostringstream csv;
  csv << "param,branch_id,mean_value,purity\n";
  std::vector<double> branch_values;  // last seen mean per branch id
  for (const auto& point : grid) {
    std::vector<int> assignment(point.means.size(), -1);
    std::vector<bool> branch_taken(branch_values.size(), false);
    // Greedy nearest-neighbor continuity against the previous grid point.
    struct Pair {
      double distance;
      std::size_t sol;
      std::size_t branch;
    };
    std::vector<Pair> pairs;
    for (std::size_t s = 0; s < point.means.size(); ++s)
      for (std::size_t b = 0; b < branch_values.size(); ++b)
        pairs.push_back({std::abs(point.means[s] - branch_values[b]), s, b});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      if (a.sol != b.sol) return a.sol < b.sol;
      return a.branch < b.branch;
    });
    for (const auto& pair : pairs) {
      if (assignment[pair.sol] >= 0 || branch_taken[pair.branch]) continue;
      assignment[pair.sol] = static_cast<int>(pair.branch);
      branch_taken[pair.branch] = true;
    }
    for (std::size_t s = 0; s < point.means.size(); ++s) {
      if (assignment[s] < 0) {
        assignment[s] = static_cast<int>(branch_values.size());
        branch_values.push_back(point.means[s]);
      } else {
        branch_values[static_cast<std::size_t>(assignment[s])] = point.means[s];
      }
    }
    for (std::size_t s = 0; s < point.means.size(); ++s) {
      csv << format_double(point.value) << ',' << assignment[s] << ','
          << format_double(point.means[s]) << ',' << format_double(point.purity2[s]) << '\n';
    }
  }
  return csv.str();
}

// CSV classification grid over the purity-constant box.
inline std::string region_csv(int d, int resolution) {
  if (d != 3 && d != 4)
    throw ValidationError("region: only d=3 and d=4 grids are supported");
  if (resolution < 2) throw ValidationError("region: resolution must be at least 2");
  const double ub2 = purity_upper_bound(d, 2);
  const double ub3 = purity_upper_bound(d, 3);
  const double ub4 = d >= 4 ? purity_upper_bound(d, 4) : 0.0;

  const int layers = (d == 4) ? resolution : 1;
  std::vector<std::string> rows(static_cast<std::size_t>(resolution) * resolution * layers);
  parallel_for(resolution, [&](int i) {
    const double c2 = ub2 * static_cast<double>(i) / (resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      const double c3 = ub3 * static_cast<double>(j) / (resolution - 1);
      for (int k = 0; k < layers; ++k) {
        RVector c(d - 1);
        c(0) = c2;
        c(1) = c3;
        if (d == 4) c(2) = ub4 * static_cast<double>(k) / (resolution - 1);
        const PurityConstraints constants = make_purity_constraints(d, c);
        const auto& result = constants.admissibility;
        std::ostringstream row;
        row << format_double(c2) << ',' << format_double(c3);
        if (d == 4) row << ',' << format_double(c(2));
        row << ',' << to_string(result.status) << ',';
        if (result.status == Admissibility::inadmissible) {
          row << result.violated_condition;
        } else {
          const auto active = result.active_conditions();
          for (std::size_t a = 0; a < active.size(); ++a) {
            if (a) row << ';';
            row << active[a];
          }
        }
        row << '\n';
        const std::size_t index =
            (static_cast<std::size_t>(i) * resolution + static_cast<std::size_t>(j)) * layers +
            static_cast<std::size_t>(k);
        rows[index] = row.str();
      }
    }
  });
  std::ostringstream csv;
  csv << (d == 4 ? "c2,c3,c4,status,active\n" : "c2,c3,status,active\n");
  for (const auto& row : rows) csv << row;
  return csv.str();
}

inline void write_output(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + out_path + "'");
  out << content;
  if (!out) throw IoError("write to '" + out_path + "' failed");
}

// Exception-to-exit-code boundary shared by all subcommands.
template <typename Fn>
inline int run_guarded(Fn&& fn) {
  const auto started = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    fn();
  } catch (const ValidationError& err) {
    std::cerr << "qex: validation error: " << err.what() << '\n';
    code = kExitValidation;
  } catch (const SolverExhaustion& err) {
    std::cerr << "qex: solver error: " << err.what() << '\n';
    code = kExitSolver;
  } catch (const IoError& err) {
    std::cerr << "qex: i/o error: " << err.what() << '\n';
    code = kExitIo;
  }
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  std::cerr << "qex: finished in " << elapsed.count() << " ms\n";
  return code;
}

struct CommandOptions {
  std::string input_path;
  std::string out_path;
  std::string format = "json";
  int seed = 0;
  bool verify = false;
  ConstantSpec constants;
  // sweep
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
  // region
  int dim = 3;
  int resolution = 100;
};

inline int cmd_spectrum(const CommandOptions& options) {
  return run_guarded([&] {
    const OperatorFile file = load_operator_file(options.input_path);
    const json report = spectrum_report(file, options.seed, options.verify);
    write_output(report.dump(2), options.out_path);
  });
}

inline int cmd_extremal(const CommandOptions& options) {
  return run_guarded([&] {
    const OperatorFile file = load_operator_file(options.input_path);
    const PurityConstraints constants = resolve_constants(file.d, options.constants);
    const json report = extremal_report(file, constants, options.seed, options.verify);
    write_output(report.dump(2), options.out_path);
  });
}

inline int cmd_sweep(const CommandOptions& options) {
  return run_guarded([&] {
    const OperatorFile file = load_operator_file(options.input_path);
    const std::string csv = sweep_csv(file, options.parameter, options.from, options.to,
                                      options.steps, options.constants, options.seed);
    write_output(csv, options.out_path);
  });
}

inline int cmd_region(const CommandOptions& options) {
  return run_guarded([&] {
    const std::string csv = region_csv(options.dim, options.resolution);
    write_output(csv, options.out_path);
  });
}

}  // namespace qex::cli

#endif  // QEX_CLI_HPP
