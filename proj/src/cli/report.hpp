#pragma once

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hobipb::cli {

/// One pipeline run. Optional fields are present only when a sphere oracle
/// applies (or, for `order`, when a coarser run of the same scheme exists).
struct RunReport {
  std::string mesh_source;
  std::size_t num_vertices = 0;
  std::size_t num_faces = 0;
  double area = 0.0;
  double eps1 = 1.0;
  double eps2 = 80.0;
  double kappa = 0.0;
  std::size_t num_charges = 0;
  std::string scheme;
  std::string regular_rule;
  int regular_rule_degree = 0;
  int singular_points = 0;
  double energy = 0.0;
  std::optional<double> exact_energy;
  std::optional<double> phi_error;
  std::optional<double> order;
  int iterations = 0;
  double residual = 0.0;
  double time_discretize = 0.0;
  double time_solve = 0.0;
  double time_energy = 0.0;
  int workers = 1;
  /// Cache sizes plus solver vectors: a lower bound on resident memory.
  std::size_t memory_lower_bound_bytes = 0;

  /// Throws std::invalid_argument naming the first non-finite field.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static RunReport from_json(const nlohmann::json& j);

  static std::string csv_header();
  std::string csv_row() const;
};

enum class Format { json, csv };
Format parse_format(const std::string& s);

/// JSON: an array of report objects. CSV: header plus one row per report.
std::string render(const std::vector<RunReport>& reports, Format format);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace hobipb::cli
