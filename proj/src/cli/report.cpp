#include "cli/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hobipb::cli {

namespace {

// Column order shared by the CSV header, the CSV row and the JSON object.
constexpr const char* kColumns[] = {
    "mesh_source", "num_vertices", "num_faces", "area", "eps1", "eps2", "kappa", "num_charges",
    "scheme", "regular_rule", "regular_rule_degree", "singular_points", "energy_kcal_mol",
    "exact_energy_kcal_mol", "phi_error", "order", "iterations", "residual", "time_discretize_s",
    "time_solve_s", "time_energy_s", "workers", "memory_lower_bound_bytes"};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::optional<double> opt(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void RunReport::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"area", area},       {"eps1", eps1},         {"eps2", eps2},     {"kappa", kappa},
      {"energy", energy},   {"residual", residual}, {"time_discretize", time_discretize},
      {"time_solve", time_solve}, {"time_energy", time_energy}};
  for (const auto& [name, v] : fields)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("report field '") + name + "' is not finite");
  for (const auto& [name, v] : {std::pair{"exact_energy", exact_energy}, std::pair{"phi_error", phi_error},
                                std::pair{"order", order}})
    if (v && !std::isfinite(*v)) throw std::invalid_argument(std::string("report field '") + name + "' is not finite");
}

nlohmann::ordered_json RunReport::to_json() const {
  validate();
  auto o = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["mesh_source"] = mesh_source;
  j["num_vertices"] = num_vertices;
  j["num_faces"] = num_faces;
  j["area"] = area;
  j["eps1"] = eps1;
  j["eps2"] = eps2;
  j["kappa"] = kappa;
  j["num_charges"] = num_charges;
  j["scheme"] = scheme;
  j["regular_rule"] = regular_rule;
  j["regular_rule_degree"] = regular_rule_degree;
  j["singular_points"] = singular_points;
  j["energy_kcal_mol"] = energy;
  j["exact_energy_kcal_mol"] = o(exact_energy);
  j["phi_error"] = o(phi_error);
  j["order"] = o(order);
  j["iterations"] = iterations;
  j["residual"] = residual;
  j["time_discretize_s"] = time_discretize;
  j["time_solve_s"] = time_solve;
  j["time_energy_s"] = time_energy;
  j["workers"] = workers;
  j["memory_lower_bound_bytes"] = memory_lower_bound_bytes;
  return j;
}

RunReport RunReport::from_json(const nlohmann::json& j) {
  RunReport r;
  r.mesh_source = j.at("mesh_source").get<std::string>();
  r.num_vertices = j.at("num_vertices").get<std::size_t>();
  r.num_faces = j.at("num_faces").get<std::size_t>();
  r.area = j.at("area").get<double>();
  r.eps1 = j.at("eps1").get<double>();
  r.eps2 = j.at("eps2").get<double>();
  r.kappa = j.at("kappa").get<double>();
  r.num_charges = j.at("num_charges").get<std::size_t>();
  r.scheme = j.at("scheme").get<std::string>();
  r.regular_rule = j.at("regular_rule").get<std::string>();
  r.regular_rule_degree = j.at("regular_rule_degree").get<int>();
  r.singular_points = j.at("singular_points").get<int>();
  r.energy = j.at("energy_kcal_mol").get<double>();
  r.exact_energy = opt(j, "exact_energy_kcal_mol");
  r.phi_error = opt(j, "phi_error");
  r.order = opt(j, "order");
  r.iterations = j.at("iterations").get<int>();
  r.residual = j.at("residual").get<double>();
  r.time_discretize = j.at("time_discretize_s").get<double>();
  r.time_solve = j.at("time_solve_s").get<double>();
  r.time_energy = j.at("time_energy_s").get<double>();
  r.workers = j.at("workers").get<int>();
  r.memory_lower_bound_bytes = j.at("memory_lower_bound_bytes").get<std::size_t>();
  r.validate();
  return r;
}

std::string RunReport::csv_header() {
  std::string h;
  for (const char* c : kColumns) {
    if (!h.empty()) h += ',';
    h += c;
  }
  return h;
}

std::string RunReport::csv_row() const {
  validate();
  auto o = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  const std::string cells[] = {csv_escape(mesh_source),
                               std::to_string(num_vertices),
                               std::to_string(num_faces),
                               format_double(area),
                               format_double(eps1),
                               format_double(eps2),
                               format_double(kappa),
                               std::to_string(num_charges),
                               scheme,
                               regular_rule,
                               std::to_string(regular_rule_degree),
                               std::to_string(singular_points),
                               format_double(energy),
                               o(exact_energy),
                               o(phi_error),
                               o(order),
                               std::to_string(iterations),
                               format_double(residual),
                               format_double(time_discretize),
                               format_double(time_solve),
                               format_double(time_energy),
                               std::to_string(workers),
                               std::to_string(memory_lower_bound_bytes)};
  static_assert(std::size(cells) == std::size(kColumns));
  std::string row;
  for (std::size_t k = 0; k < std::size(cells); ++k) {
    if (k) row += ',';
    row += cells[k];
  }
  return row;
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw std::invalid_argument("unknown format '" + s + "' (expected json or csv)");
}

std::string render(const std::vector<RunReport>& reports, Format format) {
  if (format == Format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    return arr.dump(2) + "\n";
  }
  std::string out = RunReport::csv_header() + "\n";
  for (const auto& r : reports) out += r.csv_row() + "\n";
  return out;
}

}  // namespace hobipb::cli
