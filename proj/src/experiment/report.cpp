#include "gibbslab/experiment/report.hpp"

#include <fstream>

#include <json.hpp>

#include "gibbslab/csv.hpp"
#include "gibbslab/error.hpp"

namespace gibbslab::experiment {

namespace {

using nlohmann::json;

json estimate_json(const classical::Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_convergence_csv(const std::vector<TemperatureRow>& rows, const ConvergenceResult* result,
                           const std::filesystem::path& path) {
  CsvWriter csv(path, {"T", "lambda", "n_max", "tail_mass", "metric", "k", "value", "std_error", "target",
                       "target_std_error", "aux_hs"});
  for (const auto& row : rows) {
    for (const auto& d : row.distances) {
      csv.cell(row.temperature).cell(row.coupling).cell(row.n_max).cell(row.tail_mass);
      csv.cell(std::string_view("trace_distance")).cell(d.k).cell(d.value).cell(d.std_error);
      csv.cell(0.0).cell(0.0).cell(d.hilbert_schmidt);
      csv.end_row();
    }
    csv.cell(row.temperature).cell(row.coupling).cell(row.n_max).cell(row.tail_mass);
    csv.cell(std::string_view("free_energy")).cell(0).cell(row.free_energy_metric).cell(0.0);
    if (result) {
      csv.cell(result->minus_log_z_r.value).cell(result->minus_log_z_r.std_error);
    } else {
      csv.cell(std::string_view("")).cell(std::string_view(""));
    }
    csv.cell(std::string_view(""));
    csv.end_row();
  }
}

void write_bl_gap_csv(const std::vector<TemperatureRow>& rows, const std::filesystem::path& path) {
  CsvWriter csv(path, {"T", "quantum_rel_ent", "classical_rel_ent", "classical_std_error", "gap", "ess"});
  for (const auto& row : rows) {
    if (!row.berezin_lieb) continue;
    const auto& bl = *row.berezin_lieb;
    csv.cell(row.temperature).cell(bl.quantum).cell(bl.classical.value).cell(bl.classical.std_error);
    csv.cell(bl.gap).cell(bl.ess);
    csv.end_row();
  }
}

ReportPaths emit_report(const ConvergenceResult& result, const std::vector<PropertyCheck>& properties,
                        const std::filesystem::path& dir) {
  ensure_directory(dir);
  ReportPaths paths{dir / "convergence.csv", dir / "bl_gap.csv", dir / "summary.json"};
  write_convergence_csv(result.rows, &result, paths.csv);
  write_bl_gap_csv(result.rows, paths.bl_gap);

  json doc;
  json cfg = json::object();
  for (const auto& [k, v] : config_entries(result.config)) cfg[k] = v;
  doc["config"] = cfg;
  doc["eigenvalues"] = result.basis.eigenvalues;
  doc["classical"] = {
      {"z_r", estimate_json(result.z_r)},
      {"minus_log_z_r", estimate_json(result.minus_log_z_r)},
      {"mean_interaction_free", {{"monte_carlo", estimate_json(result.mean_interaction.monte_carlo)},
                                 {"closed_form", result.mean_interaction.closed_form}}},
      {"ess", result.ess},
      {"exact_moments", result.exact_classical},
  };
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r = {
        {"T", row.temperature},
        {"lambda", row.coupling},
        {"n_max", row.n_max},
        {"dim", row.dim},
        {"tail_mass_free", row.tail_mass},
        {"tail_mass_interacting", row.tail_mass_interacting},
        {"log_z_free", row.log_z_free},
        {"log_z", row.log_z},
        {"free_energy_metric", row.free_energy_metric},
        {"relative_free_energy_gibbs", row.relative_free_energy_gibbs},
        {"particle_number", row.particle_number},
        {"seconds", row.seconds},
    };
    json distances = json::array();
    for (const auto& d : row.distances) {
      distances.push_back({{"k", d.k}, {"value", d.value}, {"std_error", d.std_error}, {"hs", d.hilbert_schmidt}});
    }
    r["distances"] = distances;
    if (row.relative_free_energy_trial) {
      r["trial"] = {{"relative_free_energy", *row.relative_free_energy_trial},
                    {"offending_samples", row.trial_offending_samples},
                    {"lost_mass", row.trial_lost_mass}};
    }
    if (row.berezin_lieb) {
      const auto& bl = *row.berezin_lieb;
      r["berezin_lieb"] = {{"quantum", bl.quantum}, {"classical", estimate_json(bl.classical)},
                           {"gap", bl.gap}, {"ess", bl.ess}, {"degenerate", bl.degenerate}};
    }
    rows.push_back(r);
  }
  doc["rows"] = rows;
  json props = json::array();
  for (const auto& p : properties) props.push_back({{"name", p.name}, {"passed", p.passed}, {"detail", p.detail}});
  doc["properties"] = props;
  doc["seconds"] = result.seconds;
  write_json(doc, paths.summary);
  return paths;
}

void write_selfcheck_json(const std::vector<SelfCheck>& checks, const std::filesystem::path& path) {
  json doc = json::array();
  for (const auto& c : checks) {
    doc.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured},
                   {"tolerance", c.tolerance}, {"detail", c.detail}});
  }
  write_json(doc, path);
}

}  // namespace gibbslab::experiment
