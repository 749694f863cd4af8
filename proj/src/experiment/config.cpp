#include "gibbslab/experiment/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gibbslab/csv.hpp"
#include "gibbslab/error.hpp"
#include "gibbslab/spectral/basis.hpp"

namespace gibbslab::experiment {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw std::invalid_argument("expected a number for '" + key + "', got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument("expected a nonnegative integer for '" + key + "', got '" + value + "'");
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw std::invalid_argument("empty list for '" + key + "'");
  return out;
}

}  // namespace

std::string kernel_type_name(KernelType type) {
  switch (type) {
    case KernelType::Zero: return "zero";
    case KernelType::Delta: return "delta";
    case KernelType::Gaussian: return "gaussian";
    case KernelType::PointMass: return "point_mass";
  }
  return "unknown";
}

spectral::InteractionKernel KernelConfig::build(const spectral::Grid& grid) const {
  switch (type) {
    case KernelType::Zero: return spectral::InteractionKernel::zero();
    case KernelType::Delta: return spectral::InteractionKernel::delta(g);
    case KernelType::Gaussian: {
      const double amplitude = g;
      const double w = width;
      return spectral::InteractionKernel::bounded(grid, [amplitude, w](double x) {
        return amplitude * std::exp(-0.5 * x * x / (w * w));
      });
    }
    case KernelType::PointMass:
      return {spectral::MixedKernel{{spectral::PointMass{width, g}}, {}}};
  }
  throw std::invalid_argument("unknown kernel type");
}

void ExperimentConfig::validate() const {
  operator_spec.validate();
  if (modes < 1) throw std::invalid_argument("config: K must be >= 1");
  if (temperatures.empty()) throw std::invalid_argument("config: T_schedule is empty");
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    if (!(temperatures[i] > 0.0)) throw std::invalid_argument("config: temperatures must be positive");
    if (i > 0 && !(temperatures[i] > temperatures[i - 1])) {
      throw std::invalid_argument("config: T_schedule must be strictly ascending");
    }
  }
  if (!(coupling_rule > 0.0)) throw std::invalid_argument("config: coupling_rule must be positive");
  if (k_max < 1 || k_max > 3) throw std::invalid_argument("config: k_max must be in 1..3");
  if (mc_samples < 1) throw std::invalid_argument("config: mc_samples must be >= 1");
  if (!(n_max_policy > 0.0 && n_max_policy < 1.0)) throw std::invalid_argument("config: n_max_policy in (0,1)");
  if (trial_samples < 1 || bl_samples < 1) throw std::invalid_argument("config: sample counts must be >= 1");
  if (kernel.g < 0.0) throw std::invalid_argument("config: kernel.g must be >= 0");
  if (kernel.type == KernelType::Gaussian && !(kernel.width > 0.0)) {
    throw std::invalid_argument("config: gaussian kernel needs width > 0");
  }
}

spectral::OneBodySpec ExperimentConfig::resolved_operator() const {
  spectral::OneBodySpec spec = operator_spec;
  if (auto* line = std::get_if<spectral::AnharmonicLine>(&spec.domain); line && !half_width_given) {
    line->half_width = spectral::default_half_width(line->exponent, spec.mass, modes);
  }
  return spec;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::string domain = "interval";
  spectral::Boundary boundary = spectral::Boundary::Dirichlet;
  double exponent = 4.0;
  double half_width = 6.0;

  std::stringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    try {
      if (key == "operator.domain") {
        domain = lower(value);
        if (domain != "interval" && domain != "line") throw std::invalid_argument("operator.domain: interval|line");
      } else if (key == "operator.boundary") {
        const std::string b = lower(value);
        if (b == "dirichlet") boundary = spectral::Boundary::Dirichlet;
        else if (b == "neumann") boundary = spectral::Boundary::Neumann;
        else if (b == "periodic") boundary = spectral::Boundary::Periodic;
        else throw std::invalid_argument("operator.boundary: dirichlet|neumann|periodic");
      } else if (key == "operator.m") {
        c.operator_spec.mass = parse_double(key, value);
      } else if (key == "operator.grid_points") {
        c.operator_spec.grid_points = parse_unsigned(key, value);
      } else if (key == "operator.exponent") {
        exponent = parse_double(key, value);
      } else if (key == "operator.half_width") {
        half_width = parse_double(key, value);
        c.half_width_given = true;
      } else if (key == "kernel.type") {
        const std::string t = lower(value);
        if (t == "zero") c.kernel.type = KernelType::Zero;
        else if (t == "delta") c.kernel.type = KernelType::Delta;
        else if (t == "gaussian") c.kernel.type = KernelType::Gaussian;
        else if (t == "point_mass") c.kernel.type = KernelType::PointMass;
        else throw std::invalid_argument("kernel.type: zero|delta|gaussian|point_mass");
      } else if (key == "kernel.g") {
        c.kernel.g = parse_double(key, value);
      } else if (key == "kernel.width") {
        c.kernel.width = parse_double(key, value);
      } else if (key == "K") {
        c.modes = parse_unsigned(key, value);
      } else if (key == "T_schedule") {
        c.temperatures = parse_list(key, value);
      } else if (key == "coupling_rule") {
        c.coupling_rule = parse_double(key, value);
      } else if (key == "k_max") {
        c.k_max = parse_unsigned(key, value);
      } else if (key == "mc_samples") {
        c.mc_samples = parse_unsigned(key, value);
      } else if (key == "seed") {
        c.seed = parse_unsigned(key, value);
      } else if (key == "n_max_policy") {
        c.n_max_policy = parse_double(key, value);
      } else if (key == "output_dir") {
        c.output_dir = value;
      } else if (key == "trial_samples") {
        c.trial_samples = parse_unsigned(key, value);
      } else if (key == "bl_samples") {
        c.bl_samples = parse_unsigned(key, value);
      } else if (key == "dim_budget") {
        c.dim_budget = parse_unsigned(key, value);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (domain == "line") {
    c.operator_spec.domain = spectral::AnharmonicLine{exponent, half_width};
  } else {
    c.operator_spec.domain = spectral::Interval{boundary};
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& c) {
  std::map<std::string, std::string> out;
  const spectral::OneBodySpec spec = c.resolved_operator();
  if (const auto* line = std::get_if<spectral::AnharmonicLine>(&spec.domain)) {
    out["operator.domain"] = "line";
    out["operator.exponent"] = format_double(line->exponent);
    out["operator.half_width"] = format_double(line->half_width);
  } else {
    out["operator.domain"] = "interval";
    const auto b = std::get<spectral::Interval>(spec.domain).boundary;
    out["operator.boundary"] = b == spectral::Boundary::Dirichlet ? "dirichlet"
                               : b == spectral::Boundary::Neumann ? "neumann"
                                                                  : "periodic";
  }
  out["operator.m"] = format_double(spec.mass);
  out["operator.grid_points"] = std::to_string(spec.grid_points);
  out["kernel.type"] = kernel_type_name(c.kernel.type);
  out["kernel.g"] = format_double(c.kernel.g);
  out["kernel.width"] = format_double(c.kernel.width);
  out["K"] = std::to_string(c.modes);
  std::string schedule;
  for (std::size_t i = 0; i < c.temperatures.size(); ++i) {
    if (i) schedule += ", ";
    schedule += format_double(c.temperatures[i]);
  }
  out["T_schedule"] = schedule;
  out["coupling_rule"] = format_double(c.coupling_rule);
  out["k_max"] = std::to_string(c.k_max);
  out["mc_samples"] = std::to_string(c.mc_samples);
  out["seed"] = std::to_string(c.seed);
  out["n_max_policy"] = format_double(c.n_max_policy);
  out["output_dir"] = c.output_dir.string();
  out["trial_samples"] = std::to_string(c.trial_samples);
  out["bl_samples"] = std::to_string(c.bl_samples);
  out["dim_budget"] = std::to_string(c.dim_budget);
  return out;
}

}  // namespace gibbslab::experiment
