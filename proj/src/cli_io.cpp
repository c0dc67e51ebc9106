#include "spintemp/cli_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace spintemp {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double_strict(const std::string& text, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size() || !std::isfinite(value)) {
      throw std::invalid_argument("");
    }
    return value;
  } catch (const std::exception&) {
    throw UsageError("malformed " + what + " '" + text + "'");
  }
}

int parse_int_strict(const std::string& text, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const int value = std::stoi(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw UsageError("malformed " + what + " '" + text + "'");
  }
}

bool is_known_system_spec(const std::string& spec) {
  if (spec == "chain6" || spec == "chain8" || spec == "ring4" ||
      spec == "ring6") {
    return true;
  }
  return spec.rfind("custom:", 0) == 0 && spec.size() > 7;
}

// "--beta -4:4:801": a value starting with '-' followed by a digit would be
// read by the parser as an option name, so glue it onto the preceding long
// flag ("--beta=-4:4:801") before parsing.
std::vector<std::string> normalize_args(const std::vector<std::string>& args) {
  const auto looks_like_negative_value = [](const std::string& s) {
    return s.size() >= 2 && s[0] == '-' &&
           (std::isdigit(static_cast<unsigned char>(s[1])) || s[1] == '.');
  };
  const auto is_bare_long_flag = [](const std::string& s) {
    return s.size() > 2 && s.rfind("--", 0) == 0 &&
           s.find('=') == std::string::npos;
  };
  std::vector<std::string> out;
  out.reserve(args.size());
  for (const std::string& token : args) {
    if (!out.empty() && looks_like_negative_value(token) &&
        is_bare_long_flag(out.back())) {
      out.back() += "=" + token;
    } else {
      out.push_back(token);
    }
  }
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (const char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

Eigen::Vector3d axis_vector(char axis) {
  switch (axis) {
    case 'x':
      return Eigen::Vector3d::UnitX();
    case 'y':
      return Eigen::Vector3d::UnitY();
    case 'z':
      return Eigen::Vector3d::UnitZ();
    default:
      throw UsageError(std::string("--field-axis must be x, y, or z, got '") +
                       axis + "'");
  }
}

// The system behind a run: either a preset/custom coupling table (the
// truncated pair forms) or raw coordinates (the full dipolar builder).
struct SystemHandle {
  std::optional<SpinSystem> system;
  std::vector<Eigen::Vector3d> coords;
  std::string label;
  int n_spins = 0;
};

SystemHandle acquire_system(const RunConfig& cfg) {
  SystemHandle handle;
  if (cfg.full_dipolar) {
    handle.coords = load_coords(cfg.coords_path);
    handle.label = "full-dipolar:" + cfg.coords_path;
    handle.n_spins = static_cast<int>(handle.coords.size());
  } else {
    handle.system = resolve_system(cfg.system_spec);
    handle.label = cfg.system_spec;
    handle.n_spins = handle.system->n_spins;
  }
  return handle;
}

Spectrum spectrum_of(const SystemHandle& handle, const RunConfig& cfg,
                     double alpha) {
  const ManyBodyOperator h =
      handle.system
          ? build_hamiltonian(*handle.system, alpha, cfg.form)
          : build_full_dipolar(handle.coords, axis_vector(cfg.field_axis),
                               alpha);
  return hermitian_eigendecomposition(h);
}

void check_pair(const RunConfig& cfg, int n_spins) {
  const auto [a, b] = cfg.pair;
  if (a < 1 || a > n_spins || b < 1 || b > n_spins || a == b) {
    throw UsageError("--pair " + std::to_string(a) + "," + std::to_string(b) +
                     " is not a pair of distinct sites in 1.." +
                     std::to_string(n_spins));
  }
}

void emit(const RunConfig& cfg, const DataTable& table) {
  if (cfg.output_path.empty()) {
    write_csv(table, std::cout);
  } else {
    write_table(table, cfg.output_path, cfg.format);
  }
}

void run_thermo(const RunConfig& cfg) {
  const SystemHandle handle = acquire_system(cfg);
  const Spectrum spectrum = spectrum_of(handle, cfg, cfg.alphas.front());
  const std::vector<ThermoPoint> points = sweep_thermo(spectrum, cfg.grid);

  DataTable table;
  table.columns = {"beta", "energy", "entropy", "heat_capacity"};
  for (const ThermoPoint& p : points) {
    table.rows.push_back({p.beta, p.energy, p.entropy, p.heat_capacity});
  }
  emit(cfg, table);
}

void run_concurrence(const RunConfig& cfg) {
  const SystemHandle handle = acquire_system(cfg);
  check_pair(cfg, handle.n_spins);

  DataTable table;
  table.columns = {"beta", "alpha", "q", "concurrence"};
  for (const double alpha : cfg.alphas) {
    const Spectrum spectrum = spectrum_of(handle, cfg, alpha);
    const std::vector<ConcurrencePoint> points =
        sweep_concurrence(spectrum, alpha, cfg.grid, cfg.pair);
    for (const ConcurrencePoint& p : points) {
      table.rows.push_back({p.beta, p.alpha, p.q_value, p.concurrence});
    }
  }
  emit(cfg, table);
}

void run_threshold(const RunConfig& cfg) {
  const SystemHandle handle = acquire_system(cfg);
  check_pair(cfg, handle.n_spins);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  DataTable table;
  table.columns = {"system", "alpha", "beta_star_pos", "beta_star_neg"};
  for (const double alpha : cfg.alphas) {
    const Spectrum spectrum = spectrum_of(handle, cfg, alpha);
    const ThresholdComponent pos =
        find_threshold(spectrum, BoundarySide::Positive, cfg.pair);
    const ThresholdComponent neg =
        find_threshold(spectrum, BoundarySide::Negative, cfg.pair);
    table.rows.push_back(
        {handle.label, alpha,
         pos.status == ThresholdStatus::Found ? pos.beta_star : nan,
         neg.status == ThresholdStatus::Found ? neg.beta_star : nan});
  }
  emit(cfg, table);
}

void run_spectrum(const RunConfig& cfg) {
  const SystemHandle handle = acquire_system(cfg);
  const Spectrum spectrum = spectrum_of(handle, cfg, cfg.alphas.front());

  DataTable table;
  table.columns = {"index", "eigenvalue"};
  for (Eigen::Index i = 0; i < spectrum.dim(); ++i) {
    table.rows.push_back({static_cast<double>(i), spectrum.eigenvalues(i)});
  }
  emit(cfg, table);
}

void run_units(const RunConfig& cfg) {
  const UnitsRequest& req = cfg.units;
  DataTable table;
  table.columns = {"quantity", "value"};

  if (req.omega_d_khz) {
    table.rows.push_back(
        {std::string("estimate_temperature_kelvin"),
         estimate_entanglement_temperature(*req.omega_d_khz * 1e3)});
  }

  const bool physical_requested = req.gamma_khz_per_gauss || req.r12_angstrom ||
                                  req.field_gauss || req.temperature_kelvin ||
                                  req.beta;
  if (physical_requested) {
    if (!req.gamma_khz_per_gauss || !req.r12_angstrom) {
      throw UsageError(
          "units: --gamma and --r12 are required for physical conversions");
    }
    PhysicalParams params{*req.gamma_khz_per_gauss, *req.r12_angstrom,
                          req.field_gauss.value_or(0.0),
                          req.temperature_kelvin.value_or(0.0)};
    const double d = dipolar_frequency(params);
    table.rows.push_back({std::string("dipolar_frequency_rad_per_s"), d});
    table.rows.push_back({std::string("hbar_d_over_k_kelvin"),
                          constants::hbar_joule_s * d /
                              constants::boltzmann_joule_per_kelvin});
    if (req.field_gauss) {
      // alpha does not involve the temperature; substitute a dummy T so the
      // combined conversion can run even when only the field is given.
      PhysicalParams alpha_params = params;
      if (alpha_params.temperature_kelvin == 0.0) {
        alpha_params.temperature_kelvin = 1.0;
      }
      table.rows.push_back({std::string("alpha"),
                            dimensionless_from_physical(alpha_params).alpha});
    }
    if (req.temperature_kelvin) {
      table.rows.push_back(
          {std::string("beta"), dimensionless_from_physical(params).beta});
    }
    if (req.beta) {
      table.rows.push_back({std::string("temperature_kelvin_at_beta"),
                            temperature_from_beta(params, *req.beta)});
    }
  }

  if (table.rows.empty()) {
    throw UsageError(
        "units: nothing to compute; pass --omega-d-khz and/or --gamma --r12 "
        "with --field/--temperature/--beta");
  }
  emit(cfg, table);
}

}  // namespace

SweepGrid parse_grid(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3) {
    throw UsageError("malformed grid '" + text + "' (expected min:max:count)");
  }
  const double beta_min = parse_double_strict(parts[0], "grid minimum");
  const double beta_max = parse_double_strict(parts[1], "grid maximum");
  const int count = parse_int_strict(parts[2], "grid count");
  try {
    return SweepGrid(beta_min, beta_max, count);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> alphas;
  for (const std::string& part : split(text, ',')) {
    alphas.push_back(parse_double_strict(part, "alpha value"));
  }
  if (alphas.empty()) throw UsageError("empty alpha list");
  return alphas;
}

std::pair<int, int> parse_pair(const std::string& text) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 2) {
    throw UsageError("malformed pair '" + text + "' (expected j,k)");
  }
  const int a = parse_int_strict(parts[0], "pair site");
  const int b = parse_int_strict(parts[1], "pair site");
  if (a == b) throw UsageError("pair sites must be distinct, got " + text);
  return {a, b};
}

std::vector<Eigen::Vector3d> load_coords(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read coordinate file '" + path + "'");
  }
  std::vector<Eigen::Vector3d> coords;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    double x = 0, y = 0, z = 0;
    if (!(fields >> x)) continue;  // blank or comment-only line
    std::string extra;
    if (!(fields >> y >> z) || (fields >> extra)) {
      throw std::runtime_error("coordinate file '" + path + "' line " +
                               std::to_string(lineno) +
                               ": expected exactly three numbers per spin");
    }
    coords.emplace_back(x, y, z);
  }
  if (coords.empty()) {
    throw std::runtime_error("coordinate file '" + path +
                             "' contains no coordinates");
  }
  return coords;
}

SpinSystem resolve_system(const std::string& spec) {
  if (spec == "chain6") return SpinSystem::chain(6);
  if (spec == "chain8") return SpinSystem::chain(8);
  if (spec == "ring4") return SpinSystem::ring(4);
  if (spec == "ring6") return SpinSystem::ring(6);
  if (spec.rfind("custom:", 0) == 0 && spec.size() > 7) {
    return SpinSystem::custom(load_coords(spec.substr(7)));
  }
  throw UsageError("unknown preset '" + spec +
                   "' (available: chain6, chain8, ring4, ring6, "
                   "custom:<path>)");
}

std::optional<RunConfig> parse_args(const std::vector<std::string>& args) {
  CLI::App app{
      "spintemp: thermodynamics and pair entanglement of dipolar-coupled "
      "spin-1/2 systems over positive and negative inverse temperature"};
  app.require_subcommand(1);

  std::string system = "chain6";
  std::string alpha_spec;
  std::string beta_spec;
  std::string pair_spec = "1,2";
  std::string form_spec = "transverse";
  std::string format_spec;
  std::string out_path;
  std::string coords_path;
  std::string field_axis = "z";
  bool full_dipolar = false;
  UnitsRequest units;

  const auto add_system_options = [&](CLI::App* cmd) {
    cmd->add_option("--system", system,
                    "Preset (chain6, chain8, ring4, ring6) or custom:<path>");
    cmd->add_option("--form", form_spec,
                    "Pair form of the coupling: transverse (default, bonds "
                    "perpendicular to the field) or secular (bonds parallel)");
    cmd->add_flag("--full-dipolar", full_dipolar,
                  "Build the untruncated dipolar Hamiltonian from --coords");
    cmd->add_option("--coords", coords_path,
                    "Coordinate file for --full-dipolar (x y z per line, "
                    "nearest-neighbour units)");
    cmd->add_option("--field-axis", field_axis,
                    "Field direction for --full-dipolar: x, y, or z");
  };
  const auto add_output_options = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--out", out_path, "Output file path");
    if (required) opt->required();
    cmd->add_option("--format", format_spec,
                    "csv or json (default: by --out extension)");
  };

  CLI::App* thermo = app.add_subcommand(
      "thermo", "Sweep beta and emit energy, entropy, heat capacity");
  add_system_options(thermo);
  thermo->add_option("--alpha", alpha_spec, "Zeeman ratio (single value)");
  thermo->add_option("--beta", beta_spec, "Sweep grid min:max:count");
  add_output_options(thermo, true);

  CLI::App* concurrence = app.add_subcommand(
      "concurrence", "Sweep beta and emit the pair concurrence");
  add_system_options(concurrence);
  concurrence->add_option("--alpha", alpha_spec,
                          "Zeeman ratio(s), comma separated");
  concurrence->add_option("--beta", beta_spec, "Sweep grid min:max:count");
  concurrence->add_option("--pair", pair_spec, "Spin pair, e.g. 1,2");
  add_output_options(concurrence, true);

  CLI::App* threshold = app.add_subcommand(
      "threshold",
      "Locate the entanglement boundaries beta* on both sides of beta = 0");
  add_system_options(threshold);
  threshold->add_option("--alpha", alpha_spec,
                        "Zeeman ratio(s), comma separated");
  threshold->add_option("--pair", pair_spec, "Spin pair, e.g. 1,2");
  add_output_options(threshold, true);

  CLI::App* spectrum_cmd =
      app.add_subcommand("spectrum", "Emit the Hamiltonian eigenvalues");
  add_system_options(spectrum_cmd);
  spectrum_cmd->add_option("--alpha", alpha_spec,
                           "Zeeman ratio (single value)");
  add_output_options(spectrum_cmd, true);

  CLI::App* units_cmd = app.add_subcommand(
      "units", "Convert between physical and dimensionless parameters");
  units_cmd->add_option("--gamma", units.gamma_khz_per_gauss,
                        "Gyromagnetic ratio (kHz per gauss)");
  units_cmd->add_option("--r12", units.r12_angstrom,
                        "Nearest-neighbour distance (angstrom)");
  units_cmd->add_option("--field", units.field_gauss, "Field H0 (gauss)");
  units_cmd->add_option("--temperature", units.temperature_kelvin,
                        "Temperature (kelvin, signed)");
  units_cmd->add_option("--beta", units.beta,
                        "Dimensionless inverse temperature to convert back "
                        "to kelvin");
  units_cmd->add_option("--omega-d-khz", units.omega_d_khz,
                        "Dipolar frequency (kHz) for the entanglement "
                        "temperature estimate");
  add_output_options(units_cmd, false);

  std::vector<std::string> reversed = normalize_args(args);
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  if (thermo->parsed()) {
    cfg.command = Command::Thermo;
  } else if (concurrence->parsed()) {
    cfg.command = Command::Concurrence;
  } else if (threshold->parsed()) {
    cfg.command = Command::Threshold;
  } else if (spectrum_cmd->parsed()) {
    cfg.command = Command::Spectrum;
  } else {
    cfg.command = Command::Units;
  }

  cfg.system_spec = system;
  cfg.full_dipolar = full_dipolar;
  cfg.coords_path = coords_path;
  cfg.units = units;
  cfg.output_path = out_path;

  if (cfg.command != Command::Units) {
    if (cfg.full_dipolar && cfg.coords_path.empty()) {
      throw UsageError("--full-dipolar requires --coords <path>");
    }
    if (!cfg.full_dipolar && !cfg.coords_path.empty()) {
      throw UsageError("--coords is only meaningful with --full-dipolar");
    }
    if (!cfg.full_dipolar && !is_known_system_spec(cfg.system_spec)) {
      throw UsageError("unknown preset '" + cfg.system_spec +
                       "' (available: chain6, chain8, ring4, ring6, "
                       "custom:<path>)");
    }
    if (field_axis.size() != 1) {
      throw UsageError("--field-axis must be x, y, or z, got '" + field_axis +
                       "'");
    }
    cfg.field_axis = field_axis[0];
    axis_vector(cfg.field_axis);  // validates

    if (form_spec == "secular") {
      cfg.form = HamiltonianForm::Secular;
    } else if (form_spec == "transverse") {
      cfg.form = HamiltonianForm::Transverse;
    } else {
      throw UsageError("--form must be 'secular' or 'transverse', got '" +
                       form_spec + "'");
    }

    if (alpha_spec.empty()) {
      alpha_spec = (cfg.command == Command::Concurrence ||
                    cfg.command == Command::Threshold)
                       ? "0.5,1,1.5"
                       : "1";
    }
    cfg.alphas = parse_alpha_list(alpha_spec);
    if ((cfg.command == Command::Thermo || cfg.command == Command::Spectrum) &&
        cfg.alphas.size() != 1) {
      throw UsageError("this subcommand takes a single --alpha value");
    }

    if (!beta_spec.empty()) cfg.grid = parse_grid(beta_spec);
    cfg.pair = parse_pair(pair_spec);
  }

  if (!format_spec.empty()) {
    if (format_spec == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (format_spec == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      throw UsageError("--format must be 'csv' or 'json', got '" +
                       format_spec + "'");
    }
  } else {
    const std::string& p = cfg.output_path;
    cfg.format = (p.size() >= 5 && p.substr(p.size() - 5) == ".json")
                     ? OutputFormat::Json
                     : OutputFormat::Csv;
  }
  return cfg;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

void write_csv(const DataTable& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      if (const double* num = std::get_if<double>(&row[c])) {
        out << format_double(*num);
      } else {
        out << csv_escape(std::get<std::string>(row[c]));
      }
    }
    out << '\n';
  }
}

void write_json(const DataTable& table, std::ostream& out) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json record;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (const double* num = std::get_if<double>(&row[c])) {
        record[table.columns[c]] = *num;  // non-finite serializes as null
      } else {
        record[table.columns[c]] = std::get<std::string>(row[c]);
      }
    }
    records.push_back(std::move(record));
  }
  out << records.dump(2) << '\n';
}

void write_table(const DataTable& table, const std::string& path,
                 OutputFormat format) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  if (format == OutputFormat::Csv) {
    write_csv(table, out);
  } else {
    write_json(table, out);
  }
  out.flush();
  if (!out.good()) {
    throw std::runtime_error("failed while writing output file '" + path +
                             "'");
  }
}

void run(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Thermo:
      run_thermo(cfg);
      return;
    case Command::Concurrence:
      run_concurrence(cfg);
      return;
    case Command::Threshold:
      run_threshold(cfg);
      return;
    case Command::Spectrum:
      run_spectrum(cfg);
      return;
    case Command::Units:
      run_units(cfg);
      return;
  }
  throw std::logic_error("run: unhandled command");
}

int cli_main(const std::vector<std::string>& args) {
  try {
    const std::optional<RunConfig> cfg = parse_args(args);
    if (!cfg) return 0;  // help requested
    run(*cfg);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  return cli_main(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace spintemp
