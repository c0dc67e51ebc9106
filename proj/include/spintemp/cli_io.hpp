#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spintemp/hamiltonian.hpp"
#include "spintemp/scan.hpp"

// Command-line frontend and data emission. Subcommands: thermo, concurrence,
// threshold, spectrum, units. Output is CSV (12 significant digits) or JSON
// (same schema as arrays of objects), chosen by --format or the --out
// extension. Exit codes: 0 success, 2 usage error, 1 numeric/IO failure.

namespace spintemp {

// Flag misuse (unknown preset, malformed grid, missing flag, ...): exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { Thermo, Concurrence, Threshold, Spectrum, Units };
enum class OutputFormat { Csv, Json };

// Inputs of the `units` subcommand; every field is optional and only the
// conversions justified by the provided fields are emitted.
struct UnitsRequest {
  std::optional<double> gamma_khz_per_gauss;
  std::optional<double> r12_angstrom;
  std::optional<double> field_gauss;
  std::optional<double> temperature_kelvin;
  std::optional<double> omega_d_khz;
  std::optional<double> beta;
};

struct RunConfig {
  Command command = Command::Thermo;
  std::string system_spec = "chain6";  // preset name or custom:<path>
  bool full_dipolar = false;
  std::string coords_path;
  char field_axis = 'z';
  HamiltonianForm form = HamiltonianForm::Transverse;
  std::vector<double> alphas{1.0};
  SweepGrid grid = SweepGrid::default_grid();
  std::pair<int, int> pair{1, 2};
  std::string output_path;  // empty = stdout (units only)
  OutputFormat format = OutputFormat::Csv;
  UnitsRequest units;
};

// Pure parsing helpers, each throwing UsageError with a distinct message.
SweepGrid parse_grid(const std::string& text);            // "min:max:count"
std::vector<double> parse_alpha_list(const std::string& text);  // "a,b,c"
std::pair<int, int> parse_pair(const std::string& text);  // "j,k"

// Coordinate file: one "x y z" triple per line, blank lines and lines
// starting with '#' ignored; units of the nearest-neighbour distance.
std::vector<Eigen::Vector3d> load_coords(const std::string& path);

// Preset registry lookup; throws UsageError("unknown preset ...") otherwise.
SpinSystem resolve_system(const std::string& spec);

// argv without the program name -> validated config; std::nullopt means help
// was requested and printed (exit 0).
std::optional<RunConfig> parse_args(const std::vector<std::string>& args);

// Tabular results carried to the emitters; cells are numbers except for the
// threshold table's system label.
struct DataTable {
  std::vector<std::string> columns;
  using Cell = std::variant<double, std::string>;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double value);  // %.12g
void write_csv(const DataTable& table, std::ostream& out);
void write_json(const DataTable& table, std::ostream& out);
void write_table(const DataTable& table, const std::string& path,
                 OutputFormat format);

// Execute a parsed configuration (throws on failure).
void run(const RunConfig& config);

// Full command-line entry: parse, run, map exceptions to exit codes.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, char** argv);

}  // namespace spintemp
