#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "oracle_utils.hpp"
#include "spintemp/cli_io.hpp"

using namespace spintemp;
using oracle::adiff;
using oracle::contains;
using oracle::thrown_message;

namespace {

// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("spintemp-test-" + std::to_string(++counter) + "-" +
            std::to_string(
                std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

// Numeric CSV body (after the header) as a row-major table.
std::vector<std::vector<double>> csv_numbers(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<double> row;
    std::istringstream stream(lines[i]);
    std::string cell;
    while (std::getline(stream, cell, ',')) {
      row.push_back(std::strtod(cell.c_str(), nullptr));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("parse_grid reads min:max:count") {
  const SweepGrid grid = parse_grid("-4:4:801");
  CHECK(grid.beta_min == -4.0);
  CHECK(grid.beta_max == 4.0);
  CHECK(grid.n_points == 801);

  const SweepGrid small = parse_grid("0.5:1.5:2");
  CHECK(small.beta_min == 0.5);
  CHECK(small.n_points == 2);

  CHECK_THROWS_AS(parse_grid("1:2"), UsageError);
  CHECK_THROWS_AS(parse_grid("1:2:3:4"), UsageError);
  CHECK_THROWS_AS(parse_grid("a:2:3"), UsageError);
  CHECK_THROWS_AS(parse_grid("1:b:3"), UsageError);
  CHECK_THROWS_AS(parse_grid("1:2:2.5"), UsageError);
  CHECK_THROWS_AS(parse_grid("2:1:5"), UsageError);   // inverted interval
  CHECK_THROWS_AS(parse_grid("1:2:1"), UsageError);   // too few points
  CHECK_THROWS_AS(parse_grid(""), UsageError);
  CHECK(contains(thrown_message([] { parse_grid("oops"); }), "grid"));
}

TEST_CASE("parse_alpha_list reads comma-separated values") {
  const std::vector<double> alphas = parse_alpha_list("0.5,1,1.5");
  REQUIRE(alphas.size() == 3);
  CHECK(alphas[0] == 0.5);
  CHECK(alphas[1] == 1.0);
  CHECK(alphas[2] == 1.5);

  CHECK(parse_alpha_list("-2.5").front() == -2.5);
  CHECK_THROWS_AS(parse_alpha_list(""), UsageError);
  CHECK_THROWS_AS(parse_alpha_list("1,,2"), UsageError);
  CHECK_THROWS_AS(parse_alpha_list("1,x"), UsageError);
  CHECK_THROWS_AS(parse_alpha_list("inf"), UsageError);
}

TEST_CASE("parse_pair reads two distinct site indices") {
  CHECK(parse_pair("1,3") == std::pair<int, int>{1, 3});
  CHECK(parse_pair("4,2") == std::pair<int, int>{4, 2});
  CHECK_THROWS_AS(parse_pair("3"), UsageError);
  CHECK_THROWS_AS(parse_pair("1,2,3"), UsageError);
  CHECK_THROWS_AS(parse_pair("1,1"), UsageError);
  CHECK_THROWS_AS(parse_pair("1,a"), UsageError);
  CHECK_THROWS_AS(parse_pair("1.5,2"), UsageError);
}

TEST_CASE("load_coords parses triples, comments, and blank lines") {
  TempDir dir;
  const std::string path = dir.file("coords.txt");

  SUBCASE("well-formed file") {
    write_file(path,
               "# an x-aligned chain\n"
               "0 0 0\n"
               "\n"
               "1.0 0.0 0.0   # second spin\n"
               "2 0 0\n");
    const std::vector<Eigen::Vector3d> coords = load_coords(path);
    REQUIRE(coords.size() == 3);
    CHECK(coords[1] == Eigen::Vector3d(1.0, 0.0, 0.0));
    CHECK(coords[2] == Eigen::Vector3d(2.0, 0.0, 0.0));
  }
  SUBCASE("wrong arity is reported with the line number") {
    write_file(path, "0 0 0\n1 0\n");
    const std::string msg = thrown_message([&] { load_coords(path); });
    CHECK(contains(msg, "line 2"));
    CHECK(contains(msg, "three numbers"));
  }
  SUBCASE("four numbers on a line are rejected") {
    write_file(path, "0 0 0 0\n");
    CHECK_THROWS_AS(load_coords(path), std::runtime_error);
  }
  SUBCASE("empty file is rejected") {
    write_file(path, "# nothing but comments\n\n");
    CHECK_THROWS_AS(load_coords(path), std::runtime_error);
  }
  SUBCASE("missing file is rejected") {
    CHECK_THROWS_AS(load_coords(dir.file("missing.txt")), std::runtime_error);
  }
}

TEST_CASE("resolve_system knows the presets") {
  CHECK(resolve_system("chain6").n_spins == 6);
  CHECK(resolve_system("chain8").n_spins == 8);
  CHECK(resolve_system("ring4").n_spins == 4);
  CHECK(resolve_system("ring6").n_spins == 6);
  CHECK(resolve_system("ring6").geometry == Geometry::Ring);

  const std::string msg =
      thrown_message([] { resolve_system("chain99"); });
  CHECK(contains(msg, "unknown preset"));
  CHECK_THROWS_AS(resolve_system("chain99"), UsageError);

  TempDir dir;
  write_file(dir.file("pair.txt"), "0 0 0\n0 0 1\n");
  const SpinSystem custom = resolve_system("custom:" + dir.file("pair.txt"));
  CHECK(custom.n_spins == 2);
  CHECK(custom.couplings(0, 1) == 1.0);
}

TEST_CASE("parse_args populates the run configuration") {
  SUBCASE("thermo with explicit flags; separated negative grid value") {
    const auto cfg = parse_args({"thermo", "--system", "ring4", "--alpha", "1",
                                 "--beta", "-4:4:801", "--out", "fig.csv"});
    REQUIRE(cfg.has_value());
    CHECK(cfg->command == Command::Thermo);
    CHECK(cfg->system_spec == "ring4");
    CHECK(cfg->alphas == std::vector<double>{1.0});
    CHECK(cfg->grid.beta_min == -4.0);
    CHECK(cfg->grid.beta_max == 4.0);
    CHECK(cfg->grid.n_points == 801);
    CHECK(cfg->output_path == "fig.csv");
    CHECK(cfg->format == OutputFormat::Csv);
    CHECK(cfg->form == HamiltonianForm::Transverse);
  }
  SUBCASE("glued negative grid value works identically") {
    const auto cfg = parse_args(
        {"thermo", "--system", "ring4", "--beta=-2:2:21", "--out", "x.csv"});
    REQUIRE(cfg.has_value());
    CHECK(cfg->grid.beta_min == -2.0);
    CHECK(cfg->grid.n_points == 21);
  }
  SUBCASE("defaults: chain6, alpha 1, default grid, pair 1,2") {
    const auto cfg = parse_args({"thermo", "--out", "t.csv"});
    REQUIRE(cfg.has_value());
    CHECK(cfg->system_spec == "chain6");
    CHECK(cfg->alphas == std::vector<double>{1.0});
    CHECK(cfg->grid.n_points == 801);
    CHECK(cfg->pair == std::pair<int, int>{1, 2});
  }
  SUBCASE("concurrence and threshold default to the three-alpha family") {
    const auto conc = parse_args({"concurrence", "--out", "c.csv"});
    REQUIRE(conc.has_value());
    CHECK(conc->alphas == std::vector<double>{0.5, 1.0, 1.5});
    const auto thr = parse_args({"threshold", "--out", "t.json"});
    REQUIRE(thr.has_value());
    CHECK(thr->alphas == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(thr->format == OutputFormat::Json);  // inferred from extension
  }
  SUBCASE("explicit --format overrides the extension") {
    const auto cfg = parse_args(
        {"thermo", "--out", "data.json", "--format", "csv"});
    REQUIRE(cfg.has_value());
    CHECK(cfg->format == OutputFormat::Csv);
    CHECK_THROWS_AS(
        parse_args({"thermo", "--out", "x.csv", "--format", "yaml"}),
        UsageError);
  }
  SUBCASE("secular form is selectable") {
    const auto cfg = parse_args(
        {"concurrence", "--form", "secular", "--pair", "2,5", "--out", "c.csv"});
    REQUIRE(cfg.has_value());
    CHECK(cfg->form == HamiltonianForm::Secular);
    CHECK(cfg->pair == std::pair<int, int>{2, 5});
    CHECK_THROWS_AS(
        parse_args({"concurrence", "--form", "banana", "--out", "c.csv"}),
        UsageError);
  }
  SUBCASE("usage errors") {
    CHECK_THROWS_AS(parse_args({}), UsageError);  // missing subcommand
    CHECK_THROWS_AS(parse_args({"frobnicate", "--out", "x.csv"}), UsageError);
    CHECK_THROWS_AS(parse_args({"thermo"}), UsageError);  // --out required
    CHECK_THROWS_AS(
        parse_args({"thermo", "--system", "chain99", "--out", "x.csv"}),
        UsageError);
    CHECK_THROWS_AS(
        parse_args({"thermo", "--alpha", "0.5,1", "--out", "x.csv"}),
        UsageError);  // thermo takes one alpha
    CHECK_THROWS_AS(
        parse_args({"spectrum", "--alpha", "1,2", "--out", "x.csv"}),
        UsageError);
    CHECK_THROWS_AS(
        parse_args({"thermo", "--beta", "4:-4:801", "--out", "x.csv"}),
        UsageError);
    CHECK_THROWS_AS(
        parse_args({"thermo", "--full-dipolar", "--out", "x.csv"}),
        UsageError);  // --coords missing
    CHECK_THROWS_AS(
        parse_args({"thermo", "--coords", "c.txt", "--out", "x.csv"}),
        UsageError);  // --coords without --full-dipolar
    CHECK_THROWS_AS(
        parse_args({"thermo", "--full-dipolar", "--coords", "c.txt",
                    "--field-axis", "w", "--out", "x.csv"}),
        UsageError);
  }
  SUBCASE("help returns nullopt after printing") {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    const auto cfg = parse_args({"--help"});
    std::cout.rdbuf(old);
    CHECK_FALSE(cfg.has_value());
    CHECK(contains(captured.str(), "thermo"));
    CHECK(contains(captured.str(), "concurrence"));
    CHECK(contains(captured.str(), "threshold"));
    CHECK(contains(captured.str(), "spectrum"));
    CHECK(contains(captured.str(), "units"));
  }
}

TEST_CASE("format_double emits 12 significant digits") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-4.0) == "-4");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(2.00285047) == "2.00285047");
  CHECK(format_double(1.5117099466690112e-06) == "1.51170994667e-06");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("write_csv produces exact bytes, quoting only when needed") {
  DataTable table;
  table.columns = {"system", "value"};
  table.rows.push_back({std::string("ring4"), 0.5});
  table.rows.push_back({std::string("with,comma"), -1.25});
  table.rows.push_back({std::string("with\"quote"), 3.0});

  std::ostringstream out;
  write_csv(table, out);
  CHECK(out.str() ==
        "system,value\n"
        "ring4,0.5\n"
        "\"with,comma\",-1.25\n"
        "\"with\"\"quote\",3\n");
}

TEST_CASE("write_json mirrors the table as an array of objects") {
  DataTable table;
  table.columns = {"beta", "label"};
  table.rows.push_back({-0.5, std::string("a")});
  table.rows.push_back({std::numeric_limits<double>::quiet_NaN(),
                        std::string("b")});

  std::ostringstream out;
  write_json(table, out);
  const nlohmann::json parsed = nlohmann::json::parse(out.str());
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0]["beta"].get<double>() == -0.5);
  CHECK(parsed[0]["label"].get<std::string>() == "a");
  CHECK(parsed[1]["beta"].is_null());  // non-finite serializes as null
  // Column order is preserved in the emitted text.
  CHECK(out.str().find("\"beta\"") < out.str().find("\"label\""));
}

TEST_CASE("cli_main: thermo end to end") {
  TempDir dir;
  const std::string out = dir.file("thermo.csv");
  const int code = cli_main({"thermo", "--system", "ring4", "--alpha", "1",
                             "--beta", "-1:1:11", "--out", out});
  REQUIRE(code == 0);

  const std::string text = read_file(out);
  const std::vector<std::string> lines = lines_of(text);
  REQUIRE(lines.size() == 12);
  CHECK(lines[0] == "beta,energy,entropy,heat_capacity");

  const auto rows = csv_numbers(text);
  REQUIRE(rows.size() == 11);
  CHECK(rows.front()[0] == -1.0);
  CHECK(rows.back()[0] == 1.0);
  // beta = 0 row: maximally mixed values.
  CHECK(adiff(rows[5][0], 0.0) <= 1e-15);
  CHECK(adiff(rows[5][2], 4.0 * std::log(2.0)) <= 1e-10);

  SUBCASE("reruns are byte-identical") {
    const std::string out2 = dir.file("thermo2.csv");
    REQUIRE(cli_main({"thermo", "--system", "ring4", "--alpha", "1", "--beta",
                      "-1:1:11", "--out", out2}) == 0);
    CHECK(read_file(out2) == text);
  }
}

TEST_CASE("cli_main: concurrence sweep covers every requested alpha") {
  TempDir dir;
  const std::string out = dir.file("conc.csv");
  REQUIRE(cli_main({"concurrence", "--system", "ring4", "--alpha", "0.5,1",
                    "--beta", "-2:2:41", "--out", out}) == 0);
  const std::string text = read_file(out);
  const std::vector<std::string> lines = lines_of(text);
  CHECK(lines[0] == "beta,alpha,q,concurrence");
  const auto rows = csv_numbers(text);
  REQUIRE(rows.size() == 2 * 41);
  CHECK(rows[0][1] == 0.5);
  CHECK(rows[41][1] == 1.0);
  for (const auto& row : rows) {
    CHECK(row[3] >= 0.0);
    CHECK(row[3] <= 1.0);
    CHECK(row[3] >= row[2]);  // concurrence = max(q, 0) >= q
  }
}

TEST_CASE("cli_main: threshold JSON output") {
  TempDir dir;
  const std::string out = dir.file("threshold.json");
  REQUIRE(cli_main({"threshold", "--system", "ring4", "--alpha", "1", "--out",
                    out}) == 0);
  const nlohmann::json parsed = nlohmann::json::parse(read_file(out));
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0]["system"].get<std::string>() == "ring4");
  CHECK(parsed[0]["alpha"].get<double>() == 1.0);
  CHECK(adiff(parsed[0]["beta_star_pos"].get<double>(), 2.01130303) <= 1e-4);
  CHECK(adiff(parsed[0]["beta_star_neg"].get<double>(), -0.80817746) <= 1e-4);
}

TEST_CASE("cli_main: threshold reports a missing boundary as null/nan") {
  TempDir dir;
  write_file(dir.file("pair.txt"), "0 0 0\n0 0 1\n");
  const std::string spec = "custom:" + dir.file("pair.txt");

  const std::string json_out = dir.file("threshold.json");
  REQUIRE(cli_main({"threshold", "--system", spec, "--form", "secular",
                    "--alpha", "1", "--out", json_out}) == 0);
  const nlohmann::json parsed = nlohmann::json::parse(read_file(json_out));
  CHECK(parsed[0]["beta_star_pos"].is_number());
  CHECK(parsed[0]["beta_star_neg"].is_null());

  const std::string csv_out = dir.file("threshold.csv");
  REQUIRE(cli_main({"threshold", "--system", spec, "--form", "secular",
                    "--alpha", "1", "--out", csv_out}) == 0);
  const std::vector<std::string> lines = lines_of(read_file(csv_out));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "system,alpha,beta_star_pos,beta_star_neg");
  CHECK(contains(lines[1], "nan"));
}

TEST_CASE("cli_main: spectrum emits ascending eigenvalues") {
  TempDir dir;
  const std::string out = dir.file("spectrum.csv");
  REQUIRE(cli_main({"spectrum", "--system", "ring4", "--alpha", "1", "--out",
                    out}) == 0);
  const auto rows = csv_numbers(read_file(out));
  REQUIRE(rows.size() == 16);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i][0] == double(i));
    if (i > 0) CHECK(rows[i][1] >= rows[i - 1][1]);
  }
}

TEST_CASE("cli_main: full-dipolar route matches the custom-coordinate "
          "transverse route for a perpendicular chain") {
  TempDir dir;
  write_file(dir.file("xchain3.txt"), "0 0 0\n1 0 0\n2 0 0\n");
  const std::string full_out = dir.file("full.csv");
  const std::string custom_out = dir.file("custom.csv");

  REQUIRE(cli_main({"thermo", "--full-dipolar", "--coords",
                    dir.file("xchain3.txt"), "--field-axis", "z", "--alpha",
                    "1", "--beta", "-2:2:21", "--out", full_out}) == 0);
  REQUIRE(cli_main({"thermo", "--system", "custom:" + dir.file("xchain3.txt"),
                    "--alpha", "1", "--beta", "-2:2:21", "--out",
                    custom_out}) == 0);

  const auto full_rows = csv_numbers(read_file(full_out));
  const auto custom_rows = csv_numbers(read_file(custom_out));
  REQUIRE(full_rows.size() == custom_rows.size());
  for (std::size_t i = 0; i < full_rows.size(); ++i) {
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(adiff(full_rows[i][c], custom_rows[i][c]) <= 1e-9);
    }
  }
}

TEST_CASE("cli_main: units subcommand") {
  SUBCASE("estimate and conversions to a file") {
    TempDir dir;
    const std::string out = dir.file("units.csv");
    REQUIRE(cli_main({"units", "--omega-d-khz", "100", "--gamma", "4.0055",
                      "--r12", "1.5", "--field", "8", "--temperature", "1e-6",
                      "--beta", "2", "--out", out}) == 0);
    const std::string text = read_file(out);
    CHECK(contains(text, "quantity,value"));
    CHECK(contains(text, "estimate_temperature_kelvin,4.79924307043e-06"));
    CHECK(contains(text, "dipolar_frequency_rad_per_s,197913.579001"));
    CHECK(contains(text, "hbar_d_over_k_kelvin,1.51170994667e-06"));
    CHECK(contains(text, "alpha,1.01730457809"));
    CHECK(contains(text, "beta,1.51170994667"));
    CHECK(contains(text, "temperature_kelvin_at_beta,7.55854973335e-07"));
  }
  SUBCASE("prints to stdout when --out is absent") {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    const int code = cli_main({"units", "--omega-d-khz", "100"});
    std::cout.rdbuf(old);
    REQUIRE(code == 0);
    CHECK(contains(captured.str(), "estimate_temperature_kelvin"));
  }
  SUBCASE("physical conversions demand gamma and r12") {
    CHECK(cli_main({"units", "--field", "8"}) == 2);
    CHECK(cli_main({"units"}) == 2);  // nothing to compute
  }
}

TEST_CASE("cli_main maps failures to exit codes") {
  TempDir dir;

  SUBCASE("usage errors exit 2") {
    CHECK(cli_main({"thermo", "--system", "chain99", "--out",
                    dir.file("x.csv")}) == 2);
    CHECK(cli_main({"thermo", "--beta", "banana", "--out",
                    dir.file("x.csv")}) == 2);
    CHECK(cli_main({"thermo", "--no-such-flag", "--out",
                    dir.file("x.csv")}) == 2);
    CHECK(cli_main({}) == 2);
    CHECK(cli_main({"concurrence", "--system", "ring4", "--pair", "1,9",
                    "--out", dir.file("x.csv")}) == 2);
  }
  SUBCASE("numeric/IO failures exit 1") {
    write_file(dir.file("coincident.txt"), "0 0 0\n0 0 0\n");
    CHECK(cli_main({"thermo", "--full-dipolar", "--coords",
                    dir.file("coincident.txt"), "--out",
                    dir.file("x.csv")}) == 1);
    CHECK(cli_main({"thermo", "--full-dipolar", "--coords",
                    dir.file("missing.txt"), "--out", dir.file("x.csv")}) ==
          1);
    CHECK(cli_main({"thermo", "--system", "ring4", "--out",
                    (dir.path / "no-such-subdir" / "x.csv").string()}) == 1);
  }
  SUBCASE("help exits 0") {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    CHECK(cli_main({"--help"}) == 0);
    std::cout.rdbuf(old);
  }
}

TEST_CASE("cli_main: documented figure-style invocation") {
  TempDir dir;
  const std::string out = dir.file("fig2.csv");
  REQUIRE(cli_main({"thermo", "--system", "chain6", "--alpha", "1", "--beta",
                    "-4:4:801", "--out", out}) == 0);
  const auto rows = csv_numbers(read_file(out));
  REQUIRE(rows.size() == 801);
  CHECK(rows.front()[0] == -4.0);
  CHECK(rows[400][0] == 0.0);
  CHECK(rows.back()[0] == 4.0);
}
