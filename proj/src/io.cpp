#include "wasserline/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "wasserline/error.hpp"

namespace wasserline {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                             : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view text, double& value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

struct Table {
  std::size_t columns = 0;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in) {
  Table table;
  std::string line;
  std::size_t line_number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) numeric = numeric && parse_double(fields[k], row[k]);
    if (!numeric) {
      if (first) {
        first = false;
        table.columns = fields.size();
        continue;  // header
      }
      throw DataError("malformed CSV at line " + std::to_string(line_number));
    }
    if (table.columns == 0) table.columns = fields.size();
    if (fields.size() != table.columns) {
      throw DataError("inconsistent column count at line " + std::to_string(line_number));
    }
    first = false;
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw DataError("CSV contains no data rows");
  return table;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                       std::chars_format::general, 17);
  return std::string(buffer.data(), ptr);
}

void write_measure_csv(std::ostream& out, const DiscreteMeasure& measure) {
  out << "atom,weight\n";
  const auto atoms = measure.atoms();
  const auto weights = measure.weights();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    out << format_number(atoms[k]) << ',' << format_number(weights[k]) << '\n';
  }
}

void write_measure_csv(const std::string& path, const DiscreteMeasure& measure) {
  auto out = open_output(path);
  write_measure_csv(out, measure);
}

DiscreteMeasure read_measure_csv(std::istream& in) {
  const Table table = read_table(in);
  if (table.columns == 1) {
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) values.push_back(row[0]);
    return empirical_from_sample(SortedSample::from_unsorted(std::move(values)));
  }
  if (table.columns != 2) throw DataError("expected columns atom,weight");
  std::vector<double> atoms;
  std::vector<double> weights;
  for (const auto& row : table.rows) {
    atoms.push_back(row[0]);
    weights.push_back(row[1]);
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

DiscreteMeasure read_measure_csv(const std::string& path) {
  auto in = open_input(path);
  return read_measure_csv(in);
}

std::vector<double> read_values_csv(std::istream& in) {
  const Table table = read_table(in);
  if (table.columns != 1) throw DataError("expected a single-column CSV");
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) values.push_back(row[0]);
  return values;
}

std::vector<double> read_values_csv(const std::string& path) {
  auto in = open_input(path);
  return read_values_csv(in);
}

void write_values_csv(std::ostream& out, const std::vector<double>& values,
                      const std::string& header) {
  out << header << '\n';
  for (double v : values) out << format_number(v) << '\n';
}

void write_values_csv(const std::string& path, const std::vector<double>& values,
                      const std::string& header) {
  auto out = open_output(path);
  write_values_csv(out, values, header);
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& term : report.terms) terms.push_back({{"scale", term.scale}, {"value", term.value}});
  nlohmann::json constants = nlohmann::json::object();
  for (const auto& [name, value] : report.constants) constants[name] = value;
  return {{"mode", to_string(report.mode)},
          {"p", report.p},
          {"bound", report.bound},
          {"terms", terms},
          {"remainder", report.remainder},
          {"constants", constants},
          {"hypothesis_ok", report.hypothesis_ok}};
}

nlohmann::json to_json(const ChainDiagnostics& diagnostics) {
  return {{"sweeps", diagnostics.sweeps},
          {"alpha", diagnostics.alpha},
          {"kernel_variance", diagnostics.kernel_variance},
          {"occupied", diagnostics.occupied}};
}

nlohmann::json to_json(const TailMassReport& report) {
  nlohmann::json profile = nlohmann::json::array();
  for (std::size_t m = 0; m < report.block_mass.size(); ++m) {
    profile.push_back({{"m", m}, {"mass", report.block_mass[m]}, {"scaled", report.scaled[m]}});
  }
  return {{"K_prime", report.k_prime},
          {"argmax", report.argmax},
          {"profile", profile},
          {"mass_beyond", report.mass_beyond}};
}

}  // namespace wasserline
