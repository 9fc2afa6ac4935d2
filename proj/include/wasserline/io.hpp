#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>
#include "wasserline/dpm.hpp"
#include "wasserline/dyadic_bounds.hpp"
#include "wasserline/measures.hpp"

namespace wasserline {

// 17 significant digits, round-trip safe.
std::string format_number(double value);

// Two-column `atom,weight` CSV with header, atoms ascending.
void write_measure_csv(std::ostream& out, const DiscreteMeasure& measure);
void write_measure_csv(const std::string& path, const DiscreteMeasure& measure);

// Reads either an `atom,weight` file or a single-column sample (optional
// header); the latter becomes the empirical measure. Throws DataError.
DiscreteMeasure read_measure_csv(std::istream& in);
DiscreteMeasure read_measure_csv(const std::string& path);

// Single-column numeric CSV, optional header line.
std::vector<double> read_values_csv(std::istream& in);
std::vector<double> read_values_csv(const std::string& path);
void write_values_csv(std::ostream& out, const std::vector<double>& values,
                      const std::string& header = "value");
void write_values_csv(const std::string& path, const std::vector<double>& values,
                      const std::string& header = "value");

nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const ChainDiagnostics& diagnostics);
nlohmann::json to_json(const TailMassReport& report);

}  // namespace wasserline
