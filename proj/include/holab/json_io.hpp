#pragma once

#include <iosfwd>

#include <json.hpp>

#include "holab/spectra.hpp"

namespace holab {

inline constexpr const char* kSchemaVersion = "1";

// Matrices travel as {rows, cols, data} with data a row-major array of
// [re, im] pairs.
nlohmann::json mat_to_json(const Mat& m);
Mat mat_from_json(const nlohmann::json& j);

nlohmann::json loop_to_json(const AlgebraLoop& u);
AlgebraLoop loop_from_json(const nlohmann::json& j);

nlohmann::json transport_to_json(const TransportSolution& sol);
nlohmann::json spectrum_to_json(const SpectrumTable& t);
nlohmann::json trace_to_json(const TraceReport& r);
nlohmann::json probe_to_json(const ProbeReport& r);

// Rows: eigenvalue, multiplicity, label, source.
void spectrum_to_csv(std::ostream& out, const SpectrumTable& t, const std::string& source);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace holab
