#include "holab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace holab {

using nlohmann::json;

json mat_to_json(const Mat& m) {
  json data = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat mat_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const json& data = j.at("data");
  if (static_cast<int>(data.size()) != rows * cols)
    throw std::runtime_error("matrix data length does not match rows * cols");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) {
      const json& e = data[i * cols + c];
      m(i, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

json loop_to_json(const AlgebraLoop& u) {
  json samples = json::array();
  for (const Mat& s : u.samples) samples.push_back(mat_to_json(s));
  return {{"schema_version", kSchemaVersion},
          {"group_id", u.group->id()},
          {"N", u.N},
          {"closed", u.closed},
          {"samples", samples}};
}

AlgebraLoop loop_from_json(const json& j) {
  AlgebraLoop u;
  u.group = &CompactGroup::of(j.at("group_id").get<std::string>());
  u.N = j.at("N").get<int>();
  u.closed = j.at("closed").get<bool>();
  const json& samples = j.at("samples");
  if (static_cast<int>(samples.size()) != u.N + 1)
    throw std::runtime_error("loop sample count does not match N + 1");
  for (const json& s : samples) {
    Mat m = mat_from_json(s);
    if (!u.group->in_algebra(m, 1e-9))
      throw std::runtime_error("loop sample is not a " + u.group->id() + " algebra element");
    u.samples.push_back(std::move(m));
  }
  return u;
}

json transport_to_json(const TransportSolution& sol) {
  return {{"schema_version", kSchemaVersion},
          {"group_id", sol.input.group->id()},
          {"integrator", sol.integrator_id},
          {"grid", sol.input.N},
          {"step_count", sol.step_count},
          {"step_size_warning", sol.step_size_warning},
          {"endpoint", mat_to_json(sol.endpoint.m)},
          {"residual", transport_residual(sol)}};
}

json spectrum_to_json(const SpectrumTable& t) {
  json entries = json::array();
  for (const SpectrumEntry& e : t.entries)
    entries.push_back(
        {{"eigenvalue", e.eigenvalue}, {"multiplicity", e.multiplicity}, {"label", e.label}});
  return {{"schema_version", kSchemaVersion}, {"entries", entries}};
}

namespace {

const char* verdict_name(TraceVerdict v) {
  switch (v) {
    case TraceVerdict::finite: return "finite";
    case TraceVerdict::diverges: return "diverges";
    default: return "inconclusive";
  }
}

json pairs_to_json(const std::vector<std::pair<double, double>>& v) {
  json out = json::array();
  for (const auto& [a, b] : v) out.push_back({a, b});
  return out;
}

}  // namespace

json trace_to_json(const TraceReport& r) {
  json partial = json::array();
  for (const auto& [m, s] : r.hlo_partial_sums) partial.push_back({m, s});
  return {{"schema_version", kSchemaVersion},
          {"ls_norms", pairs_to_json(r.ls_norms)},
          {"paired_trace",
           {{"status", verdict_name(r.hlo_status)},
            {"value", r.hlo_value},
            {"fit", {{"slope", r.hlo_fit.slope}, {"intercept", r.hlo_fit.intercept}, {"r2", r.hlo_fit.r2}}},
            {"partial_sums", partial},
            {"count", r.partial_sum_count}}},
          {"zeta_trace",
           {{"status", verdict_name(r.zeta_status)},
            {"value", r.zeta_value},
            {"residue", r.zeta_residue},
            {"probe", pairs_to_json(r.zeta_probe)}}},
          {"note", r.note}};
}

json probe_to_json(const ProbeReport& r) {
  json spectra = json::array();
  for (const SpectrumTable& t : r.spectra) spectra.push_back(spectrum_to_json(t));
  return {{"schema_version", kSchemaVersion},
          {"mode", r.mode},
          {"radius", r.radius},
          {"truncation", r.K},
          {"point_count", r.point_count},
          {"max_discrepancy", r.max_discrepancy},
          {"min_gradient_norm", r.min_gradient_norm},
          {"transport_gap", r.transport_gap},
          {"max_abs_eigenvalue", r.max_abs_eigenvalue},
          {"spectra", spectra}};
}

void spectrum_to_csv(std::ostream& out, const SpectrumTable& t, const std::string& source) {
  for (const SpectrumEntry& e : t.entries) {
    std::ostringstream row;
    row.precision(17);
    row << e.eigenvalue << "," << e.multiplicity << "," << e.label << "," << source << "\n";
    out << row.str();
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace holab
