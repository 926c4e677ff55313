#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "holab/report.hpp"

using namespace holab;
using nlohmann::json;

namespace {

AlgebraVector vector_from_options(const std::string& group_id, const std::string& coords,
                                  std::uint64_t seed, double scale) {
  const CompactGroup& G = CompactGroup::of(group_id);
  if (coords.empty()) {
    Rng rng(seed);
    return {random_generic_torus_vector(G, rng, scale), &G};
  }
  Vecd c = Vecd::Zero(G.dim());
  std::istringstream in(coords);
  std::string tok;
  int i = 0;
  while (std::getline(in, tok, ',')) {
    if (i >= G.dim()) throw CLI::ValidationError("--coords", "too many coordinates");
    c[i++] = std::stod(tok);
  }
  return {G.from_coords(c), &G};
}

void write_json(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
}

int cmd_verify(const std::string& config_path, const std::string& filter,
               const std::string& out_dir) {
  const Config cfg =
      config_path.empty() ? Config::parse(default_verify_config()) : Config::parse_file(config_path);
  const RunReport report = run_suite(cfg, filter, out_dir);
  for (const CaseResult& c : report.cases) {
    std::cout << c.id << " " << (c.status == "pass" ? "PASS" : c.status == "skip" ? "SKIP" : "FAIL")
              << "  measured " << c.measured << "  tolerance " << c.tolerance;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  write_json(out_dir + "/report.json", report_to_json(report, true));
  emit_plots(report, out_dir);
  return all_passed(report) ? 0 : 1;
}

ConnectionForm connection_from_config(const Config& cfg, const std::string& section,
                                      const BaseManifold& base, const CompactGroup& G) {
  if (!cfg.has(section)) return zero_connection(base, G);
  if (cfg.has(section, "seed")) {
    Rng rng(cfg.get_u64(section, "seed"));
    const int modes = static_cast<int>(cfg.get_int(section, "modes"));
    const double amp = cfg.get_double(section, "amp");
    return base.kind == BaseManifold::Kind::round_sphere
               ? random_harmonic_connection(base, G, rng, modes, amp)
               : random_fourier_connection(base, G, rng, modes, amp);
  }
  // explicit torus terms: termJ = mu p q amp_c amp_s (component mu of basis J)
  std::vector<FourierTerm2D> c1, c2;
  for (const auto& [key, value] : cfg.entries(section)) {
    if (key.rfind("term", 0) != 0) continue;
    std::istringstream in(value);
    FourierTerm2D t;
    int leg = 0;
    if (!(in >> leg >> t.mu >> t.p >> t.q >> t.amp_c >> t.amp_s))
      throw std::runtime_error("bad connection term '" + value + "' (want: leg mu p q c s)");
    (leg == 0 ? c1 : c2).push_back(t);
  }
  return fourier_connection(base, G, c1, c2);
}

int cmd_holonomy(const std::string& config_path, const std::string& out_path) {
  const Config cfg = Config::parse_file(config_path);
  const CompactGroup& G = CompactGroup::of(cfg.get("group", "id"));
  const BaseManifold base =
      cfg.get("base", "kind") == "round_sphere"
          ? BaseManifold::round_sphere(cfg.get_double("base", "R"))
          : BaseManifold::flat_torus(cfg.get_double("base", "L1"), cfg.get_double("base", "L2"));

  const std::string kind = cfg.get("loop", "kind");
  BaseLoop c = BaseLoop::line(base, Vecd::Zero(2), 1, 0);
  if (kind == "torus_line") {
    Vecd p0(2);
    p0 << cfg.get_double("loop", "x1"), cfg.get_double("loop", "x2");
    c = BaseLoop::line(base, p0, static_cast<int>(cfg.get_int("loop", "m")),
                       static_cast<int>(cfg.get_int("loop", "n")));
  } else if (kind == "torus_circle") {
    Vecd p0(2);
    p0 << cfg.get_double("loop", "x1"), cfg.get_double("loop", "x2");
    c = BaseLoop::circle(base, p0, cfg.get_double("loop", "r"));
  } else if (kind == "sphere_latitude") {
    c = BaseLoop::latitude(base, cfg.get_double("loop", "rho"));
  } else {
    throw std::runtime_error("unknown loop kind " + kind);
  }
  const int N = static_cast<int>(cfg.get_int("loop", "grid"));

  const ConnectionForm omega = connection_from_config(cfg, "connection", base, G);
  const ConnectionForm omega0 = connection_from_config(cfg, "reference", base, G);
  const LoopFrame f = make_frame(c, omega0, N);
  const Mat hol = hol_c(omega, f);
  const Mat direct = hol_c_direct(omega, f);

  json out = {{"schema_version", kSchemaVersion},
              {"group_id", G.id()},
              {"grid", N},
              {"holonomy", mat_to_json(hol)},
              {"factorization_residual", fro_dist(hol, direct)}};
  if (cfg.has("homothety", "xi_seed")) {
    Rng rng(cfg.get_u64("homothety", "xi_seed"));
    const AlgebraLoop xi = random_band_loop(G, rng, N, 3, 0.8);
    const HomothetyReport rep = check_homothety(c, xi, omega0);
    out["homothety"] = {{"speed", rep.speed},
                        {"speed_residual", rep.speed_residual},
                        {"pointwise_residual", rep.pointwise_residual},
                        {"tangent_norm2", rep.tangent_norm2},
                        {"image_norm2", rep.image_norm2},
                        {"ratio", rep.ratio},
                        {"ratio_residual", rep.ratio_residual}};
  }
  write_json(out_path, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holonomy-lab: parallel transport, holonomy and fibre spectra checks"};
  app.require_subcommand(1);

  std::string config_path, filter, out_dir = "out";
  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--config", config_path, "suite config (default: built-in)");
  verify->add_option("--filter", filter, "substring filter on case id/module/operation");
  verify->add_option("--out", out_dir, "output directory");

  std::string loop_path, scheme_name_opt = "rkmk4", out_path = "transport.json";
  int grid = 0;
  CLI::App* transport = app.add_subcommand("transport", "integrate g' = g u(t) for a loop");
  transport->add_option("--loop", loop_path, "AlgebraLoop JSON")->required();
  transport->add_option("--scheme", scheme_name_opt, "rkmk4 | magnus4 | cf4");
  transport->add_option("--grid", grid, "resample grid (needs Fourier tables)");
  transport->add_option("--out", out_path, "output JSON path");

  std::string hol_config, hol_out = "holonomy.json";
  CLI::App* holonomy = app.add_subcommand("holonomy", "holonomy of a connection along a loop");
  holonomy->add_option("--config", hol_config, "holonomy config")->required();
  holonomy->add_option("--out", hol_out, "output JSON path");

  std::string group_id = "su2", coords;
  std::uint64_t seed = 1;
  int K = 4;
  bool skip_numeric = false;
  std::string spectrum_out = "spectrum.csv";
  CLI::App* spectrum = app.add_subcommand("spectrum", "fibre shape-operator spectrum tables");
  spectrum->add_option("--group", group_id, "su2 | su3 | so3");
  spectrum->add_option("--coords", coords, "torus coordinates of v, comma separated");
  spectrum->add_option("--seed", seed, "seed for a random generic v");
  spectrum->add_option("-K,--truncation", K, "mode cutoff");
  spectrum->add_flag("--analytic-only", skip_numeric, "skip the numeric table");
  spectrum->add_option("--out", spectrum_out, "output CSV path");

  double tail_plus = 0.0, tail_minus = 0.0, bound = std::numeric_limits<double>::quiet_NaN();
  int tail_start = 1;
  long long count = 1000000;
  std::string traces_out = "traces.json";
  bool no_table = false;
  CLI::App* traces = app.add_subcommand("traces", "regularized traces of a spectrum");
  traces->add_option("--group", group_id, "su2 | su3 | so3");
  traces->add_option("--coords", coords, "torus coordinates of v");
  traces->add_option("--seed", seed, "seed for a random generic v");
  traces->add_option("-K,--truncation", K, "mode cutoff");
  traces->add_flag("--no-table", no_table, "tail only, no spectrum table");
  traces->add_option("--tail-plus", tail_plus, "positive tail coefficient p (p/k)");
  traces->add_option("--tail-minus", tail_minus, "negative tail coefficient q (q/k)");
  traces->add_option("--tail-start", tail_start, "first tail index");
  traces->add_option("--count", count, "partial sum count");
  traces->add_option("--reference-bound", bound, "bound quoted when the probe exceeds it");
  traces->add_option("--out", traces_out, "output JSON path");

  double radius = M_PI / 4.0;
  int points = 2;
  std::string probe_out = "isoparametric.json";
  CLI::App* iso = app.add_subcommand("isoparametric", "spectral constancy probe");
  iso->add_option("--group", group_id, "su2 | su3 | so3");
  iso->add_option("--radius", radius, "sphere radius; <= 0 probes the point case");
  iso->add_option("-K,--truncation", K, "mode cutoff");
  iso->add_option("--points", points, "preimage sample count");
  iso->add_option("--seed", seed, "probe seed");
  iso->add_option("--grid", grid, "loop grid (default 128)");
  iso->add_option("--out", probe_out, "output JSON path");

  std::string report_path;
  CLI::App* plots = app.add_subcommand("plots", "gnuplot scripts for a verify report");
  plots->add_option("--report", report_path, "report.json from verify; scripts land beside it")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(config_path, filter, out_dir);

    if (transport->parsed()) {
      AlgebraLoop u = loop_from_json(json::parse(read_text_file(loop_path)));
      if (grid > 0 && grid != u.N) {
        if (!u.has_fourier()) compute_fourier(u, u.N / 2 - 1);
        u = loop_from_fourier(*u.group, grid, u.cos_table, u.sin_table);
      }
      const TransportSolution sol = solve_transport(u, scheme_from_string(scheme_name_opt));
      write_json(out_path, transport_to_json(sol));
      return 0;
    }

    if (holonomy->parsed()) return cmd_holonomy(hol_config, hol_out);

    if (spectrum->parsed()) {
      const AlgebraVector v = vector_from_options(group_id, coords, seed, 0.9);
      std::ostringstream csv;
      csv << "eigenvalue,multiplicity,label,source\n";
      spectrum_to_csv(csv, analytic_fiber_spectrum(v, K), "analytic");
      if (!skip_numeric) spectrum_to_csv(csv, numeric_shape_operator(v, K), "numeric");
      write_text_file(spectrum_out, csv.str());
      std::cout << "wrote " << spectrum_out << "\n";
      return 0;
    }

    if (traces->parsed()) {
      SpectrumTable table;
      if (!no_table) {
        const AlgebraVector v = vector_from_options(group_id, coords, seed, 0.9);
        table = analytic_fiber_spectrum(v, K);
      }
      TailModel tail{tail_plus, tail_minus, tail_start};
      const bool with_tail = tail_plus != 0.0 || tail_minus != 0.0;
      const TraceReport rep =
          regularized_traces(table, with_tail ? &tail : nullptr, count, bound);
      write_json(traces_out, trace_to_json(rep));
      return 0;
    }

    if (iso->parsed()) {
      const ProbeReport rep = isoparametric_probe(CompactGroup::of(group_id), radius, K, points,
                                                  seed, grid > 0 ? grid : 128);
      write_json(probe_out, probe_to_json(rep));
      return 0;
    }

    if (plots->parsed()) {
      const RunReport report = report_from_json(json::parse(read_text_file(report_path)));
      // artifacts are read relative to the report's directory
      const std::string dir = std::filesystem::path(report_path).parent_path().string();
      const auto written = emit_plots(report, dir.empty() ? "." : dir);
      for (const std::string& p : written) std::cout << "wrote " << p << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
