// Command-line front end: sweep (t, nbar1) grids, cross-validate the two
// backends, and emit fringe scans. Exit codes: 0 success, 1 tolerance
// violation, 2 config error, 3 I/O error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wzm/scan.hpp"

namespace {

int run_scan_command(const wzm::ScanConfig& cfg) {
  const wzm::ScanSummary summary = wzm::run_scan(cfg);
  std::cout << "scan: " << summary.rows.size() << " rows -> " << summary.csv_path;
  if (!summary.svg_path.empty()) std::cout << " (chart: " << summary.svg_path << ")";
  std::cout << "\nscan: max route delta " << summary.max_delta << "\n";
  if (summary.undefined_moment_rows > 0)
    std::cerr << "note: " << summary.undefined_moment_rows
              << " row(s) at nbar1=0 have no moment-route value (zero intensity); "
                 "closed forms report g1 = t there\n";
  if (summary.flagged > 0) {
    std::cerr << "warning: " << summary.flagged << " row(s) exceed the route tolerance "
              << cfg.route_tol << "\n";
    return 1;
  }
  return 0;
}

int run_verify_command(const wzm::ScanConfig& cfg) {
  const wzm::VerifySummary summary = wzm::run_verify(cfg);
  if (cfg.verify_out.empty()) {
    wzm::write_verify_report(summary, std::cout);
  } else {
    std::ofstream out(cfg.verify_out, std::ios::binary);
    if (!out) throw wzm::io_error("cannot open for writing: " + cfg.verify_out);
    wzm::write_verify_report(summary, out);
    std::cout << "verify: report -> " << cfg.verify_out << "\n";
  }
  return summary.all_passed ? 0 : 1;
}

int run_fringe_command(const wzm::ScanConfig& cfg) {
  const wzm::FringeSummary summary = wzm::run_fringe(cfg);
  std::cout << "fringe: " << summary.scan.phi.size() << " phase points -> "
            << summary.csv_path << "\nfringe: V_raw=" << summary.v_raw
            << " V_balanced=" << summary.v_balanced << " g1=" << summary.g1 << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"induced-coherence scans for the two-downconverter experiment"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string svg_path;
  std::vector<double> nbar_override;
  int t_steps = -1;
  double tol = -1.0;
  double trunc_tol = -1.0;
  int trunc_cap = -1;
  unsigned threads = 0;
  bool also_verify = false;
  bool also_fringe = false;
  double fringe_nbar = -1.0;
  double fringe_chi = -1.0;
  double fringe_t = -1.0;
  int phi_steps = -1;
  bool balance_on = false;
  bool balance_off = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags win over file)");
    cmd->add_option("--out", out_path, "output path");
    cmd->add_option("--tol", tol, "route-agreement tolerance");
    cmd->add_option("--threads", threads, "worker threads (0: hardware default)");
  };

  CLI::App* scan = app.add_subcommand("scan", "sweep the (t, nbar1) grid to CSV/SVG");
  add_common(scan);
  scan->add_option("--svg", svg_path, "also emit an SVG chart");
  scan->add_option("--t-steps", t_steps, "number of t grid points");
  scan->add_option("--nbar", nbar_override, "nbar1 curve list")->delimiter(',');
  scan->add_flag("--verify", also_verify, "cross-check feasible points afterwards");
  scan->add_flag("--fringe", also_fringe, "also run the fringe scan");

  CLI::App* verify = app.add_subcommand("verify", "cross-validate the two backends");
  add_common(verify);
  verify->add_option("--t-steps", t_steps, "number of t grid points");
  verify->add_option("--nbar", nbar_override, "nbar1 list")->delimiter(',');
  verify->add_option("--trunc-tol", trunc_tol, "truncation doubling tolerance");
  verify->add_option("--trunc-cap", trunc_cap, "per-mode cutoff cap");

  CLI::App* fringe = app.add_subcommand("fringe", "phase scan at one (nbar1, t) point");
  add_common(fringe);
  fringe->add_option("--nbar", fringe_nbar, "mean idler-1 photon number");
  fringe->add_option("--chi", fringe_chi, "squeezing strength (overrides --nbar)");
  fringe->add_option("--t", fringe_t, "beam-splitter transmission amplitude");
  fringe->add_option("--phi-steps", phi_steps, "number of phase points");
  fringe->add_flag("--balance", balance_on, "balance arm intensities (default)");
  fringe->add_flag("--no-balance", balance_off, "emit the unbalanced fringe");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    wzm::ScanConfig cfg;
    if (!config_path.empty()) cfg = wzm::load_scan_config(config_path);

    if (t_steps >= 0) cfg.t_grid.count = t_steps;
    if (!nbar_override.empty()) cfg.nbar1 = nbar_override;
    if (tol > 0.0) cfg.route_tol = tol;
    if (trunc_tol > 0.0) cfg.trunc_tol = trunc_tol;
    if (trunc_cap > 0) cfg.trunc_cap = trunc_cap;
    if (threads != 0) cfg.threads = threads;
    if (!svg_path.empty()) cfg.out_svg = svg_path;
    if (fringe_nbar >= 0.0) cfg.fringe_params.nbar1 = fringe_nbar;
    if (fringe_chi >= 0.0) {
      const double sh = std::sinh(fringe_chi);
      cfg.fringe_params.nbar1 = sh * sh;
    }
    if (fringe_t >= 0.0) cfg.fringe_params.t = fringe_t;
    if (phi_steps > 0) cfg.fringe_params.phi_count = phi_steps;
    if (balance_on) cfg.fringe_params.balance = true;
    if (balance_off) cfg.fringe_params.balance = false;

    int status = 0;
    if (scan->parsed()) {
      if (!out_path.empty()) cfg.out_csv = out_path;
      status = std::max(status, run_scan_command(cfg));
      if (also_verify || cfg.verify) status = std::max(status, run_verify_command(cfg));
      if (also_fringe || cfg.fringe) status = std::max(status, run_fringe_command(cfg));
    } else if (verify->parsed()) {
      if (!out_path.empty()) cfg.verify_out = out_path;
      // default verify grid is coarse; the oracle is the slow backend
      if (t_steps < 0 && config_path.empty()) cfg.t_grid.count = 5;
      status = run_verify_command(cfg);
    } else if (fringe->parsed()) {
      if (!out_path.empty()) cfg.fringe_out = out_path;
      status = run_fringe_command(cfg);
    }
    return status;
  } catch (const wzm::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wzm::io_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
