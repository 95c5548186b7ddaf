#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wzm/errors.hpp"
#include "wzm/experiment.hpp"
#include "wzm/parallel.hpp"
#include "wzm/svg.hpp"

namespace wzm {

// Uniform grid with inclusive endpoints.
struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  int count = 101;

  std::vector<double> points() const {
    std::vector<double> p(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      p[static_cast<std::size_t>(i)] =
          start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return p;
  }
};

struct FringeParams {
  double nbar1 = 1.0;
  double t = 0.5;
  int phi_count = 256;
  bool balance = true;
};

struct ScanConfig {
  GridSpec t_grid;
  std::vector<double> nbar1 = {1e-2, 1.0, 10.0, 100.0, 1e4};
  std::string out_csv = "scan.csv";
  std::string out_svg;      // empty: no chart
  std::string verify_out;   // empty: stdout
  std::string fringe_out = "fringe.csv";
  bool verify = false;      // also run the oracle cross-check after a scan
  bool fringe = false;      // also run the fringe scan after a scan
  double route_tol = 1e-12;        // allowed disagreement between g1 routes
  double oracle_tol_floor = 1e-8;  // verify tolerance is max(floor, truncation error)
  double trunc_tol = kDefaultTruncationTol;
  int trunc_cap = kDefaultCutoffCap;
  double chi_max_oracle = 0.75;  // verify feasibility bound on chi
  FringeParams fringe_params;
  unsigned threads = 0;  // 0: hardware default
};

inline void validate_config(const ScanConfig& cfg) {
  if (cfg.t_grid.count < 2) throw config_error("t.count: grid needs at least 2 points");
  if (!(cfg.t_grid.start >= 0.0 && cfg.t_grid.start <= 1.0))
    throw config_error("t.start: must lie in [0, 1]");
  if (!(cfg.t_grid.stop >= 0.0 && cfg.t_grid.stop <= 1.0))
    throw config_error("t.stop: must lie in [0, 1]");
  if (cfg.t_grid.stop < cfg.t_grid.start)
    throw config_error("t.stop: must be >= t.start");
  if (cfg.nbar1.empty()) throw config_error("nbar1: list must be non-empty");
  for (const double nb : cfg.nbar1)
    if (!std::isfinite(nb) || nb < 0.0)
      throw config_error("nbar1: entries must be finite and >= 0");
  if (!(cfg.route_tol > 0.0)) throw config_error("tol: must be > 0");
  if (!(cfg.trunc_tol > 0.0)) throw config_error("trunc_tol: must be > 0");
  if (cfg.trunc_cap < 2) throw config_error("trunc_cap: must be >= 2");
  if (!(cfg.oracle_tol_floor > 0.0)) throw config_error("oracle_tol_floor: must be > 0");
  if (!std::isfinite(cfg.fringe_params.nbar1) || cfg.fringe_params.nbar1 < 0.0)
    throw config_error("fringe.nbar1: must be finite and >= 0");
  if (!(cfg.fringe_params.t >= 0.0 && cfg.fringe_params.t <= 1.0))
    throw config_error("fringe.t: must lie in [0, 1]");
  if (cfg.fringe_params.phi_count < 2)
    throw config_error("fringe.phi_count: grid needs at least 2 points");
}

// JSON config file; every key optional, flags override afterwards.
inline ScanConfig load_scan_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config parse error in " + path + ": " + e.what());
  }

  ScanConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "t") {
        for (const auto& [gk, gv] : value.items()) {
          if (gk == "start") cfg.t_grid.start = gv.get<double>();
          else if (gk == "stop") cfg.t_grid.stop = gv.get<double>();
          else if (gk == "count") cfg.t_grid.count = gv.get<int>();
          else throw config_error("unknown config key: t." + gk);
        }
      } else if (key == "nbar1") cfg.nbar1 = value.get<std::vector<double>>();
      else if (key == "out") cfg.out_csv = value.get<std::string>();
      else if (key == "svg") cfg.out_svg = value.get<std::string>();
      else if (key == "verify_out") cfg.verify_out = value.get<std::string>();
      else if (key == "fringe_out") cfg.fringe_out = value.get<std::string>();
      else if (key == "verify") cfg.verify = value.get<bool>();
      else if (key == "fringe") cfg.fringe = value.get<bool>();
      else if (key == "tol") cfg.route_tol = value.get<double>();
      else if (key == "oracle_tol_floor") cfg.oracle_tol_floor = value.get<double>();
      else if (key == "trunc_tol") cfg.trunc_tol = value.get<double>();
      else if (key == "trunc_cap") cfg.trunc_cap = value.get<int>();
      else if (key == "chi_max_oracle") cfg.chi_max_oracle = value.get<double>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
      else if (key == "fringe_params") {
        for (const auto& [fk, fv] : value.items()) {
          if (fk == "nbar1") cfg.fringe_params.nbar1 = fv.get<double>();
          else if (fk == "t") cfg.fringe_params.t = fv.get<double>();
          else if (fk == "phi_count") cfg.fringe_params.phi_count = fv.get<int>();
          else if (fk == "balance") cfg.fringe_params.balance = fv.get<bool>();
          else throw config_error("unknown config key: fringe_params." + fk);
        }
      } else throw config_error("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config type error in " + path + ": " + e.what());
  }
  return cfg;
}

namespace detail {

// 17 significant digits: doubles round-trip exactly, output stays
// bit-identical across runs on one platform.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace detail

struct ScanRow {
  double nbar1 = 0.0;
  double t = 0.0;
  double g1 = 0.0;                // Eq. in nbar1 (the canonical route)
  double g1_route_moments = 0.0;  // through the closed-form moments and the g1 definition
  double g1_route_closed = 0.0;   // closed form in chi
  double delta = 0.0;             // max pairwise disagreement of the defined routes
  bool moments_defined = true;    // false only at nbar1 = 0 (0/0 on the moment route)
};

struct ScanSummary {
  std::vector<ScanRow> rows;
  double max_delta = 0.0;
  int flagged = 0;  // rows whose delta reached route_tol
  int undefined_moment_rows = 0;
  std::string csv_path;
  std::string svg_path;
};

// Sweep the (nbar1, t) grid, cross-check the three g1 routes per point, and
// emit the CSV (and optional SVG chart). Rows are evaluated in parallel and
// gathered in grid order.
inline ScanSummary run_scan(const ScanConfig& cfg) {
  validate_config(cfg);

  const std::vector<double> ts = cfg.t_grid.points();
  const std::size_t per_curve = ts.size();
  const std::size_t total = cfg.nbar1.size() * per_curve;

  ScanSummary summary;
  summary.rows.resize(total);
  parallel_for(
      total,
      [&](std::size_t i) {
        const double nbar = cfg.nbar1[i / per_curve];
        const double t = ts[i % per_curve];
        ScanRow& row = summary.rows[i];
        row.nbar1 = nbar;
        row.t = t;
        row.g1 = g1_nbar_form(nbar, t);
        const ExperimentConfig point = ExperimentConfig::from_nbar(nbar, t);
        row.g1_route_closed = g1_closed_form(point.chi(), t);
        try {
          row.g1_route_moments = g1_from_moments(moments_closed_form(point));
          row.delta = std::max({std::abs(row.g1 - row.g1_route_moments),
                                std::abs(row.g1 - row.g1_route_closed),
                                std::abs(row.g1_route_moments - row.g1_route_closed)});
        } catch (const undefined_coherence&) {
          row.moments_defined = false;
          row.g1_route_moments = std::numeric_limits<double>::quiet_NaN();
          row.delta = std::abs(row.g1 - row.g1_route_closed);
        }
      },
      cfg.threads);

  std::string csv = "nbar1,t,g1,g1_route_moments,g1_route_closed,delta\n";
  for (ScanRow& row : summary.rows) {
    summary.max_delta = std::max(summary.max_delta, row.delta);
    if (row.delta >= cfg.route_tol) ++summary.flagged;
    if (!row.moments_defined) ++summary.undefined_moment_rows;
    csv += detail::fmt17(row.nbar1);
    csv += ',';
    csv += detail::fmt17(row.t);
    csv += ',';
    csv += detail::fmt17(detail::clamp01(row.g1));
    csv += ',';
    csv += row.moments_defined ? detail::fmt17(detail::clamp01(row.g1_route_moments))
                               : std::string("nan");
    csv += ',';
    csv += detail::fmt17(detail::clamp01(row.g1_route_closed));
    csv += ',';
    csv += detail::fmt17(row.delta);
    csv += '\n';
  }
  detail::write_text_file(cfg.out_csv, csv);
  summary.csv_path = cfg.out_csv;

  if (!cfg.out_svg.empty()) {
    std::vector<SvgCurve> curves;
    for (std::size_t c = 0; c < cfg.nbar1.size(); ++c) {
      SvgCurve curve;
      char label[48];
      std::snprintf(label, sizeof(label), "nbar1 = %g", cfg.nbar1[c]);
      curve.label = label;
      for (std::size_t i = 0; i < per_curve; ++i) {
        const ScanRow& row = summary.rows[c * per_curve + i];
        curve.points.emplace_back(row.t, detail::clamp01(row.g1));
      }
      curves.push_back(std::move(curve));
    }
    write_svg_chart(cfg.out_svg, curves, "first-order coherence vs transmission", "t",
                    "g1");
    summary.svg_path = cfg.out_svg;
  }
  return summary;
}

struct VerifyPoint {
  double nbar1 = 0.0;
  double chi = 0.0;
  double t = 0.0;
  bool feasible = false;
  bool converged = false;
  int cutoff = 0;
  int refined_cutoff = 0;
  double truncation_error = 0.0;
  double deviation = 0.0;  // max over the three moments, oracle vs exact
  double tolerance = 0.0;  // max(oracle_tol_floor, truncation_error)
  bool pass = false;
  std::string note;
};

struct VerifySummary {
  std::vector<VerifyPoint> points;  // feasible grid points, in grid order
  std::vector<std::string> skipped;  // one note per infeasible nbar1 entry
  int failures = 0;
  bool all_passed = true;  // over the feasible set; true when the set is empty
};

// Cross-validate the exact backend against the Fock oracle on every grid
// point whose chi stays within the oracle's range; the rest of the nbar1
// list is skipped with a notice.
inline VerifySummary run_verify(const ScanConfig& cfg) {
  validate_config(cfg);

  VerifySummary summary;
  std::vector<double> feasible;
  for (const double nbar : cfg.nbar1) {
    const double chi = std::asinh(std::sqrt(nbar));
    if (chi <= cfg.chi_max_oracle + 1e-12) {
      feasible.push_back(nbar);
    } else {
      std::ostringstream note;
      note << "SKIP nbar1=" << nbar << " (oracle out of range: chi=" << chi << " > "
           << cfg.chi_max_oracle << ")";
      summary.skipped.push_back(note.str());
    }
  }

  const std::vector<double> ts = cfg.t_grid.points();
  const std::size_t per_curve = ts.size();
  summary.points.resize(feasible.size() * per_curve);
  parallel_for(
      summary.points.size(),
      [&](std::size_t i) {
        VerifyPoint& p = summary.points[i];
        p.nbar1 = feasible[i / per_curve];
        p.t = ts[i % per_curve];
        p.feasible = true;
        const ExperimentConfig point = ExperimentConfig::from_nbar(p.nbar1, p.t);
        p.chi = point.chi();
        const MomentSet exact = vacuum_moments(build_chain(point));
        try {
          const TruncationResult tr =
              truncation_check(point, cfg.trunc_tol, cfg.trunc_cap);
          p.converged = true;
          p.cutoff = tr.cutoff;
          p.refined_cutoff = tr.refined_cutoff;
          p.truncation_error = tr.error_estimate;
          p.deviation = moment_distance(exact, tr.moments);
          p.tolerance = std::max(cfg.oracle_tol_floor, p.truncation_error);
          p.pass = p.deviation <= p.tolerance;
        } catch (const convergence_failure& e) {
          p.converged = false;
          p.pass = false;
          p.note = e.what();
        }
      },
      cfg.threads);

  for (const VerifyPoint& p : summary.points)
    if (!p.pass) ++summary.failures;
  summary.all_passed = summary.failures == 0;
  return summary;
}

inline void write_verify_report(const VerifySummary& summary, std::ostream& out) {
  out << "backend cross-validation: exact Bogoliubov vs truncated Fock oracle\n";
  for (const std::string& note : summary.skipped) out << note << '\n';
  for (const VerifyPoint& p : summary.points) {
    if (!p.converged) {
      out << "FAIL nbar1=" << detail::fmt17(p.nbar1) << " t=" << detail::fmt17(p.t)
          << " " << p.note << '\n';
      continue;
    }
    out << (p.pass ? "PASS" : "FAIL") << " nbar1=" << detail::fmt17(p.nbar1)
        << " t=" << detail::fmt17(p.t) << " cutoff=" << p.cutoff << "->"
        << p.refined_cutoff << " trunc_err=" << detail::fmt17(p.truncation_error)
        << " deviation=" << detail::fmt17(p.deviation)
        << " tol=" << detail::fmt17(p.tolerance) << '\n';
  }
  if (summary.points.empty())
    out << "WARNING: no verifiable points (every nbar1 is outside the oracle range)\n";
  out << (summary.all_passed ? "verify: all points passed\n"
                             : "verify: tolerance violations present\n");
}

struct FringeSummary {
  FringeScanResult scan;  // intensities per the requested balance flag
  double v_raw = 0.0;
  double v_balanced = 0.0;
  double g1 = 0.0;
  std::string csv_path;
};

// Phase scan at one (nbar1, t) point: CSV of the two detector intensities
// over the phi grid plus a summary line with both visibilities and g1.
inline FringeSummary run_fringe(const ScanConfig& cfg) {
  validate_config(cfg);
  if (cfg.fringe_params.nbar1 <= 0.0)
    throw config_error("fringe.nbar1: coherence undefined at chi = 0 (zero intensity)");

  const ExperimentConfig point =
      ExperimentConfig::from_nbar(cfg.fringe_params.nbar1, cfg.fringe_params.t);

  const int count = cfg.fringe_params.phi_count;
  std::vector<double> phi(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    phi[static_cast<std::size_t>(i)] =
        2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1);

  FringeSummary summary;
  FringeScanResult raw = fringe_scan(point, phi, false);
  FringeScanResult balanced = fringe_scan(point, phi, true);
  summary.v_raw = raw.visibility;
  summary.v_balanced = balanced.visibility;
  summary.scan = cfg.fringe_params.balance ? std::move(balanced) : std::move(raw);
  summary.g1 = g1_closed_form(point.chi(), point.t());

  std::string csv = "phi,I_plus,I_minus\n";
  for (std::size_t i = 0; i < summary.scan.phi.size(); ++i) {
    csv += detail::fmt17(summary.scan.phi[i]);
    csv += ',';
    csv += detail::fmt17(summary.scan.intensity_plus[i]);
    csv += ',';
    csv += detail::fmt17(summary.scan.intensity_minus[i]);
    csv += '\n';
  }
  csv += "# V_raw=" + detail::fmt17(summary.v_raw) +
         " V_balanced=" + detail::fmt17(summary.v_balanced) +
         " g1=" + detail::fmt17(summary.g1) + "\n";
  detail::write_text_file(cfg.fringe_out, csv);
  summary.csv_path = cfg.fringe_out;
  return summary;
}

}  // namespace wzm
