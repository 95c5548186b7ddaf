#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "wzm/bogoliubov.hpp"
#include "wzm/errors.hpp"
#include "wzm/fock.hpp"

namespace wzm {

// Squeezing strength per crystal (identical for both) and the transmission
// amplitude of the idler beam splitter.
class ExperimentConfig {
 public:
  ExperimentConfig(double chi, double t) : chi_(chi), t_(t) {
    if (!std::isfinite(chi) || chi < 0.0)
      throw std::invalid_argument("ExperimentConfig: chi must be finite and >= 0");
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("ExperimentConfig: t must lie in [0, 1]");
  }

  // chi from the mean idler-1 photon number nbar1 = sinh^2(chi).
  static ExperimentConfig from_nbar(double nbar1, double t) {
    if (!std::isfinite(nbar1) || nbar1 < 0.0)
      throw std::invalid_argument("ExperimentConfig: nbar1 must be finite and >= 0");
    return ExperimentConfig(std::asinh(std::sqrt(nbar1)), t);
  }

  double chi() const { return chi_; }
  double t() const { return t_; }
  double nbar1() const { const double s = std::sinh(chi_); return s * s; }
  double r() const { return reflection_amplitude(t_); }

 private:
  double chi_;
  double t_;
};

// The full element chain: squeezer(s1,i1), beam splitter i1 -> i2,
// squeezer(s2,i2), composed so the first squeezer acts on the state first.
inline BogoliubovTransform build_chain(const ExperimentConfig& cfg) {
  const ModeLayout layout;
  const auto dc1 = two_mode_squeezer(layout, ModeId::s1, ModeId::i1, cfg.chi());
  const auto bs = beam_splitter(layout, ModeId::i1, ModeId::i2, cfg.t());
  const auto dc2 = two_mode_squeezer(layout, ModeId::s2, ModeId::i2, cfg.chi());
  return compose(dc2, compose(bs, dc1));
}

// Closed forms of the three signal moments:
//   n_s1  = sinh^2(chi)
//   n_s2  = sinh^2(chi) (r^2 + t^2 cosh^2(chi))
//   cross = t sinh^2(chi) cosh(chi)   (real under the pinned conventions)
inline MomentSet moments_closed_form(const ExperimentConfig& cfg) {
  const double sh = std::sinh(cfg.chi());
  const double ch = std::cosh(cfg.chi());
  const double t = cfg.t();
  const double r = cfg.r();
  MomentSet m;
  m.n_s1 = sh * sh;
  m.n_s2 = sh * sh * (r * r + t * t * ch * ch);
  m.cross = complexd{t * sh * sh * ch, 0.0};
  const int s1 = ModeLayout::index(ModeId::s1);
  const int s2 = ModeLayout::index(ModeId::s2);
  m.number(s1, s1) = m.n_s1;
  m.number(s2, s2) = m.n_s2;
  m.number(s1, s2) = m.cross;
  m.number(s2, s1) = std::conj(m.cross);
  return m;
}

// Normalized first-order coherence |<a^dag_1 a_2>| / sqrt(<n_1><n_2>).
inline double g1_from_moments(const MomentSet& m) {
  if (!(m.n_s1 > 0.0) || !(m.n_s2 > 0.0))
    throw undefined_coherence(
        "g1_from_moments: zero signal intensity makes g1 a 0/0 expression");
  return std::abs(m.cross) / std::sqrt(m.n_s1 * m.n_s2);
}

// Closed form in chi: t cosh(chi) / sqrt(1 + t^2 sinh^2(chi)).
inline double g1_closed_form(double chi, double t) {
  if (!std::isfinite(chi) || chi < 0.0)
    throw std::invalid_argument("g1_closed_form: chi must be finite and >= 0");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("g1_closed_form: t must lie in [0, 1]");
  const double sh = std::sinh(chi);
  return t * std::cosh(chi) / std::sqrt(1.0 + t * t * sh * sh);
}

// Closed form in the mean photon number: t sqrt((1+nbar1)/(1+t^2 nbar1)).
inline double g1_nbar_form(double nbar1, double t) {
  if (!std::isfinite(nbar1) || nbar1 < 0.0)
    throw std::invalid_argument("g1_nbar_form: nbar1 must be finite and >= 0");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("g1_nbar_form: t must lie in [0, 1]");
  return t * std::sqrt((1.0 + nbar1) / (1.0 + t * t * nbar1));
}

// Fringe model for the final lossless 50/50 beam splitter combining
// a'_s1 e^{i phi} with a'_s2:
//   I_pm(phi) = (n_s1 + n_s2)/2 +- |cross| cos(phi + arg cross)
struct FringeScanResult {
  std::vector<double> phi;              // radians
  std::vector<double> intensity_plus;   // I_+(phi)
  std::vector<double> intensity_minus;  // I_-(phi)
  double visibility = 0.0;       // (I_max - I_min)/(I_max + I_min) of the fringe
  double balance_factor = 1.0;   // amplitude attenuation applied to the brighter arm
  double phase_offset = 0.0;     // arg(cross); fringe maximum sits at -phase_offset
};

// Scan the detected intensities over the phase grid. With `balance` set,
// the brighter signal is attenuated by the vacuum-admixing factor
// sqrt(n_min/n_max) so equal mean intensities make the visibility reach g1.
inline FringeScanResult fringe_scan(const ExperimentConfig& cfg,
                                    std::span<const double> phase_grid,
                                    bool balance) {
  if (!(cfg.chi() > 0.0))
    throw undefined_coherence("fringe_scan: chi = 0 leaves no signal to interfere");

  const MomentSet m = vacuum_moments(build_chain(cfg));
  double n1 = m.n_s1;
  double n2 = m.n_s2;
  complexd cross = m.cross;

  FringeScanResult out;
  if (balance && n1 != n2) {
    const double nmin = std::min(n1, n2);
    const double nmax = std::max(n1, n2);
    out.balance_factor = std::sqrt(nmin / nmax);
    cross *= out.balance_factor;
    if (n1 > n2)
      n1 = nmin;
    else
      n2 = nmin;
  }

  const double amp = std::abs(cross);
  const double mean = 0.5 * (n1 + n2);
  out.phase_offset = std::arg(cross);
  out.phi.assign(phase_grid.begin(), phase_grid.end());
  out.intensity_plus.resize(out.phi.size());
  out.intensity_minus.resize(out.phi.size());
  for (std::size_t i = 0; i < out.phi.size(); ++i) {
    const double fringe = amp * std::cos(out.phi[i] + out.phase_offset);
    out.intensity_plus[i] = mean + fringe;
    out.intensity_minus[i] = mean - fringe;
  }
  // Extrema of the continuous fringe, attained at phi = -arg(cross) (mod pi).
  out.visibility = 2.0 * amp / (n1 + n2);
  return out;
}

struct LimitRow {
  double nbar1 = 0.0;
  double t = 0.0;
  double g1 = 0.0;
  double dev_from_t = 0.0;    // g1 - t, >= 0
  double dev_from_one = 0.0;  // 1 - g1
};

struct LimitCurveSummary {
  double nbar1 = 0.0;
  double max_dev_from_t = 0.0;
  double max_dev_from_one = 0.0;  // over grid points with t >= t_floor
  bool linear_regime = false;     // g1 ~ t across the whole grid
  bool saturated_regime = false;  // g1 ~ 1 for every grid t >= t_floor
};

struct LimitReport {
  std::vector<LimitRow> rows;
  std::vector<LimitCurveSummary> curves;
  double linear_threshold = 0.0;
  double saturation_threshold = 0.0;
  double saturation_t_floor = 0.0;
};

// Tabulate g1 against the two asymptotic regimes: the single-photon limit
// g1 -> t and the bright limit g1 -> 1 for t bounded away from zero.
inline LimitReport limit_report(std::span<const double> t_grid,
                                std::span<const double> nbar_list,
                                double linear_threshold = 1e-3,
                                double saturation_threshold = 1e-2,
                                double saturation_t_floor = 0.1) {
  if (t_grid.empty()) throw std::invalid_argument("limit_report: empty t grid");
  if (nbar_list.empty()) throw std::invalid_argument("limit_report: empty nbar1 list");

  LimitReport report;
  report.linear_threshold = linear_threshold;
  report.saturation_threshold = saturation_threshold;
  report.saturation_t_floor = saturation_t_floor;
  for (const double nbar : nbar_list) {
    LimitCurveSummary curve;
    curve.nbar1 = nbar;
    bool any_floor = false;
    for (const double t : t_grid) {
      LimitRow row;
      row.nbar1 = nbar;
      row.t = t;
      row.g1 = g1_nbar_form(nbar, t);
      row.dev_from_t = row.g1 - t;
      row.dev_from_one = 1.0 - row.g1;
      curve.max_dev_from_t = std::max(curve.max_dev_from_t, std::abs(row.dev_from_t));
      if (t >= saturation_t_floor) {
        any_floor = true;
        curve.max_dev_from_one = std::max(curve.max_dev_from_one, row.dev_from_one);
      }
      report.rows.push_back(row);
    }
    curve.linear_regime = curve.max_dev_from_t < linear_threshold;
    curve.saturated_regime = any_floor && curve.max_dev_from_one < saturation_threshold;
    report.curves.push_back(curve);
  }
  return report;
}

// Fock-oracle bridge for a full experiment configuration.
inline TruncationResult truncation_check(const ExperimentConfig& cfg,
                                         double tol = kDefaultTruncationTol,
                                         int cap = kDefaultCutoffCap) {
  return truncation_check(cfg.chi(), cfg.t(), tol, cap);
}

}  // namespace wzm
