#pragma once

#include <complex>

#include <Eigen/Dense>

namespace wzm {

// Second-order vacuum moments of the transformed modes. The three named
// entries are the ones the coherence calculation needs; the full matrices
// are kept for cross-checks between backends.
struct MomentSet {
  double n_s1 = 0.0;                   // <a'^dag_s1 a'_s1>
  double n_s2 = 0.0;                   // <a'^dag_s2 a'_s2>
  std::complex<double> cross{0.0};     // <a'^dag_s1 a'_s2>
  Eigen::Matrix4cd number = Eigen::Matrix4cd::Zero();     // N_jk = <a'^dag_j a'_k>
  Eigen::Matrix4cd anomalous = Eigen::Matrix4cd::Zero();  // M_jk = <a'_j a'_k>
};

// Largest difference among the three named entries of two moment sets.
inline double moment_distance(const MomentSet& a, const MomentSet& b) {
  double d = std::abs(a.n_s1 - b.n_s1);
  d = std::max(d, std::abs(a.n_s2 - b.n_s2));
  d = std::max(d, std::abs(a.cross - b.cross));
  return d;
}

// Largest magnitude among the three named entries.
inline double moment_scale(const MomentSet& m) {
  return std::max({std::abs(m.n_s1), std::abs(m.n_s2), std::abs(m.cross)});
}

}  // namespace wzm
