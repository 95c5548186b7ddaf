#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wzm/errors.hpp"
#include "wzm/modes.hpp"
#include "wzm/moments.hpp"

namespace wzm {

// Dense four-mode state vector over occupation numbers 0..cutoff per mode.
// Storage is row-major with mode s1 slowest, i2 fastest.
class FockState {
 public:
  explicit FockState(int cutoff) : cutoff_(check_cutoff(cutoff)) {
    const std::size_t k = static_cast<std::size_t>(cutoff_) + 1;
    amp_.assign(k * k * k * k, complexd{0.0});
  }

  static FockState vacuum(int cutoff) {
    FockState s(cutoff);
    s.amp_[0] = complexd{1.0};
    return s;
  }

  int cutoff() const { return cutoff_; }
  std::size_t dim() const { return amp_.size(); }

  // Stride of one occupation step in the given mode.
  std::size_t stride(ModeId m) const {
    const std::size_t k = static_cast<std::size_t>(cutoff_) + 1;
    std::size_t s = 1;
    for (int i = ModeLayout::index(m); i < kModeCount - 1; ++i) s *= k;
    return s;
  }

  std::size_t index(int n_s1, int n_i1, int n_s2, int n_i2) const {
    const std::size_t k = static_cast<std::size_t>(cutoff_) + 1;
    return ((static_cast<std::size_t>(n_s1) * k + static_cast<std::size_t>(n_i1)) * k +
            static_cast<std::size_t>(n_s2)) *
               k +
           static_cast<std::size_t>(n_i2);
  }

  complexd& operator[](std::size_t i) { return amp_[i]; }
  const complexd& operator[](std::size_t i) const { return amp_[i]; }

  std::vector<complexd>& amplitudes() { return amp_; }
  const std::vector<complexd>& amplitudes() const { return amp_; }

  double norm() const {
    double s = 0.0;
    for (const complexd& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

 private:
  static int check_cutoff(int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("FockState: cutoff must be >= 1");
    return cutoff;
  }

  int cutoff_;
  std::vector<complexd> amp_;
};

// One optical element as an anti-Hermitian generator G on a mode pair:
//   squeezer:      G = -i chi (a b + a^dag b^dag)        on (mode_a, mode_b)
//   beam splitter: G = theta (a^dag_b a_a - a^dag_a a_b) on (from, to),
//                  theta = arcsin(t)
// The beam-splitter sign matches the exact-backend convention, so that
// a'_to = t a_from + r a_to after exp(G).
struct GeneratorSpec {
  enum class Kind { squeezer, beam_splitter };

  Kind kind;
  ModeId mode_a;  // squeezer: signal; beam splitter: from
  ModeId mode_b;  // squeezer: idler;  beam splitter: to
  double strength;  // chi, or theta

  static GeneratorSpec squeezer(ModeId signal, ModeId idler, double chi) {
    if (signal == idler)
      throw std::invalid_argument("GeneratorSpec::squeezer: modes must be distinct");
    if (!std::isfinite(chi))
      throw std::invalid_argument("GeneratorSpec::squeezer: chi must be finite");
    return {Kind::squeezer, signal, idler, chi};
  }

  static GeneratorSpec beam_splitter(ModeId from, ModeId to, double t) {
    if (from == to)
      throw std::invalid_argument("GeneratorSpec::beam_splitter: modes must be distinct");
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("GeneratorSpec::beam_splitter: t must lie in [0, 1]");
    return {Kind::beam_splitter, from, to, std::asin(t)};
  }
};

// Mode-local annihilation matrix: entries sqrt(n) on the first
// superdiagonal, so ladder^dag * ladder = diag(0..N).
inline Eigen::MatrixXcd ladder_matrix(int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("ladder_matrix: cutoff must be >= 1");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Tensor-product embedding of a mode-local operator, identities on the
// other three modes. Intended for small cutoffs; the evolution itself never
// materializes these matrices.
inline Eigen::MatrixXcd embed_operator(const Eigen::MatrixXcd& op, ModeId mode,
                                       const ModeLayout& layout) {
  if (op.rows() != op.cols() || op.rows() < 2)
    throw std::invalid_argument("embed_operator: operator must be square, size >= 2");
  const int k = static_cast<int>(op.rows());
  const int cutoff = k - 1;
  FockState probe(cutoff);  // index arithmetic only
  const std::size_t dim = probe.dim();
  const std::size_t s = probe.stride(mode);
  (void)layout;

  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                 static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    const int n = static_cast<int>((col / s) % static_cast<std::size_t>(k));
    const std::size_t base = col - static_cast<std::size_t>(n) * s;
    for (int m = 0; m < k; ++m) {
      const complexd v = op(m, n);
      if (v != complexd{0.0})
        full(static_cast<Eigen::Index>(base + static_cast<std::size_t>(m) * s),
             static_cast<Eigen::Index>(col)) = v;
    }
  }
  return full;
}

namespace detail {

// w = G v for the element generator, computed by ladder shifts on the two
// participating tensor axes. O(dim) per call.
inline void apply_generator(const GeneratorSpec& gen, int cutoff,
                            const std::vector<complexd>& v,
                            std::vector<complexd>& w) {
  const int k = cutoff + 1;
  const std::size_t dim = v.size();
  w.assign(dim, complexd{0.0});

  FockState probe(cutoff);
  const std::size_t sa = probe.stride(gen.mode_a);
  const std::size_t sb = probe.stride(gen.mode_b);
  const int ia = ModeLayout::index(gen.mode_a);
  const int ib = ModeLayout::index(gen.mode_b);

  std::vector<double> root(static_cast<std::size_t>(k) + 1);
  for (int n = 0; n <= k; ++n) root[static_cast<std::size_t>(n)] = std::sqrt(static_cast<double>(n));

  const bool squeeze = gen.kind == GeneratorSpec::Kind::squeezer;
  const complexd c = squeeze ? complexd{0.0, -gen.strength} : complexd{gen.strength, 0.0};

  std::array<int, 4> n{};
  std::size_t idx = 0;
  for (n[0] = 0; n[0] < k; ++n[0])
    for (n[1] = 0; n[1] < k; ++n[1])
      for (n[2] = 0; n[2] < k; ++n[2])
        for (n[3] = 0; n[3] < k; ++n[3], ++idx) {
          const complexd x = v[idx];
          if (x == complexd{0.0}) continue;
          const int na = n[static_cast<std::size_t>(ia)];
          const int nb = n[static_cast<std::size_t>(ib)];
          if (squeeze) {
            // -i chi (a_a a_b + a^dag_a a^dag_b)
            if (na > 0 && nb > 0)
              w[idx - sa - sb] += c * (root[static_cast<std::size_t>(na)] *
                                       root[static_cast<std::size_t>(nb)]) * x;
            if (na < cutoff && nb < cutoff)
              w[idx + sa + sb] += c * (root[static_cast<std::size_t>(na) + 1] *
                                       root[static_cast<std::size_t>(nb) + 1]) * x;
          } else {
            // theta (a^dag_b a_a - a^dag_a a_b)
            if (na > 0 && nb < cutoff)
              w[idx - sa + sb] += c * (root[static_cast<std::size_t>(na)] *
                                       root[static_cast<std::size_t>(nb) + 1]) * x;
            if (nb > 0 && na < cutoff)
              w[idx + sa - sb] -= c * (root[static_cast<std::size_t>(na) + 1] *
                                       root[static_cast<std::size_t>(nb)]) * x;
          }
        }
}

inline double vec_norm(const std::vector<complexd>& v) {
  double s = 0.0;
  for (const complexd& a : v) s += std::norm(a);
  return std::sqrt(s);
}

}  // namespace detail

// state <- exp(G) state, by Taylor series on the vector with adaptive step
// subdivision. G is anti-Hermitian, so the exact flow is norm-preserving;
// the step size is reduced until the numerical norm drift of the whole
// element stays below 1e-12.
inline FockState apply_element(const FockState& state, const GeneratorSpec& gen) {
  if (gen.strength == 0.0) return state;

  const int cutoff = state.cutoff();
  const double norm_in = state.norm();

  std::vector<complexd> v, sum, term, tmp;
  for (double step_cap = 1.0; step_cap >= 0x1p-20; step_cap *= 0.5) {
    v = state.amplitudes();
    double remaining = 1.0;
    bool converged = true;
    while (remaining > 0.0 && converged) {
      detail::apply_generator(gen, cutoff, v, tmp);  // tmp = G v
      const double gnorm = detail::vec_norm(tmp);
      const double h = std::min(remaining, step_cap / std::max(1.0, gnorm));

      sum = v;
      term = std::move(tmp);
      for (complexd& a : term) a *= h;
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];

      int k = 2;
      while (detail::vec_norm(term) > 1e-18 * detail::vec_norm(sum)) {
        if (k > 64) {
          converged = false;
          break;
        }
        detail::apply_generator(gen, cutoff, term, tmp);
        term.swap(tmp);
        const double f = h / static_cast<double>(k);
        for (complexd& a : term) a *= f;
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
        ++k;
      }
      v.swap(sum);
      remaining -= h;
    }
    if (converged && std::abs(detail::vec_norm(v) - norm_in) < 1e-12) {
      FockState out(cutoff);
      out.amplitudes() = std::move(v);
      return out;
    }
  }
  throw std::runtime_error("apply_element: exponential action did not converge");
}

// <a^dag_j a_k> and <a_j a_k> from ladder-shifted copies of the state.
inline MomentSet measure_moments(const FockState& state) {
  const int cutoff = state.cutoff();
  const std::size_t dim = state.dim();
  const std::vector<complexd>& psi = state.amplitudes();

  std::array<std::vector<complexd>, 4> lowered;
  std::array<std::vector<complexd>, 4> raised;
  for (int m = 0; m < kModeCount; ++m) {
    lowered[static_cast<std::size_t>(m)].assign(dim, complexd{0.0});
    raised[static_cast<std::size_t>(m)].assign(dim, complexd{0.0});
  }

  FockState probe(cutoff);
  const int k = cutoff + 1;
  std::vector<double> root(static_cast<std::size_t>(k) + 1);
  for (int n = 0; n <= k; ++n) root[static_cast<std::size_t>(n)] = std::sqrt(static_cast<double>(n));

  std::array<int, 4> n{};
  std::size_t idx = 0;
  for (n[0] = 0; n[0] < k; ++n[0])
    for (n[1] = 0; n[1] < k; ++n[1])
      for (n[2] = 0; n[2] < k; ++n[2])
        for (n[3] = 0; n[3] < k; ++n[3], ++idx) {
          const complexd x = psi[idx];
          if (x == complexd{0.0}) continue;
          for (int m = 0; m < kModeCount; ++m) {
            const std::size_t sm = probe.stride(ModeLayout::at(m));
            const int nm = n[static_cast<std::size_t>(m)];
            if (nm > 0)
              lowered[static_cast<std::size_t>(m)][idx - sm] +=
                  root[static_cast<std::size_t>(nm)] * x;
            if (nm < cutoff)
              raised[static_cast<std::size_t>(m)][idx + sm] +=
                  root[static_cast<std::size_t>(nm) + 1] * x;
          }
        }

  auto dot = [dim](const std::vector<complexd>& a, const std::vector<complexd>& b) {
    complexd s{0.0};
    for (std::size_t i = 0; i < dim; ++i) s += std::conj(a[i]) * b[i];
    return s;
  };

  MomentSet m2;
  for (int j = 0; j < kModeCount; ++j)
    for (int l = 0; l < kModeCount; ++l) {
      m2.number(j, l) = dot(lowered[static_cast<std::size_t>(j)],
                            lowered[static_cast<std::size_t>(l)]);
      m2.anomalous(j, l) = dot(raised[static_cast<std::size_t>(j)],
                               lowered[static_cast<std::size_t>(l)]);
    }
  const int s1 = ModeLayout::index(ModeId::s1);
  const int s2 = ModeLayout::index(ModeId::s2);
  m2.n_s1 = m2.number(s1, s1).real();
  m2.n_s2 = m2.number(s2, s2).real();
  m2.cross = m2.number(s1, s2);
  return m2;
}

// Schroedinger evolution of the vacuum through the full element chain:
// squeezer on (s1, i1), idler beam splitter i1 -> i2, squeezer on (s2, i2).
inline FockState evolve_chain(double chi, double t, int cutoff) {
  FockState state = FockState::vacuum(cutoff);
  state = apply_element(state, GeneratorSpec::squeezer(ModeId::s1, ModeId::i1, chi));
  state = apply_element(state, GeneratorSpec::beam_splitter(ModeId::i1, ModeId::i2, t));
  state = apply_element(state, GeneratorSpec::squeezer(ModeId::s2, ModeId::i2, chi));
  return state;
}

// Relative tolerance for the doubling schedule. Calibrated so chi = 0.75
// still converges under the cutoff cap while chi ~ 0.1 is driven far enough
// for sub-1e-8 absolute accuracy.
inline constexpr double kDefaultTruncationTol = 5e-3;
inline constexpr int kDefaultCutoffCap = 24;

struct TruncationResult {
  int cutoff = 0;          // smallest N whose doubling partner agreed within tol
  int refined_cutoff = 0;  // partner min(2N, cap); moments reported at this cutoff
  MomentSet moments;       // measured at refined_cutoff
  double error_estimate = 0.0;  // absolute change observed between the pair
};

// Doubling convergence schedule for the per-mode cutoff. A candidate N is
// accepted when every named moment changes by less than tol (relative to
// the overall moment scale) between N and min(2N, cap); the reported error
// estimate is the absolute change of that last comparison.
inline TruncationResult truncation_check(double chi, double t,
                                         double tol = kDefaultTruncationTol,
                                         int cap = kDefaultCutoffCap) {
  if (!(tol > 0.0)) throw std::invalid_argument("truncation_check: tol must be > 0");
  if (cap < 2) throw std::invalid_argument("truncation_check: cap must be >= 2");

  auto moments_at = [&](int cutoff) { return measure_moments(evolve_chain(chi, t, cutoff)); };

  double last_change = -1.0;
  int last_pair_lo = 0;
  int last_pair_hi = 0;
  MomentSet prev = moments_at(1);
  int prev_cutoff = 1;
  for (int n = 1; n < cap; n *= 2) {
    const int partner = std::min(2 * n, cap);
    if (prev_cutoff != n) {
      prev = moments_at(n);
      prev_cutoff = n;
    }
    const MomentSet refined = moments_at(partner);
    const double change = moment_distance(prev, refined);
    const double scale = std::max(moment_scale(refined), 1e-300);
    if (change <= tol * scale) {
      return TruncationResult{n, partner, refined, change};
    }
    last_change = change;
    last_pair_lo = n;
    last_pair_hi = partner;
    prev = refined;
    prev_cutoff = partner;
  }

  std::ostringstream msg;
  msg << "truncation_check: cutoff cap " << cap << " exceeded at chi=" << chi
      << ", t=" << t << " (last change " << last_change << " between cutoffs "
      << last_pair_lo << " and " << last_pair_hi << ", tol " << tol
      << "); point is outside the oracle's range";
  throw convergence_failure(msg.str());
}

}  // namespace wzm
