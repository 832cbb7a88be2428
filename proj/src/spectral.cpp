#include "gidm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "gidm/parallel.hpp"

namespace gidm {

namespace {

constexpr Real kClipWindow = 1e-8;

void clip_spectrum(Vector& lam, int ell) {
  for (Index k = 0; k < lam.size(); ++k) {
    Real v = lam[k];
    if (v < 0.0) {
      if (v < -kClipWindow) {
        throw std::domain_error(
            "eigenvalue " + std::to_string(v) + " at frequency " +
            std::to_string(ell) +
            " is negative beyond rounding; the kernel is not positive");
      }
      lam[k] = 0.0;
    } else if (v > 1.0) {
      if (v > 1.0 + kClipWindow) {
        throw std::domain_error(
            "eigenvalue " + std::to_string(v) + " at frequency " +
            std::to_string(ell) + " exceeds 1 beyond rounding");
      }
      lam[k] = 1.0;
    }
  }
}

}  // namespace

int SpectralData::index_of(int ell) const {
  for (int f = 0; f < n_freqs(); ++f) {
    if (freqs[static_cast<std::size_t>(f)] == ell) return f;
  }
  throw std::out_of_range("frequency not stored: " + std::to_string(ell));
}

std::vector<CMatrix> symmetric_normalize(const FourierBlocks& blocks) {
  const Index n = blocks.n_points();
  for (Index i = 0; i < n; ++i) {
    if (!(blocks.degrees[i] > 0.0)) {
      throw std::domain_error("symmetric_normalize: non-positive degree");
    }
  }
  Vector inv_sqrt = blocks.degrees.cwiseSqrt().cwiseInverse();
  std::vector<CMatrix> smats(blocks.blocks.size());
  for (std::size_t f = 0; f < blocks.blocks.size(); ++f) {
    CMatrix s = inv_sqrt.asDiagonal() * blocks.blocks[f] *
                inv_sqrt.asDiagonal();
    smats[f] = (s + s.adjoint()) / 2.0;
  }
  return smats;
}

SpectralData eigendecompose(const FourierBlocks& blocks) {
  std::vector<CMatrix> smats = symmetric_normalize(blocks);
  const int nf = blocks.n_freqs();

  SpectralData spec;
  spec.action = blocks.action;
  spec.eps = blocks.eps;
  spec.max_freq = blocks.max_freq;
  spec.quad_nodes = blocks.quad_nodes;
  spec.implied_conjugates = blocks.implied_conjugates;
  spec.freqs = blocks.freqs;
  spec.degrees = blocks.degrees;
  spec.eigenvalues.assign(static_cast<std::size_t>(nf), Vector());
  spec.vectors_sym.assign(static_cast<std::size_t>(nf), CMatrix());
  spec.vectors_walk.assign(static_cast<std::size_t>(nf), CMatrix());

  Vector inv_sqrt_deg = blocks.degrees.cwiseSqrt().cwiseInverse();

  // Blocks are independent; each worker owns whole frequencies.
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for_chunks(
      nf,
      [&](Index fb, Index fe) {
        try {
          for (Index f = fb; f < fe; ++f) {
            const CMatrix& s = smats[static_cast<std::size_t>(f)];
            Vector lam;
            CMatrix vecs;
            // A block with negligible imaginary part is solved in real
            // arithmetic (frequency 0 always, plus self-conjugate bins).
            if (s.imag().cwiseAbs().maxCoeff() <=
                1e-14 * std::max<Real>(1.0, s.real().cwiseAbs().maxCoeff())) {
              Eigen::SelfAdjointEigenSolver<Matrix> es(s.real());
              if (es.info() != Eigen::Success) {
                throw std::runtime_error("eigensolver failed");
              }
              lam = es.eigenvalues();
              vecs = es.eigenvectors().cast<Complex>();
            } else {
              Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
              if (es.info() != Eigen::Success) {
                throw std::runtime_error("eigensolver failed");
              }
              lam = es.eigenvalues();
              vecs = es.eigenvectors();
            }
            lam.reverseInPlace();
            vecs = vecs.rowwise().reverse().eval();
            clip_spectrum(lam, spec.freqs[static_cast<std::size_t>(f)]);
            spec.eigenvalues[static_cast<std::size_t>(f)] = std::move(lam);
            spec.vectors_walk[static_cast<std::size_t>(f)] =
                inv_sqrt_deg.asDiagonal() * vecs;
            spec.vectors_sym[static_cast<std::size_t>(f)] = std::move(vecs);
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          failure = std::current_exception();
        }
      },
      1);
  if (failure) std::rethrow_exception(failure);
  return spec;
}

Complex eigenfunction_eval(const SpectralData& spec, int ell, int n, Index i,
                           const GroupElement& g) {
  detail::require_same_group(spec.action.group, g.group, "eigenfunction_eval");
  int f = spec.index_of(std::abs(ell));
  bool conj_branch = spec.implied_conjugates && ell < 0;
  const CMatrix& vt = spec.vectors_walk[static_cast<std::size_t>(f)];
  if (n < 0 || n >= vt.cols() || i < 0 || i >= vt.rows()) {
    throw std::out_of_range("eigenfunction_eval: index out of range");
  }
  Complex value = vt(i, n);
  if (conj_branch) value = std::conj(value);
  return std::conj(iur_scalar(ell, g.as_angle())) * value;
}

std::vector<ScreeEntry> scree(const SpectralData& spec, int t) {
  if (t < 0) throw std::invalid_argument("scree: t must be >= 0");
  std::vector<ScreeEntry> entries;
  for (int f = 0; f < spec.n_freqs(); ++f) {
    int ell = spec.freqs[static_cast<std::size_t>(f)];
    const Vector& lam = spec.eigenvalues[static_cast<std::size_t>(f)];
    for (Index n = 0; n < lam.size(); ++n) {
      Real lp = std::pow(lam[n], static_cast<Real>(t));
      entries.push_back({ell, static_cast<int>(n), lam[n], lp});
      if (spec.implied_conjugates && ell != 0) {
        entries.push_back({-ell, static_cast<int>(n), lam[n], lp});
      }
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const ScreeEntry& a, const ScreeEntry& b) {
              if (a.lambda_pow_t != b.lambda_pow_t) {
                return a.lambda_pow_t > b.lambda_pow_t;
              }
              if (a.ell != b.ell) return a.ell < b.ell;
              return a.n < b.n;
            });
  return entries;
}

Real elbow_threshold(const std::vector<ScreeEntry>& entries) {
  const std::size_t n = entries.size();
  if (n < 3) return 0.0;
  Real best = 0.0;
  std::size_t best_idx = 0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    Real d2 = entries[k - 1].lambda_pow_t - 2.0 * entries[k].lambda_pow_t +
              entries[k + 1].lambda_pow_t;
    if (d2 > best) {
      best = d2;
      best_idx = k;
    }
  }
  if (best <= 0.0) return 0.0;  // no convex corner: keep everything
  return entries[best_idx].lambda_pow_t;
}

std::vector<RetainedCoord> retained_set(const SpectralData& spec, int t,
                                        Real delta) {
  if (t < 1) throw std::invalid_argument("retained_set: t must be >= 1");
  if (delta < 0.0) throw std::invalid_argument("retained_set: delta < 0");
  std::vector<RetainedCoord> coords;
  Real best = 0.0;
  for (int f = 0; f < spec.n_freqs(); ++f) {
    const Vector& lam = spec.eigenvalues[static_cast<std::size_t>(f)];
    for (Index n = 0; n < lam.size(); ++n) {
      Real lp = std::pow(lam[n], static_cast<Real>(t));
      best = std::max(best, lp);
      if (lp > delta) {
        coords.push_back({f, spec.freqs[static_cast<std::size_t>(f)],
                          static_cast<int>(n), lam[n], lp});
      }
    }
  }
  if (coords.empty()) {
    throw std::invalid_argument(
        "truncation threshold " + std::to_string(delta) +
        " retains nothing; the largest available lambda^t is " +
        std::to_string(best));
  }
  std::sort(coords.begin(), coords.end(),
            [](const RetainedCoord& a, const RetainedCoord& b) {
              if (a.lambda_pow_t != b.lambda_pow_t) {
                return a.lambda_pow_t > b.lambda_pow_t;
              }
              if (a.ell != b.ell) return a.ell < b.ell;
              return a.n < b.n;
            });
  return coords;
}

}  // namespace gidm
