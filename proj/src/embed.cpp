#include "gidm/embed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace gidm {

std::string embedding_kind_name(EmbeddingKind k) {
  switch (k) {
    case EmbeddingKind::EquivariantWalk: return "equivariant-walk";
    case EmbeddingKind::EquivariantSym: return "equivariant-sym";
    case EmbeddingKind::InvariantWalk: return "invariant-walk";
    case EmbeddingKind::InvariantSym: return "invariant-sym";
    case EmbeddingKind::FirstMoment: return "first-moment";
    case EmbeddingKind::Bispectrum: return "bispectrum";
  }
  throw std::logic_error("unreachable");
}

EmbeddingKind embedding_kind_from_name(const std::string& name) {
  for (EmbeddingKind k :
       {EmbeddingKind::EquivariantWalk, EmbeddingKind::EquivariantSym,
        EmbeddingKind::InvariantWalk, EmbeddingKind::InvariantSym,
        EmbeddingKind::FirstMoment, EmbeddingKind::Bispectrum}) {
    if (embedding_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown embedding kind: " + name);
}

Complex eigvec_value(const SpectralData& spec, bool walk, int signed_ell,
                     int n, Index i) {
  bool conjugate = false;
  int ell = signed_ell;
  if (spec.implied_conjugates && signed_ell < 0) {
    ell = -signed_ell;
    conjugate = true;
  }
  int f = spec.index_of(ell);
  const CMatrix& vecs = walk ? spec.vectors_walk[static_cast<std::size_t>(f)]
                             : spec.vectors_sym[static_cast<std::size_t>(f)];
  if (n < 0 || n >= vecs.cols() || i < 0 || i >= vecs.rows()) {
    throw std::out_of_range("eigvec_value: index out of range");
  }
  Complex v = vecs(i, n);
  return conjugate ? std::conj(v) : v;
}

namespace {

void check_point_index(const SpectralData& spec, Index i) {
  if (i < 0 || i >= spec.n_points()) {
    throw std::out_of_range("point index out of range");
  }
}

// Retained coordinates grouped per stored frequency, n ascending.
std::vector<std::vector<RetainedCoord>> group_by_freq(
    const SpectralData& spec, const std::vector<RetainedCoord>& coords) {
  std::vector<std::vector<RetainedCoord>> by_freq(
      static_cast<std::size_t>(spec.n_freqs()));
  for (const auto& c : coords) {
    by_freq[static_cast<std::size_t>(c.freq_idx)].push_back(c);
  }
  for (auto& v : by_freq) {
    std::sort(v.begin(), v.end(),
              [](const RetainedCoord& a, const RetainedCoord& b) {
                return a.n < b.n;
              });
  }
  return by_freq;
}

}  // namespace

EmbeddingVector equivariant_embed(const SpectralData& spec, Index i,
                                  const GroupElement& g, int t, Real delta,
                                  bool walk) {
  detail::require_same_group(spec.action.group, g.group, "equivariant_embed");
  check_point_index(spec, i);
  std::vector<RetainedCoord> coords = retained_set(spec, t, delta);

  EmbeddingVector out;
  out.kind = walk ? EmbeddingKind::EquivariantWalk
                  : EmbeddingKind::EquivariantSym;
  out.t1 = out.t2 = t;
  out.delta = delta;
  out.labels.reserve(coords.size());
  out.coords.resize(static_cast<Index>(coords.size()));
  out.weights.resize(static_cast<Index>(coords.size()));
  Real angle = g.as_angle();
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const auto& c = coords[k];
    const CMatrix& vecs =
        walk ? spec.vectors_walk[static_cast<std::size_t>(c.freq_idx)]
             : spec.vectors_sym[static_cast<std::size_t>(c.freq_idx)];
    out.labels.push_back({c.ell, 0, c.n, -1, -1});
    out.coords[static_cast<Index>(k)] =
        c.lambda_pow_t * std::conj(iur_scalar(c.ell, angle)) * vecs(i, c.n);
    out.weights[static_cast<Index>(k)] = spec.freq_weight(c.freq_idx);
  }
  return out;
}

EmbeddingVector invariant_embed(const SpectralData& spec, Index i, int t,
                                Real delta, bool walk) {
  check_point_index(spec, i);
  auto by_freq = group_by_freq(spec, retained_set(spec, t, delta));

  struct Entry {
    Real product;
    CoordLabel label;
    Complex value;
    Real weight;
  };
  std::vector<Entry> entries;
  for (int f = 0; f < spec.n_freqs(); ++f) {
    const auto& list = by_freq[static_cast<std::size_t>(f)];
    if (list.empty()) continue;
    const CMatrix& vecs =
        walk ? spec.vectors_walk[static_cast<std::size_t>(f)]
             : spec.vectors_sym[static_cast<std::size_t>(f)];
    Real wf = spec.freq_weight(f);
    for (std::size_t a = 0; a < list.size(); ++a) {
      for (std::size_t b = a; b < list.size(); ++b) {
        const auto& ca = list[a];
        const auto& cb = list[b];
        Entry e;
        e.product = ca.lambda_pow_t * cb.lambda_pow_t;
        e.label = {ca.ell, 0, ca.n, cb.n, -1};
        e.value = e.product * vecs(i, ca.n) * std::conj(vecs(i, cb.n));
        e.weight = wf * (ca.n == cb.n ? 1.0 : 2.0);
        entries.push_back(e);
      }
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.product != b.product) return a.product > b.product;
    return std::array{a.label.ell1, a.label.n1, a.label.n2} <
           std::array{b.label.ell1, b.label.n1, b.label.n2};
  });

  EmbeddingVector out;
  out.kind = walk ? EmbeddingKind::InvariantWalk : EmbeddingKind::InvariantSym;
  out.t1 = out.t2 = t;
  out.delta = delta;
  out.upper_pairs = true;
  out.labels.reserve(entries.size());
  out.coords.resize(static_cast<Index>(entries.size()));
  out.weights.resize(static_cast<Index>(entries.size()));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    out.labels.push_back(entries[k].label);
    out.coords[static_cast<Index>(k)] = entries[k].value;
    out.weights[static_cast<Index>(k)] = entries[k].weight;
  }
  return out;
}

EmbeddingVector mixed_time_invariant_embed(const SpectralData& spec, Index i,
                                           int t1, int t2, Real delta) {
  if (t1 < 1 || t2 < 1) {
    throw std::invalid_argument("mixed_time_invariant_embed: times must be >= 1");
  }
  check_point_index(spec, i);
  // Retention is driven by the first time; the pair (n, n') is kept when both
  // factors survive. All ordered pairs are stored: for t1 != t2 the swapped
  // pair is not the conjugate of its partner.
  auto by_freq = group_by_freq(spec, retained_set(spec, t1, delta));

  struct Entry {
    Real product;
    CoordLabel label;
    Complex value;
    Real weight;
  };
  std::vector<Entry> entries;
  for (int f = 0; f < spec.n_freqs(); ++f) {
    const auto& list = by_freq[static_cast<std::size_t>(f)];
    if (list.empty()) continue;
    const CMatrix& vecs = spec.vectors_walk[static_cast<std::size_t>(f)];
    Real wf = spec.freq_weight(f);
    for (const auto& ca : list) {
      Real la = std::pow(ca.lambda, static_cast<Real>(t1));
      for (const auto& cb : list) {
        Real lb = std::pow(cb.lambda, static_cast<Real>(t2));
        Entry e;
        e.product = la * lb;
        e.label = {ca.ell, 0, ca.n, cb.n, -1};
        e.value = e.product * vecs(i, ca.n) * std::conj(vecs(i, cb.n));
        e.weight = wf;
        entries.push_back(e);
      }
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.product != b.product) return a.product > b.product;
    return std::array{a.label.ell1, a.label.n1, a.label.n2} <
           std::array{b.label.ell1, b.label.n1, b.label.n2};
  });

  EmbeddingVector out;
  out.kind = EmbeddingKind::InvariantWalk;
  out.t1 = t1;
  out.t2 = t2;
  out.delta = delta;
  out.upper_pairs = false;
  out.labels.reserve(entries.size());
  out.coords.resize(static_cast<Index>(entries.size()));
  out.weights.resize(static_cast<Index>(entries.size()));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    out.labels.push_back(entries[k].label);
    out.coords[static_cast<Index>(k)] = entries[k].value;
    out.weights[static_cast<Index>(k)] = entries[k].weight;
  }
  return out;
}

Vector first_moment(const SpectralData& spec, Index i, int t) {
  if (t < 1) throw std::invalid_argument("first_moment: t must be >= 1");
  check_point_index(spec, i);
  int f0 = spec.index_of(0);
  const Vector& lam = spec.eigenvalues[static_cast<std::size_t>(f0)];
  const CMatrix& vt = spec.vectors_walk[static_cast<std::size_t>(f0)];
  const Index n_pts = spec.n_points();
  Vector m = Vector::Zero(n_pts);
  for (Index n = 0; n < lam.size(); ++n) {
    Real lp = std::pow(lam[n], static_cast<Real>(t));
    if (lp == 0.0) continue;
    Complex vi = vt(i, n);
    for (Index k = 0; k < n_pts; ++k) {
      m[k] += lp * std::real(vi * std::conj(vt(k, n)));
    }
  }
  m.array() *= spec.degrees.array();
  for (Index k = 0; k < n_pts; ++k) {
    if (m[k] < 0.0 && m[k] > -1e-12) m[k] = 0.0;
  }
  return m;
}

EmbeddingVector bispectrum_embed(const SpectralData& spec, Index i, int t,
                                 Real delta, long max_triples) {
  check_point_index(spec, i);
  if (max_triples < 1) {
    throw std::invalid_argument("bispectrum_embed: triple budget < 1");
  }
  const bool cyclic_group = !spec.implied_conjugates;
  const int order = spec.action.group.order;

  // Signed retained coordinate list; negatives are expansions for SO(2).
  struct Signed {
    int ell;
    int n;
    Real lam;
  };
  std::vector<Signed> signed_coords;
  std::vector<std::vector<Signed>> per_ell;  // indexed by signed ell offset
  const int span = cyclic_group ? order : 2 * spec.max_freq + 1;
  const int offset = cyclic_group ? 0 : spec.max_freq;
  per_ell.resize(static_cast<std::size_t>(span));
  for (const auto& c : retained_set(spec, t, delta)) {
    signed_coords.push_back({c.ell, c.n, c.lambda});
    per_ell[static_cast<std::size_t>(c.ell + offset)].push_back(
        {c.ell, c.n, c.lambda});
    if (!cyclic_group && c.ell != 0) {
      signed_coords.push_back({-c.ell, c.n, c.lambda});
      per_ell[static_cast<std::size_t>(-c.ell + offset)].push_back(
          {-c.ell, c.n, c.lambda});
    }
  }

  struct Entry {
    Real product;
    CoordLabel label;
  };
  auto better = [](const Entry& a, const Entry& b) {
    if (a.product != b.product) return a.product > b.product;
    return std::array{a.label.ell1, a.label.ell2, a.label.n1, a.label.n2,
                      a.label.n3} < std::array{b.label.ell1, b.label.ell2,
                                               b.label.n1, b.label.n2,
                                               b.label.n3};
  };
  // Min-heap on "better": top is the worst kept entry.
  std::priority_queue<Entry, std::vector<Entry>, decltype(better)> kept(better);
  long skipped = 0;
  long enumerated = 0;

  for (const auto& a : signed_coords) {
    for (const auto& b : signed_coords) {
      int ell3 = a.ell + b.ell;
      if (cyclic_group) {
        ell3 = ((ell3 % order) + order) % order;
      } else if (std::abs(ell3) > spec.max_freq) {
        ++skipped;
        continue;
      }
      for (const auto& c : per_ell[static_cast<std::size_t>(ell3 + offset)]) {
        Entry e;
        e.product = std::pow(a.lam * b.lam * c.lam, static_cast<Real>(t));
        e.label = {a.ell, b.ell, a.n, b.n, c.n};
        ++enumerated;
        if (static_cast<long>(kept.size()) < max_triples) {
          kept.push(e);
        } else if (better(e, kept.top())) {
          kept.pop();
          kept.push(e);
        }
      }
    }
  }
  long capped = enumerated - static_cast<long>(kept.size());

  std::vector<Entry> entries;
  entries.reserve(kept.size());
  while (!kept.empty()) {
    entries.push_back(kept.top());
    kept.pop();
  }
  std::sort(entries.begin(), entries.end(), better);

  EmbeddingVector out;
  out.kind = EmbeddingKind::Bispectrum;
  out.t1 = out.t2 = t;
  out.delta = delta;
  out.skipped_triples = skipped;
  out.capped_triples = capped;
  out.labels.reserve(entries.size());
  out.coords.resize(static_cast<Index>(entries.size()));
  out.weights.resize(static_cast<Index>(entries.size()));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& lab = entries[k].label;
    out.labels.push_back(lab);
    Complex v1 = eigvec_value(spec, true, lab.ell1, lab.n1, i);
    Complex v2 = eigvec_value(spec, true, lab.ell2, lab.n2, i);
    int ell3 = cyclic_group ? (((lab.ell1 + lab.ell2) % order) + order) % order
                            : lab.ell1 + lab.ell2;
    Complex v3 = eigvec_value(spec, true, ell3, lab.n3, i);
    out.coords[static_cast<Index>(k)] =
        entries[k].product * v1 * v2 * std::conj(v3);
    out.weights[static_cast<Index>(k)] = 1.0;
  }
  return out;
}

namespace {

void require_compatible(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.kind != b.kind || a.t1 != b.t1 || a.t2 != b.t2 ||
      a.size() != b.size() || a.upper_pairs != b.upper_pairs) {
    throw std::invalid_argument("embedding mismatch: kinds or sizes differ");
  }
  if (!(a.labels == b.labels)) {
    throw std::invalid_argument("embedding mismatch: coordinate labels differ");
  }
}

}  // namespace

Complex embedding_inner(const EmbeddingVector& a, const EmbeddingVector& b) {
  require_compatible(a, b);
  Complex acc = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    acc += a.weights[k] * a.coords[k] * std::conj(b.coords[k]);
  }
  return acc;
}

Real embedding_norm(const EmbeddingVector& a) {
  Real acc = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    acc += a.weights[k] * std::norm(a.coords[k]);
  }
  return std::sqrt(acc);
}

Real embedding_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  require_compatible(a, b);
  Real acc = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    acc += a.weights[k] * std::norm(a.coords[k] - b.coords[k]);
  }
  return std::sqrt(acc);
}

}  // namespace gidm
