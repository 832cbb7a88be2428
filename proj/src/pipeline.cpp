#include "gidm/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gidm/parallel.hpp"
#include "gidm/rng.hpp"

namespace gidm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int next_pow2(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

int resolve_quad_nodes(const RunConfig& config, const PointCloud& cloud) {
  if (cloud.action.group.id == GroupId::Cyclic) {
    int order = cloud.action.group.order;
    if (config.quad_nodes != 0 && config.quad_nodes != order) {
      throw ConfigError("quad-nodes must equal the cyclic order " +
                        std::to_string(order));
    }
    return order;
  }
  if (config.quad_nodes != 0) {
    if (config.quad_nodes < 2 * config.max_freq + 2) {
      throw ConfigError("quad-nodes must be at least 2*ell-max + 2");
    }
    return config.quad_nodes;
  }
  return next_pow2(2 * config.max_freq + 2);
}

fs::path resolve_cache_dir(const RunConfig& config) {
  if (config.cache_dir) return *config.cache_dir;
  if (const char* env = std::getenv("GIDM_CACHE_DIR"); env && *env) {
    return fs::path(env);
  }
  return config.out_dir / "cache";
}

/// Records written output files so a failing run can remove its partial
/// outputs. Cache files are reusable state and stay.
class FileTracker {
 public:
  void record(const fs::path& p) { files_.push_back(p); }
  void discard_all() {
    for (const auto& p : files_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  std::vector<fs::path> files_;
};

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json dataset_to_json(const DatasetSpec& d) {
  json j;
  j["shape"] = shape_name(d.shape);
  j["n"] = d.n_points;
  j["major_radius"] = d.major_radius;
  j["minor_radius"] = d.minor_radius;
  j["area_uniform"] = d.area_uniform;
  j["group"] = d.group.id == GroupId::SO2
                   ? std::string("so2")
                   : "c" + std::to_string(d.group.order);
  j["seed"] = d.seed;
  j["injected"] = json::array();
  for (const auto& c : d.injected) {
    j["injected"].push_back({{"source", c.source}, {"angle", c.angle}});
  }
  return j;
}

DatasetSpec dataset_from_json(const json& j) {
  DatasetSpec d;
  d.shape = shape_from_name(j.at("shape"));
  d.n_points = j.at("n");
  d.major_radius = j.at("major_radius");
  d.minor_radius = j.at("minor_radius");
  d.area_uniform = j.at("area_uniform");
  std::string group = j.at("group");
  d.group = group == "so2" ? so2() : cyclic(std::stoi(group.substr(1)));
  d.seed = j.at("seed");
  for (const auto& c : j.at("injected")) {
    d.injected.push_back(
        {c.at("source").get<Index>(), c.at("angle").get<Real>()});
  }
  return d;
}

void log_line(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

}  // namespace

PreparedSpectral prepare_spectral(const RunConfig& config, std::ostream* log) {
  if (config.dataset.has_value() == config.input_prefix.has_value()) {
    throw ConfigError("config: exactly one of dataset or input must be set");
  }
  if (config.t < 1) throw ConfigError("config.t: diffusion time must be >= 1");
  if (config.t2 && *config.t2 < 1) throw ConfigError("config.t2: must be >= 1");
  if (config.max_freq < 0) throw ConfigError("config.max-freq: must be >= 0");

  PreparedSpectral prep;
  prep.cloud = config.dataset ? make_cloud(*config.dataset)
                              : load_cloud(*config.input_prefix);
  if (prep.cloud.size() < 2) {
    throw ConfigError("config: the pipeline needs at least two points");
  }
  prep.quad_nodes = resolve_quad_nodes(config, prep.cloud);
  prep.eps = config.eps ? *config.eps
                        : median_bandwidth(prep.cloud, prep.quad_nodes,
                                           config.seed ^ 0x5eedbead);
  if (!(prep.eps > 0.0)) throw ConfigError("config.eps: must be positive");

  fs::path cache_dir = resolve_cache_dir(config);
  fs::create_directories(cache_dir);
  std::uint64_t key =
      content_hash(prep.cloud, prep.eps, config.max_freq, prep.quad_nodes);
  fs::path blocks_file = cache_dir / (hash_hex(key) + ".blocks.bin");
  fs::path spectral_file = cache_dir / (hash_hex(key) + ".spectral.bin");

  std::optional<SpectralData> cached_spec = load_spectral_cache(spectral_file);
  std::optional<FourierBlocks> blocks;
  if (!cached_spec) {
    blocks = load_blocks_cache(blocks_file);
    if (!blocks) {
      log_line(log, "factoring orbit kernel (N=" +
                        std::to_string(prep.cloud.size()) +
                        ", M=" + std::to_string(prep.quad_nodes) + ")");
      blocks =
          fourier_blocks(prep.cloud, prep.eps, config.max_freq, prep.quad_nodes);
      save_blocks_cache(blocks_file, *blocks);
    }
    log_line(log, "decomposing " + std::to_string(blocks->n_freqs()) +
                      " frequency blocks");
    cached_spec = eigendecompose(*blocks);
    save_spectral_cache(spectral_file, *cached_spec);
    prep.l_eff = effective_bandlimit(*blocks, 1e-6);
  } else {
    // the bandlimit report needs block energies; reuse or rebuild cheaply
    blocks = load_blocks_cache(blocks_file);
    if (!blocks) {
      blocks =
          fourier_blocks(prep.cloud, prep.eps, config.max_freq, prep.quad_nodes);
      save_blocks_cache(blocks_file, *blocks);
    }
    prep.l_eff = effective_bandlimit(*blocks, 1e-6);
  }
  prep.spec = std::move(*cached_spec);
  return prep;
}

PipelineResult run_pipeline(const RunConfig& config, std::ostream* log) {
  fs::create_directories(config.out_dir);
  FileTracker tracker;
  try {
    PreparedSpectral prep = prepare_spectral(config, log);
    const SpectralData& spec = prep.spec;
    const PointCloud& cloud = prep.cloud;
    const Index n = cloud.size();

    PipelineResult result;
    result.out_dir = config.out_dir;
    result.eps = prep.eps;
    result.l_eff = prep.l_eff;
    result.quad_nodes = prep.quad_nodes;
    result.n_points = n;

    auto out_path = [&](const std::string& name) {
      fs::path p = config.out_dir / name;
      tracker.record(p);
      return p;
    };

    write_cloud(config.out_dir / "points", cloud);
    tracker.record(config.out_dir / "points.csv");
    tracker.record(config.out_dir / "points.json");

    std::vector<ScreeEntry> scree_entries = scree(spec, config.t);
    write_scree_csv(out_path("scree.csv"), scree_entries);

    result.delta = config.delta ? *config.delta
                                : elbow_threshold(scree_entries);
    const Real delta = result.delta;
    const int t = config.t;
    log_line(log, "delta = " + format_double(delta) +
                      ", L_eff = " + std::to_string(prep.l_eff));

    Index source = config.source.value_or(
        cloud.injected.empty() ? Index(0) : cloud.injected.front().source);
    if (source < 0 || source >= n) throw ConfigError("config.source: out of range");
    result.source = source;

    // Index of the appended copy of the source, when one was injected.
    std::optional<Index> copy_index;
    Index first_copy_row = n - static_cast<Index>(cloud.injected.size());
    for (std::size_t c = 0; c < cloud.injected.size(); ++c) {
      if (cloud.injected[c].source == source) {
        copy_index = first_copy_row + static_cast<Index>(c);
        break;
      }
    }

    GroupElement id = identity(spec.action.group);
    auto embed_kind = [&](EmbeddingKind kind, Index i) -> EmbeddingVector {
      switch (kind) {
        case EmbeddingKind::EquivariantWalk:
          return equivariant_embed(spec, i, id, t, delta, true);
        case EmbeddingKind::EquivariantSym:
          return equivariant_embed(spec, i, id, t, delta, false);
        case EmbeddingKind::InvariantWalk:
          return config.t2 && *config.t2 != t
                     ? mixed_time_invariant_embed(spec, i, t, *config.t2, delta)
                     : invariant_embed(spec, i, t, delta, true);
        case EmbeddingKind::InvariantSym:
          return invariant_embed(spec, i, t, delta, false);
        case EmbeddingKind::Bispectrum:
          return bispectrum_embed(spec, i, t, delta, config.bispectrum_budget);
        default:
          throw ConfigError("first-moment has no coordinate embedding export");
      }
    };

    // Embedding CSVs and heat-map columns per requested kind.
    std::vector<std::string> heat_names;
    std::vector<Vector> heat_columns;
    for (EmbeddingKind kind : config.kinds) {
      std::string kname = embedding_kind_name(kind);
      if (kind == EmbeddingKind::FirstMoment) {
        Matrix moments(n, n);
        parallel_for(n, [&](Index i) {
          moments.row(i) = first_moment(spec, i, t).transpose();
        }, 1);
        write_matrix_csv(out_path("first_moment.csv"), moments);
        Vector col(n);
        for (Index j = 0; j < n; ++j) {
          col[j] = (moments.row(source) - moments.row(j)).norm();
        }
        heat_names.push_back(kname + "_src");
        heat_columns.push_back(col);
        continue;
      }
      std::vector<EmbeddingVector> rows(static_cast<std::size_t>(n));
      parallel_for(n, [&](Index i) {
        rows[static_cast<std::size_t>(i)] = embed_kind(kind, i);
      }, 1);
      write_embeddings_csv(out_path("embedding_" + kname + ".csv"),
                           out_path("embedding_" + kname + "_header.json"),
                           rows);
      Vector col(n);
      const EmbeddingVector& src_row = rows[static_cast<std::size_t>(source)];
      for (Index j = 0; j < n; ++j) {
        col[j] = embedding_distance(src_row, rows[static_cast<std::size_t>(j)]);
      }
      heat_names.push_back(kname + "_src");
      heat_columns.push_back(col);
      if (copy_index) {
        Vector ccol(n);
        const EmbeddingVector& copy_row =
            rows[static_cast<std::size_t>(*copy_index)];
        for (Index j = 0; j < n; ++j) {
          ccol[j] =
              embedding_distance(copy_row, rows[static_cast<std::size_t>(j)]);
        }
        heat_names.push_back(kname + "_copy");
        heat_columns.push_back(ccol);
      }
    }
    write_heatmap_csv(out_path("heatmap.csv"), cloud, heat_names, heat_columns);

    // Alignment row for the heat-map source.
    {
      std::vector<AlignmentRow> rows(static_cast<std::size_t>(n));
      parallel_for(n, [&](Index j) {
        DistanceReport rep = aligned_distance(spec, source, j, t, delta, true,
                                              config.align_grid);
        rows[static_cast<std::size_t>(j)] = {source, j,
                                             rep.alignment->as_angle(),
                                             rep.value};
      }, 1);
      write_alignment_csv(out_path("alignment.csv"), rows);
    }

    // Full pairwise matrices only at sizes where the quadratic cost is sane.
    if (n <= config.pairwise_max || config.force_pairwise) {
      for (EmbeddingKind kind : config.kinds) {
        if (kind == EmbeddingKind::FirstMoment ||
            kind == EmbeddingKind::Bispectrum) {
          continue;
        }
        DistanceKind dk = distance_kind_from_name(embedding_kind_name(kind));
        Matrix m = pairwise_matrix(spec, dk, t, delta, config.align_grid);
        write_matrix_csv(out_path("matrix_" + distance_kind_name(dk) + ".csv"),
                         m);
      }
    }

    // Manifest: every resolved number a rerun needs.
    json manifest;
    manifest["version"] = 1;
    manifest["seed"] = config.seed;
    if (config.dataset) manifest["dataset"] = dataset_to_json(*config.dataset);
    if (config.input_prefix) manifest["input_prefix"] = config.input_prefix->string();
    json resolved;
    resolved["eps"] = prep.eps;
    resolved["delta"] = delta;
    resolved["l_eff"] = prep.l_eff;
    resolved["max_freq"] = config.max_freq;
    resolved["quad_nodes"] = prep.quad_nodes;
    resolved["t"] = t;
    resolved["t2"] = config.t2 ? *config.t2 : t;
    resolved["source"] = source;
    resolved["align_grid"] = config.align_grid;
    resolved["bispectrum_budget"] = config.bispectrum_budget;
    resolved["pairwise_max"] = config.pairwise_max;
    resolved["force_pairwise"] = config.force_pairwise;
    manifest["resolved"] = resolved;
    manifest["kinds"] = json::array();
    for (EmbeddingKind kind : config.kinds) {
      manifest["kinds"].push_back(embedding_kind_name(kind));
    }
    manifest["out_dir"] = config.out_dir.string();
    manifest["outputs"] = json::array();
    for (const auto& p : tracker.files()) {
      manifest["outputs"].push_back(p.filename().string());
    }
    fs::path manifest_file = config.out_dir / "run-manifest.json";
    {
      std::ofstream out(manifest_file, std::ios::binary);
      if (!out) throw ConfigError("cannot write manifest");
      out << manifest.dump(2) << '\n';
    }
    result.manifest_file = manifest_file;
    for (const auto& p : tracker.files()) result.outputs.push_back(p);
    return result;
  } catch (...) {
    tracker.discard_all();
    throw;
  }
}

RunConfig config_from_manifest(const fs::path& manifest_file) {
  std::ifstream in(manifest_file, std::ios::binary);
  if (!in) throw ConfigError("cannot read manifest " + manifest_file.string());
  json manifest = json::parse(in);

  RunConfig config;
  config.seed = manifest.at("seed");
  if (manifest.contains("dataset")) {
    config.dataset = dataset_from_json(manifest.at("dataset"));
  }
  if (manifest.contains("input_prefix")) {
    config.input_prefix = fs::path(manifest.at("input_prefix").get<std::string>());
  }
  const json& resolved = manifest.at("resolved");
  config.eps = resolved.at("eps").get<Real>();
  config.delta = resolved.at("delta").get<Real>();
  config.max_freq = resolved.at("max_freq");
  config.quad_nodes = resolved.at("quad_nodes");
  config.t = resolved.at("t");
  config.t2 = resolved.at("t2").get<int>();
  config.source = resolved.at("source").get<Index>();
  config.align_grid = resolved.at("align_grid");
  config.bispectrum_budget = resolved.at("bispectrum_budget");
  config.pairwise_max = resolved.at("pairwise_max").get<Index>();
  config.force_pairwise = resolved.at("force_pairwise");
  config.kinds.clear();
  for (const auto& k : manifest.at("kinds")) {
    config.kinds.push_back(embedding_kind_from_name(k));
  }
  config.out_dir = fs::path(manifest.at("out_dir").get<std::string>());
  return config;
}

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerifyCheck& c) { return c.pass; });
}

namespace {

VerifyCheck make_check(const std::string& name, Real lhs, Real rhs, Real tol) {
  VerifyCheck c;
  c.name = name;
  c.lhs = lhs;
  c.rhs = rhs;
  c.abs_err = std::abs(lhs - rhs);
  Real scale = std::max(std::abs(lhs), std::abs(rhs));
  c.rel_err = scale > 0.0 ? c.abs_err / scale : 0.0;
  c.tol = tol;
  c.pass = c.abs_err <= tol;
  return c;
}

}  // namespace

void check_stochasticity(DenseWalk& dense, Real tol,
                         std::vector<VerifyCheck>& out) {
  Real worst = 0.0;
  for (Index i = 0; i < dense.N; ++i) {
    for (int a = 0; a < dense.M; ++a) {
      Index u = dense.node(i, a);
      Real row = dense.W.row(u).sum() / (dense.M * dense.degrees[i]);
      worst = std::max(worst, std::abs(row - 1.0));
    }
  }
  VerifyCheck c = make_check("walk-row-stochasticity", worst, 0.0, tol);
  out.push_back(c);
}

void check_spectral_union(DenseWalk& dense, const SpectralData& spec, Real tol,
                          std::vector<VerifyCheck>& out) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense.S);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("dense eigensolver failed");
  }
  std::vector<Real> dense_eigs(es.eigenvalues().data(),
                               es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(dense_eigs.begin(), dense_eigs.end(), std::greater<>());

  std::vector<Real> union_eigs;
  for (int f = 0; f < spec.n_freqs(); ++f) {
    const Vector& lam = spec.eigenvalues[static_cast<std::size_t>(f)];
    int copies = static_cast<int>(spec.freq_weight(f));
    for (Index k = 0; k < lam.size(); ++k) {
      for (int c = 0; c < copies; ++c) union_eigs.push_back(lam[k]);
    }
  }
  std::sort(union_eigs.begin(), union_eigs.end(), std::greater<>());

  // Cyclic covers the whole spectrum; SO(2) covers all grid frequencies short
  // of Nyquist, so its union embeds into the dense multiset.
  Real worst = 0.0;
  bool ok = true;
  if (!spec.implied_conjugates) {
    ok = union_eigs.size() == dense_eigs.size();
    if (ok) {
      for (std::size_t k = 0; k < union_eigs.size(); ++k) {
        worst = std::max(worst, std::abs(union_eigs[k] - dense_eigs[k]));
      }
    }
  } else {
    std::size_t p = 0;
    for (Real u : union_eigs) {
      while (p < dense_eigs.size() && dense_eigs[p] > u + tol) ++p;
      if (p == dense_eigs.size() || std::abs(dense_eigs[p] - u) > tol) {
        ok = false;
        worst = std::max(worst, p == dense_eigs.size()
                                    ? std::abs(u)
                                    : std::abs(dense_eigs[p] - u));
        break;
      }
      worst = std::max(worst, std::abs(dense_eigs[p] - u));
      ++p;
    }
  }
  VerifyCheck c = make_check("spectral-union", worst, 0.0, tol);
  c.pass = ok && worst <= tol;
  out.push_back(c);
}

namespace {

struct VerifyInstance {
  PointCloud cloud;
  SpectralData spec;
  DenseWalk dense;
  Real eps = 0.0;
  int quad_nodes = 0;
  Index copy_index = 0;
  Real copy_angle = 0.0;
};

VerifyInstance build_instance(const VerifyConfig& config, int quad_nodes,
                              std::ostream* log) {
  VerifyInstance inst;
  PointCloud base = config.shape == Shape::Torus
                        ? sample_torus(config.n_points, 2.0, 1.0, config.seed)
                        : sample_sphere(config.n_points, config.seed);
  base.action.group = config.group;
  int m = config.group.id == GroupId::Cyclic ? config.group.order : quad_nodes;
  // Copy of point 0 at a grid angle, for the alignment and invariance checks.
  int beta_node = std::max(1, m / 4);
  inst.copy_angle = kTwoPi * beta_node / m;
  inst.cloud = inject_copy(base, 0, inst.copy_angle);
  inst.copy_index = inst.cloud.size() - 1;
  inst.quad_nodes = m;
  inst.eps = config.eps ? *config.eps
                        : median_bandwidth(inst.cloud, m, config.seed);
  int max_freq = config.group.id == GroupId::Cyclic ? config.group.order - 1
                                                    : m / 2 - 1;
  if (log) {
    *log << "verify instance: N=" << inst.cloud.size() << " M=" << m
         << " L=" << max_freq << " eps=" << format_double(inst.eps) << '\n';
  }
  // dense first: its size guard should trip before any factorization work
  inst.dense = build_dense(inst.cloud, inst.eps, m);
  FourierBlocks blocks = fourier_blocks(inst.cloud, inst.eps, max_freq, m);
  inst.spec = eigendecompose(blocks);
  return inst;
}

// Distance agreement checks; returns the worst error per family so the SO(2)
// convergence rows can compare two grids.
struct DistanceErrors {
  Real equivariant_walk = 0.0;
  Real equivariant_sym = 0.0;
  Real invariant_walk = 0.0;
  Real invariant_sym = 0.0;
  Real hs = 0.0;
  Real moment = 0.0;
  Real mixed = 0.0;
};

DistanceErrors distance_errors(VerifyInstance& inst, int t) {
  DistanceErrors err;
  const Index n = inst.cloud.size();
  const int m = inst.quad_nodes;
  RandomStream rng(7);
  GroupElement id = identity(inst.spec.action.group);
  auto element_at = [&](int node) {
    return inst.spec.action.group.id == GroupId::Cyclic
               ? cyclic_element(inst.spec.action.group.order, node)
               : so2_element(kTwoPi * node / m);
  };
  for (int s = 0; s < 6; ++s) {
    Index i = rng.uniform_index(n);
    Index j = rng.uniform_index(n);
    int a = static_cast<int>(rng.uniform_index(m));
    int b = static_cast<int>(rng.uniform_index(m));
    Real dw = dense_diffusion_distance(inst.dense, i, a, j, b, t, true);
    Real sw = equivariant_distance(inst.spec, i, element_at(a), j,
                                   element_at(b), t, 0.0, true)
                  .value;
    err.equivariant_walk = std::max(err.equivariant_walk, std::abs(dw - sw));
    Real ds = dense_diffusion_distance(inst.dense, i, a, j, b, t, false);
    Real ss = equivariant_distance(inst.spec, i, element_at(a), j,
                                   element_at(b), t, 0.0, false)
                  .value;
    err.equivariant_sym = std::max(err.equivariant_sym, std::abs(ds - ss));
  }
  for (int s = 0; s < 4; ++s) {
    Index i = rng.uniform_index(n);
    Index j = rng.uniform_index(n);
    auto cw = dense_cross_correlation(inst.dense, i, j, t, true);
    Real ew = embedding_distance(invariant_embed(inst.spec, i, t, 0.0, true),
                                 invariant_embed(inst.spec, j, t, 0.0, true));
    err.invariant_walk = std::max(err.invariant_walk, std::abs(cw.value - ew));
    auto cs = dense_cross_correlation(inst.dense, i, j, t, false);
    Real es = embedding_distance(invariant_embed(inst.spec, i, t, 0.0, false),
                                 invariant_embed(inst.spec, j, t, 0.0, false));
    err.invariant_sym = std::max(err.invariant_sym, std::abs(cs.value - es));
    Real hs_spec = hs_inner(inst.spec, i, j, t);
    Real hs_dense = dense_hs_norm(inst.dense, i, j, 2 * t);
    err.hs = std::max(err.hs, std::abs(hs_spec - hs_dense));
    Vector ms = first_moment(inst.spec, i, t);
    Vector md = dense_first_moment(inst.dense, i, t);
    err.moment = std::max(err.moment, (ms - md).cwiseAbs().maxCoeff());
    auto cm = dense_cross_correlation(inst.dense, i, j, t, true, t + 1);
    Real em = embedding_distance(
        mixed_time_invariant_embed(inst.spec, i, t, t + 1, 0.0),
        mixed_time_invariant_embed(inst.spec, j, t, t + 1, 0.0));
    err.mixed = std::max(err.mixed, std::abs(cm.value - em));
  }
  return err;
}

}  // namespace

VerifyReport run_verify(const VerifyConfig& config, std::ostream* log) {
  if (config.group.id == GroupId::Cyclic && config.group.order < 2) {
    throw ConfigError("verify: cyclic order must be >= 2");
  }
  int base_nodes = config.group.id == GroupId::Cyclic
                       ? config.group.order
                       : (config.quad_nodes ? config.quad_nodes : 64);
  const bool cyclic_instance = config.group.id == GroupId::Cyclic;
  const Real dist_tol = cyclic_instance ? 1e-8 : 1e-3;
  const int t = config.t;

  VerifyReport report;
  report.seed = config.seed;
  VerifyInstance inst = build_instance(config, base_nodes, log);

  check_stochasticity(inst.dense, 1e-12, report.checks);
  check_spectral_union(inst.dense, inst.spec, 1e-9, report.checks);

  DistanceErrors err = distance_errors(inst, t);
  report.checks.push_back(
      make_check("equivariant-walk-distance", err.equivariant_walk, 0.0, dist_tol));
  report.checks.push_back(
      make_check("equivariant-sym-distance", err.equivariant_sym, 0.0, dist_tol));
  report.checks.push_back(
      make_check("invariant-walk-distance", err.invariant_walk, 0.0, dist_tol));
  report.checks.push_back(
      make_check("invariant-sym-distance", err.invariant_sym, 0.0, dist_tol));
  report.checks.push_back(make_check("hs-identity", err.hs, 0.0, dist_tol));
  report.checks.push_back(make_check("first-moment", err.moment, 0.0, dist_tol));
  report.checks.push_back(make_check("mixed-time-invariant", err.mixed, 0.0, dist_tol));

  {
    auto cc = dense_cross_correlation(inst.dense, 0, inst.copy_index, t, true);
    report.checks.push_back(make_check("cross-correlation-mass", cc.mass_i, 1.0, 1e-10));
    report.checks.push_back(
        make_check("invariance-of-injected-copy", cc.value, 0.0,
                   cyclic_instance ? 1e-10 : 1e-6));
  }

  {
    int grid = cyclic_instance ? inst.quad_nodes
                               : std::max(1024, 4 * inst.quad_nodes);
    DistanceReport rep = aligned_distance(inst.spec, 0, inst.copy_index, t, 0.0,
                                          true, grid);
    report.checks.push_back(make_check("alignment-value", rep.value, 0.0, 1e-6));
    Real da = std::abs(rep.alignment->as_angle() - inst.copy_angle);
    da = std::min(da, kTwoPi - da);
    report.checks.push_back(
        make_check("alignment-angle", da, 0.0, kPi / grid));
  }

  if (!cyclic_instance) {
    // Double the grid: the spectral path then covers twice the frequencies
    // and every dense-agreement error must shrink.
    VerifyInstance fine = build_instance(config, 2 * base_nodes, log);
    DistanceErrors err2 = distance_errors(fine, t);
    auto shrink = [&](const std::string& name, Real coarse, Real finer) {
      VerifyCheck c;
      c.name = "convergence-" + name;
      c.lhs = finer;
      c.rhs = coarse;
      c.abs_err = finer;
      c.rel_err = coarse > 0.0 ? finer / coarse : 0.0;
      c.tol = coarse + 1e-12;
      c.pass = finer <= coarse + 1e-12;
      report.checks.push_back(c);
    };
    shrink("equivariant-walk", err.equivariant_walk, err2.equivariant_walk);
    shrink("equivariant-sym", err.equivariant_sym, err2.equivariant_sym);
    shrink("invariant-walk", err.invariant_walk, err2.invariant_walk);
    shrink("invariant-sym", err.invariant_sym, err2.invariant_sym);
  }

  if (config.with_mc) {
    std::vector<Real> exact = exact_displacement_tensor(inst.dense, 0, t);
    DisplacementHistogram hist =
        mc_displacement(inst.dense, 0, t, config.mc_samples, config.seed);
    // Cauchy-Schwarz bound on the expected multinomial total variation,
    // 0.5 * sqrt(2K / (pi n)), with a 3x margin; never tighter than 0.01.
    Real cells = static_cast<Real>(exact.size());
    Real rate = 1.5 * std::sqrt(2.0 * cells /
                                (kPi * static_cast<Real>(config.mc_samples)));
    report.checks.push_back(
        make_check("mc-displacement-tv", total_variation(hist.prob, exact), 0.0,
                   std::max<Real>(0.01, rate)));
  }

  if (log) {
    for (const auto& c : report.checks) {
      *log << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
           << " err=" << format_double(c.abs_err)
           << " tol=" << format_double(c.tol) << '\n';
    }
  }
  return report;
}

void write_verify_report(const fs::path& file, const VerifyReport& report) {
  json j;
  j["all_pass"] = report.all_pass();
  j["seed"] = report.seed;
  j["checks"] = json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs},
                           {"abs_err", c.abs_err},
                           {"rel_err", c.rel_err},
                           {"tol", c.tol},
                           {"pass", c.pass}});
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write report " + file.string());
  out << j.dump(2) << '\n';
}

}  // namespace gidm
