#include "gidm/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gidm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

json action_to_json(const ActionSpec& a) {
  return json{{"group", a.group.id == GroupId::SO2 ? "so2" : "cyclic"},
              {"order", a.group.order},
              {"axis_u", a.axis_u},
              {"axis_v", a.axis_v}};
}

ActionSpec action_from_json(const json& j) {
  ActionSpec a;
  std::string g = j.at("group");
  if (g == "so2") {
    a.group = so2();
  } else if (g == "cyclic") {
    a.group = cyclic(j.at("order").get<int>());
  } else {
    throw ConfigError("unknown group in sidecar: " + g);
  }
  a.axis_u = j.at("axis_u");
  a.axis_v = j.at("axis_v");
  return a;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + file.string());
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_cloud(const fs::path& prefix, const PointCloud& cloud) {
  std::ostringstream csv;
  for (Index i = 0; i < cloud.size(); ++i) {
    for (Index c = 0; c < cloud.ambient_dim(); ++c) {
      if (c) csv << ',';
      csv << format_double(cloud.points(i, c));
    }
    csv << '\n';
  }
  write_text(fs::path(prefix.string() + ".csv"), csv.str());

  json side;
  side["action"] = action_to_json(cloud.action);
  side["metadata"] = {{"source", cloud.source_label}, {"seed", cloud.seed}};
  for (const auto& [key, value] : cloud.metadata) {
    side["metadata"]["spec"][key] = value;
  }
  side["injected"] = json::array();
  for (const auto& c : cloud.injected) {
    side["injected"].push_back({{"source", c.source}, {"angle", c.angle}});
  }
  write_text(fs::path(prefix.string() + ".json"), side.dump(2) + "\n");
}

PointCloud load_cloud(const fs::path& prefix) {
  std::string csv = read_text(fs::path(prefix.string() + ".csv"));
  std::vector<std::vector<Real>> rows;
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<Real> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.front().size() != row.size()) {
      throw ConfigError("ragged rows in " + prefix.string() + ".csv");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("empty cloud file " + prefix.string());

  PointCloud cloud;
  cloud.points.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      cloud.points(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
    }
  }
  json side = json::parse(read_text(fs::path(prefix.string() + ".json")));
  cloud.action = action_from_json(side.at("action"));
  cloud.source_label = side.at("metadata").at("source");
  cloud.seed = side.at("metadata").at("seed");
  if (side.at("metadata").contains("spec")) {
    for (const auto& [key, value] : side.at("metadata").at("spec").items()) {
      cloud.metadata.emplace_back(key, value.get<std::string>());
    }
  }
  for (const auto& c : side.at("injected")) {
    cloud.injected.push_back(
        {c.at("source").get<Index>(), c.at("angle").get<Real>()});
  }
  return cloud;
}

namespace {

struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ull;
  void feed(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < bytes; ++k) {
      state ^= p[k];
      state *= 0x100000001b3ull;
    }
  }
  template <typename T>
  void feed_value(const T& v) {
    feed(&v, sizeof(T));
  }
};

}  // namespace

std::uint64_t content_hash(const PointCloud& cloud, Real eps, int max_freq,
                           int quad_nodes) {
  Fnv1a h;
  h.feed_value(cloud.size());
  h.feed_value(cloud.ambient_dim());
  for (Index i = 0; i < cloud.size(); ++i) {
    for (Index c = 0; c < cloud.ambient_dim(); ++c) {
      h.feed_value(cloud.points(i, c));
    }
  }
  h.feed_value(static_cast<int>(cloud.action.group.id));
  h.feed_value(cloud.action.group.order);
  h.feed_value(cloud.action.axis_u);
  h.feed_value(cloud.action.axis_v);
  h.feed_value(eps);
  h.feed_value(max_freq);
  h.feed_value(quad_nodes);
  return h.state;
}

namespace {

constexpr char kBlocksMagic[8] = {'G', 'I', 'D', 'M', 'F', 'B', '0', '1'};
constexpr char kSpectralMagic[8] = {'G', 'I', 'D', 'M', 'S', 'P', '0', '1'};

void put_bytes(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(bytes));
}

bool get_bytes(std::ifstream& in, void* data, std::size_t bytes) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  return static_cast<bool>(in);
}

template <typename T>
void put_value(std::ofstream& out, const T& v) {
  put_bytes(out, &v, sizeof(T));
}

template <typename T>
bool get_value(std::ifstream& in, T& v) {
  return get_bytes(in, &v, sizeof(T));
}

void put_meta(std::ofstream& out, const ActionSpec& action, Real eps,
              int max_freq, int quad_nodes, bool implied, Index n, int nf) {
  put_value(out, static_cast<std::int32_t>(action.group.id));
  put_value(out, static_cast<std::int32_t>(action.group.order));
  put_value(out, static_cast<std::int32_t>(action.axis_u));
  put_value(out, static_cast<std::int32_t>(action.axis_v));
  put_value(out, eps);
  put_value(out, static_cast<std::int32_t>(max_freq));
  put_value(out, static_cast<std::int32_t>(quad_nodes));
  put_value(out, static_cast<std::uint8_t>(implied ? 1 : 0));
  put_value(out, static_cast<std::int64_t>(n));
  put_value(out, static_cast<std::int32_t>(nf));
}

struct Meta {
  ActionSpec action;
  Real eps = 0;
  int max_freq = 0, quad_nodes = 0, nf = 0;
  bool implied = false;
  Index n = 0;
};

bool get_meta(std::ifstream& in, Meta& m) {
  std::int32_t gid, order, au, av, maxf, nodes, nf;
  std::uint8_t implied;
  std::int64_t n;
  if (!get_value(in, gid) || !get_value(in, order) || !get_value(in, au) ||
      !get_value(in, av) || !get_value(in, m.eps) || !get_value(in, maxf) ||
      !get_value(in, nodes) || !get_value(in, implied) || !get_value(in, n) ||
      !get_value(in, nf)) {
    return false;
  }
  m.action.group.id = static_cast<GroupId>(gid);
  m.action.group.order = order;
  m.action.axis_u = au;
  m.action.axis_v = av;
  m.max_freq = maxf;
  m.quad_nodes = nodes;
  m.implied = implied != 0;
  m.n = n;
  m.nf = nf;
  return true;
}

}  // namespace

void save_blocks_cache(const fs::path& file, const FourierBlocks& blocks) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write cache " + file.string());
  put_bytes(out, kBlocksMagic, sizeof(kBlocksMagic));
  put_meta(out, blocks.action, blocks.eps, blocks.max_freq, blocks.quad_nodes,
           blocks.implied_conjugates, blocks.n_points(), blocks.n_freqs());
  for (int f : blocks.freqs) put_value(out, static_cast<std::int32_t>(f));
  put_bytes(out, blocks.degrees.data(),
            sizeof(Real) * static_cast<std::size_t>(blocks.degrees.size()));
  for (const auto& b : blocks.blocks) {
    put_bytes(out, b.data(),
              sizeof(Complex) * static_cast<std::size_t>(b.size()));
  }
  if (!out) throw ConfigError("cache write failed " + file.string());
}

std::optional<FourierBlocks> load_blocks_cache(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  if (!get_bytes(in, magic, sizeof(magic)) ||
      std::memcmp(magic, kBlocksMagic, sizeof(magic)) != 0) {
    return std::nullopt;
  }
  Meta m;
  if (!get_meta(in, m)) return std::nullopt;
  FourierBlocks blocks;
  blocks.action = m.action;
  blocks.eps = m.eps;
  blocks.max_freq = m.max_freq;
  blocks.quad_nodes = m.quad_nodes;
  blocks.implied_conjugates = m.implied;
  blocks.freqs.resize(static_cast<std::size_t>(m.nf));
  for (auto& f : blocks.freqs) {
    std::int32_t v;
    if (!get_value(in, v)) return std::nullopt;
    f = v;
  }
  blocks.degrees.resize(m.n);
  if (!get_bytes(in, blocks.degrees.data(),
                 sizeof(Real) * static_cast<std::size_t>(m.n))) {
    return std::nullopt;
  }
  blocks.blocks.assign(static_cast<std::size_t>(m.nf), CMatrix(m.n, m.n));
  for (auto& b : blocks.blocks) {
    if (!get_bytes(in, b.data(),
                   sizeof(Complex) * static_cast<std::size_t>(b.size()))) {
      return std::nullopt;
    }
  }
  return blocks;
}

void save_spectral_cache(const fs::path& file, const SpectralData& spec) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write cache " + file.string());
  put_bytes(out, kSpectralMagic, sizeof(kSpectralMagic));
  put_meta(out, spec.action, spec.eps, spec.max_freq, spec.quad_nodes,
           spec.implied_conjugates, spec.n_points(), spec.n_freqs());
  for (int f : spec.freqs) put_value(out, static_cast<std::int32_t>(f));
  put_bytes(out, spec.degrees.data(),
            sizeof(Real) * static_cast<std::size_t>(spec.degrees.size()));
  for (const auto& lam : spec.eigenvalues) {
    put_bytes(out, lam.data(),
              sizeof(Real) * static_cast<std::size_t>(lam.size()));
  }
  for (const auto& v : spec.vectors_sym) {
    put_bytes(out, v.data(),
              sizeof(Complex) * static_cast<std::size_t>(v.size()));
  }
  if (!out) throw ConfigError("cache write failed " + file.string());
}

std::optional<SpectralData> load_spectral_cache(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  if (!get_bytes(in, magic, sizeof(magic)) ||
      std::memcmp(magic, kSpectralMagic, sizeof(magic)) != 0) {
    return std::nullopt;
  }
  Meta m;
  if (!get_meta(in, m)) return std::nullopt;
  SpectralData spec;
  spec.action = m.action;
  spec.eps = m.eps;
  spec.max_freq = m.max_freq;
  spec.quad_nodes = m.quad_nodes;
  spec.implied_conjugates = m.implied;
  spec.freqs.resize(static_cast<std::size_t>(m.nf));
  for (auto& f : spec.freqs) {
    std::int32_t v;
    if (!get_value(in, v)) return std::nullopt;
    f = v;
  }
  spec.degrees.resize(m.n);
  if (!get_bytes(in, spec.degrees.data(),
                 sizeof(Real) * static_cast<std::size_t>(m.n))) {
    return std::nullopt;
  }
  spec.eigenvalues.assign(static_cast<std::size_t>(m.nf), Vector(m.n));
  for (auto& lam : spec.eigenvalues) {
    if (!get_bytes(in, lam.data(), sizeof(Real) * static_cast<std::size_t>(m.n))) {
      return std::nullopt;
    }
  }
  spec.vectors_sym.assign(static_cast<std::size_t>(m.nf), CMatrix(m.n, m.n));
  Vector inv_sqrt = spec.degrees.cwiseSqrt().cwiseInverse();
  spec.vectors_walk.assign(static_cast<std::size_t>(m.nf), CMatrix());
  for (std::size_t f = 0; f < spec.vectors_sym.size(); ++f) {
    if (!get_bytes(in, spec.vectors_sym[f].data(),
                   sizeof(Complex) *
                       static_cast<std::size_t>(spec.vectors_sym[f].size()))) {
      return std::nullopt;
    }
    spec.vectors_walk[f] = inv_sqrt.asDiagonal() * spec.vectors_sym[f];
  }
  return spec;
}

void write_scree_csv(const fs::path& file,
                     const std::vector<ScreeEntry>& entries) {
  std::ostringstream out;
  out << "rank,ell,n,lambda,lambda_pow_t\n";
  for (std::size_t k = 0; k < entries.size(); ++k) {
    out << k << ',' << entries[k].ell << ',' << entries[k].n << ','
        << format_double(entries[k].lambda) << ','
        << format_double(entries[k].lambda_pow_t) << '\n';
  }
  write_text(file, out.str());
}

void write_embeddings_csv(const fs::path& csv_file, const fs::path& header_file,
                          const std::vector<EmbeddingVector>& embeddings) {
  if (embeddings.empty()) throw ConfigError("no embeddings to write");
  const EmbeddingVector& first = embeddings.front();

  json header;
  header["kind"] = embedding_kind_name(first.kind);
  header["t1"] = first.t1;
  header["t2"] = first.t2;
  header["delta"] = first.delta;
  header["upper_pairs"] = first.upper_pairs;
  header["skipped_triples"] = first.skipped_triples;
  header["capped_triples"] = first.capped_triples;
  header["weight_convention"] =
      "squared norms sum weight[k] * |coord[k]|^2; weights fold implied "
      "conjugate frequencies and the unstored n2 < n1 pair half";
  header["labels"] = json::array();
  header["weights"] = json::array();
  for (std::size_t k = 0; k < first.labels.size(); ++k) {
    const auto& lab = first.labels[k];
    header["labels"].push_back({{"ell1", lab.ell1},
                                {"ell2", lab.ell2},
                                {"n1", lab.n1},
                                {"n2", lab.n2},
                                {"n3", lab.n3}});
    header["weights"].push_back(first.weights[static_cast<Index>(k)]);
  }
  write_text(header_file, header.dump(2) + "\n");

  std::ostringstream out;
  out << "point";
  for (std::size_t k = 0; k < first.labels.size(); ++k) {
    out << ",re_" << k << ",im_" << k;
  }
  out << '\n';
  for (std::size_t p = 0; p < embeddings.size(); ++p) {
    const auto& e = embeddings[p];
    if (!(e.labels == first.labels)) {
      throw ConfigError("embedding rows carry different labels");
    }
    out << p;
    for (Index k = 0; k < e.size(); ++k) {
      out << ',' << format_double(e.coords[k].real()) << ','
          << format_double(e.coords[k].imag());
    }
    out << '\n';
  }
  write_text(csv_file, out.str());
}

void write_matrix_csv(const fs::path& file, const Eigen::Ref<const Matrix>& m) {
  std::ostringstream out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  write_text(file, out.str());
}

Matrix load_matrix_csv(const fs::path& file) {
  std::istringstream lines(read_text(file));
  std::vector<std::vector<Real>> rows;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<Real> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix();
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw ConfigError("ragged matrix csv " + file.string());
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_alignment_csv(const fs::path& file,
                         const std::vector<AlignmentRow>& rows) {
  std::ostringstream out;
  out << "i,j,angle,value\n";
  for (const auto& r : rows) {
    out << r.i << ',' << r.j << ',' << format_double(r.angle) << ','
        << format_double(r.value) << '\n';
  }
  write_text(file, out.str());
}

void write_heatmap_csv(const fs::path& file, const PointCloud& cloud,
                       const std::vector<std::string>& column_names,
                       const std::vector<Vector>& columns) {
  if (column_names.size() != columns.size()) {
    throw ConfigError("heatmap column names and data differ in count");
  }
  std::ostringstream out;
  out << "point";
  for (Index c = 0; c < cloud.ambient_dim(); ++c) out << ",x" << c;
  for (const auto& name : column_names) out << ',' << name;
  out << '\n';
  for (Index i = 0; i < cloud.size(); ++i) {
    out << i;
    for (Index c = 0; c < cloud.ambient_dim(); ++c) {
      out << ',' << format_double(cloud.points(i, c));
    }
    for (const auto& col : columns) out << ',' << format_double(col[i]);
    out << '\n';
  }
  write_text(file, out.str());
}

}  // namespace gidm
