#pragma once

// Field interchange files. Both layouts carry the header
// {dim, counts, extents, topology, stencil_order, degree, n, group} and the
// entries in node order, component order within a node, and row-major
// matrix order within a component, each as a (re, im) pair of doubles.
//
// Binary: "GFORMS01", uint32 little-endian header length, the header as
// JSON text, then the entries as little-endian binary64.
// JSON: {"header": {...}, "data": [[re, im], ...]}.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaugeforms/errors.hpp"
#include "gaugeforms/forms.hpp"
#include "gaugeforms/gauge.hpp"

namespace gaugeforms::io {

inline constexpr char kMagic[8] = {'G', 'F', 'O', 'R', 'M', 'S', '0', '1'};

enum class Format { binary, json };

struct FieldHeader {
  std::vector<int> counts;
  std::vector<double> extents;
  std::vector<Topology> topology;
  int stencil_order = 2;
  int degree = 0;
  int n = 2;
  bool group = false;

  Mesh mesh() const { return Mesh(counts, extents, topology, stencil_order); }

  std::size_t entry_count() const {
    const Mesh m = mesh();
    return m.node_count() * combinatorics::binomial(m.dim(), degree) * n * n;
  }
};

/// A field of runtime rank n, as stored on disk.
struct RawField {
  FieldHeader header;
  std::vector<cplx> data;
};

inline nlohmann::json header_to_json(const FieldHeader& h) {
  nlohmann::json topo = nlohmann::json::array();
  for (Topology t : h.topology) topo.push_back(to_string(t));
  return {{"dim", h.counts.size()}, {"counts", h.counts},       {"extents", h.extents},
          {"topology", topo},       {"stencil_order", h.stencil_order}, {"degree", h.degree},
          {"n", h.n},               {"group", h.group}};
}

inline FieldHeader header_from_json(const nlohmann::json& j) {
  FieldHeader h;
  try {
    const int dim = j.at("dim").get<int>();
    h.counts = j.at("counts").get<std::vector<int>>();
    h.extents = j.at("extents").get<std::vector<double>>();
    for (const auto& t : j.at("topology")) {
      const std::string s = t.get<std::string>();
      if (s == "periodic")
        h.topology.push_back(Topology::periodic);
      else if (s == "interval")
        h.topology.push_back(Topology::interval);
      else
        throw Error("unknown topology '" + s + "'");
    }
    h.stencil_order = j.value("stencil_order", 2);
    h.degree = j.at("degree").get<int>();
    h.n = j.at("n").get<int>();
    h.group = j.value("group", false);
    if (dim != static_cast<int>(h.counts.size())) throw Error("header dim disagrees with counts");
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed field header: ") + e.what());
  }
  if (h.n < 2) throw Error("field header n must be at least 2");
  const Mesh m = h.mesh();  // validates the mesh fields
  if (h.degree < 0 || h.degree > m.dim()) throw Error("field header degree out of range");
  if (h.group && h.degree != 0) throw Error("gauge map files must have degree 0");
  return h;
}

namespace detail {

inline void put_le(std::ostream& out, const void* p, std::size_t bytes) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
  } else {
    const char* c = static_cast<const char*>(p);
    for (std::size_t i = bytes; i-- > 0;) out.put(c[i]);
  }
}

inline void get_le(std::istream& in, void* p, std::size_t bytes) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
  if (!in) throw Error("truncated field file");
  if constexpr (std::endian::native != std::endian::little) {
    char* c = static_cast<char*>(p);
    for (std::size_t i = 0; i < bytes / 2; ++i) std::swap(c[i], c[bytes - 1 - i]);
  }
}

inline void check_size(const RawField& f) {
  if (f.data.size() != f.header.entry_count())
    throw Error("field payload has " + std::to_string(f.data.size()) + " entries, header implies " +
                std::to_string(f.header.entry_count()));
}

}  // namespace detail

inline void write_binary(std::ostream& out, const RawField& f) {
  detail::check_size(f);
  const std::string header = header_to_json(f.header).dump();
  out.write(kMagic, sizeof kMagic);
  const auto len = static_cast<std::uint32_t>(header.size());
  detail::put_le(out, &len, sizeof len);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const cplx& z : f.data) {
    const double re = z.real(), im = z.imag();
    detail::put_le(out, &re, sizeof re);
    detail::put_le(out, &im, sizeof im);
  }
  if (!out) throw Error("failed writing field file");
}

inline RawField read_binary(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error("not a binary field file");
  std::uint32_t len = 0;
  detail::get_le(in, &len, sizeof len);
  std::string header(len, '\0');
  in.read(header.data(), len);
  if (!in) throw Error("truncated field header");
  RawField f;
  try {
    f.header = header_from_json(nlohmann::json::parse(header));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed field header: ") + e.what());
  }
  f.data.resize(f.header.entry_count());
  for (cplx& z : f.data) {
    double re, im;
    detail::get_le(in, &re, sizeof re);
    detail::get_le(in, &im, sizeof im);
    z = {re, im};
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes after field payload");
  return f;
}

inline nlohmann::json to_json(const RawField& f) {
  detail::check_size(f);
  nlohmann::json data = nlohmann::json::array();
  for (const cplx& z : f.data) data.push_back({z.real(), z.imag()});
  return {{"header", header_to_json(f.header)}, {"data", std::move(data)}};
}

inline RawField from_json(const nlohmann::json& j) {
  RawField f;
  try {
    f.header = header_from_json(j.at("header"));
    for (const auto& e : j.at("data")) {
      if (!e.is_array() || e.size() != 2) throw Error("field entries must be [re, im] pairs");
      f.data.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed field JSON: ") + e.what());
  }
  detail::check_size(f);
  return f;
}

/// Reads either layout, recognizing the binary magic.
inline RawField read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[sizeof kMagic] = {};
  in.read(magic, sizeof magic);
  in.clear();
  in.seekg(0);
  if (std::memcmp(magic, kMagic, sizeof kMagic) == 0) return read_binary(in);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("cannot parse " + path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const RawField& f, Format format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  if (format == Format::binary)
    write_binary(out, f);
  else
    out << to_json(f).dump(1) << '\n';
  if (!out) throw Error("failed writing " + path);
}

/// Format implied by a file name: ".json" selects JSON, anything else binary.
inline Format format_for(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0 ? Format::json : Format::binary;
}

template <int N>
RawField to_raw(const FormField<N>& f) {
  const Mesh& m = f.mesh();
  RawField r{{m.counts(), m.extents(), m.topologies(), m.stencil_order(), f.degree(), N, false}, {}};
  r.data.reserve(r.header.entry_count());
  for (const auto& v : f.data())
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) r.data.push_back(v(i, j));
  return r;
}

template <int N>
FormField<N> field_from_raw(const RawField& r) {
  if (r.header.n != N) throw MismatchError("field file has n = " + std::to_string(r.header.n));
  detail::check_size(r);
  FormField<N> f(r.header.mesh(), r.header.degree);
  std::size_t k = 0;
  for (auto& v : f.data())
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) v(i, j) = r.data[k++];
  return f;
}

template <int N>
RawField to_raw(const GaugeMap<N>& g) {
  RawField r = to_raw(g.as_form());
  r.header.group = true;
  return r;
}

/// Rebuilds a gauge map; unitarity and unit determinant are re-validated.
template <int N>
GaugeMap<N> gauge_from_raw(const RawField& r, double tolerance = 1e-10) {
  if (!r.header.group) throw Error("field file is not a gauge map");
  const FormField<N> f = field_from_raw<N>(r);
  return GaugeMap<N>(f.mesh(), f.data(), tolerance);
}

}  // namespace gaugeforms::io
