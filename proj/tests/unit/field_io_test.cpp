#include "gaugeforms/field_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "gaugeforms/fields.hpp"

namespace gaugeforms {
namespace {

FormField<3> sample_field() {
  const Mesh mesh({4, 5, 6}, {1.0, 2.0, 0.5}, {Topology::interval, Topology::periodic, Topology::periodic}, 4);
  Rng rng(21);
  return SmoothField<3>(mesh, 2, rng).sample(mesh);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gaugeforms_io_" + name);
}

TEST(FieldIo, BinaryRoundTripIsBitExact) {
  const FormField<3> f = sample_field();
  std::stringstream s;
  io::write_binary(s, io::to_raw(f));
  const std::string bytes = s.str();
  EXPECT_EQ(bytes.substr(0, 8), "GFORMS01");
  const FormField<3> back = io::field_from_raw<3>(io::read_binary(s));
  EXPECT_EQ(back.mesh(), f.mesh());
  EXPECT_EQ(back.degree(), 2);
  EXPECT_EQ(back.data(), f.data());
}

TEST(FieldIo, JsonRoundTripIsBitExact) {
  const FormField<3> f = sample_field();
  const nlohmann::json j = io::to_json(io::to_raw(f));
  EXPECT_EQ(j["header"]["dim"], 3);
  EXPECT_EQ(j["header"]["topology"][0], "interval");
  EXPECT_EQ(j["data"].size(), f.nodes() * 3 * 9);
  const FormField<3> back = io::field_from_raw<3>(io::from_json(nlohmann::json::parse(j.dump())));
  EXPECT_EQ(back.data(), f.data());
}

TEST(FieldIo, PayloadOrder) {
  // Node-major, then component, then row-major matrix entries.
  const Mesh mesh = Mesh::torus(2, 4);
  FormField<2> f(mesh, 1);
  f.at(1, 1)(0, 1) = cplx(3.0, -4.0);
  const io::RawField r = io::to_raw(f);
  EXPECT_EQ(r.data[1 * 2 * 4 + 1 * 4 + 1], cplx(3.0, -4.0));
}

TEST(FieldIo, FilesConvertBetweenLayouts) {
  const FormField<3> f = sample_field();
  const auto bin = temp_path("a.gf"), js = temp_path("a.json"), bin2 = temp_path("b.gf");
  io::write_file(bin.string(), io::to_raw(f), io::format_for(bin.string()));
  io::write_file(js.string(), io::read_file(bin.string()), io::format_for(js.string()));
  io::write_file(bin2.string(), io::read_file(js.string()), io::Format::binary);
  std::ifstream a(bin, std::ios::binary), b(bin2, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
  for (const auto& p : {bin, js, bin2}) std::filesystem::remove(p);
}

TEST(FieldIo, GaugeMapRoundTripRevalidates) {
  const Mesh mesh = Mesh::torus(3, 4);
  const GaugeMap<2> g = sample_gauge<2>(mesh, BumpMap{});
  std::stringstream s;
  io::write_binary(s, io::to_raw(g));
  const io::RawField r = io::read_binary(s);
  EXPECT_TRUE(r.header.group);
  EXPECT_EQ(io::gauge_from_raw<2>(r).values(), g.values());

  io::RawField broken = r;
  broken.data[0] *= 1.01;
  EXPECT_THROW(io::gauge_from_raw<2>(broken), PreconditionError);
  io::RawField plain = io::to_raw(g.as_form());
  EXPECT_THROW(io::gauge_from_raw<2>(plain), Error);
}

TEST(FieldIo, RejectsMalformedInput) {
  const io::RawField r = io::to_raw(sample_field());
  EXPECT_THROW(io::field_from_raw<2>(r), MismatchError);

  std::stringstream bad("NOTAFILE");
  EXPECT_THROW(io::read_binary(bad), Error);

  std::stringstream s;
  io::write_binary(s, r);
  std::string bytes = s.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(io::read_binary(truncated), Error);
  std::stringstream trailing(bytes + "x");
  EXPECT_THROW(io::read_binary(trailing), Error);

  nlohmann::json j = io::to_json(r);
  j["data"].erase(0);
  EXPECT_THROW(io::from_json(j), Error);
  j = io::to_json(r);
  j["header"]["degree"] = 7;
  EXPECT_THROW(io::from_json(j), Error);
  j = io::to_json(r);
  j["header"]["topology"][0] = "sphere";
  EXPECT_THROW(io::from_json(j), Error);
  j = io::to_json(r);
  j["header"].erase("counts");
  EXPECT_THROW(io::from_json(j), Error);
}

}  // namespace
}  // namespace gaugeforms
