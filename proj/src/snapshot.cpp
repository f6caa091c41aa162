#include "kp5/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "kp5/error.hpp"

namespace kp5 {

namespace {

constexpr std::array<char, 8> kMagic = {'K', 'P', '5', 'F', 'L', 'D', '\0', '\1'};

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  const Grid2D& g = snap.field.grid();
  nlohmann::json h;
  h["nx"] = g.nx();
  h["ny"] = g.ny();
  h["lx"] = g.lx();
  h["ly"] = g.ly();
  h["mode"] = to_string(g.mode());
  h["time"] = snap.time;
  h["p"] = snap.p.str();
  h["normalization"] = kNormalization;
  const std::string header = h.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  const auto len = static_cast<std::uint32_t>(header.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  const auto& v = snap.field.values();
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size()));
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) fail(ErrorCode::Io, path.string() + " is not a KP5FLD snapshot");
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string header(len, '\0');
  in.read(header.data(), len);
  if (!in) fail(ErrorCode::Io, "truncated header in " + path.string());

  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0, time = 0.0;
  std::string mode;
  Rational p(2);
  try {
    const nlohmann::json h = nlohmann::json::parse(header);
    nx = h.at("nx").get<int>();
    ny = h.at("ny").get<int>();
    lx = h.at("lx").get<double>();
    ly = h.at("ly").get<double>();
    mode = h.at("mode").get<std::string>();
    time = h.value("time", 0.0);
    const auto& pj = h.at("p");
    p = pj.is_string() ? Rational::parse(pj.get<std::string>()) : Rational(pj.get<std::int64_t>());
    if (h.value("normalization", std::string(kNormalization)) != kNormalization)
      fail(ErrorCode::Io, "unsupported normalization in " + path.string());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, std::string("bad snapshot header: ") + e.what());
  }
  const Grid2D g(nx, ny, lx, ly, grid_mode_from_string(mode));
  Eigen::ArrayXXd v(g.nx(), g.ny());
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size()));
  if (!in) fail(ErrorCode::Io, "truncated data in " + path.string());
  return Snapshot{Field(g, std::move(v)), time, p};
}

}  // namespace kp5
