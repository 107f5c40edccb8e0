#include "mwrecon/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace mwrecon {
namespace {

static_assert(std::endian::native == std::endian::little, "MWKS I/O assumes a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is, const char* field) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw FormatError(std::string("MWKS: truncated header at ") + field);
  }
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* field) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError(std::string("MWKS: ") + field + " does not fit in u32");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void save_kspace(const std::filesystem::path& path, const MultiCoilKSpace& kspace) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(kMwksMagic, 4);
  put_u32(os, kMwksVersion);
  put_u32(os, checked_u32(kspace.n_coils(), "n_coils"));
  put_u32(os, checked_u32(kspace.ny(), "ny"));
  put_u32(os, checked_u32(kspace.nx(), "nx"));

  std::vector<float> payload;
  payload.reserve(2 * kspace.size());
  for (const auto& v : kspace.data()) {
    payload.push_back(static_cast<float>(v.real()));
    payload.push_back(static_cast<float>(v.imag()));
  }
  os.write(reinterpret_cast<const char*>(payload.data()),
           static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!os) throw Error("write failed for " + path.string());
}

MultiCoilKSpace load_kspace(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());

  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4)) throw FormatError("MWKS: truncated header at magic");
  if (std::memcmp(magic.data(), kMwksMagic, 4) != 0) throw FormatError("MWKS: bad magic bytes");
  const auto version = get_u32(is, "version");
  if (version != kMwksVersion) throw FormatError("MWKS: unsupported version " + std::to_string(version));
  const std::uint64_t coils = get_u32(is, "n_coils");
  const std::uint64_t ny = get_u32(is, "ny");
  const std::uint64_t nx = get_u32(is, "nx");

  // Reject sizes whose byte count would overflow before trusting the header.
  constexpr std::uint64_t kMaxSamples = std::numeric_limits<std::uint64_t>::max() / 8;
  if (ny != 0 && nx != 0 && coils > kMaxSamples / ny / nx) {
    throw FormatError("MWKS: dimension overflow");
  }
  const std::uint64_t samples = coils * ny * nx;

  is.seekg(0, std::ios::end);
  const auto end = static_cast<std::uint64_t>(is.tellg());
  constexpr std::uint64_t kHeader = 20;
  if (end - kHeader < samples * 8) {
    throw FormatError("MWKS: truncated payload, header declares " + std::to_string(samples) +
                      " samples but file holds " + std::to_string((end - kHeader) / 8));
  }
  is.seekg(static_cast<std::streamoff>(kHeader));

  std::vector<float> payload(2 * samples);
  if (!is.read(reinterpret_cast<char*>(payload.data()),
               static_cast<std::streamsize>(payload.size() * sizeof(float)))) {
    throw FormatError("MWKS: truncated payload");
  }
  std::vector<cdouble> data(samples);
  for (std::size_t i = 0; i < samples; ++i) data[i] = {payload[2 * i], payload[2 * i + 1]};

  MultiCoilKSpace k(coils, ny, nx, std::move(data));
  if (!k.all_finite()) throw FormatError("MWKS: payload contains non-finite values");
  return k;
}

void save_pattern(const std::filesystem::path& path, const SamplingPattern& pattern) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << pattern.to_text();
}

SamplingPattern load_pattern(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return SamplingPattern::from_text(ss.str());
}

}  // namespace mwrecon
