#include "bridgekit/numerics/persist.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <string>

#include "bridgekit/error.hpp"

namespace bridgekit {

namespace {

constexpr char kMagic[8] = {'B', 'K', 'P', 'A', 'R', 'A', 'M', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw DataError(path.string() + ": truncated parameter file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(v);
}

void put_double(std::ostream& out, double d) { put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(d)); }

double get_double(std::istream& in, const std::filesystem::path& path) {
  return std::bit_cast<double>(get_le<std::uint64_t>(in, path));
}

}  // namespace

void save_params(const ParamStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  const auto params = store.all();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const Parameter* p : params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(p->value.rows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(p->value.cols()));
    for (Eigen::Index k = 0; k < p->value.size(); ++k) put_double(out, p->value.data()[k]);
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

void load_params(ParamStore& store, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open parameter file '" + path.string() + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path.string() + ": not a parameter file");
  }
  const auto count = get_le<std::uint32_t>(in, path);
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get_le<std::uint32_t>(in, path);
    std::string name(len, '\0');
    in.read(name.data(), len);
    if (!in) throw DataError(path.string() + ": truncated parameter name");
    const auto rows = get_le<std::uint64_t>(in, path);
    const auto cols = get_le<std::uint64_t>(in, path);
    if (!store.contains(name)) throw DataError(path.string() + ": unexpected parameter '" + name + "'");
    Parameter& p = store.get(name);
    if (static_cast<std::uint64_t>(p.value.rows()) != rows || static_cast<std::uint64_t>(p.value.cols()) != cols) {
      throw DataError(path.string() + ": shape mismatch for '" + name + "'");
    }
    for (Eigen::Index k = 0; k < p.value.size(); ++k) p.value.data()[k] = get_double(in, path);
    seen.insert(name);
  }
  if (seen.size() != store.size()) throw DataError(path.string() + ": parameter file is missing entries");
}

}  // namespace bridgekit
