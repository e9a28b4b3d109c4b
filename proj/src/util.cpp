#include "macrostate/util.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "macrostate/error.hpp"

namespace macrostate {

std::string format_double(double value) {
  std::array<char, 32> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + hex;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::format: return "format";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::domain: return "domain";
    case ErrorKind::unknown_feature: return "unknown-feature";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::argument: return "argument";
    case ErrorKind::data: return "data";
    case ErrorKind::kind: return "kind";
    case ErrorKind::feasibility: return "feasibility";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace macrostate
