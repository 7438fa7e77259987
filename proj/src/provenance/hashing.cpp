#include "scorelens/provenance/hashing.hpp"

#include <cstdio>

namespace scorelens::provenance {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string text_hash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string pair_hash(std::string_view source, std::string_view summary) {
  std::string joined = std::to_string(source.size()) + ":";
  joined.append(source);
  joined += std::to_string(summary.size()) + ":";
  joined.append(summary);
  return text_hash(joined);
}

}  // namespace scorelens::provenance
