#pragma once
// Enumeration limits shared by brute-force listings, trellis expansion and
// the isomorphism scans.  TAILBITE_CAP (a positive integer) overrides both
// limits for the whole process.

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tailbite {

struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct Caps {
  std::uint64_t enumeration = 1ull << 20;  // codeword / vertex / cycle listings
  std::uint64_t scan = 1'000'000;          // isomorphism candidate scans

  static const Caps& defaults() {
    static const Caps caps = [] {
      Caps c;
      if (const char* env = std::getenv("TAILBITE_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && end && *end == '\0' && v > 0) {
          c.enumeration = v;
          c.scan = v;
        }
      }
      return c;
    }();
    return caps;
  }
};

}  // namespace tailbite
