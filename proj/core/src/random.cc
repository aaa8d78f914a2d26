#include "portdecomp/random.h"

namespace portdecomp {
namespace {

std::uint64_t Mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a; stream names are short literals.
std::uint64_t HashName(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t root, std::string_view stream) {
  return Mix(Mix(root) ^ HashName(stream));
}

std::uint64_t DeriveSeed(std::uint64_t root, std::string_view stream,
                         std::uint64_t index) {
  return Mix(DeriveSeed(root, stream) ^ Mix(index + 1));
}

}  // namespace portdecomp
