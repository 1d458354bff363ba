#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdmsort {

class KeyFileError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raw little-endian 64-bit keys, no header.
std::vector<std::uint64_t> read_keys(const std::string& path);
void write_keys(const std::string& path, const std::vector<std::uint64_t>& keys);

/// Deterministic pseudo-random keys.
std::vector<std::uint64_t> generate_keys(std::uint64_t n, std::uint64_t seed);

struct VerifyResult {
    bool sorted = false;
    bool same_multiset = false;
    std::string message;

    bool ok() const { return sorted && same_multiset; }
};

/// Checks that `output` is sorted and holds the same keys as `input`.
VerifyResult verify_keys(std::vector<std::uint64_t> input, const std::vector<std::uint64_t>& output);

}  // namespace pdmsort
