#include "pdmsort/keyfile.hpp"

#include <algorithm>
#include <iterator>
#include <fstream>
#include <random>

namespace pdmsort {

std::vector<std::uint64_t> read_keys(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw KeyFileError("cannot open " + path);
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 8 != 0) {
        throw KeyFileError(path + ": length " + std::to_string(bytes.size()) + " is not a multiple of 8");
    }
    std::vector<std::uint64_t> keys(bytes.size() / 8);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        std::uint64_t k = 0;
        for (int b = 7; b >= 0; --b) {
            k = (k << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
        }
        keys[i] = k;
    }
    return keys;
}

void write_keys(const std::string& path, const std::vector<std::uint64_t>& keys) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw KeyFileError("cannot create " + path);
    }
    std::vector<char> bytes(keys.size() * 8);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (int b = 0; b < 8; ++b) {
            bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<char>((keys[i] >> (8 * b)) & 0xff);
        }
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw KeyFileError("write failed: " + path);
    }
}

std::vector<std::uint64_t> generate_keys(std::uint64_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> keys(n);
    for (auto& k : keys) {
        k = rng();
    }
    return keys;
}

VerifyResult verify_keys(std::vector<std::uint64_t> input, const std::vector<std::uint64_t>& output) {
    VerifyResult res;
    auto bad = std::is_sorted_until(output.begin(), output.end());
    res.sorted = bad == output.end();
    std::sort(input.begin(), input.end());
    res.same_multiset = input == output || (input.size() == output.size() && [&] {
                            auto copy = output;
                            std::sort(copy.begin(), copy.end());
                            return copy == input;
                        }());
    if (!res.sorted) {
        res.message = "not sorted at position " + std::to_string(bad - output.begin());
    } else if (!res.same_multiset) {
        res.message = input.size() != output.size()
                          ? "key count differs: " + std::to_string(input.size()) + " vs " +
                                std::to_string(output.size())
                          : "key multisets differ";
    } else {
        res.message = "ok";
    }
    return res;
}

}  // namespace pdmsort
