#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace bansa {

// On-disk tensor container. Layout, all little-endian:
//   magic   4 bytes  "ATNS"
//   version u16      currently 1
//   rank    u16
//   dims    rank x u64
//   payload product(dims) x f64, row-major
// A rank-0 tensor carries exactly one value.
inline constexpr std::uint16_t kTensorFormatVersion = 1;
inline constexpr char kTensorMagic[4] = {'A', 'T', 'N', 'S'};

struct Tensor {
    std::vector<std::uint64_t> dims;
    std::vector<double> values;

    std::size_t rank() const { return dims.size(); }
};

// Element count implied by dims; throws dim_overflow if it cannot be
// represented or the payload byte count would overflow.
std::uint64_t checked_element_count(const std::vector<std::uint64_t>& dims);

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace bansa
