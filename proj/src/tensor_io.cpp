#include "tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "errors.hpp"

namespace bansa {

namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor serialization assumes a little-endian host");

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int shift = 0; shift < 64; shift += 8) {
        out.push_back(static_cast<char>((v >> shift) & 0xff));
    }
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

}  // namespace

std::uint64_t checked_element_count(const std::vector<std::uint64_t>& dims) {
    std::uint64_t count = 1;
    for (std::uint64_t d : dims) {
        if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / d) {
            fail(ErrorCode::dim_overflow, "tensor element count overflows 64 bits");
        }
        count *= d;
    }
    if (count > std::numeric_limits<std::uint64_t>::max() / 8) {
        fail(ErrorCode::dim_overflow, "tensor payload byte count overflows 64 bits");
    }
    return count;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
    if (tensor.rank() > std::numeric_limits<std::uint16_t>::max()) {
        fail(ErrorCode::dim_overflow, "tensor rank exceeds format limit");
    }
    const std::uint64_t count = checked_element_count(tensor.dims);
    if (tensor.values.size() != count) {
        fail(ErrorCode::invalid_input, "tensor value count does not match dims");
    }

    std::string header;
    header.append(kTensorMagic, 4);
    put_u16(header, kTensorFormatVersion);
    put_u16(header, static_cast<std::uint16_t>(tensor.rank()));
    for (std::uint64_t d : tensor.dims) {
        put_u64(header, d);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::io_failure, "cannot open for writing: " + path.string());
    }
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(tensor.values.data()),
              static_cast<std::streamsize>(tensor.values.size() * sizeof(double)));
    out.flush();
    if (!out) {
        fail(ErrorCode::io_failure, "write failed: " + path.string());
    }
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io_failure, "cannot open for reading: " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) {
        fail(ErrorCode::io_failure, "read failed: " + path.string());
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t size = bytes.size();

    if (size < 8) {
        fail(ErrorCode::truncated_payload, "file shorter than the fixed header: " + path.string());
    }
    if (std::memcmp(p, kTensorMagic, 4) != 0) {
        fail(ErrorCode::bad_magic, "not a tensor file (magic mismatch): " + path.string());
    }
    const std::uint16_t version = get_u16(p + 4);
    if (version != kTensorFormatVersion) {
        fail(ErrorCode::bad_version,
             "unsupported tensor format version " + std::to_string(version));
    }
    const std::uint16_t rank = get_u16(p + 6);

    const std::size_t dims_bytes = static_cast<std::size_t>(rank) * 8;
    if (size < 8 + dims_bytes) {
        fail(ErrorCode::truncated_payload, "file ends inside the dims block: " + path.string());
    }
    Tensor tensor;
    tensor.dims.resize(rank);
    for (std::uint16_t i = 0; i < rank; ++i) {
        tensor.dims[i] = get_u64(p + 8 + i * 8);
    }
    const std::uint64_t count = checked_element_count(tensor.dims);
    const std::uint64_t payload_bytes = count * 8;
    const std::size_t expected = 8 + dims_bytes + payload_bytes;
    if (size < expected) {
        fail(ErrorCode::truncated_payload, "payload shorter than dims imply: " + path.string());
    }
    if (size > expected) {
        fail(ErrorCode::truncated_payload, "trailing bytes after payload: " + path.string());
    }
    tensor.values.resize(count);
    std::memcpy(tensor.values.data(), p + 8 + dims_bytes, payload_bytes);
    return tensor;
}

}  // namespace bansa
