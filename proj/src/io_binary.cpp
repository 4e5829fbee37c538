#include "gepbench/io_binary.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace gepbench {

namespace {

constexpr std::array<char, 5> kMagic = {'G', 'E', 'P', 'B', '1'};
constexpr std::uint8_t kDtypeF32 = 0x01;

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k)
            c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

} // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    static const auto table = make_crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::uint8_t b : bytes) c = table[(c ^ b) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> encode_matrix(const Matrix& m) {
    std::vector<std::uint8_t> out;
    out.reserve(5 + 1 + 8 + 4 * m.size() + 4);
    for (char c : kMagic) out.push_back(static_cast<std::uint8_t>(c));
    out.push_back(kDtypeF32);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto f = static_cast<float>(m.data()[i]);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
    }
    put_u32(out, crc32(out));
    return out;
}

Matrix decode_matrix(std::span<const std::uint8_t> bytes) {
    constexpr std::size_t kHeader = 5 + 1 + 4 + 4;
    if (bytes.size() < kHeader + 4)
        fail(ErrorKind::truncated,
             "GEPB1: file of " + std::to_string(bytes.size()) +
                 " bytes is shorter than header + checksum");
    for (std::size_t i = 0; i < kMagic.size(); ++i)
        if (bytes[i] != static_cast<std::uint8_t>(kMagic[i]))
            fail(ErrorKind::bad_magic, "GEPB1: bad magic");
    if (bytes[5] != kDtypeF32)
        fail(ErrorKind::bad_dtype,
             "GEPB1: dtype 0x" + std::to_string(bytes[5]) +
                 " unsupported (expected 0x01 = f32le)");
    const std::uint32_t rows = get_u32(bytes.data() + 6);
    const std::uint32_t cols = get_u32(bytes.data() + 10);
    const std::uint64_t payload =
        4ull * static_cast<std::uint64_t>(rows) * cols;
    if (bytes.size() != kHeader + payload + 4)
        fail(ErrorKind::truncated,
             "GEPB1: expected " + std::to_string(kHeader + payload + 4) +
                 " bytes for " + std::to_string(rows) + "x" +
                 std::to_string(cols) + ", got " +
                 std::to_string(bytes.size()));
    const std::uint32_t stored = get_u32(bytes.data() + kHeader + payload);
    const std::uint32_t actual = crc32(bytes.first(kHeader + payload));
    if (stored != actual)
        fail(ErrorKind::checksum_mismatch,
             "GEPB1: checksum mismatch (stored " + std::to_string(stored) +
                 ", computed " + std::to_string(actual) + ")");

    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::uint32_t bits = get_u32(bytes.data() + kHeader + 4 * i);
        float f;
        std::memcpy(&f, &bits, 4);
        m.data()[i] = static_cast<double>(f);
    }
    return m;
}

void write_matrix(const Matrix& m, const std::filesystem::path& path) {
    const auto bytes = encode_matrix(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorKind::io, "cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::missing_file, "cannot open: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_matrix(bytes);
}

} // namespace gepbench
