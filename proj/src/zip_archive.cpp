#include "zip_archive.hpp"

#include <zlib.h>

#include <cstring>

#include "docpipe/errors.hpp"

namespace docpipe::zip {

namespace {

constexpr std::uint32_t kEocdSignature = 0x06054b50;
constexpr std::uint32_t kCentralSignature = 0x02014b50;
constexpr std::uint32_t kLocalSignature = 0x04034b50;
constexpr std::size_t kEocdMinSize = 22;

std::uint16_t read_u16(const std::string& b, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                      (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t read_u32(const std::string& b, std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24);
}

std::string inflate_raw(const char* data, std::size_t compressed_size,
                        std::size_t uncompressed_size) {
    std::string out(uncompressed_size, '\0');
    z_stream strm{};
    // Negative window bits: raw deflate stream, no zlib header.
    if (inflateInit2(&strm, -MAX_WBITS) != Z_OK) {
        throw NotZipError("inflate init failed");
    }
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
    strm.avail_in = static_cast<uInt>(compressed_size);
    strm.next_out = reinterpret_cast<Bytef*>(out.data());
    strm.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&strm, Z_FINISH);
    inflateEnd(&strm);
    if (rc != Z_STREAM_END || strm.total_out != uncompressed_size) {
        throw NotZipError("corrupt deflate stream in entry");
    }
    return out;
}

} // namespace

Archive::Archive(std::string bytes) : bytes_(std::move(bytes)) {
    if (bytes_.size() < kEocdMinSize) {
        throw NotZipError("input shorter than end-of-central-directory record");
    }
    // EOCD sits at the end, possibly preceded by a comment (max 64k).
    std::size_t scan_start =
        bytes_.size() >= kEocdMinSize + 0xFFFF ? bytes_.size() - kEocdMinSize - 0xFFFF : 0;
    std::size_t eocd = std::string::npos;
    for (std::size_t off = bytes_.size() - kEocdMinSize + 1; off-- > scan_start;) {
        if (read_u32(bytes_, off) == kEocdSignature) {
            eocd = off;
            break;
        }
    }
    if (eocd == std::string::npos) {
        throw NotZipError("end-of-central-directory signature not found");
    }

    std::uint16_t entry_count = read_u16(bytes_, eocd + 10);
    std::uint32_t cd_size = read_u32(bytes_, eocd + 12);
    std::uint32_t cd_offset = read_u32(bytes_, eocd + 16);
    if (cd_offset == 0xFFFFFFFF || entry_count == 0xFFFF) {
        throw NotZipError("zip64 archives are not supported");
    }
    if (static_cast<std::uint64_t>(cd_offset) + cd_size > bytes_.size()) {
        throw NotZipError("central directory extends past end of file");
    }

    std::size_t pos = cd_offset;
    for (std::uint16_t i = 0; i < entry_count; ++i) {
        if (pos + 46 > bytes_.size() || read_u32(bytes_, pos) != kCentralSignature) {
            throw NotZipError("damaged central directory entry");
        }
        Entry e;
        e.method = read_u16(bytes_, pos + 10);
        e.crc32 = read_u32(bytes_, pos + 16);
        e.compressed_size = read_u32(bytes_, pos + 20);
        e.uncompressed_size = read_u32(bytes_, pos + 24);
        std::uint16_t name_len = read_u16(bytes_, pos + 28);
        std::uint16_t extra_len = read_u16(bytes_, pos + 30);
        std::uint16_t comment_len = read_u16(bytes_, pos + 32);
        e.local_header_offset = read_u32(bytes_, pos + 42);
        if (pos + 46 + name_len > bytes_.size()) {
            throw NotZipError("central directory name extends past end of file");
        }
        std::string name = bytes_.substr(pos + 46, name_len);
        entries_.emplace(std::move(name), e);
        pos += 46 + static_cast<std::size_t>(name_len) + extra_len + comment_len;
    }
}

bool Archive::contains(std::string_view name) const {
    return entries_.find(name) != entries_.end();
}

std::vector<std::string> Archive::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, entry] : entries_) out.push_back(name);
    return out;
}

std::optional<std::string> Archive::read(std::string_view name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) return std::nullopt;
    const Entry& e = it->second;

    std::size_t pos = e.local_header_offset;
    if (pos + 30 > bytes_.size() || read_u32(bytes_, pos) != kLocalSignature) {
        throw NotZipError("damaged local header for entry " + std::string(name));
    }
    // Name/extra lengths in the local header may differ from the central
    // directory copy; trust the local ones for the data offset.
    std::uint16_t name_len = read_u16(bytes_, pos + 26);
    std::uint16_t extra_len = read_u16(bytes_, pos + 28);
    std::size_t data_off = pos + 30 + name_len + extra_len;
    if (data_off + e.compressed_size > bytes_.size()) {
        throw NotZipError("entry data extends past end of file");
    }

    std::string out;
    if (e.method == 0) {
        out = bytes_.substr(data_off, e.compressed_size);
    } else if (e.method == 8) {
        out = inflate_raw(bytes_.data() + data_off, e.compressed_size, e.uncompressed_size);
    } else {
        throw NotZipError("unsupported compression method " + std::to_string(e.method));
    }

    auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(out.data()),
                       static_cast<uInt>(out.size()));
    if (static_cast<std::uint32_t>(crc) != e.crc32) {
        throw NotZipError("crc mismatch in entry " + std::string(name));
    }
    return out;
}

} // namespace docpipe::zip
