#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal read-only zip support, enough for OOXML packages: central
// directory lookup, stored and deflate entries, CRC verification.
// Decompression is delegated to zlib.
namespace docpipe::zip {

class Archive {
public:
    // Throws NotZipError when `bytes` is not a readable zip archive.
    explicit Archive(std::string bytes);

    bool contains(std::string_view name) const;
    // Extracted entry contents; throws NotZipError on damaged entries,
    // returns nullopt when the entry does not exist.
    std::optional<std::string> read(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    struct Entry {
        std::uint16_t method = 0;
        std::uint32_t crc32 = 0;
        std::uint64_t compressed_size = 0;
        std::uint64_t uncompressed_size = 0;
        std::uint64_t local_header_offset = 0;
    };

    std::string bytes_;
    std::map<std::string, Entry, std::less<>> entries_;
};

} // namespace docpipe::zip
