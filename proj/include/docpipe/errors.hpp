#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace docpipe {

// Base for all library errors. Every failure surfaces as one of the
// subclasses below; nothing in the library aborts or leaks raw system errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- document opening ---

class NotZipError : public Error {
public:
    explicit NotZipError(const std::string& detail)
        : Error("not a zip archive: " + detail) {}
};

class MissingDocumentPartError : public Error {
public:
    explicit MissingDocumentPartError(const std::string& part)
        : Error("missing document part: " + part), part_(part) {}
    const std::string& part() const { return part_; }

private:
    std::string part_;
};

class MalformedXmlError : public Error {
public:
    MalformedXmlError(const std::string& detail, std::size_t byte_offset)
        : Error("malformed xml at byte " + std::to_string(byte_offset) + ": " + detail),
          byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

class SchemaViolationError : public Error {
public:
    explicit SchemaViolationError(const std::string& field)
        : Error("plain document schema violation: " + field), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// --- embedding / remote services ---

class DimensionMismatchError : public Error {
public:
    DimensionMismatchError(int got, int want)
        : Error("vector dimension mismatch: got " + std::to_string(got) + ", want " +
                std::to_string(want)),
          got_(got), want_(want) {}
    int got() const { return got_; }
    int want() const { return want_; }

private:
    int got_;
    int want_;
};

class TransportError : public Error {
public:
    explicit TransportError(const std::string& detail)
        : Error("transport failure: " + detail) {}
};

class VisionUnavailableError : public Error {
public:
    explicit VisionUnavailableError(const std::string& detail)
        : Error("vision service unavailable: " + detail) {}
};

// --- index persistence ---

class IndexFormatError : public Error {
public:
    enum class Kind { BadMagic, UnsupportedVersion, TruncatedFile, ChecksumMismatch };

    IndexFormatError(Kind kind, const std::string& detail)
        : Error("index file error: " + detail), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// --- configuration ---

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& detail) : Error("config error: " + detail) {}
};

} // namespace docpipe
