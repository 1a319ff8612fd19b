#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clbp/decoder.hpp"
#include "clbp/error.hpp"

namespace clbp {

/// One feature file record: the vector plus its class label.
struct FeatureRecord {
    FeatureVector vec;
    std::string label;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw DataError("feature file: bad " + what + " '" + s + "'");
    return v;
}

inline long parse_long(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') throw DataError("feature file: bad " + what + " '" + s + "'");
    return v;
}

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw DataError("feature file: truncated length field");
    return static_cast<std::uint32_t>(b[0]) | (std::uint32_t{b[1]} << 8) |
           (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
}

inline std::uint64_t to_le64(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return __builtin_bswap64(v);
}

inline void put_doubles_le(std::ostream& out, const std::vector<double>& values) {
    for (double d : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        bits = to_le64(bits);
        out.write(reinterpret_cast<const char*>(&bits), 8);
    }
}

inline void get_doubles_le(std::istream& in, std::vector<double>& values) {
    for (double& d : values) {
        std::uint64_t bits;
        in.read(reinterpret_cast<char*>(&bits), 8);
        if (!in) throw DataError("feature file: truncated values");
        bits = to_le64(bits);
        std::memcpy(&d, &bits, 8);
    }
}

/// Header lines shared by the text and binary layouts.
inline std::string feature_header(const FeatureRecord& rec) {
    std::string h;
    h += "kind=" + to_string(rec.vec.desc.kind) + "\n";
    h += "n=" + std::to_string(rec.vec.desc.n) + "\n";
    h += "P=" + std::to_string(rec.vec.desc.neighbors) + "\n";
    h += "R=" + std::to_string(rec.vec.desc.radius) + "\n";
    h += "xi=" + format_double(rec.vec.desc.xi) + "\n";
    h += "dim=" + std::to_string(rec.vec.dim()) + "\n";
    h += "label=" + rec.label + "\n";
    return h;
}

struct ParsedHeader {
    Descriptor desc;
    std::size_t dim = 0;
    std::string label;
};

inline ParsedHeader parse_feature_header(const std::vector<std::string>& lines) {
    ParsedHeader out;
    bool saw_dim = false;
    for (const std::string& line : lines) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("feature file: bad header line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "kind") out.desc.kind = stack_kind_from_string(value);
        else if (key == "n") out.desc.n = static_cast<int>(parse_long(value, "n"));
        else if (key == "P") out.desc.neighbors = static_cast<int>(parse_long(value, "P"));
        else if (key == "R") out.desc.radius = static_cast<int>(parse_long(value, "R"));
        else if (key == "xi") out.desc.xi = parse_double(value, "xi");
        else if (key == "dim") { out.dim = static_cast<std::size_t>(parse_long(value, "dim")); saw_dim = true; }
        else if (key == "label") out.label = value;
        else throw DataError("feature file: unknown header key '" + key + "'");
    }
    if (!saw_dim) throw DataError("feature file: header missing dim");
    return out;
}

}  // namespace detail

inline constexpr char kFeatureMagic[] = "CLBPF1";

// --- text layout: header lines, blank line, one %.17g value per line ---

inline void write_feature_text(std::ostream& out, const FeatureRecord& rec) {
    out << detail::feature_header(rec) << "\n";
    for (double v : rec.vec.values) out << detail::format_double(v) << "\n";
}

/// Reads one text record; std::nullopt on clean EOF.
inline std::optional<FeatureRecord> read_feature_text(std::istream& in) {
    std::vector<std::string> header;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) break;
        header.push_back(line);
    }
    if (header.empty()) {
        if (in.eof()) return std::nullopt;
        throw DataError("feature file: empty record");
    }
    const auto parsed = detail::parse_feature_header(header);
    FeatureRecord rec;
    rec.vec.desc = parsed.desc;
    rec.label = parsed.label;
    rec.vec.values.resize(parsed.dim);
    for (std::size_t i = 0; i < parsed.dim; ++i) {
        if (!std::getline(in, line)) throw DataError("feature file: truncated values");
        rec.vec.values[i] = detail::parse_double(line, "value");
    }
    return rec;
}

// --- binary layout: magic, u32 LE header length, header text, LE doubles ---

inline void write_feature_binary(std::ostream& out, const FeatureRecord& rec) {
    out.write(kFeatureMagic, 6);
    const std::string header = detail::feature_header(rec);
    detail::put_u32_le(out, static_cast<std::uint32_t>(header.size()));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    detail::put_doubles_le(out, rec.vec.values);
}

inline std::optional<FeatureRecord> read_feature_binary(std::istream& in) {
    char magic[6];
    in.read(magic, 6);
    if (in.gcount() == 0 && in.eof()) return std::nullopt;
    if (in.gcount() != 6 || std::memcmp(magic, kFeatureMagic, 6) != 0)
        throw DataError("feature file: bad record magic");
    const std::uint32_t header_len = detail::get_u32_le(in);
    std::string header(header_len, '\0');
    in.read(header.data(), header_len);
    if (static_cast<std::uint32_t>(in.gcount()) != header_len)
        throw DataError("feature file: truncated header");
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < header.size()) {
        const auto nl = header.find('\n', pos);
        const auto end = nl == std::string::npos ? header.size() : nl;
        if (end > pos) lines.push_back(header.substr(pos, end - pos));
        pos = end + 1;
    }
    const auto parsed = detail::parse_feature_header(lines);
    FeatureRecord rec;
    rec.vec.desc = parsed.desc;
    rec.label = parsed.label;
    rec.vec.values.resize(parsed.dim);
    detail::get_doubles_le(in, rec.vec.values);
    return rec;
}

// --- batch helpers; reading sniffs the format from the first bytes ---

inline void write_feature_batch(const std::filesystem::path& path,
                                const std::vector<FeatureRecord>& records, bool text = false) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    for (const auto& rec : records)
        text ? write_feature_text(out, rec) : write_feature_binary(out, rec);
    if (!out) throw DataError("write failed: " + path.string());
}

inline std::vector<FeatureRecord> read_feature_batch(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    char magic[6] = {};
    in.read(magic, 6);
    const bool binary = in.gcount() == 6 && std::memcmp(magic, kFeatureMagic, 6) == 0;
    in.clear();
    in.seekg(0, std::ios::beg);
    std::vector<FeatureRecord> records;
    while (true) {
        auto rec = binary ? read_feature_binary(in) : read_feature_text(in);
        if (!rec) break;
        records.push_back(std::move(*rec));
    }
    if (records.empty()) throw DataError("feature file has no records: " + path.string());
    return records;
}

}  // namespace clbp
