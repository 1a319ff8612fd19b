#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "clbp/decoder.hpp"
#include "clbp/error.hpp"
#include "clbp/feature_io.hpp"

namespace clbp {

/// Elementwise sum of the training feature vectors.
struct CumulativeHistogram {
    Descriptor desc;
    std::vector<double> values;
    std::size_t t_count = 0;
};

/// Learned dominant-pattern table: the D feature positions with the highest
/// cumulative value, ordered by descending value (ties by ascending index).
struct PatternTable {
    Descriptor desc;
    int tiles = 1;  // grid tile count; feature dim = tiles * 2^n * 2^P
    std::size_t t_count = 0;
    std::vector<std::uint32_t> indices;

    std::size_t d() const { return indices.size(); }
    std::size_t feature_dim() const {
        return static_cast<std::size_t>(tiles) << (desc.n + desc.neighbors);
    }
};

/// Sums feature vectors in the order given (manifest order upstream) with a
/// binary-counter pairwise reduction: partial sums of equal rank merge, and
/// the leftovers combine from the smallest rank down. The tree is fixed, so
/// the result is bit-reproducible for a given sequence.
inline CumulativeHistogram accumulate(std::span<const FeatureVector> features) {
    if (features.empty()) throw ConfigError("accumulate: no feature vectors");
    const Descriptor desc = features[0].desc;
    const std::size_t dim = features[0].dim();
    for (const FeatureVector& f : features) {
        if (f.desc != desc) throw DataError("accumulate: descriptor mismatch: " + f.desc.str() +
                                            " vs " + desc.str());
        if (f.dim() != dim) throw DataError("accumulate: dimension mismatch");
    }

    std::vector<std::pair<int, std::vector<double>>> stack;  // (rank, partial sum)
    auto add_into = [dim](std::vector<double>& dst, const std::vector<double>& src) {
        for (std::size_t i = 0; i < dim; ++i) dst[i] += src[i];
    };
    for (const FeatureVector& f : features) {
        std::vector<double> cur = f.values;
        int rank = 0;
        while (!stack.empty() && stack.back().first == rank) {
            add_into(cur, stack.back().second);
            stack.pop_back();
            ++rank;
        }
        stack.emplace_back(rank, std::move(cur));
    }
    std::vector<double> total = std::move(stack.back().second);
    stack.pop_back();
    while (!stack.empty()) {
        add_into(total, stack.back().second);
        stack.pop_back();
    }

    CumulativeHistogram cum;
    cum.desc = desc;
    cum.values = std::move(total);
    cum.t_count = features.size();
    return cum;
}

inline CumulativeHistogram accumulate(const std::vector<FeatureVector>& features) {
    return accumulate(std::span<const FeatureVector>(features.data(), features.size()));
}

/// Picks the D positions with the largest cumulative values; ties break
/// toward the lower index so tables are total-ordered and reproducible.
inline PatternTable learn_table(const CumulativeHistogram& cum, std::size_t d, int tiles = 1) {
    if (d < 1 || d > cum.values.size())
        throw ConfigError("learn_table: D must be in [1, " + std::to_string(cum.values.size()) +
                          "], got " + std::to_string(d));
    const std::size_t base_dim = std::size_t{1} << (cum.desc.n + cum.desc.neighbors);
    if (cum.values.size() != static_cast<std::size_t>(tiles) * base_dim)
        throw ConfigError("learn_table: cumulative length does not match tiles * 2^n * 2^P");

    std::vector<std::uint32_t> order(cum.values.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (cum.values[a] != cum.values[b]) return cum.values[a] > cum.values[b];
        return a < b;
    });
    order.resize(d);

    PatternTable table;
    table.desc = cum.desc;
    table.tiles = tiles;
    table.t_count = cum.t_count;
    table.indices = std::move(order);
    return table;
}

/// Gathers the table's positions out of a feature vector; no renormalization.
inline std::vector<double> select(const FeatureVector& feat, const PatternTable& table) {
    if (feat.desc != table.desc)
        throw DataError("select: feature/table descriptor mismatch: " + feat.desc.str() + " vs " +
                        table.desc.str());
    if (feat.dim() != table.feature_dim())
        throw DataError("select: feature dim " + std::to_string(feat.dim()) +
                        " does not match table dim " + std::to_string(table.feature_dim()));
    std::vector<double> out(table.indices.size());
    for (std::size_t i = 0; i < table.indices.size(); ++i) out[i] = feat.values[table.indices[i]];
    return out;
}

/// FNV-1a over the index list; used to fingerprint which table a fold used.
inline std::uint64_t table_checksum(const PatternTable& table) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::uint32_t idx : table.indices) {
        for (int shift = 0; shift < 32; shift += 8) {
            h ^= (idx >> shift) & 0xFFu;
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

// --- CLBP-TABLE v1 ---------------------------------------------------------

inline void write_table(std::ostream& out, const PatternTable& table) {
    out << "CLBP-TABLE v1\n";
    out << "kind=" << to_string(table.desc.kind) << " n=" << table.desc.n
        << " P=" << table.desc.neighbors << " R=" << table.desc.radius
        << " xi=" << detail::format_double(table.desc.xi) << " D=" << table.indices.size()
        << " T=" << table.t_count;
    if (table.tiles != 1) out << " grid=" << table.tiles;
    out << "\n";
    for (std::uint32_t idx : table.indices) out << idx << "\n";
}

inline void write_table(const std::filesystem::path& path, const PatternTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    write_table(out, table);
}

inline PatternTable read_table(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line) || line != "CLBP-TABLE v1")
        throw DataError("table file: bad signature: " + name);
    if (!std::getline(in, line)) throw DataError("table file: missing header: " + name);

    PatternTable table;
    std::size_t d = 0;
    bool saw_d = false;
    std::istringstream header(line);
    std::string tok;
    while (header >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw DataError("table file: bad header token '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        if (key == "kind") table.desc.kind = stack_kind_from_string(value);
        else if (key == "n") table.desc.n = static_cast<int>(detail::parse_long(value, "n"));
        else if (key == "P") table.desc.neighbors = static_cast<int>(detail::parse_long(value, "P"));
        else if (key == "R") table.desc.radius = static_cast<int>(detail::parse_long(value, "R"));
        else if (key == "xi") table.desc.xi = detail::parse_double(value, "xi");
        else if (key == "D") { d = static_cast<std::size_t>(detail::parse_long(value, "D")); saw_d = true; }
        else if (key == "T") table.t_count = static_cast<std::size_t>(detail::parse_long(value, "T"));
        else if (key == "grid") {
            const auto x = value.find('x');
            table.tiles = x == std::string::npos
                              ? static_cast<int>(detail::parse_long(value, "grid"))
                              : static_cast<int>(detail::parse_long(value.substr(0, x), "grid") *
                                                 detail::parse_long(value.substr(x + 1), "grid"));
        } else throw DataError("table file: unknown header key '" + key + "'");
    }
    if (!saw_d) throw DataError("table file: header missing D: " + name);

    const std::size_t dim = table.feature_dim();
    std::unordered_set<std::uint32_t> seen;
    table.indices.reserve(d);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const long idx = detail::parse_long(line, "index");
        if (idx < 0 || static_cast<std::size_t>(idx) >= dim)
            throw DataError("table file: index " + line + " out of range [0, " +
                            std::to_string(dim) + "): " + name);
        if (!seen.insert(static_cast<std::uint32_t>(idx)).second)
            throw DataError("table file: duplicate index " + line + ": " + name);
        table.indices.push_back(static_cast<std::uint32_t>(idx));
    }
    if (table.indices.size() != d)
        throw DataError("table file: expected " + std::to_string(d) + " indices, found " +
                        std::to_string(table.indices.size()) + ": " + name);
    return table;
}

inline PatternTable read_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    return read_table(in, path.string());
}

}  // namespace clbp
