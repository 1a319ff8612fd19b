#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "clbp/error.hpp"
#include "clbp/image.hpp"

namespace clbp {

/// Directory-per-class dataset listing: entries sorted by (class, filename).
struct DatasetManifest {
    struct Entry {
        std::filesystem::path path;
        std::string label;
    };
    std::filesystem::path root;
    std::vector<Entry> entries;
    std::vector<std::string> classes;  // sorted unique labels

    std::size_t size() const { return entries.size(); }

    int class_index(const std::string& label) const {
        const auto it = std::lower_bound(classes.begin(), classes.end(), label);
        if (it == classes.end() || *it != label) throw DataError("unknown class label: " + label);
        return static_cast<int>(it - classes.begin());
    }
};

/// Scans root/<class>/<image> into a manifest. Files that fail to decode are
/// skipped with a warning on stderr; a class directory with no decodable image
/// is an error, as is a root with fewer than two classes.
inline DatasetManifest scan_dataset(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw DataError("dataset root is not a directory: " + root.string());

    DatasetManifest manifest;
    manifest.root = root;
    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.empty()) throw DataError("dataset root has no class directories: " + root.string());

    for (const auto& dir : class_dirs) {
        const std::string label = dir.filename().string();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file()) files.push_back(entry.path());
        std::sort(files.begin(), files.end());

        std::size_t kept = 0;
        for (const auto& file : files) {
            try {
                (void)load_image(file);
            } catch (const DataError& e) {
                std::cerr << "warning: skipping " << file.string() << " (" << e.what() << ")\n";
                continue;
            }
            manifest.entries.push_back({file, label});
            ++kept;
        }
        if (kept == 0) throw DataError("class directory has no decodable images: " + dir.string());
        manifest.classes.push_back(label);
    }
    if (manifest.classes.size() < 2)
        throw DataError("dataset needs at least 2 classes, found " +
                        std::to_string(manifest.classes.size()));
    return manifest;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace detail

inline void write_manifest_csv(std::ostream& out, const DatasetManifest& manifest) {
    out << "path,label\n";
    for (const auto& e : manifest.entries)
        out << detail::csv_quote(e.path.string()) << "," << detail::csv_quote(e.label) << "\n";
}

inline void write_manifest_csv(const std::filesystem::path& path, const DatasetManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    write_manifest_csv(out, manifest);
}

}  // namespace clbp
