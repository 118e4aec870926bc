#include "paramosc/csv.hpp"

#include <cstdio>
#include <fstream>

#include "paramosc/errors.hpp"

namespace paramosc {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string manifest_hash_hex(const nlohmann::json& manifest) {
    // dump() of an object is key-sorted, so the serialization is canonical.
    const std::uint64_t h = fnv1a(manifest.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

void commit_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw validation_error("cannot write file: " + tmp);
        out << content;
        out.flush();
        if (!out)
            throw validation_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw validation_error("cannot move temporary file into place: " + path);
    }
}

} // namespace

void write_csv_atomic(const std::string& path,
                      const std::vector<std::string>& comment_lines,
                      const std::vector<std::string>& column_names,
                      const std::vector<std::vector<double>>& rows) {
    if (column_names.empty())
        throw validation_error("CSV needs at least one column");
    std::string content;
    content.reserve(rows.size() * column_names.size() * 24 + 256);
    for (const auto& c : comment_lines) {
        content += "# ";
        content += c;
        content += '\n';
    }
    for (std::size_t i = 0; i < column_names.size(); ++i) {
        if (i) content += ',';
        content += column_names[i];
    }
    content += '\n';
    for (const auto& row : rows) {
        if (row.size() != column_names.size())
            throw validation_error("CSV row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) content += ',';
            content += format_double(row[i]);
        }
        content += '\n';
    }
    commit_atomic(path, content);
}

std::string write_manifest(const std::string& dir, nlohmann::json manifest) {
    const std::string hash = manifest_hash_hex(manifest);
    manifest["manifest_hash"] = hash;
    commit_atomic(dir + "/manifest.json", manifest.dump(2) + "\n");
    return hash;
}

} // namespace paramosc
