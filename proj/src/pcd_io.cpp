#include "pretouch/pcd_io.hpp"

#include "pretouch/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace pretouch {

namespace {

constexpr std::array<std::string_view, 10> kHeaderKeys = {"VERSION", "FIELDS", "SIZE",      "TYPE",   "COUNT",
                                                          "WIDTH",   "HEIGHT", "VIEWPOINT", "POINTS", "DATA"};

std::vector<std::string> split_words(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> words;
    for (std::string w; ss >> w;) words.push_back(w);
    return words;
}

long parse_count(const std::string& s, const char* key) {
    long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || v < 0) throw FormatError(std::string("PCD: bad ") + key + " value '" + s + "'");
    return v;
}

void append_float(std::string& buf, float v) {
    char tmp[32];
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
    buf.append(tmp, ptr);
}

}  // namespace

PointCloud read_pcd(std::istream& in) {
    std::array<std::vector<std::string>, kHeaderKeys.size()> header;
    std::size_t next_key = 0;
    std::string line;
    while (next_key < kHeaderKeys.size()) {
        if (!std::getline(in, line)) throw FormatError("PCD: header ended before DATA");
        const auto words = split_words(line);
        if (words.empty() || words.front().front() == '#') continue;
        if (words.front() != kHeaderKeys[next_key])
            throw FormatError("PCD: expected header key " + std::string(kHeaderKeys[next_key]) + ", found '" +
                              words.front() + "'");
        header[next_key] = {words.begin() + 1, words.end()};
        ++next_key;
    }
    const auto& version = header[0];
    const auto& fields = header[1];
    const auto& sizes = header[2];
    const auto& types = header[3];
    const auto& counts = header[4];
    const auto& data = header[9];

    if (version.size() != 1 || (version[0] != "0.7" && version[0] != ".7"))
        throw UnsupportedFormatError("PCD: only VERSION 0.7 is supported");
    if (data.size() != 1) throw FormatError("PCD: malformed DATA line");
    if (data[0] != "ascii") throw UnsupportedFormatError("PCD: DATA " + data[0] + " is not supported (ascii only)");
    const std::size_t nf = fields.size();
    if (nf == 0 || sizes.size() != nf || types.size() != nf || counts.size() != nf)
        throw FormatError("PCD: FIELDS/SIZE/TYPE/COUNT lengths disagree");

    std::array<int, 3> column = {-1, -1, -1};
    for (std::size_t f = 0; f < nf; ++f) {
        if (types[f] != "F") throw UnsupportedFormatError("PCD: field '" + fields[f] + "' has non-float TYPE " + types[f]);
        if (sizes[f] != "4" && sizes[f] != "8") throw UnsupportedFormatError("PCD: unsupported float SIZE " + sizes[f]);
        if (counts[f] != "1") throw UnsupportedFormatError("PCD: field '" + fields[f] + "' has COUNT != 1");
        if (fields[f] == "x") column[0] = static_cast<int>(f);
        if (fields[f] == "y") column[1] = static_cast<int>(f);
        if (fields[f] == "z") column[2] = static_cast<int>(f);
    }
    if (column[0] < 0 || column[1] < 0 || column[2] < 0) throw FormatError("PCD: FIELDS must include x y z");

    if (header[5].size() != 1 || header[6].size() != 1 || header[8].size() != 1)
        throw FormatError("PCD: malformed WIDTH/HEIGHT/POINTS");
    const long width = parse_count(header[5][0], "WIDTH");
    const long height = parse_count(header[6][0], "HEIGHT");
    const long n_points = parse_count(header[8][0], "POINTS");
    if (width * height != n_points) throw FormatError("PCD: WIDTH * HEIGHT != POINTS");

    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n_points));
    long read = 0;
    std::vector<double> row(nf);
    while (read < n_points && std::getline(in, line)) {
        const auto words = split_words(line);
        if (words.empty()) continue;
        if (words.size() != nf) throw FormatError("PCD: data row " + std::to_string(read) + " has wrong column count");
        for (std::size_t f = 0; f < nf; ++f) {
            const char* b = words[f].data();
            const char* e = b + words[f].size();
            auto [ptr, ec] = std::from_chars(b, e, row[f]);
            if (ec != std::errc{} || ptr != e) {
                if (words[f] == "nan" || words[f] == "NaN" || words[f] == "-nan") {
                    row[f] = std::nan("");
                } else {
                    throw FormatError("PCD: data row " + std::to_string(read) + " has non-numeric value '" + words[f] +
                                      "'");
                }
            }
        }
        const Vec3 p(row[column[0]], row[column[1]], row[column[2]]);
        if (p.allFinite()) cloud.points.push_back(p);
        ++read;
    }
    if (read != n_points)
        throw FormatError("PCD: expected " + std::to_string(n_points) + " points, found " + std::to_string(read));
    return cloud;
}

void write_pcd(std::ostream& out, const PointCloud& cloud) {
    const std::string n = std::to_string(cloud.size());
    std::string buf;
    buf += "# .PCD v0.7 - Point Cloud Data file format\n";
    buf += "VERSION 0.7\nFIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\n";
    buf += "WIDTH " + n + "\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS " + n + "\nDATA ascii\n";
    for (const auto& p : cloud.points) {
        append_float(buf, static_cast<float>(p.x()));
        buf += ' ';
        append_float(buf, static_cast<float>(p.y()));
        buf += ' ';
        append_float(buf, static_cast<float>(p.z()));
        buf += '\n';
    }
    out << buf;
}

PointCloud load_pcd(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open PCD file '" + path + "'");
    return read_pcd(in);
}

void save_pcd(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write PCD file '" + path + "'");
    write_pcd(out, cloud);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace pretouch
