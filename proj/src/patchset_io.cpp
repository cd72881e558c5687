#include "cascnn/patchset_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "cascnn/errors.hpp"

namespace cascnn {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

void check_id(const std::string& id, const char* what) {
    if (id.find(',') != std::string::npos || id.find('\n') != std::string::npos ||
        id.find('\r') != std::string::npos)
        throw DataError(std::string(what) + " contains a comma or newline: " + id);
}

void put_u16(std::ofstream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

void put_u32(std::ofstream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
    out.write(b, 4);
}

struct ByteReader {
    std::ifstream in;
    std::string path;
    std::size_t offset = 0;

    void bytes(void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw FormatError(path + ": truncated at byte " + std::to_string(offset));
        offset += n;
    }
    std::uint16_t u16() {
        std::uint8_t b[2];
        bytes(b, 2);
        return static_cast<std::uint16_t>(b[0] | b[1] << 8);
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
               static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
    }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string patchset_index_path(const std::string& path) { return path + ".csv"; }

void save_patchset(const CandidateSet& set, const std::string& path) {
    set.validate();

    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw IoError("cannot open for writing: " + path);
    bin.write(kMagic, 4);
    put_u32(bin, kVersion);
    put_u32(bin, static_cast<std::uint32_t>(set.size()));
    std::uint16_t c = 0, h = 0, w = 0;
    if (!set.empty()) {
        const auto& shape = set[0].pixels.shape();
        c = static_cast<std::uint16_t>(shape[0]);
        h = static_cast<std::uint16_t>(shape[1]);
        w = static_cast<std::uint16_t>(shape[2]);
    }
    put_u16(bin, c);
    put_u16(bin, h);
    put_u16(bin, w);
    for (const auto& p : set) {
        for (std::size_t i = 0; i < p->pixels.size(); ++i)
            put_u32(bin, std::bit_cast<std::uint32_t>(p->pixels[i]));
    }
    bin.flush();
    if (!bin) throw IoError("write failed: " + path);

    const std::string index = patchset_index_path(path);
    std::ofstream csv(index);
    if (!csv) throw IoError("cannot open for writing: " + index);
    csv << "record,scan_id,lesion_id,label,augmented_from\n";
    std::size_t rec = 0;
    for (const auto& p : set) {
        check_id(p->scan_id, "scan_id");
        check_id(p->lesion_id, "lesion_id");
        check_id(p->augmented_from, "augmented_from");
        csv << rec++ << ',' << p->scan_id << ',' << p->lesion_id << ',' << p->label << ','
            << p->augmented_from << '\n';
    }
    csv.flush();
    if (!csv) throw IoError("write failed: " + index);
}

CandidateSet load_patchset(const std::string& path) {
    ByteReader r;
    r.in.open(path, std::ios::binary);
    r.path = path;
    if (!r.in) throw IoError("cannot open for reading: " + path);

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError(path + ": bad magic at byte 0");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw FormatError(path + ": unsupported version " + std::to_string(version) +
                          " at byte 4");
    const std::uint32_t n = r.u32();
    const int c = r.u16(), h = r.u16(), w = r.u16();
    if (n > 0 && (c <= 0 || h <= 0 || w <= 0))
        throw FormatError(path + ": non-positive patch dimensions at byte 12");

    const std::size_t stride = n > 0 ? static_cast<std::size_t>(c) * h * w : 0;
    std::vector<std::vector<float>> pixels(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        pixels[i].resize(stride);
        for (std::size_t j = 0; j < stride; ++j) {
            const std::uint32_t bits = r.u32();
            pixels[i][j] = std::bit_cast<float>(bits);
        }
    }

    const std::string index = patchset_index_path(path);
    std::ifstream csv(index);
    if (!csv) throw IoError("cannot open for reading: " + index);
    std::string line;
    if (!std::getline(csv, line)) throw FormatError(index + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "record,scan_id,lesion_id,label,augmented_from")
        throw FormatError(index + ": unexpected header: " + line);

    CandidateSet set;
    std::uint32_t rows = 0;
    while (std::getline(csv, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw FormatError(index + ": row " + std::to_string(rows) + " has " +
                              std::to_string(fields.size()) + " fields, expected 5");
        if (rows >= n)
            throw FormatError(index + ": more rows than the " + std::to_string(n) +
                              " pixel records in " + path);
        std::size_t rec = 0;
        try {
            rec = std::stoul(fields[0]);
        } catch (const std::exception&) {
            throw FormatError(index + ": bad record ordinal in row " + std::to_string(rows));
        }
        if (rec != rows)
            throw FormatError(index + ": record ordinal " + fields[0] +
                              " out of order at row " + std::to_string(rows));
        Patch p;
        p.pixels = Tensor({c, h, w}, std::move(pixels[rows]));
        p.scan_id = fields[1];
        p.lesion_id = fields[2];
        if (fields[3] != "0" && fields[3] != "1")
            throw FormatError(index + ": label outside {0,1} at row " + std::to_string(rows));
        p.label = fields[3] == "1" ? 1 : 0;
        p.augmented_from = fields[4];
        set.add(std::move(p));
        ++rows;
    }
    if (rows != n)
        throw FormatError(index + ": " + std::to_string(rows) + " rows but " +
                          std::to_string(n) + " pixel records in " + path);
    return set;
}

}  // namespace cascnn
