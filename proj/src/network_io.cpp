#include "cascnn/network_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "cascnn/errors.hpp"

namespace cascnn {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open for writing: " + path);
    }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), n); }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16),
                             static_cast<std::uint8_t>(v >> 24)};
        bytes(b, 4);
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v));
        u32(static_cast<std::uint32_t>(v >> 32));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void finish(const std::string& path) {
        out_.flush();
        if (!out_) throw IoError("write failed: " + path);
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw IoError("cannot open for reading: " + path);
    }
    std::size_t offset() const { return offset_; }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError(path_ + ": truncated at byte " + std::to_string(offset_));
        offset_ += n;
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
               static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
    }
    std::uint64_t u64() {
        const std::uint64_t lo = u32();
        return lo | static_cast<std::uint64_t>(u32()) << 32;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    const std::string& path() const { return path_; }

private:
    std::ifstream in_;
    std::string path_;
    std::size_t offset_ = 0;
};

void write_tensor_data(Writer& w, const Tensor& t) {
    for (std::size_t i = 0; i < t.size(); ++i) w.f32(t[i]);
}

void read_tensor_data(Reader& r, Tensor& t) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = r.f32();
}

}  // namespace

void save_network(const Network& net, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    for (int d : net.input_shape()) w.u32(static_cast<std::uint32_t>(d));
    w.u64(net.init_seed());
    w.u32(static_cast<std::uint32_t>(net.layers().size()));
    for (const auto& spec : net.layers()) {
        w.u8(static_cast<std::uint8_t>(spec.kind));
        switch (spec.kind) {
            case LayerKind::conv2d:
                w.u32(static_cast<std::uint32_t>(spec.out_channels));
                w.u32(static_cast<std::uint32_t>(spec.kernel_size));
                w.u8(static_cast<std::uint8_t>(spec.padding));
                break;
            case LayerKind::dense:
                w.u32(static_cast<std::uint32_t>(spec.out_features));
                break;
            case LayerKind::dropout:
                w.f32(spec.rate);
                break;
            default:
                break;
        }
    }
    for (const auto& p : net.params()) {
        if (p.empty()) continue;
        write_tensor_data(w, p.weights);
        write_tensor_data(w, p.bias);
    }
    w.finish(path);
}

Network load_network(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(path + ": bad magic at byte 0");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw FormatError(path + ": unsupported version " + std::to_string(version) +
                          " at byte 4");
    std::vector<int> input_shape(3);
    for (int& d : input_shape) d = static_cast<int>(r.u32());
    const std::uint64_t seed = r.u64();
    const std::uint32_t n_layers = r.u32();
    std::vector<LayerSpec> layers;
    layers.reserve(n_layers);
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        const std::size_t at = r.offset();
        const std::uint8_t kind = r.u8();
        if (kind > static_cast<std::uint8_t>(LayerKind::softmax))
            throw FormatError(path + ": unknown layer kind at byte " + std::to_string(at));
        LayerSpec spec;
        spec.kind = static_cast<LayerKind>(kind);
        switch (spec.kind) {
            case LayerKind::conv2d: {
                spec.out_channels = static_cast<int>(r.u32());
                spec.kernel_size = static_cast<int>(r.u32());
                const std::uint8_t pad = r.u8();
                if (pad > 1)
                    throw FormatError(path + ": bad padding mode at byte " +
                                      std::to_string(at));
                spec.padding = static_cast<Padding>(pad);
                break;
            }
            case LayerKind::dense:
                spec.out_features = static_cast<int>(r.u32());
                break;
            case LayerKind::dropout:
                spec.rate = r.f32();
                break;
            default:
                break;
        }
        layers.push_back(spec);
    }

    Network net(input_shape, layers, seed);
    for (auto& p : net.params()) {
        if (p.empty()) continue;
        read_tensor_data(r, p.weights);
        read_tensor_data(r, p.bias);
    }
    return net;
}

}  // namespace cascnn
