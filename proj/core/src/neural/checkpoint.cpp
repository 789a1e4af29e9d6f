#include "hrrpnet/neural/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace hrrpnet::neural {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint32_t get_u32(std::istream& is, const std::string& what) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("checkpoint truncated while reading " + what);
    return v;
}

std::string get_bytes(std::istream& is, std::size_t n, const std::string& what) {
    std::string s(n, '\0');
    if (n && !is.read(s.data(), static_cast<std::streamsize>(n))) throw IoError("checkpoint truncated while reading " + what);
    return s;
}

constexpr std::uint32_t kMaxName = 4096;
constexpr std::uint32_t kMaxRank = 8;

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write("JRCK", 4);
    put_u32(os, kCheckpointVersion);
    const std::string meta = ckpt.meta.dump();
    put_u32(os, static_cast<std::uint32_t>(meta.size()));
    os.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    put_u32(os, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& t : ckpt.tensors) {
        if (t.data.size() != shape_size(t.shape)) throw ShapeError("checkpoint tensor " + t.name + " has inconsistent size");
        put_u32(os, static_cast<std::uint32_t>(t.name.size()));
        os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put_u32(os, static_cast<std::uint32_t>(t.shape.size()));
        for (auto d : t.shape) put_u32(os, static_cast<std::uint32_t>(d));
        os.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    }
    if (!os) throw IoError("write failed for " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint " + path.string());
    if (get_bytes(is, 4, "magic") != "JRCK") throw IoError(path.string() + " is not a JRCK checkpoint");
    const auto version = get_u32(is, "version");
    if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    const auto meta_len = get_u32(is, "metadata length");
    try {
        ckpt.meta = nlohmann::json::parse(get_bytes(is, meta_len, "metadata"));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
    }
    const auto count = get_u32(is, "tensor count");
    for (std::uint32_t i = 0; i < count; ++i) {
        CheckpointTensor t;
        const auto name_len = get_u32(is, "name length");
        if (name_len > kMaxName) throw IoError("checkpoint tensor name too long");
        t.name = get_bytes(is, name_len, "tensor name");
        const auto rank = get_u32(is, "rank");
        if (rank > kMaxRank) throw IoError("checkpoint tensor " + t.name + " has implausible rank");
        for (std::uint32_t d = 0; d < rank; ++d) t.shape.push_back(get_u32(is, "dimension"));
        t.data.resize(shape_size(t.shape));
        if (!t.data.empty() &&
            !is.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)))) {
            throw IoError("checkpoint truncated in tensor " + t.name);
        }
        ckpt.tensors.push_back(std::move(t));
    }
    if (is.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after checkpoint tensors");
    return ckpt;
}

template <typename T>
Checkpoint snapshot(const std::vector<NamedTensor<T>>& params, nlohmann::json meta) {
    Checkpoint ckpt{std::move(meta), {}};
    for (const auto& p : params) {
        CheckpointTensor t{p.name, p.tensor->shape, {}};
        t.data.reserve(p.tensor->size());
        for (auto v : p.tensor->data) t.data.push_back(static_cast<float>(v));
        ckpt.tensors.push_back(std::move(t));
    }
    return ckpt;
}

template <typename T>
void restore(const Checkpoint& ckpt, const std::vector<NamedTensor<T>>& params) {
    if (ckpt.tensors.size() != params.size()) {
        throw ConfigError("checkpoint holds " + std::to_string(ckpt.tensors.size()) + " tensors, model expects " +
                          std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& src = ckpt.tensors[i];
        auto& dst = *params[i].tensor;
        if (src.name != params[i].name || src.shape != dst.shape) {
            throw ConfigError("checkpoint tensor " + src.name + shape_str(src.shape) + " does not match model tensor " +
                              params[i].name + shape_str(dst.shape));
        }
        for (std::size_t k = 0; k < dst.size(); ++k) dst.data[k] = static_cast<T>(src.data[k]);
    }
}

template Checkpoint snapshot<float>(const std::vector<NamedTensor<float>>&, nlohmann::json);
template Checkpoint snapshot<double>(const std::vector<NamedTensor<double>>&, nlohmann::json);
template void restore<float>(const Checkpoint&, const std::vector<NamedTensor<float>>&);
template void restore<double>(const Checkpoint&, const std::vector<NamedTensor<double>>&);

}  // namespace hrrpnet::neural
