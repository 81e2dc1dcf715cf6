#include "docsource/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace docsource {
namespace {

constexpr char kMagic[5] = {'D', 'S', 'C', 'N', 'N'};
constexpr std::uint8_t kVersion = 1;

// Serialization assumes a little-endian host (checked at load/save time).
bool host_is_little_endian() {
    const std::uint16_t v = 1;
    std::uint8_t b;
    std::memcpy(&b, &v, 1);
    return b == 1;
}

struct Writer {
    std::vector<std::uint8_t> buf;

    template <typename T>
    void put(T v) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        buf.insert(buf.end(), p, p + sizeof(T));
    }
    void put_bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf.insert(buf.end(), b, b + n);
    }
};

struct Reader {
    const std::uint8_t* p;
    std::size_t left;

    template <typename T>
    T get() {
        if (left < sizeof(T)) throw BadFormat("truncated checkpoint file");
        T v;
        std::memcpy(&v, p, sizeof(T));
        p += sizeof(T);
        left -= sizeof(T);
        return v;
    }
    void get_bytes(void* dst, std::size_t n) {
        if (left < n) throw BadFormat("truncated checkpoint file");
        std::memcpy(dst, p, n);
        p += n;
        left -= n;
    }
};

} // namespace

Checkpoint Checkpoint::from_network(const Network& net, int epoch, double val_loss) {
    Checkpoint c;
    c.config = net.config;
    for (const Param* p : net.params()) c.param_blocks.emplace_back(p->name, p->value);
    for (const BatchNormLayer* bn : {&net.bn1, &net.bn2, &net.bn3}) {
        c.bn_running.push_back(bn->running_mean);
        c.bn_running.push_back(bn->running_var);
    }
    c.epoch = epoch;
    c.val_loss = val_loss;
    return c;
}

Network Checkpoint::to_network() const {
    Network net(config);
    auto params = net.params();
    if (param_blocks.size() != params.size() || bn_running.size() != 6)
        throw BadFormat("checkpoint block count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (param_blocks[i].second.size() != params[i]->value.size())
            throw BadFormat("checkpoint parameter size mismatch");
        params[i]->value = param_blocks[i].second;
    }
    BatchNormLayer* bns[3] = {&net.bn1, &net.bn2, &net.bn3};
    for (int i = 0; i < 3; ++i) {
        if (bn_running[2 * i].size() != config.conv_filters ||
            bn_running[2 * i + 1].size() != config.conv_filters)
            throw BadFormat("checkpoint running-stat size mismatch");
        bns[i]->running_mean = bn_running[2 * i];
        bns[i]->running_var = bn_running[2 * i + 1];
    }
    return net;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    if (!host_is_little_endian()) throw BadFormat("big-endian hosts unsupported");
    Writer w;
    w.put_bytes(kMagic, 5);
    w.put(kVersion);
    const NetworkConfig& c = ckpt.config;
    w.put<std::uint32_t>(std::uint32_t(c.patch_size));
    w.put<std::uint32_t>(std::uint32_t(c.class_count));
    w.put<std::uint32_t>(std::uint32_t(c.conv_filters));
    w.put<std::uint32_t>(std::uint32_t(c.kernel));
    w.put<std::uint32_t>(std::uint32_t(c.dense_units));
    w.put<std::uint32_t>(std::uint32_t(c.epochs));
    w.put<std::uint32_t>(std::uint32_t(c.batch_size));
    w.put<double>(c.lr0);
    w.put<double>(c.decay);
    w.put<std::uint64_t>(c.seed);
    w.put<double>(c.val_fraction);

    w.put<std::uint32_t>(std::uint32_t(ckpt.param_blocks.size()));
    for (const auto& [name, values] : ckpt.param_blocks) {
        w.put<std::uint16_t>(std::uint16_t(name.size()));
        w.put_bytes(name.data(), name.size());
        w.put<std::uint32_t>(1);
        w.put<std::uint32_t>(std::uint32_t(values.size()));
        w.put_bytes(values.data(), std::size_t(values.size()) * sizeof(double));
    }
    for (const auto& stats : ckpt.bn_running)
        w.put_bytes(stats.data(), std::size_t(stats.size()) * sizeof(double));
    w.put<std::uint32_t>(std::uint32_t(ckpt.epoch));
    w.put<double>(ckpt.val_loss);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(w.buf.data()), std::streamsize(w.buf.size()));
    if (!out) throw IoError("short write to " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    if (!host_is_little_endian()) throw BadFormat("big-endian hosts unsupported");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    Reader r{buf.data(), buf.size()};

    char magic[5];
    r.get_bytes(magic, 5);
    if (std::memcmp(magic, kMagic, 5) != 0) throw BadFormat("bad checkpoint magic");
    const auto version = r.get<std::uint8_t>();
    if (version != kVersion) throw VersionMismatch("unsupported checkpoint version");

    Checkpoint c;
    c.config.patch_size = int(r.get<std::uint32_t>());
    c.config.class_count = int(r.get<std::uint32_t>());
    c.config.conv_filters = int(r.get<std::uint32_t>());
    c.config.kernel = int(r.get<std::uint32_t>());
    c.config.dense_units = int(r.get<std::uint32_t>());
    c.config.epochs = int(r.get<std::uint32_t>());
    c.config.batch_size = int(r.get<std::uint32_t>());
    c.config.lr0 = r.get<double>();
    c.config.decay = r.get<double>();
    c.config.seed = r.get<std::uint64_t>();
    c.config.val_fraction = r.get<double>();

    const auto blocks = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < blocks; ++i) {
        const auto name_len = r.get<std::uint16_t>();
        std::string name(name_len, '\0');
        r.get_bytes(name.data(), name_len);
        const auto rank = r.get<std::uint32_t>();
        std::uint64_t total = 1;
        for (std::uint32_t d = 0; d < rank; ++d) total *= r.get<std::uint32_t>();
        const Eigen::Index len = Eigen::Index(total);
        Eigen::ArrayXd values(len);
        r.get_bytes(values.data(), std::size_t(total) * sizeof(double));
        c.param_blocks.emplace_back(std::move(name), std::move(values));
    }
    for (int i = 0; i < 6; ++i) {
        Eigen::ArrayXd stats(c.config.conv_filters);
        r.get_bytes(stats.data(), std::size_t(c.config.conv_filters) * sizeof(double));
        c.bn_running.push_back(std::move(stats));
    }
    c.epoch = int(r.get<std::uint32_t>());
    c.val_loss = r.get<double>();
    if (r.left != 0) throw BadFormat("trailing bytes in checkpoint file");
    return c;
}

} // namespace docsource
