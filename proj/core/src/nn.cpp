#include "preflab/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "preflab/errors.hpp"
#include "preflab/rng.hpp"

namespace preflab {

void MiniCnnConfig::validate() const {
    if (num_classes < 2) {
        throw InputError("MiniCnnConfig: num_classes must be >= 2, got " +
                         std::to_string(num_classes));
    }
    if (in_channels < 1) throw InputError("MiniCnnConfig: in_channels must be >= 1");
    if (channels.empty()) throw InputError("MiniCnnConfig: channels must be non-empty");
    int divisor = 1 << channels.size();
    if (input_side <= 0 || input_side % divisor != 0) {
        throw InputError("MiniCnnConfig: input_side " + std::to_string(input_side) +
                         " not divisible by 2^" + std::to_string(channels.size()));
    }
}

std::string MiniCnnConfig::to_text() const {
    std::ostringstream os;
    os << "input_side=" << input_side << ";in_channels=" << in_channels
       << ";channels=";
    for (std::size_t i = 0; i < channels.size(); ++i)
        os << (i ? "," : "") << channels[i];
    os << ";num_classes=" << num_classes << ";seed=" << seed;
    return os.str();
}

MiniCnnConfig MiniCnnConfig::from_text(const std::string& text) {
    MiniCnnConfig cfg;
    cfg.channels.clear();
    std::istringstream is(text);
    std::string field;
    while (std::getline(is, field, ';')) {
        auto eq = field.find('=');
        if (eq == std::string::npos)
            throw FormatError("MiniCnnConfig text: missing '=' in '" + field + "'");
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "input_side") cfg.input_side = std::stoi(val);
        else if (key == "in_channels") cfg.in_channels = std::stoi(val);
        else if (key == "num_classes") cfg.num_classes = std::stoi(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "channels") {
            std::istringstream cs(val);
            std::string tok;
            while (std::getline(cs, tok, ',')) cfg.channels.push_back(std::stoi(tok));
        } else {
            throw FormatError("MiniCnnConfig text: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

namespace {

Tensor kaiming_uniform(std::vector<int> shape, int fan_in, Rng& rng) {
    double bound = std::sqrt(6.0 / fan_in);
    Tensor t = Tensor::zeros(std::move(shape), /*requires_grad=*/true);
    for (float& v : t.data())
        v = static_cast<float>(rng.uniform(-bound, bound));
    return t;
}

}  // namespace

MiniCnn::MiniCnn(MiniCnnConfig config) : config_(std::move(config)) {
    config_.validate();
    Rng rng(derive_seed(config_.seed, 0xC0DE));
    int prev = config_.in_channels;
    for (int ch : config_.channels) {
        params_.push_back(kaiming_uniform({ch, prev, 3, 3}, prev * 9, rng));
        params_.push_back(Tensor::zeros({ch}, true));
        params_.push_back(kaiming_uniform({ch, ch, 3, 3}, ch * 9, rng));
        params_.push_back(Tensor::zeros({ch}, true));
        prev = ch;
    }
    params_.push_back(kaiming_uniform({config_.num_classes, prev}, prev, rng));
    params_.push_back(Tensor::zeros({config_.num_classes}, true));
}

Tensor MiniCnn::trunk(const Tensor& images) const {
    Tensor x = images;
    std::size_t p = 0;
    for (std::size_t b = 0; b < config_.channels.size(); ++b) {
        x = relu(add_channel_bias(conv2d(x, params_[p], 1, 1), params_[p + 1]));
        x = relu(add_channel_bias(conv2d(x, params_[p + 2], 1, 1), params_[p + 3]));
        x = maxpool2(x);
        p += 4;
    }
    return global_avg_pool(x);
}

Tensor MiniCnn::forward(const Tensor& images) const {
    Tensor feat = trunk(images);
    return linear(feat, params_[params_.size() - 2], params_.back());
}

Tensor MiniCnn::embed(const Tensor& images) const {
    NoGradGuard ng;
    return trunk(images);
}

std::vector<int> MiniCnn::predict(const Tensor& images) const {
    NoGradGuard ng;
    Tensor logits = forward(images);
    const int N = logits.dim(0), C = logits.dim(1);
    std::vector<int> out(N);
    for (int n = 0; n < N; ++n) {
        const float* row = logits.data().data() + static_cast<std::ptrdiff_t>(n) * C;
        int best = 0;
        for (int c = 1; c < C; ++c)
            if (row[c] > row[best]) best = c;
        out[n] = best;
    }
    return out;
}

namespace {

constexpr char kMagic[4] = {'P', 'L', 'A', 'B'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw FormatError("checkpoint: truncated u32");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void MiniCnn::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("checkpoint: cannot open for write: " + path.string());
    os.write(kMagic, 4);
    write_u32(os, kVersion);
    std::string cfg = config_.to_text();
    write_u32(os, static_cast<std::uint32_t>(cfg.size()));
    os.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    for (const Tensor& p : params_) {
        // float32 little-endian; this build targets little-endian hosts.
        os.write(reinterpret_cast<const char*>(p.data().data()),
                 static_cast<std::streamsize>(p.size() * sizeof(float)));
    }
    if (!os) throw IoError("checkpoint: write failed: " + path.string());
}

MiniCnn MiniCnn::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("checkpoint: cannot open: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("checkpoint: bad magic at byte 0: " + path.string());
    std::uint32_t version = read_u32(is);
    if (version != kVersion)
        throw FormatError("checkpoint: unsupported version " + std::to_string(version));
    std::uint32_t len = read_u32(is);
    std::string cfg_text(len, '\0');
    is.read(cfg_text.data(), len);
    if (!is) throw FormatError("checkpoint: truncated config text");
    MiniCnn model(MiniCnnConfig::from_text(cfg_text));
    for (Tensor& p : model.params_) {
        is.read(reinterpret_cast<char*>(p.data().data()),
                static_cast<std::streamsize>(p.size() * sizeof(float)));
        if (!is) throw FormatError("checkpoint: truncated parameter block");
    }
    return model;
}

}  // namespace preflab
