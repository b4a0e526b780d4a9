#include "nfd/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "nfd/errors.hpp"

namespace nfd {

namespace {

constexpr char kDatasetMagic[4] = {'N', 'F', 'D', '1'};
constexpr char kCheckpointMagic[4] = {'N', 'F', 'D', 'C'};
constexpr uint32_t kCheckpointVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v));
    put_u32(out, static_cast<uint32_t>(v >> 32));
}

void put_f32(std::vector<uint8_t>& out, float v) {
    put_u32(out, std::bit_cast<uint32_t>(v));
}

void put_f64(std::vector<uint8_t>& out, double v) {
    put_u64(out, std::bit_cast<uint64_t>(v));
}

struct Reader {
    const std::vector<uint8_t>& bytes;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > bytes.size()) throw IoError("file is truncated");
    }
    uint32_t u32() {
        need(4);
        uint32_t v = static_cast<uint32_t>(bytes[pos]) |
                     (static_cast<uint32_t>(bytes[pos + 1]) << 8) |
                     (static_cast<uint32_t>(bytes[pos + 2]) << 16) |
                     (static_cast<uint32_t>(bytes[pos + 3]) << 24);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        uint64_t lo = u32();
        uint64_t hi = u32();
        return lo | (hi << 32);
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    void magic(const char expect[4], const char* what) {
        need(4);
        if (std::memcmp(bytes.data() + pos, expect, 4) != 0) {
            throw IoError(std::string("bad magic for ") + what);
        }
        pos += 4;
    }
    void done() const {
        if (pos != bytes.size()) throw IoError("trailing bytes after payload");
    }
};

}  // namespace

std::vector<uint8_t> encode_dataset(const GeneratedDataset& ds) {
    const DatasetHeader& h = ds.header;
    std::size_t expect = static_cast<std::size_t>(h.identities) * h.per_identity * h.dim;
    if (ds.payload.size() != expect) {
        throw ShapeError("dataset payload does not match its header");
    }
    std::vector<uint8_t> out;
    out.reserve(36 + 4 * ds.payload.size());
    out.insert(out.end(), kDatasetMagic, kDatasetMagic + 4);
    put_u32(out, h.identities);
    put_u32(out, h.per_identity);
    put_u32(out, h.dim);
    put_u32(out, static_cast<uint32_t>(h.strategy));
    put_u32(out, static_cast<uint32_t>(h.mode));
    put_u32(out, h.steps);
    put_f32(out, h.guidance_w);
    put_u64(out, h.seed);
    for (float v : ds.payload) put_f32(out, v);
    return out;
}

GeneratedDataset decode_dataset(const std::vector<uint8_t>& bytes) {
    Reader r{bytes};
    r.magic(kDatasetMagic, "dataset");
    GeneratedDataset ds;
    DatasetHeader& h = ds.header;
    h.identities = r.u32();
    h.per_identity = r.u32();
    h.dim = r.u32();
    uint32_t strategy = r.u32();
    if (strategy > static_cast<uint32_t>(Strategy::null_neg)) {
        throw IoError("dataset header carries an unknown strategy");
    }
    h.strategy = static_cast<Strategy>(strategy);
    uint32_t mode = r.u32();
    if (mode > static_cast<uint32_t>(SamplerMode::ddim)) {
        throw IoError("dataset header carries an unknown sampler mode");
    }
    h.mode = static_cast<SamplerMode>(mode);
    h.steps = r.u32();
    h.guidance_w = r.f32();
    h.seed = r.u64();
    if (h.identities == 0 || h.per_identity == 0 || h.dim == 0) {
        throw IoError("dataset header declares an empty layout");
    }

    std::size_t count = static_cast<std::size_t>(h.identities) * h.per_identity * h.dim;
    ds.payload.resize(count);
    for (std::size_t i = 0; i < count; ++i) ds.payload[i] = r.f32();
    r.done();
    return ds;
}

void write_dataset(const std::string& path, const GeneratedDataset& ds) {
    std::vector<uint8_t> bytes = encode_dataset(ds);
    write_file(path, bytes.data(), bytes.size());
}

GeneratedDataset read_dataset(const std::string& path) {
    return decode_dataset(read_file(path));
}

std::vector<uint8_t> encode_checkpoint(const Checkpoint& ck) {
    std::vector<uint8_t> out;
    out.insert(out.end(), kCheckpointMagic, kCheckpointMagic + 4);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<uint32_t>(ck.T));
    put_f64(out, ck.beta_start);
    put_f64(out, ck.beta_end);
    const DenoiserConfig& cfg = ck.net.config;
    put_u32(out, static_cast<uint32_t>(cfg.data_dim));
    put_u32(out, static_cast<uint32_t>(cfg.cond_dim));
    put_u32(out, static_cast<uint32_t>(cfg.time_dim));
    put_u32(out, static_cast<uint32_t>(cfg.hidden_dims.size()));
    for (int h : cfg.hidden_dims) put_u32(out, static_cast<uint32_t>(h));
    for (const Dense& layer : ck.net.layers) {
        for (double w : layer.w) put_f64(out, w);
        for (double b : layer.b) put_f64(out, b);
    }
    return out;
}

Checkpoint decode_checkpoint(const std::vector<uint8_t>& bytes) {
    Reader r{bytes};
    try {
        r.magic(kCheckpointMagic, "checkpoint");
    } catch (const IoError& e) {
        throw CheckpointError(e.what());
    }
    if (r.u32() != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version");
    }

    Checkpoint ck;
    ck.T = static_cast<int>(r.u32());
    ck.beta_start = r.f64();
    ck.beta_end = r.f64();
    DenoiserConfig cfg;
    cfg.data_dim = static_cast<int>(r.u32());
    cfg.cond_dim = static_cast<int>(r.u32());
    cfg.time_dim = static_cast<int>(r.u32());
    uint32_t n_hidden = r.u32();
    if (n_hidden > 64) throw CheckpointError("implausible hidden layer count");
    cfg.hidden_dims.clear();
    for (uint32_t i = 0; i < n_hidden; ++i) {
        cfg.hidden_dims.push_back(static_cast<int>(r.u32()));
    }

    try {
        ck.net = Denoiser::init(cfg, 0);
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint config invalid: ") + e.what());
    }
    try {
        for (Dense& layer : ck.net.layers) {
            for (double& w : layer.w) w = r.f64();
            for (double& b : layer.b) b = r.f64();
        }
        r.done();
    } catch (const IoError& e) {
        throw CheckpointError(e.what());
    }
    return ck;
}

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
    std::vector<uint8_t> bytes = encode_checkpoint(ck);
    write_file(path, bytes.data(), bytes.size());
}

Checkpoint read_checkpoint(const std::string& path) {
    return decode_checkpoint(read_file(path));
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return bytes;
}

void write_file(const std::string& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_text_file(const std::string& path, const std::string& text) {
    write_file(path, text.data(), text.size());
}

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string metrics_csv(const Metrics& m, std::optional<double> fold_acc) {
    std::string out = "metric,value\n";
    auto row = [&](const char* name, double v) {
        out += name;
        out += ',';
        out += format_fixed(v);
        out += '\n';
    };
    row("eer", m.eer.value);
    row("eer_threshold", m.eer.threshold);
    row("fmr100", m.fmr100.value);
    row("fmr100_threshold", m.fmr100.threshold);
    row("fmr1000", m.fmr1000.value);
    row("fmr1000_threshold", m.fmr1000.threshold);
    row("fdr", m.fdr);
    row("genuine_mean", m.stats.genuine_mean);
    row("genuine_std", m.stats.genuine_std);
    row("impostor_mean", m.stats.impostor_mean);
    row("impostor_std", m.stats.impostor_std);
    if (fold_acc.has_value()) row("fold_accuracy", *fold_acc);
    return out;
}

std::string histogram_csv(const std::vector<int64_t>& counts, double lo, double hi) {
    std::string out = "bin_lo,bin_hi,count\n";
    const int bins = static_cast<int>(counts.size());
    const double width = (hi - lo) / bins;
    for (int i = 0; i < bins; ++i) {
        out += format_fixed(lo + width * i);
        out += ',';
        out += format_fixed((i + 1 == bins) ? hi : lo + width * (i + 1));
        out += ',';
        out += std::to_string(counts[i]);
        out += '\n';
    }
    return out;
}

std::string bias_csv(const BiasReport& report) {
    std::string out = "metric,value\n";
    for (std::size_t i = 0; i < report.accuracies.size(); ++i) {
        out += "accuracy_" + std::to_string(i) + "," +
               format_fixed(report.accuracies[i]) + "\n";
    }
    out += "average," + format_fixed(report.average) + "\n";
    out += "stddev," + format_fixed(report.stddev) + "\n";
    out += "ser," + format_fixed(report.ser) + "\n";
    return out;
}

std::string report_tsv(const std::vector<ReportRow>& rows) {
    std::string out =
        "dataset\tstrategy\tw\teer\tfmr100\tfmr1000\tfdr"
        "\tgenuine_mean\tgenuine_std\timpostor_mean\timpostor_std\n";
    for (const ReportRow& r : rows) {
        out += r.name;
        out += '\t';
        out += strategy_name(r.strategy);
        out += '\t';
        out += format_fixed(r.guidance_w);
        for (double v : {r.metrics.eer.value, r.metrics.fmr100.value,
                         r.metrics.fmr1000.value, r.metrics.fdr,
                         r.metrics.stats.genuine_mean, r.metrics.stats.genuine_std,
                         r.metrics.stats.impostor_mean, r.metrics.stats.impostor_std}) {
            out += '\t';
            out += format_fixed(v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace nfd
