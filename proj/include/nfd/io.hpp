#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nfd/biometrics.hpp"
#include "nfd/contexts.hpp"
#include "nfd/denoiser.hpp"
#include "nfd/sampler.hpp"

namespace nfd {

// Binary vector container, magic "NFD1". Little-endian layout:
//   magic[4] | u32 identities | u32 per_identity | u32 dim
//   | u32 strategy | u32 sampler_mode | u32 steps | f32 guidance_w | u64 seed
//   | f32 payload, row-major, ordered by (identity, sample)
struct DatasetHeader {
    uint32_t identities = 0;
    uint32_t per_identity = 0;
    uint32_t dim = 0;
    Strategy strategy = Strategy::baseline;
    SamplerMode mode = SamplerMode::none;
    uint32_t steps = 0;
    float guidance_w = 0.0f;
    uint64_t seed = 0;
};

struct GeneratedDataset {
    DatasetHeader header;
    std::vector<float> payload;

    std::size_t rows() const {
        return static_cast<std::size_t>(header.identities) * header.per_identity;
    }
};

std::vector<uint8_t> encode_dataset(const GeneratedDataset& ds);
GeneratedDataset decode_dataset(const std::vector<uint8_t>& bytes);
void write_dataset(const std::string& path, const GeneratedDataset& ds);
GeneratedDataset read_dataset(const std::string& path);

// Model checkpoint, magic "NFDC": schedule parameters plus every weight as
// little-endian f64. Writing and reading round-trip bit-exactly.
struct Checkpoint {
    int T = 0;
    double beta_start = 0.0;
    double beta_end = 0.0;
    Denoiser net;
};

std::vector<uint8_t> encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(const std::vector<uint8_t>& bytes);
void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);

// Plain byte-level file helpers.
std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const void* data, std::size_t size);
void write_text_file(const std::string& path, const std::string& text);

// Fixed 6-decimal formatting shared by every exported table.
std::string format_fixed(double v);

// metric,value rows; fold accuracy appended when present.
std::string metrics_csv(const Metrics& m, std::optional<double> fold_acc);

// bin_lo,bin_hi,count rows over an equal-width partition of [lo, hi].
std::string histogram_csv(const std::vector<int64_t>& counts, double lo, double hi);

std::string bias_csv(const BiasReport& report);

struct ReportRow {
    std::string name;
    Strategy strategy = Strategy::baseline;
    double guidance_w = 0.0;
    Metrics metrics;
};

// Tab-separated comparison table, one row per dataset.
std::string report_tsv(const std::vector<ReportRow>& rows);

}  // namespace nfd
