#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "nfd/config.hpp"
#include "nfd/errors.hpp"
#include "nfd/io.hpp"

using namespace nfd;

TEST_CASE("config serialization round-trips the defaults") {
    RunConfig def;
    CHECK((parse_config(serialize_config(def)) == def));
    CHECK((parse_config("") == def));
}

TEST_CASE("config serialization round-trips non-default values") {
    RunConfig c;
    c.seed = 987654321;
    c.schedule.steps = 250;
    c.schedule.beta_start = 2.5e-4;
    c.schedule.beta_end = 0.0123456789012345;
    c.net.data_dim = 8;
    c.net.hidden = {64, 32, 16};
    c.data.noise_scale = 0.1 + 0.2;  // not exactly representable; %.17g must survive
    c.train.learning_rate = 3e-4;
    c.train.dropout = 1.0 / 3.0;
    c.contexts.normalize = false;
    c.sampler.mode = "ddpm";
    c.sampler.steps = 1000;
    c.sampler.guidance = 0.0;
    c.sample.identities = 5;
    c.eval.pairing = "sampled";
    c.eval.impostor_pairs = 3000000000ll;
    c.eval.folds = 2;
    c.run.parallel = false;
    RunConfig back = parse_config(serialize_config(c));
    CHECK((back == c));
    CHECK(back.data.noise_scale == c.data.noise_scale);  // bit-equal doubles
}

TEST_CASE("parsing tolerates comments, blanks, and spacing") {
    RunConfig got = parse_config(
        "# a comment\n"
        "\n"
        "  seed=42  \n"
        "train.epochs   =   3\n"
        "\t# indented comment\n"
        "net.hidden = 64, 32\n"
        "contexts.normalize = false\n");
    CHECK(got.seed == 42);
    CHECK(got.train.epochs == 3);
    CHECK((got.net.hidden == std::vector<int>{64, 32}));
    CHECK(got.contexts.normalize == false);
}

TEST_CASE("parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_config("sampler.step = 9\n"), ConfigError);  // typo
    CHECK_THROWS_AS(parse_config("just some words\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("= 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("train.epochs = soon\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("run.parallel = yes\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schedule.beta_end = big\n"), ConfigError);
}

TEST_CASE("overrides mutate single keys in order") {
    RunConfig c;
    apply_override(c, "train.epochs=7");
    apply_override(c, "sampler.guidance = 1.25");
    apply_override(c, "sampler.mode=ddpm");
    apply_override(c, "net.hidden=32");
    CHECK(c.train.epochs == 7);
    CHECK(c.sampler.guidance == 1.25);
    CHECK(c.sampler.mode == "ddpm");
    CHECK(c.net.hidden == std::vector<int>{32});

    apply_override(c, "train.epochs=9");
    CHECK(c.train.epochs == 9);

    CHECK_THROWS_AS(apply_override(c, "nonsense.key=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "train.epochs"), ConfigError);
}

TEST_CASE("config files load through the same parser") {
    RunConfig c;
    c.eval.impostor_pairs = 123456789012;
    c.eval.pairing = "sampled";
    std::string path = "nfd_test_config.cfg";
    write_text_file(path, serialize_config(c));
    RunConfig got = load_config_file(path);
    CHECK((got == c));
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config_file("does_not_exist.cfg"), IoError);
}

namespace {

GeneratedDataset tiny_dataset() {
    GeneratedDataset ds;
    ds.header.identities = 2;
    ds.header.per_identity = 3;
    ds.header.dim = 2;
    ds.header.strategy = Strategy::far_neg;
    ds.header.mode = SamplerMode::ddim;
    ds.header.steps = 200;
    ds.header.guidance_w = 0.5f;
    ds.header.seed = 0xdeadbeefcafe1234ull;
    ds.payload = {0.1f, -0.2f, 0.3f, -0.0f, 1e-30f, 2.5f,
                  -1.0f, 0.0f, 0.25f, 0.125f, -0.75f, 3.5f};
    return ds;
}

}  // namespace

TEST_CASE("dataset container round-trips bit-exactly") {
    GeneratedDataset ds = tiny_dataset();
    std::vector<uint8_t> bytes = encode_dataset(ds);
    // 4 magic + 6*u32 + f32 + u64 = 40 header bytes
    CHECK(bytes.size() == 40 + 4 * ds.payload.size());
    CHECK(bytes[0] == 'N');
    CHECK(bytes[1] == 'F');
    CHECK(bytes[2] == 'D');
    CHECK(bytes[3] == '1');
    CHECK(bytes[4] == 2);  // identities, little-endian

    GeneratedDataset back = decode_dataset(bytes);
    CHECK(back.header.identities == ds.header.identities);
    CHECK(back.header.per_identity == ds.header.per_identity);
    CHECK(back.header.dim == ds.header.dim);
    CHECK(back.header.strategy == ds.header.strategy);
    CHECK(back.header.mode == ds.header.mode);
    CHECK(back.header.steps == ds.header.steps);
    CHECK(back.header.guidance_w == ds.header.guidance_w);
    CHECK(back.header.seed == ds.header.seed);
    CHECK(back.payload == ds.payload);
    CHECK(encode_dataset(back) == bytes);

    std::string path = "nfd_test_roundtrip.nfd";
    write_dataset(path, ds);
    GeneratedDataset from_disk = read_dataset(path);
    CHECK(encode_dataset(from_disk) == bytes);
    std::remove(path.c_str());
}

TEST_CASE("dataset decoding rejects corrupted containers") {
    GeneratedDataset ds = tiny_dataset();
    std::vector<uint8_t> bytes = encode_dataset(ds);

    std::vector<uint8_t> bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_dataset(bad_magic), IoError);

    std::vector<uint8_t> truncated(bytes.begin(), bytes.end() - 3);
    CHECK_THROWS_AS(decode_dataset(truncated), IoError);

    std::vector<uint8_t> trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_dataset(trailing), IoError);

    std::vector<uint8_t> bad_strategy = bytes;
    bad_strategy[16] = 6;  // one past the last valid enum value
    CHECK_THROWS_AS(decode_dataset(bad_strategy), IoError);

    std::vector<uint8_t> bad_mode = bytes;
    bad_mode[20] = 3;
    CHECK_THROWS_AS(decode_dataset(bad_mode), IoError);

    std::vector<uint8_t> empty_layout = bytes;
    empty_layout[4] = 0;
    CHECK_THROWS_AS(decode_dataset(empty_layout), IoError);

    GeneratedDataset mismatched = ds;
    mismatched.payload.pop_back();
    CHECK_THROWS_AS(encode_dataset(mismatched), ShapeError);
}

TEST_CASE("checkpoint container round-trips bit-exactly") {
    DenoiserConfig cfg;
    cfg.data_dim = 4;
    cfg.cond_dim = 3;
    cfg.time_dim = 6;
    cfg.hidden_dims = {10, 7};
    Checkpoint ck;
    ck.T = 500;
    ck.beta_start = 1e-4;
    ck.beta_end = 0.02;
    ck.net = Denoiser::init(cfg, 2024);
    ck.net.layers[0].b[0] = -0.0;  // sign bit must survive

    std::vector<uint8_t> bytes = encode_checkpoint(ck);
    Checkpoint back = decode_checkpoint(bytes);
    CHECK(back.T == 500);
    CHECK(back.beta_start == 1e-4);
    CHECK(back.beta_end == 0.02);
    CHECK((back.net.config == cfg));
    REQUIRE(back.net.layers.size() == ck.net.layers.size());
    for (std::size_t i = 0; i < ck.net.layers.size(); ++i) {
        CHECK(back.net.layers[i].w == ck.net.layers[i].w);
        CHECK(back.net.layers[i].b == ck.net.layers[i].b);
    }
    CHECK(std::signbit(back.net.layers[0].b[0]));
    CHECK(encode_checkpoint(back) == bytes);

    std::string path = "nfd_test_roundtrip.nfdc";
    write_checkpoint(path, ck);
    CHECK(encode_checkpoint(read_checkpoint(path)) == bytes);
    std::remove(path.c_str());
}

TEST_CASE("checkpoint decoding rejects corrupted containers") {
    DenoiserConfig cfg;
    cfg.hidden_dims = {8};
    Checkpoint ck;
    ck.T = 100;
    ck.beta_start = 1e-4;
    ck.beta_end = 0.02;
    ck.net = Denoiser::init(cfg, 1);
    std::vector<uint8_t> bytes = encode_checkpoint(ck);

    std::vector<uint8_t> bad_magic = bytes;
    bad_magic[3] = 'X';
    CHECK_THROWS_AS(decode_checkpoint(bad_magic), CheckpointError);

    std::vector<uint8_t> bad_version = bytes;
    bad_version[4] = 9;
    CHECK_THROWS_AS(decode_checkpoint(bad_version), CheckpointError);

    std::vector<uint8_t> truncated(bytes.begin(), bytes.end() - 8);
    CHECK_THROWS_AS(decode_checkpoint(truncated), CheckpointError);

    std::vector<uint8_t> trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_checkpoint(trailing), CheckpointError);
}

TEST_CASE("fixed formatting always prints six decimals") {
    CHECK(format_fixed(0.5) == "0.500000");
    CHECK(format_fixed(-1.25) == "-1.250000");
    CHECK(format_fixed(1e-7) == "0.000000");
    CHECK(format_fixed(123.4567894) == "123.456789");
    CHECK(format_fixed(0.0) == "0.000000");
}

TEST_CASE("metrics table golden output") {
    Metrics m;
    m.eer = {0.05, 0.42};
    m.fmr100 = {0.1, 0.6};
    m.fmr1000 = {0.2, 0.7};
    m.fdr = 3.5;
    m.stats = {0.8, 0.1, 0.2, 0.15};
    CHECK(metrics_csv(m, std::nullopt) ==
          "metric,value\n"
          "eer,0.050000\n"
          "eer_threshold,0.420000\n"
          "fmr100,0.100000\n"
          "fmr100_threshold,0.600000\n"
          "fmr1000,0.200000\n"
          "fmr1000_threshold,0.700000\n"
          "fdr,3.500000\n"
          "genuine_mean,0.800000\n"
          "genuine_std,0.100000\n"
          "impostor_mean,0.200000\n"
          "impostor_std,0.150000\n");
    std::string with_folds = metrics_csv(m, 93.25);
    CHECK(with_folds.find("fold_accuracy,93.250000\n") != std::string::npos);
}

TEST_CASE("histogram table golden output") {
    CHECK(histogram_csv({3, 0, 7}, 0.0, 3.0) ==
          "bin_lo,bin_hi,count\n"
          "0.000000,1.000000,3\n"
          "1.000000,2.000000,0\n"
          "2.000000,3.000000,7\n");
}

TEST_CASE("bias table golden output") {
    BiasReport r;
    r.accuracies = {91.0, 93.0};
    r.average = 92.0;
    r.stddev = 1.4142135623730951;
    r.ser = 1.2857142857142858;
    CHECK(bias_csv(r) ==
          "metric,value\n"
          "accuracy_0,91.000000\n"
          "accuracy_1,93.000000\n"
          "average,92.000000\n"
          "stddev,1.414214\n"
          "ser,1.285714\n");
}

TEST_CASE("report table golden output") {
    ReportRow row;
    row.name = "far.nfd";
    row.strategy = Strategy::far_neg;
    row.guidance_w = 0.5;
    row.metrics.eer = {0.01, 0.3};
    row.metrics.fmr100 = {0.02, 0.4};
    row.metrics.fmr1000 = {0.03, 0.5};
    row.metrics.fdr = 12.0;
    row.metrics.stats = {0.9, 0.05, 0.1, 0.2};
    CHECK(report_tsv({row}) ==
          "dataset\tstrategy\tw\teer\tfmr100\tfmr1000\tfdr"
          "\tgenuine_mean\tgenuine_std\timpostor_mean\timpostor_std\n"
          "far.nfd\tfar\t0.500000\t0.010000\t0.020000\t0.030000\t12.000000"
          "\t0.900000\t0.050000\t0.100000\t0.200000\n");
}
