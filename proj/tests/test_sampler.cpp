#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "nfd/errors.hpp"
#include "nfd/sampler.hpp"
#include "nfd/schedule.hpp"

using namespace nfd;

TEST_CASE("mode names round-trip") {
    for (SamplerMode m : {SamplerMode::none, SamplerMode::ddpm, SamplerMode::ddim}) {
        CHECK(parse_sampler_mode(sampler_mode_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_sampler_mode("euler"), ConfigError);
}

TEST_CASE("forward diffusion mixes signal and noise by alpha_bar") {
    Schedule s = build_schedule(2, 0.1, 0.2);
    std::vector<double> x0 = {1.0, 2.0};
    std::vector<double> eps = {0.5, -0.5};
    std::vector<double> x1 = forward_diffuse(x0, 1, eps, s);
    CHECK(x1[0] == doctest::Approx(std::sqrt(0.9) * 1.0 + std::sqrt(0.1) * 0.5)
                       .epsilon(1e-15));
    CHECK(x1[1] == doctest::Approx(std::sqrt(0.9) * 2.0 - std::sqrt(0.1) * 0.5)
                       .epsilon(1e-15));
    std::vector<double> bad = {1.0};
    CHECK_THROWS_AS(forward_diffuse(bad, 1, eps, s), ShapeError);
}

TEST_CASE("guided prediction combines exactly two evaluations") {
    int evals = 0;
    auto predict = [&](std::span<const double> x, int t,
                       std::span<const double> p) {
        (void)x;
        (void)t;
        ++evals;
        return std::vector<double>(p.begin(), p.end());
    };
    std::vector<double> x = {0.0};
    std::vector<double> pos = {1.0, 0.0};
    std::vector<double> neg = {0.0, 1.0};

    std::vector<double> out = guided_eps(predict, x, 5, pos, neg, 2.0);
    CHECK(evals == 2);
    CHECK(out[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(-2.0).epsilon(1e-15));

    evals = 0;
    std::vector<double> at_zero = guided_eps(predict, x, 5, pos, neg, 0.0);
    CHECK(evals == 2);  // zero weight must not skip the negative branch
    CHECK(at_zero[0] == 1.0);
    CHECK(at_zero[1] == 0.0);
}

TEST_CASE("ancestral steps reproduce a hand-computed two-step rollout") {
    Schedule s = build_schedule(2, 0.1, 0.2);
    ChainState state;
    state.x = {1.0, -1.0};
    state.t = 2;
    std::vector<double> eps = {0.2, 0.3};
    std::vector<double> zeta = {0.5, -0.5};

    ChainState mid = ddpm_step(state, eps, s, &zeta);
    CHECK(mid.t == 1);
    CHECK(mid.x[0] == doctest::Approx(1.257125361027022).epsilon(1e-12));
    CHECK(mid.x[1] == doctest::Approx(-1.4684139247091512).epsilon(1e-12));

    ChainState fin = ddpm_step(mid, eps, s, nullptr);
    CHECK(fin.t == 0);
    CHECK(fin.x[0] == doctest::Approx(1.2584598150689537).epsilon(1e-12));
    CHECK(fin.x[1] == doctest::Approx(-1.6478441833293074).epsilon(1e-12));
}

TEST_CASE("ancestral step with zero inputs divides by sqrt(alpha)") {
    Schedule s = build_schedule(5, 0.1, 0.3);
    ChainState state;
    state.x = {2.0, -4.0};
    state.t = 3;
    std::vector<double> eps = {0.0, 0.0};
    std::vector<double> zeta = {0.0, 0.0};
    ChainState next = ddpm_step(state, eps, s, &zeta);
    double inv = 1.0 / std::sqrt(s.alpha(3));
    CHECK(next.x[0] == doctest::Approx(2.0 * inv).epsilon(1e-15));
    CHECK(next.x[1] == doctest::Approx(-4.0 * inv).epsilon(1e-15));
}

TEST_CASE("noise draw presence is enforced in both directions") {
    Schedule s = build_schedule(5, 0.1, 0.3);
    ChainState state;
    state.x = {0.0};
    std::vector<double> eps = {0.0};
    std::vector<double> zeta = {0.0};

    state.t = 3;
    CHECK_THROWS_AS(ddpm_step(state, eps, s, nullptr), NoiseStreamError);
    state.t = 1;
    CHECK_THROWS_AS(ddpm_step(state, eps, s, &zeta), NoiseStreamError);
    CHECK_NOTHROW(ddpm_step(state, eps, s, nullptr));

    state.t = 2;
    std::vector<double> wide = {0.0, 0.0};
    CHECK_THROWS_AS(ddpm_step(state, eps, s, &wide), ShapeError);
}

TEST_CASE("deterministic step inverts forward diffusion when eps is exact") {
    Schedule s = build_schedule(2, 0.1, 0.2);
    ChainState state;
    state.x = {0.38684600678038666, -0.3293945650902409};  // diffuse({0.3,-0.7}) at t=2
    state.t = 2;
    std::vector<double> eps = {0.25, 0.5};

    ChainState mid = ddim_step(state, eps, s, 1);
    CHECK(mid.x[0] == doctest::Approx(0.3636619309193636).epsilon(1e-12));
    CHECK(mid.x[1] == doctest::Approx(-0.5059644256269407).epsilon(1e-12));

    ChainState done = ddim_step(state, eps, s, 0);
    CHECK(done.t == 0);
    CHECK(done.x[0] == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(done.x[1] == doctest::Approx(-0.7).epsilon(1e-10));
}

TEST_CASE("deterministic step validates target step") {
    Schedule s = build_schedule(10, 0.1, 0.2);
    ChainState state;
    state.x = {0.0};
    state.t = 5;
    std::vector<double> eps = {0.0};
    CHECK_THROWS_AS(ddim_step(state, eps, s, 5), StepRangeError);
    CHECK_THROWS_AS(ddim_step(state, eps, s, 7), StepRangeError);
    CHECK_THROWS_AS(ddim_step(state, eps, s, -1), StepRangeError);
    CHECK_NOTHROW(ddim_step(state, eps, s, 4));
    CHECK_NOTHROW(ddim_step(state, eps, s, 0));
}

TEST_CASE("timestep ladder is the ceiling grid") {
    CHECK(ddim_timesteps(5, 1000) == std::vector<int>{200, 400, 600, 800, 1000});
    CHECK(ddim_timesteps(3, 10) == std::vector<int>{4, 7, 10});
    CHECK(ddim_timesteps(1, 7) == std::vector<int>{7});

    std::vector<int> full = ddim_timesteps(1000, 1000);
    REQUIRE(full.size() == 1000);
    for (int i = 0; i < 1000; ++i) CHECK(full[i] == i + 1);

    // always ends at T, always strictly ascending
    for (int S : {1, 2, 3, 7, 64, 199, 200, 999}) {
        std::vector<int> taus = ddim_timesteps(S, 1000);
        CHECK(taus.back() == 1000);
        CHECK(taus.front() >= 1);
        for (std::size_t i = 1; i < taus.size(); ++i) CHECK(taus[i] > taus[i - 1]);
    }

    CHECK_THROWS_AS(ddim_timesteps(0, 1000), ConfigError);
    CHECK_THROWS_AS(ddim_timesteps(1001, 1000), ConfigError);
}

namespace {

Denoiser tiny_net(uint64_t seed) {
    DenoiserConfig cfg;
    cfg.data_dim = 4;
    cfg.cond_dim = 4;
    cfg.time_dim = 8;
    cfg.hidden_dims = {16};
    return Denoiser::init(cfg, seed);
}

}  // namespace

TEST_CASE("zero guidance with a negative equals the unguided chain bitwise") {
    Denoiser net = tiny_net(17);
    Schedule s = build_schedule(50, 1e-4, 0.02);
    std::vector<double> pos = {0.5, -0.5, 0.25, 0.1};
    std::vector<double> neg = {-0.5, 0.5, 0.3, -0.2};

    for (SamplerMode mode : {SamplerMode::ddim, SamplerMode::ddpm}) {
        SamplerOptions opts;
        opts.mode = mode;
        opts.steps = (mode == SamplerMode::ddpm) ? 50 : 10;
        opts.guidance_w = 0.0;
        opts.seed = 5;
        std::vector<double> with = run_chain(net, s, pos, &neg, opts, 1, 2);
        std::vector<double> without = run_chain(net, s, pos, nullptr, opts, 1, 2);
        CHECK(with == without);
    }
}

TEST_CASE("nonzero guidance changes the outcome") {
    Denoiser net = tiny_net(17);
    Schedule s = build_schedule(50, 1e-4, 0.02);
    std::vector<double> pos = {0.5, -0.5, 0.25, 0.1};
    std::vector<double> neg = {-0.5, 0.5, 0.3, -0.2};
    SamplerOptions opts;
    opts.steps = 10;
    opts.guidance_w = 0.5;
    opts.seed = 5;
    std::vector<double> guided = run_chain(net, s, pos, &neg, opts, 1, 2);
    std::vector<double> plain = run_chain(net, s, pos, nullptr, opts, 1, 2);
    CHECK(guided != plain);
}

TEST_CASE("ancestral mode insists on the full schedule length") {
    Denoiser net = tiny_net(3);
    Schedule s = build_schedule(50, 1e-4, 0.02);
    std::vector<double> pos(4, 0.1);
    SamplerOptions opts;
    opts.mode = SamplerMode::ddpm;
    opts.steps = 10;
    CHECK_THROWS_AS(run_chain(net, s, pos, nullptr, opts, 0, 0), ConfigError);
    opts.steps = 50;
    CHECK_NOTHROW(run_chain(net, s, pos, nullptr, opts, 0, 0));
}

TEST_CASE("mode none cannot run a chain") {
    Denoiser net = tiny_net(3);
    Schedule s = build_schedule(10, 1e-4, 0.02);
    std::vector<double> pos(4, 0.1);
    SamplerOptions opts;
    opts.mode = SamplerMode::none;
    CHECK_THROWS_AS(run_chain(net, s, pos, nullptr, opts, 0, 0), ConfigError);
}

TEST_CASE("corrupt parameters are rejected before sampling") {
    Denoiser net = tiny_net(3);
    net.layers[0].w[0] = std::nan("");
    Schedule s = build_schedule(10, 1e-4, 0.02);
    std::vector<double> pos(4, 0.1);
    SamplerOptions opts;
    opts.steps = 5;
    CHECK_THROWS_AS(run_chain(net, s, pos, nullptr, opts, 0, 0), CheckpointError);
}

TEST_CASE("chains depend only on (seed, identity, sample)") {
    Denoiser net = tiny_net(29);
    Schedule s = build_schedule(40, 1e-4, 0.02);
    std::vector<double> pos(4, 0.2);
    SamplerOptions opts;
    opts.steps = 8;
    opts.seed = 11;

    std::vector<double> direct = run_chain(net, s, pos, nullptr, opts, 3, 5);
    std::vector<std::vector<double>> batch =
        sample_identity(net, s, pos, nullptr, opts, 3, 6);
    CHECK(batch.size() == 6);
    CHECK(batch[5] == direct);

    // distinct cells get distinct noise
    CHECK(batch[4] != batch[5]);
    std::vector<double> other_id = run_chain(net, s, pos, nullptr, opts, 4, 5);
    CHECK(other_id != direct);
    SamplerOptions reseeded = opts;
    reseeded.seed = 12;
    CHECK(run_chain(net, s, pos, nullptr, reseeded, 3, 5) != direct);
}

TEST_CASE("generation layout and policy equivalence") {
    Denoiser net = tiny_net(41);
    Schedule s = build_schedule(40, 1e-4, 0.02);
    std::vector<std::vector<double>> positives = {
        {0.5, 0.0, 0.0, 0.5}, {0.0, 0.5, -0.5, 0.0}, {-0.5, 0.5, 0.0, 0.0}};
    std::vector<std::vector<double>> negatives = {
        {0.0, 0.1, 0.2, 0.3}, {0.3, 0.2, 0.1, 0.0}, {0.1, 0.1, 0.1, 0.1}};
    SamplerOptions opts;
    opts.steps = 8;
    opts.seed = 2;
    const int per = 4;

    std::vector<double> serial = generate_matrix(net, s, positives, &negatives, opts,
                                                 per, ExecPolicy::serial);
    std::vector<double> parallel = generate_matrix(net, s, positives, &negatives,
                                                   opts, per, ExecPolicy::parallel);
    CHECK(serial == parallel);
    REQUIRE(serial.size() == 3u * per * 4);

    for (int id = 0; id < 3; ++id) {
        for (int k = 0; k < per; ++k) {
            std::vector<double> cell = run_chain(net, s, positives[id],
                                                 &negatives[id], opts,
                                                 static_cast<uint32_t>(id),
                                                 static_cast<uint32_t>(k));
            for (int c = 0; c < 4; ++c) {
                CHECK(serial[(static_cast<std::size_t>(id) * per + k) * 4 + c] ==
                      cell[c]);
            }
        }
    }
}

TEST_CASE("generation validates inputs") {
    Denoiser net = tiny_net(1);
    Schedule s = build_schedule(10, 1e-4, 0.02);
    std::vector<std::vector<double>> positives = {{0.1, 0.1, 0.1, 0.1}};
    std::vector<std::vector<double>> short_negs;
    SamplerOptions opts;
    opts.steps = 5;
    CHECK_THROWS_AS(generate_matrix(net, s, {}, nullptr, opts, 2, ExecPolicy::serial),
                    InputError);
    CHECK_THROWS_AS(
        generate_matrix(net, s, positives, nullptr, opts, 0, ExecPolicy::serial),
        InputError);
    CHECK_THROWS_AS(
        generate_matrix(net, s, positives, &short_negs, opts, 2, ExecPolicy::serial),
        ShapeError);
    CHECK(sample_identity(net, s, positives[0], nullptr, opts, 0, 0).empty());
}
