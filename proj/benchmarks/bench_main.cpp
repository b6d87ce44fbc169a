#include <benchmark/benchmark.h>

#include "ekb/armor.hpp"
#include "ekb/attack.hpp"
#include "ekb/crypto.hpp"
#include "ekb/css.hpp"
#include "ekb/ocr.hpp"

namespace {

void BM_Encrypt(benchmark::State& state)
{
    ekb::SeededRng rng(1);
    const auto key = ekb::generate_key(rng);
    const auto payload = rng.bytes(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ekb::encrypt(payload, ekb::MediaType::Audio, key, rng));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Encrypt)->Arg(64)->Arg(4096)->Arg(1 << 20);

void BM_Decrypt(benchmark::State& state)
{
    ekb::SeededRng rng(2);
    const auto key = ekb::generate_key(rng);
    const auto env = ekb::encrypt(rng.bytes(static_cast<std::size_t>(state.range(0))), ekb::MediaType::Audio, key, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ekb::decrypt(env, key));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Decrypt)->Arg(4096)->Arg(1 << 20);

void BM_RenderRecognize(benchmark::State& state)
{
    ekb::SeededRng rng(3);
    const auto& font = ekb::ocr::GlyphFont::standard();
    const auto text = ekb::armor::encode(rng.bytes(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) {
        const auto img = ekb::ocr::render_armored(text, font);
        benchmark::DoNotOptimize(ekb::ocr::recognize_hex(img, font));
    }
}
BENCHMARK(BM_RenderRecognize)->Arg(37)->Arg(256);

void BM_Dhash(benchmark::State& state)
{
    ekb::SeededRng rng(4);
    ekb::GrayImage img(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)));
    rng.fill(img.pixels);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ekb::css::dhash(img));
    }
}
BENCHMARK(BM_Dhash)->Arg(64)->Arg(512);

void BM_MonteCarlo(benchmark::State& state)
{
    ekb::SeededRng rng(5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ekb::attack::monte_carlo({6, 2, 2}, ekb::attack::Event::CollectAll, 100000, rng));
    }
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

} // namespace

// The distro benchmark_main archive carries LTO bytecode from another GCC.
BENCHMARK_MAIN();
