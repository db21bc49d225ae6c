#pragma once

#include <cstdint>

namespace relayq {

// Counter-based generator in the SplitMix64 family: output k of a stream is
// finalize(key + k*GAMMA). A (master seed, stream index) pair fully determines
// the stream, so substreams can be drawn concurrently without shared state.
class RngStream {
public:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : key_(derive_key(master_seed, stream_index)) {}

    std::uint64_t next_u64() {
        counter_ += 1;
        return finalize(key_ + counter_ * kGamma);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    void skip(std::uint64_t n) { counter_ += n; }

    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static std::uint64_t derive_key(std::uint64_t master, std::uint64_t stream) {
        // finalize is a bijection, so distinct stream indices map to distinct
        // keys for a fixed master seed.
        return finalize(master ^ finalize(stream + kGamma));
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace relayq
