#include "histcl/rng.hpp"

#include <cmath>

namespace histcl {

// splitmix64 finalizer; decorrelates nearby seeds before they reach mt19937_64.
std::uint64_t Rng::mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t id, std::uint64_t sub) {
    std::uint64_t s = mix(seed);
    s = mix(s ^ (id + 0x9e3779b97f4a7c15ULL));
    s = mix(s ^ (sub + 0xd1b54a32d192ed03ULL));
    return Rng(s);
}

double Rng::exponential() {
    // uniform() < 1 always, so the log argument is in (0, 1].
    return -std::log1p(-uniform());
}

}  // namespace histcl
