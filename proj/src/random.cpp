#include "rgarch/random.hpp"

namespace rgarch {

std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t sub) noexcept {
    return mix64(mix64(mix64(master) ^ index) ^ (sub * 0xd1b54a32d192ed03ULL));
}

Engine make_stream(std::uint64_t master, std::uint64_t index, std::uint64_t sub) {
    std::seed_seq seq{static_cast<std::uint32_t>(derive_seed(master, index, sub)),
                      static_cast<std::uint32_t>(derive_seed(master, index, sub) >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(sub)};
    return Engine(seq);
}

}  // namespace rgarch
