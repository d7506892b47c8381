#include "native_checks.hpp"

#include <array>
#include <cstring>
#include <random>

#include "figure_suite.hpp"
#include "simdrt/native.hpp"

namespace simdrt::testing {

std::vector<std::string> native_figure_suite() {
  std::vector<std::string> out;
  for (auto& s : figure_suite<vk::Native<4>>()) out.push_back("native: " + s);
  for (auto& s : figure_suite<vk::Counting<vk::Native<4>>>()) out.push_back("counting(native): " + s);
  return out;
}

namespace {

template <class T, std::size_t N>
bool same_bits(const std::array<T, N>& x, const std::array<T, N>& y) {
  return std::memcmp(x.data(), y.data(), sizeof(T) * N) == 0;
}

template <int W>
void compare_width(std::mt19937_64& rng, int rounds, std::vector<std::string>& fails) {
  using N = vk::Native<W>;
  using E = vk::Emulated<W>;
  std::uniform_real_distribution<float> val(-4.0f, 4.0f);
  std::uniform_int_distribution<int> lane(0, W - 1);
  std::uniform_int_distribution<std::uint32_t> mask_d(0, (1u << W) - 1);
  std::uniform_int_distribution<std::int32_t> ival(-1000, 1000);
  const std::string tag = "W=" + std::to_string(W) + ": ";
  auto note = [&](bool ok, const char* op) {
    if (!ok) fails.push_back(tag + op);
  };

  for (int r = 0; r < rounds; ++r) {
    std::array<float, 3 * W> mem;
    for (float& x : mem) x = (rng() % 8 == 0) ? mem[0] : val(rng);  // some ties for compares
    std::array<float, W> fa, fb;
    std::array<std::int32_t, W> ia, ib, idx;
    for (int k = 0; k < W; ++k) {
      fa[k] = mem[k];
      fb[k] = mem[W + k];
      ia[k] = ival(rng);
      ib[k] = ival(rng);
      idx[k] = static_cast<std::int32_t>(rng() % (3 * W));
    }
    std::array<std::int32_t, W> perm;
    for (int k = 0; k < W; ++k) perm[k] = lane(rng);
    const vk::Mask m = mask_d(rng);
    const vk::Mask rm = m & E::ref_full;
    const int off = static_cast<int>(rng() % (W + 1));

    const auto na = N::from_array(fa), nb = N::from_array(fb);
    const auto ea = E::from_array(fa), eb = E::from_array(fb);

    note(same_bits(N::to_array(N::load(mem.data() + off)), E::to_array(E::load(mem.data() + off))), "load");
    note(same_bits(N::to_array(N::gather(N::ifrom_array(idx), mem.data())),
                   E::to_array(E::gather(E::ifrom_array(idx), mem.data()))),
         "gather");
    {
      auto nr = N::to_array(N::expand_load(m, mem.data() + off));
      auto er = E::to_array(E::expand_load(m, mem.data() + off));
      bool ok = true;
      for (int k = 0; k < W; ++k) {
        if (((m >> k) & 1u) && nr[k] != er[k]) ok = false;
      }
      note(ok, "expand_load (masked lanes)");
    }
    note(same_bits(N::to_array(N::broadcast(fa[0])), E::to_array(E::broadcast(fa[0]))), "broadcast");
    note(same_bits(N::to_array(N::broadcast_pair(na)), E::to_array(E::broadcast_pair(ea))), "broadcast_pair");
    {
      std::array<float, W> x{}, y{};
      N::store(na, x.data());
      E::store(ea, y.data());
      note(same_bits(x, y), "store");
    }
    {
      std::array<float, W> x{}, y{};
      const int nx = N::compress_store(m, na, x.data());
      const int ny = E::compress_store(m, ea, y.data());
      note(nx == ny && std::memcmp(x.data(), y.data(), sizeof(float) * static_cast<std::size_t>(nx)) == 0,
           "compress_store");
    }
    note(same_bits(N::to_array(N::permute(N::ifrom_array(perm), na)),
                   E::to_array(E::permute(E::ifrom_array(perm), ea))),
         "permute");
    note(same_bits(N::to_array(N::blend(m, na, nb)), E::to_array(E::blend(m, ea, eb))), "blend");
    note(N::template compare<vk::Cmp::lt>(na, nb) == E::template compare<vk::Cmp::lt>(ea, eb), "compare lt");
    note(N::template compare<vk::Cmp::le>(na, nb) == E::template compare<vk::Cmp::le>(ea, eb), "compare le");
    note(N::template compare<vk::Cmp::gt>(na, nb) == E::template compare<vk::Cmp::gt>(ea, eb), "compare gt");
    note(N::template compare<vk::Cmp::ge>(na, nb) == E::template compare<vk::Cmp::ge>(ea, eb), "compare ge");
    note(N::template compare<vk::Cmp::eq>(na, nb) == E::template compare<vk::Cmp::eq>(ea, eb), "compare eq");
    note(same_bits(N::to_array(N::masked_add(m, na, nb)), E::to_array(E::masked_add(m, ea, eb))), "masked_add");

    const auto nia = N::ifrom_array(ia), nib = N::ifrom_array(ib);
    const auto eia = E::ifrom_array(ia), eib = E::ifrom_array(ib);
    note(same_bits(N::ito_array(N::ibroadcast(ia[0])), E::ito_array(E::ibroadcast(ia[0]))), "ibroadcast");
    {
      std::array<std::int32_t, W> x{}, y{};
      N::istore(nia, x.data());
      E::istore(eia, y.data());
      note(same_bits(x, y), "istore");
    }
    note(same_bits(N::ito_array(N::iblend(m, nia, nib)), E::ito_array(E::iblend(m, eia, eib))), "iblend");
    note(same_bits(N::ito_array(N::imasked_add(m, nia, nib)), E::ito_array(E::imasked_add(m, eia, eib))),
         "imasked_add");

    std::array<std::uint64_t, W> refs;
    for (auto& x : refs) x = rng();
    const auto nr = N::load_refs(refs.data());
    const auto er = E::load_refs(refs.data());
    note(same_bits(N::rto_array(nr), E::rto_array(er)), "load_refs");
    {
      std::array<std::uint64_t, W / 2> x{}, y{};
      const int nx = N::compress_store_refs(rm, nr, x.data());
      const int ny = E::compress_store_refs(rm, er, y.data());
      note(nx == ny && std::memcmp(x.data(), y.data(), 8 * static_cast<std::size_t>(nx)) == 0,
           "compress_store_refs");
      N::store_refs(nr, x.data());
      E::store_refs(er, y.data());
      note(same_bits(x, y), "store_refs");
    }
    const int dl = static_cast<int>(rng() % (W / 2));
    note(same_bits(N::rto_array(N::dup_ref(nr, dl)), E::rto_array(E::dup_ref(er, dl))), "dup_ref");
  }
}

}  // namespace

std::vector<std::string> native_lane_equivalence(std::uint64_t seed, int rounds) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> fails;
  compare_width<4>(rng, rounds, fails);
  compare_width<8>(rng, rounds, fails);
  compare_width<16>(rng, rounds, fails);
  return fails;
}

}  // namespace simdrt::testing
