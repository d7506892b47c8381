#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "simdrt/rtree.hpp"

namespace simdrt {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O writes host words and assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'I', 'M', 'D', 'R', 'T', 'R', 'E'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("snapshot truncated");
  return v;
}

}  // namespace

void save_snapshot(const RTree& tree, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tree.layout()));
  put<std::uint32_t>(out, tree.fanout());
  put<std::uint32_t>(out, tree.height());
  put<std::uint64_t>(out, tree.node_count());
  put<std::uint32_t>(out, tree.sorted_on_lo_x() ? 1u : 0u);
  put<std::uint32_t>(out, tree.capacity());
  put<std::uint64_t>(out, tree.node_stride());
  put<std::uint64_t>(out, tree.object_count());
  for (std::uint32_t l = 0; l < tree.height(); ++l) {
    put<std::uint64_t>(out, tree.level_node_count(l));
    const auto bytes = tree.level_bytes(l);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw std::runtime_error("snapshot write failed");
}

RTree load_snapshot(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::runtime_error("not a tree snapshot (bad magic)");
  }
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported snapshot version");

  RTree t;
  const auto layout = get<std::uint32_t>(in);
  if (layout > 2) throw std::runtime_error("snapshot has unknown layout tag");
  t.layout_ = static_cast<Layout>(layout);
  t.fanout_ = get<std::uint32_t>(in);
  check_fanout(t.fanout_);
  const auto height = get<std::uint32_t>(in);
  const auto n_nodes = get<std::uint64_t>(in);
  t.sorted_ = get<std::uint32_t>(in) != 0;
  t.capacity_ = get<std::uint32_t>(in);
  t.stride_ = get<std::uint64_t>(in);
  t.object_count_ = get<std::uint64_t>(in);
  if (t.capacity_ != node_capacity(t.fanout_) || t.stride_ != RTree::kHeaderBytes + 24u * t.capacity_) {
    throw std::runtime_error("snapshot capacity/stride inconsistent with fanout");
  }
  if (height == 0 || height > 64) throw std::runtime_error("snapshot height out of range");

  std::uint64_t seen = 0;
  t.levels_.resize(height);
  for (std::uint32_t l = 0; l < height; ++l) {
    auto& slab = t.levels_[l];
    slab.nodes = get<std::uint64_t>(in);
    seen += slab.nodes;
    if (seen > n_nodes) throw std::runtime_error("snapshot level sizes exceed node count");
    slab.bytes = detail::AlignedBuffer(slab.nodes * t.stride_);
    in.read(reinterpret_cast<char*>(slab.bytes.data()), static_cast<std::streamsize>(slab.bytes.size()));
    if (!in) throw std::runtime_error("snapshot truncated");
  }
  if (seen != n_nodes) throw std::runtime_error("snapshot node count mismatch");
  return t;
}

void save_snapshot(const RTree& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_snapshot(tree, out);
}

RTree load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_snapshot(in);
}

}  // namespace simdrt
