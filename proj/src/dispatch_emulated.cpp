#include "dispatch.hpp"

#include "simdrt/join_kernels.hpp"
#include "simdrt/select_kernels.hpp"

namespace simdrt::dispatch {

namespace {
using Emu = vk::Emulated<kReferenceLanes>;
using Cnt = vk::Counting<Emu>;
}  // namespace

void select_emulated(const RTree& t, const Rect& q, const SelectOptions& o, SelectContext& c) {
  vec_select_into<Emu>(t, q, o, c);
}
void select_counting(const RTree& t, const Rect& q, const SelectOptions& o, SelectContext& c) {
  vec_select_into<Cnt>(t, q, o, c);
}

void join_one_to_many_emulated(const RTree& a, const RTree& b, const JoinOptions& o, JoinContext& c) {
  vec_join_one_to_many_into<Emu>(a, b, o, c);
}
void join_one_to_many_counting(const RTree& a, const RTree& b, const JoinOptions& o, JoinContext& c) {
  vec_join_one_to_many_into<Cnt>(a, b, o, c);
}

void join_many_to_many_emulated(const RTree& a, const RTree& b, const JoinOptions& o, JoinContext& c) {
  vec_join_many_to_many_into<Emu>(a, b, o, c);
}
void join_many_to_many_counting(const RTree& a, const RTree& b, const JoinOptions& o, JoinContext& c) {
  vec_join_many_to_many_into<Cnt>(a, b, o, c);
}

#ifndef SIMDRT_HAVE_NATIVE
void select_native(const RTree&, const Rect&, const SelectOptions&, SelectContext&) { require_native(); }
void join_one_to_many_native(const RTree&, const RTree&, const JoinOptions&, JoinContext&) {
  require_native();
}
void join_many_to_many_native(const RTree&, const RTree&, const JoinOptions&, JoinContext&) {
  require_native();
}
#endif

}  // namespace simdrt::dispatch
