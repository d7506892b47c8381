#include "dispatch.hpp"

#include "simdrt/join_kernels.hpp"
#include "simdrt/native.hpp"
#include "simdrt/select_kernels.hpp"

namespace simdrt::dispatch {

namespace {
using Nat = vk::Native<kReferenceLanes>;
}  // namespace

void select_native(const RTree& t, const Rect& q, const SelectOptions& o, SelectContext& c) {
  require_native();
  vec_select_into<Nat>(t, q, o, c);
}

void join_one_to_many_native(const RTree& a, const RTree& b, const JoinOptions& o, JoinContext& c) {
  require_native();
  vec_join_one_to_many_into<Nat>(a, b, o, c);
}

void join_many_to_many_native(const RTree& a, const RTree& b, const JoinOptions& o, JoinContext& c) {
  require_native();
  vec_join_many_to_many_into<Nat>(a, b, o, c);
}

}  // namespace simdrt::dispatch
