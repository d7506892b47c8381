#pragma once

// Backend-specific instantiations. Each backend lives in its own translation
// unit so the native one can be built with wide-register codegen flags.

#include "simdrt/join.hpp"
#include "simdrt/select.hpp"

namespace simdrt::dispatch {

void select_emulated(const RTree&, const Rect&, const SelectOptions&, SelectContext&);
void select_counting(const RTree&, const Rect&, const SelectOptions&, SelectContext&);
void select_native(const RTree&, const Rect&, const SelectOptions&, SelectContext&);

void join_one_to_many_emulated(const RTree&, const RTree&, const JoinOptions&, JoinContext&);
void join_one_to_many_counting(const RTree&, const RTree&, const JoinOptions&, JoinContext&);
void join_one_to_many_native(const RTree&, const RTree&, const JoinOptions&, JoinContext&);

void join_many_to_many_emulated(const RTree&, const RTree&, const JoinOptions&, JoinContext&);
void join_many_to_many_counting(const RTree&, const RTree&, const JoinOptions&, JoinContext&);
void join_many_to_many_native(const RTree&, const RTree&, const JoinOptions&, JoinContext&);

}  // namespace simdrt::dispatch
