#pragma once

#include "kab/ts.hpp"

namespace kab {

bool equal_modulo_markers(const ABox& a1, const ABox& a2);

// In every relation TS2 is the (possibly marker-carrying) translated system.

// Exact abox equality, one step against one step.
bool e_bisimilar(const TransitionSystem& ts1, const TransitionSystem& ts2);

// One TS1 step against a TS2 corridor through __state(temp) states ending in a
// temp-free state; aboxes compared modulo markers.
bool j_bisimilar(const TransitionSystem& ts1, const TransitionSystem& ts2);

// One TS1 step against: one mandatory TS2 step, then __state(rep) states, then
// a state without __state(rep).
bool l_bisimilar(const TransitionSystem& ts1, const TransitionSystem& ts2);

// One TS1 step against exactly two TS2 steps.
bool s_bisimilar(const TransitionSystem& ts1, const TransitionSystem& ts2);

}  // namespace kab
