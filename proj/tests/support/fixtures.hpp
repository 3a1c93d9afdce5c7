#pragma once

#include <string>
#include <vector>

#include "sst/machine.hpp"

namespace fixtures {

/// aⁿ ↦ (ab)ⁿ.
inline sst::Sst t1() {
  return sst::SstBuilder()
      .input({"a"})
      .output({"a", "b"})
      .states({"q0"})
      .vars({"x"})
      .trans("q0", "a", "q0", {{"x", "a b x"}})
      .out("q0", "x")
      .build();
}

/// a^{n1} b^{m1} ⋯ a^{nk} b^{mk} ↦ a^{n1} b ⋯ a^{nk} b.
inline sst::Sst t2() {
  return sst::SstBuilder()
      .input({"a", "b"})
      .output({"a", "b"})
      .states({"p0", "p1"})
      .vars({"y"})
      .trans("p0", "a", "p0", {{"y", "y a"}})
      .trans("p0", "b", "p1", {{"y", "y b"}})
      .trans("p1", "a", "p0", {{"y", "y a"}})
      .trans("p1", "b", "p1", {{"y", "y"}})
      .out("p1", "y")
      .build();
}

/// The composite of t1 and t2 as drawn by hand: copyful but diamond-free.
inline sst::Sst t3() {
  return sst::SstBuilder()
      .input({"a"})
      .output({"a", "b"})
      .states({"r0", "r1"})
      .vars({"z1", "z2", "z3", "z4"})
      .trans("r0", "a", "r1", {{"z1", ""}, {"z2", "a b"}, {"z3", ""}, {"z4", "a b"}})
      .trans("r1", "a", "r1", {{"z1", "z3"}, {"z2", "a b z4"}, {"z3", "z3"}, {"z4", "a b z4"}})
      .out("r1", "z1 z2")
      .build();
}

/// aᵏ ↦ a^(2ᵏ) through x = x a x.
inline sst::Sst doubling() {
  return sst::SstBuilder()
      .input({"a"})
      .output({"a"})
      .states({"q0"})
      .vars({"x"})
      .trans("q0", "a", "q0", {{"x", "x a x"}})
      .out("q0", "x a")
      .build();
}

/// Copies the input into x.
inline sst::Sst identity(const std::vector<std::string>& alphabet) {
  sst::SstBuilder b;
  b.input(alphabet).output(alphabet).states({"q"}).vars({"x"}).out("q", "x");
  for (const auto& s : alphabet) b.trans("q", s, "q", {{"x", "x " + s}});
  return b.build();
}

/// Branching machine p1 →a p2|p3 →a p4..p7 with a distinct marker per edge:
/// βi appends oi to y. b has no transitions.
inline sst::Sst branching() {
  return sst::SstBuilder()
      .input({"a", "b"})
      .output({"o1", "o2", "o3", "o4", "o5", "o6"})
      .states({"p1", "p2", "p3", "p4", "p5", "p6", "p7"})
      .vars({"y"})
      .trans("p1", "a", "p2", {{"y", "y o1"}})
      .trans("p1", "a", "p3", {{"y", "y o2"}})
      .trans("p2", "a", "p4", {{"y", "y o3"}})
      .trans("p2", "a", "p5", {{"y", "y o4"}})
      .trans("p3", "a", "p6", {{"y", "y o5"}})
      .trans("p3", "a", "p7", {{"y", "y o6"}})
      .out("p4", "y")
      .out("p5", "y")
      .out("p6", "y")
      .out("p7", "y")
      .build();
}

/// One a-loop per letter: writes a or b into the output variable.
inline sst::Sst two_loops() {
  return sst::SstBuilder()
      .input({"a"})
      .output({"a", "b"})
      .states({"q"})
      .vars({"x"})
      .trans("q", "a", "q", {{"x", "x a"}})
      .trans("q", "a", "q", {{"x", "x b"}})
      .out("q", "x")
      .build();
}

/// Emits ε on every input.
inline sst::Sst silent() {
  return sst::SstBuilder()
      .input({"a", "b"})
      .output({"a"})
      .states({"q"})
      .vars({"x"})
      .trans("q", "a", "q")
      .trans("q", "b", "q")
      .out("q", "")
      .build();
}

/// Copies on the first a and keeps both copies apart: run-diamond-free, but
/// the output word joins the copies.
inline sst::Sst merging_output() {
  return sst::SstBuilder()
      .input({"a"})
      .output({"c"})
      .states({"q0", "q1"})
      .vars({"x", "y"})
      .trans("q0", "a", "q1", {{"x", "c"}, {"y", "c"}})
      .trans("q1", "a", "q1", {{"x", "x c"}, {"y", "x"}})
      .out("q1", "x y")
      .build();
}

/// Composition inputs whose composite copies on "a" and reads both copies on
/// "b". Converting it without propagating dead reads loses every output.
inline sst::Sst dead_read_first() {
  return sst::SstBuilder()
      .input({"a", "b"})
      .output({"c"})
      .states({"q0"})
      .vars({"x"})
      .trans("q0", "a", "q0", {{"x", "c x"}})
      .trans("q0", "b", "q0", {{"x", "x"}})
      .out("q0", "x")
      .build();
}

inline sst::Sst dead_read_second() {
  return sst::SstBuilder()
      .input({"c"})
      .output({"c"})
      .states({"p0", "p1"})
      .vars({"y"})
      .trans("p0", "c", "p1", {{"y", "y c"}})
      .trans("p1", "c", "p1", {{"y", "y c"}})
      .out("p1", "y")
      .build();
}

/// Source text of t1 in the `.sst` format.
inline const char* t1_source = R"(sst T1 {
  input: a;            # space-separated symbols
  output: a b;
  states: q0;
  initial: q0;
  vars: x;
  trans q0 -a-> q0 { x = 'a' 'b' x; }   # RHS: quoted symbols and bare variables
  out q0 = x;                            # repeatable for set-valued outputs
}
)";

}  // namespace fixtures
