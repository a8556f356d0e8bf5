#pragma once

namespace spten {

enum class ElemOp { add, sub, mul, div };
enum class ScalarOp { add, mul };
enum class MttkrpStrategy { privatize, atomic };

inline const char* to_string(ElemOp op) {
  switch (op) {
    case ElemOp::add: return "add";
    case ElemOp::sub: return "sub";
    case ElemOp::mul: return "mul";
    default: return "div";
  }
}

inline const char* to_string(ScalarOp op) { return op == ScalarOp::add ? "add" : "mul"; }

inline const char* to_string(MttkrpStrategy s) {
  return s == MttkrpStrategy::privatize ? "privatize" : "atomic";
}

}  // namespace spten
