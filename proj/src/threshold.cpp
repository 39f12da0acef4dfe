#include "dtl/threshold.hpp"

namespace dtl {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::P: return "P";
    case Stage::M0: return "m0";
    case Stage::Q0: return "q0";
    case Stage::R0: return "r0";
  }
  return "?";
}

const char* type_name(ThresholdType t) {
  switch (t) {
    case ThresholdType::Regular: return "regular";
    case ThresholdType::ExceptionalI: return "exceptional-1";
    case ThresholdType::ExceptionalII: return "exceptional-2";
    case ThresholdType::ExceptionalIII: return "exceptional-3";
  }
  return "?";
}

std::string case_label(const std::array<bool, 5>& nz) {
  const bool f1 = nz[0], f2 = nz[1], f3 = nz[2], f4 = nz[3], dl = nz[4];
  if (!f3 && !f4) {
    if (!f1) return f2 ? "iv" : "i";
    if (!f2) return dl ? "iii" : "ii";
    return dl ? "vi" : "v";
  }
  if (!f1) return "vii";  // Phi_1 = 0 forces Phi_3 = 0, so Phi_4 != 0 here
  if (!f3) return dl ? "x" : "ix";
  if (!f4) return f2 ? "xi" : "viii";
  return "xii";
}

}  // namespace dtl
