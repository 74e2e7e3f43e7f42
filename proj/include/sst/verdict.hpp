#ifndef SST_VERDICT_HPP
#define SST_VERDICT_HPP

#include <string>

namespace sst {

/*
 * Three-valued outcome for decision procedures that may run into a search
 * horizon. Undetermined is a legal answer, not an error; callers that need
 * a hard yes/no must treat it as a separate case.
 */
enum class Verdict { True, False, Undetermined };

inline bool definite(Verdict v) { return v != Verdict::Undetermined; }

inline Verdict verdict_of(bool b) { return b ? Verdict::True : Verdict::False; }

/* conjunction: False dominates, then Undetermined */
inline Verdict verdict_and(Verdict a, Verdict b) {
  if (a == Verdict::False || b == Verdict::False) return Verdict::False;
  if (a == Verdict::Undetermined || b == Verdict::Undetermined) return Verdict::Undetermined;
  return Verdict::True;
}

inline std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    default: return "undetermined";
  }
}

}  // namespace sst

#endif
