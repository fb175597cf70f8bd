#pragma once

namespace heatcons {

enum class Verdict { conservative_generalized, not_conservative, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::conservative_generalized: return "conservative_generalized";
        case Verdict::not_conservative: return "not_conservative";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

}  // namespace heatcons
